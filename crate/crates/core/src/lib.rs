// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone_model;
pub mod curvature_solver;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod reference;
pub mod stability;

pub use error::{Error, Result};

pub use cone_model::{AngularKernel, ConeParams};
pub use curvature_solver::{ApertureSolution, CurvatureRoute};
pub use oracle::{McEstimate, SurfaceIntegrand};
pub use quadrature::{IntegralResult, QuadSpec, Tolerances};
pub use stability::{JacobiProbe, Normalization, StabilityReport, ThresholdBracket, Verdict};
