// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use anyhow::{Context, Result};
use args::{Cli, Command, Global};
use clap::Parser;
use commands::{Ctx, Outcome};
use nlcone_core::curvature_solver::DEFAULT_ALPHA_TOL;
use nlcone_core::quadrature::{QuadSpec, Tolerances};
use nlcone_core::stability::Normalization;
use nlcone_core::Error;
use output::{Defaults, Meta};
use std::process::ExitCode;

const EXIT_INVALID: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

fn context(g: &Global) -> Result<Ctx> {
    let outer = QuadSpec::outer();
    let tol = Tolerances::from_outer(
        g.quad_abs_tol.unwrap_or(outer.abs_tol),
        g.quad_rel_tol.unwrap_or(outer.rel_tol),
    );
    tol.validate()?;
    if g.jobs == Some(0) {
        return Err(Error::InvalidParameter("--jobs must be at least 1".into()).into());
    }
    Ok(Ctx {
        tol,
        norm: if g.raw {
            Normalization::Raw
        } else {
            Normalization::Table
        },
        samples: g.samples,
        seed: g.seed,
    })
}

fn run(cli: &Cli, ctx: &Ctx) -> Result<Outcome> {
    match &cli.command {
        Command::Alpha(d) => commands::alpha(d, ctx),
        Command::Alpha0 { m, n, tol } => commands::alpha0_cmd(*m, *n, *tol),
        Command::Stability(p) => commands::stability(p, ctx),
        Command::Table1 => commands::table1(ctx),
        Command::Scan(a) => commands::scan(a, ctx),
        Command::McCheck(a) => commands::mc_check(a, ctx),
        Command::JacobiProbe(a) => commands::jacobi(a, ctx),
        Command::SelfCheck => commands::self_check(ctx),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidParameter(_)) => EXIT_INVALID,
        Some(Error::Inconsistency(_)) => EXIT_INCONSISTENT,
        Some(_) => EXIT_NONCONVERGENCE,
        None => 1,
    }
}

fn main_inner(cli: Cli) -> Result<Option<String>> {
    let ctx = context(&cli.global)?;
    let meta = Meta::new(Defaults {
        quad_abs_tol: ctx.tol.outer.abs_tol,
        quad_rel_tol: ctx.tol.outer.rel_tol,
        inner_abs_tol: ctx.tol.inner.abs_tol,
        inner_rel_tol: ctx.tol.inner.rel_tol,
        alpha_tol: DEFAULT_ALPHA_TOL,
        samples: ctx.samples,
        seed: ctx.seed,
        normalization: if ctx.norm == Normalization::Raw { "raw" } else { "table" },
    });
    let outcome = match cli.global.jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .context("building the worker pool")?
            .install(|| run(&cli, &ctx))?,
        None => run(&cli, &ctx)?,
    };
    match &cli.global.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(
                std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            output::emit(&mut f, cli.global.format, &meta, outcome.body.as_ref())?;
        }
        None => output::emit(
            &mut std::io::stdout().lock(),
            cli.global.format,
            &meta,
            outcome.body.as_ref(),
        )?,
    }
    Ok(outcome.inconsistency)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(why)) => {
            eprintln!("nlcone: inconsistency: {why}");
            ExitCode::from(EXIT_INCONSISTENT)
        }
        Err(e) => {
            eprintln!("nlcone: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
