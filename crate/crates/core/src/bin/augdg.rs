use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use augdg::augmentation::Regime;
use augdg::basis::Family;
use augdg::error::Result;
use augdg::experiments::{
    run_appendix_a, run_augment, run_cfl_sweep, run_convergence, run_counterexample, run_step, solve,
    AugmentChoice, ConvergenceOptions, Counterexample, ExperimentConfig, ResultTable, StepOptions, NONNEG_TOL,
};

#[derive(Parser)]
#[command(name = "augdg", version, about = "Positivity-preserving DG for linear transport with augmented spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Space {
    /// Polynomial family.
    #[arg(long, default_value = "Q", value_parser = parse_family)]
    space: Family,
    /// Polynomial degree.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Degree of the optimized extra basis function (default k + 2).
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the result table as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a constant-data problem on a uniform mesh.
    Solve {
        /// TOML file with the run description; flags given explicitly override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_parser = parse_family)]
        space: Option<Family>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long)]
        nt: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        source: Option<f64>,
        #[arg(long)]
        inflow: Option<f64>,
        #[arg(long)]
        augment: Option<AugmentChoice>,
        #[arg(long)]
        limit: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Manufactured-solution convergence study.
    Convergence {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        space: Space,
        /// Cells per axis, one run each.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value = "off")]
        augment: AugmentChoice,
        /// Also report errors after limiting the augmented solution (needs --augment).
        #[arg(long)]
        limit: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Cell averages of the problems where the standard space fails.
    Counterexample {
        /// S2, Q2, P2 or variable.
        #[arg(default_value = "S2")]
        case: Counterexample,
        #[command(flatten)]
        common: Common,
    },
    /// Step-profile transport with and without the limiter.
    Step {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value = "adaptive")]
        augment: AugmentChoice,
        /// Also write the final-time profile next to --out.
        #[arg(long)]
        profile: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum of the certificate over random cell parameters.
    CflSweep {
        #[command(flatten)]
        space: Space,
        /// low_B or high_B (Q and S only).
        #[arg(long)]
        regime: Option<Regime>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Search for the extra basis function on one cell and time it.
    Augment {
        #[arg(long, default_value = "P", value_parser = parse_family)]
        space: Family,
        /// Degrees to search, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        k: Vec<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 2.0)]
        dx: f64,
        #[arg(long, default_value_t = 2.0)]
        dy: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form Q2 analysis: sign checks and cross-validation.
    AppendixA {
        /// Sample points in B for the sign checks.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Random B values for cross-validation and grid minima.
        #[arg(long, default_value_t = 50)]
        values: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: augdg::error::Error| e.to_string())
}

fn emit(table: &ResultTable, out: Option<&Path>) -> Result<()> {
    println!("{table}");
    if let Some(p) = out {
        table.save(p)?;
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn check(ok: bool, what: &str) -> bool {
    println!("check {}: {what}", if ok { "passed" } else { "FAILED" });
    ok
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve {
            config, dim, space, k, r, nx, ny, nt, alpha, beta, gamma, source, inflow, augment, limit, seed, out,
        } => {
            let mut cfg = match &config {
                Some(p) => ExperimentConfig::from_toml(&std::fs::read_to_string(p)?)?,
                None => ExperimentConfig::default(),
            };
            if let Some(d) = dim {
                cfg.dim = d;
                cfg.extents.resize(d, [0.0, 1.0]);
            }
            macro_rules! set {
                ($($f:ident),*) => { $( if let Some(v) = $f { cfg.$f = v; } )* };
            }
            set!(k, nx, ny, nt, alpha, beta, gamma, source, inflow, augment, seed);
            if let Some(f) = space {
                cfg.family = f;
            }
            if r.is_some() {
                cfg.r = r;
            }
            cfg.limit |= limit;
            let out = out.or_else(|| cfg.out.clone().map(PathBuf::from));
            let o = solve(&cfg)?;
            emit(&o.table, out.as_deref())?;
            println!(
                "min average {:.4e}, min at Lobatto points {:.4e}, augmented cells {}",
                o.min_average, o.min_lobatto, o.augmented_cells
            );
            let mut ok = true;
            if cfg.augment != AugmentChoice::Off {
                ok &= check(o.min_average >= -NONNEG_TOL, "cell averages are non-negative");
            }
            if cfg.limit {
                ok &= check(o.min_lobatto >= -NONNEG_TOL, "limited values are non-negative at Lobatto points");
            }
            Ok(ok)
        }
        Command::Convergence { dim, space, n, augment, limit, common } => {
            let ns = if n.is_empty() {
                if dim == 2 {
                    vec![10, 20, 40, 80]
                } else {
                    vec![2, 4, 8]
                }
            } else {
                n
            };
            let mut opts = ConvergenceOptions::new(dim, space.space, space.k, &ns);
            opts.augment = augment;
            opts.r = space.r;
            opts.limit = limit;
            opts.seed = common.seed;
            let t = run_convergence(&opts)?;
            emit(&t, common.out.as_deref())?;
            if limit {
                let worst = t.column("limited_change").unwrap_or_default().into_iter().fold(0.0, f64::max);
                return Ok(check(worst < 0.02, &format!("limiting changes the error by {:.2}% at most", 100.0 * worst)));
            }
            Ok(true)
        }
        Command::Counterexample { case, common } => {
            let t = run_counterexample(case, common.seed)?;
            emit(&t, common.out.as_deref())?;
            if case == Counterexample::Variable {
                let opt = t.column("optimized").unwrap_or_default();
                let min_v = t.column("min_v").unwrap_or_default();
                let (classic, searched): (Vec<_>, Vec<_>) = opt.iter().zip(&min_v).partition(|(o, _)| **o == 0.0);
                let ok = check(classic.iter().all(|(_, v)| **v < 0.0), "the classic augmentation gives a negative v")
                    & check(searched.iter().all(|(_, v)| **v > 0.0), "the optimized augmentation gives a positive v");
                return Ok(ok);
            }
            let unaug = t.column("unaugmented").unwrap_or_default();
            let aug = t.column("augmented").unwrap_or_default();
            let ok = check(unaug[0] < 0.0, "the standard space gives a negative average")
                & check(aug.iter().all(|&v| v >= -NONNEG_TOL), "the augmented space gives non-negative averages");
            Ok(ok)
        }
        Command::Step { dim, space, augment, profile, common } => {
            let mut opts = StepOptions::new(dim, space.space, space.k, augment);
            opts.r = space.r;
            opts.seed = common.seed;
            let o = run_step(&opts)?;
            emit(&o.summary, common.out.as_deref())?;
            if profile {
                let path = common.out.as_ref().map(|p| p.with_extension("profile.csv"));
                match path {
                    Some(p) => {
                        o.profile.save(&p)?;
                        eprintln!("wrote {}", p.display());
                    }
                    None => print!("{}", o.profile.to_csv_string()?),
                }
            }
            let ok = match o.limited_min_lobatto() {
                Some(m) => check(m >= -NONNEG_TOL, &format!("limited minimum at Lobatto points is {m:.3e}")),
                None => check(false, "a negative cell average prevents limiting"),
            };
            Ok(ok)
        }
        Command::CflSweep { space, regime, samples, common } => {
            let t = run_cfl_sweep(space.space, space.k, regime, space.r, samples, common.seed)?;
            emit(&t, common.out.as_deref())?;
            let worst = t.column("min_v").unwrap_or_default().into_iter().fold(f64::INFINITY, f64::min);
            Ok(check(worst >= -NONNEG_TOL, &format!("smallest certificate minimum is {worst:.3e}")))
        }
        Command::Augment { space, k, r, dim, alpha, beta, gamma, dx, dy, common } => {
            let (t, timings) = run_augment(space, &k, r, (alpha, beta, gamma, dx, dy), dim, common.seed)?;
            emit(&t, common.out.as_deref())?;
            let mut ok = true;
            for s in &timings {
                ok &= check(s.feasible, &format!("{}{} with r = {} in {:.3} s", s.family, s.k, s.r, s.seconds));
            }
            Ok(ok)
        }
        Command::AppendixA { samples, values, common } => {
            let o = run_appendix_a(samples, values, common.seed)?;
            emit(&o.table, common.out.as_deref())?;
            check(o.signs.passed(), &format!("{} sign violations in {} samples", o.signs.violations.len(), o.signs.samples));
            check(o.cross_validation <= 1e-8, &format!("closed form vs linear solve: {:.2e}", o.cross_validation));
            check(o.grid_min >= -1e-10, &format!("grid minimum of v: {:.3e}", o.grid_min));
            Ok(o.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
