use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hardy_core::atoms::{AtomicSumPlan, ScalePolicy};
use hardy_core::grid::{Cube, GridFunction, GridSpec};
use hardy_core::harness::{run_config, Verdict};
use hardy_core::operators::{apply_kernel, KernelSpec};
use hardy_core::rubio::{check_iteration_properties, estimate_maximal_opnorm, CompositeParams, IterationConfig};
use hardy_core::varlebesgue::{luxemburg_norm, ExponentSpec};
use hardy_core::weights::{CubeFamily, WeightClass, WeightSpec};
use hardy_core::{Error, Result};

#[derive(Parser)]
#[command(name = "hardy", version, about = "Numerical checks for weighted and variable Hardy space estimates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone, Copy)]
struct GridArgs {
    /// Dimension, 1 or 2.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Mesh width.
    #[arg(long, default_value_t = 1.0 / 256.0)]
    h: f64,
    /// Half-width of the box.
    #[arg(long = "box", default_value_t = 8.0)]
    half_width: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<GridSpec> {
        match self.dim {
            1 => GridSpec::line(-self.half_width, self.half_width, self.h),
            2 => GridSpec::square(-self.half_width, self.half_width, self.h),
            d => Err(Error::InvalidParameter(format!("dimension {d}"))),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every check in a TOML config; exit code 0 iff all pass.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Weight constant over the standard cube family.
    Constant {
        /// `one`, `const:c`, `power:a` or `maxpow:θ`.
        #[arg(long)]
        weight: String,
        /// `ap:p`, `a1`, `rh:s`, `rhinf` or `apq:p,q`.
        #[arg(long)]
        class: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Luxemburg norm of the indicator of `[a, b]^n`.
    Norm {
        #[arg(long)]
        exponent: String,
        #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [0.0, 1.0])]
        cube: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Apply a kernel to the indicator of `[a, b]^n` and print it at a point.
    Operator {
        #[arg(long)]
        kernel: String,
        #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [-1.0, 1.0])]
        cube: Vec<f64>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        at: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Estimate `‖M‖` on `L^{r(·)}` and check the iteration properties for
    /// the indicator of `[a, b]^n`.
    Rubio {
        #[arg(long, default_value = "const:2")]
        exponent: String,
        #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [-1.0, 1.0])]
        cube: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        witnesses: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Write a random atomic sum manifest.
    Sample {
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        order: i32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "sample")]
        out: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn parse_class(s: &str) -> Result<WeightClass> {
    let bad = || Error::Parse(format!("weight class `{s}`"));
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
    let class = match s.split_once(':') {
        None if s == "a1" => WeightClass::A1,
        None if s == "rhinf" => WeightClass::RhInf,
        Some(("ap", p)) => WeightClass::Ap(num(p)?),
        Some(("rh", r)) => WeightClass::Rh(num(r)?),
        Some(("apq", pq)) => {
            let (p, q) = pq.split_once(',').ok_or_else(bad)?;
            WeightClass::Apq(num(p)?, num(q)?)
        }
        _ => return Err(bad()),
    };
    class.validate()?;
    Ok(class)
}

fn cube_of(grid: &GridSpec, ab: &[f64]) -> Result<Cube> {
    Cube::new(&vec![ab[0]; grid.dim()], ab[1] - ab[0])
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Run { config, out } => {
            let reports = run_config(&config, &out)?;
            let mut ok = true;
            for (name, r) in &reports {
                println!(
                    "{name}: {} (max ratio {:?}, trend {:?}, {} skipped)",
                    r.verdict,
                    r.max_ratio,
                    r.trend,
                    r.skipped.len()
                );
                for p in &r.provenance {
                    println!("  {p}");
                }
                ok &= r.verdict == Verdict::Pass;
            }
            Ok(ok)
        }
        Cmd::Constant { weight, class, grid } => {
            let g = grid.grid()?;
            let w = WeightSpec::parse(&weight)?.sample(&g)?;
            let c = w.constant(parse_class(&class)?, &CubeFamily::standard(&g))?;
            println!("{c}");
            Ok(true)
        }
        Cmd::Norm { exponent, cube, grid } => {
            let g = grid.grid()?;
            let p = ExponentSpec::parse(&exponent)?.sample(&g)?;
            let f = GridFunction::indicator(&g, &cube_of(&g, &cube)?);
            println!("{}", luxemburg_norm(&f, &p)?);
            Ok(true)
        }
        Cmd::Operator { kernel, cube, at, grid } => {
            let g = grid.grid()?;
            let k = KernelSpec::parse(&kernel)?;
            let f = GridFunction::indicator(&g, &cube_of(&g, &cube)?);
            let tf = apply_kernel(&f, &k)?;
            if at.len() != g.dim() {
                return Err(Error::InvalidParameter(format!("--at needs {} coordinates", g.dim())));
            }
            println!("{}", tf.value_at(&at));
            Ok(true)
        }
        Cmd::Rubio {
            exponent,
            cube,
            witnesses,
            seed,
            grid,
        } => {
            let g = grid.grid()?;
            let r = ExponentSpec::parse(&exponent)?.sample(&g)?;
            let est = estimate_maximal_opnorm(&r, witnesses, seed)?;
            println!("B = {} (max observed ratio {})", est.b, est.max_ratio);
            let cfg = IterationConfig::new(est.b)?;
            let h = GridFunction::indicator(&g, &cube_of(&g, &cube)?);
            let rep = check_iteration_properties(&h, &cfg, &r, &CubeFamily::standard(&g), &CompositeParams::default())?;
            println!("(1) h <= Rh: {}", rep.dominates);
            println!("(2) |Rh|/|h| = {} <= {}", rep.norm_ratio, rep.norm_bound);
            println!("(3) [Rh]_A1 = {} <= {}", rep.a1, rep.a1_bound);
            for c in &rep.composites {
                println!("(4) {}: A1 {}, RH_{} {}", c.name, c.a1, c.rh_exponent, c.rh);
            }
            Ok(rep.all_pass())
        }
        Cmd::Sample {
            count,
            order,
            seed,
            out,
            grid,
        } => {
            let g = grid.grid()?;
            let plan = AtomicSumPlan::random(&g, seed, count, order, &ScalePolicy::default())?;
            plan.write_manifest(&g, &out)?;
            println!("wrote {} atoms to {}", count, out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
