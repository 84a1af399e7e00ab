//! Refinement studies of the quantitative lemmas and theorems: seeded
//! instances, per-level ratios, trends, verdicts and CSV/SVG reports.

mod config;
mod instances;
mod lemmas;
mod level;
mod report;
mod tails;
mod theorems;

use std::collections::HashMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

pub use config::{Check, CheckSpec, Config, Instances, Parameters, Target, IDENTITY_TOL};
pub use instances::{instance_rng, nested_cubes, random_cube, random_nonnegative_in, random_signed_shape, Shape};
pub use lemmas::{
    cube_sum_instance, dilated_cubes, fractional_cubes, fs_shapes, gk_instance, grafakos_kalton, lemma_instance,
    vector_maximal,
};
pub use level::{fractional_exponent, hypotheses, LevelData};
pub use report::{trends, unstable_hypotheses, verdict, CheckReport, HypothesisRecord, Row, Verdict, TREND_TOL};
pub use tails::{kernel_for, smoothing_instance, smoothing_plan, tail_atom, tail_instance, DEFAULT_T};
pub use theorems::{apply_to_sum, theorem_instance, theorem_orders, theorem_ratio, theorem_sum, DEFAULT_ATOMS};

use crate::error::Result;

/// `(lhs, rhs)` of instance `i` on one level; `None` when the instance
/// fails a per-instance precondition.
pub fn evaluate(check: &Check, data: &LevelData, i: usize) -> Result<Option<(f64, f64)>> {
    match check.target() {
        Target::L5_1 => smoothing_instance(check, data, i).map(Some),
        Target::L5_2 | Target::L7_1 => tail_instance(check, data, i),
        Target::T1_1 | Target::T1_2 | Target::T1_3 | Target::T1_4 | Target::T1_5 | Target::T1_6 => {
            theorem_instance(check, data, i)
        }
        _ => lemma_instance(check, data, i),
    }
}

/// Runs every level of `check`.
pub fn run_check(check: &Check) -> Result<CheckReport> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut hyps = Vec::new();
    let mut provenance = vec![
        format!("seed {}", check.seed()),
        format!("instances {}", check.count()),
    ];
    for level in 0..check.levels() {
        let data = LevelData::new(check, level)?;
        provenance.push(format!(
            "level {level}: h = {}, shape {:?}",
            data.grid.h(),
            &data.grid.shape()[..data.grid.dim()]
        ));
        for (name, value) in hypotheses(check, &data)? {
            hyps.push(HypothesisRecord { level, name, value });
        }
        let out: Vec<Option<(f64, f64)>> = (0..check.count())
            .into_par_iter()
            .map(|i| evaluate(check, &data, i))
            .collect::<Result<_>>()?;
        for (i, o) in out.into_iter().enumerate() {
            match o {
                Some((l, r)) => rows.push(Row::new(i, level, l, r)),
                None => skipped.push((level, i)),
            }
        }
    }
    rows.sort_by_key(|r| (r.instance, r.level));
    let (max_ratio, trend) = trends(&rows, check.levels());
    let mut v = verdict(&rows, &trend);
    let unstable = unstable_hypotheses(&hyps);
    if !unstable.is_empty() {
        provenance.push(format!("hypothesis constants not refinement-stable: {}", unstable.join(", ")));
        v = Verdict::Indeterminate;
    }
    if rows.is_empty() {
        provenance.push("every instance failed its precondition".into());
        v = Verdict::Indeterminate;
    }
    Ok(CheckReport {
        target: check.target(),
        rows,
        max_ratio,
        trend,
        hypotheses: hyps,
        skipped,
        verdict: v,
        provenance,
    })
}

/// File stem per check: the target id, suffixed when a target repeats.
pub fn report_names(checks: &[Check]) -> Vec<String> {
    let mut seen: HashMap<Target, usize> = HashMap::new();
    checks
        .iter()
        .map(|c| {
            let k = seen.entry(c.target()).or_insert(0);
            *k += 1;
            if *k == 1 {
                c.target().id().to_string()
            } else {
                format!("{}-{}", c.target().id(), k)
            }
        })
        .collect()
}

/// Runs all checks and writes `<name>.csv`, `<name>.svg` and `summary.csv`
/// into `out`.
pub fn run_all(checks: &[Check], out: &Path) -> Result<Vec<(String, CheckReport)>> {
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut reports = Vec::new();
    for (check, name) in checks.iter().zip(report_names(checks)) {
        let r = run_check(check)?;
        r.write(out, &name, ts)?;
        reports.push((name, r));
    }
    report::write_summary(out, &reports, ts)?;
    Ok(reports)
}

/// [`run_all`] on a config file.
pub fn run_config(path: impl AsRef<Path>, out: &Path) -> Result<Vec<(String, CheckReport)>> {
    run_all(&Config::load(path)?, out)
}

#[cfg(test)]
mod tests;
