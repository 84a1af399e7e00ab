use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::Target;
use crate::error::Result;

/// Largest admissible ratio of max ratios between consecutive levels.
pub const TREND_TOL: f64 = 1.10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// One CSV row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Row {
    pub instance: usize,
    pub level: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl Row {
    pub fn new(instance: usize, level: u32, lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        };
        Self {
            instance,
            level,
            lhs,
            rhs,
            ratio,
        }
    }
}

/// Hypothesis constants recorded on one level.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisRecord {
    pub level: u32,
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub target: Target,
    /// Sorted by `(instance, level)`.
    pub rows: Vec<Row>,
    pub max_ratio: Vec<f64>,
    pub trend: Vec<f64>,
    pub hypotheses: Vec<HypothesisRecord>,
    /// Instances skipped because a per-instance precondition failed.
    pub skipped: Vec<(u32, usize)>,
    pub verdict: Verdict,
    pub provenance: Vec<String>,
}

/// `b / a`, with `0/0 = 1`.
fn step(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else {
        b / a
    }
}

/// Max ratio per level and the trends between consecutive levels.
pub fn trends(rows: &[Row], levels: u32) -> (Vec<f64>, Vec<f64>) {
    let mut max = vec![0.0f64; levels as usize];
    for r in rows {
        let m = &mut max[r.level as usize];
        // NaN must not be swallowed by max
        *m = if r.ratio.is_nan() { f64::NAN } else { m.max(r.ratio) };
    }
    let trend = max.windows(2).map(|w| step(w[0], w[1])).collect();
    (max, trend)
}

/// Hypothesis constants that are non-finite or not refinement-stable.
pub fn unstable_hypotheses(h: &[HypothesisRecord]) -> Vec<String> {
    let mut names: Vec<&str> = h.iter().map(|r| r.name.as_str()).collect();
    names.dedup();
    let mut out = Vec::new();
    for name in names {
        let vals: Vec<f64> = h.iter().filter(|r| r.name == name).map(|r| r.value).collect();
        let bad = vals.iter().any(|v| !v.is_finite()) || vals.windows(2).any(|w| step(w[0], w[1]) > TREND_TOL);
        if bad {
            out.push(format!("{name} = {vals:?}"));
        }
    }
    out
}

/// Verdict from the ratios alone: a trend above [`TREND_TOL`] is
/// indeterminate, and a failure only once it persists over two
/// consecutive refinements; any non-finite ratio fails.
pub fn verdict(rows: &[Row], trend: &[f64]) -> Verdict {
    if rows.iter().any(|r| !r.ratio.is_finite()) {
        return Verdict::Fail;
    }
    let high: Vec<bool> = trend.iter().map(|t| !(*t <= TREND_TOL)).collect();
    if high.windows(2).any(|w| w[0] && w[1]) {
        Verdict::Fail
    } else if high.iter().any(|h| *h) {
        Verdict::Indeterminate
    } else {
        Verdict::Pass
    }
}

/// Shortest round-trip form, so that equal values print equal bytes.
fn num(v: f64) -> String {
    format!("{v}")
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// CSV body (header and rows) without the timestamp line.
    pub fn csv_body(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["instance", "level", "lhs", "rhs", "ratio"])?;
        for r in &self.rows {
            w.write_record([
                r.instance.to_string(),
                r.level.to_string(),
                num(r.lhs),
                num(r.rhs),
                num(r.ratio),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Trend plot of max ratio against level.
    pub fn svg(&self) -> String {
        let (w, h, pad) = (480.0, 320.0, 48.0);
        let n = self.max_ratio.len().max(2) as f64 - 1.0;
        let finite: Vec<f64> = self.max_ratio.iter().cloned().filter(|v| v.is_finite()).collect();
        let top = finite.iter().cloned().fold(0.0, f64::max).max(1e-300) * 1.1;
        let pts: Vec<String> = self
            .max_ratio
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, v)| {
                let x = pad + (w - 2.0 * pad) * i as f64 / n;
                let y = h - pad - (h - 2.0 * pad) * v / top;
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let mut s = String::new();
        s += &format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n");
        s += &format!("<title>{} ({})</title>\n", self.target, self.verdict);
        s += &format!(
            "<line x1=\"{pad}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{y0}\" stroke=\"black\"/>\n",
            y0 = h - pad,
            x1 = w - pad
        );
        s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">level</text>\n", w / 2.0, h - 12.0);
        s += &format!(
            "<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">max ratio</text>\n",
            h / 2.0,
            h / 2.0
        );
        s += &format!("<text x=\"{}\" y=\"{}\" font-size=\"10\">{:.4}</text>\n", 4.0, pad, top);
        for i in 0..self.max_ratio.len() {
            let x = pad + (w - 2.0 * pad) * i as f64 / n;
            s += &format!("<text x=\"{x:.2}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{i}</text>\n", h - pad + 14.0);
        }
        s += &format!(
            "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>\n",
            pts.join(" ")
        );
        s += "</svg>\n";
        s
    }

    /// Writes `<name>.csv` (with a timestamp first line) and `<name>.svg`.
    pub fn write(&self, dir: &Path, name: &str, timestamp: u64) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut f = fs::File::create(dir.join(format!("{name}.csv")))?;
        writeln!(f, "# generated-unix: {timestamp}")?;
        f.write_all(self.csv_body()?.as_bytes())?;
        fs::write(dir.join(format!("{name}.svg")), self.svg())?;
        Ok(())
    }
}

/// `summary.csv`: one line per check.
pub fn write_summary(dir: &Path, reports: &[(String, CheckReport)], timestamp: u64) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "target", "verdict", "max_ratio", "trend", "skipped", "hypotheses"])?;
    for (name, r) in reports {
        let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";");
        let hyp = r
            .hypotheses
            .iter()
            .map(|h| format!("{}@{}={}", h.name, h.level, num(h.value)))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            name.clone(),
            r.target.to_string(),
            r.verdict.to_string(),
            join(&r.max_ratio),
            join(&r.trend),
            r.skipped.len().to_string(),
            hyp,
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    let mut f = fs::File::create(dir.join("summary.csv"))?;
    writeln!(f, "# generated-unix: {timestamp}")?;
    f.write_all(&bytes)?;
    Ok(())
}
