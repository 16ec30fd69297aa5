//! CSV rows and log-log slope fits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

pub const CSV_HEADER: &str = "family,param,depth,shift,term,a2,norm,ratio";

/// Rows with `[w]_{A₂}` at or below this are left out of slope fits.
pub const FIT_MIN_A2: f64 = 1.01;
/// Rows with a norm at or below this are left out of slope fits.
pub const FIT_MIN_NORM: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: String,
    pub param: f64,
    pub depth: u32,
    pub shift: String,
    pub term: String,
    pub a2: f64,
    pub norm: f64,
    /// `norm / a2`, or NaN when the norm did not converge
    pub ratio: f64,
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.family,
            num(self.param),
            self.depth,
            self.shift,
            self.term,
            num(self.a2),
            num(self.norm),
            num(self.ratio)
        )
    }

    pub fn parse_csv_line(line: &str) -> Result<SweepRow> {
        let f: Vec<&str> = line.trim_end().split(',').collect();
        anyhow::ensure!(f.len() == 8, "expected 8 fields in `{line}`");
        Ok(SweepRow {
            family: f[0].to_string(),
            param: f[1].parse()?,
            depth: f[2].parse()?,
            shift: f[3].to_string(),
            term: f[4].to_string(),
            a2: f[5].parse()?,
            norm: f[6].parse()?,
            ratio: f[7].parse()?,
        })
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    anyhow::ensure!(lines.next() == Some(CSV_HEADER), "missing CSV header");
    lines.filter(|l| !l.is_empty()).map(SweepRow::parse_csv_line).collect()
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, renamed into place once complete.
pub fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub term: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares of `y` on `x`. `None` for fewer than three points
/// or a degenerate abscissa.
pub fn least_squares(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 1e-12 * (1.0 + mx * mx) * n as f64 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, intercept, r_squared))
}

/// Fits `log norm` against `log a2` for each term, in first-seen order.
/// Terms without a usable fit come back as `Err(notice)`.
pub fn fit_slopes(rows: &[SweepRow]) -> Vec<std::result::Result<SlopeFit, String>> {
    let mut terms: Vec<&str> = Vec::new();
    for r in rows {
        if !terms.contains(&r.term.as_str()) {
            terms.push(&r.term);
        }
    }
    terms
        .into_iter()
        .map(|term| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.term == term && r.a2 > FIT_MIN_A2 && r.norm > FIT_MIN_NORM && r.ratio.is_finite())
                .map(|r| (r.a2.ln(), r.norm.ln()))
                .unzip();
            let points = x.len();
            least_squares(&x, &y)
                .map(|(slope, intercept, r_squared)| SlopeFit {
                    term: term.to_string(),
                    slope,
                    intercept,
                    r_squared,
                    points,
                })
                .ok_or_else(|| format!("{term}: fit omitted ({points} usable points)"))
        })
        .collect()
}

pub fn render_fits(fits: &[std::result::Result<SlopeFit, String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:>10} {:>11} {:>9} {:>6}", "term", "slope", "intercept", "r2", "points");
    for f in fits {
        match f {
            Ok(f) => {
                let _ = writeln!(
                    out,
                    "{:<12} {:>10.4} {:>11.4} {:>9.5} {:>6}",
                    f.term, f.slope, f.intercept, f.r_squared, f.points
                );
            }
            Err(notice) => {
                let _ = writeln!(out, "{notice}");
            }
        }
    }
    out
}
