//! Distinct degenerate levels (e.g. Landau levels) of a Hermitian block,
//! found from eigenvalue counts instead of individual eigenvectors.

use crate::error::{Error, Result};
use crate::lattice::CsrMatrix;
use crate::linalg::count_below;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct LevelSearch {
    /// Coarse scan step.
    pub step: f64,
    /// Final window width.
    pub resolution: f64,
    /// Minimum number of eigenvalues for a window to count as a level.
    pub min_multiplicity: usize,
}

struct Counter<'a> {
    m: &'a CsrMatrix,
    calls: usize,
}

impl Counter<'_> {
    fn count(&mut self, sigma: f64) -> Result<usize> {
        self.calls += 1;
        count_below(self.m, sigma)
    }
}

fn refine(c: &mut Counter, a: f64, b: f64, na: usize, nb: usize, opts: &LevelSearch, out: &mut Vec<Level>) -> Result<bool> {
    if nb < na + opts.min_multiplicity {
        return Ok(false);
    }
    if b - a <= opts.resolution {
        out.push(Level { value: 0.5 * (a + b), multiplicity: nb - na });
        return Ok(true);
    }
    let mid = 0.5 * (a + b);
    let nm = c.count(mid)?;
    let left = refine(c, a, mid, na, nm, opts, out)?;
    let right = refine(c, mid, b, nm, nb, opts, out)?;
    if left || right {
        return Ok(true);
    }
    // a cluster sitting on the midpoint is split between the halves
    let (qa, qb) = (a + 0.25 * (b - a), b - 0.25 * (b - a));
    let (nqa, nqb) = (c.count(qa)?, c.count(qb)?);
    refine(c, qa, qb, nqa, nqb, opts, out)
}

/// The `count` lowest levels of `m` in [lo, hi), ascending.
///
/// A level is a window no wider than `resolution` holding at least
/// `min_multiplicity` eigenvalues; the reported value is the window centre.
pub fn distinct_levels(m: &CsrMatrix, lo: f64, hi: f64, count: usize, opts: &LevelSearch) -> Result<Vec<Level>> {
    if !(hi > lo) || opts.step <= 0.0 || opts.resolution <= 0.0 || opts.min_multiplicity == 0 {
        return Err(Error::IncompatibleParameters("bad level search window".into()));
    }
    let mut c = Counter { m, calls: 0 };
    let mut out = Vec::new();
    let mut a = lo;
    let mut na = c.count(a)?;
    while a < hi && out.len() < count {
        let b = (a + opts.step).min(hi);
        let nb = c.count(b)?;
        let mut found = Vec::new();
        refine(&mut c, a, b, na, nb, opts, &mut found)?;
        out.extend(found);
        a = b;
        na = nb;
    }
    out.sort_by(|x, y| x.value.partial_cmp(&y.value).unwrap());
    let mut merged = merge_levels(out, 0.02, opts.resolution);
    merged.truncate(count);
    Ok(merged)
}

/// Merge neighbouring levels closer than `rel` relative difference, or
/// closer than `abs` (which decides for levels near zero).
pub fn merge_levels(levels: Vec<Level>, rel: f64, abs: f64) -> Vec<Level> {
    let mut out: Vec<Level> = Vec::new();
    for l in levels {
        if let Some(last) = out.last_mut() {
            let d = (l.value - last.value).abs();
            if d <= abs || d <= rel * l.value.abs().max(last.value.abs()) {
                let total = last.multiplicity + l.multiplicity;
                last.value = (last.value * last.multiplicity as f64 + l.value * l.multiplicity as f64) / total as f64;
                last.multiplicity = total;
                continue;
            }
        }
        out.push(l);
    }
    out
}

/// Levels of a full sorted spectrum: runs of eigenvalues whose neighbours
/// are within `gap`, keeping runs of at least `min_multiplicity`. The value
/// is the median of the run.
pub fn cluster_spectrum(values: &[f64], gap: f64, min_multiplicity: usize) -> Vec<Level> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            let run = &values[start..i];
            if run.len() >= min_multiplicity {
                out.push(Level { value: run[run.len() / 2], multiplicity: run.len() });
            }
            start = i;
        }
    }
    out
}
