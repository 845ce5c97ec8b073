//! Singular and maximal operators: truncated Hilbert transforms, the maximal
//! Hilbert transform over middle-half subintervals, Hardy-Littlewood and
//! dyadic maximal functions, modified partial sums, and the Poisson-bump sum
//! attached to a partition.
//!
//! Principal values use exact-log cell quadrature: the kernel `1/(x-t)` is
//! integrated in closed form over every cell, and the cell containing `x`
//! contributes zero (its principal value vanishes by midpoint symmetry).

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dyadic::{tick_to_f64, DyadicInterval, Interval, Tick};
use crate::fourier::{SampledFunction, ScalarField};
use crate::values::NormedValue;
use crate::{Error, Result};

/// Signed integral of `dy/(x-y)` over `[lo, hi]` for `x` outside `(lo, hi)`.
#[inline]
fn log_weight(x: f64, lo: f64, hi: f64) -> f64 {
    (x - lo).abs().ln() - (x - hi).abs().ln()
}

/// Truncated Hilbert transform `p.v. int_gamma f(y)/(x-y) dy` at a grid
/// midpoint `x`.
pub fn hilbert(f: &SampledFunction, gamma: &Interval, x: Tick) -> Result<NormedValue> {
    let grid = f.grid();
    let cells = grid.cell_range(gamma)?;
    let xc = grid.midpoint_cell(x)?;
    let xf = tick_to_f64(x);
    let h = grid.cell_width();
    let m = f.comp_len();
    let mut acc = vec![C64::new(0.0, 0.0); m];
    for i in cells {
        if i == xc {
            continue;
        }
        let lo = grid.cell_midpoint(i) - h / 2.0;
        let w = log_weight(xf, lo, lo + h);
        for (a, z) in acc.iter_mut().zip(f.cell_comps(i)) {
            *a += z * w;
        }
    }
    NormedValue::new(f.space(), acc)
}

/// Result of a supremum over a finite candidate family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupResult {
    pub value: f64,
    /// Number of admissible candidates; zero means the supremum family was
    /// empty and the value is 0 by convention.
    pub candidates: usize,
}

/// Cumulative table of the Hilbert kernel against `f` over a cell range, with
/// the cell containing `x` zeroed. Entry `j` holds the signed integral over
/// the first `j` cells, so any subrange is a difference of two entries.
struct HilbertPrefix {
    m: usize,
    comps: Vec<C64>,
}

impl HilbertPrefix {
    fn build(f: &SampledFunction, cells: std::ops::Range<usize>, xc: usize, xf: f64) -> Self {
        let grid = f.grid();
        let h = grid.cell_width();
        let m = f.comp_len();
        let n = cells.len();
        let mut comps = vec![C64::new(0.0, 0.0); (n + 1) * m];
        for (j, i) in cells.enumerate() {
            let w = if i == xc {
                0.0
            } else {
                let lo = grid.cell_midpoint(i) - h / 2.0;
                log_weight(xf, lo, lo + h)
            };
            let src = f.cell_comps(i);
            for c in 0..m {
                comps[(j + 1) * m + c] = comps[j * m + c] + src[c] * w;
            }
        }
        Self { m, comps }
    }

    #[inline]
    fn diff_into(&self, a: usize, b: usize, out: &mut [C64]) {
        for c in 0..self.m {
            out[c] = self.comps[b * self.m + c] - self.comps[a * self.m + c];
        }
    }
}

/// Maximal Hilbert transform `H*_w f(x)`: the supremum of
/// `|| p.v. int_gamma f(y)/(x-y) dy ||` over grid-aligned `gamma` inside `w`
/// with `x` strictly in the middle half of `gamma`.
pub fn maximal_hilbert(f: &SampledFunction, w: &Interval, x: Tick) -> Result<SupResult> {
    let grid = f.grid();
    let cells = grid.cell_range(w)?;
    let xc = grid.midpoint_cell(x)?;
    if !cells.contains(&xc) {
        return Err(Error::Contract(format!(
            "x = {} lies outside the interval [{}, {}]",
            tick_to_f64(x),
            w.lo_f64(),
            w.hi_f64()
        )));
    }
    let prefix = HilbertPrefix::build(f, cells.clone(), xc, tick_to_f64(x));
    Ok(sup_over_middle_half(&prefix, f, cells.len(), xc - cells.start))
}

fn sup_over_middle_half(
    prefix: &HilbertPrefix,
    f: &SampledFunction,
    nw: usize,
    cx: usize,
) -> SupResult {
    let space = f.space();
    let m = f.comp_len();
    let mut scratch = vec![C64::new(0.0, 0.0); m];
    let mut best = 0.0f64;
    let mut count = 0usize;
    let t = 2 * cx as i64 + 1;
    for len in 1..=(nw as i64) {
        // admissible offsets a: 4a strictly between 2t - 3 len and 2t - len
        let lo_num = 2 * t - 3 * len;
        let hi_num = 2 * t - len;
        let mut a = lo_num.div_euclid(4) + 1;
        let hi = (hi_num - 1).div_euclid(4);
        if a < 0 {
            a = 0;
        }
        let hi = hi.min(nw as i64 - len);
        while a <= hi {
            prefix.diff_into(a as usize, (a + len) as usize, &mut scratch);
            let v = space.norm_of(&scratch);
            if v > best {
                best = v;
            }
            count += 1;
            a += 1;
        }
    }
    SupResult { value: best, candidates: count }
}

/// `H*_w f` at every cell midpoint of `w` (parallel over cells).
pub fn maximal_hilbert_field(f: &SampledFunction, w: &Interval) -> Result<Vec<SupResult>> {
    let grid = f.grid();
    let cells = grid.cell_range(w)?;
    let start = cells.start;
    let n = cells.len();
    Ok((0..n)
        .into_par_iter()
        .map(|rel| {
            let xc = start + rel;
            let xf = tick_to_f64(grid.cell_midpoint_tick(xc));
            let prefix = HilbertPrefix::build(f, start..start + n, xc, xf);
            sup_over_middle_half(&prefix, f, n, rel)
        })
        .collect())
}

/// The usual centered maximal Hilbert transform:
/// `sup_r || int_{domain \ (x-r, x+r)} f(y)/(x-y) dy ||` over grid radii.
pub fn centered_maximal_hilbert(f: &SampledFunction, x: Tick) -> Result<f64> {
    let grid = f.grid();
    let n = grid.num_cells();
    let xc = grid.midpoint_cell(x)?;
    let prefix = HilbertPrefix::build(f, 0..n, xc, tick_to_f64(x));
    let m = f.comp_len();
    let space = f.space();
    let mut left = vec![C64::new(0.0, 0.0); m];
    let mut right = vec![C64::new(0.0, 0.0); m];
    let mut scratch = vec![C64::new(0.0, 0.0); m];
    let mut best = 0.0f64;
    for j in 0..n {
        // complement of (x - r, x + r) with r = (j + 1/2) * cell
        let lcut = xc.saturating_sub(j);
        let rcut = (xc + j + 1).min(n);
        prefix.diff_into(0, lcut, &mut left);
        prefix.diff_into(rcut, n, &mut right);
        for c in 0..m {
            scratch[c] = left[c] + right[c];
        }
        let v = space.norm_of(&scratch);
        if v > best {
            best = v;
        }
        if lcut == 0 && rcut == n {
            break;
        }
    }
    Ok(best)
}

/// Hardy-Littlewood maximal function: the supremum of the mean of `||f||`
/// over grid-aligned intervals containing `x`.
pub fn hl_maximal(f: &SampledFunction, x: Tick) -> Result<f64> {
    let grid = f.grid();
    let n = grid.num_cells();
    let xc = grid.midpoint_cell(x)?;
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + f.cell_norm(i);
    }
    let mut best = 0.0f64;
    for a in 0..=xc {
        for b in (xc + 1)..=n {
            let mean = (prefix[b] - prefix[a]) / (b - a) as f64;
            if mean > best {
                best = mean;
            }
        }
    }
    Ok(best)
}

/// Dyadic maximal function of a scalar field: the supremum of means over
/// dyadic intervals of `(-2,2)` containing `x`.
pub fn dyadic_maximal(phi: &ScalarField, x: Tick) -> Result<f64> {
    let grid = phi.grid;
    let n = grid.num_cells();
    grid.midpoint_cell(x)?;
    let cell_gen = max_dyadic_gen(n);
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + phi.values[i];
    }
    let mut best = 0.0f64;
    for gen in 0..=cell_gen {
        let d = DyadicInterval::containing(gen, x)?;
        let cells = grid.cell_range(&d.interval())?;
        let mean = (prefix[cells.end] - prefix[cells.start]) / cells.len() as f64;
        if mean > best {
            best = mean;
        }
    }
    Ok(best)
}

/// Finest dyadic generation that is still grid aligned (one cell).
pub fn max_dyadic_gen(n: usize) -> u8 {
    (n.trailing_zeros() - 2) as u8
}

/// Modified partial sum `S_k f(x, w*) = int_{w*} f(t) e^{-2 pi i k t}/(x-t) dt`
/// with the phase frozen at each cell midpoint and the kernel integrated in
/// closed form. Also returns the discretization-quality indicator
/// `|k| * cell` (phase variation per cell).
pub fn modified_partial_sum(
    f: &SampledFunction,
    k: i64,
    wstar: &Interval,
    x: Tick,
) -> Result<(NormedValue, f64)> {
    let grid = f.grid();
    let h = grid.cell_width();
    let quality = k.unsigned_abs() as f64 * h;
    if quality > 0.5 {
        return Err(Error::Resolution(format!(
            "frequency {k} under-resolved: |k| * cell = {quality} > 0.5"
        )));
    }
    let cells = grid.cell_range(wstar)?;
    let xc = grid.midpoint_cell(x)?;
    if !cells.contains(&xc) {
        return Err(Error::Contract(format!(
            "x = {} lies outside [{}, {}]",
            tick_to_f64(x),
            wstar.lo_f64(),
            wstar.hi_f64()
        )));
    }
    let xf = tick_to_f64(x);
    let m = f.comp_len();
    let mut acc = vec![C64::new(0.0, 0.0); m];
    let two_pi_k = 2.0 * std::f64::consts::PI * k as f64;
    for i in cells {
        if i == xc {
            continue;
        }
        let mid = grid.cell_midpoint(i);
        let lo = mid - h / 2.0;
        let weight = C64::new(0.0, -two_pi_k * mid).exp() * log_weight(xf, lo, lo + h);
        for (a, z) in acc.iter_mut().zip(f.cell_comps(i)) {
            *a += z * weight;
        }
    }
    Ok((NormedValue::new(f.space(), acc)?, quality))
}

/// Sum of Poisson-type bumps, one per partition member:
/// `sum |w'|^2 / ((x - c(w'))^2 + |w'|^2)`.
pub fn poisson_bump_sum(members: &[Interval], x: f64) -> f64 {
    members
        .iter()
        .map(|w| {
            let len = w.length();
            let d = x - w.center();
            len * len / (d * d + len * len)
        })
        .sum()
}

/// Survival measures `(lambda, |{values > lambda}|)` of a field restricted to
/// a cell range; measures are in length units (cell count times cell width).
pub fn survival_measure(
    field: &ScalarField,
    cells: std::ops::Range<usize>,
    thresholds: &[f64],
) -> Vec<(f64, f64)> {
    let h = field.grid.cell_width();
    let slice = &field.values[cells];
    thresholds
        .iter()
        .map(|&lam| {
            let count = slice.iter().filter(|&&v| v > lam).count();
            (lam, count as f64 * h)
        })
        .collect()
}
