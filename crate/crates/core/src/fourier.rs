//! Sampled functions, generalized Fourier coefficients, Carleson averages,
//! the `L(log L)^beta` modular, rearrangements, and smooth-extension
//! expansions.
//!
//! Functions are piecewise constant on a uniform grid over `(-2,2)` with
//! midpoint samples. Characters `e^{-2 pi i alpha t / |w|}` are integrated in
//! closed form over each cell, so quadrature error does not depend on the
//! frequency; the grid enters only through the sampling of `f` itself.

use std::ops::Range;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dyadic::{tick_to_f64, Interval, Tick, DOMAIN_HI, DOMAIN_LO};
use crate::values::{NormedValue, Space};
use crate::{Error, Result};

/// Uniform grid of `n` cells over `(-2,2)`, `n` a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub const MIN_CELLS: usize = 256;
    pub const MAX_CELLS: usize = 1 << 17;

    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < Self::MIN_CELLS || n > Self::MAX_CELLS {
            return Err(Error::Structural(format!(
                "grid size {n} must be a power of two in {}..={}",
                Self::MIN_CELLS,
                Self::MAX_CELLS
            )));
        }
        Ok(Self { n })
    }

    pub fn num_cells(&self) -> usize {
        self.n
    }

    pub fn cell_width_ticks(&self) -> i64 {
        (DOMAIN_HI - DOMAIN_LO) / self.n as i64
    }

    pub fn cell_width(&self) -> f64 {
        4.0 / self.n as f64
    }

    pub fn cell_lo_tick(&self, i: usize) -> Tick {
        DOMAIN_LO + i as i64 * self.cell_width_ticks()
    }

    pub fn cell_midpoint_tick(&self, i: usize) -> Tick {
        self.cell_lo_tick(i) + self.cell_width_ticks() / 2
    }

    pub fn cell_midpoint(&self, i: usize) -> f64 {
        tick_to_f64(self.cell_midpoint_tick(i))
    }

    /// Cell whose half-open interval `[lo, hi)` contains the tick.
    pub fn cell_of_tick(&self, t: Tick) -> Result<usize> {
        if !(DOMAIN_LO..DOMAIN_HI).contains(&t) {
            return Err(Error::Structural(format!("tick {t} outside the domain")));
        }
        Ok(((t - DOMAIN_LO) / self.cell_width_ticks()) as usize)
    }

    /// Index of the cell whose midpoint is exactly `x`; alignment error if
    /// `x` is not a midpoint.
    pub fn midpoint_cell(&self, x: Tick) -> Result<usize> {
        let w = self.cell_width_ticks();
        let off = x - DOMAIN_LO - w / 2;
        if off % w != 0 || !(DOMAIN_LO..DOMAIN_HI).contains(&x) {
            return Err(Error::Alignment(format!("tick {x} is not a cell midpoint")));
        }
        Ok((off / w) as usize)
    }

    /// Cell range `[lo, hi)` of a grid-aligned interval.
    pub fn cell_range(&self, w: &Interval) -> Result<Range<usize>> {
        let cw = self.cell_width_ticks();
        if (w.lo - DOMAIN_LO) % cw != 0 || (w.hi - DOMAIN_LO) % cw != 0 {
            return Err(Error::Alignment(format!(
                "interval [{}, {}] is not grid aligned at {} cells",
                w.lo_f64(),
                w.hi_f64(),
                self.n
            )));
        }
        if !w.within_domain() {
            return Err(Error::Alignment("interval leaves the domain (-2,2)".into()));
        }
        let lo = ((w.lo - DOMAIN_LO) / cw) as usize;
        let hi = ((w.hi - DOMAIN_LO) / cw) as usize;
        Ok(lo..hi)
    }

    /// Cells of the circle `T = (-1/2, 1/2)`.
    pub fn t_cells(&self) -> Range<usize> {
        (3 * self.n / 8)..(5 * self.n / 8)
    }

    /// The interval `(-1/2, 1/2)` as ticks.
    pub fn t_interval(&self) -> Interval {
        Interval { lo: DOMAIN_LO / 4, hi: DOMAIN_HI / 4 }
    }
}

/// Piecewise-constant `X`-valued function on the grid (midpoint samples).
///
/// Component storage is flat (`n * m` complex numbers, `m` components per
/// value) so operator kernels can run over raw slices.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: Grid,
    space: Space,
    comps: Vec<C64>,
    supported_in_t: bool,
}

impl SampledFunction {
    pub fn zero(grid: Grid, space: Space) -> Self {
        let m = space.payload_len();
        Self { grid, space, comps: vec![C64::new(0.0, 0.0); grid.n * m], supported_in_t: true }
    }

    /// Sample a closed-form function of `t` at the cell midpoints. With
    /// `support_in_t` the values outside `(-1/2, 1/2)` are forced to zero.
    pub fn sample<F>(grid: Grid, space: Space, support_in_t: bool, mut eval: F) -> Result<Self>
    where
        F: FnMut(f64) -> Vec<C64>,
    {
        space.validate()?;
        let m = space.payload_len();
        let mut comps = vec![C64::new(0.0, 0.0); grid.n * m];
        let t_range = grid.t_cells();
        for i in 0..grid.n {
            if support_in_t && !t_range.contains(&i) {
                continue;
            }
            let v = eval(grid.cell_midpoint(i));
            if v.len() != m {
                return Err(Error::Structural(format!(
                    "sampler returned {} components, space needs {m}",
                    v.len()
                )));
            }
            comps[i * m..(i + 1) * m].copy_from_slice(&v);
        }
        Ok(Self { grid, space, comps, supported_in_t: support_in_t })
    }

    pub fn from_cells(grid: Grid, space: Space, cells: Vec<NormedValue>) -> Result<Self> {
        if cells.len() != grid.n {
            return Err(Error::Structural(format!(
                "{} cell values for a {}-cell grid",
                cells.len(),
                grid.n
            )));
        }
        let m = space.payload_len();
        let mut comps = vec![C64::new(0.0, 0.0); grid.n * m];
        for (i, v) in cells.iter().enumerate() {
            if v.space() != space {
                return Err(Error::Structural("cell values must share one space tag".into()));
            }
            comps[i * m..(i + 1) * m].copy_from_slice(v.components());
        }
        Ok(Self { grid, space, comps, supported_in_t: false })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn supported_in_t(&self) -> bool {
        self.supported_in_t
    }

    pub fn comp_len(&self) -> usize {
        self.space.payload_len()
    }

    pub fn cell_comps(&self, i: usize) -> &[C64] {
        let m = self.comp_len();
        &self.comps[i * m..(i + 1) * m]
    }

    pub fn cell_value(&self, i: usize) -> NormedValue {
        NormedValue::new(self.space, self.cell_comps(i).to_vec()).expect("consistent payload")
    }

    pub fn cell_norm(&self, i: usize) -> f64 {
        self.space.norm_of(self.cell_comps(i))
    }

    pub fn scaled(&self, theta: f64) -> Self {
        Self {
            grid: self.grid,
            space: self.space,
            comps: self.comps.iter().map(|z| z * theta).collect(),
            supported_in_t: self.supported_in_t,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Per-cell norms as a scalar field.
    pub fn norm_field(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: (0..self.grid.n).map(|i| self.cell_norm(i)).collect(),
        }
    }
}

/// A nonnegative scalar function on the grid (norm fields, level-set data).
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn mean_over(&self, cells: Range<usize>) -> f64 {
        let len = cells.len();
        if len == 0 {
            return 0.0;
        }
        self.values[cells].iter().sum::<f64>() / len as f64
    }
}

/// `sin(z)/z` with a series fallback near zero.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z * z * z * z / 120.0
    } else {
        z.sin() / z
    }
}

/// Exact mean of the character `e^{-i omega t}` over `[lo, hi]`:
/// `e^{-i omega mid} sinc(omega h / 2)`.
fn character_cell_mean(omega: f64, mid: f64, h: f64) -> C64 {
    let phase = C64::new(0.0, -omega * mid).exp();
    phase * sinc(omega * h / 2.0)
}

/// Mean of the modulation `e^{-2 pi i k t}` over one grid cell; multiplying a
/// cell value by this keeps cell means of modulated functions exact.
pub fn modulation_cell_mean(k: f64, mid: f64, h: f64) -> C64 {
    character_cell_mean(2.0 * std::f64::consts::PI * k, mid, h)
}

/// Generalized Fourier coefficient: the mean over `w` of
/// `f(t) e^{-2 pi i alpha t / |w|}`, with the character integrated exactly
/// over each cell against the piecewise-constant `f`.
pub fn fourier_coeff(f: &SampledFunction, w: &Interval, alpha: f64) -> Result<NormedValue> {
    let grid = f.grid();
    let cells = grid.cell_range(w)?;
    let m = f.comp_len();
    let h = grid.cell_width();
    let omega = 2.0 * std::f64::consts::PI * alpha / w.length();
    let mut acc = vec![C64::new(0.0, 0.0); m];
    for i in cells.clone() {
        let factor = character_cell_mean(omega, grid.cell_midpoint(i), h) * h;
        let comps = f.cell_comps(i);
        for (a, z) in acc.iter_mut().zip(comps) {
            *a += z * factor;
        }
    }
    let inv_len = 1.0 / w.length();
    for a in acc.iter_mut() {
        *a *= inv_len;
    }
    NormedValue::new(f.space(), acc)
}

/// Coefficients at many frequencies, built in parallel in input order.
pub fn fourier_coeffs(f: &SampledFunction, w: &Interval, alphas: &[f64]) -> Result<Vec<NormedValue>> {
    f.grid().cell_range(w)?; // surface alignment errors before the parallel part
    alphas
        .par_iter()
        .map(|&a| fourier_coeff(f, w, a))
        .collect()
}

/// Mean of `||f||` over a grid-aligned interval.
pub fn mean_norm(f: &SampledFunction, w: &Interval) -> Result<f64> {
    let cells = f.grid().cell_range(w)?;
    let len = cells.len();
    if len == 0 {
        return Ok(0.0);
    }
    Ok(cells.map(|i| f.cell_norm(i)).sum::<f64>() / len as f64)
}

/// `sum_{mu in Z} 1/(1+mu^2)`, computed once by partial summation plus an
/// integral tail bracket (absolute error below 1e-9).
pub fn gamma_weight() -> f64 {
    static GAMMA: OnceLock<f64> = OnceLock::new();
    *GAMMA.get_or_init(|| {
        let m = 40_000u64;
        let partial: f64 = 1.0 + 2.0 * (1..=m).map(|mu| 1.0 / (1.0 + (mu * mu) as f64)).sum::<f64>();
        // sum_{mu > m} 1/(1+mu^2) lies between the integrals over [m+1, inf)
        // and [m, inf) of dx/(1+x^2)
        let upper = std::f64::consts::FRAC_PI_2 - (m as f64).atan();
        let lower = std::f64::consts::FRAC_PI_2 - ((m + 1) as f64).atan();
        partial + (upper + lower)
    })
}

/// A Carleson average together with its certified truncation tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlesonAvg {
    pub value: f64,
    pub tail: f64,
}

impl CarlesonAvg {
    /// Conservative comparison used by partition conditions.
    pub fn certified_le(&self, lambda: f64) -> bool {
        self.value + self.tail <= lambda
    }

    pub fn upper(&self) -> f64 {
        self.value + self.tail
    }

    pub fn scaled(&self, theta: f64) -> Self {
        Self { value: self.value * theta, tail: self.tail * theta }
    }
}

/// Carleson average `C_k(f, w)`: the weight-`1/(1+mu^2)` average of the
/// coefficient norms at frequencies `k + mu/3`, truncated at `|mu| <=
/// m_trunc` and normalized by [`gamma_weight`]. The certified tail bound is
/// `mean_w ||f|| * (2/m_trunc) / gamma`.
pub fn carleson_average(
    f: &SampledFunction,
    w: &Interval,
    k: i64,
    m_trunc: usize,
) -> Result<CarlesonAvg> {
    if m_trunc < 1 {
        return Err(Error::Contract("m_trunc must be at least 1".into()));
    }
    let gamma = gamma_weight();
    let grid = f.grid();
    let cells = grid.cell_range(w)?;
    let m = f.comp_len();
    let h = grid.cell_width();
    let space = f.space();
    let inv_len = 1.0 / w.length();
    let base = 2.0 * std::f64::consts::PI / w.length();

    let mt = m_trunc as i64;
    let sum: f64 = (-mt..=mt)
        .into_par_iter()
        .map(|mu| {
            let alpha = k as f64 + mu as f64 / 3.0;
            let omega = base * alpha;
            let mut acc = vec![C64::new(0.0, 0.0); m];
            for i in cells.clone() {
                let factor = character_cell_mean(omega, grid.cell_midpoint(i), h) * h;
                let comps = f.cell_comps(i);
                for (a, z) in acc.iter_mut().zip(comps) {
                    *a += z * factor;
                }
            }
            for a in acc.iter_mut() {
                *a *= inv_len;
            }
            space.norm_of(&acc) / (1.0 + (mu * mu) as f64)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();

    let tail = mean_norm(f, w)? * (2.0 / m_trunc as f64) / gamma;
    Ok(CarlesonAvg { value: sum / gamma, tail })
}

/// Amplified average `C*_k(f, w*)`: the maximum of the Carleson averages of
/// the four dyadic grandsons at the given integer index.
pub fn amplified_average(
    f: &SampledFunction,
    wstar: &crate::dyadic::SmoothingInterval,
    k: i64,
    m_trunc: usize,
) -> Result<CarlesonAvg> {
    let grandsons = wstar.grandsons()?;
    let mut best = CarlesonAvg { value: f64::NEG_INFINITY, tail: 0.0 };
    let mut upper = 0.0f64;
    for g in &grandsons {
        let avg = carleson_average(f, &g.interval(), k, m_trunc)?;
        upper = upper.max(avg.upper());
        if avg.value > best.value {
            best = avg;
        }
    }
    Ok(CarlesonAvg { value: best.value, tail: upper - best.value })
}

/// `L(log L)^beta` modular: the mean over `w` of `||f|| (log+ ||f||)^beta`.
pub fn loglog_modular(f: &SampledFunction, w: &Interval, beta: f64) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::Contract(format!("beta = {beta} must be positive")));
    }
    let cells = f.grid().cell_range(w)?;
    let len = cells.len();
    if len == 0 {
        return Ok(0.0);
    }
    let sum: f64 = cells
        .map(|i| {
            let nv = f.cell_norm(i);
            if nv > 1.0 {
                nv * nv.ln().powf(beta)
            } else {
                0.0
            }
        })
        .sum();
    Ok(sum / len as f64)
}

/// Coefficient table over a frequency set (sorted by frequency).
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub interval: Interval,
    pub entries: Vec<(f64, NormedValue)>,
}

impl CoefficientTable {
    pub fn build(f: &SampledFunction, w: &Interval, freqs: &[f64]) -> Result<Self> {
        let mut fs = freqs.to_vec();
        fs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let coeffs = fourier_coeffs(f, w, &fs)?;
        Ok(Self { interval: *w, entries: fs.into_iter().zip(coeffs).collect() })
    }

    /// Integer-frequency table for `|k| <= kmax`.
    pub fn integer_range(f: &SampledFunction, w: &Interval, kmax: i64) -> Result<Self> {
        let freqs: Vec<f64> = (-kmax..=kmax).map(|k| k as f64).collect();
        Self::build(f, w, &freqs)
    }

    pub fn norms(&self) -> Vec<(f64, f64)> {
        self.entries.iter().map(|(k, v)| (*k, v.norm())).collect()
    }
}

/// Decreasing rearrangement of integer-frequency coefficient norms
/// `|k| <= kmax`; ties broken by frequency magnitude, then positive before
/// negative.
pub fn rearrangement(table: &CoefficientTable, kmax: i64) -> Result<Vec<f64>> {
    let mut items: Vec<(f64, i64)> = Vec::with_capacity(2 * kmax as usize + 1);
    for (freq, v) in &table.entries {
        if freq.fract() != 0.0 {
            continue;
        }
        let k = *freq as i64;
        if k.abs() <= kmax {
            items.push((v.norm(), k));
        }
    }
    if items.len() != (2 * kmax + 1) as usize {
        return Err(Error::Contract(format!(
            "table holds {} integer frequencies, need {}",
            items.len(),
            2 * kmax + 1
        )));
    }
    items.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.abs().cmp(&b.1.abs()))
            .then(b.1.cmp(&a.1))
    });
    Ok(items.into_iter().map(|(n, _)| n).collect())
}

/// Quintic ramp with vanishing first and second derivatives at both ends:
/// `u^3 (10 - 15 u + 6 u^2)` on `[0,1]`.
pub fn quintic_ramp(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// C^2 bump equal to 1 on `w' = (a,b)` and 0 outside `3w' = (a-L, b+L)` with
/// quintic ramps on the flanks.
pub fn extension_bump(wprime: &Interval, x: f64) -> f64 {
    let a = wprime.lo_f64();
    let b = wprime.hi_f64();
    let len = b - a;
    if x <= a - len || x >= b + len {
        0.0
    } else if x < a {
        quintic_ramp((x - (a - len)) / len)
    } else if x <= b {
        1.0
    } else {
        quintic_ramp(((b + len) - x) / len)
    }
}

/// Fourier coefficients `gamma_mu`, `|mu| <= m_max`, of the smooth extension
/// `phi * bump` on `3w'`, so that `phi(x) = sum_mu gamma_mu
/// e^{-2 pi i mu x / 3|w'|}` on `w'` up to truncation.
///
/// The integral is a uniform midpoint sum over `3w'`; since the extension is
/// C^2 and compactly supported, the sampling error is pure aliasing and decays
/// like `1/P^2` in the number of sample points.
pub fn smooth_expansion_coeffs<F>(phi: F, wprime: &Interval, m_max: usize) -> Vec<C64>
where
    F: Fn(f64) -> C64 + Sync,
{
    let len3 = 3.0 * wprime.length();
    let lo3 = wprime.lo_f64() - wprime.length();
    let p = (64 * (m_max + 1)).next_power_of_two().max(16_384);
    let h = len3 / p as f64;
    // samples of the extension
    let samples: Vec<C64> = (0..p)
        .into_par_iter()
        .map(|s| {
            let x = lo3 + (s as f64 + 0.5) * h;
            phi(x) * extension_bump(wprime, x)
        })
        .collect();
    // roots of unity table: w^s = e^{2 pi i s / P}
    let roots: Vec<C64> = (0..p)
        .map(|s| C64::new(0.0, 2.0 * std::f64::consts::PI * s as f64 / p as f64).exp())
        .collect();
    let mm = m_max as i64;
    (-mm..=mm)
        .into_par_iter()
        .map(|mu| {
            let mut acc = C64::new(0.0, 0.0);
            let mu_mod = mu.rem_euclid(p as i64) as usize;
            let mut idx = 0usize;
            for s in 0..p {
                acc += samples[s] * roots[idx];
                idx += mu_mod;
                if idx >= p {
                    idx -= p;
                }
            }
            // midpoint offset and absolute-coordinate phase of the character
            let phase = C64::new(
                0.0,
                2.0 * std::f64::consts::PI * mu as f64 * (lo3 / len3 + 0.5 / p as f64),
            )
            .exp();
            acc * phase / p as f64
        })
        .collect()
}

/// Evaluate the truncated expansion `sum_mu gamma_mu e^{-2 pi i mu x / 3L}`.
pub fn eval_expansion(coeffs: &[C64], wprime: &Interval, x: f64) -> C64 {
    let len3 = 3.0 * wprime.length();
    let m_max = (coeffs.len() - 1) / 2;
    let mut acc = C64::new(0.0, 0.0);
    for (j, g) in coeffs.iter().enumerate() {
        let mu = j as f64 - m_max as f64;
        acc += g * C64::new(0.0, -2.0 * std::f64::consts::PI * mu * x / len3).exp();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::tick_from_f64;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(tick_from_f64(lo).unwrap(), tick_from_f64(hi).unwrap()).unwrap()
    }

    fn constant(grid: Grid, z: C64) -> SampledFunction {
        SampledFunction::sample(grid, Space::Scalar, false, |_| vec![z]).unwrap()
    }

    #[test]
    fn gamma_weight_matches_cotangent_identity() {
        // independent closed form: pi * coth(pi)
        let expected = std::f64::consts::PI / std::f64::consts::PI.tanh();
        assert!((gamma_weight() - expected).abs() < 1e-9, "{}", gamma_weight());
    }

    #[test]
    fn coeff_of_constant() {
        let grid = Grid::new(512).unwrap();
        let f = constant(grid, C64::new(0.7, -0.2));
        let w = iv(0.0, 1.0);
        // alpha = 0: the mean itself
        let c0 = fourier_coeff(&f, &w, 0.0).unwrap();
        assert!((c0.components()[0] - C64::new(0.7, -0.2)).norm() < 1e-13);
        // integer alpha: orthogonality kills the mean
        let c3 = fourier_coeff(&f, &w, 3.0).unwrap();
        assert!(c3.norm() < 1e-13);
    }

    #[test]
    fn coeff_at_third_frequency_matches_antiderivative() {
        let grid = Grid::new(1024).unwrap();
        let f = constant(grid, C64::new(1.0, 0.0));
        let w = iv(0.0, 1.0);
        let got = fourier_coeff(&f, &w, 1.0 / 3.0).unwrap().components()[0];
        // closed form: int_0^1 e^{-2 pi i t/3} dt = (1 - e^{-2 pi i/3}) * 3/(2 pi i)
        // and 3/(2 pi i) = -3i/(2 pi)
        let expo = C64::new(0.0, -2.0 * std::f64::consts::PI / 3.0).exp();
        let expected = (C64::new(1.0, 0.0) - expo) * C64::new(0.0, -3.0 / (2.0 * std::f64::consts::PI));
        assert!((got - expected).norm() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn coeff_agrees_with_direct_transform() {
        // independent oracle: per-cell antiderivative differences instead of
        // the midpoint-sinc product
        let grid = Grid::new(512).unwrap();
        let f = SampledFunction::sample(grid, Space::Scalar, false, |t| {
            vec![C64::new((3.0 * t).sin(), t * 0.5)]
        })
        .unwrap();
        let w = iv(-1.0, 1.0);
        for &alpha in &[1.0, 2.0, 5.0, -4.0] {
            let got = fourier_coeff(&f, &w, alpha).unwrap().components()[0];
            let cells = grid.cell_range(&w).unwrap();
            let omega = 2.0 * std::f64::consts::PI * alpha / w.length();
            let mut acc = C64::new(0.0, 0.0);
            for i in cells {
                let lo = tick_to_f64(grid.cell_lo_tick(i));
                let hi = lo + grid.cell_width();
                // int e^{-i omega t} dt = (e^{-i omega hi} - e^{-i omega lo})/(-i omega)
                let int = (C64::new(0.0, -omega * hi).exp() - C64::new(0.0, -omega * lo).exp())
                    / C64::new(0.0, -omega);
                acc += f.cell_comps(i)[0] * int;
            }
            acc /= w.length();
            assert!((got - acc).norm() <= 1e-12 * acc.norm().max(1.0), "alpha {alpha}");
        }
    }

    #[test]
    fn coefficient_norm_below_mean_norm() {
        let grid = Grid::new(512).unwrap();
        let f = SampledFunction::sample(grid, Space::Scalar, true, |t| {
            vec![C64::new((7.0 * t).cos() * 2.0, (11.0 * t).sin())]
        })
        .unwrap();
        let w = grid.t_interval();
        let mean = mean_norm(&f, &w).unwrap();
        for &alpha in &[0.0, 0.5, 1.0 / 3.0, 2.0, 17.0, -8.25] {
            let c = fourier_coeff(&f, &w, alpha).unwrap().norm();
            assert!(c <= mean + 1e-9, "alpha {alpha}: {c} vs {mean}");
        }
    }

    #[test]
    fn carleson_average_of_zero_and_constant() {
        let grid = Grid::new(512).unwrap();
        let zero = SampledFunction::zero(grid, Space::Scalar);
        let w = iv(0.0, 1.0);
        let avg = carleson_average(&zero, &w, 0, 50).unwrap();
        assert_eq!(avg.value, 0.0);
        assert_eq!(avg.tail, 0.0);

        // f = 1 on w, k = 0: oracle from the per-mu closed form
        let f = constant(grid, C64::new(1.0, 0.0));
        let m_trunc = 120usize;
        let avg = carleson_average(&f, &w, 0, m_trunc).unwrap();
        let mut oracle = 0.0;
        for mu in -(m_trunc as i64)..=(m_trunc as i64) {
            let a = mu as f64 / 3.0;
            let norm = if mu == 0 {
                1.0
            } else {
                // |int_0^1 e^{-2 pi i a t} dt| = |sin(pi a)/(pi a)|
                (std::f64::consts::PI * a).sin().abs() / (std::f64::consts::PI * a).abs()
            };
            oracle += norm / (1.0 + (mu * mu) as f64);
        }
        oracle /= gamma_weight();
        assert!((avg.value - oracle).abs() < 1e-10, "{} vs {oracle}", avg.value);
        // bounded by the mean of ||f||
        assert!(avg.value <= mean_norm(&f, &w).unwrap() + 1e-12);
    }

    #[test]
    fn amplified_average_dominates_grandsons() {
        let grid = Grid::new(512).unwrap();
        let f = SampledFunction::sample(grid, Space::Scalar, true, |t| {
            vec![C64::new(if t > 0.0 && t < 0.25 { 3.0 } else { 0.1 }, 0.0)]
        })
        .unwrap();
        let w = crate::dyadic::SmoothingInterval::Pair { gen: 1, idx: 3 }; // (-0.5, 0.5)
        let amp = amplified_average(&f, &w, 2, 60).unwrap();
        for g in w.grandsons().unwrap() {
            let avg = carleson_average(&f, &g.interval(), 2, 60).unwrap();
            assert!(amp.value >= avg.value - 1e-15);
        }
        // support concentrated in one grandson: the max is attained there
        let spike_g = w.grandsons().unwrap()[2]; // (0, 0.25)
        let spike_avg = carleson_average(&f, &spike_g.interval(), 2, 60).unwrap();
        assert!((amp.value - spike_avg.value).abs() < 1e-12);
    }

    #[test]
    fn modular_examples() {
        let grid = Grid::new(512).unwrap();
        let w = iv(-1.0, 1.0);
        let zero = SampledFunction::zero(grid, Space::Scalar);
        assert_eq!(loglog_modular(&zero, &w, 1.5).unwrap(), 0.0);
        // ||f|| <= 1 everywhere: log+ vanishes
        let small = constant(grid, C64::new(0.0, 0.9));
        assert_eq!(loglog_modular(&small, &w, 2.0).unwrap(), 0.0);
        // f = e * v with ||v|| = 1, beta = 1: modular is e
        let e = constant(grid, C64::new(std::f64::consts::E, 0.0));
        assert!((loglog_modular(&e, &w, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn rearrangement_sorts_and_permutes() {
        let grid = Grid::new(512).unwrap();
        let f = SampledFunction::sample(grid, Space::Scalar, true, |t| {
            vec![C64::new((2.0 * t).exp() % 1.7, (5.0 * t).cos())]
        })
        .unwrap();
        let w = grid.t_interval();
        let table = CoefficientTable::integer_range(&f, &w, 8).unwrap();
        let sorted = rearrangement(&table, 8).unwrap();
        assert_eq!(sorted.len(), 17);
        for pair in sorted.windows(2) {
            assert!(pair[0] >= pair[1]);
        }
        let mut orig: Vec<f64> = table.norms().into_iter().map(|(_, n)| n).collect();
        let mut s = sorted.clone();
        orig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in orig.iter().zip(&s) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rearrangement_hand_example() {
        // norms (0.5, 2, 1) at k = (-1, 0, 1) -> (2, 1, 0.5)
        let entries = vec![
            (-1.0, NormedValue::scalar(C64::new(0.5, 0.0))),
            (0.0, NormedValue::scalar(C64::new(0.0, 2.0))),
            (1.0, NormedValue::scalar(C64::new(1.0, 0.0))),
        ];
        let table = CoefficientTable { interval: iv(0.0, 1.0), entries };
        assert_eq!(rearrangement(&table, 1).unwrap(), vec![2.0, 1.0, 0.5]);
    }

    #[test]
    fn smooth_expansion_reconstructs_constant() {
        let w = iv(0.0, 0.25);
        let coeffs = smooth_expansion_coeffs(|_| C64::new(1.0, 0.0), &w, 400);
        // gamma_mu of the zero function vanish
        let zeros = smooth_expansion_coeffs(|_| C64::new(0.0, 0.0), &w, 16);
        assert!(zeros.iter().all(|g| g.norm() == 0.0));
        // reconstruction at midpoints of w'
        for &x in &[0.03125, 0.125, 0.21875] {
            let val = eval_expansion(&coeffs, &w, x);
            assert!((val - C64::new(1.0, 0.0)).norm() < 1e-6, "x={x}: {val}");
        }
        // decay: (1 + mu^2) |gamma_mu| stays bounded
        let m_max = 400i64;
        let peak = coeffs
            .iter()
            .enumerate()
            .map(|(j, g)| (1.0 + ((j as i64 - m_max) * (j as i64 - m_max)) as f64) * g.norm())
            .fold(0.0, f64::max);
        assert!(peak.is_finite() && peak > 0.0);
        assert!(peak < 50.0, "decay constant unexpectedly large: {peak}");
    }

    #[test]
    fn misaligned_interval_is_rejected() {
        let grid = Grid::new(512).unwrap();
        let f = constant(grid, C64::new(1.0, 0.0));
        let w = Interval::new(1, (1 << 40) + 1).unwrap();
        assert!(matches!(fourier_coeff(&f, &w, 0.0), Err(Error::Alignment(_))));
    }
}
