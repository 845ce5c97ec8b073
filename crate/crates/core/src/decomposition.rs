//! Carleson partitions and the good/bad decomposition.
//!
//! Given a smoothing interval `w*`, a nonnegative frequency `k`, a threshold
//! `lambda` and a size parameter `n`, the partition consists of the maximal
//! proper dyadic subintervals `w'` of `w*` such that
//!
//! 1. the Carleson average `C_{k[w']}(f, w')` is certified `<= lambda`, and
//! 2. a dyadic son of `w'` fails condition 1, or `|w'|` equals the size floor
//!    `2^{-[log2 2n] - 1}`.
//!
//! Acceptance always happens one generation above the stopping intervals, so
//! the construction mirrors a Calderon-Zygmund decomposition with Carleson
//! averages in place of plain means. Average comparisons are conservative: an
//! interval passes only if value + certified truncation tail stays below the
//! threshold.

use dashmap::DashMap;

use crate::dyadic::{
    middle_half_contains_closed, DyadicInterval, Interval, SmoothingInterval, Tick,
};
use crate::fourier::{
    carleson_average, fourier_coeff, gamma_weight, modulation_cell_mean, CarlesonAvg,
    SampledFunction,
};
use crate::operators::max_dyadic_gen;
use crate::values::NormedValue;
use crate::{Error, Result};

/// Generation of the size floor `2^{-[log2 2n]-1}`.
pub fn size_floor_gen(n: u64) -> u8 {
    ((2 * n).ilog2() + 1) as u8
}

/// Memoized Carleson averages keyed by (dyadic interval, integer index).
///
/// One cache serves one sampled function; sharing a cache between different
/// functions silently returns stale values.
pub struct AverageCache {
    m_trunc: usize,
    map: DashMap<(DyadicInterval, i64), CarlesonAvg>,
}

impl AverageCache {
    pub fn new(m_trunc: usize) -> Self {
        Self { m_trunc, map: DashMap::new() }
    }

    pub fn m_trunc(&self) -> usize {
        self.m_trunc
    }

    pub fn average(&self, f: &SampledFunction, w: DyadicInterval, index: i64) -> Result<CarlesonAvg> {
        if let Some(hit) = self.map.get(&(w, index)) {
            return Ok(*hit);
        }
        let avg = carleson_average(f, &w.interval(), index, self.m_trunc)?;
        self.map.insert((w, index), avg);
        Ok(avg)
    }

    /// Amplified average `C*_k(f, w*)` at the integer index `k[w*]`,
    /// maximized over the four dyadic grandsons.
    pub fn amplified(&self, f: &SampledFunction, wstar: &SmoothingInterval, k: u64) -> Result<CarlesonAvg> {
        let index = wstar.freq_index(k) as i64;
        let mut best_value = f64::NEG_INFINITY;
        let mut best_upper = 0.0f64;
        for g in wstar.grandsons()? {
            let avg = self.average(f, g, index)?;
            best_upper = best_upper.max(avg.upper());
            best_value = best_value.max(avg.value);
        }
        Ok(CarlesonAvg { value: best_value, tail: best_upper - best_value })
    }
}

/// Why a partition member was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptReason {
    SonFailure,
    SizeFloor,
}

#[derive(Debug, Clone)]
pub struct PartitionMember {
    pub interval: DyadicInterval,
    /// Cached `C_{k[w']}(f, w')` at this member's own index.
    pub avg: CarlesonAvg,
    pub accepted_by: AcceptReason,
}

/// The Carleson partition `Omega_lambda(k, w*)`.
#[derive(Debug, Clone)]
pub struct CarlesonPartition {
    pub parent: SmoothingInterval,
    pub k: u64,
    pub lambda: f64,
    pub n: u64,
    /// Effective floor generation (clamped to the grandson generation when
    /// the parent is too small for the nominal floor).
    pub floor_gen: u8,
    pub clamped_floor: bool,
    pub members: Vec<PartitionMember>,
}

impl CarlesonPartition {
    pub fn member_intervals(&self) -> Vec<Interval> {
        self.members.iter().map(|m| m.interval.interval()).collect()
    }

    /// Poisson-bump sum of the partition at `x`.
    pub fn bump_sum(&self, x: f64) -> f64 {
        crate::operators::poisson_bump_sum(&self.member_intervals(), x)
    }

    /// Members tile the parent: adjacent, covering, disjoint.
    pub fn covers_parent(&self) -> bool {
        let parent = self.parent.interval();
        if self.members.is_empty() {
            return false;
        }
        let mut cursor = parent.lo;
        for m in &self.members {
            let iv = m.interval.interval();
            if iv.lo != cursor {
                return false;
            }
            cursor = iv.hi;
        }
        cursor == parent.hi
    }
}

/// Build the Carleson partition of `w*`.
///
/// Preconditions: the amplified average `C*_{k[w*]}(f, w*)` is certified below
/// `lambda` (all four grandsons pass condition 1), and the size floor is grid
/// representable.
pub fn build_partition(
    f: &SampledFunction,
    cache: &AverageCache,
    wstar: &SmoothingInterval,
    k: u64,
    lambda: f64,
    n: u64,
) -> Result<CarlesonPartition> {
    if lambda <= 0.0 {
        return Err(Error::Contract(format!("threshold lambda = {lambda} must be positive")));
    }
    if n == 0 {
        return Err(Error::Contract("size parameter n must be positive".into()));
    }
    let grandsons = wstar.grandsons()?;
    let nominal_floor = size_floor_gen(n);
    let grandson_gen = grandsons[0].gen();
    let floor_gen = nominal_floor.max(grandson_gen);
    let clamped_floor = nominal_floor < grandson_gen;
    let grid_gen = max_dyadic_gen(f.grid().num_cells());
    if floor_gen > grid_gen {
        return Err(Error::Capacity(format!(
            "size floor 2^-{floor_gen} is below the grid cell 2^-{grid_gen}"
        )));
    }

    let mut members = Vec::new();
    for g in grandsons {
        let avg = cache.average(f, g, g.freq_index(k) as i64)?;
        if !avg.certified_le(lambda) {
            return Err(Error::Contract(format!(
                "grandson {g} has Carleson average {} + {} > lambda = {lambda}; \
                 the amplified-average precondition fails",
                avg.value, avg.tail
            )));
        }
        refine(f, cache, g, avg, k, lambda, floor_gen, &mut members)?;
    }

    Ok(CarlesonPartition {
        parent: *wstar,
        k,
        lambda,
        n,
        floor_gen,
        clamped_floor,
        members,
    })
}

/// Recursive acceptance. Invariant: `w` already passes condition 1 with the
/// supplied average.
fn refine(
    f: &SampledFunction,
    cache: &AverageCache,
    w: DyadicInterval,
    avg: CarlesonAvg,
    k: u64,
    lambda: f64,
    floor_gen: u8,
    out: &mut Vec<PartitionMember>,
) -> Result<()> {
    if w.gen() == floor_gen {
        out.push(PartitionMember { interval: w, avg, accepted_by: AcceptReason::SizeFloor });
        return Ok(());
    }
    let sons = w.sons()?;
    let son_avgs = [
        cache.average(f, sons[0], sons[0].freq_index(k) as i64)?,
        cache.average(f, sons[1], sons[1].freq_index(k) as i64)?,
    ];
    if son_avgs.iter().any(|a| !a.certified_le(lambda)) {
        out.push(PartitionMember { interval: w, avg, accepted_by: AcceptReason::SonFailure });
        return Ok(());
    }
    refine(f, cache, sons[0], son_avgs[0], k, lambda, floor_gen, out)?;
    refine(f, cache, sons[1], son_avgs[1], k, lambda, floor_gen, out)
}

/// The modulated truncation `f_k = f e^{-2 pi i k t} chi_{w*}` as a sampled
/// function. Each cell carries the exact mean of the phase over the cell, so
/// cell-sum means of `f_k` agree exactly with the phase-quadrature means used
/// for the good part.
pub fn modulated_truncation(f: &SampledFunction, wstar: &Interval, k: u64) -> Result<SampledFunction> {
    let grid = f.grid();
    let cells = grid.cell_range(wstar)?;
    let h = grid.cell_width();
    let mut values = Vec::with_capacity(grid.num_cells());
    for i in 0..grid.num_cells() {
        if cells.contains(&i) {
            let phase = modulation_cell_mean(k as f64, grid.cell_midpoint(i), h);
            values.push(f.cell_value(i).scale(phase));
        } else {
            values.push(f.space().zero_value());
        }
    }
    SampledFunction::from_cells(grid, f.space(), values)
}

/// The good/bad decomposition of `f_k` along a Carleson partition.
#[derive(Debug, Clone)]
pub struct GoodBadSplit {
    pub good: SampledFunction,
    pub bad: SampledFunction,
    /// `f_k[w'] = mean of f e^{-2 pi i k t} over w'`, one per member.
    pub member_means: Vec<NormedValue>,
}

pub fn good_bad_split(f: &SampledFunction, part: &CarlesonPartition) -> Result<GoodBadSplit> {
    let grid = f.grid();
    let space = f.space();
    let wstar = part.parent.interval();
    let f_k = modulated_truncation(f, &wstar, part.k)?;

    let mut good_cells: Vec<NormedValue> = (0..grid.num_cells()).map(|_| space.zero_value()).collect();
    let mut member_means = Vec::with_capacity(part.members.len());
    for m in &part.members {
        let iv = m.interval.interval();
        // the mean of f e^{-2 pi i k t} over w' is the generalized coefficient
        // at frequency k |w'|
        let alpha = part.k as f64 * m.interval.length();
        let mean = fourier_coeff(f, &iv, alpha)?;
        for c in grid.cell_range(&iv)? {
            good_cells[c] = mean.clone();
        }
        member_means.push(mean);
    }
    let good = SampledFunction::from_cells(grid, space, good_cells)?;
    let bad_cells: Vec<NormedValue> = (0..grid.num_cells())
        .map(|i| f_k.cell_value(i).sub(&good.cell_value(i)))
        .collect::<Result<Vec<_>>>()?;
    let bad = SampledFunction::from_cells(grid, space, bad_cells)?;
    Ok(GoodBadSplit { good, bad, member_means })
}

/// Measured sup-bound constant for the good part: the largest ratio
/// `||f_k[w']|| / C_{k[w']}(f, w')` over the members, zero when every
/// numerator vanishes. Also checks the exact gamma-weight bound for members
/// whose frequency `k |w'|` is an integer.
#[derive(Debug, Clone, Copy)]
pub struct GoodPartBound {
    pub max_ratio: f64,
    /// `||f_k[w']|| <= gamma * C + 1e-6` on integer-frequency members.
    pub integer_freq_ok: bool,
    pub integer_freq_members: usize,
}

pub fn good_part_bound_check(
    part: &CarlesonPartition,
    split: &GoodBadSplit,
) -> GoodPartBound {
    let gamma = gamma_weight();
    let mut max_ratio = 0.0f64;
    let mut integer_freq_ok = true;
    let mut integer_members = 0usize;
    for (m, mean) in part.members.iter().zip(&split.member_means) {
        let num = mean.norm();
        if num == 0.0 {
            continue;
        }
        let den = m.avg.value.max(1e-300);
        max_ratio = max_ratio.max(num / den);
        // k |w'| is an integer iff 2^gen divides k (or k = 0)
        let g = m.interval.gen();
        if part.k % (1u64 << g) == 0 {
            integer_members += 1;
            if num > gamma * m.avg.value + 1e-6 {
                integer_freq_ok = false;
            }
        }
    }
    GoodPartBound { max_ratio, integer_freq_ok, integer_freq_members: integer_members }
}

/// Outcome of the smoothing-interval selection at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WstarSelection {
    pub wstar: SmoothingInterval,
    pub member_index: usize,
    /// Whether the selected extension of the generating member points left.
    pub left_extension: bool,
}

/// Select `w*(x)`: among all smoothing extensions of partition members that
/// contain `x` in their (closed) middle half and stay inside the parent,
/// return the longest, breaking ties by leftmost endpoint.
pub fn select_wstar_x(part: &CarlesonPartition, x: Tick) -> Result<WstarSelection> {
    let parent = part.parent.interval();
    if !parent.contains_tick(x) {
        return Err(Error::Contract(format!(
            "x outside the open parent interval ({}, {})",
            parent.lo_f64(),
            parent.hi_f64()
        )));
    }
    let mut best: Option<(i64, i64, WstarSelection)> = None; // (length, lo, selection)
    for (idx, m) in part.members.iter().enumerate() {
        for (side, ext) in m.interval.extensions().into_iter().enumerate() {
            let Some(ext) = ext else { continue };
            let iv = ext.interval();
            if !parent.contains_interval(&iv) {
                continue;
            }
            if !middle_half_contains_closed(&iv, x) {
                continue;
            }
            let key = (iv.length_ticks(), iv.lo);
            let better = match &best {
                None => true,
                Some((blen, blo, _)) => key.0 > *blen || (key.0 == *blen && key.1 < *blo),
            };
            if better {
                best = Some((
                    key.0,
                    key.1,
                    WstarSelection { wstar: ext, member_index: idx, left_extension: side == 0 },
                ));
            }
        }
    }
    best.map(|(_, _, s)| s).ok_or_else(|| {
        Error::Contract(format!(
            "no admissible smoothing extension contains x = {} in its middle half \
             ({} members, parent {})",
            crate::dyadic::tick_to_f64(x),
            part.members.len(),
            part.parent
        ))
    })
}

/// Maximality diagnostics for a selection: whether `w*(x)` is a union of
/// partition members, and whether every member outside `w*(x)` keeps the
/// Whitney distance `dist(x, w') >= |w'|/2`. Exact tick arithmetic.
pub fn selection_properties(
    part: &CarlesonPartition,
    x: Tick,
    wstar: &SmoothingInterval,
) -> (bool, bool) {
    let sel = wstar.interval();
    let mut covered = 0i64;
    let mut union_ok = true;
    let mut whitney = true;
    for m in &part.members {
        let iv = m.interval.interval();
        if sel.contains_interval(&iv) {
            covered += iv.length_ticks();
        } else {
            if iv.lo < sel.hi && sel.lo < iv.hi {
                union_ok = false; // partial overlap
            }
            let dist = (iv.lo - x).max(x - iv.hi).max(0);
            if 2 * dist < iv.length_ticks() {
                whitney = false;
            }
        }
    }
    (union_ok && covered == sel.length_ticks(), whitney)
}
