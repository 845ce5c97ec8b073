//! Dyadic and smoothing intervals of `(-2,2)` with exact endpoints.
//!
//! Every endpoint this crate ever produces is a dyadic rational `m / 2^20` or
//! coarser, so positions are stored as integer ticks of size `2^-TICK_SHIFT`.
//! Containment, adjacency and middle-half tests are exact integer comparisons;
//! conversion to `f64` happens only at quadrature time (and is itself exact,
//! since all ticks fit well inside the 53-bit mantissa).
//!
//! The dyadic family is the standard grid on `(-2,2)`: generation `g`
//! intervals have length `2^-g` and index `0 <= idx < 2^{g+2}`. The family on
//! `(-1,1)` used by interval constructions is the aligned subfamily. Smoothing
//! intervals are unions of two adjacent same-generation dyadic intervals, plus
//! the special root `(-2,2)` whose four grandsons are the unit intervals.

use std::fmt;

use crate::{Error, Result};

/// Integer position in units of `2^-TICK_SHIFT`.
pub type Tick = i64;

/// Tick resolution: one unit of length equals `2^TICK_SHIFT` ticks.
pub const TICK_SHIFT: u32 = 40;

/// Left endpoint of the domain `(-2,2)` in ticks.
pub const DOMAIN_LO: Tick = -(1 << (TICK_SHIFT + 1));

/// Right endpoint of the domain `(-2,2)` in ticks.
pub const DOMAIN_HI: Tick = 1 << (TICK_SHIFT + 1);

/// Finest admitted dyadic generation (intervals of length `2^-20`).
pub const MAX_GEN: u8 = 20;

/// Exact conversion of a tick position to `f64`.
pub fn tick_to_f64(t: Tick) -> f64 {
    t as f64 / (1u64 << TICK_SHIFT) as f64
}

/// A nondegenerate interval with exact tick endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Tick,
    pub hi: Tick,
}

impl Interval {
    pub fn new(lo: Tick, hi: Tick) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Structural(format!("degenerate interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn length_ticks(&self) -> i64 {
        self.hi - self.lo
    }

    pub fn length(&self) -> f64 {
        tick_to_f64(self.hi) - tick_to_f64(self.lo)
    }

    pub fn lo_f64(&self) -> f64 {
        tick_to_f64(self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        tick_to_f64(self.hi)
    }

    pub fn center(&self) -> f64 {
        (self.lo_f64() + self.hi_f64()) / 2.0
    }

    pub fn contains_tick(&self, x: Tick) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn within_domain(&self) -> bool {
        DOMAIN_LO <= self.lo && self.hi <= DOMAIN_HI
    }
}

/// `true` iff `x` lies strictly inside the middle half of `gamma`, i.e.
/// `|x - center| < |gamma|/4`. Exact in tick arithmetic.
pub fn middle_half_contains(gamma: &Interval, x: Tick) -> bool {
    let centered = 4 * x - 2 * (gamma.lo + gamma.hi);
    centered.abs() < gamma.length_ticks()
}

/// Closed variant (`<=`), used when selecting smoothing intervals so that
/// boundary points such as a member's center still admit its own extensions.
pub fn middle_half_contains_closed(gamma: &Interval, x: Tick) -> bool {
    let centered = 4 * x - 2 * (gamma.lo + gamma.hi);
    centered.abs() <= gamma.length_ticks()
}

/// Middle-half test for an arbitrary real point (plain floating comparison;
/// use the tick variants when exactness matters).
pub fn middle_half_contains_f64(gamma: &Interval, x: f64) -> bool {
    (x - gamma.center()).abs() < gamma.length() / 4.0
}

/// The two length-doubling extensions `(2a-b, b)` and `(a, 2b-a)` of `(a, b)`.
pub fn smoothing_extensions(w: &Interval) -> (Interval, Interval) {
    let left = Interval { lo: 2 * w.lo - w.hi, hi: w.hi };
    let right = Interval { lo: w.lo, hi: 2 * w.hi - w.lo };
    (left, right)
}

/// A dyadic interval of `(-2,2)`: generation `gen`, index `idx`, length
/// `2^-gen`, left endpoint `-2 + idx * 2^-gen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    gen: u8,
    idx: u32,
}

impl DyadicInterval {
    pub fn new(gen: u8, idx: u32) -> Result<Self> {
        if gen > MAX_GEN {
            return Err(Error::Capacity(format!("generation {gen} exceeds {MAX_GEN}")));
        }
        if u64::from(idx) >= 1u64 << (gen + 2) {
            return Err(Error::Structural(format!(
                "index {idx} outside 0..{} at generation {gen}",
                1u64 << (gen + 2)
            )));
        }
        Ok(Self { gen, idx })
    }

    pub fn gen(&self) -> u8 {
        self.gen
    }

    pub fn idx(&self) -> u32 {
        self.idx
    }

    pub fn width_ticks(&self) -> i64 {
        1 << (TICK_SHIFT - u32::from(self.gen))
    }

    pub fn interval(&self) -> Interval {
        let w = self.width_ticks();
        let lo = DOMAIN_LO + i64::from(self.idx) * w;
        Interval { lo, hi: lo + w }
    }

    pub fn length(&self) -> f64 {
        1.0 / (1u64 << self.gen) as f64
    }

    /// The two dyadic sons.
    pub fn sons(&self) -> Result<[DyadicInterval; 2]> {
        if self.gen >= MAX_GEN {
            return Err(Error::Capacity(format!("sons of generation {} exceed {MAX_GEN}", self.gen)));
        }
        Ok([
            DyadicInterval { gen: self.gen + 1, idx: 2 * self.idx },
            DyadicInterval { gen: self.gen + 1, idx: 2 * self.idx + 1 },
        ])
    }

    pub fn father(&self) -> Option<DyadicInterval> {
        if self.gen == 0 {
            None
        } else {
            Some(DyadicInterval { gen: self.gen - 1, idx: self.idx / 2 })
        }
    }

    /// The dyadic interval of generation `gen` whose half-open interval
    /// `[a, b)` contains the tick `x`.
    pub fn containing(gen: u8, x: Tick) -> Result<DyadicInterval> {
        if gen > MAX_GEN {
            return Err(Error::Capacity(format!("generation {gen} exceeds {MAX_GEN}")));
        }
        if !(DOMAIN_LO..DOMAIN_HI).contains(&x) {
            return Err(Error::Structural(format!("tick {x} outside the domain")));
        }
        let w = 1i64 << (TICK_SHIFT - u32::from(gen));
        let idx = (x - DOMAIN_LO) / w;
        Ok(DyadicInterval { gen, idx: idx as u32 })
    }

    /// Integer frequency index `[k |w|]` (exact shift).
    pub fn freq_index(&self, k: u64) -> u64 {
        k >> self.gen
    }

    /// Both smoothing extensions that stay inside `(-2,2)`, left first.
    pub fn extensions(&self) -> [Option<SmoothingInterval>; 2] {
        let left = if self.idx >= 1 {
            Some(SmoothingInterval::Pair { gen: self.gen, idx: self.idx - 1 })
        } else {
            None
        };
        let right = if u64::from(self.idx) + 2 <= 1u64 << (self.gen + 2) {
            Some(SmoothingInterval::Pair { gen: self.gen, idx: self.idx })
        } else {
            None
        };
        [left, right]
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = i64::from(self.idx) - (1i64 << (self.gen + 1));
        write!(f, "({}/2^{}, {}/2^{})", lo, self.gen, lo + 1, self.gen)
    }
}

/// A smoothing interval: either the root `(-2,2)` or a union of two adjacent
/// same-generation dyadic intervals, `Pair { gen, idx }` standing for the
/// union of the dyadic intervals `idx` and `idx + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmoothingInterval {
    Root,
    Pair { gen: u8, idx: u32 },
}

impl SmoothingInterval {
    pub fn pair(left: DyadicInterval) -> Result<Self> {
        if u64::from(left.idx) + 2 > 1u64 << (left.gen + 2) {
            return Err(Error::Structural(format!(
                "no right neighbour for {left} at generation {}",
                left.gen
            )));
        }
        Ok(SmoothingInterval::Pair { gen: left.gen, idx: left.idx })
    }

    pub fn interval(&self) -> Interval {
        match *self {
            SmoothingInterval::Root => Interval { lo: DOMAIN_LO, hi: DOMAIN_HI },
            SmoothingInterval::Pair { gen, idx } => {
                let w = 1i64 << (TICK_SHIFT - u32::from(gen));
                let lo = DOMAIN_LO + i64::from(idx) * w;
                Interval { lo, hi: lo + 2 * w }
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            SmoothingInterval::Root => 4.0,
            SmoothingInterval::Pair { gen, .. } => 2.0 / (1u64 << gen) as f64,
        }
    }

    /// The two dyadic halves (for `Root`, the halves `(-2,0)` and `(0,2)` are
    /// not dyadic, so this is only defined for pairs).
    pub fn halves(&self) -> Option<[DyadicInterval; 2]> {
        match *self {
            SmoothingInterval::Root => None,
            SmoothingInterval::Pair { gen, idx } => Some([
                DyadicInterval { gen, idx },
                DyadicInterval { gen, idx: idx + 1 },
            ]),
        }
    }

    /// The four dyadic grandsons: disjoint intervals of length `|w*|/4`
    /// tiling the smoothing interval.
    pub fn grandsons(&self) -> Result<[DyadicInterval; 4]> {
        match *self {
            SmoothingInterval::Root => Ok([
                DyadicInterval { gen: 0, idx: 0 },
                DyadicInterval { gen: 0, idx: 1 },
                DyadicInterval { gen: 0, idx: 2 },
                DyadicInterval { gen: 0, idx: 3 },
            ]),
            SmoothingInterval::Pair { gen, idx } => {
                if gen + 1 > MAX_GEN {
                    return Err(Error::Capacity(format!(
                        "grandsons of a generation-{gen} pair exceed generation {MAX_GEN}"
                    )));
                }
                let base = 2 * idx;
                Ok([
                    DyadicInterval { gen: gen + 1, idx: base },
                    DyadicInterval { gen: gen + 1, idx: base + 1 },
                    DyadicInterval { gen: gen + 1, idx: base + 2 },
                    DyadicInterval { gen: gen + 1, idx: base + 3 },
                ])
            }
        }
    }

    /// Integer frequency index `[k |w*| / 4]` (exact shift).
    pub fn freq_index(&self, k: u64) -> u64 {
        match *self {
            SmoothingInterval::Root => k,
            SmoothingInterval::Pair { gen, .. } => k >> (u32::from(gen) + 1),
        }
    }

    pub fn contains(&self, other: &SmoothingInterval) -> bool {
        self.interval().contains_interval(&other.interval())
    }
}

impl fmt::Display for SmoothingInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SmoothingInterval::Root => write!(f, "(-2/2^0, 2/2^0)"),
            SmoothingInterval::Pair { gen, idx } => {
                let lo = i64::from(idx) - (1i64 << (gen + 1));
                write!(f, "({}/2^{}, {}/2^{})", lo, gen, lo + 2, gen)
            }
        }
    }
}

/// Tick for the real coordinate `v` when `v` is an exact multiple of the tick
/// size; errors otherwise. Convenience for tests and configuration parsing.
pub fn tick_from_f64(v: f64) -> Result<Tick> {
    let scaled = v * (1u64 << TICK_SHIFT) as f64;
    if scaled.fract() != 0.0 || scaled.abs() > (DOMAIN_HI as f64) {
        return Err(Error::Alignment(format!("{v} is not on the tick grid")));
    }
    Ok(scaled as Tick)
}
