//! Elements of Thompson's group F in the model on `[0, ∞)`.
//!
//! A map is stored as its finite breakpoint list together with an integer
//! tail offset: beyond the last breakpoint the map is `t ↦ t + tail_offset`.
//! Breakpoints are dyadic, segment slopes are exact powers of two, and the
//! stored representation is minimal, so `==` decides equality of maps.
//!
//! Composition is written left to right: the product `fg` acts as
//! `t ↦ g(f(t))`. Every operation in this crate follows that convention.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::Dyadic;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PLMapError {
    #[error("breakpoint list is empty")]
    Empty,
    #[error("first breakpoint must be (0, 0)")]
    FirstBreakNotOrigin,
    #[error("breakpoint coordinates must be strictly increasing (violation at index {0})")]
    NotIncreasing(usize),
    #[error("segment {0} slope is not a power of two")]
    SlopeNotPowerOfTwo(usize),
    #[error("last breakpoint does not match tail translation")]
    TailMismatch,
    #[error("map evaluated at a negative argument")]
    NegativeArgument,
    #[error("operation requires a bounded region")]
    UnboundedRegion,
    #[error("one-sided slope from the left requires t > 0")]
    NoLeftSlopeAtZero,
    #[error("fixed point at a non-dyadic coordinate; support has no dyadic description")]
    NonDyadicFixedPoint,
    #[error("interval endpoints must satisfy lo < hi")]
    BadInterval,
}

/// An interval of the half-line, with a possibly infinite right end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: Dyadic,
    /// `None` marks +∞.
    pub hi: Option<Dyadic>,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn closed(lo: Dyadic, hi: Dyadic) -> Result<Self, PLMapError> {
        if lo >= hi {
            return Err(PLMapError::BadInterval);
        }
        Ok(Interval {
            lo,
            hi: Some(hi),
            lo_open: false,
            hi_open: false,
        })
    }

    pub fn open(lo: Dyadic, hi: Dyadic) -> Result<Self, PLMapError> {
        if lo >= hi {
            return Err(PLMapError::BadInterval);
        }
        Ok(Interval {
            lo,
            hi: Some(hi),
            lo_open: true,
            hi_open: true,
        })
    }

    /// The open ray `(lo, ∞)`.
    pub fn beyond(lo: Dyadic) -> Self {
        Interval {
            lo,
            hi: None,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_some()
    }

    pub fn contains(&self, t: &Dyadic) -> bool {
        let lo_ok = if self.lo_open {
            *t > self.lo
        } else {
            *t >= self.lo
        };
        let hi_ok = match &self.hi {
            None => true,
            Some(hi) => {
                if self.hi_open {
                    *t < *hi
                } else {
                    *t <= *hi
                }
            }
        };
        lo_ok && hi_ok
    }

    /// Containment of `self` in `other`, comparing endpoints.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = match (self.lo_open, other.lo_open) {
            (false, true) => self.lo > other.lo,
            _ => self.lo >= other.lo,
        };
        let hi_ok = match (&self.hi, &other.hi) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => match (self.hi_open, other.hi_open) {
                (false, true) => a < b,
                _ => a <= b,
            },
        };
        lo_ok && hi_ok
    }

    /// Whether the two intervals share at least one point.
    pub fn overlaps(&self, other: &Interval) -> bool {
        let left_of = |a: &Interval, b: &Interval| match &a.hi {
            None => false,
            Some(ahi) => {
                if a.hi_open || b.lo_open {
                    *ahi <= b.lo
                } else {
                    *ahi < b.lo
                }
            }
        };
        !left_of(self, other) && !left_of(other, self)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lb = if self.lo_open { '(' } else { '[' };
        match &self.hi {
            None => write!(f, "{}{}, inf)", lb, self.lo),
            Some(hi) => {
                let rb = if self.hi_open { ')' } else { ']' };
                write!(f, "{}{}, {}{}", lb, self.lo, hi, rb)
            }
        }
    }
}

/// Which one-sided derivative to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A piecewise-linear homeomorphism of `[0, ∞)` with dyadic breakpoints,
/// power-of-two slopes and eventual translation by `tail_offset`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLMap {
    breaks: Vec<(Dyadic, Dyadic)>,
    // log2 of the slope of each segment between consecutive breakpoints
    seg_slopes: Vec<i64>,
    tail_offset: i64,
}

#[derive(Serialize, Deserialize)]
struct PLMapRepr {
    breaks: Vec<(Dyadic, Dyadic)>,
    tail_offset: i64,
}

impl Serialize for PLMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PLMapRepr {
            breaks: self.breaks.clone(),
            tail_offset: self.tail_offset,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PLMapRepr::deserialize(d)?;
        PLMap::from_breaks(repr.breaks, repr.tail_offset).map_err(serde::de::Error::custom)
    }
}

impl PLMap {
    pub fn identity() -> Self {
        PLMap {
            breaks: vec![(Dyadic::zero(), Dyadic::zero())],
            seg_slopes: vec![],
            tail_offset: 0,
        }
    }

    /// Validates and canonicalizes a breakpoint table.
    ///
    /// Interior breakpoints where the slope does not change are dropped, as
    /// is a final breakpoint whose incoming slope is already 1.
    pub fn from_breaks(
        breaks: Vec<(Dyadic, Dyadic)>,
        tail_offset: i64,
    ) -> Result<Self, PLMapError> {
        if breaks.is_empty() {
            return Err(PLMapError::Empty);
        }
        if !breaks[0].0.is_zero() || !breaks[0].1.is_zero() {
            return Err(PLMapError::FirstBreakNotOrigin);
        }
        let mut slopes = Vec::with_capacity(breaks.len());
        for i in 1..breaks.len() {
            let (x0, y0) = &breaks[i - 1];
            let (x1, y1) = &breaks[i];
            if x1 <= x0 || y1 <= y0 {
                return Err(PLMapError::NotIncreasing(i));
            }
            let dy = y1 - y0;
            let dx = x1 - x0;
            match dy.ratio_pow2(&dx) {
                Some(s) => slopes.push(s),
                None => return Err(PLMapError::SlopeNotPowerOfTwo(i - 1)),
            }
        }
        let (xl, yl) = breaks.last().unwrap();
        if &(xl + &Dyadic::from(tail_offset)) != yl {
            return Err(PLMapError::TailMismatch);
        }
        // minimality: keep break i iff slope changes there (tail counts as slope 1)
        slopes.push(0);
        let mut kept = Vec::with_capacity(breaks.len());
        let mut kept_slopes = Vec::new();
        for (i, pt) in breaks.into_iter().enumerate() {
            if i == 0 || slopes[i - 1] != slopes[i] {
                if i > 0 {
                    kept_slopes.push(slopes[i - 1]);
                }
                kept.push(pt);
            }
        }
        Ok(PLMap {
            breaks: kept,
            seg_slopes: kept_slopes,
            tail_offset,
        })
    }

    pub fn breaks(&self) -> &[(Dyadic, Dyadic)] {
        &self.breaks
    }

    pub fn tail_offset(&self) -> i64 {
        self.tail_offset
    }

    pub fn is_identity(&self) -> bool {
        self.breaks.len() == 1 && self.tail_offset == 0
    }

    /// Image of `t`, assuming `t ≥ 0`.
    fn image(&self, t: &Dyadic) -> Dyadic {
        debug_assert!(!t.is_negative());
        let n = self.breaks.len();
        // number of breakpoints with x <= t
        let j = self.breaks.partition_point(|(x, _)| x <= t);
        if j == n {
            return t + &Dyadic::from(self.tail_offset);
        }
        debug_assert!(j >= 1);
        let (x0, y0) = &self.breaks[j - 1];
        y0 + &(t - x0).mul_pow2(self.seg_slopes[j - 1])
    }

    /// Preimage of `u`, assuming `u ≥ 0`.
    fn preimage(&self, u: &Dyadic) -> Dyadic {
        debug_assert!(!u.is_negative());
        let n = self.breaks.len();
        let j = self.breaks.partition_point(|(_, y)| y <= u);
        if j == n {
            return u - &Dyadic::from(self.tail_offset);
        }
        debug_assert!(j >= 1);
        let (x0, y0) = &self.breaks[j - 1];
        x0 + &(u - y0).mul_pow2(-self.seg_slopes[j - 1])
    }

    /// Exact image of `t` under the map. Negative arguments are rejected.
    pub fn evaluate(&self, t: &Dyadic) -> Result<Dyadic, PLMapError> {
        if t.is_negative() {
            return Err(PLMapError::NegativeArgument);
        }
        Ok(self.image(t))
    }

    /// The product `self · g` under the right-action convention:
    /// the result sends `t` to `g(self(t))`.
    pub fn compose(&self, g: &PLMap) -> PLMap {
        // candidate breakpoints: own breaks plus preimages of g's breaks
        let mut xs: Vec<Dyadic> = Vec::with_capacity(self.breaks.len() + g.breaks.len());
        let mut a = self.breaks.iter().map(|(x, _)| x.clone()).peekable();
        let mut b = g.breaks.iter().map(|(x, _)| self.preimage(x)).peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => {
                    if x < y {
                        xs.push(a.next().unwrap());
                    } else if y < x {
                        xs.push(b.next().unwrap());
                    } else {
                        xs.push(a.next().unwrap());
                        b.next();
                    }
                }
                (Some(_), None) => xs.push(a.next().unwrap()),
                (None, Some(_)) => xs.push(b.next().unwrap()),
                (None, None) => break,
            }
        }
        let points: Vec<(Dyadic, Dyadic)> = xs
            .into_iter()
            .map(|x| {
                let y = g.image(&self.image(&x));
                (x, y)
            })
            .collect();
        PLMap::from_breaks(points, self.tail_offset + g.tail_offset)
            .expect("composition of valid maps is valid")
    }

    pub fn invert(&self) -> PLMap {
        let breaks = self
            .breaks
            .iter()
            .map(|(x, y)| (y.clone(), x.clone()))
            .collect();
        PLMap::from_breaks(breaks, -self.tail_offset).expect("inverse of a valid map is valid")
    }

    /// `self` composed with itself `k` times; negative `k` uses the inverse.
    pub fn pow(&self, k: i32) -> PLMap {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = PLMap::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    /// Conjugation by the translation `t ↦ t + k`: identity on `[0, k]`,
    /// then a shifted copy of `self`.
    pub fn conjugate_by_translation(&self, k: u64) -> PLMap {
        assert!(k >= 1, "translation amount must be positive");
        let shift = Dyadic::from(k as i64);
        let mut breaks = Vec::with_capacity(self.breaks.len() + 1);
        breaks.push((Dyadic::zero(), Dyadic::zero()));
        for (x, y) in &self.breaks {
            breaks.push((x + &shift, y + &shift));
        }
        PLMap::from_breaks(breaks, self.tail_offset).expect("translate of a valid map is valid")
    }

    /// One-sided slope at `t`, an exact power of two.
    pub fn slope_at(&self, t: &Dyadic, side: Side) -> Result<Dyadic, PLMapError> {
        if t.is_negative() {
            return Err(PLMapError::NegativeArgument);
        }
        if side == Side::Left && t.is_zero() {
            return Err(PLMapError::NoLeftSlopeAtZero);
        }
        let n = self.breaks.len();
        let j = self.breaks.partition_point(|(x, _)| x <= t);
        let s = if j == n {
            // at or beyond the last breakpoint
            if side == Side::Left && self.breaks[n - 1].0 == *t {
                self.seg_slopes[n - 2]
            } else {
                0
            }
        } else if self.breaks[j - 1].0 == *t {
            match side {
                Side::Right => self.seg_slopes[j - 1],
                Side::Left => self.seg_slopes[j - 2],
            }
        } else {
            self.seg_slopes[j - 1]
        };
        Ok(Dyadic::one().mul_pow2(s))
    }

    /// Maximal open intervals on which the map moves points, in increasing
    /// order. The final interval is unbounded iff `tail_offset != 0`.
    pub fn support(&self) -> Result<Vec<Interval>, PLMapError> {
        // marks: every breakpoint plus every interior diagonal crossing;
        // between consecutive marks the displacement has constant sign
        let mut marks: Vec<(Dyadic, bool)> = Vec::new(); // (point, displacement is zero)
        let disp: Vec<Dyadic> = self.breaks.iter().map(|(x, y)| y - x).collect();
        for i in 0..self.breaks.len() {
            marks.push((self.breaks[i].0.clone(), disp[i].is_zero()));
            if i + 1 < self.breaks.len() {
                let a = &disp[i];
                let b = &disp[i + 1];
                if !a.is_zero() && !b.is_zero() && a.is_negative() != b.is_negative() {
                    // strict sign change inside segment i: isolated fixed point
                    let s = self.seg_slopes[i];
                    debug_assert!(s != 0);
                    let den = &Dyadic::one() - &Dyadic::one().mul_pow2(s);
                    let t = &self.breaks[i].0
                        + &a.checked_div(&den).ok_or(PLMapError::NonDyadicFixedPoint)?;
                    marks.push((t, true));
                }
            }
        }
        let mut comps = Vec::new();
        let mut start: Option<Dyadic> = None;
        for i in 0..marks.len() {
            let (t, z) = &marks[i];
            if start.is_some() && *z {
                comps.push(Interval::open(start.take().unwrap(), t.clone()).unwrap());
            }
            if start.is_none() && *z {
                if let Some((_, nz)) = marks.get(i + 1) {
                    if !*nz {
                        start = Some(t.clone());
                    }
                } else if self.tail_offset != 0 {
                    start = Some(t.clone());
                }
            }
        }
        if let Some(s) = start {
            debug_assert!(self.tail_offset != 0);
            comps.push(Interval::beyond(s));
        }
        Ok(comps)
    }

    /// Exact infimum and supremum of the moving set in `[cut, ∞)`, as an
    /// open interval, or `None` if the map fixes everything there.
    ///
    /// Unlike [`support`](Self::support) this never needs interior diagonal
    /// crossings: the extremes of the moving set sit where the displacement
    /// leaves an identically-zero stretch, always at a breakpoint (or at
    /// `cut` itself), so they are always dyadic. The hull may properly
    /// contain the support when the map fixes isolated interior points.
    pub fn support_hull_beyond(&self, cut: &Dyadic) -> Result<Option<Interval>, PLMapError> {
        if cut.is_negative() {
            return Err(PLMapError::NegativeArgument);
        }
        // marks: cut plus every breakpoint beyond it; the displacement is
        // affine between consecutive marks and constant on the tail
        let mut marks: Vec<(Dyadic, bool)> = vec![(cut.clone(), self.image(cut) == *cut)];
        for (x, y) in &self.breaks {
            if x > cut {
                marks.push((x.clone(), x == y));
            }
        }
        let tail_moves = self.tail_offset != 0;
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Option<Dyadic>> = None;
        for i in 0..marks.len() {
            let seg_moves = match marks.get(i + 1) {
                Some((_, next_zero)) => !(marks[i].1 && *next_zero),
                None => tail_moves,
            };
            if seg_moves {
                if lo.is_none() {
                    lo = Some(marks[i].0.clone());
                }
                hi = Some(marks.get(i + 1).map(|(x, _)| x.clone()));
            }
        }
        match (lo, hi) {
            (Some(lo), Some(hi)) => Ok(Some(Interval {
                lo,
                hi,
                lo_open: true,
                hi_open: true,
            })),
            _ => Ok(None),
        }
    }

    /// Maximum of `|f(t) − t|` over a bounded region, computed exactly.
    pub fn max_displacement(&self, region: &Interval) -> Result<Dyadic, PLMapError> {
        let hi = region.hi.as_ref().ok_or(PLMapError::UnboundedRegion)?;
        if region.lo.is_negative() {
            return Err(PLMapError::NegativeArgument);
        }
        let mut best = Dyadic::zero();
        let mut consider = |t: &Dyadic| {
            let d = (&self.image(t) - t).abs();
            if d > best {
                best = d;
            }
        };
        consider(&region.lo);
        consider(hi);
        for (x, _) in &self.breaks {
            if x > &region.lo && x < hi {
                consider(x);
            }
        }
        Ok(best)
    }

    /// Pointwise agreement of two maps on a region, decided exactly from the
    /// segment data. The region is treated as its closure.
    pub fn agree_on(&self, other: &PLMap, region: &Interval) -> Result<bool, PLMapError> {
        if region.lo.is_negative() {
            return Err(PLMapError::NegativeArgument);
        }
        let check = |t: &Dyadic| self.image(t) == other.image(t);
        if !check(&region.lo) {
            return Ok(false);
        }
        for (x, _) in self.breaks.iter().chain(other.breaks.iter()) {
            let inside = x > &region.lo
                && match &region.hi {
                    None => true,
                    Some(hi) => x < hi,
                };
            if inside && !check(x) {
                return Ok(false);
            }
        }
        match &region.hi {
            Some(hi) => Ok(check(hi)),
            None => Ok(self.tail_offset == other.tail_offset),
        }
    }

    /// Whether the map fixes every point of the region.
    pub fn is_identity_on(&self, region: &Interval) -> Result<bool, PLMapError> {
        self.agree_on(&PLMap::identity(), region)
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap{{")?;
        for (i, (x, y)) in self.breaks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}->{y}")?;
        }
        write!(f, "; tail {:+}}}", self.tail_offset)
    }
}
