//! The bounded multibarrier array.
//!
//! `N` identical rectangular barriers of height `V` and `N - 1` equal gaps
//! tile the interval `[-L/2, L/2]`. The array starts and ends with a
//! barrier. With `c` the ratio of total gap width `b` to total barrier width
//! `a`, the layout is fixed by `a = L / (1 + c)` and `b = L c / (1 + c)`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialSpec {
    pub n_barriers: usize,
    /// Total gap width over total barrier width.
    pub c: f64,
    pub total_length: f64,
    pub height: f64,
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        self.validate_geometry()?;
        if !(self.height > 0.0) || !self.height.is_finite() {
            return Err(Error::NonPositiveHeight(self.height));
        }
        Ok(())
    }

    /// Checks `N`, `c` and `L` only.
    pub fn validate_geometry(&self) -> Result<()> {
        if self.n_barriers < 2 {
            return Err(Error::TooFewBarriers(self.n_barriers));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::NonPositiveRatio(self.c));
        }
        if !(self.total_length > 0.0) || !self.total_length.is_finite() {
            return Err(Error::NonPositiveLength(self.total_length));
        }
        Ok(())
    }
}

/// Closed interval `[start, end]` occupied by one barrier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.start <= x && x <= self.end
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BarrierLayout {
    /// Total barrier width.
    pub a: f64,
    /// Total gap width.
    pub b: f64,
    pub barrier_width: f64,
    pub gap_width: f64,
    /// Sorted, disjoint barrier intervals.
    pub intervals: Vec<Interval>,
}

pub fn build_layout(spec: &PotentialSpec) -> Result<BarrierLayout> {
    spec.validate()?;
    build_geometry(spec)
}

/// Like [`build_layout`] but accepts any height, including the empty
/// array `V = 0` used for free reference runs.
pub fn build_geometry(spec: &PotentialSpec) -> Result<BarrierLayout> {
    spec.validate_geometry()?;
    let n = spec.n_barriers;
    let l = spec.total_length;
    let a = l / (1.0 + spec.c);
    let b = l * spec.c / (1.0 + spec.c);
    let barrier_width = a / n as f64;
    let gap_width = b / (n - 1) as f64;
    let pitch = barrier_width + gap_width;
    let left = -0.5 * l;

    let mut intervals: Vec<Interval> = (0..n)
        .map(|i| {
            let start = left + i as f64 * pitch;
            Interval { start, end: start + barrier_width }
        })
        .collect();
    // Pin the outer edges so the array spans [-L/2, L/2] exactly.
    intervals[0].start = left;
    intervals[n - 1].end = 0.5 * l;

    Ok(BarrierLayout { a, b, barrier_width, gap_width, intervals })
}

impl BarrierLayout {
    pub fn n_barriers(&self) -> usize {
        self.intervals.len()
    }

    pub fn left(&self) -> f64 {
        self.intervals.first().map_or(0.0, |iv| iv.start)
    }

    pub fn right(&self) -> f64 {
        self.intervals.last().map_or(0.0, |iv| iv.end)
    }

    pub fn span(&self) -> f64 {
        self.right() - self.left()
    }

    /// `height` inside any barrier (edges included), zero elsewhere.
    pub fn potential_at(&self, x: f64, height: f64) -> f64 {
        // First interval whose end is not left of x.
        let idx = self.intervals.partition_point(|iv| iv.end < x);
        match self.intervals.get(idx) {
            Some(iv) if iv.contains(x) => height,
            _ => 0.0,
        }
    }

    /// Segment lengths in order: barrier, gap, barrier, ..., barrier.
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.intervals.iter().enumerate().flat_map(move |(i, iv)| {
            let barrier = Segment::Barrier(iv.end - iv.start);
            let gap = self
                .intervals
                .get(i + 1)
                .map(|next| Segment::Gap(next.start - iv.end));
            std::iter::once(barrier).chain(gap)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Barrier(f64),
    Gap(f64),
}

pub fn potential_at(layout: &BarrierLayout, x: f64, height: f64) -> f64 {
    layout.potential_at(x, height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(n: usize, c: f64) -> PotentialSpec {
        PotentialSpec { n_barriers: n, c, total_length: 20.0, height: 2.0 }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn symmetric_ratio() {
        let l = build_layout(&spec(10, 1.0)).unwrap();
        assert!(rel(l.a, 10.0) < 1e-12);
        assert!(rel(l.b, 10.0) < 1e-12);
        assert!(rel(l.barrier_width, 1.0) < 1e-12);
        assert!(rel(l.gap_width, 10.0 / 9.0) < 1e-12);
    }

    #[test]
    fn ratio_four() {
        let l = build_layout(&spec(10, 4.0)).unwrap();
        assert!(rel(l.a, 4.0) < 1e-12);
        assert!(rel(l.b, 16.0) < 1e-12);
        assert!(rel(l.barrier_width, 0.4) < 1e-12);
        assert!(rel(l.gap_width, 16.0 / 9.0) < 1e-12);
    }

    #[test]
    fn rejects_bad_specs_with_distinct_errors() {
        assert!(matches!(build_layout(&spec(1, 1.0)), Err(Error::TooFewBarriers(1))));
        assert!(matches!(build_layout(&spec(4, 0.0)), Err(Error::NonPositiveRatio(_))));
        let mut s = spec(4, 1.0);
        s.total_length = -1.0;
        assert!(matches!(build_layout(&s), Err(Error::NonPositiveLength(_))));
        let mut s = spec(4, 1.0);
        s.height = 0.0;
        assert!(matches!(build_layout(&s), Err(Error::NonPositiveHeight(_))));
    }

    #[test]
    fn potential_edges_and_outside() {
        let l = build_layout(&spec(2, 1.0)).unwrap();
        assert_eq!(l.potential_at(-10.0, 2.0), 2.0);
        assert_eq!(l.potential_at(10.0, 2.0), 2.0);
        assert_eq!(l.potential_at(-5.0, 2.0), 2.0);
        assert_eq!(l.potential_at(0.0, 2.0), 0.0);
        assert_eq!(l.potential_at(-10.5, 2.0), 0.0);
        assert_eq!(l.potential_at(11.0, 2.0), 0.0);
    }

    #[test]
    fn segments_alternate() {
        let l = build_layout(&spec(3, 1.0)).unwrap();
        let segs: Vec<_> = l.segments().collect();
        assert_eq!(segs.len(), 5);
        assert!(matches!(segs[0], Segment::Barrier(_)));
        assert!(matches!(segs[1], Segment::Gap(_)));
        assert!(matches!(segs[4], Segment::Barrier(_)));
    }

    #[test]
    fn barrier_width_shrinks_with_n() {
        let widths: Vec<f64> = [2, 3, 5, 10, 40, 140, 500]
            .iter()
            .map(|&n| build_layout(&spec(n, 7.0 / 3.0)).unwrap().barrier_width)
            .collect();
        assert!(widths.windows(2).all(|w| w[1] < w[0]));
    }

    proptest! {
        #[test]
        fn layout_invariants(n in 2usize..300, c in 0.01f64..50.0) {
            let s = spec(n, c);
            let l = build_layout(&s).unwrap();
            prop_assert!(rel(l.a + l.b, 20.0) < 1e-12);
            prop_assert!(rel(l.b, c * l.a) < 1e-12);
            let total = n as f64 * l.barrier_width + (n - 1) as f64 * l.gap_width;
            prop_assert!(rel(total, 20.0) < 1e-12);
            prop_assert_eq!(l.intervals[0].start, -10.0);
            prop_assert_eq!(l.intervals[n - 1].end, 10.0);
            for w in l.intervals.windows(2) {
                prop_assert!(w[0].start < w[0].end);
                prop_assert!(w[0].end < w[1].start);
            }
            let measured: f64 = l.intervals.iter().map(|iv| iv.end - iv.start).sum();
            prop_assert!(rel(measured, l.a) < 1e-9);
            prop_assert_eq!(&l, &build_layout(&s).unwrap());
        }
    }
}
