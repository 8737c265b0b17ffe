//! Transfer-matrix scattering, the periodic-boundary level condition and
//! level-spacing statistics.
//!
//! Dispersion is `E = k^2` (`hbar = 1`, `m = 1/2`), the same convention the
//! evolution uses. A [`TransferMatrix2`] maps plane-wave amplitudes
//! `(A, B)` of `A e^{ikx} + B e^{-ikx}` on the left of a region to those on
//! its right, each side referenced to its own edge. [`SMatrix2`] amplitudes
//! are referenced to the origin, so that the plane waves `e^{+-ikR}` used at
//! the remote boundaries `x = +-R` are the same functions the S-matrix acts
//! on.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{BarrierLayout, Segment};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn wavenumber(energy: f64) -> f64 {
    energy.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix2 {
    pub m: [[Complex64; 2]; 2],
}

impl TransferMatrix2 {
    pub fn identity() -> Self {
        TransferMatrix2 { m: [[ONE, ZERO], [ZERO, ONE]] }
    }

    /// Free propagation over `length`: `diag(e^{ikw}, e^{-ikw})`.
    pub fn free(k: f64, length: f64) -> Self {
        let p = Complex64::from_polar(1.0, k * length);
        TransferMatrix2 { m: [[p, ZERO], [ZERO, p.conj()]] }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Re-express with both sides referenced to the origin, given the
    /// positions of the left and right edges.
    pub fn referenced_to_origin(&self, k: f64, x_left: f64, x_right: f64) -> Self {
        TransferMatrix2::free(k, -x_right) * *self * TransferMatrix2::free(k, x_left)
    }

    /// `|t|^2` for a wave incident from the left.
    pub fn transmission(&self) -> f64 {
        1.0 / self.m[1][1].norm_sqr()
    }

    /// `|r|^2` for a wave incident from the left.
    pub fn reflection(&self) -> f64 {
        (self.m[1][0] / self.m[1][1]).norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }
}

impl Mul for TransferMatrix2 {
    type Output = TransferMatrix2;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.m, rhs.m);
        TransferMatrix2 {
            m: [
                [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
            ],
        }
    }
}

/// Real propagator of `(psi, psi')` through a flat region of width `w`
/// with `q^2 = E - V`, as `(cos qw, sin(qw)/q, q sin qw)`. The three cases
/// join continuously at `E = V`, where the result is `(1, w, 0)`.
fn region_functions(q2: f64, w: f64) -> (f64, f64, f64) {
    if q2 > 0.0 {
        let q = q2.sqrt();
        let (s, c) = (q * w).sin_cos();
        (c, s / q, q * s)
    } else if q2 < 0.0 {
        let kappa = (-q2).sqrt();
        let sh = (kappa * w).sinh();
        ((kappa * w).cosh(), sh / kappa, -kappa * sh)
    } else {
        (1.0, w, 0.0)
    }
}

/// Transfer matrix of a rectangular barrier of height `v` and given width.
pub fn barrier_transfer(energy: f64, v: f64, width: f64) -> Result<TransferMatrix2> {
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let k = wavenumber(energy);
    let (c, s, t) = region_functions(energy - v, width);
    let diag = Complex64::new(c, 0.5 * (k * s + t / k));
    let off = Complex64::new(0.0, 0.5 * (t / k - k * s));
    Ok(TransferMatrix2 { m: [[diag, off], [off.conj(), diag.conj()]] })
}

/// Ordered product over the array: barrier, gap, ..., barrier.
pub fn compose_transfer(layout: &BarrierLayout, energy: f64, v: f64) -> Result<TransferMatrix2> {
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let k = wavenumber(energy);
    let mut q = TransferMatrix2::identity();
    for seg in layout.segments() {
        let m = match seg {
            Segment::Barrier(w) => barrier_transfer(energy, v, w)?,
            Segment::Gap(w) => TransferMatrix2::free(k, w),
        };
        q = m * q;
    }
    Ok(q)
}

/// `(A_out_right, B_out_left) = S (A_in_left, B_in_right)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMatrix2 {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
}

impl SMatrix2 {
    pub fn identity() -> Self {
        SMatrix2 { s11: ONE, s12: ZERO, s21: ZERO, s22: ONE }
    }

    /// Largest entry of `|S S^dagger - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let a = [[self.s11, self.s12], [self.s21, self.s22]];
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut v = a[i][0] * a[j][0].conj() + a[i][1] * a[j][1].conj();
                if i == j {
                    v -= ONE;
                }
                worst = worst.max(v.norm());
            }
        }
        worst
    }
}

/// Both sides share one wavenumber, so `det Q = 1` and the transmission
/// amplitude is `1 / Q22` from either side. Forming `det Q / Q22` instead
/// loses everything once `|Q|^2` exceeds `1 / eps` (opaque arrays).
pub fn s_from_transfer(q: &TransferMatrix2) -> Result<SMatrix2> {
    let q22 = q.m[1][1];
    if q22.norm() == 0.0 || !q22.norm().is_finite() {
        return Err(Error::TransmissionZero);
    }
    let inv = q22.inv();
    Ok(SMatrix2 {
        s11: inv,
        s12: q.m[0][1] * inv,
        s21: -q.m[1][0] * inv,
        s22: inv,
    })
}

/// Origin-referenced S-matrix of the array at `energy`.
pub fn s_matrix(layout: &BarrierLayout, energy: f64, v: f64) -> Result<SMatrix2> {
    let k = wavenumber(energy);
    let q = compose_transfer(layout, energy, v)?.referenced_to_origin(k, layout.left(), layout.right());
    s_from_transfer(&q)
}

/// `det [[rho S11 - 1, rho S12], [rho S21, rho S22 - 1]]` with
/// `rho = f(R) / f(-R) = e^{2ikR}`.
pub fn det_condition(energy: f64, radius: f64, s: &SMatrix2) -> Complex64 {
    let rho = Complex64::from_polar(1.0, 2.0 * wavenumber(energy) * radius);
    (rho * s.s11 - ONE) * (rho * s.s22 - ONE) - rho * rho * s.s12 * s.s21
}

/// Which part of the determinant a root was bracketed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Real,
    Imaginary,
    Both,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Real => "re",
            Provenance::Imaginary => "im",
            Provenance::Both => "both",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelSet {
    pub levels: Vec<Level>,
    pub radius: f64,
    /// Bracketed roots of the real factor where `|det|` was not small.
    pub rejected: usize,
}

impl LevelSet {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Level-finder settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelScan {
    pub e_min: f64,
    pub e_max: f64,
    /// Samples per free-level spacing `pi / R` in wavenumber.
    pub resolution: usize,
    pub radius: f64,
}

/// A candidate is a level only if the full determinant is this small there.
pub const LEVEL_TOLERANCE: f64 = 1e-8;
const MERGE_DISTANCE: f64 = 1e-9;

/// All energies in `(e_min, e_max]` where the level condition vanishes.
///
/// With `S` unitary the condition factors as `det = e^{i psi} g(k)`, where
/// `psi = 2kR + arg(det S)/2` and `g` is real. Both parts of `det` therefore
/// vanish at a level. Between consecutive points where `psi` is a multiple
/// of `pi`, `g` is monotone, so brackets are split there: close level pairs
/// (split by weak reflection) then fall into separate brackets. Roots are
/// bisected to machine precision and kept when `|det| < LEVEL_TOLERANCE`.
/// Each level is tagged with the parts of `det` that change sign across it.
/// The scan is repeated at twice the resolution and the two counts must
/// agree.
pub fn find_levels(layout: &BarrierLayout, v: f64, scan: &LevelScan) -> Result<LevelSet> {
    if !(scan.e_max > scan.e_min) || !(scan.e_min >= 0.0) || !scan.e_max.is_finite() {
        return Err(Error::EmptyRange(scan.e_min, scan.e_max));
    }
    let min_radius = 5.0 * layout.span();
    if !(scan.radius >= min_radius) {
        return Err(Error::RadiusTooSmall { radius: scan.radius, min: min_radius });
    }
    if scan.resolution == 0 {
        return Err(Error::Config("level scan resolution must be positive".into()));
    }
    let coarse = scan_levels(layout, v, scan, scan.resolution)?;
    let fine = scan_levels(layout, v, scan, 2 * scan.resolution)?;
    if coarse.len() != fine.len() {
        return Err(Error::ResolutionGuard { coarse: coarse.len(), fine: fine.len() });
    }
    Ok(coarse)
}

/// `(det, arg det S)` at wavenumber `k`.
fn condition_at(layout: &BarrierLayout, v: f64, radius: f64, k: f64) -> Result<(Complex64, f64)> {
    let e = k * k;
    let s = s_matrix(layout, e, v)?;
    let det_s = s.s11 * s.s22 - s.s12 * s.s21;
    Ok((det_condition(e, radius, &s), det_s.arg()))
}

fn wrap_pi(x: f64) -> f64 {
    x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor()
}

/// Phase `psi` and real factor `g` at `k`, continuing the unwrapped
/// `arg det S` from a nearby reference value.
fn phase_and_g(layout: &BarrierLayout, v: f64, radius: f64, k: f64, arg_ref: f64) -> Result<(f64, f64)> {
    let (det, arg) = condition_at(layout, v, radius, k)?;
    let unwrapped = arg_ref + wrap_pi(arg - arg_ref);
    let psi = 2.0 * k * radius + 0.5 * unwrapped;
    Ok((psi, (det * Complex64::from_polar(1.0, -psi)).re))
}

const MAX_PHASE_STEP: f64 = 0.5 * PI;
const MAX_REFINE_DEPTH: usize = 48;

/// Appends interior points of `(a, b]` until `arg det S` moves by less than
/// `MAX_PHASE_STEP` between neighbours, so that unwrapping cannot skip a
/// sharp resonance that shows up at the ends.
fn refine(
    layout: &BarrierLayout,
    v: f64,
    radius: f64,
    a: (f64, f64),
    b: (f64, f64),
    depth: usize,
    out: &mut Vec<(f64, f64)>,
) -> Result<()> {
    if (b.1 - a.1).abs() <= MAX_PHASE_STEP || depth >= MAX_REFINE_DEPTH {
        out.push(b);
        return Ok(());
    }
    let mid_k = 0.5 * (a.0 + b.0);
    let (_, arg) = condition_at(layout, v, radius, mid_k)?;
    let mid = (mid_k, a.1 + wrap_pi(arg - a.1));
    // The right end is re-unwrapped against the midpoint.
    let b = (b.0, mid.1 + wrap_pi(b.1 - mid.1));
    refine(layout, v, radius, a, mid, depth + 1, out)?;
    refine(layout, v, radius, mid, b, depth + 1, out)
}

/// Roots of the real factor on `[a.0, kb]`, splitting where `psi` crosses a
/// multiple of `pi`. `a.1` is the unwrapped `arg det S` at the left end.
fn roots_between(
    layout: &BarrierLayout,
    v: f64,
    radius: f64,
    a: (f64, f64),
    kb: f64,
    include_right: bool,
    found: &mut Vec<f64>,
) -> Result<()> {
    let eval = |k: f64| phase_and_g(layout, v, radius, k, a.1);
    let (psi_a, g_a) = eval(a.0)?;
    let (psi_b, g_b) = eval(kb)?;

    let mut nodes = vec![(a.0, g_a, false)];
    let (m_lo, m_hi) = ((psi_a / PI).floor() as i64 + 1, (psi_b / PI).floor() as i64);
    for m in m_lo..=m_hi {
        let target = m as f64 * PI;
        let from = nodes.last().expect("nonempty").0;
        let k = bisect(|k| eval(k).map(|(p, _)| p - target), from, kb, psi_a - target)?;
        nodes.push((k, eval(k)?.1, true));
    }
    nodes.push((kb, g_b, false));

    for w in nodes.windows(2) {
        let ((ka, ga, _), (kb, gb, split)) = (w[0], w[1]);
        if ga == 0.0 {
            found.push(ka);
        } else if gb != 0.0 && ga.signum() != gb.signum() {
            found.push(bisect(|k| eval(k).map(|(_, g)| g), ka, kb, ga)?);
        }
        // Touching zero at an extremum of cos(psi).
        if split && gb.abs() < LEVEL_TOLERANCE {
            found.push(kb);
        }
    }
    if include_right && g_b == 0.0 {
        found.push(kb);
    }
    Ok(())
}

/// One scan at `resolution` samples per `pi / R`.
pub fn scan_levels(layout: &BarrierLayout, v: f64, scan: &LevelScan, resolution: usize) -> Result<LevelSet> {
    let radius = scan.radius;
    let dk = PI / (radius * resolution as f64);
    let k_lo = if scan.e_min > 0.0 { wavenumber(scan.e_min) } else { 0.5 * dk };
    let k_hi = wavenumber(scan.e_max);
    let intervals = ((k_hi - k_lo) / dk).ceil().max(1.0) as usize;
    let step = (k_hi - k_lo) / intervals as f64;
    let ks: Vec<f64> = (0..=intervals).map(|i| k_lo + i as f64 * step).collect();

    let raw: Vec<(Complex64, f64)> =
        ks.par_iter().map(|&k| condition_at(layout, v, radius, k)).collect::<Result<_>>()?;
    let mut args = Vec::with_capacity(raw.len());
    for (i, &(_, a)) in raw.iter().enumerate() {
        args.push(if i == 0 { a } else { args[i - 1] + wrap_pi(a - args[i - 1]) });
    }

    let candidates: Vec<f64> = (0..intervals)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut sub = vec![(ks[i], args[i])];
            refine(layout, v, radius, (ks[i], args[i]), (ks[i + 1], args[i + 1]), 0, &mut sub)?;
            let mut found = Vec::new();
            for (j, w) in sub.windows(2).enumerate() {
                let last = i + 1 == intervals && j + 2 == sub.len();
                roots_between(layout, v, radius, w[0], w[1].0, last, &mut found)?;
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let det_at = |k: f64| condition_at(layout, v, radius, k).map(|(d, _)| d);
    let mut accepted = Vec::new();
    let mut rejected = 0;
    for k in candidates {
        let e = k * k;
        if e <= scan.e_min || e > scan.e_max {
            continue;
        }
        if det_at(k)?.norm() < LEVEL_TOLERANCE {
            accepted.push(k);
        } else {
            rejected += 1;
        }
    }
    accepted.sort_by(f64::total_cmp);

    let mut merged: Vec<f64> = Vec::with_capacity(accepted.len());
    for k in accepted {
        match merged.last() {
            Some(&last) if k * k - last * last <= MERGE_DISTANCE => {}
            _ => merged.push(k),
        }
    }
    let eta = 1e-3 * step;
    let levels = merged
        .into_iter()
        .map(|k| -> Result<Level> {
            let (lo, hi) = (det_at(k - eta)?, det_at(k + eta)?);
            let re = lo.re.signum() != hi.re.signum();
            let im = lo.im.signum() != hi.im.signum();
            let provenance = match (re, im) {
                (true, false) => Provenance::Real,
                (false, true) => Provenance::Imaginary,
                _ => Provenance::Both,
            };
            Ok(Level { energy: k * k, provenance })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelSet { levels, radius, rejected })
}

/// Bisection on a sign change to machine precision in `k`.
fn bisect<F>(f: F, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let lo_sign = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Wigner surmise `(pi s / 2) exp(-pi s^2 / 4)`.
pub fn wigner_pdf(s: f64) -> f64 {
    0.5 * PI * s * (-0.25 * PI * s * s).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpacingHistogram {
    /// `bins + 1` edges over `[0, max spacing]`.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub mean_spacing: f64,
    /// Spacings divided by `mean_spacing`.
    pub spacings: Vec<f64>,
}

impl SpacingHistogram {
    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    /// Counts scaled to a probability density.
    pub fn density(&self) -> Vec<f64> {
        let total = self.spacings.len() as f64 * self.bin_width();
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Nearest-neighbour spacings normalised by their mean, histogrammed over
/// `[0, max]` (the maximum falls in the last bin).
pub fn spacing_statistics(levels: &[f64], bins: usize) -> Result<SpacingHistogram> {
    if levels.len() < 2 {
        return Err(Error::TooFewLevels(levels.len()));
    }
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let raw: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let mean_spacing = raw.iter().sum::<f64>() / raw.len() as f64;
    if !(mean_spacing > 0.0) {
        return Err(Error::Config("levels are all degenerate".into()));
    }
    let spacings: Vec<f64> = raw.iter().map(|s| s / mean_spacing).collect();
    let hi = spacings.iter().cloned().fold(0.0, f64::max);
    let width = hi / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| i as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for &s in &spacings {
        let idx = if width > 0.0 { ((s / width) as usize).min(bins - 1) } else { bins - 1 };
        counts[idx] += 1;
    }
    Ok(SpacingHistogram { edges, counts, mean_spacing, spacings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_layout, PotentialSpec};
    use proptest::prelude::*;

    fn layout(n: usize, c: f64) -> BarrierLayout {
        build_layout(&PotentialSpec { n_barriers: n, c, total_length: 20.0, height: 2.0 }).unwrap()
    }

    #[test]
    fn zero_width_barrier_is_identity() {
        let m = barrier_transfer(1.3, 2.0, 0.0).unwrap();
        assert!(m.max_abs_diff(&TransferMatrix2::identity()) < 1e-15);
    }

    #[test]
    fn zero_height_barrier_is_free_propagation() {
        let m = barrier_transfer(1.7, 0.0, 0.8).unwrap();
        assert!(m.max_abs_diff(&TransferMatrix2::free(1.7f64.sqrt(), 0.8)) < 1e-15);
    }

    #[test]
    fn single_barrier_transmission_matches_closed_form() {
        // [1 + sinh^2(1)]^-1, 30-digit reference evaluation.
        let m = barrier_transfer(1.0, 2.0, 1.0).unwrap();
        assert!((m.transmission() - 0.419_974_341_614_026).abs() < 1e-12);
    }

    #[test]
    fn energy_at_barrier_top_is_continuous() {
        let at = barrier_transfer(2.0, 2.0, 0.7).unwrap();
        let below = barrier_transfer(2.0 - 1e-9, 2.0, 0.7).unwrap();
        let above = barrier_transfer(2.0 + 1e-9, 2.0, 0.7).unwrap();
        assert!(at.max_abs_diff(&below) < 1e-8);
        assert!(at.max_abs_diff(&above) < 1e-8);
        assert!((at.det() - ONE).norm() < 1e-14);
    }

    #[test]
    fn nonpositive_energy_rejected() {
        assert!(matches!(barrier_transfer(0.0, 2.0, 1.0), Err(Error::NonPositiveEnergy(_))));
        assert!(compose_transfer(&layout(3, 1.0), -1.0, 2.0).is_err());
    }

    #[test]
    fn two_barriers_merge_as_gap_vanishes() {
        let c = 1e-6;
        let l = layout(2, c);
        let merged = compose_transfer(&l, 1.0, 2.0).unwrap();
        let single = barrier_transfer(1.0, 2.0, 2.0 * l.a / 2.0).unwrap();
        let defect = merged.max_abs_diff(&single) / single.m[0][0].norm();
        assert!(defect < 1e-6, "{defect}");
    }

    #[test]
    fn merge_defect_is_first_order_in_the_gap() {
        let defect = |c: f64| {
            let l = layout(2, c);
            let merged = compose_transfer(&l, 4.0, 2.0).unwrap();
            let single = barrier_transfer(4.0, 2.0, l.a).unwrap();
            merged.max_abs_diff(&single) / single.m[0][0].norm()
        };
        let ratio = defect(1e-4) / defect(1e-5);
        assert!((ratio - 10.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn ten_barrier_flux_conservation() {
        let q = compose_transfer(&layout(10, 1.0), 1.0, 2.0).unwrap();
        assert!((q.transmission() + q.reflection() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_layout_is_free_propagation_over_l() {
        let l = layout(7, 3.0 / 2.0);
        let q = compose_transfer(&l, 0.9, 0.0).unwrap();
        assert!(q.max_abs_diff(&TransferMatrix2::free(0.9f64.sqrt(), 20.0)) < 1e-12);
        let s = s_matrix(&l, 0.9, 0.0).unwrap();
        assert!((s.s11 - ONE).norm() < 1e-12 && s.s12.norm() < 1e-12);
    }

    #[test]
    fn s_matrix_examples() {
        let s = s_from_transfer(&TransferMatrix2::identity()).unwrap();
        assert_eq!(s, SMatrix2::identity());

        let s = s_matrix(&layout(4, 1.0), 1.0, 2.0).unwrap();
        assert!(s.unitarity_defect() < 1e-8);
        assert!((s.s12.norm() - s.s21.norm()).abs() < 1e-12);

        let zero = TransferMatrix2 { m: [[ONE, ZERO], [ZERO, ZERO]] };
        assert!(matches!(s_from_transfer(&zero), Err(Error::TransmissionZero)));
    }

    #[test]
    fn det_condition_examples() {
        let id = SMatrix2::identity();
        // rho = e^{2ikR} = 1 for kR = pi; rho = -1 for kR = pi/2.
        let r = 10.0;
        let e1 = (PI / r).powi(2);
        assert!(det_condition(e1, r, &id).norm() < 1e-14);
        let e2 = (PI / (2.0 * r)).powi(2);
        assert!((det_condition(e2, r, &id) - Complex64::new(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn det_condition_regression_anchor() {
        // Independent 30-digit evaluation by (psi, psi') propagation.
        let s = s_matrix(&layout(2, 1.0), 1.0, 2.0).unwrap();
        let d = det_condition(1.0, 100.0, &s);
        assert!((d - Complex64::new(0.716_066_491_562_470_9, 0.958_708_913_789_005_5)).norm() < 1e-9);
    }

    #[test]
    fn free_levels() {
        let l = layout(4, 1.0);
        let scan = LevelScan { e_min: 0.0, e_max: 0.3, resolution: 16, radius: 100.0 };
        let set = find_levels(&l, 0.0, &scan).unwrap();
        let expected: Vec<f64> = (1..)
            .map(|n| (n as f64 * PI / 100.0).powi(2))
            .take_while(|&e| e <= 0.3)
            .collect();
        assert_eq!(set.len(), expected.len());
        for (got, want) in set.energies().iter().zip(&expected) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn barrier_levels_satisfy_the_condition() {
        let l = layout(10, 1.0);
        let scan = LevelScan { e_min: 0.0, e_max: 2.0, resolution: 32, radius: 200.0 };
        let set = find_levels(&l, 2.0, &scan).unwrap();
        assert!(set.len() > 10);
        for lvl in &set.levels {
            let d = det_condition(lvl.energy, 200.0, &s_matrix(&l, lvl.energy, 2.0).unwrap());
            assert!(d.norm() < LEVEL_TOLERANCE);
        }
        assert!(set.levels.windows(2).all(|w| w[0].energy < w[1].energy));
    }

    #[test]
    fn level_count_grows_with_radius() {
        let l = layout(10, 1.0);
        let count = |r: f64| {
            let scan = LevelScan { e_min: 0.0, e_max: 2.0, resolution: 32, radius: r };
            find_levels(&l, 2.0, &scan).unwrap().len() as i64
        };
        let (n1, n2) = (count(100.0), count(200.0));
        assert!((n2 - 2 * n1).abs() <= 2, "{n1} -> {n2}");
    }

    #[test]
    fn level_scan_errors() {
        let l = layout(4, 1.0);
        let mut scan = LevelScan { e_min: 1.0, e_max: 0.5, resolution: 8, radius: 200.0 };
        assert!(matches!(find_levels(&l, 2.0, &scan), Err(Error::EmptyRange(..))));
        scan = LevelScan { e_min: 0.0, e_max: 1.0, resolution: 8, radius: 50.0 };
        assert!(matches!(find_levels(&l, 2.0, &scan), Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn wigner_examples() {
        assert_eq!(wigner_pdf(0.0), 0.0);
        // Simpson on [0, 10].
        let n = 20_000;
        let h = 10.0 / n as f64;
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let mut acc = f(0.0) + f(10.0);
            for i in 1..n {
                acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        assert!((simpson(&wigner_pdf) - 1.0).abs() < 1e-6);
        assert!((simpson(&|s| s * wigner_pdf(s)) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn spacing_examples() {
        let even: Vec<f64> = (0..20).map(|i| 0.5 + 0.25 * i as f64).collect();
        let h = spacing_statistics(&even, 10).unwrap();
        assert!(h.spacings.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.counts.iter().sum::<usize>(), 19);

        let h = spacing_statistics(&[0.0, 1.0, 3.0, 3.5, 7.0], 1).unwrap();
        assert_eq!(h.counts, vec![4]);

        assert!(matches!(spacing_statistics(&[1.0], 4), Err(Error::TooFewLevels(1))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn unimodular_and_flux_conserving(
            e in 0.01f64..6.0,
            n in 2usize..=12,
            c in 0.05f64..6.0,
        ) {
            // Rounding in the entries alone moves det by ~eps |Q11|^2.
            let q = compose_transfer(&layout(n, c), e, 2.0).unwrap();
            let scale = q.m[0][0].norm_sqr();
            prop_assert!((q.det() - ONE).norm() < 1e-10_f64.max(64.0 * f64::EPSILON * scale));
            prop_assert!((q.transmission() + q.reflection() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn histogram_contract(levels in proptest::collection::vec(0.0f64..100.0, 2..60), bins in 1usize..30) {
            let mut levels = levels;
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            prop_assume!(levels.len() >= 2);
            let h = spacing_statistics(&levels, bins).unwrap();
            prop_assert_eq!(h.counts.iter().sum::<usize>(), levels.len() - 1);
            let mean = h.spacings.iter().sum::<f64>() / h.spacings.len() as f64;
            prop_assert!((mean - 1.0).abs() < 1e-9);
        }
    }
}
