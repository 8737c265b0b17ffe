//! Third-order Lanczos reduction of the initial/final density pair.
//!
//! The operator is pointwise multiplication by the final density and the
//! Krylov sequence is seeded with the initial density. The correlation `C`
//! is the last diagonal entry of the resulting 3x3 tridiagonal matrix.

use std::fmt;

use crate::error::{Error, Result};
use crate::number::{Exact, Num};
use crate::wavepacket::RealField;

/// Symmetric 3x3 tridiagonal matrix.
///
/// `order` is the Krylov dimension actually reached. When the recurrence
/// breaks down early (`order < 3`) the missing entries are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tridiag3 {
    pub alpha: [f64; 3],
    pub beta: [f64; 2],
    pub order: usize,
}

impl Tridiag3 {
    pub fn breakdown(&self) -> bool {
        self.order < 3
    }

    pub fn entries(&self) -> [f64; 5] {
        [self.alpha[0], self.alpha[1], self.alpha[2], self.beta[0], self.beta[1]]
    }

    /// Every entry divided by `alpha[0]`; unchanged when `alpha[0] == 0`.
    pub fn normalized(&self) -> Tridiag3 {
        let s = self.alpha[0];
        if s == 0.0 {
            return *self;
        }
        Tridiag3 {
            alpha: self.alpha.map(|a| a / s),
            beta: self.beta.map(|b| b / s),
            order: self.order,
        }
    }

    pub fn dense(&self) -> [[f64; 3]; 3] {
        let [a0, a1, a2] = self.alpha;
        let [b0, b1] = self.beta;
        [[a0, b0, 0.0], [b0, a1, b1], [0.0, b1, a2]]
    }
}

/// A real symmetric linear operator on grid samples.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[f64], out: &mut [f64]);
    /// Scale used for the breakdown threshold (an upper bound on `|A|`).
    fn scale(&self) -> f64;
}

/// Pointwise multiplication by a fixed vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    pub diag: Vec<f64>,
}

impl SymmetricOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for ((o, d), x) in out.iter_mut().zip(&self.diag).zip(v) {
            *o = d * x;
        }
    }

    fn scale(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

pub fn correlation_operator(final_density: &RealField) -> DiagonalOperator {
    DiagonalOperator { diag: final_density.values.clone() }
}

const BREAKDOWN_RTOL: f64 = 1e-14;

/// Three Lanczos steps with full reorthogonalisation.
///
/// `weight` is the uniform quadrature weight of the inner product
/// (`dx` for grid fields); it does not change the resulting matrix.
pub fn lanczos3<A: SymmetricOperator + ?Sized>(op: &A, seed: &[f64], weight: f64) -> Result<Tridiag3> {
    lanczos(op, seed, weight, 3).map(|(alpha, beta, order)| Tridiag3 {
        alpha: [alpha[0], alpha[1], alpha[2]],
        beta: [beta[0], beta[1]],
        order,
    })
}

/// `k`-step Lanczos. Returns zero-padded `alpha` (len k), `beta` (len k-1)
/// and the Krylov dimension reached.
fn lanczos<A: SymmetricOperator + ?Sized>(
    op: &A,
    seed: &[f64],
    weight: f64,
    k: usize,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let n = op.dim();
    if seed.len() != n {
        return Err(Error::GridMismatch);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * weight;
    let seed_norm = dot(seed, seed).sqrt();
    if !(seed_norm > 0.0) || !seed_norm.is_finite() {
        return Err(Error::ZeroSeed);
    }

    let threshold = BREAKDOWN_RTOL * op.scale();
    let mut alpha = vec![0.0; k];
    let mut beta = vec![0.0; k.saturating_sub(1)];
    let mut basis: Vec<Vec<f64>> = vec![seed.iter().map(|s| s / seed_norm).collect()];
    let mut w = vec![0.0; n];

    for step in 0..k {
        let v = &basis[step];
        op.apply(v, &mut w);
        alpha[step] = dot(v, &w);
        if step + 1 == k {
            return Ok((alpha, beta, k));
        }
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi -= alpha[step] * vi;
        }
        if step > 0 {
            let prev = &basis[step - 1];
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= beta[step - 1] * pi;
            }
        }
        for q in &basis {
            let proj = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= proj * qi;
            }
        }
        let b = dot(&w, &w).sqrt();
        if !(b > threshold) {
            return Ok((alpha, beta, step + 1));
        }
        beta[step] = b;
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Ok((alpha, beta, k))
}

/// Lanczos matrix of `diag(final)` seeded by `initial`.
pub fn correlate(initial_density: &RealField, final_density: &RealField) -> Result<Tridiag3> {
    if initial_density.grid != final_density.grid {
        return Err(Error::GridMismatch);
    }
    let op = correlation_operator(final_density);
    lanczos3(&op, &initial_density.values, initial_density.grid.dx)
}

/// Content hash of every input that determines a record.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(pub String);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationRecord {
    pub n_barriers: usize,
    pub c: Exact,
    pub matrix: Tridiag3,
    pub fingerprint: Fingerprint,
    /// Barrier width over grid spacing; below ~1 the pointwise-sampled
    /// potential under-resolves individual barriers.
    pub barrier_width_over_dx: f64,
}

impl CorrelationRecord {
    pub const CSV_HEADER: &'static str = "N,c,C,alpha1,alpha2,alpha3,beta1,beta2,breakdown,fingerprint";

    pub fn correlation(&self) -> f64 {
        self.matrix.alpha[2]
    }

    /// Columns as in [`Self::CSV_HEADER`]; floats use the shortest
    /// representation that parses back to the same bits.
    pub fn csv_row(&self) -> String {
        let m = &self.matrix;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n_barriers,
            self.c,
            Num(self.correlation()),
            Num(m.alpha[0]),
            Num(m.alpha[1]),
            Num(m.alpha[2]),
            Num(m.beta[0]),
            Num(m.beta[1]),
            m.breakdown(),
            self.fingerprint
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::GridSpec;

    fn field(values: Vec<f64>) -> RealField {
        let n = values.len();
        RealField { grid: GridSpec::new(0.0, (n - 1) as f64 * 0.5, 0.5, 0.01).unwrap(), values }
    }

    #[test]
    fn operator_examples() {
        let ones = field(vec![1.0; 4]);
        let op = correlation_operator(&ones);
        let mut out = vec![0.0; 4];
        op.apply(&[1.0, 2.0, 3.0, 4.0], &mut out);
        assert_eq!(out, vec![1.0, 2.0, 3.0, 4.0]);

        let op = correlation_operator(&field(vec![0.0; 4]));
        op.apply(&[1.0, 2.0, 3.0, 4.0], &mut out);
        assert_eq!(out, vec![0.0; 4]);

        let op = correlation_operator(&field(vec![2.0, 0.5, 1.0, 3.0]));
        op.apply(&[1.0, 2.0, 3.0, 4.0], &mut out);
        assert_eq!(out, vec![2.0, 1.0, 3.0, 12.0]);
    }

    #[test]
    fn identity_breaks_down_after_one_step() {
        let op = DiagonalOperator { diag: vec![1.0; 5] };
        let m = lanczos3(&op, &[0.3, -1.0, 2.0, 0.1, 0.7], 1.0 / 7.0).unwrap();
        assert!((m.alpha[0] - 1.0).abs() < 1e-15);
        assert_eq!(&m.alpha[1..], &[0.0, 0.0]);
        assert_eq!(m.beta, [0.0, 0.0]);
        assert_eq!(m.order, 1);
        assert!(m.breakdown());
    }

    #[test]
    fn two_by_two_hand_oracle() {
        let op = DiagonalOperator { diag: vec![1.0, 2.0] };
        let s = 1.0 / 2f64.sqrt();
        let m = lanczos3(&op, &[s, s], 1.0).unwrap();
        assert!((m.alpha[0] - 1.5).abs() < 1e-15);
        assert!((m.beta[0] - 0.5).abs() < 1e-15);
        assert!((m.alpha[1] - 1.5).abs() < 1e-15);
        assert_eq!(m.alpha[2], 0.0);
        assert_eq!(m.beta[1], 0.0);
        assert_eq!(m.order, 2);
    }

    #[test]
    fn zero_operator_and_zero_seed() {
        let op = DiagonalOperator { diag: vec![0.0; 3] };
        let m = lanczos3(&op, &[1.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!(m.order, 1);
        assert_eq!(m.entries(), [0.0; 5]);
        assert!(matches!(lanczos3(&op, &[0.0; 3], 1.0), Err(Error::ZeroSeed)));
    }

    #[test]
    fn weight_does_not_change_the_matrix() {
        let op = DiagonalOperator { diag: vec![0.1, 0.7, 0.2, 1.3, 0.9, 0.05] };
        let seed = [0.5, 0.1, 0.9, 0.3, 0.2, 0.8];
        let a = lanczos3(&op, &seed, 1.0).unwrap();
        let b = lanczos3(&op, &seed, 1.0 / 7.0).unwrap();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn scaling_the_final_density_scales_every_entry() {
        let init = field(vec![0.1, 0.5, 0.9, 0.4, 0.05, 0.0, 0.2]);
        let fin = field(vec![0.3, 0.1, 0.6, 0.8, 0.2, 0.9, 0.4]);
        let s = 37.5;
        let scaled = field(fin.values.iter().map(|v| v * s).collect());
        let a = correlate(&init, &fin).unwrap();
        let b = correlate(&init, &scaled).unwrap();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            assert!((x * s - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
        let (na, nb) = (a.normalized(), b.normalized());
        for (x, y) in na.entries().iter().zip(nb.entries()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn alphas_are_rayleigh_quotients() {
        let init = field(vec![0.1, 0.5, 0.9, 0.4, 0.05, 0.3, 0.2]);
        let fin = field(vec![0.3, 0.1, 0.6, 0.8, 0.2, 0.9, 0.4]);
        let m = correlate(&init, &fin).unwrap();
        for a in m.alpha {
            assert!((0.1..=0.9).contains(&a), "{a}");
        }
        assert!(m.beta.iter().all(|&b| b >= 0.0));
    }

    #[test]
    fn csv_row_layout() {
        let rec = CorrelationRecord {
            n_barriers: 10,
            c: Exact::new(7, 3),
            matrix: Tridiag3 { alpha: [1.0, 2.5, 3.0], beta: [0.5, 0.25], order: 3 },
            fingerprint: Fingerprint("abc".into()),
            barrier_width_over_dx: 0.42,
        };
        assert_eq!(rec.csv_row(), "10,7/3,3,1,2.5,3,0.5,0.25,false,abc");
        assert_eq!(rec.correlation(), rec.matrix.alpha[2]);
    }
}
