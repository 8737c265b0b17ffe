//! Finite-difference propagation of `i psi_t = -(1/2m) psi_xx + V(x) psi`.
//!
//! Space is discretised with the three-point centered stencil; values
//! outside the grid are held at zero. Two time steppers are available:
//! Crank-Nicolson (unitary, default) and forward-time centered-space
//! (`PaperExplicit`), which is only accepted when `dx^2 > dt`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::BarrierLayout;
use crate::wavepacket::{ComplexField, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    CrankNicolson,
    PaperExplicit,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::CrankNicolson => "crank_nicolson",
            Scheme::PaperExplicit => "paper_explicit",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "crank_nicolson" | "crank-nicolson" | "cn" => Ok(Scheme::CrankNicolson),
            "paper_explicit" | "paper-explicit" | "explicit" => Ok(Scheme::PaperExplicit),
            other => Err(Error::Parse(other.into(), "unknown scheme".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub scheme: Scheme,
    pub t_final: f64,
    /// Keep every `snapshot_stride`-th step; 0 keeps only the final field.
    pub snapshot_stride: usize,
    pub mass: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig { scheme: Scheme::CrankNicolson, t_final: 6.0, snapshot_stride: 0, mass: 0.5 }
    }
}

impl EvolutionConfig {
    /// Number of `dt` steps needed to reach `t_final`.
    pub fn steps(&self, dt: f64) -> Result<usize> {
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidEvolution(format!("t_final = {} must be >= 0", self.t_final)));
        }
        if !(self.mass > 0.0) {
            return Err(Error::InvalidEvolution(format!("mass = {} must be positive", self.mass)));
        }
        let ratio = self.t_final / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidEvolution(format!(
                "t_final = {} is not a whole number of steps dt = {dt}",
                self.t_final
            )));
        }
        Ok(steps as usize)
    }
}

/// Step operator for a fixed grid, potential and scheme.
#[derive(Clone, Debug)]
pub struct Propagator {
    scheme: Scheme,
    n: usize,
    dt: f64,
    /// Diagonal of H: `2 kin / dx^2 + V_j`.
    h_diag: Vec<f64>,
    /// Off-diagonal of H: `-kin / dx^2`.
    h_off: f64,
    /// Crank-Nicolson LHS factorisation (Thomas algorithm): upper
    /// coefficients and inverted pivots.
    cn_upper: Vec<Complex64>,
    cn_inv_pivot: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: &GridSpec, potential: &[f64], scheme: Scheme, mass: f64) -> Result<Self> {
        if potential.len() != grid.n_points {
            return Err(Error::GridMismatch);
        }
        if scheme == Scheme::PaperExplicit && !(grid.dx * grid.dx > grid.dt) {
            return Err(Error::StabilityGuard { dx2: grid.dx * grid.dx, dt: grid.dt });
        }
        let kin = 1.0 / (2.0 * mass);
        let inv_dx2 = 1.0 / (grid.dx * grid.dx);
        let h_diag: Vec<f64> = potential.iter().map(|v| 2.0 * kin * inv_dx2 + v).collect();
        let h_off = -kin * inv_dx2;

        let (cn_upper, cn_inv_pivot) = match scheme {
            Scheme::CrankNicolson => {
                // (1 + i dt/2 H) psi' = (1 - i dt/2 H) psi
                let half = Complex64::new(0.0, 0.5 * grid.dt);
                let off = half * h_off;
                let n = grid.n_points;
                let mut upper = Vec::with_capacity(n);
                let mut inv_pivot = Vec::with_capacity(n);
                let mut prev_upper = Complex64::new(0.0, 0.0);
                for &d in &h_diag {
                    let pivot = Complex64::new(1.0, 0.0) + half * d - off * prev_upper;
                    let inv = pivot.inv();
                    prev_upper = off * inv;
                    upper.push(prev_upper);
                    inv_pivot.push(inv);
                }
                (upper, inv_pivot)
            }
            Scheme::PaperExplicit => (Vec::new(), Vec::new()),
        };

        Ok(Propagator {
            scheme,
            n: grid.n_points,
            dt: grid.dt,
            h_diag,
            h_off,
            cn_upper,
            cn_inv_pivot,
        })
    }

    pub fn for_layout(
        grid: &GridSpec,
        layout: &BarrierLayout,
        height: f64,
        scheme: Scheme,
        mass: f64,
    ) -> Result<Self> {
        let potential: Vec<f64> = grid.positions().map(|x| layout.potential_at(x, height)).collect();
        Propagator::new(grid, &potential, scheme, mass)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// `H psi` with zero values outside the grid.
    fn apply_h(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        for j in 0..n {
            let left = if j > 0 { psi[j - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if j + 1 < n { psi[j + 1] } else { Complex64::new(0.0, 0.0) };
            out[j] = psi[j] * self.h_diag[j] + (left + right) * self.h_off;
        }
    }

    /// Advance `psi` by one `dt`, in place. `scratch` must have the same length.
    pub fn step_in_place(&self, psi: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), self.n);
        self.apply_h(psi, scratch);
        match self.scheme {
            Scheme::PaperExplicit => {
                let f = Complex64::new(0.0, -self.dt);
                for (p, hp) in psi.iter_mut().zip(scratch.iter()) {
                    *p += f * hp;
                }
            }
            Scheme::CrankNicolson => {
                let half = Complex64::new(0.0, 0.5 * self.dt);
                let off = half * self.h_off;
                // rhs = psi - i dt/2 H psi, then forward sweep in place.
                let mut prev = Complex64::new(0.0, 0.0);
                for j in 0..self.n {
                    let rhs = psi[j] - half * scratch[j];
                    prev = (rhs - off * prev) * self.cn_inv_pivot[j];
                    psi[j] = prev;
                }
                for j in (0..self.n.saturating_sub(1)).rev() {
                    let next = psi[j + 1];
                    psi[j] -= self.cn_upper[j] * next;
                }
            }
        }
    }
}

/// One `dt` advance of `field`.
pub fn step_once(field: &ComplexField, propagator: &Propagator) -> Result<ComplexField> {
    if field.values.len() != propagator.n {
        return Err(Error::GridMismatch);
    }
    let mut out = field.clone();
    let mut scratch = vec![Complex64::new(0.0, 0.0); propagator.n];
    propagator.step_in_place(&mut out.values, &mut scratch);
    if !out.is_finite() {
        return Err(Error::NonFinite { step: 1 });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub field: ComplexField,
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub final_field: ComplexField,
    pub steps: usize,
    pub snapshots: Vec<Snapshot>,
}

pub fn evolve(
    initial: &ComplexField,
    layout: &BarrierLayout,
    height: f64,
    config: &EvolutionConfig,
) -> Result<Evolution> {
    let grid = initial.grid;
    if !grid.covers(layout.left(), layout.right()) {
        return Err(Error::InvalidGrid(format!(
            "grid [{}, {}] does not contain the barrier array [{}, {}]",
            grid.x_min,
            grid.x_max,
            layout.left(),
            layout.right()
        )));
    }
    let steps = config.steps(grid.dt)?;
    let propagator = Propagator::for_layout(&grid, layout, height, config.scheme, config.mass)?;
    run_steps(initial, &propagator, steps, config.snapshot_stride)
}

/// Evolve with an explicit potential sampled on the grid.
pub fn evolve_with_potential(
    initial: &ComplexField,
    potential: &[f64],
    config: &EvolutionConfig,
) -> Result<Evolution> {
    let steps = config.steps(initial.grid.dt)?;
    let propagator = Propagator::new(&initial.grid, potential, config.scheme, config.mass)?;
    run_steps(initial, &propagator, steps, config.snapshot_stride)
}

fn run_steps(
    initial: &ComplexField,
    propagator: &Propagator,
    steps: usize,
    stride: usize,
) -> Result<Evolution> {
    if initial.values.len() != propagator.n {
        return Err(Error::GridMismatch);
    }
    let grid = initial.grid;
    let mut psi = initial.values.clone();
    let mut scratch = vec![Complex64::new(0.0, 0.0); psi.len()];
    let mut snapshots = Vec::new();
    for step in 1..=steps {
        propagator.step_in_place(&mut psi, &mut scratch);
        if psi.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        if stride > 0 && step % stride == 0 {
            snapshots.push(Snapshot {
                step,
                time: step as f64 * grid.dt,
                field: ComplexField { grid, values: psi.clone() },
            });
        }
    }
    Ok(Evolution { final_field: ComplexField { grid, values: psi }, steps, snapshots })
}
