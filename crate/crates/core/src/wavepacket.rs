//! Complex Gaussian packet, grid sampling and densities.
//!
//! Units follow `hbar = 1`; the free packet solves
//! `i psi_t = -(1 / 2m) psi_xx`, which is `i psi_t = -psi_xx` at the
//! default mass `m = 1/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub const DEFAULT_DX: f64 = 1.0 / 7.0;
    pub const DEFAULT_DT: f64 = 1.0 / 50.0;

    /// The extent `x_max - x_min` must be an integer multiple of `dx`
    /// (relative mismatch below 1e-9).
    pub fn new(x_min: f64, x_max: f64, dx: f64, dt: f64) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!("empty extent [{x_min}, {x_max}]")));
        }
        if !(dx > 0.0) || !(dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dx = {dx} and dt = {dt} must be positive")));
        }
        let cells = (x_max - x_min) / dx;
        let rounded = cells.round();
        if rounded < 2.0 || (cells - rounded).abs() > 1e-9 * cells {
            return Err(Error::InvalidGrid(format!(
                "extent {} is not a whole number (>= 2) of cells of width {dx}",
                x_max - x_min
            )));
        }
        Ok(GridSpec { x_min, x_max, dx, dt, n_points: rounded as usize + 1 })
    }

    /// Default grid: `[-40, 60]`, `dx = 1/7`, `dt = 1/50`.
    pub fn default_grid() -> Self {
        GridSpec::new(-40.0, 60.0, Self::DEFAULT_DX, Self::DEFAULT_DT)
            .expect("default grid is valid")
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.x(i))
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.x_min <= lo && hi <= self.x_max
    }

    /// Index of the grid point nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.dx).round();
        i.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PacketParams {
    /// Initial mean position.
    pub x0: f64,
    /// Initial mean momentum.
    pub p0: f64,
    /// Initial width in momentum space.
    pub w0: f64,
    pub mass: f64,
}

impl Default for PacketParams {
    fn default() -> Self {
        PacketParams { x0: -10.0, p0: 3.0, w0: 0.5, mass: 0.5 }
    }
}

impl PacketParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.w0 > 0.0) {
            return Err(Error::InvalidPacket(format!("w0 = {} must be positive", self.w0)));
        }
        if !(self.mass > 0.0) {
            return Err(Error::InvalidPacket(format!("mass = {} must be positive", self.mass)));
        }
        if !self.x0.is_finite() || !self.p0.is_finite() {
            return Err(Error::InvalidPacket("x0 and p0 must be finite".into()));
        }
        Ok(())
    }

    /// Packet amplitude at `(x, t)`.
    ///
    /// ```text
    /// sqrt(w0) pi^(1/4) exp(-p0^2 / 4w0^2) exp(w0^2 (i(x0 - x) - p0 / 2w0^2)^2 / d) / sqrt(d)
    /// d = 1 + 2 i t w0^2 / m
    /// ```
    ///
    /// At `t = 0` this is `sqrt(w0) pi^(1/4) exp(-w0^2 (x - x0)^2 + i p0 (x - x0))`.
    pub fn amplitude(&self, x: f64, t: f64) -> Complex64 {
        let w2 = self.w0 * self.w0;
        let d = Complex64::new(1.0, 2.0 * t * w2 / self.mass);
        let u = Complex64::new(-self.p0 / (2.0 * w2), self.x0 - x);
        let prefactor = self.w0.sqrt() * PI.powf(0.25) * (-self.p0 * self.p0 / (4.0 * w2)).exp();
        prefactor * (w2 * u * u / d).exp() / d.sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ComplexField {
    pub fn zeros(grid: GridSpec) -> Self {
        ComplexField { grid, values: vec![Complex64::new(0.0, 0.0); grid.n_points] }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl RealField {
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dx).sqrt()
    }

    pub fn dot(&self, other: &RealField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.dx)
    }

    /// Index of the largest value (first on ties).
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, _)| i)
    }
}

pub fn analytic_packet(params: &PacketParams, grid: &GridSpec, t: f64) -> Result<ComplexField> {
    params.validate()?;
    let values = grid.positions().map(|x| params.amplitude(x, t)).collect();
    Ok(ComplexField { grid: *grid, values })
}

/// Pointwise `Re^2 + Im^2`.
pub fn density(field: &ComplexField) -> RealField {
    RealField { grid: field.grid, values: field.values.iter().map(|v| v.norm_sqr()).collect() }
}

/// `sqrt(sum |v|^2 dx)`.
pub fn l2_norm(field: &ComplexField) -> f64 {
    (field.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid.dx).sqrt()
}

/// `sum conj(a) b dx`.
pub fn overlap(a: &ComplexField, b: &ComplexField) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let s: Complex64 = a.values.iter().zip(&b.values).map(|(x, y)| x.conj() * y).sum();
    Ok(s * a.grid.dx)
}
