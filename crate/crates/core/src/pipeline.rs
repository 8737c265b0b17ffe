//! geometry -> wavepacket -> evolution -> correlation for one `(N, c)`.

use sha2::{Digest, Sha256};

use crate::correlation::{correlate, CorrelationRecord, Fingerprint};
use crate::error::Result;
use crate::evolution::{evolve, Evolution, EvolutionConfig, Scheme};
use crate::geometry::{build_layout, BarrierLayout, PotentialSpec};
use crate::number::Exact;
use crate::wavepacket::{analytic_packet, density, ComplexField, GridSpec, PacketParams, RealField};

/// Every physical and numerical input except `(N, c)`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Physics {
    pub length: Exact,
    pub height: Exact,
    pub t_final: Exact,
    pub dx: Exact,
    pub dt: Exact,
    pub x_min: Exact,
    pub x_max: Exact,
    pub x0: Exact,
    pub p0: Exact,
    pub w0: Exact,
    pub mass: Exact,
    pub scheme: Scheme,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            length: Exact::integer(20),
            height: Exact::integer(2),
            t_final: Exact::integer(6),
            dx: Exact::new(1, 7),
            dt: Exact::new(1, 50),
            x_min: Exact::integer(-40),
            x_max: Exact::integer(60),
            x0: Exact::integer(-10),
            p0: Exact::integer(3),
            w0: Exact::new(1, 2),
            mass: Exact::new(1, 2),
            scheme: Scheme::CrankNicolson,
        }
    }
}

/// Bumped whenever the numerics behind a record change.
pub const FORMAT_VERSION: u32 = 1;

impl Physics {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.x_min.value(), self.x_max.value(), self.dx.value(), self.dt.value())
    }

    pub fn packet(&self) -> PacketParams {
        PacketParams { x0: self.x0.value(), p0: self.p0.value(), w0: self.w0.value(), mass: self.mass.value() }
    }

    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            scheme: self.scheme,
            t_final: self.t_final.value(),
            snapshot_stride: 0,
            mass: self.mass.value(),
        }
    }

    pub fn potential(&self, n: usize, c: Exact) -> PotentialSpec {
        PotentialSpec {
            n_barriers: n,
            c: c.value(),
            total_length: self.length.value(),
            height: self.height.value(),
        }
    }

    /// `(key, value)` pairs in canonical order, without `(N, c)`.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        vec![
            ("length", self.length.to_string()),
            ("height", self.height.to_string()),
            ("t_final", self.t_final.to_string()),
            ("dx", self.dx.to_string()),
            ("dt", self.dt.to_string()),
            ("x_min", self.x_min.to_string()),
            ("x_max", self.x_max.to_string()),
            ("x0", self.x0.to_string()),
            ("p0", self.p0.to_string()),
            ("w0", self.w0.to_string()),
            ("mass", self.mass.to_string()),
            ("scheme", self.scheme.to_string()),
        ]
    }

    /// Full parameter list for one task, in fingerprint order.
    pub fn task_params(&self, n: usize, c: Exact) -> Vec<(String, String)> {
        let mut out = vec![
            ("format".to_string(), FORMAT_VERSION.to_string()),
            ("n".to_string(), n.to_string()),
            ("c".to_string(), c.to_string()),
        ];
        out.extend(self.params().into_iter().map(|(k, v)| (k.to_string(), v)));
        out
    }
}

pub fn fingerprint_of(params: &[(String, String)]) -> Fingerprint {
    let mut h = Sha256::new();
    for (k, v) in params {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    Fingerprint(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

pub fn fingerprint(physics: &Physics, n: usize, c: Exact) -> Fingerprint {
    fingerprint_of(&physics.task_params(n, c))
}

/// Intermediate products of one run, for file emission.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub layout: BarrierLayout,
    pub initial: ComplexField,
    pub initial_density: RealField,
    pub evolution: Evolution,
    pub final_density: RealField,
    pub record: CorrelationRecord,
}

pub fn simulate(physics: &Physics, n: usize, c: Exact, snapshot_stride: usize) -> Result<Simulation> {
    let spec = physics.potential(n, c);
    let layout = build_layout(&spec)?;
    let grid = physics.grid()?;
    let initial = analytic_packet(&physics.packet(), &grid, 0.0)?;
    let config = EvolutionConfig { snapshot_stride, ..physics.evolution() };
    let evolution = evolve(&initial, &layout, spec.height, &config)?;
    let initial_density = density(&initial);
    let final_density = density(&evolution.final_field);
    let matrix = correlate(&initial_density, &final_density)?;
    let record = CorrelationRecord {
        n_barriers: n,
        c,
        matrix,
        fingerprint: fingerprint(physics, n, c),
        barrier_width_over_dx: layout.barrier_width / grid.dx,
    };
    Ok(Simulation { layout, initial, initial_density, evolution, final_density, record })
}

pub fn compute_record(physics: &Physics, n: usize, c: Exact) -> Result<CorrelationRecord> {
    simulate(physics, n, c, 0).map(|s| s.record)
}
