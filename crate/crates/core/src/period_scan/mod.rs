//! `(N, c)` sweeps, the record cache and regularity detection.
//!
//! Two kinds of regularity are looked for:
//!
//! * periods in `N`: the record at `(N + m P, c)` carries the same
//!   tridiagonal matrix as `(N, c)`;
//! * constancy windows in `c`: at fixed `N`, contiguous runs of the sorted
//!   `c` values over which the matrix does not change.
//!
//! Matrices are compared after dividing by `alpha1` unless raw comparison is
//! requested.

pub mod cache;
pub mod reference;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::correlation::{CorrelationRecord, Tridiag3};
use crate::error::{Error, Result};
use crate::number::Exact;
use crate::pipeline::{compute_record, Physics};

pub use cache::Cache;

pub type TaskKey = (usize, Exact);
pub type RecordMap = BTreeMap<TaskKey, CorrelationRecord>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareMode {
    Normalized,
    Raw,
}

impl fmt::Display for CompareMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareMode::Normalized => "normalized",
            CompareMode::Raw => "raw",
        })
    }
}

impl FromStr for CompareMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "normalized" => Ok(CompareMode::Normalized),
            "raw" => Ok(CompareMode::Raw),
            other => Err(Error::Parse(other.into(), "expected normalized or raw".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheMode {
    ReadWrite,
    /// Only cached records are used; nothing is computed.
    ReadOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub n_values: Vec<usize>,
    pub c_values: Vec<Exact>,
    pub periods: Vec<usize>,
    /// Relative per-entry tolerance for matrix equality.
    pub tolerance: f64,
    pub compare: CompareMode,
    pub physics: Physics,
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
    pub cache_mode: CacheMode,
    /// Also compute the `(N + m P, c)` records needed for period detection.
    pub partners: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            n_values: reference::table_n_values(),
            c_values: reference::table_c_values(),
            periods: vec![140, 28],
            tolerance: 1e-6,
            compare: CompareMode::Normalized,
            physics: Physics::default(),
            workers: 1,
            cache_dir: None,
            cache_mode: CacheMode::ReadWrite,
            partners: true,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::TooFewBarriers(*n));
        }
        if let Some(c) = self.c_values.iter().find(|c| !c.is_positive()) {
            return Err(Error::NonPositiveRatio(c.value()));
        }
        if self.periods.contains(&0) {
            return Err(Error::Config("periods must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.workers == 0 {
            return Err(Error::Config("need at least one worker".into()));
        }
        Ok(())
    }

    /// Least common multiple of the candidate periods. A period `P` is
    /// checked against every multiple `N + m P` up to `N + horizon`, so a
    /// period that divides a larger candidate is tested against the same
    /// far partner.
    pub fn horizon(&self) -> usize {
        self.periods.iter().fold(1, |acc, &p| acc / gcd(acc, p) * p)
    }

    pub fn multiples(&self, period: usize) -> usize {
        self.horizon() / period
    }

    pub fn base_tasks(&self) -> Vec<TaskKey> {
        let mut out = Vec::with_capacity(self.n_values.len() * self.c_values.len());
        for &n in &self.n_values {
            for &c in &self.c_values {
                out.push((n, c));
            }
        }
        out
    }

    pub fn planned_tasks(&self) -> BTreeSet<TaskKey> {
        let mut tasks: BTreeSet<TaskKey> = self.base_tasks().into_iter().collect();
        if self.partners {
            for (n, c) in self.base_tasks() {
                for &p in &self.periods {
                    for m in 1..=self.multiples(p) {
                        tasks.insert((n + m * p, c));
                    }
                }
            }
        }
        tasks
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskFailure {
    pub n: usize,
    pub c: Exact,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOutcome {
    pub records: RecordMap,
    pub failures: Vec<TaskFailure>,
    /// Records computed in this run (cache misses).
    pub evolutions: usize,
    pub cache_hits: usize,
}

pub fn run_scan(config: &ScanConfig) -> Result<ScanOutcome> {
    run_scan_with(config, compute_record)
}

/// [`run_scan`] with a caller-supplied record producer.
pub fn run_scan_with<F>(config: &ScanConfig, compute: F) -> Result<ScanOutcome>
where
    F: Fn(&Physics, usize, Exact) -> Result<CorrelationRecord> + Sync,
{
    config.validate()?;
    let cache = config.cache_dir.as_ref().map(Cache::open).transpose()?;
    if config.cache_mode == CacheMode::ReadOnly && cache.is_none() {
        return Err(Error::Config("read-only scan needs a cache directory".into()));
    }
    let tasks: Vec<TaskKey> = config.planned_tasks().into_iter().collect();
    let evolutions = AtomicUsize::new(0);
    let hits = AtomicUsize::new(0);

    let run_task = |&(n, c): &TaskKey| -> Result<CorrelationRecord> {
        let params = config.physics.task_params(n, c);
        if let Some(cache) = &cache {
            if let Some(rec) = cache.load(&params) {
                hits.fetch_add(1, Ordering::Relaxed);
                return Ok(rec);
            }
            if config.cache_mode == CacheMode::ReadOnly {
                return Err(Error::NotCached { n, c: c.to_string() });
            }
        }
        let rec = compute(&config.physics, n, c)?;
        evolutions.fetch_add(1, Ordering::Relaxed);
        if let Some(cache) = &cache {
            cache.store(&rec, &params)?;
        }
        Ok(rec)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<(TaskKey, Result<CorrelationRecord>)> =
        pool.install(|| tasks.par_iter().map(|key| (*key, run_task(key))).collect());

    let mut records = RecordMap::new();
    let mut failures = Vec::new();
    for ((n, c), res) in results {
        match res {
            Ok(rec) => {
                records.insert((n, c), rec);
            }
            Err(e) => failures.push(TaskFailure { n, c, error: e.to_string() }),
        }
    }
    Ok(ScanOutcome {
        records,
        failures,
        evolutions: evolutions.into_inner(),
        cache_hits: hits.into_inner(),
    })
}

/// Absolute floor for entries near zero.
pub const ABS_FLOOR: f64 = 1e-12;

fn compared(m: &Tridiag3, mode: CompareMode) -> [f64; 5] {
    match mode {
        CompareMode::Normalized => m.normalized().entries(),
        CompareMode::Raw => m.entries(),
    }
}

/// Largest entrywise relative deviation; infinite when the breakdown
/// patterns differ.
pub fn matrix_deviation(a: &Tridiag3, b: &Tridiag3, mode: CompareMode) -> f64 {
    if a.order != b.order {
        return f64::INFINITY;
    }
    let (x, y) = (compared(a, mode), compared(b, mode));
    x.iter()
        .zip(&y)
        .map(|(p, q)| {
            let diff = (p - q).abs();
            if diff == 0.0 {
                0.0
            } else {
                diff / p.abs().max(q.abs()).max(ABS_FLOOR)
            }
        })
        .fold(0.0, f64::max)
}

/// Entrywise equality within relative `tol` (absolute floor 1e-12).
pub fn matrices_equal(a: &Tridiag3, b: &Tridiag3, tol: f64, mode: CompareMode) -> bool {
    if a.order != b.order {
        return false;
    }
    let (x, y) = (compared(a, mode), compared(b, mode));
    x.iter()
        .zip(&y)
        .all(|(p, q)| (p - q).abs() <= (tol * p.abs().max(q.abs())).max(ABS_FLOOR))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeriodFlag {
    Periodic,
    NotPeriodic,
    /// A partner needed for the decision is missing.
    Indeterminate,
}

impl fmt::Display for PeriodFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PeriodFlag::Periodic => "periodic",
            PeriodFlag::NotPeriodic => "not_periodic",
            PeriodFlag::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodCheck {
    pub period: usize,
    pub flag: PeriodFlag,
    /// Partner barrier counts that were available and compared.
    pub compared: Vec<usize>,
    pub missing: Vec<usize>,
    /// Largest deviation over compared partners (NaN if none).
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodEntry {
    pub n: usize,
    pub c: Exact,
    pub checks: Vec<PeriodCheck>,
}

impl PeriodEntry {
    pub fn flag(&self, period: usize) -> Option<PeriodFlag> {
        self.checks.iter().find(|c| c.period == period).map(|c| c.flag)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodReport {
    pub periods: Vec<usize>,
    pub tolerance: f64,
    pub compare: CompareMode,
    pub entries: Vec<PeriodEntry>,
}

/// Period flags for every base `(N, c)` of `config`.
pub fn detect_periods(records: &RecordMap, config: &ScanConfig) -> PeriodReport {
    let entries = config
        .base_tasks()
        .into_iter()
        .map(|(n, c)| {
            let base = records.get(&(n, c));
            let checks = config
                .periods
                .iter()
                .map(|&p| {
                    let mut compared = Vec::new();
                    let mut missing = Vec::new();
                    let mut unequal = false;
                    let mut worst = f64::NAN;
                    for m in 1..=config.multiples(p) {
                        let partner_n = n + m * p;
                        match (base, records.get(&(partner_n, c))) {
                            (Some(b), Some(partner)) => {
                                let dev = matrix_deviation(&b.matrix, &partner.matrix, config.compare);
                                worst = if worst.is_nan() { dev } else { worst.max(dev) };
                                if !matrices_equal(&b.matrix, &partner.matrix, config.tolerance, config.compare) {
                                    unequal = true;
                                }
                                compared.push(partner_n);
                            }
                            _ => missing.push(partner_n),
                        }
                    }
                    let flag = if base.is_none() {
                        PeriodFlag::Indeterminate
                    } else if unequal {
                        PeriodFlag::NotPeriodic
                    } else if !missing.is_empty() {
                        PeriodFlag::Indeterminate
                    } else {
                        PeriodFlag::Periodic
                    };
                    PeriodCheck { period: p, flag, compared, missing, max_deviation: worst }
                })
                .collect();
            PeriodEntry { n, c, checks }
        })
        .collect();
    PeriodReport {
        periods: config.periods.clone(),
        tolerance: config.tolerance,
        compare: config.compare,
        entries,
    }
}

impl PeriodReport {
    /// Entries where a period is flagged periodic but a larger period it
    /// divides, whose partner was compared, is not.
    pub fn implication_violations(&self) -> Vec<(usize, Exact, usize, usize)> {
        let mut out = Vec::new();
        for e in &self.entries {
            for small in &e.checks {
                if small.flag != PeriodFlag::Periodic {
                    continue;
                }
                for large in &e.checks {
                    if large.period > small.period
                        && large.period % small.period == 0
                        && large.compared.contains(&(e.n + large.period))
                        && large.flag != PeriodFlag::Periodic
                    {
                        out.push((e.n, e.c, small.period, large.period));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstancyRow {
    pub n: usize,
    /// Maximal runs of the sorted `c` values with a constant matrix.
    pub windows: Vec<Vec<Exact>>,
}

impl ConstancyRow {
    pub fn widest(&self) -> &[Exact] {
        self.windows.iter().max_by_key(|w| w.len()).map_or(&[], |w| w.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstancyReport {
    pub rows: Vec<ConstancyRow>,
}

/// Constancy windows for every `N` that has at least two `c` values.
///
/// Windows are grown greedily from the smallest `c`: a value joins the
/// current window when its matrix equals the window's first matrix.
pub fn detect_c_constancy<'a, I>(records: I, tol: f64, mode: CompareMode) -> ConstancyReport
where
    I: IntoIterator<Item = &'a CorrelationRecord>,
{
    let mut by_n: BTreeMap<usize, BTreeMap<Exact, &CorrelationRecord>> = BTreeMap::new();
    for rec in records {
        by_n.entry(rec.n_barriers).or_default().insert(rec.c, rec);
    }
    let rows = by_n
        .into_iter()
        .filter(|(_, by_c)| by_c.len() >= 2)
        .map(|(n, by_c)| {
            let mut windows: Vec<Vec<Exact>> = Vec::new();
            let mut anchor: Option<&CorrelationRecord> = None;
            for (c, rec) in by_c {
                match anchor {
                    Some(a) if matrices_equal(&a.matrix, &rec.matrix, tol, mode) => {
                        windows.last_mut().expect("window open").push(c);
                    }
                    _ => {
                        anchor = Some(rec);
                        windows.push(vec![c]);
                    }
                }
            }
            ConstancyRow { n, windows }
        })
        .collect();
    ConstancyReport { rows }
}
