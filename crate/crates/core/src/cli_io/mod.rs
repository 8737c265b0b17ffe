//! Command-line front end: `simulate`, `scan`, `levels` and `report`.
//!
//! Exit codes are 0 on success, 1 when some scan task failed and 2 for
//! invalid input.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use crate::correlation::CorrelationRecord;
use crate::error::{Error, Result};
use crate::evolution::Scheme;
use crate::geometry::{build_geometry, PotentialSpec};
use crate::number::{Exact, Num};
use crate::period_scan::{
    self, reference, CacheMode, CompareMode, ConstancyReport, PeriodFlag, PeriodReport, ScanConfig, ScanOutcome,
};
use crate::pipeline::{simulate, Physics, FORMAT_VERSION};
use crate::spectrum::{find_levels, spacing_statistics, wigner_pdf, LevelScan};

use config::{CList, ConfigFile, NList, PeriodList};
use output::{header, unix_now, OutputDir, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

pub const CACHE_ENV: &str = "MBCL_CACHE";

#[derive(Debug, Parser)]
#[command(name = "mbcl", version, about = "Wavepacket correlations through bounded multibarrier arrays")]
pub struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one packet through one array and correlate the densities.
    Simulate(SimulateArgs),
    /// Sweep an (N, c) grid and detect periods and constancy windows.
    Scan(ScanArgs),
    /// Energy levels of the array in a ring of radius R.
    Levels(LevelsArgs),
    /// Re-render scan outputs from cached records only.
    Report(ScanArgs),
}

#[derive(Debug, Default, Args)]
pub struct PhysicsArgs {
    #[arg(long)]
    pub length: Option<Exact>,
    /// Barrier height V.
    #[arg(long, visible_alias = "v")]
    pub height: Option<Exact>,
    #[arg(long)]
    pub t_final: Option<Exact>,
    #[arg(long)]
    pub dx: Option<Exact>,
    #[arg(long)]
    pub dt: Option<Exact>,
    /// crank_nicolson or paper_explicit.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<Exact>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<Exact>,
    /// Initial packet centre.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<Exact>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<Exact>,
    #[arg(long)]
    pub w0: Option<Exact>,
    #[arg(long)]
    pub mass: Option<Exact>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub c: Option<Exact>,
    /// Also emit the density every this many steps (0 = never).
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub physics: PhysicsArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Barrier counts, e.g. `4..15,31..40`.
    #[arg(long)]
    pub n: Option<NList>,
    /// Ratios, e.g. `4,7/3,3/2,1,2/3,1/4`.
    #[arg(long)]
    pub c: Option<CList>,
    #[arg(long)]
    pub periods: Option<PeriodList>,
    /// Relative per-entry tolerance for matrix equality.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// normalized or raw.
    #[arg(long)]
    pub compare: Option<CompareMode>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Write the manifest of planned tasks and stop.
    #[arg(long)]
    pub dry_run: bool,
    #[command(flatten)]
    pub physics: PhysicsArgs,
}

#[derive(Debug, Args)]
pub struct LevelsArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub c: Option<Exact>,
    #[arg(long)]
    pub length: Option<Exact>,
    /// Barrier height V; 0 gives the free ring.
    #[arg(long, visible_alias = "v")]
    pub height: Option<Exact>,
    #[arg(long)]
    pub e_min: Option<f64>,
    #[arg(long)]
    pub e_max: Option<f64>,
    /// Ring radius R (default 10 L).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Samples per free-level spacing.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mbcl: error: {e}");
            if e.is_invalid_input() { EXIT_INVALID } else { EXIT_PARTIAL }
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, &file),
        Command::Scan(a) => cmd_scan(a, &file, false),
        Command::Levels(a) => cmd_levels(a, &file),
        Command::Report(a) => cmd_scan(a, &file, true),
    }
}

fn default_out_dir(file: &ConfigFile, cli: &Option<PathBuf>, sub: &str) -> Result<PathBuf> {
    file.pick(cli.clone(), "out-dir", PathBuf::from("out").join(sub))
}

pub fn resolve_physics(a: &PhysicsArgs, file: &ConfigFile) -> Result<Physics> {
    let d = Physics::default();
    Ok(Physics {
        length: file.pick(a.length, "length", d.length)?,
        height: file.pick(a.height, "height", d.height)?,
        t_final: file.pick(a.t_final, "t-final", d.t_final)?,
        dx: file.pick(a.dx, "dx", d.dx)?,
        dt: file.pick(a.dt, "dt", d.dt)?,
        x_min: file.pick(a.x_min, "x-min", d.x_min)?,
        x_max: file.pick(a.x_max, "x-max", d.x_max)?,
        x0: file.pick(a.x0, "x0", d.x0)?,
        p0: file.pick(a.p0, "p0", d.p0)?,
        w0: file.pick(a.w0, "w0", d.w0)?,
        mass: file.pick(a.mass, "mass", d.mass)?,
        scheme: file.pick(a.scheme, "scheme", d.scheme)?,
    })
}

fn physics_config(p: &Physics) -> Vec<(String, String)> {
    p.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn cmd_simulate(a: &SimulateArgs, file: &ConfigFile) -> Result<i32> {
    let started = unix_now();
    let physics = resolve_physics(&a.physics, file)?;
    let n: usize = file.pick(a.n, "n", 10)?;
    let c: Exact = file.pick(a.c, "c", Exact::integer(1))?;
    let stride: usize = file.pick(a.snapshot_stride, "snapshot-stride", 0)?;
    let out_dir = default_out_dir(file, &a.out_dir, "simulate")?;

    let sim = simulate(&physics, n, c, stride)?;
    let mut out = OutputDir::create(&out_dir)?;

    let grid = sim.initial.grid;
    let mut text = header("density", &["x", "potential", "initial_density", "final_density"], " ");
    for i in 0..grid.n_points {
        let x = grid.x(i);
        let v = sim.layout.potential_at(x, physics.height.value());
        let _ = writeln!(text, "{} {} {} {}", Num(x), Num(v), Num(sim.initial_density.values[i]), Num(sim.final_density.values[i]));
    }
    out.write("density.dat", &text)?;

    let mut text = header("field", &["x", "re", "im"], " ");
    for (i, z) in sim.evolution.final_field.values.iter().enumerate() {
        let _ = writeln!(text, "{} {} {}", Num(grid.x(i)), Num(z.re), Num(z.im));
    }
    out.write("field.dat", &text)?;
    if !sim.final_density.values.iter().all(|v| v.is_finite()) {
        warn!("final field is finite but its density overflows; see field.dat");
    }

    if !sim.evolution.snapshots.is_empty() {
        let mut text = header("snapshots", &["step", "time", "x", "density"], " ");
        for snap in &sim.evolution.snapshots {
            for (i, z) in snap.field.values.iter().enumerate() {
                let _ = writeln!(text, "{} {} {} {}", snap.step, Num(snap.time), Num(grid.x(i)), Num(z.norm_sqr()));
            }
        }
        out.write("snapshots.dat", &text)?;
    }

    out.write("record.csv", &record_file(std::slice::from_ref(&sim.record)))?;

    let m = sim.record.matrix;
    let mut text = header("tridiagonal", &["row", "col1", "col2", "col3"], " ");
    for (i, row) in m.dense().iter().enumerate() {
        let _ = writeln!(text, "{} {} {} {}", i + 1, Num(row[0]), Num(row[1]), Num(row[2]));
    }
    let _ = writeln!(text, "# C = {}", Num(sim.record.correlation()));
    let _ = writeln!(text, "# order = {}", m.order);
    out.write("matrix.txt", &text)?;

    let mut config = vec![("n".to_string(), n.to_string()), ("c".to_string(), c.to_string())];
    config.extend(physics_config(&physics));
    config.push(("snapshot_stride".into(), stride.to_string()));
    config.push(("record_format".into(), FORMAT_VERSION.to_string()));
    let mut manifest = RunManifest::new("simulate", config, started);
    manifest.task(format!("N={n} c={c}"), "ok");
    manifest.notes.push(format!("steps = {}", sim.evolution.steps));
    manifest.notes.push(format!("barrier_width_over_dx = {}", Num(sim.record.barrier_width_over_dx)));
    manifest.finished = unix_now();
    out.finish(&manifest)?;
    info!("simulate N={n} c={c}: C = {}", sim.record.correlation());
    println!("C = {}", Num(sim.record.correlation()));
    Ok(EXIT_OK)
}

fn record_file(records: &[CorrelationRecord]) -> String {
    let cols: Vec<&str> = CorrelationRecord::CSV_HEADER.split(',').chain(["width_over_dx"]).collect();
    let mut text = header("records", &cols, ",");
    for r in records {
        let _ = writeln!(text, "{},{}", r.csv_row(), Num(r.barrier_width_over_dx));
    }
    text
}

/// Cache directory from the flag, then `MBCL_CACHE`, then `./cache`.
pub fn resolve_cache_dir(cli: &Option<PathBuf>, file: &ConfigFile) -> Result<PathBuf> {
    if let Some(dir) = file.pick_opt(cli.clone(), "cache-dir")? {
        return Ok(dir);
    }
    Ok(std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("cache")))
}

pub fn resolve_scan(a: &ScanArgs, file: &ConfigFile) -> Result<ScanConfig> {
    let d = ScanConfig::default();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = ScanConfig {
        n_values: file.pick(a.n.clone(), "n", NList(d.n_values))?.0,
        c_values: file.pick(a.c.clone(), "c", CList(d.c_values))?.0,
        periods: file.pick(a.periods.clone(), "periods", PeriodList(d.periods))?.0,
        tolerance: file.pick(a.tolerance, "tolerance", d.tolerance)?,
        compare: file.pick(a.compare, "compare", d.compare)?,
        physics: resolve_physics(&a.physics, file)?,
        workers: file.pick(a.workers, "workers", workers)?,
        cache_dir: Some(resolve_cache_dir(&a.cache_dir, file)?),
        cache_mode: CacheMode::ReadWrite,
        partners: true,
    };
    config.validate()?;
    Ok(config)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn scan_config_echo(cfg: &ScanConfig) -> Vec<(String, String)> {
    let mut out = vec![
        ("n".to_string(), join(&cfg.n_values)),
        ("c".to_string(), join(&cfg.c_values)),
        ("periods".to_string(), join(&cfg.periods)),
        ("tolerance".to_string(), cfg.tolerance.to_string()),
        ("compare".to_string(), cfg.compare.to_string()),
        ("workers".to_string(), cfg.workers.to_string()),
        (
            "cache_dir".to_string(),
            cfg.cache_dir.as_ref().map_or(String::new(), |p| p.display().to_string()),
        ),
    ];
    out.extend(physics_config(&cfg.physics));
    out.push(("record_format".into(), FORMAT_VERSION.to_string()));
    out
}

/// The period whose flag is compared with the bundled `p` markers.
pub const REFERENCE_PERIOD: usize = 140;

pub fn cmd_scan(a: &ScanArgs, file: &ConfigFile, report_only: bool) -> Result<i32> {
    let started = unix_now();
    let mut cfg = resolve_scan(a, file)?;
    if report_only {
        cfg.cache_mode = CacheMode::ReadOnly;
    }
    let sub = if report_only { "report" } else { "scan" };
    let out_dir = default_out_dir(file, &a.out_dir, sub)?;
    let mut out = OutputDir::create(&out_dir)?;
    let mut manifest = RunManifest::new(sub, scan_config_echo(&cfg), started);

    if a.dry_run {
        let cache = cfg.cache_dir.as_ref().map(period_scan::Cache::open).transpose()?;
        let mut cached = 0;
        for (n, c) in cfg.planned_tasks() {
            let hit = cache.as_ref().is_some_and(|cache| cache.path_for(&crate::pipeline::fingerprint(&cfg.physics, n, c)).exists());
            cached += usize::from(hit);
            manifest.task(format!("N={n} c={c}"), if hit { "planned(cached)" } else { "planned" });
        }
        manifest.notes.push("dry run: nothing computed".into());
        manifest.notes.push(format!("planned = {}, cached = {cached}", manifest.tasks.len()));
        manifest.finished = unix_now();
        out.finish(&manifest)?;
        println!("{} tasks planned ({cached} cached)", manifest.tasks.len());
        return Ok(EXIT_OK);
    }

    let outcome = period_scan::run_scan(&cfg)?;
    let periods = period_scan::detect_periods(&outcome.records, &cfg);
    let base: Vec<&CorrelationRecord> =
        cfg.base_tasks().iter().filter_map(|k| outcome.records.get(k)).collect();
    let constancy = period_scan::detect_c_constancy(base.iter().copied(), cfg.tolerance, cfg.compare);
    let violations = periods.implication_violations();
    if !violations.is_empty() {
        return Err(Error::Config(format!("period implication violated for {violations:?}")));
    }

    out.write("correlations.csv", &render_correlations(&cfg, &outcome, &periods))?;
    out.write("table.csv", &render_table(&cfg, &outcome, &periods))?;
    let partners: Vec<CorrelationRecord> = outcome
        .records
        .iter()
        .filter(|(k, _)| !cfg.n_values.contains(&k.0) || !cfg.c_values.contains(&k.1))
        .map(|(_, r)| r.clone())
        .collect();
    out.write("partners.csv", &record_file(&partners))?;
    out.write("periods.csv", &render_periods_csv(&periods))?;
    out.write("periods.txt", &render_periods_text(&periods))?;
    out.write("constancy.csv", &render_constancy_csv(&constancy))?;
    out.write("constancy.txt", &render_constancy_text(&constancy))?;

    let failed: std::collections::BTreeMap<_, _> =
        outcome.failures.iter().map(|f| ((f.n, f.c), f.error.clone())).collect();
    for key in cfg.planned_tasks() {
        let status = match failed.get(&key) {
            Some(e) => format!("failed: {e}"),
            None => "ok".to_string(),
        };
        manifest.task(format!("N={} c={}", key.0, key.1), status);
    }
    manifest.notes.push(format!("evolutions = {}", outcome.evolutions));
    manifest.notes.push(format!("cache_hits = {}", outcome.cache_hits));
    manifest.notes.push(format!("failures = {}", outcome.failures.len()));
    manifest.finished = unix_now();
    out.finish(&manifest)?;

    println!(
        "{} records ({} computed, {} cached), {} failed",
        outcome.records.len(),
        outcome.evolutions,
        outcome.cache_hits,
        outcome.failures.len()
    );
    Ok(if outcome.failures.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

fn flag_str(flag: Option<PeriodFlag>) -> String {
    flag.map_or_else(|| "na".to_string(), |f| f.to_string())
}

/// `agree`, `disagree` or `na` against the bundled `p` marker.
pub fn p_agreement(reference_p: Option<bool>, ours: Option<PeriodFlag>) -> &'static str {
    match (reference_p, ours) {
        (Some(p), Some(PeriodFlag::Periodic)) => if p { "agree" } else { "disagree" },
        (Some(p), Some(PeriodFlag::NotPeriodic)) => if p { "disagree" } else { "agree" },
        _ => "na",
    }
}

pub fn render_correlations(cfg: &ScanConfig, outcome: &ScanOutcome, periods: &PeriodReport) -> String {
    let period_cols: Vec<String> = cfg.periods.iter().map(|p| format!("periodic_{p}")).collect();
    let mut cols: Vec<&str> = CorrelationRecord::CSV_HEADER.split(',').collect();
    cols.extend(["width_over_dx", "reference_C", "reference_p"]);
    cols.extend(period_cols.iter().map(String::as_str));
    cols.push("p_agreement");
    let mut text = header("correlations", &cols, ",");
    for (entry, (n, c)) in periods.entries.iter().zip(cfg.base_tasks()) {
        let Some(rec) = outcome.records.get(&(n, c)) else { continue };
        let cell = reference::lookup(n, c);
        let ref_c = cell.map_or_else(|| "na".to_string(), |x| Num(x.correlation).to_string());
        let ref_p = cell.map_or_else(|| "na".to_string(), |x| x.periodic.to_string());
        let flags: Vec<String> = cfg.periods.iter().map(|&p| flag_str(entry.flag(p))).collect();
        let agree = p_agreement(cell.map(|x| x.periodic), entry.flag(REFERENCE_PERIOD));
        let _ = writeln!(
            text,
            "{},{},{ref_c},{ref_p},{},{agree}",
            rec.csv_row(),
            Num(rec.barrier_width_over_dx),
            flags.join(",")
        );
    }
    text
}

/// Rows `N`, columns `c` in configured order; `p` marks a periodic entry
/// for the reference period.
pub fn render_table(cfg: &ScanConfig, outcome: &ScanOutcome, periods: &PeriodReport) -> String {
    let mut cols = vec!["N".to_string()];
    cols.extend(cfg.c_values.iter().map(|c| format!("c={c}")));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut text = header("table", &cols, ",");
    for &n in &cfg.n_values {
        let mut row = n.to_string();
        for &c in &cfg.c_values {
            row.push(',');
            if let Some(rec) = outcome.records.get(&(n, c)) {
                row.push_str(&Num(rec.correlation()).to_string());
                let periodic = periods
                    .entries
                    .iter()
                    .find(|e| e.n == n && e.c == c)
                    .and_then(|e| e.flag(REFERENCE_PERIOD))
                    == Some(PeriodFlag::Periodic);
                if periodic {
                    row.push('p');
                }
            } else {
                row.push_str("na");
            }
        }
        text.push_str(&row);
        text.push('\n');
    }
    text
}

fn deviation_str(d: f64) -> String {
    if d.is_nan() { "na".to_string() } else { format!("{d:e}") }
}

pub fn render_periods_csv(report: &PeriodReport) -> String {
    let mut text = header(
        "periods",
        &["N", "c", "period", "flag", "compared", "missing", "max_deviation", "reference_p"],
        ",",
    );
    for e in &report.entries {
        let ref_p = reference::lookup(e.n, e.c).map_or_else(|| "na".to_string(), |x| x.periodic.to_string());
        for chk in &e.checks {
            let list = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(";");
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{},{ref_p}",
                e.n,
                e.c,
                chk.period,
                chk.flag,
                list(&chk.compared),
                list(&chk.missing),
                deviation_str(chk.max_deviation)
            );
        }
    }
    text
}

pub fn render_periods_text(report: &PeriodReport) -> String {
    let mut text = format!(
        "# mbcl periods-text format {}\n# tolerance {} ({}), periods {}\n",
        output::OUTPUT_FORMAT,
        report.tolerance,
        report.compare,
        join(&report.periods)
    );
    let mut head = format!("{:>5} {:>6}", "N", "c");
    for p in &report.periods {
        let _ = write!(head, " {:>14} {:>12}", format!("P={p}"), "max_dev");
    }
    let _ = writeln!(text, "# {head} {:>5}", "ref_p");
    for e in &report.entries {
        let mut line = format!("{:>5} {:>6}", e.n, e.c.to_string());
        for chk in &e.checks {
            let dev = if chk.max_deviation.is_nan() { "na".to_string() } else { format!("{:.3e}", chk.max_deviation) };
            let _ = write!(line, " {:>14} {:>12}", chk.flag.to_string(), dev);
        }
        let ref_p = reference::lookup(e.n, e.c).map_or("", |x| if x.periodic { "p" } else { "-" });
        let _ = writeln!(text, "  {line} {ref_p:>5}");
    }
    let periodic = |p: usize| report.entries.iter().filter(|e| e.flag(p) == Some(PeriodFlag::Periodic)).count();
    for &p in &report.periods {
        let _ = writeln!(text, "# periodic with P={p}: {} of {}", periodic(p), report.entries.len());
    }
    text
}

pub fn render_constancy_csv(report: &ConstancyReport) -> String {
    let mut text = header("constancy", &["N", "window", "length", "c_values"], ",");
    for row in &report.rows {
        for (i, w) in row.windows.iter().enumerate() {
            let cs = w.iter().map(ToString::to_string).collect::<Vec<_>>().join(";");
            let _ = writeln!(text, "{},{},{},{cs}", row.n, i + 1, w.len());
        }
    }
    text
}

pub fn render_constancy_text(report: &ConstancyReport) -> String {
    let mut text = format!("# mbcl constancy-text format {}\n# {:>5}  widest window\n", output::OUTPUT_FORMAT, "N");
    for row in &report.rows {
        let widest = row.widest();
        let desc = if widest.len() >= 2 {
            let min = widest.iter().min().expect("nonempty");
            let max = widest.iter().max().expect("nonempty");
            format!("{min} <= c <= {max} ({} values)", widest.len())
        } else {
            "none".to_string()
        };
        let _ = writeln!(text, "  {:>5}  {desc}", row.n);
    }
    text
}

pub fn cmd_levels(a: &LevelsArgs, file: &ConfigFile) -> Result<i32> {
    let started = unix_now();
    let n: usize = file.pick(a.n, "n", 10)?;
    let c: Exact = file.pick(a.c, "c", Exact::integer(1))?;
    let length: Exact = file.pick(a.length, "length", Exact::integer(20))?;
    let height: Exact = file.pick(a.height, "height", Exact::integer(2))?;
    if height.value() < 0.0 {
        return Err(Error::NonPositiveHeight(height.value()));
    }
    let scan = LevelScan {
        e_min: file.pick(a.e_min, "e-min", 0.0)?,
        e_max: file.pick(a.e_max, "e-max", 2.0)?,
        radius: file.pick(a.radius, "radius", 10.0 * length.value())?,
        resolution: file.pick(a.resolution, "resolution", 32)?,
    };
    let bins: usize = file.pick(a.bins, "bins", 20)?;
    if bins == 0 {
        return Err(Error::Config("bins must be positive".into()));
    }
    let out_dir = default_out_dir(file, &a.out_dir, "levels")?;

    let spec = PotentialSpec { n_barriers: n, c: c.value(), total_length: length.value(), height: height.value() };
    let layout = build_geometry(&spec)?;
    let set = find_levels(&layout, height.value(), &scan)?;
    let energies = set.energies();
    let mut out = OutputDir::create(&out_dir)?;

    let mut text = header("levels", &["index", "energy", "provenance"], " ");
    for (i, l) in set.levels.iter().enumerate() {
        let _ = writeln!(text, "{} {} {}", i + 1, Num(l.energy), l.provenance);
    }
    out.write("levels.dat", &text)?;

    let mut config = vec![
        ("n".to_string(), n.to_string()),
        ("c".to_string(), c.to_string()),
        ("length".to_string(), length.to_string()),
        ("height".to_string(), height.to_string()),
        ("e_min".to_string(), scan.e_min.to_string()),
        ("e_max".to_string(), scan.e_max.to_string()),
        ("radius".to_string(), scan.radius.to_string()),
        ("resolution".to_string(), scan.resolution.to_string()),
        ("bins".to_string(), bins.to_string()),
    ];
    config.push(("record_format".into(), FORMAT_VERSION.to_string()));
    let mut manifest = RunManifest::new("levels", config, started);
    manifest.task(format!("N={n} c={c}"), "ok");
    manifest.notes.push(format!("levels = {}", set.len()));
    manifest.notes.push(format!("rejected_candidates = {}", set.rejected));

    match spacing_statistics(&energies, bins) {
        Ok(h) => {
            let mut text = header("histogram", &["bin_center", "count", "density", "wigner_value"], " ");
            let _ = writeln!(text, "# mean_spacing = {}", Num(h.mean_spacing));
            for ((center, count), dens) in h.centers().zip(&h.counts).zip(h.density()) {
                let _ = writeln!(text, "{} {count} {} {}", Num(center), Num(dens), Num(wigner_pdf(center)));
            }
            out.write("histogram.dat", &text)?;
        }
        Err(e) => manifest.notes.push(format!("histogram skipped: {e}")),
    }
    manifest.finished = unix_now();
    out.finish(&manifest)?;
    println!("{} levels in ({}, {}]", set.len(), scan.e_min, scan.e_max);
    Ok(EXIT_OK)
}
