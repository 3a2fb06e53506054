//! Subcommand implementations.

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{write_heatmap, write_json, write_rows};
use crate::presets::{ANALYTIC_DRIVE_NOTE, FIG3_POINTS};
use rabi_bloch::model::validity_report;
use rabi_bloch::observables::{fwhm_factor, LEAKAGE_LIMIT};
use rabi_bloch::{
    bessel_j, gamma, j0_zero, run, BoPrediction, ChainKind, DriveSchedule, ModelParams, RunRecord, RunSpec,
    ValidityReport,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where a run came from, recorded in its metadata.
#[derive(Debug, Clone, Serialize)]
pub struct Invocation {
    pub command: String,
    pub preset: Option<String>,
    pub chain: ChainKind,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    pub l: f64,
    pub g: f64,
    pub gamma: f64,
    pub bloch_period: f64,
    pub dt: f64,
    pub steps_per_period: u64,
    pub delta_fwhm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Monitors {
    pub max_boundary_leakage: f64,
    pub leakage_ok: bool,
    pub max_norm_drift: f64,
    pub max_parity_weight_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub invocation: Invocation,
    pub config: RunConfig,
    pub params: ModelParams,
    pub schedule: DriveSchedule,
    pub derived: Derived,
    pub validity: ValidityReport,
    pub monitors: Option<Monitors>,
    pub files: Vec<String>,
}

#[derive(Serialize)]
struct CenterRow {
    t_over_tb: f64,
    center: f64,
    width_fwhm: f64,
    n_a: f64,
    n_b: f64,
    center_analytic: f64,
}

#[derive(Serialize)]
struct OverlapRow {
    t_over_tb: f64,
    p_a: f64,
    p_b: f64,
    p_a_analytic: f64,
    p_b_analytic: f64,
    norm: f64,
    weight_even: f64,
    weight_odd: f64,
    boundary_leakage: f64,
}

#[derive(Serialize)]
struct AnalyticRow {
    t_over_tb: f64,
    n_a: f64,
    n_b: f64,
    p_a: f64,
    p_b: f64,
    center: f64,
}

fn derived(cfg: &RunConfig, params: &ModelParams) -> CliResult<Derived> {
    let steps = cfg.steps_per_period()?;
    Ok(Derived {
        l: params.bloch_extent(),
        g: params.g,
        gamma: gamma(params.omega_atom, params.bloch_extent())?,
        bloch_period: params.bloch_period(),
        dt: params.bloch_period() / steps as f64,
        steps_per_period: steps,
        delta_fwhm: fwhm_factor() / params.alpha,
    })
}

fn warn_or_abort(strict: bool, msg: String) -> CliResult<()> {
    if strict {
        return Err(CliError::Strict(msg));
    }
    eprintln!("warning: {msg}");
    Ok(())
}

fn check_validity(v: &ValidityReport, strict: bool) -> CliResult<()> {
    if v.sqrt_deviation_exceeded {
        warn_or_abort(
            strict,
            format!(
                "√n varies by {:.1}% over the window (limit 5%); the uniform-hopping picture is unreliable",
                100.0 * v.max_sqrt_deviation
            ),
        )?;
    }
    if !v.window_guard_ok {
        warn_or_abort(strict, "window is narrower than L + 8/α around n̄".to_string())?;
    }
    Ok(())
}

fn monitors(record: &RunRecord) -> Monitors {
    let w0 = record.samples[0].conservation.sector_weights;
    let mut m = Monitors {
        max_boundary_leakage: 0.0,
        leakage_ok: true,
        max_norm_drift: 0.0,
        max_parity_weight_drift: 0.0,
    };
    for s in &record.samples {
        let c = s.conservation;
        m.max_boundary_leakage = m.max_boundary_leakage.max(c.boundary_leakage);
        m.max_norm_drift = m.max_norm_drift.max((c.norm - 1.0).abs());
        m.max_parity_weight_drift = m
            .max_parity_weight_drift
            .max((c.sector_weights.even - w0.even).abs())
            .max((c.sector_weights.odd - w0.odd).abs());
    }
    m.leakage_ok = m.max_boundary_leakage < LEAKAGE_LIMIT;
    m
}

fn file_names(files: &[PathBuf]) -> Vec<String> {
    files
        .iter()
        .filter_map(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .collect()
}

/// Simulation with all checks applied; nothing is written.
pub fn simulate(cfg: &RunConfig, chain: ChainKind) -> CliResult<(ModelParams, RunRecord)> {
    cfg.validate()?;
    let params = cfg.params()?;
    check_validity(&validity_report(&params)?, cfg.strict)?;
    let record = run(&RunSpec {
        params,
        kind: chain,
        schedule: cfg.drive(),
        times: cfg.times(),
        dt: cfg.dt()?,
    })?;
    let m = monitors(&record);
    if !m.leakage_ok {
        warn_or_abort(
            cfg.strict,
            format!(
                "boundary leakage {:.2e} exceeds {LEAKAGE_LIMIT:.0e}; widen the window",
                m.max_boundary_leakage
            ),
        )?;
    }
    Ok((params, record))
}

pub struct EvolveOutcome {
    pub record: RunRecord,
    pub metadata: Metadata,
}

pub fn run_evolve(cfg: &RunConfig, inv: Invocation, out_dir: &Path) -> CliResult<EvolveOutcome> {
    let (params, record) = simulate(cfg, inv.chain)?;
    std::fs::create_dir_all(out_dir)?;
    let t_b = params.bloch_period();
    let pred = BoPrediction::new(&params)?;
    let mut files = Vec::new();
    use crate::config::Output;

    if cfg.outputs.contains(&Output::Distribution) {
        let first = &record.samples[0].frame;
        files.push(write_heatmap(
            &out_dir.join("distribution.csv"),
            first.offset,
            first.p.len(),
            record.samples.iter().map(|s| (s.t / t_b, s.frame.p.as_slice())),
        )?);
    }
    if cfg.outputs.contains(&Output::Centers) {
        let rows: Vec<CenterRow> = record
            .samples
            .iter()
            .map(|s| {
                let (n_a, n_b) = (pred.n_a(s.t), pred.n_b(s.t));
                CenterRow {
                    t_over_tb: s.t / t_b,
                    center: s.frame.center,
                    width_fwhm: s.frame.width_fwhm,
                    n_a,
                    n_b,
                    center_analytic: pred.p_a(s.t) * n_a + pred.p_b(s.t) * n_b,
                }
            })
            .collect();
        files.push(write_rows(&out_dir.join("centers.csv"), &rows)?);
    }
    if cfg.outputs.contains(&Output::Overlaps) {
        let rows: Vec<OverlapRow> = record
            .samples
            .iter()
            .map(|s| OverlapRow {
                t_over_tb: s.t / t_b,
                p_a: s.p_a,
                p_b: s.p_b,
                p_a_analytic: pred.p_a(s.t),
                p_b_analytic: pred.p_b(s.t),
                norm: s.conservation.norm,
                weight_even: s.conservation.sector_weights.even,
                weight_odd: s.conservation.sector_weights.odd,
                boundary_leakage: s.conservation.boundary_leakage,
            })
            .collect();
        files.push(write_rows(&out_dir.join("overlaps.csv"), &rows)?);
    }
    if cfg.outputs.contains(&Output::Analytic) {
        let maps: Vec<(f64, Vec<f64>)> = record
            .samples
            .iter()
            .map(|s| (s.t / t_b, pred.distribution(s.t, params.window)))
            .collect();
        files.push(write_heatmap(
            &out_dir.join("analytic.csv"),
            params.window.lo(),
            params.window.len(),
            maps.iter().map(|(t, p)| (*t, p.as_slice())),
        )?);
    }

    let mut inv = inv;
    if !matches!(cfg.drive(), DriveSchedule::Constant { .. })
        && cfg.outputs.iter().any(|o| matches!(o, Output::Analytic | Output::Centers | Output::Overlaps))
        && !inv.notes.iter().any(|n| n == ANALYTIC_DRIVE_NOTE)
    {
        inv.notes.push(ANALYTIC_DRIVE_NOTE.to_string());
    }
    files.push(out_dir.join("metadata.json"));
    let metadata = Metadata {
        tool: "rabi-bloch",
        version: VERSION,
        invocation: inv,
        config: cfg.clone(),
        params,
        schedule: cfg.drive(),
        derived: derived(cfg, &params)?,
        validity: record.validity,
        monitors: Some(monitors(&record)),
        files: file_names(&files),
    };
    write_json(&out_dir.join("metadata.json"), &metadata)?;
    Ok(EvolveOutcome { record, metadata })
}

/// Analytic prediction only.
pub fn run_analytic(cfg: &RunConfig, inv: Invocation, out_dir: &Path) -> CliResult<Metadata> {
    cfg.validate()?;
    let params = cfg.params()?;
    std::fs::create_dir_all(out_dir)?;
    let t_b = params.bloch_period();
    let pred = BoPrediction::new(&params)?;
    let times = cfg.times();
    let rows: Vec<AnalyticRow> = times
        .iter()
        .map(|&t| AnalyticRow {
            t_over_tb: t / t_b,
            n_a: pred.n_a(t),
            n_b: pred.n_b(t),
            p_a: pred.p_a(t),
            p_b: pred.p_b(t),
            center: pred.p_a(t) * pred.n_a(t) + pred.p_b(t) * pred.n_b(t),
        })
        .collect();
    let mut files = vec![write_rows(&out_dir.join("analytic_series.csv"), &rows)?];
    let maps: Vec<Vec<f64>> = times.iter().map(|&t| pred.distribution(t, params.window)).collect();
    files.push(write_heatmap(
        &out_dir.join("analytic.csv"),
        params.window.lo(),
        params.window.len(),
        times.iter().zip(&maps).map(|(t, p)| (t / t_b, p.as_slice())),
    )?);
    files.push(out_dir.join("metadata.json"));
    let mut inv = inv;
    inv.notes.push(ANALYTIC_DRIVE_NOTE.to_string());
    let metadata = Metadata {
        tool: "rabi-bloch",
        version: VERSION,
        invocation: inv,
        config: cfg.clone(),
        params,
        schedule: cfg.drive(),
        derived: derived(cfg, &params)?,
        validity: validity_report(&params)?,
        monitors: None,
        files: file_names(&files),
    };
    write_json(&out_dir.join("metadata.json"), &metadata)?;
    Ok(metadata)
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub periods: usize,
    pub p_a_max_deviation: f64,
    pub p_a_rms_deviation: f64,
    pub center_max_deviation: f64,
    pub center_rms_deviation: f64,
    /// `max_t |P_a - P_a'|` against the other chain kind, when requested.
    pub cross_chain_max_deviation: Option<f64>,
}

fn max_and_rms(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let max = xs.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let rms = (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt();
    (max, rms)
}

/// Numerical `P_a(kT_B)` against `cos²(γkT_B)` and measured centers against
/// the analytic mixture `P_a n_a + P_b n_b`.
pub fn run_compare(cfg: &RunConfig, inv: Invocation, out_dir: &Path, cross_chain: bool) -> CliResult<CompareReport> {
    let (params, record) = simulate(cfg, inv.chain)?;
    let pred = BoPrediction::new(&params)?;
    let s = cfg.samples_per_period as usize;
    let plateau: Vec<f64> = record
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| *i > 0 && i % s == 0)
        .map(|(_, x)| x.p_a - pred.p_a(x.t))
        .collect();
    let centers: Vec<f64> = record
        .samples
        .iter()
        .map(|x| x.frame.center - (pred.p_a(x.t) * pred.n_a(x.t) + pred.p_b(x.t) * pred.n_b(x.t)))
        .collect();
    let (p_a_max, p_a_rms) = max_and_rms(&plateau);
    let (c_max, c_rms) = max_and_rms(&centers);

    let cross = if cross_chain {
        let other = match inv.chain {
            ChainKind::Equivalent => ChainKind::Effective,
            ChainKind::Effective => ChainKind::Equivalent,
        };
        let (_, rec2) = simulate(cfg, other)?;
        Some(
            record
                .samples
                .iter()
                .zip(&rec2.samples)
                .map(|(a, b)| (a.p_a - b.p_a).abs())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    let report = CompareReport {
        periods: plateau.len(),
        p_a_max_deviation: p_a_max,
        p_a_rms_deviation: p_a_rms,
        center_max_deviation: c_max,
        center_rms_deviation: c_rms,
        cross_chain_max_deviation: cross,
    };
    std::fs::create_dir_all(out_dir)?;
    #[derive(Serialize)]
    struct CompareFile<'a> {
        tool: &'static str,
        version: &'static str,
        invocation: &'a Invocation,
        config: &'a RunConfig,
        params: &'a ModelParams,
        schedule: DriveSchedule,
        gamma: f64,
        report: &'a CompareReport,
    }
    write_json(
        &out_dir.join("compare.json"),
        &CompareFile {
            tool: "rabi-bloch",
            version: VERSION,
            invocation: &inv,
            config: cfg,
            params: &params,
            schedule: cfg.drive(),
            gamma: pred.gamma,
            report: &report,
        },
    )?;
    Ok(report)
}

/// A sweep minimum counts as a frozen transition only below this `max P_b`.
pub const SUPPRESSION_LEVEL: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub l: f64,
    pub g: f64,
    pub gamma: f64,
    pub j0: f64,
    pub max_p_b: f64,
    /// Max of `P_b` over the samples at `t = kT_B`.
    pub max_p_b_plateau: f64,
    /// Strict local minimum of `max_p_b` along the sweep.
    pub local_min: bool,
    /// Local minimum with `max_p_b ≤ SUPPRESSION_LEVEL`.
    pub suppressed: bool,
    pub nearest_j0_zero: f64,
    pub zero_distance: f64,
}

fn nearest_j0_zero(l: f64) -> CliResult<f64> {
    let mut best = j0_zero(1)?;
    for k in 2..=rabi_bloch::bessel::MAX_ZERO_INDEX {
        let z = j0_zero(k)?;
        if (z - l.abs()).abs() < (best - l.abs()).abs() {
            best = z;
        }
        if z > l.abs() + 4.0 {
            break;
        }
    }
    Ok(best)
}

/// Zero-transition search over `steps` evenly spaced extents in `[from, to]`.
pub fn run_sweep(
    template: &RunConfig,
    inv: Invocation,
    from: f64,
    to: f64,
    steps: usize,
    out_dir: &Path,
) -> CliResult<Vec<SweepRow>> {
    if !(from < to) || steps < 2 {
        return Err(CliError::Config {
            line: 0,
            msg: "sweep needs from < to and at least 2 steps".into(),
        });
    }
    let s = template.samples_per_period as usize;
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let l = from + (to - from) * i as f64 / (steps - 1) as f64;
        let mut cfg = template.clone();
        cfg.coupling = crate::config::Coupling::Extent(l);
        let (params, record) = simulate(&cfg, inv.chain)?;
        let max_p_b = record.samples.iter().map(|x| x.p_b).fold(0.0, f64::max);
        let max_p_b_plateau = record.samples.iter().step_by(s).map(|x| x.p_b).fold(0.0, f64::max);
        let zero = nearest_j0_zero(l)?;
        rows.push(SweepRow {
            l,
            g: params.g,
            gamma: gamma(params.omega_atom, l)?,
            j0: bessel_j(0, l.abs())?,
            max_p_b,
            max_p_b_plateau,
            local_min: false,
            suppressed: false,
            nearest_j0_zero: zero,
            zero_distance: l - zero,
        });
    }
    for i in 1..rows.len() - 1 {
        rows[i].local_min = rows[i].max_p_b < rows[i - 1].max_p_b && rows[i].max_p_b < rows[i + 1].max_p_b;
        rows[i].suppressed = rows[i].local_min && rows[i].max_p_b <= SUPPRESSION_LEVEL;
    }
    std::fs::create_dir_all(out_dir)?;
    write_rows(&out_dir.join("sweep.csv"), &rows)?;
    #[derive(Serialize)]
    struct SweepMeta<'a> {
        tool: &'static str,
        version: &'static str,
        invocation: &'a Invocation,
        template: &'a RunConfig,
        from: f64,
        to: f64,
        steps: usize,
        minima: Vec<f64>,
    }
    write_json(
        &out_dir.join("metadata.json"),
        &SweepMeta {
            tool: "rabi-bloch",
            version: VERSION,
            invocation: &inv,
            template,
            from,
            to,
            steps,
            minima: rows.iter().filter(|r| r.suppressed).map(|r| r.l).collect(),
        },
    )?;
    Ok(rows)
}

#[derive(Serialize)]
struct BesselRow {
    x: f64,
    j0: f64,
    j1: f64,
}

#[derive(Serialize)]
struct MarkedPoint {
    label: &'static str,
    x: f64,
    j0: f64,
    j1: f64,
    nearest_j0_zero: f64,
    nearest_stationary_point: f64,
}

/// Zero of J1 (a stationary point of J0) near `x`, by bisection.
fn nearest_j1_zero(x: f64) -> CliResult<f64> {
    // J1 zeros sit near (k + 1/4)π; bracket the closest one.
    let k = (x / std::f64::consts::PI - 0.25).round();
    let center = (k + 0.25) * std::f64::consts::PI;
    let (mut lo, mut hi) = (center - 0.7, center + 0.7);
    let mut f_lo = bessel_j(1, lo)?;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let f = bessel_j(1, mid)?;
        if (f < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The J0 table with the four marked extents.
pub fn run_bessel_table(inv: Invocation, out_dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out_dir)?;
    let rows: Vec<BesselRow> = (0..=3200)
        .map(|i| {
            let x = i as f64 * 0.01;
            Ok(BesselRow {
                x,
                j0: bessel_j(0, x)?,
                j1: bessel_j(1, x)?,
            })
        })
        .collect::<CliResult<_>>()?;
    write_rows(&out_dir.join("j0.csv"), &rows)?;
    let points: Vec<MarkedPoint> = FIG3_POINTS
        .iter()
        .map(|&(label, x)| {
            Ok(MarkedPoint {
                label,
                x,
                j0: bessel_j(0, x)?,
                j1: bessel_j(1, x)?,
                nearest_j0_zero: nearest_j0_zero(x)?,
                nearest_stationary_point: nearest_j1_zero(x)?,
            })
        })
        .collect::<CliResult<_>>()?;
    write_rows(&out_dir.join("points.csv"), &points)?;
    #[derive(Serialize)]
    struct TableMeta<'a> {
        tool: &'static str,
        version: &'static str,
        invocation: &'a Invocation,
        j0_zeros: Vec<f64>,
    }
    write_json(
        &out_dir.join("metadata.json"),
        &TableMeta {
            tool: "rabi-bloch",
            version: VERSION,
            invocation: &inv,
            j0_zeros: (1..=10).map(j0_zero).collect::<Result<_, _>>()?,
        },
    )?;
    Ok(())
}
