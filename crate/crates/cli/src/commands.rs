//! The six subcommands. Each returns the JSON report, the CSV rendering of
//! the same values, and whether every mathematical check passed (which
//! drives the 0-vs-1 exit code; input and config problems surface as
//! errors and exit 2).

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use ulc_core::bounds::{johnson_bound, theorem1_upper, Side, TailBoundReport};
use ulc_core::dist::{random_ulc, DiscretePMF, DEFAULT_REL_TOL};
use ulc_core::extremizers::{
    default_t_grid, f_prime, f_second, f_value, psi_log_concavity_check, verify_mgf_domination,
    ExtremizerParams,
};
use ulc_core::intrinsic::{corollary6_check, intrinsic_volumes, zk_pmf, ConvexBodySpec};

use crate::output::{fmt_f64, rows_to_csv, table_to_csv, RunConfig};

/// Absolute slack allowed when checking exact tails against the bounds.
const DOMINATION_TOL: f64 = 1e-10;

/// Slack on the variance-vs-mean comparison.
const VARIANCE_TOL: f64 = 1e-12;

/// Support cap for the random-ULC sweep.
const SWEEP_MAX_SUPPORT: usize = 40;

pub struct CommandOutput {
    pub json: serde_json::Value,
    pub csv: String,
    pub math_ok: bool,
}

fn load_pmf(path: &Path) -> Result<DiscretePMF> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid pmf in {}", path.display()))
}

fn load_body(path: &Path) -> Result<ConvexBodySpec> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("invalid body spec in {}", path.display()))
}

fn validate_t_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        bail!("--t-grid must contain at least one threshold");
    }
    for &t in grid {
        if !t.is_finite() || t < 0.0 {
            bail!("--t-grid entries must be finite and nonnegative, got {t}");
        }
    }
    Ok(())
}

/// `check`: validate a pmf file and report both concavity predicates.
pub fn cmd_check(input: &Path, config: &RunConfig) -> Result<CommandOutput> {
    let pmf = load_pmf(input)?;
    let lc = pmf.log_concavity_violation(DEFAULT_REL_TOL);
    let ulc = pmf.ulc_violation(DEFAULT_REL_TOL);
    log::info!(
        "check {}: log_concave = {}, ulc = {}",
        input.display(),
        lc.is_none(),
        ulc.is_none()
    );

    #[derive(Serialize)]
    struct CheckRow {
        log_concave: bool,
        ulc: bool,
        first_violation: Option<usize>,
    }
    let row = CheckRow {
        log_concave: lc.is_none(),
        ulc: ulc.is_none(),
        first_violation: ulc,
    };
    let json = json!({
        "config": config,
        "log_concave": row.log_concave,
        "ulc": row.ulc,
        "first_violation": row.first_violation,
    });
    let csv = rows_to_csv(std::slice::from_ref(&row))?;
    Ok(CommandOutput {
        json,
        csv,
        math_ok: row.ulc,
    })
}

#[derive(Serialize)]
struct BoundCsvRow {
    t: f64,
    side: String,
    exact: Option<f64>,
    theorem1: f64,
    corollary2: f64,
    johnson_c: Option<f64>,
    johnson: Option<f64>,
}

impl From<&TailBoundReport> for BoundCsvRow {
    fn from(r: &TailBoundReport) -> Self {
        BoundCsvRow {
            t: r.t,
            side: r.side.to_string(),
            exact: r.exact,
            theorem1: r.theorem1,
            corollary2: r.corollary2,
            johnson_c: r.johnson.as_ref().map(|j| j.c),
            johnson: r.johnson.as_ref().map(|j| j.value),
        }
    }
}

/// `bound`: a (t, side) table of exact tails and every bound, from a pmf
/// file or from a bare mean.
pub fn cmd_bound(
    input: Option<&Path>,
    mean: Option<f64>,
    t_grid: &[f64],
    c: &[f64],
    config: &RunConfig,
) -> Result<CommandOutput> {
    validate_t_grid(t_grid)?;
    let pmf = match (input, mean) {
        (Some(path), None) => Some(load_pmf(path)?),
        (None, Some(_)) => None,
        (Some(_), Some(_)) => bail!("--input and --mean are mutually exclusive"),
        (None, None) => bail!("bound requires --input or --mean"),
    };
    let mu = match &pmf {
        Some(p) => p.mean(),
        None => mean.unwrap(),
    };
    if !(mu > 0.0) || !mu.is_finite() {
        bail!("bound requires a positive mean, got {mu}");
    }
    let johnson_c = match c {
        [] => None,
        [c0] => {
            if !(*c0 > 0.0 && *c0 <= 1.0 / mu) {
                bail!("--c must lie in (0, 1/mean] = (0, {}], got {c0}", 1.0 / mu);
            }
            Some(*c0)
        }
        _ => bail!("bound accepts at most one --c value; use `compare` for lists"),
    };

    let mut rows = Vec::with_capacity(2 * t_grid.len());
    let mut math_ok = true;
    for &t in t_grid {
        for side in [Side::Upper, Side::Lower] {
            let exact = pmf.as_ref().map(|p| match side {
                Side::Upper => p.upper_tail(t),
                Side::Lower => p.lower_tail(t),
            });
            let report = TailBoundReport::compute(mu, t, side, exact, johnson_c)?;
            if let Some(gap) = report.gap_theorem1() {
                math_ok &= gap <= DOMINATION_TOL;
            }
            rows.push(report);
        }
    }
    let csv_rows: Vec<BoundCsvRow> = rows.iter().map(BoundCsvRow::from).collect();
    Ok(CommandOutput {
        json: json!({"config": config, "mean": mu, "rows": rows}),
        csv: rows_to_csv(&csv_rows)?,
        math_ok,
    })
}

#[derive(Serialize)]
struct LemmaRow {
    p: f64,
    k: usize,
    l: usize,
    worst_gap: f64,
    min_f_second: f64,
    psi_log_concave: bool,
    holds: bool,
}

/// `verify-lemma`: sweep the extremizer family, checking MGF domination,
/// the first-order conditions at y = 1, convexity of the deficit, and the
/// Ψ log-concavity behind it.
pub fn cmd_verify_lemma(
    p_list: &[f64],
    k_list: &[usize],
    l_list: &[usize],
    t_grid: &[f64],
    config: &RunConfig,
) -> Result<CommandOutput> {
    for &p in p_list {
        if !(p > 0.0) || !p.is_finite() {
            bail!("--p entries must be positive, got {p}");
        }
    }
    let t_grid = if t_grid.is_empty() {
        default_t_grid()
    } else {
        t_grid.to_vec()
    };
    let y_grid: Vec<f64> = (0..=64)
        .map(|i| 0.01 * (20.0f64 / 0.01).powf(i as f64 / 64.0))
        .collect();

    let mut rows = Vec::new();
    let mut all_hold = true;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut min_f_second = f64::INFINITY;
    for &p in p_list {
        for &k in k_list {
            for &l in l_list.iter().filter(|&&l| l >= k) {
                let params = ExtremizerParams::new(p, k, l)?;
                let report = verify_mgf_domination(&params, &t_grid)?;
                let stationary = f_value(&params, 1.0).abs() <= 1e-10
                    && f_prime(&params, 1.0).abs() <= 1e-10;
                let set_min_dd = y_grid
                    .iter()
                    .map(|&y| f_second(&params, y))
                    .fold(f64::INFINITY, f64::min);
                let psi_lc = psi_log_concavity_check(k, l, p);
                let holds = report.holds && stationary && set_min_dd >= -1e-10 && psi_lc;
                all_hold &= holds;
                worst_gap = worst_gap.max(report.worst_gap);
                min_f_second = min_f_second.min(set_min_dd);
                rows.push(LemmaRow {
                    p,
                    k,
                    l,
                    worst_gap: report.worst_gap,
                    min_f_second: set_min_dd,
                    psi_log_concave: psi_lc,
                    holds,
                });
            }
        }
    }
    if rows.is_empty() {
        bail!("the (p, k, l) sweep is empty");
    }
    log::info!(
        "verify-lemma: {} parameter sets, worst gap {worst_gap:e}",
        rows.len()
    );
    Ok(CommandOutput {
        json: json!({
            "config": config,
            "sets": rows.len(),
            "worst_gap": worst_gap,
            "min_f_second": min_f_second,
            "all_hold": all_hold,
            "rows": rows,
        }),
        csv: rows_to_csv(&rows)?,
        math_ok: all_hold,
    })
}

/// `intrinsic`: profile, induced pmf, moments, and concentration rows for a
/// body file.
pub fn cmd_intrinsic(input: &Path, t_grid: &[f64], config: &RunConfig) -> Result<CommandOutput> {
    validate_t_grid(t_grid)?;
    let body = load_body(input)?;
    let profile = intrinsic_volumes(&body);
    let zk = zk_pmf(&profile).context("profile does not induce a valid pmf")?;
    let mean = zk.mean();
    let variance = zk.variance();
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut math_ok = variance <= mean + VARIANCE_TOL;
    for &t in t_grid {
        let report = corollary6_check(&profile, t)?;
        math_ok &= report.holds;
        rows.push(report);
    }
    Ok(CommandOutput {
        json: json!({
            "config": config,
            "profile": profile,
            "zk": zk,
            "mean": mean,
            "variance": variance,
            "corollary6": rows,
        }),
        csv: rows_to_csv(&rows)?,
        math_ok,
    })
}

/// `compare`: theorem-vs-comparison-bound table over a `c` list, all values
/// in the `c ≤ 1/mean` regime.
pub fn cmd_compare(
    mean: Option<f64>,
    c_list: &[f64],
    t_grid: &[f64],
    config: &RunConfig,
) -> Result<CommandOutput> {
    let Some(mu) = mean else {
        bail!("compare requires --mean");
    };
    if !(mu > 0.0) || !mu.is_finite() {
        bail!("compare requires a positive mean, got {mu}");
    }
    validate_t_grid(t_grid)?;
    for &c in c_list {
        if !(c > 0.0 && c <= 1.0 / mu) {
            bail!("--c must lie in (0, 1/mean] = (0, {}], got {c}", 1.0 / mu);
        }
    }

    #[derive(Serialize)]
    struct CompareRow {
        t: f64,
        theorem1: f64,
        johnson: Vec<ulc_core::bounds::JohnsonBound>,
    }
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut math_ok = true;
    for &t in t_grid {
        let main = theorem1_upper(mu, t)?;
        let johnson = c_list
            .iter()
            .map(|&c| {
                johnson_bound(c, t).map(|value| {
                    math_ok &= main <= value + 1e-15;
                    ulc_core::bounds::JohnsonBound { c, value }
                })
            })
            .collect::<ulc_core::Result<Vec<_>>>()?;
        rows.push(CompareRow {
            t,
            theorem1: main,
            johnson,
        });
    }

    let mut header = vec!["t".to_string(), "theorem1".to_string()];
    for &c in c_list {
        header.push(format!("johnson[c={}]", fmt_f64(c)));
    }
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut record = vec![fmt_f64(row.t), fmt_f64(row.theorem1)];
            record.extend(row.johnson.iter().map(|j| fmt_f64(j.value)));
            record
        })
        .collect();

    Ok(CommandOutput {
        json: json!({"config": config, "mean": mu, "rows": rows}),
        csv: table_to_csv(&header, &records)?,
        math_ok,
    })
}

#[derive(Serialize)]
struct SweepRow {
    seed: u64,
    mean: f64,
    variance: f64,
    worst_upper_gap: Option<f64>,
    worst_lower_gap: Option<f64>,
    holds: bool,
}

/// `sweep`: seeded random-ULC pmfs, each checked for tail domination at
/// every integer-offset threshold and for the variance bound.
pub fn cmd_sweep(seed: u64, samples: usize, config: &RunConfig) -> Result<CommandOutput> {
    if samples == 0 {
        bail!("--samples must be at least 1");
    }
    let mut rows = Vec::with_capacity(samples);
    let mut all_hold = true;
    let mut worst_upper = f64::NEG_INFINITY;
    let mut worst_lower = f64::NEG_INFINITY;
    let mut worst_variance = f64::NEG_INFINITY;
    for i in 0..samples {
        let sample_seed = seed.wrapping_add(i as u64);
        let pmf = random_ulc(sample_seed, SWEEP_MAX_SUPPORT);
        let mean = pmf.mean();
        let variance = pmf.variance();
        let mut holds = variance <= mean + VARIANCE_TOL;
        worst_variance = worst_variance.max(variance - mean);

        let (mut upper_gap, mut lower_gap) = (None, None);
        if mean > 0.0 {
            let mut wu = f64::NEG_INFINITY;
            let mut wl = f64::NEG_INFINITY;
            for t in 0..=(pmf.max_support() - pmf.offset() + 2) {
                let t = t as f64;
                wu = wu.max(pmf.upper_tail(t) - theorem1_upper(mean, t)?);
                wl = wl.max(pmf.lower_tail(t) - ulc_core::bounds::theorem1_lower(mean, t)?);
            }
            holds &= wu <= DOMINATION_TOL && wl <= DOMINATION_TOL;
            worst_upper = worst_upper.max(wu);
            worst_lower = worst_lower.max(wl);
            (upper_gap, lower_gap) = (Some(wu), Some(wl));
        }
        all_hold &= holds;
        rows.push(SweepRow {
            seed: sample_seed,
            mean,
            variance,
            worst_upper_gap: upper_gap,
            worst_lower_gap: lower_gap,
            holds,
        });
    }
    log::info!("sweep: {samples} samples from seed {seed}, all_hold = {all_hold}");
    Ok(CommandOutput {
        json: json!({
            "config": config,
            "max_support": SWEEP_MAX_SUPPORT,
            "all_hold": all_hold,
            "worst_upper_gap": worst_upper,
            "worst_lower_gap": worst_lower,
            "worst_variance_excess": worst_variance,
            "rows": rows,
        }),
        csv: rows_to_csv(&rows)?,
        math_ok: all_hold,
    })
}
