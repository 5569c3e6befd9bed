use std::fmt::Write as _;

use geomean_core::{
    ag_gap, arithmetic_mean, bivariate_repr, derivative_repr, geometric_mean_repr, geometric_mean_shifted_direct, rho, rho_second_form, segments,
    stolarsky_mean, Complex64, PositiveSequence, QuadratureOptions, RhoParams, StolarskyParams,
};
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::report::{BernsteinSummary, Engine, Report};
use crate::{core_error, CliError, Output};

/// Offsets above `-min a` at which derivatives are sampled: 20 points,
/// log-spaced over `[1e-1, 1e2]`.
pub fn derivative_grid(a: &PositiveSequence) -> Vec<f64> {
    (0..20).map(|j| -a.min() + 10f64.powf(-1.0 + 3.0 * j as f64 / 19.0)).collect()
}

/// A grid value of order `k` fails when `(-1)^{k-1} G^(k)` is below
/// `-SIGN_SLACK * max |G^(k)|`.
pub const SIGN_SLACK: f64 = 1e-12;

pub struct SignSuite {
    pub summary: BernsteinSummary,
    pub nodes: usize,
    pub first_failure: Option<(usize, f64, f64)>,
}

pub fn sign_suite(a: &PositiveSequence, max_order: usize, opts: &QuadratureOptions) -> Result<SignSuite, CliError> {
    let grid = derivative_grid(a);
    let mut per_order_min = Vec::with_capacity(max_order);
    let mut nodes = 0;
    let mut first_failure = None;
    for k in 1..=max_order {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let mut signed = Vec::with_capacity(grid.len());
        for &z in &grid {
            let d = derivative_repr(a, z, k, opts).map_err(core_error)?;
            nodes += d.nodes_used;
            // + 0.0 turns -0.0 into 0.0
            signed.push((z, sign * d.value + 0.0));
        }
        let scale = signed.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if first_failure.is_none() {
            if let Some(&(z, v)) = signed.iter().find(|(_, v)| *v < -SIGN_SLACK * scale) {
                first_failure = Some((k, z, v));
            }
        }
        per_order_min.push(signed.iter().fold(f64::INFINITY, |m, (_, v)| m.min(*v)));
    }
    Ok(SignSuite {
        summary: BernsteinSummary {
            max_order,
            per_order_min,
            pass: first_failure.is_none(),
        },
        nodes,
        first_failure,
    })
}

fn build_report(cfg: &RunConfig) -> Result<(Report, SignSuite), CliError> {
    let a = &cfg.sequence;
    let z = cfg.shift;
    let opts = cfg.quadrature();
    let direct = geometric_mean_shifted_direct(a, z).map_err(core_error)?;
    let repr = geometric_mean_repr(a, z, &opts).map_err(core_error)?;
    let arithmetic = Complex64::new(arithmetic_mean(a), 0.0) + z;
    let mut nodes = repr.nodes_used;
    // a real shift gets its own gap integral, a complex one the integral term
    let gap = if z.im == 0.0 {
        let shifted = a.shifted(z.re).map_err(core_error)?;
        let g = ag_gap(&shifted, &opts).map_err(core_error)?;
        nodes += g.nodes_used;
        Complex64::new(g.value, 0.0)
    } else {
        arithmetic - repr.value
    };
    let suite = sign_suite(a, cfg.max_order, &opts)?;
    nodes += suite.nodes;
    let report = Report {
        sequence: a.values().to_vec(),
        arithmetic: arithmetic.into(),
        geometric_direct: direct.into(),
        geometric_repr: repr.value.into(),
        abs_diff: (repr.value - direct).norm(),
        ag_gap: gap.into(),
        bernstein: suite.summary.clone(),
        engine: Engine {
            tolerance: cfg.tolerance,
            nodes,
        },
    };
    Ok((report, suite))
}

fn render_report(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(report),
        _ => report.to_text(),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report values serialise");
    s.push('\n');
    s
}

pub fn eval(cfg: &RunConfig) -> Result<Output, CliError> {
    let (report, _) = build_report(cfg)?;
    Ok(Output::new(render_report(&report, cfg.output_format)))
}

/// Relative agreement required between representation and direct formula.
fn oracle_threshold(tol: f64) -> f64 {
    (100.0 * tol).max(1e-12)
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let (report, suite) = build_report(cfg)?;
    let a = &cfg.sequence;
    let opts = cfg.quadrature();
    let threshold = oracle_threshold(cfg.tolerance);
    let mut failures = Vec::new();
    if let Some((k, z, v)) = suite.first_failure {
        failures.push(format!("sign pattern fails at order {k}, z = {z}: (-1)^(k-1) G^(k) = {v:e}"));
    }
    let mut points: Vec<Complex64> = derivative_grid(a).into_iter().map(|z| Complex64::new(z, 0.0)).collect();
    points.push(cfg.shift);
    for z in points {
        let direct = geometric_mean_shifted_direct(a, z).map_err(core_error)?;
        let repr = geometric_mean_repr(a, z, &opts).map_err(core_error)?.value;
        let rel = (repr - direct).norm() / direct.norm().max(f64::MIN_POSITIVE);
        if rel > threshold {
            failures.push(format!("representation differs from the direct formula at z = {z}: relative {rel:e} > {threshold:e}"));
            break;
        }
    }
    let mut out = Output::new(render_report(&report, cfg.output_format));
    if failures.is_empty() {
        Ok(out)
    } else {
        out.diagnostics = failures;
        out.exit_code = crate::EXIT_VERIFICATION;
        Ok(out)
    }
}

#[derive(Serialize)]
struct DensityRow {
    t: f64,
    density: f64,
    segment_index: usize,
}

pub const DENSITY_HEADER: &str = "t,density,segment_index";

pub fn density(cfg: &RunConfig) -> Result<Output, CliError> {
    let a = &cfg.sequence;
    if a.len() < 2 {
        return Err(CliError::Usage("density needs at least two entries".to_owned()));
    }
    let segs: Vec<_> = segments(a).into_iter().filter(|s| !s.skippable).collect();
    let (lo, hi) = (a.min(), a.max());
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    if segs.is_empty() {
        notes.push(format!("support [{lo}, {hi}] has zero length; no rows emitted"));
    } else {
        let last = cfg.samples - 1;
        for i in 0..cfg.samples {
            let t = if i == last { hi } else { lo + (hi - lo) * i as f64 / last as f64 };
            let segment_index = segs.iter().find(|s| s.lower <= t && t <= s.upper).map_or(segs[segs.len() - 1].ell, |s| s.ell);
            rows.push(DensityRow {
                t,
                density: geomean_core::density(a, t),
                segment_index,
            });
        }
    }
    let body = match cfg.output_format {
        OutputFormat::Json => to_json(&rows),
        _ => {
            let mut s = format!("{DENSITY_HEADER}\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{}", r.t, r.density, r.segment_index);
            }
            s
        }
    };
    let mut out = Output::new(body);
    out.diagnostics = notes;
    Ok(out)
}

#[derive(Serialize)]
struct StolarskyReport {
    r: f64,
    s: f64,
    x: f64,
    y: f64,
    branch: String,
    value: f64,
}

pub fn stolarsky(r: f64, s: f64, x: f64, y: f64, json: bool) -> Result<Output, CliError> {
    let p = StolarskyParams::new(r, s, x, y).map_err(|e| CliError::Usage(e.to_string()))?;
    let value = stolarsky_mean(&p);
    let body = if json {
        to_json(&StolarskyReport {
            r,
            s,
            x,
            y,
            branch: p.branch().name().to_owned(),
            value,
        })
    } else {
        format!("branch={} value={value}\n", p.branch())
    };
    Ok(Output::new(body))
}

pub const RHO_HEADER: &str = "s,rho,rho_second_form";

pub fn rho_table(s_min: f64, s_max: f64, samples: usize, opts: &QuadratureOptions) -> Result<Output, CliError> {
    if !(s_min > 0.0 && s_max > s_min && s_max.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < s-min < s-max, got [{s_min}, {s_max}]")));
    }
    if samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {samples}")));
    }
    let ratio = s_max / s_min;
    let mut body = format!("{RHO_HEADER}\n");
    for i in 0..samples {
        let s = if i == samples - 1 {
            s_max
        } else {
            s_min * ratio.powf(i as f64 / (samples - 1) as f64)
        };
        let a = rho(s, opts).map_err(core_error)?.value;
        let b = rho_second_form(s, opts).map_err(core_error)?.value;
        let _ = writeln!(body, "{s},{a},{b}");
    }
    Ok(Output::new(body))
}

#[derive(Serialize)]
struct BivariateReport {
    x: f64,
    y: f64,
    t: f64,
    repr: f64,
    closed_form: f64,
    abs_diff: f64,
    error_estimate: f64,
    nodes: usize,
}

pub fn bivariate(x: f64, y: f64, t: f64, json: bool, opts: &QuadratureOptions) -> Result<Output, CliError> {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    let p = RhoParams::new(hi, lo).map_err(|e| CliError::Usage(e.to_string()))?;
    if !(t.is_finite() && t > -lo) {
        return Err(CliError::Usage(format!("--t must exceed -min(x, y) = {}, got {t}", -lo)));
    }
    let est = bivariate_repr(p, t, opts).map_err(core_error)?;
    let closed_form = ((x + t) * (y + t)).sqrt();
    let r = BivariateReport {
        x,
        y,
        t,
        repr: est.value,
        closed_form,
        abs_diff: (est.value - closed_form).abs(),
        error_estimate: est.error_estimate,
        nodes: est.nodes_used,
    };
    let body = if json {
        to_json(&r)
    } else {
        format!(
            "repr={} closed_form={} abs_diff={:e} error_estimate={:e} nodes={}\n",
            r.repr, r.closed_form, r.abs_diff, r.error_estimate, r.nodes
        )
    };
    Ok(Output::new(body))
}
