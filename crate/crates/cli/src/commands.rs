use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde_json::{json, Value};

use diolab::battery::run_criterion;
use diolab::bounds::{bound_table, BoundResult, BoundValue};
use diolab::certify::{run_scenario, successive_minima, CheckReport, Scenario, ScenarioParams, Verdict};
use diolab::exponents::{
    default_heights, estimate_lambda, estimate_lambda_hat, estimate_omega, Assumptions, ExponentEstimate,
    ExponentKind, Window,
};
use diolab::minimal_points::{
    compute_minimal_sequence, compute_minimal_sequence_cached, ratio_table, MinimalSequence,
};
use diolab::real_field::{parse_rational, parse_xi, XiSpec};

use crate::output::Table;

/// A finished command: the table, what goes into `meta`, and whether any
/// verdict failed.
pub struct Outcome {
    pub table: Table,
    pub extra_meta: Vec<(&'static str, Value)>,
    pub failed: bool,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Outcome {
            table,
            extra_meta: Vec::new(),
            failed: false,
        }
    }
}

pub fn xi_from(text: &str, precision_bits: Option<u64>) -> anyhow::Result<XiSpec> {
    let xi = parse_xi(text)?;
    Ok(match precision_bits {
        Some(b) => xi.with_precision_budget(b),
        None => xi,
    })
}

pub fn sequence(xi: &XiSpec, n: usize, x0_max: u64, cache: Option<&Path>) -> anyhow::Result<MinimalSequence> {
    Ok(match cache {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating cache dir {}", dir.display()))?;
            compute_minimal_sequence_cached(xi, n, x0_max, dir)?
        }
        None => compute_minimal_sequence(xi, n, x0_max)?,
    })
}

pub fn minimal_points(seq: &MinimalSequence) -> anyhow::Result<Outcome> {
    let coord_names: [&'static str; 9] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"];
    if seq.n + 1 > coord_names.len() {
        bail!("tables support n <= {}", coord_names.len() - 1);
    }
    let mut cols = vec!["index"];
    cols.extend_from_slice(&coord_names[..=seq.n]);
    cols.extend_from_slice(&["norm", "residual_lo", "residual_hi", "residual", "ratio_next", "ratio_self"]);
    let mut t = Table::new(&cols);
    let ratios = ratio_table(seq).ok();
    for (k, p) in seq.points.iter().enumerate() {
        let i = k + 1;
        let mut row = vec![json!(i)];
        row.extend(p.coords.iter().map(|c| json!(c.to_string())));
        row.push(json!(p.norm.to_string()));
        row.push(json!(p.residual.lo().to_string()));
        row.push(json!(p.residual.hi().to_string()));
        row.push(json!(format!("{:.12e}", p.residual.mid_f64())));
        let r = ratios.as_ref().and_then(|rs| rs.iter().find(|r| r.index == i));
        row.push(r.map_or(Value::Null, |r| json!(r.against_next)));
        row.push(r.and_then(|r| r.against_self).map_or(Value::Null, |v| json!(v)));
        t.push(row);
    }
    let mut out = Outcome::ok(t);
    out.extra_meta = vec![
        ("scan_horizon", json!(seq.scan_horizon.to_string())),
        ("index_set_i", json!(seq.index_set_i)),
        ("index_set_j", json!(seq.index_set_j)),
    ];
    Ok(out)
}

fn estimate_row(t: &mut Table, e: &ExponentEstimate) {
    let kind = match e.kind {
        ExponentKind::Lambda => "lambda",
        ExponentKind::LambdaHat => "lambda_hat",
        ExponentKind::Omega => "omega",
    };
    let window = match &e.window {
        Window::Indices { first, last } => format!("{first}..{last}"),
        Window::Heights(h) => h.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" "),
    };
    let value = if e.exact_annihilation { json!("inf") } else { json!(e.value) };
    t.push(vec![
        json!(kind),
        json!(e.order),
        value,
        json!(window),
        json!(e.samples.len()),
        json!(e.exact_annihilation),
    ]);
}

pub const ESTIMATE_COLUMNS: [&str; 6] = ["kind", "order", "value", "window", "sample_count", "exact_annihilation"];

pub fn estimate_lambdas(seq: &MinimalSequence, window: f64) -> anyhow::Result<Outcome> {
    let mut t = Table::new(&ESTIMATE_COLUMNS);
    estimate_row(&mut t, &estimate_lambda_hat(seq, window)?);
    estimate_row(&mut t, &estimate_lambda(seq, window)?);
    Ok(Outcome::ok(t))
}

pub fn estimate_omegas(xi: &XiSpec, k: usize, heights: Option<&[u64]>) -> anyhow::Result<Outcome> {
    let hs = match heights {
        Some(h) => h.to_vec(),
        None => default_heights(k, 1024),
    };
    let e = estimate_omega(xi, k, &hs)?;
    let mut t = Table::new(&ESTIMATE_COLUMNS);
    estimate_row(&mut t, &e);
    let mut out = Outcome::ok(t);
    let per_height: Vec<Value> = hs
        .iter()
        .zip(&e.samples)
        .map(|(q, s)| json!({"height": q, "ratio": if s.is_finite() { json!(s) } else { json!("inf") }}))
        .collect();
    out.extra_meta = vec![("per_height", Value::Array(per_height))];
    Ok(out)
}

fn bound_cells(v: Option<&BoundValue>) -> (Value, Value, Value) {
    match v {
        None => (Value::Null, Value::Null, Value::Null),
        Some(v) => {
            let e = v.enclosure();
            let exact = v.exact().map_or(Value::Null, |r| json!(r.to_string()));
            (json!(e.lo().to_f64()), json!(e.hi().to_f64()), exact)
        }
    }
}

fn assumptions_text(a: Option<&Assumptions>) -> Value {
    a.map_or(Value::Null, |a| json!(format!("k={} omega={}", a.k, a.omega_k)))
}

pub fn bounds(n: u32, k: Option<u32>, omega: Option<&str>) -> anyhow::Result<Outcome> {
    let assumptions = match (k, omega) {
        (Some(k), Some(w)) => Some(Assumptions::new(k, parse_rational(w)?)),
        (None, None) => None,
        _ => bail!("--k and --omega go together"),
    };
    let (rows, best) = bound_table(n, assumptions.as_ref())?;
    let mut t = Table::new(&[
        "n",
        "theorem",
        "value_lo",
        "value_hi",
        "applicable",
        "chosen_m",
        "assumptions",
        "exact",
        "best",
    ]);
    for (i, r) in rows.iter().enumerate() {
        let BoundResult {
            kind,
            n,
            value,
            assumptions,
            chosen_m,
            applicable,
            ..
        } = r;
        let (lo, hi, exact) = bound_cells(value.as_ref());
        t.push(vec![
            json!(n),
            json!(kind.tag()),
            lo,
            hi,
            json!(applicable),
            chosen_m.map_or(Value::Null, |m| json!(m)),
            assumptions_text(assumptions.as_ref()),
            exact,
            json!(i == best && value.is_some()),
        ]);
    }
    let mut out = Outcome::ok(t);
    let conditions: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "theorem": r.kind.tag(),
                "conditions": r.conditions.iter().map(|c| json!({"text": c.text, "holds": c.holds})).collect::<Vec<_>>(),
            })
        })
        .collect();
    out.extra_meta = vec![("winner", json!(rows[best].kind.tag())), ("conditions", Value::Array(conditions))];
    Ok(out)
}

pub const REPORT_COLUMNS: [&str; 6] = ["scenario", "indices", "ratios", "empirical_constant", "verdict", "details"];

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn report_row(t: &mut Table, r: &CheckReport) {
    t.push(vec![
        json!(r.scenario),
        json!(r.indices),
        json!(r.ratios.iter().map(|x| if x.is_finite() { json!(x) } else { json!(x.to_string()) }).collect::<Vec<_>>()),
        r.empirical_constant.map_or(Value::Null, |c| json!(c)),
        json!(verdict_text(r.verdict)),
        json!(r.details),
    ]);
}

pub struct VerifyInput<'a> {
    pub scenario: Scenario,
    pub xi: &'a XiSpec,
    pub n: Option<usize>,
    pub x0_max: Option<u64>,
    pub cache: Option<&'a Path>,
    pub params: ScenarioParams,
}

pub fn verify(v: VerifyInput<'_>) -> anyhow::Result<Outcome> {
    let (summary, rows) = if v.scenario.needs_sequence() {
        let (Some(n), Some(x0)) = (v.n, v.x0_max) else {
            bail!("scenario {} needs --n and --x0-max", v.scenario.tag());
        };
        let seq = sequence(v.xi, n, x0, v.cache)?;
        let o = run_scenario(&seq, v.scenario, &v.params)?;
        (o.summary, o.rows)
    } else {
        let r = successive_minima(v.xi, v.params.k, &v.params.y)?;
        let minima: Vec<String> = r.minima.iter().map(|m| m.to_string()).collect();
        let mut report = r.report;
        report.details = format!("{}; minima {}", report.details, minima.join(" "));
        (report.clone(), vec![report])
    };
    let mut t = Table::new(&REPORT_COLUMNS);
    for r in &rows {
        report_row(&mut t, r);
    }
    let summary_value = json!({
        "verdict": verdict_text(summary.verdict),
        "empirical_constant": summary.empirical_constant,
        "details": summary.details,
    });
    Ok(Outcome {
        table: t,
        extra_meta: vec![("summary", summary_value)],
        failed: summary.verdict == Verdict::Fail,
    })
}

pub fn report(ids: &[u32]) -> anyhow::Result<Outcome> {
    let mut t = Table::new(&["criterion", "title", "passed", "checks", "failed_checks"]);
    let mut failed = false;
    for &id in ids {
        let r = run_criterion(id)?;
        eprintln!("{}", r.line());
        failed |= !r.passed();
        let failures: Vec<Value> = r
            .failures()
            .map(|c| json!(format!("{}: {}", c.name, c.detail)))
            .collect();
        t.push(vec![
            json!(r.id),
            json!(r.title),
            json!(r.passed()),
            json!(r.checks.len()),
            Value::Array(failures),
        ]);
    }
    Ok(Outcome {
        table: t,
        extra_meta: Vec::new(),
        failed,
    })
}

pub fn cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os("DIOLAB_CACHE_DIR").filter(|v| !v.is_empty()).map(PathBuf::from))
}

