//! Dispatch of a parsed [`RunConfig`] to the core modules.

use std::collections::BTreeMap;
use std::path::PathBuf;

use capq_core::acceptance::{self, CriterionResult};
use capq_core::capacity::{self, CapParams};
use capq_core::experiments::{self, Family, FamilySweep};
use capq_core::functional::{self, g_ball_exact};
use capq_core::torsion::{self, torsion_ball_exact, TorsionParams};
use capq_core::{BodyKind, ConvexBody, GParams, PreparedBody, QuadratureConfig, SearchConfig, SlopeFit};
use serde_json::{json, Value};

use crate::error::{At, CliError};
use crate::output::{csv_number, csv_text, envelope, json_text, opt_number, quantity_csv};
use crate::spec::{body_spec, params_spec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    CapBounds { body: ConvexBody, p: f64 },
    TorsionBounds { body: ConvexBody, q: f64, r: f64 },
    GEval { body: ConvexBody, params: GParams },
    Experiment { family: Family, params: GParams, eps_grid: Vec<f64> },
    Search { family: Family, params: GParams, mode: SearchMode },
    Acceptance { only: Vec<u8> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CapBounds { .. } => "cap-bounds",
            Command::TorsionBounds { .. } => "torsion-bounds",
            Command::GEval { .. } => "g-eval",
            Command::Experiment { .. } => "experiment",
            Command::Search { .. } => "search",
            Command::Acceptance { .. } => "acceptance",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub quadrature: QuadratureConfig,
    pub search: SearchConfig,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            output_format: OutputFormat::Json,
            output_path: None,
            seed: 42,
            quadrature: QuadratureConfig::default(),
            search: SearchConfig::default(),
        }
    }
}

/// Rendered output of a run. `failed` marks an acceptance run with failing criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failed: false }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed {
            3
        } else {
            0
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.quadrature.validate().at("numerics", "QuadratureConfig::validate")?;
    let mut scfg = cfg.search;
    scfg.seed = cfg.seed;
    scfg.validate().at("numerics", "SearchConfig::validate")?;
    let fmt = cfg.output_format;
    match &cfg.command {
        Command::CapBounds { body, p } => cap_bounds(body, *p, &cfg.quadrature, &scfg, fmt).map(Outcome::ok),
        Command::TorsionBounds { body, q, r } => torsion_bounds(body, *q, *r, fmt).map(Outcome::ok),
        Command::GEval { body, params } => g_eval(body, params, &cfg.quadrature, &scfg, fmt).map(Outcome::ok),
        Command::Experiment { family, params, eps_grid } => experiment(*family, params, eps_grid, fmt).map(Outcome::ok),
        Command::Search { family, params, mode } => search(*family, params, *mode, &scfg, fmt).map(Outcome::ok),
        Command::Acceptance { only } => acceptance_run(only, fmt),
    }
}

fn prepare(body: &ConvexBody) -> Result<PreparedBody, CliError> {
    PreparedBody::new(body).at("geometry", "steiner_of")
}

fn cap_bounds(body: &ConvexBody, p: f64, qcfg: &QuadratureConfig, scfg: &SearchConfig, fmt: OutputFormat) -> Result<String, CliError> {
    let cp = CapParams::new(body.dim(), p).at("capacity", "CapParams::new")?;
    let pb = prepare(body)?;
    let rep = capacity::cap_report_prepared(&pb, &cp, qcfg, scfg);
    let best = rep.min_upper();
    match fmt {
        OutputFormat::Json => Ok(json_text(&envelope(
            "cap-bounds",
            json!({
                "body": body_spec(body),
                "d": rep.d,
                "p": rep.p,
                "lower": rep.lower,
                "uppers": rep.uppers,
                "absent": rep.absent,
                "oracle": rep.oracle,
                "min_upper": best.map(|(m, v)| json!({"method": m, "value": v})),
                "violations": rep.violations,
            }),
        ))),
        OutputFormat::Csv => {
            let mut rows = vec![("lower.perimeter".to_string(), rep.lower)];
            rows.extend(rep.uppers.iter().map(|(m, v)| (format!("upper.{}", m.tag()), *v)));
            rows.extend(rep.oracle.map(|o| ("oracle.elliptic".to_string(), o)));
            quantity_csv(&rows)
        }
    }
}

fn torsion_bounds(body: &ConvexBody, q: f64, r: f64, fmt: OutputFormat) -> Result<String, CliError> {
    let tp = TorsionParams::new(q, r).at("torsion", "TorsionParams::new")?;
    let d = body.dim();
    let pb = prepare(body)?;
    let m = &pb.metrics;
    let inr = torsion::inradius_interval_from(d, m.volume, m.inradius, &tp);
    let sv = torsion::saint_venant_from(d, m.volume, &tp);
    let enc = torsion::torsion_enclosure(&pb, &tp);
    let (c1, c2) = torsion::constants_c1_c2(d, &tp);
    let pow = torsion::power_interval_perimeter_prepared(&pb, &tp);
    let exact = match body.kind() {
        BodyKind::Ball { radius } => Some(torsion_ball_exact(d, &tp, *radius)),
        _ => None,
    };
    match fmt {
        OutputFormat::Json => Ok(json_text(&envelope(
            "torsion-bounds",
            json!({
                "body": body_spec(body),
                "d": d,
                "q": tp.q,
                "q_prime": tp.q_prime,
                "r": tp.r,
                "volume": m.volume,
                "perimeter": m.perimeter,
                "inradius": m.inradius,
                "exact": exact,
                "inradius_interval": inr,
                "saint_venant": sv,
                "enclosure": enc,
                "c1": c1,
                "c2": c2,
                "power_interval": pow,
            }),
        ))),
        OutputFormat::Csv => {
            let mut rows = vec![
                ("inradius_interval.lo".to_string(), inr.lo),
                ("inradius_interval.hi".to_string(), inr.hi),
                ("saint_venant".to_string(), sv),
                ("enclosure.lo".to_string(), enc.lo),
                ("enclosure.hi".to_string(), enc.hi),
                ("c1".to_string(), c1),
                ("c2".to_string(), c2),
                ("power_interval.lo".to_string(), pow.lo),
                ("power_interval.hi".to_string(), pow.hi),
            ];
            rows.extend(exact.map(|v| ("exact".to_string(), v)));
            quantity_csv(&rows)
        }
    }
}

/// Every bound whose hypotheses hold, with the reason for the ones that do not.
fn extremal_bounds(gp: &GParams) -> BTreeMap<&'static str, Value> {
    let entry = |r: capq_core::Result<Value>| match r {
        Ok(v) => json!({ "value": v }),
        Err(e) => json!({ "not_applicable": e.to_string() }),
    };
    let mut out = BTreeMap::new();
    out.insert(
        "sup_bound",
        entry(functional::sup_bound_rhs(gp).map(|s| json!({"min": s.value, "branch1": s.branch1, "branch2": s.branch2}))),
    );
    out.insert("maximiser_ratio", entry(functional::maximiser_ratio_lower(gp).map(Value::from)));
    out.insert("maximiser_ratio_pd1", entry(functional::maximiser_ratio_lower_pd1(gp).map(Value::from)));
    out.insert("inf_bound", entry(functional::inf_bound_rhs(gp).map(Value::from)));
    out.insert("minimiser_ratio", entry(functional::minimiser_ratio_lower(gp).map(Value::from)));
    out
}

fn check_dims(body: &ConvexBody, gp: &GParams, op: &'static str) -> Result<(), CliError> {
    if body.dim() != gp.d() {
        return Err(CliError::usage("cli", op, format!("body {} has dimension {} but params have d = {}", body_spec(body), body.dim(), gp.d())));
    }
    Ok(())
}

fn g_eval(body: &ConvexBody, gp: &GParams, qcfg: &QuadratureConfig, scfg: &SearchConfig, fmt: OutputFormat) -> Result<String, CliError> {
    check_dims(body, gp, "g-eval")?;
    let pb = prepare(body)?;
    let gi = functional::g_interval_prepared(&pb, gp, qcfg, scfg).at("functional", "g_interval")?;
    let ball = g_ball_exact(gp);
    let exact = body.is_ball().then_some(ball);
    let bounds = extremal_bounds(gp);
    match fmt {
        OutputFormat::Json => Ok(json_text(&envelope(
            "g-eval",
            json!({
                "body": body_spec(body),
                "params": params_spec(gp),
                "alpha": gp.alpha(),
                "beta": gp.beta(),
                "interval": { "lo": gi.lo, "hi": gi.hi, "method_lo": gi.method_lo, "method_hi": gi.method_hi },
                "oracle": gi.oracle,
                "exact": exact,
                "ball_value": ball,
                "extremal_bounds": bounds,
            }),
        ))),
        OutputFormat::Csv => {
            let mut rows = vec![("g_lo".to_string(), gi.lo), ("g_hi".to_string(), gi.hi), ("ball_value".to_string(), ball)];
            if let Some(o) = gi.oracle {
                rows.push(("oracle.lo".into(), o.lo));
                rows.push(("oracle.hi".into(), o.hi));
                rows.push(("oracle.capacity".into(), o.capacity));
            }
            rows.extend(exact.map(|v| ("exact".to_string(), v)));
            for (name, v) in &bounds {
                match &v["value"] {
                    Value::Number(n) => rows.push((name.to_string(), n.as_f64().unwrap_or(f64::NAN))),
                    Value::Object(o) => {
                        if let Some(x) = o.get("min").and_then(Value::as_f64) {
                            rows.push((name.to_string(), x));
                        }
                    }
                    _ => {}
                }
            }
            quantity_csv(&rows)
        }
    }
}

fn experiment(family: Family, gp: &GParams, grid: &[f64], fmt: OutputFormat) -> Result<String, CliError> {
    const M: &str = "experiments";
    let (sweep, fit, expected): (FamilySweep, Option<SlopeFit>, Option<f64>) = match family {
        Family::ThinEc => {
            let (s, f) = experiments::sweep_thin_ellipsoid(gp, grid).at(M, "sweep_thin_ellipsoid")?;
            (s, Some(f), Some(experiments::thin_exponent(gp)))
        }
        Family::ElongatedEa => {
            let (s, f) = experiments::sweep_elongated_ellipsoid(gp, grid).at(M, "sweep_elongated_ellipsoid")?;
            (s, Some(f), Some(experiments::elongated_exponent(gp)))
        }
        Family::DisconnectedOmega => (experiments::sweep_disconnected(gp, grid).at(M, "sweep_disconnected")?, None, None),
        Family::EllipsoidAspect | Family::CuboidAspect => (experiments::sweep_aspect(gp, family, grid).at(M, "sweep_aspect")?, None, None),
    };
    match fmt {
        OutputFormat::Json => Ok(json_text(&envelope(
            "experiment",
            json!({
                "family": family.tag(),
                "params": params_spec(gp),
                "eps_grid": sweep.eps_grid,
                "rows": sweep.rows,
                "slope_fit": fit,
                "expected_slope": expected,
            }),
        ))),
        OutputFormat::Csv => {
            let aux_keys: Vec<String> = {
                let mut k: Vec<String> = sweep.rows.iter().flat_map(|r| r.aux.keys().cloned()).collect();
                k.sort();
                k.dedup();
                k
            };
            let mut header: Vec<&str> = vec!["family", "eps", "g_lo", "g_hi", "label"];
            header.extend(aux_keys.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = sweep
                .rows
                .iter()
                .map(|r| {
                    let label = serde_json::to_value(r.label).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
                    let mut cells = vec![family.tag().to_string(), csv_number(r.eps), opt_number(r.g_lo), opt_number(r.g_hi), label];
                    cells.extend(aux_keys.iter().map(|k| opt_number(r.aux.get(k).copied())));
                    cells
                })
                .collect();
            csv_text(&header, &rows)
        }
    }
}

fn search(family: Family, gp: &GParams, mode: SearchMode, scfg: &SearchConfig, fmt: OutputFormat) -> Result<String, CliError> {
    let res = match mode {
        SearchMode::Max => experiments::shape_search_max(gp, family, scfg).at("experiments", "shape_search_max"),
        SearchMode::Min => experiments::shape_search_min(gp, family, scfg).at("experiments", "shape_search_min"),
    }?;
    match fmt {
        OutputFormat::Json => Ok(json_text(&envelope(
            "search",
            json!({
                "family": family.tag(),
                "mode": if mode == SearchMode::Max { "max" } else { "min" },
                "params": params_spec(gp),
                "body": body_spec(&res.body),
                "value": res.value,
                "ball_value": res.ball_value,
                "ratio": res.ratio,
                "ratio_bound": res.ratio_bound,
                "status": res.status,
                "converged": res.converged,
                "boundary_drift": res.boundary_drift,
                "iterations": res.iterations,
            }),
        ))),
        OutputFormat::Csv => {
            let mut rows = vec![
                ("value".to_string(), res.value),
                ("ball_value".to_string(), res.ball_value),
                ("ratio".to_string(), res.ratio),
                ("iterations".to_string(), res.iterations as f64),
            ];
            rows.extend(res.ratio_bound.map(|b| ("ratio_bound".to_string(), b)));
            quantity_csv(&rows)
        }
    }
}

fn acceptance_run(only: &[u8], fmt: OutputFormat) -> Result<Outcome, CliError> {
    let ids = if only.is_empty() { acceptance::criterion_ids() } else { only.to_vec() };
    let mut results: Vec<CriterionResult> = Vec::with_capacity(ids.len());
    for id in ids {
        let r = acceptance::run_criterion(id)
            .ok_or_else(|| CliError::usage("acceptance", "run_criterion", format!("no criterion with id {id}")))?;
        results.push(r);
    }
    let failed = results.iter().any(|r| !r.passed);
    let text = match fmt {
        OutputFormat::Json => json_text(&envelope("acceptance", json!({ "passed": !failed, "criteria": results }))),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| {
                    vec![
                        format!("AC{}", r.id),
                        r.name.clone(),
                        r.passed.to_string(),
                        format!("{:.3}", r.elapsed_s),
                        csv_number(r.budget_s),
                        r.detail.clone(),
                    ]
                })
                .collect();
            csv_text(&["id", "name", "passed", "elapsed_s", "budget_s", "detail"], &rows)?
        }
    };
    Ok(Outcome { text, failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Outcome { text: String::new(), failed: false }.exit_code(), 0);
        assert_eq!(Outcome { text: String::new(), failed: true }.exit_code(), 3);
        let out = run(&RunConfig::new(Command::Acceptance { only: vec![2] })).unwrap();
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn identical_configs_give_identical_text() {
        let body = ConvexBody::cuboid(vec![3.0, 1.0, 0.5]).unwrap();
        let cfg = RunConfig::new(Command::CapBounds { body, p: 1.5 });
        assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
    }
}
