//! Text grammars for bodies, parameters and ε grids.
//!
//! ```text
//! body   := "ball:d=<int>,r=<float>" | "ellipsoid:<a1>,...,<ad>" | "cuboid:<L1>,...,<Ld>"
//! params := "d=<int>,p=<f>,q=<f>,r=<f>" ("," "beta=<f>" | "," "alpha=<f>")+
//! ```
//!
//! Keys of `ball` and of the parameter spec may come in any order.

use capq_core::functional::{make_params, make_params_checked, make_params_from_alpha, make_params_signed_alpha};
use capq_core::{ConvexBody, GParams};

use crate::error::{At, CliError};

/// One comma-separated field with its 1-based column.
struct Field<'a> {
    col: usize,
    text: &'a str,
}

fn fields(rest: &str, offset: usize) -> Vec<Field<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for part in rest.split(',') {
        out.push(Field { col: offset + start + 1, text: part });
        start += part.len() + 1;
    }
    out
}

fn positioned(op: &'static str, spec: &str, col: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::usage("cli", op, format!("{msg} at column {col} in '{spec}'"))
}

fn number(op: &'static str, spec: &str, text: &str, col: usize) -> Result<f64, CliError> {
    let t = text.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(positioned(op, spec, col, format_args!("expected a finite number, found '{t}'"))),
    }
}

fn key_values<'a>(op: &'static str, spec: &'a str, fs: &[Field<'a>], allowed: &[&str]) -> Result<Vec<(&'a str, f64, usize)>, CliError> {
    let mut out: Vec<(&str, f64, usize)> = Vec::new();
    for f in fs {
        if f.text.trim().is_empty() {
            return Err(positioned(op, spec, f.col, "empty field"));
        }
        let (k, v) = f
            .text
            .split_once('=')
            .ok_or_else(|| positioned(op, spec, f.col, format_args!("expected key=value, found '{}'", f.text)))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(positioned(op, spec, f.col, format_args!("unknown key '{k}' (expected one of {})", allowed.join(", "))));
        }
        if out.iter().any(|(seen, _, _)| *seen == k) {
            return Err(positioned(op, spec, f.col, format_args!("duplicate key '{k}'")));
        }
        let vcol = f.col + f.text.find('=').unwrap_or(0) + 1;
        out.push((k, number(op, spec, v, vcol)?, f.col));
    }
    Ok(out)
}

fn lookup(kv: &[(&str, f64, usize)], key: &str) -> Option<(f64, usize)> {
    kv.iter().find(|(k, _, _)| *k == key).map(|(_, v, c)| (*v, *c))
}

fn dimension(op: &'static str, spec: &str, value: f64, col: usize) -> Result<usize, CliError> {
    if value.fract() != 0.0 || value < 0.0 || value > 64.0 {
        return Err(positioned(op, spec, col, format_args!("dimension must be an integer, found {value}")));
    }
    let d = value as usize;
    if d < 2 {
        return Err(positioned(op, spec, col, format_args!("dimension d = {d} is below 2")));
    }
    Ok(d)
}

pub fn parse_body(spec: &str) -> Result<ConvexBody, CliError> {
    const OP: &str = "parse_body";
    let Some((kind, rest)) = spec.split_once(':') else {
        return Err(positioned(OP, spec, 1, "expected '<ball|ellipsoid|cuboid>:'"));
    };
    let fs = fields(rest, kind.len() + 1);
    match kind.trim() {
        "ball" => {
            let kv = key_values(OP, spec, &fs, &["d", "r"])?;
            let end = spec.len() + 1;
            let (dv, dcol) = lookup(&kv, "d").ok_or_else(|| positioned(OP, spec, end, "missing key 'd'"))?;
            let (r, _) = lookup(&kv, "r").ok_or_else(|| positioned(OP, spec, end, "missing key 'r'"))?;
            let d = dimension(OP, spec, dv, dcol)?;
            ConvexBody::ball(d, r).at("cli", OP)
        }
        k @ ("ellipsoid" | "cuboid") => {
            let mut v = Vec::with_capacity(fs.len());
            for f in &fs {
                if f.text.trim().is_empty() {
                    return Err(positioned(OP, spec, f.col, "empty field"));
                }
                v.push(number(OP, spec, f.text, f.col)?);
            }
            if v.len() < 2 {
                return Err(positioned(OP, spec, kind.len() + 2, format_args!("{k} needs at least 2 lengths (d = {} is below 2)", v.len())));
            }
            if k == "ellipsoid" {
                ConvexBody::ellipsoid(v).at("cli", OP)
            } else {
                ConvexBody::cuboid(v).at("cli", OP)
            }
        }
        other => Err(positioned(OP, spec, 1, format_args!("unknown body kind '{other}'"))),
    }
}

/// Canonical spec of a body; `parse_body` inverts it exactly.
pub fn body_spec(body: &ConvexBody) -> String {
    body.to_string()
}

/// Parses a parameter spec. `signed_alpha` admits parameter sets whose
/// constraint forces `α < 0`.
pub fn parse_params(spec: &str, signed_alpha: bool) -> Result<GParams, CliError> {
    const OP: &str = "parse_params";
    let fs = fields(spec, 0);
    let kv = key_values(OP, spec, &fs, &["d", "p", "q", "r", "beta", "alpha"])?;
    let end = spec.len() + 1;
    let need = |k: &str| lookup(&kv, k).ok_or_else(|| positioned(OP, spec, end, format_args!("missing key '{k}'")));
    let (dv, dcol) = need("d")?;
    let d = dimension(OP, spec, dv, dcol)?;
    let (p, _) = need("p")?;
    let (q, _) = need("q")?;
    let (r, _) = need("r")?;
    let beta = lookup(&kv, "beta").map(|x| x.0);
    let alpha = lookup(&kv, "alpha").map(|x| x.0);
    let gp = match (alpha, beta) {
        (None, Some(b)) if signed_alpha => make_params_signed_alpha(d, p, q, r, b),
        (None, Some(b)) => make_params(d, p, q, r, b),
        (Some(a), None) => make_params_from_alpha(d, p, q, r, a),
        (Some(a), Some(b)) => make_params_checked(d, p, q, r, a, b),
        (None, None) => return Err(positioned(OP, spec, end, "missing key 'beta' (or 'alpha')")),
    };
    gp.at("functional", "make_params")
}

/// Canonical β-side spec; `parse_params` inverts it exactly.
pub fn params_spec(gp: &GParams) -> String {
    format!("d={},p={},q={},r={},beta={}", gp.d(), gp.p(), gp.q(), gp.r(), gp.beta())
}

pub fn parse_eps_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    const OP: &str = "parse_eps_grid";
    let mut out = Vec::new();
    for f in fields(spec, 0) {
        if f.text.trim().is_empty() {
            return Err(positioned(OP, spec, f.col, "empty field"));
        }
        out.push(number(OP, spec, f.text, f.col)?);
    }
    capq_core::experiments::validate_eps_grid(&out).at("experiments", "validate_eps_grid")?;
    Ok(out)
}
