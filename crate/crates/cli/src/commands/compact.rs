use ergodix::box_window;
use ergodix::compactness::{
    correlation_lower_bound, net_radius, orbit_epsilon_structure, rescaled_radius, return_set,
    szemeredi_average_compact, SCAN_NOTE,
};
use ergodix::{DynamicalSystem, GroupElement};
use serde::Deserialize;
use serde_json::{json, Value};

use super::{coords, point, points};
use crate::config::Context;
use crate::output::{float, report, write_json, Csv, Outcome};
use crate::ConfigError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetParams {
    epsilon: f64,
    /// Radius of the scanned box.
    scan: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReturnParams {
    epsilon: f64,
    exponents: Vec<i64>,
    scan: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LowerBoundParams {
    /// Positive observable; defaults to the top-level `observable`.
    #[serde(default)]
    observable: Option<String>,
    /// `m_0, …, m_k`.
    exponents: Vec<i64>,
    epsilon: f64,
    scan: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SzemerediParams {
    #[serde(default)]
    observable: Option<String>,
    /// `m_1, …, m_k`.
    exponents: Vec<i64>,
    #[serde(default)]
    candidates: Option<Vec<GroupElement>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    observable: String,
    #[serde(default)]
    net: Option<NetParams>,
    #[serde(default)]
    return_set: Option<ReturnParams>,
    #[serde(default)]
    lower_bound: Option<LowerBoundParams>,
    #[serde(default)]
    szemeredi: Option<SzemerediParams>,
}

pub fn run(ctx: &Context) -> Result<Outcome, ConfigError> {
    let params: Params = ctx.params()?;
    let sys = ctx.system()?;
    let q = sys.lattice_dim();
    let a = ctx.observable(&params.observable)?;
    let mut out = Outcome::default();
    let mut body = json!({ "system": sys.backend_name(), "note": SCAN_NOTE });

    if let Some(p) = &params.net {
        let scan = box_window(q, p.scan)?;
        let cert = orbit_epsilon_structure(sys, a, p.epsilon, &scan)?;
        let radius = net_radius(sys, a, &cert, &scan);
        out.check(radius < p.epsilon, || {
            format!("maximal {}-separated set leaves an orbit point at distance {radius}", p.epsilon)
        });
        body["net"] = json!({
            "epsilon": p.epsilon,
            "kind": cert.kind,
            "size": cert.len(),
            "elements": points(&cert.elements),
            "net_radius": radius,
            "scan_index": cert.scan_index,
            "scan_size": cert.scan_size,
        });
    }

    if let Some(p) = &params.return_set {
        let scan = box_window(q, p.scan)?;
        let rs = return_set(sys, a, p.epsilon, &p.exponents, &scan)?;
        out.check(rs.chain_certificate, || "chain inequality failed on the return set".into());
        body["return_set"] = json!({
            "epsilon": rs.epsilon,
            "exponents": rs.exponents,
            "members": points(&rs.members),
            "size": rs.members.len(),
            "chain_certificate": rs.chain_certificate,
            "gap_witness": rs.gap_witness.as_deref().map(points),
            "scan_index": rs.scan_index,
        });
    }

    if let Some(p) = &params.lower_bound {
        let b = match &p.observable {
            Some(name) => ctx.observable(name)?,
            None => a,
        };
        if p.exponents.is_empty() {
            return Err(ConfigError("lower_bound needs at least one exponent".into()));
        }
        let k = p.exponents.len() - 1;
        let radius = rescaled_radius(p.epsilon, sys.operator_norm(b), k);
        let scan = box_window(q, p.scan)?;
        let members = return_set(sys, b, radius, &p.exponents, &scan)?.members;
        let mut checked = Vec::with_capacity(members.len());
        for g in &members {
            let c = correlation_lower_bound(sys, b, &p.exponents, p.epsilon, g)?;
            out.check(c.holds && c.in_return_set, || {
                format!("g=({}): correlation {:e} not above {:e}", coords(g), c.value, c.bound)
            });
            checked.push(json!([point(g), c.value, c.bound]));
        }
        body["lower_bound"] = json!({
            "epsilon": p.epsilon,
            "exponents": p.exponents,
            "radius": radius,
            "members_checked": checked.len(),
            "checks": checked,
        });
    }

    let mut csv = None;
    if let Some(p) = &params.szemeredi {
        let b = match &p.observable {
            Some(name) => ctx.observable(name)?,
            None => a,
        };
        let windows = ctx.windows()?;
        let r = szemeredi_average_compact(sys, b, &p.exponents, &windows, p.candidates.as_deref())?;
        out.check(r.bound_holds, || "shifted averages fell below their lower bound".into());
        out.check(r.tail_min > 0.0, || format!("tail minimum {} is not positive", r.tail_min));
        let mut table = Csv::new(&["n", "shift", "density", "average", "lower_bound"]);
        for ((s, (n, avg)), (_, lb)) in r.shifts_per_window.iter().zip(&r.averages).zip(&r.lower_bounds) {
            table.row(vec![n.to_string(), coords(&s.shift), float(s.density), float(*avg), float(*lb)]);
        }
        csv = Some(table.render());
        let mut v: Value = r.to_json();
        v["moment"] = json!(r.moment);
        body["szemeredi"] = v;
    }

    body["passed"] = json!(out.failures.is_empty());
    if let Some(c) = csv {
        out.push(ctx.csv_name("compact"), c);
    }
    out.push(ctx.json_name("compact"), write_json(&report("compact", body)));
    Ok(out)
}
