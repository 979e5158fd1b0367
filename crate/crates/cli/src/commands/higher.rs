use ergodix::box_window;
use ergodix::mixing::{collision_bound_for, gamma_sequence, higher_order_defect, HigherOrderSpec, Verdict};
use ergodix::SystemHandle;
use serde::Deserialize;
use serde_json::json;

use super::point;
use crate::config::Context;
use crate::output::{complex, float, report, write_json, Csv, Outcome};
use crate::{config_error, ConfigError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaParams {
    /// `γ_h` is reported for `‖h‖_∞ ≤ h_max`.
    h_max: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    /// Names of `a_0, …, a_k`; the homomorphisms are `φ_1, …, φ_k`.
    observables: Vec<String>,
    #[serde(default)]
    expect: Option<Verdict>,
    #[serde(default)]
    gamma: Option<GammaParams>,
}

pub fn run(ctx: &Context) -> Result<Outcome, ConfigError> {
    let params: Params = ctx.params()?;
    let sys = ctx.system()?;
    let observables = params.observables.iter().map(|n| ctx.observable(n).cloned()).collect::<Result<Vec<_>, _>>()?;
    let homs = ctx.hom_set()?;
    if observables.len() != homs.homs().len() + 1 {
        return config_error(format!(
            "{} observables need {} homomorphisms, found {}",
            observables.len(),
            observables.len().saturating_sub(1),
            homs.homs().len()
        ));
    }
    let spec = HigherOrderSpec::new(observables, homs)?;
    let windows = ctx.windows()?;
    let rule = ctx.rule()?;
    let stat = higher_order_defect(sys, &spec, &windows, &rule)?;
    let bound = match sys {
        SystemHandle::QuasiLocal(_) => Some(collision_bound_for(sys, &spec)?),
        SystemHandle::Finite(_) => None,
    };
    let mut out = Outcome::default();
    if let Some(expected) = params.expect {
        out.check(stat.verdict == expected, || {
            format!("verdict {} but {} was expected", stat.verdict.as_str(), expected.as_str())
        });
    }
    let mut csv = Csv::new(if bound.is_some() {
        &["n", "window_size", "defect", "bound"]
    } else {
        &["n", "window_size", "defect"]
    });
    let mut rows = Vec::new();
    for (w, v) in windows.iter().zip(&stat.per_window) {
        let mut cells = vec![v.n.to_string(), v.size.to_string(), float(v.value)];
        let mut row = vec![json!(v.n), json!(v.size), json!(v.value)];
        if let Some(b) = &bound {
            let limit = b.bound(w);
            out.check(v.value <= limit + 1e-12, || {
                format!("n={}: defect {:e} exceeds the collision bound {limit:e}", v.n, v.value)
            });
            cells.push(float(limit));
            row.push(json!(limit));
        }
        csv.row(cells);
        rows.push(row);
    }
    let mut body = json!({
        "order": spec.order(),
        "system": sys.backend_name(),
        "verdict": stat.verdict.as_str(),
        "verdict_threshold": stat.verdict_threshold,
        "per_window": rows,
    });
    if let Some(b) = &bound {
        body["collision_constant"] = json!(b.constant);
        body["collisions"] = json!(b.collisions.len());
    }
    if let Some(g) = &params.gamma {
        let hs: Vec<_> = box_window(spec.homs()[0].dim(), g.h_max.max(1))?
            .iter()
            .filter(|h| h.max_abs() <= g.h_max as i64)
            .cloned()
            .collect();
        let gamma = gamma_sequence(sys, &spec, Some(&hs), &windows)?;
        body["gamma"] = json!({
            "kappa": complex(gamma.kappa),
            "window_index": gamma.window_index,
            "max_difference": gamma.max_difference(),
            "entries": gamma.entries.iter().map(|e| json!({
                "h": point(&e.h),
                "empirical": complex(e.empirical),
                "closed_form": complex(e.closed_form),
                "difference": e.difference,
            })).collect::<Vec<_>>(),
        });
    }
    body["passed"] = json!(out.failures.is_empty());
    out.push(ctx.csv_name("higher"), csv.render());
    out.push(ctx.json_name("higher"), write_json(&report("higher", body)));
    Ok(out)
}
