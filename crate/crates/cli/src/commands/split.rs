use ergodix::spectral::{eigenoperator_factor, gns_build, koopman_split, DichotomyVerdict, CLUSTER_TOL};
use ergodix::SystemHandle;
use serde::Deserialize;
use serde_json::json;

use crate::config::Context;
use crate::output::{complex, float, report, write_json, Csv, Outcome};
use crate::{config_error, ConfigError};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    /// Clustering tolerance for joint characters.
    #[serde(default)]
    tolerance: Option<f64>,
}

pub fn run(ctx: &Context) -> Result<Outcome, ConfigError> {
    let params: Params = ctx.params()?;
    let SystemHandle::Finite(sys) = ctx.system()? else {
        return config_error("split needs a finite system; the shift system is weakly mixing by construction");
    };
    let n = sys.dim();
    let gns = gns_build(sys)?;
    let split = koopman_split(sys, &gns, params.tolerance.unwrap_or(CLUSTER_TOL))?;
    let factor = eigenoperator_factor(sys, &gns, &split)?;
    let verdict = if n == 1 {
        DichotomyVerdict::TrivialSystem
    } else if !split.is_ergodic() {
        DichotomyVerdict::NotErgodic
    } else if split.is_weakly_mixing() {
        DichotomyVerdict::WeaklyMixing
    } else {
        DichotomyVerdict::HasNontrivialCompactFactor { dim: factor.dim() }
    };

    let mut out = Outcome::default();
    out.check(split.dim_h0 == n * n, || format!("dim H_0 = {} but N² = {}", split.dim_h0, n * n));
    out.check(factor.independent_eigenoperators == split.dim_h0, || {
        format!("{} independent eigenoperators for dim H_0 = {}", factor.independent_eigenoperators, split.dim_h0)
    });
    out.check(factor.invariance_residual <= 1e-10, || {
        format!("factor invariance residual {:e}", factor.invariance_residual)
    });
    if let Some(d) = factor.double_commutant_dim {
        out.check(d == factor.dim(), || format!("double commutant has dimension {d}, factor {}", factor.dim()));
    }

    let mut csv = Csv::new(&["space", "dim", "fixed", "character"]);
    let mut spaces = Vec::new();
    for (i, s) in split.spaces.iter().enumerate() {
        let ch: Vec<String> = s.character.iter().map(|l| format!("{} {}", float(l.re), float(l.im))).collect();
        csv.row(vec![i.to_string(), s.dim().to_string(), s.is_fixed(split.tolerance).to_string(), ch.join(" ")]);
        spaces.push(json!({
            "dim": s.dim(),
            "fixed": s.is_fixed(split.tolerance),
            "character": s.character.iter().map(|l| complex(*l)).collect::<Vec<_>>(),
        }));
    }
    let body = json!({
        "ergodic": split.is_ergodic(),
        "dim_H1": split.dim_h1,
        "dim_H0": split.dim_h0,
        "factor_dim": factor.dim(),
        "eigenoperator_count": factor.independent_eigenoperators,
        "verdict": verdict.label(),
        "branch": "compact",
        "invariance_residual": factor.invariance_residual,
        "double_commutant_dim": factor.double_commutant_dim,
        "tolerance": split.tolerance,
        "spaces": spaces,
        "passed": out.failures.is_empty(),
    });
    out.push(ctx.csv_name("split"), csv.render());
    out.push(ctx.json_name("split"), write_json(&report("split", body)));
    Ok(out)
}
