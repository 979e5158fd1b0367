use ergodix::lattice::{folner_defect, inverse_product, tempelman_ratio};
use ergodix::GroupElement;
use serde::Deserialize;
use serde_json::json;

use super::point;
use crate::config::Context;
use crate::output::{float, report, write_json, Csv, Outcome};
use crate::{config_error, ConfigError};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    /// Translation used for the defect; defaults to the first unit vector.
    #[serde(default)]
    shift: Option<GroupElement>,
}

/// `2(|Λ| − ∏_i (2n+1−|g_i|)_+) / |Λ|` for a box of index `n`.
fn box_defect(n: usize, g: &GroupElement) -> f64 {
    let side = 2 * n as i64 + 1;
    let size = side.pow(g.dim() as u32);
    let kept: i64 = g.coords().iter().map(|&c| (side - c.abs()).max(0)).product();
    (2 * (size - kept)) as f64 / size as f64
}

pub fn run(ctx: &Context) -> Result<Outcome, ConfigError> {
    let params: Params = ctx.params()?;
    let windows = ctx.windows()?;
    let q = windows[0].lattice_dim();
    let g = params.shift.unwrap_or_else(|| GroupElement::unit(q, 0));
    if g.dim() != q {
        return config_error(format!("shift has dimension {} but windows live in Z^{q}", g.dim()));
    }
    let bound = (1u64 << q) as f64;
    let mut out = Outcome::default();
    let mut csv = Csv::new(&["n", "window_size", "defect", "tempelman_ratio", "difference_set_size"]);
    let mut rows = Vec::new();
    for w in &windows {
        let defect = folner_defect(w, &g);
        let ratio = tempelman_ratio(w);
        let diff = inverse_product(w).len();
        let expected = box_defect(w.index(), &g);
        out.check((defect - expected).abs() <= 1e-15, || {
            format!("n={}: defect {defect:e} differs from the box formula {expected:e}", w.index())
        });
        out.check(ratio <= bound, || format!("n={}: Tempelman ratio {ratio} exceeds 2^{q}", w.index()));
        csv.row(vec![w.index().to_string(), w.len().to_string(), float(defect), float(ratio), diff.to_string()]);
        rows.push(json!({
            "n": w.index(),
            "window_size": w.len(),
            "defect": defect,
            "tempelman_ratio": ratio,
            "difference_set_size": diff,
        }));
    }
    let body = json!({
        "q": q,
        "shift": point(&g),
        "tempelman_bound": bound,
        "windows": rows,
        "passed": out.failures.is_empty(),
    });
    out.push(ctx.csv_name("folner"), csv.render());
    out.push(ctx.json_name("folner"), write_json(&report("folner", body)));
    Ok(out)
}
