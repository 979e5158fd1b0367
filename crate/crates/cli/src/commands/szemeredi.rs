use ergodix::spectral::{szemeredi_driver, Branch};
use serde::Deserialize;
use serde_json::json;

use crate::config::Context;
use crate::output::{float, report, write_json, Csv, Outcome};
use crate::ConfigError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    observable: String,
    /// `m_1, …, m_k`.
    exponents: Vec<i64>,
}

pub fn run(ctx: &Context) -> Result<Outcome, ConfigError> {
    let params: Params = ctx.params()?;
    let sys = ctx.system()?;
    let a = ctx.observable(&params.observable)?;
    let windows = ctx.windows()?;
    let r = szemeredi_driver(sys, a, &params.exponents, &windows)?;
    let mut out = Outcome::default();
    out.check(r.bound_holds, || match r.branch {
        Branch::WeaklyMixing => "averages left the c/|Λ_n| band around ω(a)^{k+1}".into(),
        Branch::Compact => "shifted averages fell below their lower bound".into(),
    });
    out.check(r.tail_min > 0.0, || format!("tail minimum {} is not positive", r.tail_min));
    let csv = match r.branch {
        Branch::WeaklyMixing => {
            let mut c = Csv::new(&["n", "average", "deviation", "bound"]);
            for ((n, avg), (_, dev, bound)) in r.averages.iter().zip(&r.deviations) {
                c.row(vec![n.to_string(), float(*avg), float(*dev), float(*bound)]);
            }
            c
        }
        Branch::Compact => {
            let compact = r.compact.as_ref().expect("compact branch carries its report");
            let mut c = Csv::new(&["n", "average", "lower_bound", "density"]);
            for (((n, avg), (_, lb)), s) in r.averages.iter().zip(&compact.lower_bounds).zip(&compact.shifts_per_window)
            {
                c.row(vec![n.to_string(), float(*avg), float(*lb), float(s.density)]);
            }
            c
        }
    };
    let mut body = r.to_json();
    body["passed"] = json!(out.failures.is_empty());
    out.push(ctx.csv_name("szemeredi"), csv.render());
    out.push(ctx.json_name("szemeredi"), write_json(&report("szemeredi", body)));
    Ok(out)
}
