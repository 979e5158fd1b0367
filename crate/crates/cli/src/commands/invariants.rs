use ergodix::invariants::run_invariants;
use serde::Deserialize;
use serde_json::json;

use crate::config::Context;
use crate::output::{float, report, write_json, Csv, Outcome};
use crate::ConfigError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    /// Suites to run; all when empty.
    #[serde(default)]
    suites: Vec<String>,
    /// Overrides every suite's trial count.
    #[serde(default)]
    trials: Option<usize>,
}

pub fn run(ctx: &Context) -> Result<Outcome, ConfigError> {
    let params: Params = ctx.params()?;
    let seed = ctx.seed()?;
    let r = run_invariants(seed, &params.suites, params.trials)?;
    let mut out = Outcome::default();
    let mut csv = Csv::new(&["suite", "trials", "failures", "max_excess"]);
    for s in &r.suites {
        csv.row(vec![s.name.clone(), s.trials.to_string(), s.failures.to_string(), float(s.max_excess)]);
        if let Some(f) = &s.first_failure {
            out.fail(format!(
                "{}: {} of {} trials failed; first at trial {}: {}",
                s.name, s.failures, s.trials, f.trial, f.detail
            ));
        }
    }
    let mut body = r.to_json();
    body["passed"] = json!(out.failures.is_empty());
    out.push(ctx.csv_name("invariants"), csv.render());
    out.push(ctx.json_name("invariants"), write_json(&report("invariants", body)));
    Ok(out)
}
