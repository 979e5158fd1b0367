use ergodix::descriptor::ComplexEntry;
use ergodix::random::{random_sequence, seeded};
use ergodix::vdc::{vdc_verdict, VectorSequence};
use serde::Deserialize;
use serde_json::json;

use crate::config::Context;
use crate::output::{float, report, write_json, Csv, Outcome};
use crate::ConfigError;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SequenceParams {
    /// `e^{2πi α g^degree} v` on Z.
    PolynomialPhase { alpha: f64, degree: u32, vector: Vec<ComplexEntry> },
    Constant {
        #[serde(default = "one")]
        q: usize,
        vector: Vec<ComplexEntry>,
    },
    /// Seeded bounded values on a box, zero outside.
    Random { q: usize, dim: usize, radius: usize, bound: f64 },
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Expect {
    #[serde(default)]
    hypothesis_satisfied: Option<bool>,
    #[serde(default)]
    conclusion_observed: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    sequence: SequenceParams,
    #[serde(default)]
    truncation: Option<i64>,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default)]
    expect: Option<Expect>,
}

fn default_tolerance() -> f64 {
    0.05
}

fn vector(entries: &[ComplexEntry]) -> Vec<ergodix::Complex64> {
    entries.iter().map(|z| z.value()).collect()
}

pub fn run(ctx: &Context) -> Result<Outcome, ConfigError> {
    let params: Params = ctx.params()?;
    let f = match &params.sequence {
        SequenceParams::PolynomialPhase { alpha, degree, vector: v } => {
            VectorSequence::polynomial_phase(*alpha, *degree, vector(v))?
        }
        SequenceParams::Constant { q, vector: v } => VectorSequence::constant(*q, vector(v))?,
        SequenceParams::Random { q, dim, radius, bound } => {
            random_sequence(&mut seeded(ctx.seed()?), *q, *dim, *radius, *bound)?
        }
    };
    let windows = match &ctx.config.windows {
        Some(w) => w.build(Some(f.lattice_dim()))?,
        None => return Err(ConfigError("vdc needs `windows`".into())),
    };
    let r = vdc_verdict(&f, &windows, params.truncation, params.tolerance)?;
    let mut out = Outcome::default();
    if let Some(e) = &params.expect {
        if let Some(h) = e.hypothesis_satisfied {
            out.check(r.verdict.hypothesis_satisfied == h, || {
                format!("hypothesis_satisfied = {} but {h} was expected", r.verdict.hypothesis_satisfied)
            });
        }
        if let Some(c) = e.conclusion_observed {
            out.check(r.verdict.conclusion_observed == c, || {
                format!("conclusion_observed = {} but {c} was expected", r.verdict.conclusion_observed)
            });
        }
    }
    let mut csv = Csv::new(&["n", "window_size", "average_norm", "difference_set_statistic", "double_average"]);
    for (((w, avg), stat), dbl) in
        windows.iter().zip(&r.averages).zip(&r.difference_set_statistic).zip(&r.double_average)
    {
        csv.row(vec![w.index().to_string(), w.len().to_string(), float(avg.1), float(stat.1), float(dbl.1)]);
    }
    let mut body = r.to_json();
    body["bound"] = json!(f.bound());
    body["passed"] = json!(out.failures.is_empty());
    out.push(ctx.csv_name("vdc"), csv.render());
    out.push(ctx.json_name("vdc"), write_json(&report("vdc", body)));
    Ok(out)
}
