use ergodix::descriptor::HomDescriptor;
use ergodix::mixing::{
    asymptotic_abelianness, density_limit_check, ergodic_average, square_defect, weak_mixing_defect, MixingStatistic,
    Verdict,
};
use ergodix::systems::evaluate;
use ergodix::{DynamicalSystem, Homomorphism};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::Context;
use crate::output::{complex, float, report, write_json, Csv, Outcome};
use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Statistic {
    ErgodicAverage,
    WeakMixing,
    Square,
    AsymptoticAbelianness,
}

impl Statistic {
    fn as_str(self) -> &'static str {
        match self {
            Statistic::ErgodicAverage => "ergodic_average",
            Statistic::WeakMixing => "weak_mixing",
            Statistic::Square => "square",
            Statistic::AsymptoticAbelianness => "asymptotic_abelianness",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityParams {
    epsilons: Vec<f64>,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
}

fn default_tolerance() -> f64 {
    0.05
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    statistic: Statistic,
    a: String,
    b: String,
    #[serde(default)]
    hom: Option<HomDescriptor>,
    /// Asserted verdict, if any.
    #[serde(default)]
    expect: Option<Verdict>,
    /// Compares the defect's averages with the densities of its level sets.
    #[serde(default)]
    density: Option<DensityParams>,
}

fn statistic_json(stat: &MixingStatistic) -> Value {
    json!({
        "verdict": stat.verdict.as_str(),
        "verdict_threshold": stat.verdict_threshold,
        "per_window": stat.per_window.iter().map(|w| json!([w.n, w.size, w.value])).collect::<Vec<_>>(),
    })
}

pub fn run(ctx: &Context) -> Result<Outcome, ConfigError> {
    let params: Params = ctx.params()?;
    let sys = ctx.system()?;
    let (a, b) = (ctx.observable(&params.a)?, ctx.observable(&params.b)?);
    let q = sys.lattice_dim();
    let phi = match &params.hom {
        Some(h) => h.build(q)?,
        None => Homomorphism::identity(q),
    };
    let windows = ctx.windows()?;
    let rule = ctx.rule()?;
    let mut out = Outcome::default();
    let mut body = json!({
        "statistic": params.statistic.as_str(),
        "system": sys.backend_name(),
        "hom": phi.matrix(),
    });
    let csv = match params.statistic {
        Statistic::ErgodicAverage => {
            let avg = ergodic_average(sys, a, b, &phi, &windows)?;
            let mut csv = Csv::new(&["n", "window_size", "re", "im"]);
            for (w, (n, z)) in windows.iter().zip(&avg.per_window) {
                csv.row(vec![n.to_string(), w.len().to_string(), float(z.re), float(z.im)]);
            }
            body["reference"] = complex(avg.reference);
            body["per_window"] = avg.per_window.iter().map(|(n, z)| json!([n, z.re, z.im])).collect();
            csv.render()
        }
        stat => {
            let s = match stat {
                Statistic::WeakMixing => weak_mixing_defect(sys, a, b, &phi, &windows, &rule)?,
                Statistic::Square => square_defect(sys, a, b, &phi, &windows, &rule)?,
                _ => asymptotic_abelianness(sys, a, b, &phi, &windows, &rule)?,
            };
            if let Some(expected) = params.expect {
                out.check(s.verdict == expected, || {
                    format!("verdict {} but {} was expected", s.verdict.as_str(), expected.as_str())
                });
            }
            let obj = body.as_object_mut().expect("object");
            for (k, v) in statistic_json(&s).as_object().expect("object") {
                obj.insert(k.clone(), v.clone());
            }
            s.to_csv()
        }
    };
    if let Some(d) = &params.density {
        let product = sys.expectation(a) * sys.expectation(b);
        let zero = Homomorphism::zero(q);
        let f = |g: &ergodix::GroupElement| {
            evaluate(sys, &[(a, &zero), (b, &phi)], g).map_or(f64::NAN, |z| (z - product).norm())
        };
        let r = density_limit_check(f, &windows, &d.epsilons, d.tolerance)?;
        out.check(r.agree, || {
            format!("averages look {:?} but level-set densities look {:?}", r.average_verdict, r.density_verdict)
        });
        body["density_limit"] = serde_json::to_value(&r).map_err(ConfigError::from)?;
    }
    body["passed"] = json!(out.failures.is_empty());
    out.push(ctx.csv_name("mix"), csv);
    out.push(ctx.json_name("mix"), write_json(&report("mix", body)));
    Ok(out)
}
