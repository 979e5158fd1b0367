//! One module per subcommand; each returns its artifacts and failed checks.

mod compact;
mod folner;
mod higher;
mod invariants;
mod mix;
mod split;
mod szemeredi;
mod vdc;

use ergodix::GroupElement;
use serde_json::{json, Value};

use crate::config::Context;
use crate::output::Outcome;
use crate::{Command, ConfigError};

pub fn dispatch(command: &Command, ctx: &Context) -> Result<Outcome, ConfigError> {
    match command {
        Command::Folner(_) => folner::run(ctx),
        Command::Mix(_) => mix::run(ctx),
        Command::Higher(_) => higher::run(ctx),
        Command::Vdc(_) => vdc::run(ctx),
        Command::Compact(_) => compact::run(ctx),
        Command::Split(_) => split::run(ctx),
        Command::Szemeredi(_) => szemeredi::run(ctx),
        Command::Invariants(_) => invariants::run(ctx),
    }
}

fn point(g: &GroupElement) -> Value {
    json!(g.coords())
}

fn points(gs: &[GroupElement]) -> Value {
    gs.iter().map(point).collect()
}

fn coords(g: &GroupElement) -> String {
    g.coords().iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}
