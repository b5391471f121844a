use serde::{Deserialize, Serialize};

use super::verify::{verify_on_grid, GridSpec};
use super::{EquationSpec, Generated, GridBox, Result, SolutionEntry, SolutionError, Step};

/// One step of a generation chain: the equation the solution is carried to,
/// the step that carries it there and optionally a new verification box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub id: String,
    pub equation: EquationSpec,
    pub step: Step,
    #[serde(default, rename = "box")]
    pub grid: Option<GridBox>,
}

fn step_name(s: &Step) -> String {
    match s {
        Step::Pullback { map, .. } => format!("pullback through {}", map.name()),
        Step::Preimage => "u = v/√|f|".into(),
        Step::DoublePreimage => "v = w − F/(2H)".into(),
    }
}

/// Carries `entry` along the chain. Each new entry is verified at its
/// default binding; an empty chain returns the entry unchanged.
pub fn generate(entry: &SolutionEntry, chain: &[ChainLink]) -> Result<SolutionEntry> {
    let mut cur = entry.clone();
    for link in chain {
        let next = SolutionEntry {
            id: link.id.clone(),
            title: format!("{} ({})", cur.title, step_name(&link.step)),
            equation: link.equation.clone(),
            solution: None,
            generated: Some(Generated {
                from: cur.id.clone(),
                step: link.step.clone(),
                bind: Default::default(),
                parent: Some(Box::new(cur.clone())),
            }),
            constants: cur.constants.clone(),
            derived: cur.derived.clone(),
            constraints: cur.constraints.clone(),
            identities: cur.identities.clone(),
            grid: link.grid.unwrap_or(cur.grid),
            source: format!("{} carried by {}", cur.source, step_name(&link.step)),
            tags: cur.tags.clone(),
        };
        let rep = verify_on_grid(&next, &next.defaults(), &GridSpec::default())
            .map_err(|e| SolutionError::Generate(format!("{}: {e}", next.id)))?;
        if !rep.pass {
            return Err(SolutionError::Generate(format!(
                "{}: residual {:e} ({} points failed)",
                next.id, rep.max_rel, rep.failed
            )));
        }
        cur = next;
    }
    Ok(cur)
}
