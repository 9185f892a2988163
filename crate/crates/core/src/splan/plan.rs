use serde::{Deserialize, Serialize};

use crate::model::{Args, ObjectRef, ObjectRegistry, OperatorSchema};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanStep {
    /// Index of the operator schema.
    pub operator: usize,
    pub args: Args,
}

/// Sequence of ground operator instances.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, operator: usize, args: impl IntoIterator<Item = ObjectRef>) {
        self.steps.push(PlanStep {
            operator,
            args: args.into_iter().collect(),
        });
    }

    pub fn cost<C: crate::Cost>(&self, operators: &[OperatorSchema<C>]) -> C {
        self.steps
            .iter()
            .fold(C::zero(), |acc, s| acc + operators[s.operator].cost)
    }

    /// `Name(arg, ...)` per step.
    pub fn render<C>(&self, operators: &[OperatorSchema<C>], registry: &ObjectRegistry) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| format!("{}{}", operators[s.operator].name, registry.names(&s.args)))
            .collect()
    }
}

/// Serializable plan step with rendered names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderedStep {
    pub operator: String,
    pub args: Vec<String>,
}

impl RenderedStep {
    pub fn of<C>(step: &PlanStep, operators: &[OperatorSchema<C>], registry: &ObjectRegistry) -> Self {
        RenderedStep {
            operator: operators[step.operator].name.clone(),
            args: step.args.iter().map(|&o| registry.name(o)).collect(),
        }
    }
}
