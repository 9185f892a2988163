use super::ground::{FactId, GroundTask, State};
use crate::Cost;

/// Reusable buffers for computing the derived closure of states.
#[derive(Debug, Default)]
pub struct AxiomEvaluator {
    counters: Vec<u32>,
    queue: Vec<FactId>,
}

impl AxiomEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fills `truth` with the state's facts plus every derived fact implied by the axioms.
    pub fn truth<C: Cost>(&mut self, task: &GroundTask<C>, state: &State, truth: &mut Vec<bool>) {
        truth.clear();
        truth.resize(task.num_facts(), false);
        for &f in state.facts() {
            truth[f as usize] = true;
        }
        if task.axioms.is_empty() {
            return;
        }
        self.counters.clear();
        self.counters.extend(task.axioms.iter().map(|a| a.body_pos.len() as u32));
        self.queue.clear();
        self.queue.extend_from_slice(state.facts());
        // Negative bodies only mention fluents, which are fixed during the fixpoint.
        let fires = |i: usize, truth: &[bool]| task.axioms[i].body_neg.iter().all(|&n| !truth[n as usize]);
        for i in 0..task.axioms.len() {
            if self.counters[i] == 0 && fires(i, truth) {
                let h = task.axioms[i].head;
                if !truth[h as usize] {
                    truth[h as usize] = true;
                    self.queue.push(h);
                }
            }
        }
        while let Some(f) = self.queue.pop() {
            for &i in &task.axioms_by_body[f as usize] {
                let i = i as usize;
                self.counters[i] -= 1;
                if self.counters[i] == 0 && fires(i, truth) {
                    let h = task.axioms[i].head;
                    if !truth[h as usize] {
                        truth[h as usize] = true;
                        self.queue.push(h);
                    }
                }
            }
        }
    }
}

/// Derived facts that hold in `state`, in increasing id order.
pub fn evaluate_axioms<C: Cost>(state: &State, task: &GroundTask<C>) -> Vec<FactId> {
    let mut truth = Vec::new();
    AxiomEvaluator::new().truth(task, state, &mut truth);
    (0..task.num_facts() as FactId)
        .filter(|&f| truth[f as usize] && task.is_derived(f))
        .collect()
}
