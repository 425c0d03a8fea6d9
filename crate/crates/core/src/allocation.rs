use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::error::{structural, Result};
use crate::instance::SchedulingInstance;

/// Assignment of every task to exactly one machine, in task-id order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Allocation {
    pub assignment: Vec<usize>,
}

impl Allocation {
    pub fn new(assignment: Vec<usize>) -> Self {
        Allocation { assignment }
    }

    /// Star allocation in which the root (machine 0) gets exactly the tasks flagged in `root_set`.
    pub fn from_root_set(root_set: &[bool]) -> Self {
        let assignment = root_set
            .iter()
            .enumerate()
            .map(|(j, &root)| if root { 0 } else { j + 1 })
            .collect();
        Allocation { assignment }
    }

    pub fn num_tasks(&self) -> usize {
        self.assignment.len()
    }

    pub fn machine_of(&self, task: usize) -> usize {
        self.assignment[task]
    }

    /// Tasks given to `machine`, ascending.
    pub fn tasks_of(&self, machine: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == machine)
            .map(|(t, _)| t)
            .collect()
    }

    /// Checks the partition and eligibility properties against `inst`.
    pub fn validate(&self, inst: &SchedulingInstance) -> Result<()> {
        if self.assignment.len() != inst.num_tasks() {
            return Err(structural(format!(
                "allocation covers {} tasks, instance has {}",
                self.assignment.len(),
                inst.num_tasks()
            )));
        }
        for (task, &machine) in self.assignment.iter().enumerate() {
            if inst.cost(task, machine).is_none() {
                return Err(structural(format!(
                    "task {task} assigned to ineligible machine {machine}"
                )));
            }
        }
        Ok(())
    }

    /// Per-machine loads under `inst`'s processing times.
    pub fn loads(&self, inst: &SchedulingInstance) -> Result<Vec<Cost>> {
        self.validate(inst)?;
        let mut loads = vec![Cost::ZERO; inst.num_machines()];
        for (task, &machine) in self.assignment.iter().enumerate() {
            loads[machine] += inst.cost(task, machine).expect("validated");
        }
        Ok(loads)
    }

    /// For star allocations: which tasks the root holds.
    pub fn root_set(&self) -> Vec<bool> {
        self.assignment.iter().map(|&m| m == 0).collect()
    }
}
