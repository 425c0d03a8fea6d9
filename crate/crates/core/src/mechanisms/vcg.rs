use crate::allocation::Allocation;
use crate::error::Result;
use crate::instance::SchedulingInstance;
use crate::objective::Sense;

use super::{Mechanism, PaymentVector};

/// Each task to its cheapest eligible machine; ties to the lowest machine id.
pub fn vcg_allocate(inst: &SchedulingInstance) -> Allocation {
    let assignment = (0..inst.num_tasks())
        .map(|t| {
            let eligible = inst.eligible(t);
            let mut best = eligible[0];
            for &(machine, cost) in &eligible[1..] {
                if cost < best.1 {
                    best = (machine, cost);
                }
            }
            best.0
        })
        .collect();
    Allocation::new(assignment)
}

/// VCG with Clarke payments: the winner of each task is paid the cheapest competing bid.
#[derive(Clone, Copy, Debug, Default)]
pub struct Vcg;

impl Mechanism for Vcg {
    fn name(&self) -> String {
        "vcg".into()
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        Ok(vcg_allocate(inst))
    }

    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector> {
        alloc.validate(inst)?;
        let mut pay = PaymentVector::zeros(Sense::Minimize, inst.num_machines());
        for t in 0..inst.num_tasks() {
            let winner = alloc.machine_of(t);
            let second = inst
                .eligible(t)
                .into_iter()
                .filter(|&(m, _)| m != winner)
                .map(|(_, c)| c)
                .min()
                .expect("every task has two eligible machines");
            pay.amounts[winner] += second.get();
        }
        Ok(pay)
    }
}
