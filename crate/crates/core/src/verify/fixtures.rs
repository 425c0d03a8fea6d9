//! Mechanisms and offset families that are known to misbehave, for negative controls.

use std::sync::Arc;

use crate::allocation::Allocation;
use crate::cost::Cost;
use crate::error::Result;
use crate::instance::SchedulingInstance;
use crate::mechanisms::{inapplicable, GFunction, Mechanism, PaymentVector};
use crate::objective::Sense;

/// Star rule that gives task 0 to the root exactly when its bid lies in `[1, 2]`
/// and pays the root 2 for it. Every other task goes to its leaf for free.
#[derive(Clone, Copy, Debug, Default)]
pub struct AntiMonotone;

impl Mechanism for AntiMonotone {
    fn name(&self) -> String {
        "anti-monotone".into()
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        let s = inst.as_star().ok_or_else(|| inapplicable(&self.name(), inst))?;
        let r0 = s.root_costs().first().map_or(0.0, |c| c.get());
        let flags: Vec<bool> = (0..s.m()).map(|j| j == 0 && (1.0..=2.0).contains(&r0)).collect();
        Ok(Allocation::from_root_set(&flags))
    }

    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector> {
        let mut pay = PaymentVector::zeros(Sense::Minimize, inst.num_machines());
        if alloc.num_tasks() > 0 && alloc.machine_of(0) == 0 {
            pay.amounts[0] = 2.0;
        }
        Ok(pay)
    }
}

/// Keeps the allocation of `M` and pays nobody.
#[derive(Clone, Debug)]
pub struct ZeroPayments<M>(pub M);

impl<M: Mechanism> ZeroPayments<M> {
    pub fn new(inner: M) -> Self {
        ZeroPayments(inner)
    }
}

impl<M: Mechanism> Mechanism for ZeroPayments<M> {
    fn name(&self) -> String {
        format!("{}+zero-payments", self.0.name())
    }

    fn sense(&self) -> Sense {
        self.0.sense()
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        self.0.allocate(inst)
    }

    fn payments(&self, inst: &SchedulingInstance, _alloc: &Allocation) -> Result<PaymentVector> {
        Ok(PaymentVector::zeros(self.sense(), inst.num_machines()))
    }
}

type RuleFn = dyn Fn(&SchedulingInstance) -> Result<Allocation> + Send + Sync;

/// A bare allocation rule given as a closure, with zero payments. Useful to
/// audit monotonicity of rules that have no payment scheme yet.
#[derive(Clone)]
pub struct FnRule {
    name: String,
    sense: Sense,
    rule: Arc<RuleFn>,
}

impl FnRule {
    pub fn new(
        name: impl Into<String>,
        sense: Sense,
        rule: impl Fn(&SchedulingInstance) -> Result<Allocation> + Send + Sync + 'static,
    ) -> Self {
        FnRule {
            name: name.into(),
            sense,
            rule: Arc::new(rule),
        }
    }
}

impl Mechanism for FnRule {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn sense(&self) -> Sense {
        self.sense
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        (self.rule)(inst)
    }

    fn payments(&self, inst: &SchedulingInstance, _alloc: &Allocation) -> Result<PaymentVector> {
        Ok(PaymentVector::zeros(self.sense, inst.num_machines()))
    }
}

fn recip(c: Cost) -> Cost {
    if c.get() == 0.0 {
        Cost::INFINITY
    } else {
        Cost::of(1.0 / c.get())
    }
}

/// Two-task family with `g_{12} = 0`, `g_{1} = l2 + 1/l1`, `g_{2} = 1` and
/// `g_{} = l2 + 1/l1 + 1`. Its `psi_1` is identically 1, so it is monotone but not
/// strictly, and it breaks the per-set monotonicity condition. Extra leaves are ignored.
pub fn example_family() -> GFunction {
    GFunction::custom("example", |set, leaf| {
        let l1 = leaf.first().copied().unwrap_or(Cost::ZERO);
        let l2 = leaf.get(1).copied().unwrap_or(Cost::ZERO);
        let base = l2 + recip(l1);
        match (set.contains(0), set.contains(1)) {
            (true, true) => Cost::ZERO,
            (true, false) => base,
            (false, true) => Cost::of(1.0),
            (false, false) => base + Cost::of(1.0),
        }
    })
}

/// `g_T = sum of 1/l_i over i outside T`: a decreasing set function whose `psi`
/// falls as a leaf bid rises, so leaves win with high bids.
pub fn inverse_leaf_family() -> GFunction {
    GFunction::custom("inverse-leaf", |set, leaf| {
        (0..leaf.len()).filter(|&i| !set.contains(i)).map(|i| recip(leaf[i])).sum()
    })
}
