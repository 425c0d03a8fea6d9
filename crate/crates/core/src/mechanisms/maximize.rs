//! Maximization on stars: the L^p Hybrid auction, All-or-Nothing, and their combination.
//!
//! Bids are values here. Payments are charged to the players.

use crate::allocation::Allocation;
use crate::cost::{difference, Cost};
use crate::error::{invalid, Result};
use crate::instance::{SchedulingInstance, StarInstance};
use crate::objective::{lp_norm, Sense};
use crate::subset::TaskSet;

use super::gfunc::{GFunction, TieBreak};
use super::hybrid::{argmax_exhaustive, leaf_threshold_max};
use super::{check_enum_capacity, default_enum_limit, inapplicable, Mechanism, PaymentVector};

fn check_p(p: f64, what: &str) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{what} needs finite p >= 1, got {p}")))
    }
}

fn lp_root_set(inst: &StarInstance, p: f64, tie: TieBreak, limit: usize) -> Result<TaskSet> {
    check_enum_capacity(inst.m(), limit, "hybrid maximization search")?;
    Ok(argmax_exhaustive(inst.root_costs(), inst.leaf_costs(), &GFunction::LpLeaf(p), tie).0)
}

/// `argmax_T r(T) + ||leaf bids outside T||_p`.
pub fn hybrid_lp_max_allocate(inst: &StarInstance, p: f64, tie: TieBreak) -> Result<Allocation> {
    check_p(p, "hybrid-lp-max")?;
    let s = lp_root_set(inst, p, tie, default_enum_limit())?;
    Ok(Allocation::from_root_set(&s.to_flags(inst.m())))
}

fn root_takes_all(inst: &StarInstance, p: f64) -> bool {
    let total: Cost = inst.root_costs().iter().sum();
    total >= lp_norm(inst.leaf_costs().iter().copied(), p)
}

/// The root gets every task iff `r(M) >= ||leaf bids||_p`; otherwise every leaf serves.
pub fn all_or_nothing_allocate(inst: &StarInstance, p: f64) -> Result<Allocation> {
    check_p(p, "all-or-nothing")?;
    Ok(Allocation::from_root_set(&vec![root_takes_all(inst, p); inst.m()]))
}

/// Hybrid for `p <= 2`, All-or-Nothing above.
pub fn combined_max_mechanism(inst: &StarInstance, p: f64) -> Result<Allocation> {
    check_p(p, "combined-max")?;
    if p <= 2.0 {
        hybrid_lp_max_allocate(inst, p, TieBreak::RootPreferring)
    } else {
        all_or_nothing_allocate(inst, p)
    }
}

#[derive(Clone, Debug)]
pub struct HybridLpMax {
    pub p: f64,
    pub tie: TieBreak,
    pub enum_limit: usize,
}

impl HybridLpMax {
    pub fn new(p: f64, tie: TieBreak) -> Result<Self> {
        check_p(p, "hybrid-lp-max")?;
        Ok(HybridLpMax {
            p,
            tie,
            enum_limit: default_enum_limit(),
        })
    }
}

impl Mechanism for HybridLpMax {
    fn name(&self) -> String {
        format!("hybrid-lp-max(p={})", self.p)
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        let star = inst.as_star().ok_or_else(|| inapplicable(&self.name(), inst))?;
        let s = lp_root_set(star, self.p, self.tie, self.enum_limit)?;
        Ok(Allocation::from_root_set(&s.to_flags(star.m())))
    }

    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector> {
        let star = inst.as_star().ok_or_else(|| inapplicable(&self.name(), inst))?;
        alloc.validate(inst)?;
        check_enum_capacity(star.m(), self.enum_limit, "hybrid maximization payments")?;
        let g = GFunction::LpLeaf(self.p);
        let (root, leaf) = (star.root_costs(), star.leaf_costs());
        let flags = alloc.root_set();
        let s = TaskSet::from_flags(&flags);
        let mut pay = PaymentVector::zeros(Sense::Maximize, star.m() + 1);
        if !s.is_empty() {
            pay.amounts[0] = difference(g.eval(TaskSet::EMPTY, leaf), g.eval(s, leaf));
        }
        for j in (0..star.m()).filter(|&j| !flags[j]) {
            pay.amounts[j + 1] = leaf_threshold_max(root, leaf, &g, self.tie, j).get();
        }
        Ok(pay)
    }
}

#[derive(Clone, Debug)]
pub struct AllOrNothing {
    pub p: f64,
}

impl AllOrNothing {
    pub fn new(p: f64) -> Result<Self> {
        check_p(p, "all-or-nothing")?;
        Ok(AllOrNothing { p })
    }
}

fn all_or_nothing_payments(star: &StarInstance, p: f64) -> PaymentVector {
    let m = star.m();
    let leaf = star.leaf_costs();
    let mut pay = PaymentVector::zeros(Sense::Maximize, m + 1);
    if root_takes_all(star, p) {
        pay.amounts[0] = lp_norm(leaf.iter().copied(), p).get();
        return pay;
    }
    // leaf j keeps winning while ||leaf||_p > r(M)
    let total: Cost = star.root_costs().iter().sum();
    for j in 0..m {
        let rest: f64 = (0..m).filter(|&i| i != j).map(|i| leaf[i].get().powf(p)).sum();
        let need = total.get().powf(p) - rest;
        pay.amounts[j + 1] = if need > 0.0 { need.powf(1.0 / p) } else { 0.0 };
    }
    pay
}

impl Mechanism for AllOrNothing {
    fn name(&self) -> String {
        format!("all-or-nothing(p={})", self.p)
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        let star = inst.as_star().ok_or_else(|| inapplicable(&self.name(), inst))?;
        all_or_nothing_allocate(star, self.p)
    }

    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector> {
        let star = inst.as_star().ok_or_else(|| inapplicable(&self.name(), inst))?;
        alloc.validate(inst)?;
        Ok(all_or_nothing_payments(star, self.p))
    }
}

/// Dispatches to [`HybridLpMax`] for `p <= 2` and to [`AllOrNothing`] otherwise.
#[derive(Clone, Debug)]
pub struct CombinedMax {
    pub p: f64,
}

impl CombinedMax {
    pub fn new(p: f64) -> Result<Self> {
        check_p(p, "combined-max")?;
        Ok(CombinedMax { p })
    }

    fn inner(&self) -> Box<dyn Mechanism> {
        if self.p <= 2.0 {
            Box::new(HybridLpMax::new(self.p, TieBreak::RootPreferring).expect("validated p"))
        } else {
            Box::new(AllOrNothing { p: self.p })
        }
    }
}

impl Mechanism for CombinedMax {
    fn name(&self) -> String {
        format!("combined-max(p={})", self.p)
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        if inst.as_star().is_none() {
            return Err(inapplicable(&self.name(), inst));
        }
        self.inner().allocate(inst)
    }

    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector> {
        if inst.as_star().is_none() {
            return Err(inapplicable(&self.name(), inst));
        }
        self.inner().payments(inst, alloc)
    }
}
