//! Hybrid mechanism on hyperstars (several roots, one leaf per task).
//!
//! The inner minimization over root assignments is separable: a task placed with
//! the roots goes to `argmin_h lambda_h * r_hj` (lowest index on ties). So the
//! outer search is the star rule on the per-task minima `w_j`.

use crate::allocation::Allocation;
use crate::cost::{difference, Cost};
use crate::error::Result;
use crate::instance::{HyperstarInstance, SchedulingInstance};
use crate::objective::Sense;
use crate::subset::TaskSet;

use super::gfunc::{GFunction, TieBreak};
use super::hybrid::{hybrid_star_root_set, leaf_threshold_min, root_sum};
use super::{check_enum_capacity, default_enum_limit, inapplicable, Mechanism, PaymentVector};

/// Weighted cheapest root cost per task, ignoring root `skip` if given, and the root attaining it.
fn weighted_minima(inst: &HyperstarInstance, skip: Option<usize>) -> (Vec<Cost>, Vec<Option<usize>>) {
    let mut w = vec![Cost::INFINITY; inst.m()];
    let mut who = vec![None; inst.m()];
    for j in 0..inst.m() {
        for h in (0..inst.k()).filter(|&h| Some(h) != skip) {
            let c = inst.root_costs()[h][j].scale(inst.lambdas()[h]);
            if who[j].is_none() || c < w[j] {
                w[j] = c;
                who[j] = Some(h);
            }
        }
    }
    (w, who)
}

fn allocate_with_limit(inst: &HyperstarInstance, g: &GFunction, tie: TieBreak, limit: usize) -> Result<Allocation> {
    let (w, who) = weighted_minima(inst, None);
    let flags = hybrid_star_root_set(&w, inst.leaf_costs(), g, tie, limit)?;
    let assignment = flags
        .iter()
        .enumerate()
        .map(|(j, &root)| if root { who[j].expect("k >= 1") } else { inst.k() + j })
        .collect();
    Ok(Allocation::new(assignment))
}

pub fn hybrid_hyperstar_allocate(inst: &HyperstarInstance, g: &GFunction, tie: TieBreak) -> Result<Allocation> {
    allocate_with_limit(inst, g, tie, default_enum_limit())
}

/// `min over R disjoint from T of { w_{-h}(R) + g_{R u T} }`: the best the rest of the
/// mechanism can do once root `h` holds `T`.
fn substituted_offset(w_others: &[Cost], leaf: &[Cost], g: &GFunction, t: TaskSet) -> Cost {
    let m = leaf.len();
    t.complement(m)
        .subsets()
        .map(|r| root_sum(w_others, r) + g.eval(r.union(t), leaf))
        .min()
        .expect("the empty set is always a candidate")
}

fn hyperstar_payments(inst: &HyperstarInstance, g: &GFunction, tie: TieBreak, alloc: &Allocation) -> Vec<f64> {
    let k = inst.k();
    let m = inst.m();
    let leaf = inst.leaf_costs();
    let mut amounts = vec![0.0; k + m];
    for (h, amount) in amounts.iter_mut().enumerate().take(k) {
        let held = TaskSet::from_indices(alloc.tasks_of(h));
        if held.is_empty() {
            continue;
        }
        let (w_others, _) = weighted_minima(inst, Some(h));
        let gain = difference(
            substituted_offset(&w_others, leaf, g, TaskSet::EMPTY),
            substituted_offset(&w_others, leaf, g, held),
        );
        let lambda = inst.lambdas()[h];
        *amount = if lambda > 0.0 {
            gain / lambda
        } else if gain > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
    }
    let (w, _) = weighted_minima(inst, None);
    for j in 0..m {
        if alloc.machine_of(j) == k + j {
            amounts[k + j] = leaf_threshold_min(&w, leaf, g, tie, j).get();
        }
    }
    amounts
}

/// Hybrid rule on hyperstars; stars are accepted as single-root hyperstars.
#[derive(Clone, Debug)]
pub struct HybridHyperstar {
    pub g: GFunction,
    pub tie: TieBreak,
    pub enum_limit: usize,
}

impl HybridHyperstar {
    pub fn new(g: GFunction, tie: TieBreak) -> Self {
        HybridHyperstar {
            g,
            tie,
            enum_limit: default_enum_limit(),
        }
    }

    fn view(&self, inst: &SchedulingInstance) -> Result<HyperstarInstance> {
        match inst {
            SchedulingInstance::Hyperstar(h) => Ok(h.clone()),
            SchedulingInstance::Star(s) => Ok(HyperstarInstance::from_star(s)),
            SchedulingInstance::Graph(_) => Err(inapplicable(&self.name(), inst)),
        }
    }
}

impl Mechanism for HybridHyperstar {
    fn name(&self) -> String {
        match &self.g {
            GFunction::MaxLeaf => "hyperstar-hybrid".into(),
            other => format!("hyperstar-hybrid[{}]", other.name()),
        }
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        let h = self.view(inst)?;
        check_enum_capacity(h.m(), self.enum_limit, "hyperstar hybrid search")?;
        allocate_with_limit(&h, &self.g, self.tie, self.enum_limit)
    }

    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector> {
        let h = self.view(inst)?;
        alloc.validate(inst)?;
        check_enum_capacity(h.m(), self.enum_limit, "hyperstar payments")?;
        Ok(PaymentVector {
            sense: Sense::Minimize,
            amounts: hyperstar_payments(&h, &self.g, self.tie, alloc),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::StarInstance;
    use crate::mechanisms::hybrid_star_allocate;

    // Oracle: enumerate root subsets T and, inside, every assignment of T to roots.
    fn brute(inst: &HyperstarInstance) -> (TaskSet, Vec<usize>, f64) {
        let (k, m) = (inst.k(), inst.m());
        let mut best: Option<(TaskSet, Vec<usize>, f64)> = None;
        for t in TaskSet::all(m) {
            let members: Vec<usize> = t.iter().collect();
            let combos = k.pow(members.len() as u32);
            for code in 0..combos {
                let mut c = code;
                let mut roots = vec![0; members.len()];
                for r in roots.iter_mut() {
                    *r = c % k;
                    c /= k;
                }
                let inner: f64 = members
                    .iter()
                    .zip(&roots)
                    .map(|(&j, &h)| inst.lambdas()[h] * inst.root_costs()[h][j].get())
                    .sum();
                let outer = (0..m).filter(|&j| !t.contains(j)).map(|j| inst.leaf_costs()[j].get()).fold(0.0, f64::max);
                let v = inner + outer;
                if best.as_ref().is_none_or(|b| v < b.2) {
                    best = Some((t, roots, v));
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn spec_examples() {
        let tie = TieBreak::RootPreferring;
        let h = HyperstarInstance::from_f64(&[vec![1.0, 3.0], vec![2.0, 1.0]], &[5.0, 5.0]).unwrap();
        let a = hybrid_hyperstar_allocate(&h, &GFunction::MaxLeaf, tie).unwrap();
        assert_eq!(a.assignment, vec![0, 1]);
        let (t, roots, v) = brute(&h);
        assert_eq!(t, TaskSet::full(2));
        assert_eq!(roots, vec![0, 1]);
        assert_eq!(v, 2.0);

        let h = HyperstarInstance::from_f64(&[vec![10.0, 10.0], vec![10.0, 10.0]], &[1.0, 1.0]).unwrap();
        let a = hybrid_hyperstar_allocate(&h, &GFunction::MaxLeaf, tie).unwrap();
        assert_eq!(a.assignment, vec![2, 3]);
        assert_eq!(brute(&h).2, 1.0);
    }

    #[test]
    fn single_root_reduces_to_star() {
        let s = StarInstance::from_f64(&[1.0, 5.0, 0.5], &[6.0, 4.0, 0.2]).unwrap();
        let h = HyperstarInstance::from_star(&s);
        for g in [GFunction::MaxLeaf, GFunction::LpLeaf(2.0), GFunction::SumLeaf] {
            let a = hybrid_hyperstar_allocate(&h, &g, TieBreak::RootPreferring).unwrap();
            let b = hybrid_star_allocate(&s, &g, TieBreak::RootPreferring).unwrap();
            assert_eq!(a, b);
            let mh = HybridHyperstar::new(g.clone(), TieBreak::RootPreferring);
            let ms = super::super::HybridStar::new(g, TieBreak::RootPreferring);
            let ps = ms.payments(&s.clone().into(), &b).unwrap();
            let ph = mh.payments(&h.clone().into(), &a).unwrap();
            for (x, y) in ps.amounts.iter().zip(&ph.amounts) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_weights_are_allowed() {
        let h = HyperstarInstance::with_lambdas(
            vec![vec![Cost::of(3.0), Cost::of(4.0)], vec![Cost::of(1.0), Cost::of(1.0)]],
            vec![Cost::of(1.0), Cost::of(1.0)],
            vec![0.0, 0.0],
        )
        .unwrap();
        let a = hybrid_hyperstar_allocate(&h, &GFunction::MaxLeaf, TieBreak::RootPreferring).unwrap();
        // inner sum is 0, so every task goes to the lowest-index root
        assert_eq!(a.assignment, vec![0, 0]);
    }
}
