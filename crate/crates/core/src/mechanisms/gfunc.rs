//! Offset families `g_T(leaf bids)` and tie-breaking orders for Hybrid mechanisms.

use std::fmt;
use std::sync::Arc;

use crate::cost::Cost;
use crate::objective::lp_norm;
use crate::subset::TaskSet;

type CustomFn = dyn Fn(TaskSet, &[Cost]) -> Cost + Send + Sync;

/// Per-subset offsets added to the root's cost of a candidate set `T`.
///
/// The shipped kinds aggregate the leaf bids of the tasks outside `T`: by maximum,
/// by L^p norm, or by sum (the last one makes the Hybrid rule coincide with VCG).
/// All of them are decreasing set functions of `T` and vanish at `T = M`.
#[derive(Clone)]
pub enum GFunction {
    MaxLeaf,
    LpLeaf(f64),
    SumLeaf,
    /// Arbitrary user family, used for verifier fixtures.
    Custom { name: String, f: Arc<CustomFn> },
}

impl GFunction {
    pub fn custom(name: impl Into<String>, f: impl Fn(TaskSet, &[Cost]) -> Cost + Send + Sync + 'static) -> Self {
        GFunction::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> String {
        match self {
            GFunction::MaxLeaf => "max-leaf".into(),
            GFunction::LpLeaf(p) => format!("lp-leaf(p={p})"),
            GFunction::SumLeaf => "sum-leaf".into(),
            GFunction::Custom { name, .. } => name.clone(),
        }
    }

    /// `g_T(leaf)`.
    pub fn eval(&self, set: TaskSet, leaf: &[Cost]) -> Cost {
        let outside = (0..leaf.len()).filter(move |&i| !set.contains(i)).map(move |i| leaf[i]);
        match self {
            GFunction::MaxLeaf => outside.max().unwrap_or(Cost::ZERO),
            GFunction::LpLeaf(p) => lp_norm(outside, *p),
            GFunction::SumLeaf => outside.sum(),
            GFunction::Custom { f, .. } => f(set, leaf),
        }
    }

    /// True for the shipped kinds, whose leaf thresholds have closed forms.
    pub fn has_closed_form(&self) -> bool {
        !matches!(self, GFunction::Custom { .. })
    }

    /// `sup { x >= 0 : g_T(leaf with leaf[i] = x) <= budget }` for `i` outside `T`;
    /// `None` when even `x = 0` exceeds the budget. Only for closed-form kinds.
    pub(crate) fn leaf_sup(&self, set: TaskSet, leaf: &[Cost], i: usize, budget: Cost) -> Option<Cost> {
        debug_assert!(!set.contains(i));
        let rest = (0..leaf.len()).filter(|&j| j != i && !set.contains(j)).map(|j| leaf[j]);
        match self {
            GFunction::MaxLeaf => {
                let h = rest.max().unwrap_or(Cost::ZERO);
                (h <= budget).then_some(budget)
            }
            GFunction::SumLeaf => {
                let s: Cost = rest.sum();
                (s <= budget).then(|| budget.saturating_sub(s))
            }
            GFunction::LpLeaf(p) => {
                let rest: Vec<Cost> = rest.collect();
                let base = lp_norm(rest.iter().copied(), *p);
                if base > budget {
                    return None;
                }
                if budget.is_infinite() {
                    return Some(Cost::INFINITY);
                }
                let s: f64 = rest.iter().map(|c| c.get().powf(*p)).sum();
                Some(Cost::of((budget.get().powf(*p) - s).max(0.0).powf(1.0 / p)))
            }
            GFunction::Custom { .. } => unreachable!("custom families have no closed-form threshold"),
        }
    }

    /// `inf { x >= 0 : g_T(leaf with leaf[i] = x) >= target }` for `i` outside `T`;
    /// `None` when no finite bid reaches the target. Only for closed-form kinds.
    pub(crate) fn leaf_inf(&self, set: TaskSet, leaf: &[Cost], i: usize, target: Cost) -> Option<Cost> {
        debug_assert!(!set.contains(i));
        let rest = (0..leaf.len()).filter(|&j| j != i && !set.contains(j)).map(|j| leaf[j]);
        match self {
            GFunction::MaxLeaf => {
                let h = rest.max().unwrap_or(Cost::ZERO);
                if h >= target {
                    Some(Cost::ZERO)
                } else {
                    target.is_finite().then_some(target)
                }
            }
            GFunction::SumLeaf => {
                let s: Cost = rest.sum();
                if s >= target {
                    Some(Cost::ZERO)
                } else {
                    target.is_finite().then(|| target.saturating_sub(s))
                }
            }
            GFunction::LpLeaf(p) => {
                let rest: Vec<Cost> = rest.collect();
                if lp_norm(rest.iter().copied(), *p) >= target {
                    return Some(Cost::ZERO);
                }
                if target.is_infinite() {
                    return None;
                }
                let s: f64 = rest.iter().map(|c| c.get().powf(*p)).sum();
                Some(Cost::of((target.get().powf(*p) - s).max(0.0).powf(1.0 / p)))
            }
            GFunction::Custom { .. } => unreachable!("custom families have no closed-form threshold"),
        }
    }
}

impl fmt::Debug for GFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Deterministic total order used to pick one set among equally good candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TieBreak {
    /// Larger root sets first; equal sizes by lexicographically smallest sorted index sequence.
    #[default]
    RootPreferring,
    /// Smaller root sets first; equal sizes by lexicographically smallest sorted index sequence.
    LeafPreferring,
}

impl TieBreak {
    /// True when `a` comes strictly before `b` in this order.
    pub fn prefers(self, a: TaskSet, b: TaskSet) -> bool {
        if a == b {
            return false;
        }
        let (la, lb) = (a.len(), b.len());
        if la != lb {
            return match self {
                TieBreak::RootPreferring => la > lb,
                TieBreak::LeafPreferring => la < lb,
            };
        }
        // equal sizes: the smallest element of the symmetric difference decides
        let lowest = (a.0 ^ b.0).trailing_zeros();
        a.0 >> lowest & 1 == 1
    }

    /// [`prefers`](Self::prefers) on membership vectors of any length.
    pub fn prefers_flags(self, a: &[bool], b: &[bool]) -> bool {
        let la = a.iter().filter(|&&x| x).count();
        let lb = b.iter().filter(|&&x| x).count();
        if la != lb {
            return match self {
                TieBreak::RootPreferring => la > lb,
                TieBreak::LeafPreferring => la < lb,
            };
        }
        match a.iter().zip(b).position(|(x, y)| x != y) {
            Some(i) => a[i],
            None => false,
        }
    }
}
