//! The Hybrid mechanism on stars.

use crate::allocation::Allocation;
use crate::cost::{difference, Cost};
use crate::error::Result;
use crate::instance::{SchedulingInstance, StarInstance};
use crate::objective::Sense;
use crate::subset::TaskSet;

use super::gfunc::{GFunction, TieBreak};
use super::{capacity_error, check_enum_capacity, default_enum_limit, inapplicable, Mechanism, PaymentVector};

#[inline]
pub(crate) fn root_sum(root: &[Cost], set: TaskSet) -> Cost {
    set.iter().map(|i| root[i]).sum()
}

/// `r(T) + g_T(leaf)`, summing `r` in ascending index order.
#[inline]
pub(crate) fn subset_value(root: &[Cost], leaf: &[Cost], g: &GFunction, set: TaskSet) -> Cost {
    root_sum(root, set) + g.eval(set, leaf)
}

/// Exhaustive `argmin_T r(T) + g_T(leaf)` with ties resolved by `tie`.
pub(crate) fn argmin_exhaustive(root: &[Cost], leaf: &[Cost], g: &GFunction, tie: TieBreak) -> (TaskSet, Cost) {
    let m = root.len();
    let mut best = TaskSet::EMPTY;
    let mut best_val = subset_value(root, leaf, g, best);
    for t in TaskSet::all(m).skip(1) {
        let v = subset_value(root, leaf, g, t);
        if v < best_val || (v == best_val && tie.prefers(t, best)) {
            best = t;
            best_val = v;
        }
    }
    (best, best_val)
}

/// Exhaustive `argmax_T r(T) + g_T(leaf)` with ties resolved by `tie`.
pub(crate) fn argmax_exhaustive(root: &[Cost], leaf: &[Cost], g: &GFunction, tie: TieBreak) -> (TaskSet, Cost) {
    let m = root.len();
    let mut best = TaskSet::EMPTY;
    let mut best_val = subset_value(root, leaf, g, best);
    for t in TaskSet::all(m).skip(1) {
        let v = subset_value(root, leaf, g, t);
        if v > best_val || (v == best_val && tie.prefers(t, best)) {
            best = t;
            best_val = v;
        }
    }
    (best, best_val)
}

/// The root's task set as membership flags.
///
/// Exhaustive search up to `limit` tasks; beyond that only `MaxLeaf` and `SumLeaf`
/// are supported, through their closed-form scans.
pub fn hybrid_star_root_set(
    root: &[Cost],
    leaf: &[Cost],
    g: &GFunction,
    tie: TieBreak,
    limit: usize,
) -> Result<Vec<bool>> {
    let m = root.len();
    if m <= limit.min(super::MAX_ENUM_LIMIT) {
        return Ok(argmin_exhaustive(root, leaf, g, tie).0.to_flags(m));
    }
    match g {
        GFunction::MaxLeaf => Ok(fast_max_root_set(root, leaf, tie)),
        GFunction::SumLeaf => Ok(fast_sum_root_set(root, leaf, tie)),
        _ => Err(capacity_error(m, limit, &format!("hybrid search with {}", g.name()))),
    }
}

/// Hybrid allocation on a star with the default enumeration limit.
pub fn hybrid_star_allocate(inst: &StarInstance, g: &GFunction, tie: TieBreak) -> Result<Allocation> {
    let flags = hybrid_star_root_set(inst.root_costs(), inst.leaf_costs(), g, tie, default_enum_limit())?;
    Ok(Allocation::from_root_set(&flags))
}

/// Hybrid allocation by brute force over all `2^m` root sets, regardless of `g`.
pub fn hybrid_star_allocate_exhaustive(
    inst: &StarInstance,
    g: &GFunction,
    tie: TieBreak,
    limit: usize,
) -> Result<Allocation> {
    check_enum_capacity(inst.m(), limit, "hybrid search")?;
    let (set, _) = argmin_exhaustive(inst.root_costs(), inst.leaf_costs(), g, tie);
    Ok(Allocation::from_root_set(&set.to_flags(inst.m())))
}

/// `MaxLeaf` Hybrid allocation in `O(m log m)`; same output as the exhaustive search.
pub fn hybrid_star_allocate_fast_max(inst: &StarInstance, tie: TieBreak) -> Allocation {
    Allocation::from_root_set(&fast_max_root_set(inst.root_costs(), inst.leaf_costs(), tie))
}

/// `SumLeaf` (VCG) Hybrid allocation, task by task.
pub fn hybrid_star_allocate_fast_sum(inst: &StarInstance, tie: TieBreak) -> Allocation {
    Allocation::from_root_set(&fast_sum_root_set(inst.root_costs(), inst.leaf_costs(), tie))
}

fn flags_value_max(root: &[Cost], leaf: &[Cost], flags: &[bool]) -> Cost {
    let r: Cost = (0..root.len()).filter(|&i| flags[i]).map(|i| root[i]).sum();
    let h = (0..leaf.len()).filter(|&i| !flags[i]).map(|i| leaf[i]).max().unwrap_or(Cost::ZERO);
    r + h
}

fn extreme_set(m: usize, tie: TieBreak) -> Vec<bool> {
    vec![tie == TieBreak::RootPreferring; m]
}

// Every minimizer T has a level h = max of the leaf bids outside T, contains all
// tasks with leaf bid above h, and can only add tasks of zero root cost. So the
// candidates are one threshold set per distinct leaf level plus T = M; prefix
// sums in sorted order shortlist them and the shortlist is re-scored in index
// order so that floating-point ties match the exhaustive search.
pub(crate) fn fast_max_root_set(root: &[Cost], leaf: &[Cost], tie: TieBreak) -> Vec<bool> {
    let m = root.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| leaf[b].cmp(&leaf[a]).then(a.cmp(&b)));

    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(Cost::ZERO);
    for &i in &order {
        let last = *prefix.last().unwrap();
        prefix.push(last + root[i]);
    }

    // (number of leading tasks in `order` given to the root, approximate value)
    let mut candidates: Vec<(usize, Cost)> = Vec::new();
    let mut k = 0;
    while k < m {
        candidates.push((k, prefix[k] + leaf[order[k]]));
        let level = leaf[order[k]];
        while k < m && leaf[order[k]] == level {
            k += 1;
        }
    }
    candidates.push((m, prefix[m]));

    let approx_min = candidates.iter().map(|c| c.1).min().unwrap();
    if approx_min.is_infinite() {
        return extreme_set(m, tie);
    }
    let slack = 1e-9 * (1.0 + approx_min.get());

    let shortlist: Vec<(Vec<bool>, Cost)> = candidates
        .iter()
        .filter(|c| c.1.get() <= approx_min.get() + slack)
        .map(|&(k, _)| {
            let mut flags = vec![false; m];
            for &i in &order[..k] {
                flags[i] = true;
            }
            let v = flags_value_max(root, leaf, &flags);
            (flags, v)
        })
        .collect();
    let best_val = shortlist.iter().map(|c| c.1).min().unwrap();

    let mut best: Option<Vec<bool>> = None;
    for (flags, v) in shortlist {
        if v != best_val {
            continue;
        }
        let chosen = match tie {
            TieBreak::LeafPreferring => flags,
            TieBreak::RootPreferring => {
                let mut ext = flags.clone();
                for i in 0..m {
                    if !ext[i] && root[i] == Cost::ZERO {
                        ext[i] = true;
                    }
                }
                if flags_value_max(root, leaf, &ext) == best_val {
                    ext
                } else {
                    flags
                }
            }
        };
        best = match best {
            Some(b) if !tie.prefers_flags(&chosen, &b) => Some(b),
            _ => Some(chosen),
        };
    }
    best.expect("shortlist contains the minimum")
}

pub(crate) fn fast_sum_root_set(root: &[Cost], leaf: &[Cost], tie: TieBreak) -> Vec<bool> {
    if root.iter().zip(leaf).any(|(r, l)| r.is_infinite() && l.is_infinite()) {
        // every candidate is infinite
        return extreme_set(root.len(), tie);
    }
    root.iter()
        .zip(leaf)
        .map(|(r, l)| match tie {
            TieBreak::RootPreferring => r <= l,
            TieBreak::LeafPreferring => r < l,
        })
        .collect()
}

/// Threshold on the root's bid for one task: below it the root gets the task,
/// above it the leaf does.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalValue(pub f64);

impl CriticalValue {
    pub fn get(self) -> f64 {
        self.0
    }
}

/// `min_{T not containing i} {r(T)+g_T} - min_{T containing i} {r(T-i)+g_T}`.
///
/// When both minima are infinite the value is 0; when only the first is, it is `+inf`.
pub(crate) fn critical_value_raw(root: &[Cost], leaf: &[Cost], g: &GFunction, i: usize) -> CriticalValue {
    let m = root.len();
    let mut without = Cost::INFINITY;
    let mut with = Cost::INFINITY;
    for t in TaskSet::all(m) {
        if t.contains(i) {
            let v = root_sum(root, t.remove(i)) + g.eval(t, leaf);
            with = with.min(v);
        } else {
            without = without.min(subset_value(root, leaf, g, t));
        }
    }
    if with.is_infinite() {
        CriticalValue(if without.is_infinite() { 0.0 } else { f64::INFINITY })
    } else {
        CriticalValue(without.get() - with.get())
    }
}

pub fn critical_value(inst: &StarInstance, g: &GFunction, i: usize) -> Result<CriticalValue> {
    if i >= inst.m() {
        return Err(crate::error::invalid(format!("task {i} out of range 0..{}", inst.m())));
    }
    check_enum_capacity(inst.m(), default_enum_limit(), "critical value")?;
    Ok(critical_value_raw(inst.root_costs(), inst.leaf_costs(), g, i))
}

/// Largest leaf bid with which leaf `i` still gets its task (minimization).
pub(crate) fn leaf_threshold_min(
    root: &[Cost],
    leaf: &[Cost],
    g: &GFunction,
    tie: TieBreak,
    i: usize,
) -> Cost {
    if !g.has_closed_form() {
        return bisect_leaf_threshold(leaf, i, Sense::Minimize, |probe| {
            !argmin_exhaustive(root, probe, g, tie).0.contains(i)
        });
    }
    let m = root.len();
    let budget_total = TaskSet::all(m)
        .filter(|t| t.contains(i))
        .map(|t| subset_value(root, leaf, g, t))
        .min()
        .expect("the full set contains i");
    if budget_total.is_infinite() {
        return Cost::INFINITY;
    }
    let rivals = tied_sets(root, leaf, g, i, budget_total);
    let mut probe = leaf.to_vec();
    probe[i] = Cost::ZERO;
    let mut best: Option<Cost> = None;
    for t in TaskSet::all(m).filter(|t| !t.contains(i)) {
        let rt = root_sum(root, t);
        if rt > budget_total {
            continue;
        }
        // a set that loses ties against the rivals must be strictly cheaper
        let at_zero = rt + g.eval(t, &probe);
        if !rivals.iter().all(|&r| tie.prefers(t, r)) && at_zero >= budget_total {
            continue;
        }
        if let Some(x) = g.leaf_sup(t, leaf, i, budget_total.saturating_sub(rt)) {
            best = Some(best.map_or(x, |b| b.max(x)));
        }
    }
    best.unwrap_or(Cost::ZERO)
}

/// Sets containing `i` whose value equals `c`.
fn tied_sets(root: &[Cost], leaf: &[Cost], g: &GFunction, i: usize, c: Cost) -> Vec<TaskSet> {
    TaskSet::all(root.len())
        .filter(|t| t.contains(i) && subset_value(root, leaf, g, *t) == c)
        .collect()
}

/// Smallest leaf value with which leaf `i` gets its task (maximization).
pub(crate) fn leaf_threshold_max(
    root: &[Cost],
    leaf: &[Cost],
    g: &GFunction,
    tie: TieBreak,
    i: usize,
) -> Cost {
    if !g.has_closed_form() {
        return bisect_leaf_threshold(leaf, i, Sense::Maximize, |probe| {
            !argmax_exhaustive(root, probe, g, tie).0.contains(i)
        });
    }
    let m = root.len();
    let with = TaskSet::all(m)
        .filter(|t| t.contains(i))
        .map(|t| subset_value(root, leaf, g, t))
        .max()
        .expect("the full set contains i");
    if with.is_infinite() {
        return Cost::INFINITY;
    }
    let rivals = tied_sets(root, leaf, g, i, with);
    let mut probe = leaf.to_vec();
    probe[i] = Cost::ZERO;
    let mut best = Cost::INFINITY;
    for t in TaskSet::all(m).filter(|t| !t.contains(i)) {
        let rt = root_sum(root, t);
        let at_zero = rt + g.eval(t, &probe);
        // a set that loses ties against the rivals must be strictly better
        if at_zero == with && !rivals.iter().all(|&r| tie.prefers(t, r)) {
            if let GFunction::MaxLeaf = g {
                // flat until the bid passes the largest other leaf outside t
                let h = (0..m).filter(|&j| j != i && !t.contains(j)).map(|j| leaf[j]).max();
                best = best.min(h.unwrap_or(Cost::ZERO));
            } else {
                best = best.min(Cost::ZERO);
            }
            continue;
        }
        if let Some(x) = g.leaf_inf(t, leaf, i, with.saturating_sub(rt)) {
            best = best.min(x);
        }
    }
    best
}

/// Critical bid of a single-parameter player found by bisection on a black-box
/// win predicate. Returns `inf` when the player wins at every probed bid.
pub(crate) fn bisect_leaf_threshold(
    leaf: &[Cost],
    i: usize,
    sense: Sense,
    wins: impl Fn(&[Cost]) -> bool,
) -> Cost {
    let mut probe = leaf.to_vec();
    let mut at = |x: f64| {
        probe[i] = Cost::of(x);
        wins(&probe)
    };
    let scale = leaf.iter().filter(|c| c.is_finite()).map(|c| c.get()).fold(1.0, f64::max);
    let mut lo = 0.0;
    let mut hi = 2.0 * scale;
    // minimization: wins below the threshold; maximization: wins above it
    let winning_side_low = sense == Sense::Minimize;
    if winning_side_low != at(lo) {
        return Cost::ZERO;
    }
    while at(hi) == winning_side_low {
        hi *= 2.0;
        if hi > 1e15 {
            return Cost::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid) == winning_side_low {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Cost::of(0.5 * (lo + hi))
}

/// Root and leaf payments of the minimization Hybrid rule on star-shaped data.
/// Index 0 is the root, index `j + 1` the leaf of task `j`.
pub(crate) fn hybrid_min_payments(
    root: &[Cost],
    leaf: &[Cost],
    g: &GFunction,
    tie: TieBreak,
    root_set: &[bool],
) -> Vec<f64> {
    let m = root.len();
    let s = TaskSet::from_flags(root_set);
    let mut out = vec![0.0; m + 1];
    out[0] = difference(g.eval(TaskSet::EMPTY, leaf), g.eval(s, leaf));
    for j in 0..m {
        if !root_set[j] {
            out[j + 1] = leaf_threshold_min(root, leaf, g, tie, j).get();
        }
    }
    out
}

/// Hybrid rule on stars with a configurable offset family and tie order.
#[derive(Clone, Debug)]
pub struct HybridStar {
    pub g: GFunction,
    pub tie: TieBreak,
    pub enum_limit: usize,
}

impl HybridStar {
    pub fn new(g: GFunction, tie: TieBreak) -> Self {
        HybridStar {
            g,
            tie,
            enum_limit: default_enum_limit(),
        }
    }

    pub fn with_enum_limit(mut self, limit: usize) -> Self {
        self.enum_limit = limit;
        self
    }
}

impl Mechanism for HybridStar {
    fn name(&self) -> String {
        match &self.g {
            GFunction::MaxLeaf => "hybrid-max".into(),
            GFunction::LpLeaf(p) => format!("hybrid-lp(p={p})"),
            GFunction::SumLeaf => "hybrid-sum".into(),
            GFunction::Custom { name, .. } => format!("hybrid[{name}]"),
        }
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        let star = inst.as_star().ok_or_else(|| inapplicable(&self.name(), inst))?;
        let flags =
            hybrid_star_root_set(star.root_costs(), star.leaf_costs(), &self.g, self.tie, self.enum_limit)?;
        Ok(Allocation::from_root_set(&flags))
    }

    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector> {
        let star = inst.as_star().ok_or_else(|| inapplicable(&self.name(), inst))?;
        alloc.validate(inst)?;
        check_enum_capacity(star.m(), self.enum_limit, "hybrid payments")?;
        Ok(PaymentVector {
            sense: Sense::Minimize,
            amounts: hybrid_min_payments(star.root_costs(), star.leaf_costs(), &self.g, self.tie, &alloc.root_set()),
        })
    }
}
