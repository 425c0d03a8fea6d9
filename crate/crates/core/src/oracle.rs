//! Exhaustive ground truth for small instances.

use crate::allocation::Allocation;
use crate::cost::Cost;
use crate::decomposition::Orientation;
use crate::error::{Error, Result};
use crate::instance::{GraphInstance, SchedulingInstance, StarInstance};
use crate::mechanisms::GFunction;
use crate::objective::{Objective, Sense};
use crate::subset::TaskSet;

/// Largest assignment space the oracles will enumerate.
pub const ORACLE_CAPACITY: u128 = 1 << 24;

/// Number of complete assignments of `inst`.
pub fn search_space(inst: &SchedulingInstance) -> u128 {
    (0..inst.num_tasks())
        .map(|t| inst.eligible(t).len() as u128)
        .try_fold(1u128, |acc, c| acc.checked_mul(c))
        .unwrap_or(u128::MAX)
}

fn check_capacity(size: u128, what: &str) -> Result<()> {
    if size > ORACLE_CAPACITY {
        return Err(Error::Capacity {
            what: what.to_string(),
            size,
            limit: ORACLE_CAPACITY,
        });
    }
    Ok(())
}

struct Search {
    options: Vec<Vec<(usize, Cost)>>,
    obj: Objective,
    loads: Vec<Cost>,
    current: Vec<usize>,
    best: Option<(Vec<usize>, Cost)>,
    sense: Sense,
}

impl Search {
    fn improves(&self, v: Cost) -> bool {
        match (&self.best, self.sense) {
            (None, _) => true,
            (Some((_, b)), Sense::Minimize) => v < *b,
            (Some((_, b)), Sense::Maximize) => v > *b,
        }
    }

    fn run(&mut self, task: usize) {
        if task == self.options.len() {
            let v = self.obj.evaluate_loads(&self.loads);
            if self.improves(v) {
                self.best = Some((self.current.clone(), v));
            }
            return;
        }
        // loads only grow, and every objective is monotone in them
        if self.sense == Sense::Minimize {
            if let Some((_, b)) = &self.best {
                if self.obj.evaluate_loads(&self.loads) >= *b {
                    return;
                }
            }
        }
        for k in 0..self.options[task].len() {
            let (machine, cost) = self.options[task][k];
            let before = self.loads[machine];
            self.loads[machine] = before + cost;
            self.current[task] = machine;
            self.run(task + 1);
            self.loads[machine] = before;
        }
    }
}

/// Exact optimum by depth-first enumeration: task 0 first, eligible machines by
/// ascending id. Among equal values the first assignment in that order wins.
pub fn optimal_allocation(inst: &SchedulingInstance, obj: Objective) -> Result<(Allocation, Cost)> {
    let obj = obj.validate()?;
    check_capacity(search_space(inst), "oracle enumeration")?;
    let m = inst.num_tasks();
    let mut search = Search {
        options: (0..m).map(|t| inst.eligible(t)).collect(),
        obj,
        loads: vec![Cost::ZERO; inst.num_machines()],
        current: vec![0; m],
        best: None,
        sense: obj.sense(),
    };
    search.run(0);
    let (assignment, value) = search.best.expect("at least one assignment exists");
    Ok((Allocation::new(assignment), value))
}

/// Optimal makespan of a star in `O(m log m)`, valid for any `m`.
///
/// Some optimum gives the root exactly the tasks whose leaf bid exceeds a level
/// `h`, so scanning the distinct leaf levels plus "root takes all" is exact.
/// The returned allocation is an optimum but not necessarily the one
/// [`optimal_allocation`] picks.
pub fn star_makespan_optimum(inst: &StarInstance) -> (Allocation, Cost) {
    let m = inst.m();
    let (root, leaf) = (inst.root_costs(), inst.leaf_costs());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| leaf[b].cmp(&leaf[a]).then(a.cmp(&b)));
    let mut best_k = m;
    let mut best: Cost = root.iter().sum();
    let mut prefix = Cost::ZERO;
    let mut k = 0;
    while k < m {
        let level = leaf[order[k]];
        let v = prefix.max(level);
        if v < best {
            best = v;
            best_k = k;
        }
        while k < m && leaf[order[k]] == level {
            prefix += root[order[k]];
            k += 1;
        }
    }
    let mut flags = vec![false; m];
    for &i in &order[..best_k] {
        flags[i] = true;
    }
    (Allocation::from_root_set(&flags), best)
}

/// An approximation ratio, oriented so that it is at least 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratio {
    pub value: f64,
    /// Set when both values are zero (or both infinite) and the ratio is defined as 1 by convention.
    pub degenerate: bool,
}

/// `ALG / OPT` for minimization and `OPT / ALG` for maximization.
pub fn ratio(alg: Cost, opt: Cost, sense: Sense) -> Result<Ratio> {
    let (num, den) = match sense {
        Sense::Minimize => (alg, opt),
        Sense::Maximize => (opt, alg),
    };
    if num == den && (num == Cost::ZERO || num.is_infinite()) {
        return Ok(Ratio {
            value: 1.0,
            degenerate: true,
        });
    }
    if den == Cost::ZERO {
        return Err(Error::Degenerate(format!(
            "ratio {num} / 0 is undefined ({} is zero)",
            if sense == Sense::Minimize { "OPT" } else { "ALG" }
        )));
    }
    Ok(Ratio {
        value: num.get() / den.get(),
        degenerate: false,
    })
}

/// `o(G)` and a witness by trying all `2^m` orientations; the first optimum in mask order wins.
pub fn brute_force_orientation(g: &GraphInstance) -> Result<(usize, Orientation)> {
    check_capacity(1u128 << g.m().min(127), "orientation enumeration")?;
    let mut best: Option<(usize, Orientation)> = None;
    for mask in 0..1u64 << g.m() {
        let head = (0..g.m())
            .map(|e| if mask >> e & 1 == 1 { g.edge(e).u } else { g.edge(e).v })
            .collect();
        let o = Orientation { head };
        let d = o.max_in_degree(g.n());
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, o));
        }
    }
    Ok(best.expect("one orientation at least"))
}

/// `min_T r(T) + g_T(leaf)` over all subsets.
pub fn hybrid_minimum(inst: &StarInstance, g: &GFunction) -> Result<Cost> {
    check_capacity(1u128 << inst.m().min(127), "subset enumeration")?;
    Ok(TaskSet::all(inst.m())
        .map(|t| t.iter().map(|i| inst.root_costs()[i]).sum::<Cost>() + g.eval(t, inst.leaf_costs()))
        .min()
        .expect("the empty set is a candidate"))
}

/// `max_T r(T) + g_T(leaf)` over all subsets.
pub fn hybrid_maximum(inst: &StarInstance, g: &GFunction) -> Result<Cost> {
    check_capacity(1u128 << inst.m().min(127), "subset enumeration")?;
    Ok(TaskSet::all(inst.m())
        .map(|t| t.iter().map(|i| inst.root_costs()[i]).sum::<Cost>() + g.eval(t, inst.leaf_costs()))
        .max()
        .expect("the empty set is a candidate"))
}
