//! Checks on offset families and their critical values `psi`.

use serde::Serialize;

use crate::cost::Cost;
use crate::error::Result;
use crate::instance::{SchedulingInstance, StarInstance};
use crate::mechanisms::{critical_value, default_enum_limit, hybrid_star_root_set, GFunction, TieBreak};
use crate::subset::TaskSet;

use super::{Counterexample, VerificationReport, TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiMonotonicity {
    Strict,
    Monotone,
    Neither,
}

/// `psi_i` as leaf `i`'s bid walks the grid, other bids fixed.
#[derive(Clone, Debug, Serialize)]
pub struct PsiProfile {
    pub bids: Vec<f64>,
    pub psi: Vec<f64>,
    pub class: PsiMonotonicity,
    /// Fails when `psi_i` is not nondecreasing.
    pub report: VerificationReport,
}

fn sorted_grid(grid: &[f64]) -> Vec<f64> {
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn with_leaf(inst: &StarInstance, i: usize, x: f64) -> Result<StarInstance> {
    let mut leaf = inst.leaf_costs().to_vec();
    leaf[i] = Cost::new(x)?;
    inst.with_leaf_costs(leaf)
}

/// Classifies `psi_i` as a function of leaf `i`'s own bid over `grid`.
pub fn check_psi_monotone(g: &GFunction, inst: &StarInstance, i: usize, grid: &[f64]) -> Result<PsiProfile> {
    let bids = sorted_grid(grid);
    let psi = bids
        .iter()
        .map(|&x| Ok(critical_value(&with_leaf(inst, i, x)?, g, i)?.get()))
        .collect::<Result<Vec<f64>>>()?;
    let mut report = VerificationReport::new("psi-monotone", g.name());
    let mut strict = true;
    for k in 1..psi.len() {
        let (a, b) = (psi[k - 1], psi[k]);
        if a <= b + TOLERANCE || (a.is_infinite() && b.is_infinite()) {
            report.pass();
        } else {
            report.fail(|| {
                Counterexample::new(
                    &with_leaf(inst, i, bids[k - 1]).expect("grid bid was valid").into(),
                    i + 1,
                    vec![Cost::of(bids[k - 1])],
                    vec![Cost::of(bids[k])],
                    format!("psi_{i} drops from {a} to {b}"),
                )
            });
        }
        if (a + TOLERANCE).partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            strict = false;
        }
    }
    let class = if !report.passed {
        PsiMonotonicity::Neither
    } else if strict {
        PsiMonotonicity::Strict
    } else {
        PsiMonotonicity::Monotone
    };
    Ok(PsiProfile { bids, psi, class, report })
}

/// `psi_i >= 0` for every task of `inst`.
pub fn check_psi_nonnegative(g: &GFunction, inst: &StarInstance) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("psi-nonnegative", g.name());
    for i in 0..inst.m() {
        let psi = critical_value(inst, g, i)?.get();
        if psi >= -TOLERANCE {
            report.pass();
        } else {
            report.fail(|| {
                let bids = inst.root_costs().to_vec();
                Counterexample::new(&inst.clone().into(), 0, bids.clone(), bids, format!("psi_{i} = {psi}"))
            });
        }
    }
    Ok(report)
}

/// Moving root bid `r_i` to `psi_i - delta` gives task `i` to the root and moving it
/// to `psi_i + delta` gives it to the leaf. Sides that leave `[0, inf)` are skipped.
pub fn check_psi_threshold(
    g: &GFunction,
    tie: TieBreak,
    inst: &StarInstance,
    i: usize,
    delta: f64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("psi-threshold", g.name());
    let psi = critical_value(inst, g, i)?.get();
    for (bid, root_expected) in [(psi - delta, true), (psi + delta, false)] {
        if !bid.is_finite() || bid < 0.0 {
            report.skip();
            continue;
        }
        let mut root = inst.root_costs().to_vec();
        root[i] = Cost::of(bid);
        let flags = hybrid_star_root_set(&root, inst.leaf_costs(), g, tie, default_enum_limit())?;
        if flags[i] == root_expected {
            report.pass();
        } else {
            report.fail(|| {
                Counterexample::new(
                    &SchedulingInstance::from(inst.clone()),
                    0,
                    inst.root_costs().to_vec(),
                    root.clone(),
                    format!(
                        "root bid {bid} for task {i} against psi = {psi}: root {}",
                        if flags[i] { "wins" } else { "loses" }
                    ),
                )
            });
        }
    }
    Ok(report)
}

/// Every leaf vector with coordinates on `grid`.
fn leaf_vectors(m: usize, grid: &[f64]) -> Vec<Vec<Cost>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                grid.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(Cost::of(x));
                    w
                })
            })
            .collect();
    }
    out
}

fn leaf_witness(m: usize, leaf: &[Cost], i: usize, to: Cost, observed: String) -> Counterexample {
    let inst = StarInstance::new(vec![Cost::ZERO; m], leaf.to_vec()).expect("grid leaves are valid");
    Counterexample::new(&inst.into(), i + 1, vec![leaf[i]], vec![to], observed)
}

/// For every set `T` and leaf `i`: `g_T` is nondecreasing in `l_i` when `i` is
/// outside `T` and does not depend on `l_i` when `i` is inside.
pub fn check_condition_c(g: &GFunction, m: usize, grid: &[f64]) -> Result<VerificationReport> {
    let grid = sorted_grid(grid);
    let mut report = VerificationReport::new("condition-c", g.name());
    for leaf in leaf_vectors(m, &grid) {
        for i in 0..m {
            let Some(pos) = grid.iter().position(|&x| x == leaf[i].get()) else { continue };
            let Some(&next) = grid.get(pos + 1) else { continue };
            let mut up = leaf.clone();
            up[i] = Cost::of(next);
            for t in TaskSet::all(m) {
                let (a, b) = (g.eval(t, &leaf), g.eval(t, &up));
                let ok = if t.contains(i) {
                    a == b || (a.get() - b.get()).abs() <= TOLERANCE
                } else {
                    a <= b || a.get() <= b.get() + TOLERANCE
                };
                if ok {
                    report.pass();
                } else {
                    report.fail(|| {
                        leaf_witness(m, &leaf, i, up[i], format!("g_{t:?} moves from {a} to {b} as l_{i} rises"))
                    });
                }
            }
        }
    }
    Ok(report)
}

/// `g_T >= g_{T + j}` for every set, every `j` and every leaf vector on `grid`.
pub fn check_decreasing_set_function(g: &GFunction, m: usize, grid: &[f64]) -> Result<VerificationReport> {
    let grid = sorted_grid(grid);
    let mut report = VerificationReport::new("decreasing-set-function", g.name());
    for leaf in leaf_vectors(m, &grid) {
        for t in TaskSet::all(m) {
            for j in (0..m).filter(|&j| !t.contains(j)) {
                let bigger = t.insert(j);
                let (a, b) = (g.eval(t, &leaf), g.eval(bigger, &leaf));
                if a >= b || a.get() + TOLERANCE >= b.get() {
                    report.pass();
                } else {
                    report.fail(|| {
                        leaf_witness(m, &leaf, j, leaf[j], format!("g_{t:?} = {a} < g_{bigger:?} = {b}"))
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{example_family, inverse_leaf_family, DEFAULT_GRID};

    fn star(r: &[f64], l: &[f64]) -> StarInstance {
        StarInstance::from_f64(r, l).unwrap()
    }

    #[test]
    fn shipped_families_pass() {
        for g in [GFunction::MaxLeaf, GFunction::LpLeaf(2.0), GFunction::LpLeaf(0.5), GFunction::SumLeaf] {
            assert!(check_condition_c(&g, 3, &DEFAULT_GRID).unwrap().passed);
            assert!(check_decreasing_set_function(&g, 3, &DEFAULT_GRID).unwrap().passed);
            let s = star(&[1.0, 2.0, 0.5], &[2.0, 4.0, 1.0]);
            assert!(check_psi_nonnegative(&g, &s).unwrap().passed);
            for i in 0..3 {
                assert!(check_psi_threshold(&g, TieBreak::RootPreferring, &s, i, 1e-6).unwrap().passed);
                let prof = check_psi_monotone(&g, &s, i, &DEFAULT_GRID).unwrap();
                assert_ne!(prof.class, PsiMonotonicity::Neither, "{}", g.name());
            }
        }
    }

    #[test]
    fn example_family_is_flat() {
        let g = example_family();
        let s = star(&[1.0, 0.7], &[1.0, 2.0]);
        let grid = [0.25, 0.5, 1.0, 2.0, 3.0];
        let prof = check_psi_monotone(&g, &s, 0, &grid).unwrap();
        assert_eq!(prof.class, PsiMonotonicity::Monotone);
        assert!(prof.psi.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(!check_condition_c(&g, 2, &grid).unwrap().passed);
        assert!(check_decreasing_set_function(&g, 2, &grid).unwrap().passed);
    }

    #[test]
    fn inverse_family_is_not_monotone() {
        let g = inverse_leaf_family();
        let prof = check_psi_monotone(&g, &star(&[1.0], &[1.0]), 0, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(prof.class, PsiMonotonicity::Neither);
        assert!(prof.report.counterexample.is_some());
    }
}
