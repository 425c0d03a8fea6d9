//! Black-box truthfulness checks.
//!
//! Mechanisms are audited through [`Mechanism::allocate`] and
//! [`Mechanism::payments`] only. Every failing report carries one replayable
//! [`Counterexample`]: the truthful instance, the player and its deviation.

mod battery;
mod fixtures;
mod psi;

pub use battery::{exhaustive_battery, find_locality_witness, random_battery, Checks, RandomScope, Shape};
pub use fixtures::{example_family, inverse_leaf_family, AntiMonotone, FnRule, ZeroPayments};
pub use psi::{
    check_condition_c, check_decreasing_set_function, check_psi_monotone, check_psi_nonnegative, check_psi_threshold,
    PsiMonotonicity, PsiProfile,
};

use serde::Serialize;

use crate::allocation::Allocation;
use crate::cost::Cost;
use crate::error::{structural, Result};
use crate::instance::SchedulingInstance;
use crate::instances::InstanceFile;
use crate::mechanisms::Mechanism;
use crate::objective::Sense;

/// Absolute tolerance of every inequality checked here.
pub const TOLERANCE: f64 = 1e-9;

/// Default perturbation size for [`check_perturbation_lemma`].
pub const PERTURBATION: f64 = 1e-6;

/// The per-coordinate deviation grid `{0, 0.5, ..., 3}`.
pub const DEFAULT_GRID: [f64; 7] = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

/// A replayable violation: run the mechanism on `instance` and on `instance`
/// with `player` reporting `deviation` instead of `truthful`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub instance: serde_json::Value,
    pub player: usize,
    pub truthful: Vec<Cost>,
    pub deviation: Vec<Cost>,
    pub observed: String,
}

impl Counterexample {
    pub fn new(
        inst: &SchedulingInstance,
        player: usize,
        truthful: Vec<Cost>,
        deviation: Vec<Cost>,
        observed: impl Into<String>,
    ) -> Self {
        let text = InstanceFile::new(inst.clone(), None).to_json();
        Counterexample {
            instance: serde_json::from_str(&text).expect("instance files are valid JSON"),
            player,
            truthful,
            deviation,
            observed: observed.into(),
        }
    }

    /// The truthful instance, parsed back from the transcript.
    pub fn replay_instance(&self) -> Result<SchedulingInstance> {
        Ok(InstanceFile::from_json(&self.instance.to_string())?.instance)
    }

    /// The same instance with the deviation applied.
    pub fn replay_deviation(&self) -> Result<SchedulingInstance> {
        self.replay_instance()?.with_player_bids(self.player, &self.deviation)
    }
}

/// Outcome of one property over many trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub property: String,
    pub mechanism: String,
    pub passed: bool,
    pub trials: u64,
    pub violations: u64,
    /// Trials where the property does not apply (for example nothing to perturb).
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Informational remark, used by probes that never fail.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn new(property: impl Into<String>, mechanism: impl Into<String>) -> Self {
        VerificationReport {
            property: property.into(),
            mechanism: mechanism.into(),
            passed: true,
            trials: 0,
            violations: 0,
            skipped: 0,
            counterexample: None,
            note: None,
        }
    }

    pub fn pass(&mut self) {
        self.trials += 1;
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    /// Records a violation; only the first counterexample is kept.
    pub fn fail(&mut self, witness: impl FnOnce() -> Counterexample) {
        self.trials += 1;
        self.violations += 1;
        self.passed = false;
        if self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    /// Adds the trials of `other`, keeping the earlier counterexample.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.trials += other.trials;
        self.violations += other.violations;
        self.skipped += other.skipped;
        self.passed &= other.passed;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        if self.note.is_none() {
            self.note = other.note;
        }
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut out = format!(
            "{status} {} [{}]: {} trials, {} violations",
            self.property, self.mechanism, self.trials, self.violations
        );
        if self.skipped > 0 {
            out.push_str(&format!(", {} skipped", self.skipped));
        }
        if let Some(note) = &self.note {
            out.push_str(&format!(" ({note})"));
        }
        out
    }
}

/// Positions (in [`SchedulingInstance::player_tasks`] order) of the tasks `player` holds.
pub(crate) fn bundle_mask(inst: &SchedulingInstance, alloc: &Allocation, player: usize) -> u64 {
    inst.player_tasks(player)
        .iter()
        .enumerate()
        .filter(|(_, &t)| alloc.machine_of(t) == player)
        .fold(0, |mask, (k, _)| mask | 1 << k)
}

pub(crate) fn bundle_value(bids: &[Cost], mask: u64) -> Cost {
    (0..bids.len()).filter(|&k| mask >> k & 1 == 1).map(|k| bids[k]).sum()
}

/// The weak-monotonicity inequality for bundles `x` (under `t`) and `x2` (under `t2`),
/// with the tasks held in both cancelled out.
pub(crate) fn wmon_holds(sense: Sense, t: &[Cost], t2: &[Cost], x: u64, x2: u64) -> bool {
    let d = |k: usize| {
        let (a, b) = (t[k].get(), t2[k].get());
        if a == b {
            0.0
        } else {
            a - b
        }
    };
    let lhs: f64 = (0..t.len()).filter(|&k| x >> k & 1 == 1 && x2 >> k & 1 == 0).map(d).sum();
    let rhs: f64 = (0..t.len()).filter(|&k| x2 >> k & 1 == 1 && x >> k & 1 == 0).map(d).sum();
    if lhs.is_nan() || rhs.is_nan() {
        return true;
    }
    match sense {
        Sense::Minimize => lhs <= rhs + TOLERANCE,
        Sense::Maximize => lhs >= rhs - TOLERANCE,
    }
}

pub(crate) fn utility(sense: Sense, payment: f64, true_bids: &[Cost], mask: u64) -> f64 {
    let v = bundle_value(true_bids, mask).get();
    let u = match sense {
        Sense::Minimize => payment - v,
        Sense::Maximize => v - payment,
    };
    if u.is_nan() {
        0.0
    } else {
        u
    }
}

fn bits(mask: u64, len: usize) -> String {
    (0..len).map(|k| if mask >> k & 1 == 1 { '1' } else { '0' }).collect()
}

/// Weak monotonicity for one pair of reports `t`, `t2` of `player`.
pub fn check_wmon(
    mech: &dyn Mechanism,
    inst: &SchedulingInstance,
    player: usize,
    t: &[Cost],
    t2: &[Cost],
) -> Result<VerificationReport> {
    let i1 = inst.with_player_bids(player, t)?;
    let i2 = inst.with_player_bids(player, t2)?;
    let x = bundle_mask(&i1, &mech.allocate(&i1)?, player);
    let x2 = bundle_mask(&i2, &mech.allocate(&i2)?, player);
    let mut report = VerificationReport::new("wmon", mech.name());
    if wmon_holds(mech.sense(), t, t2, x, x2) {
        report.pass();
    } else {
        report.fail(|| {
            Counterexample::new(
                &i1,
                player,
                t.to_vec(),
                t2.to_vec(),
                format!("bundle {} under truthful bids, {} under deviation", bits(x, t.len()), bits(x2, t.len())),
            )
        });
    }
    Ok(report)
}

/// Bids `eps` better on the held tasks and `eps` worse elsewhere; `None` when some
/// coordinate cannot move strictly (infinite, or zero and required to drop).
pub(crate) fn perturbed_bids(sense: Sense, bids: &[Cost], mask: u64, eps: f64) -> Option<Vec<Cost>> {
    let down = |v: f64| {
        if v <= 0.0 {
            None
        } else if v > eps {
            Some(v - eps)
        } else {
            Some(v / 2.0)
        }
    };
    bids.iter()
        .enumerate()
        .map(|(k, c)| {
            if c.is_infinite() {
                return None;
            }
            let held = mask >> k & 1 == 1;
            let lower = held == (sense == Sense::Minimize);
            let v = if lower { down(c.get())? } else { c.get() + eps };
            Some(Cost::of(v))
        })
        .collect()
}

/// Makes `player`'s held tasks `eps` more attractive and the others `eps` less
/// attractive, and checks that its bundle does not change.
pub fn check_perturbation_lemma(
    mech: &dyn Mechanism,
    inst: &SchedulingInstance,
    player: usize,
    eps: f64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("perturbation", mech.name());
    let bids = inst.player_bids(player);
    let x = bundle_mask(inst, &mech.allocate(inst)?, player);
    let Some(moved) = perturbed_bids(mech.sense(), &bids, x, eps) else {
        report.skip();
        return Ok(report);
    };
    let i2 = inst.with_player_bids(player, &moved)?;
    let x2 = bundle_mask(&i2, &mech.allocate(&i2)?, player);
    if x == x2 {
        report.pass();
    } else {
        report.fail(|| {
            Counterexample::new(
                inst,
                player,
                bids.clone(),
                moved.clone(),
                format!("bundle {} became {}", bits(x, bids.len()), bits(x2, bids.len())),
            )
        });
    }
    Ok(report)
}

/// Truthful utility of `player` against each deviation in `deviations`.
pub fn check_truthful_utilities(
    mech: &dyn Mechanism,
    inst: &SchedulingInstance,
    player: usize,
    deviations: &[Vec<Cost>],
) -> Result<VerificationReport> {
    let sense = mech.sense();
    let truth = inst.player_bids(player);
    let (a, p) = mech.run(inst)?;
    let u_truth = utility(sense, p.amounts[player], &truth, bundle_mask(inst, &a, player));
    let mut report = VerificationReport::new("utilities", mech.name());
    for dev in deviations {
        let i2 = inst.with_player_bids(player, dev)?;
        let (a2, p2) = mech.run(&i2)?;
        let u_dev = utility(sense, p2.amounts[player], &truth, bundle_mask(&i2, &a2, player));
        if u_dev <= u_truth + TOLERANCE {
            report.pass();
        } else {
            report.fail(|| {
                Counterexample::new(
                    inst,
                    player,
                    truth.clone(),
                    dev.clone(),
                    format!("utility {u_truth} when truthful, {u_dev} when deviating"),
                )
            });
        }
    }
    Ok(report)
}

/// Locality probe. The report fails (informationally) when `player`'s bundle is the
/// same under `t` and `t2` while somebody else's bundle changes.
pub fn check_locality(
    mech: &dyn Mechanism,
    inst: &SchedulingInstance,
    player: usize,
    t: &[Cost],
    t2: &[Cost],
) -> Result<VerificationReport> {
    let i1 = inst.with_player_bids(player, t)?;
    let i2 = inst.with_player_bids(player, t2)?;
    let a1 = mech.allocate(&i1)?;
    let a2 = mech.allocate(&i2)?;
    let mut report = VerificationReport::new("locality", mech.name());
    let own_same = bundle_mask(&i1, &a1, player) == bundle_mask(&i2, &a2, player);
    let moved = (0..inst.num_tasks()).find(|&task| a1.machine_of(task) != a2.machine_of(task));
    match moved {
        Some(task) if own_same => {
            report.fail(|| {
                Counterexample::new(
                    &i1,
                    player,
                    t.to_vec(),
                    t2.to_vec(),
                    format!(
                        "own bundle unchanged but task {task} moved from machine {} to {}",
                        a1.machine_of(task),
                        a2.machine_of(task)
                    ),
                )
            });
            report.note = Some("non-local".into());
        }
        _ => report.pass(),
    }
    Ok(report)
}

/// Leaf monotonicity over a bid grid: if a single-task player wins with some bid,
/// it also wins with every better bid on the grid.
pub fn check_leaf_monotone(
    mech: &dyn Mechanism,
    inst: &SchedulingInstance,
    player: usize,
    grid: &[f64],
) -> Result<VerificationReport> {
    if !inst.is_single_parameter(player) || inst.as_graph().is_some() {
        return Err(structural(format!("player {player} is not a star or hyperstar leaf")));
    }
    let mut bids: Vec<f64> = grid.to_vec();
    bids.sort_by(f64::total_cmp);
    bids.dedup();
    let wins = bids
        .iter()
        .map(|&b| {
            let i2 = inst.with_player_bids(player, &[Cost::new(b)?])?;
            Ok(bundle_mask(&i2, &mech.allocate(&i2)?, player) == 1)
        })
        .collect::<Result<Vec<bool>>>()?;
    let mut report = VerificationReport::new("leaf-monotone", mech.name());
    // minimization: winners form a prefix of the ascending grid; maximization: a suffix
    let better_first: Vec<usize> = match mech.sense() {
        Sense::Minimize => (0..bids.len()).collect(),
        Sense::Maximize => (0..bids.len()).rev().collect(),
    };
    let mut lost_at: Option<usize> = None;
    for &k in &better_first {
        match (wins[k], lost_at) {
            (true, Some(j)) => report.fail(|| {
                Counterexample::new(
                    inst,
                    player,
                    vec![Cost::of(bids[k])],
                    vec![Cost::of(bids[j])],
                    format!("wins with bid {} but loses with the better bid {}", bids[k], bids[j]),
                )
            }),
            (false, None) => {
                lost_at = Some(k);
                report.pass();
            }
            _ => report.pass(),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::StarInstance;
    use crate::mechanisms::{GFunction, HybridStar, TieBreak, Vcg};

    fn star(r: &[f64], l: &[f64]) -> SchedulingInstance {
        StarInstance::from_f64(r, l).unwrap().into()
    }

    fn c(v: &[f64]) -> Vec<Cost> {
        v.iter().map(|&x| Cost::of(x)).collect()
    }

    #[test]
    fn anti_monotone_fixture_breaks_wmon() {
        let inst = star(&[0.5], &[1.0]);
        let r = check_wmon(&AntiMonotone, &inst, 0, &c(&[0.5]), &c(&[1.5])).unwrap();
        assert!(!r.passed);
        let ce = r.counterexample.unwrap();
        assert_eq!(ce.truthful, c(&[0.5]));
        assert_eq!(ce.deviation, c(&[1.5]));
        assert_eq!(ce.replay_instance().unwrap(), inst);

        let same = check_wmon(&AntiMonotone, &inst, 0, &c(&[0.5]), &c(&[0.5])).unwrap();
        assert!(same.passed);
    }

    #[test]
    fn perturbation_lemma() {
        let hybrid = HybridStar::new(GFunction::MaxLeaf, TieBreak::RootPreferring);
        let inst = star(&[1.0, 2.0, 0.3], &[2.0, 4.0, 0.1]);
        for p in 0..4 {
            assert!(check_perturbation_lemma(&hybrid, &inst, p, PERTURBATION).unwrap().passed);
            assert!(check_perturbation_lemma(&Vcg, &inst, p, PERTURBATION).unwrap().passed);
        }
        let r = check_perturbation_lemma(&AntiMonotone, &star(&[1.0], &[3.0]), 0, PERTURBATION).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn utilities_and_negative_control() {
        let hybrid = HybridStar::new(GFunction::MaxLeaf, TieBreak::RootPreferring);
        let inst = star(&[1.0, 1.5], &[2.0, 1.0]);
        let devs: Vec<Vec<Cost>> = DEFAULT_GRID.iter().map(|&x| c(&[x])).collect();
        assert!(check_truthful_utilities(&hybrid, &inst, 2, &devs).unwrap().passed);
        let zero = ZeroPayments::new(hybrid);
        assert!(!check_truthful_utilities(&zero, &inst, 2, &devs).unwrap().passed);
    }

    #[test]
    fn locality_probe() {
        let hybrid = HybridStar::new(GFunction::MaxLeaf, TieBreak::RootPreferring);
        let inst = star(&[1.0, 5.0], &[1.5, 4.0]);
        let r = check_locality(&hybrid, &inst, 2, &c(&[4.0]), &c(&[0.0])).unwrap();
        assert!(!r.passed);
        assert_eq!(r.note.as_deref(), Some("non-local"));
        let v = check_locality(&Vcg, &inst, 2, &c(&[4.0]), &c(&[0.0])).unwrap();
        assert!(v.passed);
    }

    #[test]
    fn leaf_monotone_and_zero_bid_tie() {
        let hybrid = HybridStar::new(GFunction::MaxLeaf, TieBreak::RootPreferring);
        let inst = star(&[1.0, 2.0], &[2.0, 4.0]);
        assert!(check_leaf_monotone(&hybrid, &inst, 1, &DEFAULT_GRID).unwrap().passed);
        // psi = 0 against a zero leaf bid: the root-preferring order hands the task to the root
        let tie = star(&[0.0], &[0.0]);
        assert_eq!(hybrid.allocate(&tie).unwrap().assignment, vec![0]);
        let bad = HybridStar::new(inverse_leaf_family(), TieBreak::RootPreferring);
        assert!(!check_leaf_monotone(&bad, &star(&[1.0], &[1.0]), 1, &DEFAULT_GRID).unwrap().passed);
    }
}
