//! Exhaustive grid sweeps and seeded random sweeps over small stars and hyperstars.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cost::Cost;
use crate::error::{invalid, Error, Result};
use crate::instance::{HyperstarInstance, SchedulingInstance, StarInstance};
use crate::mechanisms::Mechanism;
use crate::objective::Sense;

use super::{
    bits, bundle_mask, perturbed_bids, utility, wmon_holds, Counterexample, VerificationReport, PERTURBATION,
    TOLERANCE,
};

/// Largest number of mechanism runs a single exhaustive sweep may take.
const SWEEP_CAPACITY: u128 = 1 << 26;

/// Which properties a battery checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub wmon: bool,
    pub utilities: bool,
    pub perturbation: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            wmon: true,
            utilities: true,
            perturbation: true,
        }
    }
}

/// Instance shape of a sweep. Bids are laid out as a flat coordinate vector:
/// root bids first (root by root), then one coordinate per leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Star { m: usize },
    Hyperstar { k: usize, m: usize },
}

impl Shape {
    fn roots(self) -> usize {
        match self {
            Shape::Star { .. } => 1,
            Shape::Hyperstar { k, .. } => k,
        }
    }

    fn m(self) -> usize {
        match self {
            Shape::Star { m } | Shape::Hyperstar { m, .. } => m,
        }
    }

    fn coords(self) -> usize {
        (self.roots() + 1) * self.m()
    }

    fn players(self) -> usize {
        self.roots() + self.m()
    }

    fn player_coords(self, player: usize) -> Vec<usize> {
        let (k, m) = (self.roots(), self.m());
        if player < k {
            (player * m..(player + 1) * m).collect()
        } else {
            vec![k * m + player - k]
        }
    }

    fn build(self, coords: &[Cost]) -> Result<SchedulingInstance> {
        let (k, m) = (self.roots(), self.m());
        let leaf = coords[k * m..].to_vec();
        Ok(match self {
            Shape::Star { .. } => StarInstance::new(coords[..m].to_vec(), leaf)?.into(),
            Shape::Hyperstar { .. } => {
                let roots = (0..k).map(|h| coords[h * m..(h + 1) * m].to_vec()).collect();
                HyperstarInstance::new(roots, leaf)?.into()
            }
        })
    }
}

struct Outcome {
    bids: Vec<Cost>,
    mask: u64,
    pay: f64,
}

fn outcome(mech: &dyn Mechanism, inst: &SchedulingInstance, player: usize, with_pay: bool) -> Result<Outcome> {
    let alloc = mech.allocate(inst)?;
    let pay = if with_pay {
        mech.payments(inst, &alloc)?.amounts[player]
    } else {
        0.0
    };
    Ok(Outcome {
        bids: inst.player_bids(player),
        mask: bundle_mask(inst, &alloc, player),
        pay,
    })
}

struct Tally {
    wmon: VerificationReport,
    utilities: VerificationReport,
    perturbation: VerificationReport,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            wmon: VerificationReport::new("wmon", name),
            utilities: VerificationReport::new("utilities", name),
            perturbation: VerificationReport::new("perturbation", name),
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.wmon.absorb(other.wmon);
        self.utilities.absorb(other.utilities);
        self.perturbation.absorb(other.perturbation);
    }

    fn finish(self, checks: Checks) -> Vec<VerificationReport> {
        let mut out = Vec::new();
        if checks.wmon {
            out.push(self.wmon);
        }
        if checks.utilities {
            out.push(self.utilities);
        }
        if checks.perturbation {
            out.push(self.perturbation);
        }
        out
    }
}

/// Compares two reports of one player: `a` is the truth, `b` the deviation.
fn compare_pair(
    tally: &mut Tally,
    sense: Sense,
    checks: Checks,
    truth_inst: &SchedulingInstance,
    player: usize,
    a: &Outcome,
    b: &Outcome,
) {
    let len = a.bids.len();
    if checks.wmon {
        if wmon_holds(sense, &a.bids, &b.bids, a.mask, b.mask) {
            tally.wmon.pass();
        } else {
            tally.wmon.fail(|| {
                Counterexample::new(
                    truth_inst,
                    player,
                    a.bids.clone(),
                    b.bids.clone(),
                    format!("bundle {} under truthful bids, {} under deviation", bits(a.mask, len), bits(b.mask, len)),
                )
            });
        }
    }
    if checks.utilities {
        let u_truth = utility(sense, a.pay, &a.bids, a.mask);
        let u_dev = utility(sense, b.pay, &a.bids, b.mask);
        if u_dev <= u_truth + TOLERANCE {
            tally.utilities.pass();
        } else {
            tally.utilities.fail(|| {
                Counterexample::new(
                    truth_inst,
                    player,
                    a.bids.clone(),
                    b.bids.clone(),
                    format!("utility {u_truth} when truthful, {u_dev} when deviating"),
                )
            });
        }
    }
}

fn perturb(
    tally: &mut Tally,
    mech: &dyn Mechanism,
    inst: &SchedulingInstance,
    player: usize,
    a: &Outcome,
) -> Result<()> {
    let Some(moved) = perturbed_bids(mech.sense(), &a.bids, a.mask, PERTURBATION) else {
        tally.perturbation.skip();
        return Ok(());
    };
    let i2 = inst.with_player_bids(player, &moved)?;
    let mask = bundle_mask(&i2, &mech.allocate(&i2)?, player);
    if mask == a.mask {
        tally.perturbation.pass();
    } else {
        let len = a.bids.len();
        tally.perturbation.fail(|| {
            Counterexample::new(
                inst,
                player,
                a.bids.clone(),
                moved,
                format!("bundle {} became {}", bits(a.mask, len), bits(mask, len)),
            )
        });
    }
    Ok(())
}

fn decode(mut index: usize, positions: &[usize], grid: &[Cost], coords: &mut [Cost]) {
    for &p in positions {
        coords[p] = grid[index % grid.len()];
        index /= grid.len();
    }
}

/// Every instance of `shape` with all bids on `grid`, every player, and every pair
/// of that player's grid reports. Reports come back in the order wmon, utilities,
/// perturbation (restricted to the enabled checks).
pub fn exhaustive_battery(
    mech: &dyn Mechanism,
    shape: Shape,
    grid: &[f64],
    checks: Checks,
) -> Result<Vec<VerificationReport>> {
    let grid: Vec<Cost> = grid.iter().map(|&x| Cost::new(x)).collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(invalid("the bid grid is empty"));
    }
    let n = shape.coords();
    let runs = (shape.players() as u128) * (grid.len() as u128).saturating_pow(n as u32);
    if runs > SWEEP_CAPACITY {
        return Err(Error::Capacity {
            what: "exhaustive verification sweep".into(),
            size: runs,
            limit: SWEEP_CAPACITY,
        });
    }
    let name = mech.name();
    let sense = mech.sense();
    let mut total = Tally::new(&name);
    for player in 0..shape.players() {
        let own = shape.player_coords(player);
        let others: Vec<usize> = (0..n).filter(|c| !own.contains(c)).collect();
        let contexts = grid.len().pow(others.len() as u32);
        let reports = grid.len().pow(own.len() as u32);
        let tallies: Vec<Result<Tally>> = (0..contexts)
            .into_par_iter()
            .map(|ctx| {
                let mut coords = vec![Cost::ZERO; n];
                decode(ctx, &others, &grid, &mut coords);
                let mut insts = Vec::with_capacity(reports);
                let mut outs = Vec::with_capacity(reports);
                for o in 0..reports {
                    decode(o, &own, &grid, &mut coords);
                    let inst = shape.build(&coords)?;
                    outs.push(outcome(mech, &inst, player, checks.utilities)?);
                    insts.push(inst);
                }
                let mut tally = Tally::new(&name);
                for a in 0..reports {
                    for b in (0..reports).filter(|&b| b != a) {
                        compare_pair(&mut tally, sense, checks, &insts[a], player, &outs[a], &outs[b]);
                    }
                    if checks.perturbation {
                        perturb(&mut tally, mech, &insts[a], player, &outs[a])?;
                    }
                }
                Ok(tally)
            })
            .collect();
        for t in tallies {
            total.absorb(t?);
        }
    }
    Ok(total.finish(checks))
}

/// Random sweep parameters: `m` uniform in `1..=max_m`, bids uniform in `[0, hi)`,
/// hyperstars with `roots` roots when `roots > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomScope {
    pub max_m: usize,
    pub roots: usize,
    pub hi: f64,
}

impl Default for RandomScope {
    fn default() -> Self {
        RandomScope {
            max_m: 6,
            roots: 1,
            hi: 4.0,
        }
    }
}

fn trial(
    mech: &dyn Mechanism,
    scope: RandomScope,
    checks: Checks,
    seed: u64,
    index: u64,
    name: &str,
) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let m = rng.gen_range(1..=scope.max_m);
    let shape = if scope.roots > 1 {
        Shape::Hyperstar { k: scope.roots, m }
    } else {
        Shape::Star { m }
    };
    let draw = |rng: &mut ChaCha8Rng| Cost::of(rng.gen_range(0.0..scope.hi));
    let coords: Vec<Cost> = (0..shape.coords()).map(|_| draw(&mut rng)).collect();
    let inst = shape.build(&coords)?;
    let player = rng.gen_range(0..shape.players());
    let dev: Vec<Cost> = shape.player_coords(player).iter().map(|_| draw(&mut rng)).collect();
    let inst2 = inst.with_player_bids(player, &dev)?;
    let a = outcome(mech, &inst, player, checks.utilities)?;
    let b = outcome(mech, &inst2, player, checks.utilities)?;
    let mut tally = Tally::new(name);
    compare_pair(&mut tally, mech.sense(), checks, &inst, player, &a, &b);
    if checks.perturbation {
        perturb(&mut tally, mech, &inst, player, &a)?;
    }
    Ok(tally)
}

/// `trials` seeded random instances, one random player and deviation each.
/// Results depend only on `seed`, not on thread scheduling.
pub fn random_battery(
    mech: &dyn Mechanism,
    scope: RandomScope,
    trials: u64,
    seed: u64,
    checks: Checks,
) -> Result<Vec<VerificationReport>> {
    if scope.max_m == 0 || scope.max_m > 16 || !(scope.hi.is_finite() && scope.hi > 0.0) {
        return Err(invalid(format!("unusable random scope {scope:?}")));
    }
    let name = mech.name();
    let tallies: Vec<Result<Tally>> = (0..trials)
        .into_par_iter()
        .map(|i| trial(mech, scope, checks, seed, i, &name))
        .collect();
    let mut total = Tally::new(&name);
    for t in tallies {
        total.absorb(t?);
    }
    Ok(total.finish(checks))
}

/// First grid instance (in enumeration order) where some player's report moves
/// another player's bundle without moving its own.
pub fn find_locality_witness(mech: &dyn Mechanism, shape: Shape, grid: &[f64]) -> Result<Option<Counterexample>> {
    let grid: Vec<Cost> = grid.iter().map(|&x| Cost::new(x)).collect::<Result<_>>()?;
    let n = shape.coords();
    let all: Vec<usize> = (0..n).collect();
    let total = grid.len().pow(n as u32);
    for idx in 0..total {
        let mut coords = vec![Cost::ZERO; n];
        decode(idx, &all, &grid, &mut coords);
        let inst = shape.build(&coords)?;
        let base = mech.allocate(&inst)?;
        for player in 0..shape.players() {
            let own = shape.player_coords(player);
            let truth = inst.player_bids(player);
            for o in 0..grid.len().pow(own.len() as u32) {
                let mut dev = truth.clone();
                decode(o, &(0..own.len()).collect::<Vec<_>>(), &grid, &mut dev);
                if dev == truth {
                    continue;
                }
                let i2 = inst.with_player_bids(player, &dev)?;
                let alloc = mech.allocate(&i2)?;
                let same_own = bundle_mask(&inst, &base, player) == bundle_mask(&i2, &alloc, player);
                if same_own && alloc != base {
                    return Ok(Some(Counterexample::new(
                        &inst,
                        player,
                        truth,
                        dev,
                        format!("assignment {:?} became {:?}", base.assignment, alloc.assignment),
                    )));
                }
            }
        }
    }
    Ok(None)
}
