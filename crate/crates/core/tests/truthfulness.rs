use gbmech::mechanisms::{
    AllOrNothing, CombinedMax, DecompositionSource, HybridHyperstar, HybridLpMax, HybridStar, StarCover, Vcg,
};
use gbmech::verify::{random_battery, Checks, RandomScope};
use gbmech::{GFunction, Mechanism, TieBreak};

fn assert_clean(mech: &dyn Mechanism, scope: RandomScope, trials: u64) {
    for r in random_battery(mech, scope, trials, 2024, Checks::default()).unwrap() {
        assert!(r.passed, "{} {:?}", r.line(), r.counterexample);
        assert!(r.trials + r.skipped >= trials);
    }
}

#[test]
fn hybrid_max_survives_many_random_trials() {
    let hybrid = HybridStar::new(GFunction::MaxLeaf, TieBreak::RootPreferring);
    assert_clean(&hybrid, RandomScope::default(), 100_000);
}

#[test]
fn shipped_star_mechanisms_survive_random_trials() {
    let tie = TieBreak::RootPreferring;
    let mechs: Vec<Box<dyn Mechanism>> = vec![
        Box::new(Vcg),
        Box::new(HybridStar::new(GFunction::LpLeaf(2.0), tie)),
        Box::new(HybridStar::new(GFunction::LpLeaf(0.5), tie)),
        Box::new(HybridLpMax::new(2.0, tie).unwrap()),
        Box::new(AllOrNothing::new(3.0).unwrap()),
        Box::new(CombinedMax::new(2.0).unwrap()),
        Box::new(StarCover::new(GFunction::MaxLeaf, tie, DecompositionSource::Orientation)),
        Box::new(HybridHyperstar::new(GFunction::MaxLeaf, tie)),
    ];
    for m in &mechs {
        assert_clean(m.as_ref(), RandomScope::default(), 20_000);
    }
}

#[test]
fn hyperstar_mechanisms_survive_random_trials() {
    let scope = RandomScope {
        max_m: 5,
        roots: 3,
        hi: 4.0,
    };
    assert_clean(&Vcg, scope, 20_000);
    assert_clean(&HybridHyperstar::new(GFunction::MaxLeaf, TieBreak::RootPreferring), scope, 20_000);
}
