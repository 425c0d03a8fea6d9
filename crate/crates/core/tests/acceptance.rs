//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::time::Instant;

use gbmech::decomposition::{
    contention_number, degeneracy_ordering, orientation_number, star_cover_from_ordering,
    star_cover_from_orientation,
};
use gbmech::instances::{
    gen_local_lb, gen_lp_small_lb, gen_lp_small_lb_deviation, gen_max_lb, gen_max_lb_deviation, gen_random,
    gen_random_with, gen_star_lb, lp_small_bound, CostDistribution, RandomKind, PHI,
};
use gbmech::mechanisms::{
    hybrid_star_allocate_exhaustive, hybrid_star_allocate_fast_max, AllOrNothing, CombinedMax, DecompositionSource,
    HybridHyperstar, HybridLpMax, HybridStar, StarCover, Vcg,
};
use gbmech::oracle::{brute_force_orientation, optimal_allocation, ratio, star_makespan_optimum};
use gbmech::verify::{
    check_condition_c, check_psi_monotone, check_psi_nonnegative, check_psi_threshold, exhaustive_battery,
    example_family, AntiMonotone, Checks, PsiMonotonicity, Shape, DEFAULT_GRID,
};
use gbmech::{
    objective_value, Allocation, GFunction, GraphInstance, Mechanism, Objective, SchedulingInstance, StarInstance,
    TieBreak,
};
use rayon::prelude::*;

type Outcome = std::result::Result<String, String>;

const TOL: f64 = 1e-9;

fn ratio_of(mech: &dyn Mechanism, inst: &SchedulingInstance, obj: Objective) -> Result<f64, String> {
    let alloc = mech.allocate(inst).map_err(|e| e.to_string())?;
    let alg = objective_value(inst, &alloc, obj).map_err(|e| e.to_string())?;
    let (_, opt) = optimal_allocation(inst, obj).map_err(|e| e.to_string())?;
    Ok(ratio(alg, opt, obj.sense()).map_err(|e| e.to_string())?.value)
}

/// Largest ratio over seeds `0..count`, failing on the first ratio above `bound`.
fn max_ratio(
    count: u64,
    bound: f64,
    make: impl Fn(u64) -> SchedulingInstance + Sync,
    mech: &dyn Mechanism,
    obj: Objective,
) -> Result<f64, String> {
    let ratios: Vec<Result<f64, String>> = (0..count).into_par_iter().map(|s| ratio_of(mech, &make(s), obj)).collect();
    let mut worst: f64 = 0.0;
    for (seed, r) in ratios.into_iter().enumerate() {
        let r = r?;
        if r > bound + TOL {
            return Err(format!("seed {seed}: ratio {r} exceeds {bound}"));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

fn random_star(seed: u64, max_m: u64) -> SchedulingInstance {
    let m = 1 + (seed % max_m) as usize;
    gen_random(RandomKind::Star { m }, seed).unwrap()
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    if (a - b).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {a}, want {b}"))
    }
}

fn star_hybrid_two_approx() -> Outcome {
    let hybrid = HybridStar::new(GFunction::MaxLeaf, TieBreak::RootPreferring);
    let worst = max_ratio(10_000, 2.0, |s| random_star(s, 10), &hybrid, Objective::Makespan)?;
    let lb = ratio_of(&hybrid, &gen_star_lb(10, 2.0).unwrap().into(), Objective::Makespan)?;
    close(lb, 2.0 - 2f64.powi(-9), TOL, "ratio on the geometric star")?;
    Ok(format!("max random ratio {worst:.6}; geometric star ratio {lb}"))
}

fn local_inefficiency() -> Outcome {
    let mut out = Vec::new();
    for m in [4usize, 9, 16, 25] {
        let s = gen_local_lb(m).unwrap();
        let inst: SchedulingInstance = s.clone().into();
        let alg = objective_value(&inst, &Vcg.allocate(&inst).unwrap(), Objective::Makespan).unwrap();
        let opt = if m <= 16 {
            optimal_allocation(&inst, Objective::Makespan).unwrap().1
        } else {
            star_makespan_optimum(&s).1
        };
        let r = ratio(alg, opt, gbmech::Sense::Minimize).unwrap().value;
        close(r, (m as f64).sqrt(), TOL, &format!("m = {m}"))?;
        out.push(format!("m={m}: {r}"));
    }
    Ok(out.join(", "))
}

fn hyperstar_bound() -> Outcome {
    let mech = HybridHyperstar::new(GFunction::MaxLeaf, TieBreak::RootPreferring);
    let mut out = Vec::new();
    for k in [2usize, 3] {
        let make = |s: u64| gen_random(RandomKind::Hyperstar { k, m: 1 + (s % 7) as usize }, s).unwrap();
        let worst = max_ratio(1_000, (k + 1) as f64, make, &mech, Objective::Makespan)?;
        out.push(format!("k={k}: max ratio {worst:.6}"));
    }
    Ok(out.join(", "))
}

fn star_cover_bounds() -> Outcome {
    let mech = StarCover::new(GFunction::MaxLeaf, TieBreak::RootPreferring, DecompositionSource::Degeneracy);
    let graph = |inst: &SchedulingInstance| -> GraphInstance { inst.as_graph().unwrap().clone() };
    let tree = |s: u64| gen_random(RandomKind::Tree { n: 2 + (s % 9) as usize }, s).unwrap();
    for s in 0..1_000 {
        let g = graph(&tree(s));
        let c = contention_number(&star_cover_from_ordering(&g, &degeneracy_ordering(&g)));
        if c > 2 {
            return Err(format!("tree seed {s}: contention {c}"));
        }
    }
    let trees = max_ratio(1_000, 4.0, tree, &mech, Objective::Makespan)?;
    let degen = |s: u64| gen_random(RandomKind::Degenerate { n: 3 + (s % 8) as usize, k: 2 }, s).unwrap();
    let graphs = max_ratio(200, 6.0, degen, &mech, Objective::Makespan)?;
    Ok(format!("trees: c <= 2, max ratio {trees:.6}; 2-degenerate: max ratio {graphs:.6}"))
}

fn orientation_sandwich() -> Outcome {
    let mut sampled = 0;
    let mut seed = 0u64;
    while sampled < 500 {
        seed += 1;
        let n = 2 + (seed % 5) as usize;
        let inst = gen_random(RandomKind::Graph { n, prob: 0.6 }, seed).unwrap();
        let g = inst.as_graph().unwrap();
        if g.m() == 0 || !g.is_connected() {
            continue;
        }
        sampled += 1;
        let (o, orient) = orientation_number(g);
        let c = contention_number(&star_cover_from_orientation(g, &orient));
        if !(o <= c && c <= o + 1) {
            return Err(format!("seed {seed}: o = {o}, c = {c}"));
        }
    }
    let mut compared = 0;
    for seed in 0..2_000u64 {
        let n = 2 + (seed % 7) as usize;
        let inst = gen_random(RandomKind::Graph { n, prob: 0.5 }, seed).unwrap();
        let g = inst.as_graph().unwrap();
        if g.m() > 12 {
            continue;
        }
        compared += 1;
        let flow = orientation_number(g).0;
        let brute = brute_force_orientation(g).unwrap().0;
        if flow != brute {
            return Err(format!("seed {seed}: flow {flow}, brute force {brute}"));
        }
    }
    Ok(format!("{sampled} connected graphs sandwiched; flow = brute force on {compared} graphs"))
}

fn lp_upper_bounds() -> Outcome {
    let mut out = Vec::new();
    for p in [1.0, 2.0, 4.0, 0.5] {
        let bound = if p >= 1.0 { 2f64.powf((p - 1.0) / p) } else { 2f64.powf((1.0 - p) / p) };
        let mech = HybridStar::new(GFunction::LpLeaf(p), TieBreak::RootPreferring);
        let obj = Objective::lp_min(p).unwrap();
        let worst = max_ratio(10_000, bound, |s| random_star(s, 8), &mech, obj)?;
        out.push(format!("p={p}: {worst:.6} <= {bound:.6}"));
    }
    let mech = HybridStar::new(GFunction::LpLeaf(1.0), TieBreak::RootPreferring);
    let obj = Objective::lp_min(1.0).unwrap();
    for s in 0..10_000 {
        let inst = random_star(s, 8);
        let h = objective_value(&inst, &mech.allocate(&inst).unwrap(), obj).unwrap();
        let v = objective_value(&inst, &Vcg.allocate(&inst).unwrap(), obj).unwrap();
        if h != v {
            return Err(format!("seed {s}: p = 1 Hybrid {h} vs VCG {v}"));
        }
    }
    out.push("p=1 equals VCG on all 10^4".into());
    Ok(out.join(", "))
}

fn maximization_bounds() -> Outcome {
    let mut out = Vec::new();
    for p in [2.0, 3.0, 4.0] {
        let mech = AllOrNothing::new(p).unwrap();
        let bound = 2f64.powf(1.0 / p);
        let worst = max_ratio(10_000, bound, |s| random_star(s, 8), &mech, Objective::lp_max(p).unwrap())?;
        out.push(format!("all-or-nothing p={p}: {worst:.6}"));
    }
    for p in [1.0, 1.5, 2.0, 3.0] {
        let mech = CombinedMax::new(p).unwrap();
        let worst = max_ratio(10_000, 2f64.sqrt(), |s| random_star(s, 8), &mech, Objective::lp_max(p).unwrap())?;
        out.push(format!("combined p={p}: {worst:.6}"));
    }
    Ok(out.join(", "))
}

fn truthfulness_battery() -> Outcome {
    let tie = TieBreak::RootPreferring;
    let star_mechs: Vec<Box<dyn Mechanism>> = vec![
        Box::new(Vcg),
        Box::new(HybridStar::new(GFunction::MaxLeaf, tie)),
        Box::new(HybridStar::new(GFunction::MaxLeaf, TieBreak::LeafPreferring)),
        Box::new(HybridStar::new(GFunction::LpLeaf(0.5), tie)),
        Box::new(HybridStar::new(GFunction::LpLeaf(1.0), tie)),
        Box::new(HybridStar::new(GFunction::LpLeaf(2.0), tie)),
        Box::new(HybridLpMax::new(2.0, tie).unwrap()),
        Box::new(AllOrNothing::new(2.0).unwrap()),
        Box::new(CombinedMax::new(1.5).unwrap()),
        Box::new(CombinedMax::new(3.0).unwrap()),
        Box::new(StarCover::new(GFunction::MaxLeaf, tie, DecompositionSource::Orientation)),
        Box::new(StarCover::new(GFunction::MaxLeaf, tie, DecompositionSource::Degeneracy)),
        Box::new(HybridHyperstar::new(GFunction::MaxLeaf, tie)),
    ];
    let wmon_and_utilities = Checks {
        wmon: true,
        utilities: true,
        perturbation: false,
    };
    let mut runs = 0;
    let mut failures = Vec::new();
    let mut sweep = |mech: &dyn Mechanism, shape: Shape| {
        for r in exhaustive_battery(mech, shape, &DEFAULT_GRID, wmon_and_utilities).unwrap() {
            runs += r.trials;
            if !r.passed {
                failures.push(format!("{} {:?}", r.line(), r.counterexample));
            }
        }
    };
    for m in &star_mechs {
        sweep(m.as_ref(), Shape::Star { m: 2 });
    }
    let hyper: Vec<Box<dyn Mechanism>> = vec![Box::new(Vcg), Box::new(HybridHyperstar::new(GFunction::MaxLeaf, tie))];
    for m in &hyper {
        sweep(m.as_ref(), Shape::Hyperstar { k: 2, m: 2 });
    }
    if !failures.is_empty() {
        return Err(failures.join("; "));
    }
    let control = exhaustive_battery(&AntiMonotone, Shape::Star { m: 2 }, &DEFAULT_GRID, Checks::default()).unwrap();
    if control.len() != 3 || control.iter().any(|r| r.passed || r.counterexample.is_none()) {
        return Err("anti-monotone fixture was not caught by every check".into());
    }
    Ok(format!(
        "{} mechanisms, {runs} comparisons, zero violations; anti-monotone fixture fails wmon, utilities and perturbation",
        star_mechs.len() + hyper.len()
    ))
}

fn psi_machinery() -> Outcome {
    let families = [GFunction::MaxLeaf, GFunction::LpLeaf(2.0), GFunction::LpLeaf(0.5), GFunction::SumLeaf];
    for seed in 0..1_000u64 {
        let dist = if seed % 2 == 0 {
            CostDistribution::Uniform { lo: 0.0, hi: 4.0 }
        } else {
            CostDistribution::Grid { max: 3 }
        };
        let m = 1 + (seed % 5) as usize;
        let inst = gen_random_with(RandomKind::Star { m }, dist, seed).unwrap();
        let s = inst.as_star().unwrap();
        let g = &families[(seed % 4) as usize];
        let r = check_psi_nonnegative(g, s).unwrap();
        if !r.passed {
            return Err(format!("seed {seed}: {}", r.line()));
        }
        for i in 0..m {
            let r = check_psi_threshold(g, TieBreak::RootPreferring, s, i, 1e-6).unwrap();
            if !r.passed {
                return Err(format!("seed {seed}: {} {:?}", r.line(), r.counterexample));
            }
        }
    }
    let g = example_family();
    let grid = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
    for t2 in [0.5, 1.0, 2.0] {
        let s = StarInstance::from_f64(&[1.0, 0.75], &[1.0, t2]).unwrap();
        let prof = check_psi_monotone(&g, &s, 0, &grid).unwrap();
        if prof.psi.iter().any(|&v| (v - 1.0).abs() > TOL) {
            return Err(format!("psi_1 is not identically 1: {:?}", prof.psi));
        }
        if prof.class != PsiMonotonicity::Monotone {
            return Err(format!("example family classified {:?}", prof.class));
        }
    }
    if check_condition_c(&g, 2, &grid).unwrap().passed {
        return Err("example family unexpectedly satisfies the per-set condition".into());
    }
    let lp = check_psi_monotone(
        &GFunction::LpLeaf(2.0),
        &StarInstance::from_f64(&[1.3, 0.7], &[0.4, 1.1]).unwrap(),
        0,
        &grid,
    )
    .unwrap();
    if lp.class != PsiMonotonicity::Strict {
        return Err(format!("L^2 family classified {:?}", lp.class));
    }
    Ok("psi >= 0 and flips at psi +- 1e-6 on 1000 contexts; example psi_1 = 1, monotone not strict, fails per-set condition".into())
}

fn value(inst: &StarInstance, assignment: Vec<usize>, obj: Objective) -> f64 {
    objective_value(&inst.clone().into(), &Allocation::new(assignment), obj).unwrap().get()
}

fn lower_bound_replays() -> Outcome {
    let obj = Objective::lp_max(2.0).unwrap();
    let primary = gen_max_lb();
    let (_, opt) = optimal_allocation(&primary.clone().into(), obj).unwrap();
    close(opt.get(), 2f64.sqrt(), TOL, "max primary OPT")?;
    close(value(&primary, vec![0, 0], obj), 4.0 / 3.0, TOL, "max primary, both tasks at the root")?;
    let eps = 1e-9;
    let dev = gen_max_lb_deviation(eps).unwrap();
    close(value(&dev, vec![0, 2], obj), 10f64.sqrt(), TOL, "max deviation, first task at the root")?;
    let (_, dev_opt) = optimal_allocation(&dev.clone().into(), obj).unwrap();
    close(dev_opt.get(), 10.0 / 3.0 - eps, TOL, "max deviation OPT")?;

    let p = 0.5;
    let a = PHI;
    let obj = Objective::lp_min(p).unwrap();
    let small = gen_lp_small_lb(a, p).unwrap();
    let (_, opt) = optimal_allocation(&small.clone().into(), obj).unwrap();
    let split = value(&small, vec![0, 2], obj) / opt.get();
    let dev = gen_lp_small_lb_deviation(a, p, eps).unwrap();
    let (_, dev_opt) = optimal_allocation(&dev.clone().into(), obj).unwrap();
    let keep = value(&dev, vec![0, 0], obj) / dev_opt.get();
    let exhibited = split.min(keep);
    let want = a.min((a + 1.0).powi(2) / (a * a + a));
    close(exhibited, want, 1e-6, "L^1/2 bound")?;
    close(lp_small_bound(a, p), want, 1e-12, "closed form")?;
    Ok(format!("sqrt2, 4/3, sqrt10 reproduced; L^1/2 bound {exhibited:.9} vs {want:.9}"))
}

fn fast_path_equivalence() -> Outcome {
    for seed in 0..10_000u64 {
        let m = 1 + (seed % 12) as usize;
        let dist = match seed % 3 {
            0 => CostDistribution::Uniform { lo: 0.0, hi: 1.0 },
            1 => CostDistribution::Grid { max: 2 },
            _ => CostDistribution::Grid { max: 0 },
        };
        let inst = gen_random_with(RandomKind::Star { m }, dist, seed).unwrap();
        let s = inst.as_star().unwrap();
        for tie in [TieBreak::RootPreferring, TieBreak::LeafPreferring] {
            let fast = hybrid_star_allocate_fast_max(s, tie);
            let slow = hybrid_star_allocate_exhaustive(s, &GFunction::MaxLeaf, tie, 12).unwrap();
            if fast != slow {
                return Err(format!("seed {seed} {tie:?}: {:?} vs {:?}", fast.assignment, slow.assignment));
            }
        }
    }
    Ok("identical allocations on 10^4 instances, both tie orders".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("star hybrid 2-approximation", star_hybrid_two_approx),
        ("local mechanisms are sqrt(m) off", local_inefficiency),
        ("hyperstar (k+1)-approximation", hyperstar_bound),
        ("star-cover bounds", star_cover_bounds),
        ("orientation and contention sandwich", orientation_sandwich),
        ("L^p upper bounds", lp_upper_bounds),
        ("maximization bounds", maximization_bounds),
        ("truthfulness battery", truthfulness_battery),
        ("psi machinery", psi_machinery),
        ("lower-bound replays", lower_bound_replays),
        ("fast-path equivalence", fast_path_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
