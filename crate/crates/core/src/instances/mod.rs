//! Hard instance families, seeded random instances, and the instance file format.

mod format;

pub use format::{allocation_to_json, parse_allocation, InstanceFile, FORMAT_VERSION};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::error::{invalid, Result};
use crate::instance::{Edge, GraphInstance, HyperstarInstance, SchedulingInstance, StarInstance};

/// Golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

/// Default perturbation for deviation companions.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Default processing time of dummy nodes.
pub const DEFAULT_DUMMY_COST: f64 = 1e9;

fn check_base(a: f64) -> Result<()> {
    if a.is_finite() && a > 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("geometric base must be finite and > 1, got {a}")))
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("epsilon must be finite and > 0, got {eps}")))
    }
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(invalid("need at least one task"));
    }
    Ok(())
}

/// `r_j = 1/sqrt(m)`, `l_j = 1`: every local mechanism, VCG included, is `sqrt(m)` off here.
pub fn gen_local_lb(m: usize) -> Result<StarInstance> {
    check_m(m)?;
    let r = 1.0 / (m as f64).sqrt();
    StarInstance::from_f64(&vec![r; m], &vec![1.0; m])
}

/// `r_j = a^(j-1)`, `l_j = a^j` for `j = 1..m`.
pub fn gen_star_lb(m: usize, a: f64) -> Result<StarInstance> {
    check_m(m)?;
    check_base(a)?;
    let r: Vec<f64> = (0..m).map(|j| a.powi(j as i32)).collect();
    let l: Vec<f64> = (0..m).map(|j| a.powi(j as i32 + 1)).collect();
    StarInstance::from_f64(&r, &l)
}

/// A star with `k` leaves and geometric costs, plus one pendant dummy per node.
///
/// Nodes `0..=k` form the star (center 0); node `k + 1 + v` is the dummy of node
/// `v`. Edge `j - 1` joins the center and leaf `j` with costs `a^(j-1)` / `a^j`;
/// dummy edges follow, costing 0 on the star side and `h` on the dummy side.
pub fn gen_tree_lb(k: usize, a: f64, h: f64) -> Result<GraphInstance> {
    if k == 0 {
        return Err(invalid("need at least one star leaf"));
    }
    check_base(a)?;
    let largest = a.powi(k as i32);
    if !(h.is_finite() && h >= 1e6 * largest) {
        return Err(invalid(format!("dummy cost must be finite and >= 1e6 x {largest}, got {h}")));
    }
    let mut edges = Vec::with_capacity(2 * k + 1);
    for j in 1..=k {
        edges.push(Edge::new(0, j, Cost::of(a.powi(j as i32 - 1)), Cost::of(a.powi(j as i32))));
    }
    for v in 0..=k {
        edges.push(Edge::new(v, k + 1 + v, Cost::ZERO, Cost::of(h)));
    }
    GraphInstance::new(2 * k + 2, edges, false)
}

/// `(2^p - 1)^(1/p)`.
pub fn lp_alpha(p: f64) -> f64 {
    (2f64.powf(p) - 1.0).powf(1.0 / p)
}

/// `r_j = 2^(j-1)`, `l_j = alpha * 2^(j-1)` with `alpha = (2^p - 1)^(1/p)`.
pub fn gen_lp_lb(m: usize, p: f64) -> Result<StarInstance> {
    check_m(m)?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(invalid(format!("gen_lp_lb needs p >= 1, got {p}")));
    }
    let alpha = lp_alpha(p);
    let r: Vec<f64> = (0..m).map(|j| 2f64.powi(j as i32)).collect();
    let l: Vec<f64> = r.iter().map(|x| alpha * x).collect();
    StarInstance::from_f64(&r, &l)
}

fn check_small_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("need 0 < p <= 1, got {p}")))
    }
}

/// `r = (a^(1/p), a)`, `l = (inf, 1)`.
pub fn gen_lp_small_lb(a: f64, p: f64) -> Result<StarInstance> {
    check_base(a)?;
    check_small_p(p)?;
    StarInstance::from_f64(&[a.powf(1.0 / p), a], &[f64::INFINITY, 1.0])
}

/// The companion `r' = (0, a - eps)` of [`gen_lp_small_lb`].
pub fn gen_lp_small_lb_deviation(a: f64, p: f64, eps: f64) -> Result<StarInstance> {
    check_base(a)?;
    check_small_p(p)?;
    check_epsilon(eps)?;
    StarInstance::from_f64(&[0.0, a - eps], &[f64::INFINITY, 1.0])
}

/// The bound `min{a, (a+1)^(1/p) / (a^(1/p) + a)}` exhibited by [`gen_lp_small_lb`].
pub fn lp_small_bound(a: f64, p: f64) -> f64 {
    a.min((a + 1.0).powf(1.0 / p) / (a.powf(1.0 / p) + a))
}

/// Values `r = (1, 1/3)`, `l = (0, 1)` for L^2 maximization.
pub fn gen_max_lb() -> StarInstance {
    StarInstance::from_f64(&[1.0, 1.0 / 3.0], &[0.0, 1.0]).expect("valid constants")
}

/// The companion `r' = (3, 1/3 - eps)` of [`gen_max_lb`].
pub fn gen_max_lb_deviation(eps: f64) -> Result<StarInstance> {
    check_epsilon(eps)?;
    if eps >= 1.0 / 3.0 {
        return Err(invalid(format!("epsilon must stay below 1/3, got {eps}")));
    }
    StarInstance::from_f64(&[3.0, 1.0 / 3.0 - eps], &[0.0, 1.0])
}

/// Shape of a random instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RandomKind {
    Star { m: usize },
    Hyperstar { k: usize, m: usize },
    /// Uniform random attachment: node `i` joins a uniformly chosen earlier node.
    Tree { n: usize },
    /// Erdos-Renyi with edge probability `prob`.
    Graph { n: usize, prob: f64 },
    /// Erdos-Renyi support, each present pair repeated 1..=w times.
    Multigraph { n: usize, prob: f64, w: usize },
    /// Node `i` joins `min(i, k)` distinct earlier nodes, so the degeneracy is at most `k`.
    Degenerate { n: usize, k: usize },
}

/// How processing times are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostDistribution {
    /// Uniform on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Uniform on the integers `0..=max`; produces many ties.
    Grid { max: u32 },
}

impl Default for CostDistribution {
    fn default() -> Self {
        CostDistribution::Uniform { lo: 0.0, hi: 1.0 }
    }
}

impl CostDistribution {
    fn sample(self, rng: &mut ChaCha8Rng) -> Cost {
        match self {
            CostDistribution::Uniform { lo, hi } => Cost::of(rng.gen_range(lo..hi)),
            CostDistribution::Grid { max } => Cost::of(rng.gen_range(0..=max) as f64),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            CostDistribution::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) => {
                Err(invalid(format!("uniform costs need 0 <= lo < hi, got [{lo}, {hi})")))
            }
            _ => Ok(()),
        }
    }
}

/// A random instance with costs uniform in `[0, 1)`, fully determined by `seed`.
pub fn gen_random(kind: RandomKind, seed: u64) -> Result<SchedulingInstance> {
    gen_random_with(kind, CostDistribution::default(), seed)
}

pub fn gen_random_with(kind: RandomKind, dist: CostDistribution, seed: u64) -> Result<SchedulingInstance> {
    dist.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    Ok(match kind {
        RandomKind::Star { m } => {
            check_m(m)?;
            let r = (0..m).map(|_| dist.sample(rng)).collect();
            let l = (0..m).map(|_| dist.sample(rng)).collect();
            StarInstance::new(r, l)?.into()
        }
        RandomKind::Hyperstar { k, m } => {
            check_m(m)?;
            if k == 0 {
                return Err(invalid("a hyperstar needs at least one root"));
            }
            let r = (0..k).map(|_| (0..m).map(|_| dist.sample(rng)).collect()).collect();
            let l = (0..m).map(|_| dist.sample(rng)).collect();
            HyperstarInstance::new(r, l)?.into()
        }
        RandomKind::Tree { n } => {
            if n < 2 {
                return Err(invalid("a tree needs at least two nodes"));
            }
            let pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
            with_costs(n, &pairs, false, dist, rng)?
        }
        RandomKind::Graph { n, prob } => {
            check_prob(prob)?;
            with_costs(n, &erdos_renyi(n, prob, rng), false, dist, rng)?
        }
        RandomKind::Multigraph { n, prob, w } => {
            check_prob(prob)?;
            if w == 0 {
                return Err(invalid("multiplicity bound must be at least 1"));
            }
            let mut pairs = Vec::new();
            for (u, v) in erdos_renyi(n, prob, rng) {
                let copies = rng.gen_range(1..=w);
                pairs.extend(std::iter::repeat_n((u, v), copies));
            }
            with_costs(n, &pairs, true, dist, rng)?
        }
        RandomKind::Degenerate { n, k } => {
            if n < 2 || k == 0 {
                return Err(invalid("need n >= 2 and k >= 1"));
            }
            let mut pairs = Vec::new();
            for i in 1..n {
                let mut earlier: Vec<usize> = (0..i).collect();
                earlier.shuffle(rng);
                for &j in earlier.iter().take(k.min(i)) {
                    pairs.push((j, i));
                }
            }
            with_costs(n, &pairs, false, dist, rng)?
        }
    })
}

fn check_prob(prob: f64) -> Result<()> {
    if (0.0..=1.0).contains(&prob) {
        Ok(())
    } else {
        Err(invalid(format!("edge probability must lie in [0, 1], got {prob}")))
    }
}

fn erdos_renyi(n: usize, prob: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(prob) {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

fn with_costs(
    n: usize,
    pairs: &[(usize, usize)],
    multigraph: bool,
    dist: CostDistribution,
    rng: &mut ChaCha8Rng,
) -> Result<SchedulingInstance> {
    let edges = pairs
        .iter()
        .map(|&(u, v)| {
            let cu = dist.sample(rng);
            let cv = dist.sample(rng);
            Edge::new(u, v, cu, cv)
        })
        .collect();
    Ok(GraphInstance::new(n, edges, multigraph)?.into())
}

/// Lower-bound and random families addressable by name.
pub const FAMILY_NAMES: &[&str] = &[
    "local-lb",
    "star-lb",
    "tree-lb",
    "lp-lb",
    "lp-small-lb",
    "lp-small-lb-deviation",
    "max-lb",
    "max-lb-deviation",
    "random-star",
    "random-hyperstar",
    "random-tree",
    "random-graph",
    "random-multigraph",
    "random-degenerate",
];

/// Every knob a named family may read. Unused fields are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub family: String,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    /// Geometric base.
    pub a: f64,
    pub p: f64,
    pub epsilon: f64,
    /// Dummy-node cost.
    pub h: f64,
    pub prob: f64,
    /// Multiplicity bound for multigraphs.
    pub w: usize,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            family: "random-star".into(),
            m: 4,
            k: 2,
            n: 6,
            a: 2.0,
            p: 2.0,
            epsilon: DEFAULT_EPSILON,
            h: DEFAULT_DUMMY_COST,
            prob: 0.5,
            w: 2,
            seed: 0,
        }
    }
}

/// Runs the family named in `params.family`.
pub fn generate(params: &GeneratorParams) -> Result<SchedulingInstance> {
    let p = params;
    Ok(match p.family.as_str() {
        "local-lb" => gen_local_lb(p.m)?.into(),
        "star-lb" => gen_star_lb(p.m, p.a)?.into(),
        "tree-lb" => gen_tree_lb(p.k, p.a, p.h)?.into(),
        "lp-lb" => gen_lp_lb(p.m, p.p)?.into(),
        "lp-small-lb" => gen_lp_small_lb(p.a, p.p)?.into(),
        "lp-small-lb-deviation" => gen_lp_small_lb_deviation(p.a, p.p, p.epsilon)?.into(),
        "max-lb" => gen_max_lb().into(),
        "max-lb-deviation" => gen_max_lb_deviation(p.epsilon)?.into(),
        "random-star" => gen_random(RandomKind::Star { m: p.m }, p.seed)?,
        "random-hyperstar" => gen_random(RandomKind::Hyperstar { k: p.k, m: p.m }, p.seed)?,
        "random-tree" => gen_random(RandomKind::Tree { n: p.n }, p.seed)?,
        "random-graph" => gen_random(RandomKind::Graph { n: p.n, prob: p.prob }, p.seed)?,
        "random-multigraph" => gen_random(
            RandomKind::Multigraph {
                n: p.n,
                prob: p.prob,
                w: p.w,
            },
            p.seed,
        )?,
        "random-degenerate" => gen_random(RandomKind::Degenerate { n: p.n, k: p.k }, p.seed)?,
        other => {
            return Err(invalid(format!(
                "unknown family `{other}`; expected one of {}",
                FAMILY_NAMES.join(", ")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_shapes() {
        let s = gen_local_lb(16).unwrap();
        assert!(s.root_costs().iter().all(|c| c.get() == 0.25));
        assert!(s.leaf_costs().iter().all(|c| c.get() == 1.0));
        let one = gen_local_lb(1).unwrap();
        assert_eq!((one.root_costs()[0].get(), one.leaf_costs()[0].get()), (1.0, 1.0));

        let s = gen_star_lb(1, 2.0).unwrap();
        assert_eq!((s.root_costs()[0].get(), s.leaf_costs()[0].get()), (1.0, 2.0));
        assert!(gen_star_lb(3, 1.0).is_err());

        let t = gen_tree_lb(3, PHI, 1e9).unwrap();
        assert_eq!((t.n(), t.m()), (8, 7));
        assert!(t.is_connected());
        let t = gen_tree_lb(1, 2.0, 1e9).unwrap();
        assert_eq!((t.n(), t.m()), (4, 3));
        assert!(gen_tree_lb(3, 2.0, 10.0).is_err());

        assert!((lp_alpha(2.0) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(lp_alpha(1.0), 1.0);
        let s = gen_lp_lb(3, 2.0).unwrap();
        assert!((s.leaf_costs()[2].get() - 4.0 * 3f64.sqrt()).abs() < 1e-12);

        let s = gen_lp_small_lb(2.0, 1.0).unwrap();
        assert_eq!(s.root_costs(), &[Cost::of(2.0), Cost::of(2.0)]);
        assert_eq!(s.leaf_costs(), &[Cost::INFINITY, Cost::of(1.0)]);
        assert!(gen_lp_small_lb(2.0, 1.5).is_err());
        assert!((lp_small_bound(PHI, 0.5) - PHI).abs() < 1e-12);

        let d = gen_max_lb_deviation(1e-6).unwrap();
        assert_eq!(d.root_costs()[0].get(), 3.0);
    }

    #[test]
    fn random_is_seed_deterministic() {
        let kinds = [
            RandomKind::Star { m: 5 },
            RandomKind::Hyperstar { k: 2, m: 3 },
            RandomKind::Tree { n: 10 },
            RandomKind::Graph { n: 6, prob: 0.5 },
            RandomKind::Multigraph { n: 5, prob: 0.6, w: 2 },
            RandomKind::Degenerate { n: 7, k: 2 },
        ];
        for kind in kinds {
            let a = InstanceFile::new(gen_random(kind, 7).unwrap(), None).to_json();
            let b = InstanceFile::new(gen_random(kind, 7).unwrap(), None).to_json();
            assert_eq!(a, b);
        }
        let t = gen_random(RandomKind::Tree { n: 10 }, 3).unwrap();
        let g = t.as_graph().unwrap();
        assert_eq!(g.m(), 9);
        assert!(g.is_connected());
        for seed in 0..20 {
            let mg = gen_random(RandomKind::Multigraph { n: 5, prob: 0.7, w: 2 }, seed).unwrap();
            assert!(mg.as_graph().unwrap().max_multiplicity() <= 2);
        }
    }

    #[test]
    fn degenerate_graphs_have_bounded_degeneracy() {
        for seed in 0..20 {
            let g = gen_random(RandomKind::Degenerate { n: 8, k: 2 }, seed).unwrap();
            let ord = crate::decomposition::degeneracy_ordering(g.as_graph().unwrap());
            assert!(ord.k <= 2);
        }
    }

    #[test]
    fn named_families() {
        let mut p = GeneratorParams::default();
        for &f in FAMILY_NAMES {
            p.family = f.into();
            p.p = if f.starts_with("lp-small") { 0.5 } else { 2.0 };
            assert!(generate(&p).is_ok(), "{f}");
        }
        p.family = "nope".into();
        assert!(generate(&p).is_err());
    }
}
