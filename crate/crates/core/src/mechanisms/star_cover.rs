//! Star-Cover: the Hybrid rule run independently on every star of a decomposition.

use crate::allocation::Allocation;
use crate::cost::Cost;
use crate::decomposition::{
    degeneracy_ordering, orientation_number, star_cover_from_ordering, star_cover_from_orientation, StarDecomposition,
};
use crate::error::{structural, Result};
use crate::instance::{GraphInstance, SchedulingInstance};
use crate::objective::Sense;

use super::gfunc::{GFunction, TieBreak};
use super::hybrid::{hybrid_min_payments, hybrid_star_root_set};
use super::{default_enum_limit, inapplicable, Mechanism, PaymentVector};

/// Where Star-Cover gets its decomposition. Both computed sources look only at
/// the graph structure, never at the bids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum DecompositionSource {
    /// Out-stars of a minimum-in-degree orientation.
    #[default]
    Orientation,
    /// Stars of a minimum-degree peeling order.
    Degeneracy,
    Given(StarDecomposition),
}

impl DecompositionSource {
    pub fn name(&self) -> &'static str {
        match self {
            DecompositionSource::Orientation => "orientation",
            DecompositionSource::Degeneracy => "degeneracy",
            DecompositionSource::Given(_) => "given",
        }
    }

    pub fn decompose(&self, g: &GraphInstance) -> Result<StarDecomposition> {
        match self {
            DecompositionSource::Orientation => Ok(star_cover_from_orientation(g, &orientation_number(g).1)),
            DecompositionSource::Degeneracy => Ok(star_cover_from_ordering(g, &degeneracy_ordering(g))),
            DecompositionSource::Given(d) => {
                StarDecomposition::new(g, d.stars().to_vec())?;
                Ok(d.clone())
            }
        }
    }
}

/// Root and leaf bids of every edge of one star, plus the leaf node of each edge.
fn star_view(g: &GraphInstance, root: usize, edges: &[usize]) -> (Vec<Cost>, Vec<Cost>, Vec<usize>) {
    let mut r = Vec::with_capacity(edges.len());
    let mut l = Vec::with_capacity(edges.len());
    let mut leaves = Vec::with_capacity(edges.len());
    for &e in edges {
        let edge = g.edge(e);
        let leaf = edge.other(root);
        r.push(edge.cost_of(root).expect("edge touches its root"));
        l.push(edge.cost_of(leaf).expect("edge touches its leaf"));
        leaves.push(leaf);
    }
    (r, l, leaves)
}

fn allocate_with(
    g: &GraphInstance,
    decomp: &StarDecomposition,
    gf: &GFunction,
    tie: TieBreak,
    limit: usize,
) -> Result<Allocation> {
    let valid = StarDecomposition::new(g, decomp.stars().to_vec())
        .map_err(|e| structural(format!("decomposition does not fit the graph: {e}")))?;
    if !valid.stars_are_simple() {
        return Err(structural("a star holds two parallel edges"));
    }
    let mut assignment = vec![usize::MAX; g.m()];
    for star in decomp.stars() {
        let (r, l, leaves) = star_view(g, star.root, &star.edges);
        let flags = hybrid_star_root_set(&r, &l, gf, tie, limit)?;
        for (j, &e) in star.edges.iter().enumerate() {
            assignment[e] = if flags[j] { star.root } else { leaves[j] };
        }
    }
    Ok(Allocation::new(assignment))
}

/// Union of the per-star Hybrid allocations, with the root-preferring tie order.
pub fn star_cover_allocate(inst: &GraphInstance, decomp: &StarDecomposition, g: &GFunction) -> Result<Allocation> {
    allocate_with(inst, decomp, g, TieBreak::RootPreferring, default_enum_limit())
}

#[derive(Clone, Debug)]
pub struct StarCover {
    pub g: GFunction,
    pub tie: TieBreak,
    pub source: DecompositionSource,
    pub enum_limit: usize,
}

impl StarCover {
    pub fn new(g: GFunction, tie: TieBreak, source: DecompositionSource) -> Self {
        StarCover {
            g,
            tie,
            source,
            enum_limit: default_enum_limit(),
        }
    }

    fn graph(&self, inst: &SchedulingInstance) -> Result<GraphInstance> {
        match inst {
            SchedulingInstance::Graph(g) => Ok(g.clone()),
            SchedulingInstance::Star(s) => Ok(s.to_graph()),
            SchedulingInstance::Hyperstar(_) => Err(inapplicable(&self.name(), inst)),
        }
    }
}

impl Mechanism for StarCover {
    fn name(&self) -> String {
        match &self.g {
            GFunction::MaxLeaf => "star-cover".into(),
            other => format!("star-cover[{}]", other.name()),
        }
    }

    fn allocate(&self, inst: &SchedulingInstance) -> Result<Allocation> {
        let g = self.graph(inst)?;
        let decomp = self.source.decompose(&g)?;
        allocate_with(&g, &decomp, &self.g, self.tie, self.enum_limit)
    }

    fn payments(&self, inst: &SchedulingInstance, alloc: &Allocation) -> Result<PaymentVector> {
        let g = self.graph(inst)?;
        alloc.validate(inst)?;
        let decomp = self.source.decompose(&g)?;
        let mut pay = PaymentVector::zeros(Sense::Minimize, g.n());
        for star in decomp.stars() {
            super::check_enum_capacity(star.edges.len(), self.enum_limit, "star-cover payments")?;
            let (r, l, leaves) = star_view(&g, star.root, &star.edges);
            let flags: Vec<bool> = star.edges.iter().map(|&e| alloc.machine_of(e) == star.root).collect();
            let local = hybrid_min_payments(&r, &l, &self.g, self.tie, &flags);
            pay.amounts[star.root] += local[0];
            for (j, &leaf) in leaves.iter().enumerate() {
                pay.amounts[leaf] += local[j + 1];
            }
        }
        Ok(pay)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::Star;
    use crate::instance::{Edge, StarInstance};
    use crate::mechanisms::hybrid_star_allocate;

    fn edge(u: usize, v: usize, cu: f64, cv: f64) -> Edge {
        Edge::new(u, v, Cost::of(cu), Cost::of(cv))
    }

    #[test]
    fn path_composes_single_edge_stars() {
        // a=0, b=1, c=2
        let g = GraphInstance::new(3, vec![edge(0, 1, 1.0, 2.0), edge(1, 2, 3.0, 1.0)], false).unwrap();
        let d = StarDecomposition::new(
            &g,
            vec![Star { root: 1, edges: vec![0] }, Star { root: 2, edges: vec![1] }],
        )
        .unwrap();
        let a = star_cover_allocate(&g, &d, &GFunction::MaxLeaf).unwrap();
        // star(b; a): root bid 2 vs leaf 1 -> leaf a; star(c; b): root bid 1 vs leaf 3 -> root c
        assert_eq!(a.assignment, vec![0, 2]);
    }

    #[test]
    fn single_star_matches_hybrid() {
        let s = StarInstance::from_f64(&[1.0, 5.0, 0.5], &[6.0, 4.0, 0.2]).unwrap();
        let g = s.to_graph();
        let d = StarDecomposition::new(&g, vec![Star { root: 0, edges: vec![0, 1, 2] }]).unwrap();
        let a = star_cover_allocate(&g, &d, &GFunction::MaxLeaf).unwrap();
        let b = hybrid_star_allocate(&s, &GFunction::MaxLeaf, TieBreak::RootPreferring).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uncovered_edges_are_structural_errors() {
        let g = GraphInstance::new(3, vec![edge(0, 1, 1.0, 2.0), edge(1, 2, 3.0, 1.0)], false).unwrap();
        let h = GraphInstance::new(3, vec![edge(0, 1, 1.0, 2.0)], false).unwrap();
        let d = StarDecomposition::new(&h, vec![Star { root: 1, edges: vec![0] }]).unwrap();
        assert!(matches!(star_cover_allocate(&g, &d, &GFunction::MaxLeaf), Err(crate::Error::Structural(_))));
    }

    #[test]
    fn payments_sum_over_stars() {
        let g = GraphInstance::new(3, vec![edge(0, 1, 1.0, 2.0), edge(1, 2, 3.0, 1.0)], false).unwrap();
        let d = StarDecomposition::new(
            &g,
            vec![Star { root: 1, edges: vec![0] }, Star { root: 1, edges: vec![1] }],
        )
        .unwrap();
        let m = StarCover::new(GFunction::MaxLeaf, TieBreak::RootPreferring, DecompositionSource::Given(d));
        let (a, p) = m.run(&g.into()).unwrap();
        assert_eq!(a.assignment, vec![0, 2]);
        // leaf 0 is paid root bid 2, leaf 2 is paid root bid 3, root gets nothing
        assert_eq!(p.amounts, vec![2.0, 0.0, 3.0]);
    }
}
