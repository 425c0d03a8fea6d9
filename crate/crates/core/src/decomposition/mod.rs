//! Star decompositions, contention numbers, orientations and degeneracy orderings.

mod flow;

use serde::{Deserialize, Serialize};

use crate::error::{structural, Result};
use crate::instance::GraphInstance;

use flow::FlowNetwork;

/// One star: a root node and edges that all touch it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub root: usize,
    /// Edge ids, ascending.
    pub edges: Vec<usize>,
}

impl Star {
    /// The root followed by the far endpoint of every edge, in edge order.
    pub fn nodes(&self, g: &GraphInstance) -> Vec<usize> {
        let mut out = vec![self.root];
        out.extend(self.edges.iter().map(|&e| g.edge(e).other(self.root)));
        out
    }
}

/// A partition of a graph's edges into stars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarDecomposition {
    stars: Vec<Star>,
    edge_star: Vec<usize>,
    /// Distinct nodes touched by each star.
    node_sets: Vec<Vec<usize>>,
    n: usize,
}

impl StarDecomposition {
    /// Validates that `stars` partition the edges of `g` and each edge touches its star's root.
    pub fn new(g: &GraphInstance, stars: Vec<Star>) -> Result<Self> {
        let mut edge_star = vec![usize::MAX; g.m()];
        let mut node_sets = Vec::with_capacity(stars.len());
        for (s, star) in stars.iter().enumerate() {
            if star.root >= g.n() {
                return Err(structural(format!("star {s} has root {} outside 0..{}", star.root, g.n())));
            }
            for &e in &star.edges {
                if e >= g.m() {
                    return Err(structural(format!("star {s} names unknown edge {e}")));
                }
                if edge_star[e] != usize::MAX {
                    return Err(structural(format!("edge {e} is in stars {} and {s}", edge_star[e])));
                }
                let edge = g.edge(e);
                if edge.u != star.root && edge.v != star.root {
                    return Err(structural(format!("edge {e} does not touch root {} of star {s}", star.root)));
                }
                edge_star[e] = s;
            }
            let mut nodes = star.nodes(g);
            nodes.sort_unstable();
            nodes.dedup();
            node_sets.push(nodes);
        }
        if let Some(e) = edge_star.iter().position(|&s| s == usize::MAX) {
            return Err(structural(format!("edge {e} is not covered by any star")));
        }
        Ok(StarDecomposition {
            stars,
            edge_star,
            node_sets,
            n: g.n(),
        })
    }

    pub fn stars(&self) -> &[Star] {
        &self.stars
    }

    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    /// Index of the star holding edge `e`.
    pub fn star_of(&self, e: usize) -> usize {
        self.edge_star[e]
    }

    /// Number of stars touching each node.
    pub fn node_counts(&self) -> Vec<usize> {
        let mut count = vec![0; self.n];
        for nodes in &self.node_sets {
            for &v in nodes {
                count[v] += 1;
            }
        }
        count
    }

    /// True when every star has pairwise distinct leaves, i.e. no parallel edges inside one star.
    pub fn stars_are_simple(&self) -> bool {
        self.stars.iter().zip(&self.node_sets).all(|(s, nodes)| nodes.len() == s.edges.len() + 1)
    }
}

/// `c(T)`: the largest number of stars touching one node, as root or as leaf.
pub fn contention_number(decomp: &StarDecomposition) -> usize {
    decomp.node_counts().into_iter().max().unwrap_or(0)
}

/// Direction of every edge, given by the endpoint it points to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub head: Vec<usize>,
}

impl Orientation {
    pub fn validate(&self, g: &GraphInstance) -> Result<()> {
        if self.head.len() != g.m() {
            return Err(structural(format!("orientation covers {} of {} edges", self.head.len(), g.m())));
        }
        for (e, &h) in self.head.iter().enumerate() {
            let edge = g.edge(e);
            if h != edge.u && h != edge.v {
                return Err(structural(format!("edge {e} points to {h}, which is not an endpoint")));
            }
        }
        Ok(())
    }

    pub fn tail(&self, g: &GraphInstance, e: usize) -> usize {
        g.edge(e).other(self.head[e])
    }

    pub fn in_degrees(&self, n: usize) -> Vec<usize> {
        let mut deg = vec![0; n];
        for &h in &self.head {
            deg[h] += 1;
        }
        deg
    }

    pub fn max_in_degree(&self, n: usize) -> usize {
        self.in_degrees(n).into_iter().max().unwrap_or(0)
    }
}

// Network: source, one node per edge, one node per graph node, sink.
fn orient_with_bound(g: &GraphInstance, gamma: usize) -> Option<Orientation> {
    let (n, m) = (g.n(), g.m());
    let source = 0;
    let sink = 1 + m + n;
    let mut net = FlowNetwork::new(m + n + 2);
    let mut to_u = Vec::with_capacity(m);
    for (e, edge) in g.edges().iter().enumerate() {
        net.add_arc(source, 1 + e, 1);
        to_u.push(net.add_arc(1 + e, 1 + m + edge.u, 1));
        net.add_arc(1 + e, 1 + m + edge.v, 1);
    }
    for v in 0..n {
        net.add_arc(1 + m + v, sink, gamma as u64);
    }
    if net.max_flow(source, sink) < m as u64 {
        return None;
    }
    let head = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| if net.flow_on(to_u[e]) == 1 { edge.u } else { edge.v })
        .collect();
    Some(Orientation { head })
}

/// `o(G)` with a witness orientation whose maximum in-degree attains it.
///
/// Binary search on the bound, each step a max-flow feasibility test.
pub fn orientation_number(g: &GraphInstance) -> (usize, Orientation) {
    if g.m() == 0 {
        return (0, Orientation { head: Vec::new() });
    }
    let mut lo = g.m().div_ceil(g.n());
    let mut hi = g.degrees().into_iter().max().unwrap_or(0);
    let mut best = orient_with_bound(g, hi).expect("max degree is always feasible");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match orient_with_bound(g, mid) {
            Some(o) => {
                hi = mid;
                best = o;
            }
            None => lo = mid + 1,
        }
    }
    if best.max_in_degree(g.n()) != lo {
        best = orient_with_bound(g, lo).expect("feasible at the searched bound");
    }
    (lo, best)
}

/// A node ordering in which every node has at most `k` neighbours after it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyOrdering {
    pub order: Vec<usize>,
    pub k: usize,
}

impl DegeneracyOrdering {
    /// Position of every node in `order`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    /// Checks that `order` is a permutation and the later-neighbour bound holds.
    pub fn validate(&self, g: &GraphInstance) -> Result<()> {
        let mut seen = vec![false; g.n()];
        if self.order.len() != g.n() {
            return Err(structural(format!("ordering has {} nodes, graph has {}", self.order.len(), g.n())));
        }
        for &v in &self.order {
            if v >= g.n() || std::mem::replace(&mut seen[v], true) {
                return Err(structural(format!("ordering is not a permutation (node {v})")));
            }
        }
        let pos = self.positions();
        let mut later = vec![0; g.n()];
        for e in g.edges() {
            let first = if pos[e.u] < pos[e.v] { e.u } else { e.v };
            later[first] += 1;
        }
        match later.iter().position(|&c| c > self.k) {
            Some(v) => Err(structural(format!("node {v} has {} later neighbours, bound is {}", later[v], self.k))),
            None => Ok(()),
        }
    }
}

/// Minimum-degree peeling; the first node removed comes first. Ties go to the
/// smallest node id and parallel edges count toward the degree.
pub fn degeneracy_ordering(g: &GraphInstance) -> DegeneracyOrdering {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut deg = g.degrees();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut k = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("a node remains");
        k = k.max(deg[v]);
        removed[v] = true;
        order.push(v);
        for &w in &adj[v] {
            if !removed[w] {
                deg[w] -= 1;
            }
        }
    }
    DegeneracyOrdering { order, k }
}

// Parallel copies of one node pair go to different stars: copy j joins star j of its root.
fn split_by_multiplicity(g: &GraphInstance, root: usize, edges: &[usize]) -> Vec<Star> {
    let mut copies: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut stars: Vec<Star> = Vec::new();
    for &e in edges {
        let c = copies.entry(g.edge(e).other(root)).or_insert(0);
        if *c == stars.len() {
            stars.push(Star { root, edges: Vec::new() });
        }
        stars[*c].edges.push(e);
        *c += 1;
    }
    stars
}

fn build(g: &GraphInstance, roots_in_order: impl Iterator<Item = usize>, owner: impl Fn(usize) -> usize) -> StarDecomposition {
    let mut owned = vec![Vec::new(); g.n()];
    for e in 0..g.m() {
        owned[owner(e)].push(e);
    }
    let mut stars = Vec::new();
    for v in roots_in_order {
        stars.extend(split_by_multiplicity(g, v, &owned[v]));
    }
    StarDecomposition::new(g, stars).expect("every edge has exactly one owner endpoint")
}

/// Star `i` is rooted at `v_i` and takes the edges to its neighbours earlier in the ordering.
pub fn star_cover_from_ordering(g: &GraphInstance, ord: &DegeneracyOrdering) -> StarDecomposition {
    let pos = ord.positions();
    build(g, ord.order.iter().copied(), |e| {
        let edge = g.edge(e);
        if pos[edge.u] > pos[edge.v] {
            edge.u
        } else {
            edge.v
        }
    })
}

/// Every node with its outgoing edges forms a star.
pub fn star_cover_from_orientation(g: &GraphInstance, o: &Orientation) -> StarDecomposition {
    build(g, 0..g.n(), |e| o.tail(g, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Cost;
    use crate::instance::Edge;

    fn graph(n: usize, pairs: &[(usize, usize)], multi: bool) -> GraphInstance {
        let edges = pairs.iter().map(|&(u, v)| Edge::new(u, v, Cost::of(1.0), Cost::of(1.0))).collect();
        GraphInstance::new(n, edges, multi).unwrap()
    }

    fn complete(n: usize) -> GraphInstance {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push((u, v));
            }
        }
        graph(n, &pairs, false)
    }

    fn brute_orientation(g: &GraphInstance) -> usize {
        (0..1u32 << g.m())
            .map(|mask| {
                let head = (0..g.m()).map(|e| if mask >> e & 1 == 1 { g.edge(e).u } else { g.edge(e).v }).collect();
                Orientation { head }.max_in_degree(g.n())
            })
            .min()
            .unwrap()
    }

    pub(crate) fn fig3() -> GraphInstance {
        let pairs = [(6, 5), (6, 4), (6, 3), (6, 1), (5, 4), (5, 3), (4, 2), (3, 2), (2, 1)];
        let zero_based: Vec<_> = pairs.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
        graph(6, &zero_based, false)
    }

    #[test]
    fn orientation_examples() {
        let tri = complete(3);
        assert_eq!(orientation_number(&tri).0, 1);
        assert_eq!(brute_orientation(&tri), 1);
        let k4 = complete(4);
        let (o, w) = orientation_number(&k4);
        assert_eq!(o, 2);
        assert_eq!(brute_orientation(&k4), 2);
        w.validate(&k4).unwrap();
        assert_eq!(w.max_in_degree(4), 2);
        assert!(contention_number(&star_cover_from_orientation(&k4, &w)) <= 3);
    }

    #[test]
    fn degeneracy_examples() {
        let tree = graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4)], false);
        assert_eq!(degeneracy_ordering(&tree).k, 1);
        assert_eq!(degeneracy_ordering(&complete(5)).k, 4);
        let g = fig3();
        let ord = degeneracy_ordering(&g);
        assert_eq!(ord.k, 2);
        assert_eq!(ord.order, vec![0, 1, 2, 3, 4, 5]);
        ord.validate(&g).unwrap();
        let d = star_cover_from_ordering(&g, &ord);
        assert_eq!(d.len(), 5);
        assert_eq!(contention_number(&d), 3);
    }

    #[test]
    fn contention_examples() {
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)], false);
        let d = StarDecomposition::new(&star, vec![Star { root: 0, edges: vec![0, 1, 2] }]).unwrap();
        assert_eq!(contention_number(&d), 1);

        // path 0-1-2-3 as three one-edge stars rooted at 0, 2, 2
        let path = graph(4, &[(0, 1), (1, 2), (2, 3)], false);
        let d = StarDecomposition::new(
            &path,
            vec![
                Star { root: 0, edges: vec![0] },
                Star { root: 2, edges: vec![1] },
                Star { root: 2, edges: vec![2] },
            ],
        )
        .unwrap();
        assert_eq!(d.node_counts(), vec![1, 2, 2, 1]);
        assert_eq!(contention_number(&d), 2);

        let single = graph(2, &[(0, 1)], false);
        let d = star_cover_from_ordering(&single, &degeneracy_ordering(&single));
        assert_eq!(contention_number(&d), 1);
    }

    #[test]
    fn invalid_decompositions_are_rejected() {
        let path = graph(3, &[(0, 1), (1, 2)], false);
        assert!(StarDecomposition::new(&path, vec![Star { root: 1, edges: vec![0] }]).is_err());
        assert!(StarDecomposition::new(&path, vec![Star { root: 0, edges: vec![0, 1] }]).is_err());
        assert!(StarDecomposition::new(&path, vec![Star { root: 1, edges: vec![0, 1, 0] }]).is_err());
    }

    #[test]
    fn multigraph_stars_stay_simple() {
        let g = graph(2, &[(0, 1), (0, 1)], true);
        let (o, w) = orientation_number(&g);
        assert_eq!(o, 1);
        let d = star_cover_from_orientation(&g, &w);
        assert!(d.stars_are_simple());
        assert!(contention_number(&d) <= o + g.max_multiplicity());

        let g = graph(3, &[(0, 1), (0, 1), (0, 1), (1, 2), (0, 2)], true);
        let o = Orientation { head: vec![1, 1, 1, 2, 2] };
        let d = star_cover_from_orientation(&g, &o);
        assert!(d.stars_are_simple());
        assert_eq!(d.len(), 4);
        let (best, _) = orientation_number(&g);
        assert_eq!(best, brute_orientation(&g));
    }
}
