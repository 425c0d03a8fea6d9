//! Scheduling instances: stars, hyperstars and (multi)graphs.
//!
//! Machine numbering is fixed per instance kind and shared by allocations,
//! payments and the verifiers:
//!
//! - star: root is machine `0`, the leaf of task `j` is machine `j + 1`;
//! - hyperstar: roots are machines `0..k`, the leaf of task `j` is machine `k + j`;
//! - graph: machines are the nodes, task `e` is edge `e`.

use std::collections::HashSet;

use crate::cost::Cost;
use crate::error::{invalid, structural, Result};

/// A star: one root that can process every task and one leaf per task.
#[derive(Clone, Debug, PartialEq)]
pub struct StarInstance {
    root: Vec<Cost>,
    leaf: Vec<Cost>,
}

impl StarInstance {
    pub fn new(root_costs: Vec<Cost>, leaf_costs: Vec<Cost>) -> Result<Self> {
        if root_costs.is_empty() {
            return Err(structural("a star needs at least one task"));
        }
        if root_costs.len() != leaf_costs.len() {
            return Err(structural(format!(
                "star has {} root costs but {} leaf costs",
                root_costs.len(),
                leaf_costs.len()
            )));
        }
        Ok(StarInstance {
            root: root_costs,
            leaf: leaf_costs,
        })
    }

    /// Convenience constructor from raw floats (`f64::INFINITY` allowed).
    pub fn from_f64(root_costs: &[f64], leaf_costs: &[f64]) -> Result<Self> {
        let root = root_costs.iter().map(|&c| Cost::new(c)).collect::<Result<_>>()?;
        let leaf = leaf_costs.iter().map(|&c| Cost::new(c)).collect::<Result<_>>()?;
        StarInstance::new(root, leaf)
    }

    pub fn m(&self) -> usize {
        self.root.len()
    }

    pub fn root_costs(&self) -> &[Cost] {
        &self.root
    }

    pub fn leaf_costs(&self) -> &[Cost] {
        &self.leaf
    }

    pub fn with_root_costs(&self, root_costs: Vec<Cost>) -> Result<Self> {
        StarInstance::new(root_costs, self.leaf.clone())
    }

    pub fn with_leaf_costs(&self, leaf_costs: Vec<Cost>) -> Result<Self> {
        StarInstance::new(self.root.clone(), leaf_costs)
    }

    /// The same star seen as a graph: node 0 is the root, node `j + 1` the leaf of task `j`.
    pub fn to_graph(&self) -> GraphInstance {
        let edges = (0..self.m())
            .map(|j| Edge::new(0, j + 1, self.root[j], self.leaf[j]))
            .collect();
        GraphInstance::new(self.m() + 1, edges, false).expect("stars are simple graphs")
    }
}

/// `k` root players that can process every task, plus one leaf per task.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperstarInstance {
    root: Vec<Vec<Cost>>,
    leaf: Vec<Cost>,
    lambdas: Vec<f64>,
}

impl HyperstarInstance {
    /// Builds a hyperstar with unit weights.
    pub fn new(root_costs: Vec<Vec<Cost>>, leaf_costs: Vec<Cost>) -> Result<Self> {
        let k = root_costs.len();
        HyperstarInstance::with_lambdas(root_costs, leaf_costs, vec![1.0; k])
    }

    pub fn with_lambdas(
        root_costs: Vec<Vec<Cost>>,
        leaf_costs: Vec<Cost>,
        lambdas: Vec<f64>,
    ) -> Result<Self> {
        if root_costs.is_empty() {
            return Err(structural("a hyperstar needs at least one root"));
        }
        let m = leaf_costs.len();
        if m == 0 {
            return Err(structural("a hyperstar needs at least one task"));
        }
        for (i, row) in root_costs.iter().enumerate() {
            if row.len() != m {
                return Err(structural(format!(
                    "root {i} has {} costs, expected {m}",
                    row.len()
                )));
            }
        }
        if lambdas.len() != root_costs.len() {
            return Err(structural(format!(
                "{} weights for {} roots",
                lambdas.len(),
                root_costs.len()
            )));
        }
        if let Some(bad) = lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(invalid(format!("root weight {bad} is not a finite nonnegative real")));
        }
        Ok(HyperstarInstance {
            root: root_costs,
            leaf: leaf_costs,
            lambdas,
        })
    }

    pub fn from_f64(root_costs: &[Vec<f64>], leaf_costs: &[f64]) -> Result<Self> {
        let root = root_costs
            .iter()
            .map(|row| row.iter().map(|&c| Cost::new(c)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let leaf = leaf_costs.iter().map(|&c| Cost::new(c)).collect::<Result<_>>()?;
        HyperstarInstance::new(root, leaf)
    }

    pub fn k(&self) -> usize {
        self.root.len()
    }

    pub fn m(&self) -> usize {
        self.leaf.len()
    }

    pub fn root_costs(&self) -> &[Vec<Cost>] {
        &self.root
    }

    pub fn leaf_costs(&self) -> &[Cost] {
        &self.leaf
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// A star is a hyperstar with a single unit-weight root.
    pub fn from_star(star: &StarInstance) -> Self {
        HyperstarInstance {
            root: vec![star.root_costs().to_vec()],
            leaf: star.leaf_costs().to_vec(),
            lambdas: vec![1.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost_u: Cost,
    pub cost_v: Cost,
}

impl Edge {
    pub fn new(u: usize, v: usize, cost_u: Cost, cost_v: Cost) -> Self {
        Edge { u, v, cost_u, cost_v }
    }

    /// The endpoint opposite to `node`.
    pub fn other(&self, node: usize) -> usize {
        if node == self.u {
            self.v
        } else {
            self.u
        }
    }

    /// Processing time of `node` on this edge, if it is an endpoint.
    pub fn cost_of(&self, node: usize) -> Option<Cost> {
        if node == self.u {
            Some(self.cost_u)
        } else if node == self.v {
            Some(self.cost_v)
        } else {
            None
        }
    }
}

/// Unrelated graph balancing: every edge goes to one of its endpoints.
/// Edge ids are positions in the edge list.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphInstance {
    n: usize,
    edges: Vec<Edge>,
    multigraph: bool,
}

impl GraphInstance {
    pub fn new(n: usize, edges: Vec<Edge>, multigraph: bool) -> Result<Self> {
        let mut seen = HashSet::new();
        for (id, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(structural(format!(
                    "edge {id} ({}, {}) has an endpoint outside 0..{n}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(structural(format!("edge {id} is a self-loop on {}", e.u)));
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) && !multigraph {
                return Err(structural(format!(
                    "edge {id} duplicates ({}, {}) in a simple graph",
                    key.0, key.1
                )));
            }
        }
        Ok(GraphInstance { n, edges, multigraph })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn is_multigraph(&self) -> bool {
        self.multigraph
    }

    /// Ids of the edges incident to `node`, ascending.
    pub fn incident(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&id| self.edges[id].u == node || self.edges[id].v == node)
            .collect()
    }

    /// Degree of every node, parallel edges counted with multiplicity.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Largest number of parallel edges between one node pair (0 without edges).
    pub fn max_multiplicity(&self) -> usize {
        let mut counts = std::collections::HashMap::new();
        for e in &self.edges {
            *counts.entry((e.u.min(e.v), e.u.max(e.v))).or_insert(0usize) += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Replaces every processing time by `f(edge id, node, old cost)`.
    pub fn map_costs(&self, mut f: impl FnMut(usize, usize, Cost) -> Cost) -> Self {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(id, e)| Edge {
                cost_u: f(id, e.u, e.cost_u),
                cost_v: f(id, e.v, e.cost_v),
                ..*e
            })
            .collect();
        GraphInstance {
            n: self.n,
            edges,
            multigraph: self.multigraph,
        }
    }
}

/// The kind tag of an instance, used in messages and the file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Star,
    Hyperstar,
    Graph,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Star => "star",
            InstanceKind::Hyperstar => "hyperstar",
            InstanceKind::Graph => "graph",
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SchedulingInstance {
    Star(StarInstance),
    Hyperstar(HyperstarInstance),
    Graph(GraphInstance),
}

impl From<StarInstance> for SchedulingInstance {
    fn from(s: StarInstance) -> Self {
        SchedulingInstance::Star(s)
    }
}

impl From<HyperstarInstance> for SchedulingInstance {
    fn from(h: HyperstarInstance) -> Self {
        SchedulingInstance::Hyperstar(h)
    }
}

impl From<GraphInstance> for SchedulingInstance {
    fn from(g: GraphInstance) -> Self {
        SchedulingInstance::Graph(g)
    }
}

impl SchedulingInstance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            SchedulingInstance::Star(_) => InstanceKind::Star,
            SchedulingInstance::Hyperstar(_) => InstanceKind::Hyperstar,
            SchedulingInstance::Graph(_) => InstanceKind::Graph,
        }
    }

    pub fn num_tasks(&self) -> usize {
        match self {
            SchedulingInstance::Star(s) => s.m(),
            SchedulingInstance::Hyperstar(h) => h.m(),
            SchedulingInstance::Graph(g) => g.m(),
        }
    }

    pub fn num_machines(&self) -> usize {
        match self {
            SchedulingInstance::Star(s) => s.m() + 1,
            SchedulingInstance::Hyperstar(h) => h.k() + h.m(),
            SchedulingInstance::Graph(g) => g.n(),
        }
    }

    /// Eligible machines of `task` with their processing times, by ascending machine id.
    pub fn eligible(&self, task: usize) -> Vec<(usize, Cost)> {
        match self {
            SchedulingInstance::Star(s) => {
                vec![(0, s.root_costs()[task]), (task + 1, s.leaf_costs()[task])]
            }
            SchedulingInstance::Hyperstar(h) => {
                let mut out: Vec<_> = (0..h.k()).map(|i| (i, h.root_costs()[i][task])).collect();
                out.push((h.k() + task, h.leaf_costs()[task]));
                out
            }
            SchedulingInstance::Graph(g) => {
                let e = g.edge(task);
                if e.u < e.v {
                    vec![(e.u, e.cost_u), (e.v, e.cost_v)]
                } else {
                    vec![(e.v, e.cost_v), (e.u, e.cost_u)]
                }
            }
        }
    }

    /// Processing time of `machine` on `task`, `None` when not eligible.
    pub fn cost(&self, task: usize, machine: usize) -> Option<Cost> {
        match self {
            SchedulingInstance::Star(s) => match machine {
                0 => Some(s.root_costs()[task]),
                x if x == task + 1 => Some(s.leaf_costs()[task]),
                _ => None,
            },
            SchedulingInstance::Hyperstar(h) => {
                if machine < h.k() {
                    Some(h.root_costs()[machine][task])
                } else if machine == h.k() + task {
                    Some(h.leaf_costs()[task])
                } else {
                    None
                }
            }
            SchedulingInstance::Graph(g) => g.edge(task).cost_of(machine),
        }
    }

    /// The tasks `player` can process, ascending. Its bid vector is indexed the same way.
    pub fn player_tasks(&self, player: usize) -> Vec<usize> {
        match self {
            SchedulingInstance::Star(s) => {
                if player == 0 {
                    (0..s.m()).collect()
                } else {
                    vec![player - 1]
                }
            }
            SchedulingInstance::Hyperstar(h) => {
                if player < h.k() {
                    (0..h.m()).collect()
                } else {
                    vec![player - h.k()]
                }
            }
            SchedulingInstance::Graph(g) => g.incident(player),
        }
    }

    /// The reported processing times of `player`, aligned with [`player_tasks`](Self::player_tasks).
    pub fn player_bids(&self, player: usize) -> Vec<Cost> {
        self.player_tasks(player)
            .into_iter()
            .map(|t| self.cost(t, player).expect("player task is eligible"))
            .collect()
    }

    /// A copy of the instance in which `player` reports `bids` instead.
    pub fn with_player_bids(&self, player: usize, bids: &[Cost]) -> Result<SchedulingInstance> {
        let tasks = self.player_tasks(player);
        if tasks.len() != bids.len() {
            return Err(structural(format!(
                "player {player} bids on {} tasks, got {} values",
                tasks.len(),
                bids.len()
            )));
        }
        Ok(match self {
            SchedulingInstance::Star(s) => {
                if player == 0 {
                    s.with_root_costs(bids.to_vec())?.into()
                } else {
                    let mut leaf = s.leaf_costs().to_vec();
                    leaf[player - 1] = bids[0];
                    s.with_leaf_costs(leaf)?.into()
                }
            }
            SchedulingInstance::Hyperstar(h) => {
                let mut root = h.root_costs().to_vec();
                let mut leaf = h.leaf_costs().to_vec();
                if player < h.k() {
                    root[player] = bids.to_vec();
                } else {
                    leaf[player - h.k()] = bids[0];
                }
                HyperstarInstance::with_lambdas(root, leaf, h.lambdas().to_vec())?.into()
            }
            SchedulingInstance::Graph(g) => {
                let pos: std::collections::HashMap<usize, usize> =
                    tasks.iter().enumerate().map(|(i, &t)| (t, i)).collect();
                g.map_costs(|id, node, old| {
                    if node == player {
                        bids[pos[&id]]
                    } else {
                        old
                    }
                })
                .into()
            }
        })
    }

    /// Machines that hold a multi-task bid vector (roots); everyone else is single-task.
    pub fn is_single_parameter(&self, player: usize) -> bool {
        self.player_tasks(player).len() == 1
    }

    pub fn as_star(&self) -> Option<&StarInstance> {
        match self {
            SchedulingInstance::Star(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_hyperstar(&self) -> Option<&HyperstarInstance> {
        match self {
            SchedulingInstance::Hyperstar(h) => Some(h),
            _ => None,
        }
    }

    pub fn as_graph(&self) -> Option<&GraphInstance> {
        match self {
            SchedulingInstance::Graph(g) => Some(g),
            _ => None,
        }
    }

    /// Largest finite processing time in the instance (0 when all are infinite).
    pub fn max_finite_cost(&self) -> f64 {
        (0..self.num_tasks())
            .flat_map(|t| self.eligible(t))
            .map(|(_, c)| c)
            .filter(|c| c.is_finite())
            .map(Cost::get)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_dimension_checks() {
        assert!(StarInstance::from_f64(&[1.0], &[1.0, 2.0]).is_err());
        assert!(StarInstance::from_f64(&[], &[]).is_err());
        assert!(StarInstance::from_f64(&[1.0, -1.0], &[1.0, 2.0]).is_err());
        let s = StarInstance::from_f64(&[1.0, 2.0], &[2.0, f64::INFINITY]).unwrap();
        assert_eq!(s.m(), 2);
        assert!(s.leaf_costs()[1].is_infinite());
    }

    #[test]
    fn hyperstar_dimension_checks() {
        assert!(HyperstarInstance::from_f64(&[vec![1.0], vec![1.0, 2.0]], &[1.0]).is_err());
        let h = HyperstarInstance::from_f64(&[vec![1.0, 3.0], vec![2.0, 1.0]], &[5.0, 5.0]).unwrap();
        assert_eq!((h.k(), h.m()), (2, 2));
        assert!(HyperstarInstance::with_lambdas(
            h.root_costs().to_vec(),
            h.leaf_costs().to_vec(),
            vec![1.0, -1.0]
        )
        .is_err());
    }

    #[test]
    fn graph_rejects_loops_and_parallel_edges_unless_multigraph() {
        let c = Cost::of(1.0);
        assert!(GraphInstance::new(2, vec![Edge::new(0, 0, c, c)], false).is_err());
        assert!(GraphInstance::new(2, vec![Edge::new(0, 2, c, c)], false).is_err());
        let par = vec![Edge::new(0, 1, c, c), Edge::new(1, 0, c, c)];
        assert!(GraphInstance::new(2, par.clone(), false).is_err());
        let g = GraphInstance::new(2, par, true).unwrap();
        assert_eq!(g.max_multiplicity(), 2);
    }

    #[test]
    fn machine_numbering_and_player_views() {
        let s: SchedulingInstance = StarInstance::from_f64(&[1.0, 2.0], &[3.0, 4.0]).unwrap().into();
        assert_eq!(s.num_machines(), 3);
        assert_eq!(s.eligible(1), vec![(0, Cost::of(2.0)), (2, Cost::of(4.0))]);
        assert_eq!(s.cost(0, 2), None);
        assert_eq!(s.player_bids(0), vec![Cost::of(1.0), Cost::of(2.0)]);
        let t = s.with_player_bids(2, &[Cost::of(9.0)]).unwrap();
        assert_eq!(t.cost(1, 2), Some(Cost::of(9.0)));

        let h: SchedulingInstance =
            HyperstarInstance::from_f64(&[vec![1.0, 3.0], vec![2.0, 1.0]], &[5.0, 6.0]).unwrap().into();
        assert_eq!(h.num_machines(), 4);
        assert_eq!(h.player_tasks(3), vec![1]);
        assert_eq!(h.cost(1, 3), Some(Cost::of(6.0)));

        let g: SchedulingInstance = StarInstance::from_f64(&[1.0, 2.0], &[3.0, 4.0]).unwrap().to_graph().into();
        assert_eq!(g.player_tasks(0), vec![0, 1]);
        let g2 = g.with_player_bids(0, &[Cost::of(7.0), Cost::of(8.0)]).unwrap();
        assert_eq!(g2.cost(1, 0), Some(Cost::of(8.0)));
        assert_eq!(g2.cost(1, 2), Some(Cost::of(4.0)));
    }
}
