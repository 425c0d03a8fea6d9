//! Dinic's max-flow on small integer networks.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    level: Vec<usize>,
    next: Vec<usize>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            next: vec![0; nodes],
        }
    }

    /// Adds `from -> to` with capacity `cap` and returns the arc id.
    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.adj[from].push(id);
        self.arcs.push(Arc { to: from, cap: 0 });
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently pushed through arc `id`.
    pub(crate) fn flow_on(&self, id: usize) -> u64 {
        self.arcs[id ^ 1].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        const UNSEEN: usize = usize::MAX;
        self.level.fill(UNSEEN);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &id in &self.adj[x] {
                let a = &self.arcs[id];
                if a.cap > 0 && self.level[a.to] == UNSEEN {
                    self.level[a.to] = self.level[x] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        self.level[t] != UNSEEN
    }

    fn dfs(&mut self, x: usize, t: usize, limit: u64) -> u64 {
        if x == t {
            return limit;
        }
        while self.next[x] < self.adj[x].len() {
            let id = self.adj[x][self.next[x]];
            let (to, cap) = (self.arcs[id].to, self.arcs[id].cap);
            if cap > 0 && self.level[to] == self.level[x] + 1 {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.arcs[id].cap -= pushed;
                    self.arcs[id ^ 1].cap += pushed;
                    return pushed;
                }
            }
            self.next[x] += 1;
        }
        0
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.next.fill(0);
            loop {
                let f = self.dfs(s, t, u64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network() {
        // s=0, t=3, two disjoint paths of capacity 2 and 3 plus a cross arc
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 2);
        net.add_arc(0, 2, 3);
        net.add_arc(1, 3, 3);
        net.add_arc(2, 3, 1);
        net.add_arc(2, 1, 5);
        assert_eq!(net.max_flow(0, 3), 4);
    }
}
