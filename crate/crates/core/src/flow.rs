//! Integral maximum flow (Dinic) and Hopcroft-Karp matching.
//!
//! Both scan adjacency lists in insertion order, so results are a pure
//! function of the order in which arcs were added.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: u64,
    rev: usize,
}

/// Residual network for Dinic's algorithm.
#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    graph: Vec<Vec<Arc>>,
    level: Vec<i32>,
    next: Vec<usize>,
}

/// Handle to an arc added with [`FlowNetwork::add_arc`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArcId {
    from: usize,
    index: usize,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            graph: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            next: vec![0; nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> ArcId {
        let index = self.graph[from].len();
        let rev_index = self.graph[to].len() + usize::from(from == to);
        self.graph[from].push(Arc { to, cap, rev: rev_index });
        self.graph[to].push(Arc { to: from, cap: 0, rev: index });
        ArcId { from, index }
    }

    /// Flow currently carried by an arc.
    pub fn flow(&self, id: ArcId) -> u64 {
        let arc = self.graph[id.from][id.index];
        self.graph[arc.to][arc.rev].cap
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for arc in &self.graph[v] {
                if arc.cap > 0 && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: u64) -> u64 {
        if v == t {
            return pushed;
        }
        while self.next[v] < self.graph[v].len() {
            let i = self.next[v];
            let Arc { to, cap, rev } = self.graph[v][i];
            if cap > 0 && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, pushed.min(cap));
                if d > 0 {
                    self.graph[v][i].cap -= d;
                    self.graph[to][rev].cap += d;
                    return d;
                }
            }
            self.next[v] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.next.iter_mut().for_each(|x| *x = 0);
            loop {
                let f = self.dfs(s, t, u64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network (the source side of
    /// a minimum cut once `max_flow` has run).
    pub fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.graph.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for arc in &self.graph[v] {
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

/// Maximum matching in a bipartite graph given as adjacency lists from left
/// vertices to right vertices. Returns the right mate of every left vertex.
pub(crate) fn hopcroft_karp(n_right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0u32; n_left];
    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        let mut found = false;
        for u in 0..n_left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == FREE {
                augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut it);
            }
        }
    }
    match_l.into_iter().map(|m| (m != FREE).then_some(m)).collect()
}

fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [u32],
    it: &mut [usize],
) -> bool {
    const FREE: usize = usize::MAX;
    // iterative DFS along the layered graph
    let mut path: Vec<usize> = vec![root];
    while let Some(&u) = path.last() {
        if it[u] >= adj[u].len() {
            dist[u] = u32::MAX;
            path.pop();
            continue;
        }
        let v = adj[u][it[u]];
        let w = match_r[v];
        if w == FREE {
            // flip the path
            for &x in &path {
                let y = adj[x][it[x]];
                match_l[x] = y;
                match_r[y] = x;
            }
            return true;
        }
        if dist[w] != u32::MAX && dist[w] == dist[u] + 1 {
            path.push(w);
        } else {
            it[u] += 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        let mut g = FlowNetwork::new(4);
        let a = g.add_arc(0, 1, 3);
        g.add_arc(0, 2, 2);
        g.add_arc(1, 2, 5);
        g.add_arc(1, 3, 2);
        g.add_arc(2, 3, 3);
        assert_eq!(g.max_flow(0, 3), 5);
        assert!(g.flow(a) <= 3);
        let side = g.reachable(0);
        assert!(side[0] && !side[3]);
    }

    #[test]
    fn matching_on_cycle() {
        // 6-cycle has a perfect matching
        let adj = vec![vec![0, 1], vec![1, 2], vec![2, 0]];
        let m = hopcroft_karp(3, &adj);
        let mut used: Vec<usize> = m.iter().map(|x| x.unwrap()).collect();
        used.sort_unstable();
        assert_eq!(used, vec![0, 1, 2]);
    }
}
