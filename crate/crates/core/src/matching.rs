//! Maximum bipartite matching (Hopcroft-Karp).

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Size of a maximum matching in the bipartite graph where left vertex `u`
/// is adjacent to the right vertices `adj[u]` (all `< right`).
pub fn maximum_matching(adj: &[Vec<usize>], right: usize) -> usize {
    let left = adj.len();
    let mut match_l = vec![FREE; left];
    let mut match_r = vec![FREE; right];
    let mut layer = vec![0usize; left];
    let mut size = 0;
    loop {
        // BFS from all free left vertices
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u] == FREE {
                layer[u] = 0;
                queue.push_back(u);
            } else {
                layer[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if layer[w] == usize::MAX {
                    layer[w] = layer[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return size;
        }
        for u in 0..left {
            if match_l[u] == FREE && augment(u, adj, &mut match_l, &mut match_r, &mut layer) {
                size += 1;
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    layer: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = match_r[v];
        if w == FREE || (layer[w] == layer[u] + 1 && augment(w, adj, match_l, match_r, layer)) {
            match_l[u] = v;
            match_r[v] = u;
            return true;
        }
    }
    layer[u] = usize::MAX;
    false
}

/// Incrementally maintained matching where left vertices are added one at a
/// time and kept only if the matching can be grown to cover them (Kuhn's
/// augmenting path search). Right vertices are arbitrary `u32` labels.
#[derive(Debug, Clone, Default)]
pub(crate) struct IncrementalMatching {
    adj: Vec<Vec<u32>>,
    owner: std::collections::HashMap<u32, usize>,
}

impl IncrementalMatching {
    pub(crate) fn len(&self) -> usize {
        self.adj.len()
    }

    /// Adds a left vertex with the given neighbours if a matching saturating
    /// every kept vertex plus this one exists. Returns whether it was kept.
    pub(crate) fn try_add(&mut self, labels: &[u32]) -> bool {
        let u = self.adj.len();
        self.adj.push(labels.to_vec());
        let mut visited = std::collections::HashSet::new();
        if self.kuhn(u, &mut visited) {
            true
        } else {
            self.adj.pop();
            false
        }
    }

    fn kuhn(&mut self, u: usize, visited: &mut std::collections::HashSet<u32>) -> bool {
        for i in 0..self.adj[u].len() {
            let v = self.adj[u][i];
            if !visited.insert(v) {
                continue;
            }
            let prev = self.owner.get(&v).copied();
            if prev.is_none() || self.kuhn(prev.unwrap(), visited) {
                self.owner.insert(v, u);
                return true;
            }
        }
        false
    }
}
