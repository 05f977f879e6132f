//! Reverse Cuthill–McKee ordering.

use std::collections::VecDeque;

/// RCM permutation of a symmetric graph given as adjacency lists.
///
/// Returns `perm` with `perm[new] = old`. Each connected component starts from
/// its unvisited vertex of lowest degree (lowest index on ties); neighbours are
/// visited in order of increasing degree, then index.
pub fn rcm_ordering(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let degree: Vec<usize> = adjacency
        .iter()
        .enumerate()
        .map(|(i, a)| a.iter().filter(|j| **j != i).count())
        .collect();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let mut nbrs = Vec::new();
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(adjacency[v].iter().copied().filter(|&j| !visited[j]));
            nbrs.sort_by_key(|&j| (degree[j], j));
            nbrs.dedup();
            for &j in &nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Maximum `|i - j|` over edges after relabelling with `perm` (`perm[new] = old`).
pub fn bandwidth(adjacency: &[Vec<usize>], perm: &[usize]) -> usize {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut bw = 0;
    for (i, a) in adjacency.iter().enumerate() {
        for &j in a {
            bw = bw.max(inv[i].abs_diff(inv[j]));
        }
    }
    bw
}
