//! Naive automorphism search and canonical forms for very small graphs.

use rustc_hash::FxHashSet;

use crate::graph::{orbits_of_generators, Graph, Perm};

/// Graphs up to this many vertices get their orbits computed by search.
pub const SEARCH_LIMIT: usize = 10;

/// Finds an automorphism with `from -> to`, if one exists.
fn automorphism_mapping(g: &Graph, from: usize, to: usize) -> Option<Perm> {
    let n = g.n();
    if g.degree(from) != g.degree(to) {
        return None;
    }
    // assignment order: BFS from `from`, then any leftovers
    let mut order = vec![from];
    let mut seen = 1u32 << from;
    let mut i = 0;
    while order.len() < n {
        if i < order.len() {
            let mut nb = g.neighbors(order[i]) & !seen;
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                seen |= 1 << w;
                order.push(w);
            }
            i += 1;
        } else {
            let w = (!seen & g.all_vertices()).trailing_zeros() as usize;
            seen |= 1 << w;
            order.push(w);
        }
    }
    let mut image = vec![u8::MAX; n];
    image[from] = to as u8;
    fn extend(g: &Graph, order: &[usize], depth: usize, image: &mut [u8], used: u32) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for cand in 0..g.n() {
            if used & (1 << cand) != 0 || g.degree(cand) != g.degree(v) {
                continue;
            }
            let consistent = order[..depth]
                .iter()
                .all(|&w| g.has_edge(v, w) == g.has_edge(cand, image[w] as usize));
            if consistent {
                image[v] = cand as u8;
                if extend(g, order, depth + 1, image, used | (1 << cand)) {
                    return true;
                }
            }
        }
        image[v] = u8::MAX;
        false
    }
    extend(g, &order, 1, &mut image, 1 << to).then_some(image)
}

/// Orbit partition by pairwise automorphism search, plus the witnessing
/// automorphisms as a generating set.
pub fn search_orbits(g: &Graph) -> (Vec<Vec<usize>>, Vec<Perm>) {
    let n = g.n();
    let identity: Perm = (0..n as u8).collect();
    let mut gens: Vec<Perm> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if orbits_of_generators(n, &gens).iter().any(|o| o.contains(&u) && o.contains(&v)) {
                continue;
            }
            if let Some(p) = automorphism_mapping(g, u, v) {
                if p != identity && !gens.contains(&p) {
                    gens.push(p);
                }
            }
        }
    }
    (orbits_of_generators(n, &gens), gens)
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    // i < j; row-major upper triangle
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Canonical code: the maximum upper-triangle bit string over all relabelings
/// that list vertices by non-increasing degree. Valid for `n <= 11`.
pub fn canonical_code(n: usize, adj: &[u32]) -> u64 {
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
    let degree_at: Vec<u32> = by_degree.iter().map(|&v| adj[v].count_ones()).collect();
    let mut best = 0u64;
    let mut placed = vec![0usize; n];
    fn go(n: usize, adj: &[u32], degree_at: &[u32], pos: usize, used: u32, placed: &mut [usize], best: &mut u64) {
        if pos == n {
            let mut code = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    if adj[placed[i]] & (1 << placed[j]) != 0 {
                        code |= 1 << pair_index(n, i, j);
                    }
                }
            }
            *best = (*best).max(code);
            return;
        }
        for v in 0..n {
            if used & (1 << v) == 0 && adj[v].count_ones() == degree_at[pos] {
                placed[pos] = v;
                go(n, adj, degree_at, pos + 1, used | (1 << v), placed, best);
            }
        }
    }
    go(n, adj, &degree_at, 0, 0, &mut placed, &mut best);
    best
}

fn decode_code(n: usize, code: u64) -> Vec<u32> {
    let mut adj = vec![0u32; n];
    for i in 0..n {
        for j in i + 1..n {
            if code & (1 << pair_index(n, i, j)) != 0 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

/// All graphs on `n` vertices up to isomorphism (connected or not), as
/// adjacency masks in canonical labeling. Built by adding one vertex at a time
/// with every possible neighborhood; deleting the last vertex of any graph
/// lands in the previous level, so nothing is missed.
pub fn all_graphs_up_to_iso(n: usize) -> Vec<Vec<u32>> {
    let mut level: Vec<u64> = vec![0];
    for m in 1..n {
        let mut seen = FxHashSet::default();
        let mut next = Vec::new();
        for &code in &level {
            let base = decode_code(m, code);
            for subset in 0u32..(1 << m) {
                let mut adj = base.clone();
                adj.push(subset);
                for (u, a) in adj.iter_mut().enumerate().take(m) {
                    if subset & (1 << u) != 0 {
                        *a |= 1 << m;
                    }
                }
                let c = canonical_code(m + 1, &adj);
                if seen.insert(c) {
                    next.push(c);
                }
            }
        }
        next.sort_unstable();
        level = next;
    }
    level.into_iter().map(|c| decode_code(n, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    #[test]
    fn all_graph_counts() {
        // graphs on 1..=5 vertices: 1, 2, 4, 11, 34
        let counts: Vec<usize> = (1..=5).map(|n| all_graphs_up_to_iso(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34]);
    }

    #[test]
    fn canonical_code_is_relabeling_invariant() {
        let p4 = graph::path(4).unwrap();
        let relabeled = Graph::from_edges(4, &[(2, 0), (0, 3), (3, 1)], "p4'").unwrap();
        assert_eq!(canonical_code(4, p4.adjacency()), canonical_code(4, relabeled.adjacency()));
        let star = graph::star(3).unwrap();
        assert_ne!(canonical_code(4, p4.adjacency()), canonical_code(4, star.adjacency()));
    }

    #[test]
    fn searched_orbits_match_declared() {
        for spec in ["path:5", "cycle:6", "star:4", "biclique:2,3", "complete-minus-edge:5", "caterpillar:3,1,0,1"] {
            let g = graph::parse_graph_spec(spec).unwrap();
            let (mut searched, gens) = search_orbits(&g);
            searched.sort();
            assert_eq!(searched, graph::vertex_orbits(&g), "{spec}");
            assert!(gens.iter().all(|p| g.is_automorphism(p)));
        }
    }
}
