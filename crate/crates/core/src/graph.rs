//! Simple undirected graphs on at most 32 vertices, the family constructors
//! used throughout the solver, and a few small exact invariants.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Largest supported vertex count. A vertex set fits in one `u32`.
pub const MAX_VERTICES: usize = 32;

/// A vertex permutation: `perm[v]` is the image of `v`.
pub type Perm = Vec<u8>;

/// Declared symmetry of a graph: an orbit partition together with a set of
/// automorphisms generating it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub orbits: Vec<Vec<usize>>,
    pub generators: Vec<Perm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<u32>,
    label: String,
    symmetry: Option<Symmetry>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], label: impl Into<String>) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::VertexCount(n));
        }
        let mut adj = vec![0u32; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::GraphSpec(format!("edge {u}-{v} out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(Graph { n, adj, label: label.into(), symmetry: None })
    }

    /// Attaches declared symmetry data after checking it.
    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Result<Self> {
        self.validate_symmetry(&symmetry)?;
        self.symmetry = Some(symmetry);
        Ok(self)
    }

    fn validate_symmetry(&self, sym: &Symmetry) -> Result<()> {
        let mut seen = 0u64;
        for orbit in &sym.orbits {
            for &v in orbit {
                if v >= self.n || seen & (1 << v) != 0 {
                    return Err(Error::Symmetry(format!("orbit partition is not a partition (vertex {v})")));
                }
                seen |= 1 << v;
            }
        }
        if seen != (1u64 << self.n) - 1 {
            return Err(Error::Symmetry("orbit partition does not cover every vertex".into()));
        }
        for g in &sym.generators {
            if !self.is_automorphism(g) {
                return Err(Error::Symmetry(format!("generator {g:?} is not an automorphism")));
            }
            for orbit in &sym.orbits {
                let mask = orbit.iter().fold(0u64, |m, &v| m | 1 << v);
                if orbit.iter().any(|&v| mask & (1 << g[v]) == 0) {
                    return Err(Error::Symmetry(format!("generator {g:?} does not preserve orbit {orbit:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> u32 {
        self.adj[v]
    }

    pub fn adjacency(&self) -> &[u32] {
        &self.adj
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] & (1 << v) != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn symmetry(&self) -> Option<&Symmetry> {
        self.symmetry.as_ref()
    }

    /// Bit mask with one bit per vertex.
    #[inline]
    pub fn all_vertices(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    pub fn is_automorphism(&self, perm: &[u8]) -> bool {
        if perm.len() != self.n {
            return false;
        }
        let mut image = 0u64;
        for &p in perm {
            if p as usize >= self.n {
                return false;
            }
            image |= 1 << p;
        }
        if image.count_ones() as usize != self.n {
            return false;
        }
        (0..self.n).all(|u| {
            (0..self.n).all(|v| self.has_edge(u, v) == self.has_edge(perm[u] as usize, perm[v] as usize))
        })
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == self.all_vertices()
    }

    /// Vertices `u != v` with `N(u) \ {v} = N(v) \ {u}`. Swapping two twins is
    /// always an automorphism.
    pub fn are_twins(&self, u: usize, v: usize) -> bool {
        u != v && (self.adj[u] & !(1 << v)) == (self.adj[v] & !(1 << u))
    }

    /// Partition into twin classes, each listed in ascending order, classes
    /// ordered by their smallest vertex. Any permutation inside a class is an
    /// automorphism.
    pub fn twin_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        'outer: for v in 0..self.n {
            for class in classes.iter_mut() {
                if class.iter().all(|&u| self.are_twins(u, v)) {
                    class.push(v);
                    continue 'outer;
                }
            }
            classes.push(vec![v]);
        }
        classes
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n={}, m={})", self.label, self.n, self.edge_count())
    }
}

fn transposition(n: usize, a: usize, b: usize) -> Perm {
    let mut p: Perm = (0..n as u8).collect();
    p.swap(a, b);
    p
}

/// Generators of the full symmetric group on `block`.
fn symmetric_generators(n: usize, block: &[usize]) -> Vec<Perm> {
    if block.len() < 2 {
        return Vec::new();
    }
    let mut gens = vec![transposition(n, block[0], block[1])];
    if block.len() > 2 {
        let mut cycle: Perm = (0..n as u8).collect();
        for (i, &v) in block.iter().enumerate() {
            cycle[v] = block[(i + 1) % block.len()] as u8;
        }
        gens.push(cycle);
    }
    gens
}

/// Orbits of the group generated by `gens`, via union-find.
pub fn orbits_of_generators(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let nx = p[x];
            p[x] = r;
            x = nx;
        }
        r
    }
    for g in gens {
        for v in 0..n {
            let a = find(&mut parent, v);
            let b = find(&mut parent, g[v] as usize);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if root_slot[r] == usize::MAX {
            root_slot[r] = orbits.len();
            orbits.push(Vec::new());
        }
        orbits[root_slot[r]].push(v);
    }
    orbits
}

fn with_generated_symmetry(g: Graph, generators: Vec<Perm>) -> Result<Graph> {
    let orbits = orbits_of_generators(g.n, &generators);
    g.with_symmetry(Symmetry { orbits, generators })
}

pub fn path(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    let g = Graph::from_edges(n, &edges, format!("path:{n}"))?;
    let reversal: Perm = (0..n).rev().map(|v| v as u8).collect();
    with_generated_symmetry(g, vec![reversal])
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::GraphSpec(format!("cycle needs at least 3 vertices, got {n}")));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let g = Graph::from_edges(n, &edges, format!("cycle:{n}"))?;
    let rotation: Perm = (0..n).map(|v| ((v + 1) % n) as u8).collect();
    let reflection: Perm = (0..n).map(|v| ((n - v) % n) as u8).collect();
    with_generated_symmetry(g, vec![rotation, reflection])
}

pub fn complete(n: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    let g = Graph::from_edges(n, &edges, format!("complete:{n}"))?;
    let all: Vec<usize> = (0..n).collect();
    with_generated_symmetry(g, symmetric_generators(n, &all))
}

/// `K_n` with the edge `0-1` removed.
pub fn complete_minus_edge(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::GraphSpec(format!("complete-minus-edge needs at least 2 vertices, got {n}")));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if (u, v) != (0, 1) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges(n, &edges, format!("complete-minus-edge:{n}"))?;
    let mut gens = symmetric_generators(n, &[0, 1]);
    let rest: Vec<usize> = (2..n).collect();
    gens.extend(symmetric_generators(n, &rest));
    with_generated_symmetry(g, gens)
}

/// `K_{1,n}`: vertex 0 is the center, vertices `1..=n` the leaves.
pub fn star(leaves: usize) -> Result<Graph> {
    biclique(1, leaves).map(|mut g| {
        g.label = format!("star:{leaves}");
        g
    })
}

/// `K_{m,n}` with sides `0..m` and `m..m+n`.
pub fn biclique(m: usize, n: usize) -> Result<Graph> {
    if m == 0 || n == 0 {
        return Err(Error::GraphSpec("biclique sides must be nonempty".into()));
    }
    let total = m + n;
    let mut edges = Vec::new();
    for a in 0..m {
        for b in m..total {
            edges.push((a, b));
        }
    }
    let g = Graph::from_edges(total, &edges, format!("biclique:{m},{n}"))?;
    let left: Vec<usize> = (0..m).collect();
    let right: Vec<usize> = (m..total).collect();
    let mut gens = symmetric_generators(total, &left);
    gens.extend(symmetric_generators(total, &right));
    if m == n {
        let swap: Perm = (0..total).map(|v| ((v + m) % total) as u8).collect();
        gens.push(swap);
    }
    with_generated_symmetry(g, gens)
}

/// A spine `0..s` where spine vertex `i` carries `leaves[i]` pendant vertices.
pub fn caterpillar(leaves: &[usize]) -> Result<Graph> {
    let s = leaves.len();
    if s == 0 {
        return Err(Error::GraphSpec("caterpillar needs a spine".into()));
    }
    let total = s + leaves.iter().sum::<usize>();
    if total > MAX_VERTICES {
        return Err(Error::VertexCount(total));
    }
    let mut edges: Vec<_> = (1..s).map(|i| (i - 1, i)).collect();
    let mut blocks = Vec::with_capacity(s);
    let mut next = s;
    for (i, &l) in leaves.iter().enumerate() {
        let block: Vec<usize> = (next..next + l).collect();
        edges.extend(block.iter().map(|&leaf| (i, leaf)));
        next += l;
        blocks.push(block);
    }
    let spec = leaves.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
    let g = Graph::from_edges(total, &edges, format!("caterpillar:{s},{spec}"))?;
    let mut gens: Vec<Perm> = blocks.iter().flat_map(|b| symmetric_generators(total, b)).collect();
    let palindromic = (0..s).all(|i| leaves[i] == leaves[s - 1 - i]);
    if palindromic && s > 1 {
        let mut rev: Perm = (0..total as u8).collect();
        for i in 0..s {
            let j = s - 1 - i;
            rev[i] = j as u8;
            for (a, b) in blocks[i].iter().zip(&blocks[j]) {
                rev[*a] = *b as u8;
            }
        }
        gens.push(rev);
    }
    with_generated_symmetry(g, gens)
}

/// `rows x cols` grid; vertex `(i, j)` is `i * cols + j`.
pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::GraphSpec("grid dimensions must be positive".into()));
    }
    let total = rows * cols;
    if total > MAX_VERTICES {
        return Err(Error::VertexCount(total));
    }
    let idx = |i: usize, j: usize| i * cols + j;
    let mut edges = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if j + 1 < cols {
                edges.push((idx(i, j), idx(i, j + 1)));
            }
            if i + 1 < rows {
                edges.push((idx(i, j), idx(i + 1, j)));
            }
        }
    }
    let g = Graph::from_edges(total, &edges, format!("grid:{rows},{cols}"))?;
    let mut flip_rows: Perm = vec![0; total];
    let mut flip_cols: Perm = vec![0; total];
    for i in 0..rows {
        for j in 0..cols {
            flip_rows[idx(i, j)] = idx(rows - 1 - i, j) as u8;
            flip_cols[idx(i, j)] = idx(i, cols - 1 - j) as u8;
        }
    }
    let mut gens = vec![flip_rows, flip_cols];
    if rows == cols {
        let mut transpose: Perm = vec![0; total];
        for i in 0..rows {
            for j in 0..cols {
                transpose[idx(i, j)] = idx(j, i) as u8;
            }
        }
        gens.push(transpose);
    }
    with_generated_symmetry(g, gens)
}

/// Parses an edge-list text: one `u v` pair per line, 0-based, `#` starts a
/// comment line. The vertex count is one more than the largest index.
pub fn parse_edge_list(text: &str, label: impl Into<String>) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::GraphSpec(format!("line {}: expected `u v`, got {line:?}", lineno + 1)))
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::GraphSpec(format!("line {}: trailing tokens in {line:?}", lineno + 1)));
        }
        n = n.max(u + 1).max(v + 1);
        if n > MAX_VERTICES {
            return Err(Error::VertexCount(n));
        }
        edges.push((u, v));
    }
    let g = Graph::from_edges(n, &edges, label)?;
    Ok(attach_searched_symmetry(g))
}

/// Attaches orbits found by automorphism search when the graph is small
/// enough, otherwise leaves the graph without symmetry data.
pub fn attach_searched_symmetry(g: Graph) -> Graph {
    if g.n > crate::automorphism::SEARCH_LIMIT {
        return g;
    }
    let (orbits, generators) = crate::automorphism::search_orbits(&g);
    g.with_symmetry(Symmetry { orbits, generators })
        .expect("searched automorphisms are valid by construction")
}

fn parse_usize_list(args: &str, what: &str) -> Result<Vec<usize>> {
    args.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::GraphSpec(format!("{what}: bad number {t:?}")))
        })
        .collect()
}

fn one_arg(args: &str, family: &str) -> Result<usize> {
    match parse_usize_list(args, family)?.as_slice() {
        [n] => Ok(*n),
        _ => Err(Error::GraphSpec(format!("{family} takes exactly one size"))),
    }
}

/// Parses the graph mini-language (`path:n`, `cycle:n`, `complete:n`,
/// `complete-minus-edge:n`, `star:n`, `biclique:m,n`, `caterpillar:s,l1,..,ls`,
/// `grid:r,c`, `file:PATH`).
pub fn parse_graph_spec(spec: &str) -> Result<Graph> {
    let (family, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::GraphSpec(format!("expected FAMILY:ARGS, got {spec:?}")))?;
    let check = |n: usize| if n == 0 || n > MAX_VERTICES { Err(Error::VertexCount(n)) } else { Ok(n) };
    match family {
        "path" => path(check(one_arg(args, family)?)?),
        "cycle" => cycle(check(one_arg(args, family)?)?),
        "complete" => complete(check(one_arg(args, family)?)?),
        "complete-minus-edge" => complete_minus_edge(check(one_arg(args, family)?)?),
        "star" => star(check(one_arg(args, family)? + 1)? - 1),
        "biclique" => match parse_usize_list(args, family)?.as_slice() {
            [m, n] => {
                check(m + n)?;
                biclique(*m, *n)
            }
            _ => Err(Error::GraphSpec("biclique takes m,n".into())),
        },
        "caterpillar" => {
            let nums = parse_usize_list(args, family)?;
            match nums.split_first() {
                Some((&s, leaves)) if s == leaves.len() && s > 0 => caterpillar(leaves),
                _ => Err(Error::GraphSpec("caterpillar takes s,l1,...,ls".into())),
            }
        }
        "grid" => match parse_usize_list(args, family)?.as_slice() {
            [r, c] => {
                check(r * c)?;
                grid(*r, *c)
            }
            _ => Err(Error::GraphSpec("grid takes r,c".into())),
        },
        "file" => {
            let text = std::fs::read_to_string(Path::new(args))
                .map_err(|e| Error::GraphFile { path: args.to_string(), source: e })?;
            parse_edge_list(&text, spec)
        }
        other => Err(Error::GraphSpec(format!("unknown graph family {other:?}"))),
    }
}

pub fn max_degree(g: &Graph) -> usize {
    (0..g.n).map(|v| g.degree(v)).max().unwrap_or(0)
}

/// Exact chromatic number by trying `k = 1, 2, ...` with a backtracking
/// colorer that always branches on the most constrained vertex.
pub fn chromatic_number(g: &Graph) -> usize {
    (1..=g.n).find(|&k| colorable(g, k)).unwrap_or(g.n)
}

fn colorable(g: &Graph, k: usize) -> bool {
    fn go(g: &Graph, k: usize, colors: &mut [u8], remaining: u32) -> bool {
        if remaining == 0 {
            return true;
        }
        // most saturated uncolored vertex first
        let mut best = usize::MAX;
        let mut best_forbidden = 0u64;
        let mut best_sat = -1i32;
        let mut rest = remaining;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let forbidden = neighbor_colors(g, colors, v);
            let sat = forbidden.count_ones() as i32;
            if sat > best_sat {
                best = v;
                best_sat = sat;
                best_forbidden = forbidden;
            }
        }
        // Only one previously unused color needs to be tried.
        let used_max = colors.iter().copied().max().unwrap_or(0) as usize;
        for c in 1..=k.min(used_max + 1) {
            if best_forbidden & (1 << c) == 0 {
                colors[best] = c as u8;
                if go(g, k, colors, remaining & !(1 << best)) {
                    return true;
                }
                colors[best] = 0;
            }
        }
        false
    }
    let mut colors = vec![0u8; g.n];
    go(g, k, &mut colors, g.all_vertices())
}

fn neighbor_colors(g: &Graph, colors: &[u8], v: usize) -> u64 {
    let mut mask = 0u64;
    let mut nb = g.adj[v];
    while nb != 0 {
        let u = nb.trailing_zeros() as usize;
        nb &= nb - 1;
        mask |= 1 << colors[u];
    }
    mask & !1
}

/// Degeneracy plus one, by repeatedly deleting a minimum-degree vertex.
pub fn coloring_number(g: &Graph) -> usize {
    let mut alive = g.all_vertices();
    let mut degeneracy = 0;
    while alive != 0 {
        let mut rest = alive;
        let mut pick = 0;
        let mut pick_deg = usize::MAX;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (g.adj[v] & alive).count_ones() as usize;
            if d < pick_deg {
                pick = v;
                pick_deg = d;
            }
        }
        degeneracy = degeneracy.max(pick_deg);
        alive &= !(1 << pick);
    }
    degeneracy + 1
}

/// Orbit partition: declared data when present, otherwise automorphism
/// search for `n <= 10`, otherwise the discrete partition.
pub fn vertex_orbits(g: &Graph) -> Vec<Vec<usize>> {
    if let Some(sym) = &g.symmetry {
        let mut orbits = sym.orbits.clone();
        orbits.iter_mut().for_each(|o| o.sort_unstable());
        orbits.sort();
        return orbits;
    }
    if g.n <= crate::automorphism::SEARCH_LIMIT {
        return crate::automorphism::search_orbits(g).0;
    }
    (0..g.n).map(|v| vec![v]).collect()
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices, `1 <= n <= 7`.
pub fn enumerate_connected_graphs(n: usize) -> Result<Vec<Graph>> {
    if !(1..=7).contains(&n) {
        return Err(Error::EnumerationRange(n));
    }
    let classes = crate::automorphism::all_graphs_up_to_iso(n);
    let mut out = Vec::new();
    for adj in classes {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if adj[u] & (1 << v) != 0 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, &edges, "")?;
        if g.is_connected() {
            let label = edges_label(n, &edges);
            let mut g = attach_searched_symmetry(g);
            g.label = label;
            out.push(g);
        }
    }
    Ok(out)
}

/// `graph{n}[u-v,...]`, a stable label for enumerated graphs.
pub fn edges_label(n: usize, edges: &[(usize, usize)]) -> String {
    let body = edges.iter().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(",");
    format!("graph{n}[{body}]")
}
