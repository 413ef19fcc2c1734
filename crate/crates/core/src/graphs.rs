//! Regular-graph construction, validation and edge-list serialization.
//!
//! Every graph handled by this crate is a simple undirected `r`-regular
//! graph on `n` vertices, stored as a flat adjacency array with sorted
//! neighbour lists. Graphs are immutable after construction, so they can
//! be shared freely between concurrent trial runners.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Restart cap for the configuration-model generator.
pub const DEFAULT_RETRY_BUDGET: usize = 10_000;

/// Simple undirected `r`-regular graph with 0-indexed dense vertices.
///
/// Neighbour lists are stored sorted ascending in one flat array, so the
/// neighbours of `u` are `adj[u * r .. (u + 1) * r]`. Sorted order makes
/// seeded neighbour sampling deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    r: usize,
    adj: Vec<u32>,
}

impl Graph {
    /// Builds a graph from per-vertex neighbour lists, validating all
    /// invariants: exactly `r` distinct neighbours per vertex, no loops,
    /// symmetric adjacency.
    pub fn from_adjacency(n: usize, r: usize, lists: Vec<Vec<u32>>) -> Result<Self> {
        if lists.len() != n {
            return Err(Error::InvalidParameter(format!(
                "adjacency has {} lists for {} vertices",
                lists.len(),
                n
            )));
        }
        let mut adj = Vec::with_capacity(n * r);
        for (u, mut list) in lists.into_iter().enumerate() {
            if list.len() != r {
                return Err(Error::NotRegular {
                    vertex: u,
                    degree: list.len(),
                    expected: r,
                });
            }
            list.sort_unstable();
            for w in list.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::NotSimple(format!(
                        "parallel edge {{{}, {}}}",
                        u, w[0]
                    )));
                }
            }
            for &v in &list {
                if v as usize >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: v as usize,
                        n,
                    });
                }
                if v as usize == u {
                    return Err(Error::NotSimple(format!("self-loop at vertex {u}")));
                }
            }
            adj.extend_from_slice(&list);
        }
        let g = Graph { n, r, adj };
        for u in 0..n {
            for &v in g.neighbors(u) {
                if !g.has_edge(v as usize, u) {
                    return Err(Error::NotSimple(format!(
                        "asymmetric adjacency: {u} lists {v} but not vice versa"
                    )));
                }
            }
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.r / 2
    }

    /// Sorted neighbour list of `u`.
    #[inline]
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adj[u * self.r..(u + 1) * self.r]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Number of neighbours of `u` inside `set`.
    pub fn degree_into(&self, u: usize, set: &VertexSet) -> usize {
        self.neighbors(u)
            .iter()
            .filter(|&&v| set.contains(v as usize))
            .count()
    }

    /// Edges as `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }
}

/// Complete graph `K_n`, `r = n - 1`.
pub fn gen_complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "complete graph needs n >= 2, got {n}"
        )));
    }
    let lists = (0..n)
        .map(|u| (0..n as u32).filter(|&v| v as usize != u).collect())
        .collect();
    Graph::from_adjacency(n, n - 1, lists)
}

/// Cycle `C_n`, `r = 2`.
pub fn gen_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    let lists = (0..n)
        .map(|u| {
            vec![
                ((u + n - 1) % n) as u32,
                ((u + 1) % n) as u32,
            ]
        })
        .collect();
    Graph::from_adjacency(n, 2, lists)
}

/// `d`-dimensional hypercube, `n = 2^d`, `r = d`.
pub fn gen_hypercube(d: usize) -> Result<Graph> {
    if d < 1 {
        return Err(Error::InvalidParameter(format!(
            "hypercube needs d >= 1, got {d}"
        )));
    }
    if d > 24 {
        return Err(Error::InvalidParameter(format!(
            "hypercube dimension {d} too large"
        )));
    }
    let n = 1usize << d;
    let lists = (0..n)
        .map(|u| (0..d).map(|i| (u ^ (1 << i)) as u32).collect())
        .collect();
    Graph::from_adjacency(n, d, lists)
}

/// Petersen graph: outer 5-cycle, inner pentagram, five spokes.
pub fn gen_petersen() -> Graph {
    let mut lists = vec![Vec::new(); 10];
    for i in 0..5usize {
        let (a, b) = (i, (i + 1) % 5);
        lists[a].push(b as u32);
        lists[b].push(a as u32);
        let (c, d) = (5 + i, 5 + (i + 2) % 5);
        lists[c].push(d as u32);
        lists[d].push(c as u32);
        lists[i].push((i + 5) as u32);
        lists[i + 5].push(i as u32);
    }
    Graph::from_adjacency(10, 3, lists).expect("petersen construction is fixed")
}

/// Uniform simple `r`-regular graph via the configuration model.
///
/// Pairs degree stubs by a seeded shuffle and restarts from scratch on any
/// loop or parallel edge, then restarts again if the result is
/// disconnected. Full rejection keeps the distribution uniform over simple
/// connected outcomes. Deterministic given `seed`.
pub fn gen_random_regular(n: usize, r: usize, seed: u64) -> Result<Graph> {
    gen_random_regular_with_budget(n, r, seed, DEFAULT_RETRY_BUDGET)
}

pub fn gen_random_regular_with_budget(
    n: usize,
    r: usize,
    seed: u64,
    retry_budget: usize,
) -> Result<Graph> {
    if r < 3 || r > n.saturating_sub(1) {
        return Err(Error::InvalidParameter(format!(
            "degree r = {r} outside valid range 3 <= r <= n - 1 = {}",
            n.saturating_sub(1)
        )));
    }
    if n * r % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "n*r must be even, got n = {n}, r = {r}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<u32> = Vec::with_capacity(n * r);
    for u in 0..n as u32 {
        stubs.extend(std::iter::repeat(u).take(r));
    }
    'restart: for _ in 0..retry_budget {
        stubs.shuffle(&mut rng);
        let mut lists = vec![Vec::with_capacity(r); n];
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0] as usize, pair[1] as usize);
            if u == v || lists[u].contains(&(v as u32)) {
                continue 'restart;
            }
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
        let g = Graph::from_adjacency(n, r, lists)?;
        if is_connected(&g) {
            return Ok(g);
        }
    }
    Err(Error::RetryBudgetExhausted(retry_budget))
}

/// True iff one BFS component covers all vertices.
pub fn is_connected(g: &Graph) -> bool {
    let n = g.vertex_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                count += 1;
                queue.push_back(v as usize);
            }
        }
    }
    count == n
}

/// True iff the graph is 2-colorable.
pub fn is_bipartite(g: &Graph) -> bool {
    let n = g.vertex_count();
    let mut color = vec![u8::MAX; n];
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                let v = v as usize;
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return false;
                }
            }
        }
    }
    true
}

/// Reads the edge-list format: first line `n r`, then one `u v` edge per
/// line with `u < v`. Accepts disconnected graphs; rejects non-regular or
/// non-simple input.
pub fn load_graph(path: &Path) -> Result<Graph> {
    let file = std::fs::File::open(path)?;
    read_graph(BufReader::new(file))
}

pub fn read_graph<R: Read>(reader: R) -> Result<Graph> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate();
    let (n, r) = match lines.next() {
        Some((_, line)) => {
            let line = line?;
            let mut it = line.split_whitespace();
            let n: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Malformed {
                    line: 1,
                    message: "expected header \"n r\"".into(),
                })?;
            let r: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Malformed {
                    line: 1,
                    message: "expected header \"n r\"".into(),
                })?;
            if it.next().is_some() {
                return Err(Error::Malformed {
                    line: 1,
                    message: "trailing tokens after \"n r\" header".into(),
                });
            }
            (n, r)
        }
        None => {
            return Err(Error::Malformed {
                line: 1,
                message: "empty file".into(),
            })
        }
    };
    let mut lists = vec![Vec::with_capacity(r); n];
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |t: Option<&str>| -> Result<usize> {
            t.and_then(|t| t.parse().ok()).ok_or(Error::Malformed {
                line: idx + 1,
                message: format!("expected edge \"u v\", got {line:?}"),
            })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Malformed {
                line: idx + 1,
                message: "trailing tokens after edge".into(),
            });
        }
        if u >= v {
            return Err(Error::Malformed {
                line: idx + 1,
                message: format!("edge must satisfy u < v, got {u} {v}"),
            });
        }
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if lists[u].contains(&(v as u32)) {
            return Err(Error::NotSimple(format!("duplicate edge {{{u}, {v}}}")));
        }
        lists[u].push(v as u32);
        lists[v].push(u as u32);
    }
    Graph::from_adjacency(n, r, lists)
}

/// Writes the edge-list format with LF line endings.
pub fn save_graph(g: &Graph, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_graph(g, BufWriter::new(file))
}

pub fn write_graph<W: Write>(g: &Graph, mut writer: W) -> Result<()> {
    write!(writer, "{} {}\n", g.vertex_count(), g.degree())?;
    for (u, v) in g.edges() {
        write!(writer, "{u} {v}\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Subset of vertices as a fixed-width bit vector. The common state type
/// for both the COBRA active set and the BIPS infected set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for u in 0..n {
            s.insert(u);
        }
        s
    }

    pub fn singleton(n: usize, u: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(u);
        s
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut s = Self::empty(n);
        for &u in indices {
            s.insert(u);
        }
        s
    }

    /// Decodes vertex `i` from bit `i` of `mask`. Requires `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "mask encoding requires n <= 64");
        assert!(n == 64 || mask >> n == 0, "mask has bits >= n set");
        VertexSet {
            n,
            words: vec![mask],
        }
    }

    /// Bit-pattern encoding (vertex `i` maps to bit `i`); `None` if `n > 64`.
    pub fn as_mask(&self) -> Option<u64> {
        if self.n <= 64 {
            Some(self.words[0])
        } else {
            None
        }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, u: usize) -> bool {
        debug_assert!(u < self.n);
        self.words[u / 64] >> (u % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, u: usize) {
        debug_assert!(u < self.n);
        self.words[u / 64] |= 1 << (u % 64);
    }

    #[inline]
    pub fn remove(&mut self, u: usize) {
        debug_assert!(u < self.n);
        self.words[u / 64] &= !(1 << (u % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Ascending iterator over member vertices.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Vertices with at least one neighbour in `self` (inclusive
    /// neighbourhood).
    pub fn inclusive_neighborhood(&self, g: &Graph) -> VertexSet {
        let mut out = VertexSet::empty(self.n);
        for u in self.iter() {
            for &v in g.neighbors(u) {
                out.insert(v as usize);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_valid(g: &Graph) {
        let (n, r) = (g.vertex_count(), g.degree());
        for u in 0..n {
            let nb = g.neighbors(u);
            assert_eq!(nb.len(), r);
            assert!(nb.windows(2).all(|w| w[0] < w[1]), "sorted and distinct");
            assert!(!nb.contains(&(u as u32)), "no self-loop");
            for &v in nb {
                assert!(g.has_edge(v as usize, u), "symmetric");
            }
        }
        assert_eq!(g.edges().len(), n * r / 2);
    }

    #[test]
    fn complete_graphs() {
        let g = gen_complete(3).unwrap();
        assert_eq!((g.vertex_count(), g.degree()), (3, 2));
        assert_valid(&g);

        let g = gen_complete(4).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_valid(&g);

        assert!(gen_complete(1).is_err());
    }

    #[test]
    fn cycles() {
        let g = gen_cycle(4).unwrap();
        assert!(is_bipartite(&g));
        assert_valid(&g);

        let g = gen_cycle(5).unwrap();
        assert!(!is_bipartite(&g));
        assert_valid(&g);

        assert!(gen_cycle(2).is_err());
    }

    #[test]
    fn hypercubes() {
        let g = gen_hypercube(1).unwrap();
        assert_eq!((g.vertex_count(), g.degree()), (2, 1));

        let g = gen_hypercube(3).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 12));
        assert!(is_bipartite(&g));
        assert_valid(&g);

        // d = 2 is the 4-cycle up to isomorphism: same degree sequence and
        // edge count, bipartite, connected.
        let g = gen_hypercube(2).unwrap();
        assert_eq!((g.vertex_count(), g.degree()), (4, 2));
        assert!(is_bipartite(&g) && is_connected(&g));
    }

    #[test]
    fn petersen_shape_and_girth() {
        let g = gen_petersen();
        assert_eq!((g.vertex_count(), g.degree(), g.edge_count()), (10, 3, 15));
        assert!(is_connected(&g) && !is_bipartite(&g));
        assert_valid(&g);

        // Brute-force search: no 3-cycles (adjacent pairs share no common
        // neighbour) and no 4-cycles (no pair shares two), so girth >= 5;
        // 5-cycles exist by construction.
        for u in 0..10 {
            for v in 0..10 {
                if u == v {
                    continue;
                }
                let common = g
                    .neighbors(u)
                    .iter()
                    .filter(|w| g.neighbors(v).contains(w))
                    .count();
                if g.has_edge(u, v) {
                    assert_eq!(common, 0, "triangle through {{{u}, {v}}}");
                } else {
                    assert!(common <= 1, "4-cycle through {{{u}, {v}}}");
                }
            }
        }
    }

    #[test]
    fn random_regular_unique_k4() {
        // K_4 is the only 3-regular graph on 4 vertices.
        for seed in [0, 1, 99] {
            let g = gen_random_regular(4, 3, seed).unwrap();
            assert_eq!(g, gen_complete(4).unwrap());
        }
    }

    #[test]
    fn random_regular_odd_product_rejected() {
        let err = gen_random_regular(5, 3, 0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn random_regular_validates() {
        let g = gen_random_regular(100, 3, 1).unwrap();
        assert!(is_connected(&g));
        assert_valid(&g);
    }

    #[test]
    fn connectivity() {
        assert!(is_connected(&gen_complete(4).unwrap()));
        assert!(is_connected(&gen_hypercube(1).unwrap()));

        // Two disjoint triangles via the file loader.
        let text = "6 2\n0 1\n0 2\n1 2\n3 4\n3 5\n4 5\n";
        let g = read_graph(text.as_bytes()).unwrap();
        assert!(!is_connected(&g));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_complete(3).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "3 2\n0 1\n0 2\n1 2\n");
        let g2 = read_graph(buf.as_slice()).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn load_rejects_degree_mismatch() {
        // Path on 3 vertices: degrees 1, 2, 1.
        let text = "3 2\n0 1\n1 2\n";
        let err = read_graph(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NotRegular { .. }), "{err}");
        assert!(err.to_string().contains("not regular"));
    }

    #[test]
    fn load_rejects_duplicate_edge() {
        let text = "3 2\n0 1\n0 1\n0 2\n1 2\n";
        let err = read_graph(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NotSimple(_)), "{err}");
        assert!(err.to_string().contains("not simple"));
    }

    #[test]
    fn load_rejects_unordered_edge() {
        let text = "3 2\n1 0\n0 2\n1 2\n";
        assert!(matches!(
            read_graph(text.as_bytes()),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn vertex_set_basics() {
        let mut s = VertexSet::empty(130);
        assert!(s.is_empty());
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        s.remove(64);
        assert!(!s.contains(64));
        assert_eq!(s.len(), 2);

        let full = VertexSet::full(10);
        assert!(full.is_full());
        assert_eq!(full.as_mask(), Some(0x3ff));
        assert_eq!(VertexSet::from_mask(10, 0x3ff), full);
    }

    #[test]
    fn inclusive_neighborhood_matches_definition() {
        let g = gen_petersen();
        let a = VertexSet::from_indices(10, &[0]);
        let gamma = a.inclusive_neighborhood(&g);
        assert_eq!(
            gamma.iter().collect::<Vec<_>>(),
            g.neighbors(0).iter().map(|&v| v as usize).collect::<Vec<_>>()
        );
    }

    proptest! {
        #[test]
        fn random_regular_is_deterministic(n in 4usize..40, seed in 0u64..1000) {
            let n = n / 2 * 2; // keep n*r even with r = 3
            if n >= 4 {
                let a = gen_random_regular(n, 3, seed).unwrap();
                let b = gen_random_regular(n, 3, seed).unwrap();
                prop_assert_eq!(a.edges(), b.edges());
            }
        }

        #[test]
        fn generated_graphs_are_valid(n in 3usize..30, seed in 0u64..100) {
            let g = gen_complete(n).unwrap();
            prop_assert_eq!(g.edges().len(), n * (n - 1) / 2);
            let c = gen_cycle(n).unwrap();
            prop_assert_eq!(c.edges().len(), n);
            if n >= 5 && n % 2 == 0 {
                let rr = gen_random_regular(n, 3, seed).unwrap();
                for u in 0..n {
                    prop_assert_eq!(rr.neighbors(u).len(), 3);
                    for &v in rr.neighbors(u) {
                        prop_assert!(rr.has_edge(v as usize, u));
                    }
                }
            }
        }

        #[test]
        fn mask_round_trip(mask in 0u64..1024) {
            let s = VertexSet::from_mask(10, mask);
            prop_assert_eq!(s.as_mask(), Some(mask));
            prop_assert_eq!(s.len(), mask.count_ones() as usize);
        }
    }
}
