//! Problem instances: simple undirected graphs, a backtracking 3-coloring
//! solver, small-graph enumeration up to isomorphism, a random tripartite
//! generator and the text file format.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Simple undirected graph on nodes `0..n`. Edges are stored as sorted `(u, v)`, `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on node {a}")));
            }
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {num_nodes} nodes"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Graph {
            num_nodes,
            edges: set.into_iter().collect(),
        })
    }

    pub fn empty(num_nodes: usize) -> Self {
        Graph {
            num_nodes,
            edges: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Star `K_{1,m}` with hub 0.
    pub fn star(m: usize) -> Self {
        Graph::new(m + 1, (1..=m).map(|v| (0, v))).unwrap()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted lexicographically by `(min, max)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.num_nodes == 0 {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / self.num_nodes as f64
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Component label per node, labels numbered in order of first node.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.num_nodes];
        let mut next = 0;
        for start in 0..self.num_nodes {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = next;
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Proper 3-coloring by backtracking DFS, node 0 fixed to color 0.
    pub fn three_color(&self) -> Option<Vec<u8>> {
        let adj = self.adjacency();
        let mut colors = vec![u8::MAX; self.num_nodes];
        if self.num_nodes == 0 {
            return Some(colors);
        }
        if backtrack(&adj, &mut colors, 0) {
            Some(colors)
        } else {
            None
        }
    }

    pub fn is_three_colorable(&self) -> bool {
        self.three_color().is_some()
    }

    /// Upper-triangle adjacency bits in row-major order, edge (0,1) most significant.
    pub fn adjacency_bits(&self) -> u64 {
        let n = self.num_nodes;
        let total = n * n.saturating_sub(1) / 2;
        self.edges
            .iter()
            .fold(0u64, |acc, &(u, v)| acc | 1 << (total - 1 - pair_index(n, u, v)))
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        Graph::new(self.num_nodes, self.edges.iter().map(|&(u, v)| (perm[u], perm[v]))).unwrap()
    }

    /// Lexicographically minimal adjacency bitstring over all node permutations.
    pub fn canonical_form(&self) -> u64 {
        self.canonical_labeling().0
    }

    /// Canonical form and a permutation achieving it.
    pub fn canonical_labeling(&self) -> (u64, Vec<usize>) {
        let n = self.num_nodes;
        let total = n * n.saturating_sub(1) / 2;
        let mut best = u64::MAX;
        let mut best_perm: Vec<usize> = (0..n).collect();
        for_each_permutation(n, |perm| {
            let mut bits = 0u64;
            for &(u, v) in &self.edges {
                bits |= 1 << (total - 1 - pair_index(n, perm[u].min(perm[v]), perm[u].max(perm[v])));
            }
            if bits < best {
                best = bits;
                best_perm.copy_from_slice(perm);
            }
        });
        (best, best_perm)
    }

    pub fn canonical(&self) -> Graph {
        let (_, perm) = self.canonical_labeling();
        self.relabel(&perm)
    }

    /// Text format: `n <nodes>` then one sorted `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.num_nodes);
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut num_nodes = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match num_nodes {
                None => {
                    if fields.len() != 2 || fields[0] != "n" {
                        return Err(err(lineno, format!("expected `n <num_nodes>`, got {line:?}")));
                    }
                    let n = fields[1]
                        .parse::<usize>()
                        .map_err(|e| err(lineno, format!("bad node count: {e}")))?;
                    num_nodes = Some(n);
                }
                Some(n) => {
                    if fields.len() != 2 {
                        return Err(err(lineno, format!("expected `<u> <v>`, got {line:?}")));
                    }
                    let parse = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|e| err(lineno, format!("bad node index {s:?}: {e}")))
                    };
                    let (u, v) = (parse(fields[0])?, parse(fields[1])?);
                    if u == v {
                        return Err(err(lineno, format!("self-loop on node {u}")));
                    }
                    if u >= n || v >= n {
                        return Err(err(lineno, format!("node index out of range for n = {n}")));
                    }
                    edges.push((u, v));
                }
            }
        }
        let n = num_nodes.ok_or_else(|| err(0, "missing `n <num_nodes>` header".into()))?;
        Graph::new(n, edges)
    }
}

fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

fn backtrack(adj: &[Vec<usize>], colors: &mut [u8], node: usize) -> bool {
    if node == colors.len() {
        return true;
    }
    let max_color = if node == 0 { 1 } else { 3 };
    for c in 0..max_color {
        if adj[node].iter().all(|&w| colors[w] != c) {
            colors[node] = c;
            if backtrack(adj, colors, node + 1) {
                return true;
            }
        }
    }
    colors[node] = u8::MAX;
    false
}

/// Heap's algorithm; calls `f` with every permutation of `0..n`.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

pub const MAX_ENUMERATION_NODES: usize = 8;

/// Connected, pairwise non-isomorphic, 3-colorable graphs on `n` nodes with
/// `min_edges..=max_edges` edges, at most `limit` of them.
///
/// Candidates are visited by increasing edge count, then by adjacency mask;
/// each accepted graph is returned in its canonical labeling.
pub fn enumerate_3colorable(n: usize, min_edges: usize, max_edges: usize, limit: usize) -> Result<Vec<Graph>> {
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::InvalidArgument(format!(
            "enumeration supports at most {MAX_ENUMERATION_NODES} nodes, got {n}"
        )));
    }
    let total = n * n.saturating_sub(1) / 2;
    let lo = min_edges.max(n.saturating_sub(1));
    let hi = max_edges.min(total);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    if n == 1 && min_edges == 0 && limit > 0 {
        return Ok(vec![Graph::empty(1)]);
    }
    for m in lo..=hi {
        if m == 0 {
            continue;
        }
        for mask in masks_with_popcount(total, m) {
            if out.len() >= limit {
                return Ok(out);
            }
            let g = Graph {
                num_nodes: n,
                edges: (0..total).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect(),
            };
            if !g.is_connected() || !g.is_three_colorable() {
                continue;
            }
            let (form, perm) = g.canonical_labeling();
            if seen.insert(form) {
                out.push(g.relabel(&perm));
            }
        }
    }
    Ok(out)
}

/// All `total`-bit masks with exactly `k` bits set, in increasing order.
fn masks_with_popcount(total: usize, k: usize) -> impl Iterator<Item = u64> {
    let first: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let end: u64 = 1u64 << total;
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= end {
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connectivity {
    /// Most nodes of degree about 3.
    Low,
    /// Degree about n/3.
    High,
    /// Degree about 2n/3, i.e. complete tripartite.
    Highest,
}

impl Connectivity {
    pub fn target_degree(self, n: usize) -> f64 {
        match self {
            Connectivity::Low => 3.0,
            Connectivity::High => n as f64 / 3.0,
            Connectivity::Highest => 2.0 * n as f64 / 3.0,
        }
    }
}

impl std::str::FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "low" => Ok(Connectivity::Low),
            "high" => Ok(Connectivity::High),
            "highest" => Ok(Connectivity::Highest),
            other => Err(Error::InvalidArgument(format!("unknown connectivity {other:?}"))),
        }
    }
}

/// Random connected tripartite graph. Node `i` belongs to part `i % 3`.
///
/// Each cross-part pair is kept with probability `target / (2n/3)`, then
/// components are joined by random cross-part edges until connected.
pub fn random_tripartite(n: usize, connectivity: Connectivity, seed: u64) -> Result<Graph> {
    if n < 6 || !n.is_multiple_of(3) {
        return Err(Error::InvalidArgument(format!(
            "tripartite graphs need n >= 6 divisible by 3, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let part = |v: usize| v % 3;
    let prob = (connectivity.target_degree(n) / (2.0 * n as f64 / 3.0)).min(1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if part(u) != part(v) && rng.gen_bool(prob) {
                edges.push((u, v));
            }
        }
    }
    loop {
        let g = Graph::new(n, edges.iter().copied())?;
        let label = g.components();
        if label.iter().all(|&c| c == 0) {
            return Ok(g);
        }
        // join the component of node 0 to the next component
        let other = label.iter().copied().find(|&c| c != 0).unwrap();
        let candidates: Vec<(usize, usize)> = (0..n)
            .filter(|&u| label[u] == other)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .filter(|&(u, v)| label[v] != other && part(u) != part(v))
            .collect();
        let &(u, v) = candidates
            .choose(&mut rng)
            .expect("some node outside a component always lies in another part");
        edges.push((u.min(v), u.max(v)));
    }
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Graph::parse(&text, path)
}

pub fn write_graph(graph: &Graph, path: &Path) -> Result<()> {
    fs::write(path, graph.to_text()).map_err(|e| Error::io(path, e))
}

/// Manifest: one graph path per line, relative paths resolved against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<PathBuf>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let p = Path::new(l);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        })
        .collect())
}

pub fn write_manifest(path: &Path, entries: &[PathBuf]) -> Result<()> {
    let mut text = String::new();
    for e in entries {
        writeln!(text, "{}", e.display()).unwrap();
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive 3^n oracle.
    fn colorable_brute(g: &Graph) -> bool {
        let n = g.num_nodes();
        (0..3usize.pow(n as u32)).any(|code| {
            let mut c = vec![0usize; n];
            let mut rest = code;
            for x in c.iter_mut() {
                *x = rest % 3;
                rest /= 3;
            }
            g.edges().iter().all(|&(u, v)| c[u] != c[v])
        })
    }

    fn proper(g: &Graph, c: &[u8]) -> bool {
        c.iter().all(|&x| x < 3) && g.edges().iter().all(|&(u, v)| c[u] != c[v])
    }

    #[test]
    fn degrees() {
        assert_eq!(Graph::complete(3).max_degree(), 2);
        assert_eq!(Graph::star(4).max_degree(), 4);
        assert_eq!(Graph::empty(5).max_degree(), 0);
    }

    #[test]
    fn coloring_small_cases() {
        let k3 = Graph::complete(3);
        let c = k3.three_color().unwrap();
        assert!(proper(&k3, &c));
        assert_eq!(c[0], 0);
        assert!(Graph::complete(4).three_color().is_none());
        let c5 = Graph::cycle(5);
        assert!(proper(&c5, &c5.three_color().unwrap()));
    }

    #[test]
    fn coloring_matches_brute_force_up_to_six_nodes() {
        // all graphs for n <= 4, random ones for 5 and 6
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6usize {
            let total = n * (n - 1) / 2;
            let masks: Vec<u64> = if n <= 4 {
                (0..1u64 << total).collect()
            } else {
                (0..400).map(|_| rng.gen_range(0..1u64 << total)).collect()
            };
            let pairs: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            for mask in masks {
                let g = Graph::new(n, (0..total).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i])).unwrap();
                let sol = g.three_color();
                assert_eq!(sol.is_some(), colorable_brute(&g), "{g:?}");
                if let Some(c) = sol {
                    assert!(proper(&g, &c));
                }
            }
        }
    }

    #[test]
    fn constructor_rejects_bad_edges() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        let g = Graph::new(3, [(2, 1), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn canonical_form_is_label_invariant() {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        let h = g.relabel(&[3, 0, 4, 1, 2]);
        assert_eq!(g.canonical_form(), h.canonical_form());
        assert_ne!(g.canonical_form(), Graph::cycle(5).canonical_form());
        assert_eq!(g.canonical().canonical_form(), g.canonical_form());
    }

    #[test]
    fn enumerate_small_sets() {
        let k3 = enumerate_3colorable(3, 3, 3, 20).unwrap();
        assert_eq!(k3, vec![Graph::complete(3)]);
        assert!(enumerate_3colorable(4, 6, 6, 20).unwrap().is_empty());
        assert!(enumerate_3colorable(9, 0, 10, 20).is_err());
        let limited = enumerate_3colorable(5, 4, 7, 3).unwrap();
        assert_eq!(limited.len(), 3);
    }

    #[test]
    fn gosper_masks() {
        let m: Vec<u64> = masks_with_popcount(4, 2).collect();
        assert_eq!(m, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(masks_with_popcount(3, 3).count(), 1);
    }

    #[test]
    fn tripartite_properties() {
        for conn in [Connectivity::Low, Connectivity::High, Connectivity::Highest] {
            for seed in 0..10 {
                let g = random_tripartite(9, conn, seed).unwrap();
                assert!(g.is_connected());
                assert!(g.edges().iter().all(|&(u, v)| u % 3 != v % 3));
                assert!(g.three_color().is_some());
                assert_eq!(g, random_tripartite(9, conn, seed).unwrap());
            }
        }
        assert!(random_tripartite(7, Connectivity::Low, 0).is_err());
        assert!(random_tripartite(3, Connectivity::Low, 0).is_err());
    }

    #[test]
    fn tripartite_highest_degree() {
        let mean: f64 = (0..50)
            .map(|s| random_tripartite(9, Connectivity::Highest, s).unwrap().mean_degree())
            .sum::<f64>()
            / 50.0;
        assert!((mean - 6.0).abs() <= 1.5);
    }

    #[test]
    fn text_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("k3.txt");
        write_graph(&Graph::complete(3), &p).unwrap();
        assert_eq!(read_graph(&p).unwrap(), Graph::complete(3));
        assert_eq!(fs::read_to_string(&p).unwrap(), "n 3\n0 1\n0 2\n1 2\n");

        let path = Path::new("x");
        let g = Graph::parse("# comment\nn 4\n0 1 # trailing\n\n2 3\n", path).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
        assert!(matches!(
            Graph::parse("n 3\n0 0\n", path),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Graph::parse("n 3\n0 3\n", path).is_err());
        assert!(Graph::parse("0 1\n", path).is_err());
        assert!(Graph::parse("n 3\n0 x\n", path).is_err());
        assert!(Graph::parse("", path).is_err());
    }

    #[test]
    fn manifest_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("manifest.txt");
        write_manifest(&m, &[PathBuf::from("a.txt"), PathBuf::from("/abs/b.txt")]).unwrap();
        let entries = read_manifest(&m).unwrap();
        assert_eq!(entries, vec![dir.path().join("a.txt"), PathBuf::from("/abs/b.txt")]);
    }
}
