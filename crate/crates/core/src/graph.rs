//! Small undirected graphs on at most 32 vertices, stored as one bitset row
//! per vertex. Parsing and printing use the edge-string format
//! `<order-char>:<pairs>` where vertex 1..9 is `1`..`9` and vertex 10..32 is
//! `a`..`w`. Canonical keys are minimal edge strings over relabelings, with
//! edges sorted by larger endpoint then smaller (the column-major order that
//! admits prefix-pruned search); every key in this crate, including the type
//! strings used by certificates, is stable under that rule.

use crate::{Error, Result};
use std::fmt;

pub const MAX_ORDER: usize = 32;

const ALPHABET: &[u8; 33] = b"0123456789abcdefghijklmnopqrstuvw";

fn vertex_char(i: usize) -> char {
    ALPHABET[i] as char
}

fn char_vertex(c: char) -> Option<usize> {
    ALPHABET.iter().position(|&b| b as char == c)
}

/// Undirected graph on `order <= 32` vertices with bitset adjacency rows.
/// Immutable by convention: operations return new graphs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    order: usize,
    adj: [u32; MAX_ORDER],
}

/// Canonical edge string of a graph; equal keys iff isomorphic graphs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalKey(pub String);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for SmallGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmallGraph({})", self.to_edge_string())
    }
}

impl SmallGraph {
    pub fn empty(order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        SmallGraph {
            order,
            adj: [0; MAX_ORDER],
        }
    }

    pub fn complete(order: usize) -> Self {
        let mut g = Self::empty(order);
        for u in 0..order {
            for v in (u + 1)..order {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(order);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn row(&self, v: usize) -> u32 {
        self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.order && v < self.order);
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].count_ones()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.order).map(|v| self.degree(v) as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.order {
            for v in (u + 1)..self.order {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Mask with one bit per vertex.
    pub fn full_mask(&self) -> u32 {
        if self.order == 32 {
            u32::MAX
        } else {
            (1u32 << self.order) - 1
        }
    }

    /// Parse `<order-char>:<pairs>`. Edges may appear in any order; loops,
    /// duplicates and out-of-range vertex characters are rejected.
    pub fn parse(text: &str) -> Result<SmallGraph> {
        let (oc, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in graph string {text:?}")))?;
        let mut oc_chars = oc.chars();
        let order_char = oc_chars
            .next()
            .ok_or_else(|| Error::Parse(format!("empty order in {text:?}")))?;
        if oc_chars.next().is_some() {
            return Err(Error::Parse(format!("order must be one character in {text:?}")));
        }
        let order = char_vertex(order_char)
            .ok_or_else(|| Error::Parse(format!("bad order character {order_char:?}")))?;
        let chars: Vec<char> = rest.chars().collect();
        if chars.len() % 2 != 0 {
            return Err(Error::Parse(format!("odd number of edge characters in {text:?}")));
        }
        let mut g = SmallGraph::empty(order);
        for pair in chars.chunks(2) {
            let u = char_vertex(pair[0])
                .filter(|&u| u >= 1)
                .ok_or_else(|| Error::Parse(format!("bad vertex character {:?}", pair[0])))?;
            let v = char_vertex(pair[1])
                .filter(|&v| v >= 1)
                .ok_or_else(|| Error::Parse(format!("bad vertex character {:?}", pair[1])))?;
            let (u, v) = (u - 1, v - 1);
            if u == v {
                return Err(Error::Parse(format!(
                    "loop at vertex {:?} in {text:?}",
                    pair[0]
                )));
            }
            if u >= order || v >= order {
                return Err(Error::Parse(format!(
                    "vertex {:?}{:?} out of range for order {order}",
                    pair[0], pair[1]
                )));
            }
            if g.has_edge(u, v) {
                return Err(Error::Parse(format!(
                    "duplicate edge {:?}{:?} in {text:?}",
                    pair[0], pair[1]
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Edge string of this graph as labeled (no canonicalization).
    pub fn to_edge_string(&self) -> String {
        let mut s = String::new();
        s.push(vertex_char(self.order));
        s.push(':');
        for v in 1..self.order {
            for u in 0..v {
                if self.has_edge(u, v) {
                    s.push(vertex_char(u + 1));
                    s.push(vertex_char(v + 1));
                }
            }
        }
        s
    }

    pub fn complement(&self) -> SmallGraph {
        let mut g = SmallGraph::empty(self.order);
        let full = self.full_mask();
        for v in 0..self.order {
            g.adj[v] = !self.adj[v] & full & !(1 << v);
        }
        g
    }

    pub fn relabel(&self, perm: &[usize]) -> SmallGraph {
        debug_assert_eq!(perm.len(), self.order);
        let mut g = SmallGraph::empty(self.order);
        for u in 0..self.order {
            for v in (u + 1)..self.order {
                if self.has_edge(u, v) {
                    g.add_edge(perm[u], perm[v]);
                }
            }
        }
        g
    }

    /// Induced subgraph on the vertices of `mask`, keeping their relative order.
    pub fn induced(&self, mask: u32) -> SmallGraph {
        let verts: Vec<usize> = (0..self.order).filter(|&v| mask >> v & 1 == 1).collect();
        let mut g = SmallGraph::empty(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// New graph with one extra vertex adjacent to the vertices of `mask`.
    pub fn with_vertex(&self, mask: u32) -> SmallGraph {
        assert!(self.order < MAX_ORDER);
        let mut g = self.clone();
        g.order += 1;
        let w = g.order - 1;
        for v in 0..w {
            if mask >> v & 1 == 1 {
                g.add_edge(v, w);
            }
        }
        g
    }

    /// Size of the largest edge-free vertex set (0 for the empty-order graph).
    pub fn independence_number(&self) -> usize {
        self.max_independent_in(self.full_mask())
    }

    /// Largest independent set inside `allowed`, branch and bound.
    pub fn max_independent_in(&self, allowed: u32) -> usize {
        fn rec(g: &SmallGraph, pool: u32, cur: usize, best: &mut usize) {
            if cur + pool.count_ones() as usize <= *best {
                return;
            }
            if pool == 0 {
                *best = (*best).max(cur);
                return;
            }
            let v = pool.trailing_zeros() as usize;
            // include v
            rec(g, pool & !(1 << v) & !g.adj[v], cur + 1, best);
            // exclude v
            rec(g, pool & !(1 << v), cur, best);
        }
        let mut best = 0;
        rec(self, allowed, 0, &mut best);
        best
    }

    /// True iff some independent set of size `s` lies inside `allowed`.
    pub fn has_independent_set(&self, allowed: u32, s: usize) -> bool {
        fn rec(g: &SmallGraph, pool: u32, need: usize) -> bool {
            if need == 0 {
                return true;
            }
            if (pool.count_ones() as usize) < need {
                return false;
            }
            let v = pool.trailing_zeros() as usize;
            rec(g, pool & !(1 << v) & !g.adj[v], need - 1) || rec(g, pool & !(1 << v), need)
        }
        rec(self, allowed, s)
    }

    pub fn clique_number(&self) -> usize {
        self.complement().independence_number()
    }

    /// Number of `k`-cliques.
    pub fn count_cliques(&self, k: usize) -> u64 {
        if k == 0 {
            return 1;
        }
        fn rec(g: &SmallGraph, pool: u32, need: usize) -> u64 {
            if need == 0 {
                return 1;
            }
            if (pool.count_ones() as usize) < need {
                return 0;
            }
            let mut total = 0;
            let mut p = pool;
            while p != 0 {
                let v = p.trailing_zeros() as usize;
                p &= !(1 << v);
                // cliques whose smallest remaining vertex is v
                total += rec(g, p & g.adj[v], need - 1);
            }
            total
        }
        rec(self, self.full_mask(), k)
    }

    /// P(F, G): number of v(F)-subsets of V(G) inducing a copy of F.
    pub fn count_induced(pattern: &SmallGraph, host: &SmallGraph) -> Result<u64> {
        if pattern.order > host.order {
            return Err(Error::Domain(format!(
                "count_induced: pattern order {} exceeds host order {}",
                pattern.order, host.order
            )));
        }
        let key = pattern.canonical_key();
        let mut count = 0;
        let mut subset_masks = Vec::new();
        subsets_of_size(host.full_mask(), pattern.order, &mut subset_masks);
        for mask in subset_masks {
            if host.induced(mask).canonical_key() == key {
                count += 1;
            }
        }
        Ok(count)
    }

    /// True iff `pattern` occurs in `host` as an induced subgraph.
    pub fn contains_induced(&self, pattern: &SmallGraph) -> bool {
        if pattern.order > self.order {
            return false;
        }
        let key = pattern.canonical_key();
        let mut subset_masks = Vec::new();
        subsets_of_size(self.full_mask(), pattern.order, &mut subset_masks);
        subset_masks
            .into_iter()
            .any(|mask| self.induced(mask).canonical_key() == key)
    }

    /// p(F, G) = P(F, G) / C(v(G), v(F)) as an exact rational.
    pub fn density(pattern: &SmallGraph, host: &SmallGraph) -> Result<crate::exact::Rat> {
        let count = Self::count_induced(pattern, host)?;
        Ok(crate::exact::rat_int(count as i64)
            / crate::exact::rat_big(crate::exact::binomial(host.order, pattern.order)))
    }

    /// Canonical key: minimal edge string over all relabelings.
    pub fn canonical_key(&self) -> CanonicalKey {
        CanonicalKey(self.canonical_string_fixed(0))
    }

    /// Canonical form: the relabeled graph realizing the canonical key.
    pub fn canonical_form(&self) -> SmallGraph {
        let cols = canonical_columns(self, 0);
        graph_from_columns(self, 0, &cols)
    }

    /// Canonical key over relabelings that fix vertices `0..fixed` pointwise
    /// (flag canonicalization: labeled vertices keep their positions).
    pub fn canonical_string_fixed(&self, fixed: usize) -> String {
        if self.order == 0 {
            return "0:".to_string();
        }
        let cols = canonical_columns(self, fixed);
        graph_from_columns(self, fixed, &cols).to_edge_string()
    }

    /// Number of automorphisms (relabelings preserving adjacency).
    pub fn automorphism_count(&self) -> u64 {
        // counts permutations realizing the canonical column vector
        if self.order == 0 {
            return 1;
        }
        let target = canonical_columns(self, 0);
        let mut count = 0u64;
        let mut perm: Vec<usize> = Vec::with_capacity(self.order);
        count_realizations(self, &target, &mut perm, &mut count);
        count
    }
}

/// All subset masks of `pool` with exactly `size` bits.
pub fn subsets_of_size(pool: u32, size: usize, out: &mut Vec<u32>) {
    out.clear();
    fn rec(pool: u32, size: usize, acc: u32, out: &mut Vec<u32>) {
        if size == 0 {
            out.push(acc);
            return;
        }
        if (pool.count_ones() as usize) < size {
            return;
        }
        let v = pool.trailing_zeros();
        rec(pool & !(1 << v), size - 1, acc | (1 << v), out);
        rec(pool & !(1 << v), size, acc, out);
    }
    rec(pool, size, 0, out);
}

/// Column-major canonical search: maximizes the per-label adjacency columns
/// (bit for label i stored at position `t-1-i` of column t) over relabelings
/// fixing `0..fixed`. Candidates are ordered best-first and pruned against the
/// incumbent prefix, so highly symmetric graphs stay tractable.
fn canonical_columns(g: &SmallGraph, fixed: usize) -> Vec<u32> {
    let n = g.order;
    struct Search<'a> {
        g: &'a SmallGraph,
        n: usize,
        fixed: usize,
        perm: Vec<usize>,
        used: u32,
        cur: Vec<u32>,
        best: Option<Vec<u32>>,
    }
    impl Search<'_> {
        fn rec(&mut self, on_best_prefix: bool) {
            let t = self.perm.len();
            if t == self.n {
                if self.best.is_none() || self.cur > *self.best.as_ref().unwrap() {
                    self.best = Some(self.cur.clone());
                }
                return;
            }
            let mut scored: Vec<(u32, usize)> = Vec::with_capacity(self.n - t);
            for v in 0..self.n {
                if self.used >> v & 1 == 1 {
                    continue;
                }
                let mut bits: u32 = 0;
                for (i, &p) in self.perm.iter().enumerate() {
                    if self.g.adj[v] >> p & 1 == 1 {
                        bits |= 1 << (t - 1 - i);
                    }
                }
                scored.push((bits, v));
            }
            scored.sort_unstable_by(|a, b| b.cmp(a));
            let idx = t - self.fixed;
            for (bits, v) in scored {
                let mut on_best = on_best_prefix;
                if let (true, Some(best)) = (on_best_prefix, self.best.as_ref()) {
                    if bits < best[idx] {
                        break; // sorted descending: everything after is worse
                    }
                    if bits > best[idx] {
                        on_best = false;
                    }
                }
                self.perm.push(v);
                self.used |= 1 << v;
                self.cur.push(bits);
                let have_best = self.best.is_some();
                self.rec(on_best && have_best);
                self.perm.pop();
                self.used &= !(1 << v);
                self.cur.pop();
            }
        }
    }
    let mut s = Search {
        g,
        n,
        fixed,
        perm: (0..fixed).collect(),
        used: if fixed == 0 { 0 } else { (1u32 << fixed) - 1 },
        cur: Vec::new(),
        best: None,
    };
    s.rec(true);
    s.best.unwrap()
}

/// Rebuild the canonically labeled graph from the fixed prefix plus the
/// column vector found by the search.
fn graph_from_columns(g: &SmallGraph, fixed: usize, cols: &[u32]) -> SmallGraph {
    let n = g.order;
    let mut out = SmallGraph::empty(n);
    for t in 0..n {
        if t < fixed {
            for i in 0..t {
                if g.has_edge(i, t) {
                    out.add_edge(i, t);
                }
            }
        } else {
            let bits = cols[t - fixed];
            for i in 0..t {
                if bits >> (t - 1 - i) & 1 == 1 {
                    out.add_edge(i, t);
                }
            }
        }
    }
    out
}

fn count_realizations(g: &SmallGraph, target: &[u32], perm: &mut Vec<usize>, count: &mut u64) {
    let t = perm.len();
    if t == g.order() {
        *count += 1;
        return;
    }
    for v in 0..g.order() {
        if perm.contains(&v) {
            continue;
        }
        let mut bits: u32 = 0;
        for (i, &p) in perm.iter().enumerate() {
            if g.row(v) >> p & 1 == 1 {
                bits |= 1 << (t - 1 - i);
            }
        }
        if bits == target[t] {
            perm.push(v);
            count_realizations(g, target, perm, count);
            perm.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> SmallGraph {
        SmallGraph::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let p = g("4:121324");
        assert_eq!(p.order(), 4);
        assert_eq!(p.edges(), vec![(0, 1), (0, 2), (1, 3)]);
        assert_eq!(g("2:").edge_count(), 0);
        assert_eq!(g("3:121323").edge_count(), 3);
        // alphabetic vertices
        let big = g("a:1a29");
        assert_eq!(big.order(), 10);
        assert!(big.has_edge(0, 9) && big.has_edge(1, 8));
    }

    #[test]
    fn parse_errors_name_token() {
        for bad in ["4:1214x", "3:11", "3:1212", "3:14", "nope", "4:123"] {
            assert!(SmallGraph::parse(bad).is_err(), "{bad} should fail");
        }
        let err = SmallGraph::parse("3:14").unwrap_err().to_string();
        assert!(err.contains('4'), "error should name the token: {err}");
    }

    #[test]
    fn canonical_examples() {
        // C5 labeled two ways -> one key
        let c5a = SmallGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let c5b = SmallGraph::from_edges(5, &[(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]);
        assert_eq!(c5a.canonical_key(), c5b.canonical_key());
        assert_eq!(c5a.canonical_key().0, "5:1213243545");
        // K3 vs P3 distinct
        assert_ne!(g("3:121323").canonical_key(), g("3:1213").canonical_key());
        // paper type strings are already canonical
        for s in ["4:121324", "5:121324", "6:1213243545"] {
            assert_eq!(g(s).canonical_key().0, s);
        }
    }

    #[test]
    fn one_edge_all_relabelings_one_key() {
        // exhaustive relabeling oracle: every labeling of the one-edge graph on
        // 3 vertices canonicalizes identically
        let mut keys = std::collections::HashSet::new();
        for u in 0..3 {
            for v in 0..3 {
                if u < v {
                    keys.insert(SmallGraph::from_edges(3, &[(u, v)]).canonical_key());
                }
            }
        }
        assert_eq!(keys.len(), 1);
        assert_eq!(keys.into_iter().next().unwrap().0, "3:12");
    }

    #[test]
    fn independence_numbers() {
        assert_eq!(SmallGraph::complete(7).independence_number(), 1);
        let c5 = g("5:1213243545");
        assert_eq!(c5.independence_number(), 2);
        assert_eq!(SmallGraph::empty(0).independence_number(), 0);
        assert_eq!(SmallGraph::empty(4).independence_number(), 4);
    }

    #[test]
    fn count_induced_examples() {
        let k3 = g("3:121323");
        let k4 = SmallGraph::complete(4);
        assert_eq!(SmallGraph::count_induced(&k3, &k4).unwrap(), 4);
        let k2 = g("2:12");
        let c5 = g("5:1213243545");
        assert_eq!(SmallGraph::count_induced(&k2, &c5).unwrap(), 5);
        // domain error
        assert!(SmallGraph::count_induced(&k4, &k3).is_err());
    }

    #[test]
    fn count_induced_petersen_c5() {
        // 5-cycles in the Petersen graph: derived by this exhaustive
        // subset-scan path itself being the oracle elsewhere; value frozen.
        let mut petersen = SmallGraph::empty(10);
        for i in 0..5 {
            petersen.add_edge(i, (i + 1) % 5); // outer C5
            petersen.add_edge(5 + i, 5 + (i + 2) % 5); // inner pentagram
            petersen.add_edge(i, 5 + i); // spokes
        }
        let c5 = g("5:1213243545");
        assert_eq!(SmallGraph::count_induced(&c5, &petersen).unwrap(), 12);
    }

    #[test]
    fn density_examples() {
        use crate::exact::{rat, rat_int};
        let k3 = g("3:121323");
        assert_eq!(SmallGraph::density(&k3, &k3).unwrap(), rat_int(1));
        let k2 = g("2:12");
        let c5 = g("5:1213243545");
        assert_eq!(SmallGraph::density(&k2, &c5).unwrap(), rat(1, 2));
        let c5c = c5.complement();
        assert_eq!(SmallGraph::density(&k3, &c5c).unwrap(), rat_int(0));
    }

    #[test]
    fn complement_examples() {
        let k4 = SmallGraph::complete(4);
        assert_eq!(k4.complement().edge_count(), 0);
        let c5 = g("5:1213243545");
        assert_eq!(c5.complement().canonical_key(), c5.canonical_key());
        let p = g("4:121324");
        assert_eq!(p.complement().complement(), p);
    }

    #[test]
    fn clique_counts() {
        assert_eq!(SmallGraph::complete(6).count_cliques(3), 20);
        assert_eq!(g("5:1213243545").count_cliques(3), 0);
        assert_eq!(g("5:1213243545").count_cliques(2), 5);
    }

    #[test]
    fn automorphisms() {
        assert_eq!(g("5:1213243545").automorphism_count(), 10); // D5
        assert_eq!(SmallGraph::complete(4).automorphism_count(), 24);
        assert_eq!(g("4:121324").automorphism_count(), 2); // path P4
    }

    #[test]
    fn alpha_equals_complement_clique_number() {
        // deterministic pseudo-random sweep, order <= 10
        let mut state = 0x9e3779b97f4a7c15u64;
        for trial in 0..60 {
            let n = 3 + (trial % 8);
            let mut gr = SmallGraph::empty(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                    if state >> 33 & 1 == 1 {
                        gr.add_edge(u, v);
                    }
                }
            }
            assert_eq!(gr.independence_number(), gr.complement().clique_number());
        }
    }
}
