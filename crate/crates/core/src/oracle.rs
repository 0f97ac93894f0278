//! Independent brute-force ground truth: exact f(n,k,l) at small n via
//! canonical augmentation with branch-and-bound, Ramsey-threshold witnesses,
//! and the exact double-counting audit of the pair-coefficient tables.

use crate::constructions::{expansion_clique_count, PatternGraph, PatternMode};
use crate::enumerate::{admissible_graph_classes, enumerate_flags, enumerate_types, FlagSpec, TypeSpec};
use crate::flagcalc::{injections_inducing_type, pair_coefficients};
use crate::graph::{subsets_of_size, CanonicalKey, SmallGraph};
use crate::{Error, Result};
use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use std::collections::HashSet;

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchBudget {
    /// Cap on examined augmentation nodes; None = unbounded.
    pub max_nodes: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SearchStatus {
    Complete,
    /// Budget ran out; any reported value is only an upper bound.
    Incomplete,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalResult {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    /// f(n,k,l) when status is Complete; best upper bound seen otherwise.
    pub value: u64,
    pub extremal_keys: Vec<String>,
    pub status: SearchStatus,
    pub nodes: u64,
}

fn near_equal_sizes(n: usize, parts: usize) -> Vec<usize> {
    let base = n / parts;
    let extra = n % parts;
    (0..parts)
        .map(|i| base + usize::from(i < extra))
        .collect()
}

/// Exact minimum number of k-cliques over order-n graphs with alpha < l.
/// Augments canonical admissible graphs level by level, pruning branches
/// whose partial clique count already exceeds the Turan-complement upper
/// bound (clique counts only grow under vertex addition).
pub fn brute_force_f(n: usize, k: usize, l: usize, budget: SearchBudget) -> Result<ExtremalResult> {
    if n < 1 || l < 2 || k < 1 {
        return Err(Error::Domain("need n >= 1, k >= 1, l >= 2".into()));
    }
    if n > 12 {
        return Err(Error::Domain(format!("brute_force_f: order {n} out of reach")));
    }
    // construction upper bound: the uniform expansion of the edgeless
    // pattern on l-1 parts, i.e. the complement of the Turan graph
    let pattern = PatternGraph::uniform(SmallGraph::empty(l - 1), PatternMode::Expansion);
    let sizes = near_equal_sizes(n, l - 1);
    let bound_big: BigInt = expansion_clique_count(&pattern, &sizes, k);
    let incumbent: u64 = bound_big
        .try_into()
        .map_err(|_| Error::Domain("construction bound overflows u64".into()))?;

    let mut nodes = 0u64;
    let mut level: Vec<SmallGraph> = vec![SmallGraph::empty(1)];
    let mut status = SearchStatus::Complete;
    'outer: for order in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for parent in &level {
            for mask in 0..(1u32 << (order - 1)) {
                nodes += 1;
                if let Some(cap) = budget.max_nodes {
                    if nodes > cap {
                        status = SearchStatus::Incomplete;
                        break 'outer;
                    }
                }
                let child = parent.with_vertex(mask);
                if child.independence_number() >= l {
                    continue;
                }
                if child.count_cliques(k) > incumbent {
                    continue;
                }
                let canon = child.canonical_form();
                if seen.insert(canon.to_edge_string()) {
                    next.push(canon);
                }
            }
        }
        level = next;
    }
    if status == SearchStatus::Incomplete {
        return Ok(ExtremalResult {
            n,
            k,
            l,
            value: incumbent,
            extremal_keys: vec![],
            status,
            nodes,
        });
    }
    let value = level
        .iter()
        .map(|g| g.count_cliques(k))
        .min()
        .unwrap_or(incumbent);
    let mut extremal_keys: Vec<String> = level
        .iter()
        .filter(|g| g.count_cliques(k) == value)
        .map(|g| g.to_edge_string())
        .collect();
    extremal_keys.sort();
    Ok(ExtremalResult {
        n,
        k,
        l,
        value,
        extremal_keys,
        status: SearchStatus::Complete,
        nodes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RamseyReport {
    pub s: usize,
    pub t: usize,
    pub n: usize,
    /// true iff an order-n graph without K_s and without an independent
    /// t-set exists.
    pub exists: bool,
    pub witness: Option<String>,
    pub status: SearchStatus,
    pub nodes: u64,
}

/// Exhaustive search (with hereditary pruning) for an order-n graph avoiding
/// both K_s and the empty graph on t vertices.
pub fn ramsey_check(s: usize, t: usize, n: usize, budget: SearchBudget) -> Result<RamseyReport> {
    if s < 2 || t < 2 || n < 1 {
        return Err(Error::Domain("need s,t >= 2 and n >= 1".into()));
    }
    let mut nodes = 0u64;
    let mut level: Vec<SmallGraph> = vec![SmallGraph::empty(1)];
    for order in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for parent in &level {
            for mask in 0..(1u32 << (order - 1)) {
                nodes += 1;
                if let Some(cap) = budget.max_nodes {
                    if nodes > cap {
                        return Ok(RamseyReport {
                            s,
                            t,
                            n,
                            exists: false,
                            witness: None,
                            status: SearchStatus::Incomplete,
                            nodes,
                        });
                    }
                }
                let child = parent.with_vertex(mask);
                if child.independence_number() >= t || child.clique_number() >= s {
                    continue;
                }
                let canon = child.canonical_form();
                if seen.insert(canon.to_edge_string()) {
                    next.push(canon);
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    level.sort_by_key(|g| g.to_edge_string());
    Ok(RamseyReport {
        s,
        t,
        n,
        exists: !level.is_empty(),
        witness: level.first().map(|g| g.to_edge_string()),
        status: SearchStatus::Complete,
        nodes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityAuditReport {
    pub n: usize,
    pub l: usize,
    pub seed: u64,
    /// Host graphs examined (both orders combined).
    pub cases: usize,
    /// Individual (host, type, flag-pair) identities checked.
    pub checks: u64,
    /// Must be zero: the double-counting identity is exact.
    pub max_discrepancy: u64,
    pub failures: Vec<String>,
}

impl IdentityAuditReport {
    pub fn pass(&self) -> bool {
        self.max_discrepancy == 0 && self.failures.is_empty()
    }
}

/// All types at (n, l) with their full flag lists: the skeleton a
/// certificate over that universe would carry.
pub fn certificate_skeleton(n: usize, l: usize) -> Result<(Vec<TypeSpec>, Vec<Vec<FlagSpec>>)> {
    let types = enumerate_types(n, l)?;
    let flags: Result<Vec<Vec<FlagSpec>>> = types
        .iter()
        .map(|t| enumerate_flags(t, (n + t.order()) / 2, l, &[]))
        .collect();
    Ok((types, flags?))
}

/// Left-hand side of the double-counting identity for one host: the number
/// of (psi, X1, X2) triples with X1 ∩ X2 = psi([v]) and |X1 ∪ X2| = N whose
/// two halves induce the flags (a, b).
fn exact_intersection_counts(
    host: &SmallGraph,
    tau: &TypeSpec,
    flags: &[FlagSpec],
    n_universe: usize,
) -> Result<Vec<Vec<u64>>> {
    let v = tau.order();
    let half = (n_universe - v) / 2;
    let g = flags.len();
    let index: std::collections::HashMap<String, usize> = flags
        .iter()
        .enumerate()
        .map(|(i, f)| (f.key(), i))
        .collect();
    let mut lhs = vec![vec![0u64; g]; g];
    for psi in injections_inducing_type(host, &tau.graph) {
        let mut psi_mask = 0u32;
        for &p in &psi {
            psi_mask |= 1 << p;
        }
        let rest = host.full_mask() & !psi_mask;
        let mut first_masks = Vec::new();
        subsets_of_size(rest, half, &mut first_masks);
        for m1 in first_masks {
            let x1: Vec<usize> = (0..host.order()).filter(|&x| m1 >> x & 1 == 1).collect();
            let key1 = labeled_key(host, &psi, &x1);
            let a = *index
                .get(&key1)
                .ok_or_else(|| Error::Domain(format!("missing flag {key1}")))?;
            let mut second_masks = Vec::new();
            subsets_of_size(rest & !m1, half, &mut second_masks);
            for m2 in second_masks {
                let x2: Vec<usize> = (0..host.order()).filter(|&x| m2 >> x & 1 == 1).collect();
                let key2 = labeled_key(host, &psi, &x2);
                let b = *index
                    .get(&key2)
                    .ok_or_else(|| Error::Domain(format!("missing flag {key2}")))?;
                lhs[a][b] += 1;
            }
        }
    }
    Ok(lhs)
}

fn labeled_key(host: &SmallGraph, psi: &[usize], extra: &[usize]) -> String {
    let v = psi.len();
    let total = v + extra.len();
    let mut g = SmallGraph::empty(total);
    let vert = |i: usize| if i < v { psi[i] } else { extra[i - v] };
    for a in 0..total {
        for b in (a + 1)..total {
            if host.has_edge(vert(a), vert(b)) {
                g.add_edge(a, b);
            }
        }
    }
    g.canonical_string_fixed(v)
}

/// Checks, exactly and with no error term, that for every type and flag
/// pair the triple count over a host equals the pair-coefficient tables
/// summed against induced-subgraph counts. `trials = 0` runs every
/// admissible host of orders n and n+1; otherwise `trials` seeded picks per
/// order.
pub fn identity_audit(
    n: usize,
    l: usize,
    trials: usize,
    seed: u64,
    types: &[TypeSpec],
    flags: &[Vec<FlagSpec>],
) -> Result<IdentityAuditReport> {
    let universe = admissible_graph_classes(n, l, &[]);
    // per-type tables over the universe
    let mut tables: Vec<Vec<Vec<Vec<i64>>>> = Vec::new();
    for (t, tau) in types.iter().enumerate() {
        let per_graph: Result<Vec<Vec<Vec<i64>>>> = universe
            .iter()
            .map(|g| pair_coefficients(tau, &flags[t], g))
            .collect();
        tables.push(per_graph?);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut hosts: Vec<SmallGraph> = Vec::new();
    for order in [n, n + 1] {
        let classes = admissible_graph_classes(order, l, &[]);
        if trials == 0 {
            hosts.extend(classes);
        } else {
            for _ in 0..trials {
                hosts.push(classes[rng.random_range(0..classes.len())].clone());
            }
        }
    }
    let mut checks = 0u64;
    let mut max_disc = 0u64;
    let mut failures = Vec::new();
    for host in &hosts {
        // induced counts of every universe graph in the host
        let p: Result<Vec<u64>> = universe
            .iter()
            .map(|u| SmallGraph::count_induced(u, host))
            .collect();
        let p = p?;
        for (t, tau) in types.iter().enumerate() {
            let lhs = exact_intersection_counts(host, tau, &flags[t], n)?;
            let g = flags[t].len();
            for a in 0..g {
                for b in 0..g {
                    let rhs: i64 = tables[t]
                        .iter()
                        .zip(&p)
                        .map(|(table, &pi)| table[a][b] * pi as i64)
                        .sum();
                    checks += 1;
                    let disc = (lhs[a][b] as i64 - rhs).unsigned_abs();
                    if disc > 0 {
                        max_disc = max_disc.max(disc);
                        failures.push(format!(
                            "host {} type {} flags ({a},{b}): lhs {} rhs {rhs}",
                            host.to_edge_string(),
                            tau.graph.to_edge_string(),
                            lhs[a][b]
                        ));
                    }
                }
            }
        }
    }
    Ok(IdentityAuditReport {
        n,
        l,
        seed,
        cases: hosts.len(),
        checks,
        max_discrepancy: max_disc,
        failures,
    })
}

/// Convenience: canonical keys of the extremal graphs as CanonicalKey.
impl ExtremalResult {
    pub fn keys(&self) -> Vec<CanonicalKey> {
        self.extremal_keys
            .iter()
            .map(|s| CanonicalKey(s.clone()))
            .collect()
    }
}
