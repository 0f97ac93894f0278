//! Isomorph-free generation of admissible graphs, types, and flags.
//!
//! A graph is admissible when its independence number is strictly below the
//! problem parameter `l`. Admissibility is hereditary under vertex deletion,
//! so generation augments canonical parents one vertex at a time and filters
//! at every intermediate order.

use crate::graph::{CanonicalKey, SmallGraph};
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::HashSet;

/// A fully labeled admissible graph: the root shared by a family of flags.
/// The labeling is the vertex numbering of `graph` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSpec {
    pub graph: SmallGraph,
}

impl TypeSpec {
    pub fn order(&self) -> usize {
        self.graph.order()
    }
}

/// A partially labeled admissible graph: vertices `0..labeled` are the
/// labeled copy of the type, the rest are unlabeled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagSpec {
    pub graph: SmallGraph,
    pub labeled: usize,
}

impl FlagSpec {
    pub fn order(&self) -> usize {
        self.graph.order()
    }

    /// Canonical key over relabelings of the unlabeled vertices only.
    pub fn key(&self) -> String {
        self.graph.canonical_string_fixed(self.labeled)
    }
}

/// Every isomorphism class of order-N graphs with independence number < l
/// (and, optionally, avoiding each of `forbidden` as an induced subgraph),
/// sorted by canonical key.
pub fn admissible_graphs(n: usize, l: usize, forbidden: &[SmallGraph]) -> Result<Vec<CanonicalKey>> {
    if n < 1 || n > 10 {
        return Err(Error::Domain(format!(
            "admissible_graphs supports orders 1..=10, got {n}"
        )));
    }
    if l < 2 {
        return Err(Error::Domain(format!("need l >= 2, got {l}")));
    }
    Ok(admissible_graph_classes(n, l, forbidden)
        .into_iter()
        .map(|g| g.canonical_key())
        .collect())
}

/// Same as [`admissible_graphs`] but returning the canonical graphs, sorted
/// by key. Internal callers avoid re-parsing.
pub fn admissible_graph_classes(n: usize, l: usize, forbidden: &[SmallGraph]) -> Vec<SmallGraph> {
    let one = SmallGraph::empty(1);
    let mut level: Vec<SmallGraph> = if 1 < l && !forbidden.iter().any(|f| one.contains_induced(f))
    {
        vec![one]
    } else {
        vec![]
    };
    for order in 2..=n {
        let children: Vec<(String, SmallGraph)> = level
            .par_iter()
            .flat_map_iter(|parent| {
                let mut out = Vec::new();
                for mask in 0..(1u32 << (order - 1)) {
                    let child = parent.with_vertex(mask);
                    if child.independence_number() >= l {
                        continue;
                    }
                    // parent was clean, so only subsets through the new vertex matter
                    if forbidden.iter().any(|f| contains_induced_at_last(&child, f)) {
                        continue;
                    }
                    let canon = child.canonical_form();
                    out.push((canon.to_edge_string(), canon));
                }
                out
            })
            .collect();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (key, g) in children {
            if seen.insert(key) {
                next.push(g);
            }
        }
        level = next;
    }
    level.sort_by_key(|g| g.to_edge_string());
    level
}

fn contains_induced_at_last(g: &SmallGraph, pattern: &SmallGraph) -> bool {
    let n = g.order();
    if pattern.order() > n || pattern.order() == 0 {
        return false;
    }
    let key = pattern.canonical_key();
    let last = n - 1;
    let mut masks = Vec::new();
    crate::graph::subsets_of_size(g.full_mask() & !(1 << last), pattern.order() - 1, &mut masks);
    masks
        .into_iter()
        .any(|m| g.induced(m | (1 << last)).canonical_key() == key)
}

/// One TypeSpec per isomorphism class of admissible graphs of each order v
/// with N - v positive even, including v = 0 when N is even.
pub fn enumerate_types(n: usize, l: usize) -> Result<Vec<TypeSpec>> {
    if n < 1 || n > 10 {
        return Err(Error::Domain(format!(
            "enumerate_types supports orders 1..=10, got {n}"
        )));
    }
    let mut out = Vec::new();
    let mut v = n % 2;
    while v < n {
        if v == 0 {
            out.push(TypeSpec {
                graph: SmallGraph::empty(0),
            });
        } else {
            for g in admissible_graph_classes(v, l, &[]) {
                out.push(TypeSpec { graph: g });
            }
        }
        v += 2;
    }
    Ok(out)
}

/// All tau-flags of order `m` up to label-preserving isomorphism, in
/// canonical-key order. `m - v(tau)` must be nonnegative with the parity of
/// an (N + v)/2 flag order, i.e. any m >= v(tau) is accepted here; parity
/// with the ambient N is the caller's contract.
pub fn enumerate_flags(tau: &TypeSpec, m: usize, l: usize, forbidden: &[SmallGraph]) -> Result<Vec<FlagSpec>> {
    let v = tau.order();
    if m < v {
        return Err(Error::Domain(format!(
            "flag order {m} below type order {v}"
        )));
    }
    if tau.graph.independence_number() >= l && v > 0 {
        return Err(Error::Domain(format!(
            "type {} is not admissible for l = {l}",
            tau.graph.to_edge_string()
        )));
    }
    if forbidden.iter().any(|f| tau.graph.contains_induced(f)) {
        return Err(Error::Domain(format!(
            "type {} contains a forbidden induced subgraph",
            tau.graph.to_edge_string()
        )));
    }
    let mut level: Vec<SmallGraph> = vec![tau.graph.clone()];
    for order in (v + 1)..=m {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for parent in &level {
            for mask in 0..(1u32 << (order - 1)) {
                let child = parent.with_vertex(mask);
                if child.independence_number() >= l {
                    continue;
                }
                if forbidden.iter().any(|f| contains_induced_at_last(&child, f)) {
                    continue;
                }
                let key = child.canonical_string_fixed(v);
                if seen.insert(key.clone()) {
                    next.push(SmallGraph::parse(&key).expect("canonical key parses"));
                }
            }
        }
        level = next;
    }
    let mut flags: Vec<FlagSpec> = level
        .into_iter()
        .map(|graph| FlagSpec { graph, labeled: v })
        .collect();
    flags.sort_by_key(|f| f.key());
    Ok(flags)
}
