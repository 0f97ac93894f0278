//! The flag calculus under the count-v1 convention: exact pair-coefficient
//! tables, alpha coefficients, bound derivation, sharp graphs, and forced
//! zero eigenvectors.
//!
//! Convention. For a type tau of order v, flags F_a, F_b of order
//! M = (N+v)/2 and an admissible N-vertex graph H, coef(a,b;H) counts the
//! triples (chi, X1, X2) where chi is an injection of the labels into V(H)
//! inducing tau, X1 and X2 are M-sets with X1 ∩ X2 = chi([v]) and
//! X1 ∪ X2 = V(H), and (H[Xi], chi) is flag-isomorphic to F_a resp. F_b.
//! Alpha coefficients are Frobenius products of the Q blocks against these
//! raw counts, so the double-counting identity over host graphs is exact at
//! every order with no error term.

use crate::constructions::{PatternGraph, PatternMode, SlotPattern};
use crate::enumerate::{FlagSpec, TypeSpec};
use crate::exact::{rat_big, rat_to_string, Rat, RatMatrix};
use crate::graph::{subsets_of_size, SmallGraph};
use crate::{Error, Result};
use num::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;

/// The parsed, assembled view of a certificate that the calculus consumes.
#[derive(Clone, Debug)]
pub struct CertContext {
    pub k: usize,
    pub l: usize,
    pub n: usize,
    /// Admissible N-vertex graphs in certificate order.
    pub graphs: Vec<SmallGraph>,
    pub types: Vec<TypeSpec>,
    /// Per-type flag lists in canonical-key order.
    pub flags: Vec<Vec<FlagSpec>>,
    /// Per-type assembled Q matrices (g x g, PSD).
    pub q: Vec<RatMatrix>,
}

/// P(F, host) for flags over the same type: the number of v(F)-subsets of
/// the host containing all labeled vertices and inducing F as a flag.
pub fn flag_count(f: &FlagSpec, host: &FlagSpec) -> Result<u64> {
    if f.labeled != host.labeled {
        return Err(Error::Domain(format!(
            "flag_count: label counts differ ({} vs {})",
            f.labeled, host.labeled
        )));
    }
    let v = f.labeled;
    let label_mask = (1u32 << v) - 1;
    if f.graph.induced(label_mask) != host.graph.induced(label_mask) {
        return Err(Error::Domain("flag_count: flags are over different types".into()));
    }
    if f.order() > host.order() {
        return Err(Error::Domain("flag_count: flag larger than host".into()));
    }
    let key = f.key();
    let mut masks = Vec::new();
    subsets_of_size(
        host.graph.full_mask() & !label_mask,
        f.order() - v,
        &mut masks,
    );
    let mut count = 0;
    for m in masks {
        // labels occupy the lowest positions, so induced() keeps them first
        if host.graph.induced(m | label_mask).canonical_string_fixed(v) == key {
            count += 1;
        }
    }
    Ok(count)
}

fn flag_index_map(flags: &[FlagSpec]) -> HashMap<String, usize> {
    flags
        .iter()
        .enumerate()
        .map(|(i, f)| (f.key(), i))
        .collect()
}

/// Builds the order-(v+|extra|) graph whose first v vertices are chi's image
/// with the type labeling and whose remaining vertices are `extra`.
fn labeled_induced(h: &SmallGraph, chi: &[usize], extra: &[usize]) -> SmallGraph {
    let total = chi.len() + extra.len();
    let mut g = SmallGraph::empty(total);
    let vertex = |i: usize| {
        if i < chi.len() {
            chi[i]
        } else {
            extra[i - chi.len()]
        }
    };
    for a in 0..total {
        for b in (a + 1)..total {
            if h.has_edge(vertex(a), vertex(b)) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

pub(crate) fn injections_inducing_type(h: &SmallGraph, tau: &SmallGraph) -> Vec<Vec<usize>> {
    let v = tau.order();
    let n = h.order();
    let mut out = Vec::new();
    let mut chi: Vec<usize> = Vec::with_capacity(v);
    fn rec(h: &SmallGraph, tau: &SmallGraph, chi: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = chi.len();
        if i == tau.order() {
            out.push(chi.clone());
            return;
        }
        for cand in 0..h.order() {
            if chi.contains(&cand) {
                continue;
            }
            if (0..i).all(|j| h.has_edge(chi[j], cand) == tau.has_edge(j, i)) {
                chi.push(cand);
                rec(h, tau, chi, out);
                chi.pop();
            }
        }
    }
    if v > n {
        return out;
    }
    rec(h, tau, &mut chi, &mut out);
    out
}

/// coef(a,b;H): ordered-pair triple counts as defined in the module header.
/// The returned g x g matrix is symmetric by construction.
pub fn pair_coefficients(
    tau: &TypeSpec,
    flags: &[FlagSpec],
    h: &SmallGraph,
) -> Result<Vec<Vec<i64>>> {
    let v = tau.order();
    let n = h.order();
    if (n + v) % 2 != 0 {
        return Err(Error::Domain(format!(
            "pair_coefficients: N - v must be even (N={n}, v={v})"
        )));
    }
    let m = (n + v) / 2;
    if flags.is_empty() || flags.iter().any(|f| f.order() != m || f.labeled != v) {
        return Err(Error::Domain(format!(
            "pair_coefficients: flags must all have order {m} with {v} labels"
        )));
    }
    let half = (n - v) / 2;
    let index = flag_index_map(flags);
    let g = flags.len();
    let mut coef = vec![vec![0i64; g]; g];
    for chi in injections_inducing_type(h, &tau.graph) {
        let mut chi_mask = 0u32;
        for &c in &chi {
            chi_mask |= 1 << c;
        }
        let rest: Vec<usize> = (0..n).filter(|&x| chi_mask >> x & 1 == 0).collect();
        let rest_mask = h.full_mask() & !chi_mask;
        let mut masks = Vec::new();
        subsets_of_size(rest_mask, half, &mut masks);
        for m1 in masks {
            let x1: Vec<usize> = rest.iter().copied().filter(|&x| m1 >> x & 1 == 1).collect();
            let x2: Vec<usize> = rest.iter().copied().filter(|&x| m1 >> x & 1 == 0).collect();
            let key1 = labeled_induced(h, &chi, &x1).canonical_string_fixed(v);
            let key2 = labeled_induced(h, &chi, &x2).canonical_string_fixed(v);
            let a = *index.get(&key1).ok_or_else(|| {
                Error::Domain(format!("flag list incomplete: missing {key1}"))
            })?;
            let b = *index.get(&key2).ok_or_else(|| {
                Error::Domain(format!("flag list incomplete: missing {key2}"))
            })?;
            coef[a][b] += 1;
        }
    }
    Ok(coef)
}

/// Per-graph alpha coefficients: sum over types of the Frobenius product of
/// the assembled Q block against the pair-coefficient table.
pub fn alpha_coefficients(ctx: &CertContext) -> Result<Vec<Rat>> {
    ctx.graphs
        .par_iter()
        .map(|h| {
            let mut alpha = Rat::zero();
            for (t, tau) in ctx.types.iter().enumerate() {
                if ctx.q[t].rows() == 0 {
                    continue;
                }
                let table = pair_coefficients(tau, &ctx.flags[t], h)?;
                alpha += ctx.q[t].frobenius_int(&table)?;
            }
            Ok(alpha)
        })
        .collect()
}

/// The verdict of the bound derivation over one certificate.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub claimed_bound: Rat,
    /// c' = min over graphs of p(K_k, G_i) - alpha_i.
    pub derived_bound: Rat,
    pub alpha: Vec<Rat>,
    /// p(K_k, G_i) per graph.
    pub clique_density: Vec<Rat>,
    /// Indices with alpha_i = p(K_k, G_i) - c' exactly.
    pub sharp_indices: Vec<usize>,
}

impl BoundReport {
    /// Nonnegative slack p(K_k,G_i) - alpha_i - c' per graph.
    pub fn slacks(&self) -> Vec<Rat> {
        self.alpha
            .iter()
            .zip(&self.clique_density)
            .map(|(a, p)| p - a - &self.derived_bound)
            .collect()
    }

    pub fn verified(&self) -> bool {
        self.derived_bound >= self.claimed_bound
    }

    /// Graphs witnessing a failed claim: alpha_i > p(K_k,G_i) - claimed.
    pub fn violating_indices(&self) -> Vec<usize> {
        self.alpha
            .iter()
            .zip(&self.clique_density)
            .enumerate()
            .filter(|(_, (a, p))| *p - *a < self.claimed_bound)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Computes alpha, the derived bound c' = min (p(K_k,G_i) - alpha_i), and
/// the sharp set.
pub fn derive_bound(ctx: &CertContext, claimed: &Rat) -> Result<BoundReport> {
    let alpha = alpha_coefficients(ctx)?;
    let denom = rat_big(crate::exact::binomial(ctx.n, ctx.k));
    let clique_density: Vec<Rat> = ctx
        .graphs
        .iter()
        .map(|g| rat_big(g.count_cliques(ctx.k).into()) / denom.clone())
        .collect();
    let derived = alpha
        .iter()
        .zip(&clique_density)
        .map(|(a, p)| p - a)
        .min()
        .ok_or_else(|| Error::Domain("certificate lists no admissible graphs".into()))?;
    let sharp_indices = alpha
        .iter()
        .zip(&clique_density)
        .enumerate()
        .filter(|(_, (a, p))| *p - *a == derived)
        .map(|(i, _)| i)
        .collect();
    Ok(BoundReport {
        claimed_bound: claimed.clone(),
        derived_bound: derived,
        alpha,
        clique_density,
        sharp_indices,
    })
}

// ---------------------------------------------------------------------------
// Forced zero eigenvectors
// ---------------------------------------------------------------------------

/// Limit flag-density vector of a type embedded in the pattern: entry j is
/// the probability that (M - v) extra vertices drawn independently with the
/// pattern's part weights extend the embedded type to flag F_j. Entries sum
/// to one; the vector must lie in the kernel of the type's Q block for any
/// certificate that is tight on the pattern.
pub fn forced_vector(
    pattern: &PatternGraph,
    tau: &TypeSpec,
    flags: &[FlagSpec],
    embedding: &[usize],
) -> Result<Vec<Rat>> {
    let v = tau.order();
    if embedding.len() != v {
        return Err(Error::Dimension(format!(
            "embedding has {} entries for a type of order {v}",
            embedding.len()
        )));
    }
    let parts = pattern.base.order();
    if embedding.iter().any(|&p| p >= parts) {
        return Err(Error::Domain("embedding part out of range".into()));
    }
    for i in 0..v {
        for j in (i + 1)..v {
            if tau.graph.has_edge(i, j) != pattern.adjacent_or_equal(embedding[i], embedding[j]) {
                return Err(Error::Domain(format!(
                    "embedding does not realize the type at labels {} and {}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    if flags.is_empty() {
        return Err(Error::Domain("empty flag list".into()));
    }
    let m = flags[0].order();
    if flags.iter().any(|f| f.order() != m || f.labeled != v) {
        return Err(Error::Domain("flags must share one order and type".into()));
    }
    let extras = m - v;
    let index = flag_index_map(flags);
    let mut vec = vec![Rat::zero(); flags.len()];
    let positive: Vec<usize> = (0..parts)
        .filter(|&p| !pattern.weights[p].is_zero())
        .collect();
    let mut assignment = vec![0usize; extras];
    enumerate_extensions(
        pattern,
        tau,
        embedding,
        &positive,
        &index,
        &mut assignment,
        0,
        Rat::one(),
        &mut vec,
    )?;
    let total: Rat = vec.iter().cloned().fold(Rat::zero(), |a, b| a + b);
    if !total.is_one() {
        return Err(Error::Domain(format!(
            "forced vector mass {} != 1: flag list incomplete?",
            rat_to_string(&total)
        )));
    }
    Ok(vec)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_extensions(
    pattern: &PatternGraph,
    tau: &TypeSpec,
    embedding: &[usize],
    positive: &[usize],
    index: &HashMap<String, usize>,
    assignment: &mut [usize],
    depth: usize,
    weight: Rat,
    out: &mut [Rat],
) -> Result<()> {
    if depth == assignment.len() {
        let v = embedding.len();
        let total = v + assignment.len();
        let mut g = SmallGraph::empty(total);
        for i in 0..v {
            for j in (i + 1)..v {
                if tau.graph.has_edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        for (t, &pt) in assignment.iter().enumerate() {
            for (i, &pi) in embedding.iter().enumerate() {
                if pattern.adjacent_or_equal(pi, pt) {
                    g.add_edge(i, v + t);
                }
            }
            for (s, &ps) in assignment.iter().enumerate().take(t) {
                if pattern.adjacent_or_equal(ps, pt) {
                    g.add_edge(v + s, v + t);
                }
            }
        }
        let key = g.canonical_string_fixed(v);
        let idx = *index
            .get(&key)
            .ok_or_else(|| Error::Domain(format!("flag list incomplete: missing {key}")))?;
        out[idx] += weight;
        return Ok(());
    }
    for &p in positive {
        assignment[depth] = p;
        enumerate_extensions(
            pattern,
            tau,
            embedding,
            positive,
            index,
            assignment,
            depth + 1,
            &weight * &pattern.weights[p],
            out,
        )?;
    }
    Ok(())
}

/// All embeddings of the type into the pattern's parts, as part assignments.
/// `allow` marks the parts usable by labeled vertices; `unit` marks parts
/// that can hold at most one labeled vertex.
pub(crate) fn type_embeddings(
    base: &SmallGraph,
    mode: PatternMode,
    tau: &SmallGraph,
    allow: &[bool],
    unit: &[bool],
) -> Vec<Vec<usize>> {
    let v = tau.order();
    let mut out = Vec::new();
    let mut emb: Vec<usize> = Vec::with_capacity(v);
    let adjeq = |p: usize, q: usize| {
        if p == q {
            mode == PatternMode::Expansion
        } else {
            base.has_edge(p, q)
        }
    };
    fn rec(
        base: &SmallGraph,
        tau: &SmallGraph,
        allow: &[bool],
        unit: &[bool],
        adjeq: &dyn Fn(usize, usize) -> bool,
        emb: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = emb.len();
        if i == tau.order() {
            out.push(emb.clone());
            return;
        }
        for p in 0..base.order() {
            if !allow[p] {
                continue;
            }
            if unit[p] && emb.contains(&p) {
                continue;
            }
            if (0..i).all(|j| tau.has_edge(j, i) == adjeq(emb[j], p)) {
                emb.push(p);
                rec(base, tau, allow, unit, adjeq, emb, out);
                emb.pop();
            }
        }
    }
    rec(base, tau, allow, unit, &adjeq, &mut emb, &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct ForcedKernelFailure {
    pub type_index: usize,
    pub embedding: Vec<usize>,
    pub vector: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub struct ForcedKernelReport {
    pub pass: bool,
    pub failures: Vec<ForcedKernelFailure>,
    /// Deduplicated forced vectors checked, per type.
    pub vectors_checked: Vec<usize>,
}

/// Checks that for every type and every embedding class into the pattern,
/// the forced vector lies in the kernel of the assembled Q block.
pub fn check_forced_kernel(ctx: &CertContext, pattern: &PatternGraph) -> Result<ForcedKernelReport> {
    let mut failures = Vec::new();
    let mut vectors_checked = Vec::new();
    let allow: Vec<bool> = pattern.weights.iter().map(|w| !w.is_zero()).collect();
    let unit = vec![false; pattern.base.order()];
    for (t, tau) in ctx.types.iter().enumerate() {
        let embeddings = type_embeddings(&pattern.base, pattern.mode, &tau.graph, &allow, &unit);
        let mut seen: Vec<Vec<Rat>> = Vec::new();
        for emb in embeddings {
            let vec = forced_vector(pattern, tau, &ctx.flags[t], &emb)?;
            if seen.contains(&vec) {
                continue;
            }
            if !ctx.q[t].in_kernel(&vec)? {
                failures.push(ForcedKernelFailure {
                    type_index: t,
                    embedding: emb,
                    vector: vec.clone(),
                });
            }
            seen.push(vec);
        }
        vectors_checked.push(seen.len());
    }
    Ok(ForcedKernelReport {
        pass: failures.is_empty(),
        failures,
        vectors_checked,
    })
}

/// Forced vectors per type for the rounding step. With `phantom` set and an
/// edgeless pattern, embeddings may additionally use two zero-weight
/// single-vertex slots joined by one cross-edge between the first two parts
/// (the vanishing-density limit of a phantom edge).
pub fn collect_forced_vectors(
    pattern: &PatternGraph,
    types: &[TypeSpec],
    flags: &[Vec<FlagSpec>],
    phantom: bool,
) -> Result<Vec<Vec<Vec<Rat>>>> {
    let mut out = Vec::new();
    let phantom_applicable = phantom && pattern.base.edge_count() == 0 && pattern.base.order() >= 2;
    let augmented = if phantom_applicable {
        let slot = SlotPattern::with_phantom_edge(pattern, 0, 1);
        let mut weights = pattern.weights.clone();
        weights.push(Rat::zero());
        weights.push(Rat::zero());
        Some((
            PatternGraph {
                base: slot.graph.clone(),
                weights,
                mode: pattern.mode,
            },
            slot.unit,
        ))
    } else {
        None
    };
    for (t, tau) in types.iter().enumerate() {
        let mut vectors: Vec<Vec<Rat>> = Vec::new();
        let allow: Vec<bool> = pattern.weights.iter().map(|w| !w.is_zero()).collect();
        let unit = vec![false; pattern.base.order()];
        for emb in type_embeddings(&pattern.base, pattern.mode, &tau.graph, &allow, &unit) {
            let vec = forced_vector(pattern, tau, &flags[t], &emb)?;
            if !vectors.contains(&vec) {
                vectors.push(vec);
            }
        }
        if let Some((aug, unit)) = &augmented {
            let allow: Vec<bool> = aug
                .weights
                .iter()
                .zip(unit.iter())
                .map(|(w, &u)| !w.is_zero() || u)
                .collect();
            for emb in type_embeddings(&aug.base, aug.mode, &tau.graph, &allow, unit) {
                let vec = forced_vector(aug, tau, &flags[t], &emb)?;
                if !vectors.contains(&vec) {
                    vectors.push(vec);
                }
            }
        }
        out.push(vectors);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_flags;
    use crate::exact::{rat, rat_int};

    fn g(s: &str) -> SmallGraph {
        SmallGraph::parse(s).unwrap()
    }

    fn point_type() -> TypeSpec {
        TypeSpec {
            graph: SmallGraph::empty(1),
        }
    }

    fn point_flags() -> Vec<FlagSpec> {
        enumerate_flags(&point_type(), 2, 3, &[]).unwrap()
    }

    fn goodman_ctx(qdash: &str) -> CertContext {
        let graphs = vec![g("3:12"), g("3:1213"), g("3:121323")];
        let block = crate::exact::PsdBlock {
            qdash: vec![qdash.to_string()],
            r: vec![vec!["1".into()], vec!["-1".into()]],
        };
        CertContext {
            k: 3,
            l: 3,
            n: 3,
            graphs,
            types: vec![point_type()],
            flags: vec![point_flags()],
            q: vec![block.assemble().unwrap()],
        }
    }

    #[test]
    fn flag_count_examples() {
        let flags = point_flags();
        // F = host -> 1
        assert_eq!(flag_count(&flags[1], &flags[1]).unwrap(), 1);
        // labeled vertex in K3, edge flag -> both neighbors
        let host = FlagSpec {
            graph: g("3:121323"),
            labeled: 1,
        };
        assert_eq!(flag_count(&flags[1], &host).unwrap(), 2);
        assert_eq!(flag_count(&flags[0], &host).unwrap(), 0);
    }

    #[test]
    fn flag_counts_partition_subsets() {
        // every 5-subset through the labels of a tau6-labeled admissible host
        // induces exactly one of the 8 flags, so the counts sum to C(2,1)
        let tau = TypeSpec { graph: g("4:121324") };
        let flags = enumerate_flags(&tau, 5, 3, &[]).unwrap();
        let mut hosts = 0;
        for key in crate::enumerate::admissible_graphs(6, 3, &[]).unwrap() {
            let h = SmallGraph::parse(&key.0).unwrap();
            for chi in injections_inducing_type(&h, &tau.graph) {
                // relabel so chi becomes the labeled prefix
                let mut perm = vec![usize::MAX; 6];
                for (label, &image) in chi.iter().enumerate() {
                    perm[image] = label;
                }
                let mut next = 4;
                for p in perm.iter_mut() {
                    if *p == usize::MAX {
                        *p = next;
                        next += 1;
                    }
                }
                let host = FlagSpec { graph: h.relabel(&perm), labeled: 4 };
                let total: u64 = flags.iter().map(|f| flag_count(f, &host).unwrap()).sum();
                assert_eq!(total, 2);
                hosts += 1;
            }
        }
        assert!(hosts > 0);
    }

    #[test]
    fn pair_coefficients_goodman_tables() {
        let tau = point_type();
        let flags = point_flags();
        // H = K3: only (edge, edge), six triples
        let t = pair_coefficients(&tau, &flags, &g("3:121323")).unwrap();
        assert_eq!(t, vec![vec![0, 0], vec![0, 6]]);
        // H = one-edge graph
        let t = pair_coefficients(&tau, &flags, &g("3:12")).unwrap();
        assert_eq!(t, vec![vec![2, 2], vec![2, 0]]);
        // H = P3
        let t = pair_coefficients(&tau, &flags, &g("3:1213")).unwrap();
        assert_eq!(t, vec![vec![0, 2], vec![2, 2]]);
    }

    #[test]
    fn pair_coefficients_no_type_copy_is_zero() {
        let tau = TypeSpec { graph: g("2:12") };
        let flags = enumerate_flags(&tau, 3, 3, &[]).unwrap();
        let host = SmallGraph::empty(4); // no edge, no copy of the type
        let t = pair_coefficients(&tau, &flags, &host).unwrap();
        assert!(t.iter().flatten().all(|&x| x == 0));
    }

    #[test]
    fn pair_coefficient_row_sums() {
        // sum over all entries = (#injections realizing tau) * C(N-v, (N-v)/2)
        let tau = point_type();
        let flags = point_flags();
        for key in crate::enumerate::admissible_graphs(3, 3, &[]).unwrap() {
            let h = SmallGraph::parse(&key.0).unwrap();
            let t = pair_coefficients(&tau, &flags, &h).unwrap();
            let total: i64 = t.iter().flatten().sum();
            let injections = injections_inducing_type(&h, &tau.graph).len() as i64;
            assert_eq!(total, injections * 2);
            // symmetry
            assert_eq!(t[0][1], t[1][0]);
        }
    }

    #[test]
    fn goodman_alpha_and_bound() {
        let ctx = goodman_ctx("1/8");
        let alpha = alpha_coefficients(&ctx).unwrap();
        assert_eq!(alpha, vec![rat(-1, 4), rat(-1, 4), rat(3, 4)]);
        let report = derive_bound(&ctx, &rat(1, 4)).unwrap();
        assert_eq!(report.derived_bound, rat(1, 4));
        assert!(report.verified());
        assert_eq!(report.sharp_indices, vec![0, 1, 2]);
        assert!(report.violating_indices().is_empty());
        // claimed 1/3 fails, violating graphs named
        let report = derive_bound(&ctx, &rat(1, 3)).unwrap();
        assert!(!report.verified());
        assert!(!report.violating_indices().is_empty());
    }

    #[test]
    fn alpha_linearity_and_zero_blocks() {
        // zero blocks -> alpha = 0 -> c' = min density = 0
        let mut ctx = goodman_ctx("1/8");
        ctx.q = vec![RatMatrix::zero(2, 2)];
        let alpha = alpha_coefficients(&ctx).unwrap();
        assert!(alpha.iter().all(|a| a.is_zero()));
        let report = derive_bound(&ctx, &rat_int(0)).unwrap();
        assert_eq!(report.derived_bound, rat_int(0));
        // scaling Q' scales alpha
        let ctx2 = goodman_ctx("1/4");
        let alpha2 = alpha_coefficients(&ctx2).unwrap();
        let alpha1 = alpha_coefficients(&goodman_ctx("1/8")).unwrap();
        for (a2, a1) in alpha2.iter().zip(&alpha1) {
            assert_eq!(a2.clone(), a1 * rat_int(2));
        }
    }

    #[test]
    fn forced_vector_c5_tau6() {
        let tau = TypeSpec { graph: g("4:121324") };
        let flags = enumerate_flags(&tau, 5, 3, &[]).unwrap();
        let pattern = PatternGraph::uniform(g("5:1213243545"), PatternMode::Expansion);
        let allow = vec![true; 5];
        let unit = vec![false; 5];
        let embeddings = type_embeddings(&pattern.base, pattern.mode, &tau.graph, &allow, &unit);
        assert!(!embeddings.is_empty());
        let vec = forced_vector(&pattern, &tau, &flags, &embeddings[0]).unwrap();
        let mut sorted = vec.clone();
        sorted.sort();
        let expected: Vec<Rat> = (0..3)
            .map(|_| rat_int(0))
            .chain((0..5).map(|_| rat(1, 5)))
            .collect();
        assert_eq!(sorted, expected);
    }

    #[test]
    fn forced_vector_single_part() {
        let tau = point_type();
        let flags = point_flags();
        let pattern = PatternGraph::uniform(SmallGraph::empty(1), PatternMode::Expansion);
        let vec = forced_vector(&pattern, &tau, &flags, &[0]).unwrap();
        // parts are cliques in an expansion: the edge flag gets everything
        assert_eq!(vec, vec![rat_int(0), rat_int(1)]);
    }

    #[test]
    fn forced_vector_rejects_bad_embedding() {
        let tau = TypeSpec { graph: g("2:") }; // two non-adjacent labels
        let flags = enumerate_flags(&tau, 3, 3, &[]).unwrap();
        let pattern = PatternGraph::uniform(g("2:12"), PatternMode::Expansion);
        // same part would make them adjacent
        assert!(forced_vector(&pattern, &tau, &flags, &[0, 0]).is_err());
        assert!(forced_vector(&pattern, &tau, &flags, &[0, 1]).is_err()); // edge in base
    }

    #[test]
    fn goodman_forced_kernel() {
        let ctx = goodman_ctx("1/8");
        let ok2 = PatternGraph::uniform(SmallGraph::empty(2), PatternMode::Expansion);
        let report = check_forced_kernel(&ctx, &ok2).unwrap();
        assert!(report.pass);
        assert_eq!(report.vectors_checked, vec![1]);
        // identity Q has trivial kernel -> fails
        let mut bad = goodman_ctx("1/8");
        bad.q = vec![RatMatrix::identity(2)];
        let report = check_forced_kernel(&bad, &ok2).unwrap();
        assert!(!report.pass);
        // pattern admitting no embedding: single clique part has no
        // realization of the nonadjacent pair type
        let tau2 = TypeSpec { graph: g("2:") };
        let ctx2 = CertContext {
            k: 3,
            l: 3,
            n: 4,
            graphs: vec![],
            types: vec![tau2],
            flags: vec![enumerate_flags(&TypeSpec { graph: g("2:") }, 3, 3, &[]).unwrap()],
            q: vec![RatMatrix::identity(3)],
        };
        let k1 = PatternGraph::uniform(SmallGraph::empty(1), PatternMode::Expansion);
        let report = check_forced_kernel(&ctx2, &k1).unwrap();
        assert!(report.pass); // vacuous
        assert_eq!(report.vectors_checked, vec![0]);
    }

    #[test]
    fn goodman_forced_vector_value() {
        let tau = point_type();
        let flags = point_flags();
        let ok2 = PatternGraph::uniform(SmallGraph::empty(2), PatternMode::Expansion);
        let vec = forced_vector(&ok2, &tau, &flags, &[0]).unwrap();
        assert_eq!(vec, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn phantom_vectors_superset() {
        // pattern OK3 uniform (l=4): phantom adds vectors for types with an edge
        let l = 4;
        let types: Vec<TypeSpec> = crate::enumerate::enumerate_types(5, l)
            .unwrap()
            .into_iter()
            .filter(|t| t.order() == 3)
            .collect();
        let flags: Vec<Vec<FlagSpec>> = types
            .iter()
            .map(|t| enumerate_flags(t, 4, l, &[]).unwrap())
            .collect();
        let ok3 = PatternGraph::uniform(SmallGraph::empty(3), PatternMode::Expansion);
        let plain = collect_forced_vectors(&ok3, &types, &flags, false).unwrap();
        let phantom = collect_forced_vectors(&ok3, &types, &flags, true).unwrap();
        let mut some_strictly_more = false;
        for (t, ty) in types.iter().enumerate() {
            for v in &plain[t] {
                assert!(phantom[t].contains(v));
            }
            if ty.graph.edge_count() > 0 && phantom[t].len() > plain[t].len() {
                some_strictly_more = true;
            }
        }
        assert!(some_strictly_more);
    }
}
