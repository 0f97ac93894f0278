//! SDP emission in the sparse SDPA dialect and exact rounding of floating
//! solver output into certificate blocks.
//!
//! The emitted program is the standard dual encoding: the matrix variable is
//! block-diagonal with one PSD block per selected type, a diagonal slack
//! block over the admissible graphs, and a single 1x1 block holding the
//! bound. One equality constraint per admissible graph G_i ties them
//! together: <D_i^tau, Q^tau> summed over types, plus slack_i, plus the
//! bound, equals p(K_k, G_i). Maximizing the bound block solves the flag
//! SDP; the pair-coefficient matrices D follow the count-v1 convention.

use crate::enumerate::{admissible_graph_classes, enumerate_flags, enumerate_types, FlagSpec, TypeSpec};
use crate::exact::{rat_big, rationalize, rat_to_string, PsdBlock, Rat, RatMatrix};
use crate::flagcalc::pair_coefficients;
use crate::graph::SmallGraph;
use crate::{Error, Result};
use num::{One, Zero};
use serde::Serialize;
use std::io::Write;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeSelection {
    All,
    None,
    Indices(Vec<usize>),
}

#[derive(Clone, Debug, Serialize)]
pub struct SdpProblem {
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub extra_forbidden: Vec<String>,
    /// Canonical keys of the admissible graphs, i.e. the constraints.
    pub graphs: Vec<String>,
    /// Selected types with their flag lists.
    pub types: Vec<String>,
    pub flags: Vec<Vec<String>>,
    /// Per-type block dimension (flag count).
    pub block_sizes: Vec<usize>,
    /// Right-hand sides p(K_k, G_i) as rational strings.
    pub densities: Vec<String>,
    /// Per-graph, per-type pair-coefficient tables.
    #[serde(skip)]
    pub tables: Vec<Vec<Vec<Vec<i64>>>>,
}

impl SdpProblem {
    pub fn constraint_count(&self) -> usize {
        self.graphs.len()
    }

    pub fn slack_block_size(&self) -> usize {
        self.graphs.len()
    }
}

/// Build the SDP for (k, l, N): one constraint per admissible graph, one PSD
/// block per selected type.
pub fn generate_sdp(
    k: usize,
    l: usize,
    n: usize,
    extra_forbidden: &[SmallGraph],
    selection: &TypeSelection,
) -> Result<SdpProblem> {
    if n < 2 {
        return Err(Error::Domain("generate_sdp needs N >= 2".into()));
    }
    let graphs = admissible_graph_classes(n, l, extra_forbidden);
    if graphs.is_empty() {
        return Err(Error::Domain("no admissible graphs at this order".into()));
    }
    let all_types = enumerate_types(n, l)?;
    let selected: Vec<TypeSpec> = match selection {
        TypeSelection::All => all_types,
        TypeSelection::None => Vec::new(),
        TypeSelection::Indices(idx) => {
            let mut out = Vec::new();
            for &i in idx {
                let t = all_types
                    .get(i)
                    .ok_or_else(|| Error::Domain(format!("type index {i} out of range")))?;
                out.push(t.clone());
            }
            out
        }
    };
    // types whose flag universe is empty under the forbidden list are dropped
    let mut types = Vec::new();
    let mut flags: Vec<Vec<FlagSpec>> = Vec::new();
    for tau in selected {
        if extra_forbidden.iter().any(|f| tau.graph.contains_induced(f)) {
            continue;
        }
        let fl = enumerate_flags(&tau, (n + tau.order()) / 2, l, extra_forbidden)?;
        if fl.is_empty() {
            continue;
        }
        types.push(tau);
        flags.push(fl);
    }
    let denom = rat_big(crate::exact::binomial(n, k));
    let densities: Vec<String> = graphs
        .iter()
        .map(|g| rat_to_string(&(rat_big(g.count_cliques(k).into()) / denom.clone())))
        .collect();
    let mut tables = Vec::new();
    for g in &graphs {
        let mut per_type = Vec::new();
        for (t, tau) in types.iter().enumerate() {
            per_type.push(pair_coefficients(tau, &flags[t], g)?);
        }
        tables.push(per_type);
    }
    Ok(SdpProblem {
        k,
        l,
        n,
        extra_forbidden: extra_forbidden.iter().map(|g| g.canonical_key().0).collect(),
        graphs: graphs.iter().map(|g| g.canonical_key().0).collect(),
        types: types.iter().map(|t| t.graph.to_edge_string()).collect(),
        flags: flags
            .iter()
            .map(|fl| fl.iter().map(|f| f.key()).collect())
            .collect(),
        block_sizes: flags.iter().map(|fl| fl.len()).collect(),
        densities,
        tables,
    })
}

fn decimal(r: &Rat) -> String {
    // shortest round-trip decimal of the rational's double value
    let num: f64 = r.numer().to_string().parse().unwrap_or(0.0);
    let den: f64 = r.denom().to_string().parse().unwrap_or(1.0);
    format!("{}", num / den)
}

/// Write the problem in sparse SDPA format (".dat-s"). Blocks: the type
/// blocks, then a diagonal slack block over the graphs, then the 1x1 bound
/// block whose maximization is the objective.
pub fn write_sdpa<W: Write>(problem: &SdpProblem, mut w: W) -> Result<()> {
    let m = problem.constraint_count();
    let t = problem.block_sizes.len();
    writeln!(w, "{m}")?;
    writeln!(w, "{}", t + 2)?;
    let mut sizes: Vec<String> = problem.block_sizes.iter().map(|g| g.to_string()).collect();
    sizes.push(format!("-{}", problem.slack_block_size()));
    sizes.push("-1".to_string());
    writeln!(w, "{}", sizes.join(" "))?;
    let rhs: Vec<String> = problem
        .densities
        .iter()
        .map(|d| decimal(&crate::exact::rat_from_str(d).expect("stored rational")))
        .collect();
    writeln!(w, "{}", rhs.join(" "))?;
    // objective F0: the bound block
    writeln!(w, "0 {} 1 1 1", t + 2)?;
    for (i, per_type) in problem.tables.iter().enumerate() {
        let cons = i + 1;
        for (b, table) in per_type.iter().enumerate() {
            for (r, row) in table.iter().enumerate() {
                for (c, &val) in row.iter().enumerate().skip(r) {
                    if val != 0 {
                        writeln!(w, "{cons} {} {} {} {val}", b + 1, r + 1, c + 1)?;
                    }
                }
            }
        }
        writeln!(w, "{cons} {} {} {} 1", t + 1, i + 1, i + 1)?;
        writeln!(w, "{cons} {} 1 1 1", t + 2)?;
    }
    Ok(())
}

/// Floating per-type blocks recovered from a solver, plus the exact kernel
/// vectors the rounded blocks must annihilate.
#[derive(Clone, Debug)]
pub struct RoundingSpec {
    /// Per type: the forced kernel vectors (each of the block's dimension).
    pub forced_kernel: Vec<Vec<Vec<Rat>>>,
    pub denominator_cap: u64,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum RoundingFailure {
    #[error("block {block}: projected matrix has an indefinite zero-diagonal remainder")]
    Indefinite { block: usize },
    #[error("block {block}: {reason}")]
    Bad { block: usize, reason: String },
}

/// Round floating solver blocks into exact PSD blocks whose kernels contain
/// every forced vector. Per block: build a rational basis B of the
/// orthogonal complement of the forced span, express the float block in
/// that basis, rationalize with a denominator cap, then factor exactly,
/// dropping nonpositive pivots.
pub fn round_solution(
    float_blocks: &[Vec<Vec<f64>>],
    spec: &RoundingSpec,
) -> std::result::Result<Vec<PsdBlock>, RoundingFailure> {
    let mut out = Vec::new();
    for (bi, fq) in float_blocks.iter().enumerate() {
        let g = fq.len();
        if fq.iter().any(|row| row.len() != g) {
            return Err(RoundingFailure::Bad {
                block: bi,
                reason: "float block is not square".into(),
            });
        }
        let asym = (0..g)
            .flat_map(|i| (0..g).map(move |j| (i, j)))
            .map(|(i, j)| (fq[i][j] - fq[j][i]).abs())
            .fold(0.0f64, f64::max);
        if asym > 1e-6 {
            return Err(RoundingFailure::Bad {
                block: bi,
                reason: format!("float block asymmetric by {asym}"),
            });
        }
        let kernel = spec.forced_kernel.get(bi).cloned().unwrap_or_default();
        for v in &kernel {
            if v.len() != g {
                return Err(RoundingFailure::Bad {
                    block: bi,
                    reason: "forced vector dimension mismatch".into(),
                });
            }
        }
        let basis = if kernel.is_empty() {
            (0..g)
                .map(|i| {
                    let mut e = vec![Rat::zero(); g];
                    e[i] = Rat::one();
                    e
                })
                .collect()
        } else {
            let kmat = RatMatrix::from_rows(kernel.clone()).map_err(|e| RoundingFailure::Bad {
                block: bi,
                reason: e.to_string(),
            })?;
            kmat.kernel_basis()
        };
        let d = basis.len();
        if d == 0 {
            out.push(PsdBlock {
                qdash: vec![],
                r: vec![vec![]; g],
            });
            continue;
        }
        // float least-squares coordinates of the block in the basis:
        // S = (B^T B)^{-1} B^T Q B (B^T B)^{-1}
        let bf: Vec<Vec<f64>> = basis
            .iter()
            .map(|col| col.iter().map(rat_to_f64).collect())
            .collect();
        let mut btb = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                btb[i][j] = (0..g).map(|r| bf[i][r] * bf[j][r]).sum();
            }
        }
        let btb_inv = invert(&btb).ok_or(RoundingFailure::Bad {
            block: bi,
            reason: "basis Gram matrix is singular".into(),
        })?;
        // T = B^T Q B
        let mut t = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for r in 0..g {
                    for c in 0..g {
                        acc += bf[i][r] * fq[r][c] * bf[j][c];
                    }
                }
                t[i][j] = acc;
            }
        }
        let s_float = mat_mul(&mat_mul(&btb_inv, &t), &btb_inv);
        // rationalize symmetrically
        let mut s = RatMatrix::zero(d, d);
        for i in 0..d {
            for j in i..d {
                let r = rationalize((s_float[i][j] + s_float[j][i]) / 2.0, spec.denominator_cap);
                s[(i, j)] = r.clone();
                s[(j, i)] = r;
            }
        }
        // exact factorization, dropping nonpositive pivots
        let factors = ldl_drop_nonpositive(&s).ok_or(RoundingFailure::Indefinite { block: bi })?;
        let dprime = factors.len();
        let mut qdash = Vec::with_capacity(dprime);
        let mut r_cols: Vec<Vec<Rat>> = Vec::with_capacity(dprime);
        for (col, pivot) in factors {
            // lift the coordinate column back through B
            let mut lifted = vec![Rat::zero(); g];
            for (ci, coeff) in col.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                for r in 0..g {
                    lifted[r] += coeff * &basis[ci][r];
                }
            }
            r_cols.push(lifted);
            qdash.push(pivot);
        }
        let r_rows: Vec<Vec<String>> = (0..g)
            .map(|r| r_cols.iter().map(|col| rat_to_string(&col[r])).collect())
            .collect();
        out.push(PsdBlock {
            qdash: qdash.iter().map(rat_to_string).collect(),
            r: r_rows,
        });
    }
    Ok(out)
}

fn rat_to_f64(r: &Rat) -> f64 {
    let num: f64 = r.numer().to_string().parse().unwrap_or(0.0);
    let den: f64 = r.denom().to_string().parse().unwrap_or(1.0);
    num / den
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            out[i][j] = (0..k).map(|x| a[i][x] * b[x][j]).sum();
        }
    }
    out
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && a[r][col].abs() > 0.0 {
                let f = a[r][col];
                for c in 0..2 * n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Symmetric elimination that keeps positive pivots and discards negative
/// ones (each negative pivot removes its rank-one term from the output).
/// Fails only when the remaining diagonal is all zero while off-diagonal
/// entries survive, which pivot-dropping cannot repair.
fn ldl_drop_nonpositive(m: &RatMatrix) -> Option<Vec<(Vec<Rat>, Rat)>> {
    let n = m.rows();
    let mut a: Vec<Vec<Rat>> = (0..n).map(|i| m.row_vec(i)).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut kept: Vec<(Vec<Rat>, Rat)> = Vec::new();
    while !active.is_empty() {
        let pivot_idx = active
            .iter()
            .copied()
            .filter(|&i| !a[i][i].is_zero())
            .max_by(|&x, &y| {
                use num::Signed;
                a[x][x].abs().cmp(&a[y][y].abs())
            });
        let Some(p) = pivot_idx else {
            // all-zero diagonal: succeed iff the rest is zero
            for &i in &active {
                for &j in &active {
                    if !a[i][j].is_zero() {
                        return None;
                    }
                }
            }
            return Some(kept);
        };
        let pivot = a[p][p].clone();
        let mut col = vec![Rat::zero(); n];
        for &i in &active {
            col[i] = &a[i][p] / &pivot;
        }
        for &i in &active {
            if i == p {
                continue;
            }
            for &j in &active {
                if j == p {
                    continue;
                }
                let t = &col[i] * &a[p][j];
                a[i][j] -= t;
            }
        }
        for &i in &active {
            a[i][p] = Rat::zero();
            a[p][i] = Rat::zero();
        }
        use num::Signed;
        if pivot.is_positive() {
            kept.push((col, pivot));
        }
        active.retain(|&i| i != p);
    }
    Some(kept)
}

/// Parse solver output in the standard primal/dual text layout (CSDP-style
/// ".sol"): one line of dual values, then entries `<mat> <block> <i> <j> <v>`
/// where mat 2 carries the primal matrix. Returns the type blocks.
pub fn parse_solution(text: &str, block_sizes: &[usize]) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut blocks: Vec<Vec<Vec<f64>>> = block_sizes
        .iter()
        .map(|&g| vec![vec![0.0; g]; g])
        .collect();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            continue;
        }
        let mat: usize = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad solution line {line:?}")))?;
        if mat != 2 {
            continue;
        }
        let blk: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad solution line {line:?}")))?;
        if blk == 0 || blk > block_sizes.len() {
            continue; // slack or bound block
        }
        let i: usize = fields[2].parse().map_err(|_| Error::Parse(line.into()))?;
        let j: usize = fields[3].parse().map_err(|_| Error::Parse(line.into()))?;
        let v: f64 = fields[4].parse().map_err(|_| Error::Parse(line.into()))?;
        let b = &mut blocks[blk - 1];
        if i == 0 || j == 0 || i > b.len() || j > b.len() {
            return Err(Error::Parse(format!("index out of range in {line:?}")));
        }
        b[i - 1][j - 1] = v;
        b[j - 1][i - 1] = v;
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn goodman_problem_structure() {
        let p = generate_sdp(3, 3, 3, &[], &TypeSelection::All).unwrap();
        assert_eq!(p.constraint_count(), 3);
        assert_eq!(p.block_sizes, vec![2]);
        assert_eq!(p.slack_block_size(), 3);
        let mut buf = Vec::new();
        write_sdpa(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "3");
        assert_eq!(lines[1], "3");
        assert_eq!(lines[2], "2 -3 -1");
        assert_eq!(lines[3].split_whitespace().count(), 3);
        // objective touches only the bound block
        assert_eq!(lines[4], "0 3 1 1 1");
    }

    #[test]
    fn universe_38_at_n6() {
        let p = generate_sdp(4, 3, 6, &[], &TypeSelection::None).unwrap();
        assert_eq!(p.slack_block_size(), 38);
        assert_eq!(p.block_sizes.len(), 0); // pure LP
    }

    #[test]
    fn goodman_rounding_roundtrip() {
        let float = vec![vec![
            vec![0.125001, -0.124999],
            vec![-0.124999, 0.125001],
        ]];
        let spec = RoundingSpec {
            forced_kernel: vec![vec![vec![rat(1, 2), rat(1, 2)]]],
            denominator_cap: 1000,
        };
        let blocks = round_solution(&float, &spec).unwrap();
        assert_eq!(blocks.len(), 1);
        let q = blocks[0].assemble().unwrap();
        assert_eq!(q[(0, 0)], rat(1, 8));
        assert_eq!(q[(0, 1)], rat(-1, 8));
        assert!(q.in_kernel(&[rat(1, 2), rat(1, 2)]).unwrap());
    }

    #[test]
    fn zero_blocks_round_to_empty() {
        let float = vec![vec![vec![0.0; 3]; 3]];
        let spec = RoundingSpec {
            forced_kernel: vec![vec![]],
            denominator_cap: 100,
        };
        let blocks = round_solution(&float, &spec).unwrap();
        assert_eq!(blocks[0].qdash.len(), 0);
        let q = blocks[0].assemble().unwrap();
        assert!(q.check_psd().unwrap());
    }

    #[test]
    fn identity_with_kernel_projects_down() {
        let float = vec![vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]];
        let spec = RoundingSpec {
            forced_kernel: vec![vec![vec![rat(1, 1), rat(1, 1), rat(1, 1)]]],
            denominator_cap: 10000,
        };
        let blocks = round_solution(&float, &spec).unwrap();
        let q = blocks[0].assemble().unwrap();
        assert_eq!(q.rank(), 2);
        assert!(q.check_psd().unwrap());
        assert!(q
            .in_kernel(&[rat(1, 1), rat(1, 1), rat(1, 1)])
            .unwrap());
    }

    #[test]
    fn negative_blocks_get_dropped_pivots() {
        let float = vec![vec![vec![-1.0, 0.0], vec![0.0, 2.0]]];
        let spec = RoundingSpec {
            forced_kernel: vec![vec![]],
            denominator_cap: 100,
        };
        let blocks = round_solution(&float, &spec).unwrap();
        let q = blocks[0].assemble().unwrap();
        assert!(q.check_psd().unwrap());
        assert_eq!(q.rank(), 1);
    }

    #[test]
    fn solution_parser_reads_primal_blocks() {
        let text = "0.25 0.25 0.25\n1 1 1 1 0.5\n2 1 1 1 0.125\n2 1 1 2 -0.125\n2 1 2 2 0.125\n2 2 1 1 0.25\n2 3 1 1 0.25\n";
        let blocks = parse_solution(text, &[2]).unwrap();
        assert_eq!(blocks[0][0][0], 0.125);
        assert_eq!(blocks[0][0][1], -0.125);
        assert_eq!(blocks[0][1][0], -0.125);
    }
}
