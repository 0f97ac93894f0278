//! Arbitrary-precision rational scalars, vectors and matrices. All arithmetic
//! here is exact; the only floating point in the crate lives in
//! `constructions::optimize_weights` and the SDP rounding *input*.

use crate::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_big(n: BigInt) -> Rat {
    Rat::from_integer(n)
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parse "p/q" or "p" (decimal integer strings, optional sign).
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer {t:?} in rational")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Render canonically: "p" when the denominator is 1, else "p/q".
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Continued-fraction approximation of `x` with denominator at most `cap`.
pub fn rationalize(x: f64, cap: u64) -> Rat {
    if !x.is_finite() {
        return Rat::zero();
    }
    let neg = x < 0.0;
    let mut x = x.abs();
    // convergents p/q of the continued fraction of x
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::one(),
        BigInt::one(),
        BigInt::zero(),
    );
    let cap = BigInt::from(cap.max(1));
    for _ in 0..64 {
        let a = x.floor();
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > cap {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    let r = if q1.is_zero() {
        Rat::zero()
    } else {
        Rat::new(p1, q1)
    };
    if neg {
        -r
    } else {
        r
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_vec(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "matrix product {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix-vector product {}x{} * {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| &self[(i, j)] * &v[j])
                    .fold(Rat::zero(), |a, b| a + b)
            })
            .collect())
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    /// Frobenius inner product against an integer matrix of equal dimensions.
    pub fn frobenius_int(&self, other: &[Vec<i64>]) -> Result<Rat> {
        if other.len() != self.rows || other.iter().any(|r| r.len() != self.cols) {
            return Err(Error::Dimension("frobenius dimensions".into()));
        }
        let mut acc = Rat::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if other[i][j] != 0 {
                    acc += &self[(i, j)] * rat_int(other[i][j]);
                }
            }
        }
        Ok(acc)
    }

    /// Rank over the rationals. Rows are scaled to integers, then eliminated
    /// fraction-free (Bareiss) so intermediate entries stay division-exact.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    let d = self[(i, j)].denom();
                    lcm = num::integer::lcm(lcm, d.clone());
                }
                (0..self.cols)
                    .map(|j| {
                        let r = &self[(i, j)];
                        r.numer() * (&lcm / r.denom())
                    })
                    .collect()
            })
            .collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..cols {
            let Some(pivot_row) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot_row);
            let pivot = m[rank][col].clone();
            for r in (rank + 1)..rows {
                for c in (col + 1)..cols {
                    let t = (&pivot * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                    m[r][c] = t;
                }
                m[r][col] = BigInt::zero();
            }
            prev = pivot;
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Basis of the null space; empty iff the matrix has full column rank.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        // rational RREF
        let mut m: Vec<Vec<Rat>> = (0..self.rows).map(|i| self.row_vec(i)).collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, pr);
            let inv = m[r][c].clone();
            for x in m[r].iter_mut() {
                *x = &*x / &inv;
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..cols {
                        let t = &m[r][j] * &f;
                        m[i][j] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in (0..cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![Rat::zero(); cols];
            v[free] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// True iff M v = 0 exactly.
    pub fn in_kernel(&self, v: &[Rat]) -> Result<bool> {
        Ok(self.mul_vec(v)?.iter().all(|x| x.is_zero()))
    }

    /// Exact positive-semidefiniteness test by LDL^T with diagonal pivoting.
    /// A symmetric rational matrix is PSD iff the elimination below runs to
    /// completion with nonnegative pivots: whenever the remaining diagonal is
    /// all zero, PSD forces the whole remaining block to vanish.
    pub fn check_psd(&self) -> Result<bool> {
        if !self.is_symmetric() {
            return Err(Error::Domain("check_psd requires a symmetric matrix".into()));
        }
        Ok(ldl_pivots(self).is_some())
    }

    /// LDL^T pivots (positive ones only), or None when the matrix is not PSD.
    pub fn psd_ldl(&self) -> Option<Vec<(Vec<Rat>, Rat)>> {
        ldl_pivots(self)
    }
}

/// Runs symmetric elimination on a PSD candidate. Returns the list of
/// (column vector, pivot) pairs with strictly positive pivots such that
/// M = sum pivot * col * col^T, or None when M is not PSD.
fn ldl_pivots(m: &RatMatrix) -> Option<Vec<(Vec<Rat>, Rat)>> {
    let n = m.rows();
    let mut a: Vec<Vec<Rat>> = (0..n).map(|i| m.row_vec(i)).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut factors: Vec<(Vec<Rat>, Rat)> = Vec::new();
    while !active.is_empty() {
        // any negative diagonal entry kills PSD
        if active.iter().any(|&i| a[i][i].is_negative()) {
            return None;
        }
        // pick the largest positive diagonal pivot for stability of the
        // exact recursion (any positive one is sound)
        let Some(&p) = active
            .iter()
            .filter(|&&i| a[i][i].is_positive())
            .max_by(|&&x, &&y| a[x][x].cmp(&a[y][y]))
        else {
            // all-zero diagonal: PSD iff the remaining block is zero
            for &i in &active {
                for &j in &active {
                    if !a[i][j].is_zero() {
                        return None;
                    }
                }
            }
            return Some(factors);
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
        factors.push((col, pivot));
        active.retain(|&i| i != p);
    }
    Some(factors)
}

/// An exactly positive semidefinite matrix given by its R Q' R^T decomposition
/// with Q' diagonal and strictly positive.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PsdBlock {
    /// Diagonal of Q', as rational strings; every entry strictly positive.
    pub qdash: Vec<String>,
    /// g x d matrix R, row-major rational strings.
    pub r: Vec<Vec<String>>,
}

impl PsdBlock {
    pub fn new(r: &RatMatrix, qdash: &[Rat]) -> Self {
        PsdBlock {
            qdash: qdash.iter().map(rat_to_string).collect(),
            r: (0..r.rows())
                .map(|i| r.row_vec(i).iter().map(rat_to_string).collect())
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.r.len()
    }

    pub fn qdash_rats(&self) -> Result<Vec<Rat>> {
        self.qdash.iter().map(|s| rat_from_str(s)).collect()
    }

    pub fn r_matrix(&self) -> Result<RatMatrix> {
        let rows: Result<Vec<Vec<Rat>>> = self
            .r
            .iter()
            .map(|row| row.iter().map(|s| rat_from_str(s)).collect())
            .collect();
        RatMatrix::from_rows(rows?)
    }

    /// Exact product R diag(qdash) R^T. Validates that every Q' entry is
    /// strictly positive and that dimensions agree.
    pub fn assemble(&self) -> Result<RatMatrix> {
        let q = self.qdash_rats()?;
        if q.iter().any(|x| !x.is_positive()) {
            return Err(Error::Domain(
                "PSD block diagonal must be strictly positive".into(),
            ));
        }
        let r = self.r_matrix()?;
        if r.cols() != q.len() {
            return Err(Error::Dimension(format!(
                "R has {} columns but Q' has {} entries",
                r.cols(),
                q.len()
            )));
        }
        let g = r.rows();
        let mut out = RatMatrix::zero(g, g);
        for i in 0..g {
            for j in i..g {
                let mut acc = Rat::zero();
                for (k, qk) in q.iter().enumerate() {
                    acc += &r[(i, k)] * &r[(j, k)] * qk;
                }
                out[(i, j)] = acc.clone();
                out[(j, i)] = acc;
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}
