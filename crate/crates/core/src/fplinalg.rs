//! Linear algebra over `F_p` for desk-scale `p` and dimension.
//!
//! Matrices act on column vectors, `x -> M x`, unless stated otherwise.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{inv_mod_u64, is_prime_u64, pow_mod_u64};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixFp {
    p: u64,
    rows: Vec<Vec<u64>>,
}

impl fmt::Debug for MatrixFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}{:?}", self.p, self.rows)
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime_u64(p) || p > u32::MAX as u64 {
        return Err(Error::invalid(format!("{p} is not a prime below 2^32")));
    }
    Ok(())
}

impl MatrixFp {
    /// Square matrix from rows; entries are reduced mod `p` (negative
    /// values allowed).
    pub fn new(p: u64, rows: Vec<Vec<i64>>) -> Result<MatrixFp> {
        check_prime(p)?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix must be square and non-empty"));
        }
        let rows = rows.into_iter().map(|r| r.into_iter().map(|x| x.rem_euclid(p as i64) as u64).collect()).collect();
        Ok(MatrixFp { p, rows })
    }

    fn from_reduced(p: u64, rows: Vec<Vec<u64>>) -> MatrixFp {
        MatrixFp { p, rows }
    }

    pub fn identity(p: u64, n: usize) -> Result<MatrixFp> {
        MatrixFp::diagonal(p, &vec![1; n])
    }

    pub fn diagonal(p: u64, entries: &[u64]) -> Result<MatrixFp> {
        check_prime(p)?;
        let n = entries.len();
        if n == 0 {
            return Err(Error::invalid("empty diagonal"));
        }
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] % p } else { 0 }).collect()).collect();
        Ok(MatrixFp { p, rows })
    }

    /// Matrix whose columns are `cols`.
    pub fn from_columns(p: u64, cols: &[Vec<u64>]) -> Result<MatrixFp> {
        check_prime(p)?;
        let n = cols.len();
        if n == 0 || cols.iter().any(|c| c.len() != n) {
            return Err(Error::invalid("need n columns of length n"));
        }
        Ok(MatrixFp { p, rows: (0..n).map(|i| (0..n).map(|j| cols[j][i] % p).collect()).collect() })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    fn same_shape(&self, other: &MatrixFp) -> Result<()> {
        if self.p != other.p || self.dim() != other.dim() {
            return Err(Error::invalid("matrices over different fields or dimensions"));
        }
        Ok(())
    }

    pub fn mul(&self, other: &MatrixFp) -> Result<MatrixFp> {
        self.same_shape(other)?;
        let n = self.dim();
        let p = self.p;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(0, |acc, k| (acc + self.rows[i][k] * other.rows[k][j]) % p)).collect())
            .collect();
        Ok(MatrixFp::from_reduced(p, rows))
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        mat_vec(self.p, &self.rows, v)
    }

    pub fn pow(&self, mut e: u64) -> MatrixFp {
        let mut acc = MatrixFp::identity(self.p, self.dim()).expect("valid");
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same shape");
            }
            base = base.mul(&base).expect("same shape");
            e >>= 1;
        }
        acc
    }

    pub fn transpose(&self) -> MatrixFp {
        let n = self.dim();
        MatrixFp::from_reduced(self.p, (0..n).map(|i| (0..n).map(|j| self.rows[j][i]).collect()).collect())
    }

    pub fn sub_scalar(&self, lambda: u64) -> MatrixFp {
        let p = self.p;
        let mut rows = self.rows.clone();
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = (row[i] + p - lambda % p) % p;
        }
        MatrixFp::from_reduced(p, rows)
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == u64::from(i == j)))
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| i == j || x == 0))
    }

    pub fn diagonal_entries(&self) -> Vec<u64> {
        (0..self.dim()).map(|i| self.rows[i][i]).collect()
    }

    pub fn commutes_with(&self, other: &MatrixFp) -> Result<bool> {
        Ok(self.mul(other)? == other.mul(self)?)
    }

    pub fn rank(&self) -> usize {
        rank(self.p, &self.rows)
    }

    pub fn inverse(&self) -> Result<MatrixFp> {
        let n = self.dim();
        let p = self.p;
        let mut aug: Vec<Vec<u64>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| u64::from(i == j)));
                row
            })
            .collect();
        let pivots = row_reduce(p, &mut aug, n);
        if pivots.len() < n {
            return Err(Error::invalid("matrix is singular"));
        }
        Ok(MatrixFp::from_reduced(p, aug.into_iter().map(|r| r[n..].to_vec()).collect()))
    }

    /// Basis of `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        kernel(self.p, &self.rows, self.dim())
    }
}

fn mat_vec(p: u64, rows: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
    rows.iter().map(|r| r.iter().zip(v).fold(0, |acc, (&a, &b)| (acc + a * b) % p)).collect()
}

/// Scales `v` so that its first nonzero entry is 1.
fn normalize(p: u64, mut v: Vec<u64>) -> Vec<u64> {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        let inv = inv_mod_u64(lead, p).expect("nonzero in a field");
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
    }
    v
}

/// Reduced row echelon form in place on the first `cols` columns; returns
/// pivot columns.
fn row_reduce(p: u64, m: &mut [Vec<u64>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = inv_mod_u64(m[r][c], p).expect("nonzero in a field");
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                let (pivot_row, row) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, &y) in row.iter_mut().zip(pivot_row.iter()) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn rank(p: u64, rows: &[Vec<u64>]) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m = rows.to_vec();
    row_reduce(p, &mut m, cols).len()
}

/// Kernel basis of a (possibly non-square) matrix with `cols` columns.
fn kernel(p: u64, rows: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(p, &mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][f]) % p;
            }
            v
        })
        .collect()
}

/// `P` and the eigenvalues with `P⁻¹ M P = diag(eigenvalues)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagonalization {
    pub change_of_basis: MatrixFp,
    pub eigenvalues: Vec<u64>,
}

/// `P` with every `P⁻¹ M_k P` diagonal; `eigenvalues[k]` is that diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimultaneousDiagonalization {
    pub change_of_basis: MatrixFp,
    pub eigenvalues: Vec<Vec<u64>>,
}

fn check_order_divides(m: &MatrixFp) -> Result<()> {
    if m.rank() < m.dim() {
        return Err(Error::NotDiagonalizable("matrix is singular".into()));
    }
    if !m.pow(m.p - 1).is_identity() {
        return Err(Error::NotDiagonalizable(format!("M^{} is not the identity", m.p - 1)));
    }
    Ok(())
}

/// Splits the span of `basis` (columns) into eigenspaces of `m`, scanning
/// eigenvalues in increasing order.
fn split(m: &MatrixFp, basis: &[Vec<u64>]) -> Vec<(u64, Vec<Vec<u64>>)> {
    let p = m.p;
    let n = m.dim();
    let k = basis.len();
    let mut out = Vec::new();
    let mut found = 0;
    for lambda in 1..p {
        if found == k {
            break;
        }
        let shifted = m.sub_scalar(lambda);
        // rows of (M - lambda) B
        let images: Vec<Vec<u64>> = basis.iter().map(|b| shifted.apply(b)).collect();
        let rows: Vec<Vec<u64>> = (0..n).map(|i| (0..k).map(|j| images[j][i]).collect()).collect();
        let coeffs = kernel(p, &rows, k);
        if coeffs.is_empty() {
            continue;
        }
        found += coeffs.len();
        let vectors = coeffs
            .iter()
            .map(|c| normalize(p, (0..n).map(|i| (0..k).fold(0, |acc, j| (acc + c[j] * basis[j][i]) % p)).collect()))
            .collect();
        out.push((lambda, vectors));
    }
    out
}

pub fn diagonalize(m: &MatrixFp) -> Result<Diagonalization> {
    let sd = simultaneous_diagonalize(std::slice::from_ref(m))?;
    Ok(Diagonalization { change_of_basis: sd.change_of_basis, eigenvalues: sd.eigenvalues.into_iter().next().expect("one matrix") })
}

pub fn simultaneous_diagonalize(ms: &[MatrixFp]) -> Result<SimultaneousDiagonalization> {
    let first = ms.first().ok_or_else(|| Error::invalid("no matrices given"))?;
    for m in ms {
        first.same_shape(m)?;
        check_order_divides(m)?;
    }
    for (i, a) in ms.iter().enumerate() {
        for b in &ms[i + 1..] {
            if !a.commutes_with(b)? {
                return Err(Error::invalid("matrices do not commute"));
            }
        }
    }
    let p = first.p;
    let n = first.dim();
    let standard: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    let mut spaces = vec![standard];
    for m in ms {
        let mut next = Vec::new();
        for space in &spaces {
            let parts = split(m, space);
            let dim: usize = parts.iter().map(|(_, v)| v.len()).sum();
            if dim != space.len() {
                return Err(Error::NotDiagonalizable("eigenspaces do not span".into()));
            }
            next.extend(parts.into_iter().map(|(_, v)| v));
        }
        spaces = next;
    }
    let cols: Vec<Vec<u64>> = spaces.into_iter().flatten().collect();
    let change = MatrixFp::from_columns(p, &cols)?;
    let inv = change.inverse()?;
    let mut eigenvalues = Vec::new();
    for m in ms {
        let d = inv.mul(m)?.mul(&change)?;
        if !d.is_diagonal() {
            return Err(Error::NotDiagonalizable("conjugate is not diagonal".into()));
        }
        eigenvalues.push(d.diagonal_entries());
    }
    Ok(SimultaneousDiagonalization { change_of_basis: change, eigenvalues })
}

/// Row-convention matrix of an automorphism given in column convention:
/// row `i` holds the coordinates of the image of `e_i`. `θ ↦ M_θ` reverses
/// products.
pub fn row_matrix(theta: &MatrixFp) -> MatrixFp {
    theta.transpose()
}

/// `Λ(θ) = M_{θ⁻¹}`, which turns the anti-homomorphism `θ ↦ M_θ` into a
/// homomorphism.
pub fn lambda(theta: &MatrixFp) -> Result<MatrixFp> {
    Ok(row_matrix(&theta.inverse()?))
}

/// `⟨x_1..x_n, y_1..y_m | x_i^p, y_j^{d_j}, [x_i, x_k], [y_j, y_l],
/// y_j x_i y_j⁻¹ = x_i^{q_ij}⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApdPresentation {
    pub p: u64,
    pub d: u64,
    pub n: usize,
    pub m: usize,
    pub dj: Vec<u64>,
    /// `q[i][j]`, an `n x m` table.
    pub q: Vec<Vec<u64>>,
}

impl ApdPresentation {
    pub fn new(p: u64, d: u64, dj: Vec<u64>, q: Vec<Vec<u64>>) -> Result<ApdPresentation> {
        check_prime(p)?;
        if d < 1 || (p - 1) % d != 0 {
            return Err(Error::invalid(format!("d = {d} does not divide p - 1 = {}", p - 1)));
        }
        let m = dj.len();
        if m == 0 || q.is_empty() || q.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("q must be a non-empty n x m table"));
        }
        for &e in &dj {
            if e < 2 || d % e != 0 {
                return Err(Error::invalid(format!("d_j = {e} must be > 1 and divide d = {d}")));
            }
        }
        for row in &q {
            for (j, &x) in row.iter().enumerate() {
                if x == 0 || x >= p || pow_mod_u64(x, dj[j], p) != 1 {
                    return Err(Error::invalid(format!("q = {x} is not a d_j-th root of unity mod {p}")));
                }
            }
        }
        Ok(ApdPresentation { p, d, n: q.len(), m, dj, q })
    }

    /// `p^n * prod d_j`.
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.n as u32) * self.dj.iter().map(|&e| e as u128).product::<u128>()
    }
}

/// Reads the presentation off a commuting family `M_j` with `M_j^{d_j} = 1`
/// acting on `F_p^n`; `x_i` corresponds to the `i`-th common eigenvector.
pub fn action_to_presentation(ms: &[MatrixFp], dj: &[u64], p: u64, d: u64) -> Result<ApdPresentation> {
    if ms.len() != dj.len() {
        return Err(Error::invalid("one order per matrix required"));
    }
    for (m, &e) in ms.iter().zip(dj) {
        if m.p() != p {
            return Err(Error::invalid("matrix over the wrong field"));
        }
        if e == 0 || !m.pow(e).is_identity() {
            return Err(Error::invalid(format!("M^{e} is not the identity")));
        }
    }
    let sd = simultaneous_diagonalize(ms)?;
    let n = ms[0].dim();
    let q: Vec<Vec<u64>> = (0..n).map(|i| sd.eigenvalues.iter().map(|ev| ev[i]).collect()).collect();
    let pres = ApdPresentation::new(p, d, dj.to_vec(), q)?;
    // the map x_i -> column i of P respects every conjugation relation
    for (j, m) in ms.iter().enumerate() {
        for i in 0..n {
            let col = sd.change_of_basis.column(i);
            let scaled: Vec<u64> = col.iter().map(|&x| x * pres.q[i][j] % p).collect();
            if m.apply(&col) != scaled {
                return Err(Error::NotDiagonalizable("relation check failed".into()));
            }
        }
    }
    Ok(pres)
}
