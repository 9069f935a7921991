//! Small dense complex linear algebra for the three-qubit layout.
//!
//! Matrices are row-major. Basis index `m` in `0..8` encodes the bits
//! `(q1 q2 q3)` most-significant-first, so party 1 owns bit 2 of the index,
//! party 2 bit 1 and party 3 bit 0.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Entrywise Hermiticity tolerance for internally constructed matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Hermiticity tolerance for matrices that came from outside (files, user input).
pub const INGEST_TOL: f64 = 1e-10;

/// One of the three qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    One,
    Two,
    Three,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::One, Party::Two, Party::Three];

    /// Parses a 1-based subsystem index.
    pub fn new(index: usize) -> Result<Self> {
        match index {
            1 => Ok(Party::One),
            2 => Ok(Party::Two),
            3 => Ok(Party::Three),
            other => Err(Error::InvalidSubsystem(other)),
        }
    }

    /// 1-based index.
    pub fn index(self) -> usize {
        match self {
            Party::One => 1,
            Party::Two => 2,
            Party::Three => 3,
        }
    }

    /// Bit position of this party inside a basis index.
    pub fn shift(self) -> usize {
        3 - self.index()
    }

    /// The two remaining parties, in increasing order.
    pub fn others(self) -> (Party, Party) {
        match self {
            Party::One => (Party::Two, Party::Three),
            Party::Two => (Party::One, Party::Three),
            Party::Three => (Party::One, Party::Two),
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Shape {
                expected: "non-empty rectangular rows".into(),
                got: format!("{n} ragged rows"),
            });
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|v><v|`.
    pub fn projector(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for r in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(r, k)] * other[(k, r)];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Largest entrywise deviation of `M M†` from the identity.
    pub fn unitary_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self * &self.dagger()).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let d = self.unitary_defect();
        if d > tol {
            Err(Error::NotUnitary(d))
        } else {
            Ok(())
        }
    }

    /// Averages `M` with `M†`, removing round-off asymmetry.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<v| M |v>`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.mul_vec(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Sum of singular values. Hermitian input uses the eigenvalues directly.
    pub fn trace_norm(&self) -> f64 {
        if self.is_square() && self.is_hermitian(HERMITIAN_TOL) {
            let eig = jacobi_hermitian(&self.hermitian_part());
            return eig.values.iter().map(|l| l.abs()).sum();
        }
        let gram = (&self.dagger() * self).hermitian_part();
        jacobi_hermitian(&gram).values.iter().map(|&l| l.max(0.0).sqrt()).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product; dimensions multiply.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

fn ensure_three_qubit(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows != 8 || rho.cols != 8 {
        return Err(Error::Shape {
            expected: "8x8".into(),
            got: format!("{}x{}", rho.rows, rho.cols),
        });
    }
    Ok(())
}

/// Removes bit `shift` from a 3-bit index, leaving a 2-bit index.
fn squeeze(m: usize, shift: usize) -> usize {
    let high = (m >> (shift + 1)) << shift;
    let low = m & ((1 << shift) - 1);
    high | low
}

/// Traces out one party of an 8x8 operator, leaving the 4x4 operator on the
/// other two (in increasing party order).
pub fn partial_trace(rho: &ComplexMatrix, out: Party) -> Result<ComplexMatrix> {
    ensure_three_qubit(rho)?;
    let shift = out.shift();
    let mut res = ComplexMatrix::zeros(4, 4);
    for r in 0..8 {
        for c in 0..8 {
            if (r >> shift) & 1 == (c >> shift) & 1 {
                res[(squeeze(r, shift), squeeze(c, shift))] += rho[(r, c)];
            }
        }
    }
    Ok(res)
}

/// Traces out the two parties other than `keep`, leaving a 2x2 operator.
pub fn reduced_single(rho: &ComplexMatrix, keep: Party) -> Result<ComplexMatrix> {
    ensure_three_qubit(rho)?;
    let shift = keep.shift();
    let mask = 7 ^ (1 << shift);
    let mut res = ComplexMatrix::zeros(2, 2);
    for r in 0..8 {
        for c in 0..8 {
            if r & mask == c & mask {
                res[((r >> shift) & 1, (c >> shift) & 1)] += rho[(r, c)];
            }
        }
    }
    Ok(res)
}

/// Transposes the tensor factor of `system` only.
pub fn partial_transpose(rho: &ComplexMatrix, system: Party) -> Result<ComplexMatrix> {
    ensure_three_qubit(rho)?;
    let bit = 1 << system.shift();
    Ok(ComplexMatrix::from_fn(8, 8, |r, c| {
        let (rb, cb) = (r & bit, c & bit);
        rho[((r & !bit) | cb, (c & !bit) | rb)]
    }))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

/// Eigen-decomposition of a Hermitian matrix.
pub fn hermitian_eigs(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Shape {
            expected: "square".into(),
            got: format!("{}x{}", m.rows, m.cols),
        });
    }
    let defect = m.hermitian_defect();
    if defect > INGEST_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(jacobi_hermitian(&m.hermitian_part()))
}

/// Cyclic complex Jacobi. Assumes exact Hermitian input.
fn jacobi_hermitian(m: &ComplexMatrix) -> Eigen {
    let n = m.rows;
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let h = a[(p, q)];
                let habs = h.norm();
                if habs <= 1e-300 {
                    continue;
                }
                let phase = h / habs;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * habs);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag phase on q, then real rotation:
                // G_pp = c, G_pq = s, G_qp = -s conj(phase), G_qq = c conj(phase)
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                // A <- A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * gpp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gqq;
                }
                // A <- G† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Eigen { values, vectors }
}

/// Cyclic Jacobi for a real symmetric `n x n` matrix stored row-major.
/// Returns ascending eigenvalues and the eigenvectors as columns (row-major).
pub fn symmetric_eigs(m: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(m.len(), n * n);
    let mut a = m.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-17 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vecs = vec![0.0; n * n];
    for (c, &k) in order.iter().enumerate() {
        for r in 0..n {
            vecs[r * n + c] = v[r * n + k];
        }
    }
    (values, vecs)
}

/// 3x3 real matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RealMatrix3(pub [[f64; 3]; 3]);

impl RealMatrix3 {
    pub const ZERO: RealMatrix3 = RealMatrix3([[0.0; 3]; 3]);

    pub fn identity() -> Self {
        Self::diag([1.0, 1.0, 1.0])
    }

    pub fn diag(d: [f64; 3]) -> Self {
        let mut m = Self::ZERO;
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Matrix unit `E_{rc}` (0-based).
    pub fn unit(r: usize, c: usize) -> Self {
        let mut m = Self::ZERO;
        m.0[r][c] = 1.0;
        m
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.0[r][c]
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::ZERO;
        for r in 0..3 {
            for c in 0..3 {
                m.0[r][c] = self.0[c][r];
            }
        }
        m
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= k);
        m
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, other: &Self, k: f64) -> Self {
        let mut m = *self;
        for r in 0..3 {
            for c in 0..3 {
                m.0[r][c] += k * other.0[r][c];
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut m = Self::ZERO;
        for r in 0..3 {
            for c in 0..3 {
                m.0[r][c] = (0..3).map(|k| self.0[r][k] * other.0[k][c]).sum();
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Singular values, descending, by one-sided Jacobi on the columns.
    pub fn singular_values(&self) -> [f64; 3] {
        // columns of A
        let mut cols = [[0.0f64; 3]; 3];
        for (c, col) in cols.iter_mut().enumerate() {
            for r in 0..3 {
                col[r] = self.0[r][c];
            }
        }
        for _sweep in 0..40 {
            let mut rotated = false;
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = (0..3).map(|k| cols[p][k] * cols[q][k]).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..3 {
                    let xp = cols[p][k];
                    let xq = cols[q][k];
                    cols[p][k] = c * xp - s * xq;
                    cols[q][k] = s * xp + c * xq;
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv = cols.map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt());
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// `tr|M|`, the sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }
}

impl Index<(usize, usize)> for RealMatrix3 {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix3 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.0[r][c]
    }
}

/// Pauli matrices `sigma_1..3` (index 0..3 here).
pub fn pauli(k: usize) -> ComplexMatrix {
    match k {
        0 => ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]),
        1 => ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]),
        2 => ComplexMatrix::from_vec(2, 2, vec![ONE, ZERO, ZERO, -ONE]),
        _ => panic!("pauli index {k} out of range"),
    }
    .expect("2x2 literal")
}

/// `n . sigma` for a real 3-vector.
pub fn bloch_operator(n: [f64; 3]) -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            C64::new(n[2], 0.0),
            C64::new(n[0], -n[1]),
            C64::new(n[0], n[1]),
            C64::new(-n[2], 0.0),
        ],
    )
    .expect("2x2 literal")
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_vec(
        2,
        2,
        vec![C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)],
    )
    .expect("2x2 literal")
}

/// `Rz(phi) Ry(theta) Rz(psi)` with `Rz(a) = diag(e^{-ia/2}, e^{ia/2})`.
pub fn euler_unitary(theta: f64, phi: f64, psi: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = |a: f64| C64::from_polar(1.0, a);
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            e(-(phi + psi) / 2.0) * c,
            -e(-(phi - psi) / 2.0) * s,
            e((phi - psi) / 2.0) * s,
            e((phi + psi) / 2.0) * c,
        ],
    )
    .expect("2x2 literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ghz() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![ZERO; 8];
        v[0] = c(h, 0.0);
        v[7] = c(h, 0.0);
        ComplexMatrix::projector(&v)
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let zz = kron(&pauli(2), &pauli(2));
        let expect = ComplexMatrix::diagonal(&[ONE, -ONE, -ONE, ONE]);
        assert!(zz.max_abs_diff(&expect) == 0.0);
        // sigma_1 (x) sigma_2: row 0 of sigma_1 has 1 at col 1, sigma_2[0][1] = -i
        let xy = kron(&pauli(0), &pauli(1));
        assert_eq!(xy[(0, 3)], c(0.0, -1.0));
    }

    #[test]
    fn partial_trace_examples() {
        let mut v = vec![ZERO; 8];
        v[0] = ONE;
        let p000 = ComplexMatrix::projector(&v);
        let mut w = vec![ZERO; 4];
        w[0] = ONE;
        assert_eq!(partial_trace(&p000, Party::One).unwrap(), ComplexMatrix::projector(&w));

        let r = partial_trace(&ghz(), Party::One).unwrap();
        let expect = ComplexMatrix::diagonal(&[c(0.5, 0.0), ZERO, ZERO, c(0.5, 0.0)]);
        assert!(r.max_abs_diff(&expect) < 1e-15);

        let mixed = ComplexMatrix::identity(8).scale_re(0.125);
        let r = partial_trace(&mixed, Party::Three).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25)) < 1e-15);

        assert!(partial_trace(&ComplexMatrix::identity(4), Party::One).is_err());
    }

    #[test]
    fn reduced_single_of_ghz() {
        for p in Party::ALL {
            let r = reduced_single(&ghz(), p).unwrap();
            assert!(r.max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-15);
        }
    }

    #[test]
    fn party_parsing() {
        assert_eq!(Party::new(2).unwrap(), Party::Two);
        assert_eq!(Party::new(0), Err(Error::InvalidSubsystem(0)));
        assert_eq!(Party::new(4), Err(Error::InvalidSubsystem(4)));
    }

    #[test]
    fn partial_transpose_examples() {
        let mixed = ComplexMatrix::identity(8).scale_re(0.125);
        assert_eq!(partial_transpose(&mixed, Party::Two).unwrap(), mixed);

        let g = ghz();
        let pt = partial_transpose(&g, Party::One).unwrap();
        assert!(pt.is_hermitian(1e-15));
        assert_eq!(partial_transpose(&pt, Party::One).unwrap(), g);
        let eig = hermitian_eigs(&pt).unwrap();
        assert!((eig.values[0] + 0.5).abs() < 1e-12);
        assert!((pt.trace_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigs_examples() {
        let e = hermitian_eigs(&pauli(2)).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        let e = hermitian_eigs(&ComplexMatrix::identity(8)).unwrap();
        assert!(e.values.iter().all(|&l| l == 1.0));
        let not_h = ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ZERO, ZERO]).unwrap();
        assert!(matches!(hermitian_eigs(&not_h), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigs_of_pauli_y_have_correct_vectors() {
        let y = pauli(1);
        let e = hermitian_eigs(&y).unwrap();
        for k in 0..2 {
            let v = e.vectors.column(k);
            let yv = y.mul_vec(&v);
            for i in 0..2 {
                assert!((yv[i] - v[i] * e.values[k]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn real_trace_norm_examples() {
        assert!((RealMatrix3::identity().trace_norm() - 3.0).abs() < 1e-15);
        assert!((RealMatrix3::diag([1.0, -1.0, 0.0]).trace_norm() - 2.0).abs() < 1e-15);
        assert_eq!(RealMatrix3::ZERO.trace_norm(), 0.0);
    }

    #[test]
    fn svd_keeps_tiny_singular_values() {
        // rank-2 matrix plus a 1e-12 direction
        let m = RealMatrix3([[1.0, 2.0, 0.0], [2.0, 4.0 + 1e-12, 0.0], [0.0, 0.0, 3.0]]);
        let sv = m.singular_values();
        let prod: f64 = sv.iter().product();
        assert!((prod - m.det().abs()).abs() < 1e-14);
        assert!(sv[2] > 0.0 && sv[2] < 1e-11);
    }

    #[test]
    fn complex_trace_norm_non_hermitian() {
        // |0><1| has one singular value 1
        let m = ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ZERO, ZERO]).unwrap();
        assert!((m.trace_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euler_unitary_is_unitary() {
        let u = euler_unitary(0.3, 1.1, -2.0);
        assert!(u.unitary_defect() < 1e-15);
    }
}
