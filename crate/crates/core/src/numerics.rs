//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. Problem sizes stay below a few hundred rows, so there is no
//! sparse or blocked path.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{QcapError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances shared by validation and entropy routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub hermiticity_tol: f64,
    pub psd_tol: f64,
    pub cptp_tol: f64,
    pub eig_clip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity_tol: 1e-10,
            psd_tol: 1e-10,
            cptp_tol: 1e-9,
            eig_clip: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn new(hermiticity_tol: f64, psd_tol: f64, cptp_tol: f64, eig_clip: f64) -> Result<Self> {
        let t = Self {
            hermiticity_tol,
            psd_tol,
            cptp_tol,
            eig_clip,
        };
        for (name, v) in [
            ("hermiticity_tol", hermiticity_tol),
            ("psd_tol", psd_tol),
            ("cptp_tol", cptp_tol),
            ("eig_clip", eig_clip),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QcapError::Parameter(format!("{name} must be strictly positive, got {v}")));
            }
        }
        Ok(t)
    }
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting bad lengths and NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(QcapError::Dimension(format!("matrix shape {rows}x{cols} has a zero extent")));
        }
        if data.len() != rows * cols {
            return Err(QcapError::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(QcapError::NonFinite(idx));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let v: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&v)
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != m) {
            return Err(QcapError::Dimension("ragged rows".into()));
        }
        Self::new(n, m, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Column vector `n x 1`.
    pub fn column(v: &[C64]) -> Self {
        Self::from_vec_unchecked(v.len(), 1, v.to_vec())
    }

    /// `|v><v|`
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    /// Computational basis ket as an `n x 1` column.
    pub fn ket(n: usize, i: usize) -> Self {
        let mut m = Self::zeros(n, 1);
        m.data[i] = ONE;
        m
    }

    /// Matrix unit `|i><j|` of size `n x m`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = ONE;
        m
    }

    pub fn pauli_i() -> Self {
        Self::identity(2)
    }

    pub fn pauli_x() -> Self {
        Self::from_vec_unchecked(2, 2, vec![ZERO, ONE, ONE, ZERO])
    }

    pub fn pauli_y() -> Self {
        Self::from_vec_unchecked(2, 2, vec![ZERO, -I, I, ZERO])
    }

    pub fn pauli_z() -> Self {
        Self::from_vec_unchecked(2, 2, vec![ONE, ZERO, ZERO, -ONE])
    }

    /// Ginibre matrix with i.i.d. standard complex normal entries.
    pub fn random_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect();
        Self::from_vec_unchecked(rows, cols, data)
    }

    /// Random Hermitian matrix `(G + G^dag)/2` from a Ginibre draw.
    pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let g = Self::random_ginibre(n, n, rng);
        g.hermitian_part()
    }

    /// Haar-random unitary: QR of a Ginibre matrix with the R diagonal made positive.
    pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let g = Self::random_ginibre(n, n, rng);
        // modified Gram-Schmidt on columns; positive R diagonal gives Haar measure
        let mut q = Self::zeros(n, n);
        for j in 0..n {
            let mut v: Vec<C64> = (0..n).map(|r| g[(r, j)]).collect();
            for k in 0..j {
                let proj: C64 = (0..n).map(|r| q[(r, k)].conj() * v[r]).sum();
                for r in 0..n {
                    v[r] -= proj * q[(r, k)];
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for r in 0..n {
                q[(r, j)] = v[r] / norm;
            }
        }
        q
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column_vec(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|&z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|&z| z * s).collect())
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &Self, s: C64) {
        assert_eq!(self.shape(), other.shape(), "add_scaled shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn conj(&self) -> Self {
        Self::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|z| z.conj()).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        t
    }

    /// Matrix product. Panics on inner-dimension mismatch; see [`try_matmul`](Self::try_matmul).
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul inner dimensions differ: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[p * m..(p + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Self::from_vec_unchecked(n, m, out)
    }

    /// `self * other^dag` without materialising the adjoint.
    pub fn matmul_adjoint(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "matmul_adjoint column mismatch");
        let (n, k, m) = (self.rows, self.cols, other.rows);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let a_row = &self.data[i * k..(i + 1) * k];
            for j in 0..m {
                let b_row = &other.data[j * k..(j + 1) * k];
                out[i * m + j] = a_row.iter().zip(b_row).map(|(&a, &b)| a * b.conj()).sum();
            }
        }
        Self::from_vec_unchecked(n, m, out)
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(QcapError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.matmul(other))
    }

    /// `A X A^dag`
    pub fn conjugate_by(&self, x: &Self) -> Self {
        self.matmul(x).matmul_adjoint(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance; panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "distance shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest `|h[i,j] - conj(h[j,i])|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_asymmetry() <= tol
    }

    /// `(h + h^dag) / 2`
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        out
    }

    /// Embed into the top-left corner of a larger zero matrix.
    pub fn embed(&self, rows: usize, cols: usize) -> Self {
        assert!(rows >= self.rows && cols >= self.cols, "embed target smaller than source");
        let mut out = Self::zeros(rows, cols);
        for r in 0..self.rows {
            out.data[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
        }
        out
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(m[(r, c)]);
            }
        }
        Self::from_vec_unchecked(rows, cols, data)
    }

    /// Moore-Penrose pseudo-inverse via SVD, singular values below `eps` dropped.
    pub fn pseudo_inverse(&self, eps: f64) -> Self {
        let svd = self.to_nalgebra().svd(true, true);
        let pinv = svd
            .pseudo_inverse(eps)
            .expect("SVD computed with both factors");
        Self::from_nalgebra(&pinv)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix::from_vec_unchecked(self.rows, self.cols, data)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix::from_vec_unchecked(self.rows, self.cols, data)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let rows = ar * br;
    let cols = ac * bc;
    let mut out = vec![ZERO; rows * cols];
    for i in 0..ar {
        for j in 0..ac {
            let s = a.data[i * ac + j];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                let row = i * br + k;
                let dst = &mut out[row * cols + j * bc..row * cols + (j + 1) * bc];
                for (d, &bv) in dst.iter_mut().zip(b.row(k)) {
                    *d = s * bv;
                }
            }
        }
    }
    ComplexMatrix::from_vec_unchecked(rows, cols, out)
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::identity(1);
    for m in ms {
        acc = kron(&acc, m);
    }
    acc
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

fn check_factorization(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !m.is_square() {
        return Err(QcapError::Dimension(format!(
            "partial operation needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let expected: usize = dims.iter().product();
    if dims.iter().any(|&d| d == 0) || expected != m.rows {
        return Err(QcapError::Factorization {
            expected,
            actual: m.rows,
        });
    }
    Ok(())
}

/// Mixed-radix digits of `index` for the given subsystem dimensions.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Reduced matrix on the subsystems listed in `keep` (in ascending subsystem order).
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_factorization(m, dims)?;
    let n_sys = dims.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= n_sys) {
        return Err(QcapError::Dimension(format!(
            "subsystem index {bad} out of range for {n_sys} subsystems"
        )));
    }
    let traced: Vec<usize> = (0..n_sys).filter(|k| !kept.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // full[r * dt + t] = full index with kept multi-index r and traced multi-index t
    let mut full = vec![0usize; dk * dt];
    let mut dig = vec![0usize; n_sys];
    for idx in 0..m.rows {
        digits(idx, dims, &mut dig);
        let r = kept.iter().fold(0, |acc, &k| acc * dims[k] + dig[k]);
        let t = traced.iter().fold(0, |acc, &k| acc * dims[k] + dig[k]);
        full[r * dt + t] = idx;
    }

    let n = m.rows;
    let mut out = ComplexMatrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                acc += m.data[full[r * dt + t] * n + full[c * dt + t]];
            }
            out.data[r * dk + c] = acc;
        }
    }
    Ok(out)
}

/// Transpose of subsystem `sys` only.
pub fn partial_transpose(m: &ComplexMatrix, dims: &[usize], sys: usize) -> Result<ComplexMatrix> {
    check_factorization(m, dims)?;
    if sys >= dims.len() {
        return Err(QcapError::Dimension(format!(
            "subsystem index {sys} out of range for {} subsystems",
            dims.len()
        )));
    }
    let stride: usize = dims[sys + 1..].iter().product();
    let d = dims[sys];
    let n = m.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let rd = (r / stride) % d;
        for c in 0..n {
            let cd = (c / stride) % d;
            // swap the sys digit between row and column
            let r2 = r - rd * stride + cd * stride;
            let c2 = c - cd * stride + rd * stride;
            out.data[r2 * n + c2] = m.data[r * n + c];
        }
    }
    Ok(out)
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column_vec(k)
    }

    /// `V diag(f(λ)) V^dag`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for c in 0..n {
            let w = f(self.values[c]);
            for r in 0..n {
                scaled.data[r * n + c] *= w;
            }
        }
        scaled.matmul_adjoint(&self.vectors)
    }
}

fn symmetrized(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(QcapError::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    let asym = h.max_asymmetry();
    // scale-aware so large-norm operators are not rejected for rounding drift
    let scale = h.max_abs().max(1.0);
    if asym > tol * scale {
        return Err(QcapError::NotHermitian { max_asymmetry: asym });
    }
    Ok(h.hermitian_part())
}

/// Eigendecomposition of a Hermitian matrix using the default tolerances.
pub fn eigh(h: &ComplexMatrix) -> Result<Eigh> {
    eigh_with(h, Tolerances::default().hermiticity_tol)
}

pub fn eigh_with(h: &ComplexMatrix, hermiticity_tol: f64) -> Result<Eigh> {
    let sym = symmetrized(h, hermiticity_tol)?;
    let n = sym.rows;
    let dec = sym.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let values = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.data[r * n + dst] = dec.eigenvectors[(r, src)];
        }
    }
    Ok(Eigh { values, vectors })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let sym = symmetrized(h, Tolerances::default().hermiticity_tol)?;
    let mut vals: Vec<f64> = sym.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.dagger()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identity() {
        let i4 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_x_z_entries() {
        let k = kron(&ComplexMatrix::pauli_x(), &ComplexMatrix::pauli_z());
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], -ONE);
        for r in 0..2 {
            for cc in 0..2 {
                assert_eq!(k[(r, cc)], ZERO);
            }
        }
    }

    #[test]
    fn kron_shape_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = ComplexMatrix::random_ginibre(2, 3, &mut rng);
        let b = ComplexMatrix::random_ginibre(4, 5, &mut rng);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (8, 15));
        assert_eq!(k[(1 * 4 + 3, 2 * 5 + 4)], a[(1, 2)] * b[(3, 4)]);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[c(s, 0.), ZERO, ZERO, c(s, 0.)]);
        let red = partial_trace(&phi, &[2, 2], &[0]).unwrap();
        assert!(red.distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_full_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = ComplexMatrix::random_ginibre(6, 6, &mut rng);
        let full = partial_trace(&m, &[2, 3], &[]).unwrap();
        assert_eq!(full.shape(), (1, 1));
        assert!((full[(0, 0)] - m.trace()).norm() < 1e-12);

        let err = partial_trace(&m, &[2, 2], &[0]).unwrap_err();
        match err {
            QcapError::Factorization { expected, actual } => {
                assert_eq!((expected, actual), (4, 6));
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(partial_trace(&m, &[2, 3], &[2]).is_err());
    }

    #[test]
    fn partial_trace_keeps_middle_subsystem() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = ComplexMatrix::random_hermitian(2, &mut rng);
        let b = ComplexMatrix::random_hermitian(3, &mut rng);
        let cc = ComplexMatrix::random_hermitian(2, &mut rng);
        let m = kron_all(&[&a, &b, &cc]);
        let red = partial_trace(&m, &[2, 3, 2], &[1]).unwrap();
        let expected = b.scale(a.trace() * cc.trace());
        assert!(red.distance(&expected) < 1e-12);
    }

    #[test]
    fn partial_transpose_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[c(s, 0.), ZERO, ZERO, c(s, 0.)]);
        let pt = partial_transpose(&phi, &[2, 2], 1).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.5, 0., 0., 0.],
            &[0., 0., 0.5, 0.],
            &[0., 0.5, 0., 0.],
            &[0., 0., 0., 0.5],
        ])
        .unwrap();
        assert!(pt.distance(&expected) < 1e-15);
        let vals = eigvalsh(&pt).unwrap();
        assert!((vals[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn eigh_pauli_z() {
        let e = eigh(&ComplexMatrix::pauli_z()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_maximally_mixed() {
        let d = 5;
        let e = eigh(&ComplexMatrix::identity(d).scale_real(1.0 / d as f64)).unwrap();
        for v in e.values {
            assert!((v - 0.2).abs() < 1e-14);
        }
    }

    #[test]
    fn eigh_plus_projector() {
        let h = (&ComplexMatrix::pauli_i() + &ComplexMatrix::pauli_x()).scale_real(0.5);
        let e = eigh(&h).unwrap();
        assert!(e.values[0].abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let v = e.vector(1);
        // proportional to (1, 1)
        assert!((v[0] - v[1]).norm() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        match eigh(&m).unwrap_err() {
            QcapError::NotHermitian { max_asymmetry } => assert!((max_asymmetry - 2.0).abs() < 1e-14),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dagger_cases() {
        assert_eq!(dagger(&ComplexMatrix::identity(3)), ComplexMatrix::identity(3));
        assert_eq!(dagger(&ComplexMatrix::pauli_y()), ComplexMatrix::pauli_y());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = ComplexMatrix::random_ginibre(3, 5, &mut rng);
        assert_eq!(dagger(&dagger(&m)), m);
        assert_eq!(dagger(&m)[(4, 1)], m[(1, 4)].conj());
    }

    #[test]
    fn new_rejects_bad_data() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![ONE, c(f64::NAN, 0.)]),
            Err(QcapError::NonFinite(1))
        ));
    }

    #[test]
    fn tolerances_must_be_positive() {
        assert!(Tolerances::new(1e-10, 0.0, 1e-9, 1e-12).is_err());
        assert_eq!(Tolerances::new(1e-10, 1e-10, 1e-9, 1e-12).unwrap(), Tolerances::default());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = ComplexMatrix::random_unitary(6, &mut rng);
        assert!(u.dagger().matmul(&u).distance(&ComplexMatrix::identity(6)) < 1e-12);
    }

    #[test]
    fn pseudo_inverse_of_invertible() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = ComplexMatrix::random_ginibre(4, 4, &mut rng);
        let p = m.pseudo_inverse(1e-12);
        assert!(m.matmul(&p).distance(&ComplexMatrix::identity(4)) < 1e-10);
    }
}
