//! States and channels: validation, application, Choi and Stinespring forms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QcapError, Result};
use crate::numerics::{eigh, kron, partial_trace, ComplexMatrix, Tolerances, C64, ONE, ZERO};

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates against the default tolerances.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::default())
    }

    pub fn new_with(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QcapError::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let asym = matrix.max_asymmetry();
        if asym > tol.hermiticity_tol {
            return Err(QcapError::NotHermitian { max_asymmetry: asym });
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tol.psd_tol {
            return Err(QcapError::InvalidState(format!("trace is {} + {}i, expected 1", tr.re, tr.im)));
        }
        let sym = matrix.hermitian_part();
        let min = crate::numerics::eigvalsh(&sym)?[0];
        if min < -tol.psd_tol {
            return Err(QcapError::NegativeSpectrum(min));
        }
        Ok(Self { matrix: sym })
    }

    /// Wraps a matrix known to be a state up to rounding, symmetrizing it.
    pub(crate) fn trusted(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    /// `|psi><psi|` after normalizing `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || !(norm > 0.0 && norm.is_finite()) {
            return Err(QcapError::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self::trusted(ComplexMatrix::outer(&v)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::trusted(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// `|i><i|` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(QcapError::Dimension(format!("basis index {i} out of range for dimension {d}")));
        }
        Ok(Self::trusted(ComplexMatrix::unit(d, d, i, i)))
    }

    /// `(1/d) sum_ij |ii><jj|` on `d x d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = vec![ZERO; d * d];
        let amp = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            v[i * d + i] = C64::new(amp, 0.0);
        }
        Self::trusted(ComplexMatrix::outer(&v))
    }

    /// Random mixed state `GG^dag / tr` from a square Ginibre draw.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let g = ComplexMatrix::random_ginibre(d, d, rng);
        let m = g.matmul_adjoint(&g);
        let tr = m.trace().re;
        Self::trusted(m.scale_real(1.0 / tr))
    }

    /// Haar-random pure state.
    pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let g = ComplexMatrix::random_ginibre(d, 1, rng);
        Self::pure(g.data()).expect("Gaussian vector is nonzero almost surely")
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::trusted(kron(&self.matrix, &other.matrix))
    }

    /// Unitary conjugation `U rho U^dag`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.dim() || u.rows() != self.dim() {
            return Err(QcapError::Dimension("unitary does not match state dimension".into()));
        }
        Ok(Self::trusted(u.conjugate_by(&self.matrix)))
    }

    /// Reduced state on the kept subsystems.
    pub fn reduce(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        Ok(Self::trusted(partial_trace(&self.matrix, dims, keep)?))
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        crate::numerics::eigvalsh(&self.matrix).expect("density matrix is Hermitian")
    }
}

/// CPTP map in operator-sum form.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
    residual: f64,
}

impl PartialEq for KrausChannel {
    fn eq(&self, other: &Self) -> bool {
        self.dim_in == other.dim_in && self.dim_out == other.dim_out && self.kraus == other.kraus
    }
}

/// `‖Σ A†A − I‖_F` for an unvalidated Kraus set.
pub fn completeness_residual(kraus: &[ComplexMatrix], dim_in: usize) -> f64 {
    let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
    for a in kraus {
        sum = &sum + &a.dagger().matmul(a);
    }
    sum.distance(&ComplexMatrix::identity(dim_in))
}

/// Checks shapes and completeness, returning the validated channel.
pub fn validate_cptp(kraus: Vec<ComplexMatrix>, dim_in: usize, dim_out: usize) -> Result<KrausChannel> {
    validate_cptp_with(kraus, dim_in, dim_out, &Tolerances::default())
}

pub fn validate_cptp_with(
    kraus: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
    tol: &Tolerances,
) -> Result<KrausChannel> {
    if kraus.is_empty() {
        return Err(QcapError::EmptyKraus);
    }
    for (index, a) in kraus.iter().enumerate() {
        if a.rows() != dim_out || a.cols() != dim_in {
            return Err(QcapError::KrausShape {
                index,
                rows: a.rows(),
                cols: a.cols(),
                expected_rows: dim_out,
                expected_cols: dim_in,
            });
        }
    }
    let residual = completeness_residual(&kraus, dim_in);
    if residual > tol.cptp_tol {
        return Err(QcapError::NotTracePreserving { residual });
    }
    Ok(KrausChannel {
        dim_in,
        dim_out,
        kraus,
        label: String::new(),
        residual,
    })
}

impl KrausChannel {
    pub fn identity(d: usize) -> Self {
        validate_cptp(vec![ComplexMatrix::identity(d)], d, d)
            .expect("identity is CPTP")
            .with_label(format!("id:d={d}"))
    }

    /// Conjugation by a unitary `u`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let d = u.rows();
        validate_cptp(vec![u], d, d)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `||sum A^dag A - I||_F` measured at validation time.
    pub fn completeness_residual(&self) -> f64 {
        self.residual
    }

    /// `sum_i A_i X A_i^dag` for any `dim_in x dim_in` operator.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.shape(), (self.dim_in, self.dim_in), "apply_matrix shape mismatch");
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.kraus {
            out = &out + &a.conjugate_by(x);
        }
        out
    }

    /// Heisenberg-picture adjoint `sum_i A_i^dag Y A_i`.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(y.shape(), (self.dim_out, self.dim_out), "apply_adjoint shape mismatch");
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for a in &self.kraus {
            out = &out + &a.dagger().matmul(y).matmul(a);
        }
        out
    }

    /// Re-expresses the channel with the minimal Kraus rank when the list is redundant.
    pub fn compressed(&self) -> Self {
        if self.kraus.len() <= self.dim_in * self.dim_out {
            return self.clone();
        }
        kraus_from_choi(&choi(self))
            .expect("Choi of a valid channel has the right marginal")
            .with_label(self.label.clone())
    }
}

pub fn apply(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim_in {
        return Err(QcapError::Dimension(format!(
            "state has dimension {} but the channel expects {}",
            rho.dim(),
            ch.dim_in
        )));
    }
    Ok(DensityMatrix::trusted(ch.apply_matrix(rho.matrix())))
}

/// `(A ⊗ I_r) M` without forming the Kronecker product.
fn left_mul_kron_identity(a: &ComplexMatrix, r: usize, m: &ComplexMatrix) -> ComplexMatrix {
    let (dout, din) = a.shape();
    let cols = m.cols();
    let mut out = ComplexMatrix::zeros(dout * r, cols);
    for b in 0..dout {
        for x in 0..din {
            let s = a[(b, x)];
            if s == ZERO {
                continue;
            }
            for k in 0..r {
                let src = m.row(x * r + k);
                let dst_row = b * r + k;
                let dst = &mut out.data_mut()[dst_row * cols..(dst_row + 1) * cols];
                for (d, &v) in dst.iter_mut().zip(src) {
                    *d += s * v;
                }
            }
        }
    }
    out
}

/// `(N ⊗ I)(M)` for an operator on `dim_in * ref_dim`.
pub(crate) fn apply_with_reference_matrix(ch: &KrausChannel, joint: &ComplexMatrix, ref_dim: usize) -> ComplexMatrix {
    let n = ch.dim_out * ref_dim;
    let mut out = ComplexMatrix::zeros(n, n);
    for a in &ch.kraus {
        let t = left_mul_kron_identity(a, ref_dim, joint);
        let full = left_mul_kron_identity(a, ref_dim, &t.dagger()).dagger();
        out = &out + &full;
    }
    out
}

/// Applies the channel to the first tensor factor of `joint`.
pub fn apply_with_reference(ch: &KrausChannel, joint: &DensityMatrix, ref_dim: usize) -> Result<DensityMatrix> {
    if ref_dim == 0 || joint.dim() != ch.dim_in * ref_dim {
        return Err(QcapError::Dimension(format!(
            "joint state of dimension {} does not factor as {} x {}",
            joint.dim(),
            ch.dim_in,
            ref_dim
        )));
    }
    Ok(DensityMatrix::trusted(apply_with_reference_matrix(ch, joint.matrix(), ref_dim)))
}

/// Normalized Choi matrix `(N ⊗ I)(Φ)`, output factor first.
#[derive(Clone, Debug)]
pub struct ChoiState {
    dim_in: usize,
    dim_out: usize,
    state: DensityMatrix,
}

impl ChoiState {
    /// Validates the state and its `I/dim_in` reference marginal.
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != dim_in * dim_out {
            return Err(QcapError::Factorization {
                expected: dim_in * dim_out,
                actual: matrix.rows(),
            });
        }
        let state = DensityMatrix::new(matrix)?;
        let marginal = partial_trace(state.matrix(), &[dim_out, dim_in], &[1])?;
        let dev = marginal.distance(&ComplexMatrix::identity(dim_in).scale_real(1.0 / dim_in as f64));
        if dev > 1e-9 {
            return Err(QcapError::ChoiMarginal(dev));
        }
        Ok(Self { dim_in, dim_out, state })
    }

    pub fn channel_dims(&self) -> (usize, usize) {
        (self.dim_in, self.dim_out)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }
}

pub fn choi(ch: &KrausChannel) -> ChoiState {
    let (din, dout) = (ch.dim_in, ch.dim_out);
    let n = din * dout;
    let mut j = ComplexMatrix::zeros(n, n);
    for a in &ch.kraus {
        // vec(A) with index b * din + a, matching the out ⊗ ref ordering
        j = &j + &ComplexMatrix::outer(a.data());
    }
    ChoiState {
        dim_in: din,
        dim_out: dout,
        state: DensityMatrix::trusted(j.scale_real(1.0 / din as f64)),
    }
}

/// Canonical Kraus set from the Choi eigendecomposition.
pub fn kraus_from_choi(c: &ChoiState) -> Result<KrausChannel> {
    let (din, dout) = (c.dim_in, c.dim_out);
    let marginal = partial_trace(c.matrix(), &[dout, din], &[1])?;
    let dev = marginal.distance(&ComplexMatrix::identity(din).scale_real(1.0 / din as f64));
    if dev > 1e-9 {
        return Err(QcapError::ChoiMarginal(dev));
    }
    let tol = Tolerances::default();
    let e = eigh(c.matrix())?;
    let mut kraus = Vec::new();
    for (k, &lam) in e.values.iter().enumerate().rev() {
        if lam <= tol.eig_clip {
            continue;
        }
        let s = (lam * din as f64).sqrt();
        let v: Vec<C64> = e.vector(k).into_iter().map(|z| z * s).collect();
        kraus.push(ComplexMatrix::from_vec_unchecked(dout, din, v));
    }
    validate_cptp(kraus, din, dout)
}

/// Stinespring isometry `sum_i A_i ⊗ |i>`, shape `(dim_out * k) x dim_in`.
pub fn isometric_extension(ch: &KrausChannel) -> ComplexMatrix {
    let k = ch.kraus.len();
    let (din, dout) = (ch.dim_in, ch.dim_out);
    let mut u = ComplexMatrix::zeros(dout * k, din);
    for (i, a) in ch.kraus.iter().enumerate() {
        for b in 0..dout {
            for x in 0..din {
                u[(b * k + i, x)] = a[(b, x)];
            }
        }
    }
    u
}

/// Channel to the environment, `Tr_B(U rho U^dag)`.
pub fn complementary(ch: &KrausChannel) -> KrausChannel {
    let k = ch.kraus.len();
    let (din, dout) = (ch.dim_in, ch.dim_out);
    let ops = (0..dout)
        .map(|b| {
            let mut f = ComplexMatrix::zeros(k, din);
            for (i, a) in ch.kraus.iter().enumerate() {
                f.data_mut()[i * din..(i + 1) * din].copy_from_slice(a.row(b));
            }
            f
        })
        .collect();
    KrausChannel {
        dim_in: din,
        dim_out: k,
        kraus: ops,
        label: format!("{}^c", ch.label),
        residual: ch.residual,
    }
}

/// `m ∘ n`: apply `n` first, then `m`.
pub fn compose(m: &KrausChannel, n: &KrausChannel) -> Result<KrausChannel> {
    if n.dim_out != m.dim_in {
        return Err(QcapError::Dimension(format!(
            "cannot compose: inner channel outputs {} levels, outer expects {}",
            n.dim_out, m.dim_in
        )));
    }
    let mut ops = Vec::with_capacity(m.kraus.len() * n.kraus.len());
    for ni in &n.kraus {
        for mj in &m.kraus {
            ops.push(mj.matmul(ni));
        }
    }
    Ok(validate_cptp(ops, n.dim_in, m.dim_out)?.with_label(format!("({})∘({})", m.label, n.label)))
}

pub fn tensor(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let mut ops = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for x in &a.kraus {
        for y in &b.kraus {
            ops.push(kron(x, y));
        }
    }
    let residual = completeness_residual(&ops, a.dim_in * b.dim_in);
    KrausChannel {
        dim_in: a.dim_in * b.dim_in,
        dim_out: a.dim_out * b.dim_out,
        kraus: ops,
        label: format!("({})⊗({})", a.label, b.label),
        residual,
    }
}

/// `n`-fold tensor power.
pub fn tensor_power(ch: &KrausChannel, n: usize) -> KrausChannel {
    assert!(n >= 1, "tensor power needs n >= 1");
    let mut acc = ch.clone();
    for _ in 1..n {
        acc = tensor(&acc, ch);
    }
    acc
}

/// Matrix encoding: array of rows, each entry `[re, im]`.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let data: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&data)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    pub label: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            label: ch.label.clone(),
            dim_in: ch.dim_in,
            dim_out: ch.dim_out,
            kraus: ch.kraus.iter().map(matrix_to_json).collect(),
        }
    }

    pub fn into_channel(self) -> Result<KrausChannel> {
        let mut ops = Vec::with_capacity(self.kraus.len());
        for (i, m) in self.kraus.iter().enumerate() {
            let op = matrix_from_json(m).map_err(|e| QcapError::Parse(format!("kraus[{i}]: {e}")))?;
            ops.push(op);
        }
        Ok(validate_cptp(ops, self.dim_in, self.dim_out)?.with_label(self.label))
    }
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    serde_json::to_string_pretty(&ChannelJson::from_channel(ch)).expect("channel serializes")
}

pub fn channel_from_json(text: &str) -> Result<KrausChannel> {
    let parsed: ChannelJson = serde_json::from_str(text)
        .map_err(|e| QcapError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    parsed.into_channel()
}
