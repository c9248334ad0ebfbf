//! Entropies and channel information quantities, all in bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{apply_with_reference_matrix, complementary, DensityMatrix, KrausChannel};
use crate::error::{QcapError, Result};
use crate::numerics::{eigh, eigvalsh, ComplexMatrix, Tolerances, C64};
use crate::optim::{minimize, LbfgsOptions};

/// Probability-weighted list of states on a common space.
#[derive(Clone, Debug)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(QcapError::Dimension(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        check_simplex(&probs)?;
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(QcapError::Dimension("ensemble states differ in dimension".into()));
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `sum_x p_x rho_x`
    pub fn average(&self) -> DensityMatrix {
        let d = self.dim();
        let mut avg = ComplexMatrix::zeros(d, d);
        for (p, s) in self.probs.iter().zip(&self.states) {
            avg.add_scaled(s.matrix(), C64::new(*p, 0.0));
        }
        DensityMatrix::trusted(avg)
    }
}

fn check_simplex(p: &[f64]) -> Result<()> {
    if let Some(bad) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(QcapError::Simplex(format!("entry {bad} is negative or non-finite")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(QcapError::Simplex(format!("entries sum to {total}")));
    }
    Ok(())
}

/// `-sum λ log2 λ` over a spectrum, rejecting eigenvalues below `-psd_tol`.
pub fn entropy_of_spectrum(values: &[f64], tol: &Tolerances) -> Result<f64> {
    let mut s = 0.0;
    for &l in values {
        if l < -tol.psd_tol {
            return Err(QcapError::NegativeSpectrum(l));
        }
        if l > tol.eig_clip {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Entropy of a Hermitian PSD matrix given directly.
pub fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    entropy_of_spectrum(&eigvalsh(m)?, &Tolerances::default())
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    matrix_entropy(rho.matrix()).expect("validated density matrix has a nonnegative spectrum")
}

pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_simplex(p)?;
    Ok(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum())
}

/// Binary entropy `H2(x)`.
pub fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x]
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

fn check_input(rho: &DensityMatrix, ch: &KrausChannel) -> Result<()> {
    if rho.dim() != ch.dim_in() {
        return Err(QcapError::Dimension(format!(
            "state has dimension {} but the channel expects {}",
            rho.dim(),
            ch.dim_in()
        )));
    }
    Ok(())
}

/// `S(N(avg)) - sum_x p_x S(N(rho_x))`
pub fn holevo_information(ens: &Ensemble, ch: &KrausChannel) -> Result<f64> {
    let avg = ens.average();
    check_input(&avg, ch)?;
    let mut chi = matrix_entropy(&ch.apply_matrix(avg.matrix()))?;
    for (p, s) in ens.probs.iter().zip(&ens.states) {
        if *p > 0.0 {
            chi -= p * matrix_entropy(&ch.apply_matrix(s.matrix()))?;
        }
    }
    Ok(chi)
}

/// `S(B) - S(E)` through the complementary channel.
pub fn coherent_information(rho: &DensityMatrix, ch: &KrausChannel) -> Result<f64> {
    check_input(rho, ch)?;
    let sb = matrix_entropy(&ch.apply_matrix(rho.matrix()))?;
    let se = matrix_entropy(&complementary(ch).apply_matrix(rho.matrix()))?;
    Ok(sb - se)
}

/// `-S(A'|B) = S(B) - S(BA')` on a purification of `rho`.
pub fn coherent_information_purified(rho: &DensityMatrix, ch: &KrausChannel) -> Result<f64> {
    check_input(rho, ch)?;
    let sb = matrix_entropy(&ch.apply_matrix(rho.matrix()))?;
    Ok(sb - entropy_of_exchange(rho, ch)?)
}

/// Purification `sum_i sqrt(λ_i) |v_i>|i>`, system factor first.
pub fn purify(rho: &DensityMatrix) -> Vec<C64> {
    let d = rho.dim();
    let e = eigh(rho.matrix()).expect("density matrix is Hermitian");
    let mut psi = vec![C64::new(0.0, 0.0); d * d];
    for (i, &l) in e.values.iter().enumerate() {
        let a = l.max(0.0).sqrt();
        if a == 0.0 {
            continue;
        }
        for s in 0..d {
            psi[s * d + i] = e.vectors[(s, i)] * a;
        }
    }
    psi
}

/// Entropy of `(N ⊗ I)` applied to a purification of `rho`.
pub fn entropy_of_exchange(rho: &DensityMatrix, ch: &KrausChannel) -> Result<f64> {
    check_input(rho, ch)?;
    let d = rho.dim();
    let phi = ComplexMatrix::outer(&purify(rho));
    matrix_entropy(&apply_with_reference_matrix(ch, &phi, d))
}

/// `S(A) + S(B) - S(E)`
pub fn quantum_mutual_information(rho: &DensityMatrix, ch: &KrausChannel) -> Result<f64> {
    check_input(rho, ch)?;
    let sa = von_neumann_entropy(rho);
    let sb = matrix_entropy(&ch.apply_matrix(rho.matrix()))?;
    Ok(sa + sb - entropy_of_exchange(rho, ch)?)
}

/// Floor applied inside gradient logarithms.
pub(crate) const GRAD_LOG_FLOOR: f64 = 1e-14;

/// Packs a complex vector into `[re..., im...]`.
pub(crate) fn pack(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect()
}

pub(crate) fn unpack(x: &[f64]) -> Vec<C64> {
    let n = x.len() / 2;
    (0..n).map(|i| C64::new(x[i], x[n + i])).collect()
}

/// Result of a minimum-output-entropy search.
#[derive(Clone, Debug)]
pub struct MinOutputEntropy {
    pub value: f64,
    pub state: DensityMatrix,
    pub converged: bool,
}

/// Upper bound on `min_rho S(N(rho))` from optimized pure inputs.
pub fn min_output_entropy(ch: &KrausChannel, restarts: usize, seed: u64) -> Result<MinOutputEntropy> {
    if restarts == 0 {
        return Err(QcapError::Parameter("restarts must be at least 1".into()));
    }
    let d = ch.dim_in();
    let ch = ch.compressed();
    let opts = LbfgsOptions::default();
    let runs: Vec<(f64, Vec<C64>, bool)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::capacity::restart_seed(seed, r));
            let v0 = if r == 0 {
                let mut v = vec![C64::new(0.0, 0.0); d];
                v[0] = C64::new(1.0, 0.0);
                v
            } else {
                ComplexMatrix::random_ginibre(d, 1, &mut rng).into_data()
            };
            let objective = |x: &[f64]| {
                let v = unpack(x);
                let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                let psi = ComplexMatrix::outer(&v).scale_real(1.0 / nrm);
                let out = ch.apply_matrix(&psi);
                let e = eigh(&out.hermitian_part()).expect("Hermitian");
                let s: f64 = e.values.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum();
                let k = ch.apply_adjoint(&e.map_spectrum(|l| -l.max(GRAD_LOG_FLOOR).log2()));
                let kv = k.matmul(&ComplexMatrix::column(&v)).into_data();
                let f: f64 = v.iter().zip(&kv).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / nrm;
                let g: Vec<C64> = kv.iter().zip(&v).map(|(kv, v)| (kv - v * f) * (2.0 / nrm)).collect();
                (s, pack(&g))
            };
            let m = minimize(objective, pack(&v0), &opts);
            (m.value, unpack(&m.x), m.converged)
        })
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 < runs[best].0 {
            best = i;
        }
    }
    let state = DensityMatrix::pure(&runs[best].1)?;
    let value = matrix_entropy(&ch.apply_matrix(state.matrix()))?;
    Ok(MinOutputEntropy {
        value,
        state,
        converged: runs[best].2,
    })
}
