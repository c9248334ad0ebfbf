//! One-shot capacity optimizers, the repetition-code experiment, and the
//! superactivation / non-convexity searches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{
    apply_with_reference_matrix, complementary, tensor, tensor_power, DensityMatrix, KrausChannel,
};
use crate::entropics::{
    coherent_information, holevo_information, pack, shannon_entropy, unpack,
    Ensemble, GRAD_LOG_FLOOR,
};
use crate::error::{QcapError, Result};
use crate::numerics::{eigh, kron, kron_all, partial_trace, ComplexMatrix, Tolerances, C64, ONE, ZERO};
use crate::optim::{minimize, LbfgsOptions};
use crate::zoo::{depolarizing, erasure_50_two_qubit, flagged_mix, horodecki_4d, is_ppt, HORODECKI_DEFAULT_Q};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub conv_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 2000,
            step_init: 0.1,
            conv_tol: 1e-8,
            seed: 0,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(QcapError::Parameter("restarts must be at least 1".into()));
        }
        if !(self.conv_tol > 0.0) {
            return Err(QcapError::Parameter(format!("conv_tol must be positive, got {}", self.conv_tol)));
        }
        if !(self.step_init > 0.0) {
            return Err(QcapError::Parameter(format!("step_init must be positive, got {}", self.step_init)));
        }
        Ok(())
    }

    fn lbfgs(&self) -> LbfgsOptions {
        LbfgsOptions {
            max_iters: self.max_iters,
            step_init: self.step_init,
            conv_tol: self.conv_tol,
            history: 10,
        }
    }
}

/// Per-restart seed derived from the master seed (splitmix64 step).
pub fn restart_seed(seed: u64, restart: usize) -> u64 {
    let mut z = seed.wrapping_add((restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub enum ArgMax {
    State(DensityMatrix),
    Ensemble(Ensemble),
}

/// Optimizer output; `value` is the functional evaluated exactly at `argmax`.
#[derive(Clone, Debug)]
pub struct CapacityEstimate {
    pub value: f64,
    pub argmax: ArgMax,
    pub restarts_used: usize,
    pub converged: bool,
}

impl CapacityEstimate {
    pub fn state(&self) -> Option<&DensityMatrix> {
        match &self.argmax {
            ArgMax::State(s) => Some(s),
            ArgMax::Ensemble(_) => None,
        }
    }

    pub fn ensemble(&self) -> Option<&Ensemble> {
        match &self.argmax {
            ArgMax::Ensemble(e) => Some(e),
            ArgMax::State(_) => None,
        }
    }
}

fn factor_to_state(x: &[f64], d: usize) -> ComplexMatrix {
    let l = ComplexMatrix::from_vec_unchecked(d, d, unpack(x));
    let m = l.matmul_adjoint(&l);
    let t = m.trace().re;
    m.scale_real(1.0 / t)
}

/// Entropy and `log2` of a PSD operator from one eigendecomposition.
fn entropy_and_log(m: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let e = eigh(&m.hermitian_part()).expect("channel output is Hermitian");
    let clip = Tolerances::default().eig_clip;
    let s = e.values.iter().filter(|&&l| l > clip).map(|&l| -l * l.log2()).sum();
    (s, e.map_spectrum(|l| l.max(GRAD_LOG_FLOOR).log2()))
}

/// `-I_c` and its gradient with respect to the real and imaginary parts of `L`,
/// where `rho = L L^dag / tr`.
fn neg_ic_and_grad(ch: &KrausChannel, env: &KrausChannel, x: &[f64]) -> (f64, Vec<f64>) {
    let d = ch.dim_in();
    let l = ComplexMatrix::from_vec_unchecked(d, d, unpack(x));
    let m = l.matmul_adjoint(&l);
    let t = m.trace().re;
    let rho = m.scale_real(1.0 / t);
    let (sb, log_b) = entropy_and_log(&ch.apply_matrix(&rho));
    let (se, log_e) = entropy_and_log(&env.apply_matrix(&rho));
    let g = &env.apply_adjoint(&log_e) - &ch.apply_adjoint(&log_b);
    let mean: C64 = (0..d).map(|i| g.row(i).iter().zip(rho.column_vec(i)).map(|(a, b)| a * b).sum::<C64>()).sum();
    let mut gt = g;
    for i in 0..d {
        gt[(i, i)] -= mean;
    }
    let gl = gt.matmul(&l).scale_real(2.0 / t);
    // gradient of -I_c
    let grad: Vec<C64> = gl.data().iter().map(|z| -z).collect();
    (-(sb - se), pack(&grad))
}

/// Picks the best run with the lowest index winning ties.
fn best_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Factor `L` for which `L L^dag / tr` is `rho` (its square root).
pub fn factor_of(rho: &DensityMatrix) -> ComplexMatrix {
    eigh(rho.matrix()).expect("Hermitian").map_spectrum(|l| l.max(0.0).sqrt())
}

/// Maximizes `I_c(rho, ch)`; restart 0 starts at the maximally mixed state.
pub fn maximize_coherent_information(ch: &KrausChannel, opts: &OptimizerOptions) -> Result<CapacityEstimate> {
    maximize_coherent_information_from(ch, opts, &[])
}

/// As [`maximize_coherent_information`], with extra starting states tried
/// after the maximally mixed start and before the random ones.
pub fn maximize_coherent_information_from(
    ch: &KrausChannel,
    opts: &OptimizerOptions,
    inits: &[DensityMatrix],
) -> Result<CapacityEstimate> {
    opts.validate()?;
    let d = ch.dim_in();
    if let Some(bad) = inits.iter().find(|s| s.dim() != d) {
        return Err(QcapError::Dimension(format!(
            "initial state has dimension {} but the channel expects {d}",
            bad.dim()
        )));
    }
    let ch = ch.compressed();
    let env = complementary(&ch).compressed();
    let lb = opts.lbfgs();
    let total = opts.restarts.max(1 + inits.len());
    let runs: Vec<(f64, Vec<f64>, bool)> = (0..total)
        .into_par_iter()
        .map(|r| {
            let x0 = if r == 0 {
                pack(ComplexMatrix::identity(d).data())
            } else if r <= inits.len() {
                // small full-rank admixture keeps the start off the boundary
                let l = &factor_of(&inits[r - 1]) + &ComplexMatrix::identity(d).scale_real(1e-3);
                pack(l.data())
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(opts.seed, r));
                pack(ComplexMatrix::random_ginibre(d, d, &mut rng).data())
            };
            let m = minimize(|x| neg_ic_and_grad(&ch, &env, x), x0, &lb);
            (-m.value, m.x, m.converged)
        })
        .collect();
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let best = best_index(&values);
    let state = DensityMatrix::trusted(factor_to_state(&runs[best].1, d));
    let value = coherent_information(&state, &ch)?;
    Ok(CapacityEstimate {
        value,
        argmax: ArgMax::State(state),
        restarts_used: total,
        converged: runs[best].2,
    })
}

fn softmax(w: &[f64]) -> Vec<f64> {
    let mx = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = w.iter().map(|x| (x - mx).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// `-chi` and gradient over `m` logits followed by `m` unnormalized vectors.
fn neg_chi_and_grad(ch: &KrausChannel, m: usize, x: &[f64]) -> (f64, Vec<f64>) {
    let d = ch.dim_in();
    let p = softmax(&x[..m]);
    let vecs: Vec<Vec<C64>> = (0..m)
        .map(|k| {
            let base = m + k * 2 * d;
            unpack(&x[base..base + 2 * d])
        })
        .collect();
    let norms: Vec<f64> = vecs.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum()).collect();
    let psis: Vec<ComplexMatrix> = vecs
        .iter()
        .zip(&norms)
        .map(|(v, n)| ComplexMatrix::outer(v).scale_real(1.0 / n))
        .collect();
    let mut avg = ComplexMatrix::zeros(d, d);
    for (pk, psi) in p.iter().zip(&psis) {
        avg.add_scaled(psi, C64::new(*pk, 0.0));
    }
    let (s_avg, log_avg) = entropy_and_log(&ch.apply_matrix(&avg));
    let g_avg = ch.apply_adjoint(&log_avg).scale_real(-1.0);
    let mut chi = s_avg;
    let mut dp = vec![0.0; m];
    let mut grad = vec![0.0; x.len()];
    for k in 0..m {
        let (s_k, log_k) = entropy_and_log(&ch.apply_matrix(&psis[k]));
        chi -= p[k] * s_k;
        let g_k = ch.apply_adjoint(&log_k).scale_real(-1.0);
        let v = ComplexMatrix::column(&vecs[k]);
        let ga_v = g_avg.matmul(&v).into_data();
        let ea: f64 = vecs[k].iter().zip(&ga_v).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / norms[k];
        dp[k] = ea - s_k;
        let kv: Vec<C64> = (&g_avg - &g_k).matmul(&v).into_data();
        let f: f64 = vecs[k].iter().zip(&kv).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / norms[k];
        let gv: Vec<C64> = kv
            .iter()
            .zip(&vecs[k])
            .map(|(kv, v)| (kv - v * f) * (2.0 * p[k] / norms[k]))
            .collect();
        let base = m + k * 2 * d;
        grad[base..base + 2 * d].copy_from_slice(&pack(&gv).iter().map(|g| -g).collect::<Vec<_>>());
    }
    let mean: f64 = p.iter().zip(&dp).map(|(a, b)| a * b).sum();
    for k in 0..m {
        grad[k] = -p[k] * (dp[k] - mean);
    }
    (-chi, grad)
}

/// Maximizes the Holevo quantity over ensembles of `m` pure states (default `dim_in^2`).
pub fn maximize_holevo(ch: &KrausChannel, m: Option<usize>, opts: &OptimizerOptions) -> Result<CapacityEstimate> {
    opts.validate()?;
    let d = ch.dim_in();
    let m = m.unwrap_or(d * d);
    if m < 2 {
        return Err(QcapError::Parameter(format!("ensemble size must be at least 2, got {m}")));
    }
    let ch = ch.compressed();
    let lb = opts.lbfgs();
    let runs: Vec<(f64, Vec<f64>, bool)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(opts.seed, r));
            let mut x0 = vec![0.0; m];
            for k in 0..m {
                let v = if r == 0 && k < d {
                    ComplexMatrix::ket(d, k).into_data()
                } else {
                    ComplexMatrix::random_ginibre(d, 1, &mut rng).into_data()
                };
                x0.extend(pack(&v));
            }
            if r == 0 && m > d {
                // extra members start with negligible weight
                for w in x0.iter_mut().take(m).skip(d) {
                    *w = -20.0;
                }
            }
            let res = minimize(|x| neg_chi_and_grad(&ch, m, x), x0, &lb);
            (-res.value, res.x, res.converged)
        })
        .collect();
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let best = best_index(&values);
    let x = &runs[best].1;
    let probs = softmax(&x[..m]);
    let states = (0..m)
        .map(|k| DensityMatrix::pure(&unpack(&x[m + k * 2 * d..m + (k + 1) * 2 * d])))
        .collect::<Result<Vec<_>>>()?;
    let ens = Ensemble::new(renormalize(probs), states)?;
    let value = holevo_information(&ens, &ch)?;
    Ok(CapacityEstimate {
        value,
        argmax: ArgMax::Ensemble(ens),
        restarts_used: opts.restarts,
        converged: runs[best].2,
    })
}

fn renormalize(mut p: Vec<f64>) -> Vec<f64> {
    let s: f64 = p.iter().sum();
    for v in p.iter_mut() {
        *v /= s;
    }
    p
}

/// Largest input dimension accepted by [`multi_copy_ic`].
pub const MULTI_COPY_MAX_DIM: usize = 64;

/// Per-use coherent information of `ch^{⊗n}`, a lower bound on the quantum capacity.
pub fn multi_copy_ic(ch: &KrausChannel, n: usize, opts: &OptimizerOptions) -> Result<CapacityEstimate> {
    if n < 1 {
        return Err(QcapError::Parameter("number of copies must be at least 1".into()));
    }
    let dim = (ch.dim_in() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > MULTI_COPY_MAX_DIM as u128 {
        return Err(QcapError::Guard(format!(
            "{n} copies of a {}-level input give dimension {dim} > {MULTI_COPY_MAX_DIM}",
            ch.dim_in()
        )));
    }
    let joint = tensor_power(ch, n).compressed();
    let mut est = maximize_coherent_information(&joint, opts)?;
    est.value /= n as f64;
    Ok(est)
}

/// `max(0, 1 - H(1-q, q/3, q/3, q/3))`
pub fn depolarizing_ic_closed_form(q: f64) -> f64 {
    let h = shannon_entropy(&depolarizing_weights(q)).unwrap_or(f64::NAN);
    (1.0 - h).max(0.0)
}

fn depolarizing_weights(q: f64) -> [f64; 4] {
    [1.0 - q, q / 3.0, q / 3.0, q / 3.0]
}

/// Zero of `1 - H(q)` on `[0.1, 0.25]` by bisection.
pub fn depolarizing_threshold() -> f64 {
    let f = |q: f64| 1.0 - shannon_entropy(&depolarizing_weights(q)).expect("valid weights");
    let (mut lo, mut hi) = (0.1, 0.25);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Syndrome outcomes of the three-qubit repetition code under depolarizing noise.
#[derive(Clone, Debug, Serialize)]
pub struct SyndromeTable {
    /// Indexed by `2 * s1 + s2`.
    pub probs: [f64; 4],
    /// Residual Pauli weights `(I, X, Y, Z)` on the kept qubit, per syndrome.
    pub residual: [[f64; 4]; 4],
}

impl SyndromeTable {
    pub fn syndrome_label(index: usize) -> &'static str {
        ["00", "01", "10", "11"][index]
    }
}

/// Decoder outcome for Pauli errors `(x_k, z_k)` on the three code qubits.
///
/// Two CNOTs from qubit 3 onto qubits 1 and 2 leave the syndrome on qubits 1-2;
/// X is applied to qubit 3 when both syndrome bits are 1.
pub fn decode_pattern(x: [u8; 3], z: [u8; 3]) -> (usize, usize) {
    let s1 = (x[0] ^ x[2]) as usize;
    let s2 = (x[1] ^ x[2]) as usize;
    let mut rx = x[2];
    let rz = z[0] ^ z[1] ^ z[2];
    if s1 == 1 && s2 == 1 {
        rx ^= 1;
    }
    let pauli = match (rx, rz) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    };
    (2 * s1 + s2, pauli)
}

/// `(x, z)` bits of the Paulis `I, X, Y, Z`.
const PAULI_BITS: [(u8, u8); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

pub fn repetition_syndrome_table(q: f64) -> Result<SyndromeTable> {
    if !(0.0..=1.0).contains(&q) {
        return Err(QcapError::Parameter(format!("q = {q} is outside [0, 1]")));
    }
    let w = depolarizing_weights(q);
    let mut joint = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let prob = w[a] * w[b] * w[c];
                let x = [PAULI_BITS[a].0, PAULI_BITS[b].0, PAULI_BITS[c].0];
                let z = [PAULI_BITS[a].1, PAULI_BITS[b].1, PAULI_BITS[c].1];
                let (s, r) = decode_pattern(x, z);
                joint[s][r] += prob;
            }
        }
    }
    let mut probs = [0.0; 4];
    let mut residual = [[0.0; 4]; 4];
    for s in 0..4 {
        probs[s] = joint[s].iter().sum();
        for r in 0..4 {
            residual[s][r] = if probs[s] > 0.0 {
                joint[s][r] / probs[s]
            } else if r == 0 {
                1.0
            } else {
                0.0
            };
        }
    }
    Ok(SyndromeTable { probs, residual })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RepetitionIc {
    /// Coherent information for three channel uses.
    pub total: f64,
    /// `total / 3`
    pub rate: f64,
}

/// `sum_s p(s) (1 - H(q_s))` from the syndrome table.
pub fn repetition_coherent_information(q: f64) -> Result<RepetitionIc> {
    let t = repetition_syndrome_table(q)?;
    let mut total = 0.0;
    for s in 0..4 {
        if t.probs[s] > 0.0 {
            total += t.probs[s] * (1.0 - shannon_entropy(&renormalize(t.residual[s].to_vec()))?);
        }
    }
    Ok(RepetitionIc { total, rate: total / 3.0 })
}

fn cnot(n_qubits: usize, control: usize, target: usize) -> ComplexMatrix {
    let dim = 1 << n_qubits;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let cbit = (i >> (n_qubits - 1 - control)) & 1;
        let j = if cbit == 1 { i ^ (1 << (n_qubits - 1 - target)) } else { i };
        u[(j, i)] = ONE;
    }
    u
}

/// Density-matrix simulation of encoder, noise and decoder; returns the
/// syndrome-averaged coherent information of the kept qubit with the reference.
pub fn repetition_brute_force_oracle(q: f64) -> Result<f64> {
    // qubit order: code qubits 1, 2, 3, then the reference
    let mut v = vec![ZERO; 16];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    v[0b0000] = C64::new(s, 0.0);
    v[0b1111] = C64::new(s, 0.0);
    let rho0 = ComplexMatrix::outer(&v);

    let dep = depolarizing(q)?;
    let noise = tensor_power(&dep, 3);
    let noisy = apply_with_reference_matrix(&noise, &rho0, 2);

    let dec = cnot(4, 2, 1).matmul(&cnot(4, 2, 0));
    let decoded = dec.conjugate_by(&noisy);

    let x3 = kron_all(&[
        &ComplexMatrix::identity(4),
        &ComplexMatrix::pauli_x(),
        &ComplexMatrix::identity(2),
    ]);
    let mut total = 0.0;
    for s1 in 0..2 {
        for s2 in 0..2 {
            let proj = kron_all(&[
                &ComplexMatrix::unit(2, 2, s1, s1),
                &ComplexMatrix::unit(2, 2, s2, s2),
                &ComplexMatrix::identity(4),
            ]);
            let mut branch = proj.conjugate_by(&decoded);
            let p = branch.trace().re;
            if p <= 1e-300 {
                continue;
            }
            if s1 == 1 && s2 == 1 {
                branch = x3.conjugate_by(&branch);
            }
            let kept = partial_trace(&branch.scale_real(1.0 / p), &[2, 2, 2, 2], &[2, 3])?;
            let b = partial_trace(&kept, &[2, 2], &[0])?;
            let ic = crate::entropics::matrix_entropy(&b)? - crate::entropics::matrix_entropy(&kept)?;
            total += p * ic;
        }
    }
    Ok(total)
}

/// Per-`q` outcome of the superactivation search.
#[derive(Clone, Debug, Serialize)]
pub struct SuperactivationPoint {
    pub q: f64,
    pub ppt: bool,
    pub min_pt_eigenvalue: f64,
    pub horodecki_best_ic: f64,
    pub erasure_best_ic: f64,
    pub joint_best_ic: f64,
    pub joint_converged: bool,
    #[serde(skip)]
    pub joint_argmax: DensityMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuperactivationReport {
    pub points: Vec<SuperactivationPoint>,
    /// Index of the best joint value among PPT-certified points with vanishing factors.
    pub certified_best: Option<usize>,
    /// Index of the best joint value over every grid point.
    pub overall_best: Option<usize>,
}

/// Ceiling for a single factor to count as having vanishing coherent information.
pub const FACTOR_CEILING: f64 = 1e-6;

/// Structured starting points on the 16-level joint input: Horodecki qubits
/// (0, 1) followed by erasure qubits (2, 3).
pub fn superactivation_inits() -> Vec<DensityMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = [C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)];
    let pi2 = DensityMatrix::maximally_mixed(2);
    let bell_m = DensityMatrix::pure(&bell).unwrap();
    // qubit-order permutation applied to a product of pairs
    let permute = |m: &ComplexMatrix, order: [usize; 4]| -> DensityMatrix {
        let mut out = ComplexMatrix::zeros(16, 16);
        let map = |i: usize| -> usize {
            let bits = [(i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1];
            let mut j = 0;
            for (pos, &src) in order.iter().enumerate() {
                j |= bits[pos] << (3 - src);
            }
            j
        };
        for r in 0..16 {
            for c in 0..16 {
                out[(map(r), map(c))] = m[(r, c)];
            }
        }
        DensityMatrix::trusted(out)
    };
    let bb = kron(bell_m.matrix(), bell_m.matrix());
    let bp = kron(bell_m.matrix(), &kron(pi2.matrix(), pi2.matrix()));
    vec![
        // H1-E1 and H2-E2 entangled
        permute(&bb, [0, 2, 1, 3]),
        // H1-E2 and H2-E1 entangled
        permute(&bb, [0, 3, 1, 2]),
        // one entangled pair across the cut, the rest mixed
        permute(&bp, [0, 2, 1, 3]),
        permute(&bp, [1, 2, 0, 3]),
        permute(&bp, [0, 3, 1, 2]),
        permute(&bp, [1, 3, 0, 2]),
        // entangled within the Horodecki input
        DensityMatrix::trusted(bp.clone()),
    ]
}

/// Searches `I_c(rho, N_H ⊗ N_E)` over the grid of Horodecki parameters.
pub fn superactivation_search(q_grid: &[f64], opts: &OptimizerOptions) -> Result<SuperactivationReport> {
    let erasure = erasure_50_two_qubit();
    let erasure_best = maximize_coherent_information(&erasure, opts)?.value;
    let inits = superactivation_inits();
    let mut points = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let h = horodecki_4d(q)?;
        let (ppt, min_pt) = is_ppt(&h);
        let h_best = maximize_coherent_information(&h, opts)?.value;
        let joint = tensor(&h, &erasure);
        let est = maximize_coherent_information_from(&joint, opts, &inits)?;
        points.push(SuperactivationPoint {
            q,
            ppt,
            min_pt_eigenvalue: min_pt,
            horodecki_best_ic: h_best,
            erasure_best_ic: erasure_best,
            joint_best_ic: est.value,
            joint_converged: est.converged,
            joint_argmax: est.state().expect("state estimate").clone(),
        });
    }
    let pick = |filter: &dyn Fn(&SuperactivationPoint) -> bool| {
        let mut best: Option<usize> = None;
        for (i, p) in points.iter().enumerate() {
            if filter(p) && best.map_or(true, |b| p.joint_best_ic > points[b].joint_best_ic) {
                best = Some(i);
            }
        }
        best
    };
    let certified_best = pick(&|p| p.ppt && p.horodecki_best_ic <= FACTOR_CEILING && p.erasure_best_ic <= FACTOR_CEILING);
    let overall_best = pick(&|_| true);
    Ok(SuperactivationReport {
        points,
        certified_best,
        overall_best,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TwoShot {
    pub direct: f64,
    pub expansion: f64,
}

/// `I_c(rho, M_p ⊗ M_p)` directly and through the four flagged branches.
pub fn nonconvexity_two_shot(p: f64, rho: &DensityMatrix) -> Result<TwoShot> {
    nonconvexity_two_shot_with(p, HORODECKI_DEFAULT_Q, rho)
}

pub fn nonconvexity_two_shot_with(p: f64, horodecki_q: f64, rho: &DensityMatrix) -> Result<TwoShot> {
    let h = horodecki_4d(horodecki_q)?;
    let e = erasure_50_two_qubit();
    let mp = flagged_mix(p, &h, &e)?;
    if rho.dim() != mp.dim_in() * mp.dim_in() {
        return Err(QcapError::Dimension(format!(
            "two-shot input must have dimension {}, got {}",
            mp.dim_in() * mp.dim_in(),
            rho.dim()
        )));
    }
    let direct = coherent_information(rho, &tensor(&mp, &mp))?;
    let mut expansion = 0.0;
    for (w, a, b) in [
        (p * p, &h, &h),
        (p * (1.0 - p), &h, &e),
        (p * (1.0 - p), &e, &h),
        ((1.0 - p) * (1.0 - p), &e, &e),
    ] {
        if w > 0.0 {
            expansion += w * coherent_information(rho, &tensor(a, b))?;
        }
    }
    Ok(TwoShot { direct, expansion })
}
