//! Two-channel quantum switch and the causal-activation results.

use serde::Serialize;

use crate::capacity::{maximize_coherent_information, maximize_holevo, OptimizerOptions};
use crate::channels::{apply, compose, validate_cptp, DensityMatrix, KrausChannel};
use crate::entropics::{binary_entropy, coherent_information};
use crate::error::{QcapError, Result};
use crate::numerics::{eigh, kron, ComplexMatrix, C64};
use crate::zoo::{completely_depolarizing, eb_xy};

/// Effective channel on the system; the output is system ⊗ control.
#[derive(Clone, Debug)]
pub struct SwitchedChannel {
    pub base: KrausChannel,
    /// Number of `(i, j)` Kraus pairs of the factors.
    pub n_kraus_pairs: usize,
    pub control: DensityMatrix,
    pub factors: (KrausChannel, KrausChannel),
}

/// Pure control `sqrt(p)|0> + sqrt(1-p)|1>`.
pub fn control_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QcapError::Parameter(format!("control weight p = {p} is outside [0, 1]")));
    }
    DensityMatrix::pure(&[C64::new(p.sqrt(), 0.0), C64::new((1.0 - p).sqrt(), 0.0)])
}

/// Switch of `n` and `m` driven by `rho_c`: `N_i M_j` on the |0> branch and
/// `M_j N_i` on the |1> branch.
pub fn quantum_switch(n: &KrausChannel, m: &KrausChannel, rho_c: &DensityMatrix) -> Result<SwitchedChannel> {
    let d = n.dim_in();
    if n.dim_out() != d || m.dim_in() != d || m.dim_out() != d {
        return Err(QcapError::Dimension(format!(
            "switch needs two channels on the same space, got {}->{} and {}->{}",
            n.dim_in(),
            n.dim_out(),
            m.dim_in(),
            m.dim_out()
        )));
    }
    if rho_c.dim() != 2 {
        return Err(QcapError::Dimension(format!("control must be a qubit, got dimension {}", rho_c.dim())));
    }
    let ctrl = eigh(rho_c.matrix())?;
    let ket0 = ComplexMatrix::ket(2, 0);
    let ket1 = ComplexMatrix::ket(2, 1);
    let mut ops = Vec::new();
    for (k, &mu) in ctrl.values.iter().enumerate() {
        if mu <= 1e-15 {
            continue;
        }
        let c = ctrl.vector(k);
        let s = mu.sqrt();
        for ni in n.kraus() {
            for mj in m.kraus() {
                let first = kron(&ni.matmul(mj), &ket0).scale(c[0] * s);
                let second = kron(&mj.matmul(ni), &ket1).scale(c[1] * s);
                ops.push(&first + &second);
            }
        }
    }
    let base = validate_cptp(ops, d, 2 * d)?
        .with_label(format!("switch({}, {})", n.label(), m.label()))
        .compressed();
    Ok(SwitchedChannel {
        base,
        n_kraus_pairs: n.num_kraus() * m.num_kraus(),
        control: rho_c.clone(),
        factors: (n.clone(), m.clone()),
    })
}

/// Closed-form output of two completely depolarizing channels in the switch.
pub fn switched_cd_output_formula(rho: &DensityMatrix, p: f64, d: usize) -> Result<DensityMatrix> {
    if rho.dim() != d {
        return Err(QcapError::Dimension(format!("state has dimension {}, expected {d}", rho.dim())));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(QcapError::Parameter(format!("p = {p} is outside [0, 1]")));
    }
    let diag = ComplexMatrix::from_real_diag(&[p, 1.0 - p]);
    let coh = (p * (1.0 - p)).sqrt();
    let off = ComplexMatrix::from_real_rows(&[&[0.0, coh], &[coh, 0.0]])?;
    let a = kron(&ComplexMatrix::identity(d).scale_real(1.0 / d as f64), &diag);
    let b = kron(&rho.matrix().scale_real(1.0 / (d * d) as f64), &off);
    Ok(DensityMatrix::trusted(&a + &b))
}

/// Minimum output entropy of the switched completely depolarizing pair at p = 1/2.
pub fn switched_cd_min_output_entropy(d: usize) -> f64 {
    let df = d as f64;
    let mut h = 0.0;
    for (lam, mult) in [
        ((df + 1.0) / (2.0 * df * df), 1.0),
        (1.0 / (2.0 * df), 2.0 * (df - 1.0)),
        ((df - 1.0) / (2.0 * df * df), 1.0),
    ] {
        if lam > 0.0 {
            h -= mult * lam * lam.log2();
        }
    }
    h
}

/// `log2 d + S(control marginal) - H_min` for the switched completely depolarizing pair.
pub fn switched_cd_holevo_closed_form(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(QcapError::Parameter(format!("need d >= 2, got {d}")));
    }
    let df = d as f64;
    let s_ctrl = binary_entropy(0.5 + 1.0 / (2.0 * df * df));
    Ok(df.log2() + s_ctrl - switched_cd_min_output_entropy(d))
}

/// The switched completely depolarizing pair with control weight `p`.
pub fn switched_cd(d: usize, p: f64) -> Result<SwitchedChannel> {
    let cd = completely_depolarizing(d)?;
    quantum_switch(&cd, &cd, &control_state(p)?)
}

/// The switched `eb_xy` pair with the |+> control.
pub fn switched_eb() -> SwitchedChannel {
    let eb = eb_xy();
    quantum_switch(&eb, &eb, &control_state(0.5).expect("valid weight")).expect("qubit channels")
}

/// Output of the switched `eb_xy` pair.
pub fn switched_eb_effective(rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply(&switched_eb().base, rho)
}

/// `½ rho ⊗ |+><+| + ½ Z rho Z ⊗ |-><-|`
pub fn switched_eb_formula(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(QcapError::Dimension(format!("state has dimension {}, expected 2", rho.dim())));
    }
    let plus = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])?;
    let minus = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]])?;
    let z = ComplexMatrix::pauli_z();
    let a = kron(rho.matrix(), &plus);
    let b = kron(&z.conjugate_by(rho.matrix()), &minus);
    Ok(DensityMatrix::trusted((&a + &b).scale_real(0.5)))
}

/// Ensemble size used for Holevo estimates in the comparison report.
fn holevo_members(ch: &KrausChannel) -> usize {
    ch.dim_in() * ch.dim_in()
}

#[derive(Clone, Debug, Serialize)]
pub struct Placement {
    pub name: String,
    /// Coherent information at the supplied input state.
    pub ic_at_input: f64,
    /// Optimized coherent information.
    pub ic_best: f64,
    /// Optimized Holevo quantity.
    pub holevo_best: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BottleneckReport {
    pub placements: Vec<Placement>,
    /// Switched coherent information exceeds both sequential orders.
    pub quantum_violation: bool,
    /// Switched Holevo quantity exceeds both sequential orders.
    pub classical_violation: bool,
}

/// Margin by which the switch must beat the sequential orders to be flagged.
pub const VIOLATION_MARGIN: f64 = 1e-6;

/// Compares the switch against sequential and single-use placements.
pub fn bottleneck_comparison(
    n: &KrausChannel,
    m: &KrausChannel,
    rho: &DensityMatrix,
    p: f64,
    opts: &OptimizerOptions,
) -> Result<BottleneckReport> {
    let switched = quantum_switch(n, m, &control_state(p)?)?;
    let candidates = [
        ("N".to_string(), n.clone()),
        ("M".to_string(), m.clone()),
        ("M after N".to_string(), compose(m, n)?),
        ("N after M".to_string(), compose(n, m)?),
        ("switch".to_string(), switched.base.clone()),
    ];
    let mut placements = Vec::with_capacity(candidates.len());
    for (name, ch) in candidates {
        placements.push(Placement {
            name,
            ic_at_input: coherent_information(rho, &ch)?,
            ic_best: maximize_coherent_information(&ch, opts)?.value,
            holevo_best: maximize_holevo(&ch, Some(holevo_members(&ch)), opts)?.value,
        });
    }
    let seq_ic = placements[2].ic_best.max(placements[3].ic_best);
    let seq_chi = placements[2].holevo_best.max(placements[3].holevo_best);
    let sw = &placements[4];
    Ok(BottleneckReport {
        quantum_violation: sw.ic_best > seq_ic + VIOLATION_MARGIN,
        classical_violation: sw.holevo_best > seq_chi + VIOLATION_MARGIN,
        placements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::partial_trace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_pair_appends_control() {
        let id = KrausChannel::identity(2);
        let rc = control_state(0.3).unwrap();
        let sw = quantum_switch(&id, &id, &rc).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = DensityMatrix::random(2, &mut rng);
        let out = apply(&sw.base, &rho).unwrap();
        assert!(out.matrix().distance(rho.tensor(&rc).matrix()) < 1e-12);
    }

    #[test]
    fn cd_formula_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (p, d) in [(0.5, 2), (0.5, 3), (0.2, 2)] {
            let sw = switched_cd(d, p).unwrap();
            for _ in 0..10 {
                let rho = DensityMatrix::random(d, &mut rng);
                let a = apply(&sw.base, &rho).unwrap();
                let b = switched_cd_output_formula(&rho, p, d).unwrap();
                assert!(a.matrix().distance(b.matrix()) < 1e-12);
            }
        }
        let out = switched_cd_output_formula(&DensityMatrix::maximally_mixed(2), 0.0, 2).unwrap();
        let expected = kron(&ComplexMatrix::identity(2).scale_real(0.5), &ComplexMatrix::unit(2, 2, 1, 1));
        assert!(out.matrix().distance(&expected) < 1e-15);
    }

    #[test]
    fn cd_closed_form_values() {
        let v2 = switched_cd_holevo_closed_form(2).unwrap();
        let oracle = 1.0 + binary_entropy(5.0 / 8.0) - switched_cd_min_output_entropy(2);
        assert!((v2 - oracle).abs() < 1e-15);
        assert!((v2 - 0.049).abs() < 1e-3, "{v2}");
        let mut prev = v2;
        for d in 3..=8 {
            let v = switched_cd_holevo_closed_form(d).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn eb_formula_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let rho = DensityMatrix::random(2, &mut rng);
            let a = switched_eb_effective(&rho).unwrap();
            let b = switched_eb_formula(&rho).unwrap();
            assert!(a.matrix().distance(b.matrix()) < 1e-12);
        }
        let pi = DensityMatrix::maximally_mixed(2);
        let out = switched_eb_effective(&pi).unwrap();
        assert!(out.matrix().distance(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-12);
        let ic = coherent_information(&pi, &switched_eb().base).unwrap();
        assert!((ic - 1.0).abs() < 1e-9);
    }

    #[test]
    fn control_tracing_recovers_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = crate::zoo::random_channel(2, 2, 2, &mut rng);
        let m = crate::zoo::random_channel(2, 2, 3, &mut rng);
        let rho = DensityMatrix::random(2, &mut rng);
        for (p, first, second) in [(1.0, &m, &n), (0.0, &n, &m)] {
            let sw = quantum_switch(&n, &m, &control_state(p).unwrap()).unwrap();
            let out = apply(&sw.base, &rho).unwrap();
            let sys = partial_trace(out.matrix(), &[2, 2], &[0]).unwrap();
            let seq = apply(&compose(second, first).unwrap(), &rho).unwrap();
            assert!(sys.distance(seq.matrix()) < 1e-12);
        }
    }

    #[test]
    fn bad_inputs() {
        let id2 = KrausChannel::identity(2);
        let id3 = KrausChannel::identity(3);
        assert!(quantum_switch(&id2, &id3, &control_state(0.5).unwrap()).is_err());
        assert!(control_state(1.5).is_err());
    }
}
