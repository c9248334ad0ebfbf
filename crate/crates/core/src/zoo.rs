//! Named channels and structural classifiers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::channels::{choi, complementary, validate_cptp, KrausChannel};
use crate::error::{QcapError, Result};
use crate::numerics::{eigh, eigvalsh, kron, partial_transpose, ComplexMatrix, Tolerances, C64, ONE, ZERO};

/// Horodecki parameter used when none is given.
pub const HORODECKI_DEFAULT_Q: f64 = 0.5;

fn check_unit_interval(name: &str, q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(QcapError::Parameter(format!("{name} = {q} is outside [0, 1]")));
    }
    Ok(())
}

pub fn pauli_channel(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Result<KrausChannel> {
    let p = [p_i, p_x, p_y, p_z];
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(QcapError::Simplex(format!("negative Pauli weight in {p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(QcapError::Simplex(format!("Pauli weights sum to {total}")));
    }
    let paulis = [
        ComplexMatrix::pauli_i(),
        ComplexMatrix::pauli_x(),
        ComplexMatrix::pauli_y(),
        ComplexMatrix::pauli_z(),
    ];
    let ops = paulis.iter().zip(p).map(|(m, w)| m.scale_real(w.sqrt())).collect();
    Ok(validate_cptp(ops, 2, 2)?.with_label(format!("pauli:pi={p_i},px={p_x},py={p_y},pz={p_z}")))
}

/// `(1-q) rho + (q/3)(X rho X + Y rho Y + Z rho Z)`
pub fn depolarizing(q: f64) -> Result<KrausChannel> {
    check_unit_interval("q", q)?;
    Ok(pauli_channel(1.0 - q, q / 3.0, q / 3.0, q / 3.0)?.with_label(format!("dep:q={q}")))
}

/// Clock-and-shift unitaries `X^a Z^b`, ordered by `a * d + b`.
pub fn weyl_heisenberg(d: usize) -> Vec<ComplexMatrix> {
    let mut shift = ComplexMatrix::zeros(d, d);
    let mut clock = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        shift[((j + 1) % d, j)] = ONE;
        clock[(j, j)] = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / d as f64);
    }
    let mut out = Vec::with_capacity(d * d);
    let mut xa = ComplexMatrix::identity(d);
    for _ in 0..d {
        let mut op = xa.clone();
        for _ in 0..d {
            out.push(op.clone());
            op = op.matmul(&clock);
        }
        xa = shift.matmul(&xa);
    }
    out
}

/// `rho -> I/d` realized with Kraus operators `U_i / d`.
pub fn completely_depolarizing(d: usize) -> Result<KrausChannel> {
    if d < 2 {
        return Err(QcapError::Parameter(format!("completely depolarizing channel needs d >= 2, got {d}")));
    }
    let ops = weyl_heisenberg(d).into_iter().map(|u| u.scale_real(1.0 / d as f64)).collect();
    Ok(validate_cptp(ops, d, d)?.with_label(format!("cd:d={d}")))
}

/// Two-qubit erasure with probability one half; level 4 is the flag.
pub fn erasure_50_two_qubit() -> KrausChannel {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut ops = vec![ComplexMatrix::identity(4).embed(5, 4).scale_real(s)];
    for i in 0..4 {
        ops.push(ComplexMatrix::unit(5, 4, 4, i).scale_real(s));
    }
    validate_cptp(ops, 4, 5).expect("erasure channel is CPTP").with_label("erasure50")
}

pub(crate) fn horodecki_m0_m1() -> (ComplexMatrix, ComplexMatrix) {
    let r2 = 2f64.sqrt();
    let a = 0.5 * (2.0 + r2).sqrt();
    let b = 0.5 * (2.0 - r2).sqrt();
    (ComplexMatrix::from_real_diag(&[a, b]), ComplexMatrix::from_real_diag(&[b, a]))
}

/// Four-dimensional Horodecki channel with six Kraus operators.
pub fn horodecki_4d(q: f64) -> Result<KrausChannel> {
    if !(q > 0.0 && q < 1.0) {
        return Err(QcapError::Parameter(format!("horodecki q = {q} is outside (0, 1)")));
    }
    let (m0, m1) = horodecki_m0_m1();
    let (i2, x, y, z) = (
        ComplexMatrix::pauli_i(),
        ComplexMatrix::pauli_x(),
        ComplexMatrix::pauli_y(),
        ComplexMatrix::pauli_z(),
    );
    let p0 = ComplexMatrix::unit(2, 2, 0, 0);
    let p1 = ComplexMatrix::unit(2, 2, 1, 1);
    let ops = vec![
        kron(&i2, &p0).scale_real((q / 2.0).sqrt()),
        kron(&z, &p1).scale_real((q / 2.0).sqrt()),
        kron(&z, &y).scale_real((q / 4.0).sqrt()),
        kron(&i2, &x).scale_real((q / 4.0).sqrt()),
        kron(&x, &m0).scale_real((1.0 - q).sqrt()),
        kron(&y, &m1).scale_real((1.0 - q).sqrt()),
    ];
    Ok(validate_cptp(ops, 4, 4)?.with_label(format!("horodecki:q={q}")))
}

/// `½(X rho X + Y rho Y)`
pub fn eb_xy() -> KrausChannel {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    validate_cptp(
        vec![ComplexMatrix::pauli_x().scale_real(s), ComplexMatrix::pauli_y().scale_real(s)],
        2,
        2,
    )
    .expect("X/Y mixture is CPTP")
    .with_label("ebxy")
}

/// `p a(rho) ⊗ |0><0| + (1-p) b(rho) ⊗ |1><1|`, outputs padded to a common dimension.
pub fn flagged_mix(p: f64, a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    check_unit_interval("p", p)?;
    if a.dim_in() != b.dim_in() {
        return Err(QcapError::Dimension(format!(
            "flagged mixture needs equal inputs, got {} and {}",
            a.dim_in(),
            b.dim_in()
        )));
    }
    let din = a.dim_in();
    let dout = a.dim_out().max(b.dim_out());
    let mut ops = Vec::new();
    for (weight, ch, flag) in [(p, a, 0), (1.0 - p, b, 1)] {
        if weight == 0.0 {
            continue;
        }
        let ket = ComplexMatrix::ket(2, flag);
        for k in ch.kraus() {
            ops.push(kron(&k.embed(dout, din), &ket).scale_real(weight.sqrt()));
        }
    }
    Ok(validate_cptp(ops, din, 2 * dout)?.with_label(format!("flagged:p={p}[{}|{}]", a.label(), b.label())))
}

/// Random channel from a Haar-like isometry into `dim_out * k`.
///
/// Panics unless `dim_out * k >= dim_in`.
pub fn random_channel<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, k: usize, rng: &mut R) -> KrausChannel {
    assert!(
        dim_out * k >= dim_in,
        "no isometry from {dim_in} into {dim_out} x {k} levels"
    );
    let g = ComplexMatrix::random_ginibre(dim_out * k, dim_in, rng);
    // V = G (G^dag G)^{-1/2}
    let e = eigh(&g.dagger().matmul(&g)).expect("Gram matrix is Hermitian");
    let v = g.matmul(&e.map_spectrum(|l| 1.0 / l.sqrt()));
    let ops = (0..k)
        .map(|i| {
            let mut a = ComplexMatrix::zeros(dim_out, dim_in);
            for b in 0..dim_out {
                for x in 0..dim_in {
                    a[(b, x)] = v[(b * k + i, x)];
                }
            }
            a
        })
        .collect();
    validate_cptp(ops, dim_in, dim_out)
        .expect("isometry slices are CPTP")
        .with_label(format!("random:{dim_in}->{dim_out},k={k}"))
}

/// Random-unitary channel and its complex conjugate, `sum p_i U_i^dag rho U_i`.
pub fn random_conjugate_pair(d: usize, k: usize, seed: u64) -> Result<(KrausChannel, KrausChannel)> {
    if d < 2 || k < 1 {
        return Err(QcapError::Parameter(format!("need d >= 2 and k >= 1, got d={d}, k={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unitaries: Vec<ComplexMatrix> = (0..k).map(|_| ComplexMatrix::random_unitary(d, &mut rng)).collect();
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let mut n_ops = Vec::with_capacity(k);
    let mut bar_ops = Vec::with_capacity(k);
    for (u, w) in unitaries.iter().zip(&raw) {
        let s = (w / total).sqrt();
        n_ops.push(u.dagger().scale_real(s));
        bar_ops.push(u.transpose().scale_real(s));
    }
    let tag = format!("d={d},k={k},seed={seed}");
    Ok((
        validate_cptp(n_ops, d, d)?.with_label(format!("hastings:{tag}")),
        validate_cptp(bar_ops, d, d)?.with_label(format!("hastings-conj:{tag}")),
    ))
}

/// PPT test on the Choi state: `(min eigenvalue >= -psd_tol, min eigenvalue)`.
pub fn is_ppt(ch: &KrausChannel) -> (bool, f64) {
    let c = choi(ch);
    let pt = partial_transpose(c.matrix(), &[ch.dim_out(), ch.dim_in()], 1).expect("Choi factors as out x in");
    let min = eigvalsh(&pt).expect("partial transpose of a Hermitian matrix is Hermitian")[0];
    (min >= -Tolerances::default().psd_tol, min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradabilityVerdict {
    Degradable,
    Antidegradable,
    /// Both degradable and antidegradable.
    Symmetric,
    Undetermined,
}

impl DegradabilityVerdict {
    pub fn is_degradable(self) -> bool {
        matches!(self, Self::Degradable | Self::Symmetric)
    }

    pub fn is_antidegradable(self) -> bool {
        matches!(self, Self::Antidegradable | Self::Symmetric)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Degradability {
    pub verdict: DegradabilityVerdict,
    /// Residual of the best candidate post-processing map.
    pub residual: f64,
}

/// Largest Choi size (squared) the witness will attempt.
const WITNESS_MAX_UNKNOWNS: usize = 1600;

/// Searches for a CPTP `omega` with `omega ∘ from = to` by alternating projections.
/// Returns the residual of the best candidate: max of the constraint violation and
/// the negative part of its Choi spectrum.
fn postprocessing_residual(from: &KrausChannel, to: &KrausChannel) -> Option<f64> {
    let din = from.dim_in();
    let (dy, de) = (from.dim_out(), to.dim_out());
    let n = de * dy;
    let unknowns = n * n;
    if unknowns > WITNESS_MAX_UNKNOWNS {
        return None;
    }
    // J indexed by ((e, y), (e', y')), flattened row-major.
    let idx = |e: usize, y: usize, e2: usize, y2: usize| (e * dy + y) * n + (e2 * dy + y2);
    let n_cons = din * din * de * de + dy * dy;
    let mut a = ComplexMatrix::zeros(n_cons, unknowns);
    let mut b = vec![ZERO; n_cons];
    let mut row = 0;
    for x in 0..din {
        for x2 in 0..din {
            let unit = ComplexMatrix::unit(din, din, x, x2);
            let fy = from.apply_matrix(&unit);
            let te = to.apply_matrix(&unit);
            for e in 0..de {
                for e2 in 0..de {
                    for y in 0..dy {
                        for y2 in 0..dy {
                            a[(row, idx(e, y, e2, y2))] += fy[(y, y2)];
                        }
                    }
                    b[row] = te[(e, e2)];
                    row += 1;
                }
            }
        }
    }
    for y in 0..dy {
        for y2 in 0..dy {
            for e in 0..de {
                a[(row, idx(e, y, e, y2))] = ONE;
            }
            b[row] = if y == y2 { ONE } else { ZERO };
            row += 1;
        }
    }
    let pinv = a.pseudo_inverse(1e-10);
    let bcol = ComplexMatrix::column(&b);
    let offset = pinv.matmul(&bcol);
    let proj = &ComplexMatrix::identity(unknowns) - &pinv.matmul(&a);

    let affine = |x: &ComplexMatrix| &proj.matmul(x) + &offset;
    let violation = |x: &ComplexMatrix| (&a.matmul(x) - &bcol).frobenius_norm();

    let mut x = offset.clone();
    let mut best = f64::INFINITY;
    for _ in 0..3000 {
        let j = ComplexMatrix::from_vec_unchecked(n, n, x.data().to_vec());
        let e = eigh(&j.hermitian_part()).expect("Hermitian part");
        let neg = -e.values[0].min(0.0);
        let lin = violation(&ComplexMatrix::column(&j.hermitian_part().into_data()));
        best = best.min(neg.max(lin));
        if best <= 1e-12 {
            break;
        }
        let psd = e.map_spectrum(|l| l.max(0.0));
        x = affine(&ComplexMatrix::column(psd.data()));
    }
    Some(best)
}

/// Heuristic degradability test; `Undetermined` is a legitimate outcome.
pub fn degradability_witness(ch: &KrausChannel) -> Degradability {
    let ch = ch.compressed();
    let env = complementary(&ch).compressed();
    let accept = 10.0 * Tolerances::default().cptp_tol;
    let deg = postprocessing_residual(&ch, &env);
    let anti = postprocessing_residual(&env, &ch);
    let ok = |r: Option<f64>| r.map_or(false, |r| r <= accept);
    let verdict = match (ok(deg), ok(anti)) {
        (true, true) => DegradabilityVerdict::Symmetric,
        (true, false) => DegradabilityVerdict::Degradable,
        (false, true) => DegradabilityVerdict::Antidegradable,
        (false, false) => DegradabilityVerdict::Undetermined,
    };
    let residual = match verdict {
        DegradabilityVerdict::Degradable => deg.unwrap(),
        DegradabilityVerdict::Antidegradable => anti.unwrap(),
        DegradabilityVerdict::Symmetric => deg.unwrap().max(anti.unwrap()),
        DegradabilityVerdict::Undetermined => match (deg, anti) {
            (Some(a), Some(b)) => a.min(b),
            _ => f64::NAN,
        },
    };
    Degradability { verdict, residual }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelClassReport {
    pub ppt: bool,
    pub min_pt_eigenvalue: f64,
    /// Qubit-to-qubit channel, where PPT of the Choi state implies separability.
    pub qubit_ppt_shortcut: bool,
    /// PPT and the qubit shortcut applies, so the channel is entanglement breaking.
    pub entanglement_breaking_hint: bool,
    pub degradability: Degradability,
}

pub fn classify(ch: &KrausChannel) -> ChannelClassReport {
    let (ppt, min) = is_ppt(ch);
    let shortcut = ch.dim_in() * ch.dim_out() <= 6;
    ChannelClassReport {
        ppt,
        min_pt_eigenvalue: min,
        qubit_ppt_shortcut: shortcut,
        entanglement_breaking_hint: ppt && shortcut,
        degradability: degradability_witness(ch),
    }
}

fn parse_params(spec: &str) -> Result<(String, Vec<(String, f64)>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, r),
        None => (spec, ""),
    };
    let mut params = Vec::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| QcapError::Parse(format!("expected key=value in '{kv}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| QcapError::Parse(format!("'{v}' is not a number")))?;
        params.push((k.trim().to_string(), v));
    }
    Ok((name.trim().to_ascii_lowercase(), params))
}

fn take(params: &[(String, f64)], key: &str, default: Option<f64>) -> Result<f64> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .or(default)
        .ok_or_else(|| QcapError::Parse(format!("missing parameter '{key}'")))
}

fn take_dim(params: &[(String, f64)], key: &str, default: Option<f64>) -> Result<usize> {
    let v = take(params, key, default)?;
    if v < 1.0 || v.fract() != 0.0 {
        return Err(QcapError::Parse(format!("'{key}' must be a positive integer, got {v}")));
    }
    Ok(v as usize)
}

/// Builds a channel from a spec such as `dep:q=0.19` or `cd:d=3`.
pub fn parse_channel_spec(spec: &str) -> Result<KrausChannel> {
    let (name, params) = parse_params(spec)?;
    let known: &[&str] = match name.as_str() {
        "dep" | "depolarizing" => &["q"],
        "cd" => &["d"],
        "id" | "identity" => &["d"],
        "pauli" => &["px", "py", "pz"],
        "horodecki" => &["q"],
        "flagged" => &["p", "q"],
        _ => &[],
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        return Err(QcapError::Parse(format!("unknown parameter '{k}' for channel '{name}'")));
    }
    match name.as_str() {
        "dep" | "depolarizing" => depolarizing(take(&params, "q", None)?),
        "cd" => completely_depolarizing(take_dim(&params, "d", Some(2.0))?),
        "id" | "identity" => Ok(KrausChannel::identity(take_dim(&params, "d", Some(2.0))?)),
        "pauli" => {
            let px = take(&params, "px", Some(0.0))?;
            let py = take(&params, "py", Some(0.0))?;
            let pz = take(&params, "pz", Some(0.0))?;
            pauli_channel(1.0 - px - py - pz, px, py, pz)
        }
        "horodecki" => horodecki_4d(take(&params, "q", Some(HORODECKI_DEFAULT_Q))?),
        "erasure50" => Ok(erasure_50_two_qubit()),
        "ebxy" => Ok(eb_xy()),
        "flagged" => {
            let h = horodecki_4d(take(&params, "q", Some(HORODECKI_DEFAULT_Q))?)?;
            flagged_mix(take(&params, "p", None)?, &h, &erasure_50_two_qubit())
        }
        other => Err(QcapError::Parse(format!("unknown channel '{other}'"))),
    }
}

/// One entry of the channel catalog.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub spec: &'static str,
    pub description: &'static str,
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            spec: "dep:q=<q>",
            description: "qubit depolarizing channel (1-q)rho + q/3 (XrhoX + YrhoY + ZrhoZ)",
        },
        CatalogEntry {
            spec: "cd:d=<d>",
            description: "completely depolarizing channel on d levels (Weyl-Heisenberg Kraus set)",
        },
        CatalogEntry {
            spec: "pauli:px=<x>,py=<y>,pz=<z>",
            description: "qubit Pauli channel",
        },
        CatalogEntry {
            spec: "id:d=<d>",
            description: "identity channel",
        },
        CatalogEntry {
            spec: "horodecki:q=<q>",
            description: "4-level Horodecki channel with six Kraus operators",
        },
        CatalogEntry {
            spec: "erasure50",
            description: "two-qubit erasure channel with erasure probability 1/2 (5 output levels)",
        },
        CatalogEntry {
            spec: "ebxy",
            description: "entanglement-breaking qubit channel (XrhoX + YrhoY)/2",
        },
        CatalogEntry {
            spec: "flagged:p=<p>,q=<q>",
            description: "flagged mixture of horodecki:q and erasure50 with weight p",
        },
    ]
}
