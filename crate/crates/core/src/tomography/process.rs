use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::Probe;
use crate::qcore::matrix::{c, ZERO};
use crate::qcore::sampling::haar_state;
use crate::qcore::{
    pauli_x, pauli_y, pauli_z, root_fidelity, state_fidelity, ComplexMatrix, DensityMatrix,
    KrausChannel,
};

pub const CHI_TOL: f64 = 1e-10;
/// Clamping beyond this marks the reconstruction as not completely positive.
pub const CP_FLAG_THRESHOLD: f64 = 1e-6;
pub const KRAUS_DROP: f64 = 1e-12;

/// `I, σ_x, σ_y, σ_z`
pub fn pauli_basis() -> [ComplexMatrix; 4] {
    [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()]
}

/// `|P⟩⟩ = (I ⊗ P)|Ω⟩` with `|Ω⟩ = |00⟩ + |11⟩`.
fn vectorize(p: &ComplexMatrix) -> [Complex64; 4] {
    let mut v = [ZERO; 4];
    for i in 0..2 {
        for k in 0..2 {
            v[2 * i + k] = p.get(k, i);
        }
    }
    v
}

/// Process matrix in the `(I, σ_x, σ_y, σ_z)` basis, `ε(ρ) = Σ χ_mn P_m ρ P_n`,
/// normalized to unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix {
    matrix: ComplexMatrix,
}

impl ChiMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.rows(),
            });
        }
        let herm = matrix.hermiticity_error();
        if herm > CHI_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > CHI_TOL || tr.im.abs() > CHI_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min = matrix.hermitian_eigenvalues()[0];
        if min < -CHI_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `χ_mn = Σ_i c_im c̄_in` with `K_i = Σ_m c_im P_m`.
    pub fn from_channel(k: &KrausChannel) -> Result<Self> {
        if k.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: k.dim(),
            });
        }
        let basis = pauli_basis();
        let mut m = ComplexMatrix::zeros(4, 4);
        for op in k.operators() {
            let coeffs: Vec<Complex64> = basis.iter().map(|p| (p * op).trace() * 0.5).collect();
            for a in 0..4 {
                for b in 0..4 {
                    m.set(a, b, m.get(a, b) + coeffs[a] * coeffs[b].conj());
                }
            }
        }
        Self::new(m)
    }

    /// Normalized Choi state `J = ½ Σ χ_mn |P_m⟩⟩⟨⟨P_n|`, reference factor first.
    pub fn choi(&self) -> ComplexMatrix {
        let vecs: Vec<[Complex64; 4]> = pauli_basis().iter().map(vectorize).collect();
        let mut j = ComplexMatrix::zeros(4, 4);
        for a in 0..4 {
            for b in 0..4 {
                let chi = self.matrix.get(a, b) * 0.5;
                if chi == ZERO {
                    continue;
                }
                j = &j + &ComplexMatrix::outer(&vecs[a], &vecs[b]).scale(chi);
            }
        }
        j
    }

    /// Inverse of [`ChiMatrix::choi`]: `χ_ab = ⟨⟨P_a|J|P_b⟩⟩ / 2`.
    pub fn from_choi(j: &ComplexMatrix) -> Result<Self> {
        Self::new(chi_entries_from_choi(j)?)
    }
}

fn chi_entries_from_choi(j: &ComplexMatrix) -> Result<ComplexMatrix> {
    if j.rows() != 4 || j.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: j.rows(),
        });
    }
    let vecs: Vec<[Complex64; 4]> = pauli_basis().iter().map(vectorize).collect();
    let mut chi = ComplexMatrix::zeros(4, 4);
    for a in 0..4 {
        let jb: Vec<Vec<Complex64>> = vecs.iter().map(|v| j.mul_vec(v)).collect();
        for b in 0..4 {
            let v: Complex64 = vecs[a].iter().zip(&jb[b]).map(|(x, y)| x.conj() * y).sum();
            chi.set(a, b, v * 0.5);
        }
    }
    Ok(chi)
}

pub fn choi_from_chi(chi: &ChiMatrix) -> ComplexMatrix {
    chi.choi()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiJson {
    pub basis: [String; 4],
    /// Row-major `[re, im]` pairs.
    pub matrix: Vec<[f64; 2]>,
}

impl From<&ChiMatrix> for ChiJson {
    fn from(chi: &ChiMatrix) -> Self {
        Self {
            basis: ["I", "X", "Y", "Z"].map(String::from),
            matrix: chi.matrix.row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ChiJson {
    pub fn to_chi(&self) -> Result<ChiMatrix> {
        if self.basis != ["I", "X", "Y", "Z"] {
            return Err(Error::Tomography(format!("unsupported chi basis {:?}", self.basis)));
        }
        let entries = self.matrix.iter().map(|[re, im]| c(*re, *im)).collect();
        ChiMatrix::new(ComplexMatrix::from_row_major(4, 4, entries)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QptResult {
    pub chi: ChiMatrix,
    /// Set when the PSD projection moved an eigenvalue by more than 1e-6.
    pub cp_flag: bool,
    pub clamp_change: f64,
}

/// Linear-inversion process tomography from the outputs of the four probes.
///
/// `ε(|0⟩⟨1|) = ε(ρ_+) + iε(ρ_L) − (1+i)/2 (ε(ρ_0) + ε(ρ_1))` and its adjoint
/// give the off-diagonal images; the raw `χ` is projected onto the PSD cone.
pub fn qpt_chi(outputs: &BTreeMap<Probe, DensityMatrix>) -> Result<QptResult> {
    let get = |p: Probe| {
        let rho = outputs
            .get(&p)
            .ok_or_else(|| Error::MissingProbe(p.as_str().to_string()))?;
        if rho.n_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: rho.n_qubits(),
            });
        }
        Ok(rho.matrix().clone())
    };
    let e00 = get(Probe::Zero)?;
    let e11 = get(Probe::One)?;
    let plus = get(Probe::Plus)?;
    let l = get(Probe::L)?;
    let diag_sum = (&e00 + &e11).scale(c(0.5, 0.5));
    let e01 = &(&plus + &l.scale(c(0.0, 1.0))) - &diag_sum;
    let e10 = e01.adjoint();
    let images = [[&e00, &e01], [&e10, &e11]];
    let mut j = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for k in 0..2 {
            for r in 0..2 {
                for s in 0..2 {
                    j.set(2 * i + r, 2 * k + s, images[i][k].get(r, s) * 0.5);
                }
            }
        }
    }
    let raw = chi_entries_from_choi(&j)?.hermitian_part();
    let (values, vectors) = raw.hermitian_eigen();
    let mut clamped = ComplexMatrix::zeros(4, 4);
    let mut change = 0.0f64;
    for (lambda, v) in values.iter().zip(&vectors) {
        if *lambda < 0.0 {
            change = change.max(-lambda);
            continue;
        }
        clamped = &clamped + &ComplexMatrix::outer(v, v).scale_real(*lambda);
    }
    let tr = clamped.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Tomography("process reconstruction has no positive part".into()));
    }
    Ok(QptResult {
        chi: ChiMatrix::new(clamped.scale_real(1.0 / tr).hermitian_part())?,
        cp_flag: change > CP_FLAG_THRESHOLD,
        clamp_change: change,
    })
}

/// Kraus operators `K_i = √λ_i Σ_m v_i[m] P_m` from the eigendecomposition of
/// `χ`, dropping `λ_i < 1e-12`. If `Σ K†K` departs from the identity (possible
/// after PSD clamping) the set is rescaled by `(Σ K†K)^{-1/2}`.
pub fn kraus_from_chi(chi: &ChiMatrix) -> Result<KrausChannel> {
    let (values, vectors) = chi.matrix.hermitian_eigen();
    let basis = pauli_basis();
    let mut ops = Vec::new();
    for (lambda, v) in values.iter().zip(&vectors).rev() {
        if *lambda < KRAUS_DROP {
            continue;
        }
        let mut k = ComplexMatrix::zeros(2, 2);
        for (m, p) in basis.iter().enumerate() {
            k = &k + &p.scale(v[m] * lambda.sqrt());
        }
        ops.push(k);
    }
    if ops.is_empty() {
        return Err(Error::EmptyChannel);
    }
    let mut sum = ComplexMatrix::zeros(2, 2);
    for k in &ops {
        sum = &sum + &(&k.adjoint() * k);
    }
    if sum.max_abs_diff(&ComplexMatrix::identity(2)) > 1e-10 {
        let (vals, vecs) = sum.hermitian_eigen();
        if vals[0] < 1e-12 {
            return Err(Error::Completeness(vals[0]));
        }
        let mut inv_sqrt = ComplexMatrix::zeros(2, 2);
        for (lambda, v) in vals.iter().zip(&vecs) {
            inv_sqrt = &inv_sqrt + &ComplexMatrix::outer(v, v).scale_real(1.0 / lambda.sqrt());
        }
        ops = ops.iter().map(|k| k * &inv_sqrt).collect();
    }
    KrausChannel::with_tolerance(ops, 1e-8)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityConvention {
    /// `tr√(√J_a J_b √J_a)`
    Sqrt,
    /// square of the above
    Squared,
}

/// Fidelity between the normalized Choi states of two processes.
pub fn process_fidelity(a: &ChiMatrix, b: &ChiMatrix, convention: FidelityConvention) -> Result<f64> {
    let f = root_fidelity(&a.choi(), &b.choi())?;
    Ok(match convention {
        FidelityConvention::Sqrt => f,
        FidelityConvention::Squared => f * f,
    })
}

/// Mean `F(ε_a(ψ), ε_b(ψ))` over Haar-random pure qubit inputs.
pub fn average_state_fidelity(
    ka: &KrausChannel,
    kb: &KrausChannel,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    for k in [ka, kb] {
        if k.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: k.dim(),
            });
        }
    }
    if n_samples == 0 {
        return Err(Error::TooSmall {
            what: "n_samples",
            min: 1,
            found: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..n_samples {
        let rho = haar_state(&mut rng, 1).to_density();
        total += state_fidelity(&ka.apply(&rho)?, &kb.apply(&rho)?)?;
    }
    Ok(total / n_samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::hadamard;

    fn h_channel() -> KrausChannel {
        KrausChannel::unitary(hadamard()).unwrap()
    }

    fn outputs_of(k: &KrausChannel) -> BTreeMap<Probe, DensityMatrix> {
        Probe::ALL
            .iter()
            .map(|p| (*p, k.apply(&p.logical().density()).unwrap()))
            .collect()
    }

    #[test]
    fn identity_chi() {
        let r = qpt_chi(&outputs_of(&KrausChannel::identity(2))).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(0, 0, c(1.0, 0.0));
        assert!(r.chi.matrix().max_abs_diff(&expected) < 1e-12);
        assert!(!r.cp_flag);
    }

    #[test]
    fn hadamard_chi() {
        let r = qpt_chi(&outputs_of(&h_channel())).unwrap();
        let m = r.chi.matrix();
        for (a, b) in [(1, 1), (3, 3), (1, 3), (3, 1)] {
            assert!((m.get(a, b) - c(0.5, 0.0)).norm() < 1e-12);
        }
        assert!(m.get(0, 0).norm() < 1e-12 && m.get(2, 2).norm() < 1e-12);
        let k = kraus_from_chi(&r.chi).unwrap();
        assert_eq!(k.operators().len(), 1);
        // up to global phase
        let op = &k.operators()[0];
        let phase = op.get(0, 0) / op.get(0, 0).norm();
        assert!(op.scale(phase.conj()).max_abs_diff(&hadamard()) < 1e-12);
    }

    #[test]
    fn depolarizing_chi_and_full_pd_kraus() {
        let r = qpt_chi(&outputs_of(&KrausChannel::fully_depolarizing())).unwrap();
        let quarter = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(r.chi.matrix().max_abs_diff(&quarter) < 1e-12);

        let mut pd = ComplexMatrix::zeros(4, 4);
        pd.set(0, 0, c(0.5, 0.0));
        pd.set(3, 3, c(0.5, 0.0));
        let k = kraus_from_chi(&ChiMatrix::new(pd).unwrap()).unwrap();
        assert_eq!(k.operators().len(), 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut found = [false; 2];
        for op in k.operators() {
            let up = op.get(0, 0).norm();
            assert!((up - s).abs() < 1e-12);
            if (op.get(1, 1) - op.get(0, 0)).norm() < 1e-12 {
                found[0] = true;
            }
            if (op.get(1, 1) + op.get(0, 0)).norm() < 1e-12 {
                found[1] = true;
            }
        }
        assert_eq!(found, [true, true]);
    }

    #[test]
    fn fidelity_conventions() {
        let h = ChiMatrix::from_channel(&h_channel()).unwrap();
        let dep = ChiMatrix::from_channel(&KrausChannel::fully_depolarizing()).unwrap();
        assert!((process_fidelity(&h, &dep, FidelityConvention::Sqrt).unwrap() - 0.5).abs() < 1e-12);
        assert!((process_fidelity(&h, &dep, FidelityConvention::Squared).unwrap() - 0.25).abs() < 1e-12);
        assert!((process_fidelity(&h, &h, FidelityConvention::Sqrt).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn choi_roundtrip_and_trace() {
        let h = ChiMatrix::from_channel(&h_channel()).unwrap();
        let j = h.choi();
        assert!((j.trace() - c(1.0, 0.0)).norm() < 1e-14);
        let back = ChiMatrix::from_choi(&j).unwrap();
        assert!(back.matrix().max_abs_diff(h.matrix()) < 1e-14);
    }

    #[test]
    fn average_fidelity_against_depolarizing() {
        let f = average_state_fidelity(&h_channel(), &KrausChannel::fully_depolarizing(), 1000, 42).unwrap();
        assert!((f - 0.5).abs() < 0.02);
        let same = average_state_fidelity(&h_channel(), &h_channel(), 50, 1).unwrap();
        assert!((same - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_probe() {
        let mut outs = outputs_of(&h_channel());
        outs.remove(&Probe::L);
        assert_eq!(qpt_chi(&outs).unwrap_err(), Error::MissingProbe("L".into()));
        let mut outs = outputs_of(&h_channel());
        outs.insert(Probe::One, DensityMatrix::maximally_mixed(2));
        assert!(qpt_chi(&outs).is_err());
    }

    #[test]
    fn chi_json_roundtrip() {
        let chi = ChiMatrix::from_channel(&h_channel()).unwrap();
        let json = ChiJson::from(&chi);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.starts_with(r#"{"basis":["I","X","Y","Z"],"matrix":[["#));
        let back: ChiJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_chi().unwrap(), chi);
    }
}
