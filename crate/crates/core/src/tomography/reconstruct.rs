use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dataset::TomographyDataset;
use crate::error::{Error, Result};
use crate::qcore::matrix::ZERO;
use crate::qcore::{pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityMatrix, Label};

/// Floor for model probabilities inside the likelihood.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

fn bloch_components(l: Label) -> [f64; 4] {
    match l {
        Label::Zero => [1.0, 0.0, 0.0, 1.0],
        Label::One => [1.0, 0.0, 0.0, -1.0],
        Label::Plus => [1.0, 1.0, 0.0, 0.0],
        Label::Minus => [1.0, -1.0, 0.0, 0.0],
        Label::L => [1.0, 0.0, 1.0, 0.0],
        Label::R => [1.0, 0.0, -1.0, 0.0],
    }
}

fn pauli_product(index: usize, n: usize) -> ComplexMatrix {
    let single = [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
    (0..n).fold(ComplexMatrix::identity(1), |acc, q| {
        let digit = (index >> (2 * (n - 1 - q))) & 3;
        acc.kron(&single[digit])
    })
}

/// Least-squares estimate of `ρ` from the record counts, expanded in Pauli
/// products and normalized to unit trace. Hermitian, not necessarily positive.
pub fn linear_inversion_state(d: &TomographyDataset) -> Result<ComplexMatrix> {
    d.validate()?;
    let n = d.n_qubits;
    let params = 1usize << (2 * n);
    let rows = d.records.len();
    if rows < params {
        return Err(Error::SingularDesign);
    }
    // tr(Π_j P_k) / 2^n = Π_q b_q[k_q] / 2^n
    let mut a = DMatrix::<f64>::zeros(rows, params);
    for (j, r) in d.records.iter().enumerate() {
        let comps: Vec<[f64; 4]> = r.setting.labels.iter().map(|l| bloch_components(*l)).collect();
        for k in 0..params {
            let mut v = 1.0;
            for (q, b) in comps.iter().enumerate() {
                v *= b[(k >> (2 * (n - 1 - q))) & 3];
                if v == 0.0 {
                    break;
                }
            }
            a[(j, k)] = v;
        }
    }
    let counts = DVector::from_iterator(rows, d.records.iter().map(|r| r.count));
    let normal = a.transpose() * &a;
    let eig = normal.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if !(lo > 1e-10 * hi) {
        return Err(Error::SingularDesign);
    }
    let rhs = a.transpose() * counts;
    let coeffs = normal.cholesky().ok_or(Error::SingularDesign)?.solve(&rhs);
    let dim = 1usize << n;
    let trace = coeffs[0] * dim as f64;
    if !(trace > 0.0) {
        return Err(Error::Tomography("linear inversion produced non-positive trace".into()));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for k in 0..params {
        if coeffs[k] != 0.0 {
            m = &m + &pauli_product(k, n).scale_real(coeffs[k] / trace);
        }
    }
    Ok(m.hermitian_part())
}

/// Nearest density matrix by eigenvalue clamping at 0 and renormalization.
/// Also returns the largest eigenvalue change made by the clamp.
pub fn clamp_to_density(m: &ComplexMatrix) -> Result<(DensityMatrix, f64)> {
    let (values, vectors) = m.hermitian_eigen();
    let dim = m.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut change = 0.0f64;
    for (lambda, v) in values.iter().zip(&vectors) {
        if *lambda <= 0.0 {
            change = change.max(-lambda);
            continue;
        }
        out = &out + &ComplexMatrix::outer(v, v).scale_real(*lambda);
    }
    Ok((DensityMatrix::from_unnormalized(out)?, change))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MleInit {
    MaximallyMixed,
    /// Clamped linear-inversion estimate. Zero eigen-directions of the start
    /// point stay zero under the iteration.
    LinearInversion,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Starting `ε`.
    pub dilution: f64,
    pub init: MleInit,
    /// Factor applied to `ε` after every accepted step.
    pub growth: f64,
    /// Upper bound for `ε`.
    pub max_dilution: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            tol: 1e-10,
            dilution: 0.1,
            init: MleInit::MaximallyMixed,
            growth: 2.0,
            max_dilution: 1e3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood of the start point and after every accepted step.
    pub log_likelihood: Vec<f64>,
    /// Evaluations where a record with counts had model probability below the floor.
    pub floor_hits: usize,
    pub dilution_halvings: usize,
    pub final_dilution: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MleResult {
    pub state: DensityMatrix,
    pub diagnostics: MleDiagnostics,
}

struct Model {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
    freqs: Vec<f64>,
}

impl Model {
    fn probabilities(&self, rho: &DMatrix<Complex64>) -> Vec<f64> {
        self.vectors
            .iter()
            .map(|v| {
                let mut acc = ZERO;
                for r in 0..self.dim {
                    let mut row = ZERO;
                    for c in 0..self.dim {
                        row += rho[(r, c)] * v[c];
                    }
                    acc += v[r].conj() * row;
                }
                acc.re
            })
            .collect()
    }

    /// `Σ f_j ln(p_j / Σ_i p_i)` over records with counts; floored entries counted.
    fn log_likelihood(&self, probs: &[f64], floor_hits: &mut usize) -> f64 {
        let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
        self.freqs
            .iter()
            .zip(probs)
            .filter(|(f, _)| **f > 0.0)
            .map(|(f, p)| {
                if *p < PROBABILITY_FLOOR {
                    *floor_hits += 1;
                }
                f * (p.max(PROBABILITY_FLOOR) / total).ln()
            })
            .sum()
    }

    /// `R = Σ_j (f_j / p_j) |v_j⟩⟨v_j|`
    fn r_operator(&self, probs: &[f64]) -> DMatrix<Complex64> {
        let mut r = DMatrix::zeros(self.dim, self.dim);
        for ((v, f), p) in self.vectors.iter().zip(&self.freqs).zip(probs) {
            if *f <= 0.0 {
                continue;
            }
            let w = f / p.max(PROBABILITY_FLOOR);
            for a in 0..self.dim {
                let va = v[a] * w;
                for b in 0..self.dim {
                    r[(a, b)] += va * v[b].conj();
                }
            }
        }
        r
    }
}

fn normalized(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = h.trace().re;
    h * Complex64::new(1.0 / tr, 0.0)
}

/// Diluted fixed-point maximum likelihood: `ρ ← N[(I+εR)ρ(I+εR)]`.
///
/// The likelihood is evaluated after each step; a step that would lower it is
/// rejected and retried with `ε/2`, so the recorded history is non-decreasing.
/// Accepted steps multiply `ε` by `growth` up to `max_dilution`. Stops once
/// an accepted step gains less than `tol`, or after `max_iter` steps. `R` is the exact gradient direction when the settings sum to a
/// multiple of the identity, as the overcomplete set does.
pub fn mle_state(d: &TomographyDataset, opts: &MleOptions) -> Result<MleResult> {
    d.validate()?;
    if !(opts.dilution > 0.0) || !(opts.tol >= 0.0) || !(opts.growth >= 1.0) || !(opts.max_dilution >= opts.dilution) {
        return Err(Error::Tomography(
            "need dilution > 0, tol >= 0, growth >= 1 and max_dilution >= dilution".into(),
        ));
    }
    let dim = 1usize << d.n_qubits;
    let total = d.total_counts();
    let model = Model {
        dim,
        vectors: d.records.iter().map(|r| r.setting.vector()).collect(),
        freqs: d.records.iter().map(|r| r.count / total).collect(),
    };
    let mut rho = match opts.init {
        MleInit::MaximallyMixed => DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        MleInit::LinearInversion => {
            let (start, _) = clamp_to_density(&linear_inversion_state(d)?)?;
            start.into_matrix().into_inner()
        }
    };
    let mut floor_hits = 0;
    let mut probs = model.probabilities(&rho);
    let mut ll = model.log_likelihood(&probs, &mut floor_hits);
    let mut history = vec![ll];
    let mut eps = opts.dilution;
    let mut halvings = 0;
    let mut iterations = 0;
    let mut converged = false;
    let identity = DMatrix::<Complex64>::identity(dim, dim);
    while iterations < opts.max_iter {
        let r = model.r_operator(&probs);
        let mut accepted = None;
        while eps > 1e-12 {
            let m = &identity + &r * Complex64::new(eps, 0.0);
            let candidate = normalized(&m * &rho * &m);
            let cand_probs = model.probabilities(&candidate);
            let mut hits = 0;
            let cand_ll = model.log_likelihood(&cand_probs, &mut hits);
            if cand_ll >= ll {
                floor_hits += hits;
                accepted = Some((candidate, cand_probs, cand_ll));
                break;
            }
            eps /= 2.0;
            halvings += 1;
        }
        let Some((next, next_probs, next_ll)) = accepted else {
            converged = true;
            break;
        };
        iterations += 1;
        eps = (eps * opts.growth).min(opts.max_dilution);
        let gain = next_ll - ll;
        rho = next;
        probs = next_probs;
        ll = next_ll;
        history.push(ll);
        if gain < opts.tol {
            converged = true;
            break;
        }
    }
    let mut state = ComplexMatrix::from_inner(rho);
    // tiny negative eigenvalues from rounding
    if state.hermitian_eigenvalues()[0] < 0.0 {
        state = clamp_to_density(&state)?.0.into_matrix();
    }
    Ok(MleResult {
        state: DensityMatrix::from_unnormalized(state)?,
        diagnostics: MleDiagnostics {
            iterations,
            converged,
            log_likelihood: history,
            floor_hits,
            dilution_halvings: halvings,
            final_dilution: eps,
        },
    })
}
