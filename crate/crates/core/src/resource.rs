//! Cluster-state resources: standard chains, DFS chains built from singlet
//! pairs, and the four-qubit linear cluster the DFS resource is rotated from.
//!
//! Dual-rail code: `|0_E⟩ = |01⟩`, `|1_E⟩ = −|10⟩`. A DFS chain of `m`
//! effective qubits uses physical qubits `(2j, 2j+1)` for pair `j`, with
//! controlled-phase gates only between the `a` members `2j` and `2j+2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::LogicalQubit;
use crate::qcore::matrix::{c, ZERO};
use crate::qcore::{
    controlled_phase, partial_trace, pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityMatrix,
    Label, PureState, Tensor,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceKind {
    Standard,
    Dfs,
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceKind::Standard => "standard",
            ResourceKind::Dfs => "dfs",
        })
    }
}

impl FromStr for ResourceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(ResourceKind::Standard),
            "dfs" => Ok(ResourceKind::Dfs),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Product of Pauli matrices written left to right, e.g. `"XZ"` is `σ_x σ_z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliProduct(String);

impl PauliProduct {
    pub fn parse(label: &str) -> Result<Self> {
        if label.is_empty() || !label.chars().all(|ch| matches!(ch, 'I' | 'X' | 'Y' | 'Z')) {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        Ok(Self(label.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.0.chars().fold(ComplexMatrix::identity(2), |acc, ch| {
            let p = match ch {
                'X' => pauli_x(),
                'Y' => pauli_y(),
                'Z' => pauli_z(),
                _ => ComplexMatrix::identity(2),
            };
            &acc * &p
        })
    }
}

impl Serialize for PauliProduct {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for PauliProduct {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PauliProduct::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Graph description of a resource: entangling edges plus trailing local
/// Pauli corrections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceSpec {
    pub kind: ResourceKind,
    pub n_effective: usize,
    pub cz_edges: Vec<[usize; 2]>,
    pub local_corrections: Vec<(usize, PauliProduct)>,
}

impl ResourceSpec {
    pub fn standard(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall {
                what: "standard cluster length",
                min: 2,
                found: n,
            });
        }
        Ok(Self {
            kind: ResourceKind::Standard,
            n_effective: n,
            cz_edges: (0..n - 1).map(|j| [j, j + 1]).collect(),
            local_corrections: Vec::new(),
        })
    }

    pub fn dfs(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooSmall {
                what: "DFS cluster length",
                min: 2,
                found: m,
            });
        }
        Ok(Self {
            kind: ResourceKind::Dfs,
            n_effective: m,
            cz_edges: (0..m - 1).map(|j| [2 * j, 2 * j + 2]).collect(),
            local_corrections: Vec::new(),
        })
    }

    pub fn physical_qubits(&self) -> usize {
        match self.kind {
            ResourceKind::Standard => self.n_effective,
            ResourceKind::Dfs => 2 * self.n_effective,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.physical_qubits();
        if self.n_effective < 2 {
            return Err(Error::TooSmall {
                what: "effective qubits",
                min: 2,
                found: self.n_effective,
            });
        }
        for &[a, b] in &self.cz_edges {
            for q in [a, b] {
                if q >= n {
                    return Err(Error::IndexOutOfRange { index: q, n_qubits: n });
                }
            }
            if a == b {
                return Err(Error::RepeatedIndex(a));
            }
            if self.kind == ResourceKind::Dfs && (a % 2 != 0 || b % 2 != 0 || a.abs_diff(b) != 2) {
                return Err(Error::InvalidSchedule(format!(
                    "DFS edge [{a},{b}] must join the a-qubits of adjacent pairs"
                )));
            }
        }
        for (q, _) in &self.local_corrections {
            if *q >= n {
                return Err(Error::IndexOutOfRange { index: *q, n_qubits: n });
            }
        }
        Ok(())
    }

    /// Prepares the resource. With `input`, the first effective qubit starts
    /// in `μ|0⟩+ν|1⟩` (encoded as `μ|0_E⟩+ν|1_E⟩` for DFS) instead of `|+⟩`
    /// (or `|ψ−⟩`).
    pub fn build(&self, input: Option<&LogicalQubit>) -> Result<PureState> {
        self.validate()?;
        let first = match (self.kind, input) {
            (ResourceKind::Standard, None) => ket_of(Label::Plus),
            (ResourceKind::Standard, Some(q)) => q.ket()?,
            (ResourceKind::Dfs, None) => singlet_pair(),
            (ResourceKind::Dfs, Some(q)) => encode_dual_rail(q)?,
        };
        let block = match self.kind {
            ResourceKind::Standard => ket_of(Label::Plus),
            ResourceKind::Dfs => singlet_pair(),
        };
        let mut state = first;
        for _ in 1..self.n_effective {
            state = state.tensor(&block);
        }
        let cz = controlled_phase();
        for &[a, b] in &self.cz_edges {
            state = state.apply(&cz, &[a, b])?;
        }
        for (q, p) in &self.local_corrections {
            state = state.apply(&p.matrix(), &[*q])?;
        }
        Ok(state)
    }
}

fn ket_of(label: Label) -> PureState {
    PureState::new(label.ket().to_vec()).expect("label kets are normalized")
}

/// `|ψ−⟩ = (|01⟩ − |10⟩)/√2`
pub fn singlet_pair() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(vec![ZERO, c(h, 0.0), c(-h, 0.0), ZERO]).expect("normalized literal")
}

/// Code words `|0_E⟩ = |01⟩`, `|1_E⟩ = −|10⟩` as 4-dimensional vectors.
pub fn code_words() -> [[Complex64; 4]; 2] {
    [
        [ZERO, c(1.0, 0.0), ZERO, ZERO],
        [ZERO, ZERO, c(-1.0, 0.0), ZERO],
    ]
}

/// `μ|0_E⟩ + ν|1_E⟩ = μ|01⟩ − ν|10⟩`
pub fn encode_dual_rail(q: &LogicalQubit) -> Result<PureState> {
    PureState::new(vec![ZERO, q.mu, -q.nu, ZERO])
}

pub fn build_standard_cluster(n: usize, input: Option<&LogicalQubit>) -> Result<PureState> {
    ResourceSpec::standard(n)?.build(input)
}

pub fn build_dfs_cluster(m: usize, input: Option<&LogicalQubit>) -> Result<PureState> {
    ResourceSpec::dfs(m)?.build(input)
}

/// `½(|0101⟩ − |0110⟩ − |1001⟩ − |1010⟩)` on `1a 1b 2a 2b`, written out
/// amplitude by amplitude.
pub fn dfs_transfer_state_literal() -> PureState {
    let mut amps = vec![ZERO; 16];
    amps[0b0101] = c(0.5, 0.0);
    amps[0b0110] = c(-0.5, 0.0);
    amps[0b1001] = c(-0.5, 0.0);
    amps[0b1010] = c(-0.5, 0.0);
    PureState::new(amps).expect("normalized literal")
}

/// `σ_x σ_z`, the per-qubit rotation taking the linear cluster to the DFS one.
fn xz() -> ComplexMatrix {
    &pauli_x() * &pauli_z()
}

/// Four-qubit linear cluster, defined as the state that `σ_xσ_z` on `1b` and
/// `2b` maps onto the DFS literal. Since `(σ_xσ_z)⁻¹ = −σ_xσ_z`, the inverse
/// rotation is the same operation up to a global sign per qubit.
pub fn linear_cluster() -> PureState {
    let inverse = xz().scale_real(-1.0);
    dfs_transfer_state_literal()
        .apply(&inverse, &[1])
        .and_then(|s| s.apply(&inverse, &[3]))
        .expect("four-qubit literal")
}

/// Applies `σ_xσ_z` to qubits `1b` (1) and `2b` (3).
pub fn dfs_from_linear_cluster(linear: &PureState) -> Result<PureState> {
    if linear.n_qubits() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: linear.n_qubits(),
        });
    }
    linear.apply(&xz(), &[1])?.apply(&xz(), &[3])
}

/// Projects `1b` and `2a` onto `|+⟩`, renormalizes and keeps `(1a, 2b)`.
pub fn standard_from_projection(rho4: &DensityMatrix) -> Result<DensityMatrix> {
    let (reduced, prob) = project_out(rho4, &[(1, Label::Plus.ket()), (2, Label::Plus.ket())])?;
    if prob < 1e-12 {
        return Err(Error::VanishingProbability(prob));
    }
    DensityMatrix::from_unnormalized(reduced)
}

/// Contracts each listed qubit with `⟨v|·|v⟩` and traces it out.
///
/// Returns the unnormalized operator on the remaining qubits (original order)
/// and its trace, the probability of the joint projection.
pub fn project_out(
    rho: &DensityMatrix,
    projections: &[(usize, [Complex64; 2])],
) -> Result<(ComplexMatrix, f64)> {
    let n = rho.n_qubits();
    let qubits: Vec<usize> = projections.iter().map(|(q, _)| *q).collect();
    crate::qcore::matrix::check_indices(&qubits, n)?;
    if qubits.len() >= n {
        return Err(Error::EmptyKeep);
    }
    let mut bra_op = ComplexMatrix::identity(1);
    for (_, v) in projections {
        let row = ComplexMatrix::from_row_major(1, 2, vec![v[0].conj(), v[1].conj()])?;
        bra_op = bra_op.kron(&row);
    }
    let keep: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
    // reorder so measured qubits lead, then contract the leading block
    let order: Vec<usize> = qubits.iter().chain(keep.iter()).copied().collect();
    let permuted = permute_qubits(rho.matrix(), &order, n);
    let left = bra_op.kron(&ComplexMatrix::identity(1 << keep.len()));
    let reduced = &(&left * &permuted) * &left.adjoint();
    let prob = reduced.trace().re;
    Ok((reduced, prob.max(0.0)))
}

/// Reorders tensor factors so that new qubit `k` is old qubit `order[k]`.
pub(crate) fn permute_qubits(m: &ComplexMatrix, order: &[usize], n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let map = |new_index: usize| -> usize {
        let mut old = 0usize;
        for (k, &q) in order.iter().enumerate() {
            let bit = (new_index >> (n - 1 - k)) & 1;
            old |= bit << (n - 1 - q);
        }
        old
    };
    let lookup: Vec<usize> = (0..dim).map(map).collect();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for col in 0..dim {
            out.set(r, col, m.get(lookup[r], lookup[col]));
        }
    }
    out
}

/// Reduced state of the remaining qubits after tracing `qubits` out.
pub fn trace_out(rho: &DensityMatrix, qubits: &[usize]) -> Result<DensityMatrix> {
    let keep: Vec<usize> = (0..rho.n_qubits()).filter(|q| !qubits.contains(q)).collect();
    partial_trace(rho, &keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{state_fidelity, PureState};

    fn fid(a: &PureState, b: &PureState) -> f64 {
        a.inner(b).norm_sqr()
    }

    #[test]
    fn singlet_amplitudes() {
        let s = singlet_pair();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [0.0, h, -h, 0.0];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
        assert!((s.amplitude(0b10) - c(-h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_qubit_standard_cluster() {
        let s = build_standard_cluster(2, None).unwrap();
        for (i, sign) in [(0, 1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
            assert!((s.amplitude(i) - c(0.5 * sign, 0.0)).norm() < 1e-15);
        }
        let zero_in = LogicalQubit::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let s = build_standard_cluster(2, Some(&zero_in)).unwrap();
        let zero_plus = ket_of(Label::Zero).tensor(&ket_of(Label::Plus));
        assert!((fid(&s, &zero_plus) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn three_qubit_cluster_stabilizers() {
        let s = build_standard_cluster(3, None).unwrap().to_density();
        let id = ComplexMatrix::identity(2);
        let (x, z) = (pauli_x(), pauli_z());
        let stabilizers = [
            x.kron(&z).kron(&id),
            z.kron(&x).kron(&z),
            id.kron(&z).kron(&x),
        ];
        for g in &stabilizers {
            assert!((s.expectation(g).re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn dfs_cluster_matches_literal() {
        let built = build_dfs_cluster(2, None).unwrap();
        let literal = dfs_transfer_state_literal();
        for k in 0..16 {
            assert!((built.amplitude(k) - literal.amplitude(k)).norm() < 1e-15, "index {k}");
        }
    }

    #[test]
    fn dfs_cluster_with_zero_input() {
        let zero_in = LogicalQubit::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let s = build_dfs_cluster(2, Some(&zero_in)).unwrap();
        let expected = PureState::from_bits("01").unwrap().tensor(&singlet_pair());
        assert!((fid(&s, &expected) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn too_short_chains() {
        assert!(build_standard_cluster(1, None).is_err());
        assert!(build_dfs_cluster(1, None).is_err());
    }

    #[test]
    fn linear_cluster_closed_form() {
        // ½(|0000⟩ + |0011⟩ + |1100⟩ − |1111⟩)
        let lin = linear_cluster();
        let mut amps = vec![ZERO; 16];
        amps[0b0000] = c(0.5, 0.0);
        amps[0b0011] = c(0.5, 0.0);
        amps[0b1100] = c(0.5, 0.0);
        amps[0b1111] = c(-0.5, 0.0);
        let expected = PureState::new(amps).unwrap();
        assert!((fid(&lin, &expected) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_cluster_is_a_graph_state_up_to_hadamards() {
        // chain CZ on |++++⟩, Hadamard on the end qubits
        let chain = build_standard_cluster(4, None).unwrap();
        let h = crate::qcore::hadamard();
        let rotated = chain.apply(&h, &[0]).unwrap().apply(&h, &[3]).unwrap();
        assert!((fid(&rotated, &linear_cluster()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_routes_agree() {
        let via_linear = dfs_from_linear_cluster(&linear_cluster()).unwrap();
        let built = build_dfs_cluster(2, None).unwrap();
        assert!((fid(&via_linear, &built) - 1.0).abs() < 1e-12);
        // twice: (σxσz)² = −I per qubit
        let twice = dfs_from_linear_cluster(&via_linear).unwrap();
        assert!((fid(&twice, &linear_cluster()) - 1.0).abs() < 1e-12);
        let basis = dfs_from_linear_cluster(&PureState::from_bits("0000").unwrap()).unwrap();
        assert!((basis.amplitude(0b0101).norm() - 1.0).abs() < 1e-15);
        assert!(dfs_from_linear_cluster(&singlet_pair()).is_err());
    }

    #[test]
    fn projection_to_standard_cluster() {
        let rho = standard_from_projection(&linear_cluster().to_density()).unwrap();
        let target = build_standard_cluster(2, None).unwrap().to_density();
        assert!((state_fidelity(&rho, &target).unwrap() - 1.0).abs() < 1e-12);

        let plus4 = (0..3).fold(ket_of(Label::Plus), |s, _| s.tensor(&ket_of(Label::Plus)));
        let rho = standard_from_projection(&plus4.to_density()).unwrap();
        let pp = ket_of(Label::Plus).tensor(&ket_of(Label::Plus)).to_density();
        assert!(rho.matrix().max_abs_diff(pp.matrix()) < 1e-14);

        let (reduced, prob) = project_out(
            &PureState::from_bits("0101").unwrap().to_density(),
            &[(1, Label::Plus.ket()), (2, Label::Plus.ket())],
        )
        .unwrap();
        assert!((prob - 0.25).abs() < 1e-15);
        assert!((reduced.get(0b01, 0b01).re - 0.25).abs() < 1e-15);

        // |−⟩ on 1b is orthogonal to ⟨+|
        let minus = ket_of(Label::Zero)
            .tensor(&ket_of(Label::Minus))
            .tensor(&ket_of(Label::Zero))
            .tensor(&ket_of(Label::Zero));
        assert!(standard_from_projection(&minus.to_density()).is_err());
    }

    #[test]
    fn spec_validation() {
        let mut spec = ResourceSpec::dfs(2).unwrap();
        assert_eq!(spec.physical_qubits(), 4);
        assert_eq!(spec.cz_edges, vec![[0, 2]]);
        spec.cz_edges.push([1, 3]);
        assert!(spec.validate().is_err());
        let json = serde_json::to_string(&ResourceSpec::dfs(2).unwrap()).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"dfs","n_effective":2,"cz_edges":[[0,2]],"local_corrections":[]}"#
        );
        let with_corr: ResourceSpec = serde_json::from_str(
            r#"{"kind":"standard","n_effective":4,"cz_edges":[[0,1],[1,2],[2,3]],"local_corrections":[[1,"XZ"]]}"#,
        )
        .unwrap();
        assert_eq!(with_corr.local_corrections[0].1.as_str(), "XZ");
        assert!(PauliProduct::parse("XQ").is_err());
    }
}
