//! Single-qubit Pauli channels, their Kraus/Choi/Bloch views, covariance
//! checks, and Pauli Liouvillians with their closed-form semigroups.

use serde::{Deserialize, Serialize};

use crate::dilation::GroupRep;
use crate::error::{Error, Result};
use crate::matcore::{
    c, frob_dist_unchecked, kron, re, validate_density, CMat, DEFAULT_TOL, ONE,
};
use crate::pauli::Pauli;

/// Tolerance on the probability simplex.
pub const PROB_TOL: f64 = 1e-12;

/// `σ_I, σ_x, σ_y, σ_z`.
pub fn sigma(alpha: usize) -> CMat {
    Pauli::ALL[alpha].matrix()
}

/// Any linear map on 2×2 operators.
pub trait QubitMap {
    fn map_operator(&self, m: &CMat) -> CMat;
}

/// `φ[ρ] = Σ_α p_α σ_α ρ σ_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    p: [f64; 4],
}

impl PauliChannel {
    /// Fails unless every `p_α ≥ -1e-12` and `Σ p_α = 1` within `1e-12`.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        Self::with_tolerance(p, PROB_TOL)
    }

    pub(crate) fn with_tolerance(p: [f64; 4], tol: f64) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidProbabilities(format!("non-finite entry in {p:?}")));
        }
        if let Some(x) = p.iter().find(|&&x| x < -tol) {
            return Err(Error::InvalidProbabilities(format!("negative probability {x}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::InvalidProbabilities(format!("probabilities sum to {sum}")));
        }
        Ok(Self { p })
    }

    pub fn identity() -> Self {
        Self {
            p: [1.0, 0.0, 0.0, 0.0],
        }
    }

    /// `(1-p) ρ + p σ_z ρ σ_z`.
    pub fn phase_damping(p: f64) -> Result<Self> {
        Self::new([1.0 - p, 0.0, 0.0, p])
    }

    /// `(1-p) ρ + (p/3) Σ_i σ_i ρ σ_i`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new([1.0 - p, p / 3.0, p / 3.0, p / 3.0])
    }

    /// Channel with the given Bloch scalings `(λ_x, λ_y, λ_z)`.
    pub fn from_bloch_scaling(lambda: [f64; 3], tol: f64) -> Result<Self> {
        let [lx, ly, lz] = lambda;
        Self::with_tolerance(
            [
                0.25 * (1.0 + lx + ly + lz),
                0.25 * (1.0 + lx - ly - lz),
                0.25 * (1.0 - lx + ly - lz),
                0.25 * (1.0 - lx - ly + lz),
            ],
            tol,
        )
    }

    /// `(p_I, p_x, p_y, p_z)`.
    pub fn probabilities(&self) -> [f64; 4] {
        self.p
    }

    /// Applies the channel to a density matrix.
    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        validate_density(rho, 2, DEFAULT_TOL)?;
        Ok(self.map_operator(rho))
    }

    /// `K_α = √p_α σ_α` in the order `(I, x, y, z)`, omitting zero weights.
    pub fn kraus_ops(&self) -> Vec<CMat> {
        self.p
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(alpha, &p)| sigma(alpha).scale_re(p.sqrt()))
            .collect()
    }

    /// All four `√p_α σ_α`, zero weights included.
    pub fn kraus_ops_full(&self) -> [CMat; 4] {
        [0, 1, 2, 3].map(|alpha| sigma(alpha).scale_re(self.p[alpha].max(0.0).sqrt()))
    }

    /// `C = Σ_ij E_ij ⊗ φ[E_ij]`.
    pub fn choi(&self) -> CMat {
        choi_of(self)
    }

    /// `(λ_x, λ_y, λ_z)` with `λ_x = p_I + p_x - p_y - p_z` and cyclic.
    pub fn bloch_scaling(&self) -> [f64; 3] {
        let [pi, px, py, pz] = self.p;
        [pi + px - py - pz, pi - px + py - pz, pi - px - py + pz]
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &PauliChannel) -> PauliChannel {
        let a = self.bloch_scaling();
        let b = other.bloch_scaling();
        // Products of valid scalings stay valid; only rounding can leak.
        PauliChannel::from_bloch_scaling([a[0] * b[0], a[1] * b[1], a[2] * b[2]], 1e-9)
            .expect("composition of Pauli channels is a Pauli channel")
    }

    /// Max-norm distance between probability vectors.
    pub fn distance(&self, other: &PauliChannel) -> f64 {
        self.p
            .iter()
            .zip(other.p.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl QubitMap for PauliChannel {
    fn map_operator(&self, m: &CMat) -> CMat {
        self.p
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .fold(CMat::zeros(2, 2), |acc, (alpha, &p)| {
                let s = sigma(alpha);
                &acc + &s.matmul(m).matmul(&s).scale_re(p)
            })
    }
}

/// Channel given by an arbitrary list of Kraus operators.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    ops: Vec<CMat>,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMat>) -> Result<Self> {
        let dim = ops.first().map_or(0, CMat::rows);
        if dim == 0 || ops.iter().any(|k| k.shape() != (dim, dim)) {
            return Err(Error::DimensionMismatch {
                op: "KrausChannel::new",
                detail: "Kraus operators must share one square shape".into(),
            });
        }
        let defect = completeness_defect(&ops);
        if defect > DEFAULT_TOL {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(Self { ops })
    }

    /// `{|0><0| + √(1-γ)|1><1|, √γ |0><1|}`, the standard non-Pauli example.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        // Basis order (|1>, |0>): |0> is index 1.
        let k0 = CMat::diag(&[re((1.0 - gamma).sqrt()), ONE]);
        let mut k1 = CMat::zeros(2, 2);
        k1[(1, 0)] = re(gamma.sqrt());
        Self::new(vec![k0, k1])
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }
}

impl QubitMap for KrausChannel {
    fn map_operator(&self, m: &CMat) -> CMat {
        self.ops.iter().fold(CMat::zeros(m.rows(), m.cols()), |acc, k| {
            &acc + &k.matmul(m).matmul(&k.adjoint())
        })
    }
}

/// `‖Σ K†K - I‖_F`.
pub fn completeness_defect(ops: &[CMat]) -> f64 {
    let dim = ops.first().map_or(1, CMat::rows);
    let sum = ops
        .iter()
        .fold(CMat::zeros(dim, dim), |acc, k| &acc + &k.adjoint().matmul(k));
    frob_dist_unchecked(&sum, &CMat::identity(dim))
}

/// Choi matrix `Σ_ij E_ij ⊗ φ[E_ij]` of a qubit map.
pub fn choi_of(map: &dyn QubitMap) -> CMat {
    let mut out = CMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = CMat::zeros(2, 2);
            e[(i, j)] = ONE;
            out = &out + &kron(&e, &map.map_operator(&e));
        }
    }
    out
}

/// Real 3-vector parametrizing `ρ = ½(I + r·σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn to_density(self) -> CMat {
        let [x, y, z] = self.0;
        CMat::from_rows(&[
            &[re(0.5 * (1.0 + z)), c(0.5 * x, -0.5 * y)],
            &[c(0.5 * x, 0.5 * y), re(0.5 * (1.0 - z))],
        ])
    }

    /// `r_i = Tr(σ_i ρ)`.
    pub fn from_density(rho: &CMat) -> Self {
        let comp = |alpha: usize| sigma(alpha).matmul(rho).trace().re;
        BlochVector([comp(1), comp(2), comp(3)])
    }

    pub fn norm(self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Outcome of a covariance check.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceReport {
    pub covariant: bool,
    pub max_residual: f64,
}

/// Tests `φ[π(g) X π(g)†] = π(g) φ[X] π(g)†` over every group element and the
/// Hermitian basis `{I, σ_x, σ_y, σ_z}`.
pub fn check_covariance(map: &dyn QubitMap, rep: &GroupRep) -> CovarianceReport {
    let mut max_residual: f64 = 0.0;
    for u in rep.mats() {
        let ud = u.adjoint();
        for alpha in 0..4 {
            let x = sigma(alpha);
            let lhs = map.map_operator(&u.matmul(&x).matmul(&ud));
            let rhs = u.matmul(&map.map_operator(&x)).matmul(&ud);
            max_residual = max_residual.max(frob_dist_unchecked(&lhs, &rhs));
        }
    }
    CovarianceReport {
        covariant: max_residual <= DEFAULT_TOL,
        max_residual,
    }
}

/// `L[ρ] = Σ_i γ_i (σ_i ρ σ_i - ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliLiouvillian {
    gamma: [f64; 3],
}

impl PauliLiouvillian {
    pub fn new(gamma: [f64; 3]) -> Result<Self> {
        if gamma.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "decay rates must be finite and non-negative, got {gamma:?}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn dephasing(gamma: f64) -> Result<Self> {
        Self::new([0.0, 0.0, gamma])
    }

    pub fn depolarizing(gamma: f64) -> Result<Self> {
        Self::new([gamma; 3])
    }

    pub fn rates(&self) -> [f64; 3] {
        self.gamma
    }

    /// `L[ρ]` for any 2×2 operator.
    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        if rho.shape() != (2, 2) {
            return Err(Error::DimensionMismatch {
                op: "PauliLiouvillian::apply",
                detail: format!("expected 2x2, got {}x{}", rho.rows(), rho.cols()),
            });
        }
        Ok(self
            .gamma
            .iter()
            .enumerate()
            .fold(CMat::zeros(2, 2), |acc, (i, &g)| {
                let s = sigma(i + 1);
                &acc + &(&s.matmul(rho).matmul(&s) - rho).scale_re(g)
            }))
    }

    /// Decay rates of the Bloch components, `2 Σ_{j≠i} γ_j`.
    pub fn bloch_decay_rates(&self) -> [f64; 3] {
        let total: f64 = self.gamma.iter().sum();
        [0, 1, 2].map(|i| 2.0 * (total - self.gamma[i]))
    }

    /// `exp(L t)` as a Pauli channel, `λ_i(t) = exp(-2 Σ_{j≠i} γ_j t)`.
    pub fn semigroup_channel(&self, t: f64) -> Result<PauliChannel> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        let lambda = self.bloch_decay_rates().map(|r| (-r * t).exp());
        PauliChannel::from_bloch_scaling(lambda, PROB_TOL)
    }
}
