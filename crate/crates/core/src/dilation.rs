//! Stinespring isometries built from Kraus lists, environment representations
//! of covariance groups, and SU(2) generators on the environment.

use crate::channel::completeness_defect;
use crate::error::{Error, Result};
use crate::matcore::{
    c, frob_dist_unchecked, hermitian_eigen, kron, lstsq, mat_exp_hermitian, partial_trace_env,
    validate_density, CMat, C64, DEFAULT_TOL, HERMITIAN_TOL, ONE,
};
use crate::pauli::{multiplication_table, single_qubit_group, Pauli, PauliString};

/// Unitarity tolerance for solved representation matrices.
pub const UNITARITY_TOL: f64 = 1e-9;

/// `V : H_S → H_S ⊗ H_E` with `V†V = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    v: CMat,
    dim_s: usize,
    dim_e: usize,
}

impl Isometry {
    pub fn new(v: CMat, dim_s: usize, dim_e: usize) -> Result<Self> {
        if v.shape() != (dim_s * dim_e, dim_s) {
            return Err(Error::DimensionMismatch {
                op: "Isometry::new",
                detail: format!(
                    "expected {}x{dim_s}, got {}x{}",
                    dim_s * dim_e,
                    v.rows(),
                    v.cols()
                ),
            });
        }
        let defect = v.isometry_defect();
        if defect > DEFAULT_TOL {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self { v, dim_s, dim_e })
    }

    pub fn matrix(&self) -> &CMat {
        &self.v
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    /// `Tr_E[V ρ V†]`.
    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        validate_density(rho, self.dim_s, DEFAULT_TOL)?;
        let big = self.v.matmul(rho).matmul(&self.v.adjoint());
        partial_trace_env(&big, self.dim_s, self.dim_e)
    }

    /// `(I ⊗ W) V` for a unitary `W` on the environment.
    pub fn rotated(&self, w: &CMat) -> Result<Self> {
        if w.shape() != (self.dim_e, self.dim_e) {
            return Err(Error::DimensionMismatch {
                op: "Isometry::rotated",
                detail: format!("environment unitary must be {0}x{0}", self.dim_e),
            });
        }
        let v = kron(&CMat::identity(self.dim_s), w).matmul(&self.v);
        Self::new(v, self.dim_s, self.dim_e)
    }

    /// Kraus operators `K_j = (I ⊗ <e_j|) V`.
    pub fn kraus_ops(&self) -> Vec<CMat> {
        (0..self.dim_e)
            .map(|j| {
                CMat::from_fn(self.dim_s, self.dim_s, |s, col| {
                    self.v[(s * self.dim_e + j, col)]
                })
            })
            .collect()
    }
}

/// `V|φ> = Σ_j phase_j K_j|φ> ⊗ |e_j>`, with `|e_1> = |1…1>` first.
pub fn dilation_from_kraus(kraus: &[CMat], phases: Option<&[C64]>) -> Result<Isometry> {
    let dim_s = kraus.first().map_or(0, CMat::rows);
    if dim_s == 0 || kraus.iter().any(|k| k.shape() != (dim_s, dim_s)) {
        return Err(Error::DimensionMismatch {
            op: "dilation_from_kraus",
            detail: "Kraus operators must share one square shape".into(),
        });
    }
    let dim_e = kraus.len();
    let ones = vec![ONE; dim_e];
    let phases = phases.unwrap_or(&ones);
    if phases.len() != dim_e {
        return Err(Error::DimensionMismatch {
            op: "dilation_from_kraus",
            detail: format!("{} phases for {dim_e} Kraus operators", phases.len()),
        });
    }
    if let Some(z) = phases.iter().find(|z| (z.norm() - 1.0).abs() > HERMITIAN_TOL) {
        return Err(Error::InvalidConfig(format!("phase {z} is not unimodular")));
    }
    let defect = completeness_defect(kraus);
    if defect > DEFAULT_TOL {
        return Err(Error::NotTracePreserving { defect });
    }
    let v = CMat::from_fn(dim_s * dim_e, dim_s, |row, col| {
        let (s, j) = (row / dim_e, row % dim_e);
        phases[j] * kraus[j][(s, col)]
    });
    Isometry::new(v, dim_s, dim_e)
}

pub fn channel_of_isometry(v: &Isometry, rho: &CMat) -> Result<CMat> {
    v.apply(rho)
}

/// Labeled unitary matrices on a common space.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRep {
    labels: Vec<String>,
    mats: Vec<CMat>,
    space_dim: usize,
}

impl GroupRep {
    pub fn new(labels: Vec<String>, mats: Vec<CMat>) -> Result<Self> {
        if labels.len() != mats.len() || mats.is_empty() {
            return Err(Error::DimensionMismatch {
                op: "GroupRep::new",
                detail: format!("{} labels for {} matrices", labels.len(), mats.len()),
            });
        }
        let space_dim = mats[0].rows();
        if let Some(m) = mats.iter().find(|m| m.shape() != (space_dim, space_dim)) {
            return Err(Error::DimensionMismatch {
                op: "GroupRep::new",
                detail: format!("matrix of shape {:?} in a {space_dim}-dim rep", m.shape()),
            });
        }
        for (label, m) in labels.iter().zip(&mats) {
            let defect = m.unitarity_defect();
            if defect > UNITARITY_TOL {
                return Err(Error::ResidualTooLarge {
                    what: format!("unitarity of rep matrix {label}"),
                    residual: defect,
                    tol: UNITARITY_TOL,
                });
            }
        }
        Ok(Self {
            labels,
            mats,
            space_dim,
        })
    }

    /// `π_S(g) = g` on the 16-element single-qubit Pauli group.
    pub fn pauli_defining() -> Self {
        let group = single_qubit_group();
        Self {
            labels: group.iter().map(ToString::to_string).collect(),
            mats: group.iter().map(PauliString::to_matrix).collect(),
            space_dim: 2,
        }
    }

    /// `exp(iθ r·σ)` for `θ ∈ {0.3, 1.1, 2.7}` about x, y, z and two oblique axes.
    pub fn su2_samples() -> Self {
        let mut labels = Vec::new();
        let mut mats = Vec::new();
        for (name, axis) in su2_sample_axes() {
            let gen = axis_dot_sigma(axis);
            for theta in [0.3, 1.1, 2.7] {
                labels.push(format!("{name}({theta})"));
                // exp(iθ n·σ) = exp(-i (n·σ)(-θ))
                mats.push(mat_exp_hermitian(&gen, -theta).expect("n·σ is Hermitian"));
            }
        }
        Self {
            labels,
            mats,
            space_dim: 2,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&CMat> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| &self.mats[k])
    }

    /// Labels parsed as Pauli strings, with the multiplication table.
    fn pauli_table(&self) -> Result<Vec<Vec<usize>>> {
        let elements = self
            .labels
            .iter()
            .map(|l| l.parse::<PauliString>())
            .collect::<Result<Vec<_>>>()?;
        multiplication_table(&elements).ok_or_else(|| {
            Error::InvalidConfig("labels are not closed under Pauli multiplication".into())
        })
    }

    /// `max ‖π(g)π(h) - π(gh)‖_F` over the labeled Pauli multiplication table.
    pub fn law_defect(&self) -> Result<f64> {
        let table = self.pauli_table()?;
        let mut worst: f64 = 0.0;
        for (a, row) in table.iter().enumerate() {
            for (b, &ab) in row.iter().enumerate() {
                let prod = self.mats[a].matmul(&self.mats[b]);
                worst = worst.max(frob_dist_unchecked(&prod, &self.mats[ab]));
            }
        }
        Ok(worst)
    }

    /// Like [`law_defect`](Self::law_defect) but up to a unimodular phase per product.
    pub fn projective_law_defect(&self) -> Result<f64> {
        let table = self.pauli_table()?;
        let d = self.space_dim as f64;
        let mut worst: f64 = 0.0;
        for (a, row) in table.iter().enumerate() {
            for (b, &ab) in row.iter().enumerate() {
                let prod = self.mats[a].matmul(&self.mats[b]);
                let target = &self.mats[ab];
                let overlap = target.adjoint().matmul(&prod).trace() / d;
                let phase = if overlap.norm() > 0.0 {
                    overlap / overlap.norm()
                } else {
                    ONE
                };
                worst = worst.max(frob_dist_unchecked(&prod, &target.scale(phase)));
            }
        }
        Ok(worst)
    }
}

fn su2_sample_axes() -> [(&'static str, [f64; 3]); 5] {
    let s3 = 1.0 / 3f64.sqrt();
    let n = (1.0f64 + 4.0 + 0.25).sqrt();
    [
        ("x", [1.0, 0.0, 0.0]),
        ("y", [0.0, 1.0, 0.0]),
        ("z", [0.0, 0.0, 1.0]),
        ("n1", [s3, s3, s3]),
        ("n2", [1.0 / n, -2.0 / n, 0.5 / n]),
    ]
}

/// `r·σ`.
pub fn axis_dot_sigma(r: [f64; 3]) -> CMat {
    let [x, y, z] = r;
    &(&Pauli::X.matrix().scale_re(x) + &Pauli::Y.matrix().scale_re(y))
        + &Pauli::Z.matrix().scale_re(z)
}

/// Solved environment representation with per-element diagnostics.
#[derive(Clone, Debug)]
pub struct EnvRepSolution {
    pub rep: GroupRep,
    /// `‖(π_S(g) ⊗ π_E(g)) V - V π_S(g)‖_F` per element.
    pub residuals: Vec<f64>,
    /// `‖π_E(g)†π_E(g) - I‖_F` per element.
    pub unitarity_defects: Vec<f64>,
}

impl EnvRepSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.unitarity_defects.iter().copied().fold(0.0, f64::max)
    }
}

/// Solves `(π_S(g) ⊗ X) V = V π_S(g)` for each `g` by least squares.
///
/// A rank-deficient system means the dilation is not minimal.
pub fn solve_env_rep(v: &Isometry, sys_rep: &GroupRep) -> Result<EnvRepSolution> {
    solve_env_rep_with_tol(v, sys_rep, DEFAULT_TOL)
}

pub fn solve_env_rep_with_tol(v: &Isometry, sys_rep: &GroupRep, tol: f64) -> Result<EnvRepSolution> {
    let (ds, de) = (v.dim_s, v.dim_e);
    if sys_rep.space_dim() != ds {
        return Err(Error::DimensionMismatch {
            op: "solve_env_rep",
            detail: format!("system rep acts on {} dims, isometry on {ds}", sys_rep.space_dim()),
        });
    }
    let vm = &v.v;
    let mut mats = Vec::with_capacity(sys_rep.len());
    let mut residuals = Vec::with_capacity(sys_rep.len());
    let mut unitarity_defects = Vec::with_capacity(sys_rep.len());
    for (label, pi_s) in sys_rep.labels().iter().zip(sys_rep.mats()) {
        // Unknown X[e, e'] at index e*de + e'; one equation per (s, e, col).
        let mut a = CMat::zeros(ds * de * ds, de * de);
        let rhs_mat = vm.matmul(pi_s);
        let mut rhs = Vec::with_capacity(ds * de * ds);
        for s in 0..ds {
            for e in 0..de {
                for col in 0..ds {
                    let row = (s * de + e) * ds + col;
                    for ep in 0..de {
                        let coef: C64 = (0..ds).map(|sp| pi_s[(s, sp)] * vm[(sp * de + ep, col)]).sum();
                        a[(row, e * de + ep)] = coef;
                    }
                    rhs.push(rhs_mat[(s * de + e, col)]);
                }
            }
        }
        let sol = lstsq(&a, &rhs)?;
        let x = CMat::from_vec(de, de, sol.x);
        let residual = frob_dist_unchecked(&kron(pi_s, &x).matmul(vm), &rhs_mat);
        if residual > tol {
            return Err(Error::ResidualTooLarge {
                what: format!("environment rep for {label}"),
                residual,
                tol,
            });
        }
        let defect = x.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(Error::ResidualTooLarge {
                what: format!("unitarity of environment rep for {label}"),
                residual: defect,
                tol: UNITARITY_TOL,
            });
        }
        mats.push(x);
        residuals.push(residual);
        unitarity_defects.push(defect);
    }
    Ok(EnvRepSolution {
        rep: GroupRep::new(sys_rep.labels().to_vec(), mats)?,
        residuals,
        unitarity_defects,
    })
}

/// Generators `J_x, J_y, J_z` of an su(2) representation on the environment.
#[derive(Clone, Debug, PartialEq)]
pub struct SU2Generators {
    pub jx: CMat,
    pub jy: CMat,
    pub jz: CMat,
}

impl SU2Generators {
    pub fn as_array(&self) -> [&CMat; 3] {
        [&self.jx, &self.jy, &self.jz]
    }

    /// `r·J`.
    pub fn dot(&self, r: [f64; 3]) -> CMat {
        &(&self.jx.scale_re(r[0]) + &self.jy.scale_re(r[1])) + &self.jz.scale_re(r[2])
    }

    /// `max ‖[J_a, J_b] - 2i J_c‖_F` over cyclic `(a, b, c)`.
    pub fn commutation_defect(&self) -> f64 {
        let j = self.as_array();
        (0..3)
            .map(|a| {
                let (b, cc) = ((a + 1) % 3, (a + 2) % 3);
                frob_dist_unchecked(&j[a].commutator(j[b]), &j[cc].scale(c(0.0, 2.0)))
            })
            .fold(0.0, f64::max)
    }

    /// `μ_E(θ, r) = exp(iθ r·J)`.
    pub fn group_element(&self, theta: f64, r: [f64; 3]) -> Result<CMat> {
        mat_exp_hermitian(&self.dot(r), -theta)
    }
}

/// Solves `(I ⊗ J_a) V = V σ_a - (σ_a ⊗ I) V` for `a = x, y, z`.
///
/// Returns the generators and the largest residual.
pub fn solve_su2_generators(v: &Isometry) -> Result<(SU2Generators, f64)> {
    if v.dim_s != 2 {
        return Err(Error::DimensionMismatch {
            op: "solve_su2_generators",
            detail: format!("system must be a qubit, got dimension {}", v.dim_s),
        });
    }
    let (ds, de) = (v.dim_s, v.dim_e);
    let vm = &v.v;
    // Coefficient matrix is the same for every axis.
    let mut a = CMat::zeros(ds * de * ds, de * de);
    for s in 0..ds {
        for e in 0..de {
            for col in 0..ds {
                let row = (s * de + e) * ds + col;
                for ep in 0..de {
                    a[(row, e * de + ep)] = vm[(s * de + ep, col)];
                }
            }
        }
    }
    let mut out = Vec::with_capacity(3);
    let mut worst: f64 = 0.0;
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let sigma = p.matrix();
        let target = &vm.matmul(&sigma) - &kron(&sigma, &CMat::identity(de)).matmul(vm);
        let rhs: Vec<C64> = (0..ds * de)
            .flat_map(|row| (0..ds).map(move |col| (row, col)))
            .map(|(row, col)| target[(row, col)])
            .collect();
        let sol = lstsq(&a, &rhs)?;
        let j = CMat::from_vec(de, de, sol.x);
        let residual = frob_dist_unchecked(&kron(&CMat::identity(ds), &j).matmul(vm), &target);
        if residual > DEFAULT_TOL {
            return Err(Error::ResidualTooLarge {
                what: format!("su(2) generator J{}", p.letter().to_ascii_lowercase()),
                residual,
                tol: DEFAULT_TOL,
            });
        }
        // The square system always solves; a covariant structure needs Hermitian J.
        let herm = j.hermiticity_defect();
        if herm > DEFAULT_TOL {
            return Err(Error::ResidualTooLarge {
                what: format!("Hermiticity of J{}", p.letter().to_ascii_lowercase()),
                residual: herm,
                tol: DEFAULT_TOL,
            });
        }
        worst = worst.max(residual);
        out.push(j);
    }
    let jz = out.pop().expect("three generators");
    let jy = out.pop().expect("three generators");
    let jx = out.pop().expect("three generators");
    Ok((SU2Generators { jx, jy, jz }, worst))
}

/// Outcome of a strong-conservation check.
#[derive(Clone, Debug, PartialEq)]
pub struct StrongConservation {
    pub conserved: bool,
    /// `max_j ‖[J, K_j]‖_F`.
    pub max_commutator: f64,
    /// `‖V J - (J ⊗ I) V‖_F`, computed only when conserved.
    pub isometry_residual: Option<f64>,
}

/// Tests `[J, K_j] = 0` for every Kraus operator.
pub fn check_strong_conservation(kraus: &[CMat], j: &CMat) -> Result<StrongConservation> {
    if kraus.iter().any(|k| k.shape() != j.shape()) {
        return Err(Error::DimensionMismatch {
            op: "check_strong_conservation",
            detail: "observable and Kraus operators must share one shape".into(),
        });
    }
    let max_commutator = kraus
        .iter()
        .map(|k| j.commutator(k).frob_norm())
        .fold(0.0, f64::max);
    let conserved = max_commutator <= HERMITIAN_TOL;
    let isometry_residual = if conserved {
        let v = dilation_from_kraus(kraus, None)?;
        let lhs = v.matrix().matmul(j);
        let rhs = kron(j, &CMat::identity(v.dim_e())).matmul(v.matrix());
        Some(frob_dist_unchecked(&lhs, &rhs))
    } else {
        None
    };
    Ok(StrongConservation {
        conserved,
        max_commutator,
        isometry_residual,
    })
}

/// Simultaneously diagonalizes a commuting unitary representation.
///
/// Returns one character vector `χ_k(g) = <v_k|π(g)|v_k>` per joint eigenvector.
pub fn characters(rep: &GroupRep) -> Result<Vec<Vec<C64>>> {
    let mats = rep.mats();
    let mut worst: f64 = 0.0;
    for a in mats {
        for b in mats {
            worst = worst.max(a.commutator(b).frob_norm());
        }
    }
    if worst > DEFAULT_TOL {
        return Err(Error::NonCommuting { norm: worst });
    }
    let d = rep.space_dim();
    // Generic Hermitian combination of the real and imaginary parts.
    let mut h = CMat::zeros(d, d);
    for (k, m) in mats.iter().enumerate() {
        let w1 = ((k as f64 + 1.0) * 0.754_877_666_2).fract() + 0.1;
        let w2 = ((k as f64 + 1.0) * 0.569_840_290_9).fract() + 0.1;
        let herm = (m + &m.adjoint()).scale_re(0.5 * w1);
        let anti = (m - &m.adjoint()).scale(c(0.0, -0.5 * w2));
        h = &(&h + &herm) + &anti;
    }
    let eig = hermitian_eigen(&h)?;
    Ok((0..d)
        .map(|k| {
            let vk = eig.vectors.column(k);
            mats.iter()
                .map(|m| {
                    let mv = m.apply(&vk);
                    vk.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<C64>()
                })
                .collect()
        })
        .collect())
}
