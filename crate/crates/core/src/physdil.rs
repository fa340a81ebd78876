//! Physical dilations `U(t) = exp(-iHt)` with a pure environment state:
//! builders, Pauli-channel fitting, piecewise schedules, Krylov subspaces and
//! the symmetry demonstrations built on them.

use crate::channel::{sigma, PauliChannel, QubitMap};
use crate::dilation::{solve_env_rep, GroupRep, Isometry, SU2Generators};
use crate::error::{Error, Result};
use crate::matcore::{
    basis_ket, c, frob_dist_unchecked, inner, kron, kron_vec, mat_exp_hermitian, partial_trace_env, re,
    unit_vector, vec_norm, CMat, C64, DEFAULT_TOL, HERMITIAN_TOL, ONE, ZERO,
};
use crate::pauli::{pauli_basis_expand, pauli_commutant, Pauli, PauliString};

/// Gram-Schmidt acceptance threshold for Krylov vectors.
pub const KRYLOV_TOL: f64 = 1e-10;

/// Hermitian `H` on system ⊗ environment plus an initial environment state.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalDilation {
    h: CMat,
    psi_e: Vec<C64>,
    dim_s: usize,
    dim_e: usize,
}

impl PhysicalDilation {
    pub fn new(h: CMat, psi_e: Vec<C64>, dim_s: usize) -> Result<Self> {
        let dim_e = psi_e.len();
        if !h.is_square() || h.rows() != dim_s * dim_e || dim_e == 0 {
            return Err(Error::DimensionMismatch {
                op: "PhysicalDilation::new",
                detail: format!(
                    "H is {}x{}, system {dim_s} x environment {dim_e}",
                    h.rows(),
                    h.cols()
                ),
            });
        }
        let defect = h.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let norm = vec_norm(&psi_e);
        if (norm - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::InvalidConfig(format!(
                "environment state has norm {norm}"
            )));
        }
        Ok(Self {
            h,
            psi_e,
            dim_s,
            dim_e,
        })
    }

    /// `H = Σ c_k P_k` on one system qubit; `psi_label` names the environment state.
    pub fn from_terms(terms: &[(PauliString, f64)], psi_label: &str) -> Result<Self> {
        let psi = basis_ket(psi_label)?;
        let n = psi_label.len() + 1;
        let dim = 1 << n;
        let mut h = CMat::zeros(dim, dim);
        for (p, coef) in terms {
            if p.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    op: "PhysicalDilation::from_terms",
                    detail: format!("term {p} does not act on {n} qubits"),
                });
            }
            h = &h + &p.to_matrix().scale_re(*coef);
        }
        Self::new(h, psi, 2)
    }

    /// `H = σ_z ⊗ σ_x`, `|ψ_E> = |1>`.
    pub fn phase_damping() -> Self {
        Self::from_terms(&[(pstr("ZX"), 1.0)], "1").expect("valid builder")
    }

    /// `H = XIX + YXI + ZXX`, `|ψ_E> = |11>`.
    pub fn depolarizing() -> Self {
        Self::generic([1.0, 1.0, 1.0])
    }

    /// `H = a₁ XIX + a₂ YXI + a₃ ZXX`, `|ψ_E> = |11>`.
    pub fn generic(a: [f64; 3]) -> Self {
        let terms: Vec<(PauliString, f64)> = GENERIC_STRINGS
            .iter()
            .zip(a)
            .map(|(s, coef)| (pstr(s), coef))
            .collect();
        Self::from_terms(&terms, "11").expect("valid builder")
    }

    pub fn h(&self) -> &CMat {
        &self.h
    }

    pub fn psi_e(&self) -> &[C64] {
        &self.psi_e
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    /// Same environment state, different Hamiltonian.
    pub fn with_hamiltonian(&self, h: CMat) -> Result<Self> {
        Self::new(h, self.psi_e.clone(), self.dim_s)
    }

    /// Same Hamiltonian, different environment state.
    pub fn with_psi_e(&self, psi_e: Vec<C64>) -> Result<Self> {
        Self::new(self.h.clone(), psi_e, self.dim_s)
    }

    pub fn unitary(&self, t: f64) -> Result<CMat> {
        check_time(t)?;
        mat_exp_hermitian(&self.h, t)
    }

    /// `V(t) = U(t)(· ⊗ |ψ_E>)`.
    pub fn isometry_at(&self, t: f64) -> Result<Isometry> {
        isometry_from_unitary(&self.unitary(t)?, &self.psi_e, self.dim_s)
    }

    /// The induced map at time `t`.
    pub fn map_at(&self, t: f64) -> Result<IsometryMap> {
        Ok(IsometryMap(self.isometry_at(t)?))
    }

    /// Fitted Pauli channel at `t`; no leakage check.
    pub fn fit_at(&self, t: f64) -> Result<PauliFit> {
        fit_pauli_channel(&self.map_at(t)?)
    }

    /// Fitted Pauli channel at `t`, failing on leakage above `1e-10`.
    pub fn channel_at_time(&self, t: f64) -> Result<PauliFit> {
        self.channel_at_time_with_tol(t, DEFAULT_TOL)
    }

    pub fn channel_at_time_with_tol(&self, t: f64, tol: f64) -> Result<PauliFit> {
        let fit = self.fit_at(t)?;
        if fit.leakage > tol {
            return Err(Error::NonPauliDynamics {
                leakage: fit.leakage,
                tol,
            });
        }
        Ok(fit)
    }

    /// Evolves under `f_k H` on each schedule interval and fits at every knot.
    pub fn replay(&self, schedule: &Schedule) -> Result<Vec<(f64, PauliFit)>> {
        let mut u = CMat::identity(self.h.rows());
        let mut out = Vec::with_capacity(schedule.knots.len() + 1);
        out.push((0.0, fit_from_unitary(&u, &self.psi_e, self.dim_s)?));
        for k in 0..schedule.knots.len() {
            let (t0, f) = schedule.knots[k];
            let t1 = schedule.knot_end(k);
            u = mat_exp_hermitian(&self.h, f * (t1 - t0))?.matmul(&u);
            out.push((t1, fit_from_unitary(&u, &self.psi_e, self.dim_s)?));
        }
        Ok(out)
    }
}

/// Strings of the generic builder in coefficient order.
pub const GENERIC_STRINGS: [&str; 3] = ["XIX", "YXI", "ZXX"];

fn pstr(s: &str) -> PauliString {
    s.parse().expect("literal Pauli string")
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

fn isometry_from_unitary(u: &CMat, psi_e: &[C64], dim_s: usize) -> Result<Isometry> {
    let cols: Vec<Vec<C64>> = (0..dim_s)
        .map(|s| u.apply(&kron_vec(&unit_vector(dim_s, s), psi_e)))
        .collect();
    Isometry::new(CMat::from_columns(&cols), dim_s, psi_e.len())
}

fn fit_from_unitary(u: &CMat, psi_e: &[C64], dim_s: usize) -> Result<PauliFit> {
    fit_pauli_channel(&IsometryMap(isometry_from_unitary(u, psi_e, dim_s)?))
}

/// `X ↦ Tr_E[V X V†]` on arbitrary operators.
#[derive(Clone, Debug)]
pub struct IsometryMap(pub Isometry);

impl QubitMap for IsometryMap {
    fn map_operator(&self, m: &CMat) -> CMat {
        let v = self.0.matrix();
        let big = v.matmul(m).matmul(&v.adjoint());
        partial_trace_env(&big, self.0.dim_s(), self.0.dim_e()).expect("shapes agree")
    }
}

/// Pauli channel read off from a map's transfer matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliFit {
    /// `(p_I, p_x, p_y, p_z)` recovered from the diagonal; not clamped.
    pub probabilities: [f64; 4],
    /// `λ_i = Re R_ii`.
    pub lambda: [f64; 3],
    /// Norm of everything a Pauli channel's transfer matrix cannot hold.
    pub leakage: f64,
}

impl PauliFit {
    pub fn channel(&self) -> Result<PauliChannel> {
        PauliChannel::with_tolerance(self.probabilities, DEFAULT_TOL)
    }
}

/// `R_ab = ½ Tr(σ_a Φ(σ_b))`.
pub fn transfer_matrix(map: &dyn QubitMap) -> [[C64; 4]; 4] {
    let mut r = [[ZERO; 4]; 4];
    for (b, col) in (0..4).map(|b| (b, map.map_operator(&sigma(b)))) {
        for (a, row) in r.iter_mut().enumerate() {
            row[b] = sigma(a).matmul(&col).trace() * 0.5;
        }
    }
    r
}

pub fn fit_pauli_channel(map: &dyn QubitMap) -> Result<PauliFit> {
    let r = transfer_matrix(map);
    let mut leak = (r[0][0] - ONE).norm_sqr();
    for (a, row) in r.iter().enumerate() {
        for (b, z) in row.iter().enumerate() {
            leak += if a == b && a > 0 { z.im * z.im } else if a != b { z.norm_sqr() } else { 0.0 };
        }
    }
    let lambda = [r[1][1].re, r[2][2].re, r[3][3].re];
    let [lx, ly, lz] = lambda;
    Ok(PauliFit {
        probabilities: [
            0.25 * (1.0 + lx + ly + lz),
            0.25 * (1.0 + lx - ly - lz),
            0.25 * (1.0 - lx + ly - lz),
            0.25 * (1.0 - lx - ly + lz),
        ],
        lambda,
        leakage: leak.sqrt(),
    })
}

/// Piecewise-constant coupling: `f(t) = f_k` on `[t_k, t_{k+1})`, last interval ending at `end`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    knots: Vec<(f64, f64)>,
    end: f64,
}

impl Schedule {
    pub fn new(knots: Vec<(f64, f64)>, end: f64) -> Result<Self> {
        let first = knots.first().map(|k| k.0);
        if first != Some(0.0) {
            return Err(Error::InvalidConfig("schedule must start at t = 0".into()));
        }
        let mut times: Vec<f64> = knots.iter().map(|k| k.0).collect();
        times.push(end);
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig(
                "schedule times must be strictly increasing".into(),
            ));
        }
        if knots.iter().any(|k| !k.1.is_finite()) {
            return Err(Error::InvalidConfig("non-finite coupling".into()));
        }
        Ok(Self { knots, end })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn couplings(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.1).collect()
    }

    fn knot_end(&self, k: usize) -> f64 {
        self.knots.get(k + 1).map_or(self.end, |n| n.0)
    }

    /// `∫₀ᵗ f(s) ds`.
    pub fn integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &(t0, f)) in self.knots.iter().enumerate() {
            let t1 = self.knot_end(k);
            if t <= t0 {
                break;
            }
            acc += f * (t.min(t1) - t0);
        }
        acc
    }
}

/// Coupling schedule whose phase-damping evolution hits `p[k]` at `t = k·h`.
///
/// `cos(2Θ) = 1 - 2p` is inverted with branch tracking so `p` may touch 0 or 1.
pub fn schedule_for_target(p: &[f64], h: f64) -> Result<Schedule> {
    if p.len() < 2 || !(h > 0.0) {
        return Err(Error::InvalidConfig(
            "need at least two samples and a positive step".into(),
        ));
    }
    for (k, &x) in p.iter().enumerate() {
        if !(-HERMITIAN_TOL..=1.0 + HERMITIAN_TOL).contains(&x) {
            return Err(Error::TargetOutOfRange {
                t: k as f64 * h,
                value: x,
            });
        }
    }
    if p[0].abs() > HERMITIAN_TOL {
        return Err(Error::InvalidConfig(format!(
            "target must start at 0, got {}",
            p[0]
        )));
    }
    // Track 2Θ.
    let mut two_theta = vec![0.0f64; p.len()];
    for k in 1..p.len() {
        let phi = (1.0 - 2.0 * p[k].clamp(0.0, 1.0)).clamp(-1.0, 1.0).acos();
        let prev = two_theta[k - 1];
        let predicted = if k >= 2 {
            2.0 * prev - two_theta[k - 2]
        } else {
            prev
        };
        two_theta[k] = nearest_branch(phi, predicted);
    }
    let knots = (0..p.len() - 1)
        .map(|k| (k as f64 * h, 0.5 * (two_theta[k + 1] - two_theta[k]) / h))
        .collect();
    Schedule::new(knots, (p.len() - 1) as f64 * h)
}

/// The value `2πm ± φ` closest to `target`; ties go to the larger.
fn nearest_branch(phi: f64, target: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let m = (target / tau).round();
    let mut best = f64::NAN;
    let mut best_dist = f64::INFINITY;
    for dm in [-1.0, 0.0, 1.0] {
        for sign in [1.0, -1.0] {
            let cand = (m + dm) * tau + sign * phi;
            let dist = (cand - target).abs();
            if dist < best_dist - 1e-15 || ((dist - best_dist).abs() <= 1e-15 && cand > best) {
                best = cand;
                best_dist = dist;
            }
        }
    }
    best
}

/// Orthonormal basis of the span reached by `H` from `|s> ⊗ |ψ_E>`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrylovSubspace {
    basis: Vec<Vec<C64>>,
    ambient_dim: usize,
}

impl KrylovSubspace {
    /// The whole space with its standard basis.
    pub fn full(dim: usize) -> Self {
        Self {
            basis: (0..dim).map(|k| unit_vector(dim, k)).collect(),
            ambient_dim: dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMat {
        self.basis
            .iter()
            .fold(CMat::zeros(self.ambient_dim, self.ambient_dim), |acc, v| {
                &acc + &CMat::outer(v, v)
            })
    }

    /// `‖(I - P) H P‖_F`.
    pub fn invariance_defect(&self, h: &CMat) -> f64 {
        let p = self.projector();
        let q = &CMat::identity(self.ambient_dim) - &p;
        q.matmul(h).matmul(&p).frob_norm()
    }

    /// `‖(I - P) v‖`.
    pub fn distance_to(&self, v: &[C64]) -> f64 {
        let mut w = v.to_vec();
        for b in &self.basis {
            let proj = inner(b, &w);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
        }
        vec_norm(&w)
    }

    /// Adds `v` if it leaves the span; returns whether it was added.
    fn try_push(&mut self, v: &[C64]) -> bool {
        let norm = vec_norm(v);
        if norm <= KRYLOV_TOL {
            return false;
        }
        let mut w: Vec<C64> = v.iter().map(|z| z / norm).collect();
        // Two passes keep orthogonality at machine precision.
        for _ in 0..2 {
            for b in &self.basis {
                let proj = inner(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let rest = vec_norm(&w);
        if rest <= KRYLOV_TOL {
            return false;
        }
        w.iter_mut().for_each(|z| *z /= rest);
        self.basis.push(w);
        true
    }
}

pub fn krylov_subspace(pd: &PhysicalDilation) -> KrylovSubspace {
    let dim = pd.h.rows();
    let mut k = KrylovSubspace {
        basis: Vec::new(),
        ambient_dim: dim,
    };
    let mut frontier: Vec<Vec<C64>> = Vec::new();
    for s in 0..pd.dim_s {
        let v = kron_vec(&unit_vector(pd.dim_s, s), &pd.psi_e);
        if k.try_push(&v) {
            frontier.push(v);
        }
    }
    for _ in 0..dim {
        let mut next = Vec::new();
        for v in &frontier {
            let hv = pd.h.apply(v);
            if k.try_push(&hv) {
                next.push(hv);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    k
}

/// `‖P [sym, H] P‖_F` with `P` the projector onto `k`.
pub fn restricted_commutator_norm(pd: &PhysicalDilation, sym: &CMat, k: &KrylovSubspace) -> Result<f64> {
    if sym.shape() != pd.h.shape() || k.ambient_dim() != pd.h.rows() {
        return Err(Error::DimensionMismatch {
            op: "restricted_commutator_norm",
            detail: "operator, Hamiltonian and subspace must share one space".into(),
        });
    }
    let p = k.projector();
    Ok(p.matmul(&sym.commutator(&pd.h)).matmul(&p).frob_norm())
}

/// `H' = P H P + (I - P)`.
pub fn symmetrize_full(pd: &PhysicalDilation, k: &KrylovSubspace) -> Result<PhysicalDilation> {
    let defect = k.invariance_defect(&pd.h);
    if defect > DEFAULT_TOL {
        return Err(Error::NonInvariantSubspace { defect });
    }
    let p = k.projector();
    let q = &CMat::identity(p.rows()) - &p;
    let h = &p.matmul(&pd.h).matmul(&p) + &q;
    // Projector round-off can leave a tiny anti-Hermitian part.
    let h = (&h + &h.adjoint()).scale_re(0.5);
    pd.with_hamiltonian(h)
}

/// `σ_a ⊗ I + I ⊗ J_a` on system ⊗ environment.
pub fn su2_total_generators(j: &SU2Generators) -> [CMat; 3] {
    let de = j.jx.rows();
    let js = j.as_array();
    [0, 1, 2].map(|a| {
        &kron(&sigma(a + 1), &CMat::identity(de)) + &kron(&CMat::identity(2), js[a])
    })
}

/// The set `B = {π_S(g) ⊗ π_E(g)}` as phase-free Pauli strings.
///
/// Fails if some `π_E(g)` is not a multiple of a single Pauli string.
pub fn symmetry_strings(sys: &GroupRep, env: &GroupRep) -> Result<Vec<PauliString>> {
    let mut out: Vec<PauliString> = Vec::new();
    for (ms, me) in sys.mats().iter().zip(env.mats()) {
        let expansion = pauli_basis_expand(&kron(ms, me))?;
        if expansion.len() != 1 {
            return Err(Error::InvalidConfig(
                "environment representation is not a Pauli-string representation".into(),
            ));
        }
        let p = expansion.keys().next().expect("one term").unsigned();
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Terms of `H` outside the Pauli commutant of `b`.
pub fn commutant_violations(h: &CMat, b: &[PauliString]) -> Result<Vec<PauliString>> {
    let n = h.rows().trailing_zeros() as usize;
    let commutant = pauli_commutant(b, n)?;
    Ok(pauli_basis_expand(h)?
        .into_keys()
        .filter(|p| !commutant.contains(p))
        .collect())
}

/// `max_g ‖π_E(g)|ψ> - |ψ>‖`.
pub fn invariant_state_defect(env: &GroupRep, psi: &[C64]) -> f64 {
    env.mats()
        .iter()
        .map(|m| {
            let mv = m.apply(psi);
            vec_norm(&mv.iter().zip(psi).map(|(a, b)| a - b).collect::<Vec<_>>())
        })
        .fold(0.0, f64::max)
}

/// Comparison of a dilation with its rotating-phase variant `H + I ⊗ h_E`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotatingPhaseReport {
    /// `max |p_α - p_α^rot|` over the sampled times.
    pub max_probability_diff: f64,
    /// Per time, `max_g ‖π_rot(g) - e^{-i h_E t} π_E(g) e^{i h_E t}‖_F`; `None`
    /// where the base isometry is not minimal and no solve is attempted.
    pub rep_defects: Vec<(f64, Option<f64>)>,
}

impl RotatingPhaseReport {
    pub fn max_rep_defect(&self) -> f64 {
        self.rep_defects
            .iter()
            .filter_map(|(_, d)| *d)
            .fold(0.0, f64::max)
    }
}

pub fn rotating_phase_demo(pd: &PhysicalDilation, h_e: &CMat, times: &[f64]) -> Result<RotatingPhaseReport> {
    if h_e.shape() != (pd.dim_e, pd.dim_e) {
        return Err(Error::DimensionMismatch {
            op: "rotating_phase_demo",
            detail: format!("h_E must be {0}x{0}", pd.dim_e),
        });
    }
    let lift = kron(&CMat::identity(pd.dim_s), h_e);
    let norm = pd.h.commutator(&lift).frob_norm();
    if norm > HERMITIAN_TOL {
        return Err(Error::NonCommuting { norm });
    }
    let rot = pd.with_hamiltonian(&pd.h + &lift)?;
    let sys = GroupRep::pauli_defining();
    let mut max_probability_diff: f64 = 0.0;
    let mut rep_defects = Vec::with_capacity(times.len());
    for &t in times {
        let a = pd.fit_at(t)?;
        let b = rot.fit_at(t)?;
        for (x, y) in a.probabilities.iter().zip(b.probabilities) {
            max_probability_diff = max_probability_diff.max((x - y).abs());
        }
        let base = match solve_env_rep(&pd.isometry_at(t)?, &sys) {
            Ok(sol) => sol.rep,
            Err(Error::RankDeficient { .. }) => {
                rep_defects.push((t, None));
                continue;
            }
            Err(e) => return Err(e),
        };
        let rotated = solve_env_rep(&rot.isometry_at(t)?, &sys)?.rep;
        let w = mat_exp_hermitian(h_e, t)?;
        let wd = w.adjoint();
        let defect = base
            .mats()
            .iter()
            .zip(rotated.mats())
            .map(|(m, r)| frob_dist_unchecked(r, &w.matmul(m).matmul(&wd)))
            .fold(0.0, f64::max);
        rep_defects.push((t, Some(defect)));
    }
    Ok(RotatingPhaseReport {
        max_probability_diff,
        rep_defects,
    })
}

/// Phase damping `H = σ_z ⊗ σ_x` started from `|0>` instead of `|1>`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlternateStateReport {
    pub fit: PauliFit,
    /// `‖V(t) - Ṽ(t)‖_F` against the closed form.
    pub isometry_defect: f64,
    /// `max_g ‖π̃_E(g) - expected‖_F` with `I` on `I, z` and `-σ_z` on `x, y`.
    pub rep_defect: f64,
    /// `max_g ‖π̃_E(g)|0> - |0>‖`.
    pub invariance_defect: f64,
}

pub fn alternate_initial_state_demo(t: f64) -> Result<AlternateStateReport> {
    let pd = PhysicalDilation::phase_damping().with_psi_e(basis_ket("0")?)?;
    let v = pd.isometry_at(t)?;
    let fit = pd.channel_at_time(t)?;
    let (s, co) = t.sin_cos();
    let expected_v = CMat::from_rows(&[
        &[c(0.0, -s), ZERO],
        &[re(co), ZERO],
        &[ZERO, c(0.0, s)],
        &[ZERO, re(co)],
    ]);
    let isometry_defect = frob_dist_unchecked(v.matrix(), &expected_v);
    let rep = solve_env_rep(&v, &GroupRep::pauli_defining())?.rep;
    let minus_z = Pauli::Z.matrix().scale_re(-1.0);
    let rep_defect = rep
        .labels()
        .iter()
        .zip(rep.mats())
        .map(|(label, m)| {
            let expected = if label.ends_with('X') || label.ends_with('Y') {
                minus_z.clone()
            } else {
                CMat::identity(2)
            };
            frob_dist_unchecked(m, &expected)
        })
        .fold(0.0, f64::max);
    let invariance_defect = invariant_state_defect(&rep, pd.psi_e());
    Ok(AlternateStateReport {
        fit,
        isometry_defect,
        rep_defect,
        invariance_defect,
    })
}

/// The fixed verification grid: 25 points on `[0, 2π]`.
pub fn sample_times() -> Vec<f64> {
    let n = 25;
    (0..n)
        .map(|k| std::f64::consts::TAU * k as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{dilation_from_kraus, solve_su2_generators};
    use crate::matcore::{frob_dist, hermitian_eigen, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn phase_damping_law() {
        let pd = PhysicalDilation::phase_damping();
        for t in sample_times() {
            let fit = pd.channel_at_time(t).unwrap();
            let p = 0.5 * (1.0 - (2.0 * t).cos());
            assert!((fit.probabilities[3] - p).abs() < 1e-12, "t={t}");
            assert!(fit.probabilities[1].abs() < 1e-12);
        }
        let fit = pd.channel_at_time(PI / 4.0).unwrap();
        assert!((fit.probabilities[3] - 0.5).abs() < 1e-12);
        let fit = pd.channel_at_time(PI / 2.0).unwrap();
        assert!((fit.probabilities[3] - 1.0).abs() < 1e-12);
        assert!(pd.channel_at_time(-0.1).is_err());
    }

    #[test]
    fn phase_damping_isometry_matches_v_prime() {
        let pd = PhysicalDilation::phase_damping();
        let t: f64 = 0.4;
        let (s, co) = t.sin_cos();
        let expected = CMat::from_rows(&[
            &[re(co), ZERO],
            &[c(0.0, -s), ZERO],
            &[ZERO, re(co)],
            &[ZERO, c(0.0, s)],
        ]);
        assert!(frob_dist(pd.isometry_at(t).unwrap().matrix(), &expected).unwrap() < 1e-12);
    }

    #[test]
    fn depolarizing_law_and_isometry() {
        let pd = PhysicalDilation::depolarizing();
        let r3 = 3f64.sqrt();
        for t in sample_times() {
            let fit = pd.channel_at_time(t).unwrap();
            let p = 0.5 * (1.0 - (2.0 * r3 * t).cos());
            for i in 1..4 {
                assert!((fit.probabilities[i] - p / 3.0).abs() < 1e-12);
            }
        }
        let fit = pd.channel_at_time(PI / (2.0 * r3)).unwrap();
        assert!((fit.probabilities[0]).abs() < 1e-12);

        let t = 0.3;
        let p = (r3 * t).sin().powi(2);
        let ch = PauliChannel::depolarizing(p).unwrap();
        let vref = dilation_from_kraus(&ch.kraus_ops(), None).unwrap();
        // U(t)|11> carries -i on every jump column.
        let phases = [ONE, c(0.0, -1.0), c(0.0, -1.0), c(0.0, -1.0)];
        let vref_i = dilation_from_kraus(&ch.kraus_ops(), Some(&phases)).unwrap();
        let v = pd.isometry_at(t).unwrap();
        assert!(frob_dist(v.matrix(), vref_i.matrix()).unwrap() < 1e-12);
        assert!(frob_dist(v.matrix(), vref.matrix()).unwrap() > 0.1);
    }

    #[test]
    fn generic_law() {
        let a = [0.5, -0.3, 0.6];
        let xi: f64 = a.iter().map(|x| x * x).sum();
        let pd = PhysicalDilation::generic(a);
        for t in sample_times() {
            let fit = pd.channel_at_time(t).unwrap();
            let s2 = (xi.sqrt() * t).sin().powi(2);
            for i in 0..3 {
                assert!((fit.probabilities[i + 1] - a[i] * a[i] * s2 / xi).abs() < 1e-12);
            }
            assert!((fit.probabilities[0] - (1.0 - s2)).abs() < 1e-12);
        }
        let pd = PhysicalDilation::generic([0.0, 0.0, 0.7]);
        let fit = pd.channel_at_time(1.3).unwrap();
        assert!((fit.probabilities[3] - (0.7f64 * 1.3).sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        for pd in [
            PhysicalDilation::phase_damping(),
            PhysicalDilation::depolarizing(),
        ] {
            let fit = pd.channel_at_time(0.0).unwrap();
            assert_eq!(fit.channel().unwrap().probabilities()[0], 1.0);
        }
    }

    #[test]
    fn non_pauli_dynamics_flagged() {
        // σ_x ⊗ σ_x from |1> gives an amplitude-damping-like map.
        let pd = PhysicalDilation::from_terms(&[(pstr("XX"), 1.0), (pstr("YY"), 1.0)], "1").unwrap();
        assert!(matches!(
            pd.channel_at_time(0.5),
            Err(Error::NonPauliDynamics { .. })
        ));
    }

    #[test]
    fn rejects_bad_dilations() {
        assert!(PhysicalDilation::new(CMat::identity(4), vec![ONE, ONE], 2).is_err());
        let nh = CMat::from_fn(4, 4, |i, j| if i < j { ONE } else { ZERO });
        assert!(PhysicalDilation::new(nh, vec![ONE, ZERO], 2).is_err());
        assert!(PhysicalDilation::from_terms(&[(pstr("XIX"), 1.0)], "1").is_err());
    }

    #[test]
    fn schedule_targets() {
        let h = 0.01;
        let n = 400;
        let target: Vec<f64> = (0..=n).map(|k| 0.5 * (1.0 - (2.0 * k as f64 * h).cos())).collect();
        let sched = schedule_for_target(&target, h).unwrap();
        assert!(sched.couplings().iter().all(|f| (f - 1.0).abs() < 1e-9));

        let zero = vec![0.0; 50];
        let sched = schedule_for_target(&zero, h).unwrap();
        assert!(sched.couplings().iter().all(|f| *f == 0.0));

        let target: Vec<f64> = (0..=n).map(|k| (3.0 * k as f64 * h).sin().powi(2)).collect();
        let sched = schedule_for_target(&target, h).unwrap();
        assert!(sched.couplings().iter().all(|f| (f - 3.0).abs() < 1e-7));
        let replay = PhysicalDilation::phase_damping().replay(&sched).unwrap();
        for (k, (t, fit)) in replay.iter().enumerate() {
            assert!((t - k as f64 * h).abs() < 1e-12);
            assert!((fit.probabilities[3] - target[k]).abs() < 1e-6);
        }
        assert!((sched.integral(1.0) - 3.0).abs() < 1e-6);

        assert!(matches!(
            schedule_for_target(&[0.0, 1.2], h),
            Err(Error::TargetOutOfRange { .. })
        ));
        assert!(schedule_for_target(&[0.1, 0.2], h).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(vec![(0.1, 1.0)], 1.0).is_err());
        assert!(Schedule::new(vec![(0.0, 1.0), (0.5, 1.0)], 0.5).is_err());
        assert!(Schedule::new(vec![(0.0, 1.0)], 1.0).is_ok());
    }

    #[test]
    fn krylov_dimensions() {
        let dep = PhysicalDilation::depolarizing();
        let k = krylov_subspace(&dep);
        assert_eq!(k.dim(), 4);
        assert!(k.invariance_defect(dep.h()) < 1e-10);
        for label in ["011", "111"] {
            let v = basis_ket(label).unwrap();
            assert!(k.distance_to(&v) < 1e-12);
            assert!(k.distance_to(&dep.h().apply(&v)) < 1e-12);
        }
        assert_eq!(krylov_subspace(&PhysicalDilation::phase_damping()).dim(), 4);
        let zero = PhysicalDilation::new(CMat::zeros(4, 4), basis_ket("1").unwrap(), 2).unwrap();
        assert_eq!(krylov_subspace(&zero).dim(), 2);
    }

    fn dep_generators() -> SU2Generators {
        let ch = PauliChannel::depolarizing(0.3).unwrap();
        let v = dilation_from_kraus(&ch.kraus_ops(), None).unwrap();
        solve_su2_generators(&v).unwrap().0
    }

    #[test]
    fn restricted_su2_conservation() {
        let dep = PhysicalDilation::depolarizing();
        let k = krylov_subspace(&dep);
        let gens = su2_total_generators(&dep_generators());
        for g in &gens {
            assert!(restricted_commutator_norm(&dep, g, &k).unwrap() < 1e-10);
            // Not a full-space symmetry.
            assert!(g.commutator(dep.h()).frob_norm() > 1e-3);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = random_hermitian(8, &mut rng);
        assert!(restricted_commutator_norm(&dep, &r, &k).unwrap() > 1e-3);
    }

    #[test]
    fn full_symmetrization() {
        let dep = PhysicalDilation::depolarizing();
        let k = krylov_subspace(&dep);
        let sym = symmetrize_full(&dep, &k).unwrap();
        for t in sample_times() {
            let a = dep.channel_at_time(t).unwrap();
            let b = sym.channel_at_time(t).unwrap();
            for (x, y) in a.probabilities.iter().zip(b.probabilities) {
                assert!((x - y).abs() < 1e-9);
            }
        }
        for g in su2_total_generators(&dep_generators()) {
            assert!(g.commutator(sym.h()).frob_norm() < 1e-9);
        }
        let full = KrylovSubspace::full(8);
        let same = symmetrize_full(&dep, &full).unwrap();
        assert!(frob_dist(same.h(), dep.h()).unwrap() < 1e-12);

        let mut bad = KrylovSubspace::full(8);
        bad.basis.truncate(1);
        assert!(matches!(
            symmetrize_full(&dep, &bad),
            Err(Error::NonInvariantSubspace { .. })
        ));
    }

    #[test]
    fn symmetry_sets_and_commutant_membership() {
        let sys = GroupRep::pauli_defining();
        let pd = PhysicalDilation::phase_damping();
        let env = solve_env_rep(&pd.isometry_at(0.4).unwrap(), &sys).unwrap().rep;
        let b = symmetry_strings(&sys, &env).unwrap();
        let names: Vec<String> = b.iter().map(|p| p.letters()).collect();
        assert_eq!(names, ["II", "XZ", "YZ", "ZI"]);
        assert!(commutant_violations(pd.h(), &b).unwrap().is_empty());
        assert!(invariant_state_defect(&env, pd.psi_e()) < 1e-12);

        let dep = PhysicalDilation::depolarizing();
        let env = solve_env_rep(&dep.isometry_at(0.3).unwrap(), &sys).unwrap().rep;
        let b = symmetry_strings(&sys, &env).unwrap();
        assert!(commutant_violations(dep.h(), &b).unwrap().is_empty());
        let perturbed = dep.h() + &pstr("XII").to_matrix();
        assert_eq!(commutant_violations(&perturbed, &b).unwrap(), vec![pstr("XII")]);
        assert!(invariant_state_defect(&env, dep.psi_e()) < 1e-12);
        assert!(invariant_state_defect(&env, &basis_ket("10").unwrap()) > 1.0);
    }

    #[test]
    fn rotating_phase() {
        let pd = PhysicalDilation::phase_damping();
        let report = rotating_phase_demo(&pd, &Pauli::X.matrix(), &[0.0, 0.7, 1.9]).unwrap();
        assert!(report.max_probability_diff < 1e-10);
        assert_eq!(report.rep_defects[0], (0.0, None));
        assert!(report.max_rep_defect() < 1e-9);
        assert!(rotating_phase_demo(&pd, &Pauli::Z.matrix(), &[0.7]).is_err());
    }

    #[test]
    fn alternate_state() {
        let r = alternate_initial_state_demo(0.6).unwrap();
        assert!(r.isometry_defect < 1e-12);
        assert!(r.rep_defect < 1e-10);
        assert!(r.invariance_defect < 1e-10);
        assert!(r.fit.probabilities[1].abs() < 1e-12 && r.fit.probabilities[2].abs() < 1e-12);
    }

    #[test]
    fn su2_spectrum_via_generators() {
        let j = dep_generators();
        let eig = hermitian_eigen(&j.dot([0.0, 1.0, 0.0])).unwrap();
        assert!((eig.values[3] - 2.0).abs() < 1e-12);
    }
}
