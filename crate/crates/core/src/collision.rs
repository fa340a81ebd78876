//! Fast-collision simulation of Pauli semigroups with a fresh two-qubit ancilla
//! per collision.

use serde::{Deserialize, Serialize};

use crate::channel::{sigma, BlochVector, PauliLiouvillian};
use crate::dilation::Isometry;
use crate::error::{Error, Result};
use crate::matcore::{
    basis_ket, inner, kron, kron_vec, mat_exp_hermitian, partial_trace_env, trace_distance,
    unit_vector, validate_density, CMat, C64, DEFAULT_TOL,
};
use crate::pauli::PauliString;

/// Single-collision parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionConfig {
    pub a: [f64; 3],
    pub zeta: f64,
    pub dt: f64,
    pub n: usize,
}

impl CollisionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("weights a must be finite".into()));
        }
        if !(self.zeta >= 0.0) || !self.zeta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "zeta must be finite and non-negative, got {}",
                self.zeta
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("collision count n must be at least 1".into()));
        }
        Ok(())
    }

    /// `ν = √(ζ/Δt)`.
    pub fn nu_int(&self) -> f64 {
        (self.zeta / self.dt).sqrt()
    }

    /// `γ_i = ζ a_i²`.
    pub fn effective_rates(&self) -> [f64; 3] {
        self.a.map(|x| self.zeta * x * x)
    }

    pub fn liouvillian(&self) -> Result<PauliLiouvillian> {
        PauliLiouvillian::new(self.effective_rates())
    }

    pub fn with_dt(&self, dt: f64, n: usize) -> Self {
        Self { dt, n, ..*self }
    }
}

/// `B_x = I ⊗ σ_x`, `B_y = σ_x ⊗ I`, `B_z = σ_x ⊗ σ_x` with the ancilla in `|11>`.
#[derive(Clone, Debug, PartialEq)]
pub struct BathOperators {
    pub b: [CMat; 3],
    pub psi_e: Vec<C64>,
}

impl BathOperators {
    pub fn standard() -> Self {
        let b = ["IX", "XI", "XX"].map(|s| {
            s.parse::<PauliString>()
                .expect("literal Pauli string")
                .to_matrix()
        });
        Self {
            b,
            psi_e: basis_ket("11").expect("literal label"),
        }
    }

    /// `max_i |<ψ|B_i|ψ>|`.
    pub fn zero_mean_defect(&self) -> f64 {
        self.b
            .iter()
            .map(|b| inner(&self.psi_e, &b.apply(&self.psi_e)).norm())
            .fold(0.0, f64::max)
    }

    /// `c_ij = <ψ|B_i† B_j|ψ>`.
    pub fn correlations(&self) -> [[C64; 3]; 3] {
        let bpsi: Vec<Vec<C64>> = self.b.iter().map(|b| b.apply(&self.psi_e)).collect();
        let mut out = [[C64::new(0.0, 0.0); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = inner(&bpsi[i], &bpsi[j]);
            }
        }
        out
    }
}

/// `H_c = ν Σ a_i σ_i ⊗ B_i`.
pub fn collision_hamiltonian(cfg: &CollisionConfig) -> CMat {
    let bath = BathOperators::standard();
    let nu = cfg.nu_int();
    (0..3).fold(CMat::zeros(8, 8), |acc, i| {
        &acc + &kron(&sigma(i + 1), &bath.b[i]).scale_re(nu * cfg.a[i])
    })
}

/// One collision as an isometry, reused across steps.
#[derive(Clone, Debug)]
pub struct CollisionStep {
    v: Isometry,
}

impl CollisionStep {
    pub fn new(cfg: &CollisionConfig) -> Result<Self> {
        cfg.validate()?;
        let u = mat_exp_hermitian(&collision_hamiltonian(cfg), cfg.dt)?;
        let psi = BathOperators::standard().psi_e;
        let cols: Vec<Vec<C64>> = (0..2)
            .map(|s| u.apply(&kron_vec(&unit_vector(2, s), &psi)))
            .collect();
        Ok(Self {
            v: Isometry::new(CMat::from_columns(&cols), 2, 4)?,
        })
    }

    pub fn isometry(&self) -> &Isometry {
        &self.v
    }

    /// `Tr_E[U (ρ ⊗ |11><11|) U†]` without input validation.
    pub fn apply_unchecked(&self, rho: &CMat) -> CMat {
        let v = self.v.matrix();
        partial_trace_env(&v.matmul(rho).matmul(&v.adjoint()), 2, 4).expect("shapes agree")
    }
}

/// One exact collision applied to `rho`.
pub fn collision_map(cfg: &CollisionConfig, rho: &CMat) -> Result<CMat> {
    validate_density(rho, 2, DEFAULT_TOL)?;
    Ok(CollisionStep::new(cfg)?.apply_unchecked(rho))
}

/// `ρ + Δt²ν² Σ c_ij (L_j ρ L_i† - ½{L_i† L_j, ρ})` with `L_i = a_i σ_i`.
pub fn collision_map_expansion(cfg: &CollisionConfig, rho: &CMat) -> Result<CMat> {
    cfg.validate()?;
    validate_density(rho, 2, DEFAULT_TOL)?;
    let c = BathOperators::standard().correlations();
    let l: Vec<CMat> = (0..3).map(|i| sigma(i + 1).scale_re(cfg.a[i])).collect();
    let scale = cfg.dt * cfg.dt * cfg.nu_int().powi(2);
    let mut out = rho.clone();
    for i in 0..3 {
        for j in 0..3 {
            if c[i][j].norm() == 0.0 {
                continue;
            }
            let li_d = l[i].adjoint();
            let jump = l[j].matmul(rho).matmul(&li_d);
            let anti = li_d.matmul(&l[j]).anticommutator(rho).scale_re(0.5);
            out = &out + &(&jump - &anti).scale(c[i][j] * scale);
        }
    }
    Ok(out)
}

/// States at `t_k = k·Δt`, `k = 0..=n`, each collision with a fresh ancilla.
pub fn simulate_semigroup(cfg: &CollisionConfig, rho0: &CMat) -> Result<Vec<CMat>> {
    validate_density(rho0, 2, DEFAULT_TOL)?;
    let step = CollisionStep::new(cfg)?;
    let mut out = Vec::with_capacity(cfg.n + 1);
    out.push(rho0.clone());
    for k in 0..cfg.n {
        let next = step.apply_unchecked(&out[k]);
        out.push(next);
    }
    Ok(out)
}

/// Trajectory error against the exact semigroup for one `Δt`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    /// `(t, ½‖ρ_sim(t) - e^{Lt}ρ₀‖₁)` along the trajectory.
    pub errors: Vec<(f64, f64)>,
    pub max_error: f64,
}

/// Runs one trajectory per `Δt` up to `t_final` and compares with the semigroup
/// at rates `γ_i = ζ a_i²`.
pub fn convergence_report(
    cfg: &CollisionConfig,
    dts: &[f64],
    t_final: f64,
    rho0: &CMat,
) -> Result<Vec<ConvergenceRow>> {
    if dts.is_empty() || dts.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidConfig("dts must be non-empty and strictly decreasing".into()));
    }
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidConfig(format!("tFinal must be positive, got {t_final}")));
    }
    let lv = cfg.liouvillian()?;
    dts.iter()
        .map(|&dt| {
            let n = (t_final / dt).round() as usize;
            if n == 0 || ((n as f64) * dt - t_final).abs() > 1e-9 * t_final {
                return Err(Error::InvalidConfig(format!(
                    "dt = {dt} does not divide tFinal = {t_final}"
                )));
            }
            let traj = simulate_semigroup(&cfg.with_dt(dt, n), rho0)?;
            let errors = traj
                .iter()
                .enumerate()
                .map(|(k, rho)| {
                    let t = k as f64 * dt;
                    let exact = lv.semigroup_channel(t)?.apply(rho0)?;
                    Ok((t, trace_distance(rho, &exact)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let max_error = errors.iter().map(|e| e.1).fold(0.0, f64::max);
            Ok(ConvergenceRow {
                dt,
                errors,
                max_error,
            })
        })
        .collect()
}

/// `err(dt_k) / err(dt_{k+1})` for successive rows.
pub fn error_ratios(rows: &[ConvergenceRow]) -> Vec<f64> {
    rows.windows(2)
        .map(|w| w[0].max_error / w[1].max_error)
        .collect()
}

/// Rates `γ_i` recovered from log-linear fits of the Bloch components.
///
/// Each `ln|r_i(t)|` is fitted to a line of slope `-Λ_i`; then
/// `γ_x = (Λ_y + Λ_z - Λ_x)/4` and cyclic.
pub fn fit_rates(cfg: &CollisionConfig, rho0: &CMat) -> Result<[f64; 3]> {
    let traj = simulate_semigroup(cfg, rho0)?;
    let r0 = BlochVector::from_density(rho0).0;
    if r0.iter().any(|x| x.abs() < 1e-6) {
        return Err(Error::InvalidConfig(
            "initial Bloch vector needs all components non-zero".into(),
        ));
    }
    let mut big_lambda = [0.0; 3];
    for (i, slot) in big_lambda.iter_mut().enumerate() {
        let pts: Vec<(f64, f64)> = traj
            .iter()
            .enumerate()
            .map(|(k, rho)| (k as f64 * cfg.dt, BlochVector::from_density(rho).0[i]))
            .take_while(|(_, r)| r.abs() > 1e-12)
            .map(|(t, r)| (t, (r / r0[i]).abs().ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::InvalidConfig(
                "Bloch component decays too fast to fit".into(),
            ));
        }
        *slot = -slope(&pts);
    }
    let [lx, ly, lz] = big_lambda;
    Ok([
        0.25 * (ly + lz - lx),
        0.25 * (lx + lz - ly),
        0.25 * (lx + ly - lz),
    ])
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `ρ₀` with Bloch vector `(1, 1, 1)/√3`.
pub fn default_initial_state() -> CMat {
    let s = 1.0 / 3f64.sqrt();
    BlochVector([s, s, s]).to_density()
}
