//! The invariant suite behind `pauli-dilate verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{check_covariance, BlochVector, PauliChannel, PauliLiouvillian, QubitMap};
use crate::collision::{
    collision_hamiltonian, default_initial_state, simulate_semigroup, BathOperators,
    CollisionConfig,
};
use crate::dilation::{characters, dilation_from_kraus, solve_env_rep, GroupRep, Isometry};
use crate::error::Result;
use crate::matcore::{
    frob_dist_unchecked, haar_unitary, hermitian_eigen, kron, mat_exp_hermitian,
    partial_trace_env, random_density, random_hermitian, CMat, ONE,
};
use crate::pauli::{all_strings, multiplication_table, pauli_commutant, single_qubit_group};
use crate::physdil::{
    commutant_violations, invariant_state_defect, krylov_subspace, sample_times,
    schedule_for_target, symmetry_strings, PhysicalDilation,
};

/// One line of the suite.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tol: f64,
}

impl CheckResult {
    fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual <= tol,
            residual,
            tol,
        }
    }

    fn from_result(name: impl Into<String>, r: Result<f64>, tol: f64) -> Self {
        match r {
            Ok(x) => Self::new(name, x, tol),
            Err(_) => Self {
                name: name.into(),
                passed: false,
                residual: f64::INFINITY,
                tol,
            },
        }
    }
}

/// Symmetry family a dilation is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    PhaseDamping,
    /// Depolarizing and generic Pauli channels share one environment representation.
    Pauli3,
}

impl Family {
    /// Guess from the number of environment qubits.
    pub fn for_dilation(pd: &PhysicalDilation) -> Option<Self> {
        match pd.dim_e() {
            2 => Some(Self::PhaseDamping),
            4 => Some(Self::Pauli3),
            _ => None,
        }
    }

    /// Minimal Kraus dilation whose `π_E` fixes the symmetry.
    pub fn reference_isometry(self) -> Isometry {
        let kraus = match self {
            Family::PhaseDamping => {
                let full = PauliChannel::phase_damping(0.3)
                    .expect("valid p")
                    .kraus_ops_full();
                vec![full[0].clone(), full[3].clone()]
            }
            Family::Pauli3 => PauliChannel::new([0.4, 0.3, 0.2, 0.1])
                .expect("valid p")
                .kraus_ops()
                .to_vec(),
        };
        dilation_from_kraus(&kraus, None).expect("valid Kraus list")
    }

    pub fn env_rep(self) -> Result<GroupRep> {
        Ok(solve_env_rep(&self.reference_isometry(), &GroupRep::pauli_defining())?.rep)
    }
}

/// Commutant membership and invariant-state checks for one dilation.
pub fn dilation_checks(name: &str, pd: &PhysicalDilation, family: Family) -> Vec<CheckResult> {
    let sys = GroupRep::pauli_defining();
    let env = match family.env_rep() {
        Ok(env) => env,
        Err(_) => {
            return vec![CheckResult::from_result(
                format!("{name}: environment representation"),
                Err(crate::Error::InvalidConfig(String::new())),
                0.0,
            )]
        }
    };
    let membership = symmetry_strings(&sys, &env)
        .and_then(|b| commutant_violations(pd.h(), &b))
        .map(|v| v.len() as f64);
    vec![
        CheckResult::from_result(format!("{name}: H in Pauli commutant"), membership, 0.0),
        CheckResult::new(
            format!("{name}: pi_E(g) psiE = psiE"),
            invariant_state_defect(&env, pd.psi_e()),
            1e-10,
        ),
    ]
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn random_pauli_channel(rng: &mut ChaCha8Rng) -> PauliChannel {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    let s: f64 = w.iter().sum();
    PauliChannel::new(w.map(|x| x / s)).expect("normalized weights")
}

/// Runs every module invariant with the given seed.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    // matcore
    // Small-integer entries keep every product exact.
    let mats: Vec<CMat> = (0..3)
        .map(|_| {
            CMat::from_fn(2, 2, |_, _| {
                crate::matcore::c(rng.random_range(-4..=4) as f64, rng.random_range(-4..=4) as f64)
            })
        })
        .collect();
    let lhs = kron(&kron(&mats[0], &mats[1]), &mats[2]);
    let rhs = kron(&mats[0], &kron(&mats[1], &mats[2]));
    out.push(CheckResult::new("matcore: kron associativity", frob_dist_unchecked(&lhs, &rhs), 0.0));
    let a = random_hermitian(2, &mut rng);
    let b = random_density(4, &mut rng);
    let pt = partial_trace_env(&kron(&a, &b), 2, 4).map(|m| frob_dist_unchecked(&m, &a.scale(b.trace())));
    out.push(CheckResult::from_result("matcore: Tr_E(a kron b) = a Tr b", pt, 1e-12));
    let h = random_hermitian(8, &mut rng);
    let law = (|| {
        let (t1, t2) = (0.37, 0.81);
        let u = mat_exp_hermitian(&h, t1)?.matmul(&mat_exp_hermitian(&h, t2)?);
        Ok(frob_dist_unchecked(&u, &mat_exp_hermitian(&h, t1 + t2)?))
    })();
    out.push(CheckResult::from_result("matcore: exp group law", law, 1e-9));

    // pauli
    let group = single_qubit_group();
    let closed = multiplication_table(&group).is_some() && group.len() == 16;
    out.push(CheckResult::new("pauli: 16-element group closes", if closed { 0.0 } else { 1.0 }, 0.0));
    let two = all_strings(2);
    let mut disagreements = 0.0;
    for p in &two {
        for q in &two {
            let pm = p.to_matrix();
            let qm = q.to_matrix();
            let by_matrix = frob_dist_unchecked(&pm.matmul(&qm), &qm.matmul(&pm)) < 1e-12;
            if p.commutes(q).unwrap_or(!by_matrix) != by_matrix {
                disagreements += 1.0;
            }
        }
    }
    out.push(CheckResult::new("pauli: commutes agrees with matrices", disagreements, 0.0));
    let gens: Vec<_> = ["ZZZ", "XZI", "YIZ"].iter().map(|s| s.parse().expect("literal")).collect();
    let brute = all_strings(3)
        .into_iter()
        .filter(|p| {
            gens.iter().all(|g: &crate::PauliString| {
                let (a, b) = (p.to_matrix(), g.to_matrix());
                frob_dist_unchecked(&a.matmul(&b), &b.matmul(&a)) < 1e-12
            })
        })
        .count();
    let fast = pauli_commutant(&gens, 3).map(|c| c.len()).unwrap_or(0);
    out.push(CheckResult::new(
        "pauli: commutant matches brute force",
        (brute as f64 - fast as f64).abs() + (fast as f64 - 16.0).abs(),
        0.0,
    ));

    // channel
    let mut cptp: f64 = 0.0;
    for _ in 0..20 {
        let ch = random_pauli_channel(&mut rng);
        let kraus = ch.kraus_ops();
        cptp = cptp.max(crate::channel::completeness_defect(&kraus));
        let min_eig = hermitian_eigen(&ch.choi()).map(|e| e.values[0]).unwrap_or(-1.0);
        cptp = cptp.max((-min_eig).max(0.0));
        let rho = random_density(2, &mut rng);
        cptp = cptp.max((ch.map_operator(&rho).trace() - ONE).norm());
    }
    out.push(CheckResult::new("channel: Kraus completeness, Choi PSD, trace", cptp, 1e-12));
    let lv = PauliLiouvillian::new([0.3, 0.1, 0.5]).expect("valid rates");
    let semi = (|| {
        let a = lv.semigroup_channel(0.4)?.then(&lv.semigroup_channel(0.9)?);
        Ok(a.distance(&lv.semigroup_channel(1.3)?))
    })();
    out.push(CheckResult::from_result("channel: semigroup property", semi, 1e-10));
    let rho = random_density(2, &mut rng);
    let deriv = (|| {
        let l = lv.apply(&rho)?;
        let err = |h: f64| -> Result<f64> {
            let step = lv.semigroup_channel(h)?.map_operator(&rho);
            Ok(frob_dist_unchecked(&(&step - &rho).scale_re(1.0 / h), &l))
        };
        let (e1, e2) = (err(1e-3)?, err(5e-4)?);
        Ok((e1 / e2 - 2.0).abs())
    })();
    out.push(CheckResult::from_result("channel: derivative converges at first order", deriv, 0.05));
    let ch = random_pauli_channel(&mut rng);
    let r = BlochVector([0.3, -0.5, 0.6]);
    let lam = ch.bloch_scaling();
    let got = BlochVector::from_density(&ch.map_operator(&r.to_density())).0;
    out.push(CheckResult::new(
        "channel: Bloch scaling",
        max_of((0..3).map(|i| (got[i] - lam[i] * r.0[i]).abs())),
        1e-12,
    ));
    out.push(CheckResult::new(
        "channel: Pauli covariance",
        check_covariance(&ch, &GroupRep::pauli_defining()).max_residual,
        1e-10,
    ));

    // dilation
    let sys = GroupRep::pauli_defining();
    for (name, family) in [("phase damping", Family::PhaseDamping), ("generic", Family::Pauli3)] {
        let law = family.env_rep().and_then(|rep| rep.law_defect());
        out.push(CheckResult::from_result(format!("dilation: {name} pi_E closes exactly"), law, 1e-10));
    }
    let pd_env = Family::PhaseDamping.env_rep();
    let trivial = pd_env
        .as_ref()
        .map(|rep| frob_dist_unchecked(rep.get("+Z").expect("label"), &CMat::identity(2)))
        .map_err(Clone::clone);
    out.push(CheckResult::from_result("dilation: pi_E(sigma_z) = I (strong conservation)", trivial, 1e-10));
    let decomposition = pd_env.as_ref().map_err(Clone::clone).and_then(characters).map(|chars| {
        let mut signs: Vec<Vec<i64>> = chars
            .iter()
            .map(|c| c.iter().map(|z| z.re.round() as i64).collect())
            .collect();
        signs.sort();
        let sgn: Vec<i64> = sys
            .labels()
            .iter()
            .map(|l| if l.ends_with('X') || l.ends_with('Y') { -1 } else { 1 })
            .collect();
        if signs == vec![sgn, vec![1; 16]] {
            0.0
        } else {
            1.0
        }
    });
    out.push(CheckResult::from_result("dilation: pi_E = 1 + sgn_xy", decomposition, 0.0));
    let v = Family::Pauli3.reference_isometry();
    let w = haar_unitary(4, &mut rng);
    let conj = (|| {
        let base = solve_env_rep(&v, &sys)?.rep;
        let rotated = solve_env_rep(&v.rotated(&w)?, &sys)?.rep;
        Ok(max_of(base.mats().iter().zip(rotated.mats()).map(|(m, r)| {
            frob_dist_unchecked(r, &w.matmul(m).matmul(&w.adjoint()))
        })))
    })();
    out.push(CheckResult::from_result("dilation: rotated isometry gives W pi_E W^dag", conj, 1e-9));

    // physdil
    let builders = [
        ("phase damping", PhysicalDilation::phase_damping(), Family::PhaseDamping),
        ("depolarizing", PhysicalDilation::depolarizing(), Family::Pauli3),
        ("generic", PhysicalDilation::generic([0.5, -0.3, 0.6]), Family::Pauli3),
    ];
    for (name, pd, family) in &builders {
        out.extend(dilation_checks(&format!("physdil: {name}"), pd, *family));
        let validity = (|| {
            let mut worst: f64 = 0.0;
            for t in sample_times() {
                let fit = pd.fit_at(t)?;
                worst = worst.max(fit.leakage);
                let p = fit.probabilities;
                worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
                worst = worst.max(max_of(p.iter().map(|x| (-x).max(0.0))));
            }
            Ok(worst)
        })();
        out.push(CheckResult::from_result(format!("physdil: {name} channel valid on grid"), validity, 1e-10));
        let k = krylov_subspace(pd);
        let inv = k.invariance_defect(pd.h());
        let q = &CMat::identity(k.ambient_dim()) - &k.projector();
        let inv_perp = k.projector().matmul(pd.h()).matmul(&q).frob_norm();
        out.push(CheckResult::new(format!("physdil: {name} Krylov block structure"), inv.max(inv_perp), 1e-10));
    }
    let h = 0.01;
    let schedule = (|| {
        let mut worst: f64 = 0.0;
        for target in [
            (0..=300).map(|k| (3.0 * k as f64 * h).sin().powi(2)).collect::<Vec<_>>(),
            (0..=300).map(|k| 1.0 - (-(k as f64) * h).exp()).collect::<Vec<_>>(),
        ] {
            let sched = schedule_for_target(&target, h)?;
            let replay = PhysicalDilation::phase_damping().replay(&sched)?;
            worst = worst.max(max_of(replay.iter().zip(&target).map(|((_, f), p)| (f.probabilities[3] - p).abs())));
        }
        Ok(worst)
    })();
    out.push(CheckResult::from_result("physdil: schedule round trip", schedule, 1e-6));

    // collision
    let bath = BathOperators::standard();
    out.push(CheckResult::new("collision: zero-mean bath", bath.zero_mean_defect(), 0.0));
    let c = bath.correlations();
    let cdef = max_of((0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| {
        (c[i][j] - if i == j { ONE } else { crate::matcore::ZERO }).norm()
    }));
    out.push(CheckResult::new("collision: c_ij = delta_ij", cdef, 0.0));
    let cfg = CollisionConfig { a: [0.4, 0.8, 1.1], zeta: 1.0, dt: 0.05, n: 20 };
    let phys = simulate_semigroup(&cfg, &default_initial_state()).map(|traj| {
        max_of(traj.iter().map(|rho| {
            let tr = (rho.trace() - ONE).norm();
            let neg = hermitian_eigen(rho).map(|e| (-e.values[0]).max(0.0)).unwrap_or(1.0);
            tr.max(neg)
        }))
    });
    out.push(CheckResult::from_result("collision: trace and positivity", phys, 1e-12));
    let hc = collision_hamiltonian(&cfg);
    let in_commutant = Family::Pauli3
        .env_rep()
        .and_then(|env| symmetry_strings(&sys, &env))
        .and_then(|b| commutant_violations(&hc, &b))
        .map(|v| v.len() as f64);
    out.push(CheckResult::from_result("collision: H_c in Pauli commutant", in_commutant, 0.0));

    out
}
