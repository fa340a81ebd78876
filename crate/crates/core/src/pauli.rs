//! Pauli strings with exact phase bookkeeping, the single-qubit Pauli group,
//! Pauli-basis expansion and Pauli-commutant enumeration.
//!
//! Each factor is stored in symplectic form: bit `k` of `xs`/`zs` carries the
//! X/Z component of factor `k` (factor 0 is the leftmost tensor slot), with
//! `Y = (1, 1)`. Two strings commute iff the symplectic form
//! `Σ_k x_k z'_k + z_k x'_k` vanishes mod 2.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matcore::{c, kron, re, CMat, C64, ONE, ZERO};

/// Maximum number of tensor factors a string can carry.
pub const MAX_QUBITS: usize = 32;

/// Coefficients below this magnitude are dropped from Pauli expansions.
const EXPANSION_CUTOFF: f64 = 1e-14;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> CMat {
        match self {
            Pauli::I => CMat::identity(2),
            Pauli::X => CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
            Pauli::Y => CMat::from_rows(&[&[ZERO, c(0.0, -1.0)], &[c(0.0, 1.0), ZERO]]),
            Pauli::Z => CMat::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
        }
    }

    /// `self · other = i^k · result`.
    fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// Global phase `i^k`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    /// Group order used for labels: `+1, -1, +i, -i`.
    pub const ALL: [Phase; 4] = [Phase::PLUS, Phase::MINUS, Phase::PLUS_I, Phase::MINUS_I];

    pub fn from_power(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn value(self) -> C64 {
        match self.0 {
            0 => ONE,
            1 => c(0.0, 1.0),
            2 => re(-1.0),
            _ => c(0.0, -1.0),
        }
    }

    fn prefix(self) -> &'static str {
        match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.0 + rhs.0)
    }
}

/// Phased tensor product of single-qubit Pauli operators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    n: usize,
    xs: u32,
    zs: u32,
}

impl PauliString {
    pub fn new(phase: Phase, factors: &[Pauli]) -> Self {
        assert!(
            !factors.is_empty() && factors.len() <= MAX_QUBITS,
            "a Pauli string needs between 1 and {MAX_QUBITS} factors"
        );
        let (mut xs, mut zs) = (0u32, 0u32);
        for (k, p) in factors.iter().enumerate() {
            let (x, z) = p.bits();
            xs |= (x as u32) << k;
            zs |= (z as u32) << k;
        }
        Self {
            phase,
            n: factors.len(),
            xs,
            zs,
        }
    }

    pub fn from_factors(factors: &[Pauli]) -> Self {
        Self::new(Phase::PLUS, factors)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_factors(&vec![Pauli::I; n])
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn factor(&self, k: usize) -> Pauli {
        Pauli::from_bits((self.xs >> k) & 1 == 1, (self.zs >> k) & 1 == 1)
    }

    pub fn factors(&self) -> Vec<Pauli> {
        (0..self.n).map(|k| self.factor(k)).collect()
    }

    /// Same string with phase `+1`.
    pub fn unsigned(&self) -> Self {
        Self {
            phase: Phase::PLUS,
            ..self.clone()
        }
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        Self {
            phase,
            ..self.clone()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.xs == 0 && self.zs == 0
    }

    /// Letters without the phase prefix, e.g. `"ZXI"`.
    pub fn letters(&self) -> String {
        self.factors().into_iter().map(Pauli::letter).collect()
    }

    fn check_len(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                op,
                detail: format!("{} vs {} qubits", self.n, other.n),
            });
        }
        Ok(())
    }

    /// Group product `self · other` with exact phase.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other, "PauliString::multiply")?;
        let mut power = self.phase.0 + other.phase.0;
        let mut factors = Vec::with_capacity(self.n);
        for k in 0..self.n {
            let (p, f) = self.factor(k).product(other.factor(k));
            power += p;
            factors.push(f);
        }
        Ok(Self::new(Phase::from_power(power), &factors))
    }

    /// `true` iff `self · other = other · self`.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other, "PauliString::commutes")?;
        Ok(self.commutes_unchecked(other))
    }

    fn commutes_unchecked(&self, other: &Self) -> bool {
        let form = (self.xs & other.zs) ^ (self.zs & other.xs);
        form.count_ones() % 2 == 0
    }

    /// Dense matrix under the descending basis convention.
    pub fn to_matrix(&self) -> CMat {
        let mut m = self.factor(0).matrix();
        for k in 1..self.n {
            m = kron(&m, &self.factor(k).matrix());
        }
        m.scale(self.phase.value())
    }
}

impl Ord for PauliString {
    /// Lexicographic over factors (`I < X < Y < Z`, leftmost first), then phase.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.factors().cmp(&other.factors()))
            .then_with(|| self.phase.cmp(&other.phase))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase.prefix(), self.letters())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Grammar: `("+" | "-" | "+i" | "-i")? [IXYZ]+`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::ParsePauli {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::PLUS, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS, rest)
        } else {
            (Phase::PLUS, s)
        };
        if body.is_empty() {
            return Err(err("no factors"));
        }
        if body.len() > MAX_QUBITS {
            return Err(err("too many factors"));
        }
        let factors = body
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(err(&format!("unexpected character {ch:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::new(phase, &factors))
    }
}

/// All 4ⁿ phase-free strings on `n` qubits in lexicographic order.
pub fn all_strings(n: usize) -> Vec<PauliString> {
    assert!(n >= 1 && n <= 12, "enumeration limited to 12 qubits");
    (0..4usize.pow(n as u32))
        .map(|code| {
            let factors: Vec<Pauli> = (0..n)
                .map(|k| Pauli::ALL[(code >> (2 * (n - 1 - k))) & 3])
                .collect();
            PauliString::from_factors(&factors)
        })
        .collect()
}

/// The 16 elements `{±σ_α, ±iσ_α}` of the single-qubit Pauli group, ordered
/// by `α ∈ (I, X, Y, Z)` and then by phase `(+1, -1, +i, -i)`.
pub fn single_qubit_group() -> Vec<PauliString> {
    Pauli::ALL
        .iter()
        .flat_map(|&p| Phase::ALL.iter().map(move |&ph| PauliString::new(ph, &[p])))
        .collect()
}

/// Multiplication table: `table[a][b]` is the index of `elements[a]·elements[b]`.
///
/// Returns `None` if the set is not closed under multiplication.
pub fn multiplication_table(elements: &[PauliString]) -> Option<Vec<Vec<usize>>> {
    elements
        .iter()
        .map(|a| {
            elements
                .iter()
                .map(|b| {
                    let prod = a.multiply(b).ok()?;
                    elements.iter().position(|e| *e == prod)
                })
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

/// Coefficients `c_P = Tr(P† m) / 2ⁿ` over phase-free strings; entries with
/// `|c_P| < 1e-14` are omitted.
pub fn pauli_basis_expand(m: &CMat) -> Result<BTreeMap<PauliString, C64>> {
    let dim = m.rows();
    if !m.is_square() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::DimensionMismatch {
            op: "pauli_basis_expand",
            detail: format!("expected a 2^n x 2^n matrix, got {}x{}", m.rows(), m.cols()),
        });
    }
    let n = dim.trailing_zeros() as usize;
    let mut out = BTreeMap::new();
    for p in all_strings(n) {
        let pm = p.to_matrix();
        // Tr(P† m) = Σ_ij conj(P_ij) m_ij
        let coef: C64 = pm
            .as_slice()
            .iter()
            .zip(m.as_slice())
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            / dim as f64;
        if coef.norm() >= EXPANSION_CUTOFF {
            out.insert(p, coef);
        }
    }
    Ok(out)
}

/// Rebuilds `Σ c_P P` from an expansion.
pub fn pauli_basis_reconstruct(expansion: &BTreeMap<PauliString, C64>, n: usize) -> CMat {
    let dim = 1 << n;
    expansion
        .iter()
        .fold(CMat::zeros(dim, dim), |acc, (p, &coef)| &acc + &p.to_matrix().scale(coef))
}

/// Every phase-free string on `qubits` qubits that commutes with all generators,
/// in lexicographic order.
pub fn pauli_commutant(generators: &[PauliString], qubits: usize) -> Result<Vec<PauliString>> {
    if let Some(g) = generators.iter().find(|g| g.num_qubits() != qubits) {
        return Err(Error::DimensionMismatch {
            op: "pauli_commutant",
            detail: format!("generator {g} does not act on {qubits} qubits"),
        });
    }
    Ok(all_strings(qubits)
        .into_iter()
        .filter(|p| generators.iter().all(|g| p.commutes_unchecked(g)))
        .collect())
}

/// Parses a whitespace- or comma-separated list of Pauli strings.
pub fn parse_list(s: &str) -> Result<Vec<PauliString>> {
    s.split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|tok| !tok.is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::frob_dist;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(ps("X").multiply(&ps("Y")).unwrap(), ps("+iZ"));
        assert_eq!(ps("Z").multiply(&ps("Z")).unwrap(), ps("+I"));
        assert_eq!(ps("Y").multiply(&ps("X")).unwrap(), ps("-iZ"));
    }

    #[test]
    fn three_qubit_product_of_b_elements() {
        // (σx⊗σz⊗I)(σy⊗I⊗σz) = (iσz)⊗σz⊗σz
        assert_eq!(ps("XZI").multiply(&ps("YIZ")).unwrap(), ps("+iZZZ"));
    }

    #[test]
    fn multiply_rejects_length_mismatch() {
        assert!(matches!(
            ps("XZ").multiply(&ps("X")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn commutation_examples() {
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("ZX").commutes(&ps("XZ")).unwrap());
        assert!(ps("IZ").commutes(&ps("XZ")).unwrap());
        assert!(ps("X").commutes(&ps("Y")).is_ok());
        assert!(ps("X").commutes(&ps("YY")).is_err());
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(ps("Z").to_matrix(), CMat::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]));
        let zx = CMat::from_real_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
            &[0.0, 0.0, -1.0, 0.0],
        ]);
        assert_eq!(ps("ZX").to_matrix(), zx);
        let m = ps("-iY").to_matrix();
        assert!(frob_dist(&m, &CMat::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]])).unwrap() < 1e-15);
    }

    #[test]
    fn parse_and_display() {
        for s in ["+ZXI", "-X", "+iY", "-iZZ"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert_eq!(ps("ZX").to_string(), "+ZX");
        assert!("".parse::<PauliString>().is_err());
        assert!("+i".parse::<PauliString>().is_err());
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("i X".parse::<PauliString>().is_err());
    }

    #[test]
    fn expansion_examples() {
        let e = pauli_basis_expand(&CMat::identity(2)).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[&ps("I")], ONE);

        let m = &ps("ZX").to_matrix() + &ps("XI").to_matrix();
        let e = pauli_basis_expand(&m).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e[&ps("ZX")] - ONE).norm() < 1e-15);
        assert!((e[&ps("XI")] - ONE).norm() < 1e-15);

        // ρ = ½(I + σz) for the Bloch vector (0, 0, 1).
        let rho = CMat::diag(&[ONE, ZERO]);
        let e = pauli_basis_expand(&rho).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e[&ps("I")] - re(0.5)).norm() < 1e-15);
        assert!((e[&ps("Z")] - re(0.5)).norm() < 1e-15);

        assert!(pauli_basis_expand(&CMat::identity(3)).is_err());
    }

    #[test]
    fn phase_damping_commutant() {
        let b = parse_list("ZI XZ YZ").unwrap();
        let comm = pauli_commutant(&b, 2).unwrap();
        assert_eq!(comm, parse_list("II IZ ZX ZY").unwrap());
    }

    #[test]
    fn depolarizing_commutant_has_sixteen_strings() {
        let b = parse_list("ZZZ XZI YIZ").unwrap();
        let comm = pauli_commutant(&b, 3).unwrap();
        assert_eq!(comm.len(), 16);
        for s in ["XIX", "YXI", "ZXX"] {
            assert!(comm.contains(&ps(s)), "{s} missing");
        }
    }

    #[test]
    fn empty_constraint_keeps_everything() {
        assert_eq!(pauli_commutant(&[], 1).unwrap(), parse_list("I X Y Z").unwrap());
    }

    #[test]
    fn group_has_sixteen_distinct_elements_and_closes() {
        let g = single_qubit_group();
        assert_eq!(g.len(), 16);
        let mut dedup = g.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 16);
        let table = multiplication_table(&g).expect("group must close");
        // Identity and inverses.
        let e = g.iter().position(|x| *x == ps("+I")).unwrap();
        for a in 0..16 {
            assert_eq!(table[e][a], a);
            assert_eq!(table[a][e], a);
            assert!((0..16).any(|b| table[a][b] == e));
        }
        // Associativity over all triples.
        for a in 0..16 {
            for b in 0..16 {
                for cc in 0..16 {
                    assert_eq!(table[table[a][b]][cc], table[a][table[b][cc]]);
                }
            }
        }
    }
}
