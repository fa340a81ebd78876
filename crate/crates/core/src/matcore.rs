//! Dense complex matrices sized for a qubit plus a small environment.
//!
//! Tensor-product basis states are ordered in descending binary order: for two
//! qubits the basis reads `|11>, |10>, |01>, |00>`, and `σ_z|1> = |1>`. With
//! that labelling the Pauli matrices keep their textbook form and the ordinary
//! Kronecker product places the left tensor factor in the most significant
//! position. The system always occupies the left slot.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Hermiticity tolerance accepted by the exponential and the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries.
    ///
    /// Panics if the entry count does not match or an entry is not finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        assert!(
            data.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            "matrix entries must be finite"
        );
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let cl = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == cl), "ragged rows");
        Self::from_vec(r, cl, rows.iter().flat_map(|row| row.iter().copied()).collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let cl = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == cl), "ragged rows");
        Self::from_vec(r, cl, rows.iter().flat_map(|row| row.iter().map(|&x| re(x))).collect())
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Column vector.
    pub fn column_vector(v: &[C64]) -> Self {
        Self::from_vec(v.len(), 1, v.to_vec())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let n = cols.len();
        let m = cols.first().map_or(0, |v| v.len());
        Self::from_fn(m, n, |i, j| cols[j][i])
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            other.shape()
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    /// `‖A - A†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        frob_dist_unchecked(self, &self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `‖A†A - I‖_F`; zero for isometries and unitaries.
    pub fn isometry_defect(&self) -> f64 {
        frob_dist_unchecked(&self.adjoint().matmul(self), &Self::identity(self.cols))
    }

    /// `max(‖U†U - I‖_F, ‖UU† - I‖_F)`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let left = self.isometry_defect();
        let right = frob_dist_unchecked(&self.matmul(&self.adjoint()), &Self::identity(self.rows));
        left.max(right)
    }

    /// Row-major flattening.
    pub fn to_vec(&self) -> Vec<C64> {
        self.data.clone()
    }

    /// Entries as `[re, im]` pairs, row by row.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.map(|z| -z)
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl Add for CMat {
    type Output = CMat;
    fn add(self, rhs: CMat) -> CMat {
        &self + &rhs
    }
}

impl Sub for CMat {
    type Output = CMat;
    fn sub(self, rhs: CMat) -> CMat {
        &self - &rhs
    }
}

impl Mul for CMat {
    type Output = CMat;
    fn mul(self, rhs: CMat) -> CMat {
        self.matmul(&rhs)
    }
}

/// Kronecker product `a ⊗ b`, with `a` in the most significant slot.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (br, bc) = b.shape();
    CMat::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of column vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Trace over the environment (right) tensor factor.
pub fn partial_trace_env(m: &CMat, dim_s: usize, dim_e: usize) -> Result<CMat> {
    let n = dim_s * dim_e;
    if m.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            op: "partial_trace_env",
            detail: format!("expected {n}x{n}, got {}x{}", m.rows, m.cols),
        });
    }
    Ok(CMat::from_fn(dim_s, dim_s, |s, t| {
        (0..dim_e).map(|e| m[(s * dim_e + e, t * dim_e + e)]).sum()
    }))
}

/// Trace over the system (left) tensor factor.
pub fn partial_trace_sys(m: &CMat, dim_s: usize, dim_e: usize) -> Result<CMat> {
    let n = dim_s * dim_e;
    if m.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            op: "partial_trace_sys",
            detail: format!("expected {n}x{n}, got {}x{}", m.rows, m.cols),
        });
    }
    Ok(CMat::from_fn(dim_e, dim_e, |e, f| {
        (0..dim_s).map(|s| m[(s * dim_e + e, s * dim_e + f)]).sum()
    }))
}

/// `exp(-i h t)` for Hermitian `h`, by scaling and squaring a truncated Taylor series.
pub fn mat_exp_hermitian(h: &CMat, t: f64) -> Result<CMat> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            op: "mat_exp_hermitian",
            detail: format!("generator must be square, got {}x{}", h.rows, h.cols),
        });
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL * h.frob_norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(expm(&h.scale(c(0.0, -t))))
}

/// Matrix exponential of an arbitrary square matrix.
pub(crate) fn expm(a: &CMat) -> CMat {
    let n = a.rows;
    let norm = a.frob_norm();
    // ‖A/2^s‖ <= 1/2 keeps the series short and well conditioned.
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale_re(0.5f64.powi(squarings));

    let mut sum = CMat::identity(n);
    let mut term = CMat::identity(n);
    for k in 1..64 {
        term = term.matmul(&scaled).scale_re(1.0 / k as f64);
        sum = &sum + &term;
        if term.frob_norm() <= f64::EPSILON * sum.frob_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// `‖a - b‖_F`.
pub fn frob_dist(a: &CMat, b: &CMat) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op: "frob_dist",
            detail: format!("{:?} vs {:?}", a.shape(), b.shape()),
        });
    }
    Ok(frob_dist_unchecked(a, b))
}

pub(crate) fn frob_dist_unchecked(a: &CMat, b: &CMat) -> f64 {
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMat,
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMat) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            op: "hermitian_eigen",
            detail: format!("{}x{}", h.rows, h.cols),
        });
    }
    let defect = h.hermiticity_defect();
    let scale = h.frob_norm().max(1.0);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { defect });
    }
    let n = h.rows;
    let mut a = h.clone();
    let mut v = CMat::identity(n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                // signum(0.0) == 1.0, so equal diagonals rotate by π/4.
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let ph_conj = phase.conj();

                // A <- A G: columns p, q.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * ph_conj * sn;
                    a[(k, q)] = akp * sn + akq * ph_conj * cs;
                }
                // A <- G† A: rows p, q.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * phase * sn;
                    a[(q, k)] = apk * sn + aqk * phase * cs;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs - vkq * ph_conj * sn;
                    v[(k, q)] = vkp * sn + vkq * ph_conj * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Number of eigenvalues of a Hermitian matrix strictly above `tol`.
pub fn eig_rank(h: &CMat, tol: f64) -> Result<usize> {
    Ok(hermitian_eigen(h)?.values.iter().filter(|&&x| x > tol).count())
}

/// `½ Σ |λ_k|` over the eigenvalues of the Hermitian difference.
pub fn trace_distance(a: &CMat, b: &CMat) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op: "trace_distance",
            detail: format!("{:?} vs {:?}", a.shape(), b.shape()),
        });
    }
    let eig = hermitian_eigen(&(a - b))?;
    Ok(0.5 * eig.values.iter().map(|x| x.abs()).sum::<f64>())
}

/// Solution of a linear least-squares problem.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: Vec<C64>,
    /// `‖A x - b‖₂`.
    pub residual: f64,
}

/// Minimizes `‖A x - b‖₂` by Householder QR.
///
/// Fails with [`Error::RankDeficient`] when `A` does not have full column rank.
pub fn lstsq(a: &CMat, b: &[C64]) -> Result<LeastSquares> {
    let (m, n) = a.shape();
    if b.len() != m || m < n {
        return Err(Error::DimensionMismatch {
            op: "lstsq",
            detail: format!("A is {m}x{n}, b has {} entries", b.len()),
        });
    }
    let mut r = a.clone();
    let mut qtb = b.to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale {
            continue;
        }
        let x0 = r[(k, k)];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * norm
        } else {
            re(-norm)
        };
        let mut v: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);
        for j in k..n {
            let dot: C64 = (k..m).map(|i| v[i - k].conj() * r[(i, j)]).sum();
            for i in k..m {
                r[(i, j)] -= v[i - k] * dot * 2.0;
            }
        }
        let dot: C64 = (k..m).map(|i| v[i - k].conj() * qtb[i]).sum();
        for i in k..m {
            qtb[i] -= v[i - k] * dot * 2.0;
        }
    }

    let rank = (0..n).filter(|&k| r[(k, k)].norm() > 1e-10 * scale).count();
    if rank < n {
        return Err(Error::RankDeficient { rank, unknowns: n });
    }
    let mut x = vec![ZERO; n];
    for k in (0..n).rev() {
        let s: C64 = ((k + 1)..n).map(|j| r[(k, j)] * x[j]).sum();
        x[k] = (qtb[k] - s) / r[(k, k)];
    }
    let ax = a.apply(&x);
    let residual = ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(LeastSquares { x, residual })
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Basis index of a label such as `"11"` under the descending convention.
pub fn basis_index(label: &str) -> Result<usize> {
    if label.is_empty() {
        return Err(Error::BasisLabel(label.to_string()));
    }
    let n = label.len();
    let mut idx = 0usize;
    for (k, ch) in label.chars().enumerate() {
        let bit = match ch {
            '1' => 0,
            '0' => 1,
            _ => return Err(Error::BasisLabel(label.to_string())),
        };
        idx |= bit << (n - 1 - k);
    }
    Ok(idx)
}

/// Inverse of [`basis_index`].
pub fn basis_label(index: usize, qubits: usize) -> String {
    (0..qubits)
        .map(|k| {
            if (index >> (qubits - 1 - k)) & 1 == 0 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

pub fn basis_ket(label: &str) -> Result<Vec<C64>> {
    let idx = basis_index(label)?;
    Ok(unit_vector(1 << label.len(), idx))
}

pub fn unit_vector(dim: usize, idx: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[idx] = ONE;
    v
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    c(a, b) / std::f64::consts::SQRT_2
                })
                .collect()
        })
        .collect();
    // Modified Gram-Schmidt; r_kk is real positive by construction, so the
    // phase fix is already absorbed.
    for k in 0..n {
        for j in 0..k {
            let proj = inner(&cols[j], &cols[k]);
            let (head, tail) = cols.split_at_mut(k);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= proj * y;
            }
        }
        let norm = vec_norm(&cols[k]);
        cols[k].iter_mut().for_each(|z| *z /= norm);
    }
    CMat::from_columns(&cols)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c(a, b)
    });
    (&g + &g.adjoint()).scale_re(0.5)
}

/// Random density matrix `GG†/Tr(GG†)` with Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c(a, b)
    });
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m.scale_re(1.0 / tr)
}

/// Checks Hermiticity, unit trace, and positivity of a density matrix.
pub fn validate_density(rho: &CMat, dim: usize, tol: f64) -> Result<()> {
    if rho.shape() != (dim, dim) {
        return Err(Error::InvalidDensityMatrix(format!(
            "expected {dim}x{dim}, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let herm = rho.hermiticity_defect();
    if herm > tol {
        return Err(Error::InvalidDensityMatrix(format!(
            "not Hermitian (defect {herm:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > tol {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
    }
    let min = hermitian_eigen(rho)?.values[0];
    if min < -tol {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}
