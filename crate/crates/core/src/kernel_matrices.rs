//! Quadratic-form matrices behind the discrete energy laws, a checker for
//! the structured ("special") Cholesky conditions, and an eigenvalue oracle.
//!
//! A symmetric matrix `S` with positive entries is positive definite when
//!
//! * P1: `S[i-1][j] >= S[i][j]` for `j < i` (columns decrease downward),
//! * P2: `S[i][j-1] < S[i][j]` for `1 < j <= i` (rows increase up to the diagonal),
//! * P3: `S[i-1][j-1] - S[i][j-1] <= S[i-1][j] - S[i][j]` for `1 < j < i`,
//!
//! and then its Cholesky factor `L` satisfies Q1 (`L[i][j] > 0` on and below
//! the diagonal) and Q2 (`L[i-1][j] >= L[i][j]` for `j < i`). Indices in
//! reports are 1-based, matching the usual statement of these conditions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::frac_kernel::{
    gamma, nonuniform_half_weights, nonuniform_weights, TimeMesh, UniformWeightCache, WeightKind,
};

/// Largest matrix order the builders accept.
pub const MATRIX_ORDER_CAP: usize = 2000;

/// Relative slack for P1-P3 when entries come from floating-point weights.
pub const CONDITION_SLACK: f64 = 1e-13;

/// Relative slack for Q2 on the computed factor.
pub const FACTOR_SLACK: f64 = 1e-11;

/// Relative asymmetry tolerated by [`DenseSymMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-13;

/// General square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `M + M^T`.
    pub fn symmetrized(&self) -> DenseSymMatrix {
        DenseSymMatrix::from_fn(self.n, |i, j| self.get(i, j) + self.get(j, i))
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        quadratic_form(self.n, &self.data, x)
    }
}

fn quadratic_form(n: usize, data: &[f64], x: &[f64]) -> f64 {
    assert_eq!(x.len(), n);
    (0..n)
        .map(|i| x[i] * (0..n).map(|j| data[i * n + j] * x[j]).sum::<f64>())
        .sum()
}

/// Symmetric matrix in dense row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymMatrix {
    /// Validates symmetry within [`SYMMETRY_TOL`] (relative, entrywise).
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()) {
                    return Err(Error::Asymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Builds from the lower triangle `f(i, j)`, `j <= i`, 0-based.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> DenseSymMatrix {
        assert!(k <= self.n);
        DenseSymMatrix::from_fn(k, |i, j| self.get(i, j))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        quadratic_form(self.n, &self.data, x)
    }

    pub fn scaled(&self, c: f64) -> DenseSymMatrix {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// `P M P^T` with `P` anti-diagonal, `P[i][n-1-i] = p[i]`.
    pub fn conjugate_anti_diagonal(&self, p: &[f64]) -> DenseSymMatrix {
        let n = self.n;
        assert_eq!(p.len(), n);
        DenseSymMatrix::from_fn(n, |i, j| p[i] * p[j] * self.get(n - 1 - i, n - 1 - j))
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }
}

/// Lower-triangular factor, row-major with zeros above the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular {
    n: usize,
    data: Vec<f64>,
}

impl LowerTriangular {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `L L^T`.
    pub fn gram(&self) -> DenseSymMatrix {
        let n = self.n;
        DenseSymMatrix::from_fn(n, |i, j| (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum())
    }
}

/// Outcome of one of the conditions P1-P3, Q1-Q2.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConditionReport {
    pub holds: bool,
    /// First violating `(i, j)`, 1-based, scanning rows in increasing order.
    pub first_violation: Option<(usize, usize)>,
    /// Instances that hold only up to the floating-point slack
    /// (equality for the nonstrict conditions).
    pub boundary_cases: usize,
}

impl ConditionReport {
    fn new() -> Self {
        Self {
            holds: true,
            first_violation: None,
            boundary_cases: 0,
        }
    }

    fn not_checked() -> Self {
        Self {
            holds: false,
            first_violation: None,
            boundary_cases: 0,
        }
    }

    fn violate(&mut self, i: usize, j: usize) {
        if self.holds {
            self.holds = false;
            self.first_violation = Some((i + 1, j + 1));
        }
    }

    /// Whether the condition holds on the leading `k x k` block.
    pub fn holds_up_to(&self, k: usize) -> bool {
        match self.first_violation {
            None => self.holds,
            Some((i, _)) => i > k,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyReport {
    pub p1: ConditionReport,
    pub p2: ConditionReport,
    pub p3: ConditionReport,
    /// Computed only when P1-P3 all hold.
    pub factor: Option<LowerTriangular>,
    /// `holds == false` when no factor was computed.
    pub q1: ConditionReport,
    pub q2: ConditionReport,
    pub min_eig: f64,
}

impl CholeskyReport {
    pub fn p_ok(&self) -> bool {
        self.p1.holds && self.p2.holds && self.p3.holds
    }

    pub fn q_ok(&self) -> bool {
        self.q1.holds && self.q2.holds
    }

    pub fn all_ok(&self) -> bool {
        self.p_ok() && self.q_ok() && self.min_eig > 0.0
    }
}

fn check_positive_entries(s: &DenseSymMatrix) -> Result<()> {
    let n = s.order();
    for i in 0..n {
        for j in 0..=i {
            let v = s.get(i, j);
            if !(v > 0.0) {
                return Err(Error::NonPositiveEntry {
                    i: i + 1,
                    j: j + 1,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// `a >= b` up to a relative slack; returns (holds, boundary).
fn nonstrict_ge(a: f64, b: f64, scale: f64, slack: f64) -> (bool, bool) {
    let tol = slack * scale;
    (a >= b - tol, (a - b).abs() <= tol)
}

fn scan_conditions(s: &DenseSymMatrix) -> [ConditionReport; 3] {
    let n = s.order();
    let (mut p1, mut p2, mut p3) = (ConditionReport::new(), ConditionReport::new(), ConditionReport::new());
    for i in 1..n {
        for j in 0..=i {
            if j < i {
                let (a, b) = (s.get(i - 1, j), s.get(i, j));
                let (ok, edge) = nonstrict_ge(a, b, a.abs().max(b.abs()), CONDITION_SLACK);
                if !ok {
                    p1.violate(i, j);
                } else if edge {
                    p1.boundary_cases += 1;
                }
            }
            if j >= 1 {
                // strict: S[i][j-1] < S[i][j]
                let (a, b) = (s.get(i, j), s.get(i, j - 1));
                let tol = CONDITION_SLACK * a.abs().max(b.abs());
                if !(b < a + tol) {
                    p2.violate(i, j);
                } else if b >= a - tol {
                    p2.boundary_cases += 1;
                }
            }
            if j >= 1 && j < i {
                let (a, b, c, d) = (s.get(i - 1, j - 1), s.get(i, j - 1), s.get(i - 1, j), s.get(i, j));
                let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
                let (ok, edge) = nonstrict_ge(c - d, a - b, scale, CONDITION_SLACK);
                if !ok {
                    p3.violate(i, j);
                } else if edge {
                    p3.boundary_cases += 1;
                }
            }
        }
    }
    // the row-0 instances are vacuous for all three conditions
    [p1, p2, p3]
}

/// Standard column Cholesky. Returns the factor rows that could be computed
/// and the first row (0-based) with a nonpositive pivot, if any.
fn cholesky(s: &DenseSymMatrix) -> (LowerTriangular, Option<usize>) {
    let n = s.order();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = s.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return (LowerTriangular { n, data: l }, Some(j));
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / d;
        }
    }
    (LowerTriangular { n, data: l }, None)
}

fn scan_factor(l: &LowerTriangular, rows: usize) -> (ConditionReport, ConditionReport) {
    let (mut q1, mut q2) = (ConditionReport::new(), ConditionReport::new());
    for i in 0..rows {
        for j in 0..=i {
            if !(l.get(i, j) > 0.0) {
                q1.violate(i, j);
            }
            if j < i {
                let (a, b) = (l.get(i - 1, j), l.get(i, j));
                let (ok, edge) = nonstrict_ge(a, b, a.abs().max(b.abs()), FACTOR_SLACK);
                if !ok {
                    q2.violate(i, j);
                } else if edge {
                    q2.boundary_cases += 1;
                }
            }
        }
    }
    (q1, q2)
}

/// Checks P1-P3; when they hold, factors `S = L L^T` and checks Q1-Q2.
/// `min_eig` always comes from [`pd_oracle`].
pub fn check_special_cholesky(s: &DenseSymMatrix) -> Result<CholeskyReport> {
    check_positive_entries(s)?;
    let [p1, p2, p3] = scan_conditions(s);
    let (_, min_eig) = pd_oracle(s)?;
    let (factor, q1, q2) = if p1.holds && p2.holds && p3.holds {
        let (l, failed) = cholesky(s);
        match failed {
            None => {
                let (q1, q2) = scan_factor(&l, s.order());
                (Some(l), q1, q2)
            }
            Some(row) => {
                let mut q1 = ConditionReport::not_checked();
                q1.first_violation = Some((row + 1, row + 1));
                (None, q1, ConditionReport::not_checked())
            }
        }
    } else {
        (None, ConditionReport::not_checked(), ConditionReport::not_checked())
    };
    Ok(CholeskyReport {
        p1,
        p2,
        p3,
        factor,
        q1,
        q2,
        min_eig,
    })
}

/// Conditions of one leading block, as derived by [`certify_leading_blocks`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCertificate {
    pub n: usize,
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    pub q1: bool,
    pub q2: bool,
    /// Lower bound on the block's smallest eigenvalue: the smallest
    /// eigenvalue of the full matrix (Cauchy interlacing).
    pub min_eig_bound: f64,
}

impl BlockCertificate {
    pub fn all_ok(&self) -> bool {
        self.p1 && self.p2 && self.p3 && self.q1 && self.q2 && self.min_eig_bound > 0.0
    }
}

/// Certifies every leading block of `s` from one pass over the full matrix.
///
/// Each P/Q instance at row `i` only involves rows and columns `<= i`, the
/// Cholesky factor of a leading block is the leading block of the factor,
/// and eigenvalues of a leading block interlace those of the full matrix.
/// This is exact for families whose order-`k` matrix is the leading block
/// of the order-`n` one.
pub fn certify_leading_blocks(s: &DenseSymMatrix) -> Result<Vec<BlockCertificate>> {
    check_positive_entries(s)?;
    let n = s.order();
    let [p1, p2, p3] = scan_conditions(s);
    let (_, min_eig) = pd_oracle(s)?;
    let (l, failed) = cholesky(s);
    let rows = failed.unwrap_or(n);
    let (q1, q2) = scan_factor(&l, rows);
    Ok((1..=n)
        .map(|k| BlockCertificate {
            n: k,
            p1: p1.holds_up_to(k),
            p2: p2.holds_up_to(k),
            p3: p3.holds_up_to(k),
            q1: k <= rows && q1.holds_up_to(k),
            q2: k <= rows && q2.holds_up_to(k),
            min_eig_bound: min_eig,
        })
        .collect())
}

/// Smallest eigenvalue by a dense symmetric eigensolver; positive definite
/// when it exceeds `1e-12` times the spectral radius.
pub fn pd_oracle(m: &DenseSymMatrix) -> Result<(bool, f64)> {
    // re-validate: the oracle must not trust the caller's construction
    DenseSymMatrix::new(m.order(), m.data().to_vec())?;
    if m.order() == 0 {
        return Ok((true, f64::INFINITY));
    }
    let eig = m.to_nalgebra().symmetric_eigenvalues();
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let radius = eig.iter().fold(0.0f64, |r, v| r.max(v.abs()));
    Ok((min > 1e-12 * radius, min))
}

fn check_order_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("matrix order must be at least 1".into()));
    }
    if n > MATRIX_ORDER_CAP {
        return Err(Error::CapExceeded {
            n,
            cap: MATRIX_ORDER_CAP,
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("fractional order must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// `T[i][j] = w[i-j]` for `i >= j`.
pub fn toeplitz_lower(w: &[f64], n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, |i, j| if i >= j { w[i - j] } else { 0.0 })
}

/// A weighted Toeplitz form `B = diag(scale) T(w)`, its symmetrization, and
/// the anti-diagonally conjugated matrix `S = P (B + B^T) P^T` with
/// `P[i][n-1-i] = 1 / w[i]`.
#[derive(Clone, Debug)]
pub struct ConjugatedForm {
    pub b: DenseMatrix,
    pub b_sym: DenseSymMatrix,
    pub s: DenseSymMatrix,
}

fn conjugated_form(w: &[f64], row_scale: &[f64]) -> ConjugatedForm {
    let n = row_scale.len();
    let b = DenseMatrix::from_fn(n, |i, j| if i >= j { row_scale[i] * w[i - j] } else { 0.0 });
    let b_sym = b.symmetrized();
    let p: Vec<f64> = w[..n].iter().map(|v| 1.0 / v).collect();
    let s = b_sym.conjugate_anti_diagonal(&p);
    ConjugatedForm { b, b_sym, s }
}

fn uniform_weights(kind: WeightKind, alpha: f64, n: usize) -> Vec<f64> {
    // dt cancels from every conjugated form
    let mut cache = UniformWeightCache::new(kind, alpha, 1.0).expect("valid parameters");
    cache.get(n).to_vec()
}

/// Matrix of the fractional energy law: `B = diag(b_{n-1}, .., b_0) T(b)`.
pub fn build_frac_law_matrix(n: usize, alpha: f64) -> Result<ConjugatedForm> {
    check_order_size(n)?;
    check_alpha(alpha)?;
    let b = uniform_weights(WeightKind::UniformL1, alpha, n);
    let scale: Vec<f64> = (0..n).map(|i| b[n - 1 - i]).collect();
    Ok(conjugated_form(&b, &scale))
}

/// Matrix of the weighted energy law:
/// `B = diag(1^a b_{n-1}, 2^a b_{n-2}, .., n^a b_0) T(b)`.
pub fn build_weighted_law_matrix(n: usize, alpha: f64) -> Result<ConjugatedForm> {
    check_order_size(n)?;
    check_alpha(alpha)?;
    let b = uniform_weights(WeightKind::UniformL1, alpha, n);
    let scale: Vec<f64> = (0..n)
        .map(|i| ((i + 1) as f64).powf(alpha) * b[n - 1 - i])
        .collect();
    Ok(conjugated_form(&b, &scale))
}

/// Matrices of the half-point scheme: `A + A^T` with `A = T(b~)`, and the
/// conjugated symmetrization of `B = diag(b~_{n-1}, .., b~_0) A`.
pub fn build_sav_matrices(n: usize, alpha: f64) -> Result<(DenseSymMatrix, DenseSymMatrix)> {
    check_order_size(n)?;
    check_alpha(alpha)?;
    let bt = uniform_weights(WeightKind::HalfL1, alpha, n);
    let a = toeplitz_lower(&bt, n).symmetrized();
    let scale: Vec<f64> = (0..n).map(|i| bt[n - 1 - i]).collect();
    Ok((a, conjugated_form(&bt, &scale).s))
}

/// `D + D^T` and `D~ + D~^T` for the first `n` steps of `mesh`, where
/// `D[i][j] = d_{i,j}` (`1 <= j <= i <= n`) and `D~[i][j] = d^_{i,j}`
/// (`0 <= j <= i <= n-1`).
pub fn build_nonuniform_matrices(
    mesh: &TimeMesh,
    alpha: f64,
    n: usize,
) -> Result<(DenseSymMatrix, DenseSymMatrix)> {
    check_order_size(n)?;
    check_alpha(alpha)?;
    if n > mesh.num_steps() {
        return Err(Error::Index {
            index: n,
            min: 1,
            max: mesh.num_steps(),
        });
    }
    let d_rows: Vec<Vec<f64>> = (1..=n)
        .map(|i| nonuniform_weights(alpha, mesh, i).map(|w| w.values().to_vec()))
        .collect::<Result<_>>()?;
    let dh_rows: Vec<Vec<f64>> = (0..n)
        .map(|i| nonuniform_half_weights(alpha, mesh, i).map(|w| w.values().to_vec()))
        .collect::<Result<_>>()?;
    let d = DenseMatrix::from_fn(n, |i, j| if i >= j { d_rows[i][j] } else { 0.0 });
    let dh = DenseMatrix::from_fn(n, |i, j| if i >= j { dh_rows[i][j] } else { 0.0 });
    Ok((d.symmetrized(), dh.symmetrized()))
}

/// `Gamma(2 - alpha)`, the factor that normalizes the nonuniform matrices.
pub fn nonuniform_scale(alpha: f64) -> f64 {
    gamma(2.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_by_two_positive_case() {
        let s = DenseSymMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let r = check_special_cholesky(&s).unwrap();
        assert!(r.p1.holds && r.p2.holds && r.p3.holds);
        let l = r.factor.as_ref().unwrap();
        assert_relative_eq!(l.get(0, 0), 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(l.get(1, 0), 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(l.get(1, 1), 1.5f64.sqrt(), max_relative = 1e-15);
        assert!(r.q1.holds && r.q2.holds);
        assert_relative_eq!(r.min_eig, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn two_by_two_indefinite_case() {
        let s = DenseSymMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        let r = check_special_cholesky(&s).unwrap();
        assert!(!r.p1.holds);
        assert_eq!(r.p1.first_violation, Some((2, 1)));
        assert!(r.factor.is_none());
        assert_relative_eq!(r.min_eig, -1.0, max_relative = 1e-14);
        assert!(!pd_oracle(&s).unwrap().0);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(
            DenseSymMatrix::new(2, vec![1.0, 2.0, 2.5, 1.0]),
            Err(Error::Asymmetric { i: 2, j: 1 })
        ));
        let s = DenseSymMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(check_special_cholesky(&s), Err(Error::NonPositiveEntry { i: 2, j: 1, .. })));
        assert!(matches!(build_frac_law_matrix(2001, 0.5), Err(Error::CapExceeded { .. })));
        assert!(matches!(build_frac_law_matrix(3, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn oracle_reference_matrices() {
        let (pd, min) = pd_oracle(&DenseSymMatrix::identity(5)).unwrap();
        assert!(pd);
        assert_relative_eq!(min, 1.0, max_relative = 1e-14);
        let h = DenseSymMatrix::from_fn(6, |i, j| 1.0 / (i + j + 1) as f64);
        let (pd, min) = pd_oracle(&h).unwrap();
        assert!(pd);
        // mpmath: 1.08279948456554977e-7
        assert_relative_eq!(min, 1.08279948456554977e-7, max_relative = 1e-6);
    }

    #[test]
    fn frac_law_small_cases() {
        let s1 = build_frac_law_matrix(1, 0.5).unwrap().s;
        assert_relative_eq!(s1.get(0, 0), 2.0, max_relative = 1e-15);
        let s2 = build_frac_law_matrix(2, 0.5).unwrap().s;
        assert_relative_eq!(s2.get(0, 0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(s2.get(1, 0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(s2.get(1, 1), 4.82842712474619010, max_relative = 1e-14);
    }

    #[test]
    fn weighted_law_small_cases() {
        assert_relative_eq!(build_weighted_law_matrix(1, 0.5).unwrap().s.get(0, 0), 2.0, max_relative = 1e-15);
        let s = build_weighted_law_matrix(2, 0.5).unwrap().s;
        assert_relative_eq!(s.get(0, 0), 2.0 * 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s.get(1, 0), 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s.get(1, 1), 4.82842712474619010, max_relative = 1e-14);
    }

    #[test]
    fn sav_matrix_order_one() {
        let (a, _) = build_sav_matrices(1, 0.4).unwrap();
        let bt0 = 2f64.powf(0.4 - 1.0) / gamma(1.6);
        assert_relative_eq!(a.get(0, 0), 2.0 * bt0, max_relative = 1e-14);
    }

    #[test]
    fn conjugation_matches_explicit_entries() {
        let n = 30;
        for &alpha in &[0.2, 0.7] {
            let b = uniform_weights(WeightKind::UniformL1, alpha, n);
            let s = build_frac_law_matrix(n, alpha).unwrap().s;
            let w = build_weighted_law_matrix(n, alpha).unwrap().s;
            for i in 0..n {
                for j in 0..=i {
                    let (expect_s, expect_w) = if i == j {
                        let v = 2.0 * b[0] / b[i];
                        (v, ((n - i) as f64).powf(alpha) * v)
                    } else {
                        let v = b[i - j] / b[i];
                        (v, ((n - j) as f64).powf(alpha) * v)
                    };
                    assert_relative_eq!(s.get(i, j), expect_s, max_relative = 1e-13);
                    assert_relative_eq!(w.get(i, j), expect_w, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn factor_reconstructs_matrix() {
        let s = build_frac_law_matrix(60, 0.35).unwrap().s;
        let r = check_special_cholesky(&s).unwrap();
        let l = r.factor.expect("conditions hold");
        let back = l.gram();
        let diff: f64 = back
            .data()
            .iter()
            .zip(s.data())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-10 * s.frobenius_norm());
    }

    #[test]
    fn leading_block_certificates_match_direct_checks() {
        let s = build_frac_law_matrix(25, 0.6).unwrap().s;
        let certs = certify_leading_blocks(&s).unwrap();
        for c in &certs {
            let direct = check_special_cholesky(&s.leading(c.n)).unwrap();
            assert_eq!(c.p1, direct.p1.holds);
            assert_eq!(c.p2, direct.p2.holds);
            assert_eq!(c.p3, direct.p3.holds);
            assert_eq!(c.q1, direct.q1.holds);
            assert_eq!(c.q2, direct.q2.holds);
            assert!(direct.min_eig >= c.min_eig_bound * (1.0 - 1e-12));
        }
        // a matrix that fails P1 from row 3 on
        let bad = DenseSymMatrix::from_fn(4, |i, j| if i == 2 && j == 0 { 20.0 } else { (10 + j - i) as f64 });
        let certs = certify_leading_blocks(&bad).unwrap();
        let direct = check_special_cholesky(&bad).unwrap();
        assert_eq!(direct.p1.first_violation, Some((3, 1)));
        assert!(certs[1].p1 && !certs[2].p1);
    }
}
