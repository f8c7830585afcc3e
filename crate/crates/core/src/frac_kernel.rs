//! L1-type convolution weights for the Caputo derivative and their
//! application to scalar and field histories.
//!
//! Four weight families are provided:
//!
//! * `UniformL1`: `b_j = dt^{1-a} [(j+1)^{1-a} - j^{1-a}] / G(2-a)`, the L1
//!   approximation at `t_n` on a uniform mesh.
//! * `HalfL1`: the half-shifted weights `b~_j` approximating the derivative
//!   at `t_{n+1/2}`.
//! * `NonuniformL1` / `NonuniformHalfL1`: the same two approximations on an
//!   arbitrary increasing mesh (`d_{n,j}` and `d^_{n,j}`).
//!
//! Whatever the family, a weight sequence can be turned into the list of
//! multipliers of consecutive differences `phi^k - phi^{k-1}`, `k = 1..=m`,
//! which is what the steppers and diagnostics consume.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{domain, Error, Result};
use crate::spectral::Field2D;

/// Gamma function (musl `tgamma` port).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `(b + delta)^p - b^p` for `b >= 0`, `delta > 0`, without cancellation
/// when `delta << b`.
pub(crate) fn pow_increment(b: f64, delta: f64, p: f64) -> f64 {
    if b == 0.0 {
        return delta.powf(p);
    }
    b.powf(p) * (p * (delta / b).ln_1p()).exp_m1()
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("fractional order must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

fn check_step(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return domain(format!("time step must be positive, got {dt}"));
    }
    Ok(())
}

/// Fingerprint of a time mesh, used to tie nonuniform weights to the mesh
/// they were generated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeshId(pub u64);

/// Ordered time points `0 = t_0 < t_1 < ... < t_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeMesh {
    points: Vec<f64>,
    steps: Vec<f64>,
    uniform_dt: Option<f64>,
}

impl TimeMesh {
    /// `n` steps of size `dt`.
    pub fn uniform(dt: f64, n: usize) -> Result<Self> {
        check_step(dt)?;
        if n == 0 {
            return domain("a mesh needs at least one step");
        }
        let points = (0..=n).map(|j| j as f64 * dt).collect();
        Ok(Self {
            points,
            steps: vec![dt; n],
            uniform_dt: Some(dt),
        })
    }

    /// Graded mesh `t_j = (j/N)^r T`.
    pub fn graded(n: usize, r: f64, t_end: f64) -> Result<Self> {
        if n == 0 {
            return domain("a graded mesh needs N >= 1");
        }
        if !(r >= 1.0 && r.is_finite()) {
            return domain(format!("grading exponent must be >= 1, got {r}"));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return domain(format!("horizon must be positive, got {t_end}"));
        }
        if r == 1.0 {
            return Self::uniform(t_end / n as f64, n);
        }
        let mut points: Vec<f64> = (0..=n)
            .map(|j| (j as f64 / n as f64).powf(r) * t_end)
            .collect();
        points[n] = t_end;
        Self::from_points(points)
    }

    /// Arbitrary mesh; the points must start at zero and increase strictly.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return domain("a mesh needs at least two points");
        }
        if points[0] != 0.0 {
            return domain(format!("mesh must start at t = 0, got {}", points[0]));
        }
        let mut steps = Vec::with_capacity(points.len() - 1);
        for (j, w) in points.windows(2).enumerate() {
            let tau = w[1] - w[0];
            if !(tau > 0.0 && tau.is_finite()) {
                return domain(format!(
                    "mesh points must increase strictly (t_{} = {}, t_{} = {})",
                    j,
                    w[0],
                    j + 1,
                    w[1]
                ));
            }
            steps.push(tau);
        }
        Ok(Self {
            points,
            steps,
            uniform_dt: None,
        })
    }

    /// Number of steps `N`.
    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn t(&self, j: usize) -> f64 {
        self.points[j]
    }

    /// Step `tau_j = t_j - t_{j-1}`, `1 <= j <= N`.
    pub fn tau(&self, j: usize) -> f64 {
        self.steps[j - 1]
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// Step size when the mesh was built as a uniform mesh.
    pub fn uniform_dt(&self) -> Option<f64> {
        self.uniform_dt
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform_dt.is_some()
    }

    /// `t_n - t_j` for `j <= n`; exact multiples of `dt` on uniform meshes.
    pub fn elapsed(&self, n: usize, j: usize) -> f64 {
        match self.uniform_dt {
            Some(dt) => (n - j) as f64 * dt,
            None => self.points[n] - self.points[j],
        }
    }

    pub fn id(&self) -> MeshId {
        let mut h = DefaultHasher::new();
        for p in &self.points {
            p.to_bits().hash(&mut h);
        }
        MeshId(h.finish())
    }
}

/// Graded time mesh `t_j = (j/N)^r T`.
pub fn graded_mesh(n: usize, r: f64, t_end: f64) -> Result<TimeMesh> {
    TimeMesh::graded(n, r, t_end)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    UniformL1,
    HalfL1,
    NonuniformL1,
    NonuniformHalfL1,
}

impl WeightKind {
    pub fn is_uniform(self) -> bool {
        matches!(self, WeightKind::UniformL1 | WeightKind::HalfL1)
    }
}

/// Convolution weights of one discrete Caputo derivative.
///
/// `values` are indexed as in the usual notation: `b_0..b_{n-1}` and
/// `b~_0..b~_n` for the uniform families, `d_{n,1}..d_{n,n}` and
/// `d^_{n,0}..d^_{n,n}` for the nonuniform ones.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    alpha: f64,
    kind: WeightKind,
    values: Vec<f64>,
    dt: Option<f64>,
    mesh_ref: Option<MeshId>,
}

impl WeightSequence {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> Option<f64> {
        self.dt
    }

    pub fn mesh_ref(&self) -> Option<MeshId> {
        self.mesh_ref
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multipliers `c_k` such that the derivative equals
    /// `sum_{k=1}^{m} c_k (phi^k - phi^{k-1})`, returned as `[c_1, .., c_m]`.
    pub fn difference_coefficients(&self) -> Vec<f64> {
        let m = self.values.len();
        match self.kind {
            WeightKind::UniformL1 | WeightKind::HalfL1 => {
                let dt = self.dt.expect("uniform weights carry dt");
                (1..=m).map(|k| self.values[m - k] / dt).collect()
            }
            WeightKind::NonuniformL1 | WeightKind::NonuniformHalfL1 => self.values.clone(),
        }
    }
}

fn uniform_l1_value(alpha: f64, j: usize) -> f64 {
    if alpha == 1.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    pow_increment(j as f64, 1.0, 1.0 - alpha)
}

fn half_l1_value(alpha: f64, j: usize) -> f64 {
    if alpha == 1.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    if j == 0 {
        0.5f64.powf(1.0 - alpha)
    } else {
        pow_increment(j as f64 - 0.5, 1.0, 1.0 - alpha)
    }
}

/// `b_0..b_{n-1}` on a uniform mesh.
pub fn l1_weights_uniform(alpha: f64, dt: f64, n: usize) -> Result<WeightSequence> {
    check_order(alpha)?;
    check_step(dt)?;
    if n == 0 {
        return domain("weight count must be at least 1");
    }
    let mut cache = UniformWeightCache::new(WeightKind::UniformL1, alpha, dt)?;
    Ok(cache.sequence(n))
}

/// `b~_0..b~_{n-1}` on a uniform mesh.
pub fn l1_half_weights_uniform(alpha: f64, dt: f64, n: usize) -> Result<WeightSequence> {
    check_order(alpha)?;
    check_step(dt)?;
    if n == 0 {
        return domain("weight count must be at least 1");
    }
    let mut cache = UniformWeightCache::new(WeightKind::HalfL1, alpha, dt)?;
    Ok(cache.sequence(n))
}

/// `d_{n,1}..d_{n,n}` on `mesh`, `1 <= n <= N`.
pub fn l1_weights_nonuniform(alpha: f64, mesh: &TimeMesh, n: usize) -> Result<WeightSequence> {
    check_order(alpha)?;
    nonuniform_weights(alpha, mesh, n)
}

/// `d^_{n,0}..d^_{n,n}` on `mesh`, `0 <= n <= N-1`.
pub fn l1_half_weights_nonuniform(
    alpha: f64,
    mesh: &TimeMesh,
    n: usize,
) -> Result<WeightSequence> {
    check_order(alpha)?;
    nonuniform_half_weights(alpha, mesh, n)
}

/// As [`l1_weights_nonuniform`], but also accepts the classical limit `alpha = 1`.
pub(crate) fn nonuniform_weights(alpha: f64, mesh: &TimeMesh, n: usize) -> Result<WeightSequence> {
    let big_n = mesh.num_steps();
    if n == 0 || n > big_n {
        return Err(Error::Index {
            index: n,
            min: 1,
            max: big_n,
        });
    }
    let beta = 1.0 - alpha;
    let g = gamma(2.0 - alpha);
    let values = (1..=n)
        .map(|j| {
            let tau = mesh.tau(j);
            if alpha == 1.0 {
                return if j == n { 1.0 / tau } else { 0.0 };
            }
            pow_increment(mesh.elapsed(n, j), tau, beta) / (g * tau)
        })
        .collect();
    Ok(WeightSequence {
        alpha,
        kind: WeightKind::NonuniformL1,
        values,
        dt: None,
        mesh_ref: Some(mesh.id()),
    })
}

pub(crate) fn nonuniform_half_weights(
    alpha: f64,
    mesh: &TimeMesh,
    n: usize,
) -> Result<WeightSequence> {
    let big_n = mesh.num_steps();
    if n + 1 > big_n {
        return Err(Error::Index {
            index: n,
            min: 0,
            max: big_n.saturating_sub(1),
        });
    }
    let beta = 1.0 - alpha;
    let scale = gamma(2.0 - alpha) * 2f64.powf(beta);
    let tau_next = mesh.tau(n + 1);
    let values = (0..=n)
        .map(|j| {
            let tau = mesh.tau(j + 1);
            if alpha == 1.0 {
                return if j == n { 1.0 / tau } else { 0.0 };
            }
            if j == n {
                tau_next.powf(beta) / (scale * tau)
            } else {
                // t_{n+1} + t_n - 2 t_{j+1} = tau_{n+1} + 2 (t_n - t_{j+1})
                let lower = tau_next + 2.0 * mesh.elapsed(n, j + 1);
                pow_increment(lower, 2.0 * tau, beta) / (scale * tau)
            }
        })
        .collect();
    Ok(WeightSequence {
        alpha,
        kind: WeightKind::NonuniformHalfL1,
        values,
        dt: None,
        mesh_ref: Some(mesh.id()),
    })
}

/// Append-only cache of uniform weights for a fixed `(alpha, dt)`.
///
/// `alpha = 1` is accepted and yields the backward-difference limit
/// `b_0 = 1`, `b_j = 0` for `j >= 1`.
#[derive(Clone, Debug)]
pub struct UniformWeightCache {
    kind: WeightKind,
    alpha: f64,
    dt: f64,
    scale: f64,
    values: Vec<f64>,
}

impl UniformWeightCache {
    pub fn new(kind: WeightKind, alpha: f64, dt: f64) -> Result<Self> {
        if !kind.is_uniform() {
            return domain("the cache only holds uniform weight families");
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("fractional order must lie in (0, 1], got {alpha}"));
        }
        check_step(dt)?;
        let scale = dt.powf(1.0 - alpha) / gamma(2.0 - alpha);
        Ok(Self {
            kind,
            alpha,
            dt,
            scale,
            values: Vec::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn extend_to(&mut self, n: usize) {
        for j in self.values.len()..n {
            let v = match self.kind {
                WeightKind::UniformL1 => uniform_l1_value(self.alpha, j),
                _ => half_l1_value(self.alpha, j),
            };
            self.values.push(self.scale * v);
        }
    }

    /// The first `n` weights.
    pub fn get(&mut self, n: usize) -> &[f64] {
        self.extend_to(n);
        &self.values[..n]
    }

    pub fn sequence(&mut self, n: usize) -> WeightSequence {
        let values = self.get(n).to_vec();
        WeightSequence {
            alpha: self.alpha,
            kind: self.kind,
            values,
            dt: Some(self.dt),
            mesh_ref: None,
        }
    }
}

fn check_history(len: usize, weights: &WeightSequence) -> Result<()> {
    if len != weights.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: weights.len() + 1,
            got: len,
        });
    }
    Ok(())
}

/// Discrete Caputo derivative of a scalar history, difference form.
pub fn apply_frac_derivative(history: &[f64], weights: &WeightSequence) -> Result<f64> {
    check_history(history.len(), weights)?;
    let coeffs = weights.difference_coefficients();
    Ok(coeffs
        .iter()
        .zip(history.windows(2))
        .map(|(c, w)| c * (w[1] - w[0]))
        .sum())
}

/// Same derivative evaluated through the history form
/// `c_m phi^m + sum_{k<m} (c_k - c_{k+1}) phi^k - c_1 phi^0`.
pub fn apply_frac_derivative_history_form(
    history: &[f64],
    weights: &WeightSequence,
) -> Result<f64> {
    check_history(history.len(), weights)?;
    let c = weights.difference_coefficients();
    let m = c.len();
    let mut acc = c[m - 1] * history[m] - c[0] * history[0];
    for k in 1..m {
        acc += (c[k - 1] - c[k]) * history[k];
    }
    Ok(acc)
}

/// Pointwise discrete Caputo derivative of a field history.
pub fn apply_frac_derivative_field(
    history: &[Field2D],
    weights: &WeightSequence,
) -> Result<Field2D> {
    check_history(history.len(), weights)?;
    let grid = history[0].grid();
    for f in history {
        f.check_grid(&grid)?;
    }
    let coeffs = weights.difference_coefficients();
    let mut out = vec![0.0; grid.len()];
    for (c, w) in coeffs.iter().zip(history.windows(2)) {
        for ((o, a), b) in out.iter_mut().zip(w[1].values()).zip(w[0].values()) {
            *o += c * (a - b);
        }
    }
    Ok(Field2D::from_values(grid, out))
}
