//! Dense reference solver: spectral differentiation as explicit matrices,
//! every implicit step as one LU solve. Shares nothing with the library's
//! FFT path or its rank-one SAV reduction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use fracphase::frac_kernel::gamma;
use fracphase::models::ModelKind;
use fracphase::schemes::SchemeKind;

#[derive(Clone, Copy, Debug)]
pub struct DenseModel {
    pub kind: ModelKind,
    pub epsilon: f64,
    pub gamma: f64,
    pub s: f64,
    pub l_cap: f64,
    pub c0: f64,
}

/// Periodic first or second derivative on `n` points of a period `l`.
/// The first derivative drops the Nyquist mode, the second keeps it.
fn diff_1d(n: usize, l: f64, order: u32) -> DMatrix<f64> {
    let base = 2.0 * PI / l;
    DMatrix::from_fn(n, n, |j, p| {
        let d = j as f64 - p as f64;
        let mut acc = 0.0;
        for m in 0..n {
            let km = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            let phase = 2.0 * PI * km * d / n as f64;
            acc += match order {
                1 if 2 * m == n => 0.0,
                // Re(i k e^{i phase})
                1 => -base * km * phase.sin(),
                _ => -(base * km).powi(2) * phase.cos(),
            };
        }
        acc / n as f64
    })
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    DMatrix::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

pub struct DenseSolver {
    pub model: DenseModel,
    pub alpha: f64,
    pub cell: f64,
    dx: DMatrix<f64>,
    dy: DMatrix<f64>,
    l: DMatrix<f64>,
    g: DMatrix<f64>,
    stab: DMatrix<f64>,
}

impl DenseSolver {
    /// Field index `ix * ny + iy`, as in the library.
    pub fn new(model: DenseModel, alpha: f64, nx: usize, ny: usize, lx: f64, ly: f64) -> Self {
        let (ix, iy) = (DMatrix::identity(nx, nx), DMatrix::identity(ny, ny));
        let dx = kron(&diff_1d(nx, lx, 1), &iy);
        let dy = kron(&ix, &diff_1d(ny, ly, 1));
        let lap = kron(&diff_1d(nx, lx, 2), &iy) + kron(&ix, &diff_1d(ny, ly, 2));
        let id = DMatrix::identity(nx * ny, nx * ny);
        let e2 = model.epsilon * model.epsilon;
        let mbe = matches!(model.kind, ModelKind::MbeSlope | ModelKind::MbeNoSlope);
        let l = if mbe { &lap * &lap * e2 } else { &lap * -e2 };
        let g = if model.kind == ModelKind::CahnHilliard { lap.clone() } else { -&id };
        let stab = match model.kind {
            ModelKind::AllenCahn | ModelKind::CahnHilliard => &id * model.s,
            ModelKind::MbeNoSlope => &lap * -model.s,
            ModelKind::MbeSlope => DMatrix::zeros(nx * ny, nx * ny),
        };
        Self {
            model,
            alpha,
            cell: lx * ly / (nx * ny) as f64,
            dx,
            dy,
            l,
            g,
            stab,
        }
    }

    fn slope_factor(&self, p2: f64) -> (f64, f64) {
        // (density, flux factor)
        match self.model.kind {
            ModelKind::MbeSlope => (0.25 * (1.0 - p2).powi(2), 1.0 - p2),
            _ => (-0.5 * (1.0 + p2).ln(), 1.0 / (1.0 + p2)),
        }
    }

    fn well(&self, p: f64) -> (f64, f64) {
        let plain = |p: f64| (0.25 * (p * p - 1.0).powi(2), p * p * p - p);
        if self.model.kind != ModelKind::CahnHilliard {
            return plain(p);
        }
        let m = ((self.model.l_cap + 1.0) / 3.0).sqrt();
        if p.abs() <= m {
            return plain(p);
        }
        let (fm, dfm) = plain(m);
        let d = p.abs() - m;
        (fm + dfm * d + 0.5 * self.model.l_cap * d * d, p.signum() * (dfm + self.model.l_cap * d))
    }

    pub fn e1(&self, phi: &DVector<f64>) -> f64 {
        match self.model.kind {
            ModelKind::MbeSlope | ModelKind::MbeNoSlope => {
                let (gx, gy) = (&self.dx * phi, &self.dy * phi);
                gx.iter().zip(gy.iter()).map(|(a, b)| self.slope_factor(a * a + b * b).0).sum::<f64>() * self.cell
            }
            _ => phi.iter().map(|&p| self.well(p).0).sum::<f64>() * self.cell,
        }
    }

    pub fn de1(&self, phi: &DVector<f64>) -> DVector<f64> {
        match self.model.kind {
            ModelKind::MbeSlope | ModelKind::MbeNoSlope => {
                let (mut gx, mut gy) = (&self.dx * phi, &self.dy * phi);
                for i in 0..gx.len() {
                    let c = self.slope_factor(gx[i] * gx[i] + gy[i] * gy[i]).1;
                    gx[i] *= c;
                    gy[i] *= c;
                }
                &self.dx * gx + &self.dy * gy
            }
            _ => phi.map(|p| self.well(p).1),
        }
    }

    /// `c_1..c_m` of the step `m - 1 -> m`; `half` evaluates at the midpoint
    /// of the last interval.
    fn coefficients(&self, t: &[f64], m: usize, half: bool) -> Vec<f64> {
        let beta = 1.0 - self.alpha;
        let g = gamma(2.0 - self.alpha);
        let target = if half { 0.5 * (t[m - 1] + t[m]) } else { t[m] };
        (1..=m)
            .map(|k| {
                let tau = t[k] - t[k - 1];
                let upper = (target - t[k - 1]).powf(beta);
                let lower = if k == m { 0.0 } else { (target - t[k]).powf(beta) };
                (upper - lower) / (g * tau)
            })
            .collect()
    }

    /// `num_steps` steps from `phi0` on the mesh `t`; returns every field and
    /// the auxiliary variable history (empty for the stabilized scheme).
    pub fn run(
        &self,
        scheme: SchemeKind,
        phi0: DVector<f64>,
        t: &[f64],
        num_steps: usize,
    ) -> (Vec<DVector<f64>>, Vec<f64>) {
        let n_pts = phi0.len();
        let gam = self.model.gamma;
        let mut hist = vec![phi0];
        let mut r = Vec::new();
        if scheme != SchemeKind::StabilizedL1 {
            r.push((self.e1(&hist[0]) + self.model.c0).sqrt());
        }
        for m in 1..=num_steps {
            let c = self.coefficients(t, m, scheme == SchemeKind::L1Sav);
            let phi_n = &hist[m - 1];
            let mut known = phi_n * c[m - 1];
            for k in 1..m {
                known -= (&hist[k] - &hist[k - 1]) * c[k - 1];
            }
            let gl = &self.g * &self.l * gam;
            let next = match scheme {
                SchemeKind::StabilizedL1 => {
                    let a = DMatrix::identity(n_pts, n_pts) * c[m - 1] - &self.g * (&self.l + &self.stab) * gam;
                    let rhs = known + &self.g * (self.de1(phi_n) - &self.stab * phi_n) * gam;
                    a.lu().solve(&rhs).expect("nonsingular")
                }
                SchemeKind::SavFirstOrder | SchemeKind::L1Sav => {
                    let half = scheme == SchemeKind::L1Sav;
                    let point = if half {
                        let prev = if m >= 2 { &hist[m - 2] } else { &hist[0] };
                        phi_n * 1.5 - prev * 0.5
                    } else {
                        phi_n.clone()
                    };
                    let b = self.de1(&point) / (self.e1(&point) + self.model.c0).sqrt();
                    let w = if half { 0.5 } else { 1.0 };
                    let gb = &self.g * &b * gam;
                    // unknowns (phi, r)
                    let mut a = DMatrix::zeros(n_pts + 1, n_pts + 1);
                    let block = DMatrix::identity(n_pts, n_pts) * c[m - 1] - &gl * w;
                    a.view_mut((0, 0), (n_pts, n_pts)).copy_from(&block);
                    for i in 0..n_pts {
                        a[(i, n_pts)] = -w * gb[i];
                        a[(n_pts, i)] = -0.5 * self.cell * b[i];
                    }
                    a[(n_pts, n_pts)] = 1.0;
                    let r_n = r[m - 1];
                    let mut rhs = DVector::zeros(n_pts + 1);
                    let mut top = known;
                    if half {
                        top += &gl * phi_n * 0.5 + &gb * (0.5 * r_n);
                    }
                    rhs.rows_mut(0, n_pts).copy_from(&top);
                    rhs[n_pts] = r_n - 0.5 * self.cell * b.dot(phi_n);
                    let x = a.lu().solve(&rhs).expect("nonsingular");
                    r.push(x[n_pts]);
                    x.rows(0, n_pts).into_owned()
                }
            };
            hist.push(next);
        }
        (hist, r)
    }
}
