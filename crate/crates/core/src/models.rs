//! Phase-field models: energies, the quadratic/nonquadratic energy split,
//! variational derivatives and the linear operators used by the steppers.
//!
//! Every model is written as `d^a_t phi = gamma G mu` with
//! `mu = L phi + dE1(phi)`, where `L` is the symmetric nonnegative operator
//! of the quadratic energy part and `E1` the remaining nonquadratic part.
//!
//! | model         | `G`   | `L`          | `E1`                          | stabilizer |
//! |---------------|-------|--------------|-------------------------------|------------|
//! | AC            | `-1`  | `-eps^2 Lap` | `int F(phi)`                  | `S`        |
//! | CH            | `Lap` | `-eps^2 Lap` | `int F_L(phi)` (truncated)    | `S`        |
//! | MBE, slope    | `-1`  | `eps^2 Lap^2`| `int 1/4 (1 - |grad phi|^2)^2`| none       |
//! | MBE, no slope | `-1`  | `eps^2 Lap^2`| `int -1/2 ln(1 + |grad phi|^2)`| `-S Lap`  |

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::spectral::{Field2D, Spectral};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    AllenCahn,
    CahnHilliard,
    MbeSlope,
    /// Experimental: never exercised by the reference experiments.
    MbeNoSlope,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::AllenCahn => "ac",
            ModelKind::CahnHilliard => "ch",
            ModelKind::MbeSlope => "mbe_slope",
            ModelKind::MbeNoSlope => "mbe_noslope",
        }
    }

    pub fn is_mbe(self) -> bool {
        matches!(self, ModelKind::MbeSlope | ModelKind::MbeNoSlope)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ac" | "allen_cahn" => Ok(ModelKind::AllenCahn),
            "ch" | "cahn_hilliard" => Ok(ModelKind::CahnHilliard),
            "mbe_slope" | "mbe" => Ok(ModelKind::MbeSlope),
            "mbe_noslope" => Ok(ModelKind::MbeNoSlope),
            other => Err(Error::Config {
                key: "model".into(),
                msg: format!("unknown model `{other}` (ac, ch, mbe_slope, mbe_noslope)"),
            }),
        }
    }
}

/// Smallest admissible stabilization constant of the first-order scheme,
/// `None` for models without a stabilized scheme.
pub fn stabilization_threshold(kind: ModelKind, l_cap: f64) -> Option<f64> {
    match kind {
        ModelKind::AllenCahn => Some(2.0),
        ModelKind::CahnHilliard => Some(l_cap / 2.0),
        ModelKind::MbeNoSlope => Some(1.0 / 16.0),
        ModelKind::MbeSlope => None,
    }
}

/// Truncation point `M` of the Cahn--Hilliard nonlinearity: `f(phi) = phi^3 - phi`
/// is kept on `|phi| <= M` and continued linearly with slope `3M^2 - 1 = L`.
pub fn ch_truncation_threshold(l_cap: f64) -> f64 {
    ((l_cap + 1.0) / 3.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    kind: ModelKind,
    epsilon: f64,
    gamma: f64,
    s: f64,
    l_cap: f64,
    c0: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, epsilon: f64, gamma: f64, s: f64, l_cap: f64, c0: f64) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("gamma", gamma), ("C0", c0)] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive, got {v}"));
            }
        }
        if kind == ModelKind::CahnHilliard && !(l_cap > 1.0 && l_cap.is_finite()) {
            // M > 1 keeps the truncation away from the wells
            return domain(format!("L_cap must exceed 1, got {l_cap}"));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return domain(format!("S must be nonnegative, got {s}"));
        }
        if let Some(min) = stabilization_threshold(kind, l_cap) {
            if s < min {
                return Err(Error::Stabilization {
                    model: kind.to_string(),
                    s,
                    min,
                });
            }
        }
        Ok(Self {
            kind,
            epsilon,
            gamma,
            s,
            l_cap,
            c0,
        })
    }

    pub fn allen_cahn(epsilon: f64, gamma: f64, s: f64) -> Result<Self> {
        Self::new(ModelKind::AllenCahn, epsilon, gamma, s, 0.0, 1.0)
    }

    pub fn cahn_hilliard(epsilon: f64, gamma: f64, s: f64, l_cap: f64) -> Result<Self> {
        Self::new(ModelKind::CahnHilliard, epsilon, gamma, s, l_cap, 1.0)
    }

    pub fn mbe_slope(epsilon: f64, gamma: f64, c0: f64) -> Result<Self> {
        Self::new(ModelKind::MbeSlope, epsilon, gamma, 0.0, 0.0, c0)
    }

    pub fn mbe_noslope(epsilon: f64, gamma: f64, s: f64, c0: f64) -> Result<Self> {
        Self::new(ModelKind::MbeNoSlope, epsilon, gamma, s, 0.0, c0)
    }

    pub fn with_c0(self, c0: f64) -> Result<Self> {
        Self::new(self.kind, self.epsilon, self.gamma, self.s, self.l_cap, c0)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn stabilization(&self) -> f64 {
        self.s
    }

    pub fn l_cap(&self) -> f64 {
        self.l_cap
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Fourier symbol of `L`.
    pub fn l_symbol(&self, k2: f64) -> f64 {
        let e2 = self.epsilon * self.epsilon;
        if self.kind.is_mbe() {
            e2 * k2 * k2
        } else {
            e2 * k2
        }
    }

    /// Fourier symbol of the stabilization operator; zero for MBE with slope
    /// selection, which has no stabilized scheme.
    pub fn stabilizer_symbol(&self, k2: f64) -> f64 {
        match self.kind {
            ModelKind::AllenCahn | ModelKind::CahnHilliard => self.s,
            ModelKind::MbeNoSlope => self.s * k2,
            ModelKind::MbeSlope => 0.0,
        }
    }

    /// Fourier symbol of the nonpositive operator `G`.
    pub fn g_symbol(&self, k2: f64) -> f64 {
        match self.kind {
            ModelKind::CahnHilliard => -k2,
            _ => -1.0,
        }
    }

    /// Double-well potential (truncated for CH).
    pub fn potential(&self, phi: f64) -> f64 {
        let plain = |p: f64| 0.25 * (p * p - 1.0) * (p * p - 1.0);
        if self.kind != ModelKind::CahnHilliard {
            return plain(phi);
        }
        let m = ch_truncation_threshold(self.l_cap);
        if phi.abs() <= m {
            plain(phi)
        } else {
            let d = phi.abs() - m;
            plain(m) + (m * m * m - m) * d + 0.5 * self.l_cap * d * d
        }
    }

    /// Derivative of [`ModelSpec::potential`].
    pub fn potential_derivative(&self, phi: f64) -> f64 {
        if self.kind != ModelKind::CahnHilliard {
            return phi * phi * phi - phi;
        }
        let m = ch_truncation_threshold(self.l_cap);
        if phi.abs() <= m {
            phi * phi * phi - phi
        } else {
            phi.signum() * (m * m * m - m) + self.l_cap * (phi - phi.signum() * m)
        }
    }

    fn slope_density(&self, p2: f64) -> f64 {
        match self.kind {
            ModelKind::MbeSlope => 0.25 * (1.0 - p2) * (1.0 - p2),
            _ => -0.5 * p2.ln_1p(),
        }
    }

    /// Scalar factor `c` with `f_m(p) = c(|p|^2) p`.
    fn slope_flux_factor(&self, p2: f64) -> f64 {
        match self.kind {
            ModelKind::MbeSlope => 1.0 - p2,
            _ => 1.0 / (1.0 + p2),
        }
    }

    /// `1/2 <phi, L phi>`, evaluated spectrally.
    pub fn quadratic_part(&self, sp: &Spectral, phi: &Field2D) -> Result<f64> {
        Ok(0.5 * sp.weighted_spectral_norm(phi, |k2| self.l_symbol(k2))?)
    }

    /// Nonquadratic energy part `E1`.
    pub fn nonquadratic_part(&self, sp: &Spectral, phi: &Field2D) -> Result<f64> {
        phi.check_grid(&sp.grid())?;
        if self.kind.is_mbe() {
            let (gx, gy) = sp.gradient(phi)?;
            let cell = phi.grid().cell_area();
            Ok(gx
                .values()
                .iter()
                .zip(gy.values())
                .map(|(a, b)| self.slope_density(a * a + b * b))
                .sum::<f64>()
                * cell)
        } else {
            Ok(phi.map(|p| self.potential(p)).integral())
        }
    }

    pub fn classical_energy(&self, sp: &Spectral, phi: &Field2D) -> Result<f64> {
        Ok(self.quadratic_part(sp, phi)? + self.nonquadratic_part(sp, phi)?)
    }

    /// Variational derivative of `E1`.
    pub fn d_e1(&self, sp: &Spectral, phi: &Field2D) -> Result<Field2D> {
        phi.check_grid(&sp.grid())?;
        if self.kind.is_mbe() {
            let (mut gx, mut gy) = sp.gradient(phi)?;
            for (a, b) in gx.values_mut().iter_mut().zip(gy.values_mut()) {
                let c = self.slope_flux_factor(*a * *a + *b * *b);
                *a *= c;
                *b *= c;
            }
            sp.divergence(&gx, &gy)
        } else {
            Ok(phi.map(|p| self.potential_derivative(p)))
        }
    }

    /// `L phi`.
    pub fn apply_l(&self, sp: &Spectral, phi: &Field2D) -> Result<Field2D> {
        let op = sp.operator(|k2| self.l_symbol(k2));
        sp.apply_diagonal(&op, phi)
    }

    /// `G f`.
    pub fn apply_g(&self, sp: &Spectral, f: &Field2D) -> Result<Field2D> {
        match self.kind {
            ModelKind::CahnHilliard => sp.laplacian(f),
            _ => {
                f.check_grid(&sp.grid())?;
                Ok(f.map(|v| -v))
            }
        }
    }

    /// `<G^{-1} f, g>`; for CH the zero mode is excluded and `f` must have
    /// zero mean.
    pub fn apply_g_inverse_inner(&self, sp: &Spectral, f: &Field2D, g: &Field2D) -> Result<f64> {
        match self.kind {
            ModelKind::CahnHilliard => {
                let mean = f.mean();
                let scale = f.max_abs().max(f64::MIN_POSITIVE);
                if mean.abs() > 1e-10 * scale {
                    return Err(Error::NonZeroMean(mean));
                }
                g.check_grid(&f.grid())?;
                let fs = sp.forward(f)?;
                let gs = sp.forward(g)?;
                let grid = sp.grid();
                let n = grid.len() as f64;
                let sum: f64 = fs
                    .iter()
                    .zip(&gs)
                    .enumerate()
                    .skip(1)
                    .map(|(idx, (a, b))| {
                        let k2 = sp.k_squared(idx / grid.ny, idx % grid.ny);
                        -(a * b.conj()).re / k2
                    })
                    .sum();
                Ok(sum * grid.area() / (n * n))
            }
            _ => Ok(-f.inner(g)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn all_models() -> Vec<ModelSpec> {
        vec![
            ModelSpec::allen_cahn(0.1, 1.0, 2.0).unwrap(),
            ModelSpec::cahn_hilliard(0.1, 0.1, 4.0, 8.0).unwrap(),
            ModelSpec::mbe_slope(0.1f64.sqrt(), 1.0, 1.0).unwrap(),
            ModelSpec::mbe_noslope(0.1f64.sqrt(), 1.0, 0.0625, 5.0).unwrap(),
        ]
    }

    /// Random trigonometric polynomial with low modes only.
    fn random_smooth(grid: Grid, rng: &mut ChaCha8Rng, amp: f64) -> Field2D {
        let terms: Vec<(f64, f64, f64, f64)> = (0..6)
            .map(|_| {
                (
                    rng.gen_range(-amp..amp),
                    rng.gen_range(0..4) as f64,
                    rng.gen_range(0..4) as f64,
                    rng.gen_range(0.0..2.0 * PI),
                )
            })
            .collect();
        Field2D::from_fn(grid, |x, y| {
            terms
                .iter()
                .map(|&(a, mx, my, ph)| {
                    a * (2.0 * PI * (mx * x / grid.lx + my * y / grid.ly) + ph).cos()
                })
                .sum()
        })
    }

    #[test]
    fn stabilization_thresholds_enforced() {
        assert!(matches!(
            ModelSpec::allen_cahn(0.1, 1.0, 1.9),
            Err(Error::Stabilization { .. })
        ));
        assert!(ModelSpec::allen_cahn(0.1, 1.0, 2.0).is_ok());
        assert!(ModelSpec::cahn_hilliard(0.1, 0.1, 3.9, 8.0).is_err());
        assert!(ModelSpec::cahn_hilliard(0.1, 0.1, 4.0, 8.0).is_ok());
        assert!(ModelSpec::mbe_noslope(0.1, 1.0, 0.06, 1.0).is_err());
        assert!(ModelSpec::mbe_noslope(0.1, 1.0, 0.0625, 1.0).is_ok());
        assert!(ModelSpec::mbe_slope(0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn constant_field_energies() {
        let grid = Grid::square(16, 2.0).unwrap();
        let sp = Spectral::new(grid);
        let ac = ModelSpec::allen_cahn(0.1, 1.0, 2.0).unwrap();
        let one = Field2D::constant(grid, 1.0);
        assert!(ac.classical_energy(&sp, &one).unwrap().abs() < 1e-14);
        let zero = Field2D::zeros(grid);
        assert_relative_eq!(ac.classical_energy(&sp, &zero).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(ac.quadratic_part(&sp, &zero).unwrap(), 0.0);
        assert_relative_eq!(ac.nonquadratic_part(&sp, &zero).unwrap(), 1.0, max_relative = 1e-14);

        let grid = Grid::square(16, 2.0 * PI).unwrap();
        let sp = Spectral::new(grid);
        let mbe = ModelSpec::mbe_slope(0.1f64.sqrt(), 1.0, 1.0).unwrap();
        let c = Field2D::constant(grid, 0.3);
        assert_relative_eq!(mbe.classical_energy(&sp, &c).unwrap(), PI * PI, max_relative = 1e-13);
    }

    #[test]
    fn mbe_quadratic_part_closed_form() {
        // phi = 0.1 sin(3x) sin(2y): Lap phi = -13 phi, int phi^2 = 0.01 pi^2
        let grid = Grid::square(32, 2.0 * PI).unwrap();
        let sp = Spectral::new(grid);
        let eps2: f64 = 0.1;
        let mbe = ModelSpec::mbe_slope(eps2.sqrt(), 1.0, 1.0).unwrap();
        let phi = Field2D::from_fn(grid, |x, y| 0.1 * (3.0 * x).sin() * (2.0 * y).sin());
        let expect = 0.5 * eps2 * 169.0 * 0.01 * PI * PI;
        assert_relative_eq!(mbe.quadratic_part(&sp, &phi).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn gradient_term_matches_real_space_form() {
        let grid = Grid::square(32, 2.0).unwrap();
        let sp = Spectral::new(grid);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = random_smooth(grid, &mut rng, 0.5);
        let ac = ModelSpec::allen_cahn(0.1, 1.0, 2.0).unwrap();
        let (gx, gy) = sp.gradient(&phi).unwrap();
        let direct = 0.5 * 0.01 * (gx.norm_sq() + gy.norm_sq());
        assert_relative_eq!(ac.quadratic_part(&sp, &phi).unwrap(), direct, max_relative = 1e-11);
        let e = ac.classical_energy(&sp, &phi).unwrap();
        let split = ac.quadratic_part(&sp, &phi).unwrap() + ac.nonquadratic_part(&sp, &phi).unwrap();
        assert_relative_eq!(e, split, max_relative = 1e-11);
    }

    #[test]
    fn d_e1_vanishes_at_zero() {
        let grid = Grid::square(8, 2.0).unwrap();
        let sp = Spectral::new(grid);
        for m in all_models() {
            assert!(m.d_e1(&sp, &Field2D::zeros(grid)).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn d_e1_matches_central_differences() {
        let h = 1e-5;
        for m in all_models() {
            let l = if m.kind().is_mbe() { 2.0 * PI } else { 2.0 };
            let grid = Grid::square(16, l).unwrap();
            let sp = Spectral::new(grid);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..3 {
                let phi = random_smooth(grid, &mut rng, 0.6);
                let psi = random_smooth(grid, &mut rng, 1.0);
                let plus = Field2D::lin_comb(1.0, &phi, h, &psi).unwrap();
                let minus = Field2D::lin_comb(1.0, &phi, -h, &psi).unwrap();
                let fd = (m.nonquadratic_part(&sp, &plus).unwrap()
                    - m.nonquadratic_part(&sp, &minus).unwrap())
                    / (2.0 * h);
                let exact = m.d_e1(&sp, &phi).unwrap().inner(&psi).unwrap();
                assert_relative_eq!(fd, exact, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn ch_truncation() {
        assert_relative_eq!(ch_truncation_threshold(8.0), 3f64.sqrt(), max_relative = 1e-15);
        let ch = ModelSpec::cahn_hilliard(0.1, 0.1, 4.0, 8.0).unwrap();
        let h = 1e-6;
        let mut worst = 0.0f64;
        for i in 0..=20_000 {
            let p = -10.0 + i as f64 * 1e-3;
            let slope = (ch.potential_derivative(p + h) - ch.potential_derivative(p - h)) / (2.0 * h);
            worst = worst.max(slope.abs());
            // F_L' = f_L
            let fd = (ch.potential(p + h) - ch.potential(p - h)) / (2.0 * h);
            assert!((fd - ch.potential_derivative(p)).abs() < 1e-6 * (1.0 + fd.abs()));
        }
        assert!(worst <= 8.0 + 1e-6, "max |f_L'| = {worst}");
        // exact slopes on both branches
        let m = 3f64.sqrt();
        for p in [m + 0.5, 4.0, -m - 0.1, -9.0] {
            let s = (ch.potential_derivative(p + 0.01) - ch.potential_derivative(p - 0.01)) / 0.02;
            assert_relative_eq!(s, 8.0, max_relative = 1e-9);
        }
        assert!((ch.potential_derivative(0.5) - (0.125 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn g_operators() {
        let grid = Grid::square(16, 2.0).unwrap();
        let sp = Spectral::new(grid);
        let k = PI;
        let f = Field2D::from_fn(grid, |x, _| (k * x).sin());
        let ac = ModelSpec::allen_cahn(0.1, 1.0, 2.0).unwrap();
        assert_eq!(ac.apply_g(&sp, &f).unwrap(), f.map(|v| -v));
        let ch = ModelSpec::cahn_hilliard(0.1, 0.1, 4.0, 8.0).unwrap();
        let g = ch.apply_g(&sp, &f).unwrap();
        for (a, b) in g.values().iter().zip(f.values()) {
            assert!((a + k * k * b).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut r = Field2D::from_values(
                grid,
                (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            );
            let mean = r.mean();
            r.values_mut().iter_mut().for_each(|v| *v -= mean);
            assert!(ac.apply_g_inverse_inner(&sp, &r, &r).unwrap() <= 0.0);
            assert!(ch.apply_g_inverse_inner(&sp, &r, &r).unwrap() <= 0.0);
        }
        let shifted = f.map(|v| v + 1.0);
        assert!(matches!(
            ch.apply_g_inverse_inner(&sp, &shifted, &f),
            Err(Error::NonZeroMean(_))
        ));
        // G^{-1} G f = f for zero-mean f
        let back = ch.apply_g_inverse_inner(&sp, &g, &f).unwrap();
        assert_relative_eq!(back, f.norm_sq(), max_relative = 1e-12);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("AC".parse::<ModelKind>().unwrap(), ModelKind::AllenCahn);
        assert_eq!("mbe_noslope".parse::<ModelKind>().unwrap(), ModelKind::MbeNoSlope);
        assert!("foo".parse::<ModelKind>().is_err());
    }
}
