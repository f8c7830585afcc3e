//! Time steppers for `D^alpha phi = gamma G mu`.
//!
//! Every scheme is linearly implicit: one step costs one or two diagonal
//! solves in Fourier space plus an `O(n)` pass over the stored history.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frac_kernel::{
    apply_frac_derivative_field, nonuniform_half_weights, nonuniform_weights, TimeMesh,
    UniformWeightCache, WeightKind, WeightSequence,
};
use crate::models::{ModelKind, ModelSpec};
use crate::spectral::{Field2D, Grid, Spectral};

pub use crate::frac_kernel::graded_mesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// First-order stabilized L1 scheme.
    StabilizedL1,
    /// First-order SAV scheme with L1 time stepping.
    SavFirstOrder,
    /// Half-point L1 with Crank-Nicolson in `L` and extrapolated SAV.
    L1Sav,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::StabilizedL1 => "stab_l1",
            SchemeKind::SavFirstOrder => "sav1",
            SchemeKind::L1Sav => "l1_sav",
        }
    }

    pub fn is_sav(self) -> bool {
        !matches!(self, SchemeKind::StabilizedL1)
    }

    /// Whether the time derivative is taken at half points.
    pub fn is_half_point(self) -> bool {
        matches!(self, SchemeKind::L1Sav)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stab_l1" | "stabilized_l1" => Ok(SchemeKind::StabilizedL1),
            "sav1" | "sav" => Ok(SchemeKind::SavFirstOrder),
            "l1_sav" | "l1sav" => Ok(SchemeKind::L1Sav),
            other => Err(Error::Config {
                key: "scheme".into(),
                msg: format!("unknown scheme `{other}` (expected stab_l1, sav1 or l1_sav)"),
            }),
        }
    }
}

/// Solution history `phi^0..phi^n` on a fixed time mesh, plus the SAV
/// scalars `r^0..r^n` for SAV-type schemes.
#[derive(Clone, Debug)]
pub struct SchemeState {
    history: Vec<Field2D>,
    r_history: Option<Vec<f64>>,
    mesh: TimeMesh,
}

impl SchemeState {
    /// Starts at `phi0`; SAV schemes get `r^0 = sqrt(E1(phi^0) + C0)`.
    pub fn new(
        phi0: Field2D,
        mesh: TimeMesh,
        scheme: SchemeKind,
        model: &ModelSpec,
        sp: &Spectral,
    ) -> Result<Self> {
        phi0.check_grid(&sp.grid())?;
        let r_history = if scheme.is_sav() {
            let shift = model.nonquadratic_part(sp, &phi0)? + model.c0();
            if !(shift > 0.0) {
                return Err(Error::SavShift(shift));
            }
            Some(vec![shift.sqrt()])
        } else {
            None
        };
        Ok(Self {
            history: vec![phi0],
            r_history,
            mesh,
        })
    }

    /// Index `n` of the newest field.
    pub fn step_index(&self) -> usize {
        self.history.len() - 1
    }

    pub fn history(&self) -> &[Field2D] {
        &self.history
    }

    pub fn current(&self) -> &Field2D {
        self.history.last().expect("history is never empty")
    }

    pub fn r_history(&self) -> Option<&[f64]> {
        self.r_history.as_deref()
    }

    pub fn r_current(&self) -> Option<f64> {
        self.r_history.as_ref().map(|r| *r.last().expect("nonempty"))
    }

    pub fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    pub fn time(&self) -> f64 {
        self.mesh.t(self.step_index())
    }

    pub fn is_finished(&self) -> bool {
        self.step_index() >= self.mesh.num_steps()
    }

    /// `1/2 <L phi, phi> + r^2 - C0`, which equals the classical energy at
    /// `t = 0`. `None` for non-SAV states.
    pub fn modified_energy(&self, model: &ModelSpec, sp: &Spectral) -> Result<Option<f64>> {
        match self.r_current() {
            None => Ok(None),
            Some(r) => Ok(Some(model.quadratic_part(sp, self.current())? + r * r - model.c0())),
        }
    }

    fn push(&mut self, phi: Field2D, r: Option<f64>) {
        self.history.push(phi);
        if let (Some(rs), Some(r)) = (self.r_history.as_mut(), r) {
            rs.push(r);
        }
    }
}

/// Diagnostics of one step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepReport {
    /// Relative max-norm residual of the discrete equation, when requested.
    pub residual: Option<f64>,
    /// `theta` of the rank-one reduction (SAV schemes).
    pub theta: Option<f64>,
}

/// Advances [`SchemeState`]s of one model with one scheme and order.
#[derive(Clone, Debug)]
pub struct Stepper {
    model: ModelSpec,
    scheme: SchemeKind,
    alpha: f64,
    sp: Spectral,
    cache: Option<UniformWeightCache>,
    nonuniform_weights: bool,
    check_residuals: bool,
    dealias: bool,
}

impl Stepper {
    /// `alpha = 1` runs the classical limit of each scheme.
    pub fn new(model: ModelSpec, scheme: SchemeKind, alpha: f64, grid: Grid) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("fractional order must lie in (0, 1], got {alpha}")));
        }
        if scheme == SchemeKind::StabilizedL1 && model.kind() == ModelKind::MbeSlope {
            return Err(Error::UnsupportedModel {
                model: model.kind().name().into(),
                scheme: scheme.name().into(),
            });
        }
        Ok(Self {
            model,
            scheme,
            alpha,
            sp: Spectral::new(grid),
            cache: None,
            nonuniform_weights: false,
            check_residuals: false,
            dealias: false,
        })
    }

    /// Use the nonuniform weights even when the mesh is uniform.
    pub fn with_nonuniform_weights(mut self, on: bool) -> Self {
        self.nonuniform_weights = on;
        self
    }

    /// Evaluate the residual of the discrete equation after each step.
    pub fn with_residual_checks(mut self, on: bool) -> Self {
        self.check_residuals = on;
        self
    }

    /// Apply the two-thirds filter to the explicit nonlinear term. Off by
    /// default; with it on the stabilized energy laws are no longer exact.
    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    fn nonlinear_force(&self, phi: &Field2D) -> Result<Field2D> {
        let f = self.model.d_e1(&self.sp, phi)?;
        if self.dealias {
            self.sp.dealias(&f)
        } else {
            Ok(f)
        }
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spectral(&self) -> &Spectral {
        &self.sp
    }

    /// Fresh state at `phi0` for this stepper's scheme.
    pub fn init_state(&self, phi0: Field2D, mesh: TimeMesh) -> Result<SchemeState> {
        SchemeState::new(phi0, mesh, self.scheme, &self.model, &self.sp)
    }

    /// One step with the configured scheme, choosing uniform weights when
    /// the mesh is uniform.
    pub fn step(&mut self, state: &mut SchemeState) -> Result<StepReport> {
        let nonuniform = self.nonuniform_weights || !state.mesh.is_uniform();
        match (self.scheme, nonuniform) {
            (SchemeKind::StabilizedL1, false) => self.step_stabilized_l1(state),
            (SchemeKind::StabilizedL1, true) => self.step_stabilized_l1_nonuniform(state),
            (SchemeKind::SavFirstOrder, false) => self.step_sav_first_order(state),
            (SchemeKind::SavFirstOrder, true) => self.step_sav_first_order_nonuniform(state),
            (SchemeKind::L1Sav, false) => self.step_l1_sav(state),
            (SchemeKind::L1Sav, true) => self.step_l1_sav_nonuniform(state),
        }
    }

    /// Steps until the mesh is exhausted, calling `observe` after each step.
    pub fn run(
        &mut self,
        state: &mut SchemeState,
        mut observe: impl FnMut(&SchemeState, &StepReport) -> Result<()>,
    ) -> Result<()> {
        while !state.is_finished() {
            let report = self.step(state)?;
            observe(state, &report)?;
        }
        Ok(())
    }

    pub fn step_stabilized_l1(&mut self, state: &mut SchemeState) -> Result<StepReport> {
        self.expect_scheme(SchemeKind::StabilizedL1)?;
        let w = self.uniform_weights(state, WeightKind::UniformL1)?;
        self.stabilized_step(state, w)
    }

    pub fn step_stabilized_l1_nonuniform(&mut self, state: &mut SchemeState) -> Result<StepReport> {
        self.expect_scheme(SchemeKind::StabilizedL1)?;
        let n = self.next_step(state)?;
        let w = nonuniform_weights(self.alpha, &state.mesh, n + 1)?;
        self.stabilized_step(state, w)
    }

    pub fn step_sav_first_order(&mut self, state: &mut SchemeState) -> Result<StepReport> {
        self.expect_scheme(SchemeKind::SavFirstOrder)?;
        let w = self.uniform_weights(state, WeightKind::UniformL1)?;
        self.sav_step(state, w)
    }

    pub fn step_sav_first_order_nonuniform(&mut self, state: &mut SchemeState) -> Result<StepReport> {
        self.expect_scheme(SchemeKind::SavFirstOrder)?;
        let n = self.next_step(state)?;
        let w = nonuniform_weights(self.alpha, &state.mesh, n + 1)?;
        self.sav_step(state, w)
    }

    pub fn step_l1_sav(&mut self, state: &mut SchemeState) -> Result<StepReport> {
        self.expect_scheme(SchemeKind::L1Sav)?;
        let w = self.uniform_weights(state, WeightKind::HalfL1)?;
        self.sav_step(state, w)
    }

    pub fn step_l1_sav_nonuniform(&mut self, state: &mut SchemeState) -> Result<StepReport> {
        self.expect_scheme(SchemeKind::L1Sav)?;
        let n = self.next_step(state)?;
        let w = nonuniform_half_weights(self.alpha, &state.mesh, n)?;
        self.sav_step(state, w)
    }

    fn expect_scheme(&self, scheme: SchemeKind) -> Result<()> {
        if self.scheme != scheme {
            return Err(Error::Domain(format!(
                "stepper is configured for {}, not {}",
                self.scheme, scheme
            )));
        }
        Ok(())
    }

    fn next_step(&self, state: &SchemeState) -> Result<usize> {
        let n = state.step_index();
        if n >= state.mesh.num_steps() {
            return Err(Error::MeshExhausted {
                requested: n + 1,
                available: state.mesh.num_steps(),
            });
        }
        if state.r_history.is_some() != self.scheme.is_sav() {
            return Err(Error::Domain(format!("state was not initialized for {}", self.scheme)));
        }
        state.current().check_grid(&self.sp.grid())?;
        Ok(n)
    }

    /// `n + 1` weights for the step `n -> n + 1`.
    fn uniform_weights(&mut self, state: &SchemeState, kind: WeightKind) -> Result<WeightSequence> {
        let n = self.next_step(state)?;
        let dt = state.mesh.uniform_dt().ok_or_else(|| {
            Error::Domain("uniform stepper requires a uniform mesh".into())
        })?;
        let stale = match &self.cache {
            Some(c) => c.dt() != dt,
            None => true,
        };
        if stale {
            self.cache = Some(UniformWeightCache::new(kind, self.alpha, dt)?);
        }
        Ok(self.cache.as_mut().expect("set above").sequence(n + 1))
    }

    fn stabilized_step(&mut self, state: &mut SchemeState, w: WeightSequence) -> Result<StepReport> {
        let (model, sp) = (&self.model, &self.sp);
        let gamma = model.gamma();
        let phi_n = state.current();
        let coeffs = w.difference_coefficients();
        let (c_lead, mut rhs) = history_rhs(&state.history, &coeffs);

        let stab = sp.apply_diagonal(&sp.operator(|k2| model.stabilizer_symbol(k2)), phi_n)?;
        let force = self.nonlinear_force(phi_n)?.sub(&stab)?;
        rhs.axpy(gamma, &model.apply_g(sp, &force)?)?;

        let op = sp.operator(|k2| {
            c_lead - gamma * model.g_symbol(k2) * (model.l_symbol(k2) + model.stabilizer_symbol(k2))
        });
        let phi = sp.solve_diagonal(&op, &rhs)?;

        let residual = if self.check_residuals {
            // mu = L phi^{n+1} + dE1(phi^n) + S~ (phi^{n+1} - phi^n)
            let mut mu = model.apply_l(sp, &phi)?;
            mu.axpy(1.0, &force)?;
            mu.axpy(1.0, &sp.apply_diagonal(&sp.operator(|k2| model.stabilizer_symbol(k2)), &phi)?)?;
            Some(self.residual(state, &phi, &w, &mu)?)
        } else {
            None
        };
        state.push(phi, None);
        Ok(StepReport {
            residual,
            theta: None,
        })
    }

    /// Rank-one reduced SAV step. The first-order scheme evaluates the
    /// nonlinearity at `phi^n`; the half-point scheme at
    /// `3/2 phi^n - 1/2 phi^{n-1}` (with `phi^{-1} = phi^0`) and treats `L`
    /// by Crank-Nicolson.
    fn sav_step(&mut self, state: &mut SchemeState, w: WeightSequence) -> Result<StepReport> {
        let (model, sp) = (&self.model, &self.sp);
        let gamma = model.gamma();
        let half = self.scheme.is_half_point();
        let n = state.step_index();
        let phi_n = state.current();
        let r_n = state.r_current().expect("SAV state");

        let point = if half {
            let prev = &state.history[n.saturating_sub(1)];
            Field2D::lin_comb(1.5, phi_n, -0.5, prev)?
        } else {
            phi_n.clone()
        };
        let shift = model.nonquadratic_part(sp, &point)? + model.c0();
        if !(shift > 0.0) {
            return Err(Error::SavShift(shift));
        }
        let mut b = self.nonlinear_force(&point)?;
        b.scale(1.0 / shift.sqrt());
        let mut wfield = model.apply_g(sp, &b)?;
        wfield.scale(gamma);

        // theta = kappa <b, phi^{n+1}>
        let (l_weight, kappa) = if half { (0.5, 0.25) } else { (1.0, 0.5) };
        let coeffs = w.difference_coefficients();
        let (c_lead, mut rhs) = history_rhs(&state.history, &coeffs);
        if half {
            let glphi = sp.apply_diagonal(&sp.operator(|k2| model.g_symbol(k2) * model.l_symbol(k2)), phi_n)?;
            rhs.axpy(0.5 * gamma, &glphi)?;
        }
        let b_phi_n = b.inner(phi_n)?;
        rhs.axpy(r_n - kappa * b_phi_n, &wfield)?;

        let op = sp.operator(|k2| c_lead - l_weight * gamma * model.g_symbol(k2) * model.l_symbol(k2));
        let eta = sp.solve_diagonal(&op, &rhs)?;
        let chi = sp.solve_diagonal(&op, &wfield)?;
        let denom = 1.0 - kappa * b.inner(&chi)?;
        if !(denom > 0.0) {
            return Err(Error::RankOneDenominator(denom));
        }
        let theta = kappa * b.inner(&eta)? / denom;
        let mut phi = eta;
        phi.axpy(theta, &chi)?;
        let r_next = r_n + 0.5 * (b.inner(&phi)? - b_phi_n);

        let residual = if self.check_residuals {
            let (phi_mid, r_mid) = if half {
                (Field2D::lin_comb(0.5, &phi, 0.5, phi_n)?, 0.5 * (r_next + r_n))
            } else {
                (phi.clone(), r_next)
            };
            let mut mu = model.apply_l(sp, &phi_mid)?;
            mu.axpy(r_mid, &b)?;
            Some(self.residual(state, &phi, &w, &mu)?)
        } else {
            None
        };
        state.push(phi, Some(r_next));
        Ok(StepReport {
            residual,
            theta: Some(theta),
        })
    }

    /// `|D phi - gamma G mu|_inf / max(|D phi|_inf, |gamma G mu|_inf)`.
    fn residual(&self, state: &SchemeState, phi: &Field2D, w: &WeightSequence, mu: &Field2D) -> Result<f64> {
        let mut hist: Vec<Field2D> = state.history.clone();
        hist.push(phi.clone());
        let lhs = apply_frac_derivative_field(&hist, w)?;
        let mut rhs = self.model.apply_g(&self.sp, mu)?;
        rhs.scale(self.model.gamma());
        let scale = lhs.max_abs().max(rhs.max_abs());
        let diff = lhs.sub(&rhs)?.max_abs();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }
}

/// Splits `sum_{k=1}^{m} c_k (phi^k - phi^{k-1})`, with `phi^m` unknown, into
/// `c_m phi^m - rhs`; returns `(c_m, rhs)`.
fn history_rhs(history: &[Field2D], c: &[f64]) -> (f64, Field2D) {
    let m = c.len();
    debug_assert_eq!(history.len(), m);
    let grid = history[0].grid();
    let mut out = vec![0.0; grid.len()];
    let mut add = |coef: f64, f: &Field2D| {
        if coef != 0.0 {
            for (o, v) in out.iter_mut().zip(f.values()) {
                *o += coef * v;
            }
        }
    };
    add(c[0], &history[0]);
    for k in 1..m {
        add(c[k] - c[k - 1], &history[k]);
    }
    (c[m - 1], Field2D::from_values(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn smooth_ac() -> (ModelSpec, Grid, Field2D) {
        let grid = Grid::square(16, 2.0 * PI).unwrap();
        let model = ModelSpec::allen_cahn(0.5, 1.0, 2.0).unwrap();
        let phi0 = Field2D::from_fn(grid, |x, y| 0.5 * x.sin() * y.cos() + 0.1);
        (model, grid, phi0)
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [SchemeKind::StabilizedL1, SchemeKind::SavFirstOrder, SchemeKind::L1Sav] {
            assert_eq!(s.name().parse::<SchemeKind>().unwrap(), s);
        }
        assert!("rk4".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn stabilized_rejects_slope_selection() {
        let grid = Grid::square(8, 2.0 * PI).unwrap();
        let m = ModelSpec::mbe_slope(0.3, 1.0, 1.0).unwrap();
        assert!(matches!(
            Stepper::new(m, SchemeKind::StabilizedL1, 0.5, grid),
            Err(Error::UnsupportedModel { .. })
        ));
    }

    #[test]
    fn residuals_are_small_for_every_scheme() {
        let (model, grid, phi0) = smooth_ac();
        for scheme in [SchemeKind::StabilizedL1, SchemeKind::SavFirstOrder, SchemeKind::L1Sav] {
            for &alpha in &[0.4, 1.0] {
                let mut st = Stepper::new(model, scheme, alpha, grid).unwrap().with_residual_checks(true);
                let mut state = st.init_state(phi0.clone(), TimeMesh::uniform(0.05, 5).unwrap()).unwrap();
                st.run(&mut state, |_, rep| {
                    assert!(rep.residual.unwrap() <= 1e-10, "{scheme} {alpha}: {:?}", rep.residual);
                    Ok(())
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn fixed_points_are_stationary() {
        let grid = Grid::square(8, 2.0).unwrap();
        let model = ModelSpec::allen_cahn(0.1, 1.0, 2.0).unwrap();
        for scheme in [SchemeKind::StabilizedL1, SchemeKind::SavFirstOrder, SchemeKind::L1Sav] {
            for &c in &[-1.0, 0.0, 1.0] {
                let mut st = Stepper::new(model, scheme, 0.5, grid).unwrap();
                let mut state = st.init_state(Field2D::constant(grid, c), TimeMesh::uniform(0.01, 10).unwrap()).unwrap();
                st.run(&mut state, |_, _| Ok(())).unwrap();
                for f in state.history() {
                    assert!(f.values().iter().all(|v| (v - c).abs() <= 1e-14));
                }
            }
        }
    }

    #[test]
    fn zero_field_keeps_r_constant() {
        let grid = Grid::square(8, 2.0 * PI).unwrap();
        let model = ModelSpec::mbe_slope(0.3, 1.0, 1.0).unwrap();
        let mut st = Stepper::new(model, SchemeKind::SavFirstOrder, 0.5, grid).unwrap();
        let mut state = st.init_state(Field2D::zeros(grid), TimeMesh::uniform(0.01, 5).unwrap()).unwrap();
        st.run(&mut state, |_, _| Ok(())).unwrap();
        let r0 = state.r_history().unwrap()[0];
        // E1(0) = pi^2 on [0, 2pi]^2
        assert_relative_eq!(r0, (PI * PI + 1.0).sqrt(), max_relative = 1e-14);
        assert!(state.r_history().unwrap().iter().all(|r| *r == r0));
    }

    #[test]
    fn uniform_and_nonuniform_paths_agree() {
        let (model, grid, phi0) = smooth_ac();
        for scheme in [SchemeKind::StabilizedL1, SchemeKind::SavFirstOrder, SchemeKind::L1Sav] {
            let mesh = TimeMesh::uniform(0.05, 8).unwrap();
            let mut a = Stepper::new(model, scheme, 0.6, grid).unwrap();
            let mut b = Stepper::new(model, scheme, 0.6, grid).unwrap().with_nonuniform_weights(true);
            let mut sa = a.init_state(phi0.clone(), mesh.clone()).unwrap();
            let mut sb = b.init_state(phi0.clone(), mesh).unwrap();
            a.run(&mut sa, |_, _| Ok(())).unwrap();
            b.run(&mut sb, |_, _| Ok(())).unwrap();
            let diff = sa.current().sub(sb.current()).unwrap().max_abs();
            assert!(diff <= 1e-11 * sa.current().max_abs(), "{scheme}: {diff}");
        }
    }

    #[test]
    fn mesh_exhaustion_and_scheme_mismatch() {
        let (model, grid, phi0) = smooth_ac();
        let mut st = Stepper::new(model, SchemeKind::L1Sav, 0.5, grid).unwrap();
        let mut state = st.init_state(phi0.clone(), TimeMesh::uniform(0.1, 1).unwrap()).unwrap();
        st.step(&mut state).unwrap();
        assert!(matches!(st.step(&mut state), Err(Error::MeshExhausted { .. })));
        let mut state = st.init_state(phi0, TimeMesh::uniform(0.1, 1).unwrap()).unwrap();
        assert!(st.step_stabilized_l1(&mut state).is_err());
    }

    #[test]
    fn r_update_identity() {
        let (model, grid, phi0) = smooth_ac();
        let mut st = Stepper::new(model, SchemeKind::SavFirstOrder, 0.7, grid).unwrap();
        let mut state = st.init_state(phi0, TimeMesh::uniform(0.05, 4).unwrap()).unwrap();
        st.run(&mut state, |_, _| Ok(())).unwrap();
        let sp = st.spectral();
        let r = state.r_history().unwrap();
        for n in 0..4 {
            let (p0, p1) = (&state.history()[n], &state.history()[n + 1]);
            let shift = model.nonquadratic_part(sp, p0).unwrap() + model.c0();
            let db = model.d_e1(sp, p0).unwrap().inner(&p1.sub(p0).unwrap()).unwrap();
            assert!((r[n + 1] - r[n] - 0.5 * db / shift.sqrt()).abs() <= 1e-12);
        }
    }

    #[test]
    fn ch_conserves_mass() {
        let grid = Grid::square(16, 2.0).unwrap();
        let model = ModelSpec::cahn_hilliard(0.1, 0.1, 4.0, 8.0).unwrap();
        let phi0 = Field2D::from_fn(grid, |x, y| 0.3 * (PI * x).cos() * (PI * y).sin() + 0.2);
        let mut st = Stepper::new(model, SchemeKind::StabilizedL1, 0.5, grid).unwrap();
        let mut state = st.init_state(phi0, TimeMesh::uniform(0.01, 20).unwrap()).unwrap();
        st.run(&mut state, |s, _| {
            assert!((s.current().mean() - 0.2).abs() <= 1e-12);
            Ok(())
        })
        .unwrap();
    }
}
