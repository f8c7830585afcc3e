//! Single experiment runs: step, trace, check, write artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{
    energy_law_checks, mass_conservation_check, max_bound_check, monotonicity_events, EnergyTrace,
    LawCheck, LawKind, MonotonicityEvent,
};
use crate::error::Result;
use crate::harness::config::RunConfig;
use crate::harness::presets::initial_field;
use crate::models::{ModelKind, ModelSpec};
use crate::schemes::{SchemeKind, SchemeState, Stepper};
use crate::spectral::{Field2D, Spectral};

/// Mean drift allowed for Cahn-Hilliard runs.
pub const MASS_TOL: f64 = 1e-12;
/// Allowed excess over 1 in the Allen-Cahn maximum bound.
pub const MAX_BOUND_SLACK: f64 = 1e-12;
/// Largest relative residual of the discrete equation when residuals are checked.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub trace: EnergyTrace,
    pub checks: Vec<LawCheck>,
    pub events: Vec<MonotonicityEvent>,
    pub final_field: Field2D,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let cfg = &self.config;
        let rows = self.trace.rows();
        let last = rows.last().expect("trace has the initial row");
        let mut s = format!(
            "model {} scheme {} alpha {} grid {}x{} steps {} t_end {:.6}\n",
            cfg.model.name(),
            cfg.scheme.name(),
            cfg.alpha,
            cfg.nx,
            cfg.ny,
            last.step,
            last.t
        );
        s.push_str(&format!(
            "E0 {:.12e} E_end {:.12e}\n",
            self.trace.law_energies()[0],
            last.law_energy()
        ));
        for c in &self.checks {
            s.push_str(&format!(
                "{} {} worst {:.6e} tol {:.3e}{}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.worst,
                c.tolerance,
                c.first_violation
                    .map(|n| format!(" first violation at step {n}"))
                    .unwrap_or_default()
            ));
        }
        s.push_str(&format!("energy increase events {}", self.events.len()));
        if let Some(first) = self.events.first() {
            s.push_str(&format!(" (first at t = {:.4})", first.t));
        }
        s.push('\n');
        s.push_str(if self.passed() { "result PASS\n" } else { "result FAIL\n" });
        s
    }
}

/// Runs `cfg` to the end of its mesh. With `cfg.out` set, writes
/// `energy.csv`, `summary.txt`, `config.txt` and `snapshots/step_NNNNNN.bin`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let model = cfg.model_spec()?;
    let grid = cfg.grid()?;
    let mesh = cfg.mesh.build()?;
    let phi0 = initial_field(cfg, grid)?;
    let mut stepper = Stepper::new(model, cfg.scheme, cfg.alpha, grid)?
        .with_residual_checks(cfg.check_residuals)
        .with_dealias(cfg.dealias);
    let law = if cfg.scheme.is_half_point() { LawKind::HalfL1 } else { LawKind::L1 };
    let mut trace = EnergyTrace::new(cfg.alpha, mesh.clone(), law)?;
    let mut state = stepper.init_state(phi0.clone(), mesh.clone())?;

    let snap_dir = cfg.out.as_ref().map(|o| o.join("snapshots"));
    if let Some(dir) = &snap_dir {
        fs::create_dir_all(dir)?;
    }
    let total = mesh.num_steps();
    let cadence = total.checked_div(cfg.snapshots).map_or(usize::MAX, |c| c.max(1));
    let write_snap = |n: usize, t: f64, f: &Field2D| -> Result<()> {
        if let Some(dir) = &snap_dir {
            if cfg.snapshots > 0 && (n.is_multiple_of(cadence) || n == total) {
                let mut w = BufWriter::new(File::create(dir.join(format!("step_{n:06}.bin")))?);
                f.write_snapshot(&mut w, t)?;
                w.flush()?;
            }
        }
        Ok(())
    };

    record(&mut trace, &model, stepper.spectral(), &state)?;
    write_snap(0, 0.0, state.current())?;

    let mut worst_residual: f64 = 0.0;
    let mut residual_violation = None;
    while !state.is_finished() {
        let report = stepper.step(&mut state)?;
        if let Some(r) = report.residual {
            if r > RESIDUAL_TOL && residual_violation.is_none() {
                residual_violation = Some(state.step_index());
            }
            worst_residual = worst_residual.max(r);
        }
        record(&mut trace, &model, stepper.spectral(), &state)?;
        write_snap(state.step_index(), state.time(), state.current())?;
    }

    let mut checks = energy_law_checks(&trace);
    if cfg.model == ModelKind::CahnHilliard {
        checks.push(mass_conservation_check(&trace, MASS_TOL));
    }
    if cfg.model == ModelKind::AllenCahn && cfg.scheme == SchemeKind::StabilizedL1 && phi0.max_abs() <= 1.0 {
        checks.push(max_bound_check(&trace, 1.0 + MAX_BOUND_SLACK));
    }
    if cfg.check_residuals {
        checks.push(LawCheck {
            name: "discrete_equation_residual",
            passed: residual_violation.is_none(),
            worst: worst_residual,
            tolerance: RESIDUAL_TOL,
            first_violation: residual_violation,
        });
    }
    let events = monotonicity_events(&trace);
    let outcome = RunOutcome {
        config: cfg.clone(),
        trace,
        checks,
        events,
        final_field: state.current().clone(),
    };
    if let Some(out) = &cfg.out {
        write_artifacts(out, &outcome)?;
    }
    Ok(outcome)
}

fn record(trace: &mut EnergyTrace, model: &ModelSpec, sp: &Spectral, st: &SchemeState) -> Result<()> {
    let energy = model.classical_energy(sp, st.current())?;
    let modified = st.modified_energy(model, sp)?;
    trace.push(energy, modified, st.current().max_abs(), st.current().mean())?;
    Ok(())
}

fn write_artifacts(out: &Path, outcome: &RunOutcome) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut w = BufWriter::new(File::create(out.join("energy.csv"))?);
    outcome.trace.write_csv(&mut w)?;
    w.flush()?;
    fs::write(out.join("summary.txt"), outcome.summary())?;
    fs::write(out.join("config.txt"), outcome.config.to_text())?;
    Ok(())
}
