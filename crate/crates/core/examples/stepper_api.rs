//! Driving the steppers directly, without the harness.

use fracphase::frac_kernel::TimeMesh;
use fracphase::models::ModelSpec;
use fracphase::schemes::{SchemeKind, Stepper};
use fracphase::spectral::{Field2D, Grid};

fn main() -> fracphase::Result<()> {
    let grid = Grid::square(32, 2.0 * std::f64::consts::PI)?;
    let model = ModelSpec::allen_cahn(0.5, 1.0, 2.0)?;
    let phi0 = Field2D::from_fn(grid, |x, y| 0.5 * x.sin() * y.cos());
    for scheme in [SchemeKind::StabilizedL1, SchemeKind::SavFirstOrder, SchemeKind::L1Sav] {
        let mut stepper = Stepper::new(model, scheme, 0.6, grid)?.with_residual_checks(true);
        let mut state = stepper.init_state(phi0.clone(), TimeMesh::uniform(0.05, 20)?)?;
        let mut worst: f64 = 0.0;
        while !state.is_finished() {
            let report = stepper.step(&mut state)?;
            worst = worst.max(report.residual.unwrap_or(0.0));
        }
        let energy = model.classical_energy(stepper.spectral(), state.current())?;
        println!(
            "{:7} t {:.2} energy {energy:.8} modified {:?} worst residual {worst:.1e}",
            scheme.name(),
            state.time(),
            state.modified_energy(&model, stepper.spectral())?
        );
    }
    Ok(())
}
