//! Graded meshes concentrate steps near t = 0; boundedness is the energy
//! statement that survives on nonuniform meshes.

use fracphase::harness::presets::preset;
use fracphase::harness::{run, MeshSpec};

fn main() -> fracphase::Result<()> {
    for n in [50, 100, 200] {
        let mut cfg = preset("mbe_slope_graded")?;
        cfg.apply_str("grid = 64\nalpha = 0.5")?;
        cfg.mesh = MeshSpec::Graded { n, r: 1.2, t_end: 10.0 };
        let mesh = cfg.mesh.build()?;
        let outcome = run(&cfg)?;
        let e = outcome.trace.law_energies();
        println!(
            "N {n:4}: first step {:.3e}, last step {:.3e}, E0 {:.6} E_end {:.6}, {}",
            mesh.tau(1),
            mesh.tau(n),
            e[0],
            e[n],
            if outcome.passed() { "bounded" } else { "NOT bounded" }
        );
    }
    Ok(())
}
