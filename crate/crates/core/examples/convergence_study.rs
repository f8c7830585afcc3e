//! Observed orders: the L1 kernel on t^3 and temporal self-convergence of the
//! schemes on smooth Allen-Cahn data, on uniform and graded meshes. The
//! uniform L1-SAV order settles at `min(2 - alpha, 2 alpha)` because of the
//! startup `phi^{-1} = phi^0`, so it needs the finer range.

use fracphase::harness::convergence::{kernel_convergence, self_convergence, MeshFamily};
use fracphase::harness::presets::preset;
use fracphase::schemes::SchemeKind;

fn main() -> fracphase::Result<()> {
    for alpha in [0.3, 0.5, 0.8] {
        let k = kernel_convergence(alpha, 0.1, 4, 1.0)?;
        let mut cfg = preset("ac_smooth")?;
        cfg.alpha = alpha;
        let stab = self_convergence(&cfg, 1.0, &[10, 20, 40, 80], MeshFamily::Uniform)?;
        cfg.scheme = SchemeKind::L1Sav;
        let uniform = self_convergence(&cfg, 1.0, &[80, 160, 320, 640], MeshFamily::Uniform)?;
        let graded = self_convergence(&cfg, 1.0, &[10, 20, 40, 80], MeshFamily::Graded((2.0 - alpha) / alpha))?;
        println!(
            "alpha {alpha}: kernel {:.3}, stab_l1 {:.3}, l1_sav uniform {:.3}, l1_sav graded {:.3}",
            k.order, stab.order, uniform.order, graded.order
        );
    }
    Ok(())
}
