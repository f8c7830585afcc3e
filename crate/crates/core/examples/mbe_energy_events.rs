//! L1-SAV on the slope-selection epitaxy model at alpha = 0.3: the modified
//! energy stays below its initial value but is not monotone.

use fracphase::harness::presets::preset;
use fracphase::harness::{run, MeshSpec};

fn main() -> fracphase::Result<()> {
    let mut cfg = preset("mbe_slope")?;
    cfg.alpha = 0.3;
    cfg.mesh = MeshSpec::Uniform { dt: 0.01, nsteps: 170 };
    let outcome = run(&cfg)?;
    print!("{}", outcome.summary());
    let late: Vec<_> = outcome.events.iter().filter(|e| (1.2..=1.7).contains(&e.t)).collect();
    println!("{} increase events in [1.2, 1.7]", late.len());
    for e in late.iter().take(3) {
        println!("energy rises by {:.3e} at t = {:.2}", e.increase, e.t);
    }
    Ok(())
}
