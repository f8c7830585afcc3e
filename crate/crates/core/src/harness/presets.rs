//! Built-in experiment configurations and initial data.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harness::config::{InitialCondition, MeshSpec, RunConfig};
use crate::models::ModelKind;
use crate::schemes::SchemeKind;
use crate::spectral::{Field2D, Grid};

pub const PRESETS: [&str; 6] = [
    "ac_flower",
    "ch_random",
    "mbe_slope",
    "mbe_slope_graded",
    "mbe_noslope",
    "ac_smooth",
];

/// Looks up a preset by name.
pub fn preset(name: &str) -> Result<RunConfig> {
    let base = RunConfig {
        model: ModelKind::AllenCahn,
        epsilon: 0.1,
        gamma: 1.0,
        s: 2.0,
        l_cap: 8.0,
        c0: 1.0,
        alpha: 0.5,
        scheme: SchemeKind::StabilizedL1,
        mesh: MeshSpec::Uniform { dt: 0.01, nsteps: 1000 },
        nx: 128,
        ny: 128,
        lx: 2.0,
        ly: 2.0,
        initial: InitialCondition::Flower,
        seed: 0,
        out: None,
        snapshots: 10,
        check_residuals: false,
        dealias: false,
    };
    let two_pi = 2.0 * PI;
    let cfg = match name {
        "ac_flower" => base,
        "ch_random" => RunConfig {
            model: ModelKind::CahnHilliard,
            gamma: 0.1,
            s: 4.0,
            l_cap: 8.0,
            initial: InitialCondition::Random,
            ..base
        },
        "mbe_slope" => RunConfig {
            model: ModelKind::MbeSlope,
            epsilon: 0.1f64.sqrt(),
            s: 0.0,
            scheme: SchemeKind::L1Sav,
            lx: two_pi,
            ly: two_pi,
            initial: InitialCondition::MbeWaves,
            ..base
        },
        "mbe_slope_graded" => RunConfig {
            mesh: MeshSpec::Graded { n: 1000, r: 1.2, t_end: 10.0 },
            ..preset("mbe_slope")?
        },
        "mbe_noslope" => RunConfig {
            model: ModelKind::MbeNoSlope,
            s: 1.0 / 16.0,
            ..preset("mbe_slope")?
        },
        "ac_smooth" => RunConfig {
            epsilon: 0.5,
            mesh: MeshSpec::Uniform { dt: 0.01, nsteps: 100 },
            nx: 16,
            ny: 16,
            lx: two_pi,
            ly: two_pi,
            initial: InitialCondition::Smooth { amp: 0.5, offset: 0.1 },
            snapshots: 0,
            ..base
        },
        other => {
            return Err(Error::Config {
                key: "preset".into(),
                msg: format!("unknown preset `{other}` (expected one of {})", PRESETS.join(", ")),
            })
        }
    };
    Ok(cfg)
}

/// Six-fold flower `tanh[(2r/3 - 1/4 - (1 + cos 6 theta)/16) / (2 eps)]`
/// in polar coordinates about the domain centre.
pub fn flower(grid: Grid, epsilon: f64) -> Field2D {
    let (cx, cy) = (grid.lx / 2.0, grid.ly / 2.0);
    Field2D::from_fn(grid, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        let r = dx.hypot(dy);
        let theta = dy.atan2(dx);
        ((2.0 * r / 3.0 - 0.25 - (1.0 + (6.0 * theta).cos()) / 16.0) / (2.0 * epsilon)).tanh()
    })
}

/// I.i.d. uniform values on `[-1, 1]` from ChaCha8 seeded with `seed`,
/// drawn in storage order.
pub fn random_field(grid: Grid, seed: u64) -> Field2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    Field2D::from_values(grid, values)
}

pub fn mbe_waves(grid: Grid) -> Field2D {
    Field2D::from_fn(grid, |x, y| {
        0.1 * ((3.0 * x).sin() * (2.0 * y).sin() + (5.0 * x).sin() * (5.0 * y).sin())
    })
}

/// Builds the initial field of `cfg` on `grid`.
pub fn initial_field(cfg: &RunConfig, grid: Grid) -> Result<Field2D> {
    Ok(match &cfg.initial {
        InitialCondition::Flower => flower(grid, cfg.epsilon),
        InitialCondition::Random => random_field(grid, cfg.seed),
        InitialCondition::MbeWaves => mbe_waves(grid),
        InitialCondition::Smooth { amp, offset } => Field2D::from_fn(grid, |x, y| {
            amp * (2.0 * PI * x / grid.lx).sin() * (2.0 * PI * y / grid.ly).cos() + offset
        }),
        InitialCondition::Constant(c) => Field2D::constant(grid, *c),
        InitialCondition::Snapshot(path) => {
            let (field, _) = Field2D::read_snapshot(BufReader::new(File::open(path)?))?;
            if field.grid() != grid {
                return Err(Error::Config {
                    key: "initial".into(),
                    msg: format!("snapshot grid {} does not match the run grid {}", field.grid(), grid),
                });
            }
            field
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn random_field_is_seeded_and_bounded() {
        let g = Grid::square(16, 2.0).unwrap();
        let a = random_field(g, 0);
        assert_eq!(a, random_field(g, 0));
        assert_ne!(a, random_field(g, 1));
        assert!(a.max_abs() <= 1.0);
    }

    #[test]
    fn flower_is_bounded_and_signed() {
        let g = Grid::square(64, 2.0).unwrap();
        let f = flower(g, 0.1);
        assert!(f.max_abs() < 1.0);
        // inside near the centre, outside at the corner
        assert!(f.at(32, 32) < -0.9);
        assert!(f.at(0, 0) > 0.9);
    }
}
