//! L1 weights on uniform, half-point and graded meshes, and the discrete
//! Caputo derivative of `t^3` against its exact value.

use fracphase::frac_kernel::{
    apply_frac_derivative, gamma, l1_half_weights_uniform, l1_weights_nonuniform, l1_weights_uniform, TimeMesh,
};

fn main() -> fracphase::Result<()> {
    let alpha = 0.5;
    let b = l1_weights_uniform(alpha, 0.01, 4)?;
    let bh = l1_half_weights_uniform(alpha, 0.01, 4)?;
    println!("b  = {:?}", b.values());
    println!("b~ = {:?}", bh.values());

    let mesh = TimeMesh::graded(8, 2.0, 1.0)?;
    let d = l1_weights_nonuniform(alpha, &mesh, 8)?;
    println!("graded d_8,j = {:?}", d.values());

    let exact = 6.0 / gamma(4.0 - alpha);
    for n in [10, 20, 40, 80] {
        let dt = 1.0 / n as f64;
        let w = l1_weights_uniform(alpha, dt, n)?;
        let hist: Vec<f64> = (0..=n).map(|j| (j as f64 * dt).powi(3)).collect();
        let err = (apply_frac_derivative(&hist, &w)? - exact).abs();
        println!("dt {dt:.4}  error {err:.3e}");
    }
    Ok(())
}
