//! Special Cholesky conditions on the kernel matrices, checked directly for
//! one order and through nested leading blocks for all smaller ones.

use fracphase::kernel_matrices::{build_frac_law_matrix, build_sav_matrices, certify_leading_blocks, check_special_cholesky};

fn main() -> fracphase::Result<()> {
    let alpha = 0.3;
    let law = build_frac_law_matrix(6, alpha)?;
    let r = check_special_cholesky(&law.s)?;
    println!(
        "frac-law n=6: P {} Q {} min eigenvalue {:.6e}",
        r.p_ok(),
        r.q_ok(),
        r.min_eig
    );

    let (_, conjugated) = build_sav_matrices(100, alpha)?;
    let certs = certify_leading_blocks(&conjugated)?;
    let all = certs.iter().all(|c| c.p1 && c.p2 && c.p3 && c.q1 && c.q2 && c.min_eig_bound > 0.0);
    let worst = certs.iter().map(|c| c.min_eig_bound).fold(f64::INFINITY, f64::min);
    println!("conjugated SAV matrix, orders 1..=100: all pass {all}, smallest eigenvalue bound {worst:.4e}");
    Ok(())
}
