//! Kernel-matrix sweeps over orders, fractional orders and time meshes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frac_kernel::TimeMesh;
use crate::kernel_matrices::{
    build_frac_law_matrix, build_nonuniform_matrices, build_sav_matrices, build_weighted_law_matrix,
    certify_leading_blocks, check_special_cholesky, DenseSymMatrix, MATRIX_ORDER_CAP,
};

/// Time meshes of a sweep; each has exactly `nmax` steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepMesh {
    Uniform,
    /// `t_j = (j/N)^r` on `[0, 1]`.
    Graded(f64),
    /// Steps drawn log-uniformly from `[1e-3, 1]` with ChaCha8 seeded by the value.
    Random(u64),
}

impl SweepMesh {
    pub fn build(self, nmax: usize) -> Result<TimeMesh> {
        match self {
            SweepMesh::Uniform => TimeMesh::uniform(1.0 / nmax as f64, nmax),
            SweepMesh::Graded(r) => TimeMesh::graded(nmax, r, 1.0),
            SweepMesh::Random(seed) => TimeMesh::from_points(random_mesh_points(nmax, seed)),
        }
    }
}

/// `0` followed by partial sums of `n` steps `10^u`, `u ~ U[-3, 0]`.
pub fn random_mesh_points(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n + 1);
    let mut t = 0.0;
    points.push(t);
    for _ in 0..n {
        t += 10f64.powf(rng.gen_range(-3.0..0.0));
        points.push(t);
    }
    points
}

impl fmt::Display for SweepMesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepMesh::Uniform => write!(f, "uniform"),
            SweepMesh::Graded(r) => write!(f, "graded_r{r}"),
            SweepMesh::Random(seed) => write!(f, "random_{seed}"),
        }
    }
}

impl FromStr for SweepMesh {
    type Err = Error;

    /// `uniform`, `graded:<r>` or `random:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config {
            key: "mesh".into(),
            msg,
        };
        match s.split_once(':') {
            None if s == "uniform" => Ok(SweepMesh::Uniform),
            Some(("graded", r)) => r
                .parse()
                .map(SweepMesh::Graded)
                .map_err(|e| bad(format!("bad grading exponent `{r}`: {e}"))),
            Some(("random", seed)) => seed
                .parse()
                .map(SweepMesh::Random)
                .map_err(|e| bad(format!("bad seed `{seed}`: {e}"))),
            _ => Err(bad(format!("expected uniform, graded:<r> or random:<seed>, got `{s}`"))),
        }
    }
}

/// Which kernel matrix a sweep row describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFamily {
    FracLaw,
    WeightedLaw,
    SavToeplitz,
    SavConjugated,
    Nonuniform,
    NonuniformHalf,
}

impl MatrixFamily {
    pub fn name(self) -> &'static str {
        match self {
            MatrixFamily::FracLaw => "frac_law",
            MatrixFamily::WeightedLaw => "weighted_law",
            MatrixFamily::SavToeplitz => "sav_toeplitz",
            MatrixFamily::SavConjugated => "sav_conjugated",
            MatrixFamily::Nonuniform => "nonuniform_l1",
            MatrixFamily::NonuniformHalf => "nonuniform_half_l1",
        }
    }

    /// Families on uniform steps; the nonuniform ones run on every mesh.
    pub const UNIFORM_ONLY: [MatrixFamily; 4] = [
        MatrixFamily::FracLaw,
        MatrixFamily::WeightedLaw,
        MatrixFamily::SavToeplitz,
        MatrixFamily::SavConjugated,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub alpha: f64,
    pub mesh: String,
    pub matrix: MatrixFamily,
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    pub q1: bool,
    pub q2: bool,
    /// Exact smallest eigenvalue, or its interlacing lower bound in
    /// [`SweepMode::Nested`].
    pub min_eig: f64,
}

impl SweepRow {
    pub fn passed(&self) -> bool {
        self.p1 && self.p2 && self.p3 && self.q1 && self.q2 && self.min_eig > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// Factor and eigen-decompose every order separately.
    Exact,
    /// For families whose order-`n` matrix is a leading block of the
    /// order-`nmax` one, derive every order from the largest matrix.
    Nested,
}

/// One row per `(n, alpha, mesh, matrix)` with `1 <= n <= nmax`.
pub fn sweep_matrices(nmax: usize, alphas: &[f64], meshes: &[SweepMesh], mode: SweepMode) -> Result<Vec<SweepRow>> {
    if nmax > MATRIX_ORDER_CAP {
        return Err(Error::CapExceeded {
            n: nmax,
            cap: MATRIX_ORDER_CAP,
        });
    }
    let mut rows = Vec::new();
    for &mesh_spec in meshes {
        let mesh = mesh_spec.build(nmax)?;
        let label = mesh_spec.to_string();
        for &alpha in alphas {
            let mut families: Vec<(MatrixFamily, DenseSymMatrix)> = Vec::new();
            if mesh_spec == SweepMesh::Uniform {
                families.push((MatrixFamily::FracLaw, build_frac_law_matrix(nmax, alpha)?.s));
                let (a, b) = build_sav_matrices(nmax, alpha)?;
                families.push((MatrixFamily::SavToeplitz, a));
                families.push((MatrixFamily::SavConjugated, b));
            }
            let (d, dh) = build_nonuniform_matrices(&mesh, alpha, nmax)?;
            families.push((MatrixFamily::Nonuniform, d));
            families.push((MatrixFamily::NonuniformHalf, dh));

            for (family, full) in &families {
                rows.extend(nested_family_rows(full, *family, alpha, &label, mode)?);
            }
            if mesh_spec == SweepMesh::Uniform {
                // the weighted-law matrix of order n is not a block of order n + 1
                for n in 1..=nmax {
                    let s = build_weighted_law_matrix(n, alpha)?.s;
                    rows.push(exact_row(&s, MatrixFamily::WeightedLaw, alpha, &label)?);
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (a.mesh.as_str(), a.matrix.name(), a.alpha, a.n)
            .partial_cmp(&(b.mesh.as_str(), b.matrix.name(), b.alpha, b.n))
            .expect("finite alphas")
    });
    Ok(rows)
}

fn exact_row(s: &DenseSymMatrix, matrix: MatrixFamily, alpha: f64, mesh: &str) -> Result<SweepRow> {
    let r = check_special_cholesky(s)?;
    Ok(SweepRow {
        n: s.order(),
        alpha,
        mesh: mesh.into(),
        matrix,
        p1: r.p1.holds,
        p2: r.p2.holds,
        p3: r.p3.holds,
        q1: r.q1.holds,
        q2: r.q2.holds,
        min_eig: r.min_eig,
    })
}

fn nested_family_rows(
    full: &DenseSymMatrix,
    matrix: MatrixFamily,
    alpha: f64,
    mesh: &str,
    mode: SweepMode,
) -> Result<Vec<SweepRow>> {
    match mode {
        SweepMode::Exact => (1..=full.order())
            .map(|n| exact_row(&full.leading(n), matrix, alpha, mesh))
            .collect(),
        SweepMode::Nested => Ok(certify_leading_blocks(full)?
            .into_iter()
            .map(|c| SweepRow {
                n: c.n,
                alpha,
                mesh: mesh.into(),
                matrix,
                p1: c.p1,
                p2: c.p2,
                p3: c.p3,
                q1: c.q1,
                q2: c.q2,
                min_eig: c.min_eig_bound,
            })
            .collect()),
    }
}

/// CSV with header `n,alpha,mesh_kind,matrix,P1,P2,P3,Q1,Q2,min_eig`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "n,alpha,mesh_kind,matrix,P1,P2,P3,Q1,Q2,min_eig")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{:.17e}",
            r.n,
            r.alpha,
            r.mesh,
            r.matrix.name(),
            r.p1,
            r.p2,
            r.p3,
            r.q1,
            r.q2,
            r.min_eig
        )?;
    }
    Ok(())
}
