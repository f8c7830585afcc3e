//! Periodic 2D fields and Fourier pseudo-spectral operators.
//!
//! Samples live at the nodes `(i Lx/nx, j Ly/ny)` and are stored row-major
//! with the x index `i` as the row: `values[i * ny + j]`.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::Domain(format!("{name} must be even and >= 4, got {n}")));
            }
        }
        for (name, l) in [("Lx", lx), ("Ly", ly)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {l}")));
            }
        }
        Ok(Self { nx, ny, lx, ly })
    }

    pub fn square(n: usize, l: f64) -> Result<Self> {
        Self::new(n, n, l, l)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Quadrature weight of one node.
    pub fn cell_area(&self) -> f64 {
        self.area() / self.len() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.lx / self.nx as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.ly / self.ny as f64
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} on [0,{}]x[0,{}]", self.nx, self.ny, self.lx, self.ly)
    }
}

/// Real scalar field on a periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    grid: Grid,
    values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.ny {
                values.push(f(x, grid.y(j)));
            }
        }
        Self { grid, values }
    }

    /// Panics if `values.len() != grid.len()`.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "field length does not match grid");
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.ny + j]
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.grid != *grid {
            return Err(Error::GridMismatch(format!("{} vs {}", self.grid, grid)));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2D {
        Field2D {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Field2D, f: impl Fn(f64, f64) -> f64) -> Result<Field2D> {
        other.check_grid(&self.grid)?;
        Ok(Field2D {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Field2D) -> Result<()> {
        x.check_grid(&self.grid)?;
        for (s, v) in self.values.iter_mut().zip(&x.values) {
            *s += a * v;
        }
        Ok(())
    }

    pub fn scale(&mut self, a: f64) {
        for v in &mut self.values {
            *v *= a;
        }
    }

    /// `a * f + b * g`
    pub fn lin_comb(a: f64, f: &Field2D, b: f64, g: &Field2D) -> Result<Field2D> {
        f.zip_map(g, |x, y| a * x + b * y)
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Zero-mode average.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Quadrature inner product `(Lx Ly / (nx ny)) sum f g`.
    pub fn inner(&self, other: &Field2D) -> Result<f64> {
        other.check_grid(&self.grid)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.grid.cell_area())
    }

    /// Quadrature integral of the field.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Writes the snapshot format: one ASCII header line `nx ny Lx Ly t`,
    /// then `nx*ny` little-endian f64 values.
    pub fn write_snapshot<W: Write>(&self, mut w: W, t: f64) -> Result<()> {
        let g = self.grid;
        writeln!(w, "{} {} {} {} {}", g.nx, g.ny, g.lx, g.ly, t)?;
        let mut buf = Vec::with_capacity(8 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    /// Reads a snapshot written by [`Field2D::write_snapshot`]; returns the
    /// field and its time stamp.
    pub fn read_snapshot<R: BufRead>(mut r: R) -> Result<(Field2D, f64)> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(Error::Snapshot(format!("bad header `{}`", header.trim_end())));
        }
        let bad = |what: &str| Error::Snapshot(format!("cannot parse {what} in header"));
        let nx: usize = parts[0].parse().map_err(|_| bad("nx"))?;
        let ny: usize = parts[1].parse().map_err(|_| bad("ny"))?;
        let lx: f64 = parts[2].parse().map_err(|_| bad("Lx"))?;
        let ly: f64 = parts[3].parse().map_err(|_| bad("Ly"))?;
        let t: f64 = parts[4].parse().map_err(|_| bad("t"))?;
        let grid = Grid::new(nx, ny, lx, ly)?;
        let mut bytes = vec![0u8; 8 * grid.len()];
        r.read_exact(&mut bytes)
            .map_err(|e| Error::Snapshot(format!("truncated payload: {e}")))?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok((Field2D { grid, values }, t))
    }
}

/// Diagonal operator in Fourier space; one real multiplier per mode,
/// stored in FFT ordering (`index = ix * ny + iy`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralOperatorDiag {
    grid: Grid,
    multipliers: Vec<f64>,
}

impl SpectralOperatorDiag {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn min_multiplier(&self) -> f64 {
        self.multipliers.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Spectral coefficients of a field (unnormalized forward DFT).
pub type Spectrum = Vec<Complex64>;

/// FFT plans and wave numbers for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    kx: Vec<f64>,
    ky: Vec<f64>,
    kx_odd: Vec<f64>,
    ky_odd: Vec<f64>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

/// Wave numbers `2 pi / L * {0, 1, .., n/2 - 1, -n/2, .., -1}`.
fn wave_numbers(n: usize, l: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / l;
    (0..n)
        .map(|i| {
            let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            base * m
        })
        .collect()
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let kx = wave_numbers(grid.nx, grid.lx);
        let ky = wave_numbers(grid.ny, grid.ly);
        // first derivatives drop the unpaired Nyquist mode
        let mut kx_odd = kx.clone();
        kx_odd[grid.nx / 2] = 0.0;
        let mut ky_odd = ky.clone();
        ky_odd[grid.ny / 2] = 0.0;
        Self {
            grid,
            fwd_x: planner.plan_fft_forward(grid.nx),
            inv_x: planner.plan_fft_inverse(grid.nx),
            fwd_y: planner.plan_fft_forward(grid.ny),
            inv_y: planner.plan_fft_inverse(grid.ny),
            kx,
            ky,
            kx_odd,
            ky_odd,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// `|k|^2` for the mode stored at `ix * ny + iy`.
    pub fn k_squared(&self, ix: usize, iy: usize) -> f64 {
        self.kx[ix] * self.kx[ix] + self.ky[iy] * self.ky[iy]
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let (fx, fy) = if inverse {
            (&self.inv_x, &self.inv_y)
        } else {
            (&self.fwd_x, &self.fwd_y)
        };
        // rows are contiguous in y
        fy.process(data);
        let mut col = vec![Complex64::new(0.0, 0.0); nx];
        for iy in 0..ny {
            for ix in 0..nx {
                col[ix] = data[ix * ny + iy];
            }
            fx.process(&mut col);
            for ix in 0..nx {
                data[ix * ny + iy] = col[ix];
            }
        }
    }

    pub fn forward(&self, f: &Field2D) -> Result<Spectrum> {
        f.check_grid(&self.grid)?;
        let mut data: Spectrum = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, false);
        Ok(data)
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self, mut spec: Spectrum) -> Field2D {
        assert_eq!(spec.len(), self.grid.len());
        self.transform(&mut spec, true);
        let norm = 1.0 / self.grid.len() as f64;
        Field2D {
            grid: self.grid,
            values: spec.iter().map(|c| c.re * norm).collect(),
        }
    }

    fn multiply(&self, f: &Field2D, m: impl Fn(usize, usize) -> Complex64) -> Result<Field2D> {
        let mut s = self.forward(f)?;
        let ny = self.grid.ny;
        for (idx, c) in s.iter_mut().enumerate() {
            *c *= m(idx / ny, idx % ny);
        }
        Ok(self.inverse(s))
    }

    pub fn laplacian(&self, f: &Field2D) -> Result<Field2D> {
        self.multiply(f, |ix, iy| Complex64::new(-self.k_squared(ix, iy), 0.0))
    }

    pub fn bilaplacian(&self, f: &Field2D) -> Result<Field2D> {
        self.multiply(f, |ix, iy| {
            let k2 = self.k_squared(ix, iy);
            Complex64::new(k2 * k2, 0.0)
        })
    }

    pub fn gradient(&self, f: &Field2D) -> Result<(Field2D, Field2D)> {
        let s = self.forward(f)?;
        let ny = self.grid.ny;
        let mut sx = s.clone();
        let mut sy = s;
        for (idx, (a, b)) in sx.iter_mut().zip(sy.iter_mut()).enumerate() {
            *a *= Complex64::new(0.0, self.kx_odd[idx / ny]);
            *b *= Complex64::new(0.0, self.ky_odd[idx % ny]);
        }
        Ok((self.inverse(sx), self.inverse(sy)))
    }

    pub fn divergence(&self, fx: &Field2D, fy: &Field2D) -> Result<Field2D> {
        fy.check_grid(&fx.grid)?;
        let sx = self.forward(fx)?;
        let sy = self.forward(fy)?;
        let ny = self.grid.ny;
        let s = sx
            .iter()
            .zip(&sy)
            .enumerate()
            .map(|(idx, (a, b))| {
                a * Complex64::new(0.0, self.kx_odd[idx / ny])
                    + b * Complex64::new(0.0, self.ky_odd[idx % ny])
            })
            .collect();
        Ok(self.inverse(s))
    }

    /// Builds a diagonal operator from a function of `|k|^2`.
    pub fn operator(&self, sigma: impl Fn(f64) -> f64) -> SpectralOperatorDiag {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut multipliers = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            for iy in 0..ny {
                multipliers.push(sigma(self.k_squared(ix, iy)));
            }
        }
        SpectralOperatorDiag {
            grid: self.grid,
            multipliers,
        }
    }

    pub fn apply_diagonal(&self, op: &SpectralOperatorDiag, f: &Field2D) -> Result<Field2D> {
        if op.grid != self.grid {
            return Err(Error::GridMismatch(format!("operator on {} vs {}", op.grid, self.grid)));
        }
        let ny = self.grid.ny;
        self.multiply(f, |ix, iy| Complex64::new(op.multipliers[ix * ny + iy], 0.0))
    }

    /// Solves `op u = rhs`; every multiplier must be strictly positive.
    pub fn solve_diagonal(&self, op: &SpectralOperatorDiag, rhs: &Field2D) -> Result<Field2D> {
        if op.grid != self.grid {
            return Err(Error::GridMismatch(format!("operator on {} vs {}", op.grid, self.grid)));
        }
        let ny = self.grid.ny;
        if let Some((idx, &value)) = op
            .multipliers
            .iter()
            .enumerate()
            .find(|(_, &m)| !(m > 0.0))
        {
            return Err(Error::SingularMultiplier {
                ix: idx / ny,
                iy: idx % ny,
                value,
            });
        }
        self.multiply(rhs, |ix, iy| Complex64::new(1.0 / op.multipliers[ix * ny + iy], 0.0))
    }

    /// Zeroes modes with `|m| > n/3` in either direction.
    pub fn dealias(&self, f: &Field2D) -> Result<Field2D> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let keep = |i: usize, n: usize| {
            let m = if i < n / 2 { i } else { n - i };
            3 * m <= n
        };
        self.multiply(f, |ix, iy| {
            if keep(ix, nx) && keep(iy, ny) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `sum_k w(|k|^2) |f^_k|^2`, scaled so that `w == 1` gives `inner(f, f)`.
    pub fn weighted_spectral_norm(&self, f: &Field2D, w: impl Fn(f64) -> f64) -> Result<f64> {
        let s = self.forward(f)?;
        let ny = self.grid.ny;
        let n = self.grid.len() as f64;
        let sum: f64 = s
            .iter()
            .enumerate()
            .map(|(idx, c)| w(self.k_squared(idx / ny, idx % ny)) * c.norm_sqr())
            .sum();
        Ok(sum * self.grid.area() / (n * n))
    }
}
