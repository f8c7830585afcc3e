//! Energy traces and the discrete energy laws checked along them.
//!
//! The law energy is the classical energy for the stabilized scheme and the
//! modified SAV energy for SAV schemes.

use std::io::Write;

use crate::error::{Error, Result};
use crate::frac_kernel::{
    apply_frac_derivative, gamma, nonuniform_half_weights, nonuniform_weights, TimeMesh,
    UniformWeightCache, WeightKind, WeightSequence,
};

/// Relative tolerance of every energy-law assertion.
pub const LAW_RTOL: f64 = 1e-10;

/// `LAW_RTOL * max(1, |E^0|)`.
pub fn law_tolerance(e0: f64) -> f64 {
    LAW_RTOL * e0.abs().max(1.0)
}

/// Which discrete derivative the scheme's energy law is stated with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawKind {
    /// L1 derivative at `t_n`.
    L1,
    /// Half-point L1 derivative at `t_{n-1/2}`.
    HalfL1,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyRow {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub modified: Option<f64>,
    pub frac_de: Option<f64>,
    pub d_m: Option<f64>,
    pub e_weighted: Option<f64>,
    pub max_abs: f64,
    pub mean: f64,
}

impl EnergyRow {
    /// Energy the laws are stated for.
    pub fn law_energy(&self) -> f64 {
        self.modified.unwrap_or(self.energy)
    }
}

/// Per-step energies and law quantities, built online as a run advances.
#[derive(Clone, Debug)]
pub struct EnergyTrace {
    alpha: f64,
    law: LawKind,
    mesh: TimeMesh,
    cache: Option<UniformWeightCache>,
    l1_cache: Option<UniformWeightCache>,
    law_energies: Vec<f64>,
    rows: Vec<EnergyRow>,
}

impl EnergyTrace {
    pub fn new(alpha: f64, mesh: TimeMesh, law: LawKind) -> Result<Self> {
        let (cache, l1_cache) = match mesh.uniform_dt() {
            Some(dt) => {
                let kind = match law {
                    LawKind::L1 => WeightKind::UniformL1,
                    LawKind::HalfL1 => WeightKind::HalfL1,
                };
                (
                    Some(UniformWeightCache::new(kind, alpha, dt)?),
                    Some(UniformWeightCache::new(WeightKind::UniformL1, alpha, dt)?),
                )
            }
            None => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::Domain(format!("fractional order must lie in (0, 1], got {alpha}")));
                }
                (None, None)
            }
        };
        Ok(Self {
            alpha,
            law,
            mesh,
            cache,
            l1_cache,
            law_energies: Vec::new(),
            rows: Vec::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn law(&self) -> LawKind {
        self.law
    }

    pub fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    pub fn rows(&self) -> &[EnergyRow] {
        &self.rows
    }

    pub fn law_energies(&self) -> &[f64] {
        &self.law_energies
    }

    pub fn is_uniform(&self) -> bool {
        self.mesh.is_uniform()
    }

    /// Whether the weighted law (and its `D^m` column) applies.
    pub fn has_weighted_law(&self) -> bool {
        self.is_uniform() && self.law == LawKind::L1
    }

    /// Appends step `n = rows().len()`.
    pub fn push(&mut self, energy: f64, modified: Option<f64>, max_abs: f64, mean: f64) -> Result<&EnergyRow> {
        let n = self.rows.len();
        if n > self.mesh.num_steps() {
            return Err(Error::MeshExhausted {
                requested: n,
                available: self.mesh.num_steps(),
            });
        }
        self.law_energies.push(modified.unwrap_or(energy));
        let (frac_de, d_m, e_weighted) = if n == 0 {
            (None, None, self.has_weighted_law().then(|| self.law_energies[0]))
        } else {
            let weights = self.law_weights(n)?;
            let fde = frac_derivative_of_energy(&self.law_energies, &weights)?;
            if self.has_weighted_law() {
                let dt = self.mesh.uniform_dt().expect("uniform");
                let b = self.l1_cache.as_mut().expect("uniform").get(n).to_vec();
                let d = weighted_rate_with(&self.law_energies, self.alpha, dt, &b);
                let prev = self.rows[n - 1].e_weighted.expect("set on uniform traces");
                (Some(fde), Some(d), Some(prev + dt * d))
            } else {
                (Some(fde), None, None)
            }
        };
        self.rows.push(EnergyRow {
            step: n,
            t: self.mesh.t(n),
            energy,
            modified,
            frac_de,
            d_m,
            e_weighted,
            max_abs,
            mean,
        });
        Ok(self.rows.last().expect("just pushed"))
    }

    /// Weights of the law derivative whose newest point is `t_n`.
    fn law_weights(&mut self, n: usize) -> Result<WeightSequence> {
        match (self.cache.as_mut(), self.law) {
            (Some(c), _) => Ok(c.sequence(n)),
            (None, LawKind::L1) => nonuniform_weights(self.alpha, &self.mesh, n),
            (None, LawKind::HalfL1) => nonuniform_half_weights(self.alpha, &self.mesh, n - 1),
        }
    }

    /// CSV with header `step,t,E,E_modified,fracDE,D_m,E_weighted,max_abs,mean`;
    /// absent quantities are empty fields.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "step,t,E,E_modified,fracDE,D_m,E_weighted,max_abs,mean")?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                w,
                "{},{:.17e},{:.17e},{},{},{},{},{:.17e},{:.17e}",
                r.step,
                r.t,
                r.energy,
                opt(r.modified),
                opt(r.frac_de),
                opt(r.d_m),
                opt(r.e_weighted),
                r.max_abs,
                r.mean
            )?;
        }
        Ok(())
    }
}

/// Discrete Caputo derivative of a scalar energy history.
pub fn frac_derivative_of_energy(e: &[f64], weights: &WeightSequence) -> Result<f64> {
    apply_frac_derivative(e, weights)
}

/// `D^m = (1 / (Gamma(alpha) t_m)) sum_{k=1}^m t_k^alpha b_{m-k} (E^k - E^{k-1}) / dt`
/// with `m = e.len() - 1`. Only defined on uniform meshes.
pub fn weighted_energy_rate(e: &[f64], alpha: f64, mesh: &TimeMesh) -> Result<f64> {
    let dt = mesh
        .uniform_dt()
        .ok_or_else(|| Error::Domain("the weighted energy law is only defined on uniform meshes".into()))?;
    if e.len() < 2 {
        return Err(Error::InsufficientPoints { need: 2, got: e.len() });
    }
    let m = e.len() - 1;
    if m > mesh.num_steps() {
        return Err(Error::MeshExhausted {
            requested: m,
            available: mesh.num_steps(),
        });
    }
    let mut cache = UniformWeightCache::new(WeightKind::UniformL1, alpha, dt)?;
    let b = cache.get(m).to_vec();
    Ok(weighted_rate_with(e, alpha, dt, &b))
}

fn weighted_rate_with(e: &[f64], alpha: f64, dt: f64, b: &[f64]) -> f64 {
    let m = e.len() - 1;
    let sum: f64 = (1..=m)
        .map(|k| (k as f64 * dt).powf(alpha) * b[m - k] * (e[k] - e[k - 1]) / dt)
        .sum();
    sum / (gamma(alpha) * m as f64 * dt)
}

/// Outcome of one assertion over a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct LawCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Largest value of the asserted quantity (should be `<= tolerance`).
    pub worst: f64,
    pub tolerance: f64,
    pub first_violation: Option<usize>,
}

fn scan(name: &'static str, tolerance: f64, values: impl Iterator<Item = (usize, f64)>) -> LawCheck {
    let mut check = LawCheck {
        name,
        passed: true,
        worst: f64::NEG_INFINITY,
        tolerance,
        first_violation: None,
    };
    for (n, v) in values {
        check.worst = check.worst.max(v);
        if !(v <= tolerance) && check.passed {
            check.passed = false;
            check.first_violation = Some(n);
        }
    }
    check
}

/// `E^n - E^0 <= LAW_RTOL * max(1, |E^0|)` for the law energy.
pub fn boundedness_check(trace: &EnergyTrace) -> LawCheck {
    let e = trace.law_energies();
    let e0 = e.first().copied().unwrap_or(0.0);
    scan("energy_boundedness", law_tolerance(e0), e.iter().enumerate().map(|(n, v)| (n, v - e0)))
}

/// Steps `n` with `E^{n+1} > E^n` (law energy). Informational.
pub fn monotonicity_events(trace: &EnergyTrace) -> Vec<MonotonicityEvent> {
    let e = trace.law_energies();
    e.windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0])
        .map(|(n, w)| MonotonicityEvent {
            step: n,
            t: trace.mesh().t(n + 1),
            increase: w[1] - w[0],
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityEvent {
    /// `E^{step+1} > E^{step}`.
    pub step: usize,
    /// `t_{step+1}`.
    pub t: f64,
    pub increase: f64,
}

/// Discrete fractional energy law `fracDE <= tol` (uniform meshes).
pub fn fractional_law_check(trace: &EnergyTrace) -> Option<LawCheck> {
    if !trace.is_uniform() {
        return None;
    }
    let tol = law_tolerance(trace.law_energies().first().copied().unwrap_or(0.0));
    Some(scan(
        "fractional_energy_law",
        tol,
        trace.rows().iter().filter_map(|r| r.frac_de.map(|v| (r.step, v))),
    ))
}

/// `D^m <= tol / dt` and `E~^n <= E~^{n-1} + tol`.
pub fn weighted_law_checks(trace: &EnergyTrace) -> Option<(LawCheck, LawCheck)> {
    if !trace.has_weighted_law() {
        return None;
    }
    let dt = trace.mesh().uniform_dt().expect("uniform");
    let tol = law_tolerance(trace.law_energies().first().copied().unwrap_or(0.0));
    let rate = scan(
        "weighted_energy_rate",
        tol / dt,
        trace.rows().iter().filter_map(|r| r.d_m.map(|v| (r.step, v))),
    );
    let ew: Vec<f64> = trace.rows().iter().filter_map(|r| r.e_weighted).collect();
    let mono = scan(
        "weighted_energy_nonincreasing",
        tol,
        ew.windows(2).enumerate().map(|(n, w)| (n + 1, w[1] - w[0])),
    );
    Some((rate, mono))
}

/// Largest deviation of `E~^n` from `E^0 + dt sum_{m<=n} D^m` recomputed from
/// the stored `D^m`.
pub fn weighted_energy_consistency(trace: &EnergyTrace) -> Option<f64> {
    if !trace.has_weighted_law() {
        return None;
    }
    let dt = trace.mesh().uniform_dt().expect("uniform");
    let mut acc = trace.law_energies()[0];
    let mut worst: f64 = 0.0;
    for r in trace.rows() {
        if let Some(d) = r.d_m {
            acc += dt * d;
        }
        worst = worst.max((acc - r.e_weighted.expect("uniform")).abs());
    }
    Some(worst)
}

/// The two scalar inequalities behind the fractional and weighted laws,
/// written in terms of `E^k - E^0`:
///
/// * `b_0 (E^n - E^0) <= sum_{k=1}^{n-1} (b_{n-k-1} - b_{n-k}) (E^k - E^0)`,
/// * `b_0 n^a (E^n - E^0) <= sum_{k=1}^{n-1} [(k+1)^a b_{n-k-1} - k^a b_{n-k}] (E^k - E^0)`.
///
/// Returns `lhs - rhs` of both, for `n = 1..N`.
pub fn remark_inequalities(e: &[f64], alpha: f64) -> Result<Vec<(f64, f64)>> {
    if e.len() < 2 {
        return Err(Error::InsufficientPoints { need: 2, got: e.len() });
    }
    let big_n = e.len() - 1;
    // dt and Gamma cancel from both sides
    let mut cache = UniformWeightCache::new(WeightKind::UniformL1, alpha, 1.0)?;
    let b = cache.get(big_n).to_vec();
    let de: Vec<f64> = e.iter().map(|v| v - e[0]).collect();
    let pa = |k: usize| (k as f64).powf(alpha);
    Ok((1..=big_n)
        .map(|n| {
            let mut r1 = 0.0;
            let mut r2 = 0.0;
            for k in 1..n {
                r1 += (b[n - k - 1] - b[n - k]) * de[k];
                r2 += (pa(k + 1) * b[n - k - 1] - pa(k) * b[n - k]) * de[k];
            }
            (b[0] * de[n] - r1, b[0] * pa(n) * de[n] - r2)
        })
        .collect())
}

/// Wherever the weighted inequality has held at every step so far, the
/// fractional inequality must hold at the current step.
pub fn remark_implication_check(trace: &EnergyTrace) -> Option<LawCheck> {
    if !trace.has_weighted_law() || trace.law_energies().len() < 2 {
        return None;
    }
    let e = trace.law_energies();
    let ineq = remark_inequalities(e, trace.alpha()).ok()?;
    let tol = law_tolerance(e[0]);
    let mut premise = true;
    let mut excess = Vec::with_capacity(ineq.len());
    for (i, (r1, r2)) in ineq.iter().enumerate() {
        let n = i + 1;
        premise &= *r2 <= tol * (n as f64).powf(trace.alpha());
        // only steps where the premise holds can violate the implication
        excess.push((n, if premise { *r1 } else { f64::NEG_INFINITY }));
    }
    Some(scan("remark_implication", tol, excess.into_iter()))
}

/// `|mean^n - mean^0| <= tol` for all `n`.
pub fn mass_conservation_check(trace: &EnergyTrace, tol: f64) -> LawCheck {
    let m0 = trace.rows().first().map(|r| r.mean).unwrap_or(0.0);
    scan(
        "mass_conservation",
        tol,
        trace.rows().iter().map(|r| (r.step, (r.mean - m0).abs())),
    )
}

/// `max |phi^n| <= bound` for all `n`.
pub fn max_bound_check(trace: &EnergyTrace, bound: f64) -> LawCheck {
    let mut c = scan(
        "maximum_bound",
        0.0,
        trace.rows().iter().map(|r| (r.step, r.max_abs - bound)),
    );
    c.worst += bound;
    c.tolerance = bound;
    c
}

/// Every assertion that applies to the trace by itself.
pub fn energy_law_checks(trace: &EnergyTrace) -> Vec<LawCheck> {
    let mut out = vec![boundedness_check(trace)];
    out.extend(fractional_law_check(trace));
    if let Some((a, b)) = weighted_law_checks(trace) {
        out.push(a);
        out.push(b);
    }
    out.extend(remark_implication_check(trace));
    out
}
