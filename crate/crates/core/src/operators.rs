//! Weighted norms and the two integral operators on radial data.
//!
//! Both operators reduce to multiplicative convolutions on the radial log
//! grid:
//!
//! * Riesz potential: `T_γv(ρ) = ω_{n-2} ∫ v(r) r^{n-γ} κ(ρ/r) dr/r` with
//!   `κ(a) = K(a, 1)` the sphere-reduced kernel, homogeneous of degree `-γ`.
//! * Trace operator: `Tf(ρ) = ω_{n-2} ∫_0^∞ dz̄ ∫ f(r, r z̄) r · I(ρ/r, z̄) dr/r`,
//!   which is `∫∫ f(y,z)/((x-y)² + z²)^{n/2} dy dz` after polar coordinates in
//!   `y` and the substitution `z = r z̄`.
//!
//! Kernels are peaked or singular at `ρ = r`, so the convolution weights are
//! computed by product integration: the smooth factor is interpolated by
//! piecewise cubics in `ln r` and the kernel is integrated exactly against the
//! interpolation basis (adaptive quadrature near the peak). The result is a
//! Toeplitz matrix applied by direct summation or by FFT on large grids.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fields::{HalfSpaceField, HalfSpaceFunction, RadialProfile};
use crate::grids::{radial_measure_integral, LogGrid, ProductGrid, BOUNDARY_THRESHOLD, TAIL_THRESHOLD};
use crate::kernels::angular_integral;
use crate::multconv::{lagrange4, linear_convolve};
use crate::quadrature::{gauss_legendre4, Adaptive};

/// Above this size Toeplitz products go through the FFT.
pub const DIRECT_LIMIT: usize = 2048;
/// Fraction of the trace integral allowed in the `(a ≈ 1, z̄ ≈ 0)` corner.
pub const CORNER_LIMIT: f64 = 0.01;

/// Surface area of the unit sphere in `ℝ^dim`: `2π^{dim/2}/Γ(dim/2)`.
/// `unit_sphere_area(n)` is `ω_{n-1}`.
pub fn unit_sphere_area(dim: u32) -> f64 {
    let half = dim as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Convolution,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Truncation {
    pub warning: bool,
    /// Largest share of the value coming from the first `z̄` cell and the
    /// extrapolated `z̄ → 0` end (trace operator only).
    pub corner_fraction: f64,
    pub notes: Vec<String>,
}

impl Truncation {
    fn note(&mut self, msg: impl Into<String>) {
        self.warning = true;
        self.notes.push(msg.into());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorResult {
    pub rho: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub truncation: Truncation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub truncation_warning: bool,
}

/// `(ω_{n-1} ∫ |u|^p ρ^{wp+n} dρ/ρ)^{1/p}` for any `p > 0`, with a flag
/// instead of an error on truncation.
pub fn weighted_norm_estimate(
    samples: &[f64],
    grid: &LogGrid,
    w: f64,
    p: f64,
    n: u32,
) -> Result<NormEstimate> {
    if !(p > 0.0) || n < 1 {
        return Err(Error::InvalidParameter(format!("need p > 0 and n >= 1, got p={p}, n={n}")));
    }
    let pow: Vec<f64> = samples.iter().map(|v| v.abs().powf(p)).collect();
    let res = radial_measure_integral(&pow, grid, w * p + n as f64)?;
    Ok(NormEstimate {
        value: (unit_sphere_area(n) * res.value).powf(1.0 / p),
        truncation_warning: res.truncation_warning,
    })
}

/// `‖|x|^w u‖_{L^p(ℝ^n)}` for a radial profile.
pub fn weighted_norm_radial(u: &RadialProfile, w: f64, p: f64, n: u32) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("need p >= 1, got {p}")));
    }
    let est = weighted_norm_estimate(&u.u, &u.grid, w, p, n)?;
    if est.truncation_warning {
        return Err(Error::TruncationDominated(format!(
            "norm with weight {w}, p = {p}, n = {n} is not captured by the grid"
        )));
    }
    Ok(est.value)
}

/// `(ω_{n-1} ∫∫ (r² + z²)^{αp/2} |g|^p r^{n-1} dr dz)^{1/p}` for samples on a
/// product grid (layout as in [`HalfSpaceField`]). Computed as
/// `∫ dz̄ (1 + z̄²)^{αp/2} ∫ |g(r, r z̄)|^p r^{αp+n+1} dr/r`.
pub fn weighted_norm_halfspace_estimate(
    g: &[f64],
    pgrid: &ProductGrid,
    alpha: f64,
    p: f64,
    n: u32,
) -> Result<NormEstimate> {
    if !(p > 0.0) || n < 1 {
        return Err(Error::InvalidParameter(format!("need p > 0 and n >= 1, got p={p}, n={n}")));
    }
    let (nr, nz) = (pgrid.nr(), pgrid.nz());
    if g.len() != nr * nz {
        return Err(Error::LengthMismatch {
            expected: nr * nz,
            got: g.len(),
        });
    }
    let exponent = alpha * p + n as f64 + 1.0;
    let mut slices = Vec::with_capacity(nz);
    let mut warns = Vec::with_capacity(nz);
    for (j, &zb) in pgrid.zgrid.nodes().iter().enumerate() {
        let pow: Vec<f64> = g[j * nr..(j + 1) * nr]
            .iter()
            .map(|v| v.abs().powf(p))
            .collect();
        let res = radial_measure_integral(&pow, &pgrid.rgrid, exponent)?;
        slices.push(res.value * (1.0 + zb * zb).powf(0.5 * alpha * p));
        warns.push(res.truncation_warning);
    }
    // Slices at large z̄ sit near rmin and stop being resolved there; the
    // z̄ integral is cut before the first such slice and the power-law tail
    // takes over.
    let first_bad = warns.iter().position(|w| *w).unwrap_or(nz);
    if first_bad < 4 {
        return Ok(NormEstimate {
            value: (unit_sphere_area(n) * pgrid.zbar_integral(&slices)?.value).powf(1.0 / p),
            truncation_warning: true,
        });
    }
    let total = pgrid.zbar_integral_upto(&slices, first_bad - 1)?;
    Ok(NormEstimate {
        value: (unit_sphere_area(n) * total.value).powf(1.0 / p),
        truncation_warning: total.truncation_warning || !total.value.is_finite(),
    })
}

pub fn weighted_norm_halfspace(
    g: &[f64],
    pgrid: &ProductGrid,
    alpha: f64,
    p: f64,
    n: u32,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("need p >= 1, got {p}")));
    }
    let est = weighted_norm_halfspace_estimate(g, pgrid, alpha, p, n)?;
    if est.truncation_warning {
        return Err(Error::TruncationDominated(format!(
            "half-space norm with alpha = {alpha}, p = {p}, n = {n} is not captured by the grid"
        )));
    }
    Ok(est.value)
}

/// How the log-coordinate kernel misbehaves at `u = 0`.
#[derive(Debug, Clone, Copy)]
enum Singularity {
    /// `|u|^{-power}` (log for 0, a cusp for negative powers).
    Endpoint { power: f64 },
    /// Smooth peak of the given width, complex singularities at `±i·width`.
    Peak { width: f64 },
}

/// Panels closer than this many steps to the singularity are integrated
/// adaptively.
const NEAR_STEPS: f64 = 8.0;

/// Toeplitz weights `W_m`, `m = -(N-1) ..= N-1` (stored at `m + N - 1`), such
/// that `∫ H(t) κ(t_i - t) dt ≈ Σ_m W_{i-m} H_m` with H piecewise cubic.
fn toeplitz_weights<K>(h: f64, n: usize, kernel: K, sing: Singularity) -> Vec<f64>
where
    K: Fn(f64) -> f64 + Sync,
{
    let ni = n as i64;
    let quad = Adaptive::with_tols(0.0, 1e-12);
    // μ_k(d) = ∫_{(d-1)h}^{dh} L_k(d - u/h) κ(u) du, d = -N ..= N+1.
    let moments: Vec<[f64; 4]> = (-ni..=ni + 1)
        .into_par_iter()
        .map(|d| {
            let df = d as f64;
            let (u0, u1) = ((df - 1.0) * h, df * h);
            let dist = if u0 <= 0.0 && u1 >= 0.0 {
                0.0
            } else {
                u0.abs().min(u1.abs())
            };
            let f = |u: f64| {
                let k = kernel(u);
                let l = lagrange4(df - u / h);
                [l[0] * k, l[1] * k, l[2] * k, l[3] * k]
            };
            match sing {
                Singularity::Peak { width } => {
                    if dist.hypot(width) >= NEAR_STEPS * h {
                        gauss_legendre4(f, u0, u1)
                    } else {
                        let mut pts = vec![u0, u1];
                        let mut w = width / 64.0;
                        while w < h {
                            for c in [w, -w] {
                                if c > u0 && c < u1 {
                                    pts.push(c);
                                }
                            }
                            w *= 4.0;
                        }
                        if u0 < 0.0 && u1 > 0.0 {
                            pts.push(0.0);
                        }
                        pts.sort_by(|a, b| a.total_cmp(b));
                        pts.dedup();
                        quad.integrate_vec(f, &pts).value
                    }
                }
                Singularity::Endpoint { power } => {
                    if dist >= NEAR_STEPS * h {
                        gauss_legendre4(f, u0, u1)
                    } else if dist > 0.0 {
                        quad.integrate_vec(f, &[u0, u1]).value
                    } else {
                        // The singular point is an endpoint (d = 0 or 1):
                        // u = ±h x^k flattens |u|^{-power}.
                        let k = if power > 0.0 { (2.0 / (1.0 - power)).max(2.0) } else { 2.0 };
                        let sign = if u1 > 0.0 { 1.0 } else { -1.0 };
                        let g = |x: f64| {
                            let xk = x.powf(k);
                            let u = sign * h * xk;
                            let jac = h * k * xk / x;
                            let v = f(u);
                            [v[0] * jac, v[1] * jac, v[2] * jac, v[3] * jac]
                        };
                        let mut pts = vec![0.0];
                        let mut x = 1e-6;
                        while x < 1.0 {
                            pts.push(x);
                            x *= 8.0;
                        }
                        pts.push(1.0);
                        quad.integrate_vec(g, &pts).value
                    }
                }
            }
        })
        .collect();
    // W_m = Σ_{k=-1}^{2} μ_k(m + k); moment index of d is d + N.
    (-(ni - 1)..ni)
        .map(|m| {
            (0..4)
                .map(|k| {
                    let d = m + k as i64 - 1;
                    moments[(d + ni) as usize][k]
                })
                .sum()
        })
        .collect()
}

/// `out_i = Σ_m W_{i-m} x_m`.
fn toeplitz_apply(weights: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n > DIRECT_LIMIT {
        let full = linear_convolve(x, weights);
        return full[n - 1..2 * n - 1].to_vec();
    }
    (0..n)
        .map(|i| {
            let row = &weights[i..i + n];
            // W_{i-m} sits at i - m + N - 1; walk m downwards through the row.
            let mut acc = 0.0;
            for (m, xm) in x.iter().enumerate() {
                if *xm != 0.0 {
                    acc += row[n - 1 - m] * xm;
                }
            }
            acc
        })
        .collect()
}

/// `κ(u) = K(e^u, 1)` for the Riesz kernel, without cancellation near u = 0.
fn riesz_kernel_log(u: f64, gamma: f64, n: u32, quad: &Adaptive) -> f64 {
    let d = u.exp_m1();
    angular_integral(n, d * d, 4.0 * u.exp(), 0.5 * gamma, quad).scalar()
}

/// `I(e^u, z̄)`, closed forms for n = 1, 2, 3.
fn trace_kernel_log(u: f64, zb: f64, n: u32, quad: &Adaptive) -> f64 {
    let a = u.exp();
    let dm = u.exp_m1();
    let d2 = dm * dm + zb * zb;
    let big2 = (1.0 + a) * (1.0 + a) + zb * zb;
    match n {
        1 => 1.0 / d2.sqrt() + 1.0 / big2.sqrt(),
        2 => std::f64::consts::PI / (d2 * big2).sqrt(),
        3 => {
            let (d, big) = (d2.sqrt(), big2.sqrt());
            4.0 / (d * big * (d + big))
        }
        _ => angular_integral(n, d2, 4.0 * a, 0.5 * n as f64, quad).scalar(),
    }
}

/// Riesz potential `T_γ` on a fixed grid with precomputed weights.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    grid: Arc<LogGrid>,
    gamma: f64,
    n: u32,
    weights: Vec<f64>,
}

impl RieszOperator {
    pub fn new(grid: Arc<LogGrid>, gamma: f64, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionOneKernel);
        }
        if !(gamma > 0.0 && gamma < n as f64) {
            return Err(Error::RieszExponentOutOfRange { gamma, n });
        }
        let quad = Adaptive::with_tols(0.0, 1e-13);
        let power = gamma - (n as f64 - 1.0);
        let prefactor = unit_sphere_area(n - 1);
        let mut weights = toeplitz_weights(
            grid.h(),
            grid.len(),
            |u| riesz_kernel_log(u, gamma, n, &quad),
            Singularity::Endpoint { power },
        );
        for w in weights.iter_mut() {
            *w *= prefactor;
        }
        Ok(Self {
            grid,
            gamma,
            n,
            weights,
        })
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn apply(&self, v: &[f64]) -> Result<OperatorResult> {
        self.grid.check_len(v.len())?;
        let shift = self.n as f64 - self.gamma;
        let hv: Vec<f64> = v
            .iter()
            .zip(self.grid.nodes())
            .map(|(x, r)| x * r.powf(shift))
            .collect();
        let mut values = toeplitz_apply(&self.weights, &hv);
        // Ball below rmin, with v frozen at v(rmin) and |x - y| ≈ |x|.
        let rmin = self.grid.rmin();
        let nf = self.n as f64;
        let core = v[0] * unit_sphere_area(self.n) * rmin.powf(nf) / nf;
        if core != 0.0 {
            for (t, r) in values.iter_mut().zip(self.grid.nodes()) {
                *t += core * r.powf(-self.gamma);
            }
        }
        let mut truncation = Truncation::default();
        let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if m > 0.0 && v[v.len() - 1].abs() > BOUNDARY_THRESHOLD * m {
            truncation.note("input does not decay at rmax");
        }
        Ok(OperatorResult {
            rho: self.grid.nodes().to_vec(),
            values,
            method: Method::Convolution,
            truncation,
        })
    }
}

/// `T_γ v` for a radial profile, `0 < γ < n`.
pub fn riesz_radial(v: &RadialProfile, gamma: f64, n: u32) -> Result<OperatorResult> {
    RieszOperator::new(v.grid.clone(), gamma, n)?.apply(&v.u)
}

/// `T_{n-1}(|∇u|)`; `|u| ≤ T_{n-1}(|∇u|)/ω_{n-1}` pointwise.
pub fn representation_bound(u: &RadialProfile, n: u32) -> Result<OperatorResult> {
    if n < 2 {
        return Err(Error::DimensionOneKernel);
    }
    RieszOperator::new(u.grid.clone(), n as f64 - 1.0, n)?.apply(&u.abs_du())
}

/// `T_{n-1}(|∇u|)/ω_{n-1} - |u|` at every node.
pub fn representation_margin(u: &RadialProfile, n: u32) -> Result<Vec<f64>> {
    let bound = representation_bound(u, n)?;
    let c = unit_sphere_area(n);
    Ok(bound
        .values
        .iter()
        .zip(&u.u)
        .map(|(t, v)| t / c - v.abs())
        .collect())
}

/// Half-space trace operator on a fixed product grid.
#[derive(Debug, Clone)]
pub struct TraceOperator {
    pgrid: Arc<ProductGrid>,
    n: u32,
    /// One Toeplitz row per `z̄` node.
    weights: Vec<Vec<f64>>,
}

impl TraceOperator {
    pub fn new(pgrid: Arc<ProductGrid>, n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
        }
        let quad = Adaptive::with_tols(0.0, 1e-13);
        let prefactor = if n == 1 { 1.0 } else { unit_sphere_area(n - 1) };
        let h = pgrid.rgrid.h();
        let nr = pgrid.nr();
        let weights = pgrid
            .zgrid
            .nodes()
            .iter()
            .map(|&zb| {
                let mut w = toeplitz_weights(
                    h,
                    nr,
                    |u| trace_kernel_log(u, zb, n, &quad),
                    Singularity::Peak { width: zb },
                );
                for x in w.iter_mut() {
                    *x *= prefactor;
                }
                w
            })
            .collect();
        Ok(Self { pgrid, n, weights })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn pgrid(&self) -> &Arc<ProductGrid> {
        &self.pgrid
    }

    pub fn apply(&self, field: &HalfSpaceField) -> Result<OperatorResult> {
        if !Arc::ptr_eq(&field.pgrid, &self.pgrid) && *field.pgrid != *self.pgrid {
            return Err(Error::GridMismatch);
        }
        self.apply_samples(&field.f)
    }

    /// Samples laid out slice-per-`z̄` (`j*nr + i`).
    pub fn apply_samples(&self, f: &[f64]) -> Result<OperatorResult> {
        let (nr, nz) = (self.pgrid.nr(), self.pgrid.nz());
        if f.len() != nr * nz {
            return Err(Error::LengthMismatch {
                expected: nr * nz,
                got: f.len(),
            });
        }
        let rnodes = self.pgrid.rgrid.nodes();
        let slices: Vec<Vec<f64>> = (0..nz)
            .into_par_iter()
            .map(|j| {
                let hj: Vec<f64> = f[j * nr..(j + 1) * nr]
                    .iter()
                    .zip(rnodes)
                    .map(|(v, r)| v * r)
                    .collect();
                toeplitz_apply(&self.weights[j], &hj)
            })
            .collect();
        let w0 = self.pgrid.zbar_weights()[0];
        let zmax = self.pgrid.zgrid.rmax();
        let per_node: Vec<(f64, f64, bool)> = (0..nr)
            .map(|i| {
                let g: Vec<f64> = slices.iter().map(|s| s[i]).collect();
                let res = self.pgrid.zbar_integral(&g)?;
                let corner = if res.value != 0.0 {
                    (res.lower_tail.abs() + (w0 * g[0]).abs()) / res.value.abs()
                } else {
                    0.0
                };
                // the z̄ → 0 end is the singular corner, judged separately
                let upper_warn = res.upper_tail.abs() > TAIL_THRESHOLD * res.value.abs()
                    || (res.upper_tail == 0.0
                        && (g[nz - 1] * zmax).abs() > BOUNDARY_THRESHOLD * res.value.abs());
                Ok((res.value, corner, upper_warn || !res.value.is_finite()))
            })
            .collect::<Result<_>>()?;
        let vmax = per_node.iter().fold(0.0_f64, |m, x| m.max(x.0.abs()));
        let mut truncation = Truncation::default();
        let mut worst_corner = 0.0_f64;
        let mut zbar_warn = false;
        for (v, c, w) in &per_node {
            if v.abs() > 1e-6 * vmax {
                worst_corner = worst_corner.max(*c);
                zbar_warn |= *w;
            }
        }
        truncation.corner_fraction = worst_corner;
        if worst_corner > CORNER_LIMIT {
            truncation.note(format!(
                "singular corner carries {:.2}% of the value; refine the z-bar grid",
                100.0 * worst_corner
            ));
        }
        if zbar_warn {
            truncation.note("z-bar integral dominated by its extrapolated ends");
        }
        Ok(OperatorResult {
            rho: rnodes.to_vec(),
            values: per_node.into_iter().map(|x| x.0).collect(),
            method: Method::Convolution,
            truncation,
        })
    }
}

/// `Tf` on the grid of `f` by the multiplicative-convolution route.
pub fn trace_apply(f: &HalfSpaceField, n: u32) -> Result<OperatorResult> {
    TraceOperator::new(f.pgrid.clone(), n)?.apply(f)
}

/// Parameter range `[t0, t1]` of the ray `origin + t·(c, s)` (s > 0) inside
/// the box `[ylo, yhi] × [0, zhi]`, with `t ≥ 0`.
fn ray_box(origin: f64, c: f64, s: f64, ylo: f64, yhi: f64, zhi: f64) -> Option<(f64, f64)> {
    let mut t0 = 0.0_f64;
    let mut t1 = zhi / s;
    if c.abs() < 1e-300 {
        if origin < ylo || origin > yhi {
            return None;
        }
    } else {
        let (a, b) = ((ylo - origin) / c, (yhi - origin) / c);
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t1 > t0).then_some((t0, t1))
}

/// Oracle evaluation of `Tf(ρ)` by 2D quadrature in polar coordinates
/// centred at the singular point `(ρ, 0)`.
///
/// For `n ≥ 2` the integrand is `ω_{n-2} f(r,z) r^{n-1} J(r,z) s` with the
/// angular integral `J` done by quadrature; for n = 1 the kernel cancels the
/// polar Jacobian and the integrand is `f(|y|, z)` over `y ∈ ℝ`.
pub fn trace_apply_direct<F: HalfSpaceFunction + ?Sized>(
    f: &F,
    n: u32,
    points: &[f64],
) -> Result<OperatorResult> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
    }
    let (rmax, zmax) = f.extent();
    if !rmax.is_finite() || !zmax.is_finite() {
        return Err(Error::TruncationDominated(
            "direct quadrature needs a bounded support box".into(),
        ));
    }
    let ylo = if n == 1 { -rmax } else { 0.0 };
    let outer = Adaptive::with_tols(0.0, 1e-10);
    let inner = Adaptive::with_tols(0.0, 1e-11);
    let ang = Adaptive::with_tols(0.0, 1e-12);
    let prefactor = if n == 1 { 1.0 } else { unit_sphere_area(n - 1) };
    let values: Vec<(f64, bool)> = points
        .par_iter()
        .map(|&x| {
            let mut budget_hit = false;
            let mut breaks = vec![0.0, std::f64::consts::PI];
            for corner in [ylo, rmax] {
                let phi = zmax.atan2(corner - x);
                if phi > 0.0 && phi < std::f64::consts::PI {
                    breaks.push(phi);
                }
            }
            breaks.push(std::f64::consts::FRAC_PI_2);
            breaks.sort_by(|a, b| a.total_cmp(b));
            breaks.dedup();
            let est = outer.integrate_with_breaks(
                |phi| {
                    let (s, c) = phi.sin_cos();
                    let Some((t0, t1)) = ray_box(x, c, s, ylo, rmax, zmax) else {
                        return 0.0;
                    };
                    let e = inner.integrate(
                        |t| {
                            let y = x + t * c;
                            let z = t * s;
                            if n == 1 {
                                f.value(y.abs(), z)
                            } else {
                                let r = y.max(0.0);
                                let fv = f.value(r, z);
                                if fv == 0.0 || r == 0.0 {
                                    return 0.0;
                                }
                                let j = angular_integral(n, t * t, 4.0 * x * r, 0.5 * n as f64, &ang);
                                fv * r.powi(n as i32 - 1) * j.scalar() * t
                            }
                        },
                        t0,
                        t1,
                    );
                    if !e.converged {
                        budget_hit = true;
                    }
                    e.scalar()
                },
                &breaks,
            );
            (prefactor * est.scalar(), budget_hit || !est.converged)
        })
        .collect();
    let mut truncation = Truncation::default();
    if values.iter().any(|v| v.1) {
        truncation.note("direct quadrature did not reach its tolerance at some points");
    }
    Ok(OperatorResult {
        rho: points.to_vec(),
        values: values.into_iter().map(|v| v.0).collect(),
        method: Method::Direct,
        truncation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_halfspace, make_radial, BoxIndicator, FamilySpec, ZProfile};
    use crate::grids::make_log_grid;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn radial_norm_examples() {
        let g = Arc::new(LogGrid::default_grid());
        let u = make_radial(FamilySpec::gaussian(1.0), g.clone()).unwrap();
        let expect = (PI / 2.0).powf(0.75);
        assert!(rel(weighted_norm_radial(&u, 0.0, 2.0, 3).unwrap(), expect) < 1e-10);
        let d = u.dilate(2.0).unwrap();
        assert!(rel(weighted_norm_radial(&d, 0.0, 2.0, 3).unwrap(), 2f64.powf(-1.5) * expect) < 1e-10);
        assert!(weighted_norm_radial(&u, 0.0, 0.5, 3).is_err());
        // Weight too singular at the origin.
        assert!(matches!(
            weighted_norm_radial(&u, -2.0, 2.0, 3),
            Err(Error::TruncationDominated(_))
        ));
    }

    #[test]
    fn ball_volume_from_sharp_bump() {
        let g = Arc::new(make_log_grid(1e-4, 10.0, 8192).unwrap());
        let u = make_radial(FamilySpec::bump(1.0, 256), g).unwrap();
        let v = weighted_norm_radial(&u, 0.0, 1.0, 3).unwrap();
        assert!(rel(v, 4.0 * PI / 3.0) < 0.01, "{v}");
        assert!(v < 4.0 * PI / 3.0);
    }

    fn small_pgrid(nr: usize, nz: usize) -> Arc<ProductGrid> {
        Arc::new(ProductGrid::new(
            make_log_grid(1e-4, 1e2, nr).unwrap(),
            make_log_grid(1e-4, 1e4, nz).unwrap(),
        ))
    }

    #[test]
    fn halfspace_norm_examples() {
        let pg = small_pgrid(1024, 160);
        let f = make_halfspace(
            FamilySpec::gaussian(1.0),
            ZProfile::Gaussian { scale: 1.0 },
            pg.clone(),
        )
        .unwrap();
        // the z̄ ends are extrapolated, which limits this to about 1e-6
        let v = weighted_norm_halfspace(&f.f, &pg, 0.0, 2.0, 1).unwrap();
        assert!(rel(v, (PI / 4.0).sqrt()) < 1e-5, "{v}");

        let bad = weighted_norm_halfspace_estimate(&f.f, &pg, -3.0, 2.0, 1).unwrap();
        assert!(bad.truncation_warning);

        // g(λr, λz) scales the norm by λ^{-α-(n+1)/p}.
        let (alpha, p, n) = (0.5, 2.0, 3);
        let base = weighted_norm_halfspace(&f.f, &pg, alpha, p, n).unwrap();
        let lam = 1.7;
        let d = f.dilate(lam).unwrap();
        let dv = weighted_norm_halfspace(&d.f, &pg, alpha, p, n).unwrap();
        assert!(rel(dv, base * lam.powf(-alpha - (n as f64 + 1.0) / p)) < 1e-8);
    }

    // n = 3, γ = 1: T v(ρ) = 4π [ρ^{-1} ∫_0^ρ v r² dr + ∫_ρ^∞ v r dr].
    fn newton_oracle(spec: FamilySpec, rho: f64) -> f64 {
        let q = Adaptive::with_tols(1e-14, 1e-12);
        let inner = q.integrate(|r| spec.eval(r).0 * r * r, 0.0, rho).scalar();
        let outer = q.integrate(|r| spec.eval(r).0 * r, rho, 12.0).scalar();
        4.0 * PI * (inner / rho + outer)
    }

    #[test]
    fn riesz_matches_newton_shell_formula() {
        let g = Arc::new(make_log_grid(1e-4, 50.0, 2048).unwrap());
        let spec = FamilySpec::gaussian(1.0);
        let v = make_radial(spec, g.clone()).unwrap();
        let t = riesz_radial(&v, 1.0, 3).unwrap();
        for i in (400..2000).step_by(97) {
            let rho = g.nodes()[i];
            assert!(rel(t.values[i], newton_oracle(spec, rho)) < 1e-9, "rho={rho}");
        }
    }

    #[test]
    fn riesz_linearity_and_homogeneity() {
        let g = Arc::new(make_log_grid(1e-4, 1e3, 1024).unwrap());
        let a = make_radial(FamilySpec::gaussian(1.0), g.clone()).unwrap();
        let b = make_radial(FamilySpec::power_tail(0.5, 3.0, Some(20.0)), g.clone()).unwrap();
        let op = RieszOperator::new(g.clone(), 2.0, 3).unwrap();
        let ta = op.apply(&a.u).unwrap().values;
        let tb = op.apply(&b.u).unwrap().values;
        let mix: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let tm = op.apply(&mix).unwrap().values;
        let scale = tm.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..g.len() {
            assert!((tm[i] - (2.0 * ta[i] - 3.0 * tb[i])).abs() < 1e-10 * scale);
        }
        // T_γ f_λ(ρ) = λ^{γ-n} (T_γ f)(λρ) with λ = e^{kh}.
        let k = 37;
        let lam = (k as f64 * g.h()).exp();
        let d = a.dilate(lam).unwrap();
        let td = op.apply(&d.u).unwrap().values;
        for i in 100..700 {
            let expect = lam.powf(2.0 - 3.0) * ta[i + k];
            assert!(rel(td[i], expect) < 1e-6, "{i}: {} vs {expect}", td[i]);
        }
    }

    #[test]
    fn representation_margin_nonnegative() {
        let g = Arc::new(make_log_grid(1e-4, 1e2, 2048).unwrap());
        for n in [2u32, 3, 5] {
            let u = make_radial(FamilySpec::gaussian(1.0), g.clone()).unwrap();
            let m = representation_margin(&u, n).unwrap();
            assert!(m.iter().all(|x| *x >= -1e-6), "n={n}: {:?}", m.iter().cloned().fold(f64::INFINITY, f64::min));
            // Equality at the origin.
            assert!(m[0].abs() < 1e-3);
        }
        let zero = make_radial(FamilySpec::gaussian(1.0).with_amplitude(0.0), g).unwrap();
        assert!(representation_margin(&zero, 3).unwrap().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn trace_n1_box_oracle() {
        let b = BoxIndicator { r_max: 1.0, z_max: 1.0 };
        let v = trace_apply_direct(&b, 1, &[0.0]).unwrap();
        let exact = 4.0 * (1.0 + 2f64.sqrt()).ln();
        assert!((v.values[0] - exact).abs() < 1e-8, "{}", v.values[0]);
        // Far field: Tf(x) x → area = 2.
        let x = 1e4;
        let far = trace_apply_direct(&b, 1, &[x]).unwrap();
        assert!((far.values[0] * x - 2.0).abs() < 1e-4);
    }

    #[test]
    fn trace_convolution_matches_direct_n3() {
        let pg = small_pgrid(768, 128);
        let f = make_halfspace(FamilySpec::gaussian(1.0), ZProfile::Gaussian { scale: 1.0 }, pg.clone())
            .unwrap();
        let conv = trace_apply(&f, 3).unwrap();
        assert!(!conv.truncation.warning, "{:?}", conv.truncation);
        let idx: Vec<usize> = (300..700).step_by(40).collect();
        let pts: Vec<f64> = idx.iter().map(|&i| pg.rgrid.nodes()[i]).collect();
        let direct = trace_apply_direct(&f, 3, &pts).unwrap();
        for (k, &i) in idx.iter().enumerate() {
            assert!(rel(conv.values[i], direct.values[k]) < 1e-5, "rho={}: {} vs {}", pts[k], conv.values[i], direct.values[k]);
        }
    }
}
