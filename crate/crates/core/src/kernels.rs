//! The trace kernel
//!
//! `I(a, z) = ∫_{-1}^{1} (1 - t²)^{(n-3)/2} (1 - 2at + a² + z²)^{-n/2} dt`
//!
//! and the sphere-reduced Riesz kernel
//!
//! `K(ρ, r) = ∫_{-1}^{1} (1 - t²)^{(n-3)/2} (ρ² - 2ρrt + r²)^{-γ/2} dt`.
//!
//! Both are evaluated after `t = cos θ`, which removes the endpoint weight for
//! n = 2, and with the denominator written as `d² + 4ρr·sin²(θ/2)` where
//! `d = |ρ - r|` (plus the height). That form has no cancellation and shows
//! where the peak sits: at θ = 0 with width `2d/√(4ρr)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{Adaptive, Estimate};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub a: f64,
    pub z: f64,
    pub n: u32,
    pub value: f64,
    pub est_error: f64,
}

/// `x^{-e}` with a fast path when `2e` is an integer.
#[inline]
fn neg_pow(x: f64, e: f64) -> f64 {
    let twice = 2.0 * e;
    if twice.fract() == 0.0 && twice.abs() < 64.0 {
        let k = twice as i32;
        if k % 2 == 0 {
            x.powi(-k / 2)
        } else {
            x.powi(-(k - 1) / 2) / x.sqrt()
        }
    } else {
        x.powf(-e)
    }
}

/// Breakpoints `0, w, 4w, 16w, ..., π` clustering panels at the peak.
fn peak_breaks(width: f64) -> Vec<f64> {
    if width >= 0.5 * PI {
        return vec![0.0, PI];
    }
    let mut pts = vec![0.0];
    if width > 0.0 {
        let mut w = width.min(PI);
        // Resolve down to a few widths below the peak as well.
        let mut below = Vec::new();
        let mut v = w / 4.0;
        for _ in 0..3 {
            if v > 1e-300 {
                below.push(v);
            }
            v /= 4.0;
        }
        below.reverse();
        pts.extend(below);
        while w < PI {
            pts.push(w);
            w *= 4.0;
        }
    } else {
        // Unresolved peak at θ = 0: geometric panels down to tiny angles.
        let mut v = PI * 4f64.powi(-40);
        while v < PI {
            pts.push(v);
            v *= 4.0;
        }
    }
    pts.push(PI);
    pts.dedup();
    pts
}

/// `∫_0^π sin^{n-2}θ (d² + c·sin²(θ/2))^{-e} dθ`, `c = 4ρr`.
pub(crate) fn angular_integral(n: u32, d2: f64, c: f64, e: f64, quad: &Adaptive) -> Estimate<1> {
    let m = n as i32 - 2;
    let f = |theta: f64| {
        let s = (0.5 * theta).sin();
        let w = if m == 0 { 1.0 } else { theta.sin().powi(m) };
        w * neg_pow(d2 + c * s * s, e)
    };
    let width = if c > 0.0 { 2.0 * (d2 / c).sqrt() } else { PI };
    quad.integrate_with_breaks(f, &peak_breaks(width))
}

fn check_dim(n: u32) -> Result<()> {
    if n < 2 {
        Err(Error::DimensionOneKernel)
    } else {
        Ok(())
    }
}

/// The trace kernel `I(a, z)` for `n ≥ 2` by adaptive quadrature.
pub fn kernel_i(a: f64, z: f64, n: u32) -> Result<KernelEval> {
    kernel_i_with(a, z, n, &Adaptive::default())
}

pub fn kernel_i_with(a: f64, z: f64, n: u32, quad: &Adaptive) -> Result<KernelEval> {
    check_dim(n)?;
    if !(a >= 0.0) || !(z >= 0.0) || !a.is_finite() || !z.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kernel needs a >= 0, z >= 0, got ({a}, {z})"
        )));
    }
    if a == 1.0 && z == 0.0 {
        return Err(Error::KernelSingularPoint);
    }
    let d2 = (1.0 - a) * (1.0 - a) + z * z;
    let est = angular_integral(n, d2, 4.0 * a, 0.5 * n as f64, quad);
    Ok(KernelEval {
        a,
        z,
        n,
        value: est.scalar(),
        est_error: est.error,
    })
}

/// Closed form of `I(a, z)` for n = 3, written as `4/(d·D·(d + D))` with
/// `d = √((1-a)² + z²)`, `D = √((1+a)² + z²)`, which equals
/// `(1/a)(1/d - 1/D)` without the cancellation at small a.
pub fn kernel_i_closed_n3(a: f64, z: f64) -> Result<f64> {
    if a == 1.0 && z == 0.0 {
        return Err(Error::KernelSingularPoint);
    }
    let d = ((1.0 - a) * (1.0 - a) + z * z).sqrt();
    let big = ((1.0 + a) * (1.0 + a) + z * z).sqrt();
    Ok(4.0 / (d * big * (d + big)))
}

/// The n = 1 trace kernel: the two-point "sphere" `{±1}` gives
/// `((1-a)² + z²)^{-1/2} + ((1+a)² + z²)^{-1/2}`.
pub fn kernel_i1(a: f64, z: f64) -> Result<f64> {
    if a == 1.0 && z == 0.0 {
        return Err(Error::KernelSingularPoint);
    }
    let d = ((1.0 - a) * (1.0 - a) + z * z).sqrt();
    let big = ((1.0 + a) * (1.0 + a) + z * z).sqrt();
    Ok(1.0 / d + 1.0 / big)
}

/// Sphere-reduced Riesz kernel; symmetric in `(ρ, r)` by construction.
pub fn sphere_kernel(rho: f64, r: f64, gamma: f64, n: u32) -> Result<f64> {
    sphere_kernel_with(rho, r, gamma, n, &Adaptive::default()).map(|e| e.scalar())
}

pub fn sphere_kernel_with(
    rho: f64,
    r: f64,
    gamma: f64,
    n: u32,
    quad: &Adaptive,
) -> Result<Estimate<1>> {
    check_dim(n)?;
    let nf = n as f64;
    if !(gamma > 0.0 && gamma < nf) {
        return Err(Error::RieszExponentOutOfRange { gamma, n });
    }
    if !(rho > 0.0 && r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sphere kernel needs positive radii, got ({rho}, {r})"
        )));
    }
    if rho == r && gamma >= nf - 1.0 {
        return Err(Error::KernelSingularPoint);
    }
    let (hi, lo) = if rho >= r { (rho, r) } else { (r, rho) };
    let d = hi - lo;
    Ok(angular_integral(n, d * d, 4.0 * hi * lo, 0.5 * gamma, quad))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `I(a → 0, z)` against `1 + z²`; slope `-n/2`.
    SmallA,
    /// `I(r, 0)` against r; slope `-n`.
    LargeR,
    /// `I(1, z)` against z; slope `-1`.
    Singular,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small_a" | "small-a" => Ok(Regime::SmallA),
            "large_r" | "large-r" => Ok(Regime::LargeR),
            "singular" => Ok(Regime::Singular),
            other => Err(Error::InvalidParameter(format!("unknown regime {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub regime: Regime,
    pub n: u32,
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the log residuals about the fitted line.
    pub residual: f64,
}

pub const FIT_SAMPLES: usize = 16;
pub const FIT_RESIDUAL_MAX: f64 = 0.05;

/// Least-squares line through `(x_i, y_i)`; returns (slope, intercept, rms).
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    (slope, intercept, (rss / m).sqrt())
}

/// Log-log slope of the kernel over one decade in the chosen regime.
pub fn kernel_asymptotic_fit(n: u32, regime: Regime) -> Result<AsymptoticFit> {
    check_dim(n)?;
    let scales: Vec<f64> = (0..FIT_SAMPLES)
        .map(|i| 10f64.powf(i as f64 / (FIT_SAMPLES - 1) as f64))
        .collect();
    let mut xs = Vec::with_capacity(FIT_SAMPLES);
    let mut ys = Vec::with_capacity(FIT_SAMPLES);
    for s in scales {
        let (x, v) = match regime {
            // 1 + z² runs over [1, 10].
            Regime::SmallA => {
                let z = (s - 1.0).sqrt();
                (s, kernel_i(1e-6, z, n)?.value)
            }
            Regime::LargeR => {
                let r = 100.0 * s;
                (r, kernel_i(r, 0.0, n)?.value)
            }
            Regime::Singular => {
                let z = 1e-4 * s;
                (z, kernel_i(1.0, z, n)?.value)
            }
        };
        xs.push(x.ln());
        ys.push(v.ln());
    }
    let (slope, intercept, residual) = fit_line(&xs, &ys);
    if !(residual <= FIT_RESIDUAL_MAX) {
        return Err(Error::AsymptoticRegimeNotReached { slope, residual });
    }
    Ok(AsymptoticFit {
        regime,
        n,
        slope,
        intercept,
        residual,
    })
}
