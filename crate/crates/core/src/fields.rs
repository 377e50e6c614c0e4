//! Radial test profiles and half-space fields with analytic derivatives.
//!
//! Compact support is replaced by super-exponential decay (gaussian), an
//! exact cutoff with all derivatives vanishing (bump), or a C² smootherstep
//! cutoff (power tail). Truncation is monitored downstream by the norms.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grids::{LogGrid, ProductGrid};

/// Gaussian values below `exp(-GAUSS_CUT²)` are treated as zero when sizing
/// supports.
const GAUSS_CUT: f64 = 6.5;
/// Profile scales must exceed rmin by this factor so the plateau is resolved.
const PLATEAU_MARGIN: f64 = 100.0;
/// Bump sharpness used when a bump stands in for the indicator of a ball.
/// The missing volume is about 2.3/m of the ball.
pub const BALL_SHARPNESS: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `exp(-(ρ/s)²)`
    Gaussian,
    /// `exp(1 - 1/(1 - (ρ/s)^{2m}))` inside the ball of radius s, zero
    /// outside. Normalised to 1 at the centre; larger m is closer to the
    /// indicator of the ball.
    Bump { sharpness: u32 },
    /// `(1 + (ρ/s)²)^{-λ/2}` times an optional C² cutoff on `[c/2, c]`.
    PowerTail {
        tail_exponent: f64,
        cutoff: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilySpec {
    pub family: Family,
    pub scale: f64,
    pub amplitude: f64,
}

/// `6t⁵ - 15t⁴ + 10t³` and its derivative, clamped to `[0, 1]`.
fn smootherstep(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        let t2 = t * t;
        (
            t * t2 * (10.0 - 15.0 * t + 6.0 * t2),
            30.0 * t2 * (1.0 - t) * (1.0 - t),
        )
    }
}

impl FamilySpec {
    /// The standard test profiles: a gaussian, a smooth bump and a power
    /// tail with a cutoff.
    pub fn bundled() -> Vec<Self> {
        vec![
            Self::gaussian(1.0),
            Self::bump(2.0, 2),
            Self::power_tail(1.0, 3.0, Some(20.0)),
        ]
    }

    pub fn gaussian(scale: f64) -> Self {
        Self {
            family: Family::Gaussian,
            scale,
            amplitude: 1.0,
        }
    }

    pub fn bump(scale: f64, sharpness: u32) -> Self {
        Self {
            family: Family::Bump { sharpness },
            scale,
            amplitude: 1.0,
        }
    }

    pub fn power_tail(scale: f64, tail_exponent: f64, cutoff: Option<f64>) -> Self {
        Self {
            family: Family::PowerTail {
                tail_exponent,
                cutoff,
            },
            scale,
            amplitude: 1.0,
        }
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        Self { amplitude, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "family scale must be positive, got {}",
                self.scale
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        match self.family {
            Family::Gaussian => {}
            Family::Bump { sharpness } => {
                if sharpness == 0 {
                    return Err(Error::InvalidParameter("bump sharpness must be >= 1".into()));
                }
            }
            Family::PowerTail {
                tail_exponent,
                cutoff,
            } => {
                if !(tail_exponent > 0.0) || !tail_exponent.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "tail exponent must be positive, got {tail_exponent}"
                    )));
                }
                if let Some(c) = cutoff {
                    if !(c > 0.0) || !c.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "cutoff must be positive, got {c}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn tag(&self) -> String {
        match self.family {
            Family::Gaussian => format!("gaussian(s={})", self.scale),
            Family::Bump { sharpness } => format!("bump(s={},m={})", self.scale, sharpness),
            Family::PowerTail {
                tail_exponent,
                cutoff: Some(c),
            } => format!("power_tail(s={},lambda={},c={})", self.scale, tail_exponent, c),
            Family::PowerTail {
                tail_exponent,
                cutoff: None,
            } => format!("power_tail(s={},lambda={})", self.scale, tail_exponent),
        }
    }

    /// `(u(ρ), u'(ρ))`.
    pub fn eval(&self, rho: f64) -> (f64, f64) {
        let s = self.scale;
        let x = rho / s;
        let (u, du) = match self.family {
            Family::Gaussian => {
                let u = (-x * x).exp();
                (u, -2.0 * x / s * u)
            }
            Family::Bump { sharpness } => {
                if x >= 1.0 {
                    (0.0, 0.0)
                } else {
                    let m2 = 2 * sharpness as i32;
                    let xm = x.powi(m2 - 1);
                    let y = 1.0 - xm * x;
                    let u = (1.0 - 1.0 / y).exp();
                    if u == 0.0 {
                        (0.0, 0.0)
                    } else {
                        (u, -u * (m2 as f64) * xm / (s * y * y))
                    }
                }
            }
            Family::PowerTail {
                tail_exponent: lam,
                cutoff,
            } => {
                let base = (1.0 + x * x).powf(-0.5 * lam);
                let dbase = -lam * x / s * base / (1.0 + x * x);
                match cutoff {
                    None => (base, dbase),
                    Some(c) => {
                        let half = 0.5 * c;
                        let (st, dst) = smootherstep((rho - half) / half);
                        let chi = 1.0 - st;
                        let dchi = -dst / half;
                        (base * chi, dbase * chi + base * dchi)
                    }
                }
            }
        };
        (self.amplitude * u, self.amplitude * du)
    }

    /// Radius beyond which the profile vanishes (numerically) or `∞`.
    pub fn support_radius(&self) -> f64 {
        match self.family {
            Family::Gaussian => GAUSS_CUT * self.scale,
            Family::Bump { .. } => self.scale,
            Family::PowerTail { cutoff, .. } => cutoff.unwrap_or(f64::INFINITY),
        }
    }

    /// The family of `ρ ↦ u(λρ)`.
    pub fn dilated(&self, lambda: f64) -> Self {
        let family = match self.family {
            Family::PowerTail {
                tail_exponent,
                cutoff,
            } => Family::PowerTail {
                tail_exponent,
                cutoff: cutoff.map(|c| c / lambda),
            },
            other => other,
        };
        Self {
            family,
            scale: self.scale / lambda,
            amplitude: self.amplitude,
        }
    }

    /// Whether `‖|x|^w u‖_{L^p(ℝ^n)}` (or the same for u′ when `derivative`)
    /// is finite. Near the origin u is smooth with `u(0) ≠ 0` and
    /// `u′(ρ) ~ ρ`; at infinity only the uncut power tail matters.
    pub fn norm_finite(&self, w: f64, p: f64, n: u32, derivative: bool) -> bool {
        let nf = n as f64;
        let near_zero = if derivative { (w + 1.0) * p + nf } else { w * p + nf };
        if near_zero <= 0.0 {
            return false;
        }
        match self.family {
            Family::PowerTail {
                tail_exponent: lam,
                cutoff: None,
            } => {
                let decay = if derivative { lam + 1.0 } else { lam };
                (w - decay) * p + nf < 0.0
            }
            _ => true,
        }
    }
}

/// Samples of a radial function and its analytic derivative on a log grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: Arc<LogGrid>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub spec: FamilySpec,
}

/// Sample `spec` on `grid`; errors if the profile does not fit the grid.
pub fn make_radial(spec: FamilySpec, grid: Arc<LogGrid>) -> Result<RadialProfile> {
    spec.validate()?;
    let support = spec.support_radius();
    if support.is_finite() && support > grid.rmax() {
        return Err(Error::TruncationDominated(format!(
            "{} has support radius {support:e} beyond rmax {:e}",
            spec.tag(),
            grid.rmax()
        )));
    }
    if spec.scale < PLATEAU_MARGIN * grid.rmin() {
        return Err(Error::TruncationDominated(format!(
            "{} scale {:e} is not resolved above rmin {:e}",
            spec.tag(),
            spec.scale,
            grid.rmin()
        )));
    }
    let (u, du) = grid.nodes().iter().map(|&r| spec.eval(r)).unzip();
    Ok(RadialProfile { grid, u, du, spec })
}

impl RadialProfile {
    /// `u_λ(ρ) = u(λρ)`, recomputed from the family (no interpolation).
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("dilation must be positive, got {lambda}")));
        }
        make_radial(self.spec.dilated(lambda), self.grid.clone())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            u: self.u.iter().map(|v| c * v).collect(),
            du: self.du.iter().map(|v| c * v).collect(),
            spec: self.spec.with_amplitude(c * self.spec.amplitude),
        }
    }

    pub fn abs_du(&self) -> Vec<f64> {
        self.du.iter().map(|v| v.abs()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().all(|v| *v == 0.0)
    }

    /// Max deviation between `ρ u′(ρ)` and the centred difference of u in
    /// `ln ρ`, relative to `max |ρ u′|`.
    pub fn fd_derivative_error(&self) -> f64 {
        let h = self.grid.h();
        let nodes = self.grid.nodes();
        let scale = self
            .du
            .iter()
            .zip(nodes)
            .fold(0.0_f64, |m, (d, r)| m.max((d * r).abs()));
        if scale == 0.0 {
            return 0.0;
        }
        // sixth-order central difference in log coordinates
        const C: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
        let u = &self.u;
        let mut worst = 0.0_f64;
        for i in 3..u.len().saturating_sub(3) {
            let fd: f64 = (1..=3).map(|k| C[k - 1] * (u[i + k] - u[i - k])).sum::<f64>() / h;
            worst = worst.max((fd - nodes[i] * self.du[i]).abs());
        }
        worst / scale
    }
}

/// Height profile `v(z)` of a separable half-space field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZProfile {
    /// `exp(-z/s)`
    Exponential { scale: f64 },
    /// `exp(-(z/s)²)`
    Gaussian { scale: f64 },
}

impl Default for ZProfile {
    fn default() -> Self {
        ZProfile::Exponential { scale: 1.0 }
    }
}

impl ZProfile {
    pub fn eval(&self, z: f64) -> (f64, f64) {
        match *self {
            ZProfile::Exponential { scale } => {
                let v = (-z / scale).exp();
                (v, -v / scale)
            }
            ZProfile::Gaussian { scale } => {
                let x = z / scale;
                let v = (-x * x).exp();
                (v, -2.0 * x / scale * v)
            }
        }
    }

    pub fn scale(&self) -> f64 {
        match *self {
            ZProfile::Exponential { scale } | ZProfile::Gaussian { scale } => scale,
        }
    }

    pub fn extent(&self) -> f64 {
        match *self {
            ZProfile::Exponential { scale } => 42.0 * scale,
            ZProfile::Gaussian { scale } => GAUSS_CUT * scale,
        }
    }

    pub fn dilated(&self, lambda: f64) -> Self {
        match *self {
            ZProfile::Exponential { scale } => ZProfile::Exponential {
                scale: scale / lambda,
            },
            ZProfile::Gaussian { scale } => ZProfile::Gaussian {
                scale: scale / lambda,
            },
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            ZProfile::Exponential { scale } => format!("exp(z/{scale})"),
            ZProfile::Gaussian { scale } => format!("gauss(z/{scale})"),
        }
    }
}

/// A function on the quarter plane `{r ≥ 0, z ≥ 0}` evaluable pointwise.
pub trait HalfSpaceFunction: Sync {
    fn value(&self, r: f64, z: f64) -> f64;
    /// `(R, Z)` with the function vanishing (numerically) outside `[0,R]×[0,Z]`.
    fn extent(&self) -> (f64, f64);
}

/// Indicator of `{r ≤ R, z ≤ Z}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxIndicator {
    pub r_max: f64,
    pub z_max: f64,
}

impl HalfSpaceFunction for BoxIndicator {
    fn value(&self, r: f64, z: f64) -> f64 {
        if r <= self.r_max && z <= self.z_max {
            1.0
        } else {
            0.0
        }
    }

    fn extent(&self) -> (f64, f64) {
        (self.r_max, self.z_max)
    }
}

/// Separable field `f(r, z) = u(r) v(z)` sampled at `(r_i, r_i z̄_j)`.
///
/// Sample arrays are stored slice-per-`z̄`: entry `(i, j)` at `j*nr + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceField {
    pub pgrid: Arc<ProductGrid>,
    pub radial: FamilySpec,
    pub zprofile: ZProfile,
    pub f: Vec<f64>,
    pub grad_mag: Vec<f64>,
    pub trace0: Vec<f64>,
}

pub fn make_halfspace(
    radial: FamilySpec,
    zprofile: ZProfile,
    pgrid: Arc<ProductGrid>,
) -> Result<HalfSpaceField> {
    radial.validate()?;
    if !(zprofile.scale() > 0.0) {
        return Err(Error::InvalidParameter("z-profile scale must be positive".into()));
    }
    let rgrid = &pgrid.rgrid;
    let support = radial.support_radius();
    if support.is_finite() && support > rgrid.rmax() {
        return Err(Error::TruncationDominated(format!(
            "{} has support radius {support:e} beyond rmax {:e}",
            radial.tag(),
            rgrid.rmax()
        )));
    }
    if radial.scale < PLATEAU_MARGIN * rgrid.rmin() {
        return Err(Error::TruncationDominated(format!(
            "{} scale is not resolved above rmin",
            radial.tag()
        )));
    }
    let (nr, nz) = (pgrid.nr(), pgrid.nz());
    let mut f = vec![0.0; nr * nz];
    let mut grad = vec![0.0; nr * nz];
    let radial_vals: Vec<(f64, f64)> = rgrid.nodes().iter().map(|&r| radial.eval(r)).collect();
    for (j, &zb) in pgrid.zgrid.nodes().iter().enumerate() {
        for (i, &r) in rgrid.nodes().iter().enumerate() {
            let (u, du) = radial_vals[i];
            let (v, dv) = zprofile.eval(r * zb);
            f[j * nr + i] = u * v;
            grad[j * nr + i] = ((du * v).powi(2) + (u * dv).powi(2)).sqrt();
        }
    }
    let v0 = zprofile.eval(0.0).0;
    let trace0 = radial_vals.iter().map(|(u, _)| u * v0).collect();
    Ok(HalfSpaceField {
        pgrid,
        radial,
        zprofile,
        f,
        grad_mag: grad,
        trace0,
    })
}

impl HalfSpaceField {
    pub fn slice(&self, j: usize) -> &[f64] {
        let nr = self.pgrid.nr();
        &self.f[j * nr..(j + 1) * nr]
    }

    /// `f_λ(r, z) = f(λr, λz)`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        make_halfspace(
            self.radial.dilated(lambda),
            self.zprofile.dilated(lambda),
            self.pgrid.clone(),
        )
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        make_halfspace(
            self.radial.with_amplitude(c * self.radial.amplitude),
            self.zprofile,
            self.pgrid.clone(),
        )
    }

    /// Analytic `|∇f|` at an arbitrary point.
    pub fn grad_at(&self, r: f64, z: f64) -> f64 {
        let (u, du) = self.radial.eval(r);
        let (v, dv) = self.zprofile.eval(z);
        ((du * v).powi(2) + (u * dv).powi(2)).sqrt()
    }

    pub fn tag(&self) -> String {
        format!("{}*{}", self.radial.tag(), self.zprofile.tag())
    }

    pub fn is_zero(&self) -> bool {
        self.radial.amplitude == 0.0
    }
}

impl HalfSpaceFunction for HalfSpaceField {
    fn value(&self, r: f64, z: f64) -> f64 {
        self.radial.eval(r).0 * self.zprofile.eval(z).0
    }

    fn extent(&self) -> (f64, f64) {
        (self.radial.support_radius(), self.zprofile.extent())
    }
}
