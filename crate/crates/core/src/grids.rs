//! Geometric grids on `(0, ∞)` with Haar-measure weights, and the product
//! grid used for half-space fields.
//!
//! Half-space samples are taken at `(r, r·z̄)`: the height is scaled by the
//! radius so that fixed-`z̄` slices are functions on the multiplicative group.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_RMIN: f64 = 1e-5;
pub const DEFAULT_RMAX: f64 = 1e5;
pub const DEFAULT_N: usize = 4096;
pub const DEFAULT_ZBAR_MIN: f64 = 1e-4;
pub const DEFAULT_ZBAR_MAX: f64 = 1e4;
pub const DEFAULT_ZBAR_N: usize = 256;

/// Relative size above which a non-decaying end is reported.
pub const BOUNDARY_THRESHOLD: f64 = 1e-8;
/// Relative size above which an extrapolated tail is reported.
pub const TAIL_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Trapezoid,
    Simpson,
}

/// Nodes `ρ_i = rmin·exp(i·h)`, `i = 0..N-1`, with `ρ_{N-1} = rmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    nodes: Vec<f64>,
    h: f64,
    rmin: f64,
    rmax: f64,
    weights: Vec<f64>,
    rule: Rule,
}

pub fn make_log_grid(rmin: f64, rmax: f64, n: usize) -> Result<LogGrid> {
    LogGrid::new(rmin, rmax, n, Rule::Trapezoid)
}

impl LogGrid {
    pub fn new(rmin: f64, rmax: f64, n: usize, rule: Rule) -> Result<Self> {
        if !(rmin > 0.0) || !rmin.is_finite() {
            return Err(Error::InvalidGrid(format!("rmin must be positive, got {rmin}")));
        }
        if !(rmax > rmin) || !rmax.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "rmax must exceed rmin, got [{rmin}, {rmax}]"
            )));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 nodes, got {n}")));
        }
        if rule == Rule::Simpson && n % 2 == 0 {
            return Err(Error::InvalidGrid("Simpson rule needs an odd node count".into()));
        }
        let lmin = rmin.ln();
        let h = (rmax.ln() - lmin) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| (lmin + i as f64 * h).exp()).collect();
        nodes[0] = rmin;
        nodes[n - 1] = rmax;
        let weights = match rule {
            Rule::Trapezoid => {
                let mut w = vec![h; n];
                w[0] = 0.5 * h;
                w[n - 1] = 0.5 * h;
                w
            }
            Rule::Simpson => (0..n)
                .map(|i| {
                    let c = if i == 0 || i == n - 1 {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    c * h / 3.0
                })
                .collect(),
        };
        Ok(Self {
            nodes,
            h,
            rmin,
            rmax,
            weights,
            rule,
        })
    }

    pub fn default_grid() -> Self {
        make_log_grid(DEFAULT_RMIN, DEFAULT_RMAX, DEFAULT_N).expect("default grid is valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Haar weights: `Σ w_i f(ρ_i) ≈ ∫ f dρ/ρ`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn rmin(&self) -> f64 {
        self.rmin
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `ln ρ_i`, computed from the step rather than from the stored node.
    pub fn log_node(&self, i: usize) -> f64 {
        self.rmin.ln() + i as f64 * self.h
    }

    /// Fractional index of `rho` in log coordinates.
    pub fn position(&self, rho: f64) -> f64 {
        (rho.ln() - self.rmin.ln()) / self.h
    }

    /// Same spacing, shifted by `k` steps (`rmin·e^{kh}`), i.e. the grid seen
    /// by a function dilated by `e^{-kh}`.
    pub fn shifted(&self, k: i64) -> Result<Self> {
        let f = (k as f64 * self.h).exp();
        let mut g = Self::new(self.rmin * f, self.rmax * f, self.len(), self.rule)?;
        // Keep the step bit-identical so weights match exactly.
        g.h = self.h;
        g.weights = self.weights.clone();
        Ok(g)
    }

    /// Same range with `2N - 1` nodes (every old node is kept).
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.rmin, self.rmax, 2 * self.len() - 1, self.rule)
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.h == other.h
            && self.rmin == other.rmin
            && self.rule == other.rule
    }

    pub fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            Err(Error::LengthMismatch {
                expected: self.len(),
                got,
            })
        } else {
            Ok(())
        }
    }

    pub fn sample<F: FnMut(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().copied().map(f).collect()
    }
}

/// `∫ f(ρ) dρ/ρ` over `[rmin, rmax]` by the grid's rule.
pub fn haar_integral(samples: &[f64], grid: &LogGrid) -> Result<f64> {
    grid.check_len(samples.len())?;
    Ok(samples
        .iter()
        .zip(grid.weights())
        .map(|(f, w)| f * w)
        .sum())
}

/// Result of an integral over `(0, ∞)` with power-law tail corrections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailedIntegral {
    pub value: f64,
    pub lower_tail: f64,
    pub upper_tail: f64,
    /// Set when a grid end carries too much of the total.
    pub truncation_warning: bool,
}

/// Largest share of the total a tail may carry once the power law has been
/// confirmed on three end samples.
pub const TRUSTED_TAIL: f64 = 0.25;

/// Integral beyond one grid end assuming `F ∝ ρ^e` there, from the samples
/// at the end going inward (`f[0]` is the end). Returns the tail and whether
/// the decay rate is confirmed by a third sample; `None` when the end does
/// not decay.
fn tail_estimate(f: [f64; 3], h: f64) -> Option<(f64, bool)> {
    if f[0] == 0.0 {
        return Some((0.0, true));
    }
    if f[1] == 0.0 || f[0].signum() != f[1].signum() {
        return None;
    }
    let rate = (f[1] / f[0]).ln() / h;
    if rate <= 1e-12 {
        return None;
    }
    let confirmed = f[2] != 0.0
        && f[2].signum() == f[1].signum()
        && ((f[2] / f[1]).ln() / h - rate).abs() <= 1e-3 * rate;
    Some((f[0] / rate, confirmed))
}

fn tail_warns(tail: Option<(f64, bool)>, end: f64, scale: f64) -> bool {
    match tail {
        Some((t, confirmed)) => {
            let limit = if confirmed { TRUSTED_TAIL } else { TAIL_THRESHOLD };
            t.abs() > limit * scale
        }
        None => end.abs() > BOUNDARY_THRESHOLD * scale,
    }
}

/// Integrate `samples` (a density against `dρ/ρ`) over `(0, ∞)`: grid rule
/// on `[rmin, rmax]` plus power-law extrapolation beyond both ends.
pub fn tailed_haar_integral(samples: &[f64], grid: &LogGrid) -> Result<TailedIntegral> {
    let body = haar_integral(samples, grid)?;
    let n = samples.len();
    let h = grid.h();
    let lower = tail_estimate([samples[0], samples[1], samples[2]], h);
    let upper = tail_estimate([samples[n - 1], samples[n - 2], samples[n - 3]], h);
    let lower_tail = lower.map_or(0.0, |t| t.0);
    let upper_tail = upper.map_or(0.0, |t| t.0);
    let value = body + lower_tail + upper_tail;
    let scale = value.abs().max(f64::MIN_POSITIVE);
    let warn = tail_warns(lower, samples[0], scale) || tail_warns(upper, samples[n - 1], scale);
    Ok(TailedIntegral {
        value,
        lower_tail,
        upper_tail,
        truncation_warning: warn || !value.is_finite(),
    })
}

/// `∫_0^∞ f(ρ) ρ^exponent dρ/ρ`.
pub fn radial_measure_integral(
    samples: &[f64],
    grid: &LogGrid,
    exponent: f64,
) -> Result<TailedIntegral> {
    grid.check_len(samples.len())?;
    let weighted: Vec<f64> = samples
        .iter()
        .zip(grid.nodes())
        .map(|(f, rho)| if *f == 0.0 { 0.0 } else { f * rho.powf(exponent) })
        .collect();
    tailed_haar_integral(&weighted, grid)
}

/// Radial log grid crossed with a log grid in the scaled height `z̄ = z/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid {
    pub rgrid: LogGrid,
    pub zgrid: LogGrid,
    zbar_weights: Vec<f64>,
}

impl ProductGrid {
    pub fn new(rgrid: LogGrid, zgrid: LogGrid) -> Self {
        let zbar_weights = zgrid
            .weights()
            .iter()
            .zip(zgrid.nodes())
            .map(|(w, z)| w * z)
            .collect();
        Self {
            rgrid,
            zgrid,
            zbar_weights,
        }
    }

    pub fn default_grid() -> Self {
        Self::new(
            LogGrid::default_grid(),
            make_log_grid(DEFAULT_ZBAR_MIN, DEFAULT_ZBAR_MAX, DEFAULT_ZBAR_N)
                .expect("default z grid is valid"),
        )
    }

    /// Weights for `∫ g dz̄` on `[z̄_min, z̄_max]` (no end corrections).
    pub fn zbar_weights(&self) -> &[f64] {
        &self.zbar_weights
    }

    pub fn nr(&self) -> usize {
        self.rgrid.len()
    }

    pub fn nz(&self) -> usize {
        self.zgrid.len()
    }

    /// `∫_0^∞ g(z̄) dz̄` with the end behaviour extrapolated: near zero the
    /// integrand is modelled as `A + B ln z̄` (bounded or log-singular),
    /// beyond `z̄_max` as a power law.
    pub fn zbar_integral(&self, samples: &[f64]) -> Result<TailedIntegral> {
        self.zgrid.check_len(samples.len())?;
        self.zbar_integral_upto(samples, samples.len() - 1)
    }

    /// As [`Self::zbar_integral`] but using only nodes `0..=last`; the power
    /// law takes over beyond `z̄_last`.
    pub fn zbar_integral_upto(&self, samples: &[f64], last: usize) -> Result<TailedIntegral> {
        if last < 3 || last >= samples.len() || samples.len() > self.nz() {
            return Err(Error::InvalidParameter(format!(
                "z-bar cut at node {last} of {}",
                samples.len()
            )));
        }
        let h = self.zgrid.h();
        let w = &self.zbar_weights;
        let zn = self.zgrid.nodes();
        let body: f64 = if last + 1 == samples.len() {
            samples.iter().zip(w).map(|(g, w)| g * w).sum()
        } else {
            let inner: f64 = samples[..=last].iter().zip(zn).map(|(g, z)| g * z).sum();
            h * (inner - 0.5 * (samples[0] * zn[0] + samples[last] * zn[last]))
        };
        let z0 = self.zgrid.rmin();
        let slope = (samples[1] - samples[0]) / h;
        let lower_tail = z0 * (samples[0] - slope);
        let end = |k: usize| samples[last - k] * zn[last - k];
        let upper = tail_estimate([end(0), end(1), end(2)], h);
        let upper_tail = upper.map_or(0.0, |t| t.0);
        let value = body + lower_tail + upper_tail;
        let scale = value.abs().max(f64::MIN_POSITIVE);
        let warn = lower_tail.abs() > TAIL_THRESHOLD * scale || tail_warns(upper, end(0), scale);
        Ok(TailedIntegral {
            value,
            lower_tail,
            upper_tail,
            truncation_warning: warn || !value.is_finite(),
        })
    }

    pub fn refined(&self) -> Result<Self> {
        Ok(Self::new(self.rgrid.refined()?, self.zgrid.refined()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_examples() {
        let g = make_log_grid(1.0, std::f64::consts::E, 9).unwrap();
        assert!((g.h() - 0.125).abs() < 1e-15);
        assert!((g.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(g.nodes()[0], 1.0);
        assert_eq!(g.nodes()[8], std::f64::consts::E);

        let g = make_log_grid(1e-4, 1e4, 4097).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 8.0 * 10f64.ln()).abs() < 1e-10);

        assert!(make_log_grid(1.0, 1.0, 8).is_err());
        assert!(make_log_grid(0.0, 1.0, 8).is_err());
        assert!(make_log_grid(1.0, 2.0, 7).is_err());
        assert!(LogGrid::new(1.0, 2.0, 10, Rule::Simpson).is_err());
    }

    #[test]
    fn uniform_log_spacing() {
        let g = make_log_grid(1e-3, 1e3, 1000).unwrap();
        for w in g.nodes().windows(2) {
            assert!(((w[1].ln() - w[0].ln()) - g.h()).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_integral_examples() {
        let g = make_log_grid(1.0, std::f64::consts::E, 9).unwrap();
        let ones = vec![1.0; 9];
        assert!((haar_integral(&ones, &g).unwrap() - 1.0).abs() < 1e-12);

        let g = make_log_grid(1.0, 2.0, 2049).unwrap();
        let f = g.sample(|r| r);
        assert!((haar_integral(&f, &g).unwrap() - 1.0).abs() < 1e-6);

        // ∫ ρ/(1+ρ²) dρ/ρ = atan(rmax) - atan(rmin)
        let g = make_log_grid(1e-6, 1e6, 4097).unwrap();
        let f = g.sample(|r| r / (1.0 + r * r));
        let exact = 1e6f64.atan() - 1e-6f64.atan();
        assert!((haar_integral(&f, &g).unwrap() - exact).abs() < 1e-6);

        assert!(haar_integral(&[1.0; 3], &g).is_err());
    }

    #[test]
    fn simpson_rule() {
        let g = LogGrid::new(1.0, 2.0, 65, Rule::Simpson).unwrap();
        let f = g.sample(|r| r);
        assert!((haar_integral(&f, &g).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn radial_measure_examples() {
        let g = LogGrid::default_grid();
        let f = g.sample(|r| (-r * r).exp());
        let res = radial_measure_integral(&f, &g, 3.0).unwrap();
        assert!((res.value - std::f64::consts::PI.sqrt() / 4.0).abs() < 1e-8);
        assert!(!res.truncation_warning);

        let ones = vec![1.0; g.len()];
        let res = radial_measure_integral(&ones, &g, 0.0).unwrap();
        assert!((res.value - (g.rmax() / g.rmin()).ln()).abs() < 1e-9);
        assert!(res.truncation_warning);

        let f = g.sample(|r| (-r).exp());
        let res = radial_measure_integral(&f, &g, 1.0).unwrap();
        assert!((res.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tail_extrapolation_recovers_power_laws() {
        // ρ^2/(1+ρ^2)^3 on a short grid: ∫_0^∞ ρ^2/(1+ρ²)^3 dρ/ρ = 1/4
        let g = make_log_grid(1e-3, 1e3, 2001).unwrap();
        let f = g.sample(|r| r * r / (1.0 + r * r).powi(3));
        let res = tailed_haar_integral(&f, &g).unwrap();
        assert!((res.value - 0.25).abs() < 1e-8, "{res:?}");
        assert!(res.lower_tail > 0.0 && res.upper_tail > 0.0);
    }

    #[test]
    fn haar_shift_invariance() {
        let g = make_log_grid(1e-3, 1e3, 512).unwrap();
        let f = g.sample(|r| (-(r.ln()).powi(2)).exp());
        let s = g.shifted(17).unwrap();
        assert_eq!(s.weights(), g.weights());
        assert_eq!(haar_integral(&f, &s).unwrap(), haar_integral(&f, &g).unwrap());
    }

    #[test]
    fn zbar_integral_handles_log_singularity() {
        // ∫_0^∞ -ln(z) e^{-z} dz = Euler's constant
        let zg = make_log_grid(1e-4, 1e3, 400).unwrap();
        let pg = ProductGrid::new(make_log_grid(1.0, 2.0, 8).unwrap(), zg);
        let samples = pg.zgrid.sample(|z| -z.ln() * (-z).exp());
        let res = pg.zbar_integral(&samples).unwrap();
        assert!((res.value - 0.577_215_664_901_532_9).abs() < 1e-6, "{res:?}");

        // ∫_0^∞ (1+z)^{-3} dz = 1/2, power-law upper tail
        let zg = make_log_grid(1e-4, 1e2, 300).unwrap();
        let pg = ProductGrid::new(make_log_grid(1.0, 2.0, 8).unwrap(), zg);
        let samples = pg.zgrid.sample(|z| (1.0 + z).powi(-3));
        let res = pg.zbar_integral(&samples).unwrap();
        assert!((res.value - 0.5).abs() < 1e-5, "{res:?}");
    }
}
