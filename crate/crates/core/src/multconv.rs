//! Convolution on the multiplicative group `(0, ∞)` with Haar measure `dr/r`:
//!
//! `(f ∗ g)(ρ) = ∫_0^∞ f(r) g(ρ/r) dr/r`.
//!
//! On a uniform log grid the quotient `ρ_i/ρ_j = e^{(i-j)h}` depends only on
//! `i - j`, so the sum is an ordinary discrete convolution. Off-grid values of
//! `g` come from cubic Lagrange interpolation in `ln ρ`, with zero outside
//! the grid.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grids::LogGrid;

/// Boundary samples larger than this fraction of the maximum trigger a
/// truncation warning.
pub const DECAY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HaarFunction {
    pub grid: Arc<LogGrid>,
    pub samples: Vec<f64>,
}

impl HaarFunction {
    pub fn new(grid: Arc<LogGrid>, samples: Vec<f64>) -> Result<Self> {
        grid.check_len(samples.len())?;
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("samples must be finite".into()));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(grid: Arc<LogGrid>, f: F) -> Result<Self> {
        let samples = grid.sample(f);
        Self::new(grid, samples)
    }

    pub fn zeros(grid: Arc<LogGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            samples: vec![0.0; n],
        }
    }

    /// Hat of Haar-mass one centred at ρ = 1 with half-width h in `ln ρ`.
    pub fn unit_hat(grid: Arc<LogGrid>) -> Result<Self> {
        let h = grid.h();
        let samples = (0..grid.len())
            .map(|i| {
                let t = grid.log_node(i);
                (1.0 - t.abs() / h).max(0.0) / h
            })
            .collect();
        Self::new(grid, samples)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Whether both boundary samples are negligible next to the maximum.
    pub fn decays(&self) -> bool {
        let m = self.max_abs();
        let n = self.samples.len();
        m == 0.0
            || (self.samples[0].abs() <= DECAY_THRESHOLD * m
                && self.samples[n - 1].abs() <= DECAY_THRESHOLD * m)
    }

    /// Value at an arbitrary `ln ρ` by cubic Lagrange interpolation.
    pub fn interp_log(&self, t: f64) -> f64 {
        interp_samples(&self.samples, &self.grid, t)
    }

    /// `(Σ w_i |f_i|^p)^{1/p}`; `p = ∞` gives the sup.
    pub fn haar_norm(&self, p: f64) -> f64 {
        haar_norm(&self.samples, &self.grid, p)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|v| c * v).collect(),
        }
    }

    /// Samples shifted by `k` grid steps: `(S_k f)_i = f_{i-k}`, zero filled.
    pub fn shifted(&self, k: i64) -> Self {
        let n = self.samples.len() as i64;
        let samples = (0..n)
            .map(|i| {
                let j = i - k;
                if (0..n).contains(&j) {
                    self.samples[j as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            samples,
        }
    }
}

pub fn haar_norm(samples: &[f64], grid: &LogGrid, p: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let s: f64 = samples
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| w * v.abs().powf(p))
        .sum();
    s.powf(1.0 / p)
}

/// Cubic Lagrange weights on nodes `-1, 0, 1, 2` at `s ∈ [0, 1]`.
#[inline]
pub fn lagrange4(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

fn interp_samples(samples: &[f64], grid: &LogGrid, t: f64) -> f64 {
    let n = samples.len() as i64;
    let pos = (t - grid.rmin().ln()) / grid.h();
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        let k = nearest as i64;
        return if (0..n).contains(&k) {
            samples[k as usize]
        } else {
            0.0
        };
    }
    let j = pos.floor() as i64;
    if j < -2 || j > n {
        return 0.0;
    }
    let s = pos - j as f64;
    let w = lagrange4(s);
    let mut v = 0.0;
    for (k, wk) in w.iter().enumerate() {
        let idx = j - 1 + k as i64;
        if (0..n).contains(&idx) {
            v += wk * samples[idx as usize];
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convolved {
    pub output: HaarFunction,
    pub truncation_warning: bool,
}

fn check_pair(f: &HaarFunction, g: &HaarFunction) -> Result<()> {
    if !f.grid.same_as(&g.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `g(e^{mh})` for `m = -(N-1) ..= N-1`, stored at index `m + N - 1`.
fn quotient_table(g: &HaarFunction) -> Vec<f64> {
    let n = g.samples.len() as i64;
    let h = g.grid.h();
    (-(n - 1)..n).map(|m| g.interp_log(m as f64 * h)).collect()
}

/// Reference O(N²) evaluation.
pub fn mult_convolve_direct(f: &HaarFunction, g: &HaarFunction) -> Result<Convolved> {
    check_pair(f, g)?;
    let grid = &f.grid;
    let n = grid.len();
    let w = grid.weights();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let ti = grid.log_node(i);
        let mut acc = 0.0;
        for j in 0..n {
            if f.samples[j] != 0.0 {
                acc += f.samples[j] * g.interp_log(ti - grid.log_node(j)) * w[j];
            }
        }
        *o = acc;
    }
    Ok(Convolved {
        output: HaarFunction {
            grid: grid.clone(),
            samples: out,
        },
        truncation_warning: !(f.decays() && g.decays()),
    })
}

/// O(N log N) evaluation via the discrete convolution theorem.
pub fn mult_convolve_fast(f: &HaarFunction, g: &HaarFunction) -> Result<Convolved> {
    check_pair(f, g)?;
    let grid = &f.grid;
    let n = grid.len();
    let a: Vec<f64> = f
        .samples
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| v * w)
        .collect();
    let table = quotient_table(g);
    let full = linear_convolve(&a, &table);
    // out_i = Σ_j a_j table[i - j + N - 1] = full[i + N - 1]
    let out = full[n - 1..2 * n - 1].to_vec();
    Ok(Convolved {
        output: HaarFunction {
            grid: grid.clone(),
            samples: out,
        },
        truncation_warning: !(f.decays() && g.decays()),
    })
}

/// Full linear convolution `c_k = Σ a_j b_{k-j}` of length `|a| + |b| - 1`.
pub fn linear_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |x: &[f64]| {
        let mut v: Vec<Complex<f64>> = x.iter().map(|&r| Complex::new(r, 0.0)).collect();
        v.resize(size, Complex::new(0.0, 0.0));
        v
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..len].iter().map(|c| c.re * scale).collect()
}

/// Discrete Young ratio `‖f∗g‖_q / (‖f‖_p ‖g‖_s)` in Haar norms.
pub fn young_check(f: &HaarFunction, g: &HaarFunction, p: f64, q: f64, s: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("q", q), ("s", s)] {
        if !(v >= 1.0) {
            return Err(Error::ExponentRelation(format!("{name} = {v} < 1")));
        }
    }
    let gap = 1.0 / q + 1.0 - 1.0 / p - 1.0 / s;
    if gap.abs() > 1e-12 {
        return Err(Error::ExponentRelation(format!(
            "1/q + 1 - 1/p - 1/s = {gap:e}"
        )));
    }
    if f.samples.iter().chain(&g.samples).any(|v| *v < 0.0) {
        return Err(Error::NegativeSamples);
    }
    let conv = mult_convolve_fast(f, g)?;
    let lhs = conv.output.haar_norm(q);
    let rhs = f.haar_norm(p) * g.haar_norm(s);
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}

/// A function on `ℝ∖{0}` as its restrictions to the two rays,
/// `pos(ρ) = f(ρ)` and `neg(ρ) = f(-ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedHaarFunction {
    pub pos: HaarFunction,
    pub neg: HaarFunction,
}

/// Convolution on `ℝ∖{0}` with `dx/|x|`:
/// `(f∗g)₊ = f₊∗g₊ + f₋∗g₋`, `(f∗g)₋ = f₊∗g₋ + f₋∗g₊`.
pub fn signed_convolve(f: &SignedHaarFunction, g: &SignedHaarFunction) -> Result<SignedHaarFunction> {
    let c = |a: &HaarFunction, b: &HaarFunction| mult_convolve_fast(a, b).map(|r| r.output);
    let pp = c(&f.pos, &g.pos)?;
    let mm = c(&f.neg, &g.neg)?;
    let pm = c(&f.pos, &g.neg)?;
    let mp = c(&f.neg, &g.pos)?;
    let add = |x: HaarFunction, y: HaarFunction| HaarFunction {
        samples: x.samples.iter().zip(&y.samples).map(|(a, b)| a + b).collect(),
        grid: x.grid,
    };
    Ok(SignedHaarFunction {
        pos: add(pp, mm),
        neg: add(pm, mp),
    })
}
