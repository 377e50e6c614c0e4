//! Multiplicative convolution on a log grid, fast against direct, and the
//! discrete Young inequality.

use std::error::Error;
use std::sync::Arc;

use radineq::grids::make_log_grid;
use radineq::multconv::{mult_convolve_direct, mult_convolve_fast, young_check, HaarFunction};

pub fn run() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(make_log_grid(1e-6, 1e6, 512)?);
    // log-normal shapes: the convolution of two is again log-normal
    let f = HaarFunction::from_fn(grid.clone(), |r| (-r.ln().powi(2)).exp())?;
    let g = HaarFunction::from_fn(grid.clone(), |r| (-(r.ln() - 1.0).powi(2) / 2.0).exp())?;

    let fast = mult_convolve_fast(&f, &g)?;
    let direct = mult_convolve_direct(&f, &g)?;
    let diff = fast
        .output
        .samples
        .iter()
        .zip(&direct.output.samples)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    println!("max |fast - direct| = {diff:.2e}");

    // ∫ e^{-s²} e^{-(t-s-1)²/2} ds = √(2π/3) e^{-(t-1)²/3}
    let t = 2.0_f64;
    let exact = (2.0 * std::f64::consts::PI / 3.0).sqrt() * (-(t - 1.0).powi(2) / 3.0).exp();
    println!("(f*g)(e^2) = {:.8}, exact {exact:.8}", fast.output.interp_log(t));

    // 1/q + 1 = 1/p + 1/s
    for (p, q, s) in [(1.0, 2.0, 2.0), (1.5, 2.0, 1.2), (4.0 / 3.0, 2.0, 4.0 / 3.0)] {
        println!("Young ratio p={p} q={q} s={s}: {:.6}", young_check(&f, &g, p, q, s)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
