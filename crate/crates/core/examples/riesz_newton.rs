//! Riesz potential of a sharpened ball in three dimensions against
//! Newton's shell theorem.

use std::error::Error;
use std::f64::consts::PI;
use std::sync::Arc;

use radineq::fields::{make_radial, FamilySpec, BALL_SHARPNESS};
use radineq::grids::make_log_grid;
use radineq::operators::riesz_radial;

pub fn run() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(make_log_grid(1e-4, 20.0, 4096)?);
    let v = make_radial(FamilySpec::bump(1.0, BALL_SHARPNESS), grid.clone())?;
    let t = riesz_radial(&v, 1.0, 3)?;
    for rho in [1e-4, 0.5, 2.0, 5.0] {
        let i = grid.position(rho).round() as usize;
        let r = grid.nodes()[i];
        // outside: volume / ρ; inside: 2π - (2π/3) ρ²
        let newton = if r >= 1.0 {
            4.0 * PI / (3.0 * r)
        } else {
            2.0 * PI - 2.0 * PI * r * r / 3.0
        };
        println!("rho={r:.4}: T v = {:.5}, ball {newton:.5}", t.values[i]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
