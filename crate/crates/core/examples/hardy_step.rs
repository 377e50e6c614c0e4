//! The Hardy-type step ‖|x|^α u‖_p / ‖|x|^{α+1} u'‖_p, which does not move
//! under dilation.

use std::error::Error;
use std::sync::Arc;

use radineq::fields::{make_radial, FamilySpec};
use radineq::grids::make_log_grid;
use radineq::verify::hardy_step_ratio;

pub fn run() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(make_log_grid(1e-5, 1e5, 2048)?);
    for lambda in [0.5, 1.0, 3.0] {
        let u = make_radial(FamilySpec::gaussian(1.0).dilated(lambda), grid.clone())?;
        let r = hardy_step_ratio(&u, 0.0, 2.0, 1)?;
        println!("lambda={lambda}: ratio {r:.10} (2/√3 = {:.10})", 2.0 / 3f64.sqrt());
    }
    for (alpha, p, n) in [(0.5, 2.0, 3), (-0.2, 3.0, 2), (1.0, 1.5, 5)] {
        let u = make_radial(FamilySpec::power_tail(1.0, 3.0, Some(20.0)), grid.clone())?;
        println!("alpha={alpha} p={p} n={n}: {:.6}", hardy_step_ratio(&u, alpha, p, n)?);
    }
    // αp = -1 is excluded
    let u = make_radial(FamilySpec::gaussian(1.0), grid)?;
    if let Err(e) = hardy_step_ratio(&u, -0.5, 2.0, 3) {
        println!("alpha=-0.5 p=2: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
