//! Pointwise bound |u| <= T_{n-1}(|u'|) / ω_{n-1} for the bundled profiles.

use std::error::Error;
use std::sync::Arc;

use radineq::fields::{make_radial, FamilySpec};
use radineq::grids::make_log_grid;
use radineq::operators::representation_margin;

pub fn run() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(make_log_grid(1e-5, 1e5, 4096)?);
    for n in [2, 3, 5] {
        for spec in FamilySpec::bundled() {
            let u = make_radial(spec, grid.clone())?;
            let m = representation_margin(&u, n)?;
            let lo = m.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("n={n} {:<24} min margin {lo:+.3e}", spec.tag());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
