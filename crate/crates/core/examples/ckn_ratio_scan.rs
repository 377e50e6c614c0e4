//! CKN ratios over the bundled families, and how the ratio drifts under
//! dilation once the scaling balance is broken.

use std::error::Error;
use std::sync::Arc;

use radineq::exponents::{Checker, CknParams};
use radineq::fields::FamilySpec;
use radineq::fields::make_radial;
use radineq::grids::{make_log_grid, ProductGrid};
use radineq::verify::{dilation_scan, family_scan, ScanParams, ScanSetup, Target};

pub fn run() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(make_log_grid(1e-5, 1e5, 2048)?);
    let setup = ScanSetup {
        grid: grid.clone(),
        pgrid: Arc::new(ProductGrid::new(make_log_grid(1e-5, 1e3, 256)?, make_log_grid(1e-4, 1e4, 64)?)),
        zprofile: Default::default(),
        checker: Checker::default(),
        require_admissible: true,
    };
    let params = CknParams::from_gamma(3, 2.0, 12.0, 12.0, 1.0, 0.0, 0.25, 0.25)?;
    let scan = family_scan(&FamilySpec::bundled(), &ScanParams::CknRadial(params), &setup)?;
    for r in &scan.records {
        println!("{:<24} ratio {:.6}", r.family, r.ratio.unwrap_or(f64::NAN));
    }
    println!("sup {:.6}", scan.sup.unwrap_or(f64::NAN));

    let u = make_radial(FamilySpec::gaussian(1.0), grid)?;
    let lambdas = [0.5, 0.8, 1.0, 1.25, 2.0];
    for gamma in [0.25, 0.35, 0.55] {
        let p = CknParams::from_gamma(3, 2.0, 12.0, 12.0, 1.0, 0.0, 0.25, gamma)?;
        let d = dilation_scan(&Target::Ckn(&u, p), &lambdas)?;
        println!("gamma={gamma}: slope {:+.6}, predicted {:+.6}", d.slope, d.predicted);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
