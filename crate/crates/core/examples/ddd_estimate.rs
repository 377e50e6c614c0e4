//! Ratios for the weighted Riesz-potential estimate on radial functions.

use std::error::Error;
use std::sync::Arc;

use radineq::exponents::{Checker, DddParams};
use radineq::fields::{make_radial, FamilySpec};
use radineq::grids::make_log_grid;
use radineq::operators::RieszOperator;
use radineq::verify::ddd_ratio_with;

pub fn run() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(make_log_grid(1e-5, 1e5, 2048)?);
    let checker = Checker::default();
    for (alpha, beta, gamma) in [(0.5, 0.5, 2.0), (0.0, 0.0, 3.0), (0.25, 0.75, 2.0)] {
        let Ok(p) = DddParams::new(3, 2.0, 2.0, alpha, beta, gamma) else { continue };
        let rep = checker.ddd(&p)?;
        if !rep.verdict {
            println!("alpha={alpha} beta={beta} gamma={gamma}: inadmissible {:?}", rep.failed_labels());
            continue;
        }
        let op = RieszOperator::new(grid.clone(), gamma, 3)?;
        for spec in FamilySpec::bundled() {
            let v = make_radial(spec, grid.clone())?;
            let r = ddd_ratio_with(&op, &v, &p)?;
            println!(
                "alpha={alpha} beta={beta} gamma={gamma} {:<24} ratio {:.6}",
                r.family,
                r.ratio.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
