//! Ratios for the weighted trace inequality on the half space.

use std::error::Error;
use std::sync::Arc;

use radineq::exponents::{Checker, TraceParams};
use radineq::fields::{make_halfspace, FamilySpec, ZProfile};
use radineq::grids::{make_log_grid, ProductGrid};
use radineq::verify::{dilation_scan, trace_ratio, Target};

pub fn run() -> Result<(), Box<dyn Error>> {
    let pg = Arc::new(ProductGrid::new(make_log_grid(1e-6, 1e3, 512)?, make_log_grid(1e-4, 1e4, 96)?));
    let checker = Checker::default();
    let base = TraceParams::new(3, 2.0, 3.0, 0.0, 0.0)?;
    for p in [base, base.shifted(0.5), base.shifted(1.0)] {
        let ok = checker.trace_radial(&p)?.verdict;
        for spec in FamilySpec::bundled() {
            let f = make_halfspace(spec, ZProfile::default(), pg.clone())?;
            let r = trace_ratio(&f, &p)?;
            println!(
                "alpha={:+} beta={:+} admissible={ok} {:<24} ratio {:.6} {}",
                p.alpha,
                p.beta,
                r.family,
                r.ratio.unwrap_or(f64::NAN),
                r.flag_tags()
            );
        }
    }
    let f = make_halfspace(FamilySpec::gaussian(1.0), ZProfile::default(), pg)?;
    let off = TraceParams::new(3, 2.0, 3.0, 0.2, 0.0)?;
    let d = dilation_scan(&Target::Trace(&f, off), &[0.5, 1.0, 2.0])?;
    println!("unbalanced alpha=0.2: slope {:+.6}, predicted {:+.6}", d.slope, d.predicted);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
