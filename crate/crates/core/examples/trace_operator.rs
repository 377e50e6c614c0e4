//! The half-space trace operator by log-convolution, checked against direct
//! 2D quadrature, plus the n = 1 unit-square value.

use std::error::Error;
use std::sync::Arc;

use radineq::fields::{make_halfspace, BoxIndicator, FamilySpec, ZProfile};
use radineq::grids::{make_log_grid, ProductGrid};
use radineq::operators::{trace_apply, trace_apply_direct};

pub fn run() -> Result<(), Box<dyn Error>> {
    let pg = Arc::new(ProductGrid::new(
        make_log_grid(1e-4, 1e2, 512)?,
        make_log_grid(1e-4, 1e4, 96)?,
    ));
    let f = make_halfspace(FamilySpec::gaussian(1.0), ZProfile::Gaussian { scale: 1.0 }, pg.clone())?;
    let conv = trace_apply(&f, 3)?;
    println!("corner fraction {:.2e}, warning {}", conv.truncation.corner_fraction, conv.truncation.warning);
    let idx = [200, 300, 400];
    let pts: Vec<f64> = idx.iter().map(|&i| pg.rgrid.nodes()[i]).collect();
    let direct = trace_apply_direct(&f, 3, &pts)?;
    for (k, &i) in idx.iter().enumerate() {
        println!(
            "rho={:.4}: convolution {:.8}, direct {:.8}",
            pts[k], conv.values[i], direct.values[k]
        );
    }

    let square = BoxIndicator { r_max: 1.0, z_max: 1.0 };
    let v = trace_apply_direct(&square, 1, &[0.0])?.values[0];
    println!("unit square at 0: {v:.6} (4 ln(1+√2) = {:.6})", 4.0 * (1.0 + 2f64.sqrt()).ln());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
