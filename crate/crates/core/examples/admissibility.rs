//! Classify a few exponent tuples with every admissibility predicate.

use std::error::Error;

use radineq::exponents::{Checker, CknParams, DddParams, TraceParams};

pub fn run() -> Result<(), Box<dyn Error>> {
    let c = Checker::default();

    // classical and radial regions disagree here: alpha - sigma = -1/4
    let ckn = CknParams::from_gamma(3, 2.0, 12.0, 12.0, 1.0, 0.0, 0.25, 0.25)?;
    for rep in [c.ckn_classical(&ckn)?, c.ckn_radial(&ckn)?] {
        println!("{:<16} verdict={} failed={:?}", rep.theorem.tag(), rep.verdict, rep.failed_labels());
    }

    let tr = TraceParams::new(3, 2.0, 3.0, 0.0, 0.0)?;
    for t in [tr, tr.shifted(1.0), tr.shifted(-1.0)] {
        let rep = c.trace_radial(&t)?;
        println!(
            "trace (alpha={:+}, beta={:+}) verdict={} failed={:?}",
            t.alpha,
            t.beta,
            rep.verdict,
            rep.failed_labels()
        );
    }

    let ddd = DddParams::new(3, 2.0, 2.0, 0.5, 0.5, 2.0)?;
    let rep = c.ddd(&ddd)?;
    println!("ddd verdict={}", rep.verdict);
    for cond in &rep.conditions {
        println!("  {:<36} residual {:+.3e}", cond.label, cond.residual);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
