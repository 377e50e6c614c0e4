//! Angular kernel values and its three log-log slopes.

use std::error::Error;

use radineq::kernels::{kernel_asymptotic_fit, kernel_i, kernel_i_closed_n3, Regime};

pub fn run() -> Result<(), Box<dyn Error>> {
    for (a, z) in [(0.5, 0.1), (1.0, 0.01), (3.0, 2.0)] {
        let k = kernel_i(a, z, 3)?;
        println!(
            "I({a}, {z}; n=3) = {:.12} (closed form {:.12}, est. error {:.1e})",
            k.value,
            kernel_i_closed_n3(a, z)?,
            k.est_error
        );
    }
    for n in 2..=5 {
        let slopes: Vec<String> = [Regime::SmallA, Regime::LargeR, Regime::Singular]
            .into_iter()
            .map(|r| kernel_asymptotic_fit(n, r).map(|f| format!("{:+.4}", f.slope)))
            .collect::<Result<_, _>>()?;
        println!("n={n}: small a {}, large r {}, singular {}", slopes[0], slopes[1], slopes[2]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
