//! Finite-difference check of backpropagation on random small networks.

use protview::cnn::{gradient_check, NetworkSpec, Shape, GRADCHECK_TOLERANCE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 3);
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let r = gradient_check(&spec, seed)?;
        println!(
            "seed {seed}: {} parameters, max relative error {:.3e} at {:?}",
            r.parameters_checked, r.max_relative_error, r.worst
        );
        worst = worst.max(r.max_relative_error);
    }
    println!("worst {worst:.3e} (tolerance {GRADCHECK_TOLERANCE:e})");
    Ok(())
}
