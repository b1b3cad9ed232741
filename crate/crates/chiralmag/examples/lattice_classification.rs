//! Lattice shapes: classification, dual lattices and critical wave vectors.
//!
//! ```bash
//! cargo run --example lattice_classification
//! ```

use chiralmag::lattice::LatticeSpec;
use std::f64::consts::PI;

fn main() -> chiralmag::Result<()> {
    let shapes = [
        ("square", LatticeSpec::square()),
        ("hexagonal", LatticeSpec::hexagonal()),
        ("rhombic 72 deg", LatticeSpec::new(1.0, 72.0_f64.to_radians())?),
        ("rectangular |tau| = 1.3", LatticeSpec::new(1.3, PI / 2.0)?),
        ("oblique |tau| = 1.2, 75 deg", LatticeSpec::new(1.2, 75.0_f64.to_radians())?),
    ];

    for (name, spec) in &shapes {
        let class = spec.classify();
        println!(
            "{name}: tag = {}, holohedry = {}, gamma = {:.6}, cell area = {:.6}",
            class.tag,
            class.holohedry,
            class.gamma,
            spec.cell_area()
        );
        let criticals = spec.critical_wave_vectors();
        print!("  critical wave vectors ({} pairs):", criticals.len());
        for wv in &criticals {
            print!(" k=({},{}) v=({:.4},{:.4})", wv.k[0], wv.k[1], wv.v[0], wv.v[1]);
        }
        println!();
        let shell = spec.dual_vectors_within(class.gamma + 1e-9)?;
        println!(
            "  dual vectors up to the second shell: {} (norms {:.4} .. {:.4})",
            shell.len(),
            shell.first().map(|w| w.norm).unwrap_or(0.0),
            shell.last().map(|w| w.norm).unwrap_or(0.0),
        );
    }

    // Shapes outside the reduced fundamental domain are rejected.
    match LatticeSpec::new(1.0, PI / 4.0) {
        Err(e) => println!("unreduced shape rejected as expected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
