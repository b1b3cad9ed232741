//! Build the explicit kernel modes and dump them as CSV and P6 images.
//!
//! ```bash
//! cargo run --example kernel_modes
//! ```

use chiralmag::field::ModelParams;
use chiralmag::io::{write_field_csv, write_field_ppm};
use chiralmag::lattice::LatticeSpec;
use chiralmag::linear::{bifurcation_point, build_mode, RootSign, Symmetry};
use std::path::PathBuf;

fn main() -> chiralmag::Result<()> {
    let out = PathBuf::from("chiralmag-out/kernel_modes");
    std::fs::create_dir_all(&out)?;

    let p = ModelParams::new(1.0, 0.0, 1.0, 2.0)?;
    let bp = bifurcation_point(&p, RootSign::Plus);
    let n = 129;

    let cases = [
        (LatticeSpec::square(), Symmetry::Sigma1Helical, "helical_square"),
        (LatticeSpec::square(), Symmetry::Sigma2Vortex, "vortex_square"),
        (LatticeSpec::hexagonal(), Symmetry::Sigma3Skyrmion, "skyrmion_hexagonal"),
    ];
    for (spec, sym, name) in cases {
        let mode = build_mode(&bp, &spec, sym, n)?;
        let min_modulus = mode
            .field
            .values()
            .iter()
            .map(|m| (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt())
            .fold(f64::INFINITY, f64::min);
        println!(
            "{name}: <|phi|^2> = {:.12}, min |phi| = {:.6}",
            mode.field.mean_square(),
            min_modulus
        );
        write_field_csv(&out.join(format!("{name}.csv")), &mode.field, &spec)?;
        write_field_ppm(&out.join(format!("{name}.ppm")), &mode.field)?;
    }
    println!("wrote CSV dumps and P6 images under {}", out.display());
    Ok(())
}
