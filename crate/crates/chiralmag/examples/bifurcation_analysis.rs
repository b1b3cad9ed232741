//! Bifurcation points, resonance checks and branch curvatures for the three
//! symmetry classes.
//!
//! ```bash
//! cargo run --example bifurcation_analysis
//! ```

use chiralmag::branch::compute_nu2;
use chiralmag::field::ModelParams;
use chiralmag::lattice::LatticeSpec;
use chiralmag::linear::{bifurcation_point, build_mode, resonance_report, RootSign, Symmetry};

fn main() -> chiralmag::Result<()> {
    let square = LatticeSpec::square();

    for (kappa, beta) in [(0.6, 0.0), (0.8, 1.0), (1.4, 5.0), (1.4, 7.0)] {
        let p = ModelParams::new(kappa, 0.0, 1.0, beta)?;
        let plus = bifurcation_point(&p, RootSign::Plus);
        let minus = bifurcation_point(&p, RootSign::Minus);
        let report = resonance_report(&plus, &p, &square);
        println!("kappa = {kappa}, beta = {beta}:");
        println!(
            "  lambda0 = {:+.9} (plus) / {:+.9} (minus), A = {:.6}",
            plus.lambda0, minus.lambda0, plus.amplitude_a
        );
        println!(
            "  resonant = {}, margin to the nearest branch value = {:.3e}",
            report.resonant, report.margin
        );
        if plus.lambda0 <= 0.0 {
            println!("  note: lambda0 <= 0, bifurcation branches here are unstable");
            continue;
        }
        for sym in [Symmetry::Sigma1Helical, Symmetry::Sigma2Vortex] {
            let mode = build_mode(&plus, &square, sym, 81)?;
            let nu2 = compute_nu2(&mode, &p);
            // the experiment convention: lambda = lambda0 + delta * nu2
            println!(
                "  {sym}: nu2 = {nu2:.9}, lambda(0.01) = {:.9}",
                plus.lambda0 + 0.01 * nu2
            );
        }
    }

    // The skyrmion class needs the hexagonal lattice.
    let hex = LatticeSpec::hexagonal();
    let p = ModelParams::new(1.0, 0.0, 1.0, 0.0)?;
    let plus = bifurcation_point(&p, RootSign::Plus);
    let mode = build_mode(&plus, &hex, Symmetry::Sigma3Skyrmion, 81)?;
    println!(
        "hexagonal skyrmion: nu2 = {:.9}, kernel dim = {}",
        compute_nu2(&mode, &p),
        hex.classify().kernel_dim()
    );
    Ok(())
}
