//! Spectral stability of the bifurcation branches: the spectrum of the
//! linearization at the bifurcation point, perturbation coefficients of the
//! critical eigenvalues, the square-lattice anisotropy threshold, the
//! hexagonal instability witness and the admissible parameter region.

use crate::error::{Error, Result};
use crate::field::{ModelParams, RealField};
use crate::lattice::{LatticeSpec, LatticeTag, WaveVector};
use crate::linear::{bifurcation_point, helical_wave, BifurcationPoint, KernelMode, RootSign, Symmetry};

/// Dual-norm radius for eigenvalue scans. Beyond it the factored form of
/// `mu_minus` is increasing in `|omega|`, so no negative eigenvalues can be
/// missed.
pub const MU_SCAN_RADIUS: f64 = 4.0;

/// Anisotropy threshold `4 kappa / sqrt(3)` separating stable vortex and
/// stable helical order on the square lattice.
pub fn threshold_beta(kappa: f64) -> f64 {
    4.0 * kappa / 3.0_f64.sqrt()
}

/// Closed form of the competing-mode curvature, `(A^2 - 3)/(A^2 + 1)`.
pub fn c_tilde_closed(amplitude_a: f64) -> f64 {
    let a2 = amplitude_a * amplitude_a;
    (a2 - 3.0) / (a2 + 1.0)
}

/// Closed form of the hexagonal instability witness,
/// `-alpha (2 A^2 + 3) / (3 (A^2 + 1))`.
pub fn hex_witness_closed(amplitude_a: f64, alpha: f64) -> f64 {
    let a2 = amplitude_a * amplitude_a;
    -alpha * (2.0 * a2 + 3.0) / (3.0 * (a2 + 1.0))
}

/// Gap condition `4 kappa^2 <= sqrt(4 kappa^2 + beta^2/4) + sqrt(4 kappa^2
/// gamma^2 + beta^2/4)` with `gamma` the second critical wave number.
pub fn gap_condition(p: &ModelParams, gamma: f64) -> bool {
    let b24 = p.beta * p.beta / 4.0;
    let k2 = 4.0 * p.kappa * p.kappa;
    k2 <= (k2 + b24).sqrt() + (k2 * gamma * gamma + b24).sqrt()
}

/// Eigenvalues `mu_minus <= mu_plus` of the linearization at the plus-root
/// bifurcation point, for every dual vector within `radius`, via the
/// factored form `mu_minus = (|omega|^2 - 1)(1 - 4 kappa^2 / (sqrt(4 kappa^2
/// + beta^2/4) + sqrt(4 kappa^2 |omega|^2 + beta^2/4)))`.
///
/// Norms within 1e-12 of the critical circle are snapped so the kernel
/// eigenvalue is exactly zero, matching the lattice module's boundary
/// snapping.
pub fn l0_spectrum(
    p: &ModelParams,
    spec: &LatticeSpec,
    radius: f64,
) -> Result<Vec<(WaveVector, f64, f64)>> {
    let b24 = p.beta * p.beta / 4.0;
    let k2 = 4.0 * p.kappa * p.kappa;
    let s1 = (k2 + b24).sqrt();
    let out = spec
        .dual_vectors_within(radius)?
        .into_iter()
        .map(|wv| {
            let t = if (wv.norm - 1.0).abs() <= 1e-12 {
                1.0
            } else {
                wv.norm * wv.norm
            };
            let st = (k2 * t + b24).sqrt();
            let mu_minus = (t - 1.0) * (1.0 - k2 / (s1 + st));
            let mu_plus = t - 1.0 + s1 + st;
            (wv, mu_minus, mu_plus)
        })
        .collect();
    Ok(out)
}

/// Eigenvalues of the constant modes: `lambda0` (in-plane, twice) and
/// `lambda0 + beta` (out-of-plane).
pub fn constant_mode_eigenvalues(p: &ModelParams) -> (f64, f64) {
    let bp = bifurcation_point(p, RootSign::Plus);
    (bp.lambda0, bp.lambda0 + p.beta)
}

/// Stability verdict for a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    /// Lattice/symmetry combinations whose stability is not settled here.
    OutOfScope,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::OutOfScope => "out-of-scope",
        };
        f.write_str(s)
    }
}

/// Mode attaining the smallest eigenvalue in the scan.
#[derive(Debug, Clone, Copy)]
pub enum WorstMode {
    Constant,
    Lattice(WaveVector),
}

impl std::fmt::Display for WorstMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WorstMode::Constant => f.write_str("constant"),
            WorstMode::Lattice(wv) => write!(f, "k=({},{})", wv.k[0], wv.k[1]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub lambda0: f64,
    pub amplitude_a: f64,
    pub lambda0_positive: bool,
    pub gap_condition: bool,
    /// Smallest eigenvalue over the scan (constant modes included) is above
    /// `-1e-12`.
    pub mu_min_nonneg: bool,
    pub threshold_beta: f64,
    pub c_tilde: f64,
    pub hex_witness: f64,
    pub verdict: Verdict,
    pub worst_mode: WorstMode,
}

/// Stability verdict for the bifurcation branch of the given symmetry class
/// on the given lattice (plus root).
///
/// Settled cases: helical order on non-equilateral lattices; helical and
/// vortex order on the square lattice; skyrmion order on the hexagonal
/// lattice (always unstable). Rhombic order and the remaining hexagonal
/// classes are reported as out of scope. Threshold equalities (where the
/// quadratic perturbation coefficient vanishes) are out of scope as well.
pub fn stability_verdict(
    p: &ModelParams,
    spec: &LatticeSpec,
    symmetry: Symmetry,
) -> Result<StabilityReport> {
    let class = spec.classify();
    if !symmetry.compatible_with(class.tag) {
        return Err(Error::SymmetryMismatch {
            symmetry,
            lattice: class.tag,
        });
    }
    let bp = bifurcation_point(p, RootSign::Plus);
    let lambda0_positive = bp.lambda0 > 0.0;
    let gap = gap_condition(p, class.gamma);
    let threshold = threshold_beta(p.kappa);
    let c_tilde = c_tilde_closed(bp.amplitude_a);
    let hex_witness = hex_witness_closed(bp.amplitude_a, p.alpha);

    let spectrum = l0_spectrum(p, spec, MU_SCAN_RADIUS)?;
    let (lam0, lam0b) = constant_mode_eigenvalues(p);
    let mut mu_min = lam0.min(lam0b);
    let mut worst = WorstMode::Constant;
    for (wv, mu_minus, _) in &spectrum {
        if *mu_minus < mu_min {
            mu_min = *mu_minus;
            worst = WorstMode::Lattice(*wv);
        }
    }

    let verdict = if !lambda0_positive {
        Verdict::Unstable
    } else if class.tag == LatticeTag::Hexagonal && symmetry == Symmetry::Sigma3Skyrmion {
        Verdict::Unstable
    } else if matches!(
        (class.tag, symmetry),
        (LatticeTag::Rhombic, _)
            | (LatticeTag::Hexagonal, Symmetry::Sigma1Helical)
            | (LatticeTag::Hexagonal, Symmetry::Sigma2Vortex)
    ) {
        Verdict::OutOfScope
    } else if !gap {
        Verdict::Unstable
    } else {
        match (class.tag, symmetry) {
            (LatticeTag::NonEquilateral, Symmetry::Sigma1Helical) => Verdict::Stable,
            (LatticeTag::Square, Symmetry::Sigma2Vortex) => {
                if c_tilde > 0.0 {
                    Verdict::Stable
                } else if c_tilde < 0.0 {
                    Verdict::Unstable
                } else {
                    Verdict::OutOfScope
                }
            }
            (LatticeTag::Square, Symmetry::Sigma1Helical) => {
                if p.beta < threshold {
                    Verdict::Stable
                } else if p.beta > threshold {
                    Verdict::Unstable
                } else {
                    Verdict::OutOfScope
                }
            }
            _ => Verdict::OutOfScope,
        }
    };

    Ok(StabilityReport {
        lambda0: bp.lambda0,
        amplitude_a: bp.amplitude_a,
        lambda0_positive,
        gap_condition: gap,
        mu_min_nonneg: mu_min >= -1e-12,
        threshold_beta: threshold,
        c_tilde,
        hex_witness,
        verdict,
        worst_mode: worst,
    })
}

/// The admissible region for a stable square vortex-antivortex lattice:
/// `beta > 4 kappa / sqrt(3)`, `beta >= sqrt(16 kappa^4 - 24 kappa^2 + 1)`
/// (vacuous while the radicand is negative) and `beta < 4 kappa^2 - 1`.
pub fn admissible_region(kappa: f64, beta: f64) -> bool {
    let radicand = 16.0 * kappa.powi(4) - 24.0 * kappa * kappa + 1.0;
    let middle = radicand < 0.0 || beta >= radicand.sqrt();
    beta > threshold_beta(kappa) && middle && beta < 4.0 * kappa * kappa - 1.0
}

/// Quadratic perturbation coefficient of an eigenvalue along the branch:
/// `mu''(0)/alpha` for the probe direction, evaluated by quadrature as
/// `4 <(probe . phi1)^2> + 2 <|probe|^2 |phi1|^2> + 2 (nu2/alpha) <|probe|^2>`.
///
/// With the branch mode itself as probe this reduces to `4 <|phi1|^4>`.
pub enum ModePair<'a> {
    /// The branch mode perturbed along itself.
    Fixed(&'a KernelMode),
    /// A competing kernel direction against the branch mode.
    Competing {
        probe: &'a RealField,
        mode: &'a KernelMode,
        nu2: f64,
    },
}

pub fn mu_curvature(pair: &ModePair<'_>, p: &ModelParams) -> f64 {
    match pair {
        ModePair::Fixed(mode) => {
            4.0 * mode.field.average_of(|m| {
                let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
                m2 * m2
            })
        }
        ModePair::Competing { probe, mode, nu2 } => {
            let phi = &mode.field;
            let n = phi.values().len();
            assert_eq!(probe.values().len(), n);
            let mut dot2 = 0.0;
            let mut cross = 0.0;
            let mut probe2 = 0.0;
            for (q, m) in probe.values().iter().zip(phi.values()) {
                let d = q[0] * m[0] + q[1] * m[1] + q[2] * m[2];
                let q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
                dot2 += d * d;
                cross += q2 * m2;
                probe2 += q2;
            }
            let nn = n as f64;
            4.0 * dot2 / nn + 2.0 * cross / nn + 2.0 * (nu2 / p.alpha) * probe2 / nn
        }
    }
}

/// Leading coefficient of the quadratic form `<L_s probe, probe>` along the
/// branch: `nu2 <|probe|^2> + alpha <|phi1|^2 |probe|^2> + 2 alpha
/// <(phi1 . probe)^2>`.
pub fn instability_witness(probe: &RealField, mode: &KernelMode, nu2: f64, p: &ModelParams) -> f64 {
    let pair = ModePair::Competing { probe, mode, nu2 };
    0.5 * p.alpha * mu_curvature(&pair, p)
}

/// The competing kernel direction on equilateral lattices: the normalized
/// sum of the two helical waves whose difference is the vortex mode.
pub fn competing_probe(spec: &LatticeSpec, bp: &BifurcationPoint, n: usize) -> Result<RealField> {
    let u = helical_wave(spec, [1, 0], bp.amplitude_a, n)?;
    let w = helical_wave(spec, [0, 1], bp.amplitude_a, n)?;
    Ok(u.add_scaled(&w, 1.0))
}

/// Witness direction for the hexagonal instability: the difference of two of
/// the three skyrmion waves, scaled to unit out-of-plane amplitude (the
/// normalization under which the closed form [`hex_witness_closed`] holds).
pub fn hex_witness_probe(spec: &LatticeSpec, bp: &BifurcationPoint, n: usize) -> Result<RealField> {
    let u = helical_wave(spec, [1, 0], bp.amplitude_a, n)?;
    let w = helical_wave(spec, [0, 1], bp.amplitude_a, n)?;
    let raw = u.add_scaled(&w, -1.0);
    Ok(raw.scaled((1.0 + bp.amplitude_a * bp.amplitude_a).sqrt()))
}
