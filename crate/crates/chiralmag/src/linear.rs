//! Closed-form linear analysis at the zero state: bifurcation points,
//! non-resonance verification and the explicit kernel modes for each
//! symmetry class.

use crate::error::{Error, Result};
use crate::field::{ModelParams, RealField};
use crate::lattice::{LatticeSpec, LatticeTag, WaveVector};
use std::f64::consts::PI;
use std::fmt;

/// Root choice in `lambda0 = -1 - beta/2 +/- sqrt(4 kappa^2 + beta^2/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSign {
    Plus,
    Minus,
}

/// Axial symmetry class of a kernel mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// Helical pattern, available on every lattice.
    Sigma1Helical,
    /// Vortex-antivortex pattern, equilateral lattices only.
    Sigma2Vortex,
    /// Skyrmion pattern, hexagonal lattices only.
    Sigma3Skyrmion,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Symmetry::Sigma1Helical => "sigma1 (helical)",
            Symmetry::Sigma2Vortex => "sigma2 (vortex)",
            Symmetry::Sigma3Skyrmion => "sigma3 (skyrmion)",
        };
        f.write_str(s)
    }
}

impl Symmetry {
    pub fn compatible_with(&self, tag: LatticeTag) -> bool {
        match self {
            Symmetry::Sigma1Helical => true,
            Symmetry::Sigma2Vortex => matches!(
                tag,
                LatticeTag::Rhombic | LatticeTag::Square | LatticeTag::Hexagonal
            ),
            Symmetry::Sigma3Skyrmion => tag == LatticeTag::Hexagonal,
        }
    }

    /// The richest symmetry available on a lattice class.
    pub fn richest_for(tag: LatticeTag) -> Symmetry {
        match tag {
            LatticeTag::Hexagonal => Symmetry::Sigma3Skyrmion,
            LatticeTag::Rhombic | LatticeTag::Square => Symmetry::Sigma2Vortex,
            LatticeTag::NonEquilateral => Symmetry::Sigma1Helical,
        }
    }
}

/// Bifurcation point on the critical circle.
#[derive(Debug, Clone, Copy)]
pub struct BifurcationPoint {
    pub lambda0: f64,
    pub root_sign: RootSign,
    /// In-plane amplitude `A = 2 kappa / (-beta/2 +/- sqrt(4 kappa^2 + beta^2/4))`.
    pub amplitude_a: f64,
    /// Kernel dimension; filled in from the lattice at mode construction.
    pub kernel_dim: Option<usize>,
    /// Resonance flag; filled in by [`check_resonance`].
    pub resonant: Option<bool>,
}

/// Bifurcation point `lambda0 = -1 - beta/2 +/- sqrt(4 kappa^2 + beta^2/4)`.
pub fn bifurcation_point(p: &ModelParams, root_sign: RootSign) -> BifurcationPoint {
    let s = (4.0 * p.kappa * p.kappa + p.beta * p.beta / 4.0).sqrt();
    let signed = match root_sign {
        RootSign::Plus => s,
        RootSign::Minus => -s,
    };
    BifurcationPoint {
        lambda0: -1.0 - p.beta / 2.0 + signed,
        root_sign,
        amplitude_a: 2.0 * p.kappa / (-p.beta / 2.0 + signed),
        kernel_dim: None,
        resonant: None,
    }
}

/// Equality tolerance for the resonance condition. Resonance is a
/// measure-zero set; parameters closer than [`NEAR_RESONANCE_BAND`] to it are
/// flagged as near-resonant because the reduction constants degenerate there.
pub const RESONANCE_TOL: f64 = 1e-9;
pub const NEAR_RESONANCE_BAND: f64 = 1e-4;

/// Constant-mode degeneracies of the linearization, reported separately from
/// the non-constant resonance condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantModeDegeneracy {
    /// `lambda0 = 0`: in-plane constant modes join the kernel.
    InPlane,
    /// `lambda0 + beta = 0`: the out-of-plane constant mode joins the kernel.
    OutOfPlane,
}

#[derive(Debug, Clone)]
pub struct ResonanceReport {
    pub resonant: bool,
    /// Distance from `lambda0` to the nearest off-circle branch value.
    pub margin: f64,
    pub near_resonant: bool,
    /// Wave vector and branch attaining the margin.
    pub worst: Option<(WaveVector, RootSign)>,
    pub constant_mode: Option<ConstantModeDegeneracy>,
}

/// Radius beyond which both branch values fall below `lambda0 - 1`.
///
/// With `t = |omega|`, the plus branch satisfies
/// `-t^2 - beta/2 + sqrt(4 kappa^2 t^2 + beta^2/4) <= -t^2 + 2 kappa t`,
/// which drops below `lambda0 - 1` for `t > kappa + sqrt(kappa^2 + 1 - lambda0)`;
/// the minus branch is smaller still.
/// `R = 2 kappa + sqrt(4 kappa^2 + |lambda0| + beta + 2)` dominates that root.
fn resonance_scan_radius(bp: &BifurcationPoint, p: &ModelParams) -> f64 {
    2.0 * p.kappa + (4.0 * p.kappa * p.kappa + bp.lambda0.abs() + p.beta + 2.0).sqrt()
}

/// Full resonance scan over the dual lattice.
pub fn resonance_report(
    bp: &BifurcationPoint,
    p: &ModelParams,
    spec: &LatticeSpec,
) -> ResonanceReport {
    let radius = resonance_scan_radius(bp, p);
    let duals = spec
        .dual_vectors_within(radius)
        .expect("resonance scan radius is modest");
    let mut margin = f64::INFINITY;
    let mut worst = None;
    for wv in duals {
        if (wv.norm - 1.0).abs() <= 1e-12 {
            continue; // the critical circle itself spans the kernel
        }
        let t2 = wv.norm * wv.norm;
        let s = (4.0 * p.kappa * p.kappa * t2 + p.beta * p.beta / 4.0).sqrt();
        for (root, val) in [
            (RootSign::Plus, -t2 - p.beta / 2.0 + s),
            (RootSign::Minus, -t2 - p.beta / 2.0 - s),
        ] {
            let dist = (bp.lambda0 - val).abs();
            if dist < margin {
                margin = dist;
                worst = Some((wv, root));
            }
        }
    }
    let constant_mode = if bp.lambda0.abs() <= RESONANCE_TOL {
        Some(ConstantModeDegeneracy::InPlane)
    } else if (bp.lambda0 + p.beta).abs() <= RESONANCE_TOL {
        Some(ConstantModeDegeneracy::OutOfPlane)
    } else {
        None
    };
    ResonanceReport {
        resonant: margin < RESONANCE_TOL,
        margin,
        near_resonant: margin < NEAR_RESONANCE_BAND,
        worst,
        constant_mode,
    }
}

/// True iff some dual vector off the critical circle solves the dispersion
/// relation at `lambda0` within [`RESONANCE_TOL`].
pub fn check_resonance(bp: &BifurcationPoint, p: &ModelParams, spec: &LatticeSpec) -> bool {
    resonance_report(bp, p, spec).resonant
}

/// A kernel mode `phi_1` of the linearization at `lambda0`, L2-normalized.
#[derive(Debug, Clone)]
pub struct KernelMode {
    pub symmetry: Symmetry,
    /// Critical wave vectors the mode is built from (one per +/- pair).
    pub wave_vectors: Vec<WaveVector>,
    /// The normalized mode sampled on the grid.
    pub field: RealField,
}

/// Samples the normalized helical kernel wave for the dual index `k`:
/// `phi_{1,v}(x) = (A (v2/|v|) sin(v.x), -A (v1/|v|) sin(v.x), cos(v.x)) / sqrt(1+A^2)`.
///
/// Its mean square is 1/2. Phases are evaluated through the integer identity
/// `v.x_ij = 2*pi*(k1*i + k2*j)/n`, so sampling is exact.
pub fn helical_wave(spec: &LatticeSpec, k: [i64; 2], amplitude_a: f64, n: usize) -> Result<RealField> {
    let wv = spec.wave_vector(k);
    let norm = 1.0 / (1.0 + amplitude_a * amplitude_a).sqrt();
    let c1 = amplitude_a * wv.v[1] / wv.norm * norm;
    let c2 = -amplitude_a * wv.v[0] / wv.norm * norm;
    let mut out = RealField::zeros(n)?;
    let ni = n as i64;
    for i in 0..n {
        for j in 0..n {
            let phase_idx = (k[0] * i as i64 + k[1] * j as i64).rem_euclid(ni);
            let phase = 2.0 * PI * phase_idx as f64 / n as f64;
            let (sin, cos) = phase.sin_cos();
            out.set(i, j, [c1 * sin, c2 * sin, norm * cos]);
        }
    }
    Ok(out)
}

/// Builds the L2-normalized kernel mode for the requested symmetry class.
///
/// Wave-vector choices per class: `k = (0,1)` for the helical mode on every
/// lattice; `k = (1,0), (0,1)` for the vortex mode; `k = (1,0), (0,1), (1,1)`
/// for the skyrmion mode.
pub fn build_mode(
    bp: &BifurcationPoint,
    spec: &LatticeSpec,
    symmetry: Symmetry,
    n: usize,
) -> Result<KernelMode> {
    let tag = spec.classify().tag;
    if !symmetry.compatible_with(tag) {
        return Err(Error::SymmetryMismatch {
            symmetry,
            lattice: tag,
        });
    }
    let a = bp.amplitude_a;
    let (field, ks): (RealField, Vec<[i64; 2]>) = match symmetry {
        Symmetry::Sigma1Helical => {
            let w = helical_wave(spec, [0, 1], a, n)?;
            (w.scaled(2.0_f64.sqrt()), vec![[0, 1]])
        }
        Symmetry::Sigma2Vortex => {
            let u = helical_wave(spec, [1, 0], a, n)?;
            let w = helical_wave(spec, [0, 1], a, n)?;
            (u.add_scaled(&w, -1.0), vec![[1, 0], [0, 1]])
        }
        Symmetry::Sigma3Skyrmion => {
            let u = helical_wave(spec, [1, 0], a, n)?;
            let w = helical_wave(spec, [0, 1], a, n)?;
            let z = helical_wave(spec, [1, 1], a, n)?;
            let sum = u.add_scaled(&w, 1.0).add_scaled(&z, 1.0);
            (sum.scaled((2.0_f64 / 3.0).sqrt()), vec![[1, 0], [0, 1], [1, 1]])
        }
    };
    Ok(KernelMode {
        symmetry,
        wave_vectors: ks.iter().map(|&k| spec.wave_vector(k)).collect(),
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{apply_linear, to_spectral};
    use std::f64::consts::PI;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    #[test]
    fn bifurcation_point_values() {
        let p = ModelParams::new(0.6, 0.0, 1.0, 0.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        assert_close(bp.lambda0, 0.2, 1e-12);
        assert_close(bp.amplitude_a, 1.0, 1e-12);

        // -3.5 + sqrt(7.84 + 6.25)
        let p = ModelParams::new(1.4, 0.0, 1.0, 5.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        assert_close(bp.lambda0, 0.253664875824692, 1e-12);

        let p = ModelParams::new(1.4, 0.0, 1.0, 7.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        assert_close(bp.lambda0, -0.017813033797005495, 1e-12);
    }

    #[test]
    fn amplitude_is_one_at_zero_anisotropy() {
        for kappa in [0.3, 0.6, 1.0, 1.7] {
            let p = ModelParams::new(kappa, 0.0, 1.0, 0.0).unwrap();
            assert_eq!(bifurcation_point(&p, RootSign::Plus).amplitude_a, 1.0);
        }
    }

    #[test]
    fn plus_root_positive_iff_beta_below_corner() {
        for kappa in [0.6_f64, 0.9, 1.4, 2.0] {
            let corner = 4.0 * kappa * kappa - 1.0;
            for (beta, expect) in [
                ((corner - 1e-6).max(0.0), true),
                (corner + 1e-6, false),
            ] {
                let p = ModelParams::new(kappa, 0.0, 1.0, beta).unwrap();
                let bp = bifurcation_point(&p, RootSign::Plus);
                assert_eq!(bp.lambda0 > 0.0, expect, "kappa={kappa} beta={beta}");
            }
        }
    }

    #[test]
    fn square_model_is_non_resonant() {
        let spec = LatticeSpec::square();
        let p = ModelParams::new(0.8, 0.0, 1.0, 1.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        assert_close(bp.lambda0, 0.17630546142402115, 1e-12);
        let report = resonance_report(&bp, &p, &spec);
        assert!(!report.resonant);
        assert!(!report.near_resonant);
        // nearest branch value sits at |omega|^2 = 2 on the plus branch
        let expected_margin = (bp.lambda0 - (-0.18267395474870618)).abs();
        assert_close(report.margin, expected_margin, 1e-9);
        assert!(report.constant_mode.is_none());
    }

    #[test]
    fn constructed_resonance_is_detected() {
        // Minus root meets the |omega|^2 = 2 plus branch when
        // 2 kappa (sqrt(2) + 1) = 1 at beta = 0.
        let kappa = 1.0 / (2.0 * (2.0_f64.sqrt() + 1.0));
        let spec = LatticeSpec::square();
        let p = ModelParams::new(kappa, 0.0, 1.0, 0.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Minus);
        assert!(check_resonance(&bp, &p, &spec));
    }

    #[test]
    fn constant_mode_degeneracy_is_reported_distinctly() {
        // kappa = 1/2, beta = 0: lambda0+ = 0 exactly.
        let spec = LatticeSpec::square();
        let p = ModelParams::new(0.5, 0.0, 1.0, 0.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        let report = resonance_report(&bp, &p, &spec);
        assert_eq!(report.constant_mode, Some(ConstantModeDegeneracy::InPlane));
    }

    #[test]
    fn helical_mode_at_unit_amplitude() {
        let spec = LatticeSpec::new(1.3, PI / 2.0).unwrap();
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        let mode = build_mode(&bp, &spec, Symmetry::Sigma1Helical, 27).unwrap();
        // (sin x2, 0, cos x2): pointwise unit modulus
        let expect = RealField::from_fn(27, &spec, |x| [x[1].sin(), 0.0, x[1].cos()]).unwrap();
        assert!(mode.field.sup_distance(&expect) < 1e-13);
        for m in mode.field.values() {
            let norm2: f64 = m.iter().map(|x| x * x).sum();
            assert_close(norm2, 1.0, 1e-13);
        }
    }

    #[test]
    fn vortex_mode_matches_square_closed_form() {
        let spec = LatticeSpec::square();
        let p = ModelParams::new(0.6, 0.0, 1.0, 0.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        let mode = build_mode(&bp, &spec, Symmetry::Sigma2Vortex, 27).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        let expect = RealField::from_fn(27, &spec, |x| {
            [
                -s * x[1].sin(),
                -s * x[0].sin(),
                s * (x[0].cos() - x[1].cos()),
            ]
        })
        .unwrap();
        assert!(mode.field.sup_distance(&expect) < 1e-13);
    }

    #[test]
    fn modes_are_normalized() {
        let hex = LatticeSpec::hexagonal();
        let rho = LatticeSpec::new(1.0, 1.2).unwrap();
        let neq = LatticeSpec::new(1.4, 1.4).unwrap();
        let p = ModelParams::new(0.9, 0.0, 1.0, 2.5).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        for (spec, sym) in [
            (&hex, Symmetry::Sigma1Helical),
            (&hex, Symmetry::Sigma2Vortex),
            (&hex, Symmetry::Sigma3Skyrmion),
            (&rho, Symmetry::Sigma2Vortex),
            (&neq, Symmetry::Sigma1Helical),
        ] {
            let mode = build_mode(&bp, spec, sym, 27).unwrap();
            assert_close(mode.field.mean_square(), 1.0, 1e-12);
        }
    }

    #[test]
    fn symmetry_mismatch_is_rejected() {
        let spec = LatticeSpec::square();
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        assert!(matches!(
            build_mode(&bp, &spec, Symmetry::Sigma3Skyrmion, 9),
            Err(Error::SymmetryMismatch { .. })
        ));
        let neq = LatticeSpec::new(1.2, PI / 2.0).unwrap();
        assert!(matches!(
            build_mode(&bp, &neq, Symmetry::Sigma2Vortex, 9),
            Err(Error::SymmetryMismatch { .. })
        ));
    }

    #[test]
    fn modes_span_the_kernel() {
        // apply_linear(phi1, lambda0) = 0 for every mode/lattice/parameter combo
        let hex = LatticeSpec::hexagonal();
        let sq = LatticeSpec::square();
        let neq = LatticeSpec::new(1.25, 1.35).unwrap();
        let params = [
            ModelParams::new(0.6, 0.0, 1.0, 0.0).unwrap(),
            ModelParams::new(1.4, 0.0, 1.0, 5.0).unwrap(),
            ModelParams::new(0.9, 0.0, 2.0, 1.7).unwrap(),
        ];
        for p in &params {
            for root in [RootSign::Plus, RootSign::Minus] {
                let bp = bifurcation_point(p, root);
                let combos: Vec<(&LatticeSpec, Symmetry)> = vec![
                    (&sq, Symmetry::Sigma1Helical),
                    (&sq, Symmetry::Sigma2Vortex),
                    (&hex, Symmetry::Sigma3Skyrmion),
                    (&neq, Symmetry::Sigma1Helical),
                ];
                for (spec, sym) in combos {
                    let mode = build_mode(&bp, spec, sym, 27).unwrap();
                    let p0 = p.with_lambda(bp.lambda0);
                    let lphi = crate::field::to_real(&apply_linear(
                        &to_spectral(&mode.field),
                        &p0,
                        spec,
                    ));
                    assert!(
                        lphi.sup_norm() < 1e-11,
                        "kernel violated: {} {:?} {:?}",
                        lphi.sup_norm(),
                        sym,
                        root
                    );
                }
            }
        }
    }

    #[test]
    fn skyrmion_mode_is_nowhere_zero_and_vortex_zeros_are_isolated() {
        let hex = LatticeSpec::hexagonal();
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);
        let sky = build_mode(&bp, &hex, Symmetry::Sigma3Skyrmion, 81).unwrap();
        let min_mod = sky
            .field
            .values()
            .iter()
            .map(|m| (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(min_mod > 0.2, "skyrmion modulus dips to {min_mod}");

        let sq = LatticeSpec::square();
        let vor = build_mode(&bp, &sq, Symmetry::Sigma2Vortex, 81).unwrap();
        let zeros = vor
            .field
            .values()
            .iter()
            .filter(|m| (m[0] * m[0] + m[1] * m[1]).sqrt() < 0.02)
            .count();
        assert_eq!(zeros, 1, "only the grid-resolved vortex core at the origin");
    }

    #[test]
    fn modes_are_fixed_by_their_symmetry_generators() {
        let n = 27;
        let p = ModelParams::new(0.8, 0.0, 1.0, 1.5).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);

        // Sigma1 on a non-equilateral lattice: rotation by pi about e3 with
        // index map (i, j) -> (-i, -j), plus x1 translations (i, j) -> (i+1, j).
        let neq = LatticeSpec::new(1.2, PI / 2.0).unwrap();
        let mode = build_mode(&bp, &neq, Symmetry::Sigma1Helical, n).unwrap();
        let mut max = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let src = mode.field.get((n - i) % n, (n - j) % n);
                let turned = [-src[0], -src[1], src[2]];
                let here = mode.field.get(i, j);
                for c in 0..3 {
                    max = max.max((turned[c] - here[c]).abs());
                }
                let shifted = mode.field.get((i + 1) % n, j);
                for c in 0..3 {
                    max = max.max((shifted[c] - here[c]).abs());
                }
            }
        }
        assert!(max < 1e-13, "sigma1 violation {max}");

        // Sigma2 on the square lattice: diagonal reflection, index map
        // (i, j) -> (j, i), spin map (m1, m2, m3) -> (m2, m1, -m3).
        let sq = LatticeSpec::square();
        let mode = build_mode(&bp, &sq, Symmetry::Sigma2Vortex, n).unwrap();
        let mut max = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let src = mode.field.get(j, i);
                let turned = [src[1], src[0], -src[2]];
                let here = mode.field.get(i, j);
                for c in 0..3 {
                    max = max.max((turned[c] - here[c]).abs());
                }
            }
        }
        assert!(max < 1e-13, "sigma2 violation {max}");

        // Sigma3 on the hexagonal lattice: rotation by pi/3 maps the grid
        // index (i, j) to (-j, i+j) and rotates the in-plane spin by pi/3.
        let hex = LatticeSpec::hexagonal();
        let mode = build_mode(&bp, &hex, Symmetry::Sigma3Skyrmion, n).unwrap();
        let (c60, s60) = (0.5, 3.0_f64.sqrt() / 2.0);
        let mut max = 0.0_f64;
        for i in 0..n as i64 {
            for j in 0..n as i64 {
                let here = mode.field.get(i as usize, j as usize);
                let turned = [
                    c60 * here[0] - s60 * here[1],
                    s60 * here[0] + c60 * here[1],
                    here[2],
                ];
                let mapped = mode.field.get(
                    (-j).rem_euclid(n as i64) as usize,
                    (i + j).rem_euclid(n as i64) as usize,
                );
                for c in 0..3 {
                    max = max.max((turned[c] - mapped[c]).abs());
                }
            }
        }
        assert!(max < 1e-13, "sigma3 violation {max}");
    }
}
