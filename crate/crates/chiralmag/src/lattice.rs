//! Planar lattices in the fundamental-domain parametrization.
//!
//! A lattice shape is a complex number `tau = |tau| e^{i theta}` reduced to the
//! fundamental domain of the modular group; the lattice itself is
//! `Lambda = 2*pi*A*Z^2` with the basis matrix `A` fixed by the shape. All
//! Fourier analysis runs over the dual lattice `Lambda* = A^{-T} Z^2`, whose
//! shortest nonzero vectors have length exactly 1.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::fmt;

/// Tolerance for fundamental-domain membership and boundary snapping.
///
/// Boundary shapes (|tau| = 1, theta = pi/3) snap exactly so that the
/// classification (and with it the critical-mode count) is not lost to
/// rounding.
pub const GEOM_TOL: f64 = 1e-12;

/// Default cap on the number of candidate indices visited by
/// [`LatticeSpec::dual_vectors_within`].
pub const MAX_WAVE_VECTOR_CANDIDATES: usize = 4_000_000;

/// Lattice shape class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeTag {
    NonEquilateral,
    Rhombic,
    Square,
    Hexagonal,
}

impl fmt::Display for LatticeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LatticeTag::NonEquilateral => "non-equilateral",
            LatticeTag::Rhombic => "rhombic",
            LatticeTag::Square => "square",
            LatticeTag::Hexagonal => "hexagonal",
        };
        f.write_str(s)
    }
}

/// Point group of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Holohedry {
    Z2,
    D2,
    D4,
    D6,
}

impl fmt::Display for Holohedry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Holohedry::Z2 => "Z2",
            Holohedry::D2 => "D2",
            Holohedry::D4 => "D4",
            Holohedry::D6 => "D6",
        };
        f.write_str(s)
    }
}

/// Shape class, holohedry and the second critical wave number `gamma`.
#[derive(Debug, Clone, Copy)]
pub struct LatticeClass {
    pub tag: LatticeTag,
    pub holohedry: Holohedry,
    /// Second-smallest dual-vector norm.
    pub gamma: f64,
}

impl LatticeClass {
    /// Dimension of the critical-mode space (2, 4 or 6 counting +/- pairs).
    pub fn kernel_dim(&self) -> usize {
        match self.tag {
            LatticeTag::NonEquilateral => 2,
            LatticeTag::Rhombic | LatticeTag::Square => 4,
            LatticeTag::Hexagonal => 6,
        }
    }
}

/// A dual-lattice vector `v = A^{-T} k` together with its integer index.
#[derive(Debug, Clone, Copy)]
pub struct WaveVector {
    pub k: [i64; 2],
    pub v: [f64; 2],
    pub norm: f64,
}

/// Lattice shape with precomputed primitive and dual bases.
#[derive(Debug, Clone, Copy)]
pub struct LatticeSpec {
    tau_abs: f64,
    theta: f64,
    /// Basis matrix `A`; the lattice is `2*pi*A*Z^2`, row-major.
    basis: [[f64; 2]; 2],
    /// Dual basis `A^{-T}`, row-major.
    dual: [[f64; 2]; 2],
    /// Area of the primitive cell, `|det(2*pi*A)|`.
    cell_area: f64,
}

impl LatticeSpec {
    /// Builds a lattice from the shape parameters, rejecting shapes outside
    /// the fundamental domain: `pi/3 <= theta < 2*pi/3` for `|tau| > 1` and
    /// `pi/3 <= theta <= pi/2` for `|tau| = 1`.
    pub fn new(tau_abs: f64, theta: f64) -> Result<Self> {
        if !tau_abs.is_finite() || !theta.is_finite() {
            return Err(Error::Domain("lattice shape must be finite".into()));
        }
        if tau_abs < 1.0 - GEOM_TOL {
            return Err(Error::Domain(format!(
                "|tau| = {tau_abs} < 1 is not a reduced lattice shape"
            )));
        }
        // Snap boundary shapes so equilateral classification is exact.
        let tau_abs = if (tau_abs - 1.0).abs() <= GEOM_TOL { 1.0 } else { tau_abs };
        let theta = if (theta - PI / 3.0).abs() <= GEOM_TOL {
            PI / 3.0
        } else if (theta - PI / 2.0).abs() <= GEOM_TOL {
            PI / 2.0
        } else {
            theta
        };
        let in_domain = if tau_abs == 1.0 {
            (PI / 3.0..=PI / 2.0).contains(&theta)
        } else {
            (PI / 3.0..2.0 * PI / 3.0).contains(&theta)
        };
        if !in_domain {
            return Err(Error::Domain(format!(
                "(|tau|, theta) = ({tau_abs}, {theta}) lies outside the fundamental domain"
            )));
        }

        let im = tau_abs * theta.sin();
        let re = tau_abs * theta.cos();
        let basis = [[1.0 / im, re / im], [0.0, 1.0]];
        let dual = [[im, 0.0], [-re, 1.0]];
        let cell_area = 4.0 * PI * PI / im;
        Ok(Self {
            tau_abs,
            theta,
            basis,
            dual,
            cell_area,
        })
    }

    pub fn square() -> Self {
        Self::new(1.0, PI / 2.0).expect("square shape is reduced")
    }

    pub fn hexagonal() -> Self {
        Self::new(1.0, PI / 3.0).expect("hexagonal shape is reduced")
    }

    pub fn tau_abs(&self) -> f64 {
        self.tau_abs
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn im_tau(&self) -> f64 {
        self.tau_abs * self.theta.sin()
    }

    pub fn re_tau(&self) -> f64 {
        self.tau_abs * self.theta.cos()
    }

    pub fn basis_matrix(&self) -> [[f64; 2]; 2] {
        self.basis
    }

    pub fn dual_matrix(&self) -> [[f64; 2]; 2] {
        self.dual
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    /// Collocation point `x_ij = 2*pi*A*(i/n, j/n)`.
    pub fn grid_point(&self, i: usize, j: usize, n: usize) -> [f64; 2] {
        let y = [i as f64 / n as f64, j as f64 / n as f64];
        [
            2.0 * PI * (self.basis[0][0] * y[0] + self.basis[0][1] * y[1]),
            2.0 * PI * (self.basis[1][0] * y[0] + self.basis[1][1] * y[1]),
        ]
    }

    /// Dual vector for the integer index `k`.
    pub fn wave_vector(&self, k: [i64; 2]) -> WaveVector {
        let v = [
            self.dual[0][0] * k[0] as f64 + self.dual[0][1] * k[1] as f64,
            self.dual[1][0] * k[0] as f64 + self.dual[1][1] * k[1] as f64,
        ];
        WaveVector {
            k,
            v,
            norm: v[0].hypot(v[1]),
        }
    }

    /// Shape classification with the second critical wave number.
    pub fn classify(&self) -> LatticeClass {
        let equilateral = self.tau_abs == 1.0;
        let (tag, gamma) = if equilateral && self.theta == PI / 3.0 {
            (LatticeTag::Hexagonal, 3.0_f64.sqrt())
        } else if equilateral && self.theta == PI / 2.0 {
            (LatticeTag::Square, (2.0 - 2.0 * (PI / 2.0).cos()).sqrt())
        } else if equilateral {
            (LatticeTag::Rhombic, (2.0 - 2.0 * self.theta.cos()).sqrt())
        } else {
            (LatticeTag::NonEquilateral, self.tau_abs)
        };
        let holohedry = match tag {
            LatticeTag::Hexagonal => Holohedry::D6,
            LatticeTag::Square => Holohedry::D4,
            LatticeTag::Rhombic => Holohedry::D2,
            // Rectangular shapes keep the reflection, oblique ones do not.
            LatticeTag::NonEquilateral => {
                if self.theta == PI / 2.0 {
                    Holohedry::D2
                } else {
                    Holohedry::Z2
                }
            }
        };
        LatticeClass {
            tag,
            holohedry,
            gamma,
        }
    }

    /// Smallest singular value of the dual basis `A^{-T}`.
    fn dual_min_singular_value(&self) -> f64 {
        let [[a, b], [c, d]] = self.dual;
        let t = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (t * t / 4.0 - det * det).max(0.0).sqrt();
        (t / 2.0 - disc).max(0.0).sqrt()
    }

    /// All dual vectors with `0 < |v| <= radius`, sorted by norm then
    /// lexicographic index, using the default candidate cap.
    pub fn dual_vectors_within(&self, radius: f64) -> Result<Vec<WaveVector>> {
        self.dual_vectors_within_capped(radius, MAX_WAVE_VECTOR_CANDIDATES)
    }

    /// Same as [`Self::dual_vectors_within`] with an explicit cap on the
    /// bounding box of candidate indices.
    ///
    /// Completeness: `|A^{-T} k| >= sigma_min |k| >= sigma_min * |k|_inf`, so
    /// every solution satisfies `|k|_inf <= radius / sigma_min`.
    pub fn dual_vectors_within_capped(&self, radius: f64, cap: usize) -> Result<Vec<WaveVector>> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        let sigma_min = self.dual_min_singular_value();
        let kmax = (radius / sigma_min).ceil() as i64;
        let side = 2 * kmax as usize + 1;
        let estimate = side * side;
        if estimate > cap {
            return Err(Error::Capacity { estimate, cap });
        }
        let mut out = Vec::new();
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                let wv = self.wave_vector([k1, k2]);
                if wv.norm <= radius {
                    out.push(wv);
                }
            }
        }
        out.sort_by(|a, b| {
            a.norm
                .partial_cmp(&b.norm)
                .unwrap()
                .then(a.k[0].cmp(&b.k[0]))
                .then(a.k[1].cmp(&b.k[1]))
        });
        Ok(out)
    }

    /// Norm-1 dual vectors, one representative per +/- pair, in the fixed
    /// index order used for mode construction.
    pub fn critical_wave_vectors(&self) -> Vec<WaveVector> {
        let ks: &[[i64; 2]] = match self.classify().tag {
            LatticeTag::NonEquilateral => &[[0, 1]],
            LatticeTag::Rhombic | LatticeTag::Square => &[[1, 0], [0, 1]],
            LatticeTag::Hexagonal => &[[1, 0], [0, 1], [1, 1]],
        };
        ks.iter().map(|&k| self.wave_vector(k)).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    #[test]
    fn square_basis_is_identity() {
        let s = LatticeSpec::square();
        let b = s.basis_matrix();
        let d = s.dual_matrix();
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert_close(b[i][j], e, 1e-15);
                assert_close(d[i][j], e, 1e-15);
            }
        }
        assert_close(s.cell_area(), 4.0 * PI * PI, 1e-12);
    }

    #[test]
    fn hexagonal_dual_basis() {
        let s = LatticeSpec::hexagonal();
        let d = s.dual_matrix();
        assert_close(d[0][0], 3.0_f64.sqrt() / 2.0, 1e-15);
        assert_close(d[0][1], 0.0, 1e-15);
        assert_close(d[1][0], -0.5, 1e-15);
        assert_close(d[1][1], 1.0, 1e-15);
    }

    #[test]
    fn unreduced_shape_is_rejected() {
        assert!(matches!(
            LatticeSpec::new(1.0, PI / 4.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            LatticeSpec::new(0.9, PI / 2.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            LatticeSpec::new(1.2, 2.0 * PI / 3.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn boundary_shapes_snap() {
        let hex = LatticeSpec::new(1.0 + 4e-13, PI / 3.0 - 4e-13).unwrap();
        assert_eq!(hex.classify().tag, LatticeTag::Hexagonal);
        let sq = LatticeSpec::new(1.0 - 4e-13, PI / 2.0 + 4e-13).unwrap();
        assert_eq!(sq.classify().tag, LatticeTag::Square);
    }

    #[test]
    fn classification_and_gamma() {
        let sq = LatticeSpec::square().classify();
        assert_eq!(sq.tag, LatticeTag::Square);
        assert_eq!(sq.holohedry, Holohedry::D4);
        assert_close(sq.gamma, 2.0_f64.sqrt(), 1e-15);

        let hex = LatticeSpec::hexagonal().classify();
        assert_eq!(hex.tag, LatticeTag::Hexagonal);
        assert_eq!(hex.holohedry, Holohedry::D6);
        assert_close(hex.gamma, 3.0_f64.sqrt(), 1e-15);

        let neq = LatticeSpec::new(1.1, PI / 2.0).unwrap().classify();
        assert_eq!(neq.tag, LatticeTag::NonEquilateral);
        assert_eq!(neq.holohedry, Holohedry::D2);
        assert_close(neq.gamma, 1.1, 1e-15);

        let oblique = LatticeSpec::new(1.1, 1.3).unwrap().classify();
        assert_eq!(oblique.tag, LatticeTag::NonEquilateral);
        assert_eq!(oblique.holohedry, Holohedry::Z2);

        let rh = LatticeSpec::new(1.0, 1.2).unwrap().classify();
        assert_eq!(rh.tag, LatticeTag::Rhombic);
        assert_eq!(rh.holohedry, Holohedry::D2);
        assert_close(rh.gamma, (2.0 - 2.0 * 1.2_f64.cos()).sqrt(), 1e-15);
    }

    #[test]
    fn dual_vectors_on_unit_circle() {
        let sq = LatticeSpec::square();
        let vs = sq.dual_vectors_within(1.0).unwrap();
        assert_eq!(vs.len(), 4);
        for wv in &vs {
            assert_close(wv.norm, 1.0, 1e-15);
        }

        let hex = LatticeSpec::hexagonal();
        let vs = hex.dual_vectors_within(1.0).unwrap();
        assert_eq!(vs.len(), 6);
        let mut ks: Vec<[i64; 2]> = vs.iter().map(|w| w.k).collect();
        ks.sort();
        assert_eq!(ks, vec![[-1, -1], [-1, 0], [0, -1], [0, 1], [1, 0], [1, 1]]);

        let neq = LatticeSpec::new(1.2, PI / 2.0).unwrap();
        let vs = neq.dual_vectors_within(1.0).unwrap();
        let ks: Vec<[i64; 2]> = vs.iter().map(|w| w.k).collect();
        assert_eq!(ks.len(), 2);
        assert!(ks.contains(&[0, 1]) && ks.contains(&[0, -1]));
    }

    #[test]
    fn enumeration_is_sorted_and_capacity_capped() {
        let s = LatticeSpec::new(1.0, 1.25).unwrap();
        let vs = s.dual_vectors_within(3.5).unwrap();
        for w in vs.windows(2) {
            assert!(w[0].norm <= w[1].norm + 1e-15);
        }
        assert!(matches!(
            s.dual_vectors_within_capped(1e4, 1000),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn critical_wave_vectors_match_mode_table() {
        let sq = LatticeSpec::square();
        let crit = sq.critical_wave_vectors();
        assert_eq!(crit.len(), 2);
        assert_close(crit[0].v[0], 1.0, 1e-15);
        assert_close(crit[0].v[1], 0.0, 1e-15);
        assert_close(crit[1].v[0], 0.0, 1e-15);
        assert_close(crit[1].v[1], 1.0, 1e-15);

        let hex = LatticeSpec::hexagonal();
        let crit = hex.critical_wave_vectors();
        assert_eq!(crit.len(), 3);
        let r3 = 3.0_f64.sqrt();
        assert_close(crit[0].v[0], r3 / 2.0, 1e-15);
        assert_close(crit[0].v[1], -0.5, 1e-15);
        assert_close(crit[1].v[0], 0.0, 1e-15);
        assert_close(crit[1].v[1], 1.0, 1e-15);
        assert_close(crit[2].v[0], r3 / 2.0, 1e-15);
        assert_close(crit[2].v[1], 0.5, 1e-15);

        let neq = LatticeSpec::new(1.3, PI / 2.0).unwrap();
        let crit = neq.critical_wave_vectors();
        assert_eq!(crit.len(), 1);
        assert_close(crit[0].v[0], 0.0, 1e-15);
        assert_close(crit[0].v[1], 1.0, 1e-15);
    }

    /// Random reduced shape; for |tau| > 1 keep Re(tau) inside the modular
    /// strip |Re| <= 1/2 so the shape is genuinely reduced.
    pub(crate) fn random_reduced_shape(rng: &mut impl Rng) -> LatticeSpec {
        loop {
            let theta = rng.gen_range(PI / 3.0..2.0 * PI / 3.0);
            let tau_abs = if rng.gen_bool(0.4) {
                1.0
            } else {
                rng.gen_range(1.0..2.0)
            };
            if tau_abs == 1.0 && theta > PI / 2.0 {
                continue;
            }
            if (tau_abs * theta.cos()).abs() > 0.5 {
                continue;
            }
            if let Ok(spec) = LatticeSpec::new(tau_abs, theta) {
                return spec;
            }
        }
    }

    #[test]
    fn minimal_dual_norm_is_one() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let spec = random_reduced_shape(&mut rng);
            let vs = spec.dual_vectors_within(2.5).unwrap();
            let min = vs.iter().map(|w| w.norm).fold(f64::INFINITY, f64::min);
            assert_close(min, 1.0, 1e-12);

            let class = spec.classify();
            let count = vs.iter().filter(|w| (w.norm - 1.0).abs() <= 1e-12).count();
            assert_eq!(count, class.kernel_dim(), "shape {:?}", spec);
        }
    }

    #[test]
    fn wave_vector_recomputes_from_dual_matrix() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let spec = random_reduced_shape(&mut rng);
            for wv in spec.dual_vectors_within(3.0).unwrap() {
                let d = spec.dual_matrix();
                let v0 = d[0][0] * wv.k[0] as f64 + d[0][1] * wv.k[1] as f64;
                let v1 = d[1][0] * wv.k[0] as f64 + d[1][1] * wv.k[1] as f64;
                assert_close(wv.v[0], v0, 1e-14);
                assert_close(wv.v[1], v1, 1e-14);
            }
        }
    }

    #[test]
    fn second_norm_matches_gamma_on_reduced_shapes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let spec = random_reduced_shape(&mut rng);
            let class = spec.classify();
            let vs = spec.dual_vectors_within(2.2 * class.gamma).unwrap();
            let second = vs
                .iter()
                .map(|w| w.norm)
                .find(|&n| n > 1.0 + 1e-9)
                .expect("second shell present");
            assert_close(second, class.gamma, 1e-9);
        }
    }
}
