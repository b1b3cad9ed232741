//! Semi-implicit gradient flow for the chiral-magnet energy: modified
//! Crank-Nicolson time stepping with Fourier collocation in space, a
//! fixed-point inner iteration, the exact discrete energy law and
//! terminal-pattern classification.

use crate::error::{Error, Result};
use crate::field::{energy, to_real, to_spectral, ModelParams, RealField, SpectralField};
use crate::lattice::{LatticeSpec, WaveVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Solver configuration. Defaults follow the reference experiment setup:
/// a 275 x 275 grid, time increment 0.1, inner stopping tolerance 1e-8 and
/// energy-slope termination tolerance 1e-7.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub n: usize,
    pub dt: f64,
    /// Sup-norm tolerance on successive fixed-point iterates.
    pub fp_tol: f64,
    /// Termination tolerance on the discrete energy slope.
    pub grad_tol: f64,
    pub max_steps: usize,
    pub fp_max_iters: usize,
    pub seed: u64,
    /// Largest modulus of the random initial field.
    pub init_modulus_max: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 275,
            dt: 0.1,
            fp_tol: 1e-8,
            grad_tol: 1e-7,
            max_steps: 20_000,
            fp_max_iters: 200,
            seed: 0,
            init_modulus_max: 0.1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 == 0 {
            return Err(Error::EvenGridSize(self.n));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Domain("time step must be positive".into()));
        }
        if !(self.fp_tol > 0.0) || !(self.grad_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if self.fp_max_iters == 0 || self.max_steps == 0 {
            return Err(Error::Domain("iteration caps must be positive".into()));
        }
        if !(self.init_modulus_max >= 0.0) {
            return Err(Error::Domain("init modulus must be non-negative".into()));
        }
        Ok(())
    }
}

/// Random initial field: per grid point a direction uniform on the unit
/// sphere and a modulus uniform on `[0, init_modulus_max]`. Deterministic
/// for a fixed seed.
pub fn random_init(cfg: &SolverConfig) -> Result<RealField> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut f = RealField::zeros(cfg.n)?;
    for m in f.values_mut() {
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r: f64 = rng.gen_range(0.0..=cfg.init_modulus_max);
        let horiz = (1.0 - z * z).max(0.0).sqrt();
        *m = [r * horiz * phi.cos(), r * horiz * phi.sin(), r * z];
    }
    Ok(f)
}

type Mat3 = [[Complex64; 3]; 3];

fn mat3_vec(m: &Mat3, v: [Complex64; 3]) -> [Complex64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn mat3_inv(m: &Mat3) -> Mat3 {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    let inv = Complex64::new(1.0, 0.0) / det;
    [
        [
            c00 * inv,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv,
        ],
        [
            c01 * inv,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv,
        ],
        [
            c02 * inv,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv,
        ],
    ]
}

/// One time step of the scheme
/// `(m+ - m)/dt + L (m+ + m)/2 = N(m, m+)` with
/// `N(u, w) = -alpha (u + w)/4 (|u|^2 + |w|^2)`.
///
/// The resolvent `(I + dt/2 L)^{-1}` is block-diagonal in spectral space;
/// the per-mode 3x3 inverses are computed once per `(params, lattice,
/// config)` and cached here, safe for concurrent reads.
pub struct Stepper {
    n: usize,
    dt: f64,
    alpha: f64,
    fp_tol: f64,
    fp_max_iters: usize,
    /// `I - dt/2 M(v(k))` per mode, storage order.
    explicit_half: Vec<Mat3>,
    /// `(I + dt/2 M(v(k)))^{-1}` per mode, storage order.
    resolvent: Vec<Mat3>,
}

impl Stepper {
    pub fn new(p: &ModelParams, spec: &LatticeSpec, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n;
        let dual = spec.dual_matrix();
        let half = (n / 2) as i64;
        let wrap = |p: usize| -> f64 {
            let p = p as i64;
            (if p <= half { p } else { p - n as i64 }) as f64
        };
        let zero = Complex64::default();
        let one = Complex64::new(1.0, 0.0);
        let mut explicit_half = Vec::with_capacity(n * n);
        let mut resolvent = Vec::with_capacity(n * n);
        for idx in 0..n * n {
            let k1 = wrap(idx / n);
            let k2 = wrap(idx % n);
            let v = [
                dual[0][0] * k1 + dual[0][1] * k2,
                dual[1][0] * k1 + dual[1][1] * k2,
            ];
            let t = v[0] * v[0] + v[1] * v[1];
            let d = Complex64::new(t + p.lambda, 0.0);
            let g1 = Complex64::new(0.0, 2.0 * p.kappa * v[1]);
            let g2 = Complex64::new(0.0, 2.0 * p.kappa * v[0]);
            let block: Mat3 = [
                [d, zero, g1],
                [zero, d, -g2],
                [-g1, g2, d + p.beta],
            ];
            let mut plus = [[zero; 3]; 3];
            let mut minus = [[zero; 3]; 3];
            for r in 0..3 {
                for c in 0..3 {
                    let id = if r == c { one } else { zero };
                    plus[r][c] = id + block[r][c] * (cfg.dt / 2.0);
                    minus[r][c] = id - block[r][c] * (cfg.dt / 2.0);
                }
            }
            explicit_half.push(minus);
            resolvent.push(mat3_inv(&plus));
        }
        Ok(Self {
            n,
            dt: cfg.dt,
            alpha: p.alpha,
            fp_tol: cfg.fp_tol,
            fp_max_iters: cfg.fp_max_iters,
            explicit_half,
            resolvent,
        })
    }

    /// Applies the cached resolvent `(I + dt/2 L)^{-1}` in spectral space.
    pub fn solve_implicit(&self, g: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros(self.n).expect("stepper n is odd");
        for (idx, m) in self.resolvent.iter().enumerate() {
            let k = [g.wrap(idx / self.n), g.wrap(idx % self.n)];
            *out.coeff_mut(k) = mat3_vec(m, g.coeff(k));
        }
        out
    }

    /// Advances one time step; returns the new field and the number of inner
    /// fixed-point iterations used.
    pub fn step(&self, m: &RealField) -> Result<(RealField, usize)> {
        if m.n() != self.n {
            return Err(Error::SizeMismatch(m.n(), self.n));
        }
        let m_hat = to_spectral(m);
        // rhs_lin = (I - dt/2 L) m^n
        let mut rhs_lin = SpectralField::zeros(self.n)?;
        for idx in 0..self.n * self.n {
            let k = [m_hat.wrap(idx / self.n), m_hat.wrap(idx % self.n)];
            *rhs_lin.coeff_mut(k) = mat3_vec(&self.explicit_half[idx], m_hat.coeff(k));
        }

        let mut w = m.clone();
        let mut nl = RealField::zeros(self.n)?;
        for iter in 1..=self.fp_max_iters {
            for ((out, wk), mk) in nl.values_mut().iter_mut().zip(w.values()).zip(m.values()) {
                let wu2 = wk[0] * wk[0] + wk[1] * wk[1] + wk[2] * wk[2];
                let mu2 = mk[0] * mk[0] + mk[1] * mk[1] + mk[2] * mk[2];
                let fac = -self.alpha / 4.0 * (wu2 + mu2);
                out[0] = fac * (wk[0] + mk[0]);
                out[1] = fac * (wk[1] + mk[1]);
                out[2] = fac * (wk[2] + mk[2]);
            }
            let n_hat = to_spectral(&nl);
            let mut next_hat = SpectralField::zeros(self.n)?;
            for idx in 0..self.n * self.n {
                let k = [n_hat.wrap(idx / self.n), n_hat.wrap(idx % self.n)];
                let r = rhs_lin.coeff(k);
                let nv = n_hat.coeff(k);
                let rhs = [
                    r[0] + nv[0] * self.dt,
                    r[1] + nv[1] * self.dt,
                    r[2] + nv[2] * self.dt,
                ];
                *next_hat.coeff_mut(k) = mat3_vec(&self.resolvent[idx], rhs);
            }
            let w_next = to_real(&next_hat);
            let diff = w_next.sup_distance(&w);
            w = w_next;
            if !diff.is_finite() {
                break;
            }
            if diff < self.fp_tol {
                return Ok((w, iter));
            }
        }
        Err(Error::FixedPointFailure {
            max_iters: self.fp_max_iters,
        })
    }
}

/// Why the flow stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    EnergySlope,
    MaxSteps,
    FixedPointFailure,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Termination::EnergySlope => "energy-slope",
            Termination::MaxSteps => "max-steps",
            Termination::FixedPointFailure => "fixed-point-failure",
        };
        f.write_str(s)
    }
}

/// Terminal-pattern classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Homogeneous,
    Helical,
    VortexAntivortex,
    Skyrmion,
    Stripe,
    Unclassified,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pattern::Homogeneous => "homogeneous",
            Pattern::Helical => "helical",
            Pattern::VortexAntivortex => "vortex-antivortex",
            Pattern::Skyrmion => "skyrmion",
            Pattern::Stripe => "stripe",
            Pattern::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// One row of the energy trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceEntry {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    pub fp_iters: usize,
}

/// Result of a gradient-flow run.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub final_field: RealField,
    pub energy_trace: Vec<TraceEntry>,
    pub steps_taken: usize,
    pub termination: Termination,
    pub classification: Pattern,
    pub dominant_modes: Vec<(WaveVector, f64)>,
}

/// Classification tunables: half-width of the critical shell, relative
/// amplitude for a pair to count as dominant, and the relative non-DC power
/// below which a field counts as homogeneous.
const BAND_LO: f64 = 0.9;
const BAND_HI: f64 = 1.1;
const REL_AMPLITUDE: f64 = 0.2;
const HOMOGENEOUS_REL_POWER: f64 = 1e-6;

/// Classifies a field by where its spectral power sits: on the critical
/// circle (1-3 dominant mode pairs give helical, vortex-antivortex and
/// skyrmion patterns), in higher shells (stripes), or nowhere (homogeneous).
pub fn classify_pattern(f: &RealField, spec: &LatticeSpec) -> (Pattern, Vec<(WaveVector, f64)>) {
    let g = to_spectral(f);
    let total = g.total_power();
    let non_dc = g.non_dc_power();
    if total <= 1e-30 || non_dc < HOMOGENEOUS_REL_POWER * total {
        return (Pattern::Homogeneous, Vec::new());
    }

    // One representative per +/- pair (k lexicographically positive).
    let mut band_pairs: Vec<(WaveVector, f64)> = Vec::new();
    let mut outer_pairs: Vec<(WaveVector, f64)> = Vec::new();
    let mut band_power = 0.0;
    let mut outer_power = 0.0;
    for (k, c) in g.modes() {
        if k == [0, 0] {
            continue;
        }
        let wv = spec.wave_vector(k);
        let power = c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr();
        let in_band = (BAND_LO..=BAND_HI).contains(&wv.norm);
        if in_band {
            band_power += power;
        } else {
            outer_power += power;
        }
        if k[0] > 0 || (k[0] == 0 && k[1] > 0) {
            let amplitude = c[0].norm() + c[1].norm() + c[2].norm();
            if in_band {
                band_pairs.push((wv, amplitude));
            } else {
                outer_pairs.push((wv, amplitude));
            }
        }
    }
    let by_amplitude = |a: &(WaveVector, f64), b: &(WaveVector, f64)| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then(a.0.k[0].cmp(&b.0.k[0]))
            .then(a.0.k[1].cmp(&b.0.k[1]))
    };
    band_pairs.sort_by(by_amplitude);
    outer_pairs.sort_by(by_amplitude);

    if outer_power > band_power {
        let max = outer_pairs.first().map(|p| p.1).unwrap_or(0.0);
        outer_pairs.retain(|p| p.1 >= REL_AMPLITUDE * max);
        outer_pairs.truncate(12);
        return (Pattern::Stripe, outer_pairs);
    }

    let max = band_pairs.first().map(|p| p.1).unwrap_or(0.0);
    band_pairs.retain(|p| p.1 >= REL_AMPLITUDE * max);
    band_pairs.truncate(12);
    let pattern = match band_pairs.len() {
        1 => Pattern::Helical,
        2 => Pattern::VortexAntivortex,
        3 => Pattern::Skyrmion,
        _ => Pattern::Unclassified,
    };
    (pattern, band_pairs)
}

/// Convenience step with a freshly built resolvent cache.
pub fn step(
    m: &RealField,
    p: &ModelParams,
    spec: &LatticeSpec,
    cfg: &SolverConfig,
) -> Result<(RealField, usize)> {
    Stepper::new(p, spec, cfg)?.step(m)
}

/// Runs the flow from `init` (or a seeded random field) until the energy
/// slope `(E_n - E_{n+1})/dt` drops below `grad_tol`, the step cap is hit,
/// or the inner iteration fails. A fixed-point failure is reported through
/// [`FlowResult::termination`] with the partial trace attached.
pub fn run(
    p: &ModelParams,
    spec: &LatticeSpec,
    cfg: &SolverConfig,
    init: Option<RealField>,
) -> Result<FlowResult> {
    cfg.validate()?;
    let stepper = Stepper::new(p, spec, cfg)?;
    let mut m = match init {
        Some(f) => {
            if f.n() != cfg.n {
                return Err(Error::SizeMismatch(f.n(), cfg.n));
            }
            f
        }
        None => random_init(cfg)?,
    };
    let mut e = energy(&m, p, spec);
    let mut trace = vec![TraceEntry {
        step: 0,
        time: 0.0,
        energy: e,
        fp_iters: 0,
    }];
    let mut termination = Termination::MaxSteps;
    let mut steps_taken = 0;
    for step in 1..=cfg.max_steps {
        match stepper.step(&m) {
            Ok((next, iters)) => {
                let e_next = energy(&next, p, spec);
                trace.push(TraceEntry {
                    step,
                    time: step as f64 * cfg.dt,
                    energy: e_next,
                    fp_iters: iters,
                });
                let slope = (e - e_next) / cfg.dt;
                m = next;
                e = e_next;
                steps_taken = step;
                if slope < cfg.grad_tol {
                    termination = Termination::EnergySlope;
                    break;
                }
            }
            Err(Error::FixedPointFailure { .. }) => {
                termination = Termination::FixedPointFailure;
                steps_taken = step - 1;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let (classification, dominant_modes) = classify_pattern(&m, spec);
    Ok(FlowResult {
        final_field: m,
        energy_trace: trace,
        steps_taken,
        termination,
        classification,
        dominant_modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{apply_linear, helix_field};
    use crate::linear::{bifurcation_point, build_mode, RootSign, Symmetry};

    fn small_cfg(n: usize) -> SolverConfig {
        SolverConfig {
            n,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn zero_field_is_a_fixed_point() {
        let spec = LatticeSpec::square();
        let p = ModelParams::new(1.0, 0.3, 1.0, 0.5).unwrap();
        let cfg = small_cfg(27);
        let zero = RealField::zeros(27).unwrap();
        let (next, iters) = step(&zero, &p, &spec, &cfg).unwrap();
        assert_eq!(iters, 1);
        assert!(next.sup_norm() < 1e-15);
    }

    #[test]
    fn exact_helix_is_stationary() {
        let spec = LatticeSpec::square();
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let cfg = small_cfg(81);
        let helix = helix_field(&p, &spec, 81).unwrap();
        let (next, _) = step(&helix, &p, &spec, &cfg).unwrap();
        assert!(
            next.sup_distance(&helix) < 10.0 * cfg.fp_tol,
            "helix drifted by {}",
            next.sup_distance(&helix)
        );
    }

    #[test]
    fn energy_law_holds_per_step() {
        let spec = LatticeSpec::square();
        let p = ModelParams::new(1.4, 0.2412, 1.0, 5.0).unwrap();
        let cfg = SolverConfig {
            n: 81,
            seed: 7,
            ..SolverConfig::default()
        };
        let stepper = Stepper::new(&p, &spec, &cfg).unwrap();
        let mut m = random_init(&cfg).unwrap();
        let mut e = energy(&m, &p, &spec);
        for _ in 0..20 {
            let (next, _) = stepper.step(&m).unwrap();
            let e_next = energy(&next, &p, &spec);
            let diff = next.add_scaled(&m, -1.0);
            let law = diff.mean_square() / cfg.dt + e_next - e;
            assert!(law.abs() < 1e-9, "energy law residual {law}");
            assert!(e_next <= e + 1e-10, "energy increased");
            m = next;
            e = e_next;
        }
    }

    #[test]
    fn resolvent_inverts_the_implicit_operator() {
        let spec = LatticeSpec::new(1.0, 1.2).unwrap();
        let p = ModelParams::new(0.9, -0.4, 1.0, 2.0).unwrap();
        let cfg = small_cfg(27);
        let stepper = Stepper::new(&p, &spec, &cfg).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = crate::field::tests::random_field(27, &mut rng);
        let g_hat = to_spectral(&g);
        let x = stepper.solve_implicit(&g_hat);
        // (I + dt/2 L) x should reproduce g
        let lx = apply_linear(&x, &p, &spec);
        let mut back = RealField::zeros(27).unwrap();
        let xr = to_real(&x);
        let lxr = to_real(&lx);
        for ((o, a), b) in back.values_mut().iter_mut().zip(xr.values()).zip(lxr.values()) {
            for c in 0..3 {
                o[c] = a[c] + cfg.dt / 2.0 * b[c];
            }
        }
        assert!(back.sup_distance(&g) < 1e-12);
    }

    #[test]
    fn random_init_respects_modulus_and_seed() {
        let cfg = SolverConfig {
            n: 81,
            seed: 5,
            ..SolverConfig::default()
        };
        let a = random_init(&cfg).unwrap();
        let b = random_init(&cfg).unwrap();
        assert_eq!(a, b);
        let max_modulus = a
            .values()
            .iter()
            .map(|m| (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt())
            .fold(0.0, f64::max);
        assert!(max_modulus <= 0.1 + 1e-15);

        let other = random_init(&SolverConfig { seed: 6, ..cfg }).unwrap();
        assert!(a.sup_distance(&other) > 1e-3);
    }

    #[test]
    fn random_init_component_means_are_centered() {
        // Var(m_c) = E[r^2]/3 = (max^2/3)/3; 4 sigma of the mean over N^2 points.
        let cfg = SolverConfig::default(); // n = 275
        let f = random_init(&cfg).unwrap();
        let nn = (cfg.n * cfg.n) as f64;
        let sigma = (cfg.init_modulus_max * cfg.init_modulus_max / 9.0 / nn).sqrt();
        for c in 0..3 {
            let mean = f.values().iter().map(|m| m[c]).sum::<f64>() / nn;
            assert!(
                mean.abs() < 4.0 * sigma,
                "component {c} mean {mean} vs 4 sigma {}",
                4.0 * sigma
            );
        }
    }

    #[test]
    fn oversized_time_step_fails_the_inner_iteration() {
        let spec = LatticeSpec::square();
        let p = ModelParams::new(1.0, -2.0, 1.0, 0.0).unwrap();
        let cfg = SolverConfig {
            n: 27,
            dt: 3.0,
            fp_max_iters: 40,
            seed: 1,
            ..SolverConfig::default()
        };
        let init = random_init(&cfg).unwrap().scaled(30.0);
        let stepper = Stepper::new(&p, &spec, &cfg).unwrap();
        assert!(matches!(
            stepper.step(&init),
            Err(Error::FixedPointFailure { .. })
        ));
    }

    #[test]
    fn classify_kernel_modes() {
        let sq = LatticeSpec::square();
        let hex = LatticeSpec::hexagonal();
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let bp = bifurcation_point(&p, RootSign::Plus);

        let helical = build_mode(&bp, &sq, Symmetry::Sigma1Helical, 27).unwrap();
        let (pat, modes) = classify_pattern(&helical.field.scaled(0.2), &sq);
        assert_eq!(pat, Pattern::Helical);
        assert_eq!(modes.len(), 1);

        let vortex = build_mode(&bp, &sq, Symmetry::Sigma2Vortex, 27).unwrap();
        let (pat, modes) = classify_pattern(&vortex.field.scaled(0.2), &sq);
        assert_eq!(pat, Pattern::VortexAntivortex);
        assert_eq!(modes.len(), 2);

        let sky = build_mode(&bp, &hex, Symmetry::Sigma3Skyrmion, 27).unwrap();
        let (pat, modes) = classify_pattern(&sky.field.scaled(0.2), &hex);
        assert_eq!(pat, Pattern::Skyrmion);
        assert_eq!(modes.len(), 3);
    }

    #[test]
    fn classify_homogeneous_and_stripe() {
        let sq = LatticeSpec::square();
        let zero = RealField::zeros(27).unwrap();
        assert_eq!(classify_pattern(&zero, &sq).0, Pattern::Homogeneous);

        let constant = RealField::from_fn(27, &sq, |_| [0.3, -0.1, 0.0]).unwrap();
        assert_eq!(classify_pattern(&constant, &sq).0, Pattern::Homogeneous);

        // helix of pitch 2*pi/2 < 2*pi: power sits outside the critical band
        let p = ModelParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
        let tight = helix_field(&p, &sq, 27).unwrap();
        let (pat, modes) = classify_pattern(&tight, &sq);
        assert_eq!(pat, Pattern::Stripe);
        assert_eq!(modes[0].0.k, [2, 0]);
    }

    #[test]
    fn decay_run_terminates_homogeneous() {
        let spec = LatticeSpec::square();
        // lambda0(0.8, 2) < 0: the zero state is stable on the circle and the
        // in-plane constant saturates.
        let p = ModelParams::new(0.8, -0.1257, 1.0, 2.0).unwrap();
        let cfg = SolverConfig {
            n: 27,
            seed: 2,
            max_steps: 4000,
            ..SolverConfig::default()
        };
        let result = run(&p, &spec, &cfg, None).unwrap();
        assert_eq!(result.termination, Termination::EnergySlope);
        assert_eq!(result.classification, Pattern::Homogeneous);
        for w in result.energy_trace.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-10);
        }
    }

    #[test]
    fn terminal_state_is_near_stationary() {
        let spec = LatticeSpec::square();
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let cfg = SolverConfig {
            n: 27,
            seed: 3,
            max_steps: 6000,
            ..SolverConfig::default()
        };
        let result = run(&p, &spec, &cfg, None).unwrap();
        assert_eq!(result.termination, Termination::EnergySlope);
        // slope ~ ||F||_N^2 at termination
        let res = crate::field::el_residual(&result.final_field, &p, &spec);
        assert!(
            res.l2_norm() <= 2.0 * cfg.grad_tol.sqrt(),
            "terminal residual {}",
            res.l2_norm()
        );
    }
}
