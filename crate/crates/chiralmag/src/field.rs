//! Magnetization fields on the collocation grid and their spectral form.
//!
//! Grid convention: lattice coordinates `y = (i/N, j/N)` with physical points
//! `x = 2*pi*A*y`, so the mode `e^{i v.x}` with `v = A^{-T} k` samples to the
//! plain 2D DFT mode `e^{2*pi*i*(k1*i + k2*j)/N}` and all metric information
//! lives in `v(k)`. Grid sizes are odd so the spectrum pairs symmetrically
//! without an unpaired Nyquist mode.

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::lattice::LatticeSpec;
use num_complex::Complex64;

/// Dimensionless coefficients of the energy density:
/// `e(m) = |grad m|^2/2 + kappa m.curl(m) + lambda |m|^2/2 + alpha |m|^4/4 + beta m3^2/2`.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    /// DMI strength, kappa > 0.
    pub kappa: f64,
    /// Quadratic Landau coefficient, any sign.
    pub lambda: f64,
    /// Quartic Landau coefficient, alpha > 0.
    pub alpha: f64,
    /// Easy-plane anisotropy, beta >= 0.
    pub beta: f64,
}

impl ModelParams {
    pub fn new(kappa: f64, lambda: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta >= 0.0) {
            return Err(Error::Domain(format!("beta must be non-negative, got {beta}")));
        }
        if !lambda.is_finite() {
            return Err(Error::Domain("lambda must be finite".into()));
        }
        Ok(Self {
            kappa,
            lambda,
            alpha,
            beta,
        })
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }
}

/// Material parameters before nondimensionalization.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalParams {
    /// Exchange constant A > 0.
    pub exchange: f64,
    /// DMI constant D.
    pub dmi: f64,
    /// Landau coefficient a > 0.
    pub landau_a: f64,
    /// Landau coefficient b > 0.
    pub landau_b: f64,
    /// Easy-plane anisotropy K >= 0.
    pub anisotropy: f64,
    /// Deviation from the Curie temperature, T - T_C.
    pub temperature_offset: f64,
    /// Length scale r > 0 of the lattice.
    pub length_scale: f64,
}

/// Maps material parameters to the dimensionless coefficients:
/// `kappa = D r / (2 A)`, `lambda = a (T - T_C) r^2 / A`,
/// `alpha = 2 b r^2 / A`, `beta = K r^2 / A`.
pub fn nondimensionalize(phys: &PhysicalParams) -> Result<ModelParams> {
    if !(phys.exchange > 0.0) || !(phys.length_scale > 0.0) {
        return Err(Error::Domain(
            "exchange constant and length scale must be positive".into(),
        ));
    }
    if !(phys.landau_a > 0.0) || !(phys.landau_b > 0.0) {
        return Err(Error::Domain("landau coefficients must be positive".into()));
    }
    if !(phys.anisotropy >= 0.0) {
        return Err(Error::Domain("anisotropy must be non-negative".into()));
    }
    let r2 = phys.length_scale * phys.length_scale;
    ModelParams::new(
        phys.dmi * phys.length_scale / (2.0 * phys.exchange),
        phys.landau_a * phys.temperature_offset * r2 / phys.exchange,
        2.0 * phys.landau_b * r2 / phys.exchange,
        phys.anisotropy * r2 / phys.exchange,
    )
}

fn check_odd(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::EvenGridSize(n));
    }
    Ok(())
}

/// Magnetization samples `m(x_ij)` on the N x N collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    n: usize,
    data: Vec<[f64; 3]>,
}

impl RealField {
    pub fn zeros(n: usize) -> Result<Self> {
        check_odd(n)?;
        Ok(Self {
            n,
            data: vec![[0.0; 3]; n * n],
        })
    }

    /// Samples `f(x_ij)` on the grid of `spec`.
    pub fn from_fn(
        n: usize,
        spec: &LatticeSpec,
        mut f: impl FnMut([f64; 2]) -> [f64; 3],
    ) -> Result<Self> {
        check_odd(n)?;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(spec.grid_point(i, j, n)));
            }
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> [f64; 3] {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, m: [f64; 3]) {
        self.data[i * self.n + j] = m;
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [[f64; 3]] {
        &mut self.data
    }

    /// Plain grid average of a pointwise function of the samples. Exact for
    /// trigonometric polynomials below the aliasing limit.
    pub fn average_of(&self, f: impl Fn([f64; 3]) -> f64) -> f64 {
        let sum: f64 = self.data.iter().map(|&m| f(m)).sum();
        sum / (self.n * self.n) as f64
    }

    /// `<|m|^2>`, the mean squared modulus.
    pub fn mean_square(&self) -> f64 {
        self.average_of(|m| m[0] * m[0] + m[1] * m[1] + m[2] * m[2])
    }

    /// Sup norm; NaN entries propagate instead of being dropped so a
    /// diverged iterate can never look converged.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().flat_map(|m| m.iter()).fold(0.0, |acc, &x| {
            let a = x.abs();
            if a > acc || a.is_nan() {
                a
            } else {
                acc
            }
        })
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .flat_map(|(a, b)| a.iter().zip(b.iter()))
            .fold(0.0, |acc, (&x, &y)| {
                let d = (x - y).abs();
                if d > acc || d.is_nan() {
                    d
                } else {
                    acc
                }
            })
    }

    /// Discrete L2 norm `sqrt(<m, m>_N)` with the grid-average scalar product.
    pub fn l2_norm(&self) -> f64 {
        self.mean_square().sqrt()
    }

    /// Discrete scalar product `<u, w>_N`, the grid average of `u . w`.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        let sum: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
            .sum();
        sum / (self.n * self.n) as f64
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|m| [s * m[0], s * m[1], s * m[2]]).collect(),
        }
    }

    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]])
                .collect(),
        }
    }
}

/// Discrete Fourier coefficients `m~(k)`, `k` in the symmetric index range
/// `{-(N-1)/2, ..., (N-1)/2}^2`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    n: usize,
    coeffs: Vec<[Complex64; 3]>,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Result<Self> {
        check_odd(n)?;
        Ok(Self {
            n,
            coeffs: vec![[Complex64::default(); 3]; n * n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Signed mode index for a storage index.
    #[inline]
    pub fn wrap(&self, p: usize) -> i64 {
        let half = (self.n / 2) as i64;
        let p = p as i64;
        if p <= half {
            p
        } else {
            p - self.n as i64
        }
    }

    /// Storage position of the signed mode index `k` (any integers; reduced
    /// modulo N).
    #[inline]
    pub fn pos(&self, k: [i64; 2]) -> usize {
        let n = self.n as i64;
        let p = k[0].rem_euclid(n) as usize;
        let q = k[1].rem_euclid(n) as usize;
        p * self.n + q
    }

    pub fn coeff(&self, k: [i64; 2]) -> [Complex64; 3] {
        self.coeffs[self.pos(k)]
    }

    pub fn coeff_mut(&mut self, k: [i64; 2]) -> &mut [Complex64; 3] {
        let idx = self.pos(k);
        &mut self.coeffs[idx]
    }

    /// Iterates `(k, coeff)` over all modes.
    pub fn modes(&self) -> impl Iterator<Item = ([i64; 2], &[Complex64; 3])> + '_ {
        self.coeffs.iter().enumerate().map(move |(idx, c)| {
            let p = idx / self.n;
            let q = idx % self.n;
            ([self.wrap(p), self.wrap(q)], c)
        })
    }

    /// Total spectral power `sum_k |m~(k)|^2` (equals `<|m|^2>` by Parseval).
    pub fn total_power(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr())
            .sum()
    }

    /// Spectral power excluding the DC mode.
    pub fn non_dc_power(&self) -> f64 {
        let dc = self.coeffs[0];
        self.total_power() - (dc[0].norm_sqr() + dc[1].norm_sqr() + dc[2].norm_sqr())
    }
}

/// Forward transform: grid samples to Fourier coefficients.
pub fn to_spectral(f: &RealField) -> SpectralField {
    let n = f.n;
    let fft = Fft2::new(n);
    let mut out = SpectralField {
        n,
        coeffs: vec![[Complex64::default(); 3]; n * n],
    };
    let mut buf = vec![Complex64::default(); n * n];
    let scale = 1.0 / (n * n) as f64;
    for c in 0..3 {
        for (b, m) in buf.iter_mut().zip(&f.data) {
            *b = Complex64::new(m[c], 0.0);
        }
        fft.forward(&mut buf);
        for (o, b) in out.coeffs.iter_mut().zip(&buf) {
            o[c] = b * scale;
        }
    }
    out
}

/// Inverse transform: Fourier coefficients to grid samples. The imaginary
/// part of the synthesis is discarded; it vanishes for conjugate-symmetric
/// input.
pub fn to_real(g: &SpectralField) -> RealField {
    let n = g.n;
    let fft = Fft2::new(n);
    let mut out = RealField {
        n,
        data: vec![[0.0; 3]; n * n],
    };
    let mut buf = vec![Complex64::default(); n * n];
    for c in 0..3 {
        for (b, m) in buf.iter_mut().zip(&g.coeffs) {
            *b = m[c];
        }
        fft.inverse(&mut buf);
        for (o, b) in out.data.iter_mut().zip(&buf) {
            o[c] = b.re;
        }
    }
    out
}

/// Per-mode map shared by the spectral operators.
fn map_modes(
    g: &SpectralField,
    spec: &LatticeSpec,
    f: impl Fn([f64; 2], f64, [Complex64; 3]) -> [Complex64; 3],
) -> SpectralField {
    let n = g.n;
    let dual = spec.dual_matrix();
    let mut out = SpectralField {
        n,
        coeffs: vec![[Complex64::default(); 3]; n * n],
    };
    for (idx, c) in g.coeffs.iter().enumerate() {
        let k1 = g.wrap(idx / n) as f64;
        let k2 = g.wrap(idx % n) as f64;
        let v = [
            dual[0][0] * k1 + dual[0][1] * k2,
            dual[1][0] * k1 + dual[1][1] * k2,
        ];
        let t = v[0] * v[0] + v[1] * v[1];
        out.coeffs[idx] = f(v, t, *c);
    }
    out
}

/// Planar curl, per mode `(i v2 c, -i v1 c, i (v1 b - v2 a))`.
pub fn curl2d(g: &SpectralField, spec: &LatticeSpec) -> SpectralField {
    let i = Complex64::i();
    map_modes(g, spec, |v, _, [a, b, c]| {
        [i * v[1] * c, -i * v[0] * c, i * (v[0] * b - v[1] * a)]
    })
}

/// Partial derivative along the given cartesian axis (0 or 1), per mode
/// `i v_axis`.
pub fn derivative(g: &SpectralField, spec: &LatticeSpec, axis: usize) -> SpectralField {
    assert!(axis < 2);
    let i = Complex64::i();
    map_modes(g, spec, |v, _, [a, b, c]| {
        [i * v[axis] * a, i * v[axis] * b, i * v[axis] * c]
    })
}

/// Linear operator `L m = -lap m + 2 kappa curl m + lambda m + beta m3 e3`,
/// applied per mode through the hermitian 3x3 block
/// `[[t+lambda, 0, 2 kappa i v2], [0, t+lambda, -2 kappa i v1],
///   [-2 kappa i v2, 2 kappa i v1, t+lambda+beta]]` with `t = |v|^2`.
pub fn apply_linear(g: &SpectralField, p: &ModelParams, spec: &LatticeSpec) -> SpectralField {
    let i = Complex64::i();
    let (kappa, lambda, beta) = (p.kappa, p.lambda, p.beta);
    map_modes(g, spec, |v, t, [a, b, c]| {
        let d = t + lambda;
        [
            d * a + 2.0 * kappa * i * v[1] * c,
            d * b - 2.0 * kappa * i * v[0] * c,
            -2.0 * kappa * i * v[1] * a + 2.0 * kappa * i * v[0] * b + (d + beta) * c,
        ]
    })
}

/// Euler-Lagrange residual `F(m, lambda) = L m + alpha |m|^2 m`, with the
/// derivative terms evaluated spectrally and the cubic term pointwise.
pub fn el_residual(f: &RealField, p: &ModelParams, spec: &LatticeSpec) -> RealField {
    let lm = to_real(&apply_linear(&to_spectral(f), p, spec));
    let mut out = lm;
    for (o, m) in out.data.iter_mut().zip(&f.data) {
        let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
        o[0] += p.alpha * m2 * m[0];
        o[1] += p.alpha * m2 * m[1];
        o[2] += p.alpha * m2 * m[2];
    }
    out
}

/// Discrete energy `E_N(m) = <m, L m>_N / 2 + <1, W(m)>_N` with
/// `W(m) = alpha |m|^4 / 4` and the grid-average scalar product.
pub fn energy(f: &RealField, p: &ModelParams, spec: &LatticeSpec) -> f64 {
    let lm = to_real(&apply_linear(&to_spectral(f), p, spec));
    let quad = 0.5 * f.inner(&lm);
    let quart = f.average_of(|m| {
        let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
        0.25 * p.alpha * m2 * m2
    });
    quad + quart
}

/// Tolerance for the helix periodicity check.
const HELIX_TOL: f64 = 1e-9;

/// Samples the helix `m(x) = M (0, cos(kappa x1), sin(kappa x1))` with
/// `M = sqrt((kappa^2 - lambda)/alpha)`.
///
/// The helix is Lambda-periodic iff `kappa/Im(tau)` and
/// `kappa Re(tau)/Im(tau)` are integers; its wave vector is then the dual
/// vector with index `(kappa/Im(tau), kappa Re(tau)/Im(tau))`.
pub fn helix_field(p: &ModelParams, spec: &LatticeSpec, n: usize) -> Result<RealField> {
    check_odd(n)?;
    let msq = (p.kappa * p.kappa - p.lambda) / p.alpha;
    if msq < 0.0 {
        return Err(Error::Domain(format!(
            "helix requires lambda < kappa^2, got lambda = {}, kappa^2 = {}",
            p.lambda,
            p.kappa * p.kappa
        )));
    }
    if msq == 0.0 || msq.sqrt() < 1e-15 {
        return Err(Error::ZeroAmplitude);
    }
    let amplitude = msq.sqrt();
    let q1 = p.kappa / spec.im_tau();
    let q2 = p.kappa * spec.re_tau() / spec.im_tau();
    if (q1 - q1.round()).abs() > HELIX_TOL || (q2 - q2.round()).abs() > HELIX_TOL {
        return Err(Error::IncompatibleLattice { kappa: p.kappa });
    }
    let (q1, q2) = (q1.round() as i64, q2.round() as i64);
    let mut out = RealField::zeros(n)?;
    let ni = n as i64;
    for i in 0..n {
        for j in 0..n {
            // kappa * x1 = 2*pi*(q1*i + q2*j)/n exactly
            let phase_idx = (q1 * i as i64 + q2 * j as i64).rem_euclid(ni);
            let phase = 2.0 * std::f64::consts::PI * phase_idx as f64 / n as f64;
            out.data[i * n + j] = [0.0, amplitude * phase.cos(), amplitude * phase.sin()];
        }
    }
    Ok(out)
}
