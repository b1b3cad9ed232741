//! Bifurcation-branch construction to the explicitly computable order:
//! the kernel mode, the coefficient `nu2`, the quartic energy expansion and
//! residual diagnostics.
//!
//! The branch is truncated at `m_s = s phi_1`, `lambda_s = lambda0 + s^2 nu2`
//! (the first- and third-order coefficients vanish; the cubic corrector has
//! no closed form and is quantified through [`residual_scaling`] instead).

use crate::error::{Error, Result};
use crate::field::{el_residual, ModelParams, RealField};
use crate::lattice::LatticeSpec;
use crate::linear::{BifurcationPoint, KernelMode};

/// Default validity radius for the branch parameter `s`.
pub const BRANCH_RADIUS: f64 = 0.5;

/// One state on the approximate bifurcation branch.
#[derive(Debug, Clone)]
pub struct BranchData {
    pub point: BifurcationPoint,
    pub mode: KernelMode,
    pub nu2: f64,
    pub s: f64,
    pub lambda_s: f64,
    pub m_s: RealField,
    /// Quartic energy `s^4 nu2 / 4` of the truncated branch.
    pub energy_quartic: f64,
}

/// Branch curvature `nu2 = -alpha <|phi_1|^4> / <|phi_1|^2>^2`, evaluated with
/// the discrete grid average (exact for these trigonometric polynomials).
pub fn compute_nu2(mode: &KernelMode, p: &ModelParams) -> f64 {
    let quartic = mode.field.average_of(|m| {
        let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
        m2 * m2
    });
    let quad = mode.field.mean_square();
    -p.alpha * quartic / (quad * quad)
}

/// Branch state at parameter `s` with the default validity radius.
pub fn branch_state(
    bp: &BifurcationPoint,
    mode: &KernelMode,
    nu2: f64,
    s: f64,
) -> Result<BranchData> {
    branch_state_with_radius(bp, mode, nu2, s, BRANCH_RADIUS)
}

pub fn branch_state_with_radius(
    bp: &BifurcationPoint,
    mode: &KernelMode,
    nu2: f64,
    s: f64,
    radius: f64,
) -> Result<BranchData> {
    if s.abs() > radius {
        return Err(Error::Domain(format!(
            "branch parameter |s| = {} exceeds the validity radius {radius}",
            s.abs()
        )));
    }
    Ok(BranchData {
        point: *bp,
        mode: mode.clone(),
        nu2,
        s,
        lambda_s: bp.lambda0 + s * s * nu2,
        m_s: mode.field.scaled(s),
        energy_quartic: s.powi(4) / 4.0 * nu2,
    })
}

/// Discrete L2 norms of the Euler-Lagrange residual along the truncated
/// branch; the sequence scales like `s^3` wherever the branch is not exact.
pub fn residual_scaling(
    bp: &BifurcationPoint,
    mode: &KernelMode,
    nu2: f64,
    p: &ModelParams,
    spec: &LatticeSpec,
    s_list: &[f64],
) -> Vec<(f64, f64)> {
    s_list
        .iter()
        .map(|&s| {
            let lambda_s = bp.lambda0 + s * s * nu2;
            let m_s = mode.field.scaled(s);
            let res = el_residual(&m_s, &p.with_lambda(lambda_s), spec);
            (s, res.l2_norm())
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
