//! Directional (ξ) tests: the ∨ operator, the ξ-envelope, contact jet
//! membership and the contact asymptotic mean value property (CAMVP).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::asymptotics::{extrapolate_values, sweep, MeanKind, RadiusSweep, VerifyConfig};
use crate::density::Density;
use crate::error::{Error, Result};
use crate::geometry::{default_fd_step, unit_roots, wirtinger_jet, ComplexField, Jet};
use crate::pdesystem::{cr_residual, SystemCoeff, F_MIN};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiDirection(Complex64);

impl XiDirection {
    pub fn new(xi: Complex64) -> Result<Self> {
        if !((xi.norm() - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "|xi| = {} is not 1",
                xi.norm()
            )));
        }
        Ok(Self(xi))
    }

    pub fn from_angle(theta: f64) -> Self {
        Self(Complex64::from_polar(1.0, theta))
    }

    /// `n` equally spaced directions starting at `ξ = 1`.
    pub fn uniform(n: usize) -> Vec<Self> {
        unit_roots(n.max(1)).into_iter().map(Self).collect()
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// A claimed first-order contact jet `(σ, τ)` of `f` at `base` in direction `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactProbe {
    pub base: Complex64,
    pub xi: XiDirection,
    pub sigma: Complex64,
    pub tau: Complex64,
}

/// `ξ ∨ η = ½[[2 Re ξ Re η, Im(ξη)], [Im(ξη), 2 Im ξ Im η]]`.
pub fn vee_matrix(xi: Complex64, eta: Complex64) -> [[f64; 2]; 2] {
    let off = 0.5 * (xi * eta).im;
    [[xi.re * eta.re, off], [off, xi.im * eta.im]]
}

fn largest_eigenvalue(m: [[f64; 2]; 2]) -> f64 {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half = 0.5 * (m[0][0] - m[1][1]);
    mean + half.hypot(m[0][1])
}

/// Closed-form ξ-envelope of the system at `(ω, σ, τ)`.
///
/// For `ω ≠ 0` this is `Re(ξ̄τ) + μ(|ω|)·Re[(ω/ω̄)·conj(ξσ)]`; at `ω = 0` the
/// phase is free and the envelope is `Re(ξ̄τ) + |μ(0⁺)|·|σ|` with
/// `μ(0⁺) = (Λ(0⁺)-1)/(Λ(0⁺)+1)`.
pub fn xi_envelope(
    omega: Complex64,
    sigma: Complex64,
    tau: Complex64,
    xi: XiDirection,
    sc: &SystemCoeff,
    lambda_zero: f64,
) -> f64 {
    let xi = xi.value();
    let head = (xi.conj() * tau).re;
    if omega == Complex64::new(0.0, 0.0) {
        let mu0 = (lambda_zero - 1.0) / (lambda_zero + 1.0);
        return head + mu0.abs() * sigma.norm();
    }
    let mu = sc.mu(omega.norm()).unwrap_or(f64::NAN);
    let ph = omega * omega / omega.norm_sqr();
    head + mu * (ph * (xi * sigma).conj()).re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    Member,
    Rejected,
    Inconclusive,
}

impl Membership {
    pub fn as_str(&self) -> &'static str {
        match self {
            Membership::Member => "member",
            Membership::Rejected => "rejected",
            Membership::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipConfig {
    pub radii_start: f64,
    pub radii_ratio: f64,
    pub radii_count: usize,
    pub samples_per_radius: usize,
    pub member_tol: f64,
    pub reject_tol: f64,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        Self {
            radii_start: 1e-2,
            radii_ratio: 0.5,
            radii_count: 8,
            samples_per_radius: 64,
            member_tol: 1e-4,
            reject_tol: 1e-3,
        }
    }
}

impl MembershipConfig {
    pub fn radii(&self) -> Vec<f64> {
        (0..self.radii_count)
            .map(|k| self.radii_start * self.radii_ratio.powi(k as i32))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipReport {
    pub membership: Membership,
    /// Extrapolated limit of `max_ζ λ_max(ξ ∨ R(ζ)) / s`.
    pub limit: f64,
}

/// Decides whether `(σ, τ)` is a first-order contact ξ-jet of `f` at the
/// probe base, from the remainder `R = f(ζ) - f(z) - σ(ζ-z) - τ·conj(ζ-z)`.
pub fn jet_membership<F: ComplexField + ?Sized>(
    f: &F,
    probe: &ContactProbe,
    radii: &[f64],
    samples_per_radius: usize,
    cfg: &MembershipConfig,
) -> Result<MembershipReport> {
    let z = probe.base;
    let xi = probe.xi.value();
    let fz = f.eval(z);
    let dirs = unit_roots(samples_per_radius.max(8));
    let ratios: Vec<Complex64> = radii
        .iter()
        .map(|&s| {
            let worst = dirs
                .iter()
                .map(|u| {
                    let d = u * s;
                    let rem = f.eval(z + d) - fz - probe.sigma * d - probe.tau * d.conj();
                    largest_eigenvalue(vee_matrix(xi, rem))
                })
                .fold(f64::NEG_INFINITY, f64::max);
            Complex64::new(worst / s, 0.0)
        })
        .collect();
    let est = extrapolate_values(radii, &ratios, &Default::default())?;
    let limit = est.limit.re;
    let membership = if limit <= cfg.member_tol {
        Membership::Member
    } else if limit >= cfg.reject_tol {
        Membership::Rejected
    } else {
        Membership::Inconclusive
    };
    Ok(MembershipReport { membership, limit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Camvp {
    Holds,
    Fails,
    Untestable,
}

impl Camvp {
    pub fn as_str(&self) -> &'static str {
        match self {
            Camvp::Holds => "holds",
            Camvp::Fails => "fails",
            Camvp::Untestable => "untestable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CamvpReport {
    pub verdict: Camvp,
    /// Extrapolated limit of `Re{ξ̄[μ^G(f_a, r) - f(z)]}/r`.
    pub limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactConfig {
    pub directions: usize,
    pub membership: MembershipConfig,
    /// The ratio limit may undershoot zero by at most this much.
    pub camvp_tol: f64,
    pub verify: VerifyConfig,
}

impl Default for ContactConfig {
    fn default() -> Self {
        Self {
            directions: 16,
            membership: MembershipConfig::default(),
            camvp_tol: 1e-4,
            verify: VerifyConfig::default(),
        }
    }
}

/// The sweep of `(μ^G(f_a, r) - f(z))/r` for the affine model of a probe.
/// It does not depend on `ξ`, so one sweep serves every direction.
pub fn camvp_sweep(
    omega: Complex64,
    sigma: Complex64,
    tau: Complex64,
    z: Complex64,
    d: &Density,
    cfg: &ContactConfig,
) -> Result<RadiusSweep> {
    let fa = Jet::new(omega, sigma, tau, z);
    sweep(MeanKind::MuGSlope, &fa, z, d, &cfg.verify.sweep)
}

/// CAMVP verdict in direction `ξ` from a precomputed [`camvp_sweep`].
pub fn camvp_from_sweep(
    s: &RadiusSweep,
    xi: XiDirection,
    cfg: &ContactConfig,
) -> Result<CamvpReport> {
    let projected = s.project(xi.value());
    let (radii, values) = projected.successful();
    let est = extrapolate_values(&radii, &values, &cfg.verify.tol)?;
    let limit = est.limit.re;
    Ok(CamvpReport {
        verdict: if limit >= -cfg.camvp_tol {
            Camvp::Holds
        } else {
            Camvp::Fails
        },
        limit,
    })
}

pub fn camvp_verdict<F: ComplexField + ?Sized>(
    f: &F,
    probe: &ContactProbe,
    d: &Density,
    cfg: &ContactConfig,
) -> Result<CamvpReport> {
    let fz = f.eval(probe.base);
    if !(fz.norm() >= F_MIN) {
        return Ok(CamvpReport {
            verdict: Camvp::Untestable,
            limit: f64::NAN,
        });
    }
    let s = camvp_sweep(fz, probe.sigma, probe.tau, probe.base, d, cfg)?;
    camvp_from_sweep(&s, probe.xi, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionOutcome {
    pub xi: XiDirection,
    pub membership: Membership,
    pub envelope: f64,
    pub camvp: CamvpReport,
}

impl DirectionOutcome {
    /// The CAMVP verdict and the sign of the envelope say the same thing.
    pub fn consistent(&self, tol: f64) -> bool {
        (self.camvp.verdict == Camvp::Holds) == (self.envelope >= -tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactPoint {
    pub point: Complex64,
    pub residual: Option<Complex64>,
    pub residual_pass: bool,
    pub camvp_pass: bool,
    pub directions: Vec<DirectionOutcome>,
    pub note: Option<String>,
}

impl ContactPoint {
    pub fn is_testable(&self) -> bool {
        self.note.is_none()
    }

    pub fn agree(&self) -> bool {
        self.residual_pass == self.camvp_pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactReport {
    pub points: Vec<ContactPoint>,
}

impl ContactReport {
    pub fn passes_camvp(&self) -> bool {
        self.points
            .iter()
            .filter(|p| p.is_testable())
            .all(|p| p.camvp_pass)
    }

    pub fn passes_residual(&self) -> bool {
        self.points
            .iter()
            .filter(|p| p.is_testable())
            .all(|p| p.residual_pass)
    }

    pub fn disagreements(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.is_testable() && !p.agree())
            .count()
    }

    pub fn untestable(&self) -> Vec<Complex64> {
        self.points
            .iter()
            .filter(|p| !p.is_testable())
            .map(|p| p.point)
            .collect()
    }
}

/// Samples the contact-solution property over `points × directions`, using the
/// finite-difference jet as probe, and compares it with the residual test.
pub fn contact_solution_verdict<F: ComplexField + ?Sized>(
    f: &F,
    points: &[Complex64],
    d: &Density,
    cfg: &ContactConfig,
) -> Result<ContactReport> {
    let sc = SystemCoeff::new(d.clone());
    let dirs = XiDirection::uniform(cfg.directions);
    let radii = cfg.membership.radii();
    let lambda_zero = d.lambda_zero().unwrap_or(f64::NAN);
    let points = points
        .par_iter()
        .map(|&z| {
            let untestable = |note: String| ContactPoint {
                point: z,
                residual: None,
                residual_pass: false,
                camvp_pass: false,
                directions: Vec::new(),
                note: Some(note),
            };
            let jet = wirtinger_jet(f, z, default_fd_step(z));
            if !(jet.omega.norm() >= F_MIN) || !jet.is_valid() {
                return Ok(untestable(format!(
                    "|f| = {:e} too small",
                    jet.omega.norm()
                )));
            }
            let residual = cr_residual(&jet, &sc)?;
            let s = match camvp_sweep(jet.omega, jet.sigma, jet.tau, z, d, cfg) {
                Ok(s) => s,
                Err(e) => return Ok(untestable(e.to_string())),
            };
            let mut outcomes = Vec::with_capacity(dirs.len());
            for &xi in &dirs {
                let probe = ContactProbe {
                    base: z,
                    xi,
                    sigma: jet.sigma,
                    tau: jet.tau,
                };
                let membership = jet_membership(
                    f,
                    &probe,
                    &radii,
                    cfg.membership.samples_per_radius,
                    &cfg.membership,
                )?;
                outcomes.push(DirectionOutcome {
                    xi,
                    membership: membership.membership,
                    envelope: xi_envelope(jet.omega, jet.sigma, jet.tau, xi, &sc, lambda_zero),
                    camvp: camvp_from_sweep(&s, xi, cfg)?,
                });
            }
            let camvp_pass = outcomes
                .iter()
                .filter(|o| o.membership == Membership::Member)
                .all(|o| o.camvp.verdict == Camvp::Holds);
            Ok(ContactPoint {
                point: z,
                residual: Some(residual),
                residual_pass: residual.norm() <= cfg.verify.tol.limit_tol,
                camvp_pass,
                directions: outcomes,
                note: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContactReport { points })
}
