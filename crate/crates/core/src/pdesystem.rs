//! Pointwise residuals of the nonlinear Cauchy–Riemann system
//! `f_z̄ + μ(|f|)(f/f̄)·conj(f_z) = 0`, `μ = (Λ-1)/(Λ+1)`, together with the
//! quasiregularity bound and the p-harmonic gradient and Beltrami forms.

use num_complex::Complex64;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::geometry::{ComplexField, Jet};

/// Fields with `|f| < F_MIN` are not tested.
pub const F_MIN: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SystemCoeff {
    density: Density,
}

impl SystemCoeff {
    pub fn new(density: Density) -> Self {
        Self { density }
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    /// `μ(s) = (Λ(s) - 1)/(Λ(s) + 1)`.
    pub fn mu(&self, s: f64) -> Result<f64> {
        self.density.system_coefficient(s)
    }

    /// Uniform bound on `|μ|`.
    pub fn bound(&self) -> f64 {
        self.density.dilatation_bound()
    }
}

fn phase(omega: Complex64) -> Complex64 {
    omega * omega / omega.norm_sqr()
}

fn refuse_zero(omega: Complex64, what: &str) -> Result<()> {
    let m = omega.norm();
    if !(m >= F_MIN) {
        return Err(Error::SingularPoint(format!(
            "{what}: |f| = {m:e} below {F_MIN:e}"
        )));
    }
    Ok(())
}

/// `τ + μ(|ω|)·(ω/ω̄)·conj(σ)`, the system residual of the jet.
pub fn cr_residual(j: &Jet, sc: &SystemCoeff) -> Result<Complex64> {
    refuse_zero(j.omega, "system coefficient undefined")?;
    let mu = sc.mu(j.omega.norm())?;
    Ok(j.tau + phase(j.omega) * j.sigma.conj() * mu)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dilatation {
    /// `|τ|/|σ|`; `None` when `σ = τ = 0`.
    pub ratio: Option<f64>,
    pub bound: f64,
    /// Quasiregularity constant `K`.
    pub k: f64,
    /// `|τ| ≤ bound·|σ| + abs_tol`.
    pub ok: bool,
}

pub fn dilatation_check(j: &Jet, sc: &SystemCoeff, abs_tol: f64) -> Dilatation {
    let bound = sc.bound();
    let (s, t) = (j.sigma.norm(), j.tau.norm());
    let ratio = if s == 0.0 && t == 0.0 {
        None
    } else {
        Some(t / s)
    };
    Dilatation {
        ratio,
        bound,
        k: sc.density().quasiregularity_constant(),
        ok: t <= bound * s + abs_tol,
    }
}

/// Second-order real jet of a scalar `u` at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealJet2 {
    pub base: Complex64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

impl RealJet2 {
    /// Central differences with step `h`.
    pub fn from_fn<U: Fn(f64, f64) -> f64>(u: U, z: Complex64, h: f64) -> Self {
        let (x, y) = (z.re, z.im);
        let u0 = u(x, y);
        let (xp, xm, yp, ym) = (u(x + h, y), u(x - h, y), u(x, y + h), u(x, y - h));
        let cross = u(x + h, y + h) - u(x + h, y - h) - u(x - h, y + h) + u(x - h, y - h);
        Self {
            base: z,
            ux: (xp - xm) / (2.0 * h),
            uy: (yp - ym) / (2.0 * h),
            uxx: (xp - 2.0 * u0 + xm) / (h * h),
            uyy: (yp - 2.0 * u0 + ym) / (h * h),
            uxy: cross / (4.0 * h * h),
        }
    }

    /// Exact jet of the radial p-harmonic `u = |ζ|^{(p-2)/(p-1)}`, or `log|ζ|` for `p = 2`.
    pub fn pharm_radial(p: f64, z: Complex64) -> Self {
        // u_x = a ρ^{e-2} x, u_xx = a ρ^{e-2} + a(e-2) ρ^{e-4} x², and so on.
        let (a, e) = if p == 2.0 {
            (1.0, 0.0)
        } else {
            let k = (p - 2.0) / (p - 1.0);
            (k, k)
        };
        let (x, y) = (z.re, z.im);
        let rho2 = z.norm_sqr();
        let g1 = a * rho2.powf(0.5 * e - 1.0);
        let g2 = a * (e - 2.0) * rho2.powf(0.5 * e - 2.0);
        Self {
            base: z,
            ux: g1 * x,
            uy: g1 * y,
            uxx: g1 + g2 * x * x,
            uyy: g1 + g2 * y * y,
            uxy: g2 * x * y,
        }
    }

    /// `f = 2∂_z u = u_x - i u_y`.
    pub fn gradient_field(&self) -> Complex64 {
        Complex64::new(self.ux, -self.uy)
    }

    /// Jet of `f = 2∂_z u`: `f_z = (u_xx - u_yy - 2i u_xy)/2`, `f_z̄ = Δu/2`.
    pub fn gradient_jet(&self) -> Jet {
        Jet {
            omega: self.gradient_field(),
            sigma: Complex64::new(0.5 * (self.uxx - self.uyy), -self.uxy),
            tau: Complex64::new(0.5 * (self.uxx + self.uyy), 0.0),
            base: self.base,
        }
    }
}

/// `f_z̄ - ((2-p)/(2p))·((f̄/f) f_z + (f/f̄) conj(f_z))` for `f = 2∂_z u`.
pub fn p_harmonic_gradient_residual(u: &RealJet2, p: f64) -> Result<Complex64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("need p > 1, got {p}")));
    }
    let j = u.gradient_jet();
    if !(j.omega.norm() >= F_MIN) {
        return Err(Error::SingularPoint(format!(
            "critical point of u at {}",
            u.base
        )));
    }
    let ph = phase(j.omega);
    let coeff = (2.0 - p) / (2.0 * p);
    Ok(j.tau - (ph.conj() * j.sigma + ph * j.sigma.conj()) * coeff)
}

/// The transformed field `g = |f|^{√(p-1) - 1} f`.
pub fn beltrami_transform(f: Complex64, p: f64) -> Complex64 {
    f * f.norm().powf((p - 1.0).sqrt() - 1.0)
}

/// `g_z̄ - ((1-√(p-1))/(1+√(p-1)))·(ḡ/g)·g_z` with `g` differentiated by
/// central differences of step `h`.
pub fn beltrami_transform_residual<F: ComplexField + ?Sized>(
    f: &F,
    z: Complex64,
    p: f64,
    h: f64,
) -> Result<Complex64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("need p > 1, got {p}")));
    }
    refuse_zero(f.eval(z), "transform undefined")?;
    let g = |w: Complex64| beltrami_transform(f.eval(w), p);
    let jet = crate::geometry::wirtinger_jet(&g, z, h);
    if !jet.is_valid() {
        return Err(Error::SingularPoint(format!(
            "non-finite transformed field near {z}"
        )));
    }
    let q = (p - 1.0).sqrt();
    let k = (1.0 - q) / (1.0 + q);
    Ok(jet.tau - phase(jet.omega).conj() * jet.sigma * k)
}
