//! Variational means of a complex field on a circle or disk.
//!
//! The nonlinear means minimise `φ(c) = avg_j F(|f_j - c·m_j|)` over `c ∈ ℂ`,
//! with `m_j = conj(ζ_j - z)` for `c^F` and `m_j = 1` for the constant part of
//! the pair mean. Both share one damped Newton solver.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::density::{Density, W_MIN};
use crate::error::{Error, Result};
use crate::geometry::{unit_roots, CircleQuadrature, ComplexField, DiskQuadrature, Jet};

/// Smallest `|g|` accepted by [`c_j_mean`].
pub const G_MIN: f64 = 1e-12;

/// Shuffle seed of the smallest enclosing circle.
pub const ENCLOSING_SEED: u64 = 0x5eed_c1c1e;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Relative first-order tolerance, scaled by the mean of `F'(|f - c₀m|)`.
    pub foc_rel_tol: f64,
    pub armijo_factor: f64,
    pub armijo_slope: f64,
    pub max_backtracks: usize,
    /// Residual modulus below which the Hessian is not trusted.
    pub w_min: f64,
    pub fallback_cycles: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            foc_rel_tol: 1e-10,
            armijo_factor: 0.5,
            armijo_slope: 1e-4,
            max_backtracks: 60,
            w_min: W_MIN,
            fallback_cycles: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeanStatus {
    Converged,
    FallbackUsed,
    Failed,
}

impl MeanStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeanStatus::Converged => "converged",
            MeanStatus::FallbackUsed => "fallback_used",
            MeanStatus::Failed => "failed",
        }
    }

    pub fn is_ok(&self) -> bool {
        !matches!(self, MeanStatus::Failed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanResult {
    pub minimizer: Complex64,
    /// The integral functional at the minimizer.
    pub objective: f64,
    /// `|∂_c̄ φ| / avg|m|²` at the minimizer.
    pub foc_residual: f64,
    pub foc_tol: f64,
    pub iterations: usize,
    pub status: MeanStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMeanResult {
    pub a: Complex64,
    pub b: Complex64,
    /// `a + r·b`.
    pub mu: Complex64,
    pub a_diag: MeanResult,
    pub b_diag: MeanResult,
}

impl PairMeanResult {
    pub fn status(&self) -> MeanStatus {
        use MeanStatus::*;
        match (self.a_diag.status, self.b_diag.status) {
            (Failed, _) | (_, Failed) => Failed,
            (FallbackUsed, _) | (_, FallbackUsed) => FallbackUsed,
            _ => Converged,
        }
    }
}

fn modulus(z: Complex64) -> f64 {
    z.norm_sqr().sqrt()
}

/// `φ(c) = avg_j F(|f_j - c·m_j|)` with its derivatives.
struct Problem<'a> {
    values: &'a [Complex64],
    mult: &'a [Complex64],
    density: &'a Density,
    mean_m2: f64,
}

impl<'a> Problem<'a> {
    fn new(values: &'a [Complex64], mult: &'a [Complex64], density: &'a Density) -> Self {
        let mean_m2 = mult.iter().map(|m| m.norm_sqr()).sum::<f64>() / mult.len() as f64;
        Self {
            values,
            mult,
            density,
            mean_m2,
        }
    }

    fn n(&self) -> f64 {
        self.values.len() as f64
    }

    fn residuals(&self, c: Complex64) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.values
            .iter()
            .zip(self.mult)
            .map(move |(f, m)| (f - c * m, *m))
    }

    fn objective(&self, c: Complex64) -> f64 {
        self.residuals(c)
            .map(|(e, _)| self.density.eval(modulus(e)))
            .sum::<f64>()
            / self.n()
    }

    /// `∂_c̄ φ = -avg(H_w̄(e)·conj(m))`; `H_w̄(0) = 0` because `F'(0) = 0`.
    fn gradient(&self, c: Complex64) -> Complex64 {
        let mut g = Complex64::new(0.0, 0.0);
        for (e, m) in self.residuals(c) {
            let s = modulus(e);
            if s > 0.0 {
                g -= e * m.conj() * (self.density.deriv(s) / (2.0 * s));
            }
        }
        g / self.n()
    }

    fn foc(&self, c: Complex64) -> f64 {
        self.gradient(c).norm() / self.mean_m2
    }

    /// `(avg H_w̄w |m|², avg H_w̄w̄ conj(m)²)`, or `None` near a zero residual.
    fn hessian(&self, c: Complex64, w_min: f64) -> Option<(f64, Complex64)> {
        let mut a = 0.0;
        let mut b = Complex64::new(0.0, 0.0);
        for (e, m) in self.residuals(c) {
            if modulus(e) < w_min {
                return None;
            }
            let h = self.density.complex_hessian(e).ok()?;
            a += h.h_wbar_w * m.norm_sqr();
            b += h.h_wbar_wbar * m.conj() * m.conj();
        }
        Some((a / self.n(), b / self.n()))
    }

    fn least_squares_start(&self) -> Complex64 {
        let s: Complex64 = self
            .values
            .iter()
            .zip(self.mult)
            .map(|(f, m)| f * m.conj())
            .sum();
        s / (self.n() * self.mean_m2)
    }

    /// `rel·avg F'(|e|)` plus a floor covering rounding in the gradient sum.
    fn tolerance(&self, c: Complex64, rel: f64) -> f64 {
        let mut scale = 0.0;
        let mut noise = 0.0;
        for ((e, m), f) in self.residuals(c).zip(self.values) {
            let s = modulus(e);
            if s > 0.0 {
                let fp = self.density.deriv(s);
                scale += fp;
                noise += fp * (modulus(*f) + modulus(c * m)) / s * modulus(m);
            }
        }
        (rel * scale + 64.0 * f64::EPSILON * noise / self.mean_m2) / self.n()
    }

    fn max_residual(&self, c: Complex64) -> f64 {
        self.residuals(c)
            .map(|(e, _)| modulus(e))
            .fold(0.0, f64::max)
    }

    fn min_mult(&self) -> f64 {
        self.mult
            .iter()
            .map(|m| modulus(*m))
            .fold(f64::INFINITY, f64::min)
    }
}

fn solve(problem: &Problem<'_>, cfg: &SolverConfig, total_weight: f64) -> MeanResult {
    let c0 = problem.least_squares_start();
    let finish = |c: Complex64, iterations: usize, status: MeanStatus, tol: f64| MeanResult {
        minimizer: c,
        objective: total_weight * problem.objective(c),
        foc_residual: problem.foc(c),
        foc_tol: tol,
        iterations,
        status,
    };
    if problem.max_residual(c0) == 0.0 {
        return finish(c0, 0, MeanStatus::Converged, 0.0);
    }
    let tol = problem.tolerance(c0, cfg.foc_rel_tol);

    let mut c = c0;
    let mut phi = problem.objective(c);
    let mut res = problem.foc(c);
    for iter in 0..cfg.max_iterations {
        if res <= tol {
            return finish(c, iter, MeanStatus::Converged, tol);
        }
        let Some((a, b)) = problem.hessian(c, cfg.w_min) else {
            let (c, cycles) = coordinate_descent(problem, c, cfg);
            return finish(c, iter + cycles, MeanStatus::FallbackUsed, tol);
        };
        let g = problem.gradient(c);
        let (gx, gy) = (2.0 * g.re, 2.0 * g.im);
        let (hxx, hyy, hxy) = (2.0 * a + 2.0 * b.re, 2.0 * a - 2.0 * b.re, 2.0 * b.im);
        let det = hxx * hyy - hxy * hxy;
        let (dx, dy) = if det > 0.0 && det.is_finite() {
            ((-hyy * gx + hxy * gy) / det, (hxy * gx - hxx * gy) / det)
        } else {
            (
                -gx / hxx.abs().max(f64::MIN_POSITIVE),
                -gy / hyy.abs().max(f64::MIN_POSITIVE),
            )
        };
        let step = Complex64::new(dx, dy);
        let slope = gx * dx + gy * dy;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..cfg.max_backtracks {
            let cand = c + step * t;
            let phi_c = problem.objective(cand);
            if phi_c <= phi + cfg.armijo_slope * t * slope {
                accepted = Some((cand, phi_c));
                break;
            }
            // Objective differences lost in rounding: judge by the gradient instead.
            if (phi_c - phi).abs() <= 100.0 * f64::EPSILON * phi.abs() {
                let res_c = problem.foc(cand);
                if res_c < res {
                    accepted = Some((cand, phi_c));
                    break;
                }
            }
            t *= cfg.armijo_factor;
        }
        match accepted {
            Some((cand, phi_c)) => {
                c = cand;
                phi = phi_c;
                res = problem.foc(c);
            }
            None => return finish(c, iter + 1, MeanStatus::Failed, tol),
        }
    }
    if res <= tol {
        finish(c, cfg.max_iterations, MeanStatus::Converged, tol)
    } else {
        finish(c, cfg.max_iterations, MeanStatus::Failed, tol)
    }
}

/// Derivative-free minimisation by cycled golden-section line searches
/// along `1`, `i` and the two diagonals.
fn coordinate_descent(
    problem: &Problem<'_>,
    start: Complex64,
    cfg: &SolverConfig,
) -> (Complex64, usize) {
    let diag = std::f64::consts::FRAC_1_SQRT_2;
    let dirs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(diag, diag),
        Complex64::new(diag, -diag),
    ];
    let mut c = start;
    let min_m = problem.min_mult();
    for cycle in 0..cfg.fallback_cycles {
        let half = 4.0 * problem.max_residual(c) / min_m;
        if !(half > 0.0) {
            return (c, cycle);
        }
        let before = c;
        for u in dirs {
            let mut center = 0.0;
            for _ in 0..20 {
                let (lo, hi) = (center - half, center + half);
                let t = golden_section(|t| problem.objective(c + u * t), lo, hi, 1e-13 * half);
                let at_edge = t - lo < 0.01 * half || hi - t < 0.01 * half;
                center = t;
                if !at_edge {
                    break;
                }
            }
            c += u * center;
        }
        if (c - before).norm() <= 1e-12 * half {
            return (c, cycle + 1);
        }
    }
    (c, cfg.fallback_cycles)
}

fn golden_section<G: Fn(f64) -> f64>(h: G, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (h(x1), h(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = h(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = h(x2);
        }
        if hi - lo <= f64::EPSILON * (lo.abs() + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn check_values(values: &[Complex64], q: &CircleQuadrature) -> Result<()> {
    if values.len() != q.node_count() {
        return Err(Error::InvalidParameter(format!(
            "{} samples for {} circle nodes",
            values.len(),
            q.node_count()
        )));
    }
    for (node, v) in values.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Integration { node, value: *v });
        }
    }
    Ok(())
}

/// `c^F`: minimiser of `∫ F(|f(ζ) - c·conj(ζ - z)|) dS` from samples at the nodes of `q`.
pub fn circle_mean_cf_values(
    values: &[Complex64],
    d: &Density,
    q: &CircleQuadrature,
    cfg: &SolverConfig,
) -> Result<MeanResult> {
    check_values(values, q)?;
    let mult: Vec<Complex64> = q.offsets().iter().map(|o| o.conj()).collect();
    Ok(solve(
        &Problem::new(values, &mult, d),
        cfg,
        q.total_weight(),
    ))
}

pub fn circle_mean_cf<F: ComplexField + ?Sized>(
    f: &F,
    d: &Density,
    q: &CircleQuadrature,
    cfg: &SolverConfig,
) -> Result<MeanResult> {
    circle_mean_cf_values(&q.sample(f), d, q, cfg)
}

/// Minimiser of `∫ F(|f(ζ) - a|) dS`.
pub fn circle_mean_a_values(
    values: &[Complex64],
    d: &Density,
    q: &CircleQuadrature,
    cfg: &SolverConfig,
) -> Result<MeanResult> {
    check_values(values, q)?;
    let mult = vec![Complex64::new(1.0, 0.0); values.len()];
    Ok(solve(
        &Problem::new(values, &mult, d),
        cfg,
        q.total_weight(),
    ))
}

/// The pair `(a^G, b^G)` and `μ^G = a + r·b`; the two-variable functional
/// separates, so each component is its own two-real-dimensional problem.
pub fn pair_mean_g_values(
    values: &[Complex64],
    d: &Density,
    q: &CircleQuadrature,
    cfg: &SolverConfig,
) -> Result<PairMeanResult> {
    let a_diag = circle_mean_a_values(values, d, q, cfg)?;
    let b_diag = circle_mean_cf_values(values, d, q, cfg)?;
    let (a, b) = (a_diag.minimizer, b_diag.minimizer);
    Ok(PairMeanResult {
        a,
        b,
        mu: a + b * q.radius(),
        a_diag,
        b_diag,
    })
}

pub fn pair_mean_g<F: ComplexField + ?Sized>(
    f: &F,
    d: &Density,
    q: &CircleQuadrature,
    cfg: &SolverConfig,
) -> Result<PairMeanResult> {
    pair_mean_g_values(&q.sample(f), d, q, cfg)
}

/// `|D_r|⁻¹ ∫ f(ζ)[1 + (2/r)(ζ - z)] dA`.
pub fn weighted_holomorphic_mean<F: ComplexField + ?Sized>(
    f: &F,
    q: &DiskQuadrature,
) -> Result<Complex64> {
    let z = q.center();
    let r = q.radius();
    let s = crate::geometry::disk_integral(q, |w| f.eval(w) * (1.0 + (w - z) * (2.0 / r)))?;
    Ok(s / q.area())
}

/// Disk projections: `a` = average of `f`, `b = (2/r²)·avg f(ζ)(ζ - z)`.
pub fn quadratic_projection_pair<F: ComplexField + ?Sized>(
    f: &F,
    q: &DiskQuadrature,
) -> Result<(Complex64, Complex64)> {
    let z = q.center();
    let r = q.radius();
    let a = crate::geometry::disk_integral(q, |w| f.eval(w))? / q.area();
    let m = crate::geometry::disk_integral(q, |w| f.eval(w) * (w - z))? / q.area();
    Ok((a, m * (2.0 / (r * r))))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCoefficients {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub identity_residual: f64,
}

/// Coefficients of the implicit identity satisfied by the `c^F` mean of an
/// affine field, integrated over the unit-circle nodes used for the mean
/// times Gauss–Legendre in `t ∈ [0, 1]`.
pub fn prop32_coefficients(
    jet: &Jet,
    r: f64,
    c_r: Complex64,
    d: &Density,
    circle_nodes: usize,
    t_nodes: usize,
) -> Result<IdentityCoefficients> {
    if jet.omega.norm() < W_MIN {
        return Err(Error::SingularPoint("identity needs omega != 0".into()));
    }
    if !(r > 0.0) || circle_nodes < 8 || t_nodes == 0 {
        return Err(Error::InvalidParameter(
            "need r > 0, >= 8 circle nodes, >= 1 t node".into(),
        ));
    }
    let (omega, sigma, tau) = (jet.omega, jet.sigma, jet.tau);
    let rule = GaussLegendre::new(NonZeroUsize::new(t_nodes).expect("t_nodes > 0"));
    let pairs: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    let half_step = 0.5 / t_nodes as f64;

    let mut sum_a = 0.0;
    let mut sum_a_z2 = Complex64::new(0.0, 0.0);
    let mut sum_b = Complex64::new(0.0, 0.0);
    let mut sum_b_z2 = Complex64::new(0.0, 0.0);
    for zeta in unit_roots(circle_nodes) {
        let delta = sigma * zeta + (tau - c_r) * zeta.conj();
        let z2 = zeta * zeta;
        for &(t0, wt) in &pairs {
            let mut t = t0;
            let mut w = omega + delta * (t * r);
            if w.norm() < W_MIN {
                t = if t0 + half_step <= 1.0 {
                    t0 + half_step
                } else {
                    t0 - half_step
                };
                log::warn!("w vanishes at zeta = {zeta}, t = {t0}; moved to t = {t}");
                w = omega + delta * (t * r);
            }
            let s = w.norm();
            let fp_s = d.deriv(s) / s;
            let fpp = d.second_deriv(s);
            let a = (fpp + fp_s) * wt;
            let b = (w * w / (s * s)) * ((fpp - fp_s) * wt);
            sum_a += a;
            sum_a_z2 += z2 * a;
            sum_b += b;
            sum_b_z2 += b * z2;
        }
    }
    let alpha = sum_b / sum_a;
    let beta = sum_a_z2 / sum_a;
    let gamma = sum_b_z2 / sum_a;
    let rhs = tau + alpha * sigma.conj() + beta * sigma + gamma * (tau.conj() - c_r.conj());
    Ok(IdentityCoefficients {
        alpha,
        beta,
        gamma,
        identity_residual: (c_r - rhs).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfinityMean {
    pub center: Complex64,
    /// `max_j |f_j - c·conj(ζ_j - z)|` at the center.
    pub max_modulus: f64,
    /// Nodes attaining the maximum within `1e-9·max(1, max_modulus)`.
    pub support_count: usize,
}

/// Minimiser of `max_j |f(ζ_j) - c·conj(ζ_j - z)|`.
///
/// Since `|ζ_j - z| = r`, this is the center of the smallest circle enclosing
/// `v_j = f(ζ_j)(ζ_j - z)/r²`.
pub fn infinity_mean_values(values: &[Complex64], q: &CircleQuadrature) -> Result<InfinityMean> {
    check_values(values, q)?;
    let r2 = q.radius() * q.radius();
    let points: Vec<Complex64> = values
        .iter()
        .zip(q.offsets())
        .map(|(f, o)| f * o / r2)
        .collect();
    let (center, _) = smallest_enclosing_circle(&points, ENCLOSING_SEED);
    let moduli: Vec<f64> = values
        .iter()
        .zip(q.offsets())
        .map(|(f, o)| (f - center * o.conj()).norm())
        .collect();
    let max_modulus = moduli.iter().copied().fold(0.0, f64::max);
    let slack = 1e-9 * max_modulus.max(1.0);
    let support_count = moduli.iter().filter(|&&m| m >= max_modulus - slack).count();
    Ok(InfinityMean {
        center,
        max_modulus,
        support_count,
    })
}

pub fn infinity_mean<F: ComplexField + ?Sized>(
    f: &F,
    q: &CircleQuadrature,
) -> Result<InfinityMean> {
    infinity_mean_values(&q.sample(f), q)
}

/// Smallest enclosing circle `(center, radius)` by the randomised incremental
/// algorithm; the shuffle is seeded, so the result is deterministic.
pub fn smallest_enclosing_circle(points: &[Complex64], seed: u64) -> (Complex64, f64) {
    if points.is_empty() {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let shift = points.iter().sum::<Complex64>() / points.len() as f64;
    let mut pts: Vec<Complex64> = points.iter().map(|p| p - shift).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pts.shuffle(&mut rng);
    let scale = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let eps = 1e-14 * scale;
    let inside = |c: Complex64, rad: f64, p: Complex64| (p - c).norm() <= rad + eps;

    let mut c = pts[0];
    let mut rad = 0.0;
    for i in 1..pts.len() {
        if inside(c, rad, pts[i]) {
            continue;
        }
        c = pts[i];
        rad = 0.0;
        for j in 0..i {
            if inside(c, rad, pts[j]) {
                continue;
            }
            c = (pts[i] + pts[j]) * 0.5;
            rad = (pts[i] - pts[j]).norm() * 0.5;
            for k in 0..j {
                if inside(c, rad, pts[k]) {
                    continue;
                }
                (c, rad) = circle_through(pts[i], pts[j], pts[k]);
            }
        }
    }
    (c + shift, rad)
}

fn circle_through(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, f64) {
    let (bx, cx) = (b - a, c - a);
    let d = 2.0 * (bx.re * cx.im - bx.im * cx.re);
    let scale = bx.norm_sqr().max(cx.norm_sqr());
    if d.abs() <= 1e-14 * scale {
        // Collinear: the farthest pair spans the circle.
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .into_iter()
            .max_by(|x, y| (x.0 - x.1).norm().total_cmp(&(y.0 - y.1).norm()))
            .expect("three pairs");
        return ((p + q) * 0.5, (p - q).norm() * 0.5);
    }
    let (b2, c2) = (bx.norm_sqr(), cx.norm_sqr());
    let u = Complex64::new((cx.im * b2 - bx.im * c2) / d, (bx.re * c2 - cx.re * b2) / d);
    (a + u, u.norm())
}

/// `c^J`: the `c^F` mean of the transformed field `G'(|g|)·g/|g|`, where `G`
/// is the Young conjugate of `F`.
pub fn c_j_mean<F: ComplexField + ?Sized>(
    g: &F,
    d: &Density,
    q: &CircleQuadrature,
    cfg: &SolverConfig,
) -> Result<MeanResult> {
    let conj = d.young_conjugate()?;
    c_j_mean_with(g, d, &conj, q, cfg)
}

/// As [`c_j_mean`] with a precomputed conjugate density.
pub fn c_j_mean_with<F: ComplexField + ?Sized>(
    g: &F,
    d: &Density,
    conj: &Density,
    q: &CircleQuadrature,
    cfg: &SolverConfig,
) -> Result<MeanResult> {
    let mut values = Vec::with_capacity(q.node_count());
    for z in q.nodes() {
        let v = g.eval(z);
        let m = v.norm();
        if !(m >= G_MIN) {
            return Err(Error::ZeroCrossing { at: z, modulus: m });
        }
        values.push(v * (conj.deriv(m) / m));
    }
    circle_mean_cf_values(&values, d, q, cfg)
}
