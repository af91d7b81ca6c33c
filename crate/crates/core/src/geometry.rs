//! Circle and disk quadrature, complex fields, affine jets and Wirtinger
//! derivatives by central differences.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_CIRCLE_NODES: usize = 64;
pub const DEFAULT_DISK_RINGS: usize = 32;
pub const DEFAULT_DISK_ANGLES: usize = 64;

/// Uniform rule on the circle `|ζ - z| = r`.
///
/// The offsets `ζ_j - z = r e^{iθ_j}` are stored directly, so sums of
/// `(ζ - z)^k` never suffer the cancellation of recomputing `ζ_j - z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleQuadrature {
    center: Complex64,
    radius: f64,
    offsets: Vec<Complex64>,
    weight: f64,
}

impl CircleQuadrature {
    pub fn new(center: Complex64, radius: f64, node_count: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        if node_count < 8 {
            return Err(Error::InvalidParameter(format!(
                "circle quadrature needs at least 8 nodes, got {node_count}"
            )));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "circle center is not finite".into(),
            ));
        }
        let offsets = unit_roots(node_count)
            .into_iter()
            .map(|u| u * radius)
            .collect();
        Ok(Self {
            center,
            radius,
            offsets,
            weight: 2.0 * PI * radius / node_count as f64,
        })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len()
    }

    /// Common weight `2πr / n`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn total_weight(&self) -> f64 {
        2.0 * PI * self.radius
    }

    /// Offsets `ζ_j - z`.
    pub fn offsets(&self) -> &[Complex64] {
        &self.offsets
    }

    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.offsets.iter().map(move |d| self.center + d)
    }

    /// Samples `f` at every node, in node order.
    pub fn sample<F: ComplexField + ?Sized>(&self, f: &F) -> Vec<Complex64> {
        self.nodes().map(|z| f.eval(z)).collect()
    }
}

/// Product rule on the disk `|ζ - z| ≤ r`: Gauss–Legendre in the radius
/// (with the polar weight `ρ`) times a uniform angular rule.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskQuadrature {
    center: Complex64,
    radius: f64,
    ring_count: usize,
    angle_count: usize,
    offsets: Vec<Complex64>,
    weights: Vec<f64>,
}

impl DiskQuadrature {
    pub fn new(
        center: Complex64,
        radius: f64,
        ring_count: usize,
        angle_count: usize,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        if ring_count == 0 || angle_count < 8 {
            return Err(Error::InvalidParameter(format!(
                "disk quadrature needs >= 1 ring and >= 8 angles, got {ring_count} x {angle_count}"
            )));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(ring_count).expect("ring_count > 0"));
        let roots = unit_roots(angle_count);
        let dtheta = 2.0 * PI / angle_count as f64;
        let mut offsets = Vec::with_capacity(ring_count * angle_count);
        let mut weights = Vec::with_capacity(ring_count * angle_count);
        for &(x, w) in rule.as_node_weight_pairs() {
            let rho = 0.5 * radius * (x + 1.0);
            let ring_weight = 0.5 * radius * w * rho * dtheta;
            for u in &roots {
                offsets.push(u * rho);
                weights.push(ring_weight);
            }
        }
        Ok(Self {
            center,
            radius,
            ring_count,
            angle_count,
            offsets,
            weights,
        })
    }

    pub fn with_defaults(center: Complex64, radius: f64) -> Result<Self> {
        Self::new(center, radius, DEFAULT_DISK_RINGS, DEFAULT_DISK_ANGLES)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ring_count(&self) -> usize {
        self.ring_count
    }

    pub fn angle_count(&self) -> usize {
        self.angle_count
    }

    pub fn offsets(&self) -> &[Complex64] {
        &self.offsets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `|D_r| = πr²`.
    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// `e^{2πij/n}`, with the quarter-turn symmetric points set exactly.
pub(crate) fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64;
            let (s, c) = theta.sin_cos();
            match (4 * j) % n {
                0 => match (4 * j) / n {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                },
                _ => Complex64::new(c, s),
            }
        })
        .collect()
}

/// First-order complex data `(ω, σ, τ) = (f, f_z, f_z̄)` at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub omega: Complex64,
    pub sigma: Complex64,
    pub tau: Complex64,
    pub base: Complex64,
}

impl Jet {
    pub fn new(omega: Complex64, sigma: Complex64, tau: Complex64, base: Complex64) -> Self {
        Self {
            omega,
            sigma,
            tau,
            base,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.omega, self.sigma, self.tau, self.base]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `ω + σ(ζ - z) + τ·conj(ζ - z)`.
    pub fn affine_eval(&self, zeta: Complex64) -> Complex64 {
        self.affine_offset(zeta - self.base)
    }

    /// The affine model evaluated at `z + d`.
    pub fn affine_offset(&self, d: Complex64) -> Complex64 {
        self.omega + self.sigma * d + self.tau * d.conj()
    }

    /// The same affine field, re-expanded at `z`.
    pub fn rebased(&self, z: Complex64) -> Jet {
        Jet {
            omega: self.affine_eval(z),
            base: z,
            ..*self
        }
    }
}

/// A complex field sampled pointwise.
pub trait ComplexField: Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    /// Exact jet, when known analytically.
    fn exact_jet(&self, _z: Complex64) -> Option<Jet> {
        None
    }
}

impl<F> ComplexField for F
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

impl ComplexField for Jet {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.affine_eval(z)
    }

    fn exact_jet(&self, z: Complex64) -> Option<Jet> {
        Some(self.rebased(z))
    }
}

pub fn default_fd_step(z: Complex64) -> f64 {
    1e-5 * (1.0 + z.norm())
}

/// Wirtinger jet from the four-point stencil `z ± h`, `z ± ih`.
///
/// Non-finite samples propagate into the jet; check [`Jet::is_valid`].
pub fn wirtinger_jet<F: ComplexField + ?Sized>(f: &F, z: Complex64, h: f64) -> Jet {
    let hx = Complex64::new(h, 0.0);
    let hy = Complex64::new(0.0, h);
    let fx = (f.eval(z + hx) - f.eval(z - hx)) / (2.0 * h);
    let fy = (f.eval(z + hy) - f.eval(z - hy)) / (2.0 * h);
    let i = Complex64::i();
    Jet {
        omega: f.eval(z),
        sigma: (fx - i * fy) * 0.5,
        tau: (fx + i * fy) * 0.5,
        base: z,
    }
}

/// Weighted sum `Σ w_j g(ζ_j)` over the circle.
pub fn circle_integral<G>(q: &CircleQuadrature, g: G) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for (node, z) in q.nodes().enumerate() {
        let value = g(z);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Integration { node, value });
        }
        acc += value;
    }
    Ok(acc * q.weight())
}

/// Weighted sum `Σ w_j g(ζ_j)` over the disk.
pub fn disk_integral<G>(q: &DiskQuadrature, g: G) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for (node, (d, w)) in q.offsets().iter().zip(q.weights()).enumerate() {
        let value = g(q.center() + d);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Integration { node, value });
        }
        acc += value * *w;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn affine_examples() {
        let z0 = c(0.0, 0.0);
        let j = Jet::new(c(1.0, 0.0), z0, z0, z0);
        assert_eq!(j.affine_eval(c(5.0, 0.0)), c(1.0, 0.0));
        let j = Jet::new(z0, c(1.0, 0.0), z0, z0);
        assert_eq!(j.affine_eval(c(2.0, 1.0)), c(2.0, 1.0));
        let j = Jet::new(z0, z0, c(1.0, 0.0), z0);
        assert_eq!(j.affine_eval(c(2.0, 1.0)), c(2.0, -1.0));
    }

    #[test]
    fn wirtinger_examples() {
        let z = c(0.3, -0.7);
        let h = default_fd_step(z);
        let j = wirtinger_jet(&|w: Complex64| w, z, h);
        assert!((j.sigma - 1.0).norm() < 1e-10 && j.tau.norm() < 1e-10);
        let j = wirtinger_jet(&|w: Complex64| w.conj(), z, h);
        assert!(j.sigma.norm() < 1e-10 && (j.tau - 1.0).norm() < 1e-10);
        let z = c(2.0, 1.0);
        let j = wirtinger_jet(
            &|w: Complex64| Complex64::new(w.norm_sqr(), 0.0),
            z,
            default_fd_step(z),
        );
        assert!((j.sigma - c(2.0, -1.0)).norm() < 1e-8);
        assert!((j.tau - c(2.0, 1.0)).norm() < 1e-8);
    }

    #[test]
    fn wirtinger_non_finite_marks_invalid() {
        let j = wirtinger_jet(&|w: Complex64| 1.0 / w, c(0.0, 0.0), 1e-3);
        assert!(!j.is_valid());
    }

    #[test]
    fn fd_error_is_second_order() {
        // f = e^z·conj(z): f_z = e^z·conj(z), f_z̄ = e^z.
        let f = |w: Complex64| w.exp() * w.conj();
        let z = c(0.4, 0.2);
        let exact_s = z.exp() * z.conj();
        let exact_t = z.exp();
        let err = |h: f64| {
            let j = wirtinger_jet(&f, z, h);
            (j.sigma - exact_s).norm() + (j.tau - exact_t).norm()
        };
        let ratio = err(2e-2) / err(1e-2);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn circle_examples() {
        let q = CircleQuadrature::new(c(0.5, -1.0), 2.0, 64).unwrap();
        let len = circle_integral(&q, |_| c(1.0, 0.0)).unwrap();
        assert!((len - c(4.0 * PI, 0.0)).norm() < 1e-13);
        let m2 = circle_integral(&q, |w| (w - q.center()).powi(2)).unwrap();
        assert!(m2.norm() < 1e-12);
        assert!(CircleQuadrature::new(c(0.0, 0.0), 1.0, 7).is_err());
        assert!(CircleQuadrature::new(c(0.0, 0.0), 0.0, 16).is_err());
    }

    #[test]
    fn disk_examples() {
        let q = DiskQuadrature::with_defaults(c(0.0, 0.0), 1.0).unwrap();
        let m = disk_integral(&q, |w| c(w.norm_sqr(), 0.0)).unwrap();
        assert!((m.re - PI / 2.0).abs() < 1e-13 && m.im == 0.0);
    }

    #[test]
    fn integration_error_names_node() {
        let q = CircleQuadrature::new(c(0.0, 0.0), 1.0, 8).unwrap();
        let err =
            circle_integral(&q, |w| if w.re < -0.9 { c(f64::NAN, 0.0) } else { w }).unwrap_err();
        assert!(matches!(err, Error::Integration { node: 4, .. }), "{err:?}");
    }

    proptest! {
        #[test]
        fn circle_moments(x in -5.0..5.0f64, y in -5.0..5.0f64, r in 1e-3..10.0f64, n in 16usize..200) {
            let q = CircleQuadrature::new(c(x, y), r, n).unwrap();
            let s0: f64 = q.offsets().iter().map(|_| q.weight()).sum();
            prop_assert!((s0 - 2.0 * PI * r).abs() <= 1e-13 * 2.0 * PI * r);
            let s1: Complex64 = q.offsets().iter().map(|d| d * q.weight()).sum();
            let s2: Complex64 = q.offsets().iter().map(|d| d * d * q.weight()).sum();
            prop_assert!(s1.norm() <= 1e-13 * r * r);
            prop_assert!(s2.norm() <= 1e-13 * r * r * r);
        }

        #[test]
        fn disk_moments(x in -5.0..5.0f64, y in -5.0..5.0f64, r in 1e-3..10.0f64, rings in 16usize..40, angles in 16usize..96) {
            let q = DiskQuadrature::new(c(x, y), r, rings, angles).unwrap();
            let area: f64 = q.weights().iter().sum();
            prop_assert!((area - PI * r * r).abs() <= 1e-13 * PI * r * r);
            let (mut s1, mut s2, mut s3) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
            for (d, w) in q.offsets().iter().zip(q.weights()) {
                s1 += d * *w;
                s2 += d * d * *w;
                s3 += d.norm_sqr() * w;
            }
            prop_assert!(s1.norm() <= 1e-13 * r.powi(3));
            prop_assert!(s2.norm() <= 1e-13 * r.powi(4));
            prop_assert!((s3 - PI * r.powi(4) / 2.0).abs() <= 1e-12 * PI * r.powi(4) / 2.0);
        }

        #[test]
        fn affine_roundtrip(o in -3.0..3.0f64, s in -3.0..3.0f64, t in -3.0..3.0f64, zx in -2.0..2.0f64, zy in -2.0..2.0f64) {
            let jet = Jet::new(c(o, 0.5), c(s, -1.0), c(0.3, t), c(0.1, 0.2));
            let z = c(zx, zy);
            let fd = wirtinger_jet(&jet, z, default_fd_step(z));
            let exact = jet.rebased(z);
            prop_assert!((fd.sigma - exact.sigma).norm() < 1e-9);
            prop_assert!((fd.tau - exact.tau).norm() < 1e-9);
            let w = c(zx + 0.3, zy - 0.1);
            prop_assert!((fd.affine_eval(w) - jet.affine_eval(w)).norm() < 1e-9);
        }
    }
}
