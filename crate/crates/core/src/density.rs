//! Convex densities `F`, the ratio `Λ(s) = s F''(s) / F'(s)`, the complex
//! Hessian of `H(w) = F(|w|)` and the Young conjugate `G`.
//!
//! A [`Density`] is a triple of callables (`F`, `F'`, `F''`) together with the
//! declared bounds `Λ⁻ ≤ Λ(s) ≤ Λ⁺`. The bounds are trusted by every solver and
//! spot-checked by [`Density::validate`].

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest modulus at which second derivatives of `H(w) = F(|w|)` are queried.
pub const W_MIN: f64 = 1e-12;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Density {
    eval: ScalarFn,
    deriv: ScalarFn,
    second_deriv: ScalarFn,
    lambda_lo: f64,
    lambda_hi: f64,
    small_exponent: f64,
    small_coeff: f64,
    lambda_zero: Option<f64>,
    label: String,
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("label", &self.label)
            .field("lambda_lo", &self.lambda_lo)
            .field("lambda_hi", &self.lambda_hi)
            .field("small_exponent", &self.small_exponent)
            .field("small_coeff", &self.small_coeff)
            .field("lambda_zero", &self.lambda_zero)
            .finish()
    }
}

/// Second-order Wirtinger data of `H(w) = F(|w|)` at a point `w ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexHessian {
    /// `H_w̄(w) = F'(|w|) w / (2|w|)`.
    pub h_wbar: Complex64,
    /// `H_w̄w(w) = F'(|w|)(Λ(|w|) + 1) / (4|w|)`.
    pub h_wbar_w: f64,
    /// `H_w̄w̄(w) = F'(|w|)(Λ(|w|) - 1) / (4|w|) · w/w̄`.
    pub h_wbar_wbar: Complex64,
}

/// Outcome of [`Density::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub label: String,
    pub samples: usize,
    pub passed: bool,
    pub failures: Vec<String>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Largest amount by which a sampled `Λ(s)` left `[Λ⁻, Λ⁺]`.
    pub worst_violation: f64,
}

impl Density {
    /// Builds a density from user supplied callables.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lambda_lo: f64,
        lambda_hi: f64,
        small_exponent: f64,
        small_coeff: f64,
    ) -> Result<Self> {
        if !(lambda_lo > 0.0 && lambda_lo.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda_lo must be positive, got {lambda_lo}"
            )));
        }
        if !(lambda_hi >= lambda_lo && lambda_hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda_hi must satisfy lambda_lo <= lambda_hi < inf, got {lambda_hi}"
            )));
        }
        if !(small_exponent > 0.0 && small_coeff > 0.0) {
            return Err(Error::InvalidParameter(
                "small-argument exponent and coefficient must be positive".into(),
            ));
        }
        Ok(Self {
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            second_deriv: Arc::new(second_deriv),
            lambda_lo,
            lambda_hi,
            small_exponent,
            small_coeff,
            lambda_zero: None,
            label: label.into(),
        })
    }

    /// `F(s) = s^p / p`, for which `Λ ≡ p - 1`.
    pub fn power(p: f64) -> Result<Self> {
        fn pow(s: f64, e: f64) -> f64 {
            if e.fract() == 0.0 && e.abs() <= 64.0 {
                s.powi(e as i32)
            } else {
                s.powf(e)
            }
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "power density needs p > 1, got {p}"
            )));
        }
        let mut d = Self::custom(
            format!("power:p={p}"),
            move |s| pow(s, p) / p,
            move |s| pow(s, p - 1.0),
            move |s| (p - 1.0) * pow(s, p - 2.0),
            p - 1.0,
            p - 1.0,
            p - 1.0,
            1.0,
        )?;
        d.lambda_zero = Some(p - 1.0);
        Ok(d)
    }

    /// Parses a built-in density name, currently `power:p=<real>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let Some(rest) = spec.strip_prefix("power:") else {
            return Err(Error::Parse(format!("unknown density `{spec}`")));
        };
        let value = rest
            .trim()
            .strip_prefix("p=")
            .ok_or_else(|| Error::Parse(format!("expected `power:p=<real>`, got `{spec}`")))?;
        let p: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in `{spec}`")))?;
        Self::power(p)
    }

    /// Declares the limit `Λ(0⁺)`, needed by the envelope at `ω = 0`.
    pub fn with_lambda_zero(mut self, value: f64) -> Self {
        self.lambda_zero = Some(value);
        self
    }

    /// The density `λ F`, which has the same `Λ`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let (f, df, d2f) = (
            self.eval.clone(),
            self.deriv.clone(),
            self.second_deriv.clone(),
        );
        let mut d = Self::custom(
            format!("{factor}*{}", self.label),
            move |s| factor * f(s),
            move |s| factor * df(s),
            move |s| factor * d2f(s),
            self.lambda_lo,
            self.lambda_hi,
            self.small_exponent,
            factor * self.small_coeff,
        )?;
        d.lambda_zero = self.lambda_zero;
        Ok(d)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lambda_lo(&self) -> f64 {
        self.lambda_lo
    }

    pub fn lambda_hi(&self) -> f64 {
        self.lambda_hi
    }

    pub fn small_exponent(&self) -> f64 {
        self.small_exponent
    }

    pub fn small_coeff(&self) -> f64 {
        self.small_coeff
    }

    pub fn lambda_zero(&self) -> Option<f64> {
        self.lambda_zero
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    #[inline]
    pub fn deriv(&self, s: f64) -> f64 {
        (self.deriv)(s)
    }

    #[inline]
    pub fn second_deriv(&self, s: f64) -> f64 {
        (self.second_deriv)(s)
    }

    /// `Λ(s) = s F''(s) / F'(s)`.
    pub fn lambda(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("lambda needs s > 0, got {s}")));
        }
        let d = self.deriv(s);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::DegenerateDensity(format!("F'({s}) = {d}")));
        }
        Ok(s * self.second_deriv(s) / d)
    }

    /// `(Λ(s) - 1) / (Λ(s) + 1)`, the coefficient of the nonlinear system.
    pub fn system_coefficient(&self, s: f64) -> Result<f64> {
        let l = self.lambda(s)?;
        Ok((l - 1.0) / (l + 1.0))
    }

    /// `max[(Λ⁺-1)/(Λ⁺+1), (1-Λ⁻)/(1+Λ⁻)]`, a uniform bound on `|(Λ-1)/(Λ+1)|`.
    pub fn dilatation_bound(&self) -> f64 {
        let hi = (self.lambda_hi - 1.0) / (self.lambda_hi + 1.0);
        let lo = (1.0 - self.lambda_lo) / (1.0 + self.lambda_lo);
        hi.max(lo)
    }

    /// Quasiregularity constant `K = max[Λ⁺, 1/Λ⁻]`.
    pub fn quasiregularity_constant(&self) -> f64 {
        self.lambda_hi.max(1.0 / self.lambda_lo)
    }

    pub fn complex_hessian(&self, w: Complex64) -> Result<ComplexHessian> {
        let s = w.norm();
        if !(s >= W_MIN) {
            return Err(Error::SingularPoint(format!(
                "complex Hessian requested at |w| = {s:e} < {W_MIN:e}"
            )));
        }
        let fp = self.deriv(s);
        let sfpp = s * self.second_deriv(s);
        let phase = w * w / (s * s);
        Ok(ComplexHessian {
            h_wbar: w * (fp / (2.0 * s)),
            h_wbar_w: (sfpp + fp) / (4.0 * s),
            h_wbar_wbar: phase * ((sfpp - fp) / (4.0 * s)),
        })
    }

    /// Inverse of `F'`, i.e. `G'(t)` for the Young conjugate `G`.
    ///
    /// Geometric bracket growth from `[0, max(1, t^{1/Λ⁻})]`, bisection down
    /// to a coarse bracket, then safeguarded Newton polishing.
    pub fn inverse_derivative(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        if t <= 0.0 {
            return 0.0;
        }
        if t.is_infinite() {
            return f64::INFINITY;
        }
        let mut lo = 0.0_f64;
        let mut hi = t.powf(1.0 / self.lambda_lo).max(1.0);
        let mut grow = 0;
        while self.deriv(hi) < t {
            lo = hi;
            hi *= 2.0;
            grow += 1;
            if grow > 4000 || !hi.is_finite() {
                return f64::NAN;
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-3 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.deriv(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut s = 0.5 * (lo + hi);
        for _ in 0..100 {
            let r = self.deriv(s) - t;
            if r == 0.0 {
                return s;
            }
            if r < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let slope = self.second_deriv(s);
            let mut next = s - r / slope;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let done = (next - s).abs() <= 1e-12 * next.abs() || hi - lo <= 4.0 * f64::EPSILON * hi;
            s = next;
            if done {
                break;
            }
        }
        s
    }

    /// The Young conjugate `G(t) = sup_s {ts - F(s)}` with `G' = (F')⁻¹`.
    pub fn young_conjugate(&self) -> Result<Density> {
        let grid = geometric_grid(1e-6, 1e6, 241);
        let mut prev = self.deriv(grid[0]);
        if !(prev >= 0.0) {
            return Err(Error::InvalidDensity(format!(
                "F'({}) = {prev} is not a valid slope",
                grid[0]
            )));
        }
        for &s in &grid[1..] {
            let d = self.deriv(s);
            if !(d > prev) {
                return Err(Error::InvalidDensity(format!(
                    "F' is not strictly increasing near s = {s}"
                )));
            }
            prev = d;
        }

        let (inv_a, inv_b, inv_c) = (self.clone(), self.clone(), self.clone());
        let mut g = Density::custom(
            format!("conjugate({})", self.label),
            move |t| {
                let s = inv_a.inverse_derivative(t);
                if s == 0.0 {
                    0.0
                } else {
                    t * s - inv_a.eval(s)
                }
            },
            move |t| inv_b.inverse_derivative(t),
            move |t| 1.0 / inv_c.second_deriv(inv_c.inverse_derivative(t)),
            1.0 / self.lambda_hi,
            1.0 / self.lambda_lo,
            1.0 / self.small_exponent,
            self.small_coeff.powf(-1.0 / self.small_exponent),
        )?;
        g.lambda_zero = self.lambda_zero.map(|l| 1.0 / l);
        Ok(g)
    }

    /// Spot-checks the density hypotheses on a geometric grid in `[1e-6, 1e6]`.
    pub fn validate(&self, sample_count: usize) -> ValidationReport {
        let n = sample_count.max(16);
        let grid = geometric_grid(1e-6, 1e6, n);
        let mut failures = Vec::new();

        let f0 = self.eval(0.0);
        if !(f0.abs() <= 1e-12) {
            failures.push(format!("F(0) = {f0} is not 0"));
        }
        let s_min = grid[0];
        let bound = self.deriv(1.0) * s_min.powf(self.lambda_lo) * (1.0 + 1e-6);
        let d_min = self.deriv(s_min);
        if !(d_min >= 0.0 && d_min <= bound) {
            failures.push(format!(
                "F'(0+) does not vanish: F'({s_min:e}) = {d_min:e} exceeds {bound:e}"
            ));
        }

        let tol = 1e-9 * (1.0 + self.lambda_hi);
        let mut lambda_min = f64::INFINITY;
        let mut lambda_max = f64::NEG_INFINITY;
        let mut worst = 0.0_f64;
        let mut convex_fail = None;
        let mut lambda_fail = None;
        let mut growth_fail = None;
        let mut prev_f = self.eval(grid[0]);
        for (k, &s) in grid.iter().enumerate() {
            let fpp = self.second_deriv(s);
            if convex_fail.is_none() && !(fpp > 0.0) {
                convex_fail = Some(if fpp == 0.0 {
                    format!("F''=0 at s={s:e}: not strictly convex")
                } else {
                    format!("F''={fpp:e} at s={s:e}: not strictly convex")
                });
            }
            match self.lambda(s) {
                Ok(l) => {
                    lambda_min = lambda_min.min(l);
                    lambda_max = lambda_max.max(l);
                    let v = (self.lambda_lo - l).max(l - self.lambda_hi).max(0.0);
                    worst = worst.max(v);
                    if v > tol && lambda_fail.is_none() {
                        lambda_fail = Some(format!(
                            "Lambda({s:e}) = {l} outside [{}, {}]",
                            self.lambda_lo, self.lambda_hi
                        ));
                    }
                }
                Err(e) => {
                    if lambda_fail.is_none() {
                        lambda_fail = Some(e.to_string());
                    }
                    worst = f64::INFINITY;
                }
            }
            if k > 0 {
                let f = self.eval(s);
                if growth_fail.is_none() && !(f > prev_f) {
                    growth_fail = Some(format!("F is not increasing at s={s:e}"));
                }
                prev_f = f;
            }
        }
        let f_top = self.eval(*grid.last().unwrap_or(&1.0));
        if growth_fail.is_none() && !(f_top > 1e3 * self.eval(1.0)) {
            growth_fail = Some(format!("F does not grow: F(1e6) = {f_top:e}"));
        }
        failures.extend(convex_fail);
        failures.extend(lambda_fail);
        failures.extend(growth_fail);

        ValidationReport {
            label: self.label.clone(),
            samples: n,
            passed: failures.is_empty(),
            failures,
            lambda_min,
            lambda_max,
            worst_violation: worst,
        }
    }
}

fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..n)
        .map(|k| lo * (ratio * k as f64 / (n - 1) as f64).exp())
        .collect()
}
