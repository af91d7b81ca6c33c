//! Radius sweeps of the means, linear extrapolation to `r → 0⁺`, and
//! per-point verdicts comparing sweep limits against analytic residuals.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::geometry::{
    default_fd_step, wirtinger_jet, CircleQuadrature, ComplexField, DEFAULT_CIRCLE_NODES,
};
use crate::means::{self, MeanStatus, SolverConfig};
use crate::pdesystem::{cr_residual, SystemCoeff, F_MIN};

/// Which quantity a sweep samples at each radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeanKind {
    /// `c^F(f, r)(z)`.
    CF,
    /// `c^J(g, r)(z)`.
    CJ,
    /// The ∞-mean.
    Infinity,
    /// `(μ^G(f, r)(z) - f(z)) / r`.
    MuGSlope,
    /// `μ^G(f, r)(z) - f(z)`.
    MuGMinusF,
}

impl MeanKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeanKind::CF => "cf",
            MeanKind::CJ => "cj",
            MeanKind::Infinity => "infinity",
            MeanKind::MuGSlope => "mug-slope",
            MeanKind::MuGMinusF => "mug-minus-f",
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "cf" => MeanKind::CF,
            "cj" => MeanKind::CJ,
            "infinity" => MeanKind::Infinity,
            "mug-slope" => MeanKind::MuGSlope,
            "mug-minus-f" => MeanKind::MuGMinusF,
            other => return Err(Error::Parse(format!("unknown mean kind `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub r0: f64,
    pub ratio: f64,
    pub count: usize,
    /// When set, the first radius is capped at `scale_fraction·ℓ`, where
    /// `ℓ = |f(z)| / (|f_z| + |f_z̄|)` is the length over which the field
    /// changes by its own size.
    pub scale_fraction: Option<f64>,
    pub circle_nodes: usize,
    pub solver: SolverConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            r0: 0.1,
            ratio: 0.5,
            count: 8,
            scale_fraction: Some(0.005),
            circle_nodes: DEFAULT_CIRCLE_NODES,
            solver: SolverConfig::default(),
        }
    }
}

impl SweepConfig {
    fn check(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(Error::InvalidSweep(format!(
                "r0 must be positive, got {}",
                self.r0
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidSweep(format!(
                "ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if self.count < 4 {
            return Err(Error::InvalidSweep(format!(
                "need at least 4 radii, got {}",
                self.count
            )));
        }
        if let Some(s) = self.scale_fraction {
            if !(s > 0.0) {
                return Err(Error::InvalidSweep(format!(
                    "scale_fraction must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }

    /// First radius after the length-scale cap.
    pub fn start_radius(&self, length_scale: f64) -> f64 {
        match self.scale_fraction {
            Some(s) if length_scale > 0.0 && length_scale.is_finite() => {
                self.r0.min(s * length_scale)
            }
            _ => self.r0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub r: f64,
    pub value: Complex64,
    pub foc_residual: f64,
    pub status: MeanStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSweep {
    pub kind: MeanKind,
    pub center: Complex64,
    pub length_scale: f64,
    /// Every attempted radius, failed ones included.
    pub samples: Vec<SweepSample>,
    pub failures: Vec<(f64, String)>,
}

impl RadiusSweep {
    /// Radii and values of the successful samples.
    pub fn successful(&self) -> (Vec<f64>, Vec<Complex64>) {
        self.samples
            .iter()
            .filter(|s| s.status.is_ok() && s.value.re.is_finite() && s.value.im.is_finite())
            .map(|s| (s.r, s.value))
            .unzip()
    }

    /// The real sweep `Re(ξ̄·value)`.
    pub fn project(&self, xi: Complex64) -> RadiusSweep {
        let mut out = self.clone();
        for s in &mut out.samples {
            s.value = Complex64::new((xi.conj() * s.value).re, 0.0);
        }
        out
    }
}

/// `|f(z)| / (|f_z| + |f_z̄|)` from a finite-difference jet.
pub fn length_scale<F: ComplexField + ?Sized>(f: &F, z: Complex64) -> f64 {
    let j = wirtinger_jet(f, z, default_fd_step(z));
    let grad = j.sigma.norm() + j.tau.norm();
    if !j.is_valid() {
        return f64::NAN;
    }
    if grad == 0.0 {
        f64::INFINITY
    } else {
        j.omega.norm() / grad
    }
}

/// Samples the mean of kind `kind` at `r_k = r₀'·ρ^k`.
pub fn sweep<F: ComplexField + ?Sized>(
    kind: MeanKind,
    f: &F,
    z: Complex64,
    d: &Density,
    cfg: &SweepConfig,
) -> Result<RadiusSweep> {
    cfg.check()?;
    let conj = match kind {
        MeanKind::CJ => Some(d.young_conjugate()?),
        _ => None,
    };
    let ell = match &conj {
        Some(g) => {
            let transformed = |w: Complex64| {
                let v = f.eval(w);
                let m = v.norm();
                if m > 0.0 {
                    v * (g.deriv(m) / m)
                } else {
                    v
                }
            };
            length_scale(&transformed, z)
        }
        None => length_scale(f, z),
    };
    let r_start = cfg.start_radius(ell);
    let fz = f.eval(z);

    let mut samples = Vec::with_capacity(cfg.count);
    let mut failures = Vec::new();
    for k in 0..cfg.count {
        let r = r_start * cfg.ratio.powi(k as i32);
        let outcome = CircleQuadrature::new(z, r, cfg.circle_nodes).and_then(|q| match kind {
            MeanKind::CF => means::circle_mean_cf(f, d, &q, &cfg.solver)
                .map(|m| (m.minimizer, m.foc_residual, m.status)),
            MeanKind::CJ => {
                means::c_j_mean_with(f, d, conj.as_ref().expect("conjugate"), &q, &cfg.solver)
                    .map(|m| (m.minimizer, m.foc_residual, m.status))
            }
            MeanKind::Infinity => means::infinity_mean(f, &q).map(|m| {
                let status = if m.support_count >= 2 || m.max_modulus == 0.0 {
                    MeanStatus::Converged
                } else {
                    MeanStatus::Failed
                };
                (m.center, 0.0, status)
            }),
            MeanKind::MuGSlope | MeanKind::MuGMinusF => means::pair_mean_g(f, d, &q, &cfg.solver)
                .map(|pm| {
                    let diff = pm.mu - fz;
                    let value = if kind == MeanKind::MuGSlope {
                        diff / r
                    } else {
                        diff
                    };
                    let foc = pm.a_diag.foc_residual.max(pm.b_diag.foc_residual);
                    (value, foc, pm.status())
                }),
        });
        match outcome {
            Ok((value, foc_residual, status)) => {
                if status == MeanStatus::Failed {
                    failures.push((r, "solver did not converge".to_string()));
                }
                samples.push(SweepSample {
                    r,
                    value,
                    foc_residual,
                    status,
                });
            }
            Err(e) => {
                failures.push((r, e.to_string()));
                samples.push(SweepSample {
                    r,
                    value: Complex64::new(f64::NAN, f64::NAN),
                    foc_residual: f64::NAN,
                    status: MeanStatus::Failed,
                });
            }
        }
    }
    let out = RadiusSweep {
        kind,
        center: z,
        length_scale: ell,
        samples,
        failures,
    };
    let successes = out.successful().0.len();
    if successes < 4 {
        return Err(Error::InsufficientData {
            successes,
            required: 4,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolConfig {
    pub limit_tol: f64,
    pub fit_rel: f64,
    /// Absolute floor added to the relative fit tolerance, so that sweeps
    /// whose values are pure rounding noise are not declared inconclusive.
    pub fit_abs: f64,
}

impl Default for TolConfig {
    fn default() -> Self {
        Self {
            limit_tol: 1e-4,
            fit_rel: 1e-3,
            fit_abs: 5e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Vanishes,
    ConvergesNonzero,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Vanishes => "vanishes",
            Verdict::ConvergesNonzero => "converges_nonzero",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub limit: Complex64,
    pub slope: Complex64,
    /// RMS deviation from the fitted line.
    pub fit_residual: f64,
    pub fit_tol: f64,
    pub verdict: Verdict,
}

/// Least-squares fit of `value ≈ c₀ + c₁·r` over the successful samples.
pub fn extrapolate(s: &RadiusSweep, tol: &TolConfig) -> Result<LimitEstimate> {
    let (radii, values) = s.successful();
    extrapolate_values(&radii, &values, tol)
}

pub fn extrapolate_values(
    radii: &[f64],
    values: &[Complex64],
    tol: &TolConfig,
) -> Result<LimitEstimate> {
    let n = radii.len();
    if n != values.len() {
        return Err(Error::InvalidSweep(
            "radii and values differ in length".into(),
        ));
    }
    if n < 4 {
        return Err(Error::InsufficientData {
            successes: n,
            required: 4,
        });
    }
    let nf = n as f64;
    let r_mean = radii.iter().sum::<f64>() / nf;
    let srr: f64 = radii.iter().map(|r| (r - r_mean).powi(2)).sum();
    let scale: f64 = radii.iter().map(|r| r * r).sum();
    if !(srr > 1e-20 * scale) {
        return Err(Error::InvalidSweep("radii are degenerate".into()));
    }
    let v_mean = values.iter().sum::<Complex64>() / nf;
    let srv: Complex64 = radii
        .iter()
        .zip(values)
        .map(|(r, v)| (v - v_mean) * (r - r_mean))
        .sum();
    let slope = srv / srr;
    let limit = v_mean - slope * r_mean;
    let fit_residual = (radii
        .iter()
        .zip(values)
        .map(|(r, v)| (v - limit - slope * *r).norm_sqr())
        .sum::<f64>()
        / nf)
        .sqrt();
    let vmax = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let fit_tol = tol.fit_rel * vmax + tol.fit_abs;
    let verdict = if fit_residual > fit_tol {
        Verdict::Inconclusive
    } else if limit.norm() <= tol.limit_tol {
        Verdict::Vanishes
    } else {
        Verdict::ConvergesNonzero
    };
    Ok(LimitEstimate {
        limit,
        slope,
        fit_residual,
        fit_tol,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyConfig {
    pub sweep: SweepConfig,
    pub tol: TolConfig,
}

/// Outcome of a verdict at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointVerdict {
    pub point: Complex64,
    /// `None` when the point could not be tested.
    pub estimate: Option<LimitEstimate>,
    /// Analytic prediction of the limit from the finite-difference jet.
    pub predicted: Option<Complex64>,
    /// Whether the sweep verdict and the analytic verdict coincide.
    pub agree: bool,
    pub note: Option<String>,
}

impl PointVerdict {
    fn untestable(point: Complex64, note: String) -> Self {
        Self {
            point,
            estimate: None,
            predicted: None,
            agree: true,
            note: Some(note),
        }
    }

    pub fn is_testable(&self) -> bool {
        self.estimate.is_some()
    }

    /// Sweep verdict says the limit vanishes.
    pub fn vanishes(&self) -> bool {
        matches!(self.estimate, Some(e) if e.verdict == Verdict::Vanishes)
    }

    pub fn label(&self) -> &'static str {
        match self.estimate {
            None => "untestable",
            Some(e) => e.verdict.as_str(),
        }
    }
}

fn judge(
    point: Complex64,
    sweep_result: Result<RadiusSweep>,
    predicted: Complex64,
    tol: &TolConfig,
) -> PointVerdict {
    let estimate = match sweep_result.and_then(|s| extrapolate(&s, tol)) {
        Ok(e) => e,
        Err(e) => {
            return PointVerdict {
                point,
                estimate: None,
                predicted: Some(predicted),
                agree: false,
                note: Some(e.to_string()),
            }
        }
    };
    let analytic_vanishes = predicted.norm() <= tol.limit_tol;
    let agree = match estimate.verdict {
        Verdict::Vanishes => analytic_vanishes,
        Verdict::ConvergesNonzero => !analytic_vanishes,
        Verdict::Inconclusive => false,
    };
    PointVerdict {
        point,
        estimate: Some(estimate),
        predicted: Some(predicted),
        agree,
        note: None,
    }
}

/// Tests the `c^J` limit at each point; it vanishes exactly where `g` is holomorphic.
pub fn holomorphy_verdict<F: ComplexField + ?Sized>(
    g: &F,
    points: &[Complex64],
    d: &Density,
    cfg: &VerifyConfig,
) -> Result<Vec<PointVerdict>> {
    let conj = d.young_conjugate()?;
    Ok(points
        .par_iter()
        .map(|&z| {
            let jet = wirtinger_jet(g, z, default_fd_step(z));
            let m = jet.omega.norm();
            if !(m >= F_MIN) || !jet.is_valid() {
                return PointVerdict::untestable(z, format!("|g| = {m:e} too small"));
            }
            let s = conj.deriv(m);
            let lambda = match d.lambda(s) {
                Ok(l) => l,
                Err(e) => return PointVerdict::untestable(z, e.to_string()),
            };
            let predicted = jet.tau * (2.0 / (1.0 + lambda) * s / m);
            judge(
                z,
                sweep(MeanKind::CJ, g, z, d, &cfg.sweep),
                predicted,
                &cfg.tol,
            )
        })
        .collect())
}

/// Tests the `c^F` limit against the system residual of the jet.
pub fn system_verdict<F: ComplexField + ?Sized>(
    f: &F,
    points: &[Complex64],
    d: &Density,
    cfg: &VerifyConfig,
) -> Result<Vec<PointVerdict>> {
    let sc = SystemCoeff::new(d.clone());
    Ok(points
        .par_iter()
        .map(|&z| {
            let jet = wirtinger_jet(f, z, default_fd_step(z));
            match cr_residual(&jet, &sc) {
                Ok(res) => judge(z, sweep(MeanKind::CF, f, z, d, &cfg.sweep), res, &cfg.tol),
                Err(e) => PointVerdict::untestable(z, e.to_string()),
            }
        })
        .collect())
}

/// Tests `(μ^G - f)/r → 0` against the residual bracket of the jet.
pub fn amvp_verdict<F: ComplexField + ?Sized>(
    f: &F,
    points: &[Complex64],
    d: &Density,
    cfg: &VerifyConfig,
) -> Result<Vec<PointVerdict>> {
    let sc = SystemCoeff::new(d.clone());
    Ok(points
        .par_iter()
        .map(|&z| {
            let jet = wirtinger_jet(f, z, default_fd_step(z));
            match cr_residual(&jet, &sc) {
                Ok(res) => judge(
                    z,
                    sweep(MeanKind::MuGSlope, f, z, d, &cfg.sweep),
                    res,
                    &cfg.tol,
                ),
                Err(e) => PointVerdict::untestable(z, e.to_string()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldSpec;
    use crate::geometry::Jet;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn synthetic(f: impl Fn(f64) -> Complex64) -> (Vec<f64>, Vec<Complex64>) {
        let radii: Vec<f64> = (0..8).map(|k| 0.1 * 0.5f64.powi(k)).collect();
        let values = radii.iter().map(|&r| f(r)).collect();
        (radii, values)
    }

    #[test]
    fn exact_linear_data() {
        let (r, v) = synthetic(|r| c(0.3 + 2.0 * r, 0.0));
        let e = extrapolate_values(&r, &v, &TolConfig::default()).unwrap();
        assert!((e.limit - 0.3).norm() < 1e-14 && (e.slope - 2.0).norm() < 1e-12);
        assert_eq!(e.verdict, Verdict::ConvergesNonzero);
        let (r, v) = synthetic(|_| c(0.0, 0.0));
        assert_eq!(
            extrapolate_values(&r, &v, &TolConfig::default())
                .unwrap()
                .verdict,
            Verdict::Vanishes
        );
    }

    #[test]
    fn degenerate_and_short_sweeps() {
        let r = vec![0.1; 5];
        let v = vec![c(1.0, 0.0); 5];
        assert!(matches!(
            extrapolate_values(&r, &v, &TolConfig::default()),
            Err(Error::InvalidSweep(_))
        ));
        let r = vec![0.1, 0.05, 0.025];
        let v = vec![c(1.0, 0.0); 3];
        assert!(matches!(
            extrapolate_values(&r, &v, &TolConfig::default()),
            Err(Error::InsufficientData { successes: 3, .. })
        ));
    }

    #[test]
    fn noisy_data_is_inconclusive() {
        let (r, v) = synthetic(|r| c(if (r * 1e3) as i64 % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
        assert_eq!(
            extrapolate_values(&r, &v, &TolConfig::default())
                .unwrap()
                .verdict,
            Verdict::Inconclusive
        );
    }

    #[test]
    fn sweep_examples() {
        let d2 = Density::power(2.0).unwrap();
        let cfg = SweepConfig::default();
        let s = sweep(MeanKind::CF, &FieldSpec::Exp, c(0.3, 0.0), &d2, &cfg).unwrap();
        let e = extrapolate(&s, &TolConfig::default()).unwrap();
        assert_eq!(e.verdict, Verdict::Vanishes, "{e:?}");

        let s = sweep(
            MeanKind::CF,
            &FieldSpec::Const(c(1.0, 0.0)),
            c(0.3, 0.0),
            &d2,
            &cfg,
        )
        .unwrap();
        assert!(s.samples.iter().all(|x| x.value.norm() <= 1e-12));

        let f = |w: Complex64| w.exp() + w.conj() * 0.5;
        let s = sweep(
            MeanKind::MuGMinusF,
            &f,
            c(0.2, 0.1),
            &Density::power(3.0).unwrap(),
            &cfg,
        )
        .unwrap();
        for x in &s.samples {
            assert!(x.value.norm() < 2.0 * x.r, "{x:?}");
        }
    }

    #[test]
    fn vanishing_infinity_limit_has_constant_modulus() {
        let d = Density::power(2.0).unwrap();
        let tol = TolConfig::default();
        let phase = |w: Complex64| w / w.norm() * 1.5;
        let points: Vec<Complex64> = (0..12)
            .map(|k| Complex64::from_polar(0.4 + 0.1 * k as f64, 0.7 * k as f64))
            .collect();
        for &z in &points {
            let s = sweep(MeanKind::Infinity, &phase, z, &d, &SweepConfig::default()).unwrap();
            let e = extrapolate(&s, &tol).unwrap();
            assert_eq!(e.verdict, Verdict::Vanishes, "{e:?}");
        }
        let moduli: Vec<f64> = points.iter().map(|&z| phase(z).norm()).collect();
        assert!(moduli.iter().all(|m| (m - 1.5).abs() <= 1e-14));

        for &z in &points {
            let j = crate::geometry::wirtinger_jet(
                &FieldSpec::Exp,
                z,
                crate::geometry::default_fd_step(z),
            );
            let limit = j.tau + j.omega / j.omega.conj() * j.sigma.conj();
            let dbar_mod_sq = j.omega.conj() * j.tau + j.omega * j.sigma.conj();
            assert!((dbar_mod_sq - j.omega.conj() * limit).norm() <= 1e-12);
            let s = sweep(
                MeanKind::Infinity,
                &FieldSpec::Exp,
                z,
                &d,
                &SweepConfig::default(),
            )
            .unwrap();
            assert_eq!(
                extrapolate(&s, &tol).unwrap().verdict,
                Verdict::ConvergesNonzero
            );
        }
    }

    #[test]
    fn affine_p4_limit() {
        let jet = Jet::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let s = sweep(
            MeanKind::CF,
            &jet,
            c(0.0, 0.0),
            &Density::power(4.0).unwrap(),
            &SweepConfig::default(),
        )
        .unwrap();
        let e = extrapolate(&s, &TolConfig::default()).unwrap();
        assert!((e.limit - 0.5).norm() <= 1e-4, "{e:?}");
        assert_eq!(e.verdict, Verdict::ConvergesNonzero);
    }

    #[test]
    fn sweep_rejects_bad_config() {
        let d = Density::power(2.0).unwrap();
        let cfg = SweepConfig {
            count: 3,
            ..SweepConfig::default()
        };
        assert!(matches!(
            sweep(MeanKind::CF, &FieldSpec::Exp, c(0.0, 0.0), &d, &cfg),
            Err(Error::InvalidSweep(_))
        ));
    }

    #[test]
    fn sweep_through_zero_is_insufficient() {
        let d = Density::power(3.0).unwrap();
        let cfg = SweepConfig {
            scale_fraction: None,
            ..SweepConfig::default()
        };
        let r = sweep(
            MeanKind::CJ,
            &|w: Complex64| c(w.im, 0.0),
            c(0.5, 0.0),
            &d,
            &cfg,
        );
        assert!(
            matches!(r, Err(Error::InsufficientData { successes: 0, .. })),
            "{r:?}"
        );
    }

    #[test]
    fn verdict_examples() {
        let cfg = VerifyConfig::default();
        let d3 = Density::power(3.0).unwrap();
        let v = holomorphy_verdict(&|w: Complex64| w * w + 1.0, &[c(1.0, 0.0)], &d3, &cfg).unwrap();
        assert!(v[0].vanishes() && v[0].agree, "{v:?}");

        let d2 = Density::power(2.0).unwrap();
        let v = holomorphy_verdict(&FieldSpec::Conj, &[c(2.0, 0.0)], &d2, &cfg).unwrap();
        let e = v[0].estimate.unwrap();
        assert_eq!(e.verdict, Verdict::ConvergesNonzero);
        assert!((e.limit - 1.0).norm() < 1e-3 && v[0].agree);

        let v = system_verdict(&FieldSpec::Conj, &[c(0.5, 0.5)], &d2, &cfg).unwrap();
        assert!(!v[0].vanishes() && v[0].agree);
        assert!((v[0].predicted.unwrap() - 1.0).norm() < 1e-8);

        let v = system_verdict(
            &FieldSpec::PharmRadial(3.0),
            &[c(1.0, 0.0), c(0.5, -0.8)],
            &d3,
            &cfg,
        )
        .unwrap();
        assert!(v.iter().all(|p| p.vanishes() && p.agree), "{v:?}");

        let v = amvp_verdict(&FieldSpec::Square, &[c(0.4, 0.3)], &d2, &cfg).unwrap();
        assert!(v[0].vanishes() && v[0].agree, "{v:?}");
        let v = amvp_verdict(&FieldSpec::Conj, &[c(0.4, 0.3)], &d2, &cfg).unwrap();
        assert!((v[0].estimate.unwrap().limit - 1.0).norm() < 1e-3 && v[0].agree);
        let v = amvp_verdict(&FieldSpec::Const(c(2.0, 0.0)), &[c(0.4, 0.3)], &d2, &cfg).unwrap();
        assert!(v[0].vanishes());

        let v = system_verdict(&FieldSpec::Identity, &[c(0.0, 0.0)], &d2, &cfg).unwrap();
        assert!(!v[0].is_testable());
    }

    #[test]
    fn exp_holomorphic_for_p15() {
        let d = Density::power(1.5).unwrap();
        let pts: Vec<Complex64> = (0..10)
            .map(|k| Complex64::from_polar(0.3 + 0.1 * k as f64, 0.7 * k as f64))
            .collect();
        let v = holomorphy_verdict(&FieldSpec::Exp, &pts, &d, &VerifyConfig::default()).unwrap();
        assert!(v.iter().all(|p| p.vanishes() && p.agree), "{v:?}");
    }

    proptest! {
        #[test]
        fn quadratic_bias_bounded(c0 in -5.0..5.0f64, c1 in -5.0..5.0f64, c2 in -1.0..1.0f64) {
            let (r, v) = synthetic(|r| c(c0 + c1 * r + c2 * r * r, 0.0));
            let e = extrapolate_values(&r, &v, &TolConfig::default()).unwrap();
            prop_assert!((e.limit.re - c0).abs() <= 2e-2 * c2.abs() + 1e-12);
        }
    }
}
