//! Grid solver for the fixed-point equation `f = μ^G(f, r)` with Dirichlet
//! data prescribed on a strip around a rectangle.

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::geometry::{CircleQuadrature, ComplexField, Jet, DEFAULT_CIRCLE_NODES};
use crate::means::{pair_mean_g_values, SolverConfig};
use crate::pdesystem::F_MIN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeFlag {
    Interior,
    Strip,
    /// Near-zero node kept at its old value (`skip` policy).
    Skipped,
    /// Near-zero node excluded from further updates (`freeze` policy).
    Frozen,
    /// The mean solver failed here in the last step.
    Failed,
}

impl NodeFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeFlag::Interior => "interior",
            NodeFlag::Strip => "strip",
            NodeFlag::Skipped => "skipped",
            NodeFlag::Frozen => "frozen",
            NodeFlag::Failed => "failed",
        }
    }

    pub fn is_strip(&self) -> bool {
        *self == NodeFlag::Strip
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn unit_square() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.x_min..=self.x_max).contains(&z.re) && (self.y_min..=self.y_max).contains(&z.im)
    }

    /// Nearest point of the boundary; ties go to the left, right, bottom, top side in that order.
    pub fn boundary_projection(&self, z: Complex64) -> Complex64 {
        let x = z.re.clamp(self.x_min, self.x_max);
        let y = z.im.clamp(self.y_min, self.y_max);
        let d = [
            x - self.x_min,
            self.x_max - x,
            y - self.y_min,
            self.y_max - y,
        ];
        let mut k = 0;
        for i in 1..4 {
            if d[i] < d[k] {
                k = i;
            }
        }
        match k {
            0 => Complex64::new(self.x_min, y),
            1 => Complex64::new(self.x_max, y),
            2 => Complex64::new(x, self.y_min),
            _ => Complex64::new(x, self.y_max),
        }
    }
}

/// Lattice with spacing `h` covering a rectangle plus `layers` rows of strip
/// nodes on every side. Node `(i, j)` sits at
/// `(x_min + (i - layers)·h, y_min + (j - layers)·h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    rect: Rect,
    h: f64,
    layers: usize,
    nx: usize,
    ny: usize,
    values: Vec<Complex64>,
    flags: Vec<NodeFlag>,
}

fn cells(len: f64, h: f64) -> Result<usize> {
    let n = (len / h).round();
    if !(n >= 1.0) || (n * h - len).abs() > 1e-9 * len.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "side {len} is not a multiple of h = {h}"
        )));
    }
    Ok(n as usize)
}

impl GridField {
    /// Strip nodes take values from `boundary`, rectangle nodes from `interior`.
    /// The strip is at least `strip` wide.
    pub fn new<B, I>(rect: Rect, h: f64, strip: f64, boundary: &B, interior: &I) -> Result<Self>
    where
        B: ComplexField + ?Sized,
        I: ComplexField + ?Sized,
    {
        if !(h > 0.0 && h.is_finite()) || !(strip >= 0.0 && strip.is_finite()) {
            return Err(Error::InvalidParameter(format!("h = {h}, strip = {strip}")));
        }
        let cx = cells(rect.x_max - rect.x_min, h)?;
        let cy = cells(rect.y_max - rect.y_min, h)?;
        let layers = (strip / h).ceil() as usize + 1;
        let (nx, ny) = (cx + 1 + 2 * layers, cy + 1 + 2 * layers);
        let mut g = Self {
            rect,
            h,
            layers,
            nx,
            ny,
            values: vec![Complex64::new(0.0, 0.0); nx * ny],
            flags: vec![NodeFlag::Interior; nx * ny],
        };
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let z = g.node(i, j);
                if g.in_rect(i, j) {
                    g.values[k] = interior.eval(z);
                } else {
                    g.values[k] = boundary.eval(z);
                    g.flags[k] = NodeFlag::Strip;
                }
            }
        }
        if let Some((k, v)) = g
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Integration { node: k, value: *v });
        }
        Ok(g)
    }

    /// The same function on the rectangle and on the strip.
    pub fn from_fn<F: ComplexField + ?Sized>(
        rect: Rect,
        h: f64,
        strip: f64,
        f: &F,
    ) -> Result<Self> {
        Self::new(rect, h, strip, f, f)
    }

    fn in_rect(&self, i: usize, j: usize) -> bool {
        let (l, cx, cy) = (
            self.layers,
            self.nx - 2 * self.layers,
            self.ny - 2 * self.layers,
        );
        (l..l + cx).contains(&i) && (l..l + cy).contains(&j)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Distance from the rectangle covered by strip nodes, excluding the
    /// outermost layer kept for interpolation.
    pub fn strip_width(&self) -> f64 {
        (self.layers - 1) as f64 * self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let l = self.layers as f64;
        Complex64::new(
            self.rect.x_min + (i as f64 - l) * self.h,
            self.rect.y_min + (j as f64 - l) * self.h,
        )
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.nx + i]
    }

    pub fn flag(&self, i: usize, j: usize) -> NodeFlag {
        self.flags[j * self.nx + i]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn flags(&self) -> &[NodeFlag] {
        &self.flags
    }

    /// Linear indices of the rectangle nodes.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&k| !self.flags[k].is_strip())
            .collect()
    }

    /// Bilinear interpolation; exact at nodes, clamped to the lattice.
    pub fn interpolate(&self, z: Complex64) -> Complex64 {
        let l = self.layers as f64;
        let coord = |v: f64, lo: f64, n: usize| {
            let mut u = (v - lo) / self.h + l;
            if (u - u.round()).abs() <= 1e-9 {
                u = u.round();
            }
            let u = u.clamp(0.0, (n - 1) as f64);
            let i = (u.floor() as usize).min(n - 2);
            (i, u - i as f64)
        };
        let (i, s) = coord(z.re, self.rect.x_min, self.nx);
        let (j, t) = coord(z.im, self.rect.y_min, self.ny);
        let v = |a: usize, b: usize| self.values[b * self.nx + a];
        if s == 0.0 && t == 0.0 {
            return v(i, j);
        }
        (v(i, j) * (1.0 - s) + v(i + 1, j) * s) * (1.0 - t)
            + (v(i, j + 1) * (1.0 - s) + v(i + 1, j + 1) * s) * t
    }

    /// Central-difference jet at node `(i, j)`; `None` on the outer layer.
    pub fn jet(&self, i: usize, j: usize) -> Option<Jet> {
        if i == 0 || j == 0 || i + 1 >= self.nx || j + 1 >= self.ny {
            return None;
        }
        let fx = (self.value(i + 1, j) - self.value(i - 1, j)) / (2.0 * self.h);
        let fy = (self.value(i, j + 1) - self.value(i, j - 1)) / (2.0 * self.h);
        let iy = Complex64::new(0.0, 1.0) * fy;
        Some(Jet::new(
            self.value(i, j),
            (fx - iy) * 0.5,
            (fx + iy) * 0.5,
            self.node(i, j),
        ))
    }

    /// `sup |f - g|` over unflagged rectangle nodes.
    pub fn sup_error<F: ComplexField + ?Sized>(&self, g: &F) -> f64 {
        (0..self.values.len())
            .filter(|&k| self.flags[k] == NodeFlag::Interior)
            .map(|k| (self.values[k] - g.eval(self.node(k % self.nx, k / self.nx))).norm())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `x,y,re,im,flag`, one row per node.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,re,im,flag")?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (z, v) = (self.node(i, j), self.value(i, j));
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    z.re,
                    z.im,
                    v.re,
                    v.im,
                    self.flag(i, j).as_str()
                )?;
            }
        }
        Ok(())
    }
}

impl ComplexField for GridField {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.interpolate(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ZeroPolicy {
    #[default]
    Skip,
    Freeze,
}

impl ZeroPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZeroPolicy::Skip => "skip",
            ZeroPolicy::Freeze => "freeze",
        }
    }
}

impl std::str::FromStr for ZeroPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "skip" => Ok(ZeroPolicy::Skip),
            "freeze" => Ok(ZeroPolicy::Freeze),
            other => Err(Error::Parse(format!("unknown zero policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DppConfig {
    pub radius: f64,
    pub density: Density,
    pub theta: f64,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub zero_policy: ZeroPolicy,
    pub circle_nodes: usize,
    pub solver: SolverConfig,
}

impl DppConfig {
    pub fn new(radius: f64, density: Density) -> Self {
        Self {
            radius,
            density,
            theta: 0.8,
            max_iterations: 5000,
            residual_tol: 1e-10,
            zero_policy: ZeroPolicy::Skip,
            circle_nodes: DEFAULT_CIRCLE_NODES,
            solver: SolverConfig::default(),
        }
    }

    pub fn check(&self, g: &GridField) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} not in (0, 1]",
                self.theta
            )));
        }
        if !(self.radius >= 2.0 * g.h) {
            return Err(Error::InvalidParameter(format!(
                "r = {} < 2h = {}",
                self.radius,
                2.0 * g.h
            )));
        }
        if self.radius > g.strip_width() + 1e-12 * g.h {
            return Err(Error::InvalidParameter(format!(
                "r = {} exceeds strip width {}",
                self.radius,
                g.strip_width()
            )));
        }
        if !(self.residual_tol >= 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "residual_tol and max_iterations".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DppStatus {
    Converged,
    MaxIterations,
    Diverged,
}

impl DppStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DppStatus::Converged => "converged",
            DppStatus::MaxIterations => "max_iterations",
            DppStatus::Diverged => "diverged",
        }
    }
}

impl fmt::Display for DppStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DppReport {
    pub iterations: usize,
    /// `history[k]` is the residual of the k-th iterate; the returned field is
    /// the last one evaluated.
    pub history: Vec<f64>,
    pub status: DppStatus,
}

impl DppReport {
    pub fn final_residual(&self) -> f64 {
        self.history.last().copied().unwrap_or(f64::NAN)
    }
}

/// One Jacobi pass: the next iterate and the residual of `field`.
fn pass(field: &GridField, cfg: &DppConfig) -> Result<(GridField, f64)> {
    cfg.check(field)?;
    // The means only see offsets, radius and weights, so one rule serves every node.
    let q = CircleQuadrature::new(Complex64::new(0.0, 0.0), cfg.radius, cfg.circle_nodes)?;
    let idx = field.interior_indices();
    let updates: Vec<(Complex64, NodeFlag, Option<f64>)> = idx
        .par_iter()
        .map(|&k| {
            let old = field.values[k];
            if field.flags[k] == NodeFlag::Frozen {
                return (old, NodeFlag::Frozen, None);
            }
            let near_zero = !(old.norm() >= F_MIN);
            if near_zero && cfg.zero_policy == ZeroPolicy::Freeze {
                return (old, NodeFlag::Frozen, None);
            }
            let z = field.node(k % field.nx, k / field.nx);
            let samples: Vec<Complex64> = q
                .offsets()
                .iter()
                .map(|o| field.interpolate(z + o))
                .collect();
            match pair_mean_g_values(&samples, &cfg.density, &q, &cfg.solver) {
                Ok(pm) if pm.status().is_ok() => {
                    let res = (old - pm.mu).norm();
                    if near_zero {
                        (old, NodeFlag::Skipped, Some(res))
                    } else {
                        (
                            old * (1.0 - cfg.theta) + pm.mu * cfg.theta,
                            NodeFlag::Interior,
                            Some(res),
                        )
                    }
                }
                _ => (old, NodeFlag::Failed, None),
            }
        })
        .collect();
    let mut next = field.clone();
    let mut residual = 0.0f64;
    for (&k, &(v, flag, res)) in idx.iter().zip(&updates) {
        next.values[k] = v;
        next.flags[k] = flag;
        if let Some(res) = res {
            residual = residual.max(res);
        }
    }
    Ok((next, residual))
}

/// `f_new = (1-θ)f + θ·μ^G(f, r)` at every rectangle node; strip values are unchanged.
pub fn dpp_step(field: &GridField, cfg: &DppConfig) -> Result<GridField> {
    pass(field, cfg).map(|(g, _)| g)
}

/// `sup |f - μ^G(f, r)|` over rectangle nodes whose mean was computed.
pub fn dpp_residual(field: &GridField, cfg: &DppConfig) -> Result<f64> {
    pass(field, cfg).map(|(_, r)| r)
}

const DIVERGENCE_WINDOW: usize = 50;
const DIVERGENCE_FACTOR: f64 = 10.0;

/// The last residual is not finite, or exceeds ten times the one fifty iterations earlier.
fn diverging(history: &[f64]) -> bool {
    let n = history.len();
    match history.last() {
        None => false,
        Some(r) if !r.is_finite() => true,
        Some(&r) => {
            n > DIVERGENCE_WINDOW && r > DIVERGENCE_FACTOR * history[n - 1 - DIVERGENCE_WINDOW]
        }
    }
}

pub fn dpp_solve(init: &GridField, cfg: &DppConfig) -> Result<(GridField, DppReport)> {
    dpp_solve_observed(init, cfg, |_, _, _| {})
}

/// As [`dpp_solve`], calling `observe(k, f_k, residual(f_k))` for every iterate.
pub fn dpp_solve_observed<O>(
    init: &GridField,
    cfg: &DppConfig,
    mut observe: O,
) -> Result<(GridField, DppReport)>
where
    O: FnMut(usize, &GridField, f64),
{
    let mut cur = init.clone();
    let mut history = Vec::new();
    let mut status = DppStatus::MaxIterations;
    for k in 0..cfg.max_iterations {
        let (next, res) = pass(&cur, cfg)?;
        observe(k, &cur, res);
        history.push(res);
        if res <= cfg.residual_tol {
            status = DppStatus::Converged;
            break;
        }
        if diverging(&history) {
            status = DppStatus::Diverged;
            break;
        }
        cur = next;
    }
    let report = DppReport {
        iterations: history.len(),
        history,
        status,
    };
    Ok((cur, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldSpec;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_rect() -> Rect {
        Rect::new(0.5, 1.0, 0.0, 0.5)
    }

    #[test]
    fn constant_data_is_a_fixed_point() {
        let k = c(2.0, -1.0);
        for p in [1.5, 2.0, 4.0] {
            let g = GridField::from_fn(small_rect(), 0.05, 0.1, &|_| k).unwrap();
            let cfg = DppConfig::new(0.1, Density::power(p).unwrap());
            let next = dpp_step(&g, &cfg).unwrap();
            assert!(next.values().iter().all(|v| (v - k).norm() <= 1e-12));
            let (f, rep) = dpp_solve(&g, &cfg).unwrap();
            assert_eq!(rep.status, DppStatus::Converged);
            assert!(rep.iterations <= 2 && rep.history.len() == rep.iterations);
            assert!(f.values().iter().all(|v| (v - k).norm() <= 1e-10));
        }
    }

    #[test]
    fn one_step_residual_on_square_is_second_order() {
        // Bilinear error is at most (h²/8)(|f_xx| + |f_yy|) = h²/2 for ζ², and
        // the p = 2 mean is a + r·b with |a|, |r·b| each at most the sup of the samples.
        let cfg = DppConfig::new(0.1, Density::power(2.0).unwrap());
        for h in [0.05, 0.025] {
            let g = GridField::from_fn(small_rect(), h, 0.1, &FieldSpec::Square).unwrap();
            let res = dpp_residual(&g, &cfg).unwrap();
            assert!(res <= h * h, "h = {h}: {res:e}");
        }
    }

    #[test]
    fn damping_does_not_move_fixed_points() {
        let g = GridField::from_fn(small_rect(), 0.05, 0.1, &FieldSpec::Exp).unwrap();
        let mut a = DppConfig::new(0.1, Density::power(3.0).unwrap());
        let mut b = a.clone();
        a.theta = 1.0;
        b.theta = 0.5;
        assert_eq!(dpp_residual(&g, &a).unwrap(), dpp_residual(&g, &b).unwrap());
        a.residual_tol = 1e-9;
        b.residual_tol = 1e-9;
        let (fa, ra) = dpp_solve(&g, &a).unwrap();
        let (fb, rb) = dpp_solve(&g, &b).unwrap();
        assert_eq!(
            (ra.status, rb.status),
            (DppStatus::Converged, DppStatus::Converged)
        );
        assert!(dpp_residual(&fb, &a).unwrap() <= 1e-9 && dpp_residual(&fa, &b).unwrap() <= 1e-9);
        let gap = fa
            .values()
            .iter()
            .zip(fb.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-6, "{gap:e}");
    }

    #[test]
    fn quadratic_density_step_is_linear() {
        let mut cfg = DppConfig::new(0.1, Density::power(2.0).unwrap());
        cfg.theta = 1.0;
        let f1 = |z: Complex64| z.exp();
        let f2 = |z: Complex64| z * z.conj() + c(1.0, 2.0);
        let sum = move |z: Complex64| f1(z) + f2(z);
        let step = |f: &(dyn Fn(Complex64) -> Complex64 + Sync)| {
            let g = GridField::from_fn(small_rect(), 0.05, 0.1, &|z| f(z)).unwrap();
            dpp_step(&g, &cfg).unwrap()
        };
        let (s1, s2, s12) = (step(&f1), step(&f2), step(&sum));
        for k in 0..s12.values().len() {
            assert!((s12.values()[k] - s1.values()[k] - s2.values()[k]).norm() <= 1e-10);
        }
    }

    #[test]
    fn perturbed_node_shows_in_residual() {
        let k = c(1.0, 1.0);
        let mut g = GridField::from_fn(small_rect(), 0.05, 0.1, &|_| k).unwrap();
        let (nx, ny) = g.dims();
        let mid = (ny / 2) * nx + nx / 2;
        let eps = 1e-3;
        g.values[mid] += eps;
        let mut cfg = DppConfig::new(0.1, Density::power(3.0).unwrap());
        let r1 = dpp_residual(&g, &cfg).unwrap();
        cfg.theta = 0.3;
        assert_eq!(dpp_residual(&g, &cfg).unwrap(), r1);
        assert!(r1 >= 0.5 * eps && r1 <= 2.0 * eps, "{r1:e}");
    }

    #[test]
    fn strip_is_untouched_and_flags_follow_zero_policy() {
        let rect = Rect::new(-0.5, 0.5, -0.5, 0.5);
        let g = GridField::from_fn(rect, 0.05, 0.1, &FieldSpec::Identity).unwrap();
        let mut cfg = DppConfig::new(0.1, Density::power(3.0).unwrap());
        let (nx, ny) = g.dims();
        let origin = (ny / 2) * nx + nx / 2;
        assert_eq!(g.node(nx / 2, ny / 2), c(0.0, 0.0));

        let next = dpp_step(&g, &cfg).unwrap();
        for k in 0..g.values().len() {
            if g.flags()[k].is_strip() {
                assert_eq!(next.values()[k], g.values()[k]);
            }
        }
        assert_eq!(next.flags()[origin], NodeFlag::Skipped);
        assert_eq!(next.values()[origin], c(0.0, 0.0));

        cfg.zero_policy = ZeroPolicy::Freeze;
        let next = dpp_step(&g, &cfg).unwrap();
        assert_eq!(next.flags()[origin], NodeFlag::Frozen);
        let again = dpp_step(&next, &cfg).unwrap();
        assert_eq!(again.flags()[origin], NodeFlag::Frozen);
    }

    #[test]
    fn config_checks() {
        let g = GridField::from_fn(Rect::unit_square(), 0.05, 0.1, &FieldSpec::Exp).unwrap();
        let d = Density::power(2.0).unwrap();
        assert!(DppConfig::new(0.1, d.clone()).check(&g).is_ok());
        assert!(DppConfig::new(0.05, d.clone()).check(&g).is_err());
        assert!(DppConfig::new(0.2, d.clone()).check(&g).is_err());
        let mut cfg = DppConfig::new(0.1, d);
        cfg.theta = 0.0;
        assert!(cfg.check(&g).is_err());
        cfg.theta = 1.5;
        assert!(dpp_step(&g, &cfg).is_err());
        assert!(
            GridField::from_fn(Rect::new(0.0, 1.0, 0.0, 0.33), 0.05, 0.1, &FieldSpec::Exp).is_err()
        );
        assert!(g.strip_width() >= 0.1);
    }

    #[test]
    fn divergence_rule() {
        let mut h: Vec<f64> = (0..60).map(|k| 1e-3 * 1.05f64.powi(k)).collect();
        assert!(diverging(&h));
        h.truncate(50);
        assert!(!diverging(&h));
        assert!(diverging(&[1.0, f64::NAN]));
        assert!(!diverging(&vec![1.0; 200]));
    }

    #[test]
    fn csv_schema() {
        let g = GridField::from_fn(
            Rect::new(0.0, 0.1, 0.0, 0.1),
            0.05,
            0.1,
            &FieldSpec::Identity,
        )
        .unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,re,im,flag"));
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        let (nx, ny) = g.dims();
        assert_eq!(rows.len(), nx * ny);
        for r in &rows {
            assert_eq!(r[0].parse::<f64>().unwrap(), r[2].parse::<f64>().unwrap());
            assert!(r[4] == "strip" || r[4] == "interior");
        }
    }

    proptest! {
        #[test]
        fn interpolation_exact_on_nodes_and_bilinear_data(a in -2.0..2.0f64, b in -2.0..2.0f64, cc in -2.0..2.0f64,
                                                          d in -2.0..2.0f64, x in -0.1..0.6f64, y in -0.1..0.6f64) {
            let f = move |z: Complex64| c(a + b * z.re + cc * z.im + d * z.re * z.im, a * z.im - d);
            let g = GridField::from_fn(Rect::new(0.0, 0.5, 0.0, 0.5), 0.05, 0.1, &f).unwrap();
            let (nx, ny) = g.dims();
            for (i, j) in [(0, 0), (3, 7), (nx - 1, ny - 1), (nx / 2, 1)] {
                prop_assert_eq!(g.interpolate(g.node(i, j)), g.value(i, j));
            }
            let z = c(x, y);
            prop_assert!((g.interpolate(z) - f(z)).norm() <= 1e-13);
        }
    }
}
