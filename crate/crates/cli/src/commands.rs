use std::f64::consts::PI;

use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use holomean::asymptotics::{
    amvp_verdict, extrapolate, holomorphy_verdict, sweep, system_verdict, MeanKind, PointVerdict,
    SweepConfig, TolConfig, Verdict, VerifyConfig,
};
use holomean::contact::{contact_solution_verdict, Camvp, ContactConfig, MembershipConfig};
use holomean::dpp::{dpp_solve_observed, DppConfig, GridField, Rect, ZeroPolicy};
use holomean::means::{c_j_mean, infinity_mean, pair_mean_g, MeanResult, SolverConfig};
use holomean::{CircleQuadrature, ComplexField, Density, FieldSpec};

use crate::config::{parse_list, parse_points, Config, ConfigError};
use crate::output::{complex, real, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Mean,
    Sweep,
    VerifyHolo,
    VerifySystem,
    VerifyAmvp,
    Contact,
    Dpp,
    ValidateDensity,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mean => "mean",
            Command::Sweep => "sweep",
            Command::VerifyHolo => "verify-holo",
            Command::VerifySystem => "verify-system",
            Command::VerifyAmvp => "verify-amvp",
            Command::Contact => "contact",
            Command::Dpp => "dpp",
            Command::ValidateDensity => "validate-density",
        }
    }
}

/// Main CSV plus extra `(suffix, body)` files, and whether every verdict passed.
pub struct Outcome {
    pub csv: Csv,
    pub checkpoints: Vec<(String, Csv)>,
    pub ok: bool,
}

type Res<T> = Result<T, ConfigError>;

struct Common {
    density: Density,
    field: FieldSpec,
}

fn common(cfg: &Config) -> Res<Common> {
    let density = cfg.get_with("density", Some(Density::power(2.0)?), |s| {
        Density::parse(s).map_err(|e| e.to_string())
    })?;
    let field = cfg.get_with("field", Some(FieldSpec::Exp), |s| {
        s.parse::<FieldSpec>().map_err(|e| e.to_string())
    })?;
    Ok(Common { density, field })
}

fn positive(key: &str, x: f64) -> Res<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError {
            line: None,
            key: Some(key.into()),
            message: format!("must be positive, got {x}"),
        })
    }
}

fn solver(cfg: &Config) -> Res<SolverConfig> {
    let d = SolverConfig::default();
    Ok(SolverConfig {
        max_iterations: cfg.get("solver.max_iterations", Some(d.max_iterations))?,
        foc_rel_tol: cfg.get("solver.foc_rel_tol", Some(d.foc_rel_tol))?,
        ..d
    })
}

fn sweep_config(cfg: &Config) -> Res<SweepConfig> {
    let d = SweepConfig::default();
    let scale_fraction = cfg.get_with(
        "sweep.scale_fraction",
        Some(Frac(d.scale_fraction)),
        |s| match s {
            "none" => Ok(Frac(None)),
            _ => s
                .parse::<f64>()
                .map(|x| Frac(Some(x)))
                .map_err(|e| e.to_string()),
        },
    )?;
    Ok(SweepConfig {
        r0: cfg.get("sweep.r0", Some(d.r0))?,
        ratio: cfg.get("sweep.ratio", Some(d.ratio))?,
        count: cfg.get("sweep.count", Some(d.count))?,
        scale_fraction: scale_fraction.0,
        circle_nodes: cfg.get("sweep.circle_nodes", Some(d.circle_nodes))?,
        solver: solver(cfg)?,
    })
}

struct Frac(Option<f64>);

impl std::fmt::Display for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(x) => write!(f, "{x}"),
            None => f.write_str("none"),
        }
    }
}

fn tol_config(cfg: &Config) -> Res<TolConfig> {
    let d = TolConfig::default();
    Ok(TolConfig {
        limit_tol: cfg.get("tol.limit", Some(d.limit_tol))?,
        fit_rel: cfg.get("tol.fit_rel", Some(d.fit_rel))?,
        fit_abs: cfg.get("tol.fit_abs", Some(d.fit_abs))?,
    })
}

fn verify_config(cfg: &Config) -> Res<VerifyConfig> {
    Ok(VerifyConfig {
        sweep: sweep_config(cfg)?,
        tol: tol_config(cfg)?,
    })
}

fn points(cfg: &Config, seed: u64) -> Res<Vec<Complex64>> {
    if cfg.has("points") {
        let pts = cfg
            .get_with("points", None, |s| parse_points(s).map(PointList))?
            .0;
        if pts.is_empty() {
            return Err(ConfigError {
                line: None,
                key: Some("points".into()),
                message: "no points".into(),
            });
        }
        return Ok(pts);
    }
    if cfg.has("points.random") {
        let n: usize = cfg.get("points.random", None)?;
        let center = cfg.get_point("points.center", Some(Complex64::new(0.0, 0.0)))?;
        let radius = positive("points.radius", cfg.get("points.radius", Some(1.0))?)?;
        cfg.record_value("seed", seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok((0..n)
            .map(|_| {
                let (u, v): (f64, f64) = (rng.gen(), rng.gen());
                center + Complex64::from_polar(radius * u.sqrt(), 2.0 * PI * v)
            })
            .collect());
    }
    Err(ConfigError::new("set `points` or `points.random`"))
}

struct PointList(Vec<Complex64>);

impl std::fmt::Display for PointList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|z| format!("{},{}", z.re, z.im))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

pub fn run(command: Command, cfg: &Config, seed: u64) -> Res<Outcome> {
    let mut body = Csv::new();
    let mut checkpoints = Vec::new();
    let ok = match command {
        Command::Mean => mean(cfg, &mut body)?,
        Command::Sweep => run_sweep(cfg, &mut body)?,
        Command::VerifyHolo | Command::VerifySystem | Command::VerifyAmvp => {
            verify(command, cfg, seed, &mut body)?
        }
        Command::Contact => contact(cfg, seed, &mut body)?,
        Command::Dpp => dpp(cfg, &mut body, &mut checkpoints)?,
        Command::ValidateDensity => validate(cfg, &mut body)?,
    };
    let mut csv = Csv::new();
    csv.comment(format!("holomean {}", command.name()));
    for (k, v) in cfg.resolved() {
        csv.comment(format!("{k} = {v}"));
    }
    csv.push_raw(body.as_str());
    Ok(Outcome {
        csv,
        checkpoints,
        ok,
    })
}

fn mean_row(csv: &mut Csv, name: &str, m: &MeanResult) {
    let [re, im] = complex(m.minimizer);
    csv.row(vec![
        name.into(),
        re,
        im,
        real(m.foc_residual),
        m.status.as_str().into(),
    ]);
}

fn failed_row(csv: &mut Csv, name: &str, why: &str) {
    csv.comment(format!("{name}: {why}"));
    csv.row(vec![
        name.into(),
        real(f64::NAN),
        real(f64::NAN),
        real(f64::NAN),
        "failed".into(),
    ]);
}

fn mean(cfg: &Config, csv: &mut Csv) -> Res<bool> {
    let Common { density, field } = common(cfg)?;
    let center = cfg.get_point("mean.center", None)?;
    let radius = positive("mean.radius", cfg.get("mean.radius", None)?)?;
    let nodes = cfg.get(
        "mean.circle_nodes",
        Some(holomean::geometry::DEFAULT_CIRCLE_NODES),
    )?;
    let sc = solver(cfg)?;
    let q = CircleQuadrature::new(center, radius, nodes)?;
    csv.header(&["quantity", "re", "im", "foc_residual", "status"]);
    let mut ok = true;
    match pair_mean_g(&field, &density, &q, &sc) {
        Ok(pm) => {
            mean_row(csv, "c_f", &pm.b_diag);
            mean_row(csv, "a_g", &pm.a_diag);
            let [re, im] = complex(pm.mu);
            let status = pm.status();
            csv.row(vec![
                "mu_g".into(),
                re,
                im,
                real(f64::NAN),
                status.as_str().into(),
            ]);
            ok &= status.is_ok();
        }
        Err(e) => {
            failed_row(csv, "c_f", &e.to_string());
            ok = false;
        }
    }
    match c_j_mean(&field, &density, &q, &sc) {
        Ok(m) => {
            ok &= m.status.is_ok();
            mean_row(csv, "c_j", &m);
        }
        Err(e) => {
            failed_row(csv, "c_j", &e.to_string());
            ok = false;
        }
    }
    match infinity_mean(&field, &q) {
        Ok(m) => {
            let [re, im] = complex(m.center);
            let certified = m.support_count >= 2;
            ok &= certified;
            csv.comment(format!(
                "infinity: max_modulus = {}, support = {}",
                real(m.max_modulus),
                m.support_count
            ));
            csv.row(vec![
                "infinity".into(),
                re,
                im,
                real(f64::NAN),
                if certified { "converged" } else { "failed" }.into(),
            ]);
        }
        Err(e) => {
            failed_row(csv, "infinity", &e.to_string());
            ok = false;
        }
    }
    Ok(ok)
}

fn run_sweep(cfg: &Config, csv: &mut Csv) -> Res<bool> {
    let Common { density, field } = common(cfg)?;
    let kind = cfg
        .get_with("sweep.kind", Some(Kind(MeanKind::CF)), |s| {
            s.parse::<MeanKind>().map(Kind).map_err(|e| e.to_string())
        })?
        .0;
    let center = cfg.get_point("sweep.center", None)?;
    let sc = sweep_config(cfg)?;
    let tol = tol_config(cfg)?;
    let s = match sweep(kind, &field, center, &density, &sc) {
        Ok(s) => s,
        Err(e @ holomean::Error::InsufficientData { .. })
        | Err(e @ holomean::Error::ZeroCrossing { .. }) => {
            csv.comment(format!("sweep failed: {e}"));
            csv.header(&["r", "re_c", "im_c", "foc_residual", "status"]);
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    csv.comment(format!("length_scale = {}", real(s.length_scale)));
    let est = extrapolate(&s, &tol);
    let mut ok = s.samples.iter().all(|x| x.status.is_ok());
    match &est {
        Ok(e) => {
            let [re, im] = complex(e.limit);
            csv.comment(format!("limit = {re},{im}"));
            csv.comment(format!("fit_residual = {}", real(e.fit_residual)));
            csv.comment(format!("verdict = {}", e.verdict.as_str()));
            ok &= e.verdict != Verdict::Inconclusive;
        }
        Err(e) => {
            csv.comment(format!("extrapolation failed: {e}"));
            ok = false;
        }
    }
    for (r, why) in &s.failures {
        csv.comment(format!("failure at r = {}: {why}", real(*r)));
    }
    csv.header(&["r", "re_c", "im_c", "foc_residual", "status"]);
    for x in &s.samples {
        let [re, im] = complex(x.value);
        csv.row(vec![
            real(x.r),
            re,
            im,
            real(x.foc_residual),
            x.status.as_str().into(),
        ]);
    }
    Ok(ok)
}

struct Kind(MeanKind);

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.0.as_str())
    }
}

fn verify(command: Command, cfg: &Config, seed: u64, csv: &mut Csv) -> Res<bool> {
    let Common { density, field } = common(cfg)?;
    let pts = points(cfg, seed)?;
    let vc = verify_config(cfg)?;
    let (rows, labels, analytic) = match command {
        Command::VerifyHolo => (
            holomorphy_verdict(&field, &pts, &density, &vc)?,
            ("holomorphic", "not_holomorphic"),
            "predicted",
        ),
        Command::VerifySystem => (
            system_verdict(&field, &pts, &density, &vc)?,
            ("solves", "violates"),
            "residual",
        ),
        _ => (
            amvp_verdict(&field, &pts, &density, &vc)?,
            ("amvp_holds", "amvp_fails"),
            "residual",
        ),
    };
    let (are, aim) = (format!("{analytic}_re"), format!("{analytic}_im"));
    csv.header(&[
        "x",
        "y",
        "verdict",
        "limit_re",
        "limit_im",
        "fit_residual",
        &are,
        &aim,
        "agree",
    ]);
    let mut ok = true;
    for v in &rows {
        let label = verdict_label(v, labels);
        ok &= label == labels.0 || label == "untestable";
        if let Some(n) = &v.note {
            csv.comment(format!("({}, {}): {n}", v.point.re, v.point.im));
        }
        let [x, y] = complex(v.point);
        let (lim, fit) = match v.estimate {
            Some(e) => (complex(e.limit), real(e.fit_residual)),
            None => (complex(Complex64::new(f64::NAN, f64::NAN)), real(f64::NAN)),
        };
        let [lre, lim_] = lim;
        let [pre, pim] = complex(v.predicted.unwrap_or(Complex64::new(f64::NAN, f64::NAN)));
        csv.row(vec![
            x,
            y,
            label.into(),
            lre,
            lim_,
            fit,
            pre,
            pim,
            v.agree.to_string(),
        ]);
    }
    Ok(ok)
}

fn verdict_label(v: &PointVerdict, labels: (&'static str, &'static str)) -> &'static str {
    match v.estimate {
        None => "untestable",
        Some(e) => match e.verdict {
            Verdict::Vanishes => labels.0,
            Verdict::ConvergesNonzero => labels.1,
            Verdict::Inconclusive => "inconclusive",
        },
    }
}

fn contact(cfg: &Config, seed: u64, csv: &mut Csv) -> Res<bool> {
    let Common { density, field } = common(cfg)?;
    let pts = points(cfg, seed)?;
    let d = ContactConfig::default();
    let md = MembershipConfig::default();
    let cc = ContactConfig {
        directions: cfg.get("contact.directions", Some(d.directions))?,
        membership: MembershipConfig {
            samples_per_radius: cfg.get("contact.samples", Some(md.samples_per_radius))?,
            member_tol: cfg.get("contact.member_tol", Some(md.member_tol))?,
            reject_tol: cfg.get("contact.reject_tol", Some(md.reject_tol))?,
            ..md
        },
        camvp_tol: cfg.get("contact.camvp_tol", Some(d.camvp_tol))?,
        verify: verify_config(cfg)?,
    };
    let rep = contact_solution_verdict(&field, &pts, &density, &cc)?;
    csv.comment(format!("passes_camvp = {}", rep.passes_camvp()));
    csv.comment(format!("passes_residual = {}", rep.passes_residual()));
    csv.comment(format!("disagreements = {}", rep.disagreements()));
    csv.header(&[
        "x",
        "y",
        "xi_re",
        "xi_im",
        "membership",
        "envelope",
        "camvp_limit",
        "camvp",
        "residual_pass",
        "camvp_pass",
    ]);
    for p in &rep.points {
        let [x, y] = complex(p.point);
        if let Some(n) = &p.note {
            csv.comment(format!("({}, {}): {n}", p.point.re, p.point.im));
            csv.row(vec![
                x,
                y,
                real(f64::NAN),
                real(f64::NAN),
                "untestable".into(),
                real(f64::NAN),
                real(f64::NAN),
                Camvp::Untestable.as_str().into(),
                "false".into(),
                "false".into(),
            ]);
            continue;
        }
        for o in &p.directions {
            let [xr, xi] = complex(o.xi.value());
            csv.row(vec![
                x.clone(),
                y.clone(),
                xr,
                xi,
                o.membership.as_str().into(),
                real(o.envelope),
                real(o.camvp.limit),
                o.camvp.verdict.as_str().into(),
                p.residual_pass.to_string(),
                p.camvp_pass.to_string(),
            ]);
        }
    }
    Ok(rep.passes_camvp() && rep.disagreements() == 0)
}

fn dpp(cfg: &Config, csv: &mut Csv, checkpoints: &mut Vec<(String, Csv)>) -> Res<bool> {
    let Common { density, field } = common(cfg)?;
    let rect = cfg
        .get_with("dpp.rect", Some(RectArg(Rect::unit_square())), |s| {
            let v = parse_list(s, ',')?;
            match v.as_slice() {
                [a, b, c, d] if a < b && c < d => Ok(RectArg(Rect::new(*a, *b, *c, *d))),
                _ => Err(format!("expected `x_min,x_max,y_min,y_max`, got `{s}`")),
            }
        })?
        .0;
    let h = positive("dpp.h", cfg.get("dpp.h", Some(0.02))?)?;
    let r = positive("dpp.r", cfg.get("dpp.r", Some(0.1))?)?;
    let mut dc = DppConfig::new(r, density);
    dc.theta = cfg.get("dpp.theta", Some(dc.theta))?;
    dc.max_iterations = cfg.get("dpp.max_iterations", Some(dc.max_iterations))?;
    dc.residual_tol = cfg.get("dpp.residual_tol", Some(dc.residual_tol))?;
    dc.zero_policy = cfg
        .get_with("dpp.zero_policy", Some(Policy(dc.zero_policy)), |s| {
            s.parse::<ZeroPolicy>()
                .map(Policy)
                .map_err(|e| e.to_string())
        })?
        .0;
    dc.circle_nodes = cfg.get("dpp.circle_nodes", Some(dc.circle_nodes))?;
    dc.solver = solver(cfg)?;
    let interior = cfg.get_str("dpp.interior", Some("boundary"))?;
    let every: usize = cfg.get("dpp.checkpoint_every", Some(0))?;

    let init = if interior == "boundary" {
        let ext = |z: Complex64| field.eval(rect.boundary_projection(z));
        GridField::new(rect, h, r, &field, &ext)?
    } else {
        let inner: FieldSpec = interior.parse().map_err(|e: holomean::Error| ConfigError {
            line: None,
            key: Some("dpp.interior".into()),
            message: e.to_string(),
        })?;
        GridField::new(rect, h, r, &field, &inner)?
    };
    dc.check(&init)?;
    let (f, rep) = dpp_solve_observed(&init, &dc, |k, g, res| {
        if every > 0 && k % every == 0 {
            let mut c = Csv::new();
            c.comment(format!("iteration = {k}"));
            c.comment(format!("residual = {}", real(res)));
            c.push_raw(&grid_csv(g));
            checkpoints.push((format!("iter{k:06}"), c));
        }
    })?;
    csv.comment(format!("status = {}", rep.status));
    csv.comment(format!("iterations = {}", rep.iterations));
    csv.comment(format!("final_residual = {}", real(rep.final_residual())));
    for (k, v) in rep.history.iter().enumerate() {
        csv.comment(format!("residual[{k}] = {}", real(*v)));
    }
    csv.push_raw(&grid_csv(&f));
    Ok(rep.status == holomean::dpp::DppStatus::Converged)
}

fn grid_csv(g: &GridField) -> String {
    let mut buf = Vec::new();
    g.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii csv")
}

struct RectArg(Rect);

impl std::fmt::Display for RectArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let r = self.0;
        write!(f, "{},{},{},{}", r.x_min, r.x_max, r.y_min, r.y_max)
    }
}

struct Policy(ZeroPolicy);

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.0.as_str())
    }
}

fn validate(cfg: &Config, csv: &mut Csv) -> Res<bool> {
    let density = cfg.get_with("density", None, |s| {
        Density::parse(s).map_err(|e| e.to_string())
    })?;
    let n: usize = cfg.get("validate.samples", Some(241))?;
    let rep = density.validate(n);
    for f in &rep.failures {
        csv.comment(format!("failure: {f}"));
    }
    csv.header(&[
        "label",
        "samples",
        "passed",
        "lambda_min",
        "lambda_max",
        "worst_violation",
    ]);
    csv.row(vec![
        rep.label.clone(),
        rep.samples.to_string(),
        rep.passed.to_string(),
        real(rep.lambda_min),
        real(rep.lambda_max),
        real(rep.worst_violation),
    ]);
    Ok(rep.passed)
}
