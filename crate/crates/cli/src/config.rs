//! Flat `key = value` scenario files. Lines starting with `#` are comments;
//! keys may carry a `section.` prefix.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

pub const KNOWN_KEYS: &[&str] = &[
    "density",
    "field",
    "seed",
    "points",
    "points.random",
    "points.center",
    "points.radius",
    "mean.center",
    "mean.radius",
    "mean.circle_nodes",
    "sweep.kind",
    "sweep.center",
    "sweep.r0",
    "sweep.ratio",
    "sweep.count",
    "sweep.scale_fraction",
    "sweep.circle_nodes",
    "solver.max_iterations",
    "solver.foc_rel_tol",
    "tol.limit",
    "tol.fit_rel",
    "tol.fit_abs",
    "contact.directions",
    "contact.samples",
    "contact.member_tol",
    "contact.reject_tol",
    "contact.camvp_tol",
    "dpp.rect",
    "dpp.h",
    "dpp.r",
    "dpp.theta",
    "dpp.max_iterations",
    "dpp.residual_tol",
    "dpp.zero_policy",
    "dpp.interior",
    "dpp.circle_nodes",
    "dpp.checkpoint_every",
    "validate.samples",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl From<holomean::Error> for ConfigError {
    fn from(e: holomean::Error) -> Self {
        Self::new(e.to_string())
    }
}

#[derive(Debug, Default)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    key: None,
                    message: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let err = |message: &str| ConfigError {
                line: Some(line),
                key: Some(key.to_string()),
                message: message.into(),
            };
            if !KNOWN_KEYS.contains(&key) {
                return Err(err("unknown key"));
            }
            if value.is_empty() {
                return Err(err("empty value"));
            }
            if entries
                .insert(key.to_string(), (value.to_string(), line))
                .is_some()
            {
                return Err(err("duplicate key"));
            }
        }
        Ok(Self {
            entries,
            resolved: RefCell::default(),
        })
    }

    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    /// Every key read so far with its effective value, defaults included.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get_with<T, P>(&self, key: &str, default: Option<T>, parse: P) -> Result<T, ConfigError>
    where
        T: fmt::Display,
        P: Fn(&str) -> Result<T, String>,
    {
        match self.raw(key) {
            Some((v, line)) => {
                let t = parse(v).map_err(|m| ConfigError {
                    line: Some(line),
                    key: Some(key.into()),
                    message: m,
                })?;
                self.record(key, v.to_string());
                Ok(t)
            }
            None => match default {
                Some(t) => {
                    self.record(key, t.to_string());
                    Ok(t)
                }
                None => Err(ConfigError {
                    line: None,
                    key: Some(key.into()),
                    message: "missing".into(),
                }),
            },
        }
    }

    pub fn get<T>(&self, key: &str, default: Option<T>) -> Result<T, ConfigError>
    where
        T: FromStr + fmt::Display,
        T::Err: fmt::Display,
    {
        self.get_with(key, default, |v| v.parse::<T>().map_err(|e| e.to_string()))
    }

    /// A raw string value, recorded as given.
    pub fn get_str(&self, key: &str, default: Option<&str>) -> Result<String, ConfigError> {
        self.get_with(key, default.map(String::from), |v| Ok(v.to_string()))
    }

    pub fn get_point(
        &self,
        key: &str,
        default: Option<Complex64>,
    ) -> Result<Complex64, ConfigError> {
        match self.raw(key) {
            Some((v, line)) => {
                let z = parse_point(v).map_err(|m| ConfigError {
                    line: Some(line),
                    key: Some(key.into()),
                    message: m,
                })?;
                self.record(key, v.to_string());
                Ok(z)
            }
            None => {
                let z = default.ok_or_else(|| ConfigError {
                    line: None,
                    key: Some(key.into()),
                    message: "missing".into(),
                })?;
                self.record(key, format!("{},{}", z.re, z.im));
                Ok(z)
            }
        }
    }

    pub fn record_value(&self, key: &str, value: impl fmt::Display) {
        self.record(key, value.to_string());
    }
}

/// `x,y`.
pub fn parse_point(s: &str) -> Result<Complex64, String> {
    let nums = parse_list(s, ',')?;
    match nums.as_slice() {
        [x, y] => Ok(Complex64::new(*x, *y)),
        _ => Err(format!("expected `x,y`, got `{s}`")),
    }
}

pub fn parse_list(s: &str, sep: char) -> Result<Vec<f64>, String> {
    s.split(sep)
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| format!("bad number `{t}`"))
                .and_then(|x| {
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(format!("non-finite number `{t}`"))
                    }
                })
        })
        .collect()
}

/// `x,y; x,y; ...`.
pub fn parse_points(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(parse_point)
        .collect()
}
