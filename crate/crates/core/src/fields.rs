//! Built-in field library with exact jets.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ComplexField, Jet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    Const(Complex64),
    Identity,
    Square,
    Cube,
    Exp,
    Conj,
    /// `|ζ|²`.
    ModSq,
    Affine(Jet),
    /// `f = 2∂_z u` for the radial p-harmonic `u = |ζ|^{(p-2)/(p-1)}` (`log|ζ|` when `p = 2`).
    PharmRadial(f64),
    /// `f = 2∂_z u` for `u = x`, i.e. `f ≡ 1`.
    PharmLinear,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl FieldSpec {
    /// The library used by the sampled-equivalence checks.
    pub fn library() -> Vec<FieldSpec> {
        vec![
            FieldSpec::Const(Complex64::new(1.5, -0.5)),
            FieldSpec::Identity,
            FieldSpec::Square,
            FieldSpec::Cube,
            FieldSpec::Exp,
            FieldSpec::Conj,
            FieldSpec::ModSq,
            FieldSpec::Affine(Jet::new(
                Complex64::new(1.0, 0.5),
                Complex64::new(0.7, -0.2),
                Complex64::new(-0.3, 0.4),
                zero(),
            )),
            FieldSpec::PharmRadial(3.0),
            FieldSpec::PharmLinear,
        ]
    }

    pub fn is_holomorphic(&self) -> bool {
        match self {
            FieldSpec::Const(_)
            | FieldSpec::Identity
            | FieldSpec::Square
            | FieldSpec::Cube
            | FieldSpec::Exp
            | FieldSpec::PharmLinear => true,
            FieldSpec::Affine(j) => j.tau == zero(),
            FieldSpec::PharmRadial(p) => *p == 2.0,
            FieldSpec::Conj | FieldSpec::ModSq => false,
        }
    }

    /// Radial exponent `k = (p-2)/(p-1)`, or `None` for the logarithm.
    fn radial_exponent(p: f64) -> Option<f64> {
        if p == 2.0 {
            None
        } else {
            Some((p - 2.0) / (p - 1.0))
        }
    }
}

impl ComplexField for FieldSpec {
    fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            FieldSpec::Const(c) => c,
            FieldSpec::Identity => z,
            FieldSpec::Square => z * z,
            FieldSpec::Cube => z * z * z,
            FieldSpec::Exp => z.exp(),
            FieldSpec::Conj => z.conj(),
            FieldSpec::ModSq => Complex64::new(z.norm_sqr(), 0.0),
            FieldSpec::Affine(j) => j.affine_eval(z),
            FieldSpec::PharmRadial(p) => match Self::radial_exponent(p) {
                None => 1.0 / z,
                Some(k) => z.conj() * (k * z.norm().powf(k - 2.0)),
            },
            FieldSpec::PharmLinear => one(),
        }
    }

    fn exact_jet(&self, z: Complex64) -> Option<Jet> {
        let (sigma, tau) = match *self {
            FieldSpec::Const(_) | FieldSpec::PharmLinear => (zero(), zero()),
            FieldSpec::Identity => (one(), zero()),
            FieldSpec::Square => (z * 2.0, zero()),
            FieldSpec::Cube => (z * z * 3.0, zero()),
            FieldSpec::Exp => (z.exp(), zero()),
            FieldSpec::Conj => (zero(), one()),
            FieldSpec::ModSq => (z.conj(), z),
            FieldSpec::Affine(j) => return Some(j.rebased(z)),
            FieldSpec::PharmRadial(p) => match Self::radial_exponent(p) {
                None => (-1.0 / (z * z), zero()),
                Some(k) => {
                    let rho = z.norm();
                    let zb = z.conj();
                    (
                        zb * zb * (k * (0.5 * k - 1.0) * rho.powf(k - 4.0)),
                        Complex64::new(0.5 * k * k * rho.powf(k - 2.0), 0.0),
                    )
                }
            },
        };
        Some(Jet::new(self.eval(z), sigma, tau, z))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Const(c) => write!(f, "const:{c}"),
            FieldSpec::Identity => write!(f, "identity"),
            FieldSpec::Square => write!(f, "square"),
            FieldSpec::Cube => write!(f, "cube"),
            FieldSpec::Exp => write!(f, "exp"),
            FieldSpec::Conj => write!(f, "conj"),
            FieldSpec::ModSq => write!(f, "modsq"),
            FieldSpec::Affine(j) => write!(f, "affine:{},{},{}", j.omega, j.sigma, j.tau),
            FieldSpec::PharmRadial(p) => write!(f, "pharm-radial:{p}"),
            FieldSpec::PharmLinear => write!(f, "pharm-linear"),
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    Complex64::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad complex number `{s}`")))
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec, None),
        };
        let field = match (name, arg) {
            ("const", Some(a)) => FieldSpec::Const(parse_complex(a)?),
            ("identity", None) => FieldSpec::Identity,
            ("square", None) => FieldSpec::Square,
            ("cube", None) => FieldSpec::Cube,
            ("exp", None) => FieldSpec::Exp,
            ("conj", None) => FieldSpec::Conj,
            ("modsq", None) => FieldSpec::ModSq,
            ("affine", Some(a)) => {
                let parts: Vec<&str> = a.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("affine needs `ω,σ,τ`, got `{a}`")));
                }
                FieldSpec::Affine(Jet::new(
                    parse_complex(parts[0])?,
                    parse_complex(parts[1])?,
                    parse_complex(parts[2])?,
                    zero(),
                ))
            }
            ("pharm-radial", Some(a)) => {
                let p: f64 = a
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent `{a}`")))?;
                if !(p > 1.0 && p.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "pharm-radial needs p > 1, got {p}"
                    )));
                }
                FieldSpec::PharmRadial(p)
            }
            ("pharm-linear", None) => FieldSpec::PharmLinear,
            _ => return Err(Error::Parse(format!("unknown field `{spec}`"))),
        };
        Ok(field)
    }
}
