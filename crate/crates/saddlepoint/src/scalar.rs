//! Matrix-entry arithmetic: exact rationals or floats, chosen per matrix.
//!
//! Exact mode keeps every comparison decidable with no tolerance, which the
//! strict-inequality arguments of the solvers rely on. Float mode is for
//! large benchmarks: equality comparisons use the absolute tolerance
//! [`EPS_NUM`], ordering comparisons are raw.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Absolute tolerance for float-mode equality.
pub const EPS_NUM: f64 = 1e-9;

/// Arithmetic mode of a matrix and everything derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

impl FromStr for Mode {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(ScalarParseError::BadMode(other.to_string())),
        }
    }
}

/// One matrix entry, strategy weight, or game value.
///
/// Mixing modes in arithmetic or comparisons is a usage bug and panics.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

#[derive(Debug, thiserror::Error)]
pub enum ScalarParseError {
    #[error("empty numeric field")]
    Empty,
    #[error("cannot parse {0:?} as a number")]
    BadNumber(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("unknown arithmetic mode {0:?} (expected \"exact\" or \"float\")")]
    BadMode(String),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::one()),
            Mode::Float => Scalar::Float(1.0),
        }
    }

    pub fn from_int(value: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(value))),
            Mode::Float => Scalar::Float(value as f64),
        }
    }

    /// num/den as a scalar. den must be nonzero.
    pub fn from_ratio(num: i64, den: i64, mode: Mode) -> Self {
        assert!(den != 0, "zero denominator");
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den))),
            Mode::Float => Scalar::Float(num as f64 / den as f64),
        }
    }

    /// m / 2^32: one uniform draw on [0,1) from a 32-bit word. The same
    /// word stream yields comparably ordered values in both modes.
    pub fn unit_from_u32(m: u32, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::new(
                BigInt::from(m),
                BigInt::from(1u64 << 32),
            )),
            Mode::Float => Scalar::Float(m as f64 / (1u64 << 32) as f64),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(v) => v.abs() <= EPS_NUM,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(v) => *v < -EPS_NUM,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(v) => Scalar::Float(v.abs()),
        }
    }

    /// Raw ordering comparison: no tolerance in either mode.
    pub fn cmp_raw(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => {
                a.partial_cmp(b).expect("NaN in scalar comparison")
            }
            _ => panic!("mixed arithmetic modes in comparison"),
        }
    }

    pub fn lt_raw(&self, other: &Scalar) -> bool {
        self.cmp_raw(other) == Ordering::Less
    }

    pub fn le_raw(&self, other: &Scalar) -> bool {
        self.cmp_raw(other) != Ordering::Greater
    }

    pub fn gt_raw(&self, other: &Scalar) -> bool {
        self.cmp_raw(other) == Ordering::Greater
    }

    pub fn ge_raw(&self, other: &Scalar) -> bool {
        self.cmp_raw(other) != Ordering::Less
    }

    /// Mode-aware "<= with tolerance": exact <= in exact mode,
    /// `self <= other + EPS_NUM` in float mode.
    pub fn le_tol(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            (Scalar::Float(a), Scalar::Float(b)) => *a <= *b + EPS_NUM,
            _ => panic!("mixed arithmetic modes in comparison"),
        }
    }

    pub fn ge_tol(&self, other: &Scalar) -> bool {
        other.le_tol(self)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().expect("rational out of f64 range"),
            Scalar::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// Parses "p/q", an integer, or a decimal (with optional exponent).
    /// Exact mode parses decimals exactly; float mode delegates to f64.
    pub fn parse(text: &str, mode: Mode) -> Result<Scalar, ScalarParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(ScalarParseError::Empty);
        }
        match mode {
            Mode::Float => text
                .parse::<f64>()
                .map(Scalar::Float)
                .or_else(|_| parse_fraction(text).map(|r| Scalar::Float(r.to_f64().unwrap())))
                .map_err(|_| ScalarParseError::BadNumber(text.to_string())),
            Mode::Exact => {
                if text.contains('/') {
                    parse_fraction(text).map(Scalar::Exact)
                } else {
                    parse_decimal(text).map(Scalar::Exact)
                }
            }
        }
    }
}

fn parse_fraction(text: &str) -> Result<BigRational, ScalarParseError> {
    let bad = || ScalarParseError::BadNumber(text.to_string());
    let (num, den) = text.split_once('/').ok_or_else(bad)?;
    let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
    let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ScalarParseError::ZeroDenominator(text.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Exact decimal parsing: mantissa over a power of ten, exponent applied.
fn parse_decimal(text: &str) -> Result<BigRational, ScalarParseError> {
    let bad = || ScalarParseError::BadNumber(text.to_string());
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['-', '+']);
    if (int_digits.is_empty() && frac_part.is_empty())
        || !int_digits.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_digits}{frac_part}");
    let mut numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = frac_part.len() as i32 - exp;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::new(numer, ten.pow(scale as u32))
    } else {
        BigRational::from_integer(numer * ten.pow((-scale) as u32))
    };
    Ok(value)
}

/// Equality is mode-aware: exact equality for rationals, absolute
/// tolerance [`EPS_NUM`] for floats. Ordering (PartialOrd) stays raw.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => (a - b).abs() <= EPS_NUM,
            _ => panic!("mixed arithmetic modes in comparison"),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_raw(other))
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;

            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => panic!("mixed arithmetic modes in arithmetic"),
                }
            }
        }

        impl $trait for Scalar {
            type Output = Scalar;

            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for &Scalar {
    type Output = Scalar;

    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(!b.is_zero(), "division by zero");
                Scalar::Exact(a / b)
            }
            (Scalar::Float(a), Scalar::Float(b)) => {
                assert!(*b != 0.0, "division by zero");
                Scalar::Float(a / b)
            }
            _ => panic!("mixed arithmetic modes in arithmetic"),
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;

    fn div(self, rhs: Scalar) -> Scalar {
        (&self).div(&rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

/// Exact values print as "p/q" (or "p" for integers); floats print in
/// shortest round-trip form.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}
