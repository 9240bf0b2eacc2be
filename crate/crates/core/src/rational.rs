//! Arbitrary-precision rationals extended with `+inf` / `-inf`.
//!
//! All market quantities (prices, values, budgets, utilities) are exact; the
//! solver's event detection is equality testing, so floating point is never
//! used anywhere in the crate. Infinities appear as "no budget cap", as the
//! utility of a free item under a ratio objective, and as the "no preimage"
//! result of utility inversion.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// An exact rational number, `+inf`, or `-inf`.
///
/// Finite values are kept in lowest terms with a positive denominator (the
/// backing `BigRational` maintains that). The order is total:
/// `-inf < finite < +inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedRational {
    NegInf,
    Finite(BigRational),
    PosInf,
}

pub use ExtendedRational::{Finite, NegInf, PosInf};

impl ExtendedRational {
    pub fn zero() -> Self {
        Finite(BigRational::zero())
    }

    pub fn one() -> Self {
        Finite(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Finite(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den` as a finite value. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, PosInf)
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, NegInf)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Finite(r) if r.is_zero())
    }

    pub fn is_negative(&self) -> bool {
        match self {
            NegInf => true,
            Finite(r) => r.is_negative(),
            PosInf => false,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            NegInf => false,
            Finite(r) => r.is_positive(),
            PosInf => true,
        }
    }

    /// The finite payload; panics on infinities.
    pub fn finite(&self) -> &BigRational {
        match self {
            Finite(r) => r,
            _ => panic!("expected a finite value, got {self}"),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Exact midpoint of two finite values.
    pub fn midpoint(&self, other: &Self) -> Self {
        Finite((self.finite() + other.finite()) / BigRational::from_integer(BigInt::from(2)))
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

// Arithmetic is defined only where it is unambiguous; the solver never forms
// `inf - inf`, `0 * inf`, or a division involving infinities, so those panic.
impl Add for &ExtendedRational {
    type Output = ExtendedRational;
    fn add(self, rhs: &ExtendedRational) -> ExtendedRational {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => panic!("inf + -inf is undefined"),
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }
}

impl Sub for &ExtendedRational {
    type Output = ExtendedRational;
    fn sub(self, rhs: &ExtendedRational) -> ExtendedRational {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a - b),
            (PosInf, PosInf) | (NegInf, NegInf) => panic!("inf - inf is undefined"),
            (PosInf, _) | (_, NegInf) => PosInf,
            (NegInf, _) | (_, PosInf) => NegInf,
        }
    }
}

impl Mul for &ExtendedRational {
    type Output = ExtendedRational;
    fn mul(self, rhs: &ExtendedRational) -> ExtendedRational {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a * b),
            (a, b) => {
                let sign_a = if a.is_positive() {
                    1
                } else if a.is_negative() {
                    -1
                } else {
                    0
                };
                let sign_b = if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                };
                match sign_a * sign_b {
                    1 => PosInf,
                    -1 => NegInf,
                    _ => panic!("0 * inf is undefined"),
                }
            }
        }
    }
}

impl Div for &ExtendedRational {
    type Output = ExtendedRational;
    fn div(self, rhs: &ExtendedRational) -> ExtendedRational {
        match (self, rhs) {
            (Finite(a), Finite(b)) => {
                assert!(!b.is_zero(), "division by zero");
                Finite(a / b)
            }
            _ => panic!("division involving infinities is undefined"),
        }
    }
}

impl Neg for &ExtendedRational {
    type Output = ExtendedRational;
    fn neg(self) -> ExtendedRational {
        match self {
            NegInf => PosInf,
            PosInf => NegInf,
            Finite(r) => Finite(-r),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExtendedRational {
            type Output = ExtendedRational;
            fn $method(self, rhs: ExtendedRational) -> ExtendedRational {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            PosInf => write!(f, "inf"),
            Finite(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

/// Parse error for [`ExtendedRational::from_str`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for ExtendedRational {
    type Err = ParseRationalError;

    /// Accepts `"inf"`, `"-inf"`, integers, and `"p/q"` fractions.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "inf" | "+inf" => return Ok(PosInf),
            "-inf" => return Ok(NegInf),
            _ => {}
        }
        let parse_int = |t: &str| BigInt::from_str(t).map_err(|_| ParseRationalError(s.into()));
        match s.split_once('/') {
            None => Ok(Finite(BigRational::from_integer(parse_int(s)?))),
            Some((num, den)) => {
                let num = parse_int(num)?;
                let den = parse_int(den)?;
                if den.is_zero() {
                    return Err(ParseRationalError(s.into()));
                }
                Ok(Finite(BigRational::new(num, den)))
            }
        }
    }
}

/// Greatest common divisor of two non-negative finite rationals
/// (the largest rational dividing both to an integer). `gcd(x, 0) = x`.
pub fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    // gcd(p1/q1, p2/q2) = gcd(p1*q2, p2*q1) / (q1*q2)
    let num = num::integer::gcd(
        (a.numer() * b.denom()).abs(),
        (b.numer() * a.denom()).abs(),
    );
    let den = a.denom() * b.denom();
    BigRational::new(num, den)
}
