//! Divergence generators and their conjugacy machinery.
//!
//! Each generator is a strictly convex function φ on (0, ∞) with
//! φ(1) = φ'(1) = 0 and an essentially smooth boundary (φ'(x) → −∞ as
//! x → 0⁺). Together with its derivative φ', the inverse derivative
//! φ'⁻¹ = (φ*)', and the convex conjugate φ*, it supplies everything the
//! dual solver needs:
//!
//! | name             | φ(x)                          | φ'(x)           | β = sup φ'  |
//! |------------------|-------------------------------|-----------------|-------------|
//! | `kl`             | x·ln x − x + 1                | ln x            | +∞          |
//! | `reverse_kl`     | −ln x + x − 1                 | 1 − 1/x         | 1           |
//! | `jensen_shannon` | x·ln x − (x+1)·ln((x+1)/2)    | ln(2x/(x+1))    | ln 2        |
//! | `hellinger_sq`   | (√x − 1)²                     | 1 − 1/√x        | 1           |
//! | `alpha:<α>`      | (x^α − αx + α − 1)/(α(α−1))   | (x^{α−1}−1)/(α−1) | 1/(1−α)   |
//!
//! The α family requires α strictly inside (0, 1); at α = 1/2 it equals
//! twice `hellinger_sq`.
//!
//! For every entry the effective domain of φ is (0, ∞) (so the lower
//! conjugate-domain endpoint is −∞ by convention) and the interior of the
//! conjugate's domain is (−∞, β). Evaluating φ'⁻¹ or φ* at y ≥ β returns
//! +∞ instead of an error so that bracketing root-finders can probe past
//! the boundary; likewise φ(x) = +∞ for x ≤ 0.
//!
//! χ² (φ(x) = (x−1)²) is deliberately absent: its derivative at 0⁺ is −2,
//! not −∞, so the inverse map φ'⁻¹ does not cover (0, ∞) and the dual
//! coupling formula breaks down.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A divergence generator from the built-in catalogue.
///
/// Immutable and `Copy`; all evaluations are pure functions, safe for
/// unrestricted concurrent use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Generator<T> {
    /// Kullback–Leibler: φ(x) = x·ln x − x + 1.
    Kl,
    /// Reverse Kullback–Leibler: φ(x) = −ln x + x − 1.
    ReverseKl,
    /// Jensen–Shannon: φ(x) = x·ln x − (x+1)·ln((x+1)/2).
    JensenShannon,
    /// Squared Hellinger: φ(x) = (√x − 1)².
    HellingerSq,
    /// α family, α ∈ (0, 1): φ(x) = (x^α − α·x + α − 1)/(α(α−1)).
    Alpha(T),
}

impl<T: Real> Generator<T> {
    /// Looks up a catalogue entry by name, with an optional α parameter.
    ///
    /// `alpha` is required (and only accepted) for the `alpha` family and
    /// must lie strictly in (0, 1).
    pub fn from_name(name: &str, alpha: Option<T>) -> Result<Self> {
        match (name, alpha) {
            ("kl", None) => Ok(Self::Kl),
            ("reverse_kl", None) => Ok(Self::ReverseKl),
            ("jensen_shannon", None) => Ok(Self::JensenShannon),
            ("hellinger_sq", None) => Ok(Self::HellingerSq),
            ("alpha", Some(a)) => Self::alpha(a),
            ("alpha", None) => Err(Error::UnknownGenerator(
                "alpha (missing parameter, use alpha:<value>)".into(),
            )),
            _ => Err(Error::UnknownGenerator(name.into())),
        }
    }

    /// α-family constructor; rejects α outside the open interval (0, 1).
    pub fn alpha(alpha: T) -> Result<Self> {
        let a = alpha.to_f64().unwrap_or(f64::NAN);
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidAlpha(a));
        }
        Ok(Self::Alpha(alpha))
    }

    /// Selection string for files and the command line.
    pub fn name(&self) -> String {
        match self {
            Self::Kl => "kl".into(),
            Self::ReverseKl => "reverse_kl".into(),
            Self::JensenShannon => "jensen_shannon".into(),
            Self::HellingerSq => "hellinger_sq".into(),
            Self::Alpha(a) => format!("alpha:{a}"),
        }
    }

    /// β, the slope of φ at +∞ and the right edge of the conjugate's
    /// domain. +∞ for `kl`, finite for the other families.
    pub fn beta(&self) -> T {
        match *self {
            Self::Kl => T::infinity(),
            Self::ReverseKl | Self::HellingerSq => T::one(),
            Self::JensenShannon => T::LN_2(),
            Self::Alpha(a) => (T::one() - a).recip(),
        }
    }

    /// φ(x) for x > 0; +∞ for x ≤ 0.
    pub fn phi(&self, x: T) -> T {
        assert!(!x.is_nan(), "phi: NaN input");
        if x <= T::zero() {
            return T::infinity();
        }
        let one = T::one();
        match *self {
            Self::Kl => x * x.ln() - x + one,
            Self::ReverseKl => -x.ln() + x - one,
            Self::JensenShannon => {
                let half = T::c(0.5);
                x * x.ln() - (x + one) * ((x + one) * half).ln()
            }
            Self::HellingerSq => {
                let d = x.sqrt() - one;
                d * d
            }
            Self::Alpha(a) => (x.powf(a) - a * x + a - one) / (a * (a - one)),
        }
    }

    /// φ'(x), strictly increasing from −∞ (at 0⁺) to [`Self::beta`].
    /// Returns −∞ for x ≤ 0.
    pub fn phi_prime(&self, x: T) -> T {
        assert!(!x.is_nan(), "phi_prime: NaN input");
        if x <= T::zero() {
            return T::neg_infinity();
        }
        let one = T::one();
        match *self {
            Self::Kl => x.ln(),
            Self::ReverseKl => one - x.recip(),
            Self::JensenShannon => ((T::c(2.0) * x) / (x + one)).ln(),
            Self::HellingerSq => one - x.sqrt().recip(),
            Self::Alpha(a) => (x.powf(a - one) - one) / (a - one),
        }
    }

    /// φ'⁻¹(y) = (φ*)'(y), strictly increasing from 0 onto (0, ∞) for
    /// y < β; +∞ for y ≥ β.
    pub fn phi_prime_inv(&self, y: T) -> T {
        assert!(!y.is_nan(), "phi_prime_inv: NaN input");
        if y >= self.beta() {
            return T::infinity();
        }
        let one = T::one();
        match *self {
            Self::Kl => y.exp(),
            Self::ReverseKl => (one - y).recip(),
            Self::JensenShannon => {
                let e = y.exp();
                e / (T::c(2.0) - e)
            }
            Self::HellingerSq => {
                let d = one - y;
                (d * d).recip()
            }
            Self::Alpha(a) => (one + (a - one) * y).powf((a - one).recip()),
        }
    }

    /// Convex conjugate φ*(y) for y < β; +∞ for y ≥ β.
    ///
    /// Closed forms throughout; the generic Fenchel identity
    /// φ*(y) = y·φ'⁻¹(y) − φ(φ'⁻¹(y)) is kept in the test suite as a
    /// cross-check.
    pub fn phi_star(&self, y: T) -> T {
        assert!(!y.is_nan(), "phi_star: NaN input");
        if y >= self.beta() {
            return T::infinity();
        }
        let one = T::one();
        match *self {
            Self::Kl => y.exp_m1(),
            Self::ReverseKl => -(-y).ln_1p(),
            // −ln(2 − e^y), written as −ln(1 − (e^y − 1)) so φ*(0) = 0 exactly.
            Self::JensenShannon => -(-y.exp_m1()).ln_1p(),
            Self::HellingerSq => y / (one - y),
            Self::Alpha(a) => ((one + (a - one) * y).powf(a / (a - one)) - one) / a,
        }
    }
}

impl<T: Real> FromStr for Generator<T> {
    type Err = Error;

    /// Parses a selection string: `kl`, `reverse_kl`, `jensen_shannon`,
    /// `hellinger_sq`, or `alpha:<value>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("alpha", v)) => {
                let a: f64 = v.parse().map_err(|_| Error::UnknownGenerator(s.into()))?;
                Self::alpha(T::c(a))
            }
            Some(_) => Err(Error::UnknownGenerator(s.into())),
            None => Self::from_name(s, None),
        }
    }
}

impl<T: Real> fmt::Display for Generator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The four parameter-free catalogue entries plus α at a midpoint value,
/// useful for sweeping tests over every family.
pub fn catalogue<T: Real>() -> Vec<Generator<T>> {
    vec![
        Generator::Kl,
        Generator::ReverseKl,
        Generator::JensenShannon,
        Generator::HellingerSq,
        Generator::Alpha(T::c(0.5)),
    ]
}
