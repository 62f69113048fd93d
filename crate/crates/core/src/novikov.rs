//! Finite Laurent polynomials over GF(2) in the quantum variable `T`.
//!
//! These play the role of scalars in the Novikov field `Z/2((T))`. Every value
//! the engine produces has finite `T`-support, so no truncation is tracked at
//! this level.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default guard on `|exponent|` used by the reduction engines.
pub const DEFAULT_EXPONENT_BOUND: i64 = 1 << 16;

/// A Laurent polynomial `sum T^e` with GF(2) coefficients, stored as its support.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NovikovScalar {
    support: BTreeSet<i64>,
}

impl NovikovScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    pub fn monomial(exponent: i64) -> Self {
        let mut support = BTreeSet::new();
        support.insert(exponent);
        Self { support }
    }

    /// Sums `T^e` over the given exponents; repeated exponents cancel in pairs.
    pub fn from_exponents<I: IntoIterator<Item = i64>>(exponents: I) -> Self {
        let mut s = Self::zero();
        for e in exponents {
            s.toggle(e);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.support.len() == 1 && self.support.contains(&0)
    }

    pub fn is_monomial(&self) -> bool {
        self.support.len() == 1
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Exponents with coefficient 1, ascending.
    pub fn exponents(&self) -> impl DoubleEndedIterator<Item = i64> + '_ {
        self.support.iter().copied()
    }

    pub fn coefficient(&self, exponent: i64) -> bool {
        self.support.contains(&exponent)
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.support.first().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.support.last().copied()
    }

    pub(crate) fn toggle(&mut self, exponent: i64) {
        if !self.support.remove(&exponent) {
            self.support.insert(exponent);
        }
    }

    /// Multiplication by `T^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        Self {
            support: self.support.iter().map(|e| e + shift).collect(),
        }
    }

    /// `T -> T^2`. Over GF(2) this is the same as squaring.
    pub fn frobenius(&self) -> Self {
        Self {
            support: self.support.iter().map(|e| 2 * e).collect(),
        }
    }

    /// Inverse of a single monomial `T^j`.
    pub fn monomial_inverse(&self) -> Result<Self> {
        match self.support.iter().next() {
            Some(&e) if self.support.len() == 1 => Ok(Self::monomial(-e)),
            _ => Err(Error::NotMonomial {
                terms: self.support.len(),
            }),
        }
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a remainder.
    ///
    /// Long division on the Laurent support, normalising both sides so the
    /// lowest exponents sit at zero.
    pub fn div_exact(&self, divisor: &NovikovScalar) -> Option<NovikovScalar> {
        let dlow = divisor.min_exponent()?;
        let dhigh = divisor.max_exponent()?;
        let mut rem = self.clone();
        let mut quot = NovikovScalar::zero();
        while let Some(top) = rem.max_exponent() {
            let low = rem.min_exponent().unwrap();
            if top - dhigh < low - dlow {
                return None;
            }
            let q = top - dhigh;
            quot.toggle(q);
            for e in divisor.exponents() {
                rem.toggle(e + q);
            }
        }
        Some(quot)
    }

    /// Errors if any exponent lies outside `[-bound, bound]`.
    pub fn check_bound(&self, bound: i64) -> Result<()> {
        for e in [self.min_exponent(), self.max_exponent()].into_iter().flatten() {
            if e.abs() > bound {
                return Err(Error::ExponentOverflow { exponent: e, bound });
            }
        }
        Ok(())
    }
}

impl AddAssign<&NovikovScalar> for NovikovScalar {
    fn add_assign(&mut self, rhs: &NovikovScalar) {
        for &e in &rhs.support {
            self.toggle(e);
        }
    }
}

impl AddAssign for NovikovScalar {
    fn add_assign(&mut self, rhs: NovikovScalar) {
        *self += &rhs;
    }
}

impl Add for &NovikovScalar {
    type Output = NovikovScalar;
    fn add(self, rhs: &NovikovScalar) -> NovikovScalar {
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        big += small;
        big
    }
}

impl Add for NovikovScalar {
    type Output = NovikovScalar;
    fn add(mut self, rhs: NovikovScalar) -> NovikovScalar {
        self += &rhs;
        self
    }
}

impl Mul for &NovikovScalar {
    type Output = NovikovScalar;
    // Exponents add under multiplication.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &NovikovScalar) -> NovikovScalar {
        let mut out = NovikovScalar::zero();
        for a in self.exponents() {
            for b in rhs.exponents() {
                out.toggle(a + b);
            }
        }
        out
    }
}

impl Mul for NovikovScalar {
    type Output = NovikovScalar;
    fn mul(self, rhs: NovikovScalar) -> NovikovScalar {
        &self * &rhs
    }
}

impl MulAssign<&NovikovScalar> for NovikovScalar {
    fn mul_assign(&mut self, rhs: &NovikovScalar) {
        *self = &*self * rhs;
    }
}

fn fmt_t_power(f: &mut fmt::Formatter<'_>, e: i64) -> fmt::Result {
    match e {
        0 => write!(f, "1"),
        1 => write!(f, "T"),
        _ => write!(f, "T^{e}"),
    }
}

impl fmt::Display for NovikovScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, e) in self.exponents().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            fmt_t_power(f, e)?;
        }
        Ok(())
    }
}

impl fmt::Debug for NovikovScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    #[serde(rename = "T", default, skip_serializing_if = "Vec::is_empty")]
    terms: Vec<(i64, u8)>,
}

impl Serialize for NovikovScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr {
            terms: self.exponents().map(|e| (e, 1)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NovikovScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(d)?;
        let mut out = NovikovScalar::zero();
        for (e, c) in repr.terms {
            match c {
                0 => {}
                1 => out.toggle(e),
                _ => {
                    return Err(serde::de::Error::custom(format!(
                        "coefficient {c} is not in GF(2)"
                    )))
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(exps: &[i64]) -> NovikovScalar {
        NovikovScalar::from_exponents(exps.iter().copied())
    }

    #[test]
    fn addition_examples() {
        assert!((&t(&[1]) + &t(&[1])).is_zero());
        assert_eq!(&t(&[-1]) + &t(&[1]), t(&[-1, 1]));
        assert_eq!(&t(&[0, 1]) + &t(&[1, 2]), t(&[0, 2]));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(&t(&[1]) * &t(&[-1]), NovikovScalar::one());
        assert_eq!(&t(&[0, 1]) * &t(&[0, 1]), t(&[0, 2]));
        assert!((&NovikovScalar::zero() * &t(&[0, -3])).is_zero());
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(t(&[0, 1]).frobenius(), t(&[0, 2]));
        assert_eq!(t(&[-1]).frobenius(), t(&[-2]));
        assert!(NovikovScalar::zero().frobenius().is_zero());
    }

    #[test]
    fn monomial_inverse_examples() {
        assert_eq!(t(&[3]).monomial_inverse().unwrap(), t(&[-3]));
        assert_eq!(
            t(&[0, 1]).monomial_inverse(),
            Err(Error::NotMonomial { terms: 2 })
        );
        assert_eq!(
            NovikovScalar::zero().monomial_inverse(),
            Err(Error::NotMonomial { terms: 0 })
        );
    }

    #[test]
    fn exact_division() {
        let a = t(&[0, 1]);
        let b = t(&[-2, 0, 3]);
        assert_eq!((&a * &b).div_exact(&a), Some(b.clone()));
        assert_eq!(t(&[0, 2]).div_exact(&t(&[0, 1])), Some(t(&[0, 1])));
        assert_eq!(t(&[0, 1, 2]).div_exact(&t(&[0, 1])), None);
    }

    #[test]
    fn bound_guard() {
        assert!(t(&[5, -5]).check_bound(5).is_ok());
        assert_eq!(
            t(&[-7, 2]).check_bound(5),
            Err(Error::ExponentOverflow {
                exponent: -7,
                bound: 5
            })
        );
    }

    #[test]
    fn json_encoding() {
        let s = t(&[2, -1]);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"T":[[-1,1],[2,1]]}"#);
        assert_eq!(serde_json::to_string(&NovikovScalar::zero()).unwrap(), "{}");
        let back: NovikovScalar = serde_json::from_str(r#"{"T":[[2,1],[-1,1]]}"#).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<NovikovScalar>("{}").unwrap().is_zero());
        assert!(serde_json::from_str::<NovikovScalar>(r#"{"T":[[0,2]]}"#).is_err());
    }

    fn scalar() -> impl Strategy<Value = NovikovScalar> {
        prop::collection::vec(-6i64..6, 0..6).prop_map(NovikovScalar::from_exponents)
    }

    proptest! {
        #[test]
        fn additive_group(a in scalar(), b in scalar(), c in scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert!((&a + &a).is_zero());
        }

        #[test]
        fn ring_laws(a in scalar(), b in scalar(), c in scalar()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &NovikovScalar::one(), a.clone());
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn frobenius_is_ring_hom(a in scalar(), b in scalar()) {
            prop_assert_eq!((&a * &b).frobenius(), &a.frobenius() * &b.frobenius());
            prop_assert_eq!((&a + &b).frobenius(), &a.frobenius() + &b.frobenius());
            prop_assert_eq!(a.frobenius(), &a * &a);
        }

        #[test]
        fn monomial_inverse_roundtrip(e in -100i64..100) {
            let a = NovikovScalar::monomial(e);
            let inv = a.monomial_inverse().unwrap();
            prop_assert!((&inv * &a).is_one());
            prop_assert_eq!(inv.monomial_inverse().unwrap(), a);
        }
    }
}
