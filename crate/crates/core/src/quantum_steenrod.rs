//! The quantum Steenrod square on `QH*(Tot(O(-1) -> CP^m))`.
//!
//! `QS(x^{i+1}) = QS(x^i) * QS(x) + c_i`, starting from `QS(1) = 1` and
//! `QS(x) = x*x + x h^2`, with the closed-form corrections
//!
//! ```text
//! c_i = C(i, m-i) x T h^{2+4i-2m}          (1 <= i < m)
//! c_m = x T h^{2+2m} + x T^2 h^2
//! ```
//!
//! `QS` is additive and Frobenius-semilinear: `QS(T^b f) = T^{2b} QS(f)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::novikov::NovikovScalar;
use crate::quantum_ring::{fmt_x_t, QHElement, RingDescriptor};
use crate::steenrod::binom_mod2;
use crate::Degree;

/// An element of `QH*(M)[[h]]`, possibly truncated above some `h`-exponent.
///
/// `truncation: Some(n)` means only coefficients of `h^0 ..= h^n` are
/// meaningful; `None` means the series is exact (finitely many terms).
#[derive(Clone, PartialEq, Eq)]
pub struct EqElement {
    ring: RingDescriptor,
    coeffs: BTreeMap<u32, QHElement>,
    truncation: Option<u32>,
}

fn min_truncation(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl EqElement {
    pub fn zero(ring: RingDescriptor) -> Self {
        Self {
            ring,
            coeffs: BTreeMap::new(),
            truncation: None,
        }
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::from_qh(QHElement::one(ring), 0)
    }

    /// `a h^exponent`.
    pub fn from_qh(a: QHElement, exponent: u32) -> Self {
        let mut e = Self::zero(a.ring());
        e.add_coeff(exponent, &a);
        e
    }

    /// Sum of `x^a T^t h^c` over `(a, t, c)` triples.
    pub fn from_terms<I: IntoIterator<Item = (u32, i64, u32)>>(ring: RingDescriptor, terms: I) -> Self {
        let mut by_h: BTreeMap<u32, Vec<(u32, i64)>> = BTreeMap::new();
        for (a, t, c) in terms {
            by_h.entry(c).or_default().push((a, t));
        }
        let mut e = Self::zero(ring);
        for (c, ts) in by_h {
            e.add_coeff(c, &QHElement::from_terms(ring, ts));
        }
        e
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `h^c` (zero when absent).
    pub fn coeff(&self, c: u32) -> QHElement {
        self.coeffs
            .get(&c)
            .cloned()
            .unwrap_or_else(|| QHElement::zero(self.ring))
    }

    /// Nonzero coefficients, ascending in the `h`-exponent.
    pub fn coeffs(&self) -> impl Iterator<Item = (u32, &QHElement)> + '_ {
        self.coeffs.iter().map(|(&c, a)| (c, a))
    }

    /// `(x, T, h)` exponent triples ordered by `h`, then `x`, then `T`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, i64, u32)> + '_ {
        self.coeffs
            .iter()
            .flat_map(|(&c, a)| a.terms().map(move |(x, t)| (x, t, c)))
    }

    pub fn max_h(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub(crate) fn add_coeff(&mut self, c: u32, a: &QHElement) {
        if self.truncation.is_some_and(|n| c > n) || a.is_zero() {
            return;
        }
        let slot = self
            .coeffs
            .entry(c)
            .or_insert_with(|| QHElement::zero(self.ring));
        *slot += a;
        if slot.is_zero() {
            self.coeffs.remove(&c);
        }
    }

    /// Drops every `h^c` with `c > order` and records the truncation.
    pub fn truncate(&self, order: u32) -> EqElement {
        let order = min_truncation(self.truncation, Some(order));
        let n = order.expect("just set");
        EqElement {
            ring: self.ring,
            coeffs: self.coeffs.range(..=n).map(|(&c, a)| (c, a.clone())).collect(),
            truncation: order,
        }
    }

    pub fn checked_add(&self, other: &EqElement) -> Result<EqElement> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            });
        }
        let mut out = self.clone();
        out.truncation = min_truncation(self.truncation, other.truncation);
        if let Some(n) = out.truncation {
            out.coeffs.retain(|&c, _| c <= n);
        }
        for (c, a) in other.coeffs() {
            out.add_coeff(c, a);
        }
        Ok(out)
    }

    /// Cauchy product in `h` with the quantum product on coefficients.
    pub fn eq_mul(&self, other: &EqElement) -> Result<EqElement> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            });
        }
        let mut out = EqElement::zero(self.ring);
        out.truncation = min_truncation(self.truncation, other.truncation);
        for (c1, a) in self.coeffs() {
            for (c2, b) in other.coeffs() {
                if out.truncation.is_some_and(|n| c1 + c2 > n) {
                    break;
                }
                out.add_coeff(c1 + c2, &a.qmul(b)?);
            }
        }
        Ok(out)
    }

    /// Multiplication by a Λ-scalar.
    pub fn scale(&self, s: &NovikovScalar) -> EqElement {
        let mut out = EqElement::zero(self.ring);
        out.truncation = self.truncation;
        for (c, a) in self.coeffs() {
            out.add_coeff(c, &a.scale(s));
        }
        out
    }

    /// Multiplication by `h^shift`; the truncation order moves along.
    pub fn shift_h(&self, shift: u32) -> EqElement {
        EqElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|(&c, a)| (c + shift, a.clone())).collect(),
            truncation: self.truncation.map(|n| n + shift),
        }
    }

    /// Restriction to the terms with `T`-exponent zero.
    pub fn t_free_part(&self) -> EqElement {
        let mut out = EqElement::zero(self.ring);
        out.truncation = self.truncation;
        for (c, a) in self.coeffs() {
            let kept = QHElement::from_terms(self.ring, a.terms().filter(|&(_, t)| t == 0));
            out.add_coeff(c, &kept);
        }
        out
    }

    /// Total degree `2a + |T| b + c` of `x^a T^b h^c`.
    pub fn degree(&self) -> Degree {
        let t_deg = self.ring.t_degree();
        Degree::of_terms(
            self.terms()
                .map(|(a, t, c)| 2 * a as i64 + t_deg * t + c as i64),
        )
    }

    pub fn check_bound(&self, bound: i64) -> Result<()> {
        self.coeffs.values().try_for_each(|a| a.check_bound(bound))
    }

    /// Inverse up to `h^order`, by the geometric-series recursion
    /// `b_0 = u^{-1}`, `b_n = u^{-1} sum_{j>=1} a_j b_{n-j}`.
    ///
    /// The constant term must be a unit `T^j * 1`.
    pub fn eq_invert(&self, order: u32) -> Result<EqElement> {
        let a0 = self.coeff(0);
        let unit = a0.coeff(0);
        let scalar_only = a0.coeffs()[1..].iter().all(NovikovScalar::is_zero);
        if !scalar_only || !unit.is_monomial() {
            return Err(Error::NotInvertibleConstantTerm(a0.to_string()));
        }
        let u_inv = QHElement::scalar(self.ring, unit.monomial_inverse()?);
        let mut b: Vec<QHElement> = vec![u_inv.clone()];
        for n in 1..=order {
            let mut acc = QHElement::zero(self.ring);
            for (j, aj) in self.coeffs.range(1..=n) {
                acc += &aj.qmul(&b[(n - j) as usize])?;
            }
            b.push(acc.qmul(&u_inv)?);
        }
        let mut out = EqElement::zero(self.ring);
        for (c, bc) in b.iter().enumerate() {
            out.add_coeff(c as u32, bc);
        }
        out.truncation = Some(order);
        Ok(out)
    }
}

impl fmt::Display for EqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (x, t, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (x, t, c) {
                (_, _, 0) => fmt_x_t(f, x, t)?,
                (0, 0, 1) => write!(f, "h")?,
                (0, 0, _) => write!(f, "h^{c}")?,
                _ => {
                    fmt_x_t(f, x, t)?;
                    if c == 1 {
                        write!(f, " h")?;
                    } else {
                        write!(f, " h^{c}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for EqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")?;
        if let Some(n) = self.truncation {
            write!(f, " + O(h^{})", n + 1)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct XthTerm {
    pub x: u32,
    #[serde(rename = "T")]
    pub t: i64,
    pub h: u32,
}

#[derive(Serialize, Deserialize)]
struct EqRepr {
    ring: RingDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<u32>,
    #[serde(default)]
    terms: Vec<XthTerm>,
}

impl Serialize for EqElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EqRepr {
            ring: self.ring,
            order: self.truncation,
            terms: self.terms().map(|(x, t, h)| XthTerm { x, t, h }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EqElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = EqRepr::deserialize(d)?;
        let e = EqElement::from_terms(repr.ring, repr.terms.into_iter().map(|t| (t.x, t.t, t.h)));
        Ok(match repr.order {
            Some(n) => e.truncate(n),
            None => e,
        })
    }
}

fn require_k1(ring: RingDescriptor) -> Result<()> {
    if ring.k() == 1 {
        Ok(())
    } else {
        Err(Error::UnsupportedTwist(ring.k()))
    }
}

/// The quantum Cartan correction added when passing from `x^i` to `x^{i+1}`.
pub fn correction(i: u32, ring: RingDescriptor) -> Result<EqElement> {
    require_k1(ring)?;
    let m = ring.m();
    if i == 0 || i > m {
        return Err(Error::ExponentRange { exponent: i, max: m });
    }
    if i == m {
        return Ok(EqElement::from_terms(ring, [(1, 1, 2 + 2 * m), (1, 2, 2)]));
    }
    if !binom_mod2(i as u64, (m - i) as u64) {
        return Ok(EqElement::zero(ring));
    }
    let exponent = 2 + 4 * i as i64 - 2 * m as i64;
    if exponent < 0 {
        return Err(Error::NegativeHExponent { i, exponent });
    }
    Ok(EqElement::from_terms(ring, [(1, 1, exponent as u32)]))
}

/// `QS(x^i)` for `i = 0 ..= m + 1`, computed once per ring.
#[derive(Clone, Debug)]
pub struct QsTable {
    ring: RingDescriptor,
    rows: Vec<EqElement>,
}

impl QsTable {
    pub fn new(ring: RingDescriptor) -> Result<Self> {
        require_k1(ring)?;
        let m = ring.m();
        let x = QHElement::x_power(ring, 1);
        let qs_x = EqElement::from_qh(x.qmul(&x)?, 0)
            .checked_add(&EqElement::from_qh(x, 2))?;
        let mut rows = vec![EqElement::one(ring), qs_x.clone()];
        for i in 1..=m {
            let next = rows[i as usize]
                .eq_mul(&qs_x)?
                .checked_add(&correction(i, ring)?)?;
            rows.push(next);
        }
        Ok(Self { ring, rows })
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    /// `QS(x^i)`, `0 <= i <= m + 1`.
    pub fn power(&self, i: u32) -> Result<&EqElement> {
        self.rows.get(i as usize).ok_or(Error::ExponentRange {
            exponent: i,
            max: self.ring.m() + 1,
        })
    }

    pub fn rows(&self) -> &[EqElement] {
        &self.rows
    }

    /// `QS(f)` by additivity and `QS(x^a T^b) = T^{2b} QS(x^a)`.
    pub fn apply(&self, f: &QHElement) -> Result<EqElement> {
        if f.ring() != self.ring {
            return Err(Error::RingMismatch {
                left: self.ring.to_string(),
                right: f.ring().to_string(),
            });
        }
        let mut out = EqElement::zero(self.ring);
        for (a, c) in f.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.checked_add(&self.rows[a].scale(&c.frobenius()))?;
        }
        Ok(out)
    }
}

pub fn qs_power(i: u32, ring: RingDescriptor) -> Result<EqElement> {
    QsTable::new(ring)?.power(i).cloned()
}

pub fn qs_element(f: &QHElement) -> Result<EqElement> {
    QsTable::new(f.ring())?.apply(f)
}

/// `QS(x^m) = x^m h^{2m} + T sum_{i=1}^m x^i h^{2m-2i}`.
pub fn closed_form_qsxm(ring: RingDescriptor) -> Result<EqElement> {
    require_k1(ring)?;
    let m = ring.m();
    Ok(EqElement::from_terms(
        ring,
        std::iter::once((m, 0, 2 * m)).chain((1..=m).map(|i| (i, 1, 2 * m - 2 * i))),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steenrod::total_sq_projective;
    use proptest::prelude::*;

    fn ring(m: u32) -> RingDescriptor {
        RingDescriptor::line_bundle(m, 1).unwrap()
    }

    fn eq(r: RingDescriptor, terms: &[(u32, i64, u32)]) -> EqElement {
        EqElement::from_terms(r, terms.iter().copied())
    }

    #[test]
    fn eq_mul_examples() {
        let r = ring(4);
        let a = eq(r, &[(2, 0, 0), (1, 0, 2)]);
        assert_eq!(a.eq_mul(&a).unwrap(), eq(r, &[(4, 0, 0), (2, 0, 4)]));
        assert_eq!(EqElement::one(r).eq_mul(&a).unwrap(), a);
        let r1 = ring(1);
        let b = eq(r1, &[(1, 0, 2)]);
        assert_eq!(b.eq_mul(&b).unwrap(), eq(r1, &[(1, 1, 4)]));
        assert!(a.eq_mul(&b).is_err());
    }

    #[test]
    fn eq_mul_respects_truncation() {
        let r = ring(4);
        let a = eq(r, &[(0, 0, 0), (0, 0, 3)]).truncate(4);
        let sq = a.eq_mul(&a).unwrap();
        assert_eq!(sq.truncation(), Some(4));
        assert_eq!(sq, eq(r, &[(0, 0, 0)]).truncate(4));
    }

    #[test]
    fn eq_invert_examples() {
        let r = ring(4);
        let inv = eq(r, &[(0, 0, 0), (0, 0, 1)]).eq_invert(12).unwrap();
        assert_eq!(inv, eq(r, &(0..=12).map(|c| (0, 0, c)).collect::<Vec<_>>()).truncate(12));
        let inv = eq(r, &[(0, 1, 0)]).eq_invert(5).unwrap();
        assert_eq!(inv, eq(r, &[(0, -1, 0)]).truncate(5));
        assert!(matches!(
            eq(r, &[(1, 0, 0)]).eq_invert(5),
            Err(Error::NotInvertibleConstantTerm(_))
        ));
        assert!(EqElement::zero(r).eq_invert(3).is_err());
    }

    #[test]
    fn correction_examples() {
        let r = ring(4);
        assert_eq!(correction(2, r).unwrap(), eq(r, &[(1, 1, 2)]));
        assert!(correction(1, r).unwrap().is_zero());
        assert_eq!(correction(4, r).unwrap(), eq(r, &[(1, 1, 10), (1, 2, 2)]));
        assert_eq!(correction(3, r).unwrap(), eq(r, &[(1, 1, 6)]));
        assert_eq!(
            correction(1, RingDescriptor::line_bundle(4, 3).unwrap()),
            Err(Error::UnsupportedTwist(3))
        );
        assert!(matches!(correction(5, r), Err(Error::ExponentRange { .. })));
    }

    #[test]
    fn qs_power_examples() {
        let r = ring(4);
        assert_eq!(
            qs_power(3, r).unwrap(),
            eq(r, &[(2, 1, 0), (4, 0, 4), (3, 0, 6)])
        );
        assert_eq!(qs_power(0, ring(7)).unwrap(), EqElement::one(ring(7)));
        assert_eq!(qs_power(5, r).unwrap(), eq(r, &[(2, 2, 0), (1, 2, 2)]));
        assert!(qs_power(6, r).is_err());
        assert_eq!(qs_power(1, r).unwrap().to_string(), "x^2 + x h^2");
    }

    #[test]
    fn qs_element_examples() {
        let r = ring(4);
        assert_eq!(
            qs_element(&QHElement::monomial(r, 1, 1)).unwrap(),
            eq(r, &[(2, 2, 0), (1, 2, 2)])
        );
        let x = QHElement::x_power(r, 1);
        assert!(qs_element(&(&x + &x)).unwrap().is_zero());
        let g = QHElement::from_terms(r, [(4, 0), (0, 1)]);
        assert_eq!(
            qs_element(&g).unwrap(),
            eq(r, &[(4, 1, 0), (3, 1, 2), (2, 1, 4), (1, 1, 6), (4, 0, 8), (0, 2, 0)])
        );
    }

    #[test]
    fn closed_form_examples() {
        let r = ring(4);
        assert_eq!(
            closed_form_qsxm(r).unwrap(),
            eq(r, &[(4, 0, 8), (4, 1, 0), (3, 1, 2), (2, 1, 4), (1, 1, 6)])
        );
        assert_eq!(closed_form_qsxm(ring(1)).unwrap(), eq(ring(1), &[(1, 0, 2), (1, 1, 0)]));
        assert_eq!(
            closed_form_qsxm(ring(2)).unwrap(),
            eq(ring(2), &[(2, 0, 4), (2, 1, 0), (1, 1, 2)])
        );
        assert_eq!(qs_power(1, ring(1)).unwrap(), closed_form_qsxm(ring(1)).unwrap());
    }

    #[test]
    fn recursion_matches_closed_form() {
        for m in 1..=10 {
            assert_eq!(qs_power(m, ring(m)).unwrap(), closed_form_qsxm(ring(m)).unwrap(), "m={m}");
        }
    }

    #[test]
    fn semilinearity_identity() {
        for m in 1..=10 {
            let r = ring(m);
            assert_eq!(
                qs_power(m + 1, r).unwrap(),
                qs_element(&QHElement::monomial(r, 1, 1)).unwrap(),
                "m={m}"
            );
        }
    }

    #[test]
    fn degree_doubling() {
        for m in 1..=10 {
            let table = QsTable::new(ring(m)).unwrap();
            for (i, row) in table.rows().iter().enumerate() {
                assert_eq!(row.degree(), Degree::Homogeneous(4 * i as i64), "m={m} i={i}");
            }
        }
    }

    #[test]
    fn classical_limit() {
        for m in 1..=10 {
            let r = ring(m);
            for i in (0..=m).filter(|i| 2 * i <= m) {
                let classical = total_sq_projective(i, &r).unwrap();
                let quantum = qs_power(i, r).unwrap().t_free_part();
                let as_pairs: Vec<(u32, u32)> = quantum.terms().map(|(x, _, h)| (h, x)).collect();
                let expected: Vec<(u32, u32)> = classical.terms().collect();
                assert_eq!(as_pairs, expected, "m={m} i={i}");
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let r = ring(4);
        let e = qs_power(3, r).unwrap().truncate(10);
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.starts_with(r#"{"ring":{"m":4,"k":1},"order":10,"terms":[{"x":2,"T":1,"h":0}"#));
        assert_eq!(serde_json::from_str::<EqElement>(&s).unwrap(), e);
    }

    fn element(r: RingDescriptor) -> impl Strategy<Value = QHElement> {
        prop::collection::vec((0..=r.m(), -3i64..4), 0..6)
            .prop_map(move |ts| QHElement::from_terms(r, ts))
    }

    proptest! {
        #[test]
        fn h0_coefficient_is_quantum_square(f in element(ring(4))) {
            let qs = qs_element(&f).unwrap();
            prop_assert_eq!(qs.coeff(0), f.qmul(&f).unwrap());
        }

        #[test]
        fn additivity(a in element(ring(5)), b in element(ring(5))) {
            prop_assert_eq!(
                qs_element(&(&a + &b)).unwrap(),
                qs_element(&a).unwrap().checked_add(&qs_element(&b).unwrap()).unwrap()
            );
        }

        #[test]
        fn inverse_is_inverse(
            t0 in -3i64..3,
            rest in prop::collection::vec((0u32..5, -2i64..3, 1u32..8), 0..6),
        ) {
            let r = ring(4);
            let mut terms = vec![(0, t0, 0)];
            terms.extend(rest);
            let a = EqElement::from_terms(r, terms);
            let b = a.eq_invert(16).unwrap();
            prop_assert_eq!(a.eq_mul(&b).unwrap(), EqElement::one(r).truncate(16));
        }
    }
}
