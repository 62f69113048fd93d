//! `SH*_eq(M) = QH*_eq(M) / g Λ[[h]]` for `M = Tot(O(-1) -> CP^m)`, where
//! `g = QS(x^m + T)`.
//!
//! Normal forms are produced by leading-`h` elimination: at each `h^j` the
//! coefficient splits uniquely as `a_j + λ_j (x^m + T)` with `a_j` in the span
//! of `1, ..., x^{m-1}`, and `λ_j T^{-1} h^j g` is subtracted. Since the `h^0`
//! coefficient of `g` is `T (x^m + T)`, only monomial inverses are needed.
//!
//! Every statement about the quotient holds through the truncation order
//! only; membership verdicts say so in their name.

mod solver;

pub use solver::{req_constraint_solver, EntryStatus, SolverEntry, SolverReport};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::novikov::{NovikovScalar, DEFAULT_EXPONENT_BOUND};
use crate::quantum_ring::{QHElement, RingDescriptor};
use crate::quantum_steenrod::{EqElement, QsTable};
use crate::Degree;

pub const DEFAULT_TRUNCATION_ORDER: u32 = 32;

/// The data fixing the quotient: ring, generator `g` and truncation order.
#[derive(Clone, Debug)]
pub struct QuotientDescriptor {
    ring: RingDescriptor,
    table: QsTable,
    generator: EqElement,
    order: u32,
    exponent_bound: i64,
}

impl QuotientDescriptor {
    pub fn new(ring: RingDescriptor, order: u32) -> Result<Self> {
        let table = QsTable::new(ring)?;
        let m = ring.m();
        let kernel_gen = QHElement::from_terms(ring, [(m, 0), (0, 1)]);
        let generator = table.apply(&kernel_gen)?;
        if generator.coeff(0) != kernel_gen.shift_t(1) {
            return Err(Error::InvalidRing(format!(
                "h^0 coefficient of QS(x^m + T) is {}, expected T(x^m + T)",
                generator.coeff(0)
            )));
        }
        if generator.degree() != Degree::Homogeneous(4 * m as i64) {
            return Err(Error::InvalidRing(
                "QS(x^m + T) is not homogeneous of degree 4m".into(),
            ));
        }
        Ok(Self {
            ring,
            table,
            generator,
            order,
            exponent_bound: DEFAULT_EXPONENT_BOUND,
        })
    }

    pub fn with_exponent_bound(mut self, bound: i64) -> Self {
        self.exponent_bound = bound;
        self
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn generator(&self) -> &EqElement {
        &self.generator
    }

    pub fn qs_table(&self) -> &QsTable {
        &self.table
    }

    fn check_ring(&self, f: &EqElement) -> Result<()> {
        if f.ring() == self.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch {
                left: self.ring.to_string(),
                right: f.ring().to_string(),
            })
        }
    }

    /// Canonical normal form of `f` through `h^order`, with the multipliers
    /// `μ_j` such that `f - normal_form = sum_j μ_j h^j g`.
    pub fn reduce(&self, f: &EqElement) -> Result<Reduction> {
        self.check_ring(f)?;
        let order = f.truncation().map_or(self.order, |n| n.min(self.order));
        let m = self.ring.m();
        let mut work = f.truncate(order);
        let mut multipliers = BTreeMap::new();
        for j in 0..=order {
            let lambda = work.coeff(j).coeff(m).clone();
            if lambda.is_zero() {
                continue;
            }
            let mu = lambda.shift(-1);
            for (c, gc) in self.generator.coeffs() {
                work.add_coeff(j + c, &gc.scale(&mu));
            }
            work.check_bound(self.exponent_bound)?;
            multipliers.insert(j, mu);
        }
        Ok(Reduction {
            normal_form: work,
            multipliers,
        })
    }

    pub fn normal_form(&self, f: &EqElement) -> Result<EqElement> {
        Ok(self.reduce(f)?.normal_form)
    }

    pub fn member(&self, f: &EqElement) -> Result<Membership> {
        let red = self.reduce(f)?;
        let order = red.normal_form.truncation().unwrap_or(self.order);
        let first = red.normal_form.coeffs().next().map(|(c, _)| c);
        Ok(match first {
            None => Membership::ZeroThroughOrder { order },
            Some(h_degree) => Membership::NonMember { h_degree },
        })
    }

    /// The symplectic square of a class given in the basis `1, ..., x^{m-1}`.
    pub fn ps(&self, s: &QHElement) -> Result<EqElement> {
        if s.ring() != self.ring {
            return Err(Error::RingMismatch {
                left: self.ring.to_string(),
                right: s.ring().to_string(),
            });
        }
        let m = self.ring.m();
        if !s.coeff(m).is_zero() {
            return Err(Error::NotInBasis { exponent: m });
        }
        self.normal_form(&self.table.apply(s)?)
    }

    /// Normal form of `x * g`. Nonzero output means `g Λ[[h]]` is not visibly
    /// an ideal, so no product is defined on the quotient.
    pub fn ring_closure_diagnostic(&self) -> Result<EqElement> {
        let x = EqElement::from_qh(QHElement::x_power(self.ring, 1), 0);
        self.normal_form(&x.eq_mul(&self.generator)?)
    }
}

/// Output of [`QuotientDescriptor::reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub normal_form: EqElement,
    /// `h`-exponent `j` to the Λ-multiplier `μ_j` of `h^j g`.
    pub multipliers: BTreeMap<u32, NovikovScalar>,
}

impl Reduction {
    /// `sum_j μ_j h^j g`, truncated like the normal form.
    pub fn witness(&self, q: &QuotientDescriptor) -> EqElement {
        let mut out = EqElement::zero(q.ring);
        if let Some(n) = self.normal_form.truncation() {
            out = out.truncate(n);
        }
        for (&j, mu) in &self.multipliers {
            for (c, gc) in q.generator.coeffs() {
                out.add_coeff(j + c, &gc.scale(mu));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    /// The normal form vanishes through `h^order`.
    ZeroThroughOrder { order: u32 },
    /// First `h`-exponent where the normal form is nonzero.
    NonMember { h_degree: u32 },
}

/// Is every coefficient of `f` free of `x^m`?
pub fn in_normal_basis(f: &EqElement) -> bool {
    let m = f.ring().m();
    f.coeffs().all(|(_, a)| a.coeff(m).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_steenrod::{qs_element, qs_power};
    use proptest::prelude::*;

    fn ring(m: u32) -> RingDescriptor {
        RingDescriptor::line_bundle(m, 1).unwrap()
    }

    fn eq(r: RingDescriptor, terms: &[(u32, i64, u32)]) -> EqElement {
        EqElement::from_terms(r, terms.iter().copied())
    }

    #[test]
    fn descriptor_rejects_other_twists() {
        assert_eq!(
            QuotientDescriptor::new(RingDescriptor::line_bundle(4, 2).unwrap(), 8).unwrap_err(),
            Error::UnsupportedTwist(2)
        );
    }

    #[test]
    fn reduce_examples() {
        let r = ring(4);
        let q = QuotientDescriptor::new(r, 32).unwrap();
        assert!(q.normal_form(q.generator()).unwrap().is_zero());
        let red = q.reduce(q.generator()).unwrap();
        assert_eq!(red.multipliers.len(), 1);
        assert!(red.multipliers[&0].is_one());

        assert_eq!(
            q.normal_form(&qs_power(4, r).unwrap()).unwrap(),
            eq(r, &[(0, 2, 0)]).truncate(32)
        );

        let q10 = QuotientDescriptor::new(r, 10).unwrap();
        assert_eq!(
            q10.normal_form(&qs_power(2, r).unwrap()).unwrap(),
            eq(r, &[(0, 1, 0), (3, 0, 2), (1, 0, 6), (0, 0, 8), (3, -1, 10)]).truncate(10)
        );
    }

    #[test]
    fn membership_examples() {
        let r = ring(4);
        let q = QuotientDescriptor::new(r, 32).unwrap();
        assert_eq!(
            q.member(q.generator()).unwrap(),
            Membership::ZeroThroughOrder { order: 32 }
        );
        let lam = NovikovScalar::from_exponents([0, 1]);
        let f = QHElement::from_terms(r, [(4, 0), (0, 1)]).scale(&lam);
        assert_eq!(
            q.member(&qs_element(&f).unwrap()).unwrap(),
            Membership::ZeroThroughOrder { order: 32 }
        );
        assert_eq!(
            q.member(&eq(r, &[(1, 0, 0)])).unwrap(),
            Membership::NonMember { h_degree: 0 }
        );
        assert!(q.member(&eq(ring(3), &[(1, 0, 0)])).is_err());
    }

    #[test]
    fn ps_examples() {
        let r = ring(4);
        let q = QuotientDescriptor::new(r, 32).unwrap();
        assert_eq!(
            q.ps(&QHElement::x_power(r, 1)).unwrap(),
            eq(r, &[(2, 0, 0), (1, 0, 2)]).truncate(32)
        );
        assert_eq!(
            q.ps(&QHElement::monomial(r, 0, 1)).unwrap(),
            eq(r, &[(0, 2, 0)]).truncate(32)
        );
        let q10 = QuotientDescriptor::new(r, 10).unwrap();
        assert_eq!(
            q10.ps(&QHElement::x_power(r, 3)).unwrap(),
            eq(r, &[(2, 1, 0), (0, 1, 4), (2, 0, 8), (1, 0, 10)]).truncate(10)
        );
        assert_eq!(
            q.ps(&QHElement::x_power(r, 4)).unwrap_err(),
            Error::NotInBasis { exponent: 4 }
        );
    }

    #[test]
    fn exponent_guard_trips() {
        let r = ring(4);
        let q = QuotientDescriptor::new(r, 32).unwrap().with_exponent_bound(2);
        assert!(matches!(
            q.reduce(&qs_power(2, r).unwrap()),
            Err(Error::ExponentOverflow { .. })
        ));
    }

    #[test]
    fn reduce_qs_xm_is_t_squared() {
        for m in 1..=10 {
            let r = ring(m);
            let q = QuotientDescriptor::new(r, 32).unwrap();
            assert_eq!(
                q.normal_form(&qs_power(m, r).unwrap()).unwrap(),
                eq(r, &[(0, 2, 0)]).truncate(32),
                "m={m}"
            );
        }
    }

    #[test]
    fn closure_diagnostic_is_nonzero_at_m4() {
        let r = ring(4);
        let q = QuotientDescriptor::new(r, 32).unwrap();
        let x = EqElement::from_qh(QHElement::x_power(r, 1), 0);
        let xg = x.eq_mul(q.generator()).unwrap();
        assert_eq!(xg, eq(r, &[(4, 1, 2), (3, 1, 4), (2, 1, 6), (1, 1, 8)]));
        assert!(!q.ring_closure_diagnostic().unwrap().is_zero());
    }

    fn eq_element(m: u32, max_h: u32) -> impl Strategy<Value = EqElement> {
        let r = ring(m);
        prop::collection::vec((0..=m, -3i64..4, 0..=max_h), 0..10)
            .prop_map(move |ts| EqElement::from_terms(r, ts))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reduction_laws(f in eq_element(4, 32), g in eq_element(4, 32), j in 0u32..6) {
            let r = ring(4);
            let q = QuotientDescriptor::new(r, 32).unwrap();
            let red = q.reduce(&f).unwrap();
            let nf = &red.normal_form;
            prop_assert!(in_normal_basis(nf));
            prop_assert_eq!(&q.normal_form(nf).unwrap(), nf);
            prop_assert_eq!(&nf.checked_add(&red.witness(&q)).unwrap(), &f.truncate(32));
            let sum = f.checked_add(&g).unwrap();
            prop_assert_eq!(
                q.normal_form(&sum).unwrap(),
                nf.checked_add(&q.normal_form(&g).unwrap()).unwrap()
            );
            let shifted = f.shift_h(j).truncate(32);
            prop_assert_eq!(
                q.normal_form(&shifted).unwrap(),
                q.normal_form(&nf.shift_h(j).truncate(32)).unwrap()
            );
        }

        #[test]
        fn ps_is_independent_of_lift(
            s in prop::collection::vec((0u32..4, -2i64..3), 0..5),
            lam in prop::collection::vec(-3i64..4, 1..4),
        ) {
            let r = ring(4);
            let q = QuotientDescriptor::new(r, 24).unwrap();
            let s = QHElement::from_terms(r, s);
            let lam = NovikovScalar::from_exponents(lam);
            let lift = &s + &QHElement::from_terms(r, [(4, 0), (0, 1)]).scale(&lam);
            let via_lift = q.normal_form(&qs_element(&lift).unwrap()).unwrap();
            prop_assert_eq!(via_lift, q.ps(&s).unwrap());
        }
    }
}
