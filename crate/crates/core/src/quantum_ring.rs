//! Quantum cohomology rings `Λ[x]/(x^{m+1} + T x^k)`.
//!
//! `k >= 1` is the total space of `O(-k) -> CP^m`; `k = 0` is closed `CP^m`
//! itself (`x^{m+1} = T`), kept for testing. Some sources write the kernel
//! generator `x^n + T` with `n` standing for `m`; here `m` is used throughout.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::LaurentMatrix;
use crate::novikov::NovikovScalar;
use crate::Degree;

/// Parameters fixing the presentation `Λ[x]/(x^{m+1} + T x^k)`, `|x| = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RingRepr", into = "RingRepr")]
pub struct RingDescriptor {
    m: u32,
    k: u32,
}

#[derive(Serialize, Deserialize)]
struct RingRepr {
    m: u32,
    k: u32,
}

impl TryFrom<RingRepr> for RingDescriptor {
    type Error = Error;
    fn try_from(r: RingRepr) -> Result<Self> {
        if r.k == 0 {
            RingDescriptor::projective_space(r.m)
        } else {
            RingDescriptor::line_bundle(r.m, r.k)
        }
    }
}

impl From<RingDescriptor> for RingRepr {
    fn from(r: RingDescriptor) -> Self {
        RingRepr { m: r.m, k: r.k }
    }
}

impl RingDescriptor {
    /// `Tot(O(-k) -> CP^m)`, requiring `1 <= k <= m`.
    pub fn line_bundle(m: u32, k: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidRing("m must be at least 1".into()));
        }
        if k == 0 || k > m {
            return Err(Error::InvalidRing(format!(
                "twist k = {k} must satisfy 1 <= k <= m = {m}"
            )));
        }
        Ok(Self { m, k })
    }

    /// Closed `CP^m`, i.e. the relation `x^{m+1} = T`.
    pub fn projective_space(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidRing("m must be at least 1".into()));
        }
        Ok(Self { m, k: 0 })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn x_degree(&self) -> i64 {
        2
    }

    /// `|T| = 2(m + 1 - k)`, the value making the relation homogeneous.
    pub fn t_degree(&self) -> i64 {
        2 * (self.m as i64 + 1 - self.k as i64)
    }

    /// Rank of the ring as a free Λ-module.
    pub fn rank(&self) -> usize {
        self.m as usize + 1
    }

    fn check_same(&self, other: &RingDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            write!(f, "QH(CP^{})", self.m)
        } else {
            write!(f, "QH(Tot(O(-{}) -> CP^{}))", self.k, self.m)
        }
    }
}

/// An element `sum_a c_a x^a` with `a <= m`, held densely by `x`-exponent.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QHElement {
    ring: RingDescriptor,
    coeffs: Vec<NovikovScalar>,
}

impl QHElement {
    pub fn zero(ring: RingDescriptor) -> Self {
        Self {
            ring,
            coeffs: vec![NovikovScalar::zero(); ring.rank()],
        }
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::scalar(ring, NovikovScalar::one())
    }

    pub fn scalar(ring: RingDescriptor, s: NovikovScalar) -> Self {
        let mut e = Self::zero(ring);
        e.coeffs[0] = s;
        e
    }

    /// `x^a`, reduced.
    pub fn x_power(ring: RingDescriptor, a: u32) -> Self {
        Self::monomial(ring, a, 0)
    }

    /// `x^a T^t`, reduced.
    pub fn monomial(ring: RingDescriptor, a: u32, t: i64) -> Self {
        reduce_poly([(a, NovikovScalar::monomial(t))], ring)
    }

    /// Sum of `x^a T^t` over the given pairs, reduced.
    pub fn from_terms<I: IntoIterator<Item = (u32, i64)>>(ring: RingDescriptor, terms: I) -> Self {
        let mut raw: BTreeMap<u32, NovikovScalar> = BTreeMap::new();
        for (a, t) in terms {
            raw.entry(a).or_default().toggle(t);
        }
        reduce_poly(raw, ring)
    }

    /// Builds an element from a coefficient vector already in reduced form.
    pub fn from_coeffs(ring: RingDescriptor, coeffs: Vec<NovikovScalar>) -> Result<Self> {
        if coeffs.len() > ring.rank() {
            return Err(Error::ExponentRange {
                exponent: coeffs.len() as u32 - 1,
                max: ring.m,
            });
        }
        let mut e = Self::zero(ring);
        for (a, c) in coeffs.into_iter().enumerate() {
            e.coeffs[a] = c;
        }
        Ok(e)
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn coeffs(&self) -> &[NovikovScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, a: u32) -> &NovikovScalar {
        &self.coeffs[a as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(NovikovScalar::is_zero)
    }

    /// `(x-exponent, T-exponent)` pairs, ascending by `x` then `T`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(a, c)| c.exponents().map(move |t| (a as u32, t)))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().map(NovikovScalar::len).sum()
    }

    pub fn checked_add(&self, other: &QHElement) -> Result<QHElement> {
        self.ring.check_same(&other.ring)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &NovikovScalar) -> QHElement {
        QHElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiplication by `T^shift`.
    pub fn shift_t(&self, shift: i64) -> QHElement {
        QHElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|c| c.shift(shift)).collect(),
        }
    }

    /// Applies `T -> T^2` to every coefficient, leaving `x` alone.
    pub fn frobenius_coeffs(&self) -> QHElement {
        QHElement {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(NovikovScalar::frobenius).collect(),
        }
    }

    /// Quantum product.
    pub fn qmul(&self, other: &QHElement) -> Result<QHElement> {
        self.ring.check_same(&other.ring)?;
        let mut raw: BTreeMap<u32, NovikovScalar> = BTreeMap::new();
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                *raw.entry((a + b) as u32).or_default() += ca * cb;
            }
        }
        Ok(reduce_poly(raw, self.ring))
    }

    /// Grading `|x^a T^b| = 2a + |T| b`.
    pub fn degree(&self) -> Degree {
        let t_deg = self.ring.t_degree();
        Degree::of_terms(self.terms().map(|(a, t)| 2 * a as i64 + t_deg * t))
    }

    /// The Seidel map `r`, quantum multiplication by `x`.
    pub fn seidel_r(&self) -> QHElement {
        self.qmul(&QHElement::x_power(self.ring, 1))
            .expect("same ring")
    }

    pub fn check_bound(&self, bound: i64) -> Result<()> {
        self.coeffs.iter().try_for_each(|c| c.check_bound(bound))
    }
}

impl AddAssign<&QHElement> for QHElement {
    fn add_assign(&mut self, rhs: &QHElement) {
        assert_eq!(self.ring, rhs.ring, "adding elements of different rings");
        for (c, o) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c += o;
        }
    }
}

impl Add for &QHElement {
    type Output = QHElement;
    fn add(self, rhs: &QHElement) -> QHElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

pub(crate) fn fmt_x_t(f: &mut fmt::Formatter<'_>, a: u32, t: i64) -> fmt::Result {
    let mut parts: Vec<String> = Vec::new();
    match a {
        0 => {}
        1 => parts.push("x".into()),
        _ => parts.push(format!("x^{a}")),
    }
    match t {
        0 => {}
        1 => parts.push("T".into()),
        _ => parts.push(format!("T^{t}")),
    }
    if parts.is_empty() {
        write!(f, "1")
    } else {
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Display for QHElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (a, t)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            fmt_x_t(f, a, t)?;
        }
        Ok(())
    }
}

impl fmt::Debug for QHElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.ring)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct XtTerm {
    pub x: u32,
    #[serde(rename = "T")]
    pub t: i64,
}

#[derive(Serialize, Deserialize)]
struct QHRepr {
    ring: RingDescriptor,
    #[serde(default)]
    terms: Vec<XtTerm>,
}

impl Serialize for QHElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QHRepr {
            ring: self.ring,
            terms: self.terms().map(|(x, t)| XtTerm { x, t }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QHElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = QHRepr::deserialize(d)?;
        Ok(QHElement::from_terms(
            repr.ring,
            repr.terms.into_iter().map(|t| (t.x, t.t)),
        ))
    }
}

/// Rewrites `x^{m+1} -> T x^k` until every exponent is at most `m`.
///
/// Exponents are eliminated from the top down; each rewrite lowers the
/// `x`-degree by `m + 1 - k >= 1`, so one pass suffices.
pub fn reduce_poly<I>(raw: I, ring: RingDescriptor) -> QHElement
where
    I: IntoIterator<Item = (u32, NovikovScalar)>,
{
    let mut dense: Vec<NovikovScalar> = vec![NovikovScalar::zero(); ring.rank()];
    for (a, c) in raw {
        let a = a as usize;
        if a >= dense.len() {
            dense.resize(a + 1, NovikovScalar::zero());
        }
        dense[a] += &c;
    }
    let top = ring.m as usize + 1;
    let drop = top - ring.k as usize;
    for a in (top..dense.len()).rev() {
        let c = std::mem::take(&mut dense[a]);
        if !c.is_zero() {
            dense[a - drop] += &c.shift(1);
        }
    }
    dense.truncate(ring.rank());
    QHElement { ring, coeffs: dense }
}

/// The matrix of `r` in the basis `1, x, ..., x^m` (column `a` is `r(x^a)`).
pub fn seidel_matrix(ring: RingDescriptor) -> LaurentMatrix {
    let cols: Vec<Vec<NovikovScalar>> = (0..=ring.m)
        .map(|a| QHElement::x_power(ring, a).seidel_r().coeffs)
        .collect();
    LaurentMatrix::from_columns(ring.rank(), &cols)
}

/// Kernel data for the iterates of `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelChain {
    /// `x^{m-k+1} + T`, generating `ker r^stable_exponent` as an ideal.
    pub generator: QHElement,
    /// Least `j` with `ker r^j = ker r^{j+1}`.
    pub stable_exponent: u32,
    /// `dim ker r^j` for `j = 0, ..., stable_exponent + 1`.
    pub dims: Vec<usize>,
}

pub fn ker_r_power(ring: RingDescriptor) -> KernelChain {
    let r = seidel_matrix(ring);
    let n = ring.rank();
    let mut dims = vec![0usize];
    let mut power = LaurentMatrix::identity(n);
    loop {
        power = power.mul(&r);
        dims.push(n - power.rank());
        let j = dims.len() - 1;
        if dims[j] == dims[j - 1] {
            break;
        }
    }
    let stable_exponent = dims.len() as u32 - 2;
    let generator = &QHElement::x_power(ring, ring.m - ring.k + 1)
        + &QHElement::scalar(ring, NovikovScalar::monomial(1));
    KernelChain {
        generator,
        stable_exponent,
        dims,
    }
}

/// `QH / ker r^stable`, presented by the monomial basis `1, ..., x^{m-k}`.
///
/// For `k >= 1` the kernel is the ideal generated by `x^{m-k+1} + T`, and the
/// quotient is `Λ[x]/(x^{m-k+1} + T)`. For closed `CP^m` the kernel is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShQuotient {
    ring: RingDescriptor,
    stable_exponent: u32,
    basis_len: u32,
}

impl ShQuotient {
    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn stable_exponent(&self) -> u32 {
        self.stable_exponent
    }

    /// `x`-exponents of the basis monomials.
    pub fn basis(&self) -> Vec<u32> {
        (0..self.basis_len).collect()
    }

    /// Canonical representative: rewrites `x^{m-k+1} -> T` from the top down.
    pub fn project(&self, a: &QHElement) -> Result<QHElement> {
        self.ring.check_same(&a.ring)?;
        let mut coeffs = a.coeffs.clone();
        let n = self.basis_len as usize;
        for e in (n..coeffs.len()).rev() {
            let c = std::mem::take(&mut coeffs[e]);
            if !c.is_zero() {
                coeffs[e - n] += &c.shift(1);
            }
        }
        Ok(QHElement {
            ring: self.ring,
            coeffs,
        })
    }
}

pub fn sh_quotient(ring: RingDescriptor) -> ShQuotient {
    let chain = ker_r_power(ring);
    ShQuotient {
        ring,
        stable_exponent: chain.stable_exponent,
        basis_len: ring.m - ring.k + 1,
    }
}
