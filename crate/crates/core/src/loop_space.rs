//! `SH*(T*S^n) = Z/2[x]/(x^2) ⊗ Z/2[y]` with `|x| = n`, `|y| = 1 - n`, and
//! the chain-level prefixes of the symplectic square that the symplectic
//! Cartan relation determines.
//!
//! Only finitely many leading `h`-components are known. A [`KnownPrefix`]
//! records them together with the level at which knowledge stops.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Degree;

fn check_dimension(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidRing(format!(
            "sphere dimension n = {n}; the loop-space presentation needs n >= 2"
        )));
    }
    Ok(())
}

/// A GF(2) combination of `x^e y^j` with `e <= 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LoopRepr", into = "LoopRepr")]
pub struct LoopRingElement {
    n: u32,
    terms: BTreeSet<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct LoopTerm {
    x: u32,
    y: u32,
}

#[derive(Serialize, Deserialize)]
struct LoopRepr {
    n: u32,
    #[serde(default)]
    terms: Vec<LoopTerm>,
}

impl TryFrom<LoopRepr> for LoopRingElement {
    type Error = Error;
    fn try_from(r: LoopRepr) -> Result<Self> {
        LoopRingElement::from_terms(r.n, r.terms.into_iter().map(|t| (t.x, t.y)))
    }
}

impl From<LoopRingElement> for LoopRepr {
    fn from(e: LoopRingElement) -> Self {
        LoopRepr {
            n: e.n,
            terms: e.terms.into_iter().map(|(x, y)| LoopTerm { x, y }).collect(),
        }
    }
}

impl LoopRingElement {
    pub fn zero(n: u32) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            n,
            terms: BTreeSet::new(),
        })
    }

    /// Sum of `x^e y^j` over `(e, j)` pairs; terms with `e >= 2` vanish.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32)>>(n: u32, terms: I) -> Result<Self> {
        let mut out = Self::zero(n)?;
        for t in terms {
            out.toggle(t);
        }
        Ok(out)
    }

    pub fn monomial(n: u32, x: u32, y: u32) -> Result<Self> {
        Self::from_terms(n, [(x, y)])
    }

    fn toggle(&mut self, t: (u32, u32)) {
        if t.0 > 1 {
            return;
        }
        if !self.terms.remove(&t) {
            self.terms.insert(t);
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.terms.iter().copied()
    }

    pub fn loop_mul(&self, other: &LoopRingElement) -> Result<LoopRingElement> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let mut out = LoopRingElement {
            n: self.n,
            terms: BTreeSet::new(),
        };
        for &(x1, y1) in &self.terms {
            for &(x2, y2) in &other.terms {
                out.toggle((x1 + x2, y1 + y2));
            }
        }
        Ok(out)
    }

    pub fn loop_degree(&self) -> Degree {
        let n = self.n as i64;
        Degree::of_terms(self.terms.iter().map(|&(x, y)| n * x as i64 + (1 - n) * y as i64))
    }
}

impl fmt::Display for LoopRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(x, y)| match (x, y) {
                (0, 0) => "1".to_string(),
                (1, 0) => "x".to_string(),
                (0, 1) => "y".to_string(),
                (0, _) => format!("y^{y}"),
                (_, 1) => "x y".to_string(),
                _ => format!("x y^{y}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LoopRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (n={})", self.n)
    }
}

/// The generator classes whose symplectic square the Cartan relation reaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", content = "i", rename_all = "snake_case")]
pub enum GeneratorClass {
    Zero,
    /// `y^i`
    Y(u32),
    X,
    /// `x y^i`
    XY(u32),
}

impl GeneratorClass {
    pub fn element(&self, n: u32) -> Result<LoopRingElement> {
        match *self {
            GeneratorClass::Zero => LoopRingElement::zero(n),
            GeneratorClass::Y(i) => LoopRingElement::monomial(n, 0, i),
            GeneratorClass::X => LoopRingElement::monomial(n, 1, 0),
            GeneratorClass::XY(i) => LoopRingElement::monomial(n, 1, i),
        }
    }
}

impl fmt::Display for GeneratorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // n only affects grading, not the printed form.
        write!(f, "{}", self.element(2).map_err(|_| fmt::Error)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Nothing is claimed at or above the bound.
    Unknown,
    /// Every component at or above the bound vanishes.
    Zero,
}

/// Components `h^r`, `r < bound`, of a chain-level `h`-series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownPrefix {
    pub n: u32,
    pub known: BTreeMap<u32, LoopRingElement>,
    pub bound: u32,
    pub tail: Tail,
}

impl KnownPrefix {
    fn level(&self, r: u32) -> Option<LoopRingElement> {
        if r < self.bound {
            Some(self.known[&r].clone())
        } else if self.tail == Tail::Zero {
            Some(LoopRingElement::zero(self.n).expect("validated n"))
        } else {
            None
        }
    }

    pub fn entry(&self, r: u32) -> Option<&LoopRingElement> {
        self.known.get(&r)
    }
}

impl fmt::Display for KnownPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self
            .known
            .iter()
            .map(|(r, v)| {
                if v.is_zero() {
                    "0".to_string()
                } else {
                    format!("{v}@h^{r}")
                }
            })
            .collect();
        write!(f, "{}", cells.join(", "))?;
        match self.tail {
            Tail::Unknown if self.known.is_empty() => write!(f, "h^{}(...)", self.bound),
            Tail::Unknown => write!(f, " + h^{}(...)", self.bound),
            Tail::Zero if self.known.is_empty() => write!(f, "0"),
            Tail::Zero => Ok(()),
        }
    }
}

/// `PS'_j(a; b)` where it is determined: zero when `b = 0`, and
/// `a^2 b` when `j = 0`. Anything else is unknown.
fn module_action(a: &LoopRingElement, j: u32, b: &LoopRingElement) -> Result<Option<LoopRingElement>> {
    if b.is_zero() {
        return Ok(Some(b.clone()));
    }
    if j == 0 {
        return Ok(Some(a.loop_mul(a)?.loop_mul(b)?));
    }
    Ok(None)
}

/// `PS_r(a b) = sum_{k<=r} PS'_{r-k}(a; PS_k(b))`, evaluated level by level
/// until a term is not determined.
pub fn cartan_combine(a: &LoopRingElement, ps_b: &KnownPrefix) -> Result<KnownPrefix> {
    if a.n() != ps_b.n {
        return Err(Error::DimensionMismatch(a.n(), ps_b.n));
    }
    let n = ps_b.n;
    let mut known = BTreeMap::new();
    'levels: for r in 0..=ps_b.bound {
        let mut acc = LoopRingElement::zero(n)?;
        for k in 0..=r {
            let Some(b_k) = ps_b.level(k) else {
                return Ok(KnownPrefix { n, known, bound: r, tail: Tail::Unknown });
            };
            match module_action(a, r - k, &b_k)? {
                Some(v) => {
                    for t in v.terms() {
                        acc.toggle(t);
                    }
                }
                None => break 'levels,
            }
        }
        known.insert(r, acc);
    }
    let bound = known.len() as u32;
    if bound == ps_b.bound + 1 {
        // Everything below ps_b.bound was zero and its tail vanishes.
        return Ok(KnownPrefix {
            n,
            known: BTreeMap::new(),
            bound: 0,
            tail: Tail::Zero,
        });
    }
    Ok(KnownPrefix { n, known, bound, tail: Tail::Unknown })
}

pub fn ps_prefix(class: GeneratorClass, n: u32) -> Result<KnownPrefix> {
    check_dimension(n)?;
    match class {
        GeneratorClass::Zero => Ok(KnownPrefix {
            n,
            known: BTreeMap::new(),
            bound: 0,
            tail: Tail::Zero,
        }),
        GeneratorClass::Y(i) => {
            let y = LoopRingElement::monomial(n, 0, i)?;
            Ok(KnownPrefix {
                n,
                known: BTreeMap::from([(0, y.loop_mul(&y)?)]),
                bound: 1,
                tail: Tail::Unknown,
            })
        }
        GeneratorClass::X => {
            let mut known: BTreeMap<u32, LoopRingElement> =
                (0..n).map(|r| Ok((r, LoopRingElement::zero(n)?))).collect::<Result<_>>()?;
            known.insert(n, LoopRingElement::monomial(n, 1, 0)?);
            Ok(KnownPrefix {
                n,
                known,
                bound: n + 1,
                tail: Tail::Unknown,
            })
        }
        GeneratorClass::XY(i) => {
            let y = LoopRingElement::monomial(n, 0, i)?;
            cartan_combine(&y, &ps_prefix(GeneratorClass::X, n)?)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonvanishing {
    /// The `h^0` component is a nonzero class, which no equivariant boundary can produce.
    NonzeroCertified,
    /// The known components could all be killed at chain level.
    Unknown,
    Zero,
}

pub fn nonvanishing(class: GeneratorClass, n: u32) -> Result<Nonvanishing> {
    if class == GeneratorClass::Zero {
        check_dimension(n)?;
        return Ok(Nonvanishing::Zero);
    }
    let prefix = ps_prefix(class, n)?;
    Ok(match prefix.entry(0) {
        Some(v) if !v.is_zero() => Nonvanishing::NonzeroCertified,
        _ => Nonvanishing::Unknown,
    })
}
