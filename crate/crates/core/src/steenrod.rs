//! Classical Steenrod squares over Z/2, packaged as `h`-series.
//!
//! The coefficient of `h^r` in `Sq(a)` is `Sq^{|a|-r}(a)`. Only truncated
//! polynomial cohomology rings `Z/2[x]/(x^{top+1})` are needed: `CP^m`
//! (`|x| = 2`, `top = m`) and spheres (`|x| = n`, `top = 1`).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::quantum_ring::RingDescriptor;

/// `C(n, j) mod 2` by Lucas: odd iff the bits of `j` are a subset of those of `n`.
pub fn binom_mod2(n: u64, j: u64) -> bool {
    j & n == j
}

/// `Z/2[x]/(x^{top+1})` with `|x| = gen_degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedPolyRing {
    pub top: u32,
    pub gen_degree: u32,
}

impl TruncatedPolyRing {
    pub fn projective(m: u32) -> Self {
        Self {
            top: m,
            gen_degree: 2,
        }
    }

    pub fn sphere(n: u32) -> Self {
        Self {
            top: 1,
            gen_degree: n,
        }
    }
}

/// A finite sum of `x^a h^r` in `H*(X)[h]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HSeriesClassical {
    ring: TruncatedPolyRing,
    // (h-exponent, x-exponent)
    terms: BTreeSet<(u32, u32)>,
}

impl HSeriesClassical {
    pub fn zero(ring: TruncatedPolyRing) -> Self {
        Self {
            ring,
            terms: BTreeSet::new(),
        }
    }

    /// Sums `x^a h^r` over `(r, a)` pairs, discarding `a > top`.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32)>>(ring: TruncatedPolyRing, terms: I) -> Self {
        let mut s = Self::zero(ring);
        for t in terms {
            s.toggle(t);
        }
        s
    }

    fn toggle(&mut self, (h, x): (u32, u32)) {
        if x > self.ring.top {
            return;
        }
        if !self.terms.remove(&(h, x)) {
            self.terms.insert((h, x));
        }
    }

    pub fn ring(&self) -> TruncatedPolyRing {
        self.ring
    }

    /// `(h-exponent, x-exponent)` pairs, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.terms.iter().copied()
    }

    pub fn coefficient(&self, h: u32, x: u32) -> bool {
        self.terms.contains(&(h, x))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Cup product extended `h`-linearly.
    pub fn mul(&self, other: &HSeriesClassical) -> HSeriesClassical {
        assert_eq!(self.ring, other.ring, "series over different rings");
        let mut out = Self::zero(self.ring);
        for &(h1, x1) in &self.terms {
            for &(h2, x2) in &other.terms {
                out.toggle((h1 + h2, x1 + x2));
            }
        }
        out
    }
}

impl fmt::Display for HSeriesClassical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(h, x)| {
                let xs = match x {
                    0 => String::new(),
                    1 => "x".to_string(),
                    _ => format!("x^{x}"),
                };
                let hs = match h {
                    0 => String::new(),
                    1 => "h".to_string(),
                    _ => format!("h^{h}"),
                };
                match (xs.is_empty(), hs.is_empty()) {
                    (true, true) => "1".to_string(),
                    (false, true) => xs,
                    (true, false) => hs,
                    (false, false) => format!("{xs} {hs}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for HSeriesClassical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `Sq(x^i) = (x^2 + x h^d)^i = sum_j C(i,j) x^{i+j} h^{d(i-j)}`, truncated.
pub fn total_sq(ring: TruncatedPolyRing, i: u32) -> Result<HSeriesClassical> {
    if i > ring.top {
        return Err(Error::ExponentRange {
            exponent: i,
            max: ring.top,
        });
    }
    let d = ring.gen_degree;
    Ok(HSeriesClassical::from_terms(
        ring,
        (0..=i)
            .filter(|&j| binom_mod2(i as u64, j as u64))
            .map(|j| (d * (i - j), i + j)),
    ))
}

/// Total square of `x^i` in `H*(CP^m)`, with `m` taken from the descriptor.
pub fn total_sq_projective(i: u32, ring: &RingDescriptor) -> Result<HSeriesClassical> {
    total_sq(TruncatedPolyRing::projective(ring.m()), i)
}

/// `Sq(x_n) = x_n h^n`; the cup square vanishes in `H*(S^n)`.
pub fn sphere_sq(n: u32) -> Result<HSeriesClassical> {
    if n == 0 {
        return Err(Error::InvalidRing("sphere dimension must be positive".into()));
    }
    total_sq(TruncatedPolyRing::sphere(n), 1)
}
