//! Linear constraints on the components `r_i` of `r_eq = sum_i h^{2i} r_i`.
//!
//! Each `r_i : QH* -> QH^{*+4-2i}` is Λ-linear and graded, so an entry
//! `r_i(x^a)` can only have components `x^b T^e` with `b + m e = a + 2 - i`
//! and `e >= 0`. Each allowed component carries one GF(2) unknown. `r_0 = r^2`
//! is fixed. Imposing `r_eq(QS(x^i)) = QS(x^{i+1})` for `0 <= i <= m` and
//! `r_eq(QS(x^m + T)) = 0` coefficient by coefficient gives a GF(2) system.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_ring::{QHElement, RingDescriptor};
use crate::quantum_steenrod::{EqElement, QsTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Unknown {
    i: u32,
    a: u32,
    b: u32,
    e: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EntryStatus {
    /// Given in advance (`r_0 = r^2`).
    Fixed { value: QHElement },
    /// Forced by the constraints.
    Determined { value: QHElement },
    /// Some components remain free; `known` collects the forced ones.
    Undetermined {
        known: QHElement,
        free: Vec<FreeComponent>,
    },
}

/// A free `x^b T^e` component of an undetermined entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeComponent {
    pub x: u32,
    #[serde(rename = "T")]
    pub t: i64,
}

/// The entry `r_i(x^a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverEntry {
    pub i: u32,
    pub a: u32,
    #[serde(flatten)]
    pub status: EntryStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverReport {
    pub ring: RingDescriptor,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub entries: Vec<SolverEntry>,
}

impl SolverReport {
    pub fn entry(&self, i: u32, a: u32) -> Option<&SolverEntry> {
        self.entries.iter().find(|e| e.i == i && e.a == a)
    }

    /// The value of `r_i(x^a)` if it is fixed or determined.
    pub fn value(&self, i: u32, a: u32) -> Option<&QHElement> {
        match &self.entry(i, a)?.status {
            EntryStatus::Fixed { value } | EntryStatus::Determined { value } => Some(value),
            EntryStatus::Undetermined { .. } => None,
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "r_eq constraints for {}: {} unknowns, {} equations, rank {}\n",
            self.ring, self.unknowns, self.equations, self.rank
        );
        out.push_str("| entry | status | value |\n|---|---|---|\n");
        for e in &self.entries {
            let (status, value) = match &e.status {
                EntryStatus::Fixed { value } => ("fixed", value.to_string()),
                EntryStatus::Determined { value } => ("determined", value.to_string()),
                EntryStatus::Undetermined { known, free } => {
                    let free: Vec<String> = free
                        .iter()
                        .map(|c| {
                            QHElement::monomial(self.ring, c.x, c.t).to_string()
                        })
                        .collect();
                    let known = if known.is_zero() {
                        String::new()
                    } else {
                        format!("{known} + ")
                    };
                    ("undetermined", format!("{known}free: {}", free.join(", ")))
                }
            };
            let _ = writeln!(out, "| r_{}(x^{}) | {} | {} |", e.i, e.a, status, value);
        }
        out
    }
}

/// Rows of a GF(2) system, each a bitset of unknowns plus a right-hand side.
struct Gf2System {
    width: usize,
    rows: Vec<(Vec<u64>, bool)>,
}

impl Gf2System {
    fn words(width: usize) -> usize {
        width.div_ceil(64)
    }

    fn get(row: &[u64], v: usize) -> bool {
        row[v / 64] >> (v % 64) & 1 == 1
    }

    /// Reduced row echelon form. Returns `pivot column -> row` or the index of
    /// an inconsistent row.
    fn solve(&mut self) -> std::result::Result<BTreeMap<usize, usize>, usize> {
        let mut pivots = BTreeMap::new();
        let mut r = 0;
        for c in 0..self.width {
            let Some(p) = (r..self.rows.len()).find(|&i| Self::get(&self.rows[i].0, c)) else {
                continue;
            };
            self.rows.swap(r, p);
            let (prow, prhs) = self.rows[r].clone();
            for (i, (row, rhs)) in self.rows.iter_mut().enumerate() {
                if i != r && Self::get(row, c) {
                    for (w, pw) in row.iter_mut().zip(&prow) {
                        *w ^= pw;
                    }
                    *rhs ^= prhs;
                }
            }
            pivots.insert(c, r);
            r += 1;
        }
        match self.rows[r..].iter().position(|(_, rhs)| *rhs) {
            Some(bad) => Err(r + bad),
            None => Ok(pivots),
        }
    }
}

fn unknowns(ring: RingDescriptor) -> Vec<Unknown> {
    let m = ring.m() as i64;
    let mut out = Vec::new();
    for i in 1..=ring.m() + 3 {
        for a in 0..=ring.m() {
            for b in 0..=ring.m() {
                let rest = a as i64 + 2 - i as i64 - b as i64;
                if rest >= 0 && rest % m == 0 {
                    out.push(Unknown { i, a, b, e: rest / m });
                }
            }
        }
    }
    out
}

/// Solves for the `r_i` from the intertwining relation `r_eq QS = QS r`.
pub fn req_constraint_solver(ring: RingDescriptor) -> Result<SolverReport> {
    let table = QsTable::new(ring)?;
    let m = ring.m();
    let vars = unknowns(ring);
    let x2 = QHElement::x_power(ring, 2);

    let mut pairs: Vec<(EqElement, EqElement)> = (0..=m)
        .map(|i| Ok((table.power(i)?.clone(), table.power(i + 1)?.clone())))
        .collect::<Result<_>>()?;
    let kernel_gen = QHElement::from_terms(ring, [(m, 0), (0, 1)]);
    pairs.push((table.apply(&kernel_gen)?, EqElement::zero(ring)));

    // (pair, h-degree, x-exponent, T-exponent) -> (unknown set, rhs)
    type Key = (usize, u32, u32, i64);
    let mut eqs: BTreeMap<Key, (Vec<u64>, bool)> = BTreeMap::new();
    let words = Gf2System::words(vars.len());
    fn slot(eqs: &mut BTreeMap<Key, (Vec<u64>, bool)>, key: Key, words: usize) -> &mut (Vec<u64>, bool) {
        eqs.entry(key).or_insert_with(|| (vec![0; words], false))
    }

    for (p, (source, target)) in pairs.iter().enumerate() {
        for (x, t, h) in target.terms() {
            slot(&mut eqs, (p, h, x, t), words).1 ^= true;
        }
        for (c, fc) in source.coeffs() {
            // r_0 = r^2 is known; move it to the right-hand side.
            for (x, t) in fc.qmul(&x2)?.terms() {
                slot(&mut eqs, (p, c, x, t), words).1 ^= true;
            }
            for (v, u) in vars.iter().enumerate() {
                let phi = fc.coeff(u.a);
                for s in phi.exponents() {
                    let row = slot(&mut eqs, (p, c + 2 * u.i, u.b, s + u.e), words);
                    row.0[v / 64] ^= 1 << (v % 64);
                }
            }
        }
    }

    let mut system = Gf2System {
        width: vars.len(),
        rows: eqs.into_values().collect(),
    };
    let equations = system.rows.len();
    let pivots = system
        .solve()
        .map_err(|bad| Error::InconsistentSystem(format!("reduced row {bad} reads 0 = 1")))?;

    // A pivot whose row has no other unknowns is determined.
    let mut value_of: Vec<Option<bool>> = vec![None; vars.len()];
    for (&c, &r) in &pivots {
        let (row, rhs) = &system.rows[r];
        let others = (0..vars.len()).any(|v| v != c && Gf2System::get(row, v));
        if !others {
            value_of[c] = Some(*rhs);
        }
    }

    let mut entries = Vec::new();
    for a in 0..=m {
        entries.push(SolverEntry {
            i: 0,
            a,
            status: EntryStatus::Fixed {
                value: QHElement::x_power(ring, a + 2),
            },
        });
    }
    for i in 1..=m + 3 {
        for a in 0..=m {
            let mut known = QHElement::zero(ring);
            let mut free = Vec::new();
            for (v, u) in vars.iter().enumerate() {
                if u.i != i || u.a != a {
                    continue;
                }
                match value_of[v] {
                    Some(true) => known += &QHElement::monomial(ring, u.b, u.e),
                    Some(false) => {}
                    None => free.push(FreeComponent { x: u.b, t: u.e }),
                }
            }
            let status = if free.is_empty() {
                EntryStatus::Determined { value: known }
            } else {
                EntryStatus::Undetermined { known, free }
            };
            entries.push(SolverEntry { i, a, status });
        }
    }

    Ok(SolverReport {
        ring,
        unknowns: vars.len(),
        equations,
        rank: pivots.len(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(m: u32) -> RingDescriptor {
        RingDescriptor::line_bundle(m, 1).unwrap()
    }

    #[test]
    fn unknowns_respect_grading() {
        let r = ring(4);
        for u in unknowns(r) {
            assert!(u.e >= 0);
            // |x^b T^e| = |x^a| + 4 - 2i
            assert_eq!(2 * u.b as i64 + r.t_degree() * u.e, 2 * u.a as i64 + 4 - 2 * u.i as i64);
        }
        // r_{m+2+j}(x^j) has no room at all.
        assert!(unknowns(r).iter().all(|u| !(u.i == 6 + u.a)));
    }

    #[test]
    fn m4_examples() {
        let r = ring(4);
        let rep = req_constraint_solver(r).unwrap();
        assert_eq!(rep.value(2, 0), Some(&QHElement::zero(r)));
        assert_eq!(rep.value(1, 3), Some(&QHElement::x_power(r, 4)));
        assert_eq!(rep.value(0, 2), Some(&QHElement::x_power(r, 4)));
        assert!(matches!(rep.entry(0, 2).unwrap().status, EntryStatus::Fixed { .. }));
    }

    #[test]
    fn five_cases_for_small_m() {
        for m in 2..=6 {
            let r = ring(m);
            let rep = req_constraint_solver(r).unwrap();
            let zero = QHElement::zero(r);
            assert_eq!(rep.value(2, 0), Some(&zero), "m={m} r_2(1)");
            for i in 1..=m {
                assert_eq!(rep.value(i + 2, i), Some(&zero), "m={m} r_{}(x^{i})", i + 2);
            }
            assert_eq!(rep.value(2, m), Some(&zero), "m={m} r_2(x^m)");
            assert_eq!(rep.value(1, m - 1), Some(&QHElement::x_power(r, m)), "m={m} r_1(x^(m-1))");
        }
    }

    #[test]
    fn markdown_lists_every_entry() {
        let rep = req_constraint_solver(ring(3)).unwrap();
        let md = rep.to_markdown();
        assert_eq!(md.lines().filter(|l| l.starts_with("| r_")).count(), rep.entries.len());
        assert!(md.contains("| r_0(x^1) | fixed | x^3 |"));
    }

    #[test]
    fn gf2_inconsistency_detected() {
        let mut s = Gf2System {
            width: 1,
            rows: vec![(vec![1], true), (vec![1], false)],
        };
        assert!(s.solve().is_err());
    }
}
