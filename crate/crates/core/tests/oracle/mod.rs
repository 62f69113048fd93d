//! Reference computations written without the library's algebra: Laurent
//! polynomials as exponent sets, truncated-ring products by direct
//! rewriting, and quotient normal forms by dense Gauss-Jordan elimination.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use qsteen::EqElement;

pub type Laurent = BTreeSet<i64>;

pub fn laurent_add(a: &Laurent, b: &Laurent) -> Laurent {
    a.symmetric_difference(b).copied().collect()
}

pub fn laurent_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for &p in a {
        for &q in b {
            if !out.remove(&(p + q)) {
                out.insert(p + q);
            }
        }
    }
    out
}

/// `C(n, j) mod 2` from Pascal's rule.
pub fn pascal_mod2(size: usize) -> Vec<Vec<bool>> {
    let mut rows: Vec<Vec<bool>> = vec![vec![true]];
    for n in 1..size {
        let prev = &rows[n - 1];
        let mut row = vec![true; n + 1];
        for j in 1..n {
            row[j] = prev[j - 1] ^ prev[j];
        }
        rows.push(row);
    }
    rows
}

/// Product in `Λ[x]/(x^{m+1} + T x^k)`; operands are dense coefficient lists.
pub fn ring_mul(m: usize, k: usize, a: &[Laurent], b: &[Laurent]) -> Vec<Laurent> {
    let mut raw = vec![Laurent::new(); 2 * m + 1];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            raw[i + j] = laurent_add(&raw[i + j], &laurent_mul(p, q));
        }
    }
    // x^d = T x^{d-(m+1-k)} for d > m, applied from the top.
    let shift = m + 1 - k;
    for d in (m + 1..raw.len()).rev() {
        let c = std::mem::take(&mut raw[d]);
        let moved: Laurent = c.iter().map(|e| e + 1).collect();
        raw[d - shift] = laurent_add(&raw[d - shift], &moved);
    }
    raw.truncate(m + 1);
    raw
}

/// `(h, x) -> coefficient`.
pub type Series = BTreeMap<(u32, u32), Laurent>;

pub fn series(e: &EqElement) -> Series {
    let mut out = Series::new();
    for (x, t, h) in e.terms() {
        out.entry((h, x)).or_default().insert(t);
    }
    out
}

pub fn series_add(a: &Series, b: &Series) -> Series {
    let mut out = a.clone();
    for (k, v) in b {
        let s = laurent_add(out.get(k).unwrap_or(&Laurent::new()), v);
        if s.is_empty() {
            out.remove(k);
        } else {
            out.insert(*k, s);
        }
    }
    out
}

fn coeff_m(s: &Series, h: u32, m: u32) -> Laurent {
    s.get(&(h, m)).cloned().unwrap_or_default()
}

/// Solves `[f_d]_m = sum_{j<=d} μ_j [g_{d-j}]_m` for `d = 0..=order` by
/// Gauss-Jordan over Λ with unit pivots, then returns `f + sum μ_j h^j g`
/// truncated at `order`, and the nonzero `μ_j`.
pub fn gauss_normal_form(f: &Series, g: &Series, m: u32, order: u32) -> (Series, BTreeMap<u32, Laurent>) {
    let n = order as usize + 1;
    let mut a: Vec<Vec<Laurent>> = (0..n)
        .map(|d| (0..n).map(|j| if j <= d { coeff_m(g, (d - j) as u32, m) } else { Laurent::new() }).collect())
        .collect();
    let mut b: Vec<Laurent> = (0..n).map(|d| coeff_m(f, d as u32, m)).collect();

    for c in 0..n {
        let p = (c..n)
            .find(|&r| a[r][c].len() == 1)
            .expect("a unit pivot exists in every column");
        a.swap(c, p);
        b.swap(c, p);
        let e = *a[c][c].iter().next().unwrap();
        let inv: Laurent = [-e].into();
        a[c] = a[c].iter().map(|v| laurent_mul(v, &inv)).collect();
        b[c] = laurent_mul(&b[c], &inv);
        for r in 0..n {
            if r == c || a[r][c].is_empty() {
                continue;
            }
            let factor = a[r][c].clone();
            let pivot_row = a[c].clone();
            for (dst, src) in a[r].iter_mut().zip(&pivot_row) {
                *dst = laurent_add(dst, &laurent_mul(&factor, src));
            }
            let t = laurent_mul(&factor, &b[c]);
            b[r] = laurent_add(&b[r], &t);
        }
    }

    let mut out: Series = f.iter().filter(|((h, _), _)| *h <= order).map(|(k, v)| (*k, v.clone())).collect();
    let mut mus = BTreeMap::new();
    for (j, mu) in b.into_iter().enumerate() {
        if mu.is_empty() {
            continue;
        }
        let shifted: Series = g
            .iter()
            .filter(|((h, _), _)| j as u32 + h <= order)
            .map(|((h, x), v)| ((j as u32 + h, *x), laurent_mul(&mu, v)))
            .collect();
        out = series_add(&out, &shifted);
        mus.insert(j as u32, mu);
    }
    (out, mus)
}

/// Degree of `x^a T^t h^c` when `|x| = 2`, `|T| = 2m`, `|h| = 1`.
pub fn term_degree(m: u32, x: u32, t: i64, h: u32) -> i64 {
    2 * x as i64 + 2 * m as i64 * t + h as i64
}
