//! The invariant suite run by `qsteen check`. Each check is a self-contained
//! algebraic identity evaluated over a finite range; random inputs come from
//! a fixed seed so runs are reproducible.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::equivariant_quotient::{in_normal_basis, req_constraint_solver, Membership, QuotientDescriptor};
use crate::error::Result;
use crate::loop_space::{nonvanishing, ps_prefix, GeneratorClass, LoopRingElement, Nonvanishing};
use crate::novikov::NovikovScalar;
use crate::parallel;
use crate::quantum_ring::{ker_r_power, QHElement, RingDescriptor};
use crate::quantum_steenrod::{closed_form_qsxm, EqElement, QsTable};
use crate::steenrod::{binom_mod2, total_sq_projective};
use crate::Degree;

const SEED: u64 = 0x5eed_2026;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<Option<String>>;

fn fail(msg: String) -> Result<Option<String>> {
    Ok(Some(msg))
}

fn line(m: u32) -> RingDescriptor {
    RingDescriptor::line_bundle(m, 1).expect("m >= 1")
}

fn lucas_vs_pascal() -> Result<Option<String>> {
    let mut row = vec![true];
    for n in 0..=64u64 {
        for j in 0..=64u64 {
            let pascal = (j as usize) < row.len() && row[j as usize];
            if binom_mod2(n, j) != pascal {
                return fail(format!("C({n},{j})"));
            }
        }
        let mut next = vec![true; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] ^ row[j];
        }
        row = next;
    }
    Ok(None)
}

fn classical_cartan() -> Result<Option<String>> {
    for m in 1..=10 {
        let r = line(m);
        for i in 0..=m {
            for j in 0..=m - i {
                let lhs = total_sq_projective(i + j, &r)?;
                let rhs = total_sq_projective(i, &r)?.mul(&total_sq_projective(j, &r)?);
                if lhs != rhs {
                    return fail(format!("m={m} i={i} j={j}"));
                }
            }
        }
    }
    Ok(None)
}

fn kernel_chain() -> Result<Option<String>> {
    for m in 1..=7 {
        for k in 1..=m {
            let chain = ker_r_power(RingDescriptor::line_bundle(m, k)?);
            if chain.stable_exponent != k {
                return fail(format!("m={m} k={k}: stabilizes at {}", chain.stable_exponent));
            }
        }
    }
    Ok(None)
}

fn closing_identity() -> Result<Option<String>> {
    for m in 1..=9u32 {
        for k in (1..=m.div_ceil(2)).filter(|k| k % 2 == 1) {
            let r = RingDescriptor::line_bundle(m, k)?;
            let g = QHElement::from_terms(r, [(m - k + 1, 0), (0, 1)]);
            if g.qmul(&g)? != g.shift_t(1) {
                return fail(format!("m={m} k={k}"));
            }
        }
    }
    Ok(None)
}

fn qs_closed_form() -> Result<Option<String>> {
    for m in 1..=10 {
        let r = line(m);
        if QsTable::new(r)?.power(m)? != &closed_form_qsxm(r)? {
            return fail(format!("m={m}"));
        }
    }
    Ok(None)
}

fn qs_semilinear() -> Result<Option<String>> {
    for m in 1..=10 {
        let r = line(m);
        let table = QsTable::new(r)?;
        if table.power(m + 1)? != &table.apply(&QHElement::monomial(r, 1, 1))? {
            return fail(format!("m={m}"));
        }
    }
    Ok(None)
}

fn qs_classical_limit() -> Result<Option<String>> {
    for m in 1..=10 {
        let r = line(m);
        let table = QsTable::new(r)?;
        for i in (0..=m).filter(|i| 2 * i <= m) {
            let lhs: Vec<(u32, u32)> = table.power(i)?.t_free_part().terms().map(|(x, _, h)| (h, x)).collect();
            let rhs: Vec<(u32, u32)> = total_sq_projective(i, &r)?.terms().collect();
            if lhs != rhs {
                return fail(format!("m={m} i={i}"));
            }
        }
    }
    Ok(None)
}

fn qs_degree_doubling() -> Result<Option<String>> {
    for m in 1..=10 {
        let table = QsTable::new(line(m))?;
        for i in 0..=m + 1 {
            if table.power(i)?.degree() != Degree::Homogeneous(4 * i as i64) {
                return fail(format!("m={m} i={i}"));
            }
        }
    }
    Ok(None)
}

fn random_scalar(rng: &mut StdRng) -> NovikovScalar {
    loop {
        let s = NovikovScalar::from_exponents((-4..=4).filter(|_| rng.gen_bool(0.5)));
        if !s.is_zero() {
            return s;
        }
    }
}

fn kernel_law() -> Result<Option<String>> {
    let ms: Vec<u32> = (1..=6).collect();
    let failures = parallel::try_map(&ms, |&m| -> Result<Option<String>> {
        let r = line(m);
        let q = QuotientDescriptor::new(r, 32)?;
        let gen = QHElement::from_terms(r, [(m, 0), (0, 1)]);
        let mut rng = StdRng::seed_from_u64(SEED + m as u64);
        for _ in 0..25 {
            let lambda = random_scalar(&mut rng);
            let f = q.qs_table().apply(&gen.scale(&lambda))?;
            if q.member(&f)? != (Membership::ZeroThroughOrder { order: 32 }) {
                return Ok(Some(format!("m={m} λ={lambda}")));
            }
        }
        Ok(None)
    })?;
    Ok(failures.into_iter().flatten().next())
}

fn reduction_laws() -> Result<Option<String>> {
    let r = line(4);
    let q = QuotientDescriptor::new(r, 32)?;
    let mut rng = StdRng::seed_from_u64(SEED);
    for trial in 0..100 {
        let count = rng.gen_range(0..12);
        let f = EqElement::from_terms(
            r,
            (0..count).map(|_| (rng.gen_range(0..=4), rng.gen_range(-3..=3), rng.gen_range(0..=32))),
        );
        let red = q.reduce(&f)?;
        let nf = &red.normal_form;
        if !in_normal_basis(nf) {
            return fail(format!("trial {trial}: normal form leaves the basis"));
        }
        if &q.normal_form(nf)? != nf {
            return fail(format!("trial {trial}: not idempotent"));
        }
        if nf.checked_add(&red.witness(&q))? != f.truncate(32) {
            return fail(format!("trial {trial}: witness does not reconstruct"));
        }
    }
    Ok(None)
}

fn solver_conclusions() -> Result<Option<String>> {
    for m in 2..=6 {
        let r = line(m);
        let rep = req_constraint_solver(r)?;
        let zero = QHElement::zero(r);
        let mut expected = vec![(2, 0, zero.clone()), (2, m, zero.clone()), (1, m - 1, QHElement::x_power(r, m))];
        expected.extend((1..=m).map(|i| (i + 2, i, zero.clone())));
        for (i, a, v) in expected {
            if rep.value(i, a) != Some(&v) {
                return fail(format!("m={m}: r_{i}(x^{a})"));
            }
        }
    }
    Ok(None)
}

fn loop_prefixes() -> Result<Option<String>> {
    for n in 2..=6 {
        let x = LoopRingElement::monomial(n, 1, 0)?;
        for i in 0..=5 {
            let y = LoopRingElement::monomial(n, 0, i)?;
            let py = ps_prefix(GeneratorClass::Y(i), n)?;
            if py.entry(0) != Some(&y.loop_mul(&y)?) {
                return fail(format!("n={n} y^{i}"));
            }
            let pxy = ps_prefix(GeneratorClass::XY(i), n)?;
            let top = x.loop_mul(&y.loop_mul(&y)?)?;
            if (0..n).any(|r| !pxy.entry(r).is_some_and(LoopRingElement::is_zero)) || pxy.entry(n) != Some(&top) {
                return fail(format!("n={n} x y^{i}"));
            }
            if nonvanishing(GeneratorClass::Y(i), n)? != Nonvanishing::NonzeroCertified
                || nonvanishing(GeneratorClass::XY(i), n)? != Nonvanishing::Unknown
            {
                return fail(format!("n={n} i={i}: verdict"));
            }
        }
    }
    Ok(None)
}

const CHECKS: &[(&str, Check)] = &[
    ("binomial parity matches Pascal's triangle", lucas_vs_pascal),
    ("classical Cartan formula on CP^m", classical_cartan),
    ("ker r^j stabilizes at j = k", kernel_chain),
    ("(x^(m-k+1) + T)^2 = T (x^(m-k+1) + T)", closing_identity),
    ("QS(x^m) recursion matches closed form", qs_closed_form),
    ("QS(x^(m+1)) = QS(x T)", qs_semilinear),
    ("T-free part of QS is classical Sq", qs_classical_limit),
    ("QS doubles degree", qs_degree_doubling),
    ("QS(λ(x^m + T)) lies in the kernel", kernel_law),
    ("reduction: basis, idempotence, witness", reduction_laws),
    ("r_eq solver conclusions", solver_conclusions),
    ("loop-space prefixes and verdicts", loop_prefixes),
];

/// Runs every check; the order of outcomes is fixed.
pub fn run_all() -> Vec<CheckOutcome> {
    parallel::map(CHECKS, |&(name, check)| {
        let (passed, detail) = match check() {
            Ok(None) => (true, String::new()),
            Ok(Some(msg)) => (false, format!("counterexample: {msg}")),
            Err(e) => (false, format!("error: {e}")),
        };
        CheckOutcome { name, passed, detail }
    })
}
