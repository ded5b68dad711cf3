//! End-to-end acceptance run for the library.
//!
//! Every check below exercises one public contract end to end and prints
//! a single PASS/FAIL line, so `cargo test --test acceptance -- --nocapture`
//! doubles as a verification report. All comparisons are exact symbolic
//! equalities; no check is allowed to sample floating point. Checks with a
//! stated runtime budget fail when they exceed it.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use qchar::asymstd::{qchar_t, xminus_divergence_witness, TPsi, TState};
use qchar::borelneg::{
    eigenvector_location_check, graded_dimension, linear_oracle_check, pbw_normalize_with,
    Strategy, DEFAULT_STEP_BUDGET,
};
use qchar::closedforms::{
    chi_infinity, order_compatibility_check, prefund_limit_qchar, qchar_multiplicativity_check,
    random_negative_lweight, standard_qchar, verify_decomposition,
};
use qchar::lweight::psi_of;
use qchar::qscalar::{QLaurent, QScalar};
use qchar::qseries::{stabilization_check, AMonomial, QCharSeries, Region};
use qchar::tensorsim::{lweight_decomposition, make_eval_module, tensor_bounded, QMode};
use qchar::ymonomial::SubsetIndex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lift<T>(r: qchar::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn q_minus_q_inv() -> QScalar {
    QScalar::from_laurent(
        QLaurent::monomial(1, BigInt::from(1)).sub(&QLaurent::monomial(-1, BigInt::from(1))),
    )
}

/// Build an l-weight basis, widening the separation order if the first
/// attempt cannot tell two candidate classes apart.
fn basis_with_retry(ctx: &mut TPsi, tries: &[u32]) -> Result<BTreeMap<SubsetIndex, TState>, String> {
    let mut last = String::from("no separation order tried");
    for &r in tries {
        match ctx.lweight_basis(r) {
            Ok(b) => return Ok(b),
            Err(e) => last = e.to_string(),
        }
    }
    Err(last)
}

/// 1. The truncated products prod_{k<N} (1 + A_{-2k}^{-1}) stabilize on the
/// window [-12, 0] with degree cap 6 by N = 7, and the stable series is the
/// closed subset-sum form of the inverse-prefundamental limit character.
fn limit_stabilization() -> Result<(), String> {
    let region = lift(Region::new(-12, 0, 6))?;
    let gen = |n: u32| {
        let mut s = QCharSeries::one(region);
        for k in 0..i64::from(n) {
            let idx = -2 * k;
            if idx < region.rmin {
                continue;
            }
            let mut f = QCharSeries::one(region);
            f.add_term(&AMonomial::single(idx, 1)?, 1)?;
            s = s.truncated_product(&f)?;
        }
        Ok(s)
    };
    let (n0, stable) = lift(stabilization_check(gen, region, 24))?;
    ensure(n0 <= 7, format!("stabilized at N = {n0}, want N <= 7"))?;
    let closed = lift(prefund_limit_qchar(0, region))?;
    ensure(
        stable == closed,
        "stable series differs from the closed subset-sum series",
    )
}

/// 2. The character identity between the limit character and the sum of
/// recentered staircase characters holds exactly on the depth-12 window
/// with degree cap 6, and the right-hand side is multiplicity free.
fn decomposition_window() -> Result<(), String> {
    let region = lift(Region::new(-24, 0, 6))?;
    let report = lift(verify_decomposition(region))?;
    ensure(report.tuples > 1, "expected more than one summand")?;
    ensure(
        report.first_mismatch.is_none() && report.equal,
        format!("sides differ: {:?}", report.first_mismatch),
    )?;
    ensure(
        report.multiplicity_free,
        "a right-hand-side coefficient is outside {0, 1}",
    )
}

/// 3. For chains of N = 1..6 two-dimensional evaluation modules at spectral
/// exponents -1, -3, ..., the generalized l-weight decomposition equals the
/// standard character expansion term for term, in both coefficient modes.
fn standard_chain_decomposition(mode: &QMode) -> Result<(), String> {
    for n in 1..=6usize {
        let ys: Vec<i64> = (0..n).map(|j| -1 - 2 * j as i64).collect();
        let mut factors = Vec::new();
        for &s in &ys {
            factors.push(lift(make_eval_module(1, s))?);
        }
        let mut t = lift(tensor_bounded(&factors, 256))?;
        lift(t.derive_drinfeld(3, 3))?;
        let rows = lift(lweight_decomposition(&t, 3, mode))?;
        let series = lift(standard_qchar(&ys))?;

        let mut got: BTreeMap<AMonomial, i64> = BTreeMap::new();
        for row in &rows {
            *got.entry(row.position.clone()).or_insert(0) += row.multiplicity as i64;
        }
        let want: BTreeMap<AMonomial, i64> =
            series.terms().map(|(m, &c)| (m.clone(), c)).collect();
        ensure(
            got == want,
            format!("chain of length {n}: decomposition multiset differs from the standard character"),
        )?;
        let total: i64 = got.values().sum();
        ensure(
            total == (1i64 << n),
            format!("chain of length {n}: {total} vectors, want {}", 1i64 << n),
        )?;

        let top = lift(t.top_lweight())?;
        for row in &rows {
            let shift = lift(row.position.to_lweight())?;
            let expect = lift(top.product(&shift))?;
            ensure(
                row.lweight.normalize() == expect.normalize(),
                format!("chain of length {n}: a row's l-weight disagrees with its position"),
            )?;
        }
    }
    Ok(())
}

fn standard_chains_both_modes() -> Result<(), String> {
    let start = Instant::now();
    standard_chain_decomposition(&QMode::Exact)?;
    let symbolic = start.elapsed();
    ensure(
        symbolic < Duration::from_secs(120),
        format!("symbolic pass took {:.2}s, budget 120s", symbolic.as_secs_f64()),
    )?;

    let start = Instant::now();
    standard_chain_decomposition(&QMode::DualRational(
        BigRational::from_integer(2.into()),
        BigRational::from_integer(3.into()),
    ))?;
    let dual = start.elapsed();
    ensure(
        dual < Duration::from_secs(10),
        format!("dual-rational pass took {:.2}s, budget 10s", dual.as_secs_f64()),
    )
}

/// 4. The loop-Cartan action on the two singleton basis states of the
/// fundamental asymptotic module reproduces the worked closed forms, and
/// the first l-weight basis vector is the difference of the two states.
fn worked_singleton_actions() -> Result<(), String> {
    let psi = lift(psi_of(0, -1))?;
    let mut ctx = lift(TPsi::new(&psi, -4, 2, 12))?;
    let j0 = lift(SubsetIndex::from_positions(&[0]))?;
    let j1 = lift(SubsetIndex::from_positions(&[1]))?;
    let qm = QLaurent::monomial(1, BigInt::from(1)).sub(&QLaurent::monomial(-1, BigInt::from(1)));

    let h_v1 = lift(ctx.act_h(1, &lift(ctx.basis_state(&j1))?))?;
    let diag = lift(QScalar::fraction(
        QLaurent::monomial(-4, BigInt::from(1)),
        qm.clone(),
    ))?;
    let cross = QScalar::from_laurent(
        QLaurent::monomial(-3, BigInt::from(1)).sub(&QLaurent::monomial(1, BigInt::from(1))),
    );
    ensure(h_v1.support_len() == 2, "action on the position-1 flip should have two terms")?;
    ensure(h_v1.coeff(&j1) == diag, "diagonal coefficient on the position-1 flip")?;
    ensure(h_v1.coeff(&j0) == cross, "cross coefficient onto the position-0 flip")?;

    let h_v0 = lift(ctx.act_h(1, &lift(ctx.basis_state(&j0))?))?;
    let diag0 = QScalar::from_laurent(QLaurent::monomial(1, BigInt::from(-1))).add(&lift(
        QScalar::fraction(QLaurent::monomial(-2, BigInt::from(1)), qm),
    )?);
    ensure(h_v0.support_len() == 1, "action on the position-0 flip should be diagonal")?;
    ensure(h_v0.coeff(&j0) == diag0, "diagonal coefficient on the position-0 flip")?;

    let basis = basis_with_retry(&mut ctx, &[4, 6, 8])?;
    let w1 = basis.get(&j1).ok_or("missing basis vector at position 1")?;
    let expected = lift(lift(ctx.basis_state(&j1))?.sub(&lift(ctx.basis_state(&j0))?))?;
    ensure(
        *w1 == expected,
        "first basis vector is not the difference of the two singleton states",
    )
}

/// 5. Every l-weight basis vector with at most three flips among the first
/// seven slots is an exact eigenvector of the loop-Cartan generators of
/// degree r <= 4, with eigenvalue given by the logarithmic closed form; the
/// multiset of their l-weights equals the truncated limit character.
fn eigenvalue_log_formula() -> Result<(), String> {
    let psi = lift(psi_of(0, -1))?;
    let mut ctx = lift(TPsi::new(&psi, -6, 3, 12))?;
    let subsets = lift(ctx.ambient_subsets())?;
    ensure(
        subsets.len() == 64,
        format!("expected 64 index sets, got {}", subsets.len()),
    )?;
    let basis = basis_with_retry(&mut ctx, &[4, 6, 8])?;
    let qm_inv = lift(q_minus_q_inv().inv())?;

    for j in &subsets {
        let lw = lift(ctx.lweight_of(j))?.normalize();
        let u = lift(lw.series_coeffs(4))?;
        ensure(u[0].is_one(), "series must be normalized")?;
        // l_n = u_n - (1/n) sum_{k<n} k l_k u_{n-k}: the coefficients of
        // log of the series, computed by the derivative recursion.
        let mut l: Vec<QScalar> = vec![QScalar::zero(); 5];
        for n in 1..=4usize {
            let mut acc = u[n].clone();
            for k in 1..n {
                let kq = QScalar::from_int(k as i64);
                let nq_inv = lift(QScalar::from_int(n as i64).inv())?;
                acc = acc.sub(&kq.mul(&l[k]).mul(&u[n - k]).mul(&nq_inv));
            }
            l[n] = acc;
        }
        let w = basis.get(j).ok_or("missing basis vector")?;
        for r in 1..=4u32 {
            let expected = l[r as usize].mul(&qm_inv);
            ensure(
                lift(lw.h_eigenvalue(r))? == expected,
                format!("closed-form eigenvalue differs from the log recursion at degree {r}"),
            )?;
            let hv = lift(ctx.act_h(r, w))?;
            ensure(
                hv == w.scale(&expected),
                format!("basis vector is not an exact eigenvector at degree {r}"),
            )?;
        }
    }

    let region = lift(Region::new(-12, 0, 3))?;
    let via_t = lift(qchar_t(&psi, region))?;
    let via_limit = lift(chi_infinity(&psi, region))?;
    ensure(
        via_t == via_limit,
        "module character and limit character disagree on the window",
    )?;
    let mut counts: BTreeMap<AMonomial, i64> = BTreeMap::new();
    for j in &subsets {
        *counts.entry(lift(ctx.a_monomial_of(j))?).or_insert(0) += 1;
    }
    let want: BTreeMap<AMonomial, i64> = via_t.terms().map(|(m, &c)| (m.clone(), c)).collect();
    ensure(
        counts == want,
        "l-weight multiset differs from the truncated character",
    )
}

/// 6. The truncated raising and loop-Cartan actions computed in a minimal
/// section agree exactly with the same actions computed in a section with
/// one extra untouched factor, for every index set on the first five slots.
fn section_stability() -> Result<(), String> {
    let psi = lift(psi_of(0, -1))?;
    let mut ctx = lift(TPsi::new(&psi, -4, 5, 12))?;
    let subsets = lift(ctx.ambient_subsets())?;
    ensure(
        subsets.len() == 32,
        format!("expected 32 index sets, got {}", subsets.len()),
    )?;
    for j in &subsets {
        lift(ctx.coproduct_stability_check(j, 3, 3))?;
    }
    Ok(())
}

/// 7. The normal-ordering engine: graded dimensions are partition numbers
/// through degree 12, the independent linear-algebra oracle certifies the
/// basis through degree 4, and 200 seeded random words rewrite to the same
/// normal form under three different descent-selection strategies.
fn normal_ordering_certification() -> Result<(), String> {
    let expected: [u64; 13] = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77];
    for n in 0..=12u32 {
        let d = lift(graded_dimension(n))?;
        ensure(
            d == expected[n as usize],
            format!("graded dimension at degree {n}: got {d}, want {}", expected[n as usize]),
        )?;
    }
    ensure(
        lift(linear_oracle_check(4))?,
        "linear-algebra oracle rejected the normal-ordered basis",
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for i in 0..200u64 {
        let len = rng.gen_range(1..=6);
        let word: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=8)).collect();
        let a = lift(pbw_normalize_with(&word, Strategy::Leftmost, DEFAULT_STEP_BUDGET))?;
        let b = lift(pbw_normalize_with(&word, Strategy::Rightmost, DEFAULT_STEP_BUDGET))?;
        let c = lift(pbw_normalize_with(&word, Strategy::Seeded(i), DEFAULT_STEP_BUDGET))?;
        ensure(
            a == b && b == c,
            format!("strategies disagree on the word {word:?}"),
        )?;
    }
    Ok(())
}

/// 8. In the induced module truncated at word degree 5, every interior
/// loop-Cartan eigenvector lies in the base subspace spanned by the empty
/// word, and the truncated characters of the induced and base modules agree.
fn induced_eigenvector_location() -> Result<(), String> {
    let psi = lift(psi_of(0, -1))?;
    let report = lift(eigenvector_location_check(&psi, 5, 1, 4, &[1]))?;
    let interior: usize = report.spaces.iter().map(|s| s.interior_vectors).sum();
    ensure(interior >= 1, "no interior eigenvector was found")?;
    ensure(report.all_interior_in_base, "an interior eigenvector leaves the base subspace")?;
    ensure(
        report.eigenspace_dims_match,
        "an eigenspace dimension differs from its l-weight multiplicity",
    )?;
    ensure(
        report.qchar_series_match,
        "induced and base characters disagree on the window",
    )?;
    ensure(report.passed(), "location report did not pass")
}

/// 9. The formal lowering action on the highest-weight line produces the
/// divergent coefficient ladder q^-1, q^-3, ..., q^-(2N+1) for N <= 5.
fn lowering_divergence_witness() -> Result<(), String> {
    for n in 0..=5u32 {
        let got = lift(xminus_divergence_witness(n))?;
        let want: Vec<QScalar> = (0..=i64::from(n)).map(|k| QScalar::q_power(-2 * k - 1)).collect();
        ensure(
            got == want,
            format!("witness ladder at depth {n} differs from the closed form"),
        )?;
    }
    Ok(())
}

/// 10. On 100 seeded random negative l-weights: the limit character of a
/// product is the truncated product of the limit characters, and the
/// partial order on monomials is compatible with the character supports.
fn multiplicativity_and_order() -> Result<(), String> {
    let region = lift(Region::new(-16, 0, 6))?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..100u32 {
        let a = lift(random_negative_lweight(&mut rng, 8))?;
        let b = lift(random_negative_lweight(&mut rng, 8))?;
        ensure(
            lift(qchar_multiplicativity_check(&a, &b, region))?,
            format!("multiplicativity failed on sample {i}"),
        )?;
    }
    ensure(
        lift(order_compatibility_check(11, 100, 8))?,
        "order compatibility failed",
    )
}

struct Criterion {
    number: u32,
    name: &'static str,
    bound: Option<Duration>,
    body: fn() -> Result<(), String>,
}

#[test]
fn acceptance_criteria() {
    let list: [Criterion; 10] = [
        Criterion {
            number: 1,
            name: "prefundamental limit stabilizes to the subset sum",
            bound: Some(Duration::from_secs(5)),
            body: limit_stabilization,
        },
        Criterion {
            number: 2,
            name: "decomposition identity on the depth-12 window",
            bound: Some(Duration::from_secs(60)),
            body: decomposition_window,
        },
        Criterion {
            number: 3,
            name: "tensor chains match standard characters (both modes)",
            bound: None, // per-mode budgets enforced inside
            body: standard_chains_both_modes,
        },
        Criterion {
            number: 4,
            name: "worked loop-Cartan actions and first basis vector",
            bound: None,
            body: worked_singleton_actions,
        },
        Criterion {
            number: 5,
            name: "eigenvalue series match the logarithmic closed form",
            bound: None,
            body: eigenvalue_log_formula,
        },
        Criterion {
            number: 6,
            name: "truncated actions stable under section growth",
            bound: None,
            body: section_stability,
        },
        Criterion {
            number: 7,
            name: "normal-ordering basis certified by independent oracle",
            bound: None,
            body: normal_ordering_certification,
        },
        Criterion {
            number: 8,
            name: "induced-module eigenvectors locate in the base subspace",
            bound: None,
            body: induced_eigenvector_location,
        },
        Criterion {
            number: 9,
            name: "lowering-action divergence witness ladder",
            bound: None,
            body: lowering_divergence_witness,
        },
        Criterion {
            number: 10,
            name: "character multiplicativity and order compatibility",
            bound: None,
            body: multiplicativity_and_order,
        },
    ];

    let mut failures: Vec<String> = Vec::new();
    for c in &list {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.body));
        let elapsed = start.elapsed();
        let result: Result<(), String> = match outcome {
            Ok(Ok(())) => match c.bound {
                Some(b) if elapsed >= b => Err(format!(
                    "took {:.2}s, budget {:.0}s",
                    elapsed.as_secs_f64(),
                    b.as_secs_f64()
                )),
                _ => Ok(()),
            },
            Ok(Err(e)) => Err(e),
            Err(payload) => {
                let text = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panicked".into());
                Err(text)
            }
        };
        let status = if result.is_ok() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:02} {:<56} {} ({:.2}s)",
            c.number,
            c.name,
            status,
            elapsed.as_secs_f64()
        );
        if let Err(e) = result {
            failures.push(format!("criterion {:02} {}: {e}", c.number, c.name));
        }
    }
    assert!(failures.is_empty(), "\n{}", failures.join("\n"));
}
