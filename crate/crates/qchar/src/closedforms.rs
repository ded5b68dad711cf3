//! Closed-form normalized q-characters and the decomposition verifier.
//!
//! All series are normalized (the weight prefactor of the highest l-weight
//! is divided out), live in the inverse `A` variables, and are tracked on
//! explicit regions. The building blocks:
//!
//! - fundamental modules: `1 + A_{r+1}^{-1}`,
//! - standard modules of a Y-multiset: products of fundamentals,
//! - Kirillov-Reshetikhin modules: nested chains descending from the top,
//! - standard prefundamental limits: sums over all finite subsets,
//! - simple negative prefundamentals: single descending staircases,
//! - general negative standard characters (`chi_infinity`): products of
//!   fundamental and prefundamental-limit factors,
//! - simple modules of gapped highest l-weight, and the coefficient-exact
//!   decomposition of the standard character into those simples.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::lweight::{
    a_lweight, factor_negative, psi_of, LWeight, NegFactorization,
};
use crate::lweight::SPECTRAL_BOUND;
use crate::qseries::{AMonomial, QCharSeries, Region};

/// Region for series that are finite and exact everywhere (fundamental,
/// standard and Kirillov-Reshetikhin characters).
pub fn full_region() -> Region {
    Region::new(-SPECTRAL_BOUND, SPECTRAL_BOUND, u32::MAX).expect("static bounds")
}

/// Normalized q-character of the fundamental module with highest l-weight
/// `Y_{q^r}` (`r` odd): `1 + A_{q^{r+1}}^{-1}`.
pub fn fundamental_qchar(r: i64) -> Result<QCharSeries> {
    if r.rem_euclid(2) != 1 {
        return Err(Error::Parity(format!(
            "fundamental spectral exponent {r} must be odd"
        )));
    }
    let mut s = QCharSeries::one(full_region());
    s.add_term(&AMonomial::single(r + 1, 1)?, 1)?;
    Ok(s)
}

/// Normalized q-character of a finite standard module: the product of the
/// fundamental characters over a multiset of odd spectral exponents.
pub fn standard_qchar(ys: &[i64]) -> Result<QCharSeries> {
    let mut s = QCharSeries::one(full_region());
    for &y in ys {
        s = s.truncated_product(&fundamental_qchar(y)?)?;
    }
    Ok(s)
}

/// Normalized q-character of the Kirillov-Reshetikhin module with
/// Y-string `Y_{q^rtop} Y_{q^{rtop-2}} ... Y_{q^{rtop-2(k-1)}}`:
/// the descending chain
///
/// ```text
/// sum_{j=0}^{k} prod_{l=0}^{j-1} A_{q^{rtop+1-2l}}^{-1}
/// ```
pub fn kr_qchar(k: u32, rtop: i64) -> Result<QCharSeries> {
    if rtop.rem_euclid(2) != 1 {
        return Err(Error::Parity(format!(
            "KR top spectral exponent {rtop} must be odd"
        )));
    }
    let mut s = QCharSeries::zero(full_region());
    let mut chain = AMonomial::one();
    s.add_term(&chain, 1)?;
    for l in 0..k {
        chain.multiply(rtop + 1 - 2 * (l as i64), 1)?;
        s.add_term(&chain, 1)?;
    }
    Ok(s)
}

/// Truncated limit of standard characters for the negative prefundamental
/// of spectral exponent `r` (even): the sum over all finite subsets `J`
/// of the naturals of `prod_{j in J} A_{q^{r-2j}}^{-1}`.
pub fn prefund_limit_qchar(r: i64, region: Region) -> Result<QCharSeries> {
    if r.rem_euclid(2) != 0 {
        return Err(Error::Parity(format!(
            "prefundamental spectral exponent {r} must be even"
        )));
    }
    let mut s = QCharSeries::one(region);
    let mut idx = r;
    while idx >= region.rmin {
        if idx <= region.rmax {
            let mut factor = QCharSeries::one(region);
            factor.add_term(&AMonomial::single(idx, 1)?, 1)?;
            s = s.truncated_product(&factor)?;
        }
        idx -= 2;
    }
    Ok(s)
}

/// Truncated normalized q-character of the simple negative prefundamental
/// of spectral exponent `r` (even): the single descending staircase
/// `1 + A_r^{-1} + A_r^{-1} A_{r-2}^{-1} + ...`.
pub fn staircase_qchar(r: i64, region: Region) -> Result<QCharSeries> {
    if r.rem_euclid(2) != 0 {
        return Err(Error::Parity(format!(
            "prefundamental spectral exponent {r} must be even"
        )));
    }
    let mut s = QCharSeries::zero(region);
    let mut chain = AMonomial::one();
    s.add_term(&chain, 1)?;
    let mut idx = r;
    loop {
        let mut next = chain.clone();
        if next.multiply(idx, 1).is_err() {
            break;
        }
        if !next.within(&region) {
            // Every longer chain contains this one; nothing more tracked.
            break;
        }
        s.add_term(&next, 1)?;
        chain = next;
        idx -= 2;
    }
    Ok(s)
}

/// Truncated normalized q-character of the standard module of a negative
/// l-weight: the product of fundamental factors and prefundamental-limit
/// factors read off from the negative factorization.
pub fn chi_infinity(psi: &LWeight, region: Region) -> Result<QCharSeries> {
    let f = factor_negative(psi)?;
    chi_infinity_of_factorization(&f, region)
}

/// Same as [`chi_infinity`] but starting from an explicit factorization.
pub fn chi_infinity_of_factorization(
    f: &NegFactorization,
    region: Region,
) -> Result<QCharSeries> {
    let mut s = QCharSeries::one(region);
    for (&(_, y), &e) in f.ystring.iter() {
        for _ in 0..e {
            s = s.truncated_product(&fundamental_qchar(y)?)?;
        }
    }
    for (&p, &m) in &f.psis {
        for _ in 0..m {
            s = s.truncated_product(&prefund_limit_qchar(p, region)?)?;
        }
    }
    Ok(s)
}

/// Strictly increasing positive integers with gaps:
/// `1 <= r_1 < r_2 < ... < r_m` and `r_{i+1} > r_i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GappedTuple {
    rs: Vec<u64>,
}

impl GappedTuple {
    pub fn new(rs: &[u64]) -> Result<Self> {
        for (i, &r) in rs.iter().enumerate() {
            if i == 0 && r < 1 {
                return Err(Error::Config(format!("tuple entry {r} must be >= 1")));
            }
            if i > 0 && r <= rs[i - 1] + 1 {
                return Err(Error::Config(format!(
                    "gap condition violated: {} then {r}",
                    rs[i - 1]
                )));
            }
        }
        Ok(Self { rs: rs.to_vec() })
    }

    pub fn empty() -> Self {
        Self { rs: Vec::new() }
    }

    pub fn rs(&self) -> &[u64] {
        &self.rs
    }

    pub fn len(&self) -> usize {
        self.rs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rs.is_empty()
    }

    /// Highest l-weight of the corresponding simple module, relative to
    /// the ambient inverse prefundamental: `Psi * prod A_{q^{-2 r_i}}^{-1}`
    /// for `Psi` the inverse prefundamental of spectral exponent 0.
    pub fn highest_lweight(&self) -> Result<LWeight> {
        let mut psi = psi_of(0, -1)?;
        for &r in &self.rs {
            psi = psi.product(&a_lweight(-2 * (r as i64))?.inverse())?;
        }
        Ok(psi)
    }
}

impl fmt::Display for GappedTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.rs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for GappedTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GappedTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rs = Vec::<u64>::deserialize(d)?;
        GappedTuple::new(&rs).map_err(serde::de::Error::custom)
    }
}

/// All gapped tuples with entries at most `kmax`, in lexicographic order
/// starting from the empty tuple.
pub fn enumerate_gapped_tuples(kmax: u64) -> Vec<GappedTuple> {
    fn extend(prefix: &mut Vec<u64>, next_min: u64, kmax: u64, out: &mut Vec<GappedTuple>) {
        out.push(GappedTuple {
            rs: prefix.clone(),
        });
        let mut r = next_min;
        while r <= kmax {
            prefix.push(r);
            extend(prefix, r + 2, kmax, out);
            prefix.pop();
            r += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, kmax, &mut out);
    out
}

/// Truncated normalized q-character of the simple module whose highest
/// l-weight is the inverse prefundamental times `prod A_{q^{-2 r_i}}^{-1}`,
/// relative to the prefundamental normalization.
///
/// Computed as the product of the leading inverse-A monomial, one
/// Kirillov-Reshetikhin chain per run between consecutive gap positions,
/// and the simple-prefundamental staircase below the last gap. Its terms
/// are exactly the subsets of the naturals whose connected components
/// start at `r_1, ..., r_m`, or at `0, r_1, ..., r_m`.
pub fn simple_qchar_gapped(g: &GappedTuple, region: Region) -> Result<QCharSeries> {
    let rs = g.rs();
    let m = rs.len();
    if m == 0 {
        return staircase_qchar(0, region);
    }
    // Leading monomial prod A_{q^{-2 r_i}}^{-1}.
    let mut lead = AMonomial::one();
    for &r in rs {
        lead.multiply(-2 * (r as i64), 1)?;
    }
    let mut s = QCharSeries::zero(region);
    s.add_term(&lead, 1)?;
    if s.num_terms() == 0 {
        // The leading term already violates the truncation; every other
        // term of the series is divisible by it.
        return Ok(s);
    }
    // Chain of length r_1 - 1 below the top slot (A-indices 0, -2, ...).
    s = s.truncated_product(&kr_qchar(rs[0] as u32 - 1, -1)?)?;
    // Chains of length r_{i+1} - r_i - 2 in the later runs.
    for i in 0..m - 1 {
        let len = rs[i + 1] - rs[i] - 2;
        let top = -2 * (rs[i] as i64) - 3;
        s = s.truncated_product(&kr_qchar(len as u32, top)?)?;
    }
    // Simple-prefundamental staircase below the last gap.
    let base = -2 * (rs[m - 1] as i64 + 1);
    s = s.truncated_product(&staircase_qchar(base, region)?)?;
    Ok(s)
}

/// Brute-force form of [`simple_qchar_gapped`]: enumerate every subset of
/// the in-window slot positions and keep those whose connected components
/// start exactly at the tuple entries, optionally preceded by a component
/// starting at 0. Exponential in the window depth; used as an oracle.
pub fn simple_qchar_gapped_enumerated(g: &GappedTuple, region: Region) -> Result<QCharSeries> {
    let depth = window_depth(&region);
    if depth > 24 {
        return Err(Error::LimitExceeded(format!(
            "subset enumeration depth {depth} too large"
        )));
    }
    let want: BTreeSet<u64> = g.rs().iter().copied().collect();
    let mut want0 = want.clone();
    want0.insert(0);
    let mut s = QCharSeries::zero(region);
    for mask in 0u64..(1u64 << (depth + 1)) {
        let positions: Vec<u64> = (0..=depth).filter(|&j| mask >> j & 1 == 1).collect();
        let starts: BTreeSet<u64> = positions
            .iter()
            .copied()
            .filter(|&j| j == 0 || mask >> (j - 1) & 1 == 0)
            .collect();
        if starts != want && starts != want0 {
            continue;
        }
        let mut monomial = AMonomial::one();
        for &j in &positions {
            monomial.multiply(-2 * (j as i64), 1)?;
        }
        s.add_term(&monomial, 1)?;
    }
    Ok(s)
}

/// Number of slot positions `j >= 1` whose A-index `-2j` is inside the
/// window (position 0 is always counted separately).
fn window_depth(region: &Region) -> u64 {
    if region.rmin > 0 {
        return 0;
    }
    ((-region.rmin) / 2) as u64
}

/// Outcome of the decomposition verification on one region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub window: Region,
    /// Number of gapped tuples enumerated (entries bounded by the window
    /// depth; deeper tuples have no tracked terms).
    pub tuples: usize,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    /// Standard character equals the sum of simple characters, coefficient
    /// by coefficient on the region.
    pub equal: bool,
    /// Every simple summand has 0/1 coefficients and no monomial appears
    /// in two summands.
    pub multiplicity_free: bool,
    pub first_mismatch: Option<SeriesMismatch>,
    /// Re-centering weight exponent of each tuple's highest l-weight
    /// (the weight part of its negative factorization).
    pub recenterings: Vec<(String, String)>,
}

/// First differing coefficient between two series, in the order by degree
/// and then by monomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesMismatch {
    pub monomial: String,
    pub lhs: i64,
    pub rhs: i64,
}

/// Locate the first coefficient difference between series on one region.
pub fn first_mismatch(lhs: &QCharSeries, rhs: &QCharSeries) -> Option<SeriesMismatch> {
    let mut keys: Vec<&AMonomial> = lhs.terms().map(|(m, _)| m).collect();
    keys.extend(rhs.terms().map(|(m, _)| m));
    keys.sort_by(|a, b| (a.degree(), *a).cmp(&(b.degree(), *b)));
    keys.dedup();
    for m in keys {
        let cl = lhs.coefficient_a(m).unwrap_or(0);
        let cr = rhs.coefficient_a(m).unwrap_or(0);
        if cl != cr {
            return Some(SeriesMismatch {
                monomial: m.to_string(),
                lhs: cl,
                rhs: cr,
            });
        }
    }
    None
}

/// Verify, coefficient-exactly on the region, that the standard character
/// of the inverse prefundamental decomposes as the sum of the simple
/// characters over all gapped tuples, and that the decomposition is
/// multiplicity-free.
pub fn verify_decomposition(region: Region) -> Result<DecompositionReport> {
    verify_decomposition_skipping(region, None)
}

/// Internal knob: optionally drop one tuple from the sum, to demonstrate
/// that the comparison detects perturbations.
pub(crate) fn verify_decomposition_skipping(
    region: Region,
    skip: Option<&GappedTuple>,
) -> Result<DecompositionReport> {
    let lhs = prefund_limit_qchar(0, region)?;
    let tuples = enumerate_gapped_tuples(window_depth(&region));
    let mut rhs = QCharSeries::zero(region);
    let mut summand_terms: usize = 0;
    let mut clean_coefficients = true;
    let mut recenterings = Vec::new();
    for g in &tuples {
        if skip == Some(g) {
            continue;
        }
        if g.len() as u32 > region.degcap {
            // The leading term of this simple character already exceeds
            // the degree cap, so it contributes nothing tracked.
            continue;
        }
        let s = simple_qchar_gapped(g, region)?;
        if s.terms().any(|(_, &c)| c != 1) {
            clean_coefficients = false;
        }
        summand_terms += s.num_terms();
        rhs = rhs.add(&s)?;
        let f = factor_negative(&g.highest_lweight()?)?;
        recenterings.push((g.to_string(), f.omega.to_string()));
    }
    let multiplicity_free = clean_coefficients && summand_terms == rhs.num_terms();
    let mismatch = first_mismatch(&lhs, &rhs);
    Ok(DecompositionReport {
        window: region,
        tuples: tuples.len(),
        lhs_terms: lhs.num_terms(),
        rhs_terms: rhs.num_terms(),
        equal: mismatch.is_none(),
        multiplicity_free,
        first_mismatch: mismatch,
        recenterings,
    })
}

/// Check that the standard character of a product of negative l-weights
/// is the product of the standard characters, on the region.
pub fn qchar_multiplicativity_check(
    psi1: &LWeight,
    psi2: &LWeight,
    region: Region,
) -> Result<bool> {
    let lhs = chi_infinity(&psi1.product(psi2)?, region)?;
    let rhs = chi_infinity(psi1, region)?.truncated_product(&chi_infinity(psi2, region)?)?;
    Ok(lhs == rhs)
}

/// Draw a random negative l-weight: a random weight exponent, a few `Y`
/// factors on odd exponents and a few inverse prefundamentals on even
/// exponents, all within `[-bound, bound]`.
pub fn random_negative_lweight(rng: &mut ChaCha8Rng, bound: i64) -> Result<LWeight> {
    let half = (bound / 2).max(1);
    let mut f = NegFactorization {
        omega: BigRational::new(
            BigInt::from(rng.gen_range(-6..=6)),
            BigInt::from(rng.gen_range(1..=3)),
        ),
        ystring: crate::ymonomial::YMonomial::one(),
        psis: BTreeMap::new(),
    };
    for _ in 0..rng.gen_range(0..3) {
        let y = 2 * rng.gen_range(-half..half) + 1;
        f.ystring.multiply_var(0, y, rng.gen_range(1..=2))?;
    }
    for _ in 0..rng.gen_range(0..3) {
        let p = 2 * rng.gen_range(-half..=half);
        *f.psis.entry(p).or_insert(0) += 1;
    }
    f.recombine()
}

/// Check on seeded random data that the dominance order is compatible
/// with products: whenever `psi <= psi1` and `psi' <= psi * psi2`, also
/// `psi' <= psi1 * psi2`.
pub fn order_compatibility_check(seed: u64, samples: u32, bound: i64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_drop = |rng: &mut ChaCha8Rng, base: &LWeight| -> Result<LWeight> {
        let mut out = base.clone();
        for _ in 0..rng.gen_range(0..3) {
            let b = 2 * rng.gen_range(-(bound / 2).max(1)..=(bound / 2).max(1));
            out = out.product(&a_lweight(b)?.inverse())?;
        }
        Ok(out)
    };
    for _ in 0..samples {
        let psi1 = random_negative_lweight(&mut rng, bound)?;
        let psi2 = random_negative_lweight(&mut rng, bound)?;
        // Construct premises that hold by definition.
        let psi = random_drop(&mut rng, &psi1)?;
        let psi_prime = random_drop(&mut rng, &psi.product(&psi2)?)?;
        debug_assert!(crate::lweight::lweight_leq(&psi, &psi1));
        debug_assert!(crate::lweight::lweight_leq(
            &psi_prime,
            &psi.product(&psi2)?
        ));
        if !crate::lweight::lweight_leq(&psi_prime, &psi1.product(&psi2)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
