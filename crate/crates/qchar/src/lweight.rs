//! l-weights of the rank-1 Borel category O over the integer spectral
//! lattice: exact multiplicative arithmetic, normalization, factorization
//! of negative l-weights, generating-series expansion, eigenvalue
//! functionals and the dominance order.
//!
//! An l-weight is the rational function
//!
//! ```text
//! psi(z) = q^wt * prod_{x in roots} (1 - q^x z) / prod_{p in poles} (1 - q^p z)
//! ```
//!
//! stored multiplicatively as its weight exponent `wt` (a rational number,
//! the coefficient of the fundamental weight) together with the root and
//! pole multisets of integer exponents. Roots and poles are kept disjoint,
//! so equality of the stored data is equality of rational functions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::qscalar::{QLaurent, QScalar};
use crate::ymonomial::YMonomial;

/// Maximum absolute spectral exponent accepted anywhere.
pub const SPECTRAL_BOUND: i64 = 1 << 20;

fn check_exp(r: i64) -> Result<()> {
    if r.abs() > SPECTRAL_BOUND {
        Err(Error::LimitExceeded(format!(
            "spectral exponent {r} exceeds bound {SPECTRAL_BOUND}"
        )))
    } else {
        Ok(())
    }
}

/// An l-weight for the single-node Borel algebra, on the integer lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LWeight {
    wt: BigRational,
    roots: BTreeMap<i64, u32>,
    poles: BTreeMap<i64, u32>,
}

impl LWeight {
    /// The trivial l-weight `1`.
    pub fn trivial() -> Self {
        Self {
            wt: BigRational::zero(),
            roots: BTreeMap::new(),
            poles: BTreeMap::new(),
        }
    }

    /// Pure weight factor `[w]`, the constant series `q^w`.
    pub fn weight_factor(w: BigRational) -> Self {
        Self {
            wt: w,
            roots: BTreeMap::new(),
            poles: BTreeMap::new(),
        }
    }

    /// Build from a weight exponent and root/pole multisets; common
    /// factors between roots and poles are cancelled.
    pub fn from_parts(
        wt: BigRational,
        roots: &[(i64, u32)],
        poles: &[(i64, u32)],
    ) -> Result<Self> {
        let mut out = Self::weight_factor(wt);
        for &(r, m) in roots {
            out.push_factor(r, m as i64)?;
        }
        for &(p, m) in poles {
            out.push_factor(p, -(m as i64))?;
        }
        Ok(out)
    }

    /// Multiply by `(1 - q^r z)^e` in place (`e > 0` root, `e < 0` pole).
    fn push_factor(&mut self, r: i64, e: i64) -> Result<()> {
        if e == 0 {
            return Ok(());
        }
        check_exp(r)?;
        let cur = self.roots.get(&r).map(|&m| m as i64).unwrap_or(0)
            - self.poles.get(&r).map(|&m| m as i64).unwrap_or(0);
        let next = cur
            .checked_add(e)
            .ok_or_else(|| Error::Overflow(format!("factor multiplicity at exponent {r}")))?;
        let as_mult = |v: i64| -> Result<u32> {
            u32::try_from(v).map_err(|_| Error::Overflow(format!("multiplicity at exponent {r}")))
        };
        self.roots.remove(&r);
        self.poles.remove(&r);
        match next.cmp(&0) {
            std::cmp::Ordering::Greater => {
                self.roots.insert(r, as_mult(next)?);
            }
            std::cmp::Ordering::Less => {
                self.poles.insert(r, as_mult(-next)?);
            }
            std::cmp::Ordering::Equal => {}
        }
        Ok(())
    }

    /// Weight exponent (coefficient of the fundamental weight).
    pub fn wt(&self) -> &BigRational {
        &self.wt
    }

    /// Root multiset as (exponent, multiplicity) in increasing order.
    pub fn roots(&self) -> &BTreeMap<i64, u32> {
        &self.roots
    }

    /// Pole multiset as (exponent, multiplicity) in increasing order.
    pub fn poles(&self) -> &BTreeMap<i64, u32> {
        &self.poles
    }

    pub fn is_trivial(&self) -> bool {
        self.wt.is_zero() && self.roots.is_empty() && self.poles.is_empty()
    }

    /// Product of l-weights.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.wt += &other.wt;
        for (&r, &m) in &other.roots {
            out.push_factor(r, m as i64)?;
        }
        for (&p, &m) in &other.poles {
            out.push_factor(p, -(m as i64))?;
        }
        Ok(out)
    }

    /// Multiplicative inverse.
    pub fn inverse(&self) -> Self {
        Self {
            wt: -self.wt.clone(),
            roots: self.poles.clone(),
            poles: self.roots.clone(),
        }
    }

    /// Integer power.
    pub fn power(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::trivial());
        }
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let k = e.unsigned_abs();
        let mut out = Self::weight_factor(base.wt.clone() * BigRational::from(BigInt::from(k)));
        for (&r, &m) in &base.roots {
            let mult = (m as u64)
                .checked_mul(k)
                .ok_or_else(|| Error::Overflow(format!("power multiplicity at {r}")))?;
            out.push_factor(r, i64::try_from(mult).map_err(|_| {
                Error::Overflow(format!("power multiplicity at {r}"))
            })?)?;
        }
        for (&p, &m) in &base.poles {
            let mult = (m as u64)
                .checked_mul(k)
                .ok_or_else(|| Error::Overflow(format!("power multiplicity at {p}")))?;
            out.push_factor(p, -i64::try_from(mult).map_err(|_| {
                Error::Overflow(format!("power multiplicity at {p}"))
            })?)?;
        }
        Ok(out)
    }

    /// Strip the weight part: same roots and poles, weight exponent zero.
    pub fn normalize(&self) -> Self {
        Self {
            wt: BigRational::zero(),
            roots: self.roots.clone(),
            poles: self.poles.clone(),
        }
    }

    /// First `m + 1` Taylor coefficients of the generating series `psi(z)`
    /// at `z = 0`, exact in `q`. The weight exponent must be an integer
    /// for `q^wt` to live in the scalar field.
    pub fn series_coeffs(&self, m: usize) -> Result<Vec<QScalar>> {
        if !self.wt.is_integer() {
            return Err(Error::NonIntegralWeight(format!(
                "cannot expand q^({}) as a Laurent series coefficient",
                self.wt
            )));
        }
        let wt_exp = i64::try_from(self.wt.to_integer())
            .map_err(|_| Error::Overflow("weight exponent".into()))?;
        // Denominator: expand 1 / prod (1 - q^p z) one geometric factor at
        // a time; each step is a prefix convolution.
        let mut coeffs: Vec<QLaurent> = vec![QLaurent::zero(); m + 1];
        coeffs[0] = QLaurent::one();
        for (&p, &mult) in &self.poles {
            for _ in 0..mult {
                let mut next = vec![QLaurent::zero(); m + 1];
                for (n, slot) in next.iter_mut().enumerate() {
                    // sum_{j<=n} q^{p (n-j)} coeffs[j]
                    let mut acc = QLaurent::zero();
                    for (j, c) in coeffs.iter().enumerate().take(n + 1) {
                        if !c.is_zero() {
                            let e = p
                                .checked_mul((n - j) as i64)
                                .ok_or_else(|| Error::Overflow("series exponent".into()))?;
                            acc = acc.add(&c.shifted(e));
                        }
                    }
                    *slot = acc;
                }
                coeffs = next;
            }
        }
        // Numerator: multiply by each (1 - q^x z) factor.
        for (&x, &mult) in &self.roots {
            for _ in 0..mult {
                let mut next = coeffs.clone();
                for n in (1..=m).rev() {
                    let shifted = coeffs[n - 1].shifted(x);
                    next[n] = next[n].sub(&shifted);
                }
                coeffs = next;
                // Keep `coeffs` in sync for the next factor.
            }
        }
        Ok(coeffs
            .into_iter()
            .map(|c| QScalar::from_laurent(c.shifted(wt_exp)))
            .collect())
    }

    /// Exact eigenvalue of the degree-`r` loop-Cartan generator on an
    /// l-weight vector of this l-weight:
    ///
    /// ```text
    /// (sum_{p in poles} q^{p r}  -  sum_{x in roots} q^{x r}) / (r (q - q^-1))
    /// ```
    ///
    /// This is the `z^r` coefficient of `log psi(z^{-1} ...)` bookkeeping
    /// collapsed to closed form; it is additive under products.
    pub fn h_eigenvalue(&self, r: u32) -> Result<QScalar> {
        if r == 0 {
            return Err(Error::Parse("loop-Cartan degree must be >= 1".into()));
        }
        let mut num = QLaurent::zero();
        for (&p, &mult) in &self.poles {
            let e = p
                .checked_mul(r as i64)
                .ok_or_else(|| Error::Overflow("eigenvalue exponent".into()))?;
            num = num.add(&QLaurent::monomial(e, BigInt::from(mult)));
        }
        for (&x, &mult) in &self.roots {
            let e = x
                .checked_mul(r as i64)
                .ok_or_else(|| Error::Overflow("eigenvalue exponent".into()))?;
            num = num.sub(&QLaurent::monomial(e, BigInt::from(mult)));
        }
        let mut den = QLaurent::monomial(1, BigInt::from(r));
        den = den.sub(&QLaurent::monomial(-1, BigInt::from(r)));
        QScalar::fraction(num, den)
    }
}

impl fmt::Display for LWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let mut parts: Vec<String> = Vec::new();
        if !self.wt.is_zero() {
            parts.push(format!("[{}]", self.wt));
        }
        for (&x, &m) in &self.roots {
            if m == 1 {
                parts.push(format!("(1-q^{x}z)"));
            } else {
                parts.push(format!("(1-q^{x}z)^{m}"));
            }
        }
        for (&p, &m) in &self.poles {
            parts.push(format!("(1-q^{p}z)^-{m}"));
        }
        write!(f, "{}", parts.join("*"))
    }
}

// Serialized with the weight as a plain rational string ("2", "-1/3")
// plus sorted (exponent, multiplicity) pair lists.
#[derive(Serialize, Deserialize)]
struct LWeightRepr {
    wt: String,
    roots: Vec<(i64, u32)>,
    poles: Vec<(i64, u32)>,
}

impl Serialize for LWeight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LWeightRepr {
            wt: self.wt.to_string(),
            roots: self.roots.iter().map(|(&r, &m)| (r, m)).collect(),
            poles: self.poles.iter().map(|(&p, &m)| (p, m)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LWeight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = LWeightRepr::deserialize(d)?;
        let wt: BigRational = repr.wt.parse().map_err(DeError::custom)?;
        LWeight::from_parts(wt, &repr.roots, &repr.poles).map_err(DeError::custom)
    }
}

/// Prefundamental l-weight `Psi_{q^r}^{sign}`: a single root (`sign = +1`)
/// or pole (`sign = -1`) at exponent `r`, weight part zero.
pub fn psi_of(r: i64, sign: i32) -> Result<LWeight> {
    check_exp(r)?;
    match sign {
        1 => LWeight::from_parts(BigRational::zero(), &[(r, 1)], &[]),
        -1 => LWeight::from_parts(BigRational::zero(), &[], &[(r, 1)]),
        _ => Err(Error::Parse(format!("sign must be +1 or -1, got {sign}"))),
    }
}

/// The l-weight of the variable `Y_{q^r}` (`r` odd): weight exponent 1,
/// root at `r - 1`, pole at `r + 1`.
pub fn y_of(r: i64) -> Result<LWeight> {
    check_exp(r)?;
    if r.rem_euclid(2) != 1 {
        return Err(Error::Parity(format!(
            "Y spectral exponent {r} must be odd on the integer lattice"
        )));
    }
    LWeight::from_parts(
        BigRational::from(BigInt::from(1)),
        &[(r - 1, 1)],
        &[(r + 1, 1)],
    )
}

/// The l-weight of `A_{q^r}` (`r` even): weight exponent 2, root at
/// `r - 2`, pole at `r + 2` (the product `Y_{q^{r-1}} Y_{q^{r+1}}` after
/// cancellation).
pub fn a_lweight(r: i64) -> Result<LWeight> {
    check_exp(r)?;
    if r.rem_euclid(2) != 0 {
        return Err(Error::Parity(format!(
            "A spectral exponent {r} must be even on the integer lattice"
        )));
    }
    y_of(r - 1)?.product(&y_of(r + 1)?)
}

/// Negative l-weight factored as `[omega] * prod Y_{q^y} * prod Psi_{q^p}^{-1}`.
///
/// `ystring` holds the Y-factors (node 0, odd exponents, positive powers);
/// `psis` maps each even exponent `p` to the multiplicity of the
/// `Psi_{q^p}^{-1}` factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegFactorization {
    pub omega: BigRational,
    pub ystring: YMonomial,
    pub psis: BTreeMap<i64, u32>,
}

// Serialized with the weight as a plain rational string ("2", "-1/3").
#[derive(Serialize, Deserialize)]
struct NegFactorizationRepr {
    omega: String,
    ystring: YMonomial,
    psis: Vec<(i64, u32)>,
}

impl Serialize for NegFactorization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NegFactorizationRepr {
            omega: self.omega.to_string(),
            ystring: self.ystring.clone(),
            psis: self.psis.iter().map(|(&p, &m)| (p, m)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NegFactorization {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = NegFactorizationRepr::deserialize(d)?;
        let omega: BigRational = repr.omega.parse().map_err(DeError::custom)?;
        Ok(NegFactorization {
            omega,
            ystring: repr.ystring,
            psis: repr.psis.into_iter().collect(),
        })
    }
}

impl NegFactorization {
    /// Multiply the factors back into an l-weight.
    pub fn recombine(&self) -> Result<LWeight> {
        let mut out = LWeight::weight_factor(self.omega.clone());
        for (&(_, y), &e) in self.ystring.iter() {
            out = out.product(&y_of(y)?.power(e)?)?;
        }
        for (&p, &m) in &self.psis {
            out = out.product(&psi_of(p, -1)?.power(m as i64)?)?;
        }
        Ok(out)
    }

    /// Number of 2-dimensional tensor slots with spectral index `r` in the
    /// asymptotic construction: Y-factors contribute at their own index,
    /// every inverse-Psi factor contributes one slot at each index below
    /// its own. (The slot of index `r` carries the factor `Y_{q^{2r-1}}`.)
    pub fn slot_multiplicity(&self, r: i64) -> u32 {
        let mut a = 0u32;
        let y = 2 * r - 1;
        a += self.ystring.exponent(0, y).max(0) as u32;
        for (&p, &m) in &self.psis {
            if p >= 2 * r {
                a += m;
            }
        }
        a
    }

    /// Largest slot index with a factor, if any factor exists at all.
    pub fn top_slot(&self) -> Option<i64> {
        let ytop = self.ystring.iter().map(|(&(_, y), _)| (y + 1) / 2).max();
        let ptop = self.psis.keys().map(|&p| p / 2).max();
        ytop.into_iter().chain(ptop).max()
    }

    /// Total multiplicity of inverse-Psi factors: the stable slot count
    /// far below every explicit factor.
    pub fn tail_multiplicity(&self) -> u32 {
        self.psis.values().sum()
    }
}

/// Factor a negative l-weight as `[omega] * prod Y * prod Psi^{-1}`.
///
/// Every root must be matched to a pole strictly above it at even
/// distance; a root at `x` matched to the pole at `x + 2k` becomes the
/// chain `Y_{q^{x+1}} Y_{q^{x+3}} ... Y_{q^{x+2k-1}}` (interior roots and
/// poles of the chain cancel telescopically). Roots are scanned in
/// decreasing order, each matched to the smallest available pole above.
/// Unmatched poles become inverse-Psi factors; an unmatched root means the
/// l-weight is not negative.
pub fn factor_negative(psi: &LWeight) -> Result<NegFactorization> {
    for &e in psi.roots().keys().chain(psi.poles().keys()) {
        if e.rem_euclid(2) != 0 {
            return Err(Error::Parity(format!(
                "root/pole exponent {e} is off the even lattice"
            )));
        }
    }
    let mut available: BTreeMap<i64, u32> = psi.poles().clone();
    let mut ystring = YMonomial::one();
    let mut ycount: i64 = 0;
    for (&x, &mult) in psi.roots().iter().rev() {
        for _ in 0..mult {
            // Smallest pole strictly above x.
            let target = available
                .range(x + 2..)
                .find(|&(_, &m)| m > 0)
                .map(|(&p, _)| p);
            let Some(p) = target else {
                return Err(Error::NotNegative(format!(
                    "root at exponent {x} has no pole above it to pair with"
                )));
            };
            let slot = available.get_mut(&p).expect("present");
            *slot -= 1;
            if *slot == 0 {
                available.remove(&p);
            }
            let mut y = x + 1;
            while y < p {
                ystring.multiply_var(0, y, 1)?;
                ycount += 1;
                y += 2;
            }
        }
    }
    let omega = psi.wt() - BigRational::from(BigInt::from(ycount));
    Ok(NegFactorization {
        omega,
        ystring,
        psis: available,
    })
}

/// True iff the l-weight is, up to a weight factor, a monomial in the `Y`
/// variables with nonnegative exponents — the highest l-weights of the
/// finite-dimensional simple modules.
pub fn is_finite_dim_type(psi: &LWeight) -> bool {
    matches!(factor_negative(psi), Ok(f) if f.psis.is_empty())
}

/// Dominance order: `psi1 <= psi2` iff `psi1 * psi2^{-1}` is a product of
/// `A_{q^b}^{-1}` factors with nonnegative multiplicities.
///
/// Each `A_{q^b}^{-1}` contributes a root at `b + 2`, a pole at `b - 2`
/// and weight `-2`; telescoping the net root-pole exponent function from
/// the top determines the candidate multiplicities uniquely, which are
/// then checked for nonnegativity, finiteness and weight consistency.
pub fn lweight_leq(psi1: &LWeight, psi2: &LWeight) -> bool {
    let Ok(diff) = psi1.product(&psi2.inverse()) else {
        return false;
    };
    if diff.is_trivial() {
        return true;
    }
    // Net exponent function of the quotient.
    let mut g: BTreeMap<i64, i64> = BTreeMap::new();
    for (&x, &m) in diff.roots() {
        *g.entry(x).or_insert(0) += m as i64;
    }
    for (&p, &m) in diff.poles() {
        *g.entry(p).or_insert(0) -= m as i64;
    }
    if g.keys().any(|&v| v.rem_euclid(2) != 0) {
        return false;
    }
    if g.is_empty() {
        // A pure weight factor: only the empty product has weight 0.
        return diff.wt().is_zero();
    }
    let lo = *g.keys().next().expect("nonempty");
    let hi = *g.keys().last().expect("nonempty");
    // c[b] = multiplicity of A_{q^b}^{-1}; from root(b+2)/pole(b-2),
    // g(v) = c[v-2] - c[v+2], so c[b] = g(b+2) + c[b+4].
    let mut c: BTreeMap<i64, i64> = BTreeMap::new();
    let mut total: i64 = 0;
    let mut b = hi - 2;
    while b >= lo - 4 {
        let value = g.get(&(b + 2)).copied().unwrap_or(0) + c.get(&(b + 4)).copied().unwrap_or(0);
        if value < 0 {
            return false;
        }
        c.insert(b, value);
        total += value;
        b -= 2;
    }
    // Finiteness: both parity classes must have telescoped to zero.
    if c.get(&(lo - 2)).copied().unwrap_or(0) != 0 || c.get(&(lo - 4)).copied().unwrap_or(0) != 0 {
        return false;
    }
    // Weight consistency: each inverse-A factor carries weight -2.
    *diff.wt() == BigRational::from(BigInt::from(-2 * total))
}
