//! Truncated formal sums of monomials in the inverse `A` variables with
//! integer coefficients.
//!
//! A series is tracked on an explicit region: a spectral window
//! `[rmin, rmax]` bounding the `A`-indices that may appear and a cap on
//! the total degree. Because the monomials have nonnegative exponents
//! only, any factor of a tracked monomial is itself tracked, so truncated
//! products are exact within the intersection region: dropped terms can
//! never influence retained coefficients.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lweight::{a_lweight, LWeight};
use crate::ymonomial::YMonomial;

/// Tracked region of a series: spectral window and total-degree cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    /// Smallest tracked A-index.
    pub rmin: i64,
    /// Largest tracked A-index.
    pub rmax: i64,
    /// Largest tracked total degree in the inverse A variables.
    pub degcap: u32,
}

impl Region {
    pub fn new(rmin: i64, rmax: i64, degcap: u32) -> Result<Self> {
        if rmin > rmax {
            return Err(Error::Config(format!(
                "empty spectral window [{rmin}, {rmax}]"
            )));
        }
        Ok(Self {
            rmin,
            rmax,
            degcap,
        })
    }

    pub fn contains_index(&self, r: i64) -> bool {
        self.rmin <= r && r <= self.rmax
    }

    /// Largest region tracked by both.
    pub fn intersect(&self, other: &Region) -> Result<Region> {
        Region::new(
            self.rmin.max(other.rmin),
            self.rmax.min(other.rmax),
            self.degcap.min(other.degcap),
        )
    }

    /// True if every monomial tracked by `inner` is tracked by `self`.
    pub fn covers(&self, inner: &Region) -> bool {
        self.rmin <= inner.rmin && inner.rmax <= self.rmax && inner.degcap <= self.degcap
    }
}

/// Monomial in the inverse `A` variables: maps an even A-index `r` to the
/// (positive) exponent of `A_{q^r}^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct AMonomial {
    exps: BTreeMap<i64, u32>,
}

impl AMonomial {
    /// The empty monomial `1`.
    pub fn one() -> Self {
        Self::default()
    }

    /// Single factor `A_{q^r}^{-mult}`.
    pub fn single(r: i64, mult: u32) -> Result<Self> {
        let mut m = Self::one();
        m.multiply(r, mult)?;
        Ok(m)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Multiply by `A_{q^r}^{-mult}` in place.
    pub fn multiply(&mut self, r: i64, mult: u32) -> Result<()> {
        if r.rem_euclid(2) != 0 {
            return Err(Error::Parity(format!("A-index {r} must be even")));
        }
        if mult == 0 {
            return Ok(());
        }
        let slot = self.exps.entry(r).or_insert(0);
        *slot = slot
            .checked_add(mult)
            .ok_or_else(|| Error::Overflow(format!("A exponent at index {r}")))?;
        Ok(())
    }

    /// Product of monomials.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (&r, &m) in &other.exps {
            out.multiply(r, m)?;
        }
        Ok(out)
    }

    /// Total degree in the inverse A variables.
    pub fn degree(&self) -> u32 {
        self.exps.values().sum()
    }

    /// Exponent of `A_{q^r}^{-1}`.
    pub fn exponent(&self, r: i64) -> u32 {
        self.exps.get(&r).copied().unwrap_or(0)
    }

    /// Iterate `(A-index, exponent)` pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (&i64, &u32)> {
        self.exps.iter()
    }

    /// True if the monomial lies inside the region.
    pub fn within(&self, region: &Region) -> bool {
        self.degree() <= region.degcap && self.exps.keys().all(|&r| region.contains_index(r))
    }

    /// Expand into the `Y` variables on node 0.
    pub fn to_ymonomial(&self) -> Result<YMonomial> {
        let mut m = YMonomial::one();
        for (&r, &e) in &self.exps {
            let e = i64::from(e);
            m.multiply_var(0, r - 1, -e)?;
            m.multiply_var(0, r + 1, -e)?;
        }
        Ok(m)
    }

    /// Recognize a `Y`-monomial on node 0 as a product of inverse `A`
    /// variables; `None` if it is not one.
    pub fn from_ymonomial(m: &YMonomial) -> Option<Self> {
        if m.is_one() {
            return Some(Self::one());
        }
        if m.iter().any(|(&(node, y), _)| node != 0 || y.rem_euclid(2) != 1) {
            return None;
        }
        // f(y) = -(c_{y+1} + c_{y-1}); telescope upward from below the
        // support, where all exponents vanish.
        let lo = m.iter().map(|(&(_, y), _)| y).min()?;
        let hi = m.iter().map(|(&(_, y), _)| y).max()?;
        let mut c: BTreeMap<i64, i64> = BTreeMap::new();
        let mut y = lo;
        while y <= hi + 2 {
            let f = m.exponent(0, y);
            let below = c.get(&(y - 1)).copied().unwrap_or(0);
            let value = -f - below;
            if value < 0 {
                return None;
            }
            if value > 0 {
                c.insert(y + 1, value);
            }
            y += 2;
        }
        // The telescoped exponents above the support must vanish.
        if c.keys().any(|&r| r > hi + 1) {
            return None;
        }
        let mut out = Self::one();
        for (&r, &e) in &c {
            out.multiply(r, u32::try_from(e).ok()?).ok()?;
        }
        Some(out)
    }

    /// The l-weight of the monomial (product of inverse-A l-weights).
    pub fn to_lweight(&self) -> Result<LWeight> {
        let mut out = LWeight::trivial();
        for (&r, &e) in &self.exps {
            out = out.product(&a_lweight(r)?.power(-i64::from(e))?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for AMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        // Highest spectral index first.
        let mut first = true;
        for (&r, &e) in self.exps.iter().rev() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "A[{r}]^-{e}")?;
        }
        Ok(())
    }
}

impl FromStr for AMonomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Self::one());
        }
        let mut out = Self::one();
        for part in s.split('*') {
            let part = part.trim();
            let rest = part
                .strip_prefix("A[")
                .ok_or_else(|| Error::Parse(format!("expected A[r] factor, got `{part}`")))?;
            let (idx, tail) = rest
                .split_once(']')
                .ok_or_else(|| Error::Parse(format!("unterminated A-index in `{part}`")))?;
            let r: i64 = idx
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad A-index `{idx}`")))?;
            let mult: u32 = match tail.trim() {
                "^-1" => 1,
                t => t
                    .strip_prefix("^-")
                    .and_then(|m| m.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad exponent `{tail}`")))?,
            };
            out.multiply(r, mult)?;
        }
        Ok(out)
    }
}

impl Serialize for AMonomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AMonomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Formal sum of inverse-A monomials with integer coefficients, tracked
/// exactly on an explicit region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QCharSeries {
    region: Region,
    terms: BTreeMap<AMonomial, i64>,
}

impl QCharSeries {
    /// The zero series on a region.
    pub fn zero(region: Region) -> Self {
        Self {
            region,
            terms: BTreeMap::new(),
        }
    }

    /// The constant series `1` on a region.
    pub fn one(region: Region) -> Self {
        let mut s = Self::zero(region);
        s.terms.insert(AMonomial::one(), 1);
        s
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate `(monomial, coefficient)` pairs in monomial map order.
    pub fn terms(&self) -> impl Iterator<Item = (&AMonomial, &i64)> {
        self.terms.iter()
    }

    /// Add `coeff * m` if `m` is inside the region (silently dropped
    /// otherwise — the region says exactly what is tracked).
    pub fn add_term(&mut self, m: &AMonomial, coeff: i64) -> Result<()> {
        if coeff == 0 || !m.within(&self.region) {
            return Ok(());
        }
        let slot = self.terms.entry(m.clone()).or_insert(0);
        *slot = slot
            .checked_add(coeff)
            .ok_or_else(|| Error::Overflow(format!("coefficient of {m}")))?;
        if *slot == 0 {
            self.terms.remove(m);
        }
        Ok(())
    }

    /// Sum of series on the intersection region.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let region = self.region.intersect(&other.region)?;
        let mut out = Self::zero(region);
        for (m, &c) in self.terms() {
            out.add_term(m, c)?;
        }
        for (m, &c) in other.terms() {
            out.add_term(m, c)?;
        }
        Ok(out)
    }

    /// Coefficient of an inverse-A monomial. Queries outside the region
    /// are errors: the series cannot certify them to be zero.
    pub fn coefficient_a(&self, m: &AMonomial) -> Result<i64> {
        if !m.within(&self.region) {
            return Err(Error::UntrackedRegion(format!(
                "monomial {m} lies outside window [{}, {}] degcap {}",
                self.region.rmin, self.region.rmax, self.region.degcap
            )));
        }
        Ok(self.terms.get(m).copied().unwrap_or(0))
    }

    /// Coefficient of a `Y`-monomial, which must be expressible as a
    /// product of inverse `A` variables.
    pub fn coefficient(&self, m: &YMonomial) -> Result<i64> {
        let a = AMonomial::from_ymonomial(m).ok_or_else(|| {
            Error::Parse(format!(
                "monomial {m} is not a product of inverse A variables"
            ))
        })?;
        self.coefficient_a(&a)
    }

    /// Product of series, exact on the intersection region.
    pub fn truncated_product(&self, other: &Self) -> Result<Self> {
        let region = self.region.intersect(&other.region)?;
        let mut out = Self::zero(region);
        for (m1, &c1) in self.terms() {
            if !m1.within(&region) {
                continue;
            }
            for (m2, &c2) in other.terms() {
                let m = m1.product(m2)?;
                if !m.within(&region) {
                    continue;
                }
                let c = c1
                    .checked_mul(c2)
                    .ok_or_else(|| Error::Overflow(format!("coefficient of {m}")))?;
                out.add_term(&m, c)?;
            }
        }
        Ok(out)
    }

    /// The same series tracked on a smaller region.
    pub fn restrict(&self, region: Region) -> Result<Self> {
        if !self.region.covers(&region) {
            return Err(Error::UntrackedRegion(format!(
                "cannot restrict window [{}, {}] degcap {} to a larger region",
                self.region.rmin, self.region.rmax, self.region.degcap
            )));
        }
        let mut out = Self::zero(region);
        for (m, &c) in self.terms() {
            out.add_term(m, c)?;
        }
        Ok(out)
    }

    /// Plain-text table: one `coeff * monomial` term per line, sorted by
    /// total degree and then by the monomial order.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<(&AMonomial, &i64)> = self.terms.iter().collect();
        rows.sort_by(|a, b| (a.0.degree(), a.0).cmp(&(b.0.degree(), b.0)));
        let mut out = String::new();
        for (m, c) in rows {
            out.push_str(&format!("{c}\t{m}\n"));
        }
        out
    }
}

impl fmt::Display for QCharSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut rows: Vec<(&AMonomial, &i64)> = self.terms.iter().collect();
        rows.sort_by(|a, b| (a.0.degree(), a.0).cmp(&(b.0.degree(), b.0)));
        for (n, (m, c)) in rows.iter().enumerate() {
            if n == 0 {
                if **c != 1 || m.is_one() {
                    write!(f, "{c}")?;
                    if !m.is_one() {
                        write!(f, "*")?;
                    }
                }
            } else if **c < 0 {
                write!(f, " - ")?;
                if **c != -1 || m.is_one() {
                    write!(f, "{}", -**c)?;
                    if !m.is_one() {
                        write!(f, "*")?;
                    }
                }
            } else {
                write!(f, " + ")?;
                if **c != 1 || m.is_one() {
                    write!(f, "{c}")?;
                    if !m.is_one() {
                        write!(f, "*")?;
                    }
                }
            }
            if !m.is_one() {
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

// JSON form: region plus a sorted term list of (monomial text, coefficient).
#[derive(Serialize, Deserialize)]
struct QCharSeriesRepr {
    window: Region,
    terms: Vec<SeriesTermRepr>,
}

#[derive(Serialize, Deserialize)]
struct SeriesTermRepr {
    monomial: String,
    coeff: i64,
}

impl Serialize for QCharSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows: Vec<(&AMonomial, &i64)> = self.terms.iter().collect();
        rows.sort_by(|a, b| (a.0.degree(), a.0).cmp(&(b.0.degree(), b.0)));
        QCharSeriesRepr {
            window: self.region,
            terms: rows
                .into_iter()
                .map(|(m, &c)| SeriesTermRepr {
                    monomial: m.to_string(),
                    coeff: c,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QCharSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = QCharSeriesRepr::deserialize(d)?;
        let mut out = QCharSeries::zero(repr.window);
        for term in repr.terms {
            let m: AMonomial = term.monomial.parse().map_err(DeError::custom)?;
            out.add_term(&m, term.coeff).map_err(DeError::custom)?;
        }
        Ok(out)
    }
}

/// Scan a series sequence for pointwise stabilization on a region.
///
/// Returns the least `n0 >= 1` such that the restrictions of
/// `gen(n0)`, `gen(n0 + 1)` and `gen(n0 + 2)` to the region agree
/// coefficientwise, together with that stable restriction. Gives up with
/// an error after `nmax` steps.
pub fn stabilization_check(
    mut gen: impl FnMut(u32) -> Result<QCharSeries>,
    region: Region,
    nmax: u32,
) -> Result<(u32, QCharSeries)> {
    let mut window: Vec<QCharSeries> = Vec::new();
    for n in 1..=nmax {
        let snap = gen(n)?.restrict(region)?;
        window.push(snap);
        if window.len() > 3 {
            window.remove(0);
        }
        if window.len() == 3 && window[0] == window[1] && window[1] == window[2] {
            return Ok((n - 2, window[0].clone()));
        }
    }
    Err(Error::NoStabilization { nmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn region(rmin: i64, rmax: i64, degcap: u32) -> Region {
        Region::new(rmin, rmax, degcap).unwrap()
    }

    fn one_plus_a(r: i64, reg: Region) -> QCharSeries {
        let mut s = QCharSeries::one(reg);
        s.add_term(&AMonomial::single(r, 1).unwrap(), 1).unwrap();
        s
    }

    #[test]
    fn basic_products() {
        let reg = region(-4, 2, 4);
        let s1 = one_plus_a(0, reg);
        let s2 = one_plus_a(-2, reg);
        let p = s1.truncated_product(&s2).unwrap();
        assert_eq!(p.num_terms(), 4);
        assert_eq!(p.coefficient_a(&AMonomial::one()).unwrap(), 1);
        assert_eq!(
            p.coefficient_a(&AMonomial::single(0, 1).unwrap()).unwrap(),
            1
        );
        assert_eq!(
            p.coefficient_a(&AMonomial::single(-2, 1).unwrap())
                .unwrap(),
            1
        );
        let both = AMonomial::single(0, 1)
            .unwrap()
            .product(&AMonomial::single(-2, 1).unwrap())
            .unwrap();
        assert_eq!(p.coefficient_a(&both).unwrap(), 1);
        // Identity.
        let one = QCharSeries::one(reg);
        assert_eq!(s1.truncated_product(&one).unwrap(), s1);
        // Degree-capped square.
        let capped = s1
            .restrict(region(-4, 2, 1))
            .unwrap()
            .truncated_product(&s1.restrict(region(-4, 2, 1)).unwrap())
            .unwrap();
        assert_eq!(capped.num_terms(), 2);
        assert_eq!(
            capped
                .coefficient_a(&AMonomial::single(0, 1).unwrap())
                .unwrap(),
            2
        );
    }

    #[test]
    fn coefficient_queries() {
        let reg = region(-2, 0, 2);
        let s = one_plus_a(0, reg);
        assert_eq!(
            s.coefficient_a(&AMonomial::single(0, 1).unwrap()).unwrap(),
            1
        );
        assert_eq!(
            s.coefficient_a(&AMonomial::single(0, 2).unwrap()).unwrap(),
            0
        );
        // Outside the window: untracked, not zero.
        assert!(matches!(
            s.coefficient_a(&AMonomial::single(-4, 1).unwrap()),
            Err(Error::UntrackedRegion(_))
        ));
        assert!(matches!(
            s.coefficient_a(&AMonomial::single(0, 3).unwrap()),
            Err(Error::UntrackedRegion(_))
        ));
        // Y-monomial queries go through the exact A-recognition.
        let y = AMonomial::single(0, 1).unwrap().to_ymonomial().unwrap();
        assert_eq!(s.coefficient(&y).unwrap(), 1);
        let not_a = YMonomial::variable(0, 1, 1);
        assert!(s.coefficient(&not_a).is_err());
    }

    #[test]
    fn a_monomial_y_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut a = AMonomial::one();
            for _ in 0..rng.gen_range(0..4) {
                a.multiply(2 * rng.gen_range(-5..=5), rng.gen_range(1..=3))
                    .unwrap();
            }
            let y = a.to_ymonomial().unwrap();
            assert_eq!(AMonomial::from_ymonomial(&y), Some(a.clone()));
            // And via l-weights: the A-monomial l-weight factors as the
            // same Y-product.
            let lw = a.to_lweight().unwrap();
            let back = crate::lweight::factor_negative(&lw.inverse());
            if !a.is_one() {
                // Inverse of a product of inverse-A's is a positive
                // A-product: all-Y factorization with no Psi part.
                let f = back.unwrap();
                assert!(f.psis.is_empty());
            }
        }
        // A positive Y-power is not an inverse-A product.
        assert_eq!(AMonomial::from_ymonomial(&YMonomial::variable(0, 1, 1)), None);
        // Odd A-index is a parity error.
        assert!(matches!(
            AMonomial::single(1, 1),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn product_is_commutative_and_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let reg = region(-8, 2, 4);
            let sample = |rng: &mut ChaCha8Rng| {
                let mut s = QCharSeries::zero(reg);
                for _ in 0..rng.gen_range(1..5) {
                    let mut m = AMonomial::one();
                    for _ in 0..rng.gen_range(0..3) {
                        m.multiply(2 * rng.gen_range(-4..=1), 1).unwrap();
                    }
                    s.add_term(&m, rng.gen_range(-3..=3)).unwrap();
                }
                s
            };
            let a = sample(&mut rng);
            let b = sample(&mut rng);
            let c = sample(&mut rng);
            assert_eq!(
                a.truncated_product(&b).unwrap(),
                b.truncated_product(&a).unwrap()
            );
            assert_eq!(
                a.truncated_product(&b)
                    .unwrap()
                    .truncated_product(&c)
                    .unwrap(),
                a.truncated_product(&b.truncated_product(&c).unwrap())
                    .unwrap()
            );
        }
    }

    #[test]
    fn chain_products_are_multiplicity_free() {
        for n in 1..=10i64 {
            let reg = region(-2 * (n - 1), 0, n as u32);
            let mut prod = QCharSeries::one(reg);
            for k in 0..n {
                prod = prod.truncated_product(&one_plus_a(-2 * k, reg)).unwrap();
            }
            assert_eq!(prod.num_terms(), 1usize << n);
            for (_, &c) in prod.terms() {
                assert_eq!(c, 1);
            }
        }
    }

    #[test]
    fn stabilization_of_chain_products() {
        let reg = region(-4, 0, 3);
        let gen = |n: u32| -> Result<QCharSeries> {
            let wide = region(-2 * (n as i64 - 1) - 4, 0, 3);
            let mut prod = QCharSeries::one(wide);
            for k in 0..n as i64 {
                prod = prod.truncated_product(&one_plus_a(-2 * k, wide))?;
            }
            Ok(prod.restrict(reg)?)
        };
        let (n0, stable) = stabilization_check(gen, reg, 30).unwrap();
        assert_eq!(n0, 3);
        assert_eq!(stable.num_terms(), 8);
        for (_, &c) in stable.terms() {
            assert_eq!(c, 1);
        }

        // A constant generator stabilizes immediately.
        let (n0, _) =
            stabilization_check(|_| Ok(QCharSeries::one(reg)), reg, 10).unwrap();
        assert_eq!(n0, 1);

        // A drifting coefficient never stabilizes.
        let drift = |n: u32| -> Result<QCharSeries> {
            let mut s = QCharSeries::one(reg);
            s.add_term(&AMonomial::single(0, 1).unwrap(), n as i64)?;
            Ok(s)
        };
        assert!(matches!(
            stabilization_check(drift, reg, 12),
            Err(Error::NoStabilization { nmax: 12 })
        ));
    }

    #[test]
    fn serde_and_text_round_trip() {
        let reg = region(-4, 0, 3);
        let mut s = QCharSeries::one(reg);
        s.add_term(&AMonomial::single(0, 1).unwrap(), 1).unwrap();
        s.add_term(
            &AMonomial::single(0, 1)
                .unwrap()
                .product(&AMonomial::single(-2, 2).unwrap())
                .unwrap(),
            -3,
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: QCharSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(
            format!("{s}"),
            "1 + A[0]^-1 - 3*A[0]^-1*A[-2]^-2"
        );
        let m: AMonomial = "A[0]^-1*A[-2]^-2".parse().unwrap();
        assert_eq!(m.degree(), 3);
        assert_eq!(m.to_string(), "A[0]^-1*A[-2]^-2");
    }
}
