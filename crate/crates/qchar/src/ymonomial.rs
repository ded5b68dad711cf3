//! Commutative monomial lattice in the variables `Y_{i,q^r}`, the
//! substitution rule expressing `A_{i,q^r}` in the `Y` variables for a
//! general finite-type Cartan matrix, the weight map, and the partial and
//! total orders used throughout: the dominance order on monomials and the
//! lexicographic order on index subsets.
//!
//! Spectral parameters are restricted to integer powers of `q`, so a
//! variable is addressed by `(node, r)` with the parameter `q^r`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::DenseMat;

/// Finite-type Cartan matrix with its symmetrizing diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanData {
    /// Cartan matrix entries `c[i][j]`.
    pub c: Vec<Vec<i64>>,
    /// Symmetrizers `d[i] >= 1` with `d[i]*c[i][j] = d[j]*c[j][i]`.
    pub d: Vec<i64>,
}

impl CartanData {
    /// Rank 1 (sl2).
    pub fn a1() -> Self {
        Self {
            c: vec![vec![2]],
            d: vec![1],
        }
    }

    /// Rank 2 simply laced (sl3).
    pub fn a2() -> Self {
        Self {
            c: vec![vec![2, -1], vec![-1, 2]],
            d: vec![1, 1],
        }
    }

    /// Rank 2 with a double bond (so5), exercising the `-2` neighbor case.
    pub fn b2() -> Self {
        Self {
            c: vec![vec![2, -1], vec![-2, 2]],
            d: vec![2, 1],
        }
    }

    /// Rank 2 with a triple bond (g2), exercising the `-3` neighbor case.
    pub fn g2() -> Self {
        Self {
            c: vec![vec![2, -1], vec![-3, 2]],
            d: vec![3, 1],
        }
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    /// Rank 1 gets an extra parity constraint on spectral exponents.
    pub fn is_rank_one(&self) -> bool {
        self.rank() == 1
    }

    /// Check the structural invariants of a Cartan matrix.
    pub fn validate(&self) -> Result<()> {
        let n = self.rank();
        if self.c.len() != n || self.c.iter().any(|row| row.len() != n) {
            return Err(Error::Config("Cartan matrix is not square".into()));
        }
        for i in 0..n {
            if self.d[i] < 1 {
                return Err(Error::Config(format!("symmetrizer d[{i}] must be >= 1")));
            }
            if self.c[i][i] != 2 {
                return Err(Error::Config(format!("diagonal entry c[{i}][{i}] != 2")));
            }
            for j in 0..n {
                if i != j && !(-3..=0).contains(&self.c[i][j]) {
                    return Err(Error::Config(format!(
                        "off-diagonal entry c[{i}][{j}] = {} outside {{0,-1,-2,-3}}",
                        self.c[i][j]
                    )));
                }
                if self.d[i] * self.c[i][j] != self.d[j] * self.c[j][i] {
                    return Err(Error::Config(format!(
                        "DC is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.rank() {
            Err(Error::UnknownNode {
                node: i,
                rank: self.rank(),
            })
        } else {
            Ok(())
        }
    }
}

/// Laurent monomial in the variables `Y_{i,q^r}`, keyed by `(node, r)`.
///
/// The exponent map never stores zeros, so equality of maps is equality of
/// monomials and the group law is componentwise addition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct YMonomial {
    exps: BTreeMap<(usize, i64), i64>,
}

impl YMonomial {
    /// The empty monomial `1`.
    pub fn one() -> Self {
        Self::default()
    }

    /// Single variable `Y_{i,q^r}^e`.
    pub fn variable(i: usize, r: i64, e: i64) -> Self {
        let mut m = Self::one();
        m.multiply_var(i, r, e).expect("fresh monomial");
        m
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent of `Y_{i,q^r}`.
    pub fn exponent(&self, i: usize, r: i64) -> i64 {
        self.exps.get(&(i, r)).copied().unwrap_or(0)
    }

    /// Iterate `((node, r), exponent)` pairs in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, i64), &i64)> {
        self.exps.iter()
    }

    /// Multiply by `Y_{i,q^r}^e` in place, with overflow checked.
    pub fn multiply_var(&mut self, i: usize, r: i64, e: i64) -> Result<()> {
        if e == 0 {
            return Ok(());
        }
        let cur = self.exponent(i, r);
        let next = cur
            .checked_add(e)
            .ok_or_else(|| Error::Overflow(format!("Y exponent overflow at ({i},{r})")))?;
        if next == 0 {
            self.exps.remove(&(i, r));
        } else {
            self.exps.insert((i, r), next);
        }
        Ok(())
    }

    /// Product of monomials.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (&(i, r), &e) in other.iter() {
            out.multiply_var(i, r, e)?;
        }
        Ok(out)
    }

    /// Multiplicative inverse.
    pub fn inverse(&self) -> Self {
        let mut out = Self::one();
        for (&(i, r), &e) in self.iter() {
            out.exps.insert((i, r), -e);
        }
        out
    }

    /// `e`-th power.
    pub fn power(&self, e: i64) -> Result<Self> {
        let mut out = Self::one();
        for (&(i, r), &x) in self.iter() {
            let p = x
                .checked_mul(e)
                .ok_or_else(|| Error::Overflow(format!("Y exponent overflow at ({i},{r})")))?;
            out.multiply_var(i, r, p)?;
        }
        Ok(out)
    }
}

impl fmt::Display for YMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (&(i, r), &e) in self.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "Y_{{{i},{r}}}")?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// The monomial `A_{i,q^r}` expressed in the `Y` variables:
/// `Y_{i,q^{r-d_i}} Y_{i,q^{r+d_i}}` times the inverse of the neighbor
/// product determined by the column entries `C[j][i]`:
/// `-1` contributes `Y_{j,q^r}`, `-2` contributes `Y_{j,q^{r-1}} Y_{j,q^{r+1}}`,
/// and `-3` contributes `Y_{j,q^{r-2}} Y_{j,q^{r+1}} Y_{j,q^{r+2}}`.
///
/// In rank 1 the spectral lattice splits into two parity classes and the
/// `A` variables live on the even one, so odd `r` is rejected there.
pub fn a_monomial(i: usize, r: i64, cd: &CartanData) -> Result<YMonomial> {
    cd.check_node(i)?;
    if cd.is_rank_one() && r.rem_euclid(2) != 0 {
        return Err(Error::Parity(format!(
            "A-monomial spectral exponent {r} must be even in rank 1"
        )));
    }
    let mut m = YMonomial::one();
    let di = cd.d[i];
    m.multiply_var(i, r - di, 1)?;
    m.multiply_var(i, r + di, 1)?;
    for j in 0..cd.rank() {
        match cd.c[j][i] {
            -1 => {
                m.multiply_var(j, r, -1)?;
            }
            -2 => {
                m.multiply_var(j, r - 1, -1)?;
                m.multiply_var(j, r + 1, -1)?;
            }
            -3 => {
                m.multiply_var(j, r - 2, -1)?;
                m.multiply_var(j, r + 1, -1)?;
                m.multiply_var(j, r + 2, -1)?;
            }
            _ => {}
        }
    }
    Ok(m)
}

/// Image of a monomial under the weight map: each `Y_{i,q^r}^e` contributes
/// `e` times the fundamental weight of node `i`. Returned as coordinates in
/// the fundamental-weight basis.
pub fn weight(m: &YMonomial, cd: &CartanData) -> Result<Vec<BigRational>> {
    let mut w = vec![BigRational::from(BigInt::from(0)); cd.rank()];
    for (&(i, _), &e) in m.iter() {
        cd.check_node(i)?;
        w[i] += BigRational::from(BigInt::from(e));
    }
    Ok(w)
}

/// Simple root `alpha_i` in the fundamental-weight basis (column `i` of the
/// Cartan matrix).
pub fn simple_root(i: usize, cd: &CartanData) -> Result<Vec<BigRational>> {
    cd.check_node(i)?;
    Ok((0..cd.rank())
        .map(|j| BigRational::from(BigInt::from(cd.c[j][i])))
        .collect())
}

/// Dominance order on monomials: `m <= m2` iff `m * m2^{-1}` is a product
/// of `A_{j,q^b}^{-1}` with nonnegative integer multiplicities.
///
/// Because the `A` monomials are multiplicatively independent, the
/// candidate exponents are determined by an exact rational linear solve
/// over the finitely many positions that could contribute to the support.
pub fn nakajima_leq(m: &YMonomial, m2: &YMonomial, cd: &CartanData) -> bool {
    let Ok(diff) = m.product(&m2.inverse()) else {
        return false;
    };
    if diff.is_one() {
        return true;
    }
    // Any A-monomial at (j, b) touches spectral exponents within 3 of b, so
    // positions outside the support window cannot appear in a cancellation.
    let support: Vec<(usize, i64)> = diff.iter().map(|(&k, _)| k).collect();
    if support.iter().any(|&(i, _)| i >= cd.rank()) {
        return false;
    }
    let lo = support.iter().map(|&(_, r)| r).min().unwrap() - 3;
    let hi = support.iter().map(|&(_, r)| r).max().unwrap() + 3;
    let mut candidates: Vec<(usize, i64, YMonomial)> = Vec::new();
    for j in 0..cd.rank() {
        for b in lo..=hi {
            if cd.is_rank_one() && b.rem_euclid(2) != 0 {
                continue;
            }
            let a = a_monomial(j, b, cd).expect("valid node and parity");
            candidates.push((j, b, a));
        }
    }
    // Row space: every (node, r) touched by the difference or a candidate.
    let mut rows: Vec<(usize, i64)> = support.clone();
    for (_, _, a) in &candidates {
        for (&k, _) in a.iter() {
            rows.push(k);
        }
    }
    rows.sort_unstable();
    rows.dedup();
    let row_of: BTreeMap<(usize, i64), usize> =
        rows.iter().enumerate().map(|(n, &k)| (k, n)).collect();
    // Solve sum_c x_c * (-A_c) = diff exactly over the rationals.
    let mut mat = DenseMat::<BigRational>::zero(rows.len(), candidates.len());
    for (col, (_, _, a)) in candidates.iter().enumerate() {
        for (&k, &e) in a.iter() {
            mat.set(row_of[&k], col, BigRational::from(BigInt::from(-e)));
        }
    }
    let rhs: Vec<BigRational> = rows
        .iter()
        .map(|&(i, r)| BigRational::from(BigInt::from(diff.exponent(i, r))))
        .collect();
    let Some(x) = mat.solve(&rhs) else {
        return false;
    };
    // The solution must be a nonnegative integer vector, and (as a guard
    // against free columns) must reproduce the difference exactly.
    let mut check = YMonomial::one();
    for (col, v) in x.iter().enumerate() {
        if v.is_negative() || !v.is_integer() {
            return false;
        }
        let e: i64 = match i64::try_from(v.to_integer()) {
            Ok(e) => e,
            Err(_) => return false,
        };
        if e != 0 {
            let (_, _, a) = &candidates[col];
            let Ok(p) = a.power(-e) else { return false };
            check = match check.product(&p) {
                Ok(c) => c,
                Err(_) => return false,
            };
        }
    }
    check == diff
}

/// Finite index set for the asymptotic tensor basis: a set of pairs
/// `(r, k)` where `r` is the spectral index of a tensor slot family and
/// `k >= 1` numbers the slots of equal spectral index.
///
/// Elements are kept sorted by decreasing `r`, then increasing `k` — the
/// left-to-right order of the corresponding tensor factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetIndex {
    elems: Vec<(i64, u32)>,
}

impl SubsetIndex {
    /// The empty set.
    pub fn empty() -> Self {
        Self { elems: Vec::new() }
    }

    /// Build from `(r, k)` pairs; duplicates are rejected.
    pub fn from_pairs(pairs: &[(i64, u32)]) -> Result<Self> {
        let mut elems: Vec<(i64, u32)> = pairs.to_vec();
        if elems.iter().any(|&(_, k)| k == 0) {
            return Err(Error::Parse("slot numbers start at 1".into()));
        }
        elems.sort_by_key(|&(r, k)| (-r, k));
        for w in elems.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Parse(format!(
                    "duplicate element ({}, {}) in index set",
                    w[0].0, w[0].1
                )));
            }
        }
        Ok(Self { elems })
    }

    /// Encode a set of natural-number tensor positions: position `j`
    /// (counted from the highest spectral factor) becomes `(-j, 1)`.
    pub fn from_positions(positions: &[u64]) -> Result<Self> {
        let pairs: Vec<(i64, u32)> = positions.iter().map(|&j| (-(j as i64), 1)).collect();
        Self::from_pairs(&pairs)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Elements in left-to-right tensor order (decreasing `r`, then `k`).
    pub fn elems(&self) -> &[(i64, u32)] {
        &self.elems
    }

    pub fn contains(&self, r: i64, k: u32) -> bool {
        self.elems.contains(&(r, k))
    }

    /// Set with one element added; `None` if already present.
    pub fn with(&self, r: i64, k: u32) -> Option<Self> {
        if self.contains(r, k) || k == 0 {
            return None;
        }
        let mut elems = self.elems.clone();
        elems.push((r, k));
        elems.sort_by_key(|&(r, k)| (-r, k));
        Some(Self { elems })
    }

    /// Set with one element removed; `None` if absent.
    pub fn without(&self, r: i64, k: u32) -> Option<Self> {
        let pos = self.elems.iter().position(|&e| e == (r, k))?;
        let mut elems = self.elems.clone();
        elems.remove(pos);
        Some(Self { elems })
    }

    fn key_seq(&self) -> Vec<(i64, u32)> {
        self.elems.iter().map(|&(r, k)| (-r, k)).collect()
    }
}

impl PartialOrd for SubsetIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used for map keys: by cardinality first, then the
/// lexicographic comparison that `subset_leq` uses within a cardinality.
impl Ord for SubsetIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.key_seq().cmp(&other.key_seq()))
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (r, k)) in self.elems.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "({r},{k})")?;
        }
        write!(f, "}}")
    }
}

/// Lexicographic order on index sets of equal cardinality, comparing the
/// element tuples in tensor order (decreasing spectral index, then slot).
/// Sizes must match: the order is only defined within a fixed cardinality.
pub fn subset_leq(j: &SubsetIndex, k: &SubsetIndex) -> Result<bool> {
    if j.len() != k.len() {
        return Err(Error::SizeMismatch(format!(
            "index sets have sizes {} and {}",
            j.len(),
            k.len()
        )));
    }
    Ok(j.key_seq() <= k.key_seq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::Rng;
    use rand::SeedableRng;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn a_monomial_rank_one() {
        let cd = CartanData::a1();
        let a = a_monomial(0, 0, &cd).unwrap();
        assert_eq!(a, YMonomial::variable(0, -1, 1).product(&YMonomial::variable(0, 1, 1)).unwrap());
        assert!(matches!(a_monomial(0, 1, &cd), Err(Error::Parity(_))));
        assert!(matches!(
            a_monomial(3, 0, &cd),
            Err(Error::UnknownNode { node: 3, rank: 1 })
        ));
    }

    #[test]
    fn a_monomial_rank_two_simply_laced() {
        let cd = CartanData::a2();
        let a = a_monomial(0, 0, &cd).unwrap();
        let mut expect = YMonomial::one();
        expect.multiply_var(0, -1, 1).unwrap();
        expect.multiply_var(0, 1, 1).unwrap();
        expect.multiply_var(1, 0, -1).unwrap();
        assert_eq!(a, expect);
    }

    #[test]
    fn a_monomial_double_and_triple_bond_neighbor_patterns() {
        let b2 = CartanData::b2();
        b2.validate().unwrap();
        // Node 1 has C[0][1] = -1: single neighbor factor at r.
        let a1 = a_monomial(1, 0, &b2).unwrap();
        assert_eq!(a1.exponent(0, 0), -1);
        assert_eq!(a1.exponent(1, -1), 1);
        assert_eq!(a1.exponent(1, 1), 1);
        // Node 0 has C[1][0] = -2: neighbor factors at r-1, r+1.
        let a0 = a_monomial(0, 0, &b2).unwrap();
        assert_eq!(a0.exponent(1, -1), -1);
        assert_eq!(a0.exponent(1, 1), -1);
        assert_eq!(a0.exponent(0, -2), 1);
        assert_eq!(a0.exponent(0, 2), 1);

        let g2 = CartanData::g2();
        g2.validate().unwrap();
        // Node 0 has C[1][0] = -3: neighbor factors at r-2, r+1, r+2.
        let a = a_monomial(0, 0, &g2).unwrap();
        assert_eq!(a.exponent(1, -2), -1);
        assert_eq!(a.exponent(1, 1), -1);
        assert_eq!(a.exponent(1, 2), -1);
        assert_eq!(a.exponent(0, -3), 1);
        assert_eq!(a.exponent(0, 3), 1);
    }

    #[test]
    fn products_add_exponents() {
        let cd = CartanData::a1();
        let p = a_monomial(0, 0, &cd)
            .unwrap()
            .product(&a_monomial(0, 2, &cd).unwrap())
            .unwrap();
        assert_eq!(p.exponent(0, -1), 1);
        assert_eq!(p.exponent(0, 1), 2);
        assert_eq!(p.exponent(0, 3), 1);
        assert_eq!(p.iter().count(), 3);
    }

    #[test]
    fn weight_of_a_monomial_is_simple_root() {
        for cd in [
            CartanData::a1(),
            CartanData::a2(),
            CartanData::b2(),
            CartanData::g2(),
        ] {
            cd.validate().unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            for i in 0..cd.rank() {
                for _ in 0..20 {
                    let mut r: i64 = rng.gen_range(-20..=20);
                    if cd.is_rank_one() {
                        r &= !1;
                    }
                    let a = a_monomial(i, r, &cd).unwrap();
                    assert_eq!(weight(&a, &cd).unwrap(), simple_root(i, &cd).unwrap());
                }
            }
        }
        // Rank 1: the simple root is twice the fundamental weight.
        let cd = CartanData::a1();
        assert_eq!(simple_root(0, &cd).unwrap(), vec![rat(2)]);
        assert_eq!(weight(&YMonomial::variable(0, -1, 1), &cd).unwrap(), vec![rat(1)]);
        assert_eq!(weight(&YMonomial::one(), &cd).unwrap(), vec![BigRational::zero()]);
    }

    #[test]
    fn dominance_order_examples() {
        let cd = CartanData::a1();
        let a = a_monomial(0, 0, &cd).unwrap();
        let one = YMonomial::one();
        assert!(nakajima_leq(&a.inverse(), &one, &cd));
        assert!(!nakajima_leq(&one, &a.inverse(), &cd));
        assert!(nakajima_leq(&a, &a, &cd));
        // Product of two inverses is still below 1.
        let two = a
            .inverse()
            .product(&a_monomial(0, 2, &cd).unwrap().inverse())
            .unwrap();
        assert!(nakajima_leq(&two, &one, &cd));
        // A single Y is incomparable to 1 in either direction.
        let y = YMonomial::variable(0, 1, 1);
        assert!(!nakajima_leq(&y, &one, &cd));
        assert!(!nakajima_leq(&one, &y, &cd));
    }

    #[test]
    fn dominance_order_rank_two() {
        let cd = CartanData::a2();
        let a0 = a_monomial(0, 1, &cd).unwrap();
        let a1 = a_monomial(1, 2, &cd).unwrap();
        let m = a0.inverse().product(&a1.inverse()).unwrap();
        assert!(nakajima_leq(&m, &YMonomial::one(), &cd));
        assert!(!nakajima_leq(&YMonomial::one(), &m, &cd));
    }

    #[test]
    fn dominance_order_is_a_partial_order_on_samples() {
        let cd = CartanData::a1();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut m = YMonomial::one();
            for _ in 0..rng.gen_range(0..4) {
                let b = 2 * rng.gen_range(-4..=4i64);
                let e = rng.gen_range(0..=2i64);
                let a = a_monomial(0, b, &cd).unwrap().power(-e).unwrap();
                m = m.product(&a).unwrap();
            }
            m
        };
        for _ in 0..200 {
            let m1 = sample(&mut rng);
            let m2 = sample(&mut rng);
            let m3 = sample(&mut rng);
            assert!(nakajima_leq(&m1, &m1, &cd));
            if nakajima_leq(&m1, &m2, &cd) && nakajima_leq(&m2, &m1, &cd) {
                assert_eq!(m1, m2);
            }
            if nakajima_leq(&m1, &m2, &cd) && nakajima_leq(&m2, &m3, &cd) {
                assert!(nakajima_leq(&m1, &m3, &cd));
            }
        }
    }

    #[test]
    fn subset_order_examples() {
        // Natural-number positions: {0} before {1}.
        let j0 = SubsetIndex::from_positions(&[0]).unwrap();
        let j1 = SubsetIndex::from_positions(&[1]).unwrap();
        assert!(subset_leq(&j0, &j1).unwrap());
        assert!(!subset_leq(&j1, &j0).unwrap());
        // Slot tie-break at equal spectral index.
        let a = SubsetIndex::from_pairs(&[(0, 1)]).unwrap();
        let b = SubsetIndex::from_pairs(&[(0, 2)]).unwrap();
        assert!(subset_leq(&a, &b).unwrap());
        // Reflexivity.
        let c = SubsetIndex::from_positions(&[0, 2]).unwrap();
        assert!(subset_leq(&c, &c).unwrap());
        // Size mismatch is an error.
        assert!(matches!(
            subset_leq(&j0, &c),
            Err(Error::SizeMismatch(_))
        ));
    }

    #[test]
    fn subset_order_is_total_on_fixed_cardinality() {
        // All N-subsets of positions {0..8} are pairwise comparable.
        for n in 1..=3usize {
            let mut subsets = Vec::new();
            for mask in 0u32..(1 << 9) {
                if mask.count_ones() as usize != n {
                    continue;
                }
                let positions: Vec<u64> = (0..9).filter(|&j| mask >> j & 1 == 1).collect();
                subsets.push(SubsetIndex::from_positions(&positions).unwrap());
            }
            for a in &subsets {
                for b in &subsets {
                    let ab = subset_leq(a, b).unwrap();
                    let ba = subset_leq(b, a).unwrap();
                    assert!(ab || ba);
                    if ab && ba {
                        assert_eq!(a, b);
                    }
                }
            }
            for a in &subsets {
                for b in &subsets {
                    for c in &subsets {
                        if subset_leq(a, b).unwrap() && subset_leq(b, c).unwrap() {
                            assert!(subset_leq(a, c).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subset_index_basics() {
        let j = SubsetIndex::from_pairs(&[(-1, 1), (2, 1), (2, 2)]).unwrap();
        assert_eq!(j.elems(), &[(2, 1), (2, 2), (-1, 1)]);
        assert!(j.contains(2, 2));
        assert!(SubsetIndex::from_pairs(&[(0, 1), (0, 1)]).is_err());
        assert!(SubsetIndex::from_pairs(&[(0, 0)]).is_err());
        let k = j.without(2, 1).unwrap();
        assert_eq!(k.len(), 2);
        assert_eq!(k.with(2, 1).unwrap(), j);
        assert!(j.with(2, 1).is_none());
        assert_eq!(format!("{j}"), "{(2,1),(2,2),(-1,1)}");
        // Total map-key order: shorter sets first, then lexicographic.
        assert!(SubsetIndex::empty() < j);
        assert!(k < j);
    }
}
