//! Asymptotic standard module over the nonnegative Borel half.
//!
//! For a negative l-weight the module lives on an infinite ordered tensor
//! product of normalized two-dimensional evaluation modules, one tensor
//! slot per factor of the l-weight's infinite product expansion. Basis
//! states are indexed by the finite sets of "flipped" slots. The raising
//! and loop-Cartan generators act through finite tensor sections: a state
//! touching slots `0..=i0` is computed inside the section with `i0 + 1`
//! factors and re-embedded, with the contribution of the untouched
//! highest-weight tail added as an exact closed-form scalar (a finite sum
//! of q-powers plus a geometric series summed in the scalar field).
//!
//! The module provides: the truncated actions themselves, a report
//! verifying their triangularity, the unitriangular change of basis to
//! (generalized) joint eigenvectors of the loop-Cartan operators together
//! with exact eigenvalue verification, the subset-enumerated q-character,
//! and the witness showing the lowering generators have no limit on the
//! infinite tensor product.
//!
//! Truncation is never silent: any request that would need slots outside
//! the configured window, or a tensor section above the dimension budget,
//! is a hard error.

use crate::closedforms::chi_infinity_of_factorization;
use crate::error::{Error, Result};
use crate::lweight::{a_lweight, factor_negative, y_of, LWeight, NegFactorization};
use crate::qscalar::{QLaurent, QScalar};
use crate::qseries::{AMonomial, QCharSeries, Region};
use crate::tensorsim::{make_eval_module_twisted, tensor_bounded, EvalModule, TensorModule, DEFAULT_DIM_BOUND};
use crate::ymonomial::{subset_leq, SubsetIndex};
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Slots materialized past the window so that actions can be recomputed
/// in a section with extra untouched factors (stability probes).
const EXTRA_PROBE_SLOTS: usize = 4;

/// Hard cap on the number of ambient basis states enumerated at once.
const AMBIENT_ENUM_LIMIT: u128 = 2_000_000;

/// Hard cap on the number of terms enumerated by the q-character sum.
const QCHAR_ENUM_LIMIT: u64 = 4_000_000;

/// Hard cap on the slot window span, guarding degenerate configurations.
const WINDOW_SPAN_LIMIT: i64 = 200_000;

fn q_minus_q_inv() -> QLaurent {
    QLaurent::monomial(1, BigInt::from(1)).sub(&QLaurent::monomial(-1, BigInt::from(1)))
}

/// Ambient truncation of the asymptotic module: how deep the flipped-slot
/// sets may be, how far down the slot families extend, and how large a
/// finite tensor section may get (as a power of two).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Truncation {
    /// Maximum cardinality of a flipped-slot index set.
    pub depth: u32,
    /// Lowest admitted slot family index (the family of index `r` carries
    /// the spectral exponent `2r - 1` and flips by the `A`-variable at
    /// exponent `2r`).
    pub slot_min: i64,
    /// Tensor sections are capped at dimension `2^dim_exponent`.
    pub dim_exponent: u32,
}

/// A finite linear combination of flipped-slot basis states.
///
/// States are attached to the highest l-weight they belong to; combining
/// states across different l-weights is an error. Zero coefficients are
/// pruned, so equality of states is literal map equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TState {
    psi: LWeight,
    coeffs: BTreeMap<SubsetIndex, QScalar>,
}

impl TState {
    /// The zero state.
    pub fn zero(psi: &LWeight) -> Self {
        Self { psi: psi.clone(), coeffs: BTreeMap::new() }
    }

    /// Highest l-weight this state belongs to.
    pub fn psi(&self) -> &LWeight {
        &self.psi
    }

    /// Iterate the nonzero coefficients in index order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&SubsetIndex, &QScalar)> {
        self.coeffs.iter()
    }

    /// Coefficient of one basis state (zero if absent).
    pub fn coeff(&self, j: &SubsetIndex) -> QScalar {
        self.coeffs.get(j).cloned().unwrap_or_else(QScalar::zero)
    }

    /// Number of basis states with nonzero coefficient.
    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn insert_term(&mut self, j: SubsetIndex, c: QScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(j);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Sum of two states over the same highest l-weight.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.psi != other.psi {
            return Err(Error::Inconsistency(
                "cannot combine states attached to different highest l-weights".into(),
            ));
        }
        let mut out = self.clone();
        for (j, c) in &other.coeffs {
            out.insert_term(j.clone(), c.clone());
        }
        Ok(out)
    }

    /// Difference of two states over the same highest l-weight.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&QScalar::from_int(-1)))
    }

    /// State scaled by an exact scalar.
    pub fn scale(&self, c: &QScalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.psi);
        }
        Self {
            psi: self.psi.clone(),
            coeffs: self.coeffs.iter().map(|(j, v)| (j.clone(), v.mul(c))).collect(),
        }
    }
}

impl fmt::Display for TState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.coeffs.iter().map(|(j, c)| format!("({c}) v{j}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// One triangularity violation: a loop-Cartan action produced a component
/// outside the admitted lower set of the source state.
#[derive(Debug, Clone, Serialize)]
pub struct TriangularityViolation {
    pub source: String,
    pub target: String,
    pub degree: u32,
    pub coefficient: String,
}

/// Outcome of checking the loop-Cartan triangularity on every ambient
/// basis state.
#[derive(Debug, Clone, Serialize)]
pub struct TriangularityReport {
    pub states_checked: usize,
    pub actions_checked: usize,
    pub rmax: u32,
    pub violations: Vec<TriangularityViolation>,
}

/// One weight block of the change of basis from flipped-slot states to
/// the l-weight basis; `matrix[row][col]` is the coefficient of the
/// `members[row]` basis state in the l-weight vector labeled by
/// `members[col]`.
#[derive(Debug, Clone, Serialize)]
pub struct BasisBlockDump {
    pub size: u32,
    pub members: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

/// Context for one asymptotic module: the factored highest l-weight, the
/// materialized slot list, the ambient truncation, and memoized finite
/// tensor sections with their derived loop-generator matrices.
#[derive(Debug)]
pub struct TPsi {
    psi: LWeight,
    fact: NegFactorization,
    trunc: Truncation,
    /// Slots in tensor order (family descending, slot number ascending):
    /// the window prefix plus a few probe slots past it.
    slots: Vec<(i64, u32)>,
    /// Length of the window prefix of `slots`.
    window_len: usize,
    /// Linear position of each materialized slot.
    pos_of: HashMap<(i64, u32), usize>,
    /// Smallest family index carrying an explicit Y-factor, if any.
    lowest_y_family: Option<i64>,
    /// Memoized tensor sections keyed by factor count.
    modules: HashMap<usize, TensorModule>,
}

impl TPsi {
    /// Build the context for a negative highest l-weight.
    ///
    /// `slot_min` is the lowest slot family admitted into the ambient
    /// window, `depth` caps the flipped-set cardinality, and finite
    /// tensor sections are capped at dimension `2^dim_exponent`.
    pub fn new(psi: &LWeight, slot_min: i64, depth: u32, dim_exponent: u32) -> Result<Self> {
        if dim_exponent == 0 || dim_exponent > 24 {
            return Err(Error::Config(format!(
                "dimension exponent {dim_exponent} outside the supported range 1..=24"
            )));
        }
        let fact = factor_negative(psi)?;
        let lowest_y_family = fact
            .ystring
            .iter()
            .filter(|&(_, &e)| e > 0)
            .map(|(&(_, y), _)| (y + 1) / 2)
            .min();
        let mut slots: Vec<(i64, u32)> = Vec::new();
        let mut window_len = 0usize;
        if let Some(top) = fact.top_slot() {
            if top.saturating_sub(slot_min) > WINDOW_SPAN_LIMIT {
                return Err(Error::LimitExceeded(format!(
                    "slot window spans {} families; the limit is {WINDOW_SPAN_LIMIT}",
                    top - slot_min
                )));
            }
            let tail_mult = fact.tail_multiplicity();
            let mut r = top;
            loop {
                let within_window = r >= slot_min;
                if !within_window {
                    if slots.len() >= window_len + EXTRA_PROBE_SLOTS {
                        break;
                    }
                    // With no inverse-prefundamental tail the families die
                    // out below the last explicit Y-factor.
                    if tail_mult == 0 && lowest_y_family.map_or(true, |ly| r < ly) {
                        break;
                    }
                }
                for k in 1..=fact.slot_multiplicity(r) {
                    slots.push((r, k));
                }
                if within_window {
                    window_len = slots.len();
                }
                r = r
                    .checked_sub(1)
                    .ok_or_else(|| Error::Overflow("slot family index".into()))?;
            }
        }
        let pos_of = slots.iter().enumerate().map(|(p, &s)| (s, p)).collect();
        Ok(Self {
            psi: psi.clone(),
            fact,
            trunc: Truncation { depth, slot_min, dim_exponent },
            slots,
            window_len,
            pos_of,
            lowest_y_family,
            modules: HashMap::new(),
        })
    }

    /// The highest l-weight of the module.
    pub fn psi(&self) -> &LWeight {
        &self.psi
    }

    /// The factorization driving the slot layout.
    pub fn factorization(&self) -> &NegFactorization {
        &self.fact
    }

    /// The ambient truncation.
    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    /// Slots inside the ambient window, in tensor order.
    pub fn window_slots(&self) -> &[(i64, u32)] {
        &self.slots[..self.window_len]
    }

    /// Error unless every element of `j` is a window slot and the
    /// cardinality respects the depth cap.
    pub fn check_ambient(&self, j: &SubsetIndex) -> Result<()> {
        if j.len() > self.trunc.depth as usize {
            return Err(Error::Truncation(format!(
                "index set {j} has {} flips; the ambient depth is {}",
                j.len(),
                self.trunc.depth
            )));
        }
        for &(r, k) in j.elems() {
            match self.pos_of.get(&(r, k)) {
                Some(&p) if p < self.window_len => {}
                _ => {
                    return Err(Error::Truncation(format!(
                        "slot ({r},{k}) is outside the ambient window"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Basis state for one flipped-slot set.
    pub fn basis_state(&self, j: &SubsetIndex) -> Result<TState> {
        self.check_ambient(j)?;
        let mut st = TState::zero(&self.psi);
        st.insert_term(j.clone(), QScalar::one());
        Ok(st)
    }

    /// Build a state from explicit terms, validating each index set.
    pub fn state_from_terms(&self, terms: &[(SubsetIndex, QScalar)]) -> Result<TState> {
        let mut st = TState::zero(&self.psi);
        for (j, c) in terms {
            self.check_ambient(j)?;
            st.insert_term(j.clone(), c.clone());
        }
        Ok(st)
    }

    /// The l-weight attached to a flipped-slot set: the highest l-weight
    /// times one inverse `A`-factor at exponent `2r` per flip in family `r`.
    pub fn lweight_of(&self, j: &SubsetIndex) -> Result<LWeight> {
        let mut out = self.psi.clone();
        for &(r, _) in j.elems() {
            let a_index = r
                .checked_mul(2)
                .ok_or_else(|| Error::Overflow("A-variable exponent".into()))?;
            out = out.product(&a_lweight(a_index)?.inverse())?;
        }
        Ok(out)
    }

    /// The normalized q-character monomial of a flipped-slot set: one
    /// inverse `A`-factor at exponent `2r` per flip in family `r`.
    pub fn a_monomial_of(&self, j: &SubsetIndex) -> Result<AMonomial> {
        let mut m = AMonomial::one();
        for &(r, _) in j.elems() {
            let a_index = r
                .checked_mul(2)
                .ok_or_else(|| Error::Overflow("A-variable exponent".into()))?;
            m.multiply(a_index, 1)?;
        }
        Ok(m)
    }

    fn position_of(&self, r: i64, k: u32) -> Result<usize> {
        self.pos_of.get(&(r, k)).copied().ok_or_else(|| {
            Error::Truncation(format!("slot ({r},{k}) is not materialized"))
        })
    }

    /// Highest linear slot position touched by `j`, if any. Elements are
    /// stored in tensor order, so the last one sits at the highest
    /// position.
    fn last_position(&self, j: &SubsetIndex) -> Result<Option<usize>> {
        match j.elems().last() {
            None => Ok(None),
            Some(&(r, k)) => Ok(Some(self.position_of(r, k)?)),
        }
    }

    /// Index of the pure tensor for `j` inside the section with `p`
    /// factors: factor 0 is the most significant bit, flipped slots set
    /// their bit.
    fn basis_index(&self, j: &SubsetIndex, p: usize) -> Result<usize> {
        let mut idx = 0usize;
        for &(r, k) in j.elems() {
            let pos = self.position_of(r, k)?;
            debug_assert!(pos < p);
            idx |= 1usize << (p - 1 - pos);
        }
        Ok(idx)
    }

    /// Decode a section vector back into a state: bit set means flipped.
    fn decode_section(&self, out: &[QScalar], p: usize) -> Result<TState> {
        let mut st = TState::zero(&self.psi);
        for (idx, c) in out.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut pairs: Vec<(i64, u32)> = Vec::new();
            for pos in 0..p {
                if idx & (1usize << (p - 1 - pos)) != 0 {
                    pairs.push(self.slots[pos]);
                }
            }
            st.insert_term(SubsetIndex::from_pairs(&pairs)?, c.clone());
        }
        Ok(st)
    }

    /// The finite tensor section with `p` factors, with loop generators
    /// derived at least up to the requested degrees.
    fn module_at(&mut self, p: usize, mmax: usize, rmax: usize) -> Result<&TensorModule> {
        if p == 0 {
            return Err(Error::Config("tensor section with zero factors".into()));
        }
        if p > self.slots.len() {
            return Err(Error::Truncation(format!(
                "a section with {p} factors exceeds the {} materialized slots",
                self.slots.len()
            )));
        }
        let bound = 1usize
            .checked_shl(self.trunc.dim_exponent)
            .ok_or_else(|| Error::Overflow("dimension bound".into()))?;
        let mut t = match self.modules.remove(&p) {
            Some(t) => t,
            None => {
                let mut factors: Vec<EvalModule> = Vec::with_capacity(p);
                for &(r, _) in &self.slots[..p] {
                    let s = r
                        .checked_mul(2)
                        .and_then(|x| x.checked_sub(1))
                        .ok_or_else(|| Error::Overflow("spectral exponent".into()))?;
                    factors.push(make_eval_module_twisted(1, s, -1)?);
                }
                tensor_bounded(&factors, bound)?
            }
        };
        let (have_m, have_r) = t.cache().map_or((0, 0), |c| (c.mmax, c.rmax));
        let need_r = rmax.max(1).max(have_r);
        let need_m = mmax.max(need_r).max(have_m);
        if t.cache().is_none() || have_m < need_m || have_r < need_r {
            t.derive_drinfeld(need_m, need_r)?;
        }
        Ok(self.modules.entry(p).or_insert(t))
    }

    /// Largest family index below which every family carries exactly the
    /// stable tail multiplicity.
    fn stable_family_threshold(&self) -> i64 {
        let mut r_stab = match self.fact.psis.keys().next() {
            Some(&p) => p / 2,
            None => return i64::MIN,
        };
        if let Some(y_min) = self
            .fact
            .ystring
            .iter()
            .filter(|&(_, &e)| e > 0)
            .map(|(&(_, y), _)| y)
            .min()
        {
            r_stab = r_stab.min((y_min - 1) / 2);
        }
        r_stab
    }

    /// Exact eigenvalue of the degree-`zeta` loop-Cartan generator on the
    /// untouched highest-weight tail starting at linear slot `from_pos`:
    /// the sum over all remaining factors of their top-vector eigenvalue.
    /// The irregular head is summed as one finite l-weight; the stable
    /// part collapses to `a_tail * q^(2*r_geo*zeta) / (zeta (q - q^-1))`.
    fn tail_scalar(&self, zeta: u32, from_pos: usize) -> Result<QScalar> {
        if zeta == 0 {
            return Err(Error::Config("loop-Cartan degree must be >= 1".into()));
        }
        if from_pos >= self.slots.len() {
            if self.fact.tail_multiplicity() == 0 {
                // Finitely many slots in total: the tail is empty.
                return Ok(QScalar::zero());
            }
            return Err(Error::Truncation(
                "tail evaluation starts past the materialized slot list".into(),
            ));
        }
        let (rf, kf) = self.slots[from_pos];
        let spectral = |r: i64| -> Result<i64> {
            r.checked_mul(2)
                .and_then(|x| x.checked_sub(1))
                .ok_or_else(|| Error::Overflow("spectral exponent".into()))
        };
        // Remaining slots of the partially used family.
        let mut finite = y_of(spectral(rf)?)?
            .power(i64::from(self.fact.slot_multiplicity(rf) - kf + 1))?;
        let a_tail = self.fact.tail_multiplicity();
        let geo;
        if a_tail > 0 {
            let r_geo = self.stable_family_threshold().min(rf - 1);
            let mut rr = rf - 1;
            while rr > r_geo {
                let a = self.fact.slot_multiplicity(rr);
                if a > 0 {
                    finite = finite.product(&y_of(spectral(rr)?)?.power(i64::from(a))?)?;
                }
                rr -= 1;
            }
            let e = r_geo
                .checked_mul(2)
                .and_then(|x| x.checked_mul(i64::from(zeta)))
                .ok_or_else(|| Error::Overflow("tail exponent".into()))?;
            geo = QScalar::fraction(
                QLaurent::monomial(e, BigInt::from(a_tail)),
                q_minus_q_inv().mul(&QLaurent::monomial(0, BigInt::from(zeta))),
            )?;
        } else {
            geo = QScalar::zero();
            if let Some(ly) = self.lowest_y_family {
                let mut rr = rf - 1;
                while rr >= ly {
                    let a = self.fact.slot_multiplicity(rr);
                    if a > 0 {
                        finite = finite.product(&y_of(spectral(rr)?)?.power(i64::from(a))?)?;
                    }
                    rr -= 1;
                }
            }
        }
        let finite_eig = if finite.is_trivial() {
            QScalar::zero()
        } else {
            finite.normalize().h_eigenvalue(zeta)?
        };
        Ok(finite_eig.add(&geo))
    }

    /// Action of the degree-`m` raising generator on one basis state,
    /// computed in the section with `max(j) + 1 + extra` factors. The
    /// result is independent of `extra`; exposing it makes that
    /// stability checkable.
    pub fn act_xplus_at(&mut self, m: u32, j: &SubsetIndex, extra: usize) -> Result<TState> {
        self.check_ambient(j)?;
        let p = match self.last_position(j)? {
            None => extra,
            Some(i0) => i0 + 1 + extra,
        };
        if p == 0 {
            // Raising kills the pure highest-weight vector.
            return Ok(TState::zero(&self.psi));
        }
        let idx = self.basis_index(j, p)?;
        let t = self.module_at(p, m as usize, 1)?;
        let dim = t.dim();
        let mat = &t.cache().expect("derived above").xplus[m as usize];
        let mut vin = vec![QScalar::zero(); dim];
        vin[idx] = QScalar::one();
        let out = mat.apply(&vin);
        self.decode_section(&out, p)
    }

    /// Action of the degree-`r` loop-Cartan generator on one basis state,
    /// computed in the section with `max(j) + 1 + extra` factors plus the
    /// exact tail scalar for everything past the section.
    pub fn act_h_at(&mut self, r: u32, j: &SubsetIndex, extra: usize) -> Result<TState> {
        self.check_ambient(j)?;
        if r == 0 {
            return Err(Error::Config("loop-Cartan degree must be >= 1".into()));
        }
        let p = match self.last_position(j)? {
            None => extra,
            Some(i0) => i0 + 1 + extra,
        };
        let tail = self.tail_scalar(r, p)?;
        if p == 0 {
            let mut st = TState::zero(&self.psi);
            st.insert_term(j.clone(), tail);
            return Ok(st);
        }
        let idx = self.basis_index(j, p)?;
        let t = self.module_at(p, r as usize, r as usize)?;
        let dim = t.dim();
        let mat = &t.cache().expect("derived above").hs[r as usize];
        let mut vin = vec![QScalar::zero(); dim];
        vin[idx] = QScalar::one();
        let mut out = mat.apply(&vin);
        out[idx] = out[idx].add(&tail);
        self.decode_section(&out, p)
    }

    /// Raising action on a state, one flip removed per term.
    pub fn act_xplus(&mut self, m: u32, v: &TState) -> Result<TState> {
        self.check_state(v)?;
        let mut out = TState::zero(&self.psi);
        for (j, c) in v.coeffs.clone() {
            out = out.add(&self.act_xplus_at(m, &j, 0)?.scale(&c))?;
        }
        Ok(out)
    }

    /// Loop-Cartan action on a state, flip count preserved.
    pub fn act_h(&mut self, r: u32, v: &TState) -> Result<TState> {
        self.check_state(v)?;
        let mut out = TState::zero(&self.psi);
        for (j, c) in v.coeffs.clone() {
            out = out.add(&self.act_h_at(r, &j, 0)?.scale(&c))?;
        }
        Ok(out)
    }

    /// Normalized Cartan action: each basis coefficient scales by
    /// `q^(-2 |J|)`.
    pub fn act_k(&self, v: &TState) -> Result<TState> {
        self.check_state(v)?;
        let mut out = TState::zero(&self.psi);
        for (j, c) in &v.coeffs {
            let len = i64::try_from(j.len())
                .map_err(|_| Error::Overflow("index set size".into()))?;
            out.insert_term(j.clone(), c.mul(&QScalar::q_power(-2 * len)));
        }
        Ok(out)
    }

    /// Cartan action including the weight factor of the highest l-weight:
    /// `q^(wt - 2 |J|)`. Requires an integral weight exponent.
    pub fn act_k_weighted(&self, v: &TState) -> Result<TState> {
        if !self.psi.wt().is_integer() {
            return Err(Error::NonIntegralWeight(format!(
                "cannot apply q^({}) as a scalar",
                self.psi.wt()
            )));
        }
        let wt = i64::try_from(self.psi.wt().to_integer())
            .map_err(|_| Error::Overflow("weight exponent".into()))?;
        Ok(self.act_k(v)?.scale(&QScalar::q_power(wt)))
    }

    fn check_state(&self, v: &TState) -> Result<()> {
        if v.psi != self.psi {
            return Err(Error::Inconsistency(
                "state belongs to a different highest l-weight".into(),
            ));
        }
        Ok(())
    }

    /// Every flipped-slot set inside the ambient window, ordered by
    /// cardinality and then by the triangularity order.
    pub fn ambient_subsets(&self) -> Result<Vec<SubsetIndex>> {
        let w = self.window_len;
        let depth = (self.trunc.depth as usize).min(w);
        let mut total: u128 = 0;
        for d in 0..=depth {
            total = total.saturating_add(binomial_u128(w as u64, d as u64));
            if total > AMBIENT_ENUM_LIMIT {
                return Err(Error::LimitExceeded(format!(
                    "ambient truncation holds more than {AMBIENT_ENUM_LIMIT} states"
                )));
            }
        }
        let mut out: Vec<SubsetIndex> = Vec::with_capacity(total as usize);
        let mut picked: Vec<usize> = Vec::new();
        fn rec(
            slots: &[(i64, u32)],
            start: usize,
            left: usize,
            picked: &mut Vec<usize>,
            out: &mut Vec<SubsetIndex>,
        ) -> Result<()> {
            if left == 0 {
                let pairs: Vec<(i64, u32)> = picked.iter().map(|&p| slots[p]).collect();
                out.push(SubsetIndex::from_pairs(&pairs)?);
                return Ok(());
            }
            for p in start..slots.len() {
                picked.push(p);
                rec(slots, p + 1, left - 1, picked, out)?;
                picked.pop();
            }
            Ok(())
        }
        for d in 0..=depth {
            rec(&self.slots[..w], 0, d, &mut picked, &mut out)?;
        }
        out.sort();
        Ok(out)
    }

    /// Check, for every ambient basis state and every loop-Cartan degree
    /// up to `rmax`, that the action stays inside the admitted lower set:
    /// same cardinality, no slot past the last touched position, and
    /// strictly smaller in the triangularity order (or the state itself).
    pub fn triangularity_report(&mut self, rmax: u32) -> Result<TriangularityReport> {
        if rmax == 0 {
            return Err(Error::Config("triangularity needs rmax >= 1".into()));
        }
        let subsets = self.ambient_subsets()?;
        let mut violations = Vec::new();
        let mut actions = 0usize;
        for j in &subsets {
            let i0 = self.last_position(j)?;
            for r in 1..=rmax {
                actions += 1;
                let st = self.act_h_at(r, j, 0)?;
                for (k, c) in st.coeffs() {
                    if k == j {
                        continue;
                    }
                    let ok = k.len() == j.len()
                        && self.last_position(k)? <= i0
                        && subset_leq(k, j)?;
                    if !ok {
                        violations.push(TriangularityViolation {
                            source: j.to_string(),
                            target: k.to_string(),
                            degree: r,
                            coefficient: c.to_string(),
                        });
                    }
                }
            }
        }
        Ok(TriangularityReport {
            states_checked: subsets.len(),
            actions_checked: actions,
            rmax,
            violations,
        })
    }

    /// Unitriangular change of basis to joint (generalized) eigenvectors
    /// of the loop-Cartan generators of degree `1..=rmax`, one per
    /// ambient flipped-slot set.
    ///
    /// Each returned vector `w_J = v_J + (combination of strictly lower
    /// states of the same cardinality)` satisfies, for every degree
    /// `zeta <= rmax`, `(H_zeta - lambda_zeta)^p w_J = 0`, where the
    /// eigenvalue is the closed-form loop-Cartan eigenvalue of the
    /// l-weight attached to `J` and `p` is the number of states in the
    /// block carrying that same l-weight (`p = 1`, i.e. a true
    /// eigenvector, unless slot families repeat). Coordinates on the
    /// other same-l-weight members are zero, which makes the
    /// representative canonical. The measured diagonal coefficients are
    /// verified against the closed form, the triangular structure is
    /// verified exactly, and the annihilation by the nilpotent powers is
    /// verified exactly; any mismatch is an error.
    pub fn lweight_basis(&mut self, rmax: u32) -> Result<BTreeMap<SubsetIndex, TState>> {
        if rmax == 0 {
            return Err(Error::Config("eigenbasis needs rmax >= 1".into()));
        }
        let subsets = self.ambient_subsets()?;
        let mut result: BTreeMap<SubsetIndex, TState> = BTreeMap::new();
        let depth = self.trunc.depth as usize;
        for d in 0..=depth {
            let block: Vec<SubsetIndex> =
                subsets.iter().filter(|j| j.len() == d).cloned().collect();
            if block.is_empty() {
                continue;
            }
            self.lweight_basis_block(rmax, &block, &mut result)?;
        }
        Ok(result)
    }

    /// One cardinality block of `lweight_basis`. `block` must be sorted
    /// ascending in the triangularity order.
    fn lweight_basis_block(
        &mut self,
        rmax: u32,
        block: &[SubsetIndex],
        result: &mut BTreeMap<SubsetIndex, TState>,
    ) -> Result<()> {
        let n = block.len();
        let index: HashMap<SubsetIndex, usize> =
            block.iter().enumerate().map(|(i, j)| (j.clone(), i)).collect();
        // Columns of each loop-Cartan generator in block coordinates.
        let mut cols: Vec<Vec<Vec<QScalar>>> = Vec::with_capacity(rmax as usize);
        for zeta in 1..=rmax {
            let mut these = Vec::with_capacity(n);
            for j in block {
                let st = self.act_h_at(zeta, j, 0)?;
                let mut col = vec![QScalar::zero(); n];
                for (k, c) in st.coeffs() {
                    let Some(&ki) = index.get(k) else {
                        return Err(Error::Inconsistency(format!(
                            "loop-Cartan action left the ambient block: {k} from {j}"
                        )));
                    };
                    col[ki] = c.clone();
                }
                these.push(col);
            }
            cols.push(these);
        }
        // Verify triangularity and the diagonal against the closed form.
        let mut class_key: Vec<AMonomial> = Vec::with_capacity(n);
        for (jc, j) in block.iter().enumerate() {
            class_key.push(self.a_monomial_of(j)?);
            let lw = self.lweight_of(j)?;
            for (zi, hcols) in cols.iter().enumerate() {
                let expected = lw.h_eigenvalue(zi as u32 + 1)?;
                if hcols[jc][jc] != expected {
                    return Err(Error::UnmatchedEigenvalue(format!(
                        "diagonal coefficient on {j} at degree {} is {}, expected {}",
                        zi + 1,
                        hcols[jc][jc],
                        expected
                    )));
                }
                for (kc, entry) in hcols[jc].iter().enumerate() {
                    if kc > jc && !entry.is_zero() {
                        return Err(Error::Diagonalization(format!(
                            "action on {j} is not triangular: hit {}",
                            block[kc]
                        )));
                    }
                }
            }
        }
        // Group members into classes of equal attached l-weight. Within a
        // class the loop-Cartan family is nilpotent above the diagonal, so
        // the class defines one joint generalized eigenspace; across
        // classes some degree separates the eigenvalues.
        let mut classes: BTreeMap<AMonomial, Vec<usize>> = BTreeMap::new();
        for (i, key) in class_key.iter().enumerate() {
            classes.entry(key.clone()).or_default().push(i);
        }
        for members in classes.values() {
            let p = members.len();
            let top = *members.last().expect("class is nonempty");
            let np = top + 1;
            // powers[zi] = (H - lambda I)^p on the leading np-by-np corner,
            // column-major with column j supported on rows 0..=j.
            let mut powers: Vec<Vec<Vec<QScalar>>> = Vec::with_capacity(cols.len());
            for hcols in &cols {
                let lambda = hcols[top][top].clone();
                let base: Vec<Vec<QScalar>> = (0..np)
                    .map(|j| {
                        let mut col = hcols[j][..=j].to_vec();
                        col[j] = col[j].sub(&lambda);
                        col
                    })
                    .collect();
                let mut m = base.clone();
                for _ in 1..p {
                    m = tri_mul(&base, &m);
                }
                powers.push(m);
            }
            for &jc in members {
                // Back-substitute x = e_J + lower terms so that every
                // class-separated row of the nilpotent powers vanishes;
                // coordinates on same-class members are fixed to zero,
                // which picks the canonical unitriangular representative.
                let mut x = vec![QScalar::zero(); jc + 1];
                x[jc] = QScalar::one();
                for k in (0..jc).rev() {
                    if class_key[k] == class_key[jc] {
                        continue;
                    }
                    let mut solved = false;
                    for pw in &powers {
                        let d = &pw[k][k];
                        if d.is_zero() {
                            continue;
                        }
                        let mut num = QScalar::zero();
                        for (kp, xv) in x.iter().enumerate().skip(k + 1) {
                            if !xv.is_zero() {
                                num = num.add(&pw[kp][k].mul(xv));
                            }
                        }
                        x[k] = num.neg().mul(&d.inv()?);
                        solved = true;
                        break;
                    }
                    if !solved {
                        return Err(Error::UnmatchedEigenvalue(format!(
                            "states {} and {} carry different l-weights but agree \
                             on every loop-Cartan degree up to {rmax}; increase rmax",
                            block[k], block[jc]
                        )));
                    }
                }
                // Verify the full generalized eigenvector condition: the
                // p-th nilpotent power of every degree annihilates x.
                for pw in &powers {
                    for k in 0..=jc {
                        let mut acc = QScalar::zero();
                        for (kp, xv) in x.iter().enumerate().skip(k) {
                            if !xv.is_zero() && !pw[kp][k].is_zero() {
                                acc = acc.add(&pw[kp][k].mul(xv));
                            }
                        }
                        if !acc.is_zero() {
                            return Err(Error::Diagonalization(format!(
                                "generalized eigenvector condition fails for {}",
                                block[jc]
                            )));
                        }
                    }
                }
                let mut w = TState::zero(&self.psi);
                for (kc, c) in x.into_iter().enumerate() {
                    w.insert_term(block[kc].clone(), c);
                }
                result.insert(block[jc].clone(), w);
            }
        }
        Ok(())
    }

    /// Recompute the raising and loop-Cartan actions on one basis state
    /// in a section with one extra untouched factor and require exact
    /// agreement with the minimal section.
    pub fn coproduct_stability_check(
        &mut self,
        j: &SubsetIndex,
        mmax: u32,
        rmax: u32,
    ) -> Result<()> {
        for m in 0..=mmax {
            let a = self.act_xplus_at(m, j, 0)?;
            let b = self.act_xplus_at(m, j, 1)?;
            if a != b {
                return Err(Error::Inconsistency(format!(
                    "raising action of degree {m} on {j} changes with the section size"
                )));
            }
        }
        for r in 1..=rmax {
            let a = self.act_h_at(r, j, 0)?;
            let b = self.act_h_at(r, j, 1)?;
            if a != b {
                return Err(Error::Inconsistency(format!(
                    "loop-Cartan action of degree {r} on {j} changes with the section size"
                )));
            }
        }
        Ok(())
    }
}

/// Group an l-weight basis into cardinality blocks and dump the change
/// of basis matrices in display form.
pub fn change_of_basis_blocks(basis: &BTreeMap<SubsetIndex, TState>) -> Vec<BasisBlockDump> {
    let mut blocks: Vec<BasisBlockDump> = Vec::new();
    let mut members: Vec<&SubsetIndex> = Vec::new();
    let flush = |members: &mut Vec<&SubsetIndex>, blocks: &mut Vec<BasisBlockDump>| {
        if members.is_empty() {
            return;
        }
        let matrix = members
            .iter()
            .map(|row| {
                members
                    .iter()
                    .map(|col| basis[*col].coeff(row).to_string())
                    .collect()
            })
            .collect();
        blocks.push(BasisBlockDump {
            size: members[0].len() as u32,
            members: members.iter().map(|j| j.to_string()).collect(),
            matrix,
        });
        members.clear();
    };
    for j in basis.keys() {
        if members.last().is_some_and(|m| m.len() != j.len()) {
            flush(&mut members, &mut blocks);
        }
        members.push(j);
    }
    flush(&mut members, &mut blocks);
    blocks
}

/// Product `a * b` of column-major upper-triangular matrices (column `j`
/// supported on rows `0..=j`).
fn tri_mul(a: &[Vec<QScalar>], b: &[Vec<QScalar>]) -> Vec<Vec<QScalar>> {
    let n = a.len();
    let mut out: Vec<Vec<QScalar>> = (0..n).map(|j| vec![QScalar::zero(); j + 1]).collect();
    for j in 0..n {
        for (k, bkj) in b[j].iter().enumerate() {
            if bkj.is_zero() {
                continue;
            }
            for (i, aik) in a[k].iter().enumerate() {
                if !aik.is_zero() {
                    out[j][i] = out[j][i].add(&aik.mul(bkj));
                }
            }
        }
    }
    out
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    out
}

/// The q-character of the asymptotic module for a negative l-weight,
/// normalized by its highest l-weight: the sum over flipped-slot sets of
/// the product of inverse `A`-variables at the doubled family indices,
/// restricted to the region. Slot sets are enumerated from the
/// factorization's multiplicity pattern, grouped by family choice, and
/// the result is verified against the closed-form limit before being
/// returned.
pub fn qchar_t(psi: &LWeight, region: Region) -> Result<QCharSeries> {
    let fact = factor_negative(psi)?;
    // Families whose A-variable exponent 2r lies inside the region.
    let mut fams: Vec<(i64, u32)> = Vec::new();
    if let Some(top) = fact.top_slot() {
        let mut r = top;
        loop {
            let a_index = match r.checked_mul(2) {
                Some(x) => x,
                None => return Err(Error::Overflow("A-variable exponent".into())),
            };
            if a_index < region.rmin {
                break;
            }
            if a_index <= region.rmax {
                let a = fact.slot_multiplicity(r);
                if a > 0 {
                    fams.push((a_index, a));
                }
            }
            r -= 1;
        }
    }
    let mut out = QCharSeries::zero(region);
    let mut terms: u64 = 0;
    // Depth-first over per-family flip counts; each leaf contributes the
    // product of per-family binomial multiplicities.
    fn rec(
        fams: &[(i64, u32)],
        f: usize,
        left: u32,
        mono: &AMonomial,
        coeff: u128,
        out: &mut QCharSeries,
        terms: &mut u64,
    ) -> Result<()> {
        if f == fams.len() {
            *terms += 1;
            if *terms > QCHAR_ENUM_LIMIT {
                return Err(Error::LimitExceeded(format!(
                    "q-character enumeration exceeds {QCHAR_ENUM_LIMIT} terms"
                )));
            }
            let c = i64::try_from(coeff)
                .map_err(|_| Error::Overflow("q-character coefficient".into()))?;
            out.add_term(mono, c)?;
            return Ok(());
        }
        let (a_index, mult) = fams[f];
        for take in 0..=mult.min(left) {
            let mut m = mono.clone();
            if take > 0 {
                m.multiply(a_index, take)?;
            }
            let b = binomial_u128(u64::from(mult), u64::from(take));
            let c = coeff
                .checked_mul(b)
                .ok_or_else(|| Error::Overflow("q-character coefficient".into()))?;
            rec(fams, f + 1, left - take, &m, c, out, terms)?;
        }
        Ok(())
    }
    rec(&fams, 0, region.degcap, &AMonomial::one(), 1, &mut out, &mut terms)?;
    let closed = chi_infinity_of_factorization(&fact, region)?;
    if out != closed {
        return Err(Error::Inconsistency(
            "enumerated q-character differs from the closed-form limit".into(),
        ));
    }
    Ok(out)
}

/// Witness that the lowering generators have no limit on the infinite
/// tensor product: apply the degree-1 lowering generator to the pure
/// highest-weight vector of the section with `n + 1` factors of the
/// default chain (spectral exponents -1, -3, ..., -2n-1) and return the
/// coefficient of each single-flip state. The coefficient of flip `k` is
/// verified to be exactly `q^(-2k-1)` — nonzero for every `k`, so the
/// expansions do not stabilize as the section grows.
pub fn xminus_divergence_witness(n: u32) -> Result<Vec<QScalar>> {
    let p = n as usize + 1;
    let mut factors: Vec<EvalModule> = Vec::with_capacity(p);
    for j in 0..p {
        factors.push(make_eval_module_twisted(1, -1 - 2 * j as i64, -1)?);
    }
    let mut t = tensor_bounded(&factors, DEFAULT_DIM_BOUND)?;
    t.derive_drinfeld(1, 1)?;
    let mat = &t.cache().expect("derived above").xminus[1];
    let mut vin = vec![QScalar::zero(); t.dim()];
    vin[0] = QScalar::one();
    let out = mat.apply(&vin);
    let mut coeffs = Vec::with_capacity(p);
    for k in 0..p {
        let idx = 1usize << (p - 1 - k);
        let expected = QScalar::q_power(-2 * (k as i64) - 1);
        if out[idx] != expected {
            return Err(Error::Inconsistency(format!(
                "lowering coefficient on flip {k} is {}, expected {expected}",
                out[idx]
            )));
        }
        coeffs.push(out[idx].clone());
    }
    for (idx, c) in out.iter().enumerate() {
        if !c.is_zero() && !idx.is_power_of_two() {
            return Err(Error::Inconsistency(format!(
                "lowering action has support outside single flips at index {idx}"
            )));
        }
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedforms::{chi_infinity, prefund_limit_qchar};
    use crate::lweight::psi_of;
    use num_rational::BigRational;

    fn fundamental_ctx(slot_min: i64, depth: u32) -> TPsi {
        let psi = psi_of(0, -1).unwrap();
        TPsi::new(&psi, slot_min, depth, 12).unwrap()
    }

    fn pos(set: &[u64]) -> SubsetIndex {
        SubsetIndex::from_positions(set).unwrap()
    }

    fn qm() -> QLaurent {
        q_minus_q_inv()
    }

    #[test]
    fn worked_singleton_actions_match_contract() {
        let mut ctx = fundamental_ctx(-4, 4);
        let j0 = pos(&[0]);
        let j1 = pos(&[1]);

        // Loop-Cartan degree 1 on the flip at position 1.
        let h_v1 = ctx.act_h(1, &ctx.basis_state(&j1).unwrap()).unwrap();
        let diag = QScalar::fraction(QLaurent::monomial(-4, BigInt::from(1)), qm()).unwrap();
        let cross = QScalar::from_laurent(
            QLaurent::monomial(-3, BigInt::from(1)).sub(&QLaurent::monomial(1, BigInt::from(1))),
        );
        assert_eq!(h_v1.support_len(), 2);
        assert_eq!(h_v1.coeff(&j1), diag);
        assert_eq!(h_v1.coeff(&j0), cross);

        // Loop-Cartan degree 1 on the flip at position 0.
        let h_v0 = ctx.act_h(1, &ctx.basis_state(&j0).unwrap()).unwrap();
        let diag0 = QScalar::from_laurent(QLaurent::monomial(1, BigInt::from(-1)))
            .add(&QScalar::fraction(QLaurent::monomial(-2, BigInt::from(1)), qm()).unwrap());
        assert_eq!(h_v0.support_len(), 1);
        assert_eq!(h_v0.coeff(&j0), diag0);

        // Loop-Cartan degree 1 on the empty set: the pure tail scalar.
        let empty = SubsetIndex::empty();
        let h_ve = ctx.act_h(1, &ctx.basis_state(&empty).unwrap()).unwrap();
        let tail = QScalar::fraction(QLaurent::monomial(0, BigInt::from(1)), qm()).unwrap();
        assert_eq!(h_ve.support_len(), 1);
        assert_eq!(h_ve.coeff(&empty), tail);

        // Raising kills the highest-weight state and unflips a single flip.
        for m in 0..3 {
            assert!(ctx
                .act_xplus(m, &ctx.basis_state(&empty).unwrap())
                .unwrap()
                .is_zero());
        }
        let x_v0 = ctx.act_xplus(0, &ctx.basis_state(&j0).unwrap()).unwrap();
        assert_eq!(x_v0, ctx.basis_state(&empty).unwrap());
    }

    #[test]
    fn cartan_action_scales_by_flip_count() {
        let ctx = fundamental_ctx(-4, 4);
        let empty = ctx.basis_state(&SubsetIndex::empty()).unwrap();
        assert_eq!(ctx.act_k(&empty).unwrap(), empty);
        let j03 = pos(&[0, 3]);
        let v = ctx.basis_state(&j03).unwrap();
        assert_eq!(ctx.act_k(&v).unwrap(), v.scale(&QScalar::q_power(-4)));
        let j0 = ctx.basis_state(&pos(&[0])).unwrap();
        assert_eq!(ctx.act_k(&j0).unwrap(), j0.scale(&QScalar::q_power(-2)));
    }

    #[test]
    fn cartan_relation_with_raising() {
        // k (x+ v) = q^2 x+ (k v) on states of mixed flip count.
        let mut ctx = fundamental_ctx(-4, 4);
        let v = ctx
            .basis_state(&pos(&[0, 2]))
            .unwrap()
            .add(&ctx.basis_state(&pos(&[1])).unwrap().scale(&QScalar::q_power(3)))
            .unwrap();
        for m in 0..=2 {
            let xv = ctx.act_xplus(m, &v).unwrap();
            let lhs = ctx.act_k(&xv).unwrap();
            let kv = ctx.act_k(&v).unwrap();
            let rhs = ctx.act_xplus(m, &kv).unwrap().scale(&QScalar::q_power(2));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn weighted_cartan_action_requires_integral_weight() {
        let base = psi_of(0, -1).unwrap();
        let half = base
            .product(&LWeight::weight_factor(BigRational::new(1.into(), 2.into())))
            .unwrap();
        let ctx = TPsi::new(&half, -2, 2, 10).unwrap();
        let v = ctx.basis_state(&pos(&[0])).unwrap();
        assert!(matches!(
            ctx.act_k_weighted(&v),
            Err(Error::NonIntegralWeight(_))
        ));

        let three = base
            .product(&LWeight::weight_factor(BigRational::from_integer(3.into())))
            .unwrap();
        let ctx3 = TPsi::new(&three, -2, 2, 10).unwrap();
        let v3 = ctx3.basis_state(&pos(&[0])).unwrap();
        // q^(3 - 2).
        assert_eq!(
            ctx3.act_k_weighted(&v3).unwrap(),
            v3.scale(&QScalar::q_power(1))
        );
    }

    #[test]
    fn lweight_basis_fundamental_matches_examples() {
        let mut ctx = fundamental_ctx(-4, 2);
        let basis = ctx.lweight_basis(3).unwrap();
        let empty = SubsetIndex::empty();
        let j0 = pos(&[0]);
        let j1 = pos(&[1]);
        assert_eq!(basis[&empty], ctx.basis_state(&empty).unwrap());
        assert_eq!(basis[&j0], ctx.basis_state(&j0).unwrap());
        let w1 = ctx
            .basis_state(&j1)
            .unwrap()
            .sub(&ctx.basis_state(&j0).unwrap())
            .unwrap();
        assert_eq!(basis[&j1], w1);
        // The attached l-weight of the position-0 flip divides by the
        // A-variable at exponent 0.
        let lw = ctx.lweight_of(&j0).unwrap();
        let expected = ctx
            .psi()
            .product(&a_lweight(0).unwrap().inverse())
            .unwrap();
        assert_eq!(lw, expected);
    }

    #[test]
    fn eigenvalue_series_match_series_log_oracle() {
        // Independent oracle: the loop-Cartan eigenvalue of degree r on an
        // l-weight vector is the z^r coefficient of log(psi-series)
        // divided by (q - q^-1). Compute that log with the derivative
        // recursion on the exact series coefficients and compare both to
        // the closed form and to the measured diagonal of the action.
        let rmax = 4usize;
        let mut ctx = fundamental_ctx(-4, 2);
        for j in ctx.ambient_subsets().unwrap() {
            let lw = ctx.lweight_of(&j).unwrap().normalize();
            let u = lw.series_coeffs(rmax).unwrap();
            assert!(u[0].is_one());
            // l_n = u_n - (1/n) sum_{k<n} k l_k u_{n-k}
            let mut l: Vec<QScalar> = vec![QScalar::zero(); rmax + 1];
            for n in 1..=rmax {
                let mut acc = u[n].clone();
                for k in 1..n {
                    let kq = QScalar::from_int(k as i64);
                    acc = acc.sub(
                        &kq.mul(&l[k])
                            .mul(&u[n - k])
                            .mul(&QScalar::from_int(n as i64).inv().unwrap()),
                    );
                }
                l[n] = acc;
            }
            let qminus = QScalar::from_laurent(qm());
            for r in 1..=rmax {
                let expected = l[r].mul(&qminus.inv().unwrap());
                assert_eq!(lw.h_eigenvalue(r as u32).unwrap(), expected);
                let measured = ctx.act_h_at(r as u32, &j, 0).unwrap().coeff(&j);
                assert_eq!(measured, expected);
            }
        }
    }

    #[test]
    fn truncated_actions_stable_under_extra_factor() {
        let mut ctx = fundamental_ctx(-3, 3);
        for j in ctx.ambient_subsets().unwrap() {
            ctx.coproduct_stability_check(&j, 2, 2).unwrap();
        }
    }

    #[test]
    fn triangularity_report_is_clean() {
        let mut ctx = fundamental_ctx(-3, 2);
        let report = ctx.triangularity_report(3).unwrap();
        assert_eq!(report.states_checked, 1 + 4 + 6);
        assert_eq!(report.actions_checked, 11 * 3);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn repeated_slot_families_give_generalized_basis() {
        // Two inverse-prefundamental factors at the same exponent: every
        // slot family doubles, l-weights repeat, and the basis is only
        // generalized where classes repeat.
        let psi = psi_of(0, -1).unwrap().power(2).unwrap();
        let mut ctx = TPsi::new(&psi, -1, 2, 12).unwrap();
        assert_eq!(ctx.window_slots(), &[(0, 1), (0, 2), (-1, 1), (-1, 2)]);
        let basis = ctx.lweight_basis(3).unwrap();
        assert_eq!(basis.len(), 1 + 4 + 6);

        let s01 = SubsetIndex::from_pairs(&[(0, 1)]).unwrap();
        let s02 = SubsetIndex::from_pairs(&[(0, 2)]).unwrap();
        // Same-class members keep unit form: the second slot's vector is
        // its own basis state, annihilated only by the square.
        assert_eq!(basis[&s02], ctx.basis_state(&s02).unwrap());
        let lam = ctx.lweight_of(&s02).unwrap().h_eigenvalue(1).unwrap();
        let w = &basis[&s02];
        let u = ctx.act_h(1, w).unwrap().sub(&w.scale(&lam)).unwrap();
        assert_eq!(u.support_len(), 1);
        assert!(!u.coeff(&s01).is_zero());
        let uu = ctx.act_h(1, &u).unwrap().sub(&u.scale(&lam)).unwrap();
        assert!(uu.is_zero());

        // The l-weight multiset matches the enumerated q-character.
        let region = Region::new(-2, 0, 2).unwrap();
        let qc = qchar_t(&psi, region).unwrap();
        let mut counts: BTreeMap<AMonomial, i64> = BTreeMap::new();
        for j in basis.keys() {
            *counts.entry(ctx.a_monomial_of(j).unwrap()).or_insert(0) += 1;
        }
        for (m, c) in qc.terms() {
            assert_eq!(counts.get(m), Some(c), "multiplicity of {m}");
        }
        assert_eq!(counts.len(), qc.num_terms());
    }

    #[test]
    fn qchar_enumeration_matches_closed_form() {
        let region = Region::new(-8, 0, 3).unwrap();
        let psi = psi_of(0, -1).unwrap();
        let qc = qchar_t(&psi, region).unwrap();
        assert_eq!(qc, prefund_limit_qchar(0, region).unwrap());
        assert_eq!(qc, chi_infinity(&psi, region).unwrap());

        // A doubled factor puts coefficient 2 on the single flip.
        let psi2 = psi.power(2).unwrap();
        let qc2 = qchar_t(&psi2, region).unwrap();
        let a0 = AMonomial::single(0, 1).unwrap();
        assert_eq!(qc2.coefficient_a(&a0).unwrap(), 2);

        // Mixed Y-factor and inverse-prefundamental factor.
        let mixed = crate::lweight::y_of(-1)
            .unwrap()
            .product(&psi_of(-2, -1).unwrap())
            .unwrap();
        let qcm = qchar_t(&mixed, region).unwrap();
        assert_eq!(qcm, chi_infinity(&mixed, region).unwrap());
    }

    #[test]
    fn divergence_witness_lists_descending_odd_powers() {
        for n in [1u32, 3] {
            let w = xminus_divergence_witness(n).unwrap();
            assert_eq!(w.len(), n as usize + 1);
            for (k, c) in w.iter().enumerate() {
                assert_eq!(*c, QScalar::q_power(-2 * k as i64 - 1));
                assert!(!c.is_zero());
            }
        }
    }

    #[test]
    fn truncation_violations_are_hard_errors() {
        let mut ctx = fundamental_ctx(-2, 1);
        // Deeper than the ambient depth.
        let deep = pos(&[0, 1]);
        assert!(matches!(
            ctx.basis_state(&deep),
            Err(Error::Truncation(_))
        ));
        // Outside the window.
        let far = pos(&[5]);
        assert!(matches!(ctx.basis_state(&far), Err(Error::Truncation(_))));
        // A section larger than the dimension budget.
        let psi = psi_of(0, -1).unwrap();
        let mut tiny = TPsi::new(&psi, -6, 1, 2).unwrap();
        let j = pos(&[4]);
        assert!(matches!(
            tiny.act_h(1, &tiny.basis_state(&j).unwrap()),
            Err(Error::DimensionBound { .. })
        ));
        // States from another highest l-weight are rejected.
        let other = TPsi::new(&psi_of(2, -1).unwrap(), -4, 2, 10).unwrap();
        let foreign = other.basis_state(&pos(&[0])).unwrap();
        assert!(matches!(
            ctx.act_h(1, &foreign),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn change_of_basis_dump_has_unit_diagonal() {
        let mut ctx = fundamental_ctx(-3, 2);
        let basis = ctx.lweight_basis(3).unwrap();
        let blocks = change_of_basis_blocks(&basis);
        assert_eq!(blocks.len(), 3);
        for b in &blocks {
            let n = b.members.len();
            for i in 0..n {
                assert_eq!(b.matrix[i][i], "1");
                for k in 0..i {
                    assert_eq!(b.matrix[i][k], "0", "upper corner must vanish");
                }
            }
        }
    }
}
