//! Exact scalars: integer Laurent polynomials in `q` and their fractions.
//!
//! All symbolic computation in this crate happens over the field Q(q),
//! represented exactly:
//!
//! - [`QLaurent`]: a Laurent polynomial in `q` with arbitrary-precision
//!   integer coefficients, stored sparsely as exponent -> coefficient.
//! - [`QScalar`]: a fraction of two [`QLaurent`] values kept in a canonical
//!   form, so equality of scalars is structural equality.
//! - [`q_int`] / [`q_factorial`]: symmetric quantum integers and factorials.
//!
//! Canonical form of a fraction: numerator and denominator are coprime as
//! polynomials, the denominator has lowest exponent zero and a positive
//! lowest coefficient, and the integer contents of numerator and denominator
//! are coprime. Zero is `0/1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sparse Laurent polynomial in `q` over the integers.
///
/// Invariant: no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QLaurent {
    coeffs: BTreeMap<i64, BigInt>,
}

impl QLaurent {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Constant polynomial.
    pub fn from_int(n: i64) -> Self {
        Self::monomial(0, BigInt::from(n))
    }

    /// The monomial `c * q^exp`.
    pub fn monomial(exp: i64, c: BigInt) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        Self { coeffs }
    }

    /// The monomial `q^exp`.
    pub fn q_power(exp: i64) -> Self {
        Self::monomial(exp, BigInt::one())
    }

    /// True if this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True if this is the constant 1.
    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
            && self
                .coeffs
                .get(&0)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// Coefficient of `q^exp` (zero if absent).
    pub fn coeff(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Iterate `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.coeffs.iter()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    fn insert_add(&mut self, exp: i64, val: BigInt) {
        if val.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(BigInt::zero);
        *entry += val;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    /// Sum of two polynomials.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.insert_add(*e, c.clone());
        }
        out
    }

    /// Difference of two polynomials.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.insert_add(*e, -c.clone());
        }
        out
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect();
        Self { coeffs }
    }

    /// Product of two polynomials (sparse convolution).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                out.insert_add(ea + eb, ca * cb);
            }
        }
        out
    }

    /// Multiply by `q^k`.
    pub fn shifted(&self, k: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect();
        Self { coeffs }
    }

    /// Positive gcd of all coefficients (zero polynomial has content 0).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            g = g.gcd(c);
        }
        g
    }

    /// Evaluate at an exact rational `q0` (nonzero).
    pub fn eval(&self, q0: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.coeffs {
            acc += BigRational::from(c.clone()) * rational_pow(q0, *e);
        }
        acc
    }

    /// Dense form: `(min_exp, ascending coefficients)`. Zero gives `(0, [])`.
    fn dense(&self) -> (i64, Vec<BigInt>) {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => {
                let mut v = vec![BigInt::zero(); (hi - lo) as usize + 1];
                for (e, c) in &self.coeffs {
                    v[(e - lo) as usize] = c.clone();
                }
                (lo, v)
            }
            _ => (0, Vec::new()),
        }
    }

    fn from_dense(min_exp: i64, v: &[BigInt]) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                coeffs.insert(min_exp + i as i64, c.clone());
            }
        }
        Self { coeffs }
    }
}

fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mut acc = BigRational::one();
    let b = if exp > 0 {
        base.clone()
    } else {
        base.recip()
    };
    for _ in 0..exp.unsigned_abs() {
        acc *= &b;
    }
    acc
}

/// Strip trailing zeros so the last entry is the leading coefficient.
fn trim(v: &mut Vec<BigInt>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

/// Divide by content and make the leading coefficient positive.
fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut v);
    if v.is_empty() {
        return v;
    }
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
    }
    if v.last().unwrap().is_negative() {
        g = -g;
    }
    for c in &mut v {
        *c /= &g;
    }
    v
}

/// Pseudo-remainder of `a` by `b` (`b` nonempty).
fn pseudo_rem(mut a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    trim(&mut a);
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while a.len() >= b.len() && !a.is_empty() {
        let da = a.len() - 1;
        let la = a.last().unwrap().clone();
        // a := lb*a - la*q^(da-db)*b
        for c in &mut a {
            *c *= &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            let idx = da - db + i;
            let t = &la * bc;
            a[idx] -= t;
        }
        trim(&mut a);
    }
    a
}

/// Primitive polynomial gcd (positive leading coefficient).
fn poly_gcd(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    let mut a = primitive(a);
    let mut b = primitive(b);
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = pseudo_rem(a.clone(), &b);
        a = b;
        b = primitive(r);
    }
    a
}

/// Exact polynomial division; panics if the division is not exact.
fn poly_div_exact(mut n: Vec<BigInt>, d: &[BigInt]) -> Vec<BigInt> {
    trim(&mut n);
    if n.is_empty() {
        return n;
    }
    assert!(!d.is_empty(), "division by zero polynomial");
    let ld = d.last().unwrap();
    assert!(n.len() >= d.len(), "inexact polynomial division");
    let mut quot = vec![BigInt::zero(); n.len() - d.len() + 1];
    while n.len() >= d.len() && !n.is_empty() {
        let (qc, rem) = n.last().unwrap().div_rem(ld);
        assert!(rem.is_zero(), "inexact polynomial division");
        let pos = n.len() - d.len();
        quot[pos] = qc.clone();
        for (i, dc) in d.iter().enumerate() {
            let t = &qc * dc;
            n[pos + i] -= t;
        }
        trim(&mut n);
    }
    assert!(n.is_empty(), "inexact polynomial division");
    quot
}

/// Element of Q(q) in canonical fraction form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QScalar {
    num: QLaurent,
    den: QLaurent,
}

impl Default for QScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl QScalar {
    /// Zero.
    pub fn zero() -> Self {
        Self {
            num: QLaurent::zero(),
            den: QLaurent::one(),
        }
    }

    /// One.
    pub fn one() -> Self {
        Self::from_laurent(QLaurent::one())
    }

    /// Integer constant.
    pub fn from_int(n: i64) -> Self {
        Self::from_laurent(QLaurent::from_int(n))
    }

    /// Promote a Laurent polynomial.
    pub fn from_laurent(num: QLaurent) -> Self {
        Self {
            num,
            den: QLaurent::one(),
        }
    }

    /// The monomial `q^exp`.
    pub fn q_power(exp: i64) -> Self {
        Self::from_laurent(QLaurent::q_power(exp))
    }

    /// The quantum integer `[m]_q` as a scalar.
    pub fn q_int(m: i64) -> Self {
        Self::from_laurent(q_int(m))
    }

    /// Build `num/den` in canonical form.
    pub fn fraction(num: QLaurent, den: QLaurent) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut s = Self { num, den };
        s.canonicalize();
        Ok(s)
    }

    /// Numerator of the canonical form.
    pub fn numerator(&self) -> &QLaurent {
        &self.num
    }

    /// Denominator of the canonical form.
    pub fn denominator(&self) -> &QLaurent {
        &self.den
    }

    /// True if zero.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True if one.
    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = QLaurent::one();
            return;
        }
        let (en, mut vn) = self.num.dense();
        let (ed, mut vd) = self.den.dense();
        let g = poly_gcd(vn.clone(), vd.clone());
        if g.len() > 1 {
            vn = poly_div_exact(vn, &g);
            vd = poly_div_exact(vd, &g);
        }
        // Monomial shift: denominator lowest exponent becomes 0.
        // First strip leading zeros of the dense vectors (q-power factors).
        let shift_n = vn.iter().position(|c| !c.is_zero()).unwrap_or(0);
        let shift_d = vd.iter().position(|c| !c.is_zero()).unwrap_or(0);
        let num_min = en + shift_n as i64;
        let den_min = ed + shift_d as i64;
        let mut num = QLaurent::from_dense(num_min - den_min, &vn[shift_n..]);
        let mut den = QLaurent::from_dense(0, &vd[shift_d..]);
        // Sign: denominator lowest coefficient positive.
        if den.coeffs.values().next().unwrap().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        // Integer content across the fraction.
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            for v in num.coeffs.values_mut() {
                *v /= &c;
            }
            for v in den.coeffs.values_mut() {
                *v /= &c;
            }
        }
        self.num = num;
        self.den = den;
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        let mut s = Self { num, den };
        s.canonicalize();
        s
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut s = Self {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        };
        s.canonicalize();
        s
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut s = Self {
            num: self.den.clone(),
            den: self.num.clone(),
        };
        s.canonicalize();
        Ok(s)
    }

    /// Quotient.
    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power (negative exponents invert).
    pub fn pow(&self, exp: i32) -> Result<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..exp.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Evaluate at an exact rational `q0` outside `{0, 1, -1}`.
    ///
    /// Fails at poles of the denominator.
    pub fn specialize(&self, q0: &BigRational) -> Result<BigRational> {
        if q0.is_zero() || q0.abs().is_one() {
            return Err(Error::Specialize(format!(
                "q0 = {} is in the excluded set {{0, 1, -1}}",
                q0
            )));
        }
        let d = self.den.eval(q0);
        if d.is_zero() {
            return Err(Error::Specialize(format!(
                "denominator {} vanishes at q0 = {}",
                self.den, q0
            )));
        }
        Ok(self.num.eval(q0) / d)
    }
}

/// Symmetric quantum integer `[m]_q = (q^m - q^-m)/(q - q^-1)`.
///
/// `[0]_q = 0`, `[-m]_q = -[m]_q`.
pub fn q_int(m: i64) -> QLaurent {
    let mut out = QLaurent::zero();
    let a = m.abs();
    let mut e = a - 1;
    while e >= -(a - 1) && a > 0 {
        out.insert_add(e, BigInt::one());
        e -= 2;
    }
    if m < 0 {
        out.neg()
    } else {
        out
    }
}

/// Quantum factorial `[m]_q! = [m]_q [m-1]_q ... [1]_q`.
pub fn q_factorial(m: u32) -> QLaurent {
    let mut acc = QLaurent::one();
    for j in 1..=m {
        acc = acc.mul(&q_int(j as i64));
    }
    acc
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let show_coeff = !mag.is_one() || *e == 0;
            if show_coeff {
                write!(f, "{}", mag)?;
            }
            if *e != 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                if *e == 1 {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Serialize for QLaurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(i64, String)> = self
            .coeffs
            .iter()
            .map(|(e, c)| (*e, c.to_string()))
            .collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QLaurent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(i64, String)>::deserialize(deserializer)?;
        let mut out = QLaurent::zero();
        for (e, c) in pairs {
            let c = BigInt::from_str(&c).map_err(D::Error::custom)?;
            if out.coeffs.contains_key(&e) {
                return Err(D::Error::custom(format!("duplicate exponent {}", e)));
            }
            out.insert_add(e, c);
        }
        Ok(out)
    }
}

impl Serialize for QScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("QScalar", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for QScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: QLaurent,
            den: QLaurent,
        }
        let raw = Raw::deserialize(deserializer)?;
        QScalar::fraction(raw.num, raw.den).map_err(D::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inherent:ident) => {
        impl std::ops::$trait for &QScalar {
            type Output = QScalar;
            fn $method(self, rhs: &QScalar) -> QScalar {
                self.$inherent(rhs)
            }
        }
        impl std::ops::$trait for QScalar {
            type Output = QScalar;
            fn $method(self, rhs: QScalar) -> QScalar {
                (&self).$inherent(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar::neg(self)
    }
}
