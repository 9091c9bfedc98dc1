//! Exact arithmetic in the rational function field ℚ(z), where z = q^(1/2).
//!
//! Every scalar in the crate (matrix entries, Fock coefficients, evaluated
//! coefficient functions) is a [`QScalar`]. Working in z instead of q means
//! half-integer powers of q are plain monomials, so no fractional exponents
//! ever appear.
//!
//! A [`QScalar`] is kept in a canonical reduced form
//! `z^offset * num(z) / den(z)` where `num` and `den` are coprime true
//! polynomials, `num(0) != 0` (unless the scalar is zero), `den(0) != 0` and
//! `den` is monic. Two scalars are equal exactly when their canonical forms
//! are identical, which makes structural equality and hashing sound.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Errors raised by scalar evaluation and parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QFieldError {
    /// The reduced denominator vanishes at the requested evaluation point.
    #[error("singular evaluation: denominator vanishes at z = {point}")]
    SingularEvaluation { point: String },
    /// A numeric q was requested that is not the square of a rational.
    #[error("q = {0} is not the square of a rational number, so z = q^(1/2) is not rational")]
    NotASquare(String),
    /// Malformed scalar or half-integer text.
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

// ---------------------------------------------------------------------------
// Half-integers
// ---------------------------------------------------------------------------

/// An exact half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    /// The half-integer `twice / 2`.
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    /// The integer `n` viewed as a half-integer.
    pub const fn from_int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    /// Twice the value (always an integer).
    pub const fn twice(self) -> i64 {
        self.twice
    }

    /// True when the value is an integer.
    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The value as an integer, if it is one.
    pub fn to_int(self) -> Option<i64> {
        self.is_integer().then_some(self.twice / 2)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = QFieldError;

    /// Accepts `"3/2"`, `"-1"`, `"0"` and any `a/b` whose value is a multiple of 1/2.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = |message: String| QFieldError::Parse { column: 1, message };
        let (a, b) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let a: i64 = a
            .parse()
            .map_err(|_| bad(format!("`{t}` is not a half-integer")))?;
        let b: i64 = b
            .parse()
            .map_err(|_| bad(format!("`{t}` is not a half-integer")))?;
        if b == 0 || (2 * a) % b != 0 {
            return Err(bad(format!("`{t}` is not a multiple of 1/2")));
        }
        Ok(HalfInt::from_twice(2 * a / b))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials over ℚ
// ---------------------------------------------------------------------------

/// Dense polynomial in z with rational coefficients, lowest degree first.
/// The coefficient vector never has a trailing zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Poly(Vec<BigRational>);

impl Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }

    fn constant(c: BigRational) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree; the zero polynomial reports 0 and callers check `is_zero` first.
    fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lc(&self) -> &BigRational {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    /// Number of vanishing low-order coefficients (the z-adic valuation).
    fn valuation(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divide by z^k, assuming the k lowest coefficients vanish.
    fn shift_down(&mut self, k: usize) {
        self.0.drain(..k);
    }

    /// Multiply by z^k.
    fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut v = vec![BigRational::zero(); k];
        v.extend(self.0.iter().cloned());
        Poly(v)
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.0.get(i), other.0.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            v.push(c);
        }
        let mut p = Poly(v);
        p.trim();
        p
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        let mut p = Poly(v);
        p.trim();
        p
    }

    fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: returns (quotient, remainder).
    fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.0.len() < d.0.len() {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.0.clone();
        let dl = d.0.len();
        let inv_lc = d.lc().recip();
        let mut quo = vec![BigRational::zero(); r.len() - dl + 1];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dl - 1] * &inv_lc;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                if !dj.is_zero() {
                    r[k + j] -= &c * dj;
                }
            }
            quo[k] = c;
        }
        r.truncate(dl - 1);
        let mut q = Poly(quo);
        q.trim();
        let mut rem = Poly(r);
        rem.trim();
        (q, rem)
    }

    fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    /// Monic greatest common divisor.
    fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// QScalar
// ---------------------------------------------------------------------------

/// An exact element of ℚ(z) in canonical reduced form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QScalar {
    offset: i64,
    num: Poly,
    den: Poly,
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QScalar {
    /// The zero scalar.
    pub fn zero() -> Self {
        QScalar {
            offset: 0,
            num: Poly::zero(),
            den: Poly::constant(BigRational::one()),
        }
    }

    /// The unit scalar.
    pub fn one() -> Self {
        QScalar::from_int(1)
    }

    /// An integer constant.
    pub fn from_int(n: i64) -> Self {
        QScalar::from_rational(rat(n))
    }

    /// A rational constant.
    pub fn from_rational(c: BigRational) -> Self {
        QScalar {
            offset: 0,
            num: Poly::constant(c),
            den: Poly::constant(BigRational::one()),
        }
    }

    /// The monomial c·z^k.
    pub fn monomial(c: BigRational, k: i64) -> Self {
        if c.is_zero() {
            return QScalar::zero();
        }
        QScalar {
            offset: k,
            num: Poly(vec![c]),
            den: Poly::constant(BigRational::one()),
        }
    }

    /// z^k.
    pub fn z_pow(k: i64) -> Self {
        QScalar::monomial(BigRational::one(), k)
    }

    /// The generator z = q^(1/2).
    pub fn z() -> Self {
        QScalar::z_pow(1)
    }

    /// The deformation parameter q = z².
    pub fn q() -> Self {
        QScalar::z_pow(2)
    }

    /// Build a scalar from a Laurent numerator `z^noff * num` over a Laurent
    /// denominator `z^doff * den` and bring it to canonical form.
    fn reduce(mut offset: i64, mut num: Poly, mut den: Poly) -> Self {
        assert!(!den.is_zero(), "QScalar with zero denominator");
        num.trim();
        if num.is_zero() {
            return QScalar::zero();
        }
        let v = num.valuation();
        num.shift_down(v);
        offset += v as i64;
        let v = den.valuation();
        den.shift_down(v);
        offset -= v as i64;
        if den.deg() > 0 && num.deg() > 0 {
            let g = num.gcd(&den);
            if g.deg() > 0 {
                num = num.divrem(&g).0;
                den = den.divrem(&g).0;
            }
        }
        if !den.lc().is_one() {
            let inv = den.lc().recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        QScalar { offset, num, den }
    }

    /// Canonicalize when num and den are already known to be coprime.
    fn reduce_coprime(mut offset: i64, mut num: Poly, mut den: Poly) -> Self {
        num.trim();
        if num.is_zero() {
            return QScalar::zero();
        }
        let v = num.valuation();
        num.shift_down(v);
        offset += v as i64;
        let v = den.valuation();
        den.shift_down(v);
        offset -= v as i64;
        if !den.lc().is_one() {
            let inv = den.lc().recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        QScalar { offset, num, den }
    }

    /// True for the zero scalar.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True for the unit scalar.
    pub fn is_one(&self) -> bool {
        self.offset == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True when the denominator is 1, i.e. the scalar is a Laurent polynomial in z.
    pub fn is_laurent_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The rational value if the scalar is a constant.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        (self.offset == 0 && self.num.0.len() == 1 && self.den.is_one())
            .then(|| self.num.0[0].clone())
    }

    /// Multiplicative inverse, or `None` for zero.
    pub fn inv(&self) -> Option<QScalar> {
        if self.is_zero() {
            return None;
        }
        Some(QScalar::reduce(-self.offset, self.den.clone(), self.num.clone()))
    }

    /// Exact division, or `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &QScalar) -> Option<QScalar> {
        rhs.inv().map(|r| self * &r)
    }

    /// Integer power; negative exponents invert. Panics on 0^negative.
    pub fn pow(&self, e: i64) -> QScalar {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut acc = QScalar::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    /// Evaluate at z = z0.
    pub fn eval_at_z(&self, z0: &BigRational) -> Result<BigRational, QFieldError> {
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        let singular = || QFieldError::SingularEvaluation {
            point: z0.to_string(),
        };
        let d = self.den.eval(z0);
        if d.is_zero() || (z0.is_zero() && self.offset < 0) {
            return Err(singular());
        }
        let zp = if z0.is_zero() {
            if self.offset == 0 {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        } else {
            let e = i32::try_from(self.offset).expect("z exponent out of range");
            z0.pow(e)
        };
        Ok(zp * self.num.eval(z0) / d)
    }

    /// Evaluate at numeric q = q0, using the positive root z0 = sqrt(q0).
    ///
    /// q0 must be a nonzero square of a rational; q0 = 1 maps to z0 = 1.
    pub fn eval_at(&self, q0: &BigRational) -> Result<BigRational, QFieldError> {
        let z0 = rational_sqrt(q0).ok_or_else(|| QFieldError::NotASquare(q0.to_string()))?;
        self.eval_at_z(&z0)
    }

    /// Terms of the numerator as (exponent, coefficient), descending exponent.
    fn num_terms(&self) -> Vec<(i64, &BigRational)> {
        let mut v: Vec<_> = self
            .num
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.offset + i as i64, c))
            .collect();
        v.reverse();
        v
    }

    fn den_terms(&self) -> Vec<(i64, &BigRational)> {
        let mut v: Vec<_> = self
            .den
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64, c))
            .collect();
        v.reverse();
        v
    }
}

/// Positive rational square root, if `x` is a positive square.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if !x.is_positive() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// The q-number [n]_q = (q^n − q^(−n))/(q − q^(−1)), stored as the Laurent
/// polynomial z^(2(n−1)) + z^(2(n−3)) + … + z^(2(1−n)).
pub fn qint(n: i64) -> QScalar {
    match n.cmp(&0) {
        Ordering::Equal => QScalar::zero(),
        Ordering::Less => -qint(-n),
        Ordering::Greater => {
            let len = (4 * (n - 1) + 1) as usize;
            let mut v = vec![BigRational::zero(); len];
            for i in (0..len).step_by(4) {
                v[i] = BigRational::one();
            }
            QScalar {
                offset: 2 * (1 - n),
                num: Poly(v),
                den: Poly::constant(BigRational::one()),
            }
        }
    }
}

/// q^k for a half-integer k, i.e. z^(2k).
pub fn qpow(k: HalfInt) -> QScalar {
    QScalar::z_pow(k.twice())
}

/// The q-factorial [1]_q [2]_q … [n]_q; 1 for n = 0.
pub fn qfact(n: u32) -> QScalar {
    (1..=i64::from(n)).fold(QScalar::one(), |acc, k| &acc * &qint(k))
}

// ---------------------------------------------------------------------------
// Arithmetic traits
// ---------------------------------------------------------------------------

impl Add<&QScalar> for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let m = self.offset.min(rhs.offset);
        let a = (self.offset - m) as usize;
        let b = (rhs.offset - m) as usize;
        if self.den == rhs.den {
            let num = self.num.shift_up(a).add(&rhs.num.shift_up(b));
            return QScalar::reduce(m, num, self.den.clone());
        }
        // Henrici: with g = gcd(d1, d2) the sum n1/d1 + n2/d2 equals
        // t / (d1' d2' g) with t = n1 d2' + n2 d1', and only g can share
        // factors with t.
        let g = if self.den.is_one() || rhs.den.is_one() {
            None
        } else {
            Some(self.den.gcd(&rhs.den)).filter(|g| g.deg() > 0)
        };
        match g {
            None => {
                let t = self.num.mul(&rhs.den).shift_up(a).add(&rhs.num.mul(&self.den).shift_up(b));
                QScalar::reduce_coprime(m, t, self.den.mul(&rhs.den))
            }
            Some(g) => {
                let d1 = self.den.divrem(&g).0;
                let d2 = rhs.den.divrem(&g).0;
                let t = self.num.mul(&d2).shift_up(a).add(&rhs.num.mul(&d1).shift_up(b));
                if t.is_zero() {
                    return QScalar::zero();
                }
                let h = t.gcd(&g);
                let (t, g) = if h.deg() > 0 {
                    (t.divrem(&h).0, g.divrem(&h).0)
                } else {
                    (t, g)
                };
                QScalar::reduce_coprime(m, t, d1.mul(&d2).mul(&g))
            }
        }
    }
}

impl Mul<&QScalar> for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() || rhs.is_zero() {
            return QScalar::zero();
        }
        let offset = self.offset + rhs.offset;
        if self.den.is_one() && rhs.den.is_one() {
            // Product of polynomials with nonzero constant terms keeps a
            // nonzero constant term, so the result is already canonical.
            return QScalar {
                offset,
                num: self.num.mul(&rhs.num),
                den: rhs.den.clone(),
            };
        }
        // Cross-cancel before multiplying so the gcds stay small.
        let cancel = |n: &Poly, d: &Poly| -> (Poly, Poly) {
            if d.is_one() || n.deg() == 0 || d.deg() == 0 {
                return (n.clone(), d.clone());
            }
            let g = n.gcd(d);
            if g.deg() == 0 {
                (n.clone(), d.clone())
            } else {
                (n.divrem(&g).0, d.divrem(&g).0)
            }
        };
        let (n1, d2) = cancel(&self.num, &rhs.den);
        let (n2, d1) = cancel(&rhs.num, &self.den);
        let mut num = n1.mul(&n2);
        let mut den = d1.mul(&d2);
        if !den.lc().is_one() {
            let inv = den.lc().recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        QScalar { offset, num, den }
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar {
            offset: self.offset,
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl Sub<&QScalar> for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        self + &(-rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: QScalar) -> QScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: &QScalar) -> QScalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<QScalar> for &QScalar {
            type Output = QScalar;
            fn $m(self, rhs: QScalar) -> QScalar {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, rhs: &QScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, rhs: &QScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, rhs: &QScalar) {
        *self = &*self * rhs;
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::from_int(n)
    }
}

// ---------------------------------------------------------------------------
// Canonical text form
// ---------------------------------------------------------------------------

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(i64, &BigRational)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (i, (k, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        let mag = c.abs();
        if *k == 0 {
            write!(f, "{mag}")?;
        } else if mag.is_one() {
            write!(f, "z^{k}")?;
        } else {
            write!(f, "{mag}*z^{k}")?;
        }
    }
    Ok(())
}

impl fmt::Display for QScalar {
    /// Canonical form, e.g. `(z^2 + z^-2)/(1)`; parsing it back is lossless.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        write_terms(f, &self.num_terms())?;
        write!(f, ")/(")?;
        write_terms(f, &self.den_terms())?;
        write!(f, ")")
    }
}

struct ScalarParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ScalarParser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, QFieldError> {
        Err(QFieldError::Parse {
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), QFieldError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn digits(&mut self) -> Result<BigInt, QFieldError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(txt.parse().expect("digit run parses"))
    }

    fn exponent(&mut self) -> Result<i64, QFieldError> {
        // After `z`: optional `^` followed by a signed integer.
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let d = self.digits()?;
        let k: i64 = match i64::try_from(d) {
            Ok(k) => k,
            Err(_) => return self.err("exponent out of range"),
        };
        Ok(if neg { -k } else { k })
    }

    /// One term: `c`, `c*z^k`, `z^k` or `z`, without its sign.
    fn term(&mut self) -> Result<(i64, BigRational), QFieldError> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                Ok((self.exponent()?, BigRational::one()))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits()?;
                let d = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.digits()?;
                    if d.is_zero() {
                        return self.err("zero denominator in coefficient");
                    }
                    d
                } else {
                    BigInt::one()
                };
                let c = BigRational::new(n, d);
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    if self.peek() != Some(b'z') {
                        return self.err("expected `z` after `*`");
                    }
                    self.pos += 1;
                    Ok((self.exponent()?, c))
                } else {
                    Ok((0, c))
                }
            }
            _ => self.err("expected a term"),
        }
    }

    /// A parenthesised signed sum of terms, as a map exponent -> coefficient.
    fn laurent(&mut self) -> Result<BTreeMap<i64, BigRational>, QFieldError> {
        self.expect(b'(')?;
        let mut out: BTreeMap<i64, BigRational> = BTreeMap::new();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b')') if !first => break,
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(b'+') if !first => {
                    self.pos += 1;
                    1
                }
                _ if first => 1,
                _ => return self.err("expected `+`, `-` or `)`"),
            };
            let (k, c) = self.term()?;
            *out.entry(k).or_insert_with(BigRational::zero) += c * rat(sign);
            first = false;
        }
        self.expect(b')')?;
        Ok(out)
    }
}

fn laurent_to_parts(m: &BTreeMap<i64, BigRational>) -> (i64, Poly) {
    let lo = m.keys().next().copied().unwrap_or(0);
    let hi = m.keys().next_back().copied().unwrap_or(0);
    let mut v = vec![BigRational::zero(); (hi - lo + 1) as usize];
    for (k, c) in m {
        v[(k - lo) as usize] += c;
    }
    let mut p = Poly(v);
    p.trim();
    (lo, p)
}

impl FromStr for QScalar {
    type Err = QFieldError;

    /// Parses `(num)/(den)` where each side is a sum of `c*z^k` terms.
    /// Non-canonical input is accepted and reduced.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = ScalarParser {
            s: s.as_bytes(),
            pos: 0,
        };
        let num = p.laurent()?;
        p.expect(b'/')?;
        let den = p.laurent()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        let (noff, np) = laurent_to_parts(&num);
        let (doff, dp) = laurent_to_parts(&den);
        if dp.is_zero() {
            return Err(QFieldError::Parse {
                column: s.len(),
                message: "denominator is zero".into(),
            });
        }
        Ok(QScalar::reduce(noff - doff, np, dp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn qint_small_values() {
        assert!(qint(0).is_zero());
        assert_eq!(qint(2), QScalar::z_pow(2) + QScalar::z_pow(-2));
        assert_eq!(qint(-1), QScalar::from_int(-1));
        let q = QScalar::q();
        let qi = q.inv().unwrap();
        let quotient = (&q.pow(3) - &qi.pow(3)).checked_div(&(&q - &qi)).unwrap();
        assert_eq!(qint(3), quotient);
    }

    #[test]
    fn qpow_examples() {
        assert!(qpow(HalfInt::from_int(0)).is_one());
        assert_eq!(qpow(HalfInt::from_twice(1)), QScalar::z());
        assert_eq!(qpow(HalfInt::from_int(-2)), QScalar::z_pow(-4));
    }

    #[test]
    fn qfact_examples() {
        assert!(qfact(0).is_one());
        assert_eq!(qfact(2), qint(2));
        assert_eq!(qfact(3), &qint(2) * &qint(3));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(qint(2).eval_at(&r(1, 1)).unwrap(), r(2, 1));
        assert_eq!(qint(3).eval_at(&r(4, 1)).unwrap(), r(273, 16));
        let pole = QScalar::one()
            .checked_div(&(&QScalar::z() - &QScalar::one()))
            .unwrap();
        assert!(matches!(
            pole.eval_at_z(&r(1, 1)),
            Err(QFieldError::SingularEvaluation { .. })
        ));
        assert!(matches!(
            qint(2).eval_at(&r(2, 1)),
            Err(QFieldError::NotASquare(_))
        ));
    }

    #[test]
    fn canonical_string_form() {
        assert_eq!(qint(2).to_string(), "(z^2 + z^-2)/(1)");
        assert_eq!(QScalar::zero().to_string(), "(0)/(1)");
        let x = QScalar::from_rational(r(-3, 2))
            .checked_div(&(&QScalar::q() + &QScalar::one()))
            .unwrap();
        assert_eq!(x.to_string(), "(-3/2)/(z^2 + 1)");
        assert_eq!("(-3/2)/(z^2 + 1)".parse::<QScalar>().unwrap(), x);
    }

    #[test]
    fn parse_reduces_noncanonical_input() {
        let x: QScalar = "(z^2 - 1)/(2*z^2 - 2*z^1)".parse().unwrap();
        let expect = (&QScalar::z() + &QScalar::one())
            .checked_div(&QScalar::from_int(2))
            .unwrap()
            .checked_div(&QScalar::z())
            .unwrap();
        assert_eq!(x, expect);
        assert_eq!(x.to_string(), "(1/2 + 1/2*z^-1)/(1)");
    }

    #[test]
    fn parse_errors_carry_columns() {
        let e = "(z^2 + )/(1)".parse::<QScalar>().unwrap_err();
        assert!(matches!(e, QFieldError::Parse { column: 8, .. }), "{e:?}");
        assert!("(1)/(0)".parse::<QScalar>().is_err());
        assert!("(1)/(1) x".parse::<QScalar>().is_err());
    }

    #[test]
    fn half_int_parse_and_display() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("-1".parse::<HalfInt>().unwrap(), HalfInt::from_int(-1));
        assert_eq!("4/2".parse::<HalfInt>().unwrap(), HalfInt::from_int(2));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt::from_twice(-3).to_string(), "-3/2");
        assert_eq!(HalfInt::from_twice(4).to_string(), "2");
    }
}
