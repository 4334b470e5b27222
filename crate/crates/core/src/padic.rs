//! Truncated p-adic integers, valuations, absolute values and ball measures.
//!
//! A [`PadicInt`] with precision `K` is the exact integer `sum a_k p^k` with
//! `K` digits; it is not an interval of `Z_p`. Whether a sequence built from
//! such values is exact or only an approximation of longer expansions is
//! tracked by [`crate::Exactness`] at the sequence level.
//!
//! Every radius comparison is done with integer powers. No logarithms.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// A rational prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(Prime(p))
        } else {
            Err(Error::invalid(format!("{p} is not prime")))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^k` if it fits in a `u64`.
    pub fn checked_pow(self, k: u32) -> Option<u64> {
        self.0.checked_pow(k)
    }

    pub fn big_pow(self, k: u32) -> BigUint {
        BigUint::from(self.0).pow(k)
    }

    /// Smallest `k` with `p^k >= n`.
    pub fn ceil_log(self, n: u64) -> u32 {
        let mut k = 0;
        let mut power: u128 = 1;
        while power < n as u128 {
            power *= self.0 as u128;
            k += 1;
        }
        k
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases cover all of u64.
fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// p-adic valuation. `Infinite` is the valuation of zero and compares greater
/// than every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(m) => Some(m),
            Valuation::Infinite => None,
        }
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Largest `m` with `p^m | n`, for any integer type (machine or big).
pub fn vp_int<T>(n: &T, p: Prime) -> Valuation
where
    T: Integer + Clone + FromPrimitive,
{
    if n.is_zero() {
        return Valuation::Infinite;
    }
    // A prime that does not fit in T is larger than |n|.
    let Some(modulus) = T::from_u64(p.get()) else {
        return Valuation::Finite(0);
    };
    let mut m = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&modulus);
        if !r.is_zero() {
            return Valuation::Finite(m);
        }
        rest = q;
        m += 1;
    }
}

/// `p^e` for a signed exponent, as an exact rational.
fn signed_power(p: Prime, e: i64) -> Rational {
    let magnitude = BigInt::from(p.get()).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(magnitude)
    } else {
        Rational::new(BigInt::one(), magnitude)
    }
}

/// `|b/c|_p`, with `|0|_p = 0`.
pub fn padic_abs_rational<T>(b: &T, c: &T, p: Prime) -> Result<Rational>
where
    T: Integer + Clone + FromPrimitive,
{
    if c.is_zero() {
        return Err(Error::invalid("zero denominator"));
    }
    match (vp_int(b, p), vp_int(c, p)) {
        (Valuation::Infinite, _) => Ok(Rational::zero()),
        (Valuation::Finite(vb), Valuation::Finite(vc)) => {
            Ok(signed_power(p, vc as i64 - vb as i64))
        }
        (Valuation::Finite(_), Valuation::Infinite) => unreachable!("c is nonzero"),
    }
}

/// `|r|_p` for a rational.
pub fn padic_abs(r: &Rational, p: Prime) -> Rational {
    padic_abs_rational(r.numer(), r.denom(), p).expect("rational denominators are nonzero")
}

/// A truncated p-adic integer: `value` in `[0, p^precision)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: Prime,
    precision: u32,
    value: u64,
}

impl PadicInt {
    /// Fails when `precision` is zero, when `p^precision` does not fit in a
    /// `u64`, or when `value` is out of range.
    pub fn new(p: Prime, precision: u32, value: u64) -> Result<Self> {
        let modulus = modulus_for(p, precision)?;
        if value >= modulus {
            return Err(Error::invalid(format!(
                "value {value} outside [0, {p}^{precision})"
            )));
        }
        Ok(PadicInt {
            p,
            precision,
            value,
        })
    }

    /// Reduces `value` mod `p^precision`.
    pub fn reduced(p: Prime, precision: u32, value: u64) -> Result<Self> {
        let modulus = modulus_for(p, precision)?;
        Ok(PadicInt {
            p,
            precision,
            value: value % modulus,
        })
    }

    pub fn zero(p: Prime, precision: u32) -> Result<Self> {
        Self::new(p, precision, 0)
    }

    /// Builds from digits `a_0, a_1, ...` (least significant first); missing
    /// high digits are zero.
    pub fn from_digits(p: Prime, precision: u32, digits: &[u64]) -> Result<Self> {
        if digits.len() > precision as usize {
            return Err(Error::invalid("more digits than precision"));
        }
        let mut value = 0u64;
        for &d in digits.iter().rev() {
            if d >= p.get() {
                return Err(Error::invalid(format!("digit {d} not below {p}")));
            }
            value = value * p.get() + d;
        }
        Self::new(p, precision, value)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// `p^precision`.
    pub fn modulus(&self) -> u64 {
        self.p.get().pow(self.precision)
    }

    /// All `precision` digits, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        let p = self.p.get();
        let mut rest = self.value;
        (0..self.precision)
            .map(|_| {
                let d = rest % p;
                rest /= p;
                d
            })
            .collect()
    }

    /// Residue mod `p^k`; for `k >= precision` this is the value itself.
    pub fn residue(&self, k: u32) -> u64 {
        if k >= self.precision {
            self.value
        } else {
            self.value % self.p.get().pow(k)
        }
    }

    pub fn valuation(&self) -> Valuation {
        vp_int(&self.value, self.p)
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        PadicInt {
            value: (m - self.value) % m,
            ..*self
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        add_mod(self, &other.neg())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.precision != other.precision {
            return Err(Error::invalid(format!(
                "mismatched operands: p={} K={} vs p={} K={}",
                self.p, self.precision, other.p, other.precision
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn modulus_for(p: Prime, precision: u32) -> Result<u64> {
    if precision == 0 {
        return Err(Error::invalid("precision must be at least 1"));
    }
    p.checked_pow(precision).ok_or_else(|| {
        Error::invalid(format!("{p}^{precision} does not fit in 64 bits"))
    })
}

pub fn add_mod(x: &PadicInt, y: &PadicInt) -> Result<PadicInt> {
    x.check_compatible(y)?;
    let m = x.modulus() as u128;
    Ok(PadicInt {
        value: ((x.value as u128 + y.value as u128) % m) as u64,
        ..*x
    })
}

pub fn mul_mod(x: &PadicInt, y: &PadicInt) -> Result<PadicInt> {
    x.check_compatible(y)?;
    Ok(PadicInt {
        value: mul_mod_u64(x.value, y.value, x.modulus()),
        ..*x
    })
}

/// `|x|_p = 1`, i.e. the lowest digit is nonzero.
pub fn is_unit(x: &PadicInt) -> bool {
    !x.value.is_multiple_of(x.p.get())
}

/// Exponent `k0` of the ball `D_p(0, p^-k0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RadiusExponent(pub u32);

impl RadiusExponent {
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for RadiusExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The pair `(alpha, s)` defining the radius `s / N^alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaleParams {
    alpha: Ratio<u64>,
    s: Rational,
}

impl ScaleParams {
    pub fn new(alpha: Ratio<u64>, s: Rational) -> Result<Self> {
        if alpha > Ratio::one() {
            return Err(Error::invalid(format!("alpha = {alpha} exceeds 1")));
        }
        if !s.is_positive() {
            return Err(Error::invalid(format!("s = {s} must be positive")));
        }
        Ok(ScaleParams { alpha, s })
    }

    pub fn alpha(&self) -> Ratio<u64> {
        self.alpha
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    /// `s / N^alpha` when alpha is an integer (0 or 1); `None` otherwise since
    /// the radius is irrational in general.
    pub fn radius(&self, n: u64) -> Option<Rational> {
        match (*self.alpha.numer(), *self.alpha.denom()) {
            (0, _) => Some(self.s.clone()),
            (1, 1) => Some(&self.s / Rational::from_integer(BigInt::from(n))),
            _ => None,
        }
    }
}

/// Smallest `k0 >= 0` with `p^-k0 <= s / N^alpha`.
///
/// With `alpha = u/v` and `s = a/b` the condition is `N^u * b^v <= a^v * p^(k v)`.
pub fn ball_exponent(params: &ScaleParams, n: u64, p: Prime) -> RadiusExponent {
    ball_exponent_from(params, n, p, RadiusExponent(0))
}

/// As [`ball_exponent`], but starts the search at `start`, which must not
/// exceed the answer. `k0` is nondecreasing in `N`, so scans over growing
/// `N` can pass the previous result.
pub(crate) fn ball_exponent_from(
    params: &ScaleParams,
    n: u64,
    p: Prime,
    start: RadiusExponent,
) -> RadiusExponent {
    assert!(n >= 1, "N must be positive");
    let u = *params.alpha.numer() as u32;
    let v = *params.alpha.denom() as u32;
    let s_num = params.s.numer().magnitude();
    let s_den = params.s.denom().magnitude();
    let lhs = BigUint::from(n).pow(u) * s_den.pow(v);
    let step = p.big_pow(v);
    let mut rhs = s_num.pow(v) * p.big_pow(start.0 * v);
    let mut k = start.0;
    while lhs > rhs {
        rhs *= &step;
        k += 1;
    }
    RadiusExponent(k)
}

/// Haar measure `p^-k0` of a ball of radius `p^-k0`.
pub fn haar_measure(k0: RadiusExponent, p: Prime) -> Rational {
    signed_power(p, -(k0.0 as i64))
}
