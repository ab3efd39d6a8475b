//! Residue arithmetic in `Z/p^e` plus rational reconstruction.
//!
//! Residues are always canonical representatives in `[0, m)`. Every modulus
//! handled here is below `2^63`, so products fit in `u128`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::ArithError;

/// Primes at or above this bound are rejected.
pub const MAX_PRIME: u64 = 1 << 20;

/// Largest modulus the residue arithmetic accepts.
pub const MAX_MODULUS: u64 = 1 << 63;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

#[inline]
pub fn neg_mod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

/// Reduce a signed integer to its canonical residue.
pub fn reduce_signed(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// `base^exp mod m` by square-and-multiply.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m >= 2, "modulus must be at least 2");
    let mut result = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn mod_inv(a: u64, m: u64) -> Result<u64, ArithError> {
    assert!(m >= 2, "modulus must be at least 2");
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(ArithError::NotInvertible { a, m });
    }
    Ok(reduce_signed(t0, m))
}

/// Exact `p^e`, or `None` on overflow past [`MAX_MODULUS`].
pub fn checked_prime_power(p: u64, e: u32) -> Option<u64> {
    let v = p.checked_pow(e)?;
    (v < MAX_MODULUS).then_some(v)
}

/// Deterministic primality check; trial division is enough below `2^20`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Legendre symbol `(a/p)` by Euler's criterion. `a` may be negative or
/// composite.
pub fn symbol(a: i64, p: u64) -> i8 {
    let r = reduce_signed(a as i128, p);
    if r == 0 {
        return 0;
    }
    let t = mod_pow(r, (p - 1) / 2, p);
    if t == 1 {
        1
    } else {
        debug_assert_eq!(t, p - 1);
        -1
    }
}

/// `sum_{k=1}^{n} 1/k mod p`.
pub fn harmonic_sum_mod(n: u64, p: u64) -> u64 {
    assert!(n < p, "harmonic sum needs n < p");
    (1..=n).fold(0, |acc, k| {
        add_mod(acc, mod_inv(k, p).expect("k < p is a unit"), p)
    })
}

/// The same sum as an exact element of `Z/m` for `m = p^e`.
pub fn harmonic_sum_prime_power(n: u64, m: u64) -> Result<u64, ArithError> {
    let mut acc = 0;
    for k in 1..=n {
        acc = add_mod(acc, mod_inv(k, m)?, m);
    }
    Ok(acc)
}

/// A prime together with the target and working exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    e: u32,
    w: u32,
    pe: u64,
    pw: u64,
}

impl PrimeContext {
    /// Working exponent `e + 3`, lowered as far as `e` when `p^(e+3)` would
    /// not fit in 63 bits.
    pub fn new(p: u64, e: u32) -> Result<Self, ArithError> {
        let mut w = e + 3;
        while w > e && checked_prime_power(p, w).is_none() {
            w -= 1;
        }
        Self::with_working(p, e, w)
    }

    pub fn with_working(p: u64, e: u32, w: u32) -> Result<Self, ArithError> {
        if !(3..MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(ArithError::InvalidPrime(p));
        }
        if !(1..=3).contains(&e) {
            return Err(ArithError::InvalidExponent(e));
        }
        if w < e {
            return Err(ArithError::InvalidExponent(w));
        }
        let pw = checked_prime_power(p, w).ok_or(ArithError::InvalidExponent(w))?;
        Ok(Self {
            p,
            e,
            w,
            pe: p.pow(e),
            pw,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn working_exponent(&self) -> u32 {
        self.w
    }

    /// `p^e`.
    pub fn modulus(&self) -> u64 {
        self.pe
    }

    /// `p^W`.
    pub fn working_modulus(&self) -> u64 {
        self.pw
    }

    /// `p^j` for `j <= W`.
    pub fn power(&self, j: u32) -> u64 {
        assert!(j <= self.w, "p^{j} exceeds the working precision");
        self.p.pow(j)
    }
}

/// `(b^(p-1) - 1) mod p^e`.
pub fn fermat_term(b: i64, ctx: &PrimeContext) -> Result<u64, ArithError> {
    fermat_term_mod(b, ctx.p(), ctx.modulus())
}

pub(crate) fn fermat_term_mod(b: i64, p: u64, m: u64) -> Result<u64, ArithError> {
    let r = reduce_signed(b as i128, m);
    if r.is_multiple_of(p) {
        return Err(ArithError::DividesBase { b, p });
    }
    Ok(sub_mod(mod_pow(r, p - 1, m), 1, m))
}

/// Recover `n/d` with `|n| <= bound`, `0 < d <= bound` and `n ≡ r·d (mod m)`.
///
/// Walks the remainder sequence of the extended Euclidean algorithm until the
/// remainder drops to the bound; the cofactor at that point is the
/// denominator. The answer is unique whenever `2·bound² <= m`; larger bounds
/// are accepted and return the first fraction the walk meets.
pub fn rational_reconstruct(
    r: &BigInt,
    m: &BigInt,
    bound: &BigInt,
) -> Result<(BigInt, BigInt), ArithError> {
    if m <= &BigInt::one() || bound <= &BigInt::zero() {
        return Err(ArithError::InvalidBound);
    }
    let no_fraction = || ArithError::NoReconstruction {
        residue: r.to_string(),
        modulus: m.to_string(),
        bound: bound.to_string(),
    };
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound || !r1.gcd(&t1).is_one() {
        return Err(no_fraction());
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    Ok((num, den))
}

/// Machine-word convenience wrapper around [`rational_reconstruct`].
pub fn rational_reconstruct_u64(r: u64, m: u64, bound: u64) -> Result<(i64, i64), ArithError> {
    let (n, d) = rational_reconstruct(&r.into(), &m.into(), &bound.into())?;
    Ok((
        i64::try_from(n).expect("bounded numerator"),
        i64::try_from(d).expect("bounded denominator"),
    ))
}
