//! Named constants that appear on right-hand sides, such as floor binomials
//! and the `R` quantities.
//!
//! Floors are always evaluated at the actual prime, so `[3p/7]` and
//! `3·[p/7]` stay distinct.

use std::fmt;

use crate::error::ArithError;
use crate::modular::{
    add_mod, fermat_term, harmonic_sum_prime_power, mod_inv, mod_pow, mul_mod,
    reduce_signed, sub_mod, PrimeContext,
};

/// `⌊(a·p + b) / m⌋` with `m > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FloorAtom {
    pub a: i64,
    pub b: i64,
    pub m: i64,
}

impl FloorAtom {
    pub const fn new(a: i64, b: i64, m: i64) -> Self {
        Self { a, b, m }
    }

    pub fn eval(&self, p: u64) -> i64 {
        (self.a * p as i64 + self.b).div_euclid(self.m)
    }
}

impl fmt::Display for FloorAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ap = if self.a == 1 { "p".to_string() } else { format!("{}p", self.a) };
        match self.b {
            0 => write!(f, "[{ap}/{}]", self.m),
            b if b > 0 => write!(f, "[({ap}+{b})/{}]", self.m),
            b => write!(f, "[({ap}{b})/{}]", self.m),
        }
    }
}

/// Integer combination of floor atoms plus a constant, e.g. `3*[p/7]` or
/// `[p/7]+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FloorExpr {
    pub terms: Vec<(i64, FloorAtom)>,
    pub constant: i64,
}

impl FloorExpr {
    pub fn atom(atom: FloorAtom) -> Self {
        Self {
            terms: vec![(1, atom)],
            constant: 0,
        }
    }

    pub fn constant(c: i64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn eval(&self, p: u64) -> i64 {
        self.terms.iter().map(|(c, a)| c * a.eval(p)).sum::<i64>() + self.constant
    }
}

impl fmt::Display for FloorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, atom)) in self.terms.iter().enumerate() {
            match (*c, i) {
                (1, 0) => {}
                (1, _) => f.write_str("+")?,
                (-1, _) => f.write_str("-")?,
                (c, 0) => write!(f, "{c}*")?,
                (c, _) if c > 0 => write!(f, "+{c}*")?,
                (c, _) => write!(f, "{c}*")?,
            }
            write!(f, "{atom}")?;
        }
        match self.constant {
            0 if self.terms.is_empty() => f.write_str("0"),
            0 => Ok(()),
            c if self.terms.is_empty() => write!(f, "{c}"),
            c if c > 0 => write!(f, "+{c}"),
            c => write!(f, "{c}"),
        }
    }
}

/// `binom(top, bot) mod p^e` by the product formula. `bot` outside
/// `0..=top` gives 0.
pub fn floor_binom(top: i64, bot: i64, ctx: &PrimeContext) -> Result<u64, ArithError> {
    let p = ctx.p();
    if top >= p as i64 {
        return Err(ArithError::TopOutOfRange { top, p });
    }
    if bot < 0 || bot > top {
        return Ok(0);
    }
    let m = ctx.modulus();
    let (mut num, mut den) = (1u64, 1u64);
    for i in 0..bot {
        num = mul_mod(num, (top - i) as u64, m);
        den = mul_mod(den, (i + 1) as u64, m);
    }
    Ok(mul_mod(num, mod_inv(den, m)?, m))
}

fn half_binom_sq(bot: i64, ctx: &PrimeContext) -> Result<u64, ArithError> {
    let b = floor_binom((ctx.p() as i64 - 1) / 2, bot, ctx)?;
    Ok(mul_mod(b, b, ctx.modulus()))
}

fn rat(n: i64, d: i64, ctx: &PrimeContext) -> Result<u64, ArithError> {
    let m = ctx.modulus();
    Ok(mul_mod(
        reduce_signed(n as i128, m),
        mod_inv(reduce_signed(d as i128, m), m)?,
        m,
    ))
}

/// `(−1)^n` as a residue.
pub fn sign(n: i64, ctx: &PrimeContext) -> u64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        ctx.modulus() - 1
    }
}

/// `(2p + 2 − 2^(p−1)) · binom((p−1)/2, (p−3)/4)²`, for `p ≡ 3 (mod 4)`.
pub fn r1(ctx: &PrimeContext) -> Result<u64, ArithError> {
    let p = ctx.p();
    if p % 4 != 3 {
        return Err(ArithError::PrimeClassMismatch { what: "R1", p });
    }
    let m = ctx.modulus();
    let q2 = fermat_term(2, ctx)?;
    let lead = sub_mod(reduce_signed(2 * p as i128 + 1, m), q2, m);
    Ok(mul_mod(lead, half_binom_sq((p as i64 - 3) / 4, ctx)?, m))
}

/// `(1 + (4 + 2(−1)^((p−1)/2))p − 4(2^(p−1) − 1) − (p/2)·H_[p/8]) ·
/// binom((p−1)/2, [p/8])²`.
pub fn r2(ctx: &PrimeContext) -> Result<u64, ArithError> {
    let p = ctx.p();
    let m = ctx.modulus();
    let pm = p % m;
    let s = if p % 4 == 1 { 6 } else { 2 };
    let mut lead = add_mod(1 % m, mul_mod(s, pm, m), m);
    lead = sub_mod(lead, mul_mod(4, fermat_term(2, ctx)?, m), m);
    let h = harmonic_sum_prime_power(p / 8, m)?;
    lead = sub_mod(lead, mul_mod(mul_mod(pm, rat(1, 2, ctx)?, m), h, m), m);
    Ok(mul_mod(lead, half_binom_sq(p as i64 / 8, ctx)?, m))
}

/// `(1 + 2p + (4/3)(2^(p−1) − 1) − (3/2)(3^(p−1) − 1)) · binom((p−1)/2, [p/6])²`.
pub fn r3(ctx: &PrimeContext) -> Result<u64, ArithError> {
    let p = ctx.p();
    let m = ctx.modulus();
    let mut lead = reduce_signed(1 + 2 * p as i128, m);
    lead = add_mod(lead, mul_mod(rat(4, 3, ctx)?, fermat_term(2, ctx)?, m), m);
    lead = sub_mod(lead, mul_mod(rat(3, 2, ctx)?, fermat_term(3, ctx)?, m), m);
    Ok(mul_mod(lead, half_binom_sq(p as i64 / 6, ctx)?, m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RatioBinom {
    /// `binom((p−1)/2,[7p/40]) binom((p−1)/2,[9p/40]) binom([3p/40],[p/40]) / binom([19p/40],[p/20])`
    T,
    /// `binom([3p/11],[p/11]) binom([6p/11],[3p/11]) / binom([4p/11],[2p/11])`
    R,
    /// `binom([8p/19],[p/19]) binom([10p/19],[4p/19]) / binom([5p/19],[2p/19])`
    S,
}

impl RatioBinom {
    /// `(numerator pairs, denominator pair)` as `(top, bottom)` floor atoms.
    pub fn parts(self) -> (Vec<(FloorAtom, FloorAtom)>, (FloorAtom, FloorAtom)) {
        let f = |a, m| FloorAtom::new(a, 0, m);
        let half = FloorAtom::new(1, -1, 2);
        match self {
            RatioBinom::T => (
                vec![(half, f(7, 40)), (half, f(9, 40)), (f(3, 40), f(1, 40))],
                (f(19, 40), f(1, 20)),
            ),
            RatioBinom::R => (
                vec![(f(3, 11), f(1, 11)), (f(6, 11), f(3, 11))],
                (f(4, 11), f(2, 11)),
            ),
            RatioBinom::S => (
                vec![(f(8, 19), f(1, 19)), (f(10, 19), f(4, 19))],
                (f(5, 19), f(2, 19)),
            ),
        }
    }
}

pub fn ratio_binom(which: RatioBinom, ctx: &PrimeContext) -> Result<u64, ArithError> {
    let p = ctx.p();
    let m = ctx.modulus();
    let fb = |(t, b): (FloorAtom, FloorAtom)| floor_binom(t.eval(p), b.eval(p), ctx);
    let (num, den) = which.parts();
    let mut acc = 1 % m;
    for &pair in &num {
        acc = mul_mod(acc, fb(pair)?, m);
    }
    Ok(mul_mod(acc, mod_inv(fb(den)?, m)?, m))
}

/// `5^(−[p/3])`.
pub fn pow5_negfloor_p3(ctx: &PrimeContext) -> Result<u64, ArithError> {
    let m = ctx.modulus();
    let inv5 = mod_inv(5 % m, m)?;
    Ok(mod_pow(inv5, ctx.p() / 3, m))
}

/// `H_n = Σ_{k=1}^{n} 1/k` with `n = [p/d]`.
pub fn harmonic_floor(d: u64, ctx: &PrimeContext) -> Result<u64, ArithError> {
    harmonic_sum_prime_power(ctx.p() / d, ctx.modulus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::is_prime;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_rational::BigRational;
    use num_traits::{One, Pow, ToPrimitive, Zero};

    fn ctx(p: u64, e: u32) -> PrimeContext {
        PrimeContext::new(p, e).unwrap()
    }

    fn binom(n: i64, k: i64) -> BigInt {
        if k < 0 || k > n {
            return BigInt::zero();
        }
        (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
    }

    fn reduce(q: &BigRational, p: u64, e: u32) -> u64 {
        let m = BigInt::from(p.pow(e));
        let d = q.denom().mod_floor(&m).to_u64().unwrap();
        let n = q.numer().mod_floor(&m).to_u64().unwrap();
        mul_mod(n, mod_inv(d, p.pow(e)).unwrap(), p.pow(e))
    }

    fn big(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn fq(b: i64, p: u64) -> BigRational {
        BigRational::from_integer(BigInt::from(b).pow(p - 1) - 1)
    }

    fn exact_r1(p: u64) -> BigRational {
        let c = binom((p as i64 - 1) / 2, (p as i64 - 3) / 4);
        (big(2 * p as i64 + 1) - fq(2, p)) * BigRational::from_integer(&c * &c)
    }

    fn exact_r2(p: u64) -> BigRational {
        let pi = p as i64;
        let s = if p % 4 == 1 { 6 } else { 2 };
        let h: BigRational = (1..=pi / 8).map(|k| BigRational::new(1.into(), k.into())).sum();
        let lead = big(1 + s * pi) - big(4) * fq(2, p) - BigRational::new(pi.into(), 2.into()) * h;
        let c = binom((pi - 1) / 2, pi / 8);
        lead * BigRational::from_integer(&c * &c)
    }

    fn exact_r3(p: u64) -> BigRational {
        let pi = p as i64;
        let lead = big(1 + 2 * pi) + BigRational::new(4.into(), 3.into()) * fq(2, p)
            - BigRational::new(3.into(), 2.into()) * fq(3, p);
        let c = binom((pi - 1) / 2, pi / 6);
        lead * BigRational::from_integer(&c * &c)
    }

    #[test]
    fn floor_atoms() {
        assert_eq!(FloorAtom::new(3, 0, 7).eval(13), 5);
        assert_eq!(FloorAtom::new(1, -1, 2).eval(13), 6);
        let three = FloorExpr {
            terms: vec![(3, FloorAtom::new(1, 0, 7))],
            constant: 0,
        };
        assert_eq!(three.eval(13), 3);
        assert_eq!(three.to_string(), "3*[p/7]");
        let plus = FloorExpr {
            terms: vec![(1, FloorAtom::new(1, 0, 7))],
            constant: 1,
        };
        assert_eq!(plus.to_string(), "[p/7]+1");
        assert_eq!(FloorAtom::new(1, -3, 4).to_string(), "[(p-3)/4]");
    }

    #[test]
    fn floor_binom_examples() {
        assert_eq!(floor_binom(9, 0, &ctx(11, 2)).unwrap(), 1);
        let c5 = ctx(5, 2);
        let (t, b) = (FloorAtom::new(2, 0, 3).eval(5), FloorAtom::new(1, 0, 3).eval(5));
        assert_eq!(floor_binom(t, b, &c5).unwrap(), 3);
        assert_eq!(floor_binom(3, 1, &ctx(7, 3)).unwrap(), 3);
        assert_eq!(
            floor_binom(7, 2, &ctx(7, 1)),
            Err(ArithError::TopOutOfRange { top: 7, p: 7 })
        );
        assert_eq!(floor_binom(3, 5, &c5).unwrap(), 0);
    }

    #[test]
    fn floor_binom_inverse_roundtrip() {
        for p in (5..200).filter(|&p| is_prime(p)) {
            let c = ctx(p, 3);
            let top = FloorAtom::new(3, 0, 7).eval(p);
            let bot = FloorAtom::new(1, 0, 7).eval(p);
            let b = floor_binom(top, bot, &c).unwrap();
            let inv = mod_inv(b, c.modulus()).unwrap();
            assert_eq!(mul_mod(b, inv, c.modulus()), 1);
        }
    }

    #[test]
    fn r_examples() {
        assert_eq!(r1(&ctx(3, 2)).unwrap(), 4);
        assert_eq!(r1(&ctx(7, 2)).unwrap(), reduce(&exact_r1(7), 7, 2));
        assert_eq!(
            r1(&ctx(5, 2)),
            Err(ArithError::PrimeClassMismatch { what: "R1", p: 5 })
        );
        assert_eq!(r3(&ctx(5, 2)).unwrap(), reduce(&exact_r3(5), 5, 2));
    }

    #[test]
    fn r_values_match_exact_rationals() {
        for p in (5..200).filter(|&p| is_prime(p)) {
            for e in 1..=3 {
                let c = ctx(p, e);
                if p % 4 == 3 {
                    assert_eq!(r1(&c).unwrap(), reduce(&exact_r1(p), p, e), "R1 p={p} e={e}");
                }
                assert_eq!(r2(&c).unwrap(), reduce(&exact_r2(p), p, e), "R2 p={p} e={e}");
                assert_eq!(r3(&c).unwrap(), reduce(&exact_r3(p), p, e), "R3 p={p} e={e}");
            }
        }
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio_binom(RatioBinom::R, &ctx(13, 1)).unwrap(), 11);
        let want = BigRational::new(binom(9, 1) * binom(12, 4), binom(6, 2));
        assert_eq!(ratio_binom(RatioBinom::S, &ctx(23, 1)).unwrap(), reduce(&want, 23, 1));
        let want = BigRational::new(binom(20, 7) * binom(20, 9) * binom(3, 1), binom(19, 2));
        assert_eq!(ratio_binom(RatioBinom::T, &ctx(41, 1)).unwrap(), reduce(&want, 41, 1));
    }

    #[test]
    fn ratios_match_exact_rationals() {
        for p in (43..400).filter(|&p| is_prime(p)) {
            for which in [RatioBinom::T, RatioBinom::R, RatioBinom::S] {
                let (num, den) = which.parts();
                let b = |(t, k): (FloorAtom, FloorAtom)| binom(t.eval(p), k.eval(p));
                let top: BigInt = num.iter().map(|&pair| b(pair)).product();
                let want = BigRational::new(top, b(den));
                for e in 1..=3 {
                    assert_eq!(ratio_binom(which, &ctx(p, e)).unwrap(), reduce(&want, p, e));
                }
            }
        }
    }

    #[test]
    fn sign_atoms() {
        let c = ctx(13, 2);
        assert_eq!(sign((13 - 1) / 2, &c), 1);
        let c7 = ctx(7, 1);
        assert_eq!(sign(7 / 4, &c7), 6);
        assert_eq!(pow5_negfloor_p3(&c7).unwrap(), 2);
    }

    #[test]
    fn harmonic_floor_matches_exact() {
        for p in (11..200).filter(|&p| is_prime(p)) {
            let h: BigRational = (1..=(p / 8) as i64)
                .map(|k| BigRational::new(1.into(), k.into()))
                .sum();
            assert_eq!(harmonic_floor(8, &ctx(p, 3)).unwrap(), reduce(&h, p, 3));
        }
    }
}
