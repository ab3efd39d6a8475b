//! Unit-times-prime-power arithmetic for binomial terms.
//!
//! A factorial `n!` is stored as `u_n · p^(ν_n)` with `u_n` a unit modulo
//! `p^W`. Every binomial coefficient and every quotient of them is then a
//! product of units and an exact power of `p`, so no precision is ever lost to
//! division. Negative valuations may appear inside a product; only the final
//! conversion to a residue insists on p-integrality.

use crate::error::ArithError;
use crate::modular::{mod_inv, mul_mod, neg_mod, reduce_signed, PrimeContext};

/// `unit · p^val`, or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PadicValue {
    Zero,
    Unit { val: i32, unit: u64 },
}

impl PadicValue {
    pub const ONE: PadicValue = PadicValue::Unit { val: 0, unit: 1 };

    pub fn from_int(z: i128, ctx: &PrimeContext) -> Self {
        if z == 0 {
            return PadicValue::Zero;
        }
        let p = ctx.p() as i128;
        let (mut z, mut val) = (z, 0);
        while z % p == 0 {
            z /= p;
            val += 1;
        }
        PadicValue::Unit {
            val,
            unit: reduce_signed(z, ctx.working_modulus()),
        }
    }

    pub fn valuation(&self) -> Option<i32> {
        match *self {
            PadicValue::Zero => None,
            PadicValue::Unit { val, .. } => Some(val),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PadicValue::Zero)
    }

    pub fn mul(self, other: Self, ctx: &PrimeContext) -> Self {
        match (self, other) {
            (PadicValue::Unit { val: v1, unit: u1 }, PadicValue::Unit { val: v2, unit: u2 }) => {
                PadicValue::Unit {
                    val: v1 + v2,
                    unit: mul_mod(u1, u2, ctx.working_modulus()),
                }
            }
            _ => PadicValue::Zero,
        }
    }

    pub fn div(self, other: Self, ctx: &PrimeContext) -> Result<Self, ArithError> {
        match (self, other) {
            (_, PadicValue::Zero) => Err(ArithError::DivisionByZeroValue),
            (PadicValue::Zero, _) => Ok(PadicValue::Zero),
            (PadicValue::Unit { val: v1, unit: u1 }, PadicValue::Unit { val: v2, unit: u2 }) => {
                let pw = ctx.working_modulus();
                Ok(PadicValue::Unit {
                    val: v1 - v2,
                    unit: mul_mod(u1, mod_inv(u2, pw)?, pw),
                })
            }
        }
    }

    pub fn neg(self, ctx: &PrimeContext) -> Self {
        match self {
            PadicValue::Zero => PadicValue::Zero,
            PadicValue::Unit { val, unit } => PadicValue::Unit {
                val,
                unit: neg_mod(unit, ctx.working_modulus()),
            },
        }
    }

    pub fn pow(self, exp: u32, ctx: &PrimeContext) -> Self {
        (0..exp).fold(PadicValue::ONE, |acc, _| acc.mul(self, ctx))
    }

    /// `unit · p^val mod p^e`. Exact because the unit is known modulo
    /// `p^W ⊇ p^(e - val)`.
    pub fn to_residue(self, e: u32, ctx: &PrimeContext) -> Result<u64, ArithError> {
        assert!(e <= ctx.working_exponent(), "target exponent exceeds W");
        match self {
            PadicValue::Zero => Ok(0),
            PadicValue::Unit { val, .. } if val < 0 => Err(ArithError::NotPIntegral { val }),
            PadicValue::Unit { val, unit } => {
                let val = val as u32;
                if val >= e {
                    return Ok(0);
                }
                let m = ctx.power(e);
                Ok(mul_mod(unit % m, ctx.power(val), m))
            }
        }
    }
}

/// Factorials `0!..=N!` in factored form for one prime.
#[derive(Clone, Debug)]
pub struct FactorialTable {
    ctx: PrimeContext,
    units: Vec<u64>,
    inv_units: Vec<u64>,
    vals: Vec<u32>,
}

impl FactorialTable {
    /// One pass over `1..=n`: strip the p-part of each factor into the
    /// running valuation and multiply the cofactor into the running unit.
    pub fn build(ctx: PrimeContext, n: usize) -> Self {
        let p = ctx.p() as usize;
        let pw = ctx.working_modulus();
        let mut units = Vec::with_capacity(n + 1);
        let mut vals = Vec::with_capacity(n + 1);
        let mut cofactors = Vec::with_capacity(n + 1);
        units.push(1);
        vals.push(0);
        cofactors.push(1);
        for i in 1..=n {
            let (mut m, mut v) = (i, 0);
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            cofactors.push(m as u64 % pw);
            units.push(mul_mod(units[i - 1], m as u64, pw));
            vals.push(vals[i - 1] + v);
        }
        let mut inv_units = vec![0; n + 1];
        inv_units[n] = mod_inv(units[n], pw).expect("stripped factorial is a unit");
        for i in (1..=n).rev() {
            inv_units[i - 1] = mul_mod(inv_units[i], cofactors[i], pw);
        }
        Self {
            ctx,
            units,
            inv_units,
            vals,
        }
    }

    /// Table of length `6(p-1)+1`, enough for `binom(6k, 3k)` with `k <= p-1`.
    pub fn for_prime(ctx: PrimeContext) -> Self {
        Self::build(ctx, 6 * (ctx.p() as usize - 1))
    }

    pub fn context(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.units.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.units.len() <= 1
    }

    pub fn unit(&self, n: usize) -> u64 {
        self.units[n]
    }

    pub fn valuation(&self, n: usize) -> u32 {
        self.vals[n]
    }

    pub fn factorial(&self, n: usize) -> PadicValue {
        PadicValue::Unit {
            val: self.vals[n] as i32,
            unit: self.units[n],
        }
    }

    pub fn binom(&self, n: i64, k: i64) -> Result<PadicValue, ArithError> {
        let len = self.len();
        if k < 0 || k > n || n as usize > len {
            return Err(ArithError::OutOfRange { n, k, len });
        }
        let (n, k) = (n as usize, k as usize);
        let pw = self.ctx.working_modulus();
        let unit = mul_mod(
            self.units[n],
            mul_mod(self.inv_units[k], self.inv_units[n - k], pw),
            pw,
        );
        let val = self.vals[n] - self.vals[k] - self.vals[n - k];
        Ok(PadicValue::Unit {
            val: val as i32,
            unit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::{One, ToPrimitive};
    use proptest::prelude::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p, 3).unwrap()
    }

    #[test]
    fn table_entries() {
        let c = ctx(5);
        let t = FactorialTable::build(c, 20);
        assert_eq!((t.unit(0), t.valuation(0)), (1, 0));
        assert_eq!(t.valuation(5), 1);
        assert_eq!(t.unit(5), 24);
        assert_eq!(t.valuation(10), 2);
        assert_eq!(FactorialTable::for_prime(ctx(7)).len(), 36);
    }

    #[test]
    fn binom_examples() {
        let c = ctx(5);
        let t = FactorialTable::build(c, 40);
        assert_eq!(t.binom(9, 0).unwrap(), PadicValue::ONE);
        assert_eq!(t.binom(8, 4).unwrap(), PadicValue::Unit { val: 1, unit: 14 });
        assert_eq!(t.binom(6, 3).unwrap(), PadicValue::Unit { val: 1, unit: 4 });
        assert!(matches!(
            t.binom(41, 2),
            Err(ArithError::OutOfRange { .. })
        ));
        assert!(t.binom(3, 4).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let c = ctx(5);
        let x = PadicValue::Unit { val: 1, unit: 14 };
        let y = PadicValue::Unit { val: 1, unit: 4 };
        assert_eq!(x.mul(PadicValue::from_int(1, &c), &c), x);
        assert_eq!(x.div(x, &c).unwrap(), PadicValue::ONE);
        assert_eq!(x.mul(y, &c), PadicValue::Unit { val: 2, unit: 56 });
        assert_eq!(x.div(PadicValue::Zero, &c), Err(ArithError::DivisionByZeroValue));
        assert_eq!(PadicValue::Zero.mul(x, &c), PadicValue::Zero);
        assert_eq!(x.neg(&c).neg(&c), x);
    }

    #[test]
    fn from_int_examples() {
        let c = ctx(7);
        assert_eq!(PadicValue::from_int(0, &c), PadicValue::Zero);
        assert_eq!(PadicValue::from_int(13, &c), PadicValue::Unit { val: 0, unit: 13 });
        assert_eq!(PadicValue::from_int(49, &c), PadicValue::Unit { val: 2, unit: 1 });
        let neg = PadicValue::from_int(-7, &c);
        assert_eq!(neg.to_residue(2, &c).unwrap(), 49 - 7);
    }

    #[test]
    fn residue_examples() {
        let c = ctx(5);
        assert_eq!(PadicValue::Zero.to_residue(3, &c).unwrap(), 0);
        assert_eq!(PadicValue::Unit { val: 1, unit: 14 }.to_residue(3, &c).unwrap(), 70);
        assert_eq!(PadicValue::Unit { val: 3, unit: 2 }.to_residue(3, &c).unwrap(), 0);
        assert_eq!(
            PadicValue::Unit { val: -1, unit: 2 }.to_residue(3, &c),
            Err(ArithError::NotPIntegral { val: -1 })
        );
    }

    fn exact_binom(n: u64, k: u64) -> BigUint {
        (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
    }

    fn reduce(v: &BigUint, m: u64) -> u64 {
        (v % m).to_u64().unwrap()
    }

    #[test]
    fn table_matches_exact_factorials() {
        for p in [3u64, 5, 7, 11, 13] {
            let c = ctx(p);
            let pw = c.working_modulus();
            let t = FactorialTable::build(c, 200);
            let mut fact = BigUint::one();
            for n in 0..=200u64 {
                if n > 0 {
                    fact *= n;
                }
                let rebuilt = mul_mod(t.unit(n as usize), crate::modular::mod_pow(p, t.valuation(n as usize) as u64, pw), pw);
                assert_eq!(rebuilt, reduce(&fact, pw), "p={p} n={n}");
                assert_ne!(t.unit(n as usize) % p, 0);
            }
        }
    }

    #[test]
    fn binomials_match_exact_values() {
        for p in [3u64, 5, 7, 11, 13] {
            let c = ctx(p);
            let t = FactorialTable::build(c, 200);
            for n in (0..=200u64).step_by(7) {
                for k in 0..=n {
                    let exact = exact_binom(n, k);
                    let mut v = 0;
                    let mut q = exact.clone();
                    while (&q % p) == BigUint::from(0u32) {
                        q /= p;
                        v += 1;
                    }
                    let PadicValue::Unit { val, unit } = t.binom(n as i64, k as i64).unwrap() else {
                        panic!("binomial is nonzero");
                    };
                    assert_eq!(val, v);
                    assert_eq!(unit, reduce(&q, c.working_modulus()));
                }
            }
        }
    }

    fn arb_value() -> impl Strategy<Value = PadicValue> {
        prop_oneof![
            Just(PadicValue::Zero),
            (-3i32..6, 1u64..15625).prop_filter_map("unit", |(val, unit)| {
                (unit % 5 != 0).then_some(PadicValue::Unit { val, unit })
            })
        ]
    }

    proptest! {
        #[test]
        fn mul_is_associative_and_commutative(a in arb_value(), b in arb_value(), c in arb_value()) {
            let cx = ctx(5);
            prop_assert_eq!(a.mul(b, &cx), b.mul(a, &cx));
            prop_assert_eq!(a.mul(b, &cx).mul(c, &cx), a.mul(b.mul(c, &cx), &cx));
        }
    }
}
