//! Recovering the rational constant `c` in `S_A · S_B ≡ c·p² (mod p³)`.
//!
//! Each prime yields `(S_A·S_B)/p² mod p`. The residues are combined by CRT
//! over a growing prefix of the primes; the first prefix whose rational
//! reconstruction also matches every remaining prime wins. Using every prime
//! leaves nothing to confirm with, so that answer rests on the uniqueness
//! bound `2·B² <= M` alone.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{ArithError, FitError};
use crate::modular::{mod_inv, mul_mod, rational_reconstruct, reduce_signed};
use crate::registry::{parse_condition, parse_sum, Condition, PrimeEnv, SumSpec};

/// Two sums whose product should be a rational constant times `p²` on the
/// primes meeting `cond`.
#[derive(Clone, Debug)]
pub struct Family {
    pub name: &'static str,
    pub first: SumSpec,
    pub second: SumSpec,
    pub cond: Condition,
    /// Primes at or below this are never used.
    pub min_prime: u64,
    pub expected: (i64, i64),
}

/// Name, first sum, second sum, condition, minimum prime, expected constant.
type FamilyRow = (&'static str, &'static str, &'static str, &'static str, u64, (i64, i64));

const FAMILIES: &[FamilyRow] = &[
    (
        "2.32prod",
        "sum a = SUM(k)[C(2k,k)^2 * C(4k,2k) * rpow(1/20736) * inv(k+1)]",
        "sum b = SUM(k)[C(2k,k)^2 * C(4k,2k) * rpow(1/20736)]",
        "leg(-10)==-1",
        5,
        (-49, 15),
    ),
    (
        "2.33prod",
        "sum a = SUM(k)[C(2k,k)^2 * C(3k,k) * rpow(1/64) * inv(k+1)]",
        "sum b = SUM(k)[C(2k,k)^2 * C(3k,k) * rpow(1/64)]",
        "p%11 in {2,6,7,8,10}",
        3,
        (25, 22),
    ),
    (
        "2.34prod",
        "sum a = SUM(k)[C(2k,k) * C(3k,k) * C(6k,3k) * rpow(-1/884736) * inv(2k-1)]",
        "sum b = SUM(k)[C(2k,k) * C(3k,k) * C(6k,3k) * rpow(-1/884736)]",
        "leg(-19)==-1",
        3,
        (-985, 87552),
    ),
    (
        "2.35prod",
        "sum a = SUM(k)[C(2k,k) * C(3k,k) * C(6k,3k) * rpow(-1/884736000) * inv(2k-1)]",
        "sum b = SUM(k)[C(2k,k) * C(3k,k) * C(6k,3k) * rpow(-1/884736000)]",
        "leg(-43)==-1",
        5,
        (-933889, 198144000),
    ),
    (
        "2.36prod",
        "sum a = SUM(k)[C(2k,k) * C(3k,k) * C(6k,3k) * rpow(-1/147197952000) * inv(2k-1)]",
        "sum b = SUM(k)[C(2k,k) * C(3k,k) * C(6k,3k) * rpow(-1/147197952000)]",
        "leg(-67)==-1",
        11,
        (-155357161, 51365952000),
    ),
];

pub fn families() -> Vec<Family> {
    FAMILIES
        .iter()
        .map(|&(name, a, b, cond, min_prime, expected)| Family {
            name,
            first: parse_sum(a).expect("built-in family sum"),
            second: parse_sum(b).expect("built-in family sum"),
            cond: parse_condition(cond).expect("built-in family condition"),
            min_prime,
            expected,
        })
        .collect()
}

pub fn family(name: &str) -> Result<Family, FitError> {
    families()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| FitError::UnknownFamily(name.to_string()))
}

impl Family {
    /// Whether the family's condition holds at `p` and no base is divisible
    /// by it.
    pub fn qualifies(&self, p: u64) -> bool {
        use crate::modular::{is_prime, symbol};
        use crate::registry::{Atom, Factor};
        if p <= self.min_prime || !is_prime(p) {
            return false;
        }
        let coprime = [&self.first, &self.second].iter().all(|s| {
            s.factors.iter().all(|f| match f {
                Factor::RPow { num, den } => num.unsigned_abs() % p != 0 && den.unsigned_abs() % p != 0,
                _ => true,
            })
        });
        coprime
            && self.cond.atoms.iter().all(|a| match a {
                Atom::Residue { m, set } => set.contains(&(p % m)),
                Atom::Symbol { a, value } => symbol(*a, p) == *value,
                Atom::Rep { .. } => false,
            })
    }

    /// `(S_A · S_B) / p² mod p`.
    pub fn target(&self, p: u64) -> Result<u64, FitError> {
        let mut env = PrimeEnv::for_prime(p, 3)?;
        let m = env.context().modulus();
        let a = env.sum(&self.first)?;
        let b = env.sum(&self.second)?;
        let prod = mul_mod(a, b, m);
        if !prod.is_multiple_of(p * p) {
            return Err(FitError::NotDivisible { p });
        }
        Ok(prod / (p * p))
    }
}

/// A recovered constant and the primes that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fit {
    pub num: BigInt,
    pub den: BigInt,
    /// Primes combined by CRT.
    pub used: Vec<u64>,
    /// Further primes that confirmed the constant.
    pub confirmed: Vec<u64>,
}

fn matches(num: &BigInt, den: &BigInt, p: u64, residue: u64) -> bool {
    let bp = BigInt::from(p);
    let n = reduce_signed(num.mod_floor(&bp).to_i128().expect("reduced"), p);
    let d = den.mod_floor(&bp).to_u64().expect("reduced");
    match mod_inv(d, p) {
        Ok(inv) => mul_mod(n, inv, p) == residue,
        Err(_) => false,
    }
}

/// Primes beyond the CRT prefix that must agree with a candidate.
pub const CONFIRMATIONS: usize = 2;

/// Fit the family's constant from the qualifying primes among `primes`,
/// reconstructing with numerator and denominator at most `bound`. Residues
/// are computed lazily, so a long prime list costs only what is needed.
pub fn fit_constant(family: &Family, primes: &[u64], bound: &BigInt) -> Result<Fit, FitError> {
    if bound <= &BigInt::zero() {
        return Err(ArithError::InvalidBound.into());
    }
    let mut qualifying: Vec<u64> = primes.iter().copied().filter(|&p| family.qualifies(p)).collect();
    qualifying.sort_unstable();
    qualifying.dedup();
    if qualifying.len() < 2 {
        return Err(FitError::NotEnoughPrimes {
            need: 2,
            got: qualifying.len(),
        });
    }
    let mut residues: Vec<u64> = Vec::new();
    let residue = |j: usize, residues: &mut Vec<u64>| -> Result<u64, FitError> {
        while residues.len() <= j {
            residues.push(family.target(qualifying[residues.len()])?);
        }
        Ok(residues[j])
    };

    let mut modulus = BigInt::one();
    let mut value = BigInt::zero();
    let mut candidates = Vec::new();
    for i in 0..qualifying.len() {
        let p = BigInt::from(qualifying[i]);
        let r = BigInt::from(residue(i, &mut residues)?);
        // x ≡ value (mod modulus), x ≡ r (mod p)
        let inv = (&modulus % &p).modinv(&p).expect("distinct primes");
        let t = ((&r - &value).mod_floor(&p) * inv).mod_floor(&p);
        value += &modulus * t;
        modulus *= &p;
        let half: BigInt = (&modulus / 2u32).sqrt();
        let eff = bound.min(&half);
        if eff.is_zero() {
            continue;
        }
        let Ok((num, den)) = rational_reconstruct(&value, &modulus, eff) else {
            continue;
        };
        let rest: Vec<usize> = (i + 1..qualifying.len().min(i + 1 + CONFIRMATIONS)).collect();
        let mut agree = true;
        for &j in &rest {
            if !matches(&num, &den, qualifying[j], residue(j, &mut residues)?) {
                agree = false;
                break;
            }
        }
        if agree {
            return Ok(Fit {
                num,
                den,
                used: qualifying[..=i].to_vec(),
                confirmed: rest.iter().map(|&j| qualifying[j]).collect(),
            });
        }
        candidates.push(format!("{num}/{den} from {} primes", i + 1));
    }
    if candidates.is_empty() {
        Err(ArithError::NoReconstruction {
            residue: value.to_string(),
            modulus: modulus.to_string(),
            bound: bound.to_string(),
        }
        .into())
    } else {
        Err(FitError::Inconsistent(candidates))
    }
}
