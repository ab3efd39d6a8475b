//! The seven Apéry-like sequences
//!
//! `u_0 = 1`, `u_1 = b`, `(n+1)² u_{n+1} = (a·n(n+1) + b)·u_n − c·n²·u_{n−1}`.
//!
//! The recurrence is the production path; the defining binomial sums are kept
//! as exact oracles.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::ArithError;
use crate::modular::{mod_inv, mul_mod, reduce_signed, sub_mod, PrimeContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeqName {
    /// `A'_n = Σ C(n,k)² C(n+k,k)`
    Aprime,
    /// Franel numbers `f_n = Σ C(n,k)³`
    F,
    /// `S_n = Σ C(2k,k)² C(n,2k) 4^(n−2k)`
    S,
    /// `a_n = Σ C(n,k)² C(2k,k)`
    A,
    /// `Q_n = Σ C(n,k) (−8)^(n−k) f_k`
    Q,
    /// `W_n = Σ C(2k,k) C(3k,k) C(n,3k) (−3)^(n−3k)`
    W,
    /// `G_n = Σ C(2k,k)² C(2n−2k,n−k) 4^(n−k)`
    G,
}

impl SeqName {
    pub const ALL: [SeqName; 7] = [
        SeqName::Aprime,
        SeqName::F,
        SeqName::S,
        SeqName::A,
        SeqName::Q,
        SeqName::W,
        SeqName::G,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SeqName::Aprime => "Aprime",
            SeqName::F => "f",
            SeqName::S => "S",
            SeqName::A => "a",
            SeqName::Q => "Q",
            SeqName::W => "W",
            SeqName::G => "G",
        }
    }

    pub fn spec(self) -> SequenceSpec {
        let params = match self {
            SeqName::Aprime => (11, 3, -1),
            SeqName::F => (7, 2, -8),
            SeqName::S => (12, 4, 32),
            SeqName::A => (10, 3, 9),
            SeqName::Q => (-17, -6, 72),
            SeqName::W => (-9, -3, 27),
            SeqName::G => (32, 12, 256),
        };
        SequenceSpec { name: self, params }
    }
}

impl fmt::Display for SeqName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeqName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SeqName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown sequence `{s}`"))
    }
}

/// Recurrence parameters `(a, b, c)` for one named sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SequenceSpec {
    pub name: SeqName,
    pub params: (i64, i64, i64),
}

/// `u_0..u_{p-1}` modulo `p^e`. Every divisor `(n+1)²` with `n+1 <= p-1` is a
/// unit.
pub fn seq_mod(spec: SequenceSpec, ctx: &PrimeContext) -> Vec<u64> {
    seq_mod_with(spec, ctx.p() as usize, ctx.modulus())
}

/// `u_0..u_{len-1}` modulo `m`; `m` must be coprime to `1..len`.
pub fn seq_mod_with(spec: SequenceSpec, len: usize, m: u64) -> Vec<u64> {
    let (a, b, c) = spec.params;
    let mut u = Vec::with_capacity(len);
    if len == 0 {
        return u;
    }
    u.push(1 % m);
    if len == 1 {
        return u;
    }
    u.push(reduce_signed(b as i128, m));
    for n in 1..len - 1 {
        let n_i = n as i128;
        let lead = reduce_signed(a as i128 * n_i * (n_i + 1) + b as i128, m);
        let tail = reduce_signed(c as i128 * n_i * n_i, m);
        let num = sub_mod(mul_mod(lead, u[n], m), mul_mod(tail, u[n - 1], m), m);
        let d = reduce_signed((n_i + 1) * (n_i + 1), m);
        let inv = mod_inv(d, m).expect("(n+1)^2 is a unit for n+1 < p");
        u.push(mul_mod(num, inv, m));
    }
    u
}

/// Exact `u_0..=u_n` from the recurrence, checking every division.
pub fn seq_exact_all(spec: SequenceSpec, n: usize) -> Result<Vec<BigInt>, ArithError> {
    let (a, b, c) = spec.params;
    let mut u: Vec<BigInt> = vec![BigInt::one()];
    if n >= 1 {
        u.push(BigInt::from(b));
    }
    for k in 1..n {
        let kb = BigInt::from(k);
        let lead = BigInt::from(a) * &kb * (&kb + 1) + b;
        let num: BigInt = lead * &u[k] - BigInt::from(c) * &kb * &kb * &u[k - 1];
        let d = (&kb + 1) * (&kb + 1);
        let (q, r) = num.div_rem(&d);
        if !r.is_zero() {
            return Err(ArithError::NonIntegral { n: k + 1 });
        }
        u.push(q);
    }
    Ok(u)
}

pub fn seq_exact(spec: SequenceSpec, n: usize) -> Result<BigInt, ArithError> {
    Ok(seq_exact_all(spec, n)?.swap_remove(n))
}

fn binomial_rows(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigInt::one(); i + 1];
        for j in 1..i {
            row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// `u_0..=u_n` from the defining sums, over exact integers.
pub fn seq_direct_all(name: SeqName, n: usize) -> Vec<BigInt> {
    let rows = binomial_rows(2 * n.max(1) + n);
    let c = |a: usize, b: usize| -> &BigInt { &rows[a][b] };
    let pow = |base: i64, e: usize| -> BigInt { num_traits::pow(BigInt::from(base), e) };
    let franel: Vec<BigInt> = if name == SeqName::Q {
        seq_direct_all(SeqName::F, n)
    } else {
        Vec::new()
    };
    (0..=n)
        .map(|m| match name {
            SeqName::Aprime => (0..=m).map(|k| c(m, k) * c(m, k) * c(m + k, k)).sum(),
            SeqName::F => (0..=m).map(|k| c(m, k) * c(m, k) * c(m, k)).sum(),
            SeqName::S => (0..=m / 2)
                .map(|k| c(2 * k, k) * c(2 * k, k) * c(m, 2 * k) * pow(4, m - 2 * k))
                .sum(),
            SeqName::A => (0..=m).map(|k| c(m, k) * c(m, k) * c(2 * k, k)).sum(),
            SeqName::Q => (0..=m).map(|k| c(m, k) * pow(-8, m - k) * &franel[k]).sum(),
            SeqName::W => (0..=m / 3)
                .map(|k| c(2 * k, k) * c(3 * k, k) * c(m, 3 * k) * pow(-3, m - 3 * k))
                .sum(),
            SeqName::G => (0..=m)
                .map(|k| c(2 * k, k) * c(2 * k, k) * c(2 * m - 2 * k, m - k) * pow(4, m - k))
                .sum(),
        })
        .collect()
}

pub fn seq_direct(name: SeqName, n: usize) -> BigInt {
    seq_direct_all(name, n).swap_remove(n)
}
