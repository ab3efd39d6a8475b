//! Exact rational evaluation of registry sums and expressions.
//!
//! Nothing here touches the p-adic tables. Binomials and sequence terms are
//! exact integers, and every expression is evaluated over `Q` before a single
//! final reduction mod `p^e`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{ArithError, EvalError};
use crate::quadform::Representation;
use crate::registry::{r7_factors, Expr, Factor, Lin, Prefix, SumSpec};
use crate::sequences::{seq_direct_all, seq_exact_all, SeqName};
use crate::special::RatioBinom;

/// Reduce a p-integral rational mod `m = p^e`.
pub fn reduce(r: &BigRational, p: u64, m: u64) -> Result<u64, ArithError> {
    let den = r.denom();
    let bm = BigInt::from(m);
    if (den % BigInt::from(p)).is_zero() {
        let mut d = den.clone();
        let mut val = 0;
        while (&d % BigInt::from(p)).is_zero() {
            d /= p;
            val -= 1;
        }
        return Err(ArithError::NotPIntegral { val });
    }
    let num = r.numer().mod_floor(&bm);
    let den = den.mod_floor(&bm);
    let inv = den
        .modinv(&bm)
        .ok_or(ArithError::NotInvertible { a: den.to_u64().unwrap_or(0), m })?;
    Ok((num * inv).mod_floor(&bm).to_u64().expect("reduced below m"))
}

fn legendre(a: i64, p: u64) -> i64 {
    let bp = BigInt::from(p);
    let r = BigInt::from(a).mod_floor(&bp);
    if r.is_zero() {
        return 0;
    }
    if r.modpow(&BigInt::from((p - 1) / 2), &bp).is_one() {
        1
    } else {
        -1
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    Integer::div_floor(&a, &b)
}

/// Exact evaluator for one prime.
pub struct ExactEnv {
    p: u64,
    fact: Vec<BigInt>,
    seqs: HashMap<SeqName, Vec<BigInt>>,
    columns: HashMap<(Lin, Lin), Vec<BigInt>>,
    sums: HashMap<Vec<Factor>, Result<BigRational, ArithError>>,
}

impl ExactEnv {
    pub fn new(p: u64) -> Self {
        Self {
            p,
            fact: vec![BigInt::one()],
            seqs: HashMap::new(),
            columns: HashMap::new(),
            sums: HashMap::new(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn binom(&mut self, n: i64, k: i64) -> BigInt {
        if n < 0 || k < 0 || k > n {
            return BigInt::zero();
        }
        while self.fact.len() <= n as usize {
            let i = self.fact.len();
            let next = &self.fact[i - 1] * i;
            self.fact.push(next);
        }
        let (n, k) = (n as usize, k as usize);
        &self.fact[n] / (&self.fact[k] * &self.fact[n - k])
    }

    /// `Σ_{k=0}^{p−1} Π factors` over `Q`.
    pub fn factor_sum(&mut self, factors: &[Factor]) -> Result<BigRational, ArithError> {
        if let Some(r) = self.sums.get(factors) {
            return r.clone();
        }
        let r = self.compute_sum(factors);
        self.sums.insert(factors.to_vec(), r.clone());
        r
    }

    fn compute_sum(&mut self, factors: &[Factor]) -> Result<BigRational, ArithError> {
        let n = self.p as usize;
        for f in factors {
            if let Factor::Seq(name) = f {
                self.seqs
                    .entry(*name)
                    .or_insert_with(|| exact_terms(*name, n - 1));
            }
        }
        // Common denominator B^(n-1) * L, so the loop needs no gcds.
        let (mut ra, mut rb) = (BigInt::one(), BigInt::one());
        for f in factors {
            if let Factor::RPow { num: a, den: b } = *f {
                ra *= a;
                rb *= b;
            }
        }
        let mut polys = Vec::with_capacity(n);
        let mut lcm = BigInt::one();
        for k in 0..n as i64 {
            let mut d = BigInt::one();
            for f in factors {
                if let Factor::InvPoly { poly, pow } = *f {
                    d *= Pow::pow(BigInt::from(poly.at(k)), pow);
                }
            }
            if d.is_zero() {
                return Err(ArithError::DivisionByZeroValue);
            }
            let g = d.gcd(&(&lcm % &d));
            lcm *= &d / g;
            polys.push(d);
        }
        for f in factors {
            if let Factor::Binom { top, bot, .. } = *f {
                if !self.columns.contains_key(&(top, bot)) {
                    let col = (0..n as i64).map(|k| (top.at(k), bot.at(k)));
                    let col = binom_column(col).unwrap_or_else(|| {
                        (0..n as i64).map(|k| self.binom(top.at(k), bot.at(k))).collect()
                    });
                    self.columns.insert((top, bot), col);
                }
            }
        }
        // Horner in B: total = Σ A^k B^(n-1-k) t_k.
        let mut total = BigInt::zero();
        let mut ra_k = BigInt::one();
        for (k, poly) in polys.iter().enumerate() {
            let mut num = ra_k.clone();
            for f in factors {
                match *f {
                    Factor::Binom { top, bot, pow } => num *= Pow::pow(&self.columns[&(top, bot)][k], pow),
                    Factor::Seq(name) => num *= &self.seqs[&name][k],
                    Factor::RPow { .. } | Factor::InvPoly { .. } => {}
                }
            }
            total *= &rb;
            total += num * (&lcm / poly);
            ra_k *= &ra;
        }
        Ok(BigRational::new(total, Pow::pow(rb, n - 1) * lcm))
    }

    pub fn prefix_value(&self, prefix: &Option<Prefix>) -> BigRational {
        let v = match prefix {
            None => 1,
            Some(Prefix::Leg(a)) => legendre(*a, self.p),
            Some(Prefix::Sgn(f)) => {
                if f.eval(self.p).rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            }
        };
        BigRational::from_integer(v.into())
    }

    pub fn sum(&mut self, spec: &SumSpec) -> Result<BigRational, ArithError> {
        Ok(self.prefix_value(&spec.prefix) * self.factor_sum(&spec.factors)?)
    }

    /// A sum reduced mod `p^e`.
    pub fn sum_mod(&mut self, spec: &SumSpec, e: u32) -> Result<u64, ArithError> {
        let v = self.sum(spec)?;
        reduce(&v, self.p, self.p.pow(e))
    }

    fn int(v: impl Into<BigInt>) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn half_binom_sq(&mut self, bot: i64) -> BigRational {
        let b = self.binom((self.p as i64 - 1) / 2, bot);
        Self::int(&b * &b)
    }

    fn harmonic(n: u64) -> BigRational {
        (1..=n).map(|k| BigRational::new(1.into(), k.into())).sum()
    }

    fn fermat(&self, b: i64) -> BigRational {
        Self::int(Pow::pow(BigInt::from(b), self.p - 1) - 1)
    }

    fn ratio(&mut self, which: RatioBinom) -> BigRational {
        let p = self.p;
        let (num, den) = which.parts();
        let mut r = BigRational::one();
        for (t, b) in num {
            r *= Self::int(self.binom(t.eval(p), b.eval(p)));
        }
        r / Self::int(self.binom(den.0.eval(p), den.1.eval(p)))
    }

    /// Evaluate over `Q`.
    pub fn eval(
        &mut self,
        expr: &Expr,
        sums: &[SumSpec],
        rep: Option<Representation>,
    ) -> Result<BigRational, EvalError> {
        let p = self.p;
        let pi = p as i64;
        let nonzero = |v: BigRational| -> Result<BigRational, EvalError> {
            if v.is_zero() {
                Err(ArithError::DivisionByZeroValue.into())
            } else {
                Ok(v)
            }
        };
        Ok(match expr {
            Expr::Int(n) => Self::int(*n),
            Expr::P => Self::int(p),
            Expr::X => Self::int(rep.ok_or(EvalError::UnboundSymbol("x"))?.x),
            Expr::Y => Self::int(rep.ok_or(EvalError::UnboundSymbol("y"))?.y),
            Expr::Sum(id) => {
                let spec = sums
                    .iter()
                    .find(|s| &s.id == id)
                    .ok_or_else(|| EvalError::UnknownSum(id.clone()))?;
                self.sum(spec)?
            }
            Expr::R1 => {
                if p % 4 != 3 {
                    return Err(ArithError::PrimeClassMismatch { what: "R1", p }.into());
                }
                let lead = Self::int(2 * pi + 2) - Self::int(Pow::pow(BigInt::from(2), p - 1));
                lead * self.half_binom_sq((pi - 3) / 4)
            }
            Expr::R2 => {
                let s = if p % 4 == 1 { 1 } else { -1 };
                let lead = Self::int(1 + (4 + 2 * s) * pi)
                    - Self::int(4) * self.fermat(2)
                    - BigRational::new(pi.into(), 2.into()) * Self::harmonic(p / 8);
                lead * self.half_binom_sq(pi / 8)
            }
            Expr::R3 => {
                let lead = Self::int(1 + 2 * pi)
                    + BigRational::new(4.into(), 3.into()) * self.fermat(2)
                    - BigRational::new(3.into(), 2.into()) * self.fermat(3);
                lead * self.half_binom_sq(pi / 6)
            }
            Expr::R7 => self.factor_sum(&r7_factors())?,
            Expr::Ratio(r) => self.ratio(*r),
            Expr::FB(t, b) => {
                let (t, b) = (t.eval(p), b.eval(p));
                Self::int(self.binom(t, b))
            }
            Expr::Leg(a) => Self::int(legendre(*a, p)),
            Expr::Sgn(f) => Self::int(if f.eval(p).rem_euclid(2) == 0 { 1 } else { -1 }),
            Expr::H(d) => Self::harmonic(p / d),
            Expr::Q(b) => self.fermat(*b),
            Expr::Pw5m => {
                BigRational::new(1.into(), Pow::pow(BigInt::from(5), floor_div(pi, 3) as u64))
            }
            Expr::Inv(a) => nonzero(self.eval(a, sums, rep)?)?.recip(),
            Expr::Neg(a) => -self.eval(a, sums, rep)?,
            Expr::Add(a, b) => self.eval(a, sums, rep)? + self.eval(b, sums, rep)?,
            Expr::Sub(a, b) => self.eval(a, sums, rep)? - self.eval(b, sums, rep)?,
            Expr::Mul(a, b) => self.eval(a, sums, rep)? * self.eval(b, sums, rep)?,
            Expr::Div(a, b) => {
                let num = self.eval(a, sums, rep)?;
                num / nonzero(self.eval(b, sums, rep)?)?
            }
            Expr::Pow(a, n) => {
                let base = self.eval(a, sums, rep)?;
                let base = if *n < 0 { nonzero(base)?.recip() } else { base };
                Pow::pow(base, n.unsigned_abs())
            }
        })
    }

    /// Evaluate over `Q`, then reduce mod `p^e`.
    pub fn eval_mod(
        &mut self,
        expr: &Expr,
        sums: &[SumSpec],
        rep: Option<Representation>,
        e: u32,
    ) -> Result<u64, EvalError> {
        let v = self.eval(expr, sums, rep)?;
        Ok(reduce(&v, self.p, self.p.pow(e))?)
    }
}

/// `C(top_k, bot_k)` down a column, each entry reached from the previous one
/// by exact division by small integers. `None` when the column leaves the
/// triangle or steps backwards.
fn binom_column(mut col: impl Iterator<Item = (i64, i64)>) -> Option<Vec<BigInt>> {
    let (mut n, mut m) = col.next()?;
    if m < 0 || m > n {
        return None;
    }
    let mut v: BigInt = (0..m).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1));
    let mut out = vec![v.clone()];
    for (n2, m2) in col {
        if n2 < n || m2 < m || m2 > n2 {
            return None;
        }
        while n < n2 {
            v = v * (n + 1) / (n + 1 - m);
            n += 1;
        }
        while m < m2 {
            v = v * (n - m) / (m + 1);
            m += 1;
        }
        out.push(v.clone());
    }
    Some(out)
}

/// Below this length the defining sums are cheap enough to use directly.
const DIRECT_BELOW: usize = 128;

/// Integer sequence terms: the defining sums for short ranges, the exact
/// integer recurrence (which never reduces modulo anything) beyond.
fn exact_terms(name: SeqName, n: usize) -> Vec<BigInt> {
    if n < DIRECT_BELOW {
        return seq_direct_all(name, n);
    }
    seq_exact_all(name.spec(), n).expect("recurrence terms are integers")
}
