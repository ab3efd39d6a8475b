//! Per-prime evaluation of sums, expressions and whole conjectures.

use std::collections::HashMap;
use std::fmt;

use super::ast::*;
use crate::exact::ExactEnv;
use crate::error::{ArithError, EvalError};
use crate::modular::{
    add_mod, fermat_term, mod_inv, mod_pow, mul_mod, reduce_signed, sub_mod, symbol, PrimeContext,
};
use crate::padic::{FactorialTable, PadicValue};
use crate::quadform::{classify, normalize, represent, FormSpec, RepOutcome, Representation, SignConstraint};
use crate::sequences::{seq_mod, SeqName};
use crate::special::{
    floor_binom, harmonic_floor, pow5_negfloor_p3, r1, r2, r3, ratio_binom, sign,
};

/// Factors of the built-in sum `R7 = Σ C(2k,k)³/(k+1)`.
pub fn r7_factors() -> Vec<Factor> {
    vec![
        Factor::Binom {
            top: Lin::new(2, 0),
            bot: Lin::new(1, 0),
            pow: 3,
        },
        Factor::InvPoly {
            poly: Poly::KPlusOne,
            pow: 1,
        },
    ]
}

/// Everything cached for one prime. Not shared between threads.
pub struct PrimeEnv {
    ctx: PrimeContext,
    table: FactorialTable,
    binoms: HashMap<(Lin, Lin), Vec<PadicValue>>,
    seqs: HashMap<SeqName, Vec<u64>>,
    sums: HashMap<Vec<Factor>, Result<u64, ArithError>>,
    reps: HashMap<FormSpec, RepOutcome>,
}

impl PrimeEnv {
    pub fn new(ctx: PrimeContext) -> Self {
        Self {
            table: FactorialTable::for_prime(ctx),
            ctx,
            binoms: HashMap::new(),
            seqs: HashMap::new(),
            sums: HashMap::new(),
            reps: HashMap::new(),
        }
    }

    pub fn for_prime(p: u64, e: u32) -> Result<Self, ArithError> {
        Ok(Self::new(PrimeContext::new(p, e)?))
    }

    pub fn context(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    fn binom_row(&mut self, top: Lin, bot: Lin) -> &[PadicValue] {
        let p = self.ctx.p() as i64;
        if !self.binoms.contains_key(&(top, bot)) {
            let need = (0..p).map(|k| top.at(k)).max().unwrap_or(0).max(0) as usize;
            if need > self.table.len() {
                self.table = FactorialTable::build(self.ctx, need);
            }
            let row = (0..p)
                .map(|k| {
                    let (n, r) = (top.at(k), bot.at(k));
                    if n < 0 || r < 0 || r > n {
                        PadicValue::Zero
                    } else {
                        self.table.binom(n, r).expect("table covers every top")
                    }
                })
                .collect();
            self.binoms.insert((top, bot), row);
        }
        &self.binoms[&(top, bot)]
    }

    fn seq_row(&mut self, name: SeqName) -> &[u64] {
        let ctx = self.ctx;
        self.seqs.entry(name).or_insert_with(|| seq_mod(name.spec(), &ctx))
    }

    /// `Σ_{k=0}^{p−1} Π factors mod p^e`, cached by the factor list.
    pub fn factor_sum(&mut self, factors: &[Factor]) -> Result<u64, ArithError> {
        if let Some(r) = self.sums.get(factors) {
            return r.clone();
        }
        let r = self.compute_sum(factors);
        self.sums.insert(factors.to_vec(), r.clone());
        r
    }

    fn compute_sum(&mut self, factors: &[Factor]) -> Result<u64, ArithError> {
        let ctx = self.ctx;
        let (p, e, m, pw) = (ctx.p(), ctx.e(), ctx.modulus(), ctx.working_modulus());
        let mut ratio = 1 % pw;
        let mut binoms = Vec::new();
        let mut seqs = Vec::new();
        let mut polys = Vec::new();
        for f in factors {
            match *f {
                Factor::Binom { top, bot, pow } => {
                    self.binom_row(top, bot);
                    binoms.push(((top, bot), pow));
                }
                Factor::Seq(name) => {
                    self.seq_row(name);
                    seqs.push(name);
                }
                Factor::RPow { num, den } => {
                    let num = reduce_signed(num as i128, pw);
                    let den = mod_inv(reduce_signed(den as i128, pw), pw)?;
                    ratio = mul_mod(ratio, mul_mod(num, den, pw), pw);
                }
                Factor::InvPoly { poly, pow } => polys.push((poly, pow)),
            }
        }
        let rows: Vec<(&[PadicValue], u32)> = binoms
            .iter()
            .map(|(key, pow)| (self.binoms[key].as_slice(), *pow))
            .collect();
        let seq_rows: Vec<&[u64]> = seqs.iter().map(|n| self.seqs[n].as_slice()).collect();
        let mut acc = 0;
        let mut rk = 1 % pw;
        for k in 0..p as usize {
            let mut v = PadicValue::Unit { val: 0, unit: rk };
            for &(row, pow) in &rows {
                v = v.mul(row[k].pow(pow, &ctx), &ctx);
            }
            for &(poly, pow) in &polys {
                let d = PadicValue::from_int(poly.at(k as i64) as i128, &ctx).pow(pow, &ctx);
                v = v.div(d, &ctx)?;
            }
            let mut term = v.to_residue(e, &ctx)?;
            for row in &seq_rows {
                term = mul_mod(term, row[k], m);
            }
            acc = add_mod(acc, term, m);
            rk = mul_mod(rk, ratio, pw);
        }
        Ok(acc)
    }

    pub fn prefix_value(&self, prefix: &Option<Prefix>) -> u64 {
        let m = self.ctx.modulus();
        match prefix {
            None => 1 % m,
            Some(Prefix::Leg(a)) => reduce_signed(symbol(*a, self.p()) as i128, m),
            Some(Prefix::Sgn(f)) => sign(f.eval(self.p()), &self.ctx),
        }
    }

    pub fn sum(&mut self, spec: &SumSpec) -> Result<u64, ArithError> {
        let s = self.factor_sum(&spec.factors)?;
        Ok(mul_mod(self.prefix_value(&spec.prefix), s, self.ctx.modulus()))
    }

    pub fn rep(&mut self, form: FormSpec) -> RepOutcome {
        let p = self.p();
        self.reps
            .entry(form)
            .or_insert_with(|| classify(&represent(form, p)))
            .clone()
    }

    /// Evaluate an expression mod `p^e` with the given sums and bindings.
    pub fn eval(
        &mut self,
        expr: &Expr,
        sums: &[SumSpec],
        rep: Option<Representation>,
    ) -> Result<u64, EvalError> {
        let ctx = self.ctx;
        let (p, m) = (ctx.p(), ctx.modulus());
        let inv = |a: u64| mod_inv(a, m).map_err(EvalError::from);
        Ok(match expr {
            Expr::Int(n) => reduce_signed(*n, m),
            Expr::P => p % m,
            Expr::X => reduce_signed(rep.ok_or(EvalError::UnboundSymbol("x"))?.x as i128, m),
            Expr::Y => reduce_signed(rep.ok_or(EvalError::UnboundSymbol("y"))?.y as i128, m),
            Expr::Sum(id) => {
                let spec = sums
                    .iter()
                    .find(|s| &s.id == id)
                    .ok_or_else(|| EvalError::UnknownSum(id.clone()))?;
                self.sum(spec)?
            }
            Expr::R1 => r1(&ctx)?,
            Expr::R2 => r2(&ctx)?,
            Expr::R3 => r3(&ctx)?,
            Expr::R7 => self.factor_sum(&r7_factors())?,
            Expr::Ratio(r) => ratio_binom(*r, &ctx)?,
            Expr::FB(t, b) => floor_binom(t.eval(p), b.eval(p), &ctx)?,
            Expr::Leg(a) => reduce_signed(symbol(*a, p) as i128, m),
            Expr::Sgn(f) => sign(f.eval(p), &ctx),
            Expr::H(d) => harmonic_floor(*d, &ctx)?,
            Expr::Q(b) => fermat_term(*b, &ctx)?,
            Expr::Pw5m => pow5_negfloor_p3(&ctx)?,
            Expr::Inv(a) => inv(self.eval(a, sums, rep)?)?,
            Expr::Neg(a) => sub_mod(0, self.eval(a, sums, rep)?, m),
            Expr::Add(a, b) => add_mod(self.eval(a, sums, rep)?, self.eval(b, sums, rep)?, m),
            Expr::Sub(a, b) => sub_mod(self.eval(a, sums, rep)?, self.eval(b, sums, rep)?, m),
            Expr::Mul(a, b) => mul_mod(self.eval(a, sums, rep)?, self.eval(b, sums, rep)?, m),
            Expr::Div(a, b) => {
                let num = self.eval(a, sums, rep)?;
                mul_mod(num, inv(self.eval(b, sums, rep)?)?, m)
            }
            Expr::Pow(a, n) => {
                let base = self.eval(a, sums, rep)?;
                let base = if *n < 0 { inv(base)? } else { base };
                mod_pow(base, n.unsigned_abs() as u64, m)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseStatus {
    Pass,
    Fail,
    NoCase,
    Ambiguous,
    Skipped,
    EngineError,
}

impl CaseStatus {
    pub const ALL: [CaseStatus; 6] = [
        CaseStatus::Pass,
        CaseStatus::Fail,
        CaseStatus::NoCase,
        CaseStatus::Ambiguous,
        CaseStatus::Skipped,
        CaseStatus::EngineError,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseStatus::Pass => "pass",
            CaseStatus::Fail => "fail",
            CaseStatus::NoCase => "nocase",
            CaseStatus::Ambiguous => "ambiguous",
            CaseStatus::Skipped => "skipped",
            CaseStatus::EngineError => "engine_error",
        }
    }
}

impl fmt::Display for CaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseResult {
    pub conj: String,
    pub p: u64,
    /// 1-based case index; `None` for whole-conjecture records.
    pub case: Option<usize>,
    pub status: CaseStatus,
    pub lhs: Option<u64>,
    pub rhs: Option<u64>,
    pub modulus: u64,
    pub note: Option<String>,
}

enum CondOutcome {
    Unmet,
    Met(Option<Representation>),
    Ambiguous(Vec<Representation>),
    Error(ArithError),
}

fn condition(cond: &Condition, env: &mut PrimeEnv) -> CondOutcome {
    let p = env.p();
    let mut bound = None;
    for atom in &cond.atoms {
        match atom {
            Atom::Residue { m, set } => {
                if !set.contains(&(p % m)) {
                    return CondOutcome::Unmet;
                }
            }
            Atom::Symbol { a, value } => {
                if symbol(*a, p) != *value {
                    return CondOutcome::Unmet;
                }
            }
            Atom::Rep { form, xmod4 } => match env.rep(*form) {
                RepOutcome::NotRepresented => return CondOutcome::Unmet,
                RepOutcome::Ambiguous(reps) => return CondOutcome::Ambiguous(reps),
                RepOutcome::Unique(r) => {
                    let c = if *xmod4 {
                        SignConstraint::XMod4Eq1
                    } else {
                        SignConstraint::None
                    };
                    match normalize(r, c) {
                        Ok(r) => bound = Some(r),
                        Err(e) => return CondOutcome::Error(e),
                    }
                }
            },
        }
    }
    CondOutcome::Met(bound)
}

/// Why a case cannot be evaluated at this prime, if it cannot.
fn skip_reason(conj: &ConjectureSpec, case: &CaseRule, p: u64) -> Option<String> {
    let exprs = [Some(&case.lhs), Some(&case.rhs), case.suspect.as_ref()];
    for e in exprs.into_iter().flatten() {
        for id in e.sums() {
            let Some(sum) = conj.sum(id) else { continue };
            for f in &sum.factors {
                if let Factor::RPow { num, den } = f {
                    if num.unsigned_abs() % p == 0 || den.unsigned_abs() % p == 0 {
                        return Some(format!("p divides the base of rpow in sum {id}"));
                    }
                }
            }
        }
        if let Some(d) = e.constant_divisors().into_iter().find(|d| d.unsigned_abs() % p as u128 == 0) {
            return Some(format!("p divides the constant {d}"));
        }
    }
    None
}

/// Verify every case of `conj` at the environment's prime. `power` overrides
/// the stated modulus exponent of every case.
pub fn verify_with(conj: &ConjectureSpec, env: &mut PrimeEnv, power: Option<u32>) -> Vec<CaseResult> {
    let p = env.p();
    let record = |case, status, lhs, rhs, modulus, note| CaseResult {
        conj: conj.id.clone(),
        p,
        case,
        status,
        lhs,
        rhs,
        modulus,
        note,
    };
    if conj.excluded.contains(&p) {
        return vec![record(None, CaseStatus::Skipped, None, None, 0, Some("excluded prime".into()))];
    }
    let mut out = Vec::new();
    for (i, case) in conj.cases.iter().enumerate() {
        let idx = Some(i + 1);
        let power = power.unwrap_or(case.power).min(env.context().e());
        let modulus = p.pow(power);
        let bound = match condition(&case.cond, env) {
            CondOutcome::Unmet => continue,
            CondOutcome::Met(b) => b,
            CondOutcome::Ambiguous(reps) => {
                let list: Vec<String> = reps.iter().map(|r| format!("({},{})", r.x, r.y)).collect();
                let note = format!("representations {}", list.join(" "));
                out.push(record(idx, CaseStatus::Ambiguous, None, None, modulus, Some(note)));
                continue;
            }
            CondOutcome::Error(e) => {
                out.push(record(idx, CaseStatus::EngineError, None, None, modulus, Some(e.to_string())));
                continue;
            }
        };
        if let Some(reason) = skip_reason(conj, case, p) {
            out.push(record(idx, CaseStatus::Skipped, None, None, modulus, Some(reason)));
            continue;
        }
        let lhs = env.eval(&case.lhs, &conj.sums, bound);
        let rhs = env.eval(&case.rhs, &conj.sums, bound);
        let (lhs, rhs) = match (lhs, rhs) {
            (Ok(l), Ok(r)) => (l % modulus, r % modulus),
            (Err(e), _) | (_, Err(e)) => {
                out.push(record(idx, CaseStatus::EngineError, None, None, modulus, Some(e.to_string())));
                continue;
            }
        };
        let status = if lhs == rhs {
            CaseStatus::Pass
        } else {
            CaseStatus::Fail
        };
        let note = case.suspect.as_ref().map(|s| match env.eval(s, &conj.sums, bound) {
            Ok(v) if v % modulus == lhs => "alternative reading: pass".to_string(),
            Ok(v) => format!("alternative reading: fail (rhs {})", v % modulus),
            Err(e) => format!("alternative reading: {e}"),
        });
        out.push(record(idx, status, Some(lhs), Some(rhs), modulus, note));
    }
    if out.is_empty() {
        out.push(record(None, CaseStatus::NoCase, None, None, 0, None));
    }
    out
}

pub fn verify(conj: &ConjectureSpec, env: &mut PrimeEnv) -> Vec<CaseResult> {
    verify_with(conj, env, None)
}

/// Recompute case `case` (1-based) with the exact oracle, reduced mod
/// `p^power`. `None` when the case condition does not bind cleanly.
pub fn recheck_exact(
    conj: &ConjectureSpec,
    case: usize,
    power: u32,
    env: &mut PrimeEnv,
    exact: &mut ExactEnv,
) -> Result<Option<(u64, u64)>, EvalError> {
    let rule = &conj.cases[case - 1];
    let CondOutcome::Met(bound) = condition(&rule.cond, env) else {
        return Ok(None);
    };
    let lhs = exact.eval_mod(&rule.lhs, &conj.sums, bound, power)?;
    let rhs = exact.eval_mod(&rule.rhs, &conj.sums, bound, power)?;
    Ok(Some((lhs, rhs)))
}
