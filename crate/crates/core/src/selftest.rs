//! Quick invariant checks runnable from the command line.

use crate::exact::ExactEnv;
use crate::modular::is_prime;
use crate::quadform::{classify, represent, RepOutcome, KNOWN_FORMS};
use crate::registry::{parse, verify, CaseStatus, ConjectureSpec, Factor, PrimeEnv, Registry, Status, SumSpec};
use crate::runner::sieve_primes;
use crate::sequences::{seq_direct_all, seq_exact_all, seq_mod, SeqName};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

pub type Check = (&'static str, Result<(), String>);

/// Recurrence against defining sums for n <= 30, and `seq_mod` against exact
/// terms for p <= 97, e <= 3.
pub fn sequence_coherence() -> Result<(), String> {
    for name in SeqName::ALL {
        let rec = seq_exact_all(name.spec(), 30).map_err(|e| e.to_string())?;
        if rec != seq_direct_all(name, 30) {
            return Err(format!("{name}: recurrence differs from defining sum"));
        }
        for p in sieve_primes(3, 97) {
            let exact = seq_exact_all(name.spec(), p as usize - 1).map_err(|e| e.to_string())?;
            for e in 1..=3 {
                let env = PrimeEnv::for_prime(p, e).map_err(|e| e.to_string())?;
                let m = BigInt::from(env.context().modulus());
                let got = seq_mod(name.spec(), env.context());
                for (n, (g, x)) in got.iter().zip(&exact).enumerate() {
                    if Some(*g) != x.mod_floor(&m).to_u64() {
                        return Err(format!("{name} p={p} e={e} n={n}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Whether `p` is excluded by the entry or divides a base of the sum.
fn invalid_at(conj: &ConjectureSpec, sum: &SumSpec, p: u64) -> bool {
    conj.excluded.contains(&p)
        || sum.factors.iter().any(|f| {
            matches!(*f, Factor::RPow { num, den } if num.unsigned_abs() % p == 0 || den.unsigned_abs() % p == 0)
        })
}

/// Every sum of `registry` at every valid prime in `lo..=hi` against the
/// exact oracle.
pub fn oracle_equivalence(registry: &Registry, lo: u64, hi: u64) -> Result<(), String> {
    for p in sieve_primes(lo, hi) {
        let mut env = PrimeEnv::for_prime(p, 3).map_err(|e| e.to_string())?;
        let mut exact = ExactEnv::new(p);
        for conj in &registry.conjectures {
            for sum in conj.sums.iter().filter(|s| !invalid_at(conj, s, p)) {
                let engine = env.sum(sum);
                let oracle = exact.sum_mod(sum, 3);
                match (engine, oracle) {
                    (Ok(a), Ok(b)) if a == b => {}
                    (Err(_), Err(_)) => {}
                    (a, b) => {
                        return Err(format!("{} sum {} at p={p}: engine {a:?}, exact {b:?}", conj.id, sum.id))
                    }
                }
            }
        }
    }
    Ok(())
}

/// Sums at `e = 3` reduce to the values computed at `e = 2` and `e = 1`.
pub fn projection(registry: &Registry, lo: u64, hi: u64) -> Result<(), String> {
    for p in sieve_primes(lo, hi) {
        let mut envs: Vec<PrimeEnv> = (1..=3)
            .map(|e| PrimeEnv::for_prime(p, e))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for conj in &registry.conjectures {
            for sum in &conj.sums {
                let vals: Vec<_> = envs.iter_mut().map(|env| env.sum(sum)).collect();
                if let (Ok(a), Ok(b), Ok(c)) = (&vals[0], &vals[1], &vals[2]) {
                    if c % (p * p) != *b || b % p != *a {
                        return Err(format!("{} sum {} at p={p}", conj.id, sum.id));
                    }
                } else if vals.iter().any(|v| v.is_ok()) {
                    return Err(format!("{} sum {} at p={p}: errors differ by precision", conj.id, sum.id));
                }
            }
        }
    }
    Ok(())
}

pub fn round_trip(source: &str) -> Result<(), String> {
    let first = parse(source).map_err(|e| e.to_string())?;
    let printed = first.to_string();
    let second = parse(&printed).map_err(|e| format!("reparse: {e}"))?;
    if first != second {
        return Err("printed registry parses to a different AST".into());
    }
    Ok(())
}

/// Every known form represents exactly the primes its class rule predicts,
/// with a unique `(x², y²)`.
pub fn representations(limit: u64) -> Result<(), String> {
    for p in sieve_primes(3, limit) {
        for &(form, rule) in KNOWN_FORMS {
            if (form.a * form.b) % p == 0 || !rule.contains(p) {
                continue;
            }
            let reps = represent(form, p);
            if reps.iter().any(|r| !r.satisfies(form, p)) {
                return Err(format!("{form} at p={p}: bad representation"));
            }
            match classify(&reps) {
                RepOutcome::Unique(_) => {}
                RepOutcome::NotRepresented => return Err(format!("{form} at p={p}: none found")),
                RepOutcome::Ambiguous(_) => return Err(format!("{form} at p={p}: ambiguous")),
            }
        }
    }
    Ok(())
}

/// Every proved entry passes at each prime of `lo..=hi`, apart from skips and
/// primes outside every stated case.
pub fn proved(registry: &Registry, lo: u64, hi: u64) -> Result<(), String> {
    for p in (lo..=hi).filter(|&p| is_prime(p)) {
        let mut env = PrimeEnv::for_prime(p, 3).map_err(|e| e.to_string())?;
        for conj in registry.conjectures.iter().filter(|c| c.status == Status::Proved) {
            for r in verify(conj, &mut env) {
                if !matches!(r.status, CaseStatus::Pass | CaseStatus::Skipped | CaseStatus::NoCase) {
                    return Err(format!("{} p={p} case {:?}: {}", conj.id, r.case, r.status));
                }
            }
        }
    }
    Ok(())
}

pub fn run_all(source: &str) -> Vec<Check> {
    let registry = match parse(source) {
        Ok(r) => r,
        Err(e) => return vec![("registry parses", Err(e.to_string()))],
    };
    vec![
        ("registry round trip", round_trip(source)),
        ("sequence coherence", sequence_coherence()),
        ("oracle equivalence p <= 97", oracle_equivalence(&registry, 5, 97)),
        ("projection coherence p <= 97", projection(&registry, 5, 97)),
        ("representations p < 10^4", representations(10_000)),
        ("proved entries p < 300", proved(&registry, 5, 300)),
    ]
}
