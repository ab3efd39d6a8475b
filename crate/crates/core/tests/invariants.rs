use num_bigint::BigInt;
use proptest::prelude::*;

use supercong::exact::ExactEnv;
use supercong::modular::{is_prime, rational_reconstruct};
use supercong::quadform::{classify, represent, FormSpec, RepOutcome};
use supercong::registry::{parse_sum, PrimeEnv};
use supercong::runner::sieve_primes;

const BINOMS: &[&str] = &["C(2k,k)", "C(3k,k)", "C(4k,2k)", "C(6k,3k)", "C(3k,2k)"];
const SEQS: &[&str] = &["", " * seq(f)", " * seq(a)", " * seq(Aprime)", " * seq(S)", " * seq(Q)", " * seq(G)", " * seq(W)"];
const INVS: &[&str] = &["", " * inv(k+1)", " * inv(2k-1)", " * inv((k+1)^2)", " * inv((2k-1)^3)"];

fn prime() -> impl Strategy<Value = u64> {
    let primes = sieve_primes(5, 160);
    (0..primes.len()).prop_map(move |i| primes[i])
}

fn sum_source() -> impl Strategy<Value = String> {
    (
        proptest::collection::vec((0..BINOMS.len(), 1u32..=3), 1..=3),
        0..SEQS.len(),
        0..INVS.len(),
        -30i64..=30,
        1i64..=400,
        prop::bool::ANY,
    )
        .prop_filter("nonzero base", |t| t.3 != 0)
        .prop_map(|(binoms, seq, inv, num, den, leg)| {
            let terms: Vec<String> = binoms.iter().map(|&(i, e)| format!("{}^{e}", BINOMS[i])).collect();
            let prefix = if leg { "leg(-3) * " } else { "" };
            format!(
                "sum s = {prefix}SUM(k)[{}{} * rpow({num}/{den}){}]",
                terms.join(" * "),
                SEQS[seq],
                INVS[inv]
            )
        })
}

fn divides_base(src: &str, p: u64) -> bool {
    let start = src.find("rpow(").unwrap() + 5;
    let end = start + src[start..].find(')').unwrap();
    let (n, d) = src[start..end].split_once('/').unwrap();
    let n: i64 = n.parse().unwrap();
    let d: i64 = d.parse().unwrap();
    n.unsigned_abs().is_multiple_of(p) || d.unsigned_abs().is_multiple_of(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engine_agrees_with_exact_oracle(src in sum_source(), p in prime(), e in 1u32..=3) {
        prop_assume!(!divides_base(&src, p));
        let sum = parse_sum(&src).unwrap();
        let mut env = PrimeEnv::for_prime(p, e).unwrap();
        let mut exact = ExactEnv::new(p);
        match (env.sum(&sum), exact.sum_mod(&sum, e)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b, "{} at p={}", src, p),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{} at p={}: engine {:?}, exact {:?}", src, p, a, b),
        }
    }

    #[test]
    fn higher_precision_projects_down(src in sum_source(), p in prime()) {
        prop_assume!(!divides_base(&src, p));
        let sum = parse_sum(&src).unwrap();
        let vals: Vec<_> = (1..=3).map(|e| PrimeEnv::for_prime(p, e).unwrap().sum(&sum)).collect();
        if let (Ok(a), Ok(b), Ok(c)) = (&vals[0], &vals[1], &vals[2]) {
            prop_assert_eq!(c % (p * p), *b);
            prop_assert_eq!(b % p, *a);
        } else {
            prop_assert!(vals.iter().all(|v| v.is_err()), "{:?}", vals);
        }
    }

    #[test]
    fn printed_sum_reparses(src in sum_source()) {
        let sum = parse_sum(&src).unwrap();
        prop_assert_eq!(parse_sum(&sum.to_string()).unwrap(), sum);
    }

    #[test]
    fn reconstruction_recovers_small_fractions(n in -10_000i64..=10_000, d in 1i64..=10_000, k in 0usize..6) {
        let primes = [1_000_003u64, 1_000_033, 1_000_037, 1_000_039, 1_000_081, 1_000_099];
        let m: BigInt = primes[..=k].iter().map(|&q| BigInt::from(q)).product();
        let bound = BigInt::from(10_000);
        prop_assume!(BigInt::from(2) * &bound * &bound <= m);
        let g = num_integer::gcd(n, d);
        let (n, d) = (n / g, d / g);
        let r = (BigInt::from(n) * BigInt::from(d).modinv(&m).unwrap()) % &m;
        let (rn, rd) = rational_reconstruct(&r, &m, &bound).unwrap();
        prop_assert_eq!((rn, rd), (BigInt::from(n), BigInt::from(d)));
    }

    #[test]
    fn representations_are_valid(p in 5u64..20_000, b in prop::sample::select(vec![2u64, 3, 4, 5, 6, 7, 11, 19, 43])) {
        prop_assume!(is_prime(p) && p != b);
        let form = FormSpec::new(1, b, 1);
        let reps = represent(form, p);
        prop_assert!(reps.iter().all(|r| r.satisfies(form, p)));
        let brute = (0..=((p / b) as f64).sqrt() as u64 + 1).any(|y| {
            let rest = p as i64 - (b * y * y) as i64;
            rest >= 0 && {
                let x = (rest as f64).sqrt() as i64;
                (x - 1..=x + 1).any(|x| x >= 0 && x * x == rest)
            }
        });
        prop_assert_eq!(!reps.is_empty(), brute);
        if brute {
            prop_assert!(matches!(classify(&reps), RepOutcome::Unique(_)), "{:?}", reps);
        }
    }
}
