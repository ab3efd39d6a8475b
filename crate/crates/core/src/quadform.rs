//! Representations `M·p = A·x² + B·y²` by exhaustive scan over `y`.

use std::fmt;

use crate::error::ArithError;
use crate::modular::symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormSpec {
    pub a: u64,
    pub b: u64,
    pub m: u64,
}

impl FormSpec {
    pub const fn new(a: u64, b: u64, m: u64) -> Self {
        Self { a, b, m }
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs = if self.m == 1 {
            "p".to_string()
        } else {
            format!("{}p", self.m)
        };
        let xa = if self.a == 1 { String::new() } else { self.a.to_string() };
        write!(f, "{lhs}={xa}x^2+{}y^2", self.b)
    }
}

/// Which primes a form is expected to represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassRule {
    /// `p mod m` lies in the listed classes.
    Residues(u64, &'static [u64]),
    /// `p` is a nonzero square modulo the given odd prime.
    SquareModulo(u64),
}

impl ClassRule {
    pub fn contains(&self, p: u64) -> bool {
        match *self {
            ClassRule::Residues(m, classes) => classes.contains(&(p % m)),
            ClassRule::SquareModulo(q) => p != q && symbol(p as i64, q) == 1,
        }
    }
}

/// Every form used by a right-hand side, with the primes it should represent.
pub const KNOWN_FORMS: &[(FormSpec, ClassRule)] = &[
    (FormSpec::new(1, 4, 1), ClassRule::Residues(4, &[1])),
    (FormSpec::new(1, 2, 1), ClassRule::Residues(8, &[1, 3])),
    (FormSpec::new(1, 3, 1), ClassRule::Residues(3, &[1])),
    (FormSpec::new(1, 5, 1), ClassRule::Residues(20, &[1, 9])),
    (FormSpec::new(1, 5, 2), ClassRule::Residues(20, &[3, 7])),
    (FormSpec::new(1, 6, 1), ClassRule::Residues(24, &[1, 7])),
    (FormSpec::new(2, 3, 1), ClassRule::Residues(24, &[5, 11])),
    (FormSpec::new(1, 7, 1), ClassRule::Residues(7, &[1, 2, 4])),
    (FormSpec::new(1, 9, 1), ClassRule::Residues(12, &[1])),
    (FormSpec::new(1, 9, 2), ClassRule::Residues(12, &[5])),
    (FormSpec::new(1, 10, 1), ClassRule::Residues(40, &[1, 9, 11, 19])),
    (FormSpec::new(2, 5, 1), ClassRule::Residues(40, &[7, 13, 23, 37])),
    (FormSpec::new(1, 15, 1), ClassRule::Residues(30, &[1, 19])),
    (FormSpec::new(3, 5, 1), ClassRule::Residues(30, &[17, 23])),
    (FormSpec::new(1, 11, 4), ClassRule::SquareModulo(11)),
    (FormSpec::new(1, 19, 4), ClassRule::SquareModulo(19)),
    (FormSpec::new(1, 27, 4), ClassRule::Residues(3, &[1])),
    (FormSpec::new(1, 43, 4), ClassRule::SquareModulo(43)),
    (FormSpec::new(1, 67, 4), ClassRule::SquareModulo(67)),
    (FormSpec::new(1, 163, 4), ClassRule::SquareModulo(163)),
];

/// `(x, y)` with `A·x² + B·y² = M·p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Representation {
    pub x: i64,
    pub y: i64,
}

impl Representation {
    pub fn satisfies(&self, form: FormSpec, p: u64) -> bool {
        let (x, y) = (self.x as i128, self.y as i128);
        form.a as i128 * x * x + form.b as i128 * y * y == (form.m * p) as i128
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All nonnegative `(x, y)` with `A·x² + B·y² = M·p`, in increasing `y`.
pub fn represent(form: FormSpec, p: u64) -> Vec<Representation> {
    let target = form.m * p;
    let mut out = Vec::new();
    for y in 0..=isqrt(target / form.b) {
        let rest = target - form.b * y * y;
        if !rest.is_multiple_of(form.a) {
            continue;
        }
        let x2 = rest / form.a;
        let x = isqrt(x2);
        if x * x == x2 {
            out.push(Representation {
                x: x as i64,
                y: y as i64,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignConstraint {
    None,
    XMod4Eq1,
}

pub fn normalize(rep: Representation, constraint: SignConstraint) -> Result<Representation, ArithError> {
    match constraint {
        SignConstraint::None => Ok(rep),
        SignConstraint::XMod4Eq1 => {
            if rep.x % 2 == 0 {
                return Err(ArithError::NormalizationImpossible { x: rep.x });
            }
            let x = if rep.x.rem_euclid(4) == 1 { rep.x } else { -rep.x };
            Ok(Representation { x, y: rep.y })
        }
    }
}

/// Result of looking up a representation for use as a binding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepOutcome {
    NotRepresented,
    Unique(Representation),
    /// Representations with different `(x², y²)`.
    Ambiguous(Vec<Representation>),
}

pub fn classify(reps: &[Representation]) -> RepOutcome {
    match reps {
        [] => RepOutcome::NotRepresented,
        [first, rest @ ..] => {
            let key = |r: &Representation| (r.x * r.x, r.y * r.y);
            if rest.iter().all(|r| key(r) == key(first)) {
                RepOutcome::Unique(*first)
            } else {
                RepOutcome::Ambiguous(reps.to_vec())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::is_prime;

    fn reps(a: u64, b: u64, m: u64, p: u64) -> Vec<(i64, i64)> {
        represent(FormSpec::new(a, b, m), p)
            .into_iter()
            .map(|r| (r.x, r.y))
            .collect()
    }

    #[test]
    fn scan_examples() {
        assert_eq!(reps(1, 4, 1, 13), vec![(3, 1)]);
        assert_eq!(reps(1, 11, 4, 5), vec![(3, 1)]);
        assert_eq!(reps(2, 3, 1, 5), vec![(1, 1)]);
        assert!(reps(1, 4, 1, 7).is_empty());
    }

    #[test]
    fn normalize_examples() {
        let r = |x, y| Representation { x, y };
        assert_eq!(normalize(r(3, 1), SignConstraint::XMod4Eq1).unwrap(), r(-3, 1));
        assert_eq!(normalize(r(5, 2), SignConstraint::XMod4Eq1).unwrap(), r(5, 2));
        assert_eq!(normalize(r(3, 1), SignConstraint::None).unwrap(), r(3, 1));
        assert_eq!(
            normalize(r(2, 3), SignConstraint::XMod4Eq1),
            Err(ArithError::NormalizationImpossible { x: 2 })
        );
    }

    #[test]
    fn class_rules() {
        assert!(ClassRule::SquareModulo(11).contains(5));
        assert!(!ClassRule::SquareModulo(11).contains(7));
        assert!(!ClassRule::SquareModulo(11).contains(11));
        assert!(ClassRule::Residues(8, &[1, 3]).contains(11));
    }

    #[test]
    fn class_rules_predict_representability() {
        for p in (5..3000).filter(|&p| is_prime(p)) {
            for &(form, rule) in KNOWN_FORMS {
                if (form.a * form.b) % p == 0 {
                    continue;
                }
                assert_eq!(!represent(form, p).is_empty(), rule.contains(p), "{form} at {p}");
            }
        }
    }

    #[test]
    fn classify_detects_ambiguity() {
        let r = |x, y| Representation { x, y };
        assert_eq!(classify(&[]), RepOutcome::NotRepresented);
        assert_eq!(classify(&[r(3, 1)]), RepOutcome::Unique(r(3, 1)));
        assert!(matches!(classify(&[r(1, 2), r(2, 1)]), RepOutcome::Ambiguous(_)));
    }

    #[test]
    fn found_representations_are_exact() {
        for p in (3..3000).filter(|&p| is_prime(p)) {
            for &(form, _) in KNOWN_FORMS {
                for rep in represent(form, p) {
                    assert!(rep.satisfies(form, p));
                    let x2 = (rep.x * rep.x) as i128;
                    let b = form.b as i128;
                    assert_eq!((form.a as i128 * x2 - (form.m * p) as i128).rem_euclid(b), 0);
                }
            }
        }
    }
}
