use crate::quadform::FormSpec;
use crate::sequences::SeqName;
use crate::special::{FloorAtom, FloorExpr, RatioBinom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Proved,
    Conjectured,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Conjectured => "conjectured",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Registry {
    pub conjectures: Vec<ConjectureSpec>,
}

impl Registry {
    pub fn get(&self, id: &str) -> Option<&ConjectureSpec> {
        self.conjectures.iter().find(|c| c.id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureSpec {
    pub id: String,
    pub status: Status,
    pub excluded: Vec<u64>,
    pub sums: Vec<SumSpec>,
    pub cases: Vec<CaseRule>,
}

impl ConjectureSpec {
    pub fn sum(&self, id: &str) -> Option<&SumSpec> {
        self.sums.iter().find(|s| s.id == id)
    }
}

/// `a·k + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lin {
    pub a: i64,
    pub b: i64,
}

impl Lin {
    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    pub fn at(&self, k: i64) -> i64 {
        self.a * k + self.b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Poly {
    /// `2k − 1`
    TwoKMinusOne,
    /// `k + 1`
    KPlusOne,
}

impl Poly {
    pub fn at(&self, k: i64) -> i64 {
        match self {
            Poly::TwoKMinusOne => 2 * k - 1,
            Poly::KPlusOne => k + 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Binom { top: Lin, bot: Lin, pow: u32 },
    Seq(SeqName),
    /// `(num/den)^k`
    RPow { num: i64, den: i64 },
    /// `poly(k)^(−pow)`
    InvPoly { poly: Poly, pow: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prefix {
    Leg(i64),
    Sgn(FloorExpr),
}

/// `prefix · Σ_{k=0}^{p−1} Π factors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSpec {
    pub id: String,
    pub prefix: Option<Prefix>,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Residue { m: u64, set: Vec<u64> },
    Symbol { a: i64, value: i8 },
    /// Binds `x`, `y`; with `xmod4` the sign of `x` is fixed by `x ≡ 1 (mod 4)`.
    Rep { form: FormSpec, xmod4: bool },
}

/// Conjunction of atoms; empty means `always`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Condition {
    pub atoms: Vec<Atom>,
}

impl Condition {
    pub fn rep(&self) -> Option<(FormSpec, bool)> {
        self.atoms.iter().find_map(|a| match a {
            Atom::Rep { form, xmod4 } => Some((*form, *xmod4)),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseRule {
    pub cond: Condition,
    pub lhs: Expr,
    pub rhs: Expr,
    pub power: u32,
    /// Alternative right-hand side, evaluated and reported alongside.
    pub suspect: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i128),
    P,
    X,
    Y,
    Sum(String),
    R1,
    R2,
    R3,
    R7,
    Ratio(RatioBinom),
    FB(FloorExpr, FloorExpr),
    Leg(i64),
    Sgn(FloorExpr),
    /// `H_[p/d]`
    H(u64),
    /// `b^(p−1) − 1`
    Q(i64),
    /// `5^(−[p/3])`
    Pw5m,
    Inv(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    /// `[(p−1)/2]`, the exponent of `sgn_half`.
    pub fn half() -> FloorExpr {
        FloorExpr::atom(FloorAtom::new(1, -1, 2))
    }

    /// `[p/4]`, the exponent of `sgn_floorp4`.
    pub fn floor_p4() -> FloorExpr {
        FloorExpr::atom(FloorAtom::new(1, 0, 4))
    }

    /// Visit every node, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Inv(a) | Expr::Neg(a) | Expr::Pow(a, _) => a.walk(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }

    /// Exact value if the expression mentions no prime-dependent atom.
    pub fn constant_value(&self) -> Option<(i128, i128)> {
        fn norm(n: i128, d: i128) -> Option<(i128, i128)> {
            if d == 0 {
                return None;
            }
            let g = gcd(n.unsigned_abs(), d.unsigned_abs()) as i128;
            let s = if d < 0 { -1 } else { 1 };
            Some((s * n / g, s * d / g))
        }
        fn gcd(a: u128, b: u128) -> u128 {
            if b == 0 {
                a.max(1)
            } else {
                gcd(b, a % b)
            }
        }
        match self {
            Expr::Int(n) => Some((*n, 1)),
            Expr::Neg(a) => a.constant_value().map(|(n, d)| (-n, d)),
            Expr::Inv(a) => a.constant_value().and_then(|(n, d)| norm(d, n)),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (n1, d1) = a.constant_value()?;
                let (n2, d2) = b.constant_value()?;
                let n2 = if matches!(self, Expr::Sub(..)) { -n2 } else { n2 };
                norm(n1.checked_mul(d2)?.checked_add(n2.checked_mul(d1)?)?, d1.checked_mul(d2)?)
            }
            Expr::Mul(a, b) => {
                let (n1, d1) = a.constant_value()?;
                let (n2, d2) = b.constant_value()?;
                norm(n1.checked_mul(n2)?, d1.checked_mul(d2)?)
            }
            Expr::Div(a, b) => {
                let (n1, d1) = a.constant_value()?;
                let (n2, d2) = b.constant_value()?;
                norm(n1.checked_mul(d2)?, d1.checked_mul(n2)?)
            }
            Expr::Pow(a, e) => {
                let (n, d) = a.constant_value()?;
                let (n, d) = if *e < 0 { norm(d, n)? } else { (n, d) };
                let e = e.unsigned_abs();
                norm(n.checked_pow(e)?, d.checked_pow(e)?)
            }
            _ => None,
        }
    }

    /// Nonzero integers that this expression divides by, for constant
    /// divisors only.
    pub fn constant_divisors(&self) -> Vec<i128> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            let divisor = match e {
                Expr::Div(_, b) => b.constant_value(),
                Expr::Inv(a) => a.constant_value(),
                Expr::Pow(a, n) if *n < 0 => a.constant_value(),
                _ => None,
            };
            if let Some((n, d)) = divisor {
                out.push(n);
                out.push(d);
            }
            if let Some((_, d)) = e.constant_value() {
                out.push(d);
            }
        });
        out.retain(|&v| v != 0 && v != 1 && v != -1);
        out
    }

    /// Names of the sums referenced.
    pub fn sums(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Sum(id) = e {
                out.push(id.as_str());
            }
        });
        out
    }

    /// Whether `x` or `y` occurs.
    pub fn uses_rep(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::X | Expr::Y));
        found
    }
}
