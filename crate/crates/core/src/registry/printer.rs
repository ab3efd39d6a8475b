//! Canonical text form of a parsed registry.

use std::fmt::{self, Write};

use super::ast::*;
use crate::special::{FloorExpr, RatioBinom};

impl fmt::Display for Lin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (0, b) => write!(f, "{b}"),
            (a, b) => {
                match a {
                    1 => f.write_str("k")?,
                    -1 => f.write_str("-k")?,
                    a => write!(f, "{a}k")?,
                }
                match b {
                    0 => Ok(()),
                    b if b > 0 => write!(f, "+{b}"),
                    b => write!(f, "{b}"),
                }
            }
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Binom { top, bot, pow } => {
                write!(f, "C({top},{bot})")?;
                if *pow != 1 {
                    write!(f, "^{pow}")?;
                }
                Ok(())
            }
            Factor::Seq(s) => write!(f, "seq({s})"),
            Factor::RPow { num, den: 1 } => write!(f, "rpow({num})"),
            Factor::RPow { num, den } => write!(f, "rpow({num}/{den})"),
            Factor::InvPoly { poly, pow } => {
                let lin = match poly {
                    Poly::TwoKMinusOne => Lin::new(2, -1),
                    Poly::KPlusOne => Lin::new(1, 1),
                };
                if *pow == 1 {
                    write!(f, "inv({lin})")
                } else {
                    write!(f, "inv(({lin})^{pow})")
                }
            }
        }
    }
}

fn sign_atom(fl: &FloorExpr) -> String {
    if *fl == Expr::half() {
        "sgn_half".into()
    } else if *fl == Expr::floor_p4() {
        "sgn_floorp4".into()
    } else {
        format!("sgn({fl})")
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prefix::Leg(a) => write!(f, "leg({a})"),
            Prefix::Sgn(fl) => f.write_str(&sign_atom(fl)),
        }
    }
}

impl fmt::Display for SumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sum {} = ", self.id)?;
        if let Some(prefix) = &self.prefix {
            write!(f, "{prefix} * ")?;
        }
        f.write_str("SUM(k)[")?;
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{factor}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Residue { m, set } => {
                let set: Vec<String> = set.iter().map(u64::to_string).collect();
                write!(f, "p%{m} in {{{}}}", set.join(","))
            }
            Atom::Symbol { a, value } => write!(f, "leg({a})=={value}"),
            Atom::Rep { form, xmod4 } => {
                write!(f, "rep({},{},{})", form.a, form.b, form.m)?;
                if *xmod4 {
                    f.write_str(" xmod4")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("always");
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

impl fmt::Display for CaseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let modulus = if self.power == 1 {
            "p".to_string()
        } else {
            format!("p^{}", self.power)
        };
        write!(f, "case {} : {} === {} mod {modulus}", self.cond, self.lhs, self.rhs)?;
        if let Some(s) = &self.suspect {
            write!(f, " suspect {s}")?;
        }
        Ok(())
    }
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, out: &mut String, min: u8) {
        if self.prec() < min {
            out.push('(');
            self.write_at(out, 0);
            out.push(')');
            return;
        }
        let binary = |out: &mut String, a: &Expr, op: &str, b: &Expr, p: u8| {
            a.write_at(out, p);
            out.push_str(op);
            b.write_at(out, p + 1);
        };
        match self {
            Expr::Int(n) if *n < 0 => {
                let _ = write!(out, "({n})");
            }
            Expr::Int(n) => {
                let _ = write!(out, "{n}");
            }
            Expr::P => out.push('p'),
            Expr::X => out.push('x'),
            Expr::Y => out.push('y'),
            Expr::Sum(id) => {
                let _ = write!(out, "S({id})");
            }
            Expr::R1 => out.push_str("R1"),
            Expr::R2 => out.push_str("R2"),
            Expr::R3 => out.push_str("R3"),
            Expr::R7 => out.push_str("R7"),
            Expr::Ratio(r) => out.push_str(match r {
                RatioBinom::T => "tP",
                RatioBinom::R => "rP",
                RatioBinom::S => "sP",
            }),
            Expr::FB(t, b) => {
                let _ = write!(out, "FB({t},{b})");
            }
            Expr::Leg(a) => {
                let _ = write!(out, "leg({a})");
            }
            Expr::Sgn(fl) => out.push_str(&sign_atom(fl)),
            Expr::H(d) => {
                let _ = write!(out, "H(p/{d})");
            }
            Expr::Q(b) => {
                let _ = write!(out, "q({b})");
            }
            Expr::Pw5m => out.push_str("pw5m"),
            Expr::Inv(a) => {
                out.push_str("inv(");
                a.write_at(out, 0);
                out.push(')');
            }
            Expr::Neg(a) => {
                out.push('-');
                a.write_at(out, 3);
            }
            Expr::Add(a, b) => binary(out, a, "+", b, 1),
            Expr::Sub(a, b) => binary(out, a, "-", b, 1),
            Expr::Mul(a, b) => binary(out, a, "*", b, 2),
            Expr::Div(a, b) => binary(out, a, "/", b, 2),
            Expr::Pow(a, e) => {
                a.write_at(out, 5);
                let _ = write!(out, "^{e}");
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_at(&mut s, 0);
        f.write_str(&s)
    }
}

impl fmt::Display for ConjectureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "conjecture \"{}\" {} {{", self.id, self.status.as_str())?;
        if !self.excluded.is_empty() {
            let ex: Vec<String> = self.excluded.iter().map(u64::to_string).collect();
            writeln!(f, "  exclude {}", ex.join(", "))?;
        }
        for s in &self.sums {
            writeln!(f, "  {s}")?;
        }
        for c in &self.cases {
            writeln!(f, "  {c}")?;
        }
        f.write_str("}\n")
    }
}

impl fmt::Display for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conjectures.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
