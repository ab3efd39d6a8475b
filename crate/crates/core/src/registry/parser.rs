//! Lexer and recursive-descent parser for the registry language.

use std::collections::HashSet;

use super::ast::*;
use crate::error::ParseError;
use crate::quadform::FormSpec;
use crate::sequences::SeqName;
use crate::special::{FloorAtom, FloorExpr, RatioBinom};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i128),
    Ident(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] = &[
    "===", "==", "&&", "{", "}", "(", ")", "[", "]", ",", ":", ";", "*", "/", "+", "-", "^", "%",
    "=",
];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| ParseError { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let tok = if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse()
                .map_err(|_| err(line, col, format!("integer `{text}` is too large")))?;
            col += i - start;
            Tok::Int(n)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            Tok::Ident(chars[start..i].iter().collect())
        } else if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(err(line, col, "unterminated string".into()));
            }
            let s: String = chars[start..i].iter().collect();
            i += 1;
            col += s.chars().count() + 2;
            Tok::Str(s)
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| err(line, col, format!("unexpected character `{c}`")))?;
            i += sym.len();
            col += sym.len();
            Tok::Sym(sym)
        };
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Sums visible to `S(..)`, and whether `x`, `y` are bound.
    sums: Option<HashSet<String>>,
    rep_bound: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Self {
            toks: lex(src)?,
            pos: 0,
            sums: None,
            rep_bound: true,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Int(n) => format!("`{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn expect_ident(&mut self, s: &str) -> PResult<()> {
        if self.at_ident(s) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected a name, found {}", self.describe())),
        }
    }

    fn uint(&mut self) -> PResult<i128> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error(format!("expected an integer, found {}", self.describe())),
        }
    }

    fn small<T: TryFrom<i128>>(&mut self, n: i128) -> PResult<T> {
        T::try_from(n).or_else(|_| self.error(format!("integer {n} is out of range")))
    }

    fn sint(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        let n = self.uint()?;
        let n = if neg { -n } else { n };
        self.small(n)
    }

    fn positive(&mut self) -> PResult<u64> {
        let n = self.uint()?;
        if n == 0 {
            return self.error("expected a positive integer");
        }
        self.small(n)
    }

    // ---- file level ----

    fn registry(&mut self) -> PResult<Registry> {
        let mut reg = Registry::default();
        let mut seen = HashSet::new();
        while *self.peek() != Tok::Eof {
            let conj = self.conjecture()?;
            if !seen.insert(conj.id.clone()) {
                return self.error(format!("duplicate conjecture \"{}\"", conj.id));
            }
            reg.conjectures.push(conj);
        }
        Ok(reg)
    }

    fn conjecture(&mut self) -> PResult<ConjectureSpec> {
        self.expect_ident("conjecture")?;
        let id = match self.bump() {
            Tok::Str(s) if !s.is_empty() => s,
            _ => {
                self.pos -= 1;
                return self.error("expected a conjecture id string");
            }
        };
        let status = if self.at_ident("proved") {
            self.bump();
            Status::Proved
        } else {
            if self.at_ident("conjectured") {
                self.bump();
            }
            Status::Conjectured
        };
        self.expect_sym("{")?;
        let mut conj = ConjectureSpec {
            id,
            status,
            excluded: Vec::new(),
            sums: Vec::new(),
            cases: Vec::new(),
        };
        self.sums = Some(HashSet::new());
        loop {
            if self.eat_sym("}") {
                break;
            }
            if self.at_ident("exclude") {
                self.bump();
                loop {
                    let p = self.positive()?;
                    conj.excluded.push(p);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            } else if self.at_ident("sum") {
                let sum = self.sum_def()?;
                if conj.sum(&sum.id).is_some() {
                    return self.error(format!("sum `{}` is defined twice", sum.id));
                }
                self.sums.as_mut().expect("inside a conjecture").insert(sum.id.clone());
                conj.sums.push(sum);
            } else if self.at_ident("case") {
                conj.cases.push(self.case()?);
            } else {
                return self.error(format!(
                    "expected `exclude`, `sum`, `case` or `}}`, found {}",
                    self.describe()
                ));
            }
        }
        self.sums = None;
        Ok(conj)
    }

    fn sum_def(&mut self) -> PResult<SumSpec> {
        self.expect_ident("sum")?;
        let id = self.ident()?;
        self.expect_sym("=")?;
        let prefix = if self.at_ident("SUM") {
            None
        } else {
            let prefix = self.prefix()?;
            self.expect_sym("*")?;
            Some(prefix)
        };
        self.expect_ident("SUM")?;
        self.expect_sym("(")?;
        self.expect_ident("k")?;
        self.expect_sym(")")?;
        self.expect_sym("[")?;
        let mut factors = vec![self.factor()?];
        while self.eat_sym("*") {
            factors.push(self.factor()?);
        }
        self.expect_sym("]")?;
        Ok(SumSpec {
            id,
            prefix,
            factors,
        })
    }

    fn prefix(&mut self) -> PResult<Prefix> {
        match self.peek() {
            Tok::Ident(s) if s == "leg" => {
                self.bump();
                self.expect_sym("(")?;
                let a = self.sint()?;
                self.expect_sym(")")?;
                Ok(Prefix::Leg(a))
            }
            Tok::Ident(s) if s.starts_with("sgn") => match self.sign()? {
                Expr::Sgn(f) => Ok(Prefix::Sgn(f)),
                _ => unreachable!("sign() returns Sgn"),
            },
            _ => self.error(format!(
                "expected `leg(..)`, `sgn_half`, `sgn_floorp4` or `sgn(..)`, found {}",
                self.describe()
            )),
        }
    }

    fn factor(&mut self) -> PResult<Factor> {
        let name = self.ident()?;
        self.expect_sym("(")?;
        let f = match name.as_str() {
            "C" => {
                let top = self.lin()?;
                self.expect_sym(",")?;
                let bot = self.lin()?;
                self.expect_sym(")")?;
                let pow = if self.eat_sym("^") {
                    let n = self.positive()?;
                    self.small(n as i128)?
                } else {
                    1
                };
                return Ok(Factor::Binom { top, bot, pow });
            }
            "seq" => {
                let n = self.ident()?;
                match n.parse::<SeqName>() {
                    Ok(s) => Factor::Seq(s),
                    Err(e) => {
                        self.pos -= 1;
                        return self.error(e);
                    }
                }
            }
            "rpow" => {
                let num = self.sint()?;
                let den = if self.eat_sym("/") {
                    let d = self.positive()?;
                    self.small(d as i128)?
                } else {
                    1
                };
                if num == 0 {
                    return self.error("rpow base must be nonzero");
                }
                Factor::RPow { num, den }
            }
            "inv" => {
                let (lin, pow) = if self.at_sym("(") {
                    self.bump();
                    let lin = self.lin()?;
                    self.expect_sym(")")?;
                    self.expect_sym("^")?;
                    (lin, self.positive()?)
                } else {
                    (self.lin()?, 1)
                };
                let poly = match (lin.a, lin.b) {
                    (2, -1) => Poly::TwoKMinusOne,
                    (1, 1) => Poly::KPlusOne,
                    _ => return self.error("inv(..) supports only 2k-1 and k+1"),
                };
                if !(1..=3).contains(&pow) {
                    return self.error("inv(..) exponent must be 1, 2 or 3");
                }
                Factor::InvPoly {
                    poly,
                    pow: pow as u32,
                }
            }
            other => {
                return self.error(format!("unknown term factor `{other}`"));
            }
        };
        self.expect_sym(")")?;
        Ok(f)
    }

    /// `a*k + b` written as a sum of `INT`, `INTk` and `k` terms.
    fn lin(&mut self) -> PResult<Lin> {
        let mut lin = Lin::new(0, 0);
        let mut first = true;
        loop {
            let sign = if self.eat_sym("-") {
                -1
            } else if first || self.eat_sym("+") {
                1
            } else {
                break;
            };
            first = false;
            let coef = if let Tok::Int(_) = self.peek() {
                let n = self.uint()?;
                Some(self.small::<i64>(n)?)
            } else {
                None
            };
            if self.at_ident("k") {
                self.bump();
                lin.a += sign * coef.unwrap_or(1);
            } else if let Some(c) = coef {
                lin.b += sign * c;
            } else {
                return self.error(format!("expected `k` or an integer, found {}", self.describe()));
            }
        }
        Ok(lin)
    }

    fn case(&mut self) -> PResult<CaseRule> {
        self.expect_ident("case")?;
        let cond = self.condition()?;
        self.expect_sym(":")?;
        self.rep_bound = cond.rep().is_some();
        let lhs = self.expr()?;
        self.expect_sym("===")?;
        let rhs = self.expr()?;
        self.expect_ident("mod")?;
        self.expect_ident("p")?;
        let power = if self.eat_sym("^") {
            let n = self.uint()?;
            if !(1..=3).contains(&n) {
                return self.error("modulus exponent must be 1, 2 or 3");
            }
            n as u32
        } else {
            1
        };
        let suspect = if self.at_ident("suspect") {
            self.bump();
            Some(self.expr()?)
        } else {
            None
        };
        self.rep_bound = true;
        Ok(CaseRule {
            cond,
            lhs,
            rhs,
            power,
            suspect,
        })
    }

    fn condition(&mut self) -> PResult<Condition> {
        if self.at_ident("always") {
            self.bump();
            return Ok(Condition::default());
        }
        let mut atoms = vec![self.atom()?];
        while self.eat_sym("&&") {
            atoms.push(self.atom()?);
        }
        if atoms.iter().filter(|a| matches!(a, Atom::Rep { .. })).count() > 1 {
            return self.error("at most one rep(..) per condition");
        }
        Ok(Condition { atoms })
    }

    fn atom(&mut self) -> PResult<Atom> {
        let name = self.ident()?;
        match name.as_str() {
            "p" => {
                self.expect_sym("%")?;
                let m = self.positive()?;
                self.expect_ident("in")?;
                self.expect_sym("{")?;
                let mut set = Vec::new();
                loop {
                    let r: u64 = {
                        let n = self.uint()?;
                        self.small(n)?
                    };
                    if r >= m {
                        return self.error(format!("residue {r} is not below {m}"));
                    }
                    set.push(r);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym("}")?;
                Ok(Atom::Residue { m, set })
            }
            "leg" => {
                self.expect_sym("(")?;
                let a = self.sint()?;
                self.expect_sym(")")?;
                self.expect_sym("==")?;
                let v = self.sint()?;
                if v != 1 && v != -1 {
                    return self.error("a symbol condition compares with 1 or -1");
                }
                Ok(Atom::Symbol { a, value: v as i8 })
            }
            "rep" => {
                self.expect_sym("(")?;
                let a = self.positive()?;
                self.expect_sym(",")?;
                let b = self.positive()?;
                self.expect_sym(",")?;
                let m = self.positive()?;
                self.expect_sym(")")?;
                let xmod4 = if self.at_ident("xmod4") {
                    self.bump();
                    true
                } else {
                    false
                };
                Ok(Atom::Rep {
                    form: FormSpec::new(a, b, m),
                    xmod4,
                })
            }
            other => {
                self.pos -= 1;
                self.error(format!("unknown condition `{other}`"))
            }
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_sym("*") {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_sym("/") {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.primary()?;
        if self.eat_sym("^") {
            let paren = self.eat_sym("(");
            let e = self.sint()?;
            if paren {
                self.expect_sym(")")?;
            }
            if e == 0 {
                return self.error("exponent 0 is not allowed");
            }
            return Ok(Expr::Pow(Box::new(base), self.small(e as i128)?));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let simple = match name.as_str() {
                    "p" => Some(Expr::P),
                    "x" | "y" => {
                        if !self.rep_bound {
                            return self.error(format!(
                                "`{name}` is not bound: the condition has no rep(..)"
                            ));
                        }
                        Some(if name == "x" { Expr::X } else { Expr::Y })
                    }
                    "R1" => Some(Expr::R1),
                    "R2" => Some(Expr::R2),
                    "R3" => Some(Expr::R3),
                    "R7" => Some(Expr::R7),
                    "tP" => Some(Expr::Ratio(RatioBinom::T)),
                    "rP" => Some(Expr::Ratio(RatioBinom::R)),
                    "sP" => Some(Expr::Ratio(RatioBinom::S)),
                    "pw5m" => Some(Expr::Pw5m),
                    _ => None,
                };
                if let Some(e) = simple {
                    self.bump();
                    return Ok(e);
                }
                if name.starts_with("sgn") {
                    return self.sign();
                }
                self.bump();
                if !self.at_sym("(") {
                    self.pos -= 1;
                    return self.error(format!("unknown symbol `{name}`"));
                }
                self.bump();
                let e = match name.as_str() {
                    "S" => {
                        let id = self.ident()?;
                        if let Some(sums) = &self.sums {
                            if !sums.contains(&id) {
                                self.pos -= 1;
                                return self.error(format!("sum `{id}` is not defined"));
                            }
                        }
                        Expr::Sum(id)
                    }
                    "FB" => {
                        let top = self.floor()?;
                        self.expect_sym(",")?;
                        let bot = self.floor()?;
                        Expr::FB(top, bot)
                    }
                    "leg" => Expr::Leg(self.sint()?),
                    "H" => {
                        self.expect_ident("p")?;
                        self.expect_sym("/")?;
                        Expr::H(self.positive()?)
                    }
                    "q" => Expr::Q(self.sint()?),
                    "inv" => Expr::Inv(Box::new(self.expr()?)),
                    other => {
                        self.pos -= 2;
                        return self.error(format!("unknown function `{other}`"));
                    }
                };
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => self.error(format!("expected an expression, found {}", self.describe())),
        }
    }

    fn sign(&mut self) -> PResult<Expr> {
        let name = self.ident()?;
        match name.as_str() {
            "sgn_half" => Ok(Expr::Sgn(Expr::half())),
            "sgn_floorp4" => Ok(Expr::Sgn(Expr::floor_p4())),
            "sgn" => {
                self.expect_sym("(")?;
                let f = self.floor()?;
                self.expect_sym(")")?;
                Ok(Expr::Sgn(f))
            }
            other => {
                self.pos -= 1;
                self.error(format!("unknown sign atom `{other}`"))
            }
        }
    }

    /// Sum of `[..]`, `INT*[..]` and integer terms.
    fn floor(&mut self) -> PResult<FloorExpr> {
        let mut out = FloorExpr::constant(0);
        let mut first = true;
        loop {
            let sign = if self.eat_sym("-") {
                -1
            } else if first || self.eat_sym("+") {
                1
            } else {
                break;
            };
            first = false;
            if self.at_sym("[") {
                out.terms.push((sign, self.floor_atom()?));
                continue;
            }
            let n = self.uint()?;
            let n: i64 = self.small(n)?;
            if self.eat_sym("*") {
                out.terms.push((sign * n, self.floor_atom()?));
            } else {
                out.constant += sign * n;
            }
        }
        Ok(out)
    }

    /// `[ap/m]` or `[(ap±b)/m]`.
    fn floor_atom(&mut self) -> PResult<FloorAtom> {
        self.expect_sym("[")?;
        let paren = self.eat_sym("(");
        let a = if let Tok::Int(_) = self.peek() {
            let n = self.uint()?;
            self.small(n)?
        } else {
            1
        };
        self.expect_ident("p")?;
        let mut b = 0;
        if paren {
            if self.eat_sym("+") {
                let n = self.uint()?;
                b = self.small(n)?;
            } else if self.eat_sym("-") {
                let n = self.uint()?;
                b = -self.small::<i64>(n)?;
            }
            self.expect_sym(")")?;
        }
        self.expect_sym("/")?;
        let m = self.positive()?;
        self.expect_sym("]")?;
        Ok(FloorAtom::new(a, b, self.small(m as i128)?))
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.describe()))
        }
    }
}

/// Parse a whole registry file.
pub fn parse(src: &str) -> Result<Registry, ParseError> {
    let mut p = Parser::new(src)?;
    let reg = p.registry()?;
    p.finish()?;
    Ok(reg)
}

/// Parse a standalone `sum NAME = ...` definition.
pub fn parse_sum(src: &str) -> Result<SumSpec, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.sum_def()?;
    p.finish()?;
    Ok(s)
}

/// Parse a standalone case condition.
pub fn parse_condition(src: &str) -> Result<Condition, ParseError> {
    let mut p = Parser::new(src)?;
    let c = p.condition()?;
    p.finish()?;
    Ok(c)
}

/// Parse a standalone expression. `S(..)` references are not checked.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}
