//! The two expression DSLs: virtual bundles and spectra.
//!
//! Bundle grammar (EBNF):
//!
//! ```text
//! bundle   := term { ("+" | "-" | "[+]") term }
//! term     := "-" term | scaled
//! scaled   := int "*" primary | primary
//! primary  := "sigma" | "V_O3" | "V_SO3" | "V_U1" | "V_SU2"
//!           | "R" "^" int | int
//!           | ("phi" | "i1" | "i2" | "p") "^" "*" "(" bundle ")"
//!           | "tensor" "(" bundle "," bundle ")"
//!           | "(" bundle ")"
//! ```
//!
//! `R^k` and bare integers denote trivial bundles of that rank; they take
//! whatever base the surrounding expression forces (a standalone trivial
//! bundle lives over the point). `+` is the internal Whitney sum and
//! requires one common base; `[+]` is the external sum over the product of
//! the bases. `k*e` is the k-fold sum and `-` the virtual negation.
//!
//! Spectrum grammar:
//!
//! ```text
//! spectrum := satom { "^" satom }
//! satom    := "MTSpin" | "MTSpinC" | "MTSpinH" | "MTPinHplus"
//!           | "MTPinHminus" | "MTPinMinus" | "MTPinC" | "S"
//!           | "Thom" "(" space "," bundle ")"
//!           | "Plus" "(" space ")" | "Red" "(" space ")"
//!           | "Susp" "(" int "," spectrum ")"
//!           | "Smash" "(" spectrum "," spectrum ")"
//!           | "(" spectrum ")"
//! space    := "Point" | factor { "x" factor }
//! factor   := "BZ2" | "BU1" | "BSU2" | "HPinf" | "BSO" digits | "BO" digits
//! ```
//!
//! Cohomology classes (used in certificate files) are sums of monomials:
//! `1 + a + a^2*w2bar`.

use std::fmt;

use smithcalc_core::bundles::{
    maps, pullback, sigma, tensor_line, v_o, v_so, v_su2, v_u1, Space, SpaceFactor,
    VirtualBundle,
};
use smithcalc_core::f2algebra::{F2Element, Ring, UnitSeries};
use smithcalc_core::rewriter::{SpectrumExpr, SpectrumName};

// ---------------------------------------------------------------------------
// Errors and lexing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    /// The external-sum operator `[+]`.
    ExtPlus,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(k) => write!(f, "`{k}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::ExtPlus => f.write_str("`[+]`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: u32,
    column: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut column = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcolumn) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c.is_ascii_digit() {
            let mut value: i64 = 0;
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                value = value * 10 + i64::from(bump(&mut chars) as u8 - b'0');
            }
            out.push(Spanned {
                tok: Tok::Int(value),
                line: tline,
                column: tcolumn,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                name.push(bump(&mut chars));
            }
            out.push(Spanned {
                tok: Tok::Ident(name),
                line: tline,
                column: tcolumn,
            });
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '[' => {
                bump(&mut chars);
                if chars.peek() != Some(&'+') {
                    return Err(ParseError {
                        line: tline,
                        column: tcolumn,
                        message: "expected `[+]`".into(),
                    });
                }
                bump(&mut chars);
                if chars.peek() != Some(&']') {
                    return Err(ParseError {
                        line: tline,
                        column: tcolumn,
                        message: "expected `[+]`".into(),
                    });
                }
                Tok::ExtPlus
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    column: tcolumn,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        bump(&mut chars);
        out.push(Spanned {
            tok,
            line: tline,
            column: tcolumn,
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Cursor, ParseError> {
        Ok(Cursor {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (u32, u32) {
        (self.toks[self.pos].line, self.toks[self.pos].column)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        Cursor::error_at(self.here(), message)
    }

    /// An error anchored at an already-consumed token's position.
    fn error_at((line, column): (u32, u32), message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        if self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing {}", self.peek())))
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let negative = if *self.peek() == Tok::Minus {
            self.advance();
            true
        } else {
            false
        };
        match self.advance() {
            Tok::Int(k) => Ok(if negative { -k } else { k }),
            other => Err(self.error(format!("expected an integer, found {other}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Bundle AST
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PullName {
    Phi,
    I1,
    I2,
    P,
}

impl PullName {
    fn name(self) -> &'static str {
        match self {
            PullName::Phi => "phi",
            PullName::I1 => "i1",
            PullName::I2 => "i2",
            PullName::P => "p",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleAst {
    Sigma,
    VO3,
    VSO3,
    VU1,
    VSU2,
    /// `R^k`, the trivial bundle of rank k.
    R(i64),
    /// A bare integer literal, also a trivial bundle of that rank.
    Int(i64),
    Neg(Box<BundleAst>),
    Sum(Box<BundleAst>, Box<BundleAst>),
    ExtSum(Box<BundleAst>, Box<BundleAst>),
    Scale(i64, Box<BundleAst>),
    Pull(PullName, Box<BundleAst>),
    Tensor(Box<BundleAst>, Box<BundleAst>),
}

pub fn parse_bundle_ast(text: &str) -> Result<BundleAst, ParseError> {
    let mut cur = Cursor::new(text)?;
    let ast = bundle_expr(&mut cur)?;
    cur.expect_end()?;
    Ok(ast)
}

fn bundle_expr(cur: &mut Cursor) -> Result<BundleAst, ParseError> {
    let mut acc = bundle_term(cur)?;
    loop {
        match cur.peek() {
            Tok::Plus => {
                cur.advance();
                let rhs = bundle_term(cur)?;
                acc = BundleAst::Sum(Box::new(acc), Box::new(rhs));
            }
            Tok::Minus => {
                cur.advance();
                let rhs = bundle_term(cur)?;
                acc = BundleAst::Sum(Box::new(acc), Box::new(BundleAst::Neg(Box::new(rhs))));
            }
            Tok::ExtPlus => {
                cur.advance();
                let rhs = bundle_term(cur)?;
                acc = BundleAst::ExtSum(Box::new(acc), Box::new(rhs));
            }
            _ => return Ok(acc),
        }
    }
}

fn bundle_term(cur: &mut Cursor) -> Result<BundleAst, ParseError> {
    if *cur.peek() == Tok::Minus {
        cur.advance();
        let inner = bundle_term(cur)?;
        return Ok(BundleAst::Neg(Box::new(inner)));
    }
    // `k * primary` — an integer followed by `*` is a scale.
    if let Tok::Int(k) = *cur.peek() {
        if self_lookahead_is_star(cur) {
            cur.advance();
            cur.expect(&Tok::Star)?;
            let inner = bundle_primary(cur)?;
            return Ok(BundleAst::Scale(k, Box::new(inner)));
        }
    }
    bundle_primary(cur)
}

fn self_lookahead_is_star(cur: &Cursor) -> bool {
    cur.toks
        .get(cur.pos + 1)
        .map(|s| s.tok == Tok::Star)
        .unwrap_or(false)
}

fn bundle_primary(cur: &mut Cursor) -> Result<BundleAst, ParseError> {
    match cur.peek().clone() {
        Tok::LParen => {
            cur.advance();
            let inner = bundle_expr(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(inner)
        }
        Tok::Int(k) => {
            cur.advance();
            Ok(BundleAst::Int(k))
        }
        Tok::Ident(name) => {
            let at = cur.here();
            cur.advance();
            match name.as_str() {
                "sigma" => Ok(BundleAst::Sigma),
                "V_O3" => Ok(BundleAst::VO3),
                "V_SO3" => Ok(BundleAst::VSO3),
                "V_U1" => Ok(BundleAst::VU1),
                "V_SU2" => Ok(BundleAst::VSU2),
                "R" => {
                    cur.expect(&Tok::Caret)?;
                    Ok(BundleAst::R(cur.int()?))
                }
                "tensor" => {
                    cur.expect(&Tok::LParen)?;
                    let a = bundle_expr(cur)?;
                    cur.expect(&Tok::Comma)?;
                    let b = bundle_expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    Ok(BundleAst::Tensor(Box::new(a), Box::new(b)))
                }
                "phi" | "i1" | "i2" | "p" => {
                    let map = match name.as_str() {
                        "phi" => PullName::Phi,
                        "i1" => PullName::I1,
                        "i2" => PullName::I2,
                        _ => PullName::P,
                    };
                    cur.expect(&Tok::Caret)?;
                    cur.expect(&Tok::Star)?;
                    cur.expect(&Tok::LParen)?;
                    let inner = bundle_expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    Ok(BundleAst::Pull(map, Box::new(inner)))
                }
                other => Err(Cursor::error_at(at, format!("unknown bundle atom `{other}`"))),
            }
        }
        other => Err(cur.error(format!("expected a bundle expression, found {other}"))),
    }
}

impl fmt::Display for BundleAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Right operands of the flat binary level need parentheses when
        // they are themselves binary; scale operands when non-primary.
        fn operand(f: &mut fmt::Formatter<'_>, e: &BundleAst) -> fmt::Result {
            match e {
                BundleAst::Sum(..) | BundleAst::ExtSum(..) => write!(f, "({e})"),
                _ => write!(f, "{e}"),
            }
        }
        match self {
            BundleAst::Sigma => f.write_str("sigma"),
            BundleAst::VO3 => f.write_str("V_O3"),
            BundleAst::VSO3 => f.write_str("V_SO3"),
            BundleAst::VU1 => f.write_str("V_U1"),
            BundleAst::VSU2 => f.write_str("V_SU2"),
            BundleAst::R(k) => write!(f, "R^{k}"),
            BundleAst::Int(k) => write!(f, "{k}"),
            BundleAst::Neg(e) => {
                f.write_str("-")?;
                operand(f, e)
            }
            BundleAst::Sum(a, b) => {
                write!(f, "{a}")?;
                if let BundleAst::Neg(inner) = &**b {
                    f.write_str(" - ")?;
                    operand(f, inner)
                } else {
                    f.write_str(" + ")?;
                    operand(f, b)
                }
            }
            BundleAst::ExtSum(a, b) => {
                write!(f, "{a} [+] ")?;
                operand(f, b)
            }
            BundleAst::Scale(k, e) => match &**e {
                BundleAst::Sum(..)
                | BundleAst::ExtSum(..)
                | BundleAst::Neg(..)
                | BundleAst::Scale(..) => write!(f, "{k}*({e})"),
                _ => write!(f, "{k}*{e}"),
            },
            BundleAst::Pull(map, e) => write!(f, "{}^*({e})", map.name()),
            BundleAst::Tensor(a, b) => write!(f, "tensor({a}, {b})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Bundle evaluation
// ---------------------------------------------------------------------------

/// A bundle expression value: trivial bundles stay base-polymorphic until
/// context fixes their base (a standalone one lives over the point).
#[derive(Clone, Debug)]
pub enum BundleValue {
    Trivial(i64),
    Concrete(VirtualBundle),
}

impl BundleValue {
    pub fn over(self, base: &Space, truncation: u32) -> Result<VirtualBundle, String> {
        match self {
            BundleValue::Trivial(k) => Ok(VirtualBundle::trivial(base, k, truncation)),
            BundleValue::Concrete(b) => {
                if b.base() == base {
                    Ok(b)
                } else {
                    Err("base mismatch".into())
                }
            }
        }
    }

    pub fn into_bundle(self, truncation: u32) -> VirtualBundle {
        match self {
            BundleValue::Trivial(k) => VirtualBundle::trivial(&Space::point(), k, truncation),
            BundleValue::Concrete(b) => b,
        }
    }
}

pub fn eval_bundle(ast: &BundleAst, truncation: u32) -> Result<BundleValue, String> {
    let concrete = |b: VirtualBundle| Ok(BundleValue::Concrete(b));
    match ast {
        BundleAst::Sigma => concrete(sigma(truncation)),
        BundleAst::VO3 => concrete(v_o(3, truncation)),
        BundleAst::VSO3 => concrete(v_so(3, truncation)),
        BundleAst::VU1 => concrete(v_u1(truncation)),
        BundleAst::VSU2 => concrete(v_su2(truncation)),
        BundleAst::R(k) | BundleAst::Int(k) => Ok(BundleValue::Trivial(*k)),
        BundleAst::Neg(e) => Ok(match eval_bundle(e, truncation)? {
            BundleValue::Trivial(k) => BundleValue::Trivial(-k),
            BundleValue::Concrete(b) => BundleValue::Concrete(b.negate()),
        }),
        BundleAst::Sum(a, b) => {
            let va = eval_bundle(a, truncation)?;
            let vb = eval_bundle(b, truncation)?;
            match (va, vb) {
                (BundleValue::Trivial(x), BundleValue::Trivial(y)) => {
                    Ok(BundleValue::Trivial(x + y))
                }
                (BundleValue::Trivial(x), BundleValue::Concrete(b))
                | (BundleValue::Concrete(b), BundleValue::Trivial(x)) => {
                    let lifted = VirtualBundle::trivial(b.base(), x, truncation);
                    concrete(b.sum(&lifted).map_err(|e| e.to_string())?)
                }
                (BundleValue::Concrete(x), BundleValue::Concrete(y)) => {
                    if x.base() != y.base() {
                        // The internal Whitney sum never changes base.
                        return Err("base mismatch".into());
                    }
                    concrete(x.sum(&y).map_err(|e| e.to_string())?)
                }
            }
        }
        BundleAst::ExtSum(a, b) => {
            let va = eval_bundle(a, truncation)?.into_bundle(truncation);
            let vb = eval_bundle(b, truncation)?.into_bundle(truncation);
            concrete(va.external_sum(&vb).map_err(|e| e.to_string())?)
        }
        BundleAst::Scale(k, e) => {
            if *k < 0 {
                return Err("scale factors must be non-negative (negate instead)".into());
            }
            Ok(match eval_bundle(e, truncation)? {
                BundleValue::Trivial(r) => BundleValue::Trivial(k * r),
                BundleValue::Concrete(b) => BundleValue::Concrete(b.pow_sum(*k as u32)),
            })
        }
        BundleAst::Pull(name, e) => {
            let map = match name {
                PullName::Phi => maps::phi(truncation),
                PullName::I1 => maps::i1(truncation),
                PullName::I2 => maps::i2(truncation),
                PullName::P => maps::p(truncation),
            };
            let v = eval_bundle(e, truncation)?.over(map.target(), truncation)?;
            concrete(pullback(&map, &v).map_err(|e| e.to_string())?)
        }
        BundleAst::Tensor(a, b) => {
            let va = eval_bundle(a, truncation)?;
            let vb = eval_bundle(b, truncation)?;
            let (va, vb) = match (va, vb) {
                (BundleValue::Concrete(x), BundleValue::Concrete(y)) => (x, y),
                (BundleValue::Concrete(x), BundleValue::Trivial(k)) => {
                    let lifted = VirtualBundle::trivial(x.base(), k, truncation);
                    (x, lifted)
                }
                (BundleValue::Trivial(k), BundleValue::Concrete(y)) => {
                    let lifted = VirtualBundle::trivial(y.base(), k, truncation);
                    (lifted, y)
                }
                (BundleValue::Trivial(x), BundleValue::Trivial(y)) => (
                    VirtualBundle::trivial(&Space::point(), x, truncation),
                    VirtualBundle::trivial(&Space::point(), y, truncation),
                ),
            };
            concrete(tensor_line(&va, &vb).map_err(|e| e.to_string())?)
        }
    }
}

/// Parse and evaluate in one go; the value keeps trivial bundles
/// base-polymorphic.
pub fn parse_bundle(text: &str, truncation: u32) -> Result<BundleValue, String> {
    let ast = parse_bundle_ast(text).map_err(|e| e.to_string())?;
    eval_bundle(&ast, truncation)
}

// ---------------------------------------------------------------------------
// Spaces
// ---------------------------------------------------------------------------

pub fn parse_space(text: &str) -> Result<Space, ParseError> {
    let mut cur = Cursor::new(text)?;
    let space = space_expr(&mut cur)?;
    cur.expect_end()?;
    Ok(space)
}

fn space_expr(cur: &mut Cursor) -> Result<Space, ParseError> {
    let mut factors: Vec<SpaceFactor> = Vec::new();
    loop {
        let Tok::Ident(name) = cur.peek().clone() else {
            return Err(cur.error(format!("expected a space, found {}", cur.peek())));
        };
        let at = cur.here();
        cur.advance();
        match name.as_str() {
            "Point" => {
                if !factors.is_empty() {
                    return Err(cur.error("Point cannot appear in a product"));
                }
                return Ok(Space::point());
            }
            "BZ2" => factors.push(SpaceFactor::BZ2),
            "BU1" => factors.push(SpaceFactor::BU1),
            "BSU2" => factors.push(SpaceFactor::BSU2),
            "HPinf" => factors.push(SpaceFactor::HPInf),
            other => {
                let factor = other
                    .strip_prefix("BSO")
                    .and_then(|digits| digits.parse::<u8>().ok().filter(|&n| n >= 2))
                    .map(SpaceFactor::BSO)
                    .or_else(|| {
                        other
                            .strip_prefix("BO")
                            .and_then(|digits| digits.parse::<u8>().ok().filter(|&n| n >= 1))
                            .map(SpaceFactor::BO)
                    });
                match factor {
                    Some(sf) => factors.push(sf),
                    None => {
                        return Err(Cursor::error_at(at, format!("unknown space `{other}`")))
                    }
                }
            }
        }
        match cur.peek() {
            Tok::Ident(x) if x == "x" => {
                cur.advance();
            }
            _ => break,
        }
    }
    Ok(Space::from_factors(factors))
}

// ---------------------------------------------------------------------------
// Cohomology classes
// ---------------------------------------------------------------------------

/// Parse a cohomology class `1 + a + a^2*w2bar` into the given ring.
pub fn parse_class(ring: &Ring, text: &str) -> Result<F2Element, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut acc = F2Element::zero(ring);
    loop {
        let mono = class_monomial(&mut cur, ring)?;
        acc = acc.add(&mono).expect("same ring");
        if *cur.peek() == Tok::Plus {
            cur.advance();
        } else {
            break;
        }
    }
    cur.expect_end()?;
    Ok(acc)
}

fn class_monomial(cur: &mut Cursor, ring: &Ring) -> Result<F2Element, ParseError> {
    let mut powers: Vec<(String, u32)> = Vec::new();
    let mut saw_one = false;
    loop {
        match cur.peek().clone() {
            Tok::Int(1) => {
                cur.advance();
                saw_one = true;
            }
            Tok::Int(0) => {
                cur.advance();
                return Ok(F2Element::zero(ring));
            }
            Tok::Ident(name) => {
                cur.advance();
                let exp = if *cur.peek() == Tok::Caret {
                    cur.advance();
                    let e = cur.int()?;
                    u32::try_from(e)
                        .map_err(|_| cur.error("exponents must be non-negative"))?
                } else {
                    1
                };
                powers.push((name, exp));
            }
            other => return Err(cur.error(format!("expected a monomial, found {other}"))),
        }
        if *cur.peek() == Tok::Star {
            cur.advance();
        } else {
            break;
        }
    }
    if powers.is_empty() {
        if saw_one {
            return Ok(F2Element::one(ring));
        }
        return Err(cur.error("empty monomial"));
    }
    let pairs: Vec<(&str, u32)> = powers.iter().map(|(n, e)| (n.as_str(), *e)).collect();
    F2Element::monomial(ring, &pairs)
        .ok_or_else(|| cur.error("monomial uses a generator not present in the ring"))
}

// ---------------------------------------------------------------------------
// Spectrum AST
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpectrumAst {
    Named(SpectrumName),
    Sphere,
    Thom(Space, BundleAst),
    Plus(Space),
    Red(Space),
    Susp(i64, Box<SpectrumAst>),
    Smash(Box<SpectrumAst>, Box<SpectrumAst>),
}

pub fn parse_spectrum_ast(text: &str) -> Result<SpectrumAst, ParseError> {
    let mut cur = Cursor::new(text)?;
    let ast = spectrum_expr(&mut cur)?;
    cur.expect_end()?;
    Ok(ast)
}

fn spectrum_expr(cur: &mut Cursor) -> Result<SpectrumAst, ParseError> {
    let mut acc = spectrum_atom(cur)?;
    while *cur.peek() == Tok::Caret {
        cur.advance();
        let rhs = spectrum_atom(cur)?;
        acc = SpectrumAst::Smash(Box::new(acc), Box::new(rhs));
    }
    Ok(acc)
}

fn spectrum_atom(cur: &mut Cursor) -> Result<SpectrumAst, ParseError> {
    match cur.peek().clone() {
        Tok::LParen => {
            cur.advance();
            let inner = spectrum_expr(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(inner)
        }
        Tok::Ident(name) => {
            let at = cur.here();
            cur.advance();
            if name == "S" {
                return Ok(SpectrumAst::Sphere);
            }
            if let Some(n) = SpectrumName::parse(&name) {
                return Ok(SpectrumAst::Named(n));
            }
            match name.as_str() {
                "Thom" => {
                    cur.expect(&Tok::LParen)?;
                    let space = space_expr(cur)?;
                    cur.expect(&Tok::Comma)?;
                    let bundle = bundle_expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    Ok(SpectrumAst::Thom(space, bundle))
                }
                "Plus" => {
                    cur.expect(&Tok::LParen)?;
                    let space = space_expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    Ok(SpectrumAst::Plus(space))
                }
                "Red" => {
                    cur.expect(&Tok::LParen)?;
                    let space = space_expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    Ok(SpectrumAst::Red(space))
                }
                "Susp" => {
                    cur.expect(&Tok::LParen)?;
                    let k = cur.int()?;
                    cur.expect(&Tok::Comma)?;
                    let inner = spectrum_expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    Ok(SpectrumAst::Susp(k, Box::new(inner)))
                }
                "Smash" => {
                    cur.expect(&Tok::LParen)?;
                    let a = spectrum_expr(cur)?;
                    cur.expect(&Tok::Comma)?;
                    let b = spectrum_expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    Ok(SpectrumAst::Smash(Box::new(a), Box::new(b)))
                }
                other => Err(Cursor::error_at(at, format!("unknown spectrum `{other}`"))),
            }
        }
        other => Err(cur.error(format!("expected a spectrum expression, found {other}"))),
    }
}

impl fmt::Display for SpectrumAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumAst::Named(n) => f.write_str(n.name()),
            SpectrumAst::Sphere => f.write_str("S"),
            SpectrumAst::Thom(space, b) => write!(f, "Thom({space}, {b})"),
            SpectrumAst::Plus(space) => write!(f, "Plus({space})"),
            SpectrumAst::Red(space) => write!(f, "Red({space})"),
            SpectrumAst::Susp(k, e) => write!(f, "Susp({k}, {e})"),
            SpectrumAst::Smash(a, b) => {
                write!(f, "{a} ^ ")?;
                if matches!(&**b, SpectrumAst::Smash(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

pub fn eval_spectrum(ast: &SpectrumAst, truncation: u32) -> Result<SpectrumExpr, String> {
    match ast {
        SpectrumAst::Named(n) => Ok(SpectrumExpr::Named(*n)),
        SpectrumAst::Sphere => Ok(SpectrumExpr::Sphere),
        SpectrumAst::Thom(space, b) => {
            let bundle = eval_bundle(b, truncation)?.over(space, truncation)?;
            Ok(SpectrumExpr::Thom(space.clone(), bundle))
        }
        SpectrumAst::Plus(space) => Ok(SpectrumExpr::PlusPoint(space.clone())),
        SpectrumAst::Red(space) => Ok(SpectrumExpr::Reduced(space.clone())),
        SpectrumAst::Susp(k, e) => Ok(SpectrumExpr::suspend(*k, eval_spectrum(e, truncation)?)),
        SpectrumAst::Smash(a, b) => Ok(SpectrumExpr::smash(
            eval_spectrum(a, truncation)?,
            eval_spectrum(b, truncation)?,
        )),
    }
}

pub fn parse_spectrum(text: &str, truncation: u32) -> Result<SpectrumExpr, String> {
    let ast = parse_spectrum_ast(text).map_err(|e| e.to_string())?;
    eval_spectrum(&ast, truncation)
}

/// Reconstruct a virtual bundle from its serialized pieces (base, rank,
/// total class, truncation).
pub fn bundle_from_parts(
    base: &str,
    rank: i64,
    total_sw: &str,
    truncation: u32,
) -> Result<VirtualBundle, String> {
    let space = parse_space(base).map_err(|e| e.to_string())?;
    let ring = space.cohomology(truncation);
    let total = parse_class(&ring, total_sw).map_err(|e| e.to_string())?;
    let series = UnitSeries::from_total(total).map_err(|e| e.to_string())?;
    VirtualBundle::from_parts(space, rank, series).map_err(|e| e.to_string())
}
