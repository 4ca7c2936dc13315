//! Operator expressions over the generators: parsing, rendering,
//! normal ordering by the defining relations, and evaluation in the Fock
//! representation.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' uint]
//! atom   := 'ap' | 'am' | 'apd' | 'amd' | 'N' | 'q' ['^' int]
//!         | uint ['/' uint] | '(' expr ')'
//! ```

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::fock::{generator_matrix, Generator, OpMatrix};
use crate::scalar::Cyclotomic;

/// Step ceiling used by [`normal_order`].
pub const DEFAULT_STEP_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unexpected character `{found}` at position {pos}")]
    Lexical { pos: usize, found: char },
    #[error("expected {expected}, found {found} at position {pos}")]
    Syntax {
        pos: usize,
        expected: &'static str,
        found: String,
    },
    #[error("normal ordering exceeded {limit} rewrite steps")]
    StepLimit { limit: usize },
}

impl ExprError {
    /// Byte offset of a parse error in the source text.
    pub fn position(&self) -> Option<usize> {
        match self {
            ExprError::Lexical { pos, .. } | ExprError::Syntax { pos, .. } => Some(*pos),
            ExprError::StepLimit { .. } => None,
        }
    }
}

/// Parse tree. Products keep their written order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Gen(Generator),
    Rational(BigRational),
    /// q^j
    QPow(i64),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Gen(Generator),
    Q,
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Gen(g) => format!("`{g}`"),
            Tok::Q => "`q`".into(),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            let n: BigInt = text[pos..end].parse().expect("digit run");
            out.push((Tok::Int(n), pos));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut end = pos;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_alphabetic() {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            let tok = match &text[pos..end] {
                "ap" => Tok::Gen(Generator::APlus),
                "am" => Tok::Gen(Generator::AMinus),
                "apd" => Tok::Gen(Generator::APlusDagger),
                "amd" => Tok::Gen(Generator::AMinusDagger),
                "N" => Tok::Gen(Generator::Number),
                "q" => Tok::Q,
                _ => return Err(ExprError::Lexical { pos, found: c }),
            };
            out.push((tok, pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(ExprError::Lexical { pos, found: c }),
        };
        out.push((tok, pos));
        chars.next();
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

// --------------------------------------------------------------- parser

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &'static str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let leading_minus = *self.peek() == Tok::Minus;
        if leading_minus {
            self.bump();
        }
        let mut terms = vec![self.term(leading_minus)?];
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
            terms.push(self.term(negate)?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    /// Negation flips a leading rational factor or prepends -1.
    fn term(&mut self, negate: bool) -> Result<Expr, ExprError> {
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        if negate {
            match &mut factors[0] {
                Expr::Rational(r) => *r = -r.clone(),
                _ => factors.insert(0, Expr::Rational(-BigRational::one())),
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let e = self.uint("unsigned integer exponent")?;
        let e = e.to_u32().ok_or_else(|| self.error("exponent that fits in 32 bits"))?;
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn uint(&mut self, expected: &'static str) -> Result<BigInt, ExprError> {
        match self.peek() {
            Tok::Int(_) => match self.bump() {
                Tok::Int(n) => Ok(n),
                _ => unreachable!(),
            },
            _ => Err(self.error(expected)),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().clone() {
            Tok::Gen(g) => {
                self.bump();
                Ok(Expr::Gen(g))
            }
            Tok::Q => {
                self.bump();
                if *self.peek() != Tok::Caret {
                    return Ok(Expr::QPow(1));
                }
                self.bump();
                let negative = *self.peek() == Tok::Minus;
                if negative {
                    self.bump();
                }
                let j = self.uint("integer exponent of q")?;
                let j = j.to_i64().ok_or_else(|| self.error("exponent that fits in 64 bits"))?;
                Ok(Expr::QPow(if negative { -j } else { j }))
            }
            Tok::Int(n) => {
                self.bump();
                if *self.peek() != Tok::Slash {
                    return Ok(Expr::Rational(BigRational::from_integer(n)));
                }
                self.bump();
                let d = self.uint("denominator")?;
                if d.is_zero() {
                    return Err(ExprError::Syntax {
                        pos: self.toks[self.at - 1].1,
                        expected: "nonzero denominator",
                        found: "`0`".into(),
                    });
                }
                Ok(Expr::Rational(BigRational::new(n, d)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("generator, scalar or `(`")),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(e)
}

// ------------------------------------------------------------- renderer

fn leading_negative(e: &Expr) -> bool {
    match e {
        Expr::Rational(r) => r.is_negative(),
        Expr::Product(fs) => matches!(&fs[0], Expr::Rational(r) if r.is_negative()),
        _ => false,
    }
}

fn render_rational(r: &BigRational, out: &mut String) {
    if r.is_integer() {
        out.push_str(&r.numer().to_string());
    } else {
        out.push_str(&format!("{}/{}", r.numer(), r.denom()));
    }
}

fn render_factor(e: &Expr, out: &mut String) {
    match e {
        Expr::Sum(_) | Expr::Product(_) => {
            out.push('(');
            render_into(e, out);
            out.push(')');
        }
        Expr::Rational(r) if r.is_negative() => {
            out.push('(');
            render_into(e, out);
            out.push(')');
        }
        _ => render_into(e, out),
    }
}

fn render_product(fs: &[Expr], out: &mut String) {
    for (i, f) in fs.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        render_factor(f, out);
    }
}

/// Renders a term whose leading rational is negative, without the sign.
fn render_magnitude(e: &Expr, out: &mut String) {
    match e {
        Expr::Rational(r) => render_rational(&r.abs(), out),
        Expr::Product(fs) => {
            let r = match &fs[0] {
                Expr::Rational(r) => r.abs(),
                _ => unreachable!("caller checked the leading factor"),
            };
            if r.is_one() && !matches!(fs[1], Expr::Rational(_)) {
                render_product(&fs[1..], out);
            } else {
                render_rational(&r, out);
                out.push('*');
                render_product(&fs[1..], out);
            }
        }
        _ => unreachable!("caller checked the sign"),
    }
}

fn render_term(e: &Expr, out: &mut String) {
    match e {
        Expr::Sum(_) => {
            out.push('(');
            render_into(e, out);
            out.push(')');
        }
        _ => render_into(e, out),
    }
}

fn render_into(e: &Expr, out: &mut String) {
    match e {
        Expr::Gen(g) => out.push_str(g.name()),
        Expr::QPow(1) => out.push('q'),
        Expr::QPow(j) => out.push_str(&format!("q^{j}")),
        Expr::Rational(r) if r.is_negative() => {
            out.push('-');
            render_magnitude(e, out);
        }
        Expr::Rational(r) => render_rational(r, out),
        Expr::Product(fs) => {
            if leading_negative(e) {
                out.push('-');
                render_magnitude(e, out);
            } else {
                render_product(fs, out);
            }
        }
        Expr::Pow(base, n) => {
            match base.as_ref() {
                Expr::Gen(_) | Expr::QPow(_) => render_into(base, out),
                Expr::Rational(r) if !r.is_negative() => render_into(base, out),
                _ => {
                    out.push('(');
                    render_into(base, out);
                    out.push(')');
                }
            }
            out.push_str(&format!("^{n}"));
        }
        Expr::Sum(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let neg = leading_negative(t);
                match (i, neg) {
                    (0, true) => out.push('-'),
                    (0, false) => {}
                    (_, true) => out.push_str(" - "),
                    (_, false) => out.push_str(" + "),
                }
                if neg {
                    render_magnitude(t, out);
                } else {
                    render_term(t, out);
                }
            }
        }
    }
}

/// Text in the input grammar; parsing it back gives the same tree.
pub fn render(e: &Expr) -> String {
    let mut out = String::new();
    render_into(e, &mut out);
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

// ----------------------------------------------------------- evaluation

/// Evaluates in the k-dimensional Fock representation.
pub fn eval_matrix(e: &Expr, k: u32) -> OpMatrix {
    match e {
        Expr::Gen(g) => generator_matrix(k, *g),
        Expr::Rational(r) => OpMatrix::identity(k).scale_cyclotomic(&Cyclotomic::from_rational(k, r.clone())),
        Expr::QPow(j) => OpMatrix::identity(k).scale_cyclotomic(&Cyclotomic::q_power(k, *j)),
        Expr::Sum(ts) => ts.iter().fold(OpMatrix::zero(k), |acc, t| &acc + &eval_matrix(t, k)),
        Expr::Product(fs) => fs
            .iter()
            .fold(OpMatrix::identity(k), |acc, f| &acc * &eval_matrix(f, k)),
        Expr::Pow(base, n) => eval_matrix(base, k).pow(*n),
    }
}

// -------------------------------------------------------- normal order

/// A word in the generators, read left to right.
pub type Word = Vec<Generator>;

type Poly = BTreeMap<Word, Cyclotomic>;

/// Position in the canonical order ap < amd < N < am < apd.
fn rank(g: Generator) -> u8 {
    match g {
        Generator::APlus => 0,
        Generator::AMinusDagger => 1,
        Generator::Number => 2,
        Generator::AMinus => 3,
        Generator::APlusDagger => 4,
    }
}

/// Pairs with no defining relation between them.
fn unrelated(a: Generator, b: Generator) -> bool {
    use Generator::*;
    matches!(
        (a, b),
        (AMinus, AMinusDagger) | (AMinusDagger, AMinus) | (APlus, APlusDagger) | (APlusDagger, APlus)
    )
}

/// Replacement for a mis-ordered adjacent pair `a b`.
fn exchange(k: u32, a: Generator, b: Generator) -> Option<Vec<(Cyclotomic, Word)>> {
    use Generator::*;
    let one = || Cyclotomic::one(k);
    let out = match (a, b) {
        (AMinus, APlus) => vec![(Cyclotomic::q_power(k, 1), vec![APlus, AMinus]), (one(), vec![])],
        (APlusDagger, AMinusDagger) => vec![
            (Cyclotomic::q_power(k, -1), vec![AMinusDagger, APlusDagger]),
            (one(), vec![]),
        ],
        (Number, APlus) => vec![(one(), vec![APlus, Number]), (one(), vec![APlus])],
        (AMinus, Number) => vec![(one(), vec![Number, AMinus]), (one(), vec![AMinus])],
        (Number, AMinusDagger) => vec![(one(), vec![AMinusDagger, Number]), (one(), vec![AMinusDagger])],
        (APlusDagger, Number) => vec![(one(), vec![Number, APlusDagger]), (one(), vec![APlusDagger])],
        (AMinusDagger, APlus) => vec![(Cyclotomic::zeta_power(k, -2), vec![APlus, AMinusDagger])],
        (APlusDagger, AMinus) => vec![(Cyclotomic::zeta_power(k, 2), vec![AMinus, APlusDagger])],
        _ => return None,
    };
    Some(out)
}

/// g^k = 0 for every generator except N.
fn has_nilpotent_run(k: u32, w: &[Generator]) -> bool {
    let k = k as usize;
    w.windows(k)
        .any(|run| run[0] != Generator::Number && run.iter().all(|&g| g == run[0]))
}

fn add_term(poly: &mut Poly, w: Word, c: Cyclotomic) {
    if c.is_zero() {
        return;
    }
    match poly.get_mut(&w) {
        Some(acc) => {
            *acc += &c;
            if acc.is_zero() {
                poly.remove(&w);
            }
        }
        None => {
            poly.insert(w, c);
        }
    }
}

fn poly_mul(k: u32, a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let w: Word = wa.iter().chain(wb).copied().collect();
            if !has_nilpotent_run(k, &w) {
                add_term(&mut out, w, ca * cb);
            }
        }
    }
    out
}

fn constant(c: Cyclotomic) -> Poly {
    let mut p = Poly::new();
    add_term(&mut p, vec![], c);
    p
}

fn expand(e: &Expr, k: u32) -> Poly {
    match e {
        Expr::Gen(g) => Poly::from([(vec![*g], Cyclotomic::one(k))]),
        Expr::Rational(r) => constant(Cyclotomic::from_rational(k, r.clone())),
        Expr::QPow(j) => constant(Cyclotomic::q_power(k, *j)),
        Expr::Sum(ts) => {
            let mut out = Poly::new();
            for t in ts {
                for (w, c) in expand(t, k) {
                    add_term(&mut out, w, c);
                }
            }
            out
        }
        Expr::Product(fs) => fs
            .iter()
            .fold(constant(Cyclotomic::one(k)), |acc, f| poly_mul(k, &acc, &expand(f, k))),
        Expr::Pow(base, n) => {
            let b = expand(base, k);
            (0..*n).fold(constant(Cyclotomic::one(k)), |acc, _| poly_mul(k, &acc, &b))
        }
    }
}

enum Step {
    Drop,
    Replace(usize, Vec<(Cyclotomic, Word)>),
}

/// Leftmost applicable rule in `w`, if any.
fn find_step(k: u32, w: &[Generator]) -> Option<Step> {
    let run = k as usize;
    for i in 0..w.len() {
        let g = w[i];
        if g != Generator::Number && w.len() - i >= run && w[i..i + run].iter().all(|&h| h == g) {
            return Some(Step::Drop);
        }
        if i + 1 < w.len() && rank(g) > rank(w[i + 1]) {
            if let Some(rhs) = exchange(k, g, w[i + 1]) {
                return Some(Step::Replace(i, rhs));
            }
        }
    }
    None
}

fn has_crossing(w: &[Generator]) -> bool {
    w.windows(2).any(|p| unrelated(p[0], p[1]))
}

/// Σ c·word split into fully ordered terms and words that contain an
/// adjacent pair with no defining relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    k: u32,
    terms: Vec<(Cyclotomic, Word)>,
    residuals: Vec<(Cyclotomic, Word)>,
    steps: usize,
}

fn sorted(poly: Poly) -> Vec<(Cyclotomic, Word)> {
    let mut v: Vec<_> = poly.into_iter().map(|(w, c)| (c, w)).collect();
    v.sort_by_key(|(_, w)| (Reverse(w.len()), w.iter().map(|&g| rank(g)).collect::<Vec<_>>()));
    v
}

impl NormalForm {
    pub fn order(&self) -> u32 {
        self.k
    }

    /// Words in canonical order, longest first.
    pub fn terms(&self) -> &[(Cyclotomic, Word)] {
        &self.terms
    }

    /// Words stuck on an adjacent pair that no relation reorders.
    pub fn residuals(&self) -> &[(Cyclotomic, Word)] {
        &self.residuals
    }

    /// Rewrite steps taken.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.residuals.is_empty()
    }

    /// Evaluates terms and residuals together in the Fock representation.
    pub fn eval_matrix(&self) -> OpMatrix {
        let k = self.k;
        self.terms
            .iter()
            .chain(&self.residuals)
            .fold(OpMatrix::zero(k), |acc, (c, w)| {
                let m = w
                    .iter()
                    .fold(OpMatrix::identity(k), |m, &g| &m * &generator_matrix(k, g));
                &acc + &m.scale_cyclotomic(c)
            })
    }
}

pub fn normal_order(e: &Expr, k: u32) -> Result<NormalForm, ExprError> {
    normal_order_with_limit(e, k, DEFAULT_STEP_LIMIT)
}

/// Rewrites until no rule applies. Every rule lowers either the word length
/// or the number of inverted pairs, so the loop ends; `limit` caps the
/// number of rewrite steps regardless.
pub fn normal_order_with_limit(e: &Expr, k: u32, limit: usize) -> Result<NormalForm, ExprError> {
    let mut pending = expand(e, k);
    let mut done = Poly::new();
    let mut stuck = Poly::new();
    let mut steps = 0;
    while let Some((w, c)) = pending.pop_first() {
        match find_step(k, &w) {
            None if has_crossing(&w) => add_term(&mut stuck, w, c),
            None => add_term(&mut done, w, c),
            Some(step) => {
                steps += 1;
                if steps > limit {
                    return Err(ExprError::StepLimit { limit });
                }
                if let Step::Replace(i, rhs) = step {
                    for (rc, sub) in rhs {
                        let nw: Word = w[..i].iter().chain(&sub).chain(&w[i + 2..]).copied().collect();
                        add_term(&mut pending, nw, &c * &rc);
                    }
                }
            }
        }
    }
    Ok(NormalForm {
        k,
        terms: sorted(done),
        residuals: sorted(stuck),
        steps,
    })
}

/// Writes c as ±r·q^m or ±r·z^j (z = ζ) when it is a monomial.
fn write_scalar_word(f: &mut fmt::Formatter<'_>, first: bool, k: u32, c: &Cyclotomic, w: &[Generator]) -> fmt::Result {
    let mut parts: Vec<String> = Vec::new();
    let mut negative = false;
    let half = k as i64 / 2;
    // -1 is itself a power of q for even k, so prefer a positive rational
    let candidates: Vec<(BigRational, i64)> = (-(k as i64 - 1 - half)..=half)
        .filter_map(|m| (c * &Cyclotomic::q_power(k, -m)).as_rational().map(|r| (r.clone(), m)))
        .collect();
    let q_monomial = candidates
        .iter()
        .find(|(r, _)| r.is_positive())
        .or(candidates.first())
        .cloned();
    match q_monomial {
        Some((r, m)) => {
            negative = r.is_negative();
            let r = r.abs();
            if !r.is_one() || (m == 0 && w.is_empty()) {
                let mut s = String::new();
                render_rational(&r, &mut s);
                parts.push(s);
            }
            match m {
                0 => {}
                1 => parts.push("q".into()),
                m => parts.push(format!("q^{m}")),
            }
        }
        None => match c.as_root_monomial() {
            Some((r, j)) => {
                negative = r.is_negative();
                let r = r.abs();
                if !r.is_one() {
                    let mut s = String::new();
                    render_rational(&r, &mut s);
                    parts.push(s);
                }
                parts.push(format!("z^{j}"));
            }
            None => parts.push(format!("({c})")),
        },
    }
    parts.extend(w.iter().map(|g| g.name().to_string()));
    let sep = match (first, negative) {
        (true, true) => "-",
        (true, false) => "",
        (false, true) => " - ",
        (false, false) => " + ",
    };
    write!(f, "{sep}{}", parts.join("*"))
}

/// `q*ap*am + 1`; coefficients that are not ±r·q^m print as ±r·z^j with
/// z = exp(2πi/4k), or in full in parentheses.
impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (c, w)) in self.terms.iter().chain(&self.residuals).enumerate() {
            write_scalar_word(f, i == 0, self.k, c, w)?;
        }
        Ok(())
    }
}

/// `am*amd`-style rendering of a bare word.
pub fn word_to_string(w: &[Generator]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|g| g.name()).collect::<Vec<_>>().join("*")
}
