//! Monomials and polynomials over F2 in weighted-degree generators, plus a
//! small infix parser (`+`, `*`, `^`, parentheses, integer constants).

use std::cmp::Ordering;
use std::fmt;

use super::AlgebraError;

/// Maximum number of generators of a presentation.
pub const MAX_GENS: usize = 16;

/// A monomial with cached weighted degree.
///
/// Ordering: weighted degree first; ties are broken lexicographically on
/// exponents, reading generators from the last declared one towards the
/// first (a larger exponent compares greater).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    deg: u16,
    exps: [u8; MAX_GENS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { deg: 0, exps: [0; MAX_GENS] };

    /// The generator `x_i` of weighted degree `d`.
    pub fn generator(i: usize, d: u16) -> Self {
        let mut exps = [0; MAX_GENS];
        exps[i] = 1;
        Monomial { deg: d, exps }
    }

    /// Builds a monomial from exponents and generator degrees.
    pub fn from_exponents(exps: &[u8], degrees: &[u16]) -> Self {
        let mut e = [0; MAX_GENS];
        e[..exps.len()].copy_from_slice(exps);
        let deg = exps.iter().zip(degrees).map(|(&a, &d)| a as u16 * d).sum();
        Monomial { deg, exps: e }
    }

    pub fn degree(&self) -> u16 {
        self.deg
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn exponents(&self) -> &[u8; MAX_GENS] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0 && self.exps.iter().all(|&e| e == 0)
    }

    /// Product; `None` on exponent overflow.
    pub fn mul(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = [0u8; MAX_GENS];
        for (e, (a, b)) in exps.iter_mut().zip(self.exps.iter().zip(&other.exps)) {
            *e = a.checked_add(*b)?;
        }
        Some(Monomial { deg: self.deg.checked_add(other.deg)?, exps })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut exps = [0u8; MAX_GENS];
        for (e, (a, b)) in exps.iter_mut().zip(other.exps.iter().zip(&self.exps)) {
            *e = a - b;
        }
        Monomial { deg: other.deg - self.deg, exps }
    }

    pub fn lcm(&self, other: &Monomial, degrees: &[u16]) -> Monomial {
        let mut exps = [0u8; MAX_GENS];
        for (e, (a, b)) in exps.iter_mut().zip(self.exps.iter().zip(&other.exps)) {
            *e = *a.max(b);
        }
        let deg = degrees.iter().enumerate().map(|(i, &d)| exps[i] as u16 * d).sum();
        Monomial { deg, exps }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(&a, &b)| a == 0 || b == 0)
    }

    /// Index of the first generator with a positive exponent.
    pub fn first_variable(&self) -> Option<usize> {
        self.exps.iter().position(|&e| e > 0)
    }

    /// Renders with generator names, e.g. `x1^2*y1`.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (i, name) in names.iter().enumerate() {
            match self.exps[i] {
                0 => {}
                1 => parts.push(name.clone()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| {
            for i in (0..MAX_GENS).rev() {
                match self.exps[i].cmp(&other.exps[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let used = MAX_GENS - self.exps.iter().rev().take_while(|&&e| e == 0).count();
        write!(f, "m{:?}", &self.exps[..used])
    }
}

/// A polynomial over F2: a set of monomials, stored in descending order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial { terms: vec![Monomial::ONE] }
    }

    pub fn monomial(m: Monomial) -> Self {
        Polynomial { terms: vec![m] }
    }

    /// Builds from arbitrary monomials; repeated monomials cancel in pairs.
    pub fn from_terms(mut terms: Vec<Monomial>) -> Self {
        terms.sort_unstable_by(|a, b| b.cmp(a));
        let mut out: Vec<Monomial> = Vec::with_capacity(terms.len());
        for m in terms {
            if out.last() == Some(&m) {
                out.pop();
            } else {
                out.push(m);
            }
        }
        Polynomial { terms: out }
    }

    /// Wraps terms already strictly descending.
    pub(crate) fn from_sorted_unique(terms: Vec<Monomial>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0] > w[1]));
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&Monomial> {
        self.terms.first()
    }

    /// Common degree of all terms, `None` if zero or inhomogeneous.
    pub fn homogeneous_degree(&self) -> Option<u16> {
        let d = self.terms.first()?.degree();
        self.terms.iter().all(|m| m.degree() == d).then_some(d)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Polynomial { terms: out }
    }

    /// Product with a monomial; `None` on exponent overflow.
    pub fn mul_monomial(&self, m: &Monomial) -> Option<Polynomial> {
        // multiplication by a monomial preserves the order
        let terms = self.terms.iter().map(|t| t.mul(m)).collect::<Option<Vec<_>>>()?;
        Some(Polynomial { terms })
    }

    pub fn mul(&self, other: &Polynomial) -> Option<Polynomial> {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b)?);
            }
        }
        Some(Polynomial::from_terms(terms))
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms.iter().map(|m| m.render(names)).collect::<Vec<_>>().join(" + ")
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.terms).finish()
    }
}

/// Parses `text` as a polynomial in the named generators.
///
/// Grammar: `sum := product ('+' product)*`, `product := power ('*' power)*`,
/// `power := atom ('^' int)?`, `atom := name | int | '(' sum ')'`.
/// Integer constants are reduced mod 2.
pub fn parse_polynomial(text: &str, names: &[String], degrees: &[u16]) -> Result<Polynomial, AlgebraError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, names, degrees, text };
    let poly = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("trailing input"));
    }
    Ok(poly)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    Int(u64),
    Plus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>, AlgebraError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '*' | '·' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse().map_err(|_| AlgebraError::Parse {
                    text: text.into(),
                    detail: format!("integer {s} out of range"),
                })?;
                out.push(Token::Int(v));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
            other => {
                return Err(AlgebraError::Parse {
                    text: text.into(),
                    detail: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
    degrees: &'a [u16],
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, detail: &str) -> AlgebraError {
        AlgebraError::Parse { text: self.text.into(), detail: format!("{detail} at token {}", self.pos) }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn sum(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.product()?;
        while self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            acc = acc.add(&self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let rhs = self.power()?;
            acc = acc.mul(&rhs).ok_or_else(|| self.error("exponent overflow"))?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial, AlgebraError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let Some(Token::Int(e)) = self.peek().cloned() else {
            return Err(self.error("expected integer exponent"));
        };
        self.pos += 1;
        let mut acc = Polynomial::one();
        for _ in 0..e {
            acc = acc.mul(&base).ok_or_else(|| self.error("exponent overflow"))?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Polynomial, AlgebraError> {
        match self.peek().cloned() {
            Some(Token::Name(n)) => {
                self.pos += 1;
                let i = self
                    .names
                    .iter()
                    .position(|x| *x == n)
                    .ok_or_else(|| AlgebraError::UnknownGenerator { name: n.clone(), text: self.text.into() })?;
                Ok(Polynomial::monomial(Monomial::generator(i, self.degrees[i])))
            }
            Some(Token::Int(v)) => {
                self.pos += 1;
                Ok(if v % 2 == 1 { Polynomial::one() } else { Polynomial::zero() })
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("expected generator, integer or '('")),
        }
    }
}
