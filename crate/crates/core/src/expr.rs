//! A small arithmetic language for writing local maps coordinate-wise.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' uint)?
//! atom   := number | var | '(' expr ')'
//! ```
//!
//! Variables are `x1 .. xn`. Unary minus applies to a whole power, so
//! `-x1^2` is `-(x1^2)`. Rational literals are written as a quotient
//! (`3/4`). No transcendental functions yet; new ones would be a new
//! `Expr` variant plus an `atom` alternative.

use std::fmt;

use thiserror::Error;

/// Finite-difference step for [`jacobian_fd`].
pub const FD_STEP: f64 = 1.0 / 1048576.0; // 2^-20

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable {name:?} at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("exponent at byte {offset} must be a non-negative integer literal")]
    BadExponent { offset: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected {expected} coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("system is not square: {exprs} expressions in {vars} variables")]
    NotSquare { exprs: usize, vars: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based variable index; printed as `x{i+1}`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// A numeric literal; negative values become `Neg(Num(|v|))` so that the
    /// printed form reparses to the same tree.
    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    /// Exact rational literal `p/q` as a quotient of integer literals.
    pub fn rational(num: i64, den: i64) -> Expr {
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let body = if den == 1 {
            Expr::Num(num.unsigned_abs() as f64)
        } else {
            Expr::Div(
                Box::new(Expr::Num(num.unsigned_abs() as f64)),
                Box::new(Expr::Num(den as f64)),
            )
        };
        if num < 0 {
            Expr::Neg(Box::new(body))
        } else {
            body
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, k: u32) -> Expr {
        Expr::Pow(Box::new(a), k)
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    /// Replaces variable `i` by `vars[i]`.
    pub fn substitute(&self, vars: &[Expr]) -> Expr {
        let s = |e: &Expr| Box::new(e.substitute(vars));
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Div(a, b) => Expr::Div(s(a), s(b)),
            Expr::Pow(a, k) => Expr::Pow(s(a), *k),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " {} ", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                write_child(f, b, 3)
            }
            Expr::Pow(a, k) => {
                write_child(f, a, 5)?;
                write!(f, "^{k}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Int(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, i));
            chars.next();
            continue;
        }
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut end = i;
            let mut has_dot = false;
            while let Some(&(j, d)) = chars.peek() {
                if d.is_ascii_digit() {
                    end = j + 1;
                    chars.next();
                } else if d == '.' && !has_dot {
                    has_dot = true;
                    end = j + 1;
                    chars.next();
                } else {
                    break;
                }
            }
            let text = &src[i..end];
            if text.ends_with('.') {
                return Err(ExprError::Syntax {
                    offset: end,
                    message: "expected digits after '.'".into(),
                });
            }
            let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
                offset: i,
                message: format!("bad number {text:?}"),
            })?;
            if has_dot {
                out.push((Tok::Num(value), i));
            } else {
                out.push((Tok::Int(text.to_string()), i));
            }
        } else if c.is_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '_' {
                    end = j + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(src[i..end].to_string()), i));
        } else {
            return Err(ExprError::Syntax {
                offset: i,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn syntax(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = Expr::div(lhs, self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::neg(self.factor()?));
        }
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let offset = self.offset();
        let k = match self.peek() {
            Some(Tok::Int(text)) => text
                .parse::<u32>()
                .map_err(|_| ExprError::BadExponent { offset })?,
            _ => return Err(ExprError::BadExponent { offset }),
        };
        self.pos += 1;
        if self.peek() == Some(&Tok::Caret) {
            return Err(self.syntax("chained '^' needs parentheses"));
        }
        Ok(Expr::pow(base, k))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Int(text)) => {
                self.pos += 1;
                Ok(Expr::Num(text.parse().expect("digits parse as f64")))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let index = name
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&k| k >= 1 && k <= self.dim && !name[1..].starts_with('0'));
                match index {
                    Some(k) => Ok(Expr::Var(k - 1)),
                    None => Err(ExprError::UnknownVariable { name, offset }),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.syntax("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => Err(self.syntax("expected a number, variable or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}

/// Parses an expression in variables `x1 ..= x{dim}`.
pub fn parse(src: &str, dim: usize) -> Result<Expr, ExprError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        end: src.len(),
        dim,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

/// IEEE double evaluation; `point[i]` is the value of `x{i+1}`.
pub fn eval(e: &Expr, point: &[f64]) -> Result<f64, ExprError> {
    Ok(match e {
        Expr::Num(v) => *v,
        Expr::Var(i) => *point.get(*i).ok_or(ExprError::DimensionMismatch {
            expected: i + 1,
            found: point.len(),
        })?,
        Expr::Neg(a) => -eval(a, point)?,
        Expr::Add(a, b) => eval(a, point)? + eval(b, point)?,
        Expr::Sub(a, b) => eval(a, point)? - eval(b, point)?,
        Expr::Mul(a, b) => eval(a, point)? * eval(b, point)?,
        Expr::Div(a, b) => {
            let d = eval(b, point)?;
            if d == 0.0 {
                return Err(ExprError::DivisionByZero);
            }
            eval(a, point)? / d
        }
        Expr::Pow(a, k) => eval(a, point)?.powi(*k as i32),
    })
}

pub fn eval_all(exprs: &[Expr], point: &[f64]) -> Result<Vec<f64>, ExprError> {
    exprs.iter().map(|e| eval(e, point)).collect()
}

/// Central-difference Jacobian of an arbitrary map `R^n → R^m`:
/// `J[i][j] = (f_i(x + h e_j) - f_i(x - h e_j)) / 2h` with `h = 2^-20`.
pub fn jacobian_fd_of<F>(f: F, point: &[f64]) -> Result<Vec<Vec<f64>>, ExprError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, ExprError>,
{
    let n = point.len();
    let mut columns = Vec::with_capacity(n);
    let mut x = point.to_vec();
    for j in 0..n {
        x[j] = point[j] + FD_STEP;
        let plus = f(&x)?;
        x[j] = point[j] - FD_STEP;
        let minus = f(&x)?;
        x[j] = point[j];
        columns.push(
            plus.iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / (2.0 * FD_STEP))
                .collect::<Vec<f64>>(),
        );
    }
    let m = columns.first().map_or(0, Vec::len);
    Ok((0..m)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect())
}

/// Jacobian of a square expression system at `point`.
pub fn jacobian_fd(exprs: &[Expr], point: &[f64]) -> Result<Vec<Vec<f64>>, ExprError> {
    if exprs.len() != point.len() {
        return Err(ExprError::NotSquare {
            exprs: exprs.len(),
            vars: point.len(),
        });
    }
    jacobian_fd_of(|x| eval_all(exprs, x), point)
}
