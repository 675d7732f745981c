//! Recursive-descent parser for the equation grammar.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+')* power
//! power   := primary ('^' integer)?
//! primary := integer | '(' expr ')' | call | ident
//! call    := Dt(expr) | Dx(expr) | Dy(expr) | Dz(expr)       total derivatives
//!          | f(u) | g(u) | h(u) | q(u)                        coefficient towers
//!          | f1(u) | f2(u) | ...                              tower derivatives
//!          | F(u) | G(u) | H(u) | Q(u)                        antiderivatives
//!          | sin(p*s) | cos(p*s) | exp(p*s) | exp(-p*s)       closures
//!          | name(args) | name_suffix(args)                    declared function symbols
//! ident   := t | x | y | z | u | v | u_<suffix> | v_<suffix> | declared parameter
//! ```
//!
//! Division is exact: the divisor must be a single term that divides every
//! term of the dividend (so `3/2` and `(x^2+x)/x` parse, `1/x` does not).

use crate::atom::{Atom, CIndex, ClosureKind, Dep, FuncName, FuncSym, JetIndex, Var};
use crate::error::ExprError;
use crate::expr::{int, Expr};
use std::collections::{BTreeMap, BTreeSet};

/// Symbol registry the parser resolves identifiers against.
#[derive(Debug, Clone)]
pub struct ParseContext {
    pub params: BTreeSet<String>,
    pub cfuncs: BTreeMap<String, crate::atom::ArgSet>,
}

impl Default for ParseContext {
    fn default() -> Self {
        let mut cfuncs = BTreeMap::new();
        for name in ["alpha", "beta", "gamma", "sigma"] {
            cfuncs.insert(
                name.to_string(),
                crate::atom::ArgSet::new(&[Var::T, Var::Y], false),
            );
        }
        cfuncs.insert(
            "phi".to_string(),
            crate::atom::ArgSet::new(&[Var::T, Var::X, Var::Y, Var::Z], true),
        );
        ParseContext {
            params: BTreeSet::new(),
            cfuncs,
        }
    }
}

impl ParseContext {
    pub fn with_params(params: &[&str]) -> Self {
        let mut ctx = ParseContext::default();
        for p in params {
            ctx.params.insert(p.to_string());
        }
        ctx
    }

    pub fn add_param(&mut self, name: &str) {
        self.params.insert(name.to_string());
    }

    fn known_symbols(&self) -> String {
        let mut known: Vec<String> = vec![
            "t", "x", "y", "z", "u", "v", "Dt", "Dx", "Dy", "Dz", "f", "g", "h", "q", "F", "G",
            "H", "sin", "cos", "exp",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        known.extend(self.params.iter().cloned());
        known.extend(self.cfuncs.keys().cloned());
        known.join(", ")
    }
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    parse_with(text, &ParseContext::default())
}

pub fn parse_with(text: &str, ctx: &ParseContext) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a ParseContext,
}

impl<'a> Parser<'a> {
    fn syntax(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: u8) -> Result<(), ExprError> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", ch as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let divisor = self.unary()?;
                    let (m, c) = divisor.as_single_term().ok_or(ExprError::BadDivision)?;
                    acc = acc.exact_div(c, m).ok_or(ExprError::BadDivision)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        let mut sign = 1i64;
        loop {
            match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    sign = -sign;
                }
                Some(b'+') => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        Ok(self.power()?.scaled_int(sign))
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.integer()?;
            if n < 0 {
                return Err(self.syntax("negative powers are not supported; use division"));
            }
            return Ok(base.pow(n as u32));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let mut sign = 1i64;
        if self.src.get(self.pos) == Some(&b'-') {
            sign = -1;
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.syntax("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        text.parse::<i64>()
            .map(|n| sign * n)
            .map_err(|_| self.syntax("integer out of range"))
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Expr::from_coeff(int(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => self.ident_or_call(),
            _ => Err(self.syntax("expected a number, symbol, or `(`")),
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string()
    }

    fn ident_or_call(&mut self) -> Result<Expr, ExprError> {
        let ident_pos = self.pos;
        let name = self.ident();
        if self.peek() == Some(b'(') {
            return self.call(&name, ident_pos);
        }
        self.plain_ident(&name, ident_pos)
    }

    fn plain_ident(&self, name: &str, pos: usize) -> Result<Expr, ExprError> {
        if let Some(v) = Var::from_name(name) {
            return Ok(Expr::var(v));
        }
        if name == "u" {
            return Ok(Expr::atom(Atom::u()));
        }
        if name == "v" {
            return Ok(Expr::atom(Atom::v()));
        }
        // jets written u_xx / v_t
        if let Some(rest) = name.strip_prefix("u_") {
            if let Some(idx) = JetIndex::from_suffix(rest) {
                return Ok(Expr::jet(Dep::U, idx));
            }
        }
        if let Some(rest) = name.strip_prefix("v_") {
            if let Some(idx) = JetIndex::from_suffix(rest) {
                return Ok(Expr::jet(Dep::V, idx));
            }
        }
        if self.ctx.params.contains(name) {
            return Ok(Expr::param(name));
        }
        Err(ExprError::UnknownSymbol {
            pos,
            name: name.to_string(),
            known: self.ctx.known_symbols(),
        })
    }

    fn call(&mut self, name: &str, ident_pos: usize) -> Result<Expr, ExprError> {
        // total derivatives
        if let Some(var) = match name {
            "Dt" => Some(Var::T),
            "Dx" => Some(Var::X),
            "Dy" => Some(Var::Y),
            "Dz" => Some(Var::Z),
            _ => None,
        } {
            self.expect(b'(')?;
            let inner = self.expr()?;
            self.expect(b')')?;
            return Ok(inner.total_derivative(var));
        }

        // closures: sin(p*s), cos(p*s), exp(p*s), exp(-p*s)
        if let Some(kind) = match name {
            "sin" => Some(ClosureKind::Sin),
            "cos" => Some(ClosureKind::Cos),
            "exp" => Some(ClosureKind::ExpPos),
            _ => None,
        } {
            return self.closure(kind);
        }

        // coefficient towers: f(u), f1(u), F(u), ...
        if let Some(e) = self.tower(name)? {
            return Ok(e);
        }

        // declared function symbols: alpha(t,y), phi_u(t,x,y,z,u), ...
        let (base, suffix) = match name.split_once('_') {
            Some((b, s)) => (b, Some(s)),
            None => (name, None),
        };
        if let Some(args) = self.ctx.cfuncs.get(base) {
            self.expect(b'(')?;
            // the printed argument list is fixed by the declaration; accept
            // and discard it
            loop {
                let _ = self.ident();
                if !self.eat(b',') {
                    break;
                }
            }
            self.expect(b')')?;
            let mut idx = CIndex::empty();
            if let Some(suffix) = suffix {
                for ch in suffix.chars() {
                    idx = match ch {
                        't' => idx.raised_var(Var::T),
                        'x' => idx.raised_var(Var::X),
                        'y' => idx.raised_var(Var::Y),
                        'z' => idx.raised_var(Var::Z),
                        'u' => idx.raised_u(),
                        _ => {
                            return Err(ExprError::Syntax {
                                pos: ident_pos,
                                msg: format!("bad derivative suffix `{suffix}` on `{base}`"),
                            })
                        }
                    };
                }
            }
            let sym = FuncSym {
                name: base.to_string(),
                args: *args,
            };
            return Ok(Expr::atom(Atom::cfunc(&sym, idx)));
        }

        Err(ExprError::UnknownSymbol {
            pos: ident_pos,
            name: name.to_string(),
            known: self.ctx.known_symbols(),
        })
    }

    fn tower(&mut self, name: &str) -> Result<Option<Expr>, ExprError> {
        let (func, order) = if let Some(func) = match name {
            "F" => Some(FuncName::F),
            "G" => Some(FuncName::G),
            "H" => Some(FuncName::H),
            "Q" => Some(FuncName::Q),
            _ => None,
        } {
            (func, -1)
        } else {
            let mut chars = name.chars();
            let head = chars.next().unwrap();
            let func = match head {
                'f' => FuncName::F,
                'g' => FuncName::G,
                'h' => FuncName::H,
                'q' => FuncName::Q,
                _ => return Ok(None),
            };
            let rest: String = chars.collect();
            let order = if rest.is_empty() {
                0
            } else if rest.chars().all(|c| c.is_ascii_digit()) {
                rest.parse::<i32>()
                    .map_err(|_| self.syntax("tower order out of range"))?
            } else {
                return Ok(None);
            };
            (func, order)
        };
        self.expect(b'(')?;
        let arg_pos = self.pos;
        let arg = self.ident();
        if arg != "u" {
            return Err(ExprError::Syntax {
                pos: arg_pos,
                msg: format!("coefficient functions take `u`, found `{arg}`"),
            });
        }
        self.expect(b')')?;
        Ok(Some(Expr::func(func, order)))
    }

    fn closure(&mut self, kind: ClosureKind) -> Result<Expr, ExprError> {
        self.expect(b'(')?;
        let negated = self.eat(b'-');
        let kind = match (kind, negated) {
            (ClosureKind::ExpPos, true) => ClosureKind::ExpNeg,
            (k, false) => k,
            _ => return Err(self.syntax("only exp takes a negated argument")),
        };
        let p_pos = self.pos;
        let freq = self.ident();
        if !self.ctx.params.contains(&freq) {
            return Err(ExprError::UnknownSymbol {
                pos: p_pos,
                name: freq,
                known: self.ctx.known_symbols(),
            });
        }
        self.expect(b'*')?;
        let v_pos = self.pos;
        let var_name = self.ident();
        let var = Var::from_name(&var_name).ok_or(ExprError::Syntax {
            pos: v_pos,
            msg: format!("closure argument must be a variable, found `{var_name}`"),
        })?;
        self.expect(b')')?;
        Ok(Expr::atom(Atom::Closure { kind, freq, var }))
    }
}
