//! Terms over a finite signature.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An operation symbol: name plus arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// Ordered list of operation symbols. Terms refer to operations by index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature(pub Vec<OpSymbol>);

impl Signature {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OpSymbol> {
        self.0.iter()
    }

    pub fn arity(&self, op: usize) -> Option<usize> {
        self.0.get(op).map(|s| s.arity)
    }

    pub fn name(&self, op: usize) -> &str {
        &self.0[op].name
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|s| s.name == name)
    }

    pub fn nullary(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| s.arity == 0)
            .map(|(i, _)| i)
    }

    /// Checks that every `Apply` node of `t` names an operation with the right arity.
    pub fn check(&self, t: &Term) -> Result<()> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(op, args) => {
                let sym = self.0.get(*op).ok_or(Error::UnknownOperation(*op))?;
                if sym.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: sym.name.clone(),
                        expected: sym.arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check(a))
            }
        }
    }
}

/// A term: a variable or an operation applied to subterms.
///
/// Terms are totally ordered by size, then depth, then the preorder
/// sequence of nodes. Every "least witness" in the crate refers to this
/// order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(op: usize, args: Vec<Term>) -> Term {
        Term::App(op, args)
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Variables have depth 0; an application is one deeper than its deepest argument.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// One more than the largest variable index occurring, or 0 for ground terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn contains_var(&self, v: usize) -> bool {
        match self {
            Term::Var(i) => *i == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Replaces each variable `i` by `f(i)`.
    pub fn substitute(&self, f: &dyn Fn(usize) -> Term) -> Term {
        match self {
            Term::Var(i) => f(*i),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.substitute(f)).collect()),
        }
    }

    /// Renames variable `i` to `f(i)`.
    pub fn rename(&self, f: &dyn Fn(usize) -> usize) -> Term {
        self.substitute(&|i| Term::Var(f(i)))
    }

    fn preorder(&self, out: &mut Vec<(u8, usize, usize)>) {
        match self {
            Term::Var(i) => out.push((0, *i, 0)),
            Term::App(op, args) => {
                out.push((1, *op, args.len()));
                for a in args {
                    a.preorder(out);
                }
            }
        }
    }

    /// Renders in prefix notation, e.g. `mul(x1,inv(z))`. Nullary operations print bare.
    pub fn display<'a>(&'a self, sig: &'a Signature, vars: &'a VarStyle) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            sig,
            vars,
        }
    }

    pub fn to_prefix(&self, sig: &Signature, vars: &VarStyle) -> String {
        self.display(sig, vars).to_string()
    }

    /// Parses prefix notation. Identifiers that name an operation are
    /// applications; anything else is resolved through `vars`.
    pub fn parse(
        input: &str,
        sig: &Signature,
        vars: &dyn Fn(&str) -> Option<usize>,
    ) -> Result<Term> {
        let mut p = Parser {
            src: input,
            pos: 0,
            sig,
            vars,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != input.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.depth().cmp(&other.depth()))
            .then_with(|| {
                let (mut a, mut b) = (Vec::new(), Vec::new());
                self.preorder(&mut a);
                other.preorder(&mut b);
                a.cmp(&b)
            })
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// How variable indices are printed and parsed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarStyle {
    /// `x1, x2, ...`
    Indexed,
    /// `x1..xn` followed by `z` at index n.
    WithZero(usize),
    /// `x` at index 0, then `y1, y2, ...` (unary polynomials with parameters).
    Polynomial,
    /// Explicit names; indices past the end fall back to `v{i}`.
    Named(Vec<String>),
}

impl VarStyle {
    pub fn name(&self, i: usize) -> String {
        match self {
            VarStyle::Indexed => format!("x{}", i + 1),
            VarStyle::WithZero(n) if i == *n => "z".to_string(),
            VarStyle::WithZero(_) => format!("x{}", i + 1),
            VarStyle::Polynomial if i == 0 => "x".to_string(),
            VarStyle::Polynomial => format!("y{i}"),
            VarStyle::Named(names) => names.get(i).cloned().unwrap_or_else(|| format!("v{i}")),
        }
    }

    /// Inverse of [`VarStyle::name`].
    pub fn resolve(&self, s: &str) -> Option<usize> {
        match self {
            VarStyle::WithZero(n) if s == "z" => Some(*n),
            VarStyle::Polynomial if s == "x" => Some(0),
            VarStyle::Polynomial => s.strip_prefix('y')?.parse().ok().filter(|&i| i >= 1),
            VarStyle::Named(names) => names.iter().position(|n| n == s),
            VarStyle::Indexed | VarStyle::WithZero(_) => {
                let i: usize = s.strip_prefix('x')?.parse().ok()?;
                match self {
                    VarStyle::WithZero(n) if i > *n => None,
                    _ => i.checked_sub(1),
                }
            }
        }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
    vars: &'a VarStyle,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(i) => write!(f, "{}", self.vars.name(*i)),
            Term::App(op, args) => {
                let name = self.sig.0.get(*op).map(|s| s.name.as_str()).unwrap_or("?");
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (k, a) in args.iter().enumerate() {
                        if k > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", a.display(self.sig, self.vars))?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    sig: &'a Signature,
    vars: &'a dyn Fn(&str) -> Option<usize>,
}

impl Parser<'_> {
    fn error(&self, reason: &str) -> Error {
        Error::TermParse {
            input: self.src.to_string(),
            reason: format!("{reason} at byte {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == '(' || c == ')' || c == ',' || c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.ident()?.to_string();
        self.skip_ws();
        let has_args = self.peek() == Some('(');
        match self.sig.find(&name) {
            Some(op) => {
                let mut args = Vec::new();
                if has_args {
                    self.pos += 1;
                    self.skip_ws();
                    if self.peek() == Some(')') {
                        self.pos += 1;
                    } else {
                        loop {
                            args.push(self.term()?);
                            self.skip_ws();
                            match self.peek() {
                                Some(',') => self.pos += 1,
                                Some(')') => {
                                    self.pos += 1;
                                    break;
                                }
                                _ => return Err(self.error("expected `,` or `)`")),
                            }
                        }
                    }
                }
                let arity = self.sig.0[op].arity;
                if args.len() != arity {
                    return Err(self.error(&format!(
                        "`{name}` takes {arity} arguments, got {}",
                        args.len()
                    )));
                }
                Ok(Term::App(op, args))
            }
            None if has_args => Err(self.error(&format!("unknown operation `{name}`"))),
            None => (self.vars)(&name)
                .map(Term::Var)
                .ok_or_else(|| self.error(&format!("unknown variable `{name}`"))),
        }
    }
}

/// Draws a random term over `sig` in variables `0..nvars` with depth at most `max_depth`.
pub fn random_term<R: Rng + ?Sized>(
    sig: &Signature,
    nvars: usize,
    max_depth: usize,
    rng: &mut R,
) -> Term {
    let leaves: Vec<Term> = (0..nvars)
        .map(Term::Var)
        .chain(sig.nullary().map(|op| Term::App(op, vec![])))
        .collect();
    let inner: Vec<usize> = (0..sig.len()).filter(|&op| sig.0[op].arity > 0).collect();
    fn go<R: Rng + ?Sized>(
        sig: &Signature,
        leaves: &[Term],
        inner: &[usize],
        depth: usize,
        rng: &mut R,
    ) -> Term {
        if depth == 0 || inner.is_empty() || rng.gen_bool(0.3) {
            return leaves[rng.gen_range(0..leaves.len())].clone();
        }
        let op = inner[rng.gen_range(0..inner.len())];
        let args = (0..sig.0[op].arity)
            .map(|_| go(sig, leaves, inner, depth - 1, rng))
            .collect();
        Term::App(op, args)
    }
    assert!(
        !leaves.is_empty(),
        "random_term needs a variable or a constant"
    );
    go(sig, &leaves, &inner, max_depth, rng)
}
