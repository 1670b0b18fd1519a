//! The binary-term congruence formula
//! `Φ(u,v,x,y) = ⋁_{t∈T} (t(x,y) ≈ m(u,v,y) ∧ t(y,y) ≈ y)`.

use serde::Serialize;

use crate::algebra::{Budget, FiniteAlgebra};
use crate::centrality::is_central;
use crate::congruence::principal_congruence;
use crate::error::{Error, Result};
use crate::free::{binary_term_catalog, find_maltsev, MaltsevSearch};
use crate::term::{Signature, Term, VarStyle};

#[derive(Clone, Debug)]
pub struct PhiFormula {
    pub algebra: String,
    pub signature: Signature,
    /// Mal'tsev term in variables 0, 1, 2.
    pub maltsev: Term,
    /// Representatives of the 2-generated free algebra, variables 0 and 1.
    pub terms: Vec<Term>,
}

impl PhiFormula {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Tabulates `m` and every `t ∈ T` on `s` for repeated evaluation.
    pub fn on(&self, s: &FiniteAlgebra) -> Result<PhiTables> {
        if s.signature() != &self.signature {
            return Err(Error::SignatureMismatch(format!(
                "Φ was built over `{}`, `{}` has a different signature",
                self.algebra,
                s.name()
            )));
        }
        let n = s.size();
        let m = s.term_table(&self.maltsev, 3)?;
        let terms = self
            .terms
            .iter()
            .map(|t| s.term_table(t, 2))
            .collect::<Result<Vec<_>>>()?;
        Ok(PhiTables { n, m, terms })
    }

    /// One line per disjunct, variables named `u, v, x, y`.
    pub fn disjuncts(&self) -> Vec<String> {
        let names = VarStyle::Named(vec!["u".into(), "v".into(), "x".into(), "y".into()]);
        let m = self
            .maltsev
            .rename(&|i| [0, 1, 3][i])
            .to_prefix(&self.signature, &names);
        self.terms
            .iter()
            .map(|t| {
                let txy = t.rename(&|i| [2, 3][i]).to_prefix(&self.signature, &names);
                let tyy = t.rename(&|_| 3).to_prefix(&self.signature, &names);
                format!("({txy} ≈ {m} ∧ {tyy} ≈ y)")
            })
            .collect()
    }
}

/// `Φ` evaluated by table lookup on one algebra.
pub struct PhiTables {
    n: usize,
    m: Vec<usize>,
    terms: Vec<Vec<usize>>,
}

impl PhiTables {
    pub fn eval(&self, u: usize, v: usize, x: usize, y: usize) -> bool {
        let n = self.n;
        let target = self.m[(u * n + v) * n + y];
        self.terms
            .iter()
            .any(|t| t[x * n + y] == target && t[y * n + y] == y)
    }

    /// `{(u, v) : Φ(u, v, x, y)}` as an `n × n` membership table.
    pub fn relation(&self, x: usize, y: usize) -> Vec<bool> {
        let n = self.n;
        (0..n * n).map(|i| self.eval(i / n, i % n, x, y)).collect()
    }
}

/// Packages a verified Mal'tsev term with the binary term catalog of `alg`.
pub fn build_phi(alg: &FiniteAlgebra, budget: &Budget) -> Result<PhiFormula> {
    let maltsev = match find_maltsev(alg, budget)? {
        MaltsevSearch::Found(w) => w.term,
        MaltsevSearch::Absent => {
            return Err(Error::NoMaltsev(
                alg.name().to_string(),
                "V(A) is not congruence permutable",
            ))
        }
        MaltsevSearch::Unknown => {
            return Err(Error::Truncated(format!(
                "Mal'tsev search on `{}`",
                alg.name()
            )))
        }
    };
    let terms = binary_term_catalog(alg, budget)?
        .elements
        .into_iter()
        .map(|e| e.term)
        .collect();
    Ok(PhiFormula {
        algebra: alg.name().to_string(),
        signature: alg.signature().clone(),
        maltsev,
        terms,
    })
}

pub fn eval_phi(
    phi: &PhiFormula,
    s: &FiniteAlgebra,
    u: usize,
    v: usize,
    x: usize,
    y: usize,
) -> Result<bool> {
    for e in [u, v, x, y] {
        if e >= s.size() {
            return Err(Error::OutOfRange {
                element: e,
                size: s.size(),
            });
        }
    }
    Ok(phi.on(s)?.eval(u, v, x, y))
}

/// Comparison of `{(u,v) : Φ(u,v,a,b)}` with `Cg(a,b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiVerdict {
    pub pair: (usize, usize),
    /// `Φ` implies membership in `Cg(a,b)`.
    pub sound: bool,
    /// Every pair of `Cg(a,b)` satisfies `Φ`.
    pub complete: bool,
    pub central: bool,
    /// First pair on which the two relations disagree.
    pub counterexample: Option<(usize, usize)>,
}

impl PhiVerdict {
    pub fn defines(&self) -> bool {
        self.sound && self.complete
    }
}

pub fn phi_defines_check(
    phi: &PhiFormula,
    s: &FiniteAlgebra,
    a: usize,
    b: usize,
) -> Result<PhiVerdict> {
    let tables = phi.on(s)?;
    verdict_with(&tables, s, a, b)
}

pub(crate) fn verdict_with(
    tables: &PhiTables,
    s: &FiniteAlgebra,
    a: usize,
    b: usize,
) -> Result<PhiVerdict> {
    let n = s.size();
    let cg = principal_congruence(s, a, b)?;
    let rel = tables.relation(a, b);
    let mut sound = true;
    let mut complete = true;
    let mut counterexample = None;
    for u in 0..n {
        for v in 0..n {
            let (r, c) = (rel[u * n + v], cg.related(u, v));
            if r && !c {
                sound = false;
            }
            if c && !r {
                complete = false;
            }
            if r != c && counterexample.is_none() {
                counterexample = Some((u, v));
            }
        }
    }
    Ok(PhiVerdict {
        pair: (a, b),
        sound,
        complete,
        central: is_central(s, &cg)?,
        counterexample,
    })
}
