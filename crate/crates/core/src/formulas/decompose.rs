//! Writing a term `w(x1..xn, z)` as `w(z..z, z) + c1 + .. + cm` with
//! commutator words `ci`, where `u + v = m(u, z, v)` associates to the right.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::term::{random_term, Term, VarStyle};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Variables `x_i` (0-based) the component may depend on.
    pub subset: Vec<usize>,
    pub term: Term,
    /// The component is ≈ `z` on the base algebra.
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorDecomposition {
    pub nvars: usize,
    pub input: Term,
    pub base: Term,
    pub components: Vec<Component>,
    pub reconstruction: Term,
}

#[derive(Serialize)]
pub struct DecompositionReport {
    pub input: String,
    pub base: String,
    pub components: Vec<ComponentReport>,
    pub reconstruction_size: usize,
    pub verified: bool,
}

#[derive(Serialize)]
pub struct ComponentReport {
    pub subset: Vec<String>,
    pub term: String,
    pub trivial: bool,
}

impl CommutatorDecomposition {
    pub fn report(&self, alg: &FiniteAlgebra) -> DecompositionReport {
        let vars = VarStyle::WithZero(self.nvars);
        let sig = alg.signature();
        DecompositionReport {
            input: self.input.to_prefix(sig, &vars),
            base: self.base.to_prefix(sig, &vars),
            components: self
                .components
                .iter()
                .map(|c| ComponentReport {
                    subset: c.subset.iter().map(|&i| vars.name(i)).collect(),
                    term: c.term.to_prefix(sig, &vars),
                    trivial: c.trivial,
                })
                .collect(),
            reconstruction_size: self.reconstruction.size(),
            verified: true,
        }
    }
}

/// Nonempty subsets of `0..n` ordered by size, then lexicographically.
pub fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u64..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Whether `t` collapses to `z` whenever one of the variables in `subset` is set to `z`.
pub fn absorbs(alg: &FiniteAlgebra, t: &Term, subset: &[usize], nvars: usize) -> Result<bool> {
    let z = Term::Var(nvars);
    for &i in subset {
        let fixed = t.substitute(&|v| {
            if v == i {
                Term::Var(nvars)
            } else {
                Term::Var(v)
            }
        });
        if !identity_on(alg, &fixed, &z, nvars + 1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn identity_on(alg: &FiniteAlgebra, s: &Term, t: &Term, nvars: usize) -> Result<bool> {
    Ok(alg.term_table(s, nvars)? == alg.term_table(t, nvars)?)
}

/// Inclusion–exclusion over subsets: `c_S` solves
/// `base + c_T1 + .. + c_S = d_S` (over `T ⊊ S`), peeling one summand `p` at a
/// time with `r ↦ m(z, p, r)`, the left inverse of `p + r`. Every component and
/// the reconstruction are checked on `alg`; any failure is reported as a
/// verification error.
pub fn decompose_commutator(
    alg: &FiniteAlgebra,
    m: &Term,
    w: &Term,
    nvars: usize,
) -> Result<CommutatorDecomposition> {
    if w.var_bound() > nvars + 1 {
        return Err(Error::InvalidArgument(format!(
            "term uses variables beyond x1..x{nvars}, z"
        )));
    }
    alg.signature().check(w)?;
    let zv = nvars;
    let z = Term::Var(zv);
    let peel = |p: &Term, r: Term| m.substitute(&|i| [z.clone(), p.clone(), r.clone()][i].clone());
    let plus = |u: &Term, v: &Term| m.substitute(&|i| [u.clone(), z.clone(), v.clone()][i].clone());
    // right-associated sum of `terms`
    let sum = |terms: &[&Term]| -> Term {
        let mut it = terms.iter().rev();
        let mut acc = (*it.next().expect("nonempty sum")).clone();
        for t in it {
            acc = plus(t, &acc);
        }
        acc
    };
    let base = w.substitute(&|i| {
        if i < nvars {
            Term::Var(zv)
        } else {
            Term::Var(i)
        }
    });
    let mut components: Vec<Component> = Vec::new();
    for subset in subsets_by_size(nvars) {
        let d = w.substitute(&|i| {
            if i < nvars && !subset.contains(&i) {
                Term::Var(zv)
            } else {
                Term::Var(i)
            }
        });
        let mut parts: Vec<&Term> = vec![&base];
        parts.extend(
            components
                .iter()
                .filter(|c| c.subset.iter().all(|i| subset.contains(i)))
                .map(|c| &c.term),
        );
        let term = parts.iter().fold(d, |r, p| peel(p, r));
        if !absorbs(alg, &term, &subset, nvars)? {
            return Err(Error::Verification(format!(
                "component for {:?} is not a commutator word: {}",
                subset
                    .iter()
                    .map(|&i| VarStyle::WithZero(nvars).name(i))
                    .collect::<Vec<_>>(),
                term.to_prefix(alg.signature(), &VarStyle::WithZero(nvars))
            )));
        }
        let trivial = identity_on(alg, &term, &z, nvars + 1)?;
        components.push(Component {
            subset,
            term,
            trivial,
        });
    }
    let mut all: Vec<&Term> = vec![&base];
    all.extend(components.iter().map(|c| &c.term));
    let reconstruction = sum(&all);
    if !identity_on(alg, &reconstruction, w, nvars + 1)? {
        return Err(Error::Verification(format!(
            "reconstruction differs from {} on `{}`",
            w.to_prefix(alg.signature(), &VarStyle::WithZero(nvars)),
            alg.name()
        )));
    }
    Ok(CommutatorDecomposition {
        nvars,
        input: w.clone(),
        base,
        components,
        reconstruction,
    })
}

/// Deterministic sample of terms in `x1..x_nvars, z` for decomposition runs.
pub fn sample_terms(
    alg: &FiniteAlgebra,
    nvars: usize,
    max_depth: usize,
    count: usize,
    seed: u64,
) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_term(alg.signature(), nvars + 1, max_depth, &mut rng))
        .collect()
}
