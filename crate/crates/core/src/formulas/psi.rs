//! Bounded-complexity search for polynomial links from a pair `(a, b)` to
//! a critical pair, plus a stepwise descent along the upper central series.

use serde::Serialize;

use crate::algebra::{Budget, FiniteAlgebra};
use crate::centrality::{upper_central_series, Nilpotence};
use crate::congruence::{search_pairs, si_check, SIWitness, UnaryPolynomialWitness, WitnessReport};
use crate::error::{Error, Result};
use crate::free::{absorbing_catalog, AbsorbingCatalog, TermStream, VarietyBounds};
use crate::partition::Partition;
use crate::term::{Signature, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiStrategy {
    /// Best-first search of the pair graph up to complexity `N`.
    GenericBounded,
    /// Commutator-word steps down the upper central series, then a binary term.
    SeriesGuided,
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiConfig {
    pub n_bound: usize,
    pub strategy: PsiStrategy,
    /// Depth and size caps on the binary terms tried by the descent's last step.
    pub max_depth: usize,
    pub max_size: usize,
    /// Largest commutator-word arity tried by descent steps.
    pub max_arity: usize,
    pub budget: Budget,
    /// Used to present a found pair `(c, d)` as `(m(c,d,b), b)`.
    #[serde(skip)]
    pub maltsev: Option<Term>,
}

impl PsiConfig {
    pub fn new(n_bound: usize) -> Result<Self> {
        if n_bound < 2 {
            return Err(Error::InvalidArgument(format!(
                "N must be at least 2, got {n_bound}"
            )));
        }
        Ok(PsiConfig {
            n_bound,
            strategy: PsiStrategy::GenericBounded,
            max_depth: 4,
            max_size: 64,
            max_arity: 2,
            budget: Budget::default(),
            maltsev: None,
        })
    }

    pub fn from_bounds(bounds: &VarietyBounds) -> Self {
        PsiConfig {
            budget: bounds.budget,
            max_arity: bounds.m.ceiling.max(1),
            ..PsiConfig::new(bounds.n).expect("variety bounds keep N ≥ 2")
        }
    }

    pub fn with_maltsev(mut self, m: Term) -> Self {
        self.maltsev = Some(m);
        self
    }

    pub fn with_strategy(mut self, strategy: PsiStrategy) -> Self {
        self.strategy = strategy;
        self
    }
}

/// A polynomial `p` with `p(a) = c`, `p(b) = d` and `(c, d)` critical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiHit {
    pub start: (usize, usize),
    pub critical: (usize, usize),
    pub witness: UnaryPolynomialWitness,
    /// `(c', p')` with `p'(a) = c'`, `p'(b) = b` and `(c', b)` critical.
    pub normalized: Option<(usize, UnaryPolynomialWitness)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiFailure {
    pub start: (usize, usize),
    pub n_bound: usize,
    /// Distinct pairs reached within the bound.
    pub reached: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiOutcome {
    Found(PsiHit),
    Failed(PsiFailure),
}

impl PsiOutcome {
    pub fn hit(&self) -> Option<&PsiHit> {
        match self {
            PsiOutcome::Found(h) => Some(h),
            PsiOutcome::Failed(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiReport {
    pub start: (usize, usize),
    pub critical: (usize, usize),
    pub witness: WitnessReport,
    pub normalized: Option<(usize, WitnessReport)>,
}

impl PsiHit {
    pub fn report(&self, sig: &Signature) -> PsiReport {
        PsiReport {
            start: self.start,
            critical: self.critical,
            witness: self.witness.report(sig),
            normalized: self.normalized.as_ref().map(|(c, w)| (*c, w.report(sig))),
        }
    }
}

fn check_pair(s: &FiniteAlgebra, a: usize, b: usize) -> Result<()> {
    for e in [a, b] {
        if e >= s.size() {
            return Err(Error::OutOfRange {
                element: e,
                size: s.size(),
            });
        }
    }
    if a == b {
        return Err(Error::InvalidArgument(format!(
            "Ψ search needs a ≠ b, got ({a}, {b})"
        )));
    }
    Ok(())
}

/// `x ↦ m(p(x), p(b), b)`: sends `a` to `m(c,d,b)` and `b` to `b`.
fn normalize(
    s: &FiniteAlgebra,
    m: &Term,
    p: &UnaryPolynomialWitness,
    b: usize,
) -> Result<UnaryPolynomialWitness> {
    let k = p.params.len();
    let at_b = p
        .term
        .substitute(&|i| Term::Var(if i == 0 { k + 1 } else { i }));
    let term = m.substitute(&|i| match i {
        0 => p.term.clone(),
        1 => at_b.clone(),
        _ => Term::Var(k + 1),
    });
    let mut params = p.params.clone();
    params.push(b);
    let w = UnaryPolynomialWitness { term, params };
    let c = w.eval(s, b)?;
    if c != b {
        return Err(Error::Verification(format!(
            "normalized witness sends {b} to {c}; Mal'tsev term does not fit `{}`",
            s.name()
        )));
    }
    Ok(w)
}

fn finish_hit(
    s: &FiniteAlgebra,
    cfg: &PsiConfig,
    start: (usize, usize),
    critical: (usize, usize),
    witness: UnaryPolynomialWitness,
) -> Result<PsiHit> {
    let (a, b) = start;
    if witness.eval(s, a)? != critical.0 || witness.eval(s, b)? != critical.1 {
        return Err(Error::Internal(format!(
            "Ψ witness does not map {start:?} to {critical:?}"
        )));
    }
    let normalized = if critical.1 == b {
        Some((critical.0, witness.clone()))
    } else if let Some(m) = &cfg.maltsev {
        let w = normalize(s, m, &witness, b)?;
        Some((w.eval(s, a)?, w))
    } else {
        None
    };
    Ok(PsiHit {
        start,
        critical,
        witness,
        normalized,
    })
}

/// Looks for a critical pair reachable from `(a, b)` by a polynomial of complexity at most `N`.
pub fn psi_search(
    s: &FiniteAlgebra,
    si: &SIWitness,
    a: usize,
    b: usize,
    cfg: &PsiConfig,
) -> Result<PsiOutcome> {
    check_pair(s, a, b)?;
    match cfg.strategy {
        PsiStrategy::GenericBounded => {
            let search = search_pairs(s, (a, b), cfg.n_bound, &cfg.budget, |c, d| {
                si.is_critical(c, d)
            })?;
            match search.found {
                Some((c, d)) => {
                    let w = search.reached[c * search.n + d].clone().expect("found pair has a witness");
                    Ok(PsiOutcome::Found(finish_hit(s, cfg, (a, b), (c, d), w)?))
                }
                None => Ok(PsiOutcome::Failed(PsiFailure {
                    start: (a, b),
                    n_bound: cfg.n_bound,
                    reached: search.reached.iter().filter(|w| w.is_some()).count(),
                    reason: format!(
                        "no critical pair within complexity {}; either N is misconfigured or `{}` contradicts the bounded-complexity claim",
                        cfg.n_bound,
                        s.name()
                    ),
                })),
            }
        }
        PsiStrategy::SeriesGuided => {
            let ctx = DescentContext::new(s, cfg)?;
            match ctx.descend(a, b) {
                Ok(d) if d.witness.complexity() <= cfg.n_bound => Ok(PsiOutcome::Found(
                    finish_hit(s, cfg, (a, b), d.critical, d.witness)?,
                )),
                Ok(d) => Ok(PsiOutcome::Failed(PsiFailure {
                    start: (a, b),
                    n_bound: cfg.n_bound,
                    reached: d.steps.len(),
                    reason: format!("descent witness has complexity {}", d.witness.complexity()),
                })),
                Err(Error::Verification(reason)) => Ok(PsiOutcome::Failed(PsiFailure {
                    start: (a, b),
                    n_bound: cfg.n_bound,
                    reached: 0,
                    reason,
                })),
                Err(e) => Err(e),
            }
        }
    }
}

/// `{(p(z), p(w)) : complexity(p) ≤ N}` as an `n × n` table.
pub fn psi_image(
    s: &FiniteAlgebra,
    z: usize,
    w: usize,
    n_bound: usize,
    budget: &Budget,
) -> Result<Vec<bool>> {
    let search = search_pairs(s, (z, w), n_bound, budget, |_, _| false)?;
    Ok(search.reached.iter().map(|r| r.is_some()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    CommutatorWord,
    BinaryTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentStep {
    pub kind: StepKind,
    /// Least `i` with `(from, b) ∈ ζ_i`.
    pub level: usize,
    pub from: usize,
    pub to: usize,
    pub witness: UnaryPolynomialWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UcsDescent {
    pub start: (usize, usize),
    pub class: usize,
    pub steps: Vec<DescentStep>,
    /// `(c, b)`, a critical pair.
    pub critical: (usize, usize),
    /// Composition of all step witnesses.
    pub witness: UnaryPolynomialWitness,
}

/// Precomputed series, monolith and word lists for repeated descents in one algebra.
pub struct DescentContext<'a> {
    s: &'a FiniteAlgebra,
    series: Vec<Partition>,
    si: SIWitness,
    words: Vec<AbsorbingCatalog>,
    binary: Vec<Term>,
}

impl<'a> DescentContext<'a> {
    pub fn new(s: &'a FiniteAlgebra, cfg: &PsiConfig) -> Result<Self> {
        let ucs = upper_central_series(s)?;
        if let Nilpotence::NotNilpotent { .. } = ucs.status {
            return Err(Error::InvalidArgument(format!(
                "`{}` is not nilpotent",
                s.name()
            )));
        }
        let si = si_check(s)?.ok_or_else(|| {
            Error::InvalidArgument(format!("`{}` is not subdirectly irreducible", s.name()))
        })?;
        let mut words = Vec::new();
        if ucs.terms.len() > 2 {
            for nvars in 1..=cfg.max_arity.max(1) {
                words.push(absorbing_catalog(s, nvars, &cfg.budget)?);
            }
        }
        let mut binary = Vec::new();
        for level in TermStream::new(s, 2, cfg.max_depth, cfg.budget)? {
            binary.extend(
                level
                    .into_iter()
                    .map(|e| e.term)
                    .filter(|t| t.size() <= cfg.max_size),
            );
        }
        Ok(DescentContext {
            s,
            series: ucs.terms,
            si,
            words,
            binary,
        })
    }

    fn level(&self, c: usize, b: usize) -> usize {
        self.series
            .iter()
            .position(|z| z.related(c, b))
            .expect("top of the series relates everything")
    }

    /// Claim-1 style step: some commutator word `w(.., x, .., b)` moving `(c, b)` lower.
    fn word_step(&self, c: usize, b: usize, level: usize) -> Result<Option<DescentStep>> {
        let n = self.s.size();
        for cat in &self.words {
            let nv = cat.nvars;
            for e in cat.nontrivial() {
                for pos in 0..nv {
                    let combos = n.pow(nv as u32 - 1);
                    let mut params = vec![0; nv - 1];
                    for r in 0..combos {
                        crate::algebra::unrank(r, n, nv - 1, &mut params);
                        let mut asg = Vec::with_capacity(nv + 1);
                        let mut it = params.iter();
                        for i in 0..nv {
                            asg.push(if i == pos {
                                c
                            } else {
                                *it.next().expect("param")
                            });
                        }
                        asg.push(b);
                        let to = self.s.eval(&e.term, &asg)?;
                        if to == b || self.level(to, b) >= level {
                            continue;
                        }
                        // x_pos → x, other x_i → parameters in order, z → last parameter
                        let term = e.term.rename(&|i| {
                            if i == pos {
                                0
                            } else if i < pos {
                                i + 1
                            } else if i < nv {
                                i
                            } else {
                                nv
                            }
                        });
                        let mut ps = params.clone();
                        ps.push(b);
                        return Ok(Some(DescentStep {
                            kind: StepKind::CommutatorWord,
                            level,
                            from: c,
                            to,
                            witness: UnaryPolynomialWitness { term, params: ps },
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Claim-2 style step: a binary term `t` with `t(b,b) = b` and `(t(c,b), b)` critical.
    fn binary_step(&self, c: usize, b: usize) -> Result<Option<DescentStep>> {
        for t in &self.binary {
            if self.s.eval(t, &[b, b])? != b {
                continue;
            }
            let to = self.s.eval(t, &[c, b])?;
            if self.si.is_critical(to, b) {
                return Ok(Some(DescentStep {
                    kind: StepKind::BinaryTerm,
                    level: 1,
                    from: c,
                    to,
                    witness: UnaryPolynomialWitness {
                        term: t.clone(),
                        params: vec![b],
                    },
                }));
            }
        }
        Ok(None)
    }

    pub fn descend(&self, a: usize, b: usize) -> Result<UcsDescent> {
        check_pair(self.s, a, b)?;
        let mut steps = Vec::new();
        let mut cur = a;
        let mut level = self.level(a, b);
        while level > 1 {
            let step = self.word_step(cur, b, level)?.ok_or_else(|| {
                Error::Verification(format!(
                    "descent stage {}: no commutator word of arity ≤ {} moves ({cur}, {b}) below ζ_{level}",
                    steps.len() + 1,
                    self.words.len()
                ))
            })?;
            cur = step.to;
            level = self.level(cur, b);
            steps.push(step);
        }
        let last = self.binary_step(cur, b)?.ok_or_else(|| {
            Error::Verification(format!(
                "descent stage {}: no binary term links ({cur}, {b}) to a critical pair",
                steps.len() + 1
            ))
        })?;
        let critical = (last.to, b);
        steps.push(last);
        let witness = steps
            .iter()
            .fold(UnaryPolynomialWitness::identity(), |acc, s| {
                acc.then(&s.witness)
            });
        if witness.eval(self.s, a)? != critical.0 || witness.eval(self.s, b)? != b {
            return Err(Error::Internal(
                "composed descent witness is inconsistent".into(),
            ));
        }
        Ok(UcsDescent {
            start: (a, b),
            class: self.series.len() - 1,
            steps,
            critical,
            witness,
        })
    }
}

pub fn ucs_descent(s: &FiniteAlgebra, a: usize, b: usize, cfg: &PsiConfig) -> Result<UcsDescent> {
    DescentContext::new(s, cfg)?.descend(a, b)
}
