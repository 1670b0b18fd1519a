//! Free algebras of `V(A)` realized as subpowers: an element of `F(v)` is
//! the vector of its values at a list of index tuples from `A^v`, carried
//! together with a least term producing it.
//!
//! Generation is breadth-first by level (level `d` holds the vectors first
//! reached by terms of depth `d`); within a level each vector keeps the
//! least candidate term, so catalogs are identical run to run and between
//! the parallel and sequential paths.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{
    checked_pow, for_each_new_tuple, rank, tuple_columns, unrank, Budget, FiniteAlgebra,
};
use crate::centrality::nilpotence_class;
use crate::error::{Error, Result};
use crate::par;
use crate::term::{Term, VarStyle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exhaustion {
    /// Fixpoint reached: the element set is closed under every operation.
    Complete,
    /// Stopped by the budget (or a depth bound) before the fixpoint.
    Truncated,
}

impl std::fmt::Display for Exhaustion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Exhaustion::Complete => "complete",
            Exhaustion::Truncated => "truncated",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogElement {
    pub vector: Vec<u8>,
    pub term: Term,
    pub level: usize,
}

type Token = (u8, usize, usize);

/// Cap on stored vector cells (elements × index-set size).
pub const MAX_CELLS: usize = 1 << 24;

const TASK_CHUNK: usize = 16;

/// A generated subalgebra of `A^I` with a witness term per element.
#[derive(Clone, Debug)]
pub struct SubpowerCatalog {
    pub vars: usize,
    /// Index tuples, each of length `vars`.
    pub index: Vec<Vec<usize>>,
    pub elements: Vec<CatalogElement>,
    pub status: Exhaustion,
    lookup: HashMap<Vec<u8>, usize>,
    sizes: Vec<usize>,
    depths: Vec<usize>,
    preorders: Vec<Vec<Token>>,
}

#[derive(Serialize)]
struct CatalogDump<'a> {
    algebra: &'a str,
    variables: Vec<String>,
    /// `vector[j]` is the value at `index_set[j]`.
    index_set: &'a [Vec<usize>],
    status: Exhaustion,
    elements: Vec<DumpElement>,
}

#[derive(Serialize)]
struct DumpElement {
    vector: Vec<u8>,
    term: String,
}

impl SubpowerCatalog {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.status == Exhaustion::Complete
    }

    pub fn find(&self, vector: &[u8]) -> Option<&CatalogElement> {
        self.lookup.get(vector).map(|&i| &self.elements[i])
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.elements.iter().map(|e| &e.term)
    }

    /// Re-evaluates every witness at the index tuples and compares with the stored vector.
    pub fn verify_witnesses(&self, alg: &FiniteAlgebra) -> Result<bool> {
        let cols = self.index_columns();
        for e in &self.elements {
            let vals = alg.eval_columns(&e.term, &cols, self.index.len())?;
            if vals.iter().zip(&e.vector).any(|(&a, &b)| a != b as usize) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn index_columns(&self) -> Vec<Vec<usize>> {
        (0..self.vars)
            .map(|v| self.index.iter().map(|t| t[v]).collect())
            .collect()
    }

    /// JSON dump with the index-set convention in the header.
    pub fn to_json(&self, alg: &FiniteAlgebra, vars: &VarStyle) -> String {
        let dump = CatalogDump {
            algebra: alg.name(),
            variables: (0..self.vars).map(|i| vars.name(i)).collect(),
            index_set: &self.index,
            status: self.status,
            elements: self
                .elements
                .iter()
                .map(|e| DumpElement {
                    vector: e.vector.clone(),
                    term: e.term.to_prefix(alg.signature(), vars),
                })
                .collect(),
        };
        serde_json::to_string(&dump).expect("catalog serialization cannot fail")
    }

    fn push(&mut self, vector: Vec<u8>, term: Term, level: usize) {
        let mut pre = Vec::new();
        preorder(&term, &mut pre);
        self.sizes.push(term.size());
        self.depths.push(term.depth());
        self.preorders.push(pre);
        self.lookup.insert(vector.clone(), self.elements.len());
        self.elements.push(CatalogElement {
            vector,
            term,
            level,
        });
    }

    fn recipe_cmp(&self, a: &Recipe, b: &Recipe) -> Ordering {
        let size = |r: &Recipe| 1 + r.args.iter().map(|&i| self.sizes[i]).sum::<usize>();
        let depth = |r: &Recipe| 1 + r.args.iter().map(|&i| self.depths[i]).max().unwrap_or(0);
        size(a)
            .cmp(&size(b))
            .then_with(|| depth(a).cmp(&depth(b)))
            .then_with(|| {
                let tokens = |r: &Recipe| {
                    std::iter::once((1u8, r.op, r.args.len()))
                        .chain(
                            r.args
                                .iter()
                                .flat_map(|&i| self.preorders[i].iter().copied()),
                        )
                        .collect::<Vec<_>>()
                };
                tokens(a).cmp(&tokens(b))
            })
    }

    fn build(&self, r: &Recipe) -> Term {
        Term::App(
            r.op,
            r.args
                .iter()
                .map(|&i| self.elements[i].term.clone())
                .collect(),
        )
    }
}

fn preorder(t: &Term, out: &mut Vec<Token>) {
    match t {
        Term::Var(i) => out.push((0, *i, 0)),
        Term::App(op, args) => {
            out.push((1, *op, args.len()));
            for a in args {
                preorder(a, out);
            }
        }
    }
}

/// An operation applied to catalog elements, not yet turned into a term.
#[derive(Clone, Debug)]
struct Recipe {
    op: usize,
    args: Vec<usize>,
}

/// Level-by-level generator of a subpower catalog.
pub struct FreeGenerator<'a> {
    alg: &'a FiniteAlgebra,
    catalog: SubpowerCatalog,
    frontier: usize,
    level: usize,
    budget: Budget,
    finished: bool,
}

impl<'a> FreeGenerator<'a> {
    /// Seeds level 0 with the `vars` projections and every constant.
    pub fn new(
        alg: &'a FiniteAlgebra,
        vars: usize,
        index: Vec<Vec<usize>>,
        budget: Budget,
    ) -> Result<Self> {
        if vars == 0 {
            return Err(Error::InvalidArgument(
                "free algebra needs at least one variable".into(),
            ));
        }
        if index.is_empty() {
            return Err(Error::InvalidArgument("index set is empty".into()));
        }
        if alg.size() > 256 {
            return Err(Error::InvalidArgument(format!(
                "term catalogs support universes of at most 256 elements, `{}` has {}",
                alg.name(),
                alg.size()
            )));
        }
        for t in &index {
            if t.len() != vars {
                return Err(Error::InvalidArgument(format!(
                    "index tuple {t:?} does not have length {vars}"
                )));
            }
            if let Some(&x) = t.iter().find(|&&x| x >= alg.size()) {
                return Err(Error::OutOfRange {
                    element: x,
                    size: alg.size(),
                });
            }
        }
        let mut catalog = SubpowerCatalog {
            vars,
            index,
            elements: Vec::new(),
            status: Exhaustion::Truncated,
            lookup: HashMap::new(),
            sizes: Vec::new(),
            depths: Vec::new(),
            preorders: Vec::new(),
        };
        let mut seeds: Vec<(Vec<u8>, Term)> = (0..vars)
            .map(|v| {
                (
                    catalog.index.iter().map(|t| t[v] as u8).collect(),
                    Term::Var(v),
                )
            })
            .collect();
        for op in alg.signature().nullary() {
            let c = alg.table(op)[0] as u8;
            seeds.push((vec![c; catalog.index.len()], Term::App(op, vec![])));
        }
        seeds.sort_by(|a, b| a.1.cmp(&b.1));
        for (vector, term) in seeds {
            if !catalog.lookup.contains_key(&vector) {
                catalog.push(vector, term, 0);
            }
        }
        budget.check("term catalog", catalog.len())?;
        if catalog.index.len() > MAX_CELLS {
            return Err(Error::BudgetExceeded {
                what: "catalog index set",
                needed: catalog.index.len(),
                cap: MAX_CELLS,
            });
        }
        Ok(FreeGenerator {
            alg,
            catalog,
            frontier: 0,
            level: 0,
            budget,
            finished: false,
        })
    }

    pub fn catalog(&self) -> &SubpowerCatalog {
        &self.catalog
    }

    /// Element cap: the budget, further limited by `MAX_CELLS / |I|`.
    pub fn cap(&self) -> usize {
        self.budget
            .max_elements
            .min(MAX_CELLS / self.catalog.index.len())
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn finish(self) -> SubpowerCatalog {
        self.catalog
    }

    /// Generates the next level. Returns the number of new elements; 0 means
    /// the catalog is closed (status becomes `Complete`) or was truncated.
    pub fn step(&mut self) -> usize {
        if self.finished {
            return 0;
        }
        let end = self.catalog.len();
        if self.frontier == end {
            self.catalog.status = Exhaustion::Complete;
            self.finished = true;
            return 0;
        }
        let cap = self.cap();
        let room = cap.saturating_sub(end);
        let frontier = self.frontier;
        let cat = &self.catalog;
        let alg = self.alg;
        let n = alg.size();
        let width = cat.index.len();

        // one task per (op, first argument)
        let tasks: Vec<(usize, usize)> = (0..alg.num_ops())
            .filter(|&op| alg.arity(op) > 0)
            .flat_map(|op| (0..end).map(move |first| (op, first)))
            .collect();
        let run_task = |&(op, first): &(usize, usize)| {
            let arity = alg.arity(op);
            let table = alg.table(op);
            let mut found: HashMap<Vec<u8>, Recipe> = HashMap::new();
            let mut overflow = false;
            let mut visit = |rest: &[usize]| {
                let mut args = Vec::with_capacity(arity);
                args.push(first);
                args.extend_from_slice(rest);
                let mut vec = vec![0u8; width];
                for (c, out) in vec.iter_mut().enumerate() {
                    let mut at = 0;
                    for &a in &args {
                        at = at * n + cat.elements[a].vector[c] as usize;
                    }
                    *out = table[at] as u8;
                }
                if cat.lookup.contains_key(&vec) {
                    return true;
                }
                let r = Recipe { op, args };
                match found.get_mut(&vec) {
                    Some(old) => {
                        if cat.recipe_cmp(&r, old) == Ordering::Less {
                            *old = r;
                        }
                    }
                    None => {
                        found.insert(vec, r);
                        if found.len() > room {
                            overflow = true;
                            return false;
                        }
                    }
                }
                true
            };
            let mut buf = Vec::new();
            if first >= frontier {
                // every completion of the tail is allowed
                let mut all = vec![0; arity - 1];
                let total = checked_pow(end, arity - 1).unwrap_or(usize::MAX);
                for r in 0..total {
                    unrank(r, end, arity - 1, &mut all);
                    if !visit(&all) {
                        break;
                    }
                }
            } else if arity > 1 {
                for_each_new_tuple(arity - 1, frontier, end, &mut buf, &mut visit);
            }
            (found, overflow)
        };

        // fixed-size chunks keep memory bounded and truncation deterministic
        let mut merged: HashMap<Vec<u8>, Recipe> = HashMap::new();
        let mut overflow = false;
        for chunk in tasks.chunks(TASK_CHUNK) {
            for (found, of) in par::map(chunk, run_task) {
                overflow |= of;
                for (v, r) in found {
                    match merged.get_mut(&v) {
                        Some(old) => {
                            if cat.recipe_cmp(&r, old) == Ordering::Less {
                                *old = r;
                            }
                        }
                        None => {
                            merged.insert(v, r);
                        }
                    }
                }
            }
            if overflow || merged.len() > room {
                overflow = true;
                break;
            }
        }
        let mut fresh: Vec<(Vec<u8>, Recipe)> = merged.into_iter().collect();
        fresh.sort_by(|a, b| cat.recipe_cmp(&a.1, &b.1));
        if overflow || fresh.len() > room {
            fresh.truncate(room);
            self.finished = true;
            self.catalog.status = Exhaustion::Truncated;
        }
        self.level += 1;
        let level = self.level;
        let built: Vec<(Vec<u8>, Term)> = fresh
            .into_iter()
            .map(|(v, r)| {
                let t = self.catalog.build(&r);
                (v, t)
            })
            .collect();
        let added = built.len();
        for (v, t) in built {
            self.catalog.push(v, t, level);
        }
        self.frontier = end;
        if added == 0 && !self.finished {
            self.catalog.status = Exhaustion::Complete;
            self.finished = true;
        }
        added
    }

    /// Runs to the fixpoint or the budget, whichever comes first.
    pub fn run(mut self) -> SubpowerCatalog {
        while !self.finished {
            self.step();
        }
        self.catalog
    }

    /// Runs until `done` holds on the catalog, the fixpoint, or the budget.
    pub fn run_until(&mut self, done: impl Fn(&SubpowerCatalog) -> bool) -> bool {
        loop {
            if done(&self.catalog) {
                return true;
            }
            if self.finished {
                return false;
            }
            self.step();
        }
    }
}

/// BFS closure of the projections on `vars` variables restricted to `index`.
pub fn generate_free(
    alg: &FiniteAlgebra,
    vars: usize,
    index: Vec<Vec<usize>>,
    budget: &Budget,
) -> Result<SubpowerCatalog> {
    let cat = FreeGenerator::new(alg, vars, index, *budget)?.run();
    debug_assert!(cat.verify_witnesses(alg).unwrap_or(false));
    Ok(cat)
}

/// All of `A^k` in rank order, as index tuples.
pub fn full_index(n: usize, k: usize) -> Vec<Vec<usize>> {
    let total = checked_pow(n, k).expect("index set overflow");
    (0..total)
        .map(|r| {
            let mut t = vec![0; k];
            unrank(r, n, k, &mut t);
            t
        })
        .collect()
}

/// Distinct term operations of depth at most `max_depth`, yielded one level
/// at a time without materializing the full free algebra.
pub struct TermStream<'a> {
    generator: FreeGenerator<'a>,
    max_depth: usize,
    emitted: usize,
}

impl<'a> TermStream<'a> {
    /// Term operations in `vars` variables over all of `A^vars`.
    pub fn new(
        alg: &'a FiniteAlgebra,
        vars: usize,
        max_depth: usize,
        budget: Budget,
    ) -> Result<Self> {
        let points = checked_pow(alg.size(), vars).unwrap_or(usize::MAX);
        budget.check("term stream index set", points)?;
        Ok(TermStream {
            generator: FreeGenerator::new(alg, vars, full_index(alg.size(), vars), budget)?,
            max_depth,
            emitted: 0,
        })
    }

    /// Whether every term operation of bounded depth was produced.
    pub fn is_exhaustive(&self) -> bool {
        self.generator.catalog.status == Exhaustion::Complete
            || self.generator.level >= self.max_depth
    }
}

impl Iterator for TermStream<'_> {
    type Item = Vec<CatalogElement>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.emitted == self.generator.catalog.len() {
            if self.generator.level >= self.max_depth || self.generator.finished {
                return None;
            }
            self.generator.step();
        }
        let level: Vec<CatalogElement> = self.generator.catalog.elements[self.emitted..].to_vec();
        self.emitted = self.generator.catalog.len();
        if level.is_empty() {
            None
        } else {
            Some(level)
        }
    }
}

/// A ternary term with `m(x,y,y) ≈ x ≈ m(y,y,x)`, verified on the base algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaltsevWitness {
    pub term: Term,
    /// Instances checked for `m(x,y,y) ≈ x`.
    pub checked_first: usize,
    /// Instances checked for `m(y,y,x) ≈ x`.
    pub checked_second: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaltsevSearch {
    Found(MaltsevWitness),
    /// The restricted catalog closed without the target: no Mal'tsev term exists.
    Absent,
    /// The budget ran out first.
    Unknown,
}

impl MaltsevSearch {
    pub fn witness(&self) -> Option<&MaltsevWitness> {
        match self {
            MaltsevSearch::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            MaltsevSearch::Found(_) => "found",
            MaltsevSearch::Absent => "absent",
            MaltsevSearch::Unknown => "unknown",
        }
    }
}

/// Checks both Mal'tsev identities on `alg` for the ternary term `m`.
pub fn verify_maltsev(alg: &FiniteAlgebra, m: &Term) -> Result<bool> {
    let first = m.substitute(&|i| Term::Var(if i == 0 { 0 } else { 1 }));
    let second = m.substitute(&|i| Term::Var(if i == 2 { 0 } else { 1 }));
    Ok(alg.identity_holds(&first, &Term::Var(0))? && alg.identity_holds(&second, &Term::Var(0))?)
}

/// Searches for a Mal'tsev term over the index set `{(a,b,b)} ∪ {(b,b,a)}`.
pub fn find_maltsev(alg: &FiniteAlgebra, budget: &Budget) -> Result<MaltsevSearch> {
    let n = alg.size();
    let mut ranks: Vec<usize> = Vec::with_capacity(2 * n * n);
    for a in 0..n {
        for b in 0..n {
            ranks.push(rank(&[a, b, b], n));
            ranks.push(rank(&[b, b, a], n));
        }
    }
    ranks.sort_unstable();
    ranks.dedup();
    let index: Vec<Vec<usize>> = ranks
        .iter()
        .map(|&r| {
            let mut t = vec![0; 3];
            unrank(r, n, 3, &mut t);
            t
        })
        .collect();
    let target: Vec<u8> = index
        .iter()
        .map(|t| if t[1] == t[2] { t[0] as u8 } else { t[2] as u8 })
        .collect();
    let mut generator = FreeGenerator::new(alg, 3, index, *budget)?;
    if generator.run_until(|c| c.find(&target).is_some()) {
        let term = generator
            .catalog()
            .find(&target)
            .expect("target present")
            .term
            .clone();
        if !verify_maltsev(alg, &term)? {
            return Err(Error::Internal(format!(
                "restricted-index Mal'tsev candidate fails on `{}`",
                alg.name()
            )));
        }
        return Ok(MaltsevSearch::Found(MaltsevWitness {
            term,
            checked_first: n * n,
            checked_second: n * n,
        }));
    }
    Ok(match generator.catalog().status {
        Exhaustion::Complete => MaltsevSearch::Absent,
        Exhaustion::Truncated => MaltsevSearch::Unknown,
    })
}

/// The free algebra on two generators over `I = A^2`; must close within budget.
pub fn binary_term_catalog(alg: &FiniteAlgebra, budget: &Budget) -> Result<SubpowerCatalog> {
    let cat = generate_free(alg, 2, full_index(alg.size(), 2), budget)?;
    if !cat.is_complete() {
        return Err(Error::Truncated(alg.name().to_string()));
    }
    Ok(cat)
}

/// Commutator words of `F(x1..x_nvars, z)`: elements equal to `z` whenever any `x_i` is `z`.
#[derive(Clone, Debug)]
pub struct AbsorbingCatalog {
    pub nvars: usize,
    pub elements: Vec<CatalogElement>,
    /// Vector of `z` itself.
    pub zero: Vec<u8>,
    pub index: Vec<Vec<usize>>,
    pub status: Exhaustion,
}

impl AbsorbingCatalog {
    /// Elements other than `z`.
    pub fn nontrivial(&self) -> impl Iterator<Item = &CatalogElement> {
        self.elements.iter().filter(move |e| e.vector != self.zero)
    }
}

/// Whether `vector` (over `index`, variables `x1..x_nvars, z`) absorbs at every `x_i`.
pub fn is_absorbing(vector: &[u8], index: &[Vec<usize>], nvars: usize) -> bool {
    index.iter().zip(vector).all(|(t, &v)| {
        let z = t[nvars];
        (0..nvars).all(|i| t[i] != z) || v as usize == z
    })
}

pub fn absorbing_catalog(
    alg: &FiniteAlgebra,
    nvars: usize,
    budget: &Budget,
) -> Result<AbsorbingCatalog> {
    if nvars == 0 {
        return Err(Error::InvalidArgument(
            "commutator words need at least one variable".into(),
        ));
    }
    let points = checked_pow(alg.size(), nvars + 1).unwrap_or(usize::MAX);
    budget.check("absorbing index set", points)?;
    let index = full_index(alg.size(), nvars + 1);
    let cat = generate_free(alg, nvars + 1, index, budget)?;
    let zero: Vec<u8> = cat.index.iter().map(|t| t[nvars] as u8).collect();
    let elements = cat
        .elements
        .iter()
        .filter(|e| is_absorbing(&e.vector, &cat.index, nvars))
        .cloned()
        .collect();
    Ok(AbsorbingCatalog {
        nvars,
        elements,
        zero,
        index: cat.index,
        status: cat.status,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArityResult {
    pub nvars: usize,
    pub status: Exhaustion,
    /// Number of commutator words other than `z` found.
    pub nontrivial: usize,
}

/// Empirical bound on the arity of nontrivial commutator words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MBound {
    pub m_emp: usize,
    pub ceiling: usize,
    /// `Complete` when every arity up to the ceiling closed.
    pub status: Exhaustion,
    pub arities: Vec<ArityResult>,
}

impl MBound {
    pub fn status_label(&self) -> &'static str {
        match self.status {
            Exhaustion::Complete => "complete",
            Exhaustion::Truncated => "partial",
        }
    }
}

pub fn empirical_m(alg: &FiniteAlgebra, max_arity: usize, budget: &Budget) -> Result<MBound> {
    if max_arity == 0 {
        return Err(Error::InvalidArgument(
            "max arity must be at least 1".into(),
        ));
    }
    let mut arities = Vec::new();
    let mut m_emp = 0;
    let mut status = Exhaustion::Complete;
    for nvars in 1..=max_arity {
        let cat = match absorbing_catalog(alg, nvars, budget) {
            Ok(c) => c,
            Err(e) if e.is_budget() => {
                status = Exhaustion::Truncated;
                break;
            }
            Err(e) => return Err(e),
        };
        let nontrivial = cat.nontrivial().count();
        if nontrivial > 0 {
            m_emp = nvars;
        }
        arities.push(ArityResult {
            nvars,
            status: cat.status,
            nontrivial,
        });
        if cat.status == Exhaustion::Truncated {
            status = Exhaustion::Truncated;
            break;
        }
    }
    Ok(MBound {
        m_emp,
        ceiling: max_arity,
        status,
        arities,
    })
}

/// The bounds `k`, `M` and `N` that parameterize the congruence formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VarietyBounds {
    /// Nilpotence class of the generating algebra.
    pub k: usize,
    pub m: MBound,
    /// Complexity bound for Ψ witnesses; `k·M + 2` unless overridden.
    pub n: usize,
    pub budget: Budget,
}

impl VarietyBounds {
    pub fn compute(
        alg: &FiniteAlgebra,
        max_arity: usize,
        n_override: Option<usize>,
        budget: &Budget,
    ) -> Result<Self> {
        let k = nilpotence_class(alg)?.class().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "`{}` is not nilpotent, so k is undefined",
                alg.name()
            ))
        })?;
        let m = empirical_m(alg, max_arity, budget)?;
        let n = match n_override {
            Some(n) if n < 2 => {
                return Err(Error::InvalidArgument(format!(
                    "N must be at least 2, got {n}"
                )))
            }
            Some(n) => n,
            None => k * m.m_emp + 2,
        };
        Ok(VarietyBounds {
            k,
            m,
            n,
            budget: *budget,
        })
    }
}

/// Pointwise evaluation of a term over every tuple of `A^vars`, as bytes.
pub fn function_vector(alg: &FiniteAlgebra, t: &Term, vars: usize) -> Result<Vec<u8>> {
    let points = checked_pow(alg.size(), vars).unwrap_or(usize::MAX);
    Ok(alg
        .eval_columns(t, &tuple_columns(alg.size(), vars), points)?
        .into_iter()
        .map(|v| v as u8)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn show(alg: &FiniteAlgebra, t: &Term) -> String {
        t.to_prefix(alg.signature(), &VarStyle::Indexed)
    }

    #[test]
    fn z2_binary_catalog() {
        let z2 = corpus::z2();
        let cat = binary_term_catalog(&z2, &Budget::default()).unwrap();
        let terms: Vec<String> = cat.terms().map(|t| show(&z2, t)).collect();
        assert_eq!(terms, vec!["x1", "x2", "e", "mul(x1,x2)"]);
        assert!(cat.verify_witnesses(&z2).unwrap());
    }

    #[test]
    fn catalog_sizes() {
        let b = Budget::default();
        assert_eq!(binary_term_catalog(&corpus::z4(), &b).unwrap().len(), 16);
        assert_eq!(
            binary_term_catalog(&corpus::trivial(), &b).unwrap().len(),
            1
        );
        let set2 = corpus::set2();
        let one = generate_free(&set2, 1, full_index(2, 1), &b).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one.is_complete());
    }

    #[test]
    fn truncation_is_flagged() {
        let cat = generate_free(&corpus::z4(), 2, full_index(4, 2), &Budget::new(6)).unwrap();
        assert_eq!(cat.status, Exhaustion::Truncated);
        assert!(cat.len() <= 6);
        assert!(matches!(
            binary_term_catalog(&corpus::z4(), &Budget::new(6)),
            Err(Error::Truncated(_))
        ));
    }

    #[test]
    fn maltsev_in_groups() {
        let b = Budget::default();
        for g in corpus::groups() {
            let found = find_maltsev(&g, &b).unwrap();
            let w = found
                .witness()
                .unwrap_or_else(|| panic!("{} has a Mal'tsev term", g.name()));
            assert!(verify_maltsev(&g, &w.term).unwrap());
        }
        let z2 = corpus::z2();
        let w = find_maltsev(&z2, &b).unwrap().witness().cloned().unwrap();
        for a in 0..2 {
            for bb in 0..2 {
                for c in 0..2 {
                    assert_eq!(z2.eval(&w.term, &[a, bb, c]).unwrap(), (a + bb + c) % 2);
                }
            }
        }
        assert_eq!(
            find_maltsev(&corpus::set2(), &b).unwrap(),
            MaltsevSearch::Absent
        );
        assert_eq!(
            find_maltsev(&corpus::semilattice3(), &b).unwrap(),
            MaltsevSearch::Absent
        );
    }

    #[test]
    fn absorbing_examples() {
        let z4 = corpus::z4();
        let b = Budget::default();
        let one = absorbing_catalog(&z4, 1, &b).unwrap();
        let shown: Vec<String> = one
            .elements
            .iter()
            .map(|e| e.term.to_prefix(z4.signature(), &VarStyle::WithZero(1)))
            .collect();
        assert!(shown.contains(&"x1".to_string()));
        assert!(shown.contains(&"z".to_string()));
        assert_eq!(one.elements.len(), 4);
        let two = absorbing_catalog(&z4, 2, &b).unwrap();
        assert_eq!(two.elements.len(), 1);
        assert_eq!(two.elements[0].vector, two.zero);
    }

    #[test]
    fn m_bounds() {
        let b = Budget::default();
        let z2 = empirical_m(&corpus::z2(), 3, &b).unwrap();
        assert_eq!((z2.m_emp, z2.status), (1, Exhaustion::Complete));
        let z4 = empirical_m(&corpus::z4(), 3, &b).unwrap();
        assert_eq!((z4.m_emp, z4.status), (1, Exhaustion::Complete));
        let bounds = VarietyBounds::compute(&corpus::z4(), 3, None, &b).unwrap();
        assert_eq!((bounds.k, bounds.n), (1, 3));
        assert!(VarietyBounds::compute(&corpus::z4(), 3, Some(1), &b).is_err());
        assert!(VarietyBounds::compute(&corpus::s3(), 1, None, &b).is_err());
    }

    #[test]
    fn d4_commutator_word_has_two_variables() {
        let m = empirical_m(&corpus::d4(), 2, &Budget::default()).unwrap();
        assert_eq!(m.m_emp, 2);
        assert_eq!(m.status, Exhaustion::Complete);
    }

    #[test]
    fn stream_levels_are_depth_bounded() {
        let z2 = corpus::z2();
        let stream = TermStream::new(&z2, 2, 1, Budget::default()).unwrap();
        let levels: Vec<Vec<CatalogElement>> = stream.collect();
        assert_eq!(levels.len(), 2);
        assert!(levels[1].iter().all(|e| e.term.depth() <= 1));
    }
}
