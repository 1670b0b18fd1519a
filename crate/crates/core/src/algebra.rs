//! Finite algebras given by operation tables, term evaluation, and the
//! basic constructions: powers, products, subalgebras and quotients.
//!
//! Elements are `0..n`. An argument tuple `(a0, .., a_{r-1})` sits at table
//! index `Σ a_i · n^(r-1-i)`; tuples of a power `A^k` use the same rank, so a
//! power's elements, its tables, and subpower index sets all agree.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::term::{OpSymbol, Signature, Term};

/// Hard ceiling on the length of any single operation table.
pub const MAX_TABLE_LEN: usize = 1 << 26;

/// Size caps shared by every construction that could blow up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest intermediate universe (or catalog) size allowed.
    pub max_elements: usize,
}

impl Budget {
    pub const DEFAULT_ELEMENTS: usize = 200_000;

    pub fn new(max_elements: usize) -> Self {
        Budget { max_elements }
    }

    pub fn check(&self, what: &'static str, needed: usize) -> Result<()> {
        if needed > self.max_elements {
            return Err(Error::BudgetExceeded {
                what,
                needed,
                cap: self.max_elements,
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_ELEMENTS)
    }
}

/// A finite algebra on `{0, .., size-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    signature: Signature,
    tables: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    name: String,
    size: usize,
    operations: Vec<OperationFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperationFile {
    name: String,
    arity: usize,
    table: Vec<usize>,
}

/// `n^k`, or `None` on overflow.
pub fn checked_pow(n: usize, k: usize) -> Option<usize> {
    (0..k).try_fold(1usize, |acc, _| acc.checked_mul(n))
}

/// Decodes rank `r` into `k` digits base `n`, most significant first.
pub fn unrank(mut r: usize, n: usize, k: usize, out: &mut [usize]) {
    for i in (0..k).rev() {
        out[i] = r % n;
        r /= n;
    }
}

pub fn rank(digits: &[usize], n: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * n + d)
}

/// Columns of all `n^k` tuples in rank order: `cols[i][r]` is entry `i` of tuple `r`.
pub fn tuple_columns(n: usize, k: usize) -> Vec<Vec<usize>> {
    let total = checked_pow(n, k).expect("tuple count overflow");
    let mut cols = vec![Vec::with_capacity(total); k];
    let mut digits = vec![0; k];
    for r in 0..total {
        unrank(r, n, k, &mut digits);
        for (col, &d) in cols.iter_mut().zip(&digits) {
            col.push(d);
        }
    }
    cols
}

impl FiniteAlgebra {
    /// Builds an algebra, checking every table invariant.
    pub fn new(
        name: impl Into<String>,
        size: usize,
        ops: Vec<(String, usize, Vec<usize>)>,
    ) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::Malformed("size: universe must be nonempty".into()));
        }
        let mut signature = Vec::with_capacity(ops.len());
        let mut tables = Vec::with_capacity(ops.len());
        for (i, (op_name, arity, table)) in ops.into_iter().enumerate() {
            if signature.iter().any(|s: &OpSymbol| s.name == op_name) {
                return Err(Error::Malformed(format!(
                    "operations[{i}].name: duplicate operation name `{op_name}`"
                )));
            }
            let expected = checked_pow(size, arity)
                .filter(|&l| l <= MAX_TABLE_LEN)
                .ok_or_else(|| {
                    Error::Malformed(format!(
                        "operations[{i}]: table for arity {arity} is too large"
                    ))
                })?;
            if table.len() != expected {
                return Err(Error::Malformed(format!(
                    "operations[{i}].table: `{op_name}` has arity {arity} so needs {expected} entries, found {}",
                    table.len()
                )));
            }
            if let Some(j) = table.iter().position(|&v| v >= size) {
                return Err(Error::Malformed(format!(
                    "operations[{i}].table[{j}]: value {} is not below size {size}",
                    table[j]
                )));
            }
            signature.push(OpSymbol {
                name: op_name,
                arity,
            });
            tables.push(table);
        }
        Ok(FiniteAlgebra {
            name,
            size,
            signature: Signature(signature),
            tables,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| {
            Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        FiniteAlgebra::new(
            file.name,
            file.size,
            file.operations
                .into_iter()
                .map(|o| (o.name, o.arity, o.table))
                .collect(),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        FiniteAlgebra::from_json(&text).map_err(|e| match e {
            Error::Malformed(m) => Error::Malformed(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let file = AlgebraFile {
            name: self.name.clone(),
            size: self.size,
            operations: self
                .signature
                .iter()
                .zip(&self.tables)
                .map(|(s, t)| OperationFile {
                    name: s.name.clone(),
                    arity: s.arity,
                    table: t.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("algebra serialization cannot fail")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn num_ops(&self) -> usize {
        self.tables.len()
    }

    pub fn arity(&self, op: usize) -> usize {
        self.signature.0[op].arity
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch(format!(
                "`{}` and `{}` have different operation symbols",
                self.name, other.name
            )));
        }
        Ok(())
    }

    /// Applies operation `op` to `args`. Arguments must be in range.
    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let n = self.size;
        self.tables[op][args.iter().fold(0, |acc, &a| acc * n + a)]
    }

    /// Evaluates `t` with variable `i` bound to `asg[i]`.
    pub fn eval(&self, t: &Term, asg: &[usize]) -> Result<usize> {
        match t {
            Term::Var(i) => {
                let v = *asg.get(*i).ok_or(Error::UnassignedVariable(*i))?;
                if v >= self.size {
                    return Err(Error::OutOfRange {
                        element: v,
                        size: self.size,
                    });
                }
                Ok(v)
            }
            Term::App(op, args) => {
                let arity = self
                    .signature
                    .arity(*op)
                    .ok_or(Error::UnknownOperation(*op))?;
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: self.signature.name(*op).to_string(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                let mut idx = 0;
                for a in args {
                    idx = idx * self.size + self.eval(a, asg)?;
                }
                Ok(self.tables[*op][idx])
            }
        }
    }

    /// Evaluates `t` at many points at once: variable `i` takes the values
    /// `columns[i]`, and the result has one entry per point.
    pub fn eval_columns<C: AsRef<[usize]>>(
        &self,
        t: &Term,
        columns: &[C],
        points: usize,
    ) -> Result<Vec<usize>> {
        self.signature.check(t)?;
        if let Some(c) = columns.iter().find(|c| c.as_ref().len() != points) {
            return Err(Error::InvalidArgument(format!(
                "column of length {} for {points} points",
                c.as_ref().len()
            )));
        }
        if let Some(&v) = columns
            .iter()
            .flat_map(|c| c.as_ref())
            .find(|&&v| v >= self.size)
        {
            return Err(Error::OutOfRange {
                element: v,
                size: self.size,
            });
        }
        self.eval_columns_unchecked(t, columns, points)
    }

    fn eval_columns_unchecked<C: AsRef<[usize]>>(
        &self,
        t: &Term,
        columns: &[C],
        points: usize,
    ) -> Result<Vec<usize>> {
        match t {
            Term::Var(i) => columns
                .get(*i)
                .map(|c| c.as_ref().to_vec())
                .ok_or(Error::UnassignedVariable(*i)),
            Term::App(op, args) => {
                let n = self.size;
                let table = &self.tables[*op];
                let mut idx = vec![0usize; points];
                for a in args {
                    let vals = self.eval_columns_unchecked(a, columns, points)?;
                    for (x, v) in idx.iter_mut().zip(vals) {
                        *x = *x * n + v;
                    }
                }
                Ok(idx.into_iter().map(|x| table[x]).collect())
            }
        }
    }

    /// The term operation of `t` in `nvars` variables, as a table over `A^nvars`.
    pub fn term_table(&self, t: &Term, nvars: usize) -> Result<Vec<usize>> {
        if t.var_bound() > nvars {
            return Err(Error::UnassignedVariable(t.var_bound() - 1));
        }
        let points = checked_pow(self.size, nvars)
            .filter(|&p| p <= MAX_TABLE_LEN)
            .ok_or(Error::BudgetExceeded {
                what: "assignment space",
                needed: usize::MAX,
                cap: MAX_TABLE_LEN,
            })?;
        self.eval_columns(t, &tuple_columns(self.size, nvars), points)
    }

    /// Whether `t1 ≈ t2` holds in the algebra: equal under every assignment.
    pub fn identity_holds(&self, t1: &Term, t2: &Term) -> Result<bool> {
        let nvars = t1.var_bound().max(t2.var_bound());
        Ok(self.term_table(t1, nvars)? == self.term_table(t2, nvars)?)
    }

    /// `A^k` with componentwise operations.
    pub fn power(&self, k: usize, budget: &Budget) -> Result<FiniteAlgebra> {
        let size = checked_pow(self.size, k).ok_or(Error::BudgetExceeded {
            what: "power universe",
            needed: usize::MAX,
            cap: budget.max_elements,
        })?;
        budget.check("power universe", size)?;
        let factors = vec![self; k];
        let mut out = FiniteAlgebra::product(&factors)?;
        out.name = format!("{}^{k}", self.name);
        Ok(out)
    }

    /// Direct product; the first factor is the most significant digit of the rank.
    pub fn product(factors: &[&FiniteAlgebra]) -> Result<FiniteAlgebra> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        for f in factors {
            first.same_signature(f)?;
        }
        let sizes: Vec<usize> = factors.iter().map(|f| f.size).collect();
        let size = sizes
            .iter()
            .try_fold(1usize, |a, &s| a.checked_mul(s))
            .ok_or(Error::BudgetExceeded {
                what: "product universe",
                needed: usize::MAX,
                cap: MAX_TABLE_LEN,
            })?;
        let decode = |mut r: usize, out: &mut [usize]| {
            for i in (0..sizes.len()).rev() {
                out[i] = r % sizes[i];
                r /= sizes[i];
            }
        };
        let mut ops = Vec::new();
        for (op, sym) in first.signature.iter().enumerate() {
            let len = checked_pow(size, sym.arity)
                .filter(|&l| l <= MAX_TABLE_LEN)
                .ok_or(Error::BudgetExceeded {
                    what: "operation table",
                    needed: usize::MAX,
                    cap: MAX_TABLE_LEN,
                })?;
            let mut table = Vec::with_capacity(len);
            let mut args = vec![0; sym.arity];
            let mut comps = vec![vec![0; factors.len()]; sym.arity];
            let mut fargs = vec![0; sym.arity];
            let mut res = vec![0; factors.len()];
            for r in 0..len {
                unrank(r, size, sym.arity, &mut args);
                for (a, c) in args.iter().zip(comps.iter_mut()) {
                    decode(*a, c);
                }
                for (j, f) in factors.iter().enumerate() {
                    for (fa, c) in fargs.iter_mut().zip(&comps) {
                        *fa = c[j];
                    }
                    res[j] = f.apply(op, &fargs);
                }
                table.push(res.iter().zip(&sizes).fold(0, |acc, (&d, &s)| acc * s + d));
            }
            ops.push((sym.name.clone(), sym.arity, table));
        }
        let name = factors
            .iter()
            .map(|f| f.name.as_str())
            .collect::<Vec<_>>()
            .join("x");
        FiniteAlgebra::new(name, size, ops)
    }

    /// Least subuniverse containing `seed` (and every constant).
    pub fn subuniverse_closure(&self, seed: &[usize]) -> Result<Vec<usize>> {
        let mut seen = BitSet::new(self.size);
        let mut elems = Vec::new();
        for &s in seed {
            if s >= self.size {
                return Err(Error::OutOfRange {
                    element: s,
                    size: self.size,
                });
            }
            if seen.insert(s) {
                elems.push(s);
            }
        }
        for op in self.signature.nullary() {
            let c = self.tables[op][0];
            if seen.insert(c) {
                elems.push(c);
            }
        }
        let mut frontier = 0;
        let mut args = Vec::new();
        let mut vals = Vec::new();
        while frontier < elems.len() {
            let end = elems.len();
            for op in 0..self.num_ops() {
                let arity = self.arity(op);
                if arity == 0 {
                    continue;
                }
                for_each_new_tuple(arity, frontier, end, &mut args, |idx| {
                    vals.clear();
                    vals.extend(idx.iter().map(|&i| elems[i]));
                    let v = self.apply(op, &vals);
                    if seen.insert(v) {
                        elems.push(v);
                    }
                    true
                });
            }
            frontier = end;
        }
        elems.sort_unstable();
        Ok(elems)
    }

    /// The subalgebra on `elems` (sorted, closed), renumbered in order.
    /// Returns the algebra and the embedding `new index -> old element`.
    pub fn subalgebra(&self, elems: &[usize]) -> Result<(FiniteAlgebra, Vec<usize>)> {
        let mut index = vec![usize::MAX; self.size];
        for (i, &e) in elems.iter().enumerate() {
            if e >= self.size {
                return Err(Error::OutOfRange {
                    element: e,
                    size: self.size,
                });
            }
            index[e] = i;
        }
        let m = elems.len();
        let mut ops = Vec::new();
        for (op, sym) in self.signature.iter().enumerate() {
            let len = checked_pow(m, sym.arity).unwrap_or(usize::MAX);
            if len > MAX_TABLE_LEN {
                return Err(Error::BudgetExceeded {
                    what: "operation table",
                    needed: len,
                    cap: MAX_TABLE_LEN,
                });
            }
            let mut args = vec![0; sym.arity];
            let mut table = Vec::with_capacity(len);
            for r in 0..len {
                unrank(r, m, sym.arity, &mut args);
                for a in args.iter_mut() {
                    *a = elems[*a];
                }
                let v = index[self.apply(op, &args)];
                if v == usize::MAX {
                    return Err(Error::InvalidArgument(
                        "subset is not closed under the operations".into(),
                    ));
                }
                table.push(v);
            }
            ops.push((sym.name.clone(), sym.arity, table));
        }
        let alg = FiniteAlgebra::new(format!("{}|sub{m}", self.name), m, ops)?;
        Ok((alg, elems.to_vec()))
    }

    /// `A/θ`; blocks are numbered by least element. Returns the quotient and
    /// the block map `A -> A/θ`.
    pub fn quotient(&self, theta: &Partition) -> Result<(FiniteAlgebra, Vec<usize>)> {
        if theta.size() != self.size {
            return Err(Error::SizeMismatch(theta.size(), self.size));
        }
        if !crate::congruence::is_congruence(self, theta)? {
            return Err(Error::NotCongruence(self.name.clone()));
        }
        let block_map = theta.block_indices();
        let reps: Vec<usize> = theta.blocks().iter().map(|b| b[0]).collect();
        let m = reps.len();
        let mut ops = Vec::new();
        for (op, sym) in self.signature.iter().enumerate() {
            let len = checked_pow(m, sym.arity).unwrap_or(usize::MAX);
            let mut args = vec![0; sym.arity];
            let mut table = Vec::with_capacity(len);
            for r in 0..len {
                unrank(r, m, sym.arity, &mut args);
                for a in args.iter_mut() {
                    *a = reps[*a];
                }
                table.push(block_map[self.apply(op, &args)]);
            }
            ops.push((sym.name.clone(), sym.arity, table));
        }
        let alg = FiniteAlgebra::new(format!("{}/θ{m}", self.name), m, ops)?;
        Ok((alg, block_map))
    }

    /// Whether `map: self -> other` preserves every operation.
    pub fn is_homomorphism(&self, other: &FiniteAlgebra, map: &[usize]) -> Result<bool> {
        self.same_signature(other)?;
        if map.len() != self.size {
            return Err(Error::SizeMismatch(map.len(), self.size));
        }
        let mut args = Vec::new();
        let mut img = Vec::new();
        for (op, table) in self.tables.iter().enumerate() {
            let arity = self.arity(op);
            args.resize(arity, 0);
            img.resize(arity, 0);
            for (r, &v) in table.iter().enumerate() {
                unrank(r, self.size, arity, &mut args);
                for (i, a) in img.iter_mut().zip(&args) {
                    *i = map[*a];
                }
                if other.apply(op, &img) != map[v] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Calls `f` on every index tuple of length `arity` over `0..end` that has at
/// least one entry in `frontier..end`, each exactly once.
pub(crate) fn for_each_new_tuple(
    arity: usize,
    frontier: usize,
    end: usize,
    buf: &mut Vec<usize>,
    mut f: impl FnMut(&[usize]) -> bool,
) -> bool {
    buf.resize(arity, 0);
    // position p holds the first new entry; entries before it are old
    for p in 0..arity {
        let lo: Vec<usize> = (0..arity)
            .map(|i| if i == p { frontier } else { 0 })
            .collect();
        let hi: Vec<usize> = (0..arity)
            .map(|i| if i < p { frontier } else { end })
            .collect();
        if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
            continue;
        }
        buf.copy_from_slice(&lo);
        'odometer: loop {
            if !f(buf) {
                return false;
            }
            let mut i = arity;
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                buf[i] += 1;
                if buf[i] < hi[i] {
                    break;
                }
                buf[i] = lo[i];
            }
        }
    }
    true
}
