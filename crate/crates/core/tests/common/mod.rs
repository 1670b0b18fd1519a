//! Brute-force oracles. Only table lookups and direct enumeration; nothing
//! here calls the closure or search routines under test.

#![allow(dead_code)]

use std::collections::BTreeSet;

use cw_core::algebra::{rank, unrank};
use cw_core::{FiniteAlgebra, Partition, Term};

/// Every partition of `0..n` as a label vector (restricted growth strings).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, blocks: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        for l in 0..=blocks {
            labels[i] = l;
            go(i + 1, blocks.max(l + 1), labels, out);
        }
    }
    let mut out = Vec::new();
    go(0, 0, &mut vec![0; n], &mut out);
    out
}

/// Compatibility by comparing every pair of related argument tuples.
pub fn compatible(alg: &FiniteAlgebra, labels: &[usize]) -> bool {
    let n = alg.size();
    for op in 0..alg.num_ops() {
        let arity = alg.arity(op);
        let total = n.pow(arity as u32);
        let table = alg.table(op);
        let mut s = vec![0; arity];
        let mut t = vec![0; arity];
        for i in 0..total {
            unrank(i, n, arity, &mut s);
            for j in 0..total {
                unrank(j, n, arity, &mut t);
                if s.iter().zip(&t).all(|(&x, &y)| labels[x] == labels[y])
                    && labels[table[i]] != labels[table[j]]
                {
                    return false;
                }
            }
        }
    }
    true
}

/// All congruences, as label vectors.
pub fn all_congruences(alg: &FiniteAlgebra) -> Vec<Vec<usize>> {
    all_partitions(alg.size())
        .into_iter()
        .filter(|l| compatible(alg, l))
        .collect()
}

/// Least congruence containing `(a, b)`: intersection of all that do.
pub fn brute_cg(cons: &[Vec<usize>], n: usize, a: usize, b: usize) -> Vec<Vec<bool>> {
    let mut rel = vec![vec![true; n]; n];
    for l in cons.iter().filter(|l| l[a] == l[b]) {
        for x in 0..n {
            for y in 0..n {
                rel[x][y] &= l[x] == l[y];
            }
        }
    }
    rel
}

pub fn partition_matrix(p: &Partition) -> Vec<Vec<bool>> {
    let n = p.size();
    (0..n)
        .map(|x| (0..n).map(|y| p.related(x, y)).collect())
        .collect()
}

/// Subdirectly irreducible: the nonzero congruences have a nonzero intersection.
pub fn brute_si(alg: &FiniteAlgebra) -> bool {
    let n = alg.size();
    if n < 2 {
        return false;
    }
    let cons = all_congruences(alg);
    let mut meet = vec![vec![true; n]; n];
    for l in &cons {
        // skip the identity relation
        if (0..n).all(|x| (0..n).all(|y| (l[x] == l[y]) == (x == y))) {
            continue;
        }
        for x in 0..n {
            for y in 0..n {
                meet[x][y] &= l[x] == l[y];
            }
        }
    }
    (0..n).any(|x| (0..n).any(|y| x != y && meet[x][y]))
}

pub struct Group {
    pub n: usize,
    pub mul: Vec<usize>,
    pub inv: Vec<usize>,
}

impl Group {
    pub fn of(alg: &FiniteAlgebra) -> Group {
        let mul = alg.signature().find("mul").expect("mul");
        let inv = alg.signature().find("inv").expect("inv");
        Group {
            n: alg.size(),
            mul: alg.table(mul).to_vec(),
            inv: alg.table(inv).to_vec(),
        }
    }

    pub fn m(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.n + y]
    }

    /// `[g, x] = g⁻¹x⁻¹gx`.
    pub fn comm(&self, g: usize, x: usize) -> usize {
        self.m(self.m(self.inv[g], self.inv[x]), self.m(g, x))
    }

    /// Upper central series as subgroups: `Z_{i+1} = {g : [g, x] ∈ Z_i ∀x}`.
    pub fn upper_central_series(&self) -> Vec<BTreeSet<usize>> {
        let e = self.m(0, self.inv[0]);
        let mut series = vec![BTreeSet::from([e])];
        loop {
            let last = series.last().unwrap().clone();
            let next: BTreeSet<usize> = (0..self.n)
                .filter(|&g| (0..self.n).all(|x| last.contains(&self.comm(g, x))))
                .collect();
            if next == last {
                return series;
            }
            series.push(next);
        }
    }

    /// Coset relation `x⁻¹y ∈ H`.
    pub fn cosets(&self, h: &BTreeSet<usize>) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|x| {
                (0..self.n)
                    .map(|y| h.contains(&self.m(self.inv[x], y)))
                    .collect()
            })
            .collect()
    }
}

/// Distinct `k`-ary term operations by naive fixpoint over full value tables.
pub fn brute_free_size(alg: &FiniteAlgebra, k: usize) -> usize {
    let n = alg.size();
    let points = n.pow(k as u32);
    let mut tup = vec![0; k];
    let mut set: BTreeSet<Vec<usize>> = (0..k)
        .map(|v| {
            (0..points)
                .map(|p| {
                    unrank(p, n, k, &mut tup);
                    tup[v]
                })
                .collect()
        })
        .collect();
    loop {
        let elems: Vec<Vec<usize>> = set.iter().cloned().collect();
        let before = set.len();
        for op in 0..alg.num_ops() {
            let arity = alg.arity(op);
            let combos = elems.len().pow(arity as u32);
            let mut idx = vec![0; arity];
            for c in 0..combos {
                unrank(c, elems.len(), arity, &mut idx);
                let v: Vec<usize> = (0..points)
                    .map(|p| {
                        let args: Vec<usize> = idx.iter().map(|&i| elems[i][p]).collect();
                        alg.table(op)[rank(&args, n)]
                    })
                    .collect();
                set.insert(v);
            }
        }
        if set.len() == before {
            return set.len();
        }
    }
}

/// Evaluates `t` by direct recursion over the tables.
pub fn eval(alg: &FiniteAlgebra, t: &Term, asg: &[usize]) -> usize {
    match t {
        Term::Var(i) => asg[*i],
        Term::App(op, args) => {
            let vals: Vec<usize> = args.iter().map(|a| eval(alg, a, asg)).collect();
            alg.table(*op)[rank(&vals, alg.size())]
        }
    }
}

/// Whether `s ≈ t` over all assignments of `k` variables.
pub fn holds(alg: &FiniteAlgebra, s: &Term, t: &Term, k: usize) -> bool {
    let n = alg.size();
    let mut asg = vec![0; k];
    (0..n.pow(k as u32)).all(|p| {
        unrank(p, n, k, &mut asg);
        eval(alg, s, &asg) == eval(alg, t, &asg)
    })
}

/// Semantic absorbing check: `w = z` whenever `x_i = z`, over all assignments.
pub fn absorbing(alg: &FiniteAlgebra, w: &Term, nvars: usize) -> bool {
    let n = alg.size();
    let mut asg = vec![0; nvars + 1];
    (0..n.pow(nvars as u32 + 1)).all(|p| {
        unrank(p, n, nvars + 1, &mut asg);
        let z = asg[nvars];
        !(0..nvars).any(|i| asg[i] == z) || eval(alg, w, &asg) == z
    })
}

/// Subuniverse of `A²` generated by `(a, b)` and the diagonal.
pub fn brute_image(alg: &FiniteAlgebra, a: usize, b: usize) -> BTreeSet<(usize, usize)> {
    let n = alg.size();
    let mut set: BTreeSet<(usize, usize)> = (0..n).map(|x| (x, x)).collect();
    set.insert((a, b));
    loop {
        let elems: Vec<(usize, usize)> = set.iter().copied().collect();
        let before = set.len();
        for op in 0..alg.num_ops() {
            let arity = alg.arity(op);
            let mut idx = vec![0; arity];
            for c in 0..elems.len().pow(arity as u32) {
                unrank(c, elems.len(), arity, &mut idx);
                let xs: Vec<usize> = idx.iter().map(|&i| elems[i].0).collect();
                let ys: Vec<usize> = idx.iter().map(|&i| elems[i].1).collect();
                set.insert((alg.apply(op, &xs), alg.apply(op, &ys)));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}
