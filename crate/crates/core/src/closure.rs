//! Subuniverse closure inside a power `A^k`, with tuples kept as ranks in a
//! bitset. Used by the term-condition tests, where `k = 4`.

use crate::algebra::{checked_pow, for_each_new_tuple, Budget, FiniteAlgebra};
use crate::bitset::BitSet;
use crate::error::{Error, Result};

pub(crate) struct PowerClosure<'a> {
    alg: &'a FiniteAlgebra,
    k: usize,
    /// Flat storage: tuple `i` is `elems[i*k..(i+1)*k]`.
    elems: Vec<usize>,
    seen: BitSet,
}

impl<'a> PowerClosure<'a> {
    pub fn new(alg: &'a FiniteAlgebra, k: usize, budget: &Budget) -> Result<Self> {
        let total = checked_pow(alg.size(), k).ok_or(Error::BudgetExceeded {
            what: "power universe",
            needed: usize::MAX,
            cap: budget.max_elements,
        })?;
        budget.check("power universe", total)?;
        Ok(PowerClosure {
            alg,
            k,
            elems: Vec::new(),
            seen: BitSet::new(total),
        })
    }

    pub fn len(&self) -> usize {
        self.elems.len() / self.k
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.elems[i * self.k..(i + 1) * self.k]
    }

    fn rank(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.alg.size() + x)
    }

    /// Adds a tuple; returns true if it is new.
    pub fn insert(&mut self, t: &[usize]) -> bool {
        debug_assert_eq!(t.len(), self.k);
        if self.seen.insert(self.rank(t)) {
            self.elems.extend_from_slice(t);
            true
        } else {
            false
        }
    }

    /// Closes under all operations, treating tuples from index `frontier`
    /// on as new. Each newly found tuple is passed to `check`; the closure
    /// stops early (returning false) the first time `check` fails.
    pub fn close_from(
        &mut self,
        mut frontier: usize,
        mut check: impl FnMut(&[usize]) -> bool,
    ) -> bool {
        let alg = self.alg;
        let k = self.k;
        let n = alg.size();
        for op in alg.signature().nullary() {
            let c = alg.table(op)[0];
            let t = vec![c; k];
            if self.insert(&t) && !check(&t) {
                return false;
            }
        }
        let mut buf = Vec::new();
        let mut res = vec![0; k];
        while frontier < self.len() {
            let end = self.len();
            for op in 0..alg.num_ops() {
                let arity = alg.arity(op);
                if arity == 0 {
                    continue;
                }
                let table = alg.table(op);
                let ok = for_each_new_tuple(arity, frontier, end, &mut buf, |idx| {
                    for (c, r) in res.iter_mut().enumerate() {
                        let mut at = 0;
                        for &i in idx {
                            at = at * n + self.elems[i * k + c];
                        }
                        *r = table[at];
                    }
                    !self.insert(&res) || check(&res)
                });
                if !ok {
                    return false;
                }
            }
            frontier = end;
        }
        true
    }
}
