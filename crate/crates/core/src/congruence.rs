//! Congruence generation, congruence lattices, monoliths, and unary
//! polynomial witnesses for principal-congruence membership.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::Serialize;

use crate::algebra::{checked_pow, for_each_new_tuple, Budget, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::par;
use crate::partition::{Partition, UnionFind};
use crate::term::{Signature, Term, VarStyle};

/// Calls `f(image_of_x, image_of_y)` for every basic translation
/// `t(u) = f(e.., u, e'..)` applied to `x` and `y`.
fn for_each_translation(alg: &FiniteAlgebra, x: usize, y: usize, mut f: impl FnMut(usize, usize)) {
    let n = alg.size();
    for op in 0..alg.num_ops() {
        let arity = alg.arity(op);
        if arity == 0 {
            continue;
        }
        let table = alg.table(op);
        let params = checked_pow(n, arity - 1).unwrap_or(0);
        for pos in 0..arity {
            let low = checked_pow(n, arity - 1 - pos).unwrap_or(0);
            for p in 0..params {
                let (hi, lo) = (p / low, p % low);
                let base = hi * n;
                f(table[(base + x) * low + lo], table[(base + y) * low + lo]);
            }
        }
    }
}

/// Whether `pi` is compatible with every operation of `alg`.
pub fn is_congruence(alg: &FiniteAlgebra, pi: &Partition) -> Result<bool> {
    if pi.size() != alg.size() {
        return Err(Error::SizeMismatch(pi.size(), alg.size()));
    }
    for x in 0..alg.size() {
        let r = pi.rep(x);
        if r == x {
            continue;
        }
        let mut ok = true;
        for_each_translation(alg, x, r, |u, v| ok &= pi.related(u, v));
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least congruence containing every pair in `pairs`.
pub fn generate_congruence(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<Partition> {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut queue = Vec::new();
    for &(a, b) in pairs {
        for e in [a, b] {
            if e >= n {
                return Err(Error::OutOfRange {
                    element: e,
                    size: n,
                });
            }
        }
        if uf.union(a, b) {
            queue.push((a, b));
        }
    }
    // merged pairs form a spanning forest of the current relation, so
    // translating only those pairs reaches the closure
    while let Some((x, y)) = queue.pop() {
        for_each_translation(alg, x, y, |u, v| {
            if uf.union(u, v) {
                queue.push((u, v));
            }
        });
    }
    Ok(Partition::from_union_find(&mut uf))
}

/// `Cg(a, b)`: the least congruence identifying `a` and `b`.
pub fn principal_congruence(alg: &FiniteAlgebra, a: usize, b: usize) -> Result<Partition> {
    generate_congruence(alg, &[(a, b)])
}

/// `Cg(a, b)` for every `a < b`, in rank order of the pair.
pub fn principal_congruences(alg: &FiniteAlgebra) -> Result<Vec<((usize, usize), Partition)>> {
    let n = alg.size();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    par::map(&pairs, |&(a, b)| {
        principal_congruence(alg, a, b).map(|p| ((a, b), p))
    })
    .into_iter()
    .collect()
}

fn check_congruence(alg: &FiniteAlgebra, pi: &Partition) -> Result<()> {
    if !is_congruence(alg, pi)? {
        return Err(Error::NotCongruence(alg.name().to_string()));
    }
    Ok(())
}

/// Meet of two partitions (always a congruence when both inputs are).
pub fn meet(p1: &Partition, p2: &Partition) -> Result<Partition> {
    p1.meet(p2)
}

/// Join in `Con(alg)`.
pub fn join(alg: &FiniteAlgebra, p1: &Partition, p2: &Partition) -> Result<Partition> {
    let j = p1.join(p2)?;
    check_congruence(alg, &j)?;
    Ok(j)
}

/// `p1 ∘ p2` as a set of pairs.
pub fn compose(p1: &Partition, p2: &Partition) -> Result<BTreeSet<(usize, usize)>> {
    p1.compose(p2)
}

/// Whether two congruences of `alg` permute.
pub fn permute_check(alg: &FiniteAlgebra, p1: &Partition, p2: &Partition) -> Result<bool> {
    for p in [p1, p2] {
        if p.size() != alg.size() {
            return Err(Error::SizeMismatch(p.size(), alg.size()));
        }
    }
    p1.permutes_with(p2)
}

/// All congruences of `alg`, from 0_A (first) to 1_A (last).
pub fn congruence_lattice(alg: &FiniteAlgebra, budget: &Budget) -> Result<Vec<Partition>> {
    let n = alg.size();
    let principals: BTreeSet<Partition> = principal_congruences(alg)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let principals: Vec<Partition> = principals.into_iter().collect();
    let mut lattice: BTreeSet<Partition> = principals.iter().cloned().collect();
    lattice.insert(Partition::bottom(n));
    let mut frontier: Vec<Partition> = lattice.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for p in &principals {
                let j = x.join(p)?;
                if !lattice.contains(&j) {
                    lattice.insert(j.clone());
                    budget.check("congruence lattice", lattice.len())?;
                    next.push(j);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Partition> = lattice.into_iter().collect();
    sort_congruences(&mut out);
    Ok(out)
}

/// Canonical lattice order: more blocks first, then by block ids.
pub fn sort_congruences(list: &mut [Partition]) {
    list.sort_by(|a, b| b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b)));
}

/// Monolith and critical pairs of a subdirectly irreducible algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SIWitness {
    pub monolith: Partition,
    pub critical_pairs: Vec<(usize, usize)>,
}

impl SIWitness {
    pub fn is_critical(&self, c: usize, d: usize) -> bool {
        c != d && self.monolith.related(c, d)
    }
}

/// Returns the monolith if `alg` is subdirectly irreducible.
pub fn si_check(alg: &FiniteAlgebra) -> Result<Option<SIWitness>> {
    let n = alg.size();
    if n < 2 {
        return Ok(None);
    }
    let mut monolith = Partition::top(n);
    for (_, p) in principal_congruences(alg)? {
        monolith = monolith.meet(&p)?;
        if monolith.is_bottom() {
            return Ok(None);
        }
    }
    let critical_pairs = monolith.nontrivial_pairs();
    Ok(Some(SIWitness {
        monolith,
        critical_pairs,
    }))
}

/// Whether all blocks of the congruence `pi` have equal size.
pub fn uniformity_check(alg: &FiniteAlgebra, pi: &Partition) -> Result<bool> {
    check_congruence(alg, pi)?;
    let sizes = pi.block_sizes();
    Ok(sizes.windows(2).all(|w| w[0] == w[1]))
}

/// A unary polynomial `p(x) = t(x, d1, .., dk)`: variable 0 of `term` is
/// `x`, variables `1..=k` are parameters bound to `params`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnaryPolynomialWitness {
    pub term: Term,
    pub params: Vec<usize>,
}

/// JSON shape of a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct WitnessReport {
    pub term: String,
    pub params: Vec<usize>,
    pub complexity: usize,
}

impl UnaryPolynomialWitness {
    pub fn identity() -> Self {
        UnaryPolynomialWitness {
            term: Term::Var(0),
            params: Vec::new(),
        }
    }

    /// Number of parameters.
    pub fn complexity(&self) -> usize {
        self.params.len()
    }

    pub fn eval(&self, alg: &FiniteAlgebra, x: usize) -> Result<usize> {
        let mut asg = Vec::with_capacity(self.params.len() + 1);
        asg.push(x);
        asg.extend_from_slice(&self.params);
        alg.eval(&self.term, &asg)
    }

    /// `other ∘ self`: apply `self` first, then `other`. Parameters concatenate.
    pub fn then(&self, other: &UnaryPolynomialWitness) -> UnaryPolynomialWitness {
        let k = self.params.len();
        let term = other.term.substitute(&|i| {
            if i == 0 {
                self.term.clone()
            } else {
                Term::Var(i + k)
            }
        });
        let mut params = self.params.clone();
        params.extend_from_slice(&other.params);
        UnaryPolynomialWitness { term, params }
    }

    pub fn report(&self, sig: &Signature) -> WitnessReport {
        WitnessReport {
            term: self.term.to_prefix(sig, &VarStyle::Polynomial),
            params: self.params.clone(),
            complexity: self.complexity(),
        }
    }
}

/// Result of a best-first search over the pair graph.
pub(crate) struct PairSearch {
    pub n: usize,
    /// Least witness reaching each pair `(c, d)` (index `c·n + d`).
    pub reached: Vec<Option<UnaryPolynomialWitness>>,
    pub found: Option<(usize, usize)>,
}

/// `f(w1, .., wr)` with the parameters of each child renumbered after the previous ones.
fn combine(op: usize, children: &[&UnaryPolynomialWitness]) -> UnaryPolynomialWitness {
    let mut params = Vec::new();
    let mut args = Vec::with_capacity(children.len());
    for w in children {
        let k = params.len();
        args.push(w.term.rename(&|i| if i == 0 { 0 } else { i + k }));
        params.extend_from_slice(&w.params);
    }
    UnaryPolynomialWitness {
        term: Term::App(op, args),
        params,
    }
}

/// Explores the pairs `(p(a), p(b))` for unary polynomials `p`: the
/// subuniverse of `A²` generated by `(a, b)` and the diagonal. Seeds are
/// `(a, b)` (the polynomial `x`), constants of the signature, and `(c, c)`
/// as a parameter of complexity 1; a settled pair is combined with every
/// settled pair under each operation, complexity adding up. Pairs settle in
/// order of (complexity, term) and the search stops at the first settled
/// pair satisfying `stop`.
pub(crate) fn search_pairs(
    alg: &FiniteAlgebra,
    start: (usize, usize),
    max_complexity: usize,
    budget: &Budget,
    stop: impl Fn(usize, usize) -> bool,
) -> Result<PairSearch> {
    let n = alg.size();
    for e in [start.0, start.1] {
        if e >= n {
            return Err(Error::OutOfRange {
                element: e,
                size: n,
            });
        }
    }
    budget.check("pair graph", n * n)?;
    type Label = Option<(usize, Term)>;
    type Heap = BinaryHeap<Reverse<(usize, Term, usize)>>;
    fn offer(
        node: usize,
        w: UnaryPolynomialWitness,
        max: usize,
        heap: &mut Heap,
        best: &mut [Label],
        pending: &mut [Option<UnaryPolynomialWitness>],
    ) {
        let key = (w.complexity(), w.term.clone());
        if key.0 > max || best[node].as_ref().is_some_and(|b| *b <= key) {
            return;
        }
        heap.push(Reverse((key.0, key.1.clone(), node)));
        best[node] = Some(key);
        pending[node] = Some(w);
    }
    let mut reached: Vec<Option<UnaryPolynomialWitness>> = vec![None; n * n];
    let mut best: Vec<Label> = vec![None; n * n];
    let mut pending: Vec<Option<UnaryPolynomialWitness>> = vec![None; n * n];
    let mut heap: Heap = BinaryHeap::new();
    offer(
        start.0 * n + start.1,
        UnaryPolynomialWitness::identity(),
        max_complexity,
        &mut heap,
        &mut best,
        &mut pending,
    );
    for op in alg.signature().nullary() {
        let c = alg.table(op)[0];
        let w = UnaryPolynomialWitness {
            term: Term::App(op, vec![]),
            params: vec![],
        };
        offer(
            c * n + c,
            w,
            max_complexity,
            &mut heap,
            &mut best,
            &mut pending,
        );
    }
    for c in 0..n {
        let w = UnaryPolynomialWitness {
            term: Term::Var(1),
            params: vec![c],
        };
        offer(
            c * n + c,
            w,
            max_complexity,
            &mut heap,
            &mut best,
            &mut pending,
        );
    }
    let mut settled: Vec<usize> = Vec::new();
    let mut buf = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut fresh: Vec<(usize, UnaryPolynomialWitness)> = Vec::new();
    while let Some(Reverse((cx, term, node))) = heap.pop() {
        if reached[node].is_some() || best[node].as_ref() != Some(&(cx, term)) {
            continue;
        }
        let w = pending[node]
            .take()
            .expect("pending witness for best label");
        reached[node] = Some(w);
        settled.push(node);
        if stop(node / n, node % n) {
            return Ok(PairSearch {
                n,
                reached,
                found: Some((node / n, node % n)),
            });
        }
        let last = settled.len() - 1;
        for op in 0..alg.num_ops() {
            let arity = alg.arity(op);
            if arity == 0 {
                continue;
            }
            for_each_new_tuple(arity, last, settled.len(), &mut buf, |idx| {
                let cost: usize = idx
                    .iter()
                    .map(|&i| reached[settled[i]].as_ref().expect("settled").complexity())
                    .sum();
                if cost > max_complexity {
                    return true;
                }
                xs.clear();
                ys.clear();
                for &i in idx {
                    xs.push(settled[i] / n);
                    ys.push(settled[i] % n);
                }
                let target = alg.apply(op, &xs) * n + alg.apply(op, &ys);
                if reached[target].is_some() || best[target].as_ref().is_some_and(|b| b.0 < cost) {
                    return true;
                }
                let children: Vec<&UnaryPolynomialWitness> = idx
                    .iter()
                    .map(|&i| reached[settled[i]].as_ref().expect("settled"))
                    .collect();
                fresh.push((target, combine(op, &children)));
                true
            });
            for (target, w) in fresh.drain(..) {
                offer(
                    target,
                    w,
                    max_complexity,
                    &mut heap,
                    &mut best,
                    &mut pending,
                );
            }
        }
    }
    Ok(PairSearch {
        n,
        reached,
        found: None,
    })
}

/// A unary polynomial `p` with `p(a) = c` and `p(b) = d` of complexity at
/// most `max_complexity`, if the search finds one.
pub fn membership_witness(
    alg: &FiniteAlgebra,
    target: (usize, usize),
    generator: (usize, usize),
    max_complexity: usize,
    budget: &Budget,
) -> Result<Option<UnaryPolynomialWitness>> {
    let (c, d) = target;
    for e in [c, d] {
        if e >= alg.size() {
            return Err(Error::OutOfRange {
                element: e,
                size: alg.size(),
            });
        }
    }
    let search = search_pairs(alg, generator, max_complexity, budget, |x, y| {
        (x, y) == target
    })?;
    Ok(search.found.and(search.reached[c * search.n + d].clone()))
}

/// Every pair `(p(a), p(b))` for a unary polynomial `p`.
pub fn polynomial_image(
    alg: &FiniteAlgebra,
    a: usize,
    b: usize,
    budget: &Budget,
) -> Result<BTreeSet<(usize, usize)>> {
    let n = alg.size();
    let search = search_pairs(alg, (a, b), usize::MAX, budget, |_, _| false)?;
    Ok(search
        .reached
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_some())
        .map(|(i, _)| (i / n, i % n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn blocks(p: &Partition) -> Vec<Vec<usize>> {
        p.blocks()
    }

    #[test]
    fn principal_in_z4() {
        let z4 = corpus::z4();
        assert_eq!(
            blocks(&principal_congruence(&z4, 0, 2).unwrap()),
            vec![vec![0, 2], vec![1, 3]]
        );
        assert!(principal_congruence(&z4, 0, 1).unwrap().is_top());
        assert!(principal_congruence(&z4, 3, 3).unwrap().is_bottom());
        assert!(principal_congruence(&z4, 0, 4).is_err());
    }

    #[test]
    fn klein_pair() {
        let k = corpus::z2x2();
        assert_eq!(
            blocks(&principal_congruence(&k, 0, 2).unwrap()),
            vec![vec![0, 2], vec![1, 3]]
        );
    }

    #[test]
    fn lattices() {
        let b = Budget::default();
        assert_eq!(congruence_lattice(&corpus::z4(), &b).unwrap().len(), 3);
        assert_eq!(congruence_lattice(&corpus::z2x2(), &b).unwrap().len(), 5);
        assert_eq!(congruence_lattice(&corpus::trivial(), &b).unwrap().len(), 1);
        let lat = congruence_lattice(&corpus::z4(), &b).unwrap();
        assert!(lat[0].is_bottom() && lat[2].is_top());
        assert!(congruence_lattice(&corpus::z2x2(), &Budget::new(3)).is_err());
    }

    #[test]
    fn lattice_ops() {
        let z4 = corpus::z4();
        let top = principal_congruence(&z4, 0, 1).unwrap();
        let mid = principal_congruence(&z4, 0, 2).unwrap();
        assert!(join(&z4, &top, &mid).unwrap().is_top());
        assert_eq!(
            meet(&Partition::bottom(4), &mid).unwrap(),
            Partition::bottom(4)
        );
        let lat = congruence_lattice(&z4, &Budget::default()).unwrap();
        for x in &lat {
            for y in &lat {
                assert!(permute_check(&z4, x, y).unwrap());
            }
        }
        assert!(permute_check(&z4, &mid, &Partition::bottom(3)).is_err());
    }

    #[test]
    fn si_examples() {
        let w = si_check(&corpus::z4()).unwrap().unwrap();
        assert_eq!(blocks(&w.monolith), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(w.critical_pairs, vec![(0, 2), (1, 3), (2, 0), (3, 1)]);
        assert!(si_check(&corpus::z2x2()).unwrap().is_none());
        assert!(si_check(&corpus::trivial()).unwrap().is_none());
    }

    #[test]
    fn uniformity() {
        let z4 = corpus::z4();
        let mid = principal_congruence(&z4, 0, 2).unwrap();
        assert!(uniformity_check(&z4, &mid).unwrap());
        let s3 = corpus::s3();
        // 0 = e, 1 = r: a pair differing by a 3-cycle
        let rot = principal_congruence(&s3, 0, 1).unwrap();
        assert_eq!(rot.num_blocks(), 2);
        assert!(uniformity_check(&s3, &rot).unwrap());
        let sl = corpus::semilattice3();
        let theta = Partition::from_blocks(3, &[vec![0], vec![1, 2]]).unwrap();
        assert!(is_congruence(&sl, &theta).unwrap());
        assert!(!uniformity_check(&sl, &theta).unwrap());
        let bad = Partition::from_blocks(3, &[vec![0, 2], vec![1]]).unwrap();
        assert!(uniformity_check(&sl, &bad).is_err());
    }

    #[test]
    fn witnesses() {
        let z4 = corpus::z4();
        let b = Budget::default();
        let w = membership_witness(&z4, (1, 3), (0, 2), 5, &b)
            .unwrap()
            .unwrap();
        assert_eq!(w.complexity(), 1);
        assert_eq!(
            w.term.to_prefix(z4.signature(), &VarStyle::Polynomial),
            "mul(x,y1)"
        );
        assert_eq!(w.params, vec![1]);
        assert_eq!((w.eval(&z4, 0).unwrap(), w.eval(&z4, 2).unwrap()), (1, 3));
        let id = membership_witness(&z4, (0, 2), (0, 2), 0, &b)
            .unwrap()
            .unwrap();
        assert_eq!(id, UnaryPolynomialWitness::identity());
        assert!(membership_witness(&z4, (0, 1), (0, 2), 10, &b)
            .unwrap()
            .is_none());
        // (1,3) needs a parameter
        assert!(membership_witness(&z4, (1, 3), (0, 2), 0, &b)
            .unwrap()
            .is_none());
    }

    #[test]
    fn composition_of_witnesses() {
        let z4 = corpus::z4();
        let b = Budget::default();
        let w1 = membership_witness(&z4, (1, 3), (0, 2), 5, &b)
            .unwrap()
            .unwrap();
        let w2 = membership_witness(&z4, (3, 1), (1, 3), 5, &b)
            .unwrap()
            .unwrap();
        let both = w1.then(&w2);
        assert_eq!(both.complexity(), w1.complexity() + w2.complexity());
        assert_eq!(
            (both.eval(&z4, 0).unwrap(), both.eval(&z4, 2).unwrap()),
            (3, 1)
        );
    }
}
