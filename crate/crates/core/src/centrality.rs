//! The center, Abelian and central congruences, and the upper central
//! series, all decided through term-condition closures in `A^4`.

use serde::Serialize;

use crate::algebra::{Budget, FiniteAlgebra};
use crate::closure::PowerClosure;
use crate::congruence::is_congruence;
use crate::error::{Error, Result};
use crate::par;
use crate::partition::Partition;

/// Which term condition a quadruple closure is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TermCondition {
    /// `p = r ⟺ q = s` on every quadruple `(p, r, q, s)`.
    Centrality,
    /// `p = q ⟹ r = s` on every quadruple `(p, q, r, s)`.
    Abelianness,
}

impl TermCondition {
    #[inline]
    fn holds(self, t: &[usize]) -> bool {
        match self {
            TermCondition::Centrality => (t[0] == t[1]) == (t[2] == t[3]),
            TermCondition::Abelianness => t[0] != t[1] || t[2] == t[3],
        }
    }
}

/// A fully materialized quadruple closure, for inspection.
#[derive(Clone, Debug, Serialize)]
pub struct TermConditionInstance {
    pub kind: TermCondition,
    pub generators: Vec<[usize; 4]>,
    pub closure: Vec<[usize; 4]>,
    /// First quadruple of the closure violating the condition.
    pub violation: Option<[usize; 4]>,
}

impl TermConditionInstance {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Closes `generators` in `A^4` and tests the condition on every quadruple.
pub fn term_condition_instance(
    alg: &FiniteAlgebra,
    kind: TermCondition,
    generators: &[[usize; 4]],
    budget: &Budget,
) -> Result<TermConditionInstance> {
    let mut pc = PowerClosure::new(alg, 4, budget)?;
    for g in generators {
        pc.insert(g);
    }
    pc.close_from(0, |_| true);
    let closure: Vec<[usize; 4]> = (0..pc.len())
        .map(|i| {
            let t = pc.get(i);
            [t[0], t[1], t[2], t[3]]
        })
        .collect();
    let violation = closure.iter().copied().find(|t| !kind.holds(t));
    Ok(TermConditionInstance {
        kind,
        generators: generators.to_vec(),
        closure,
        violation,
    })
}

/// Whether `(a, b)` lies in the center: the subalgebra of `A^4` generated by
/// `{(x,y,x,y)} ∪ {(a,a,b,b)}` satisfies the centrality condition.
fn pair_in_center(alg: &FiniteAlgebra, a: usize, b: usize, budget: &Budget) -> Result<bool> {
    let n = alg.size();
    let mut pc = PowerClosure::new(alg, 4, budget)?;
    for x in 0..n {
        for y in 0..n {
            pc.insert(&[x, y, x, y]);
        }
    }
    // the (x,y,x,y) tuples already form a subalgebra; only the new generator is fresh
    let frontier = pc.len();
    if !pc.insert(&[a, a, b, b]) {
        return Ok(true);
    }
    Ok(pc.close_from(frontier, |t| TermCondition::Centrality.holds(t)))
}

/// The center ζ_A as a partition.
pub fn center(alg: &FiniteAlgebra) -> Result<Partition> {
    center_with(alg, &Budget::default())
}

pub fn center_with(alg: &FiniteAlgebra, budget: &Budget) -> Result<Partition> {
    let n = alg.size();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let verdicts = par::map(&pairs, |&(a, b)| pair_in_center(alg, a, b, budget));
    let mut related = vec![false; n * n];
    for x in 0..n {
        related[x * n + x] = true;
    }
    for (&(a, b), v) in pairs.iter().zip(verdicts) {
        if v? {
            related[a * n + b] = true;
            related[b * n + a] = true;
        }
    }
    let zeta = Partition::from_relation(n, |a, b| related[a * n + b]).map_err(|e| {
        Error::Internal(format!(
            "center of `{}` is not an equivalence: {e}",
            alg.name()
        ))
    })?;
    if !is_congruence(alg, &zeta)? {
        return Err(Error::Internal(format!(
            "center of `{}` is not a congruence",
            alg.name()
        )));
    }
    Ok(zeta)
}

fn require_congruence(alg: &FiniteAlgebra, theta: &Partition) -> Result<()> {
    if !is_congruence(alg, theta)? {
        return Err(Error::NotCongruence(alg.name().to_string()));
    }
    Ok(())
}

/// Whether the congruence `theta` is contained in the center.
pub fn is_central(alg: &FiniteAlgebra, theta: &Partition) -> Result<bool> {
    require_congruence(alg, theta)?;
    Ok(theta.leq(&center(alg)?))
}

/// Whether `theta` satisfies the Abelian term condition.
pub fn is_abelian_congruence(alg: &FiniteAlgebra, theta: &Partition) -> Result<bool> {
    is_abelian_congruence_with(alg, theta, &Budget::default())
}

pub fn is_abelian_congruence_with(
    alg: &FiniteAlgebra,
    theta: &Partition,
    budget: &Budget,
) -> Result<bool> {
    require_congruence(alg, theta)?;
    let n = alg.size();
    let mut pc = PowerClosure::new(alg, 4, budget)?;
    for x in 0..n {
        for y in (0..n).filter(|&y| theta.related(x, y)) {
            for t in [[x, x, y, y], [x, y, x, y]] {
                if pc.insert(&t) && !TermCondition::Abelianness.holds(&t) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(pc.close_from(0, |t| TermCondition::Abelianness.holds(t)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum Nilpotence {
    Nilpotent {
        class: usize,
    },
    /// The series stalled: `ζ_{stall+1} = ζ_stall ≠ 1_A`.
    NotNilpotent {
        stall: usize,
    },
}

impl Nilpotence {
    pub fn class(&self) -> Option<usize> {
        match self {
            Nilpotence::Nilpotent { class } => Some(*class),
            Nilpotence::NotNilpotent { .. } => None,
        }
    }
}

impl std::fmt::Display for Nilpotence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Nilpotence::Nilpotent { class } => write!(f, "nilpotent of class {class}"),
            Nilpotence::NotNilpotent { stall } => {
                write!(f, "not nilpotent (series stalls at ζ{stall})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpperCentralSeries {
    /// ζ_0 = 0_A ≤ ζ_1 ≤ ..., strictly increasing.
    pub terms: Vec<Partition>,
    pub status: Nilpotence,
}

/// Iterates `ζ_{i+1}/ζ_i = ζ(A/ζ_i)` until it reaches 1_A or stalls.
pub fn upper_central_series(alg: &FiniteAlgebra) -> Result<UpperCentralSeries> {
    let n = alg.size();
    let mut terms = vec![Partition::bottom(n)];
    loop {
        let last = terms.last().expect("series is nonempty");
        if last.is_top() {
            let class = terms.len() - 1;
            return Ok(UpperCentralSeries {
                terms,
                status: Nilpotence::Nilpotent { class },
            });
        }
        let (quotient, block_map) = alg.quotient(last)?;
        let zq = center(&quotient)?;
        let labels: Vec<usize> = block_map.iter().map(|&b| zq.rep(b)).collect();
        let next = Partition::from_labels(&labels);
        if &next == last {
            let stall = terms.len() - 1;
            return Ok(UpperCentralSeries {
                terms,
                status: Nilpotence::NotNilpotent { stall },
            });
        }
        terms.push(next);
    }
}

pub fn nilpotence_class(alg: &FiniteAlgebra) -> Result<Nilpotence> {
    Ok(upper_central_series(alg)?.status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::{principal_congruence, si_check};
    use crate::corpus;

    #[test]
    fn centers() {
        assert!(center(&corpus::z4()).unwrap().is_top());
        assert!(center(&corpus::s3()).unwrap().is_bottom());
        let d4 = center(&corpus::d4()).unwrap();
        assert_eq!(
            d4.blocks(),
            vec![vec![0, 2], vec![1, 3], vec![4, 6], vec![5, 7]]
        );
        assert!(center(&corpus::trivial()).unwrap().is_top());
    }

    #[test]
    fn centrality_of_congruences() {
        let z4 = corpus::z4();
        assert!(is_central(&z4, &principal_congruence(&z4, 0, 2).unwrap()).unwrap());
        let d4 = corpus::d4();
        let mono = si_check(&d4).unwrap().unwrap().monolith;
        assert!(is_central(&d4, &mono).unwrap());
        let s3 = corpus::s3();
        assert!(!is_central(&s3, &principal_congruence(&s3, 0, 1).unwrap()).unwrap());
        let bad = Partition::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(is_central(&z4, &bad).is_err());
    }

    #[test]
    fn abelian_congruences() {
        let z4 = corpus::z4();
        assert!(is_abelian_congruence(&z4, &Partition::top(4)).unwrap());
        let s3 = corpus::s3();
        assert!(!is_abelian_congruence(&s3, &Partition::top(6)).unwrap());
        assert!(is_abelian_congruence(&s3, &Partition::bottom(6)).unwrap());
        // A3 is abelian as a normal subgroup
        assert!(is_abelian_congruence(&s3, &principal_congruence(&s3, 0, 1).unwrap()).unwrap());
    }

    #[test]
    fn series() {
        let z4 = upper_central_series(&corpus::z4()).unwrap();
        assert_eq!(z4.status, Nilpotence::Nilpotent { class: 1 });
        assert_eq!(z4.terms.len(), 2);
        let d4 = upper_central_series(&corpus::d4()).unwrap();
        assert_eq!(d4.status, Nilpotence::Nilpotent { class: 2 });
        assert_eq!(d4.terms[1], center(&corpus::d4()).unwrap());
        let s3 = upper_central_series(&corpus::s3()).unwrap();
        assert_eq!(s3.status, Nilpotence::NotNilpotent { stall: 0 });
        assert_eq!(
            nilpotence_class(&corpus::trivial()).unwrap(),
            Nilpotence::Nilpotent { class: 0 }
        );
        assert_eq!(nilpotence_class(&corpus::z2()).unwrap().class(), Some(1));
    }

    #[test]
    fn instance_reports_violation() {
        let s3 = corpus::s3();
        let gens: Vec<[usize; 4]> = (0..6)
            .flat_map(|x| (0..6).map(move |y| [x, y, x, y]))
            .chain([[0, 0, 1, 1]])
            .collect();
        let inst =
            term_condition_instance(&s3, TermCondition::Centrality, &gens, &Budget::default())
                .unwrap();
        assert!(!inst.holds());
        for g in &gens {
            assert!(inst.closure.contains(g));
        }
    }
}
