//! Decomposition of a finite algebra into directly indecomposable factors
//! by searching for permuting complementary congruence pairs.

use serde::Serialize;

use crate::algebra::{Budget, FiniteAlgebra};
use crate::congruence::congruence_lattice;
use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Clone, Debug, Serialize)]
pub struct Factor {
    #[serde(skip)]
    pub algebra: FiniteAlgebra,
    pub size: usize,
    /// Kernel of the projection onto this factor.
    pub congruence: Partition,
    /// Meet of the other factors' kernels.
    pub complement: Partition,
    /// `(p, e)` when the size is `p^e` with `e ≥ 1`.
    pub prime_power: Option<(usize, usize)>,
}

impl Factor {
    /// True for prime-power sizes and for the trivial factor.
    pub fn is_prime_power(&self) -> bool {
        self.size == 1 || self.prime_power.is_some()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Factorization {
    pub factors: Vec<Factor>,
    /// `iso[a]` is the rank of `(a/θ_1, .., a/θ_m)` in the product of the
    /// factors (first factor most significant).
    pub iso: Vec<usize>,
}

impl Factorization {
    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.size).collect()
    }

    pub fn all_prime_power(&self) -> bool {
        self.factors.iter().all(Factor::is_prime_power)
    }

    /// The direct product of the factors, in factor order.
    pub fn product(&self) -> Result<FiniteAlgebra> {
        let refs: Vec<&FiniteAlgebra> = self.factors.iter().map(|f| &f.algebra).collect();
        FiniteAlgebra::product(&refs)
    }
}

/// `Some((p, e))` with `m = p^e`, `e ≥ 1`, `p` prime.
pub fn prime_power(m: usize) -> Option<(usize, usize)> {
    if m < 2 {
        return None;
    }
    let p = (2..=m).find(|&d| m.is_multiple_of(d))?;
    let (mut rest, mut e) = (m, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Kernels (on `alg`) of a decomposition into indecomposable factors.
fn split(alg: &FiniteAlgebra, budget: &Budget) -> Result<Vec<Partition>> {
    let n = alg.size();
    let lattice = congruence_lattice(alg, budget)?;
    for alpha in lattice.iter().filter(|p| !p.is_top() && !p.is_bottom()) {
        for beta in lattice.iter().filter(|p| !p.is_top() && !p.is_bottom()) {
            if alpha.meet(beta)?.is_bottom()
                && alpha.join(beta)?.is_top()
                && alpha.permutes_with(beta)?
            {
                let mut kernels = Vec::new();
                for theta in [alpha, beta] {
                    let (q, map) = alg.quotient(theta)?;
                    for k in split(&q, budget)? {
                        let labels: Vec<usize> = (0..n).map(|x| k.rep(map[x])).collect();
                        kernels.push(Partition::from_labels(&labels));
                    }
                }
                return Ok(kernels);
            }
        }
    }
    Ok(vec![Partition::bottom(n)])
}

/// Splits `alg` greedily until every factor is directly indecomposable.
pub fn direct_factorization(alg: &FiniteAlgebra, budget: &Budget) -> Result<Factorization> {
    let n = alg.size();
    let kernels = split(alg, budget)?;
    let mut factors = Vec::with_capacity(kernels.len());
    for (i, k) in kernels.iter().enumerate() {
        let mut complement = Partition::top(n);
        for (j, other) in kernels.iter().enumerate() {
            if j != i {
                complement = complement.meet(other)?;
            }
        }
        if !(k.meet(&complement)?.is_bottom()
            && k.join(&complement)?.is_top()
            && k.permutes_with(&complement)?)
        {
            return Err(Error::Internal(format!(
                "factor congruence {i} of `{}` has no permuting complement",
                alg.name()
            )));
        }
        let (q, _) = alg.quotient(k)?;
        factors.push(Factor {
            size: q.size(),
            prime_power: prime_power(q.size()),
            algebra: q.with_name(format!("{}[{i}]", alg.name())),
            congruence: k.clone(),
            complement,
        });
    }
    let maps: Vec<Vec<usize>> = kernels.iter().map(Partition::block_indices).collect();
    let iso: Vec<usize> = (0..n)
        .map(|a| {
            maps.iter()
                .zip(&factors)
                .fold(0, |acc, (m, f)| acc * f.size + m[a])
        })
        .collect();
    let mut hit = vec![false; n];
    for &r in &iso {
        if r >= n || std::mem::replace(&mut hit[r], true) {
            return Err(Error::Internal(format!(
                "factor map of `{}` is not a bijection",
                alg.name()
            )));
        }
    }
    Ok(Factorization { factors, iso })
}
