//! Checks the standing hypotheses on a generating algebra: nilpotent, a
//! product of prime-power-order algebras, and a Mal'tsev term.

use serde::Serialize;

use crate::algebra::{Budget, FiniteAlgebra};
use crate::centrality::{nilpotence_class, Nilpotence};
use crate::error::Result;
use crate::factor::direct_factorization;
use crate::free::{find_maltsev, MaltsevSearch};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorSummary {
    pub size: usize,
    pub prime_power: bool,
    /// `(p, e)` with `size = p^e`.
    pub decomposition: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub algebra: String,
    pub nilpotence: Nilpotence,
    pub nilpotent: bool,
    pub factors: Vec<FactorSummary>,
    pub prime_power_factors: bool,
    /// `found`, `absent` or `unknown`.
    pub maltsev: &'static str,
    pub maltsev_term: Option<String>,
    pub pass: bool,
}

impl HypothesisReport {
    /// Names of the hypotheses that do not hold.
    pub fn failing(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.nilpotent {
            out.push("nilpotence");
        }
        if !self.prime_power_factors {
            out.push("prime-power factors");
        }
        if self.maltsev != "found" {
            out.push("congruence permutability");
        }
        out
    }
}

pub fn check_hypotheses(alg: &FiniteAlgebra, budget: &Budget) -> Result<HypothesisReport> {
    let nilpotence = nilpotence_class(alg)?;
    let nilpotent = nilpotence.class().is_some();
    let fact = direct_factorization(alg, budget)?;
    let factors: Vec<FactorSummary> = fact
        .factors
        .iter()
        .map(|f| FactorSummary {
            size: f.size,
            prime_power: f.is_prime_power(),
            decomposition: f.prime_power,
        })
        .collect();
    let prime_power_factors = fact.all_prime_power();
    let search = find_maltsev(alg, budget)?;
    let maltsev_term = match &search {
        MaltsevSearch::Found(w) => Some(
            w.term
                .to_prefix(alg.signature(), &crate::term::VarStyle::Indexed),
        ),
        _ => None,
    };
    let maltsev = search.status();
    Ok(HypothesisReport {
        algebra: alg.name().to_string(),
        pass: nilpotent && prime_power_factors && maltsev == "found",
        nilpotence,
        nilpotent,
        factors,
        prime_power_factors,
        maltsev,
        maltsev_term,
    })
}
