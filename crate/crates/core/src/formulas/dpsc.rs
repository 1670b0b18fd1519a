//! Instance check of definable principal subcongruences over a list of
//! subdirectly irreducible algebras: every `a ≠ b` reaches a critical pair
//! `(c, d)` by a bounded polynomial, and `Φ(u, v, c, d)` defines `Cg(c, d)`.

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::congruence::{si_check, WitnessReport};
use crate::error::Result;
use crate::formulas::phi::{verdict_with, PhiFormula, PhiVerdict};
use crate::formulas::psi::{psi_search, PsiConfig, PsiOutcome};
use crate::par;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DpscInstance {
    pub pair: (usize, usize),
    pub critical: Option<(usize, usize)>,
    pub witness: Option<WitnessReport>,
    pub phi: Option<PhiVerdict>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberReport {
    pub name: String,
    pub size: usize,
    pub pass: bool,
    pub max_complexity: usize,
    pub instances: Vec<DpscInstance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DpscReport {
    pub algebra: String,
    pub n_bound: usize,
    pub phi_terms: usize,
    pub pass: bool,
    pub members: Vec<MemberReport>,
    pub warnings: Vec<String>,
}

impl DpscReport {
    pub fn failures(&self) -> impl Iterator<Item = (&str, &DpscInstance)> {
        self.members.iter().flat_map(|m| {
            m.instances
                .iter()
                .filter(|i| !i.pass)
                .map(move |i| (m.name.as_str(), i))
        })
    }

    pub fn instance_count(&self) -> usize {
        self.members.iter().map(|m| m.instances.len()).sum()
    }
}

fn check_member(phi: &PhiFormula, s: &FiniteAlgebra, cfg: &PsiConfig) -> Result<MemberReport> {
    let n = s.size();
    let Some(si) = si_check(s)? else {
        return Ok(MemberReport {
            name: s.name().to_string(),
            size: n,
            pass: false,
            max_complexity: 0,
            instances: vec![DpscInstance {
                pair: (0, 0),
                critical: None,
                witness: None,
                phi: None,
                pass: false,
                note: Some("not subdirectly irreducible".into()),
            }],
        });
    };
    let tables = phi.on(s)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let instances = par::map(&pairs, |&(a, b)| -> Result<DpscInstance> {
        match psi_search(s, &si, a, b, cfg)? {
            PsiOutcome::Found(hit) => {
                let (c, d) = hit.critical;
                let verdict = verdict_with(&tables, s, c, d)?;
                let within = hit.witness.complexity() <= cfg.n_bound;
                let pass = within && verdict.defines();
                let note = if !within {
                    Some(format!(
                        "witness complexity {} exceeds N",
                        hit.witness.complexity()
                    ))
                } else if !verdict.defines() {
                    Some("Φ does not define Cg of the critical pair".into())
                } else {
                    None
                };
                Ok(DpscInstance {
                    pair: (a, b),
                    critical: Some((c, d)),
                    witness: Some(hit.witness.report(s.signature())),
                    phi: Some(verdict),
                    pass,
                    note,
                })
            }
            PsiOutcome::Failed(f) => Ok(DpscInstance {
                pair: (a, b),
                critical: None,
                witness: None,
                phi: None,
                pass: false,
                note: Some(f.reason),
            }),
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(MemberReport {
        name: s.name().to_string(),
        size: n,
        pass: instances.iter().all(|i| i.pass),
        max_complexity: instances
            .iter()
            .filter_map(|i| i.witness.as_ref().map(|w| w.complexity))
            .max()
            .unwrap_or(0),
        instances,
    })
}

/// Runs the Ψ search and the Φ definability check for every pair of every member.
pub fn verify_dpsc(
    a: &FiniteAlgebra,
    phi: &PhiFormula,
    members: &[FiniteAlgebra],
    cfg: &PsiConfig,
) -> Result<DpscReport> {
    let mut warnings = Vec::new();
    if members.is_empty() {
        warnings.push("catalog is empty; the check passes vacuously".to_string());
    }
    let reports = members
        .iter()
        .map(|s| check_member(phi, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(DpscReport {
        algebra: a.name().to_string(),
        n_bound: cfg.n_bound,
        phi_terms: phi.len(),
        pass: reports.iter().all(|r| r.pass),
        members: reports,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Budget;
    use crate::corpus;
    use crate::formulas::phi::build_phi;

    #[test]
    fn z4_and_z2_pass() {
        let b = Budget::default();
        let z4 = corpus::z4();
        let phi = build_phi(&z4, &b).unwrap();
        let cfg = PsiConfig::new(3).unwrap();
        let r = verify_dpsc(&z4, &phi, &[corpus::z2(), z4.clone()], &cfg).unwrap();
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.instance_count(), 2 + 12);
        let z2 = corpus::z2();
        let phi2 = build_phi(&z2, &b).unwrap();
        assert!(
            verify_dpsc(&z2, &phi2, std::slice::from_ref(&z2), &cfg)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn empty_and_non_si() {
        let z4 = corpus::z4();
        let phi = build_phi(&z4, &Budget::default()).unwrap();
        let cfg = PsiConfig::new(3).unwrap();
        let empty = verify_dpsc(&z4, &phi, &[], &cfg).unwrap();
        assert!(empty.pass && !empty.warnings.is_empty());
        let klein = verify_dpsc(&z4, &phi, &[corpus::z2x2()], &cfg).unwrap();
        assert!(!klein.pass);
    }
}
