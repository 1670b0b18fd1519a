//! The sentence `∃u,v[u ≠ v ∧ ∀z,w(z ≠ w → ∃x,y(Φ(u,v,x,y) ∧ Ψ(x,y,z,w)))]`
//! rendered as text and evaluated on finite algebras.

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::error::Result;
use crate::formulas::phi::PhiFormula;
use crate::formulas::psi::{psi_image, PsiConfig};
use crate::par;

pub const SIGMA_PLACEHOLDER: &str = "Σ";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FirstOrderRendering {
    pub sentence: String,
    pub phi: String,
    pub psi: String,
    pub disjuncts: usize,
    pub sigma: &'static str,
}

impl FirstOrderRendering {
    pub fn text(&self) -> String {
        format!("{}\n  where\n{}\n{}\n", self.sentence, self.phi, self.psi)
    }
}

pub fn render_theta(phi: &PhiFormula, cfg: &PsiConfig) -> FirstOrderRendering {
    let ds = phi.disjuncts();
    let phi_text = format!("Φ(u,v,x,y) :=\n      {}", ds.join("\n    ∨ "));
    let params: Vec<String> = (0..cfg.n_bound).map(|i| format!("p{i}")).collect();
    let psi_text = format!(
        "Ψ(x,y,z,w) := ∃{} ⋁_{{t ∈ T'}} (t(z,{}) ≈ x ∧ t(w,{}) ≈ y)\n    where T' represents the free algebra on {} generators (schema, not expanded)",
        params.join(","),
        params.join(","),
        params.join(","),
        cfg.n_bound + 1
    );
    FirstOrderRendering {
        sentence: format!(
            "{SIGMA_PLACEHOLDER} ∪ {{ ∃u,v [u ≠ v ∧ ∀z,w (z ≠ w → ∃x,y (Φ(u,v,x,y) ∧ Ψ(x,y,z,w)))] }}"
        ),
        phi: phi_text,
        psi: psi_text,
        disjuncts: ds.len(),
        sigma: SIGMA_PLACEHOLDER,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truth {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaVerdict {
    pub value: Truth,
    /// A pair `(u, v)` satisfying the outer existential, when true.
    pub witness: Option<(usize, usize)>,
    /// Number of `(z, w)` whose Ψ search ran out of budget.
    pub undecided: usize,
}

/// Quantifier enumeration of the non-Σ part of the sentence on `s`.
pub fn theta_semantic_check(
    s: &FiniteAlgebra,
    phi: &PhiFormula,
    cfg: &PsiConfig,
) -> Result<ThetaVerdict> {
    let n = s.size();
    let tables = phi.on(s)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|z| (0..n).filter(move |&w| w != z).map(move |w| (z, w)))
        .collect();
    let images = par::map(&pairs, |&(z, w)| {
        match psi_image(s, z, w, cfg.n_bound, &cfg.budget) {
            Ok(img) => Ok(Some(img)),
            Err(e) if e.is_budget() => Ok(None),
            Err(e) => Err(e),
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let undecided = images.iter().filter(|i| i.is_none()).count();
    // a pair (u, v) survives (z, w) when some Ψ-image (x, y) satisfies Φ(u, v, x, y)
    let mut unsure = false;
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let mut ok = true;
            let mut maybe = false;
            for img in &images {
                match img {
                    None => maybe = true,
                    Some(img) => {
                        let hit = (0..n * n).any(|i| img[i] && tables.eval(u, v, i / n, i % n));
                        if !hit {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if ok && !maybe {
                return Ok(ThetaVerdict {
                    value: Truth::True,
                    witness: Some((u, v)),
                    undecided,
                });
            }
            unsure |= ok && maybe;
        }
    }
    Ok(ThetaVerdict {
        value: if unsure { Truth::Unknown } else { Truth::False },
        witness: None,
        undecided,
    })
}
