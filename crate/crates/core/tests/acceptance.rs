//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::{all_congruences, brute_cg, brute_si, partition_matrix, Group};
use cw_core::algebra::unrank;
use cw_core::catalog::{enumerate_members, enumerate_si, is_isomorphic, CatalogOptions};
use cw_core::centrality::{center, is_central, nilpotence_class, Nilpotence};
use cw_core::congruence::{
    congruence_lattice, polynomial_image, principal_congruence, uniformity_check,
};
use cw_core::corpus;
use cw_core::factor::direct_factorization;
use cw_core::formulas::decompose::sample_terms;
use cw_core::formulas::{
    build_phi, decompose_commutator, theta_semantic_check, verify_dpsc, PsiConfig, Truth,
};
use cw_core::free::{
    absorbing_catalog, empirical_m, find_maltsev, Exhaustion, MaltsevSearch, TermStream,
    VarietyBounds,
};
use cw_core::hypotheses::check_hypotheses;
use cw_core::{Budget, FiniteAlgebra, Term};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn budget() -> Budget {
    Budget::default()
}

fn maltsev(a: &FiniteAlgebra) -> std::result::Result<Term, String> {
    match ok(find_maltsev(a, &budget()))? {
        MaltsevSearch::Found(w) => Ok(w.term),
        other => Err(format!(
            "no Mal'tsev term for {}: {}",
            a.name(),
            other.status()
        )),
    }
}

fn c1_congruences() -> Check {
    let algs = [
        corpus::z2(),
        corpus::z4(),
        corpus::z2x2(),
        corpus::z6(),
        corpus::s3(),
    ];
    let mut pairs = 0;
    for a in &algs {
        let n = a.size();
        let cons = all_congruences(a);
        for x in 0..n {
            for y in 0..n {
                let got = ok(principal_congruence(a, x, y))?;
                ensure!(
                    partition_matrix(&got) == brute_cg(&cons, n, x, y),
                    "{}: Cg({x},{y}) differs from the brute-force least congruence",
                    a.name()
                );
                pairs += 1;
            }
        }
        let lat = ok(congruence_lattice(a, &budget()))?;
        ensure!(
            lat.len() == cons.len(),
            "{}: |Con| = {} but brute force finds {}",
            a.name(),
            lat.len(),
            cons.len()
        );
    }
    let z4 = ok(congruence_lattice(&corpus::z4(), &budget()))?.len();
    let klein = ok(congruence_lattice(&corpus::z2x2(), &budget()))?.len();
    ensure!(
        z4 == 3 && klein == 5,
        "|Con Z4| = {z4}, |Con Z2xZ2| = {klein}"
    );
    Ok(format!(
        "{pairs} principal congruences match; |Con Z4| = 3, |Con Z2xZ2| = 5"
    ))
}

fn c2_centrality() -> Check {
    for a in corpus::groups() {
        let g = Group::of(&a);
        let ucs = g.upper_central_series();
        let z = ok(center(&a))?;
        ensure!(
            partition_matrix(&z) == g.cosets(ucs.get(1).unwrap_or(&ucs[0])),
            "{}: center differs from Z(G) cosets",
            a.name()
        );
        let expected = if ucs.last().unwrap().len() == g.n {
            Nilpotence::Nilpotent {
                class: ucs.len() - 1,
            }
        } else {
            Nilpotence::NotNilpotent {
                stall: ucs.len() - 1,
            }
        };
        let got = ok(nilpotence_class(&a))?;
        ensure!(
            got == expected,
            "{}: class {got} vs group oracle {expected}",
            a.name()
        );
    }
    ensure!(ok(center(&corpus::z4()))?.is_top(), "center(Z4) is not 1_A");
    ensure!(
        ok(center(&corpus::s3()))?.is_bottom(),
        "center(S3) is not 0_A"
    );
    ensure!(
        ok(center(&corpus::d4()))?.blocks() == vec![vec![0, 2], vec![1, 3], vec![4, 6], vec![5, 7]],
        "center(D4) is not the cosets of {{e, r²}}"
    );
    let classes: Vec<Option<usize>> = [
        corpus::z2(),
        corpus::z4(),
        corpus::z2x2(),
        corpus::z6(),
        corpus::d4(),
        corpus::s3(),
    ]
    .iter()
    .map(|a| nilpotence_class(a).map(|n| n.class()))
    .collect::<Result<_, _>>()
    .map_err(|e| e.to_string())?;
    ensure!(
        classes == vec![Some(1), Some(1), Some(1), Some(1), Some(2), None],
        "classes {classes:?}"
    );
    Ok("centers and classes match the group oracle (D4 class 2, S3 not nilpotent)".into())
}

fn c3_maltsev() -> Check {
    for a in corpus::groups() {
        let m = maltsev(&a)?;
        let first = m.substitute(&|i| Term::Var(if i == 0 { 0 } else { 1 }));
        let second = m.substitute(&|i| Term::Var(if i == 2 { 0 } else { 1 }));
        ensure!(
            common::holds(&a, &first, &Term::Var(0), 2)
                && common::holds(&a, &second, &Term::Var(0), 2),
            "{}: witness fails an identity",
            a.name()
        );
    }
    let set2 = ok(find_maltsev(&corpus::set2(), &budget()))?;
    ensure!(
        set2 == MaltsevSearch::Absent,
        "set2: expected absent with complete flag, got {}",
        set2.status()
    );
    Ok("all 6 groups verified exhaustively; set2 absent (complete)".into())
}

fn c4_uniform_permutable() -> Check {
    for a in [corpus::z4(), corpus::z2x2()] {
        let m = maltsev(&a)?;
        let n = a.size();
        for x in 0..n {
            for y in 0..n {
                for c in 0..n {
                    let mv = ok(a.eval(&m, &[x, y, c]))?;
                    ensure!(
                        ok(principal_congruence(&a, x, y))? == ok(principal_congruence(&a, mv, c))?,
                        "{}: Cg({x},{y}) ≠ Cg(m({x},{y},{c}),{c})",
                        a.name()
                    );
                }
            }
        }
    }
    for a in corpus::groups() {
        let n = a.size();
        let cons = all_congruences(&a);
        for x in 0..n {
            for y in 0..n {
                let img = ok(polynomial_image(&a, x, y, &budget()))?;
                let cg = brute_cg(&cons, n, x, y);
                let brute: std::collections::BTreeSet<(usize, usize)> = (0..n)
                    .flat_map(|u| (0..n).map(move |v| (u, v)))
                    .filter(|&(u, v)| cg[u][v])
                    .collect();
                ensure!(
                    img == brute,
                    "{}: polynomial image of ({x},{y}) differs from Cg",
                    a.name()
                );
            }
        }
    }
    let mut checked = 0;
    for a in [
        corpus::z2(),
        corpus::z4(),
        corpus::z2x2(),
        corpus::z6(),
        corpus::d4(),
        corpus::trivial(),
    ] {
        for l in all_congruences(&a) {
            let p = cw_core::Partition::from_labels(&l);
            let mut sizes = p.block_sizes();
            sizes.dedup();
            ensure!(
                sizes.len() == 1,
                "{}: congruence {:?} is not uniform",
                a.name(),
                p.blocks()
            );
            ensure!(
                ok(uniformity_check(&a, &p))?,
                "{}: uniformity_check disagrees",
                a.name()
            );
            checked += 1;
        }
    }
    Ok(format!(
        "(2) on Z4, Z2xZ2; (3) on all groups; (5) on {checked} congruences"
    ))
}

fn c5_commutators() -> Check {
    for a in [corpus::z2(), corpus::z4()] {
        let m = ok(empirical_m(&a, 3, &budget()))?;
        ensure!(
            m.m_emp == 1 && m.status == Exhaustion::Complete,
            "{}: M_emp = {} ({})",
            a.name(),
            m.m_emp,
            m.status_label()
        );
    }
    let z4 = corpus::z4();
    let m = maltsev(&z4)?;
    let terms = sample_terms(&z4, 2, 4, 20, 2024);
    for (i, w) in terms.iter().enumerate() {
        let d = decompose_commutator(&z4, &m, w, 2).map_err(|e| format!("term {i}: {e}"))?;
        for c in &d.components {
            ensure!(
                c.subset.iter().all(|&x| {
                    let fixed = c
                        .term
                        .substitute(&|v| Term::Var(if v == x { 2 } else { v }));
                    common::holds(&z4, &fixed, &Term::Var(2), 3)
                }),
                "term {i}: component is not absorbing"
            );
        }
        ensure!(
            common::holds(&z4, &d.reconstruction, w, 3),
            "term {i}: reconstruction differs"
        );
    }
    Ok("M_emp(Z2) = M_emp(Z4) = 1 complete through arity 3; 20/20 decompositions verified".into())
}

fn c6_lemma_corollary() -> Check {
    let mut lemma_checks = 0usize;
    let mut cor_checks = 0usize;
    for a in [corpus::z4(), corpus::z2x2()] {
        let n = a.size();
        let central: Vec<cw_core::Partition> = ok(congruence_lattice(&a, &budget()))?
            .into_iter()
            .filter(|p| is_central(&a, p).unwrap_or(false))
            .collect();
        // r(u, v, y1, y2): distinct term operations up to depth 3
        let terms: Vec<Term> = ok(TermStream::new(&a, 4, 3, budget()))?
            .flatten()
            .map(|e| e.term)
            .collect();
        for alpha in &central {
            for (x, y) in alpha
                .nontrivial_pairs()
                .into_iter()
                .chain((0..n).map(|i| (i, i)))
            {
                for r in &terms {
                    let tab = ok(a.term_table(r, 4))?;
                    let at = |u: usize, v: usize, d1: usize, d2: usize| {
                        tab[((u * n + v) * n + d1) * n + d2]
                    };
                    let absorbs = (0..n).all(|d1| (0..n).all(|d2| at(y, y, d1, d2) == y));
                    if !absorbs {
                        continue;
                    }
                    let v0 = at(x, y, 0, 0);
                    ensure!(
                        (0..n).all(|d1| (0..n).all(|d2| at(x, y, d1, d2) == v0)),
                        "{}: r depends on parameters at ({x},{y})",
                        a.name()
                    );
                    lemma_checks += 1;
                }
            }
        }
        // the corollary needs a parameter slot besides the first argument
        {
            let nvars = 2;
            let cat = ok(absorbing_catalog(&a, nvars, &budget()))?;
            for w in &cat.elements {
                ensure!(
                    common::absorbing(&a, &w.term, nvars),
                    "{}: catalog word is not absorbing",
                    a.name()
                );
                for alpha in &central {
                    for (x, y) in alpha.nontrivial_pairs() {
                        let mut d = vec![0; nvars - 1];
                        for p in 0..n.pow(nvars as u32 - 1) {
                            unrank(p, n, nvars - 1, &mut d);
                            let mut asg = vec![x];
                            asg.extend_from_slice(&d);
                            asg.push(y);
                            ensure!(
                                common::eval(&a, &w.term, &asg) == y,
                                "{}: w(a, d, b) ≠ b",
                                a.name()
                            );
                            cor_checks += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{lemma_checks} lemma instances, {cor_checks} corollary instances"
    ))
}

fn c7_phi() -> Check {
    let z4 = corpus::z4();
    let phi = ok(build_phi(&z4, &budget()))?;
    ensure!(phi.len() == 16, "|T| = {}", phi.len());
    let catalog = ok(enumerate_members(&z4, &CatalogOptions::default()))?;
    let mut sound = 0usize;
    let mut complete = 0usize;
    for e in &catalog.members {
        let s = &e.algebra;
        let n = s.size();
        let cons = all_congruences(s);
        let tables = ok(phi.on(s))?;
        for x in 0..n {
            for y in 0..n {
                let cg = brute_cg(&cons, n, x, y);
                let central = ok(is_central(s, &ok(principal_congruence(s, x, y))?))?;
                for (u, row) in cg.iter().enumerate() {
                    for (v, &in_cg) in row.iter().enumerate() {
                        let holds = tables.eval(u, v, x, y);
                        ensure!(
                            !holds || in_cg,
                            "{}: Φ({u},{v},{x},{y}) but not in Cg",
                            e.name
                        );
                        if central && in_cg {
                            ensure!(
                                holds,
                                "{}: ({u},{v}) ∈ Cg({x},{y}) central, Φ fails",
                                e.name
                            );
                            complete += 1;
                        }
                        sound += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "|T| = 16; {} members, {sound} soundness and {complete} completeness instances",
        catalog.members.len()
    ))
}

fn c8_dpsc() -> Check {
    let mut summary = Vec::new();
    for a in [corpus::z2(), corpus::z4()] {
        let cat = ok(enumerate_si(&a, &CatalogOptions::default()))?;
        let phi = ok(build_phi(&a, &budget()))?;
        let bounds = ok(VarietyBounds::compute(&a, 3, None, &budget()))?;
        ensure!(
            bounds.n == bounds.k * bounds.m.m_emp + 2,
            "N is not k·M_emp + 2"
        );
        let cfg = PsiConfig::from_bounds(&bounds).with_maltsev(phi.maltsev.clone());
        let r = ok(verify_dpsc(&a, &phi, &cat.si_algebras(), &cfg))?;
        ensure!(
            r.pass,
            "{}: {} failing instance(s)",
            a.name(),
            r.failures().count()
        );
        ensure!(
            r.members.iter().all(|m| m.max_complexity <= bounds.n),
            "{}: witness complexity above N",
            a.name()
        );
        summary.push(format!(
            "V({}) {} members, {} instances, N = {}",
            a.name(),
            r.members.len(),
            r.instance_count(),
            bounds.n
        ));
    }
    Ok(summary.join("; "))
}

fn c9_theta() -> Check {
    let z4 = corpus::z4();
    let phi = ok(build_phi(&z4, &budget()))?;
    let cfg = PsiConfig::new(3).map_err(|e| e.to_string())?;
    let catalog = ok(enumerate_members(&z4, &CatalogOptions::default()))?;
    let mut si = 0;
    let mut non_si_quotient = false;
    for e in &catalog.members {
        let truth = ok(theta_semantic_check(&e.algebra, &phi, &cfg))?.value;
        ensure!(
            e.is_si() == brute_si(&e.algebra),
            "{}: SI flag disagrees with brute force",
            e.name
        );
        let expected = if e.is_si() { Truth::True } else { Truth::False };
        ensure!(
            truth == expected,
            "{}: Θ is {truth:?}, expected {expected:?}",
            e.name
        );
        if e.is_si() {
            si += 1;
        } else if e.size > 1 && !e.provenance.congruence.is_bottom() {
            non_si_quotient = true;
        }
    }
    for control in [corpus::z2x2(), corpus::trivial()] {
        let truth = ok(theta_semantic_check(&control, &phi, &cfg))?.value;
        ensure!(truth == Truth::False, "{}: Θ is {truth:?}", control.name());
    }
    // a proper quotient of a subpower that is not SI
    let sq = ok(z4.power(2, &budget()))?;
    let theta = ok(principal_congruence(&sq, 0, 2))?;
    let (q, _) = ok(sq.quotient(&theta))?;
    ensure!(!brute_si(&q), "control quotient is SI");
    ensure!(
        ok(theta_semantic_check(&q, &phi, &cfg))?.value == Truth::False,
        "Θ true on a non-SI quotient"
    );
    ensure!(
        non_si_quotient
            || catalog
                .members
                .iter()
                .any(|e| is_isomorphic(&e.algebra, &q)),
        "no non-SI quotient among members"
    );
    Ok(format!(
        "true on {si} SI members, false on {} non-SI members and 3 controls",
        catalog.members.len() - si
    ))
}

fn c10_hypotheses() -> Check {
    for a in [corpus::z4(), corpus::z2x2(), corpus::z6(), corpus::d4()] {
        let r = ok(check_hypotheses(&a, &budget()))?;
        ensure!(r.pass, "{}: failing {:?}", a.name(), r.failing());
    }
    let s3 = ok(check_hypotheses(&corpus::s3(), &budget()))?;
    ensure!(!s3.pass && !s3.nilpotent, "S3 should fail nilpotence");
    let f = ok(direct_factorization(&corpus::z6(), &budget()))?;
    let mut sizes = f.sizes();
    sizes.sort();
    ensure!(
        sizes == vec![2, 3] && f.all_prime_power(),
        "Z6 factors {sizes:?}"
    );
    Ok("Z4, Z2xZ2, Z6, D4 pass; S3 fails nilpotence; Z6 = 2 x 3".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "congruence oracle equivalence",
            Duration::from_secs(10),
            c1_congruences,
        ),
        ("centrality suite", Duration::from_secs(30), c2_centrality),
        ("Mal'tsev search", Duration::MAX, c3_maltsev),
        (
            "permutability, polynomial images, uniformity",
            Duration::MAX,
            c4_uniform_permutable,
        ),
        ("commutator machinery", Duration::MAX, c5_commutators),
        (
            "central term-condition lemma and corollary",
            Duration::MAX,
            c6_lemma_corollary,
        ),
        (
            "Φ soundness and completeness",
            Duration::from_secs(120),
            c7_phi,
        ),
        ("dpsc end-to-end", Duration::MAX, c8_dpsc),
        ("Θ classifier", Duration::MAX, c9_theta),
        ("hypothesis gate", Duration::MAX, c10_hypotheses),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let verdict = match result {
            Ok(detail) if took <= *limit => format!("PASS  {detail}"),
            Ok(detail) => format!("FAIL  over time limit {limit:?}: {detail}"),
            Err(e) => format!("FAIL  {e}"),
        };
        if verdict.starts_with("FAIL") {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{name}] {:.2}s {verdict}",
            i + 1,
            took.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
