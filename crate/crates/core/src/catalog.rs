//! Small members of `V(A)` obtained as quotients of subalgebras of powers
//! `A^k`, deduplicated up to isomorphism.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::algebra::{rank, unrank, Budget, FiniteAlgebra};
use crate::centrality::{nilpotence_class, Nilpotence};
use crate::congruence::{congruence_lattice, si_check, SIWitness};
use crate::error::{Error, Result};
use crate::free::Exhaustion;
use crate::par;
use crate::partition::Partition;

/// Above this size the canonical table is the table as generated.
pub const CANONICAL_LIMIT: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogOptions {
    pub max_power: usize,
    pub max_size: usize,
    /// Largest generating set tried inside each power.
    pub max_generators: usize,
    pub budget: Budget,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions {
            max_power: 2,
            max_size: 8,
            max_generators: 2,
            budget: Budget::default(),
        }
    }
}

/// How to rebuild an entry from `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub power: usize,
    /// Generators as `k`-tuples over `A`.
    pub generators: Vec<Vec<usize>>,
    pub subuniverse_size: usize,
    /// Congruence on the subalgebra (elements renumbered in increasing rank order).
    pub congruence: Partition,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    #[serde(skip)]
    pub algebra: FiniteAlgebra,
    pub name: String,
    pub size: usize,
    pub provenance: Provenance,
    pub si: Option<SIWitness>,
    pub nilpotence: Nilpotence,
}

impl CatalogEntry {
    pub fn is_si(&self) -> bool {
        self.si.is_some()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Catalog {
    pub algebra: String,
    pub options: CatalogOptions,
    pub status: Exhaustion,
    /// Every member found, subdirectly irreducible or not.
    pub members: Vec<CatalogEntry>,
    pub warnings: Vec<String>,
}

impl Catalog {
    pub fn si_entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.members.iter().filter(|e| e.is_si())
    }

    pub fn si_algebras(&self) -> Vec<FiniteAlgebra> {
        self.si_entries().map(|e| e.algebra.clone()).collect()
    }
}

/// Colour refinement from operation statistics; isomorphisms preserve colours.
fn colours(alg: &FiniteAlgebra) -> Vec<usize> {
    let n = alg.size();
    let mut sig: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut args = Vec::new();
    for op in 0..alg.num_ops() {
        let arity = alg.arity(op);
        let mut hits = vec![0usize; n];
        for &v in alg.table(op) {
            hits[v] += 1;
        }
        for x in 0..n {
            args.clear();
            args.resize(arity, x);
            sig[x].push(hits[x]);
            sig[x].push(usize::from(alg.apply(op, &args) == x));
        }
    }
    let mut col = relabel_signatures(&sig);
    loop {
        let mut next: Vec<Vec<usize>> = (0..n).map(|x| vec![col[x]]).collect();
        for op in 0..alg.num_ops() {
            let arity = alg.arity(op);
            for (x, row) in next.iter_mut().enumerate() {
                args.clear();
                args.resize(arity, x);
                row.push(col[alg.apply(op, &args)]);
            }
        }
        let refined = relabel_signatures(&next);
        let count = |c: &[usize]| c.iter().max().map_or(0, |m| m + 1);
        if count(&refined) == count(&col) {
            return refined;
        }
        col = refined;
    }
}

fn relabel_signatures(sig: &[Vec<usize>]) -> Vec<usize> {
    let mut sorted: Vec<&Vec<usize>> = sig.iter().collect();
    sorted.sort();
    sorted.dedup();
    sig.iter()
        .map(|s| sorted.binary_search(&s).expect("present"))
        .collect()
}

fn colour_histogram(c: &[usize]) -> Vec<usize> {
    let mut h = vec![0; c.iter().max().map_or(0, |m| m + 1)];
    for &x in c {
        h[x] += 1;
    }
    h
}

/// Whether the partial map `phi` (with `usize::MAX` for unassigned) is
/// consistent on every tuple whose arguments and value are all assigned.
fn consistent(s1: &FiniteAlgebra, s2: &FiniteAlgebra, phi: &[usize], last: usize) -> bool {
    let n = s1.size();
    let mut args = Vec::new();
    let mut img = Vec::new();
    for op in 0..s1.num_ops() {
        let arity = s1.arity(op);
        args.resize(arity, 0);
        img.resize(arity, 0);
        for (r, &v) in s1.table(op).iter().enumerate() {
            unrank(r, n, arity, &mut args);
            if arity > 0 && !args.contains(&last) && v != last {
                continue;
            }
            if phi[v] == usize::MAX || args.iter().any(|&a| phi[a] == usize::MAX) {
                continue;
            }
            for (i, &a) in img.iter_mut().zip(&args) {
                *i = phi[a];
            }
            if s2.apply(op, &img) != phi[v] {
                return false;
            }
        }
    }
    true
}

/// An isomorphism `S1 → S2` as an element map, if one exists.
pub fn find_isomorphism(s1: &FiniteAlgebra, s2: &FiniteAlgebra) -> Option<Vec<usize>> {
    if s1.size() != s2.size() || s1.signature() != s2.signature() {
        return None;
    }
    let n = s1.size();
    let (c1, c2) = (colours(s1), colours(s2));
    if colour_histogram(&c1) != colour_histogram(&c2) {
        return None;
    }
    let mut phi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        s1: &FiniteAlgebra,
        s2: &FiniteAlgebra,
        c1: &[usize],
        c2: &[usize],
        x: usize,
        phi: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = s1.size();
        if x == n {
            return s1.is_homomorphism(s2, phi).unwrap_or(false);
        }
        for y in 0..n {
            if used[y] || c1[x] != c2[y] {
                continue;
            }
            phi[x] = y;
            used[y] = true;
            if consistent(s1, s2, phi, x) && go(s1, s2, c1, c2, x + 1, phi, used) {
                return true;
            }
            phi[x] = usize::MAX;
            used[y] = false;
        }
        false
    }
    if go(s1, s2, &c1, &c2, 0, &mut phi, &mut used) {
        Some(phi)
    } else {
        None
    }
}

pub fn is_isomorphic(s1: &FiniteAlgebra, s2: &FiniteAlgebra) -> bool {
    find_isomorphism(s1, s2).is_some()
}

/// The copy of `alg` with element `x` renamed to `perm[x]`.
pub fn relabel(alg: &FiniteAlgebra, perm: &[usize]) -> Result<FiniteAlgebra> {
    let n = alg.size();
    let mut inv = vec![0; n];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    let mut ops = Vec::new();
    let mut args = Vec::new();
    for (op, sym) in alg.signature().iter().enumerate() {
        let len = alg.table(op).len();
        args.resize(sym.arity, 0);
        let mut table = Vec::with_capacity(len);
        for r in 0..len {
            unrank(r, n, sym.arity, &mut args);
            for a in args.iter_mut() {
                *a = inv[*a];
            }
            table.push(perm[alg.apply(op, &args)]);
        }
        ops.push((sym.name.clone(), sym.arity, table));
    }
    FiniteAlgebra::new(alg.name(), n, ops)
}

fn flat_table(alg: &FiniteAlgebra) -> Vec<usize> {
    (0..alg.num_ops())
        .flat_map(|op| alg.table(op).iter().copied())
        .collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Relabelling with the lexicographically least concatenated table (sizes up to `CANONICAL_LIMIT`).
pub fn canonical_form(alg: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    let n = alg.size();
    if n > CANONICAL_LIMIT {
        return Ok(alg.clone());
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = alg.clone();
    let mut best_table = flat_table(alg);
    while next_permutation(&mut perm) {
        let cand = relabel(alg, &perm)?;
        let t = flat_table(&cand);
        if t < best_table {
            best_table = t;
            best = cand;
        }
    }
    Ok(best)
}

/// Rebuilds a member from its provenance.
pub fn replay(a: &FiniteAlgebra, prov: &Provenance, budget: &Budget) -> Result<FiniteAlgebra> {
    let p = a.power(prov.power, budget)?;
    let gens: Vec<usize> = prov.generators.iter().map(|t| rank(t, a.size())).collect();
    let sub = p.subuniverse_closure(&gens)?;
    let (b, _) = p.subalgebra(&sub)?;
    Ok(b.quotient(&prov.congruence)?.0)
}

struct Candidate {
    algebra: FiniteAlgebra,
    provenance: Provenance,
}

/// Quotients of subalgebras of `A^k`, `k ≤ max_power`, of size at most `max_size`.
pub fn enumerate_members(a: &FiniteAlgebra, opts: &CatalogOptions) -> Result<Catalog> {
    if opts.max_power == 0 {
        return Err(Error::InvalidArgument(
            "max power must be at least 1".into(),
        ));
    }
    let n = a.size();
    let mut status = Exhaustion::Complete;
    let mut warnings = Vec::new();
    let mut candidates: Vec<Candidate> = Vec::new();
    for k in 1..=opts.max_power {
        let p = match a.power(k, &opts.budget) {
            Ok(p) => p,
            Err(e) if e.is_budget() => {
                status = Exhaustion::Truncated;
                warnings.push(format!("power {k} skipped: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let size = p.size();
        let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
        for g in 1..=opts.max_generators.min(size) {
            let mut combo: Vec<usize> = (0..g).collect();
            loop {
                subsets.push(combo.clone());
                let Some(i) = (0..g).rev().find(|&i| combo[i] < size - g + i) else {
                    break;
                };
                combo[i] += 1;
                for j in i + 1..g {
                    combo[j] = combo[j - 1] + 1;
                }
            }
        }
        let closures = par::map(&subsets, |s| p.subuniverse_closure(s));
        // first generating set for each subuniverse
        let mut subs: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (s, c) in subsets.into_iter().zip(closures) {
            let c = c?;
            if c.is_empty() {
                continue;
            }
            subs.entry(c).or_insert(s);
        }
        let subs: Vec<(Vec<usize>, Vec<usize>)> = subs.into_iter().collect();
        let found = par::map(
            &subs,
            |(elems, gens)| -> Result<(Vec<Candidate>, Option<String>)> {
                let (b, _) = p.subalgebra(elems)?;
                let lattice = match congruence_lattice(&b, &opts.budget) {
                    Ok(l) => l,
                    Err(e) if e.is_budget() => {
                        return Ok((
                            Vec::new(),
                            Some(format!(
                                "congruences of a subuniverse of size {}: {e}",
                                elems.len()
                            )),
                        ))
                    }
                    Err(e) => return Err(e),
                };
                let mut out = Vec::new();
                for theta in lattice {
                    if theta.num_blocks() > opts.max_size {
                        continue;
                    }
                    let (q, _) = b.quotient(&theta)?;
                    out.push(Candidate {
                        algebra: q,
                        provenance: Provenance {
                            power: k,
                            generators: gens
                                .iter()
                                .map(|&g| {
                                    let mut t = vec![0; k];
                                    unrank(g, n, k, &mut t);
                                    t
                                })
                                .collect(),
                            subuniverse_size: elems.len(),
                            congruence: theta,
                        },
                    });
                }
                Ok((out, None))
            },
        );
        for f in found {
            let (mut c, warn) = f?;
            if let Some(w) = warn {
                status = Exhaustion::Truncated;
                warnings.push(w);
            }
            candidates.append(&mut c);
        }
    }
    // serial dedup in discovery order
    let mut kept: Vec<Candidate> = Vec::new();
    for c in candidates {
        if !kept.iter().any(|k| is_isomorphic(&k.algebra, &c.algebra)) {
            kept.push(c);
        }
    }
    let mut entries = kept
        .into_iter()
        .map(|c| -> Result<(Vec<usize>, Candidate)> {
            let canon = canonical_form(&c.algebra)?;
            let key = flat_table(&canon);
            Ok((
                key,
                Candidate {
                    algebra: canon,
                    ..c
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|x, y| {
        x.1.algebra
            .size()
            .cmp(&y.1.algebra.size())
            .then_with(|| x.0.cmp(&y.0))
    });
    let members = entries
        .into_iter()
        .enumerate()
        .map(|(i, (_, c))| -> Result<CatalogEntry> {
            let name = format!("{}-m{i}", a.name());
            let algebra = c.algebra.with_name(name.clone());
            Ok(CatalogEntry {
                size: algebra.size(),
                si: si_check(&algebra)?,
                nilpotence: nilpotence_class(&algebra)?,
                algebra,
                name,
                provenance: c.provenance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Catalog {
        algebra: a.name().to_string(),
        options: opts.clone(),
        status,
        members,
        warnings,
    })
}

/// The subdirectly irreducible members only.
pub fn enumerate_si(a: &FiniteAlgebra, opts: &CatalogOptions) -> Result<Catalog> {
    let mut cat = enumerate_members(a, opts)?;
    cat.members.retain(|e| e.is_si());
    Ok(cat)
}

#[derive(Serialize)]
struct Manifest<'a> {
    algebra: &'a str,
    options: &'a CatalogOptions,
    status: Exhaustion,
    warnings: &'a [String],
    entries: Vec<ManifestEntry<'a>>,
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    file: String,
    #[serde(flatten)]
    entry: &'a CatalogEntry,
}

/// Writes one algebra file per entry plus `manifest.json` into `dir`; returns the manifest path.
pub fn write_catalog(cat: &Catalog, dir: &Path) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for e in &cat.members {
        let file = format!("{}.json", e.name);
        std::fs::write(dir.join(&file), e.algebra.to_json())?;
        entries.push(ManifestEntry { file, entry: e });
    }
    let manifest = Manifest {
        algebra: &cat.algebra,
        options: &cat.options,
        status: cat.status,
        warnings: &cat.warnings,
        entries,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::principal_congruence;
    use crate::corpus;

    #[test]
    fn iso_examples() {
        let z4 = corpus::z4();
        assert!(!is_isomorphic(&z4, &corpus::z2x2()));
        assert!(is_isomorphic(&z4, &z4));
        let (q, _) = z4
            .quotient(&principal_congruence(&z4, 0, 2).unwrap())
            .unwrap();
        assert!(is_isomorphic(&corpus::z2(), &q));
        let perm = [3, 1, 0, 2, 7, 6, 5, 4];
        let d4 = corpus::d4();
        let moved = relabel(&d4, &perm).unwrap();
        let phi = find_isomorphism(&d4, &moved).unwrap();
        assert!(d4.is_homomorphism(&moved, &phi).unwrap());
        assert_eq!(
            flat_table(&canonical_form(&d4).unwrap()),
            flat_table(&canonical_form(&moved).unwrap())
        );
    }

    #[test]
    fn z2_variety() {
        let cat = enumerate_si(&corpus::z2(), &CatalogOptions::default()).unwrap();
        assert_eq!(cat.members.len(), 1);
        assert!(is_isomorphic(&cat.members[0].algebra, &corpus::z2()));
    }

    #[test]
    fn z4_variety() {
        let a = corpus::z4();
        let opts = CatalogOptions::default();
        let all = enumerate_members(&a, &opts).unwrap();
        let si = enumerate_si(&a, &opts).unwrap();
        let sizes: Vec<usize> = si.members.iter().map(|e| e.size).collect();
        assert_eq!(sizes, vec![2, 4]);
        assert!(all.members.iter().any(|e| !e.is_si() && e.size > 1));
        for e in &all.members {
            let again = replay(&a, &e.provenance, &opts.budget).unwrap();
            assert!(is_isomorphic(&again, &e.algebra), "{}", e.name);
        }
        for (i, x) in all.members.iter().enumerate() {
            for y in &all.members[i + 1..] {
                assert!(!is_isomorphic(&x.algebra, &y.algebra));
            }
        }
    }

    #[test]
    fn size_one_cap_is_empty() {
        let opts = CatalogOptions {
            max_size: 1,
            ..CatalogOptions::default()
        };
        assert!(enumerate_si(&corpus::z4(), &opts)
            .unwrap()
            .members
            .is_empty());
    }

    #[test]
    fn manifest_is_written() {
        let dir = tempfile::tempdir().unwrap();
        let cat = enumerate_si(&corpus::z2(), &CatalogOptions::default()).unwrap();
        let path = write_catalog(&cat, dir.path()).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let file = v["entries"][0]["file"].as_str().unwrap();
        let alg = FiniteAlgebra::load(dir.path().join(file)).unwrap();
        assert_eq!(alg.size(), 2);
    }
}
