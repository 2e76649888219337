//! Refinement pairs, local homology refutations of stratum equivalences,
//! homogeneity, and side-by-side invariance reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::chains::{build_complex_variant, Ring, Variant};
use crate::complex::{
    check_stratified_map, coarsening, Coarsening, FilteredComplex, Simplex, StratifiedMapDescriptor, StratumId,
    VertexIdx,
};
use crate::error::Result;
use crate::homology::{homology, HomologyGroup};
use crate::linalg::{modp_rank, SparseMatrix};
use crate::perversity::{
    check_k_perversity, pullback, pushforward, EquivalenceDeclaration, KPerversityReport, Perversity,
};

/// A stratification `fine` refining `coarse` on the same simplices.
#[derive(Clone, Debug)]
pub struct RefinementPair {
    pub fine: FilteredComplex,
    pub coarse: FilteredComplex,
    pub coarsening: Coarsening,
    pub correspondence: BTreeMap<StratumId, StratumId>,
    /// Fine strata with the dimension of their coarse stratum.
    pub sources: Vec<StratumId>,
}

pub fn check_refinement(fine: &FilteredComplex, coarse: &FilteredComplex) -> Result<RefinementPair> {
    let c = coarsening(fine, coarse)?;
    let correspondence = c
        .stratum_map
        .iter()
        .enumerate()
        .map(|(s, &t)| (fine.strata().get(s).id.clone(), coarse.strata().get(t).id.clone()))
        .collect();
    let sources = (0..c.is_source.len())
        .filter(|&s| c.is_source[s])
        .map(|s| fine.strata().get(s).id.clone())
        .collect();
    Ok(RefinementPair {
        fine: fine.clone(),
        coarse: coarse.clone(),
        coarsening: c,
        correspondence,
        sources,
    })
}

/// Local homology over F_2 at a vertex, degree by degree from 0 to the
/// formal dimension: `H_k(|X|, |X| ∖ v) ≅ H̃_{k-1}(lk v)`.
pub fn local_homology_f2(x: &FilteredComplex, v: VertexIdx) -> Vec<usize> {
    let link = x.link(&Simplex::vertex(v));
    let reduced = reduced_betti_f2(&link);
    (0..=x.formal_dim()).map(|k| reduced.get(k).copied().unwrap_or(0)).collect()
}

/// Reduced F_2 Betti numbers of a simplicial complex given by all its
/// simplices, indexed from dimension -1.
fn reduced_betti_f2(simplices: &[Simplex]) -> Vec<usize> {
    let top = simplices.iter().map(|s| s.len()).max().unwrap_or(0);
    // by_len[j] holds the simplices with j vertices; j = 0 is the empty one.
    let mut by_len: Vec<Vec<&Simplex>> = vec![Vec::new(); top + 1];
    for s in simplices {
        by_len[s.len()].push(s);
    }
    for level in &mut by_len {
        level.sort();
        level.dedup();
    }
    let counts: Vec<usize> = (0..=top).map(|j| if j == 0 { 1 } else { by_len[j].len() }).collect();
    // rank[j] = rank of the boundary from length j to length j - 1.
    let mut rank = vec![0; top + 2];
    for j in 1..=top {
        let index: BTreeMap<&Simplex, u32> = by_len[j - 1].iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        let cols = by_len[j]
            .iter()
            .map(|s| {
                if j == 1 {
                    vec![(0u32, 1i64)]
                } else {
                    let mut c: Vec<(u32, i64)> = s.boundary().map(|(_, f)| (index[&f], 1)).collect();
                    c.sort_unstable();
                    c
                }
            })
            .collect();
        rank[j] = modp_rank(2, &SparseMatrix::new(counts[j - 1], cols));
    }
    (0..=top).map(|j| counts[j] - rank[j] - rank[j + 1]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Refutation {
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefutationReport {
    pub verdict: Refutation,
    /// Local homology signatures found at the vertices of each stratum.
    pub first: BTreeSet<Vec<usize>>,
    pub second: BTreeSet<Vec<usize>>,
}

fn signatures(x: &FilteredComplex, stratum: usize) -> BTreeSet<Vec<usize>> {
    x.strata()
        .get(stratum)
        .simplices
        .iter()
        .filter(|s| s.len() == 1)
        .map(|s| local_homology_f2(x, s.vertices()[0]))
        .collect()
}

/// Refutes `S ∼ S'` when no vertex of one has the local homology of a vertex
/// of the other. Never confirms.
pub fn equivalence_refutation(x: &FilteredComplex, s: &StratumId, t: &StratumId) -> Result<RefutationReport> {
    let find = |id: &StratumId| {
        x.strata()
            .index(id)
            .ok_or_else(|| crate::Error::UnknownStratumInEquiv(id.to_string()))
    };
    let (a, b) = (find(s)?, find(t)?);
    let (first, second) = (signatures(x, a), signatures(x, b));
    let verdict = if first.is_disjoint(&second) {
        Refutation::Refuted
    } else {
        Refutation::Unknown
    };
    Ok(RefutationReport {
        verdict,
        first,
        second,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogeneityReport {
    /// No singular stratum is declared equivalent to a regular one.
    pub homogeneous: bool,
    /// Every singular stratum declared equivalent to a regular one has
    /// `p̄(S) <= codim S - 2`.
    pub p_homogeneous: bool,
    /// Declared singular/regular pairs.
    pub pairs: Vec<(StratumId, StratumId)>,
    pub violations: Vec<String>,
}

pub fn check_homogeneous(
    x: &FilteredComplex,
    p: &Perversity,
    equiv: &EquivalenceDeclaration,
) -> Result<HomogeneityReport> {
    let class = equiv.classes(x)?;
    let pv = p.on(x)?;
    let st = x.strata();
    let mut pairs = Vec::new();
    let mut violations = Vec::new();
    for s in st.singular() {
        let mut near_regular = false;
        for r in (0..st.len()).filter(|&r| st.get(r).regular && class[r] == class[s]) {
            pairs.push((st.get(s).id.clone(), st.get(r).id.clone()));
            near_regular = true;
        }
        let top = st.get(s).codim as i64 - 2;
        if near_regular && pv[s] > top {
            violations.push(format!("p({})={} > {}", st.get(s).id, pv[s], top));
        }
    }
    Ok(HomogeneityReport {
        homogeneous: pairs.is_empty(),
        p_homogeneous: violations.is_empty(),
        pairs,
        violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Match,
    /// Hypotheses hold but the groups differ.
    Mismatch,
    NoClaimAgree,
    NoClaimMismatch,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
            Verdict::NoClaimAgree => "no-claim (agree)",
            Verdict::NoClaimMismatch => "no-claim (mismatch consistent)",
        })
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub k_perversity: KPerversityReport,
    /// The coarse perversity is the pushforward of the fine one.
    pub pushforward_matches: bool,
    /// Fine singular strata of codimension 1 that become regular.
    pub codim_one_regularized: Vec<StratumId>,
    pub homogeneity: HomogeneityReport,
    pub standard_hypotheses: bool,
    pub tame_hypotheses: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonSection {
    pub ring: Ring,
    pub variant: Variant,
    pub fine: Vec<HomologyGroup>,
    pub coarse: Vec<HomologyGroup>,
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub fine: String,
    pub coarse: String,
    pub perversity_fine: BTreeMap<StratumId, i64>,
    pub perversity_coarse: BTreeMap<StratumId, i64>,
    pub transcript: Transcript,
    pub sections: Vec<ComparisonSection>,
}

impl InvarianceReport {
    pub fn section(&self, ring: Ring, variant: Variant) -> Option<&ComparisonSection> {
        self.sections.iter().find(|s| s.ring == ring && s.variant == variant)
    }

    pub fn all_match(&self) -> bool {
        self.sections.iter().all(|s| s.verdicts.iter().all(|v| *v == Verdict::Match))
    }
}

/// Compares fine and coarse homology. The fine perversity is the pullback
/// of `p_coarse` unless `fine_override` replaces it.
pub fn invariance_report(
    pair: &RefinementPair,
    p_coarse: &Perversity,
    fine_override: Option<&Perversity>,
    rings: &[Ring],
    variants: &[Variant],
) -> Result<InvarianceReport> {
    let (fine, coarse) = (&pair.fine, &pair.coarse);
    let p_fine = match fine_override {
        Some(p) => {
            p.on(fine)?;
            p.clone()
        }
        None => pullback(&StratifiedMapDescriptor::identity(fine, coarse), p_coarse)?,
    };
    p_coarse.on(coarse)?;
    let c = &pair.coarsening;
    let equiv = EquivalenceDeclaration::from_coarsening(fine, c);
    let k = check_k_perversity(fine, &p_fine, &equiv, Some(c))?;
    let mut notes = vec!["equivalences taken as: same coarse stratum".to_string()];
    let pushforward_matches = match pushforward(fine, coarse, c, &p_fine) {
        Ok(q) => q.on(coarse)? == p_coarse.on(coarse)?,
        Err(e) => {
            notes.push(format!("pushforward failed: {e}"));
            false
        }
    };
    let codim_one_regularized: Vec<StratumId> = (0..c.stratum_map.len())
        .filter(|&s| {
            let st = fine.strata().get(s);
            !st.regular && st.codim == 1 && coarse.strata().get(c.stratum_map[s]).regular
        })
        .map(|s| fine.strata().get(s).id.clone())
        .collect();
    let homogeneity = check_homogeneous(fine, &p_fine, &equiv)?;
    let standard_hypotheses = k.pass && pushforward_matches;
    let tame_hypotheses = standard_hypotheses && codim_one_regularized.is_empty() && homogeneity.p_homogeneous;
    if !k.pass {
        notes.push("K-perversity conditions fail; no isomorphism is claimed".into());
    }
    if !pushforward_matches {
        notes.push("coarse perversity is not the pushforward of the fine one".into());
    }
    let mut sections = Vec::new();
    for &variant in variants {
        let claimed = match variant {
            Variant::Intersection => standard_hypotheses,
            Variant::Tame => tame_hypotheses,
        };
        for &ring in rings {
            let hf = homology(&build_complex_variant(fine, &p_fine, ring, variant)?, false)?;
            let hc = homology(&build_complex_variant(coarse, p_coarse, ring, variant)?, false)?;
            let n = hf.len().max(hc.len());
            let zero = HomologyGroup::zero(ring);
            let verdicts = (0..n)
                .map(|d| {
                    let same = hf.get(d).unwrap_or(&zero) == hc.get(d).unwrap_or(&zero);
                    match (claimed, same) {
                        (true, true) => Verdict::Match,
                        (true, false) => Verdict::Mismatch,
                        (false, true) => Verdict::NoClaimAgree,
                        (false, false) => Verdict::NoClaimMismatch,
                    }
                })
                .collect();
            sections.push(ComparisonSection {
                ring,
                variant,
                fine: hf,
                coarse: hc,
                verdicts,
            });
        }
    }
    Ok(InvarianceReport {
        fine: fine.name().to_string(),
        coarse: coarse.name().to_string(),
        perversity_fine: p_fine.values().clone(),
        perversity_coarse: p_coarse.values().clone(),
        transcript: Transcript {
            k_perversity: k,
            pushforward_matches,
            codim_one_regularized,
            homogeneity,
            standard_hypotheses,
            tame_hypotheses,
            notes,
        },
        sections,
    })
}

/// The identity of a refinement pair as a stratified map, checked.
pub fn refinement_map(pair: &RefinementPair) -> Result<BTreeMap<StratumId, StratumId>> {
    Ok(check_stratified_map(&StratifiedMapDescriptor::identity(&pair.fine, &pair.coarse))?.stratum_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::complex::tests::raw;
    use crate::Error;

    fn octahedron(pole: i64) -> FilteredComplex {
        let mut r = raw(
            "s2",
            2,
            &[("n", pole), ("s", 2), ("e1", 2), ("e2", 2), ("e3", 2), ("e4", 2)],
            &[],
        );
        for p in ["n", "s"] {
            for (a, b) in [("e1", "e2"), ("e2", "e3"), ("e3", "e4"), ("e1", "e4")] {
                r.simplices.push(vec![p.into(), a.into(), b.into()]);
            }
        }
        build_complex(&r).unwrap()
    }

    #[test]
    fn refinements() {
        let (fine, coarse) = (octahedron(0), octahedron(2));
        let pair = check_refinement(&fine, &coarse).unwrap();
        assert_eq!(pair.sources, vec![StratumId::from("S2.0")]);
        assert!(matches!(check_refinement(&coarse, &fine), Err(Error::NotARefinement(_))));
        let same = check_refinement(&fine, &fine).unwrap();
        assert_eq!(same.sources.len(), fine.strata().len());
        assert!(same.correspondence.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn local_homology() {
        let x = octahedron(0);
        let n = x.vertex_index("n").unwrap();
        assert_eq!(local_homology_f2(&x, n), vec![0, 0, 1]);
        let r = equivalence_refutation(&x, &"S0.0".into(), &"S2.0".into()).unwrap();
        assert_eq!(r.verdict, Refutation::Unknown);
    }

    #[test]
    fn homogeneity() {
        let x = octahedron(0);
        let eq = EquivalenceDeclaration::new(vec![("S0.0".into(), "S2.0".into())]);
        let r = check_homogeneous(&x, &Perversity::constant(&x, 0), &eq).unwrap();
        assert!(!r.homogeneous && r.p_homogeneous);
        let r = check_homogeneous(&x, &Perversity::constant(&x, 1), &eq).unwrap();
        assert!(!r.p_homogeneous);
        let none = EquivalenceDeclaration::default();
        assert!(check_homogeneous(&x, &Perversity::constant(&x, 1), &none).unwrap().homogeneous);
        let bad = EquivalenceDeclaration::new(vec![("S0.0".into(), "S9.9".into())]);
        assert!(matches!(
            check_homogeneous(&x, &Perversity::zero(&x), &bad),
            Err(Error::UnknownStratumInEquiv(_))
        ));
    }

    #[test]
    fn pointed_sphere_report() {
        let pair = check_refinement(&octahedron(0), &octahedron(2)).unwrap();
        let coarse_p = Perversity::zero(&pair.coarse);
        let r = invariance_report(&pair, &coarse_p, None, &[Ring::Z], &[Variant::Intersection]).unwrap();
        assert!(r.all_match(), "{r:?}");
        let low = Perversity::constant(&pair.fine, -1);
        let r = invariance_report(&pair, &coarse_p, Some(&low), &[Ring::Z], &[Variant::Intersection]).unwrap();
        assert!(!r.transcript.k_perversity.nonnegative_near_regular.pass);
        assert_eq!(r.sections[0].verdicts[2], Verdict::NoClaimMismatch);
        assert_eq!(format!("{}", r.sections[0].verdicts[2]), "no-claim (mismatch consistent)");
    }
}
