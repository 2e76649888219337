//! Long exact sequences over a field: the pair sequence, Mayer-Vietoris for
//! covers by two full subcomplexes, and excision.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::fields::{field_homology, FieldHomology};
use crate::chains::{
    build_complex_variant, build_relative_complex, build_supported_complex, full_support, Cell,
    Ring, Variant,
};
use crate::complex::{FilteredComplex, VertexIdx};
use crate::constructors::{barycentric_subdivide, subdivision_perversity, transport_perversity};
use crate::error::{Error, Result};
use crate::linalg::{Field, Mat};
use crate::perversity::Perversity;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlotFailure {
    pub slot: usize,
    pub image_rank: usize,
    pub kernel_dim: usize,
    pub composite_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub exact: bool,
    /// Dimension of each term, starting after the leading zero.
    pub dims: Vec<usize>,
    pub failures: Vec<SlotFailure>,
}

/// Exactness of `0 → V_0 → V_1 → ... → V_m → 0`, where `maps[i]: V_i → V_{i+1}`.
pub fn check_exactness<F: Field>(maps: &[Mat<F>]) -> Result<ExactnessReport> {
    let Some(last) = maps.last() else {
        return Ok(ExactnessReport {
            exact: true,
            dims: Vec::new(),
            failures: Vec::new(),
        });
    };
    for (i, w) in maps.windows(2).enumerate() {
        if w[0].rows() != w[1].cols() {
            return Err(Error::ShapeMismatch(format!(
                "map {i} lands in dimension {} but map {} starts from {}",
                w[0].rows(),
                i + 1,
                w[1].cols()
            )));
        }
    }
    let mut dims: Vec<usize> = maps.iter().map(|m| m.cols()).collect();
    dims.push(last.rows());
    let ranks: Vec<usize> = maps.iter().map(|m| m.rank()).collect();
    let mut failures = Vec::new();
    for slot in 0..dims.len() {
        let image_rank = if slot == 0 { 0 } else { ranks[slot - 1] };
        let kernel_dim = if slot < maps.len() { dims[slot] - ranks[slot] } else { dims[slot] };
        let composite_zero = if slot == 0 || slot == maps.len() {
            true
        } else {
            maps[slot].mul(&maps[slot - 1])?.is_zero()
        };
        if image_rank != kernel_dim || !composite_zero {
            failures.push(SlotFailure {
                slot,
                image_rank,
                kernel_dim,
                composite_zero,
            });
        }
    }
    Ok(ExactnessReport {
        exact: failures.is_empty(),
        dims,
        failures,
    })
}

fn ring_for<F: Field>(field: &F) -> Ring {
    match field.characteristic() {
        0 => Ring::Z,
        p => Ring::Fp(p),
    }
}

fn same(c: &Cell) -> Option<Cell> {
    Some(c.clone())
}

/// Rewrites columns over `from` as columns over `to`; `f` sends a cell to its
/// image, or to zero with `None`.
fn move_cells<F: Field>(
    m: &Mat<F>,
    from: &[Cell],
    to: &[Cell],
    f: impl Fn(&Cell) -> Option<Cell>,
) -> Result<Mat<F>> {
    let index: BTreeMap<&Cell, usize> = to.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut out = Mat::zeros(&m.field, to.len(), m.cols());
    for (i, c) in from.iter().enumerate() {
        let target = f(c);
        for j in 0..m.cols() {
            let v = m.get(i, j);
            if m.field.is_zero(v) {
                continue;
            }
            let Some(t) = &target else { continue };
            let r = *index
                .get(t)
                .ok_or_else(|| Error::Internal("chain map leaves the target complex".into()))?;
            let sum = m.field.add(out.get(r, j), v);
            out.set(r, j, sum);
        }
    }
    Ok(out)
}

/// Matrix of the map `H_k(src) → H_l(tgt)` induced by a cell map.
fn induced<F: Field>(
    src: &FieldHomology<F>,
    k: usize,
    tgt: &FieldHomology<F>,
    l: usize,
    f: impl Fn(&Cell) -> Option<Cell>,
) -> Result<Mat<F>> {
    let (Some(sd), Some(td)) = (src.degrees.get(k), tgt.degrees.get(l)) else {
        return Ok(Mat::zeros(&src.field, tgt.dim(l), src.dim(k)));
    };
    let moved = move_cells(&sd.reps, &sd.ambient, &td.ambient, f)?;
    tgt.classify(l, &moved)
}

fn vstack<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    let mut out = Mat::zeros(&a.field, a.rows() + b.rows(), a.cols());
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            out.set(i, j, a.get(i, j).clone());
        }
        for i in 0..b.rows() {
            out.set(a.rows() + i, j, b.get(i, j).clone());
        }
    }
    out
}

fn negated<F: Field>(a: &Mat<F>) -> Mat<F> {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, a.field.neg(a.get(i, j)));
        }
    }
    out
}

fn range(a: usize, b: usize) -> Vec<usize> {
    (a..b).collect()
}

/// The sequence `... → H_k(L) → H_k(X) → H_k(X, L) → H_{k-1}(L) → ...` of a
/// full subcomplex, with relative groups taken from the mapping cone.
pub fn pair_sequence<F: Field>(
    x: &FilteredComplex,
    l: &FilteredComplex,
    p: &Perversity,
    field: &F,
    variant: Variant,
) -> Result<ExactnessReport> {
    let ring = ring_for(field);
    let support = full_support(x, l)?;
    let hx = field_homology(&build_complex_variant(x, p, ring, variant)?, field)?;
    let hl = field_homology(&build_supported_complex(x, &support, p, ring, variant)?, field)?;
    let hc = field_homology(&build_relative_complex(x, l, p, ring, variant)?, field)?;
    let mut maps = Vec::new();
    for k in (0..hc.degrees.len()).rev() {
        maps.push(induced(&hl, k, &hx, k, same)?);
        maps.push(induced(&hx, k, &hc, k, same)?);
        if k >= 1 {
            maps.push(induced(&hc, k, &hl, k - 1, |c| {
                c.shifted.then(|| Cell {
                    simplex: c.simplex.clone(),
                    shifted: false,
                })
            })?);
        }
    }
    check_exactness(&maps)
}

/// A cover by the full subcomplexes on two vertex sets.
pub type Cover = (BTreeSet<VertexIdx>, BTreeSet<VertexIdx>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MvAttempt {
    /// Number of barycentric subdivisions applied.
    pub level: usize,
    pub exact: bool,
    /// Every homology class of the whole splits along the cover.
    pub delta_defined: bool,
    /// `H(C(K') + C(K''))` maps isomorphically onto `H(K)`.
    pub sum_iso: bool,
    pub sequence: Option<ExactnessReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MvReport {
    pub attempts: Vec<MvAttempt>,
    /// First subdivision level at which the sequence is exact.
    pub exact_at: Option<usize>,
}

/// Mayer-Vietoris sequence of the cover returned by `cover`, retried on
/// successive barycentric subdivisions up to `bound`. Failure after the bound
/// is reported, not raised.
pub fn mayer_vietoris<F: Field>(
    x: &FilteredComplex,
    p: &Perversity,
    field: &F,
    variant: Variant,
    cover: &dyn Fn(&FilteredComplex) -> Result<Cover>,
    bound: usize,
) -> Result<MvReport> {
    let mut attempts = Vec::new();
    let mut cur = x.clone();
    let mut cur_p = p.clone();
    for level in 0..=bound {
        let a = mv_once(&cur, &cur_p, field, variant, &cover(&cur)?, level)?;
        let exact = a.exact;
        attempts.push(a);
        if exact {
            return Ok(MvReport {
                attempts,
                exact_at: Some(level),
            });
        }
        if level < bound {
            let next = barycentric_subdivide(&cur)?;
            cur_p = subdivision_perversity(&cur, &cur_p, &next)?;
            cur = next;
        }
    }
    Ok(MvReport {
        attempts,
        exact_at: None,
    })
}

fn check_cover(x: &FilteredComplex, (a, b): &Cover) -> Result<()> {
    for s in x.all_simplices() {
        let inside = |set: &BTreeSet<VertexIdx>| s.vertices().iter().all(|v| set.contains(v));
        if !inside(a) && !inside(b) {
            return Err(Error::NotFullSubcomplex(format!("cover misses {}", x.display(s))));
        }
    }
    Ok(())
}

fn mv_once<F: Field>(
    x: &FilteredComplex,
    p: &Perversity,
    field: &F,
    variant: Variant,
    cover: &Cover,
    level: usize,
) -> Result<MvAttempt> {
    check_cover(x, cover)?;
    let ring = ring_for(field);
    let (a, b) = cover;
    let both: BTreeSet<VertexIdx> = a.intersection(b).copied().collect();
    let hk = field_homology(&build_complex_variant(x, p, ring, variant)?, field)?;
    let ha = field_homology(&build_supported_complex(x, a, p, ring, variant)?, field)?;
    let hb = field_homology(&build_supported_complex(x, b, p, ring, variant)?, field)?;
    let hi = field_homology(&build_supported_complex(x, &both, p, ring, variant)?, field)?;
    let sum_iso = sum_is_iso(&hk, &ha, &hb)?;
    let mut maps = Vec::new();
    for k in (0..hk.degrees.len()).rev() {
        let to_a = induced(&hi, k, &ha, k, same)?;
        let to_b = induced(&hi, k, &hb, k, same)?;
        maps.push(vstack(&to_a, &to_b));
        let from_a = induced(&ha, k, &hk, k, same)?;
        let from_b = induced(&hb, k, &hk, k, same)?;
        maps.push(from_a.hstack(&negated(&from_b)));
        if k >= 1 {
            match connecting(&hk, &ha, &hb, &hi, k)? {
                Some(d) => maps.push(d),
                None => {
                    return Ok(MvAttempt {
                        level,
                        exact: false,
                        delta_defined: false,
                        sum_iso,
                        sequence: None,
                    })
                }
            }
        }
    }
    let report = check_exactness(&maps)?;
    Ok(MvAttempt {
        level,
        exact: report.exact && sum_iso,
        delta_defined: true,
        sum_iso,
        sequence: Some(report),
    })
}

/// `δ: H_k(K) → H_{k-1}(K' ∩ K'')`. Each representative is split as
/// `z = z' + z'' + ∂w`; `δ[z] = [∂z']`. `None` when some class does not split.
fn connecting<F: Field>(
    hk: &FieldHomology<F>,
    ha: &FieldHomology<F>,
    hb: &FieldHomology<F>,
    hi: &FieldHomology<F>,
    k: usize,
) -> Result<Option<Mat<F>>> {
    let dk = &hk.degrees[k];
    let ea = move_cells(&ha.degrees[k].chains, &ha.degrees[k].ambient, &dk.ambient, same)?;
    let eb = move_cells(&hb.degrees[k].chains, &hb.degrees[k].ambient, &dk.ambient, same)?;
    let system = ea.hstack(&eb).hstack(&dk.boundaries);
    let Some(sol) = system.solve(&dk.reps) else {
        return Ok(None);
    };
    let part_a = sol.select_rows(&range(0, ea.cols()));
    let bd = ha.degrees[k].images.mul(&part_a)?;
    let moved = move_cells(&bd, &ha.degrees[k - 1].ambient, &hi.degrees[k - 1].ambient, same)?;
    Ok(Some(hi.classify(k - 1, &moved)?))
}

/// Whether the sum of the two chain complexes inside `K` has the homology of
/// `K` through the inclusion.
fn sum_is_iso<F: Field>(hk: &FieldHomology<F>, ha: &FieldHomology<F>, hb: &FieldHomology<F>) -> Result<bool> {
    let n = hk.degrees.len();
    let mut sums = Vec::with_capacity(n);
    for k in 0..n {
        let dk = &hk.degrees[k];
        let ea = move_cells(&ha.degrees[k].chains, &ha.degrees[k].ambient, &dk.ambient, same)?;
        let eb = move_cells(&hb.degrees[k].chains, &hb.degrees[k].ambient, &dk.ambient, same)?;
        let joint = ea.hstack(&eb);
        let (_, piv) = joint.rref();
        sums.push(joint.select_cols(&piv));
    }
    for k in 0..n {
        let d = hk.degrees[k].differential.mul(&sums[k])?;
        let cycles = sums[k].mul(&d.kernel())?;
        let boundary_rank = match sums.get(k + 1) {
            Some(next) => hk.degrees[k + 1].differential.mul(next)?.rank(),
            None => 0,
        };
        let h_sum = cycles.cols() - boundary_rank;
        let image = hk.classify(k, &cycles)?.rank();
        if h_sum != image || image != hk.dim(k) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExcisionReport {
    /// Dimensions of `H(X, B)`.
    pub whole: Vec<usize>,
    /// Dimensions of `H(A, A ∩ B)`.
    pub excised: Vec<usize>,
    /// The inclusion induces an isomorphism in every degree.
    pub iso: bool,
}

/// Compares `H(A, A ∩ B)` with `H(X, B)` for a cover of `x` by the full
/// subcomplexes on `a` and `b`.
pub fn excision<F: Field>(
    x: &FilteredComplex,
    p: &Perversity,
    field: &F,
    variant: Variant,
    cover: &Cover,
) -> Result<ExcisionReport> {
    check_cover(x, cover)?;
    let ring = ring_for(field);
    let (a, b) = cover;
    let both: BTreeSet<VertexIdx> = a.intersection(b).copied().collect();
    let same_id = |id: &str| vec![id.to_string()];
    let xb = x.full_subcomplex("B", b);
    let xa = x.full_subcomplex("A", a);
    let pa = transport_perversity(x, p, &xa, same_id, |_, _| None)?;
    let both_in_a: BTreeSet<VertexIdx> = both
        .iter()
        .map(|&v| xa.vertex_index(x.vertex_id(v)).expect("vertex of A"))
        .collect();
    let ab = xa.full_subcomplex("AB", &both_in_a);
    let whole = field_homology(&build_relative_complex(x, &xb, p, ring, variant)?, field)?;
    let excised = field_homology(&build_relative_complex(&xa, &ab, &pa, ring, variant)?, field)?;
    let mut iso = true;
    for k in 0..whole.degrees.len().max(excised.degrees.len()) {
        let m = induced(&excised, k, &whole, k, |c| {
            x.translate(&xa, &c.simplex).map(|s| Cell {
                simplex: s,
                shifted: c.shifted,
            })
        })?;
        if m.rank() != whole.dim(k) || m.rank() != excised.dim(k) {
            iso = false;
        }
    }
    Ok(ExcisionReport {
        whole: (0..whole.degrees.len()).map(|k| whole.dim(k)).collect(),
        excised: (0..excised.degrees.len()).map(|k| excised.dim(k)).collect(),
        iso,
    })
}

/// Closed star of `apex` against everything but `apex`.
pub fn radial_cover(x: &FilteredComplex, apex: &str) -> Result<Cover> {
    let w = x
        .vertex_index(apex)
        .ok_or_else(|| Error::UnknownSimplex(format!("{{{apex}}}")))?;
    let mut star = BTreeSet::from([w]);
    for e in x.cells(1) {
        if e.contains(w) {
            star.extend(e.vertices().iter().copied());
        }
    }
    let rest = (0..x.num_vertices() as VertexIdx).filter(|&v| v != w).collect();
    Ok((star, rest))
}

/// Vertex ids of the original complex underlying a (possibly iterated)
/// barycenter id such as `{{a},{a,b}}`.
pub fn base_support(id: &str) -> BTreeSet<String> {
    id.split(['{', '}', ','])
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Cover by the vertices lying over the given sets of original vertices.
pub fn support_cover(x: &FilteredComplex, a: &BTreeSet<String>, b: &BTreeSet<String>) -> Cover {
    let over = |set: &BTreeSet<String>| {
        (0..x.num_vertices() as VertexIdx)
            .filter(|&v| base_support(x.vertex_id(v)).is_subset(set))
            .collect()
    };
    (over(a), over(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::complex::tests::raw;
    use crate::constructors::cone;
    use crate::linalg::{PrimeField, Rationals};

    fn circle(n: usize) -> FilteredComplex {
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let verts: Vec<(&str, i64)> = ids.iter().map(|s| (s.as_str(), 1)).collect();
        let edges: Vec<Vec<&str>> = (0..n).map(|i| vec![ids[i].as_str(), ids[(i + 1) % n].as_str()]).collect();
        let edges: Vec<&[&str]> = edges.iter().map(|e| e.as_slice()).collect();
        build_complex(&raw("c", 1, &verts, &edges)).unwrap()
    }

    #[test]
    fn exactness_of_small_sequences() {
        let f = PrimeField::new(2).unwrap();
        let id = Mat::identity(&f, 2);
        assert!(check_exactness(&[id.clone()]).unwrap().exact);
        let zero = Mat::zeros(&f, 2, 2);
        let r = check_exactness(&[zero]).unwrap();
        assert!(!r.exact);
        assert_eq!(r.failures.len(), 2);
        let bad = check_exactness(&[id, Mat::zeros(&f, 3, 3)]);
        assert!(matches!(bad, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn pair_sequence_of_cone_and_base() {
        let c = cone(&circle(3)).unwrap();
        let base: BTreeSet<VertexIdx> = ["0", "1", "2"].iter().map(|v| c.vertex_index(v).unwrap()).collect();
        let l = c.full_subcomplex("base", &base);
        for k in -1..4 {
            let p = Perversity::constant(&c, k);
            for v in [Variant::Intersection, Variant::Tame] {
                assert!(pair_sequence(&c, &l, &p, &Rationals, v).unwrap().exact);
                assert!(pair_sequence(&c, &l, &p, &PrimeField::new(2).unwrap(), v).unwrap().exact);
            }
        }
    }

    #[test]
    fn radial_mayer_vietoris() {
        let c = barycentric_subdivide(&cone(&circle(3)).unwrap()).unwrap();
        for k in -1..4 {
            let p = subdivision_perversity(
                &cone(&circle(3)).unwrap(),
                &Perversity::constant(&cone(&circle(3)).unwrap(), k),
                &c,
            )
            .unwrap();
            let r = mayer_vietoris(&c, &p, &PrimeField::new(2).unwrap(), Variant::Intersection, &|x| radial_cover(x, "{w}"), 1)
                .unwrap();
            assert_eq!(r.exact_at, Some(0), "p = {k}: {r:?}");
        }
    }

    #[test]
    fn excision_on_the_cone() {
        let base = cone(&circle(3)).unwrap();
        let c = barycentric_subdivide(&base).unwrap();
        let cover = radial_cover(&c, "{w}").unwrap();
        for k in -1..4 {
            let p = subdivision_perversity(&base, &Perversity::constant(&base, k), &c).unwrap();
            let r = excision(&c, &p, &Rationals, Variant::Intersection, &cover).unwrap();
            assert!(r.iso, "p = {k}: {r:?}");
        }
    }
    #[test]
    fn half_cones_fail_only_at_the_middle_value() {
        let c = cone(&circle(6)).unwrap();
        let ids = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let (a, b) = (ids(&["w", "0", "1", "2", "3"]), ids(&["w", "3", "4", "5", "0"]));
        let f2 = PrimeField::new(2).unwrap();
        for k in -1..4 {
            let p = Perversity::constant(&c, k);
            let r = mayer_vietoris(&c, &p, &f2, Variant::Intersection, &|x| Ok(support_cover(x, &a, &b)), 1).unwrap();
            if k == 0 {
                assert_eq!(r.exact_at, None);
                assert!(r.attempts.iter().all(|t| !t.sum_iso));
            } else {
                assert_eq!(r.exact_at, Some(0));
            }
        }
    }
}
