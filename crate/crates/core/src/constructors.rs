//! Cones, suspensions, products, subdivision and disjoint unions, each with
//! its induced filtration, plus the matching transport of perversities.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{build_complex, FilteredComplex, RawComplex, RawVertex, Simplex, Stratum};
use crate::error::{Error, Result};
use crate::perversity::Perversity;

/// First id among `base`, `base'`, `base''`, ... not used by `x`.
fn fresh_id(x: &FilteredComplex, base: &str) -> String {
    let mut id = base.to_string();
    while x.vertex_index(&id).is_some() {
        id.push('\'');
    }
    id
}

fn shifted_vertices(x: &FilteredComplex, shift: usize) -> Vec<RawVertex> {
    x.vertex_ids()
        .iter()
        .zip(x.levels())
        .map(|(id, &l)| RawVertex {
            id: id.clone(),
            level: (l + shift) as i64,
        })
        .collect()
}

fn order_ids(x: &FilteredComplex) -> Vec<String> {
    x.staircase_order()
        .into_iter()
        .map(|v| x.vertex_id(v).to_string())
        .collect()
}

/// Cone with apex `w` on level 0; old levels move up by one.
pub fn cone(x: &FilteredComplex) -> Result<FilteredComplex> {
    let w = fresh_id(x, "w");
    cone_with_apexes(x, &[w], format!("cone({})", x.name()))
}

/// Two cones glued along `x`, with apexes `w+` and `w-`.
pub fn suspension(x: &FilteredComplex) -> Result<FilteredComplex> {
    if x.num_vertices() == 0 {
        return Err(Error::EmptyInput);
    }
    let apexes = [fresh_id(x, "w+"), fresh_id(x, "w-")];
    cone_with_apexes(x, &apexes, format!("susp({})", x.name()))
}

fn cone_with_apexes(x: &FilteredComplex, apexes: &[String], name: String) -> Result<FilteredComplex> {
    let mut vertices = shifted_vertices(x, 1);
    let mut simplices = Vec::new();
    let maximal = x.maximal_simplices();
    for w in apexes {
        vertices.push(RawVertex {
            id: w.clone(),
            level: 0,
        });
        simplices.push(vec![w.clone()]);
        for s in &maximal {
            let mut ids = x.simplex_ids(s);
            ids.push(w.clone());
            simplices.push(ids);
        }
    }
    let mut order: Vec<String> = apexes.to_vec();
    order.extend(order_ids(x));
    build_complex(&RawComplex {
        name,
        formal_dim: x.formal_dim() + 1,
        vertices,
        simplices,
        vertex_order: Some(order),
    })
}

pub fn product_interval(x: &FilteredComplex, m: usize) -> Result<FilteredComplex> {
    if m < 1 {
        return Err(Error::MTooSmall(m));
    }
    staircase(x, m + 1, false, format!("{}xI", x.name()))
}

pub fn product_circle(x: &FilteredComplex, m: usize) -> Result<FilteredComplex> {
    if m < 3 {
        return Err(Error::MTooSmall(m));
    }
    staircase(x, m, true, format!("{}xS1", x.name()))
}

fn product_id(v: &str, t: usize) -> String {
    format!("{v}|{t}")
}

/// Staircase triangulation of `x` times a path (or cycle) on `points`
/// vertices, following the recorded vertex order of `x`.
fn staircase(x: &FilteredComplex, points: usize, closed: bool, name: String) -> Result<FilteredComplex> {
    let order = x.staircase_order();
    let rank: BTreeMap<_, _> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut vertices = Vec::with_capacity(x.num_vertices() * points);
    for &v in &order {
        for t in 0..points {
            vertices.push(RawVertex {
                id: product_id(x.vertex_id(v), t),
                level: (x.level(v) + 1) as i64,
            });
        }
    }
    let segments = if closed { points } else { points - 1 };
    let mut simplices = Vec::new();
    for s in x.maximal_simplices() {
        let mut vs = s.vertices().to_vec();
        vs.sort_by_key(|v| rank[v]);
        for t in 0..segments {
            let u = (t + 1) % points;
            for j in 0..vs.len() {
                let mut ids: Vec<String> = vs[..=j].iter().map(|&v| product_id(x.vertex_id(v), t)).collect();
                ids.extend(vs[j..].iter().map(|&v| product_id(x.vertex_id(v), u)));
                simplices.push(ids);
            }
        }
    }
    let vertex_order = vertices.iter().map(|v| v.id.clone()).collect();
    build_complex(&RawComplex {
        name,
        formal_dim: x.formal_dim() + 1,
        vertices,
        simplices,
        vertex_order: Some(vertex_order),
    })
}

/// Id of the barycenter of a simplex: `{a,b,c}`.
pub fn barycenter_id(x: &FilteredComplex, s: &Simplex) -> String {
    format!("{{{}}}", x.simplex_ids(s).join(","))
}

/// Barycentric subdivision. Barycenters sit on the level of their simplex.
pub fn barycentric_subdivide(x: &FilteredComplex) -> Result<FilteredComplex> {
    let mut all: Vec<&Simplex> = x.all_simplices().collect();
    all.sort_by_key(|s| s.len());
    let vertices = all
        .iter()
        .map(|s| RawVertex {
            id: barycenter_id(x, s),
            level: x.simplex_level(s) as i64,
        })
        .collect::<Vec<_>>();
    let vertex_order = vertices.iter().map(|v| v.id.clone()).collect();
    let mut simplices = Vec::new();
    for s in x.maximal_simplices() {
        flags(x, &s, &mut Vec::new(), &mut simplices);
    }
    build_complex(&RawComplex {
        name: format!("sd({})", x.name()),
        formal_dim: x.formal_dim(),
        vertices,
        simplices,
        vertex_order: Some(vertex_order),
    })
}

/// Maximal flags below `s`, pushed as lists of barycenter ids.
fn flags(x: &FilteredComplex, s: &Simplex, above: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    above.push(barycenter_id(x, s));
    if s.len() == 1 {
        out.push(above.clone());
    } else {
        for (_, f) in s.boundary() {
            flags(x, &f, above, out);
        }
    }
    above.pop();
}

pub fn disjoint_union(x: &FilteredComplex, y: &FilteredComplex) -> Result<FilteredComplex> {
    if x.formal_dim() != y.formal_dim() {
        return Err(Error::DimMismatch(x.formal_dim(), y.formal_dim()));
    }
    let mut vertices = Vec::new();
    let mut simplices = Vec::new();
    let mut order = Vec::new();
    for (prefix, z) in [("x.", x), ("y.", y)] {
        for (id, &l) in z.vertex_ids().iter().zip(z.levels()) {
            vertices.push(RawVertex {
                id: format!("{prefix}{id}"),
                level: l as i64,
            });
        }
        for s in z.maximal_simplices() {
            simplices.push(z.simplex_ids(&s).iter().map(|id| format!("{prefix}{id}")).collect());
        }
        order.extend(order_ids(z).into_iter().map(|id| format!("{prefix}{id}")));
    }
    build_complex(&RawComplex {
        name: format!("{}+{}", x.name(), y.name()),
        formal_dim: x.formal_dim(),
        vertices,
        simplices,
        vertex_order: Some(order),
    })
}

/// Carries `p` from `src` to `dst`. Each vertex of `dst` names a set of
/// vertices of `src`; a stratum of `dst` takes the value of the stratum of
/// `src` holding the image of one of its simplices. Strata with an empty
/// image ask `fallback`.
pub fn transport_perversity(
    src: &FilteredComplex,
    p: &Perversity,
    dst: &FilteredComplex,
    vertex_map: impl Fn(&str) -> Vec<String>,
    fallback: impl Fn(&FilteredComplex, &Stratum) -> Option<i64>,
) -> Result<Perversity> {
    let pv = p.on(src)?;
    let mut values = BTreeMap::new();
    for st in dst.strata().iter() {
        if st.regular {
            continue;
        }
        let s = &st.simplices[0];
        let mut image = BTreeSet::new();
        for &v in s.vertices() {
            for id in vertex_map(dst.vertex_id(v)) {
                let u = src
                    .vertex_index(&id)
                    .ok_or_else(|| Error::Internal(format!("no vertex `{id}` in `{}`", src.name())))?;
                image.insert(u);
            }
        }
        let value = if image.is_empty() {
            fallback(dst, st).ok_or_else(|| Error::MissingValue(st.id.to_string()))?
        } else {
            let t = Simplex::new(image.into_iter().collect());
            let k = src
                .stratum_of(&t)
                .ok_or_else(|| Error::Internal(format!("image {} is not a simplex", src.display(&t))))?;
            pv[k]
        };
        values.insert(st.id.clone(), value);
    }
    Perversity::from_values(dst, &values)
}

fn same_id(id: &str) -> Vec<String> {
    vec![id.to_string()]
}

/// Perversity on `cone(x)` extending `p`, with the given apex value.
pub fn cone_perversity(x: &FilteredComplex, p: &Perversity, c: &FilteredComplex, apex: i64) -> Result<Perversity> {
    transport_perversity(
        x,
        p,
        c,
        |id| if x.vertex_index(id).is_some() { same_id(id) } else { vec![] },
        |_, _| Some(apex),
    )
}

/// Perversity on `suspension(x)` extending `p`, with values at `w+` and `w-`.
pub fn suspension_perversity(
    x: &FilteredComplex,
    p: &Perversity,
    s: &FilteredComplex,
    north: i64,
    south: i64,
) -> Result<Perversity> {
    transport_perversity(
        x,
        p,
        s,
        |id| if x.vertex_index(id).is_some() { same_id(id) } else { vec![] },
        |d, st| {
            let apex = d.vertex_id(st.simplices[0].vertices()[0]);
            Some(if apex.starts_with("w+") { north } else { south })
        },
    )
}

/// Perversity on a product with an interval or circle: `p̄(S × M) = p̄(S)`.
pub fn product_perversity(x: &FilteredComplex, p: &Perversity, prod: &FilteredComplex) -> Result<Perversity> {
    transport_perversity(
        x,
        p,
        prod,
        |id| vec![id.rsplit_once('|').map_or(id, |(v, _)| v).to_string()],
        |_, _| None,
    )
}

/// Perversity on `barycentric_subdivide(x)`.
pub fn subdivision_perversity(x: &FilteredComplex, p: &Perversity, sd: &FilteredComplex) -> Result<Perversity> {
    let by_id: BTreeMap<String, Vec<String>> = x
        .all_simplices()
        .map(|s| (barycenter_id(x, s), x.simplex_ids(s)))
        .collect();
    transport_perversity(x, p, sd, |id| by_id.get(id).cloned().unwrap_or_default(), |_, _| None)
}

/// Perversity on `disjoint_union(x, y)` from one on each side.
pub fn union_perversity(
    x: &FilteredComplex,
    p: &Perversity,
    y: &FilteredComplex,
    q: &Perversity,
    u: &FilteredComplex,
) -> Result<Perversity> {
    let px = transport_perversity(x, p, u, |id| id.strip_prefix("x.").map(same_id).unwrap_or_default(), |_, _| Some(0))?;
    let qy = transport_perversity(y, q, u, |id| id.strip_prefix("y.").map(same_id).unwrap_or_default(), |_, _| Some(0))?;
    let values = u
        .strata()
        .iter()
        .filter(|st| !st.regular)
        .map(|st| {
            let side_x = u.vertex_id(st.simplices[0].vertices()[0]).starts_with("x.");
            let v = if side_x { px.get(&st.id) } else { qy.get(&st.id) };
            (st.id.clone(), v.unwrap_or(0))
        })
        .collect();
    Perversity::from_values(u, &values)
}
