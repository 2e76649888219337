use std::collections::BTreeMap;

use super::degree::{admissible_with, Chain};
use crate::complex::{check_stratified_map, Simplex, StratifiedMapDescriptor};
use crate::error::{Error, Result};
use crate::perversity::Perversity;

/// Image of a `p̄`-intersection chain under a stratified simplicial map.
/// Degenerate images are dropped.
pub fn pushforward_chain(
    f: &StratifiedMapDescriptor<'_>,
    chain: &Chain,
    p: &Perversity,
    q: &Perversity,
) -> Result<Chain> {
    let (src, tgt) = (f.source, f.target);
    let report = check_stratified_map(f)?;
    let pv = p.on(src)?;
    let qv = q.on(tgt)?;
    for (s, &t) in report.stratum_index_map.iter().enumerate() {
        let (ss, ts) = (src.strata().get(s), tgt.strata().get(t));
        if ts.regular {
            continue;
        }
        let dq = ts.codim as i64 - 2 - qv[t];
        let dp = ss.codim as i64 - 2 - pv[s];
        if dq > dp {
            return Err(Error::DualityInequalityViolated(ss.id.to_string()));
        }
    }
    let mut boundary: BTreeMap<Simplex, i64> = BTreeMap::new();
    for (c, s) in chain {
        if !src.contains(s) || !admissible_with(src, s, &pv) {
            return Err(Error::NotAdmissibleInput(src.display(s)));
        }
        for (sign, face) in s.boundary() {
            *boundary.entry(face).or_default() += sign * c;
        }
    }
    for (face, c) in &boundary {
        if *c != 0 && !admissible_with(src, face, &pv) {
            return Err(Error::NotAdmissibleInput(format!(
                "boundary face {}",
                src.display(face)
            )));
        }
    }
    let mut image: BTreeMap<Simplex, i64> = BTreeMap::new();
    for (c, s) in chain {
        let verts: Vec<u32> = s
            .vertices()
            .iter()
            .map(|&v| tgt.vertex_index(&f.vertex_map[src.vertex_id(v)]).expect("checked map"))
            .collect();
        let t = Simplex::new(verts.clone());
        if t.len() < verts.len() {
            continue;
        }
        *image.entry(t).or_default() += permutation_sign(&verts) * c;
    }
    let out: Chain = image
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(s, c)| (c, s))
        .collect();
    if let Some((_, s)) = out.iter().find(|(_, s)| !admissible_with(tgt, s, &qv)) {
        return Err(Error::Internal(format!(
            "image simplex {} is not admissible",
            tgt.display(s)
        )));
    }
    Ok(out)
}

fn permutation_sign(v: &[u32]) -> i64 {
    let mut inversions = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}
