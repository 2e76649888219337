//! General and classical perversities.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{
    check_stratified_map, Coarsening, FilteredComplex, StratifiedMapDescriptor, StratumId,
};
use crate::error::{Error, Result};

/// Integer values on the strata of a named complex, zero on regular strata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Perversity {
    complex: String,
    values: BTreeMap<StratumId, i64>,
}

impl Perversity {
    /// Values given on singular strata. Regular strata may be omitted or set to 0.
    pub fn from_values(x: &FilteredComplex, values: &BTreeMap<StratumId, i64>) -> Result<Self> {
        for (id, &v) in values {
            let s = x
                .strata()
                .by_id(id)
                .ok_or_else(|| Error::UnknownStratum(id.to_string()))?;
            if s.regular && v != 0 {
                return Err(Error::NonzeroOnRegular(id.to_string()));
            }
        }
        let mut out = BTreeMap::new();
        for s in x.strata().iter() {
            let v = if s.regular {
                0
            } else {
                *values
                    .get(&s.id)
                    .ok_or_else(|| Error::MissingValue(s.id.to_string()))?
            };
            out.insert(s.id.clone(), v);
        }
        Ok(Perversity {
            complex: x.name().to_string(),
            values: out,
        })
    }

    /// Value `f(stratum index)` on each singular stratum.
    pub fn from_fn(x: &FilteredComplex, mut f: impl FnMut(usize) -> i64) -> Self {
        let values = x
            .strata()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.clone(), if s.regular { 0 } else { f(i) }))
            .collect();
        Perversity {
            complex: x.name().to_string(),
            values,
        }
    }

    pub fn from_classical(spec: &ClassicalPerversitySpec, x: &FilteredComplex) -> Result<Self> {
        for s in x.strata().iter().filter(|s| !s.regular) {
            if !spec.by_codim.contains_key(&s.codim) {
                return Err(Error::MissingCodim(s.codim));
            }
        }
        Ok(Self::from_fn(x, |i| spec.by_codim[&x.strata().get(i).codim]))
    }

    /// The same value `k` on every singular stratum.
    pub fn constant(x: &FilteredComplex, k: i64) -> Self {
        Self::from_fn(x, |_| k)
    }

    pub fn zero(x: &FilteredComplex) -> Self {
        Self::constant(x, 0)
    }

    /// `t̄(S) = codim S - 2` on singular strata.
    pub fn top(x: &FilteredComplex) -> Self {
        Self::from_fn(x, |i| x.strata().get(i).codim as i64 - 2)
    }

    pub fn complex_name(&self) -> &str {
        &self.complex
    }

    pub fn values(&self) -> &BTreeMap<StratumId, i64> {
        &self.values
    }

    pub fn get(&self, id: &StratumId) -> Option<i64> {
        self.values.get(id).copied()
    }

    /// Values indexed by stratum position in `x`.
    pub fn on(&self, x: &FilteredComplex) -> Result<Vec<i64>> {
        if self.complex != x.name() {
            return Err(Error::ComplexMismatch {
                expected: x.name().to_string(),
                found: self.complex.clone(),
            });
        }
        x.strata()
            .iter()
            .map(|s| {
                self.values
                    .get(&s.id)
                    .copied()
                    .ok_or_else(|| Error::MissingValue(s.id.to_string()))
            })
            .collect()
    }

    /// `Dp̄ = t̄ - p̄`.
    pub fn dual(&self, x: &FilteredComplex) -> Result<Self> {
        let p = self.on(x)?;
        Ok(Self::from_fn(x, |i| x.strata().get(i).codim as i64 - 2 - p[i]))
    }

    /// Same values, attached to another complex name.
    pub fn renamed(mut self, name: &str) -> Self {
        self.complex = name.to_string();
        self
    }

    /// Pointwise order.
    pub fn le(&self, other: &Perversity) -> bool {
        self.values
            .iter()
            .all(|(id, v)| other.values.get(id).is_some_and(|w| v <= w))
    }

    /// Pointwise `+ k` on singular strata.
    pub fn shifted(&self, x: &FilteredComplex, k: i64) -> Result<Self> {
        let p = self.on(x)?;
        Ok(Self::from_fn(x, |i| p[i] + k))
    }
}

/// A classical perversity given by its values on codimensions `>= 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassicalPerversitySpec {
    pub by_codim: BTreeMap<usize, i64>,
}

impl ClassicalPerversitySpec {
    pub fn new(pairs: &[(usize, i64)]) -> Self {
        ClassicalPerversitySpec {
            by_codim: pairs.iter().copied().collect(),
        }
    }

    /// King growth condition on the given codimensions, with unlisted ones
    /// free to interpolate.
    pub fn is_king(&self) -> bool {
        king_extendable(self.by_codim.iter().map(|(&c, &v)| (c, v)).filter(|(c, _)| *c >= 1), false)
    }

    pub fn is_gm(&self) -> bool {
        king_extendable(self.by_codim.iter().map(|(&c, &v)| (c, v)).filter(|(c, _)| *c >= 1), true)
    }
}

/// Whether values at some codimensions extend to a King perversity on all of
/// them (and to a GM perversity, if asked).
fn king_extendable(points: impl Iterator<Item = (usize, i64)>, gm: bool) -> bool {
    let mut fixed: BTreeMap<usize, i64> = BTreeMap::new();
    let extra = if gm { vec![(1, 0), (2, 0)] } else { vec![] };
    for (c, v) in points.chain(extra) {
        if let Some(&w) = fixed.get(&c) {
            if w != v {
                return false;
            }
        }
        fixed.insert(c, v);
    }
    let pts: Vec<(usize, i64)> = fixed.into_iter().collect();
    pts.windows(2).all(|w| {
        let (dc, dv) = ((w[1].0 - w[0].0) as i64, w[1].1 - w[0].1);
        0 <= dv && dv <= dc
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_classical: bool,
    pub is_king: bool,
    pub is_gm: bool,
}

/// Classifies `p` on `x`. With a spec, King and GM are decided on the spec
/// (which must agree with `p`); without one, on the realized codimensions,
/// unrealized ones being interpolated.
pub fn classify(
    p: &Perversity,
    x: &FilteredComplex,
    spec: Option<&ClassicalPerversitySpec>,
) -> Result<Classification> {
    let vals = p.on(x)?;
    let mut by_codim: BTreeMap<usize, BTreeSet<i64>> = BTreeMap::new();
    for (i, s) in x.strata().iter().enumerate() {
        if !s.regular {
            by_codim.entry(s.codim).or_default().insert(vals[i]);
        }
    }
    let mut is_classical = by_codim.values().all(|v| v.len() == 1);
    let (is_king, is_gm) = match spec {
        Some(spec) => {
            is_classical &= by_codim
                .iter()
                .all(|(c, v)| spec.by_codim.get(c).is_some_and(|w| v.len() == 1 && v.contains(w)));
            (is_classical && spec.is_king(), is_classical && spec.is_gm())
        }
        None if is_classical => {
            let pts: Vec<(usize, i64)> = by_codim
                .iter()
                .map(|(&c, v)| (c, *v.iter().next().unwrap()))
                .collect();
            (
                king_extendable(pts.iter().copied(), false),
                king_extendable(pts.iter().copied(), true),
            )
        }
        None => (false, false),
    };
    Ok(Classification {
        is_classical,
        is_king,
        is_gm,
    })
}

/// `(f*q̄)(S) = q̄(S^f)`.
pub fn pullback(f: &StratifiedMapDescriptor<'_>, q: &Perversity) -> Result<Perversity> {
    let report = check_stratified_map(f)?;
    let qv = q.on(f.target)?;
    Ok(Perversity::from_fn(f.source, |s| qv[report.stratum_index_map[s]]))
}

/// `ν_*p̄`: each coarse stratum takes the common value of its sources.
pub fn pushforward(
    fine: &FilteredComplex,
    coarse: &FilteredComplex,
    c: &Coarsening,
    p: &Perversity,
) -> Result<Perversity> {
    let pv = p.on(fine)?;
    let mut values = BTreeMap::new();
    for (t, ts) in coarse.strata().iter().enumerate() {
        let sources: Vec<usize> = (0..c.stratum_map.len())
            .filter(|&s| c.stratum_map[s] == t && c.is_source[s])
            .collect();
        let Some(&first) = sources.first() else {
            return Err(Error::NotARefinement(format!("stratum `{}` has no source", ts.id)));
        };
        if let Some(&other) = sources.iter().find(|&&s| pv[s] != pv[first]) {
            let (a, b) = (fine.strata().get(first), fine.strata().get(other));
            return Err(Error::SourceValueConflict {
                target: ts.id.to_string(),
                detail: format!("p({})={} but p({})={}", a.id, pv[first], b.id, pv[other]),
            });
        }
        values.insert(ts.id.clone(), if ts.regular { 0 } else { pv[first] });
    }
    Perversity::from_values(coarse, &values)
}

/// Declared equivalences between strata.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceDeclaration {
    pub pairs: Vec<(StratumId, StratumId)>,
}

impl EquivalenceDeclaration {
    pub fn new(pairs: Vec<(StratumId, StratumId)>) -> Self {
        EquivalenceDeclaration { pairs }
    }

    /// Class label per stratum index under the transitive closure.
    pub fn classes(&self, x: &FilteredComplex) -> Result<Vec<usize>> {
        let n = x.strata().len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for (a, b) in &self.pairs {
            let ia = x
                .strata()
                .index(a)
                .ok_or_else(|| Error::UnknownStratumInEquiv(a.to_string()))?;
            let ib = x
                .strata()
                .index(b)
                .ok_or_else(|| Error::UnknownStratumInEquiv(b.to_string()))?;
            let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
            parent[ra.max(rb)] = ra.min(rb);
        }
        Ok((0..n).map(|i| find(&mut parent, i)).collect())
    }

    /// Strata sharing a coarse stratum are declared equivalent.
    pub fn from_coarsening(fine: &FilteredComplex, c: &Coarsening) -> Self {
        let mut pairs = Vec::new();
        for a in 0..c.stratum_map.len() {
            for b in a + 1..c.stratum_map.len() {
                if c.stratum_map[a] == c.stratum_map[b] {
                    pairs.push((fine.strata().get(a).id.clone(), fine.strata().get(b).id.clone()));
                }
            }
        }
        EquivalenceDeclaration { pairs }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub pass: bool,
    pub witnesses: Vec<String>,
}

impl ConditionResult {
    fn from_witnesses(witnesses: Vec<String>) -> Self {
        ConditionResult {
            pass: witnesses.is_empty(),
            witnesses,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KPerversityReport {
    pub pass: bool,
    pub sources_agree: ConditionResult,
    pub nonnegative_near_regular: ConditionResult,
    pub monotone_on_sources: ConditionResult,
}

/// Checks the three K-perversity conditions. Sources come from the
/// coarsening when given; otherwise they are the strata of largest level in
/// each declared equivalence class.
pub fn check_k_perversity(
    x: &FilteredComplex,
    p: &Perversity,
    equiv: &EquivalenceDeclaration,
    coarsening: Option<&Coarsening>,
) -> Result<KPerversityReport> {
    let pv = p.on(x)?;
    let class = equiv.classes(x)?;
    let st = x.strata();
    let n = st.len();
    let codim = |i: usize| st.get(i).codim as i64;
    let dual = |i: usize| codim(i) - 2 - pv[i];

    let is_source: Vec<bool> = match coarsening {
        Some(c) => c.is_source.clone(),
        None => (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| class[j] == class[i])
                    .all(|j| st.get(j).level <= st.get(i).level)
            })
            .collect(),
    };
    let group: Vec<usize> = match coarsening {
        Some(c) => c.stratum_map.clone(),
        None => class.clone(),
    };

    let mut w1 = Vec::new();
    let mut seen = BTreeSet::new();
    for a in (0..n).filter(|&a| is_source[a]) {
        for b in (a + 1..n).filter(|&b| is_source[b] && group[b] == group[a]) {
            if pv[a] != pv[b] && seen.insert((a, b)) {
                w1.push(format!(
                    "{}={} vs {}={}",
                    st.get(a).id,
                    pv[a],
                    st.get(b).id,
                    pv[b]
                ));
            }
        }
    }

    let near_regular = |i: usize| (0..n).any(|j| class[j] == class[i] && st.get(j).regular);
    let w2: Vec<String> = (0..n)
        .filter(|&i| !st.get(i).regular && near_regular(i) && pv[i] < 0)
        .map(|i| format!("{}={}", st.get(i).id, pv[i]))
        .collect();

    let mut w3 = Vec::new();
    for s2 in (0..n).filter(|&i| is_source[i] && !st.get(i).regular) {
        for s in (0..n).filter(|&s| s != s2 && st.le(s, s2) && class[s] == class[s2]) {
            if pv[s] > pv[s2] {
                w3.push(format!("p({})={} > p({})={}", st.get(s).id, pv[s], st.get(s2).id, pv[s2]));
            }
            if dual(s2) > dual(s) {
                w3.push(format!(
                    "Dp({})={} > Dp({})={}",
                    st.get(s2).id,
                    dual(s2),
                    st.get(s).id,
                    dual(s)
                ));
            }
        }
    }
    let (c1, c2, c3) = (
        ConditionResult::from_witnesses(w1),
        ConditionResult::from_witnesses(w2),
        ConditionResult::from_witnesses(w3),
    );
    Ok(KPerversityReport {
        pass: c1.pass && c2.pass && c3.pass,
        sources_agree: c1,
        nonnegative_near_regular: c2,
        monotone_on_sources: c3,
    })
}

/// Perversity file contents, before resolution against a complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PerversityFile {
    General { values: BTreeMap<String, i64> },
    Classical { by_codim: BTreeMap<String, i64> },
}

impl PerversityFile {
    pub fn classical_spec(&self) -> Result<Option<ClassicalPerversitySpec>> {
        match self {
            PerversityFile::General { .. } => Ok(None),
            PerversityFile::Classical { by_codim } => {
                let mut spec = ClassicalPerversitySpec::default();
                for (k, v) in by_codim {
                    let c: usize = k
                        .parse()
                        .map_err(|_| Error::UnknownStratum(format!("codimension `{k}`")))?;
                    spec.by_codim.insert(c, *v);
                }
                Ok(Some(spec))
            }
        }
    }

    pub fn resolve(&self, x: &FilteredComplex) -> Result<Perversity> {
        match self {
            PerversityFile::General { values } => {
                let vals = values
                    .iter()
                    .map(|(k, v)| (StratumId(k.clone()), *v))
                    .collect();
                Perversity::from_values(x, &vals)
            }
            PerversityFile::Classical { .. } => {
                Perversity::from_classical(&self.classical_spec()?.unwrap(), x)
            }
        }
    }

    pub fn from_perversity(p: &Perversity) -> Self {
        PerversityFile::General {
            values: p.values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::tests::raw;
    use crate::complex::{build_complex, coarsening};

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

    fn pt(k: i64) -> BTreeMap<StratumId, i64> {
        BTreeMap::from([(StratumId::from("S0.0"), k)])
    }

    #[test]
    fn classical_on_pointed_sphere() {
        let x = octahedron(0);
        let p = Perversity::from_classical(&ClassicalPerversitySpec::new(&[(2, 0)]), &x).unwrap();
        assert_eq!(p.get(&"S0.0".into()), Some(0));
        assert_eq!(
            Perversity::from_classical(&ClassicalPerversitySpec::new(&[(3, 1)]), &x),
            Err(Error::MissingCodim(2))
        );
        let t = Perversity::top(&x);
        assert_eq!(t.get(&"S0.0".into()), Some(0));
        assert_eq!(t.dual(&x).unwrap(), Perversity::zero(&x));
    }

    #[test]
    fn value_errors() {
        let x = octahedron(0);
        let mut v = pt(1);
        v.insert("S2.0".into(), 3);
        assert_eq!(Perversity::from_values(&x, &v), Err(Error::NonzeroOnRegular("S2.0".into())));
        assert_eq!(
            Perversity::from_values(&x, &BTreeMap::new()),
            Err(Error::MissingValue("S0.0".into()))
        );
        assert_eq!(
            Perversity::from_values(&x, &BTreeMap::from([("S9.0".into(), 1)])),
            Err(Error::UnknownStratum("S9.0".into()))
        );
    }

    #[test]
    fn king_and_gm() {
        assert!(!ClassicalPerversitySpec::new(&[(2, 0), (3, 2)]).is_king());
        assert!(ClassicalPerversitySpec::new(&[(2, 0), (3, 1)]).is_gm());
        assert!(ClassicalPerversitySpec::new(&[(1, 0), (2, 1)]).is_king());
        assert!(!ClassicalPerversitySpec::new(&[(1, 0), (2, 1)]).is_gm());
        assert!(ClassicalPerversitySpec::new(&[(2, 0), (5, 3)]).is_king());
        assert!(!ClassicalPerversitySpec::new(&[(2, 0), (5, 4)]).is_king());
    }

    #[test]
    fn pushforward_of_pullback() {
        let (fine, coarse) = (octahedron(0), octahedron(2));
        let q = Perversity::zero(&coarse);
        let f = StratifiedMapDescriptor::identity(&fine, &coarse);
        let p = pullback(&f, &q).unwrap();
        assert_eq!(p.get(&"S0.0".into()), Some(0));
        let c = coarsening(&fine, &coarse).unwrap();
        assert_eq!(pushforward(&fine, &coarse, &c, &p).unwrap(), q);
        let p5 = Perversity::from_values(&fine, &pt(5)).unwrap();
        assert_eq!(pushforward(&fine, &coarse, &c, &p5).unwrap(), q);
    }

    #[test]
    fn k_perversity_on_pointed_sphere() {
        let x = octahedron(0);
        let eq = EquivalenceDeclaration::new(vec![("S0.0".into(), "S2.0".into())]);
        let p = Perversity::from_values(&x, &pt(1)).unwrap();
        assert!(check_k_perversity(&x, &p, &eq, None).unwrap().pass);
        let p = Perversity::from_values(&x, &pt(-1)).unwrap();
        let r = check_k_perversity(&x, &p, &eq, None).unwrap();
        assert!(!r.pass && !r.nonnegative_near_regular.pass);
        assert!(r.sources_agree.pass && r.monotone_on_sources.pass);
        let bad = EquivalenceDeclaration::new(vec![("S0.0".into(), "S7.0".into())]);
        assert_eq!(
            check_k_perversity(&x, &p, &bad, None),
            Err(Error::UnknownStratumInEquiv("S7.0".into()))
        );
    }

    #[test]
    fn perversity_files() {
        let x = octahedron(0);
        let f: PerversityFile = serde_json::from_str(r#"{"kind":"general","values":{"S0.0":1}}"#).unwrap();
        assert_eq!(f.resolve(&x).unwrap().get(&"S0.0".into()), Some(1));
        let f: PerversityFile =
            serde_json::from_str(r#"{"kind":"classical","by_codim":{"2":0,"3":1}}"#).unwrap();
        assert_eq!(f.resolve(&x).unwrap(), Perversity::zero(&x));
        let e: EquivalenceDeclaration = serde_json::from_str(r#"{"pairs":[["S0.0","S2.0"]]}"#).unwrap();
        assert_eq!(e.pairs.len(), 1);
    }
}
