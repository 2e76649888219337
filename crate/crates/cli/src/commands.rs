use std::collections::BTreeMap;
use std::fmt::Write as _;

use perverse::builtin::{self as corpus, BuiltinKind, BUILTINS};
use perverse::chains::{
    build_complex_variant, build_relative_complex, funest_report, grandes_strates, is_admissible, Ring, Variant,
};
use perverse::constructors::{
    barycentric_subdivide, cone, disjoint_union, product_circle, product_interval, suspension,
};
use perverse::homology::{homology as compute_homology, HomologyGroup};
use perverse::invariance::{check_refinement, invariance_report};
use perverse::perversity::{check_k_perversity, classify, ClassicalPerversitySpec, ConditionResult};
use perverse::{check_normal, check_pseudomanifold, StratumId};
use serde::Serialize;

use crate::input::{self, CliResult, Failure};
use crate::{BuiltinCommand, CheckArgs, Class, DiagnoseArgs, HomologyArgs, InvarianceArgs};

pub struct Output {
    pub json: Option<String>,
}

impl Output {
    /// Text to stdout unless JSON goes there; JSON to the requested place.
    fn emit(&self, text: &str, value: &impl Serialize) -> CliResult<()> {
        let json = || {
            serde_json::to_string_pretty(value).map_err(|e| Failure {
                code: 5,
                kind: "Internal".into(),
                message: e.to_string(),
            })
        };
        match self.json.as_deref() {
            Some("-") => println!("{}", json()?),
            Some(path) => {
                print!("{text}");
                write_file(path, &(json()? + "\n"))?;
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn write_file(path: &str, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: 5,
        kind: "Io".into(),
        message: format!("{path}: {e}"),
    })
}

#[derive(Serialize)]
struct StratumRow {
    id: StratumId,
    level: usize,
    codim: usize,
    regular: bool,
    depth: usize,
    simplices: usize,
}

#[derive(Serialize)]
struct ValidateReport {
    name: String,
    formal_dim: usize,
    vertices: usize,
    simplices: usize,
    strata: Vec<StratumRow>,
    /// Covering pairs `a ≺ b`: `a` lies in the closure of `b`.
    order: Vec<(StratumId, StratumId)>,
    pseudomanifold: bool,
    normal: bool,
}

pub fn validate(path: &str, out: &Output) -> CliResult<()> {
    let x = input::complex(path)?;
    let st = x.strata();
    let strata: Vec<StratumRow> = st
        .iter()
        .enumerate()
        .map(|(i, s)| StratumRow {
            id: s.id.clone(),
            level: s.level,
            codim: s.codim,
            regular: s.regular,
            depth: st.depth(i),
            simplices: s.simplices.len(),
        })
        .collect();
    let order: Vec<(StratumId, StratumId)> = st
        .hasse_edges()
        .into_iter()
        .map(|(a, b)| (st.get(a).id.clone(), st.get(b).id.clone()))
        .collect();
    let report = ValidateReport {
        name: x.name().to_string(),
        formal_dim: x.formal_dim(),
        vertices: x.num_vertices(),
        simplices: x.num_simplices(),
        strata,
        order,
        pseudomanifold: check_pseudomanifold(&x).is_pm,
        normal: check_normal(&x).is_normal,
    };
    let mut t = String::new();
    writeln!(
        t,
        "{}: formal dimension {}, {} vertices, {} simplices",
        report.name, report.formal_dim, report.vertices, report.simplices
    )
    .unwrap();
    writeln!(t, "{:<8} {:>5} {:>5} {:>7} {:>5} {:>9}", "stratum", "level", "codim", "regular", "depth", "simplices").unwrap();
    for r in &report.strata {
        writeln!(
            t,
            "{:<8} {:>5} {:>5} {:>7} {:>5} {:>9}",
            r.id.as_str(),
            r.level,
            r.codim,
            r.regular,
            r.depth,
            r.simplices
        )
        .unwrap();
    }
    for (a, b) in &report.order {
        writeln!(t, "{} < {}", a.as_str(), b.as_str()).unwrap();
    }
    writeln!(t, "pseudomanifold: {}, normal: {}", report.pseudomanifold, report.normal).unwrap();
    out.emit(&t, &report)
}

#[derive(Serialize)]
struct GroupEntry {
    free_rank: usize,
    torsion: Vec<u64>,
}

#[derive(Serialize)]
struct HomologyReport {
    complex: String,
    perversity: BTreeMap<StratumId, i64>,
    ring: Ring,
    variant: Variant,
    relative: Option<String>,
    reduced: bool,
    homology: BTreeMap<usize, GroupEntry>,
}

fn ring(s: &str) -> CliResult<Ring> {
    Ok(s.parse::<Ring>()?)
}

fn groups_table(groups: &[HomologyGroup]) -> String {
    let mut t = String::new();
    for (k, g) in groups.iter().enumerate() {
        writeln!(t, "H_{k} = {g}").unwrap();
    }
    t
}

pub fn homology(a: &HomologyArgs, out: &Output) -> CliResult<()> {
    let x = input::complex(&a.complex)?;
    let (_, p) = input::perversity(&x, a.perversity.as_deref())?;
    let ring = ring(&a.ring)?;
    let variant = if a.tame { Variant::Tame } else { Variant::Intersection };
    let pres = match &a.relative {
        Some(sub) => build_relative_complex(&x, &input::complex(sub)?, &p, ring, variant)?,
        None => build_complex_variant(&x, &p, ring, variant)?,
    };
    let groups = compute_homology(&pres, a.reduced)?;
    let report = HomologyReport {
        complex: x.name().to_string(),
        perversity: p.values().clone(),
        ring,
        variant,
        relative: a.relative.clone(),
        reduced: a.reduced,
        homology: groups
            .iter()
            .enumerate()
            .map(|(k, g)| {
                (
                    k,
                    GroupEntry {
                        free_rank: g.free_rank,
                        torsion: g.torsion.clone(),
                    },
                )
            })
            .collect(),
    };
    let label = if a.tame { "tame intersection" } else { "intersection" };
    let mut t = format!("{} over {ring}, {label} homology\n", x.name());
    t.push_str(&groups_table(&groups));
    out.emit(&t, &report)
}

pub enum Shape {
    Cone,
    Suspension,
    Subdivision,
    Interval(usize),
    Circle(usize),
    Union,
}

pub fn construct(first: &str, second: Option<&str>, output: Option<&str>, shape: Shape) -> CliResult<()> {
    let x = input::complex(first)?;
    let y = match shape {
        Shape::Cone => cone(&x)?,
        Shape::Suspension => suspension(&x)?,
        Shape::Subdivision => barycentric_subdivide(&x)?,
        Shape::Interval(m) => product_interval(&x, m)?,
        Shape::Circle(m) => product_circle(&x, m)?,
        Shape::Union => {
            let other = input::complex(second.ok_or_else(|| Failure::usage("union needs two complexes"))?)?;
            disjoint_union(&x, &other)?
        }
    };
    let text = serde_json::to_string_pretty(&y.to_raw()).expect("complexes serialize") + "\n";
    match output {
        Some(path) => {
            write_file(path, &text)?;
            println!(
                "{}: {} vertices, {} simplices, {} strata -> {path}",
                y.name(),
                y.num_vertices(),
                y.num_simplices(),
                y.strata().len()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassReport {
    complex: String,
    class: &'static str,
    pass: bool,
    failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditions: Option<BTreeMap<&'static str, ConditionResult>>,
}

/// Codimension steps of a classical spec that break the growth condition.
fn growth_failures(spec: &ClassicalPerversitySpec, gm: bool) -> Vec<String> {
    let mut out = Vec::new();
    if gm {
        for c in [1, 2] {
            if let Some(&v) = spec.by_codim.get(&c) {
                if v != 0 {
                    out.push(format!("p({c}) = {v}, expected 0"));
                }
            }
        }
    }
    let pts: Vec<(usize, i64)> = spec.by_codim.iter().map(|(&c, &v)| (c, v)).filter(|&(c, _)| c >= 1).collect();
    for w in pts.windows(2) {
        let ((c0, v0), (c1, v1)) = (w[0], w[1]);
        if v1 < v0 || v1 - v0 > (c1 - c0) as i64 {
            out.push(format!("growth from p({c0}) = {v0} to p({c1}) = {v1}"));
        }
    }
    out
}

pub fn check(a: &CheckArgs, out: &Output) -> CliResult<()> {
    let x = input::complex(&a.complex)?;
    let (file, p) = input::perversity(&x, Some(&a.perversity))?;
    let spec = file.classical_spec()?;
    let report = match a.class {
        Class::King | Class::Gm => {
            let gm = matches!(a.class, Class::Gm);
            let c = classify(&p, &x, spec.as_ref())?;
            let mut failures = Vec::new();
            if !c.is_classical {
                failures.push("not classical: values differ within a codimension".to_string());
            }
            match &spec {
                Some(spec) => failures.extend(growth_failures(spec, gm)),
                None if c.is_classical && !(if gm { c.is_gm } else { c.is_king }) => {
                    failures.push("realized values break the growth condition".into())
                }
                None => {}
            }
            ClassReport {
                complex: x.name().to_string(),
                class: if gm { "gm" } else { "king" },
                pass: if gm { c.is_gm } else { c.is_king },
                failures,
                conditions: None,
            }
        }
        Class::K => {
            let equiv = input::equivalence(a.equiv.as_deref())?;
            let k = check_k_perversity(&x, &p, &equiv, None)?;
            let conditions = BTreeMap::from([
                ("(i) sources agree", k.sources_agree.clone()),
                ("(ii) nonnegative near regular", k.nonnegative_near_regular.clone()),
                ("(iii) monotone on sources", k.monotone_on_sources.clone()),
            ]);
            let failures = conditions
                .iter()
                .filter(|(_, c)| !c.pass)
                .map(|(name, c)| format!("{name}: {}", c.witnesses.join(", ")))
                .collect();
            ClassReport {
                complex: x.name().to_string(),
                class: "k",
                pass: k.pass,
                failures,
                conditions: Some(conditions),
            }
        }
    };
    let mut t = format!("{} class {}: {}\n", report.complex, report.class, if report.pass { "pass" } else { "fail" });
    for f in &report.failures {
        writeln!(t, "  fail {f}").unwrap();
    }
    out.emit(&t, &report)
}

pub fn invariance(a: &InvarianceArgs, out: &Output) -> CliResult<()> {
    let fine = input::complex(&a.fine)?;
    let coarse = input::complex(&a.coarse)?;
    let pair = check_refinement(&fine, &coarse)?;
    let (_, p) = input::perversity(&pair.coarse, a.perversity.as_deref())?;
    let over = match &a.fine_perversity {
        Some(path) => Some(input::perversity(&pair.fine, Some(path))?.1),
        None => None,
    };
    let rings = a.ring.iter().map(|r| ring(r)).collect::<CliResult<Vec<_>>>()?;
    let variant = if a.tame { Variant::Tame } else { Variant::Intersection };
    let report = invariance_report(&pair, &p, over.as_ref(), &rings, &[variant])?;
    let tr = &report.transcript;
    let mut t = format!("{} refines {}\n", report.fine, report.coarse);
    writeln!(t, "K-perversity: {}", if tr.k_perversity.pass { "pass" } else { "fail" }).unwrap();
    writeln!(t, "pushforward matches: {}", tr.pushforward_matches).unwrap();
    if a.tame {
        writeln!(t, "codimension-one strata made regular: {}", tr.codim_one_regularized.len()).unwrap();
        writeln!(t, "p-homogeneous: {}", tr.homogeneity.p_homogeneous).unwrap();
    }
    for note in &tr.notes {
        writeln!(t, "note: {note}").unwrap();
    }
    for s in &report.sections {
        writeln!(t, "{} {:?}:", s.ring, s.variant).unwrap();
        for (k, v) in s.verdicts.iter().enumerate() {
            let zero = HomologyGroup::zero(s.ring);
            let f = s.fine.get(k).unwrap_or(&zero);
            let c = s.coarse.get(k).unwrap_or(&zero);
            writeln!(t, "  H_{k}: fine {f}, coarse {c}: {v}").unwrap();
        }
    }
    out.emit(&t, &report)
}

#[derive(Serialize)]
struct DiagnoseReport {
    complex: String,
    perversity: BTreeMap<StratumId, i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    funest: Option<Vec<perverse::chains::FunestReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grandes_strates: Option<perverse::chains::LargeStrata>,
    /// Counts of admissible simplices by dimension, then by defect.
    #[serde(skip_serializing_if = "Option::is_none")]
    defects: Option<BTreeMap<usize, BTreeMap<usize, usize>>>,
}

pub fn diagnose(a: &DiagnoseArgs, out: &Output) -> CliResult<()> {
    let x = input::complex(&a.complex)?;
    let (_, p) = input::perversity(&x, a.perversity.as_deref())?;
    let all = !(a.funest || a.grandes_strates || a.defects);
    let mut reports = Vec::new();
    for s in x.all_simplices().filter(|s| s.len() >= 2) {
        if is_admissible(&x, s, &p)? {
            reports.push((s.dim() as usize, funest_report(&x, s, &p)?));
        }
    }
    let mut t = format!("{}\n", x.name());
    let funest = (all || a.funest).then(|| {
        let with: Vec<_> = reports.iter().filter(|(_, r)| r.funest_face.is_some()).map(|(_, r)| r.clone()).collect();
        writeln!(t, "funest faces: {}", with.len()).unwrap();
        for r in &with {
            writeln!(
                t,
                "  {{{}}}: face {{{}}}, stratum {}, defect {}",
                r.simplex.join(","),
                r.funest_face.as_ref().unwrap().join(","),
                r.guilty_stratum.as_ref().unwrap().as_str(),
                r.defect
            )
            .unwrap();
        }
        with
    });
    let large = if all || a.grandes_strates {
        let g = grandes_strates(&x, &p)?;
        let ids: Vec<&str> = g.strata.iter().map(StratumId::as_str).collect();
        writeln!(t, "large strata: {{{}}}", ids.join(", ")).unwrap();
        Some(g)
    } else {
        None
    };
    let defects = (all || a.defects).then(|| {
        let mut by: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
        for (d, r) in &reports {
            *by.entry(*d).or_default().entry(r.defect).or_default() += 1;
        }
        writeln!(t, "defects (dimension: defect x count):").unwrap();
        for (d, counts) in &by {
            let parts: Vec<String> = counts.iter().map(|(l, n)| format!("{l} x {n}")).collect();
            writeln!(t, "  {d}: {}", parts.join(", ")).unwrap();
        }
        by
    });
    let report = DiagnoseReport {
        complex: x.name().to_string(),
        perversity: p.values().clone(),
        funest,
        grandes_strates: large,
        defects,
    };
    out.emit(&t, &report)
}

#[derive(Serialize)]
struct BuiltinEntry {
    name: &'static str,
    kind: &'static str,
}

fn kind_name(k: BuiltinKind) -> &'static str {
    match k {
        BuiltinKind::Complex => "complex",
        BuiltinKind::Perversity => "perversity",
        BuiltinKind::Equivalence => "equivalence",
    }
}

pub fn builtin(cmd: &BuiltinCommand, out: &Output) -> CliResult<()> {
    match cmd {
        BuiltinCommand::List => {
            let entries: Vec<BuiltinEntry> = BUILTINS
                .iter()
                .map(|b| BuiltinEntry {
                    name: b.name,
                    kind: kind_name(b.kind),
                })
                .collect();
            let mut t = String::new();
            for e in &entries {
                writeln!(t, "{:<18} {}", e.name, e.kind).unwrap();
            }
            out.emit(&t, &entries)
        }
        BuiltinCommand::Show { name, output } => {
            let b = corpus::find(name)?;
            match output {
                Some(path) => write_file(path, b.text),
                None => {
                    print!("{}", b.text);
                    Ok(())
                }
            }
        }
    }
}
