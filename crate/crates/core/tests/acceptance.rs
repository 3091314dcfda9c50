//! Acceptance criteria over the built-in catalog: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed. Exits
//! nonzero when a criterion fails for a reason not listed in `KNOWN`, or when a
//! listed discrepancy stops occurring.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gl3q::catalog::{solution_record, validate_record, Catalog, RMatrixFile, Solution, SolutionRecord, Tables};
use gl3q::conditions::tensor_checks;
use gl3q::poincare::{
    catalog_ordering, check_poincare, confluence_checks, default_max_degree, Object, PoincareResult, RankOptions,
};
use gl3q::report::{ConditionReport, Status};
use gl3q::rmatrix::{check_appendix, check_hecke, check_ybe, rmatrix_checks, solve_q, twist_suite};
use gl3q::scalar::{Domain, Param, Scalar};
use gl3q::tensor::{decompose, recompose, SqMatrix, Tensor3, Variance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Failures that are reproduced faithfully and reported, not hidden.
/// C1: the printed block is a nonzero multiple of P·R̂, so it is not entrywise
/// equal to P·R̂ and fails the Hecke identity with the printed q.
/// F8: E²²² can take any value and all conditions still hold; F8 has no printed
/// block that would pin it, so this mutation lands on another solution.
const KNOWN: &[&str] = &["C1 appendix_equal", "file C1: C1 hecke", "F8 mutation E[13]"];

const OBJECTS: [Object; 3] = [Object::Plane, Object::Coplane, Object::Group];

struct Outcome {
    title: &'static str,
    failures: Vec<String>,
    detail: String,
    elapsed: Duration,
}

fn failures_of(label: &str, rep: &ConditionReport) -> Vec<String> {
    rep.failures()
        .iter()
        .map(|c| match &c.detail {
            Some(d) => format!("{label} {} ({d})", c.name),
            None => format!("{label} {}", c.name),
        })
        .collect()
}

fn known_entry(f: &str) -> Option<&'static str> {
    KNOWN.iter().copied().find(|k| f == *k || f.starts_with(&format!("{k} ")))
}

fn budget(failures: &mut Vec<String>, what: &str, took: Duration, limit: Duration) {
    if took > limit {
        failures.push(format!("{what} took {took:.1?}, limit {limit:?}"));
    }
}

type Variants = Vec<(SolutionRecord, Solution)>;

fn criterion_1(all: &Variants, records: usize) -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    if records != 26 {
        failures.push(format!("catalog has {records} records, expected 26"));
    }
    for (_, s) in all {
        failures.extend(failures_of(&s.label, &tensor_checks(&s.e, &s.f, &s.x, &s.q_matrix)));
    }
    budget(&mut failures, "tensor suite", t.elapsed(), Duration::from_secs(120));
    Outcome {
        title: "tensor-condition suite, exact zero residuals",
        detail: format!("{records} records, {} instances", all.len()),
        failures,
        elapsed: t.elapsed(),
    }
}

fn criterion_2(all: &Variants) -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut classes = BTreeMap::new();
    for (_, s) in all {
        let tr = s.x.mul(&s.q_matrix).trace();
        let dom = &s.dom;
        let (a, b) = match solve_q(&tr) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{} solve_q: {e}", s.label));
                continue;
            }
        };
        let set: BTreeSet<String> = [a.render(), b.render()].into();
        let (class, ok) = if tr == Scalar::from_int(dom, 3) {
            ("{1}", a.is_one() && b.is_one())
        } else if tr.is_zero() {
            let z = |k| Scalar::root_of_unity(dom, 3, k).unwrap();
            ("{z3, z3^2}", set == [z(1).render(), z(2).render()].into())
        } else {
            let u = &s.q;
            let ok = (&a == u || &b == u)
                && (&a * &b).is_one()
                && a != b
                && &(&Scalar::one(dom) + u) + &u.inv().unwrap() == tr;
            ("{u, 1/u}", ok)
        };
        *classes.entry(class).or_insert(0) += 1;
        if !ok {
            failures.push(format!("{} roots {{{}}} for tr(XQ) = {}", s.label, set.into_iter().collect::<Vec<_>>().join(", "), tr));
        }
        if a != s.q && b != s.q {
            failures.push(format!("{} catalog q = {} is not a root", s.label, s.q));
        }
    }
    let detail = classes.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join(", ");
    Outcome { title: "q-roots of tr(XQ)", detail, failures, elapsed: t.elapsed() }
}

fn criterion_3(all: &Variants) -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut compared = 0;
    let mut involutions = 0;
    for (r, s) in all {
        let (rep, rm) = rmatrix_checks(s);
        failures.extend(failures_of(&s.label, &rep));
        if ["A", "F", "G"].contains(&r.family.as_str()) && !s.q.is_one() {
            failures.push(format!("{} family {} has q = {}", s.label, r.family, s.q));
        }
        if s.q.is_one() {
            let sq = rm.mat.mul(&rm.mat).sub(&SqMatrix::identity(&s.dom, 9));
            if sq.is_zero() {
                involutions += 1;
            } else {
                failures.push(format!("{} R̂² ≠ 1", s.label));
            }
        }
        let app = check_appendix(r, s, &rm.mat);
        if app.checks.iter().any(|c| c.status != Status::Skipped) {
            compared += 1;
        }
        failures.extend(failures_of(&s.label, &app));
    }
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../appendixA");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map(|d| d.filter_map(|e| e.ok().map(|e| e.path())).collect())
        .unwrap_or_default();
    files.retain(|p| p.extension().is_some_and(|e| e == "json"));
    files.sort();
    let mut matrices = 0;
    if files.is_empty() {
        failures.push(format!("no R-matrix files in {}", dir.display()));
    }
    for p in &files {
        let name = p.file_stem().unwrap().to_string_lossy().to_string();
        let parsed = std::fs::read_to_string(p)
            .map_err(|e| e.to_string())
            .and_then(|t| RMatrixFile::from_json(&t).map_err(|e| e.to_string()))
            .and_then(|f| f.matrices().map_err(|e| e.to_string()));
        match parsed {
            Ok(ms) => {
                for (label, m, q) in ms {
                    matrices += 1;
                    failures.extend(failures_of(&format!("file {name}: {label}"), &check_ybe(&m)));
                    if let Some(q) = q {
                        failures.extend(failures_of(&format!("file {name}: {label}"), &check_hecke(&m, &q)));
                    }
                }
            }
            Err(e) => failures.push(format!("file {name}: {e}")),
        }
    }
    budget(&mut failures, "R-matrix suite", t.elapsed(), Duration::from_secs(300));
    Outcome {
        title: "Yang-Baxter, Hecke, R̂²=1 and printed blocks",
        detail: format!(
            "{} instances, {involutions} involutions, {compared} printed blocks compared, {matrices} matrices from {} files",
            all.len(),
            files.len()
        ),
        failures,
        elapsed: t.elapsed(),
    }
}

type Dims = BTreeMap<(String, Object), Vec<usize>>;

fn criterion_4(all: &Variants) -> (Outcome, Dims) {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut dims = Dims::new();
    let mut slowest = (Duration::ZERO, String::new());
    let opts = RankOptions::default();
    for (r, s) in all {
        let excluded = match r.excluded() {
            Ok(e) => e,
            Err(e) => {
                failures.push(format!("{} {e}", s.label));
                continue;
            }
        };
        for obj in OBJECTS {
            let start = Instant::now();
            let order = catalog_ordering(r, obj);
            let (rep, res) = check_poincare(s, &excluded, obj, order.as_deref(), default_max_degree(obj), &opts);
            let took = start.elapsed();
            failures.extend(failures_of(&s.label, &rep));
            if obj == Object::Group {
                budget(&mut failures, &format!("{} group rank", s.label), took, Duration::from_secs(600));
                if took > slowest.0 {
                    slowest = (took, s.label.clone());
                }
            }
            if let Some(res) = res {
                dims.insert((s.label.clone(), obj), res.dims());
            }
        }
        if r.family == "B" {
            let sym = RankOptions { symbolic: true, ..RankOptions::default() };
            for obj in OBJECTS {
                let order = catalog_ordering(r, obj);
                let (_, res) = check_poincare(s, &excluded, obj, order.as_deref(), 3, &sym);
                let got = res.as_ref().map(PoincareResult::dims);
                let want = dims.get(&(s.label.clone(), obj)).map(|d| d[..3].to_vec());
                if got.is_none() || got != want {
                    failures.push(format!("{} {} symbolic {got:?} vs specialized {want:?}", s.label, obj.name()));
                }
            }
        }
    }
    let outcome = Outcome {
        title: "Poincaré dimensions (planes to degree 6, group to degree 4)",
        detail: format!(
            "{} instances, symbolic agreement on family B to degree 3, slowest group {} {:.1?}",
            all.len(),
            slowest.1,
            slowest.0
        ),
        failures,
        elapsed: t.elapsed(),
    };
    (outcome, dims)
}

fn criterion_5(all: &Variants) -> (Outcome, Dims) {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut counts = Dims::new();
    let mut orderable = 0;
    let mut non_orderable = 0;
    for (r, s) in all {
        let (rep, outs) = confluence_checks(s, r, 4);
        failures.extend(failures_of(&s.label, &rep));
        if r.orderings.is_none() {
            for name in ["plane_non_orderable", "coplane_non_orderable"] {
                match rep.get(name) {
                    Some(c) if c.status == Status::Expected => {}
                    other => failures.push(format!("{} {name}: {:?}", s.label, other.map(|c| c.status))),
                }
            }
            non_orderable += 1;
            continue;
        }
        orderable += 1;
        let shape: Vec<(Object, usize, usize, bool)> = outs
            .iter()
            .map(|o| (o.object, o.rules, o.ambiguities.len(), o.ambiguities.iter().all(|a| a.resolved)))
            .collect();
        let want = vec![
            (Object::Plane, 3, 1, true),
            (Object::Coplane, 3, 1, true),
            (Object::Group, 36, 84, true),
        ];
        if shape != want {
            failures.push(format!("{} rules/ambiguities {shape:?}", s.label));
        }
        for o in outs {
            counts.insert((s.label.clone(), o.object), o.normal_counts);
        }
    }
    let outcome = Outcome {
        title: "substitution systems and ambiguity resolution",
        detail: format!("{orderable} orderable instances, {non_orderable} expected non-orderable"),
        failures,
        elapsed: t.elapsed(),
    };
    (outcome, counts)
}

fn criterion_6(all: &Variants) -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut families = 0;
    let mut instances = 0;
    for (r, s) in all {
        if r.automorphisms.is_empty() {
            continue;
        }
        let outs = twist_suite(s, r);
        let mut per_family: BTreeMap<usize, usize> = BTreeMap::new();
        for o in &outs {
            let n: usize = o.instance.split_whitespace().nth(1).and_then(|w| w.trim_end_matches(':').parse().ok()).unwrap_or(0);
            *per_family.entry(n).or_insert(0) += 1;
            failures.extend(failures_of(&format!("{} twist {}", s.label, o.instance), &o.report));
        }
        for n in 1..=r.automorphisms.len() {
            let k = per_family.get(&n).copied().unwrap_or(0);
            if k < 2 {
                failures.push(format!("{} automorphism family {n}: {k} instances", s.label));
            }
        }
        families += r.automorphisms.len();
        instances += outs.len();
    }
    Outcome {
        title: "twist covariance",
        detail: format!("{families} automorphism families, {instances} instances"),
        failures,
        elapsed: t.elapsed(),
    }
}

fn random_scalar(rng: &mut ChaCha8Rng, dom: &Arc<Domain>) -> Scalar {
    let u = Scalar::param(dom, "u").unwrap();
    let z = Scalar::root_of_unity(dom, 3, 1).unwrap();
    let mut num = Scalar::zero(dom);
    for k in 0..rng.gen_range(1..=3) {
        let c = Scalar::from_ratio(dom, rng.gen_range(-9..=9), rng.gen_range(1..=5));
        num = num + c * z.pow(rng.gen_range(0..3)).unwrap() * u.pow(k).unwrap();
    }
    if rng.gen_bool(0.3) {
        let den = Scalar::one(dom) + Scalar::from_int(dom, rng.gen_range(1..=4)) * &u;
        num = num.checked_div(&den).unwrap();
    }
    num
}

fn random_tensor(rng: &mut ChaCha8Rng, dom: &Arc<Domain>) -> Tensor3 {
    let variance = if rng.gen_bool(0.5) { Variance::Lower } else { Variance::Upper };
    Tensor3::from_fn(variance, |_, _, _| {
        if rng.gen_bool(0.3) {
            Scalar::zero(dom)
        } else {
            random_scalar(rng, dom)
        }
    })
}

#[allow(clippy::eq_op)]
fn field_axioms(rng: &mut ChaCha8Rng, dom: &Arc<Domain>, samples: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 0..samples {
        let (a, b, c) = (random_scalar(rng, dom), random_scalar(rng, dom), random_scalar(rng, dom));
        let zero = Scalar::zero(dom);
        let one = Scalar::one(dom);
        let laws = [
            ("add_comm", &a + &b == &b + &a),
            ("mul_comm", &a * &b == &b * &a),
            ("add_assoc", &(&a + &b) + &c == &a + &(&b + &c)),
            ("mul_assoc", &(&a * &b) * &c == &a * &(&b * &c)),
            ("distrib", &a * &(&b + &c) == &(&a * &b) + &(&a * &c)),
            ("add_zero", &a + &zero == a),
            ("mul_one", &a * &one == a),
            ("sub_self", (&a - &a).is_zero()),
            ("inverse", a.is_zero() || (&a * &a.inv().unwrap()).is_one()),
        ];
        out.extend(laws.iter().filter(|(_, ok)| !ok).map(|(law, _)| format!("sample {n} {law}: a = {a}, b = {b}, c = {c}")));
    }
    out
}

fn decomposition_round_trips(rng: &mut ChaCha8Rng, dom: &Arc<Domain>, count: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 0..count {
        let t = random_tensor(rng, dom);
        let d = decompose(&t);
        let symmetric = (0..3).all(|i| {
            (0..3).all(|j| {
                (0..3).all(|k| d.phi.get(i, j, k) == d.phi.get(j, i, k) && d.phi.get(i, j, k) == d.phi.get(i, k, j))
            })
        });
        if recompose(&d) != t || !d.s.trace().is_zero() || !d.t.trace().is_zero() || !symmetric {
            out.push(format!("random tensor {n} does not round-trip"));
        }
    }
    out
}

/// Adds a random nonzero rational to one entry of E, F, X, Q or to q.
fn mutate(rng: &mut ChaCha8Rng, s: &Solution) -> (String, Solution) {
    let mut m = s.clone();
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let delta = Scalar::from_ratio(&s.dom, sign * rng.gen_range(1..=9), rng.gen_range(1..=7));
    let slot = rng.gen_range(0..27 + 27 + 9 + 9 + 1);
    let bump = |x: &mut Scalar| *x = &*x + &delta;
    let label = match slot {
        0..=26 => {
            bump(&mut m.e.v[slot]);
            format!("E[{slot}]")
        }
        27..=53 => {
            bump(&mut m.f.v[slot - 27]);
            format!("F[{}]", slot - 27)
        }
        54..=62 => {
            let p = slot - 54;
            bump(&mut m.x.m[p / 3][p % 3]);
            format!("X[{p}]")
        }
        63..=71 => {
            let p = slot - 63;
            bump(&mut m.q_matrix.m[p / 3][p % 3]);
            format!("Q[{p}]")
        }
        _ => {
            bump(&mut m.q);
            "q".to_string()
        }
    };
    (format!("{label} += {delta}"), m)
}

/// Whether any per-solution check rejects `m`: tensor conditions, table
/// classification, R-matrix checks, and the printed block when there is one.
fn detects(record: &SolutionRecord, tables: &Tables, m: &Solution) -> bool {
    if !tensor_checks(&m.e, &m.f, &m.x, &m.q_matrix).passed() {
        return true;
    }
    if !validate_record(&solution_record(m, record), tables).passed() {
        return true;
    }
    let (rep, rm) = rmatrix_checks(m);
    !rep.passed() || !check_appendix(record, m, &rm.mat).passed()
}

fn criterion_7(all: &Variants, tables: &Tables, dims: &Dims, counts: &Dims) -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dom = Domain::new(3, vec![Param::new("u", 1)]);
    let mut failures = decomposition_round_trips(&mut rng, &dom, 20);
    failures.extend(field_axioms(&mut rng, &dom, 200));
    let mut mutations = 0;
    for (r, s) in all {
        for _ in 0..10 {
            let (what, m) = mutate(&mut rng, s);
            mutations += 1;
            if !detects(r, tables, &m) {
                failures.push(format!("{} mutation {what} passes every check", s.label));
            }
        }
    }
    let mut compared = 0;
    for ((label, obj), nc) in counts {
        match dims.get(&(label.clone(), *obj)) {
            Some(d) if d.len() >= 4 && nc.len() >= 4 && d[..4] == nc[..4] => compared += 1,
            other => failures.push(format!("{label} {} normal words {nc:?} vs rank {other:?}", obj.name())),
        }
    }
    Outcome {
        title: "property suites",
        detail: format!(
            "20 decompositions, 200 axiom samples, {mutations} mutations, {compared} rewriting/rank comparisons"
        ),
        failures,
        elapsed: t.elapsed(),
    }
}

fn main() -> ExitCode {
    let catalog = Catalog::builtin();
    let mut all: Variants = Vec::new();
    for r in catalog.records() {
        for s in r.solutions().expect("catalog instantiates") {
            all.push((r.clone(), s));
        }
    }
    let records = catalog.records().len();
    let mut outcomes = vec![criterion_1(&all, records), criterion_2(&all), criterion_3(&all)];
    let (o4, dims) = criterion_4(&all);
    outcomes.push(o4);
    let (o5, counts) = criterion_5(&all);
    outcomes.push(o5);
    outcomes.push(criterion_6(&all));
    outcomes.push(criterion_7(&all, &catalog.tables, &dims, &counts));

    let mut unexpected = 0;
    let mut seen_known: HashMap<&str, bool> = KNOWN.iter().map(|k| (*k, false)).collect();
    for (n, o) in outcomes.iter().enumerate() {
        let verdict = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}  {verdict}  {}  [{}; {:.1?}]", n + 1, o.title, o.detail, o.elapsed);
        for f in &o.failures {
            match known_entry(f) {
                Some(k) => {
                    seen_known.insert(k, true);
                    println!("    known discrepancy: {f}");
                }
                None => {
                    unexpected += 1;
                    println!("    {f}");
                }
            }
        }
    }
    let stale: Vec<&str> = seen_known.iter().filter(|(_, s)| !**s).map(|(k, _)| *k).collect();
    for k in &stale {
        println!("known discrepancy no longer occurs: {k}");
    }
    let passed = outcomes.iter().filter(|o| o.failures.is_empty()).count();
    println!("{passed}/{} criteria pass; {unexpected} unexpected failures", outcomes.len());
    if unexpected == 0 && stale.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
