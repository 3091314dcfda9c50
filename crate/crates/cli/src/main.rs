//! `gl3q`: verification reports for the GL(3) solution catalog.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use gl3q::catalog::{parse_matrix_text, solution_record, Catalog, RMatrixFile, Solution, SolutionRecord};
use gl3q::conditions::{verify_solution, Depth, SolutionVerdict, VerifyOptions};
use gl3q::poincare::{catalog_ordering, check_poincare, default_max_degree, Object, PoincareResult, RankOptions};
use gl3q::report::{ConditionReport, Status};
use gl3q::rmatrix::{check_appendix, check_hecke, check_twist, check_ybe, rmatrix_checks, twist_solution, TwistData};

/// Bumped whenever the JSON layout changes.
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "gl3q", version, about = "Exact verification of GL(3) quantum matrix group solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory with <family>.json and tables.json (default: built-in catalog).
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Seed for the random specialization points.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Rank over rational functions instead of at specialized points.
    #[arg(long, global = true)]
    symbolic_rank: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum DepthArg {
    Tensor,
    Poincare,
    Confluence,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ObjectArg {
    Plane,
    Coplane,
    Group,
    All,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct Selector {
    /// Record id, e.g. B1.
    #[arg(long)]
    solution: Option<String>,
    /// Family letter A..G.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    all: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the condition suite on catalog solutions.
    Verify {
        #[command(flatten)]
        select: Selector,
        #[arg(long, value_enum, default_value_t = DepthArg::Tensor)]
        depth: DepthArg,
        /// Degree cap for every graded dimension (default: planes 6, group 4).
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Yang-Baxter and Hecke checks for an R-matrix file, or for catalog R-matrices
    /// including comparison with the printed ones.
    Ybe {
        file: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["family", "all", "file"])]
        solution: Option<String>,
        #[arg(long, conflicts_with_all = ["all", "file"])]
        family: Option<String>,
        #[arg(long, conflicts_with = "file")]
        all: bool,
    },
    /// Graded dimensions of planes, coplanes and group algebras.
    Poincare {
        #[command(flatten)]
        select: Selector,
        #[arg(long, value_enum, default_value_t = ObjectArg::All)]
        object: ObjectArg,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Twist a solution by an automorphism Z and check the result.
    Twist {
        #[arg(long)]
        solution: String,
        /// `diag(a,b,c)` or `a,b,c; d,e,f; g,h,i`.
        #[arg(long)]
        z: String,
    },
    /// Inspect the catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List {
        #[arg(long)]
        family: Option<String>,
    },
    Show {
        id: String,
    },
}

#[derive(Serialize)]
struct Config {
    seed: u64,
    symbolic_rank: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    catalog: Option<String>,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema_version: u32,
    command: &'static str,
    config: Config,
    passed: bool,
    results: T,
}

/// Usage or input problem; exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, InputError> {
    let catalog = match &cli.catalog {
        Some(dir) => Catalog::load(dir)?,
        None => Catalog::builtin(),
    };
    let rank = RankOptions { seed: cli.seed, symbolic: cli.symbolic_rank, ..RankOptions::default() };
    match &cli.command {
        Command::Verify { select, depth, max_degree } => {
            let opts = VerifyOptions {
                depth: match depth {
                    DepthArg::Tensor => Depth::Tensor,
                    DepthArg::Poincare => Depth::Poincare,
                    DepthArg::Confluence => Depth::Confluence,
                },
                max_degree: *max_degree,
                rank,
            };
            let records = select_records(&catalog, select)?;
            let results: Vec<RecordVerdict> = records
                .par_iter()
                .map(|r| {
                    verify_solution(r, &catalog.tables, &opts)
                        .map(|v| RecordVerdict { id: r.id.clone(), solutions: v })
                        .map_err(InputError::from)
                })
                .collect::<Result<_, _>>()?;
            let passed = results.iter().all(|r| r.passed());
            emit(cli, "verify", passed, &results, || text_verify(&results))
        }
        Command::Ybe { file: Some(path), .. } => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let file = RMatrixFile::from_json(&text)?;
            let mut reports = Vec::new();
            for (label, m, q) in file.matrices()? {
                let mut rep = check_ybe(&m);
                if let Some(q) = q {
                    rep.extend(check_hecke(&m, &q));
                }
                rep.subject = label;
                reports.push(rep);
            }
            let passed = reports.iter().all(|r| r.passed());
            emit(cli, "ybe", passed, &reports, || text_reports(&reports))
        }
        Command::Ybe { file: None, solution, family, all } => {
            let select = Selector { solution: solution.clone(), family: family.clone(), all: *all };
            if select.solution.is_none() && select.family.is_none() && !select.all {
                return Err(InputError("give an R-matrix file or one of --solution/--family/--all".into()));
            }
            let records = select_records(&catalog, &select)?;
            let reports: Vec<ConditionReport> = records
                .par_iter()
                .map(|r| {
                    let mut out = Vec::new();
                    for sol in r.solutions()? {
                        let (mut rep, rm) = rmatrix_checks(&sol);
                        rep.extend(check_appendix(r, &sol, &rm.mat));
                        rep.subject = sol.label.clone();
                        out.push(rep);
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<Vec<_>>, InputError>>()?
                .into_iter()
                .flatten()
                .collect();
            let passed = reports.iter().all(|r| r.passed());
            emit(cli, "ybe", passed, &reports, || text_reports(&reports))
        }
        Command::Poincare { select, object, max_degree } => {
            let objects: Vec<Object> = match object {
                ObjectArg::Plane => vec![Object::Plane],
                ObjectArg::Coplane => vec![Object::Coplane],
                ObjectArg::Group => vec![Object::Group],
                ObjectArg::All => vec![Object::Plane, Object::Coplane, Object::Group],
            };
            let records = select_records(&catalog, select)?;
            let mut jobs: Vec<(&SolutionRecord, Solution, Object)> = Vec::new();
            for r in &records {
                for sol in r.solutions()? {
                    for &obj in &objects {
                        jobs.push((r, sol.clone(), obj));
                    }
                }
            }
            let results: Vec<PoincareEntry> = jobs
                .par_iter()
                .map(|(r, sol, obj)| {
                    let md = max_degree.unwrap_or(default_max_degree(*obj));
                    let order = catalog_ordering(r, *obj);
                    let (report, result) = check_poincare(sol, &r.excluded()?, *obj, order.as_deref(), md, &rank);
                    Ok(PoincareEntry { solution: sol.label.clone(), object: *obj, report, result })
                })
                .collect::<Result<_, InputError>>()?;
            let passed = results.iter().all(|e| e.report.passed());
            emit(cli, "poincare", passed, &results, || text_poincare(&results))
        }
        Command::Twist { solution, z } => {
            let (record, sol) = find_solution(&catalog, solution)?;
            let z = parse_matrix_text(z, &sol)?;
            let tw = TwistData::for_solution(&sol, z.clone())?;
            let report = check_twist(&sol, &z);
            let twisted = twist_solution(&sol, &tw).ok().map(|t| solution_record(&t, record));
            let out = TwistOut {
                solution: sol.label.clone(),
                z: z.m.iter().map(|r| r.iter().map(|x| x.render()).collect()).collect(),
                multiplier: tw.multiplier.as_ref().map(|m| m.m.iter().map(|r| r.iter().map(|x| x.render()).collect()).collect()),
                report,
                twisted,
            };
            let passed = out.report.passed() && out.twisted.is_some();
            emit(cli, "twist", passed, &out, || {
                let mut s = out.report.to_string();
                if let Some(rec) = &out.twisted {
                    s.push_str("twisted record:\n");
                    s.push_str(&serde_json::to_string_pretty(rec).unwrap_or_default());
                    s.push('\n');
                }
                s
            })
        }
        Command::Catalog { action: CatalogAction::List { family } } => {
            let rows: Vec<ListRow> = catalog
                .records()
                .iter()
                .filter(|r| family.as_deref().is_none_or(|f| r.family == f))
                .map(|r| ListRow {
                    id: r.id.clone(),
                    family: r.family.clone(),
                    table1_row: r.table1_row,
                    parameters: r.parameters.iter().map(|p| p.name.clone()).collect(),
                    variants: r.variants().len(),
                    orderable: r.orderings.is_some(),
                })
                .collect();
            emit(cli, "catalog", true, &rows, || {
                rows.iter()
                    .map(|r| {
                        let params = if r.parameters.is_empty() { "-".to_string() } else { r.parameters.join(",") };
                        format!(
                            "{:<4} family {}  table1 row {:<2}  params {:<8} variants {}{}\n",
                            r.id,
                            r.family,
                            r.table1_row,
                            params,
                            r.variants,
                            if r.orderable { "" } else { "  non-orderable" }
                        )
                    })
                    .collect()
            })
        }
        Command::Catalog { action: CatalogAction::Show { id } } => {
            let r = catalog.get(id)?;
            emit(cli, "catalog", true, r, || format!("{}\n", serde_json::to_string_pretty(r).unwrap_or_default()))
        }
    }
}

#[derive(Serialize)]
struct RecordVerdict {
    id: String,
    solutions: Vec<SolutionVerdict>,
}

impl RecordVerdict {
    fn passed(&self) -> bool {
        self.solutions.iter().all(|s| s.passed())
    }
}

#[derive(Serialize)]
struct PoincareEntry {
    solution: String,
    object: Object,
    report: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<PoincareResult>,
}

#[derive(Serialize)]
struct TwistOut {
    solution: String,
    z: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multiplier: Option<Vec<Vec<String>>>,
    report: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    twisted: Option<SolutionRecord>,
}

#[derive(Serialize)]
struct ListRow {
    id: String,
    family: String,
    table1_row: usize,
    parameters: Vec<String>,
    variants: usize,
    orderable: bool,
}

fn select_records<'a>(catalog: &'a Catalog, select: &Selector) -> Result<Vec<&'a SolutionRecord>, InputError> {
    if let Some(id) = &select.solution {
        return Ok(vec![catalog.get(id)?]);
    }
    let out: Vec<&SolutionRecord> =
        catalog.records().iter().filter(|r| select.family.as_deref().is_none_or(|f| r.family == f)).collect();
    if out.is_empty() {
        return Err(InputError(format!("no records in family {}", select.family.as_deref().unwrap_or("?"))));
    }
    Ok(out)
}

/// A record id (first discrete variant) or a full label such as `D1[g3=z3]`.
fn find_solution<'a>(catalog: &'a Catalog, name: &str) -> Result<(&'a SolutionRecord, Solution), InputError> {
    let id = name.split('[').next().unwrap_or(name);
    let record = catalog.get(id)?;
    let sols = record.solutions()?;
    let sol = if id == name {
        sols.into_iter().next()
    } else {
        sols.into_iter().find(|s| s.label == name)
    };
    sol.map(|s| (record, s)).ok_or_else(|| InputError(format!("no solution labelled {name}")))
}

fn emit<T: Serialize + ?Sized>(
    cli: &Cli,
    command: &'static str,
    passed: bool,
    results: &T,
    text: impl FnOnce() -> String,
) -> Result<bool, InputError> {
    match cli.format {
        Format::Text => print!("{}", text()),
        Format::Json => {
            let env = Envelope {
                schema_version: SCHEMA_VERSION,
                command,
                config: Config {
                    seed: cli.seed,
                    symbolic_rank: cli.symbolic_rank,
                    catalog: cli.catalog.as_ref().map(|p| p.display().to_string()),
                },
                passed,
                results,
            };
            println!("{}", serde_json::to_string_pretty(&env)?);
        }
    }
    Ok(passed)
}

fn text_reports(reports: &[ConditionReport]) -> String {
    reports.iter().map(|r| r.to_string()).collect()
}

fn text_verify(results: &[RecordVerdict]) -> String {
    let mut s = String::new();
    for rec in results {
        for v in &rec.solutions {
            let checks: usize = v.sections.iter().map(|r| r.checks.len()).sum();
            let expected: Vec<&str> = v
                .sections
                .iter()
                .flat_map(|r| &r.checks)
                .filter(|c| c.status == Status::Expected)
                .map(|c| c.name.as_str())
                .collect();
            s.push_str(&format!("{:<14} {}  {checks} checks", v.label, if v.passed() { "PASS" } else { "FAIL" }));
            if !expected.is_empty() {
                s.push_str(&format!("  expected: {}", expected.join(", ")));
            }
            s.push('\n');
            for (obj, res) in &v.poincare {
                let dims: Vec<String> = res.dims().iter().map(|d| d.to_string()).collect();
                s.push_str(&format!("    {obj:<8} {}\n", dims.join(", ")));
            }
            for o in &v.orderings {
                let ok = o.ambiguities.iter().filter(|a| a.resolved).count();
                s.push_str(&format!(
                    "    {:<8} {} rules, {ok}/{} ambiguities resolved\n",
                    o.object.name(),
                    o.rules,
                    o.ambiguities.len()
                ));
            }
            for rep in &v.sections {
                for c in rep.failures() {
                    s.push_str(&format!("    FAIL {}: {}", rep.subject, c.name));
                    if let Some(w) = &c.witness {
                        s.push_str(&format!(" at {:?} residual {}", w.index, w.value));
                    }
                    if let Some(d) = &c.detail {
                        s.push_str(&format!(" ({d})"));
                    }
                    s.push('\n');
                }
            }
        }
    }
    let ok = results.iter().filter(|r| r.passed()).count();
    s.push_str(&format!("{ok}/{} records pass\n", results.len()));
    s
}

fn text_poincare(results: &[PoincareEntry]) -> String {
    let mut s = String::new();
    for e in results {
        let dims = match &e.result {
            Some(r) => r.dims().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "),
            None => e.report.failures().iter().filter_map(|c| c.detail.clone()).collect::<Vec<_>>().join("; "),
        };
        s.push_str(&format!(
            "{:<14} {:<8} {}  {dims}\n",
            e.solution,
            e.object.name(),
            if e.report.passed() { "PASS" } else { "FAIL" }
        ));
    }
    s
}
