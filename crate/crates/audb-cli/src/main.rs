//! Command-line driver: execute JSON plans over CSV uncertain relations,
//! check plans against enumerated possible worlds, benchmark the engines,
//! and fuzz the operator suite.
//!
//! Exit codes: 0 on success, 1 when a bound violation is found (with a
//! witness printed), 2 on invalid plans, schemas, or files.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use audb::algebra::AggFunc;
use audb::csv_io::{read_csv, write_csv};
use audb::heap::ConnectedHeap;
use audb::native;
use audb::oracle::{self, IncompleteSpec};
use audb::ordering::{self, SortSpec};
use audb::plan::{Engine, Plan};
use audb::relation::{AuRelation, BagRelation};
use audb::synth::uniform_relation;
use audb::window::{self, WindowSpec};

#[derive(Parser)]
#[command(name = "audb", about = "Uncertain-database query processing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a JSON plan over CSV inputs and write the result as CSV.
    Run {
        /// Plan file (JSON operator tree).
        plan: PathBuf,
        /// Input tables as NAME=PATH; a bare PATH binds the plan's only table.
        inputs: Vec<String>,
        /// Result CSV path.
        #[arg(long)]
        output: PathBuf,
        /// Force every order-based operator onto one engine.
        #[arg(long)]
        engine: Option<String>,
    },
    /// Enumerate the worlds of an incomplete-database spec and verify that
    /// the plan's uncertain result bounds every world's result.
    Check {
        /// Spec file (JSON incomplete database).
        spec: PathBuf,
        /// Plan file (JSON operator tree scanning one table).
        plan: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        world_cap: u64,
        #[arg(long)]
        engine: Option<String>,
        /// Key attributes for tight-vs-uncertain bound reporting.
        #[arg(long)]
        anchor: Vec<String>,
        /// Numeric result column to report bounds for.
        #[arg(long)]
        column: Option<String>,
        /// Corrupt the uncertain result before checking (drops one row), to
        /// demonstrate violation detection.
        #[arg(long)]
        corrupt: bool,
    },
    /// Synthesize uniform data and time an operator.
    Bench {
        /// One of: sort, topk, window, heap.
        #[arg(long, default_value = "sort")]
        op: String,
        #[arg(long, default_value_t = 50_000)]
        n: usize,
        /// Percentage of uncertain rows.
        #[arg(long, default_value_t = 5.0)]
        uncertainty: f64,
        /// Maximum attribute range.
        #[arg(long, default_value_t = 1_000)]
        range: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Top-k cutoff for `--op topk`.
        #[arg(long, default_value_t = 10)]
        k: u64,
        /// Window width (rows) for `--op window`.
        #[arg(long, default_value_t = 3)]
        window: i64,
        /// Timing CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fuzz the operator suite against random incomplete databases.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        cases: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        world_cap: u64,
        #[arg(long)]
        engine: Option<String>,
    },
}

fn parse_engine(s: Option<&str>) -> Result<Option<Engine>, String> {
    match s {
        None => Ok(None),
        Some("reference") => Ok(Some(Engine::Reference)),
        Some("native") => Ok(Some(Engine::Native)),
        Some(other) => Err(format!("unknown engine `{other}` (reference|native)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Run { plan, inputs, output, engine } => cmd_run(&plan, &inputs, &output, engine),
        Cmd::Check {
            spec,
            plan,
            world_cap,
            engine,
            anchor,
            column,
            corrupt,
        } => cmd_check(&spec, &plan, world_cap, engine, &anchor, column.as_deref(), corrupt),
        Cmd::Bench { op, n, uncertainty, range, seed, k, window, output } => {
            cmd_bench(&op, n, uncertainty, range, seed, k, window, output.as_deref())
        }
        Cmd::Fuzz { cases, seed, world_cap, engine } => cmd_fuzz(cases, seed, world_cap, engine),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_to_string(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_plan(path: &PathBuf, engine: Option<String>) -> Result<Plan, String> {
    let mut plan = Plan::from_json(&read_to_string(path)?).map_err(|e| e.to_string())?;
    if let Some(engine) = parse_engine(engine.as_deref())? {
        plan.set_engine(engine);
        plan.validate().map_err(|e| e.to_string())?;
    }
    Ok(plan)
}

fn cmd_run(
    plan_path: &PathBuf,
    inputs: &[String],
    output: &PathBuf,
    engine: Option<String>,
) -> Result<ExitCode, String> {
    let plan = load_plan(plan_path, engine)?;
    let mut tables: HashMap<String, AuRelation> = HashMap::new();
    for input in inputs {
        let (name, path) = match input.split_once('=') {
            Some((name, path)) => (name.to_string(), path.to_string()),
            None => match plan.tables().as_slice() {
                [only] => (only.to_string(), input.clone()),
                _ => {
                    return Err(format!(
                        "input `{input}` must be NAME=PATH when the plan scans several tables"
                    ))
                }
            },
        };
        tables.insert(name, read_csv(&path).map_err(|e| e.to_string())?);
    }
    for table in plan.tables() {
        if !tables.contains_key(table) {
            return Err(format!("no input bound for table `{table}`"));
        }
    }
    let result = plan.eval(&tables).map_err(|e| e.to_string())?;
    write_csv(&result, output).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    spec_path: &PathBuf,
    plan_path: &PathBuf,
    world_cap: u64,
    engine: Option<String>,
    anchor: &[String],
    column: Option<&str>,
    corrupt: bool,
) -> Result<ExitCode, String> {
    let spec: IncompleteSpec = serde_json::from_str(&read_to_string(spec_path)?)
        .map_err(|e| format!("invalid spec JSON: {e}"))?;
    let plan = load_plan(plan_path, engine)?;
    let table = match plan.tables().as_slice() {
        [only] => only.to_string(),
        tables => return Err(format!("check requires a single-table plan, got {tables:?}")),
    };

    let worlds = spec.enumerate_worlds(world_cap).map_err(|e| e.to_string())?;
    let au = spec.to_au().map_err(|e| e.to_string())?;
    let mut au_result = plan
        .eval(&HashMap::from([(table.clone(), au)]))
        .map_err(|e| e.to_string())?;
    if corrupt {
        let rows: Vec<_> = au_result.rows().map(|(t, m)| (t.clone(), *m)).skip(1).collect();
        au_result =
            AuRelation::from_rows(au_result.schema().clone(), rows).map_err(|e| e.to_string())?;
    }
    let eval_world = |w: &BagRelation| plan.eval_world(&HashMap::from([(table.clone(), w.clone())]));
    let world_results = worlds
        .iter()
        .map(eval_world)
        .collect::<audb::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;

    if let Some(column) = column {
        let tight = oracle::tight_bounds(&worlds, eval_world, anchor, Some(column))
            .map_err(|e| e.to_string())?;
        let c_idx = au_result
            .schema()
            .index_of(column)
            .map_err(|e| e.to_string())?;
        let a_idx = anchor
            .iter()
            .map(|name| au_result.schema().index_of(name))
            .collect::<audb::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        for (tuple, _) in au_result.rows() {
            let key: Vec<_> = a_idx.iter().map(|&i| tuple.values()[i].sg().clone()).collect();
            let lb = tuple.values()[c_idx].lb().as_real().map_err(|e| e.to_string())?;
            let ub = tuple.values()[c_idx].ub().as_real().map_err(|e| e.to_string())?;
            let label: Vec<String> = anchor
                .iter()
                .zip(&key)
                .map(|(name, v)| format!("{name}={v}"))
                .collect();
            match tight.values.get(&key) {
                Some(&(lo, hi)) => println!(
                    "anchor [{}]: tight [{lo}, {hi}], bounds [{lb}, {ub}], recall {}, accuracy {}",
                    label.join(", "),
                    oracle::bound_recall((lb, ub), (lo, hi)),
                    oracle::bound_accuracy((lb, ub), (lo, hi)),
                ),
                None => println!(
                    "anchor [{}]: bounds [{lb}, {ub}], absent from every world",
                    label.join(", ")
                ),
            }
        }
    }

    let report = oracle::check_preservation(&au_result, &world_results).map_err(|e| e.to_string())?;
    if report.pass {
        println!("pass: {} worlds bounded", worlds.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("violation: {}", report.detail.unwrap_or_default());
        Ok(ExitCode::from(1))
    }
}

/// Restrict a relation to its first `m` rows, for reference-engine spot
/// checks on sizes the quadratic definitions can handle.
fn prefix(r: &AuRelation, m: usize) -> AuRelation {
    AuRelation::from_rows(
        r.schema().clone(),
        r.rows().take(m).map(|(t, a)| (t.clone(), *a)),
    )
    .expect("rows come from a checked relation")
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    op: &str,
    n: usize,
    uncertainty: f64,
    range: u64,
    seed: u64,
    k: u64,
    window: i64,
    output: Option<&std::path::Path>,
) -> Result<ExitCode, String> {
    let frac = uncertainty / 100.0;
    if !(0.0..=1.0).contains(&frac) {
        return Err(format!("uncertainty {uncertainty}% out of range"));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut lines = vec!["op,engine,n,uncertainty,range,seed,millis".to_string()];
    let record = |lines: &mut Vec<String>, engine: &str, millis: f64| {
        lines.push(format!("{op},{engine},{n},{uncertainty},{range},{seed},{millis:.3}"));
    };

    match op {
        "sort" | "topk" | "window" => {
            let r = uniform_relation(&mut rng, n, frac, range);
            let order = SortSpec::asc(&["A", "K"]);
            let spec = WindowSpec {
                f: AggFunc::Sum,
                attr: Some("A".into()),
                output: "X".into(),
                partition_by: vec![],
                order: order.clone(),
                l: 1 - window.max(1),
                u: 0,
            };
            let run_native = |r: &AuRelation| -> audb::Result<AuRelation> {
                match op {
                    "sort" => native::onepass_sort(r, &order, None, "pos"),
                    "topk" => native::onepass_sort(r, &order, Some(k), "pos"),
                    _ => native::onepass_window(r, &spec),
                }
            };
            let run_reference = |r: &AuRelation| -> audb::Result<AuRelation> {
                match op {
                    "sort" => ordering::sort(r, &order, "pos"),
                    "topk" => ordering::topk(r, &order, k, "pos"),
                    _ => window::window_aggregate(r, &spec),
                }
            };
            let start = Instant::now();
            let native_out = run_native(&r).map_err(|e| e.to_string())?;
            record(&mut lines, "native", start.elapsed().as_secs_f64() * 1e3);
            drop(native_out);
            // Spot-check engine agreement on a prefix the reference
            // definitions can evaluate quickly.
            let small = prefix(&r, n.min(500));
            let start = Instant::now();
            let reference_out = run_reference(&small).map_err(|e| e.to_string())?;
            record(&mut lines, "reference-500", start.elapsed().as_secs_f64() * 1e3);
            let native_small = run_native(&small).map_err(|e| e.to_string())?;
            if native_small != reference_out {
                println!("engine disagreement on the spot-check prefix");
                return Ok(ExitCode::from(1));
            }
        }
        "heap" => {
            // The sweep workload keeps only uncertain rows open: insert that
            // many records, then drain by alternately popping the component
            // minima. The baseline keeps one flat list per run and extracts
            // minima by linear scan.
            let m = ((n as f64 * frac).ceil() as usize).max(1);
            let records: Vec<(i64, i64)> = (0..m)
                .map(|_| (rng.gen_range(0..1 << 20), rng.gen_range(0..1 << 20)))
                .collect();
            let start = Instant::now();
            let mut h = ConnectedHeap::new(vec![
                Box::new(|a: &(i64, i64), b: &(i64, i64)| a.0.cmp(&b.0)),
                Box::new(|a: &(i64, i64), b: &(i64, i64)| a.1.cmp(&b.1)),
            ]);
            for r in &records {
                h.insert(*r);
            }
            let mut connected_sum = 0i64;
            let mut c = 0;
            while let Some(r) = h.pop(c) {
                connected_sum += r.0 + r.1;
                c = 1 - c;
            }
            let connected = start.elapsed().as_secs_f64() * 1e3;
            record(&mut lines, "connected", connected);

            let start = Instant::now();
            let mut flat = records.clone();
            let mut linear_sum = 0i64;
            let mut c = 0;
            while !flat.is_empty() {
                let key = |r: &(i64, i64)| if c == 0 { r.0 } else { r.1 };
                let i = flat
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, r)| key(r))
                    .map(|(i, _)| i)
                    .expect("non-empty");
                let r = flat.swap_remove(i);
                linear_sum += r.0 + r.1;
                c = 1 - c;
            }
            let linear = start.elapsed().as_secs_f64() * 1e3;
            record(&mut lines, "linear", linear);
            if connected_sum != linear_sum {
                println!("heap implementations drained different multisets");
                return Ok(ExitCode::from(1));
            }
            lines.push(format!("{op},ratio,{n},{uncertainty},{range},{seed},{:.3}", linear / connected));
        }
        other => return Err(format!("unknown bench op `{other}` (sort|topk|window|heap)")),
    }

    let text = lines.join("\n") + "\n";
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fuzz(
    cases: u64,
    seed: u64,
    world_cap: u64,
    engine: Option<String>,
) -> Result<ExitCode, String> {
    let engine = parse_engine(engine.as_deref())?.unwrap_or(Engine::Reference);
    let mut rng = StdRng::seed_from_u64(seed);
    let plans = oracle::operator_plans();
    for case in 0..cases {
        let spec = oracle::random_spec(&mut rng, 4);
        match oracle::check_spec(&spec, &plans, world_cap, engine).map_err(|e| e.to_string())? {
            None => {}
            Some((operator, report)) => {
                println!("violation in case {case}, operator {operator}:");
                println!("  {}", report.detail.unwrap_or_default());
                println!(
                    "  spec: {}",
                    serde_json::to_string(&spec).map_err(|e| e.to_string())?
                );
                return Ok(ExitCode::from(1));
            }
        }
    }
    println!("{cases} cases passed against {} operators", plans.len());
    Ok(ExitCode::SUCCESS)
}
