use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use cds_core::bounds::{classify_linear_capacity, linear_converse_bound};
use cds_core::catalog::{self, EntryKind};
use cds_core::graph::{rho_with, CdsInstance, CoverOptions, Edge};
use cds_core::scheme::{entropic_oracle_edge, simulate, verify_linear, LinearScheme, OracleOutcome, DEFAULT_ORACLE_BUDGET};
use cds_core::search::{random_scheme_search, PayloadMode, SearchParams};
use cds_core::synth::synthesize_detailed;
use clap::{Parser, Subcommand};
use serde::Serialize;

/// Conditional disclosure of secrets: covering parameter, bounds, synthesis and verification.
///
/// Instance and scheme arguments are file paths; a name from `cds catalog list`
/// is accepted when no such file exists.
#[derive(Parser)]
#[command(name = "cds", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Covering parameter rho with a witness (e, P, M).
    Rho {
        instance: String,
        /// Longest unqualified path to enumerate, in edges.
        #[arg(long)]
        max_path_len: Option<usize>,
        /// Exact covers even in components with many qualified edges.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Linear converse bound (rho-1)/(2 rho), or 1/2 when rho is infinite.
    Bound { instance: String },
    /// Linear capacity verdict.
    Classify { instance: String },
    /// Build the path/cycle scheme of rate (rho-1)/(2 rho).
    Synth {
        instance: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also print each node's signal symbolically.
        #[arg(long)]
        render: bool,
    },
    /// Check a scheme against the linear conditions, optionally by exhaustive enumeration too.
    Verify {
        instance: String,
        scheme: String,
        #[arg(long)]
        entropic: bool,
        /// Oracle state budget per edge.
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u64,
    },
    /// Randomised search for a scheme with the given parameters.
    Search {
        instance: String,
        #[arg(long)]
        p: u64,
        #[arg(long = "L")]
        secret_len: usize,
        #[arg(long = "N")]
        signal_len: usize,
        #[arg(long = "Lz")]
        noise_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Noise configurations to sample in total.
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// Configurations per restart.
        #[arg(long)]
        restart_len: Option<u64>,
        /// Draw payloads from a Cauchy matrix with this many rows instead of uniformly.
        #[arg(long)]
        cauchy_rows: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo run of a scheme.
    Simulate {
        instance: String,
        scheme: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Built-in instances and schemes.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Write a fixture in its canonical JSON form.
    Export {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print the provenance note instead.
        #[arg(long)]
        provenance: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_instance(arg: &str) -> Result<CdsInstance> {
    if Path::new(arg).exists() {
        let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
        return CdsInstance::from_json(&text).with_context(|| format!("in {arg}"));
    }
    catalog::builtin_instance(arg).map_err(|_| anyhow!("{arg}: no such file or catalog instance"))
}

fn load_scheme(arg: &str) -> Result<LinearScheme> {
    if Path::new(arg).exists() {
        let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
        return LinearScheme::from_json(&text).with_context(|| format!("in {arg}"));
    }
    catalog::builtin_scheme(arg).map_err(|_| anyhow!("{arg}: no such file or catalog scheme"))
}

fn write_or_print(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Rho {
            instance,
            max_path_len,
            exhaustive,
        } => {
            let inst = load_instance(instance)?;
            let opts = CoverOptions {
                max_path_len: *max_path_len,
                force_exhaustive: *exhaustive,
                parallel: true,
                ..Default::default()
            };
            let r = rho_with(&inst, &opts);
            if cli.json {
                print_json(&r)?;
            } else {
                println!("rho = {}", r.value);
                if let Some(w) = &r.witness {
                    println!("witness: {w}");
                }
                if !r.exact {
                    println!("upper bound only: path cap or greedy cover fallback was used");
                }
            }
            Ok(true)
        }
        Command::Bound { instance } => {
            let b = linear_converse_bound(&load_instance(instance)?);
            if cli.json {
                print_json(&b)?;
            } else {
                println!("{}", b.bound);
                match &b.witness {
                    Some(w) => println!("rho = {}; witness: {w}", b.rho),
                    None => println!("rho = {}", b.rho),
                }
            }
            Ok(true)
        }
        Command::Classify { instance } => {
            let v = classify_linear_capacity(&load_instance(instance)?);
            if cli.json {
                print_json(&v)?;
            } else {
                println!("{v}");
            }
            Ok(true)
        }
        Command::Synth {
            instance,
            output,
            render,
        } => {
            let inst = load_instance(instance)?;
            let d = synthesize_detailed(&inst)?;
            let s = &d.scheme;
            let text = s.to_json();
            write_or_print(output.as_deref(), &text)?;
            if output.is_some() {
                if cli.json {
                    #[derive(Serialize)]
                    struct Summary {
                        rho: u64,
                        rate: cds_core::rational::Rate,
                        p: u64,
                        #[serde(rename = "L")]
                        l: usize,
                        #[serde(rename = "N")]
                        n: usize,
                        #[serde(rename = "Lz")]
                        lz: usize,
                    }
                    print_json(&Summary {
                        rho: d.rho,
                        rate: s.rate(),
                        p: s.field().modulus(),
                        l: s.secret_len(),
                        n: s.signal_len(),
                        lz: s.noise_len(),
                    })?;
                } else {
                    println!(
                        "rate {} (rho = {}, p = {}, L = {}, N = {}, Lz = {})",
                        s.rate(),
                        d.rho,
                        s.field().modulus(),
                        s.secret_len(),
                        s.signal_len(),
                        s.noise_len()
                    );
                }
            }
            if *render {
                print!("{}", d.render());
            }
            Ok(true)
        }
        Command::Verify {
            instance,
            scheme,
            entropic,
            budget,
        } => {
            let inst = load_instance(instance)?;
            let s = load_scheme(scheme)?;
            let report = verify_linear(&inst, &s)?;
            let mut oracle: Vec<(Edge, OracleOutcome)> = Vec::new();
            if *entropic {
                for (_, e) in inst.edges() {
                    oracle.push((e, entropic_oracle_edge(&inst, &s, e, *budget)?));
                }
            }
            let oracle_ok = oracle.iter().all(|(_, o)| !o.failed());
            if cli.json {
                #[derive(Serialize)]
                struct EdgeOutcome<'a> {
                    edge: Edge,
                    outcome: &'a OracleOutcome,
                }
                #[derive(Serialize)]
                struct Out<'a> {
                    linear: &'a cds_core::scheme::VerificationReport,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    entropic: Option<Vec<EdgeOutcome<'a>>>,
                }
                print_json(&Out {
                    linear: &report,
                    entropic: entropic.then(|| oracle.iter().map(|(edge, outcome)| EdgeOutcome { edge: *edge, outcome }).collect()),
                })?;
            } else {
                for r in report.failures() {
                    println!("{r}");
                }
                let fails = report.failures().count();
                println!(
                    "linear: {} ({} checks, {fails} failed)",
                    if report.overall { "pass" } else { "FAIL" },
                    report.records.len()
                );
                if *entropic {
                    for (e, o) in &oracle {
                        println!("oracle {e}: {o}");
                    }
                    let unchecked = oracle.iter().filter(|(_, o)| !o.checked()).count();
                    println!(
                        "entropic: {} ({} edges, {unchecked} over budget)",
                        if oracle_ok { "pass" } else { "FAIL" },
                        oracle.len()
                    );
                }
            }
            Ok(report.overall && oracle_ok)
        }
        Command::Search {
            instance,
            p,
            secret_len,
            signal_len,
            noise_len,
            seed,
            budget,
            restart_len,
            cauchy_rows,
            output,
        } => {
            let inst = load_instance(instance)?;
            let mut params = SearchParams::new(*p, *secret_len, *signal_len, *noise_len, *seed, *budget);
            params.parallel = true;
            if let Some(r) = restart_len {
                params.restart_len = *r;
            }
            if let Some(rows) = cauchy_rows {
                params.mode = PayloadMode::Cauchy { rows: *rows };
            }
            let out = random_scheme_search(&inst, &params)?;
            match out.scheme {
                Some(s) => {
                    write_or_print(output.as_deref(), &s.to_json())?;
                    if output.is_some() && !cli.json {
                        println!("found rate {} at restart {}", s.rate(), out.restart.unwrap_or(0));
                    }
                    Ok(true)
                }
                None => {
                    if cli.json {
                        println!("null");
                    } else {
                        println!(
                            "no scheme found in {budget} configurations ({} restarts); this does not prove none exists",
                            out.restarts
                        );
                    }
                    Ok(false)
                }
            }
        }
        Command::Simulate {
            instance,
            scheme,
            trials,
            seed,
        } => {
            let inst = load_instance(instance)?;
            let s = load_scheme(scheme)?;
            let r = simulate(&inst, &s, *seed, *trials)?;
            let ok = r.qualified.iter().all(|q| q.all_decoded());
            if cli.json {
                print_json(&r)?;
            } else {
                for q in &r.qualified {
                    println!("{}: decoded {}/{}", q.edge, q.successes, q.trials);
                }
                for u in &r.unqualified {
                    println!("{}: {} distinct observations", u.edge, u.first_symbol_counts.len());
                }
            }
            Ok(ok)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                if cli.json {
                    #[derive(Serialize)]
                    struct Item {
                        name: &'static str,
                        kind: &'static str,
                        instance: Option<&'static str>,
                    }
                    let items: Vec<Item> = catalog::entries()
                        .iter()
                        .map(|e| Item {
                            name: e.name,
                            kind: if e.kind == EntryKind::Instance { "instance" } else { "scheme" },
                            instance: e.instance,
                        })
                        .collect();
                    print_json(&items)?;
                } else {
                    for e in catalog::entries() {
                        match e.instance {
                            None => println!("{:<20} instance", e.name),
                            Some(i) => println!("{:<20} scheme for {i}", e.name),
                        }
                    }
                }
                Ok(true)
            }
            CatalogAction::Export {
                name,
                output,
                provenance,
            } => {
                let e = catalog::entry(name)?;
                let text = if *provenance {
                    e.provenance.to_string()
                } else {
                    match e.kind {
                        EntryKind::Instance => catalog::builtin_instance(name)?.to_json(),
                        EntryKind::Scheme => catalog::builtin_scheme(name)?.to_json(),
                    }
                };
                if text.is_empty() {
                    bail!("{name} has no content");
                }
                write_or_print(output.as_deref(), &text)?;
                Ok(true)
            }
        },
    }
}
