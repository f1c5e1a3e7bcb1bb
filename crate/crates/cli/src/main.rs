//! Command-line surface: build, query, inspect, and verify.

use clap::{Args, Parser, Subcommand};
use parapoly::arith::{Int, Rat};
use parapoly::counting::Count;
use parapoly::error::Error;
use parapoly::param_count::{
    build_representation_threaded, multi_indices, Evaluation, Representation,
};
use parapoly::polyhedron::{parse_rat, rat_to_string, standard_to_canonical, ParametricSystem};
use parapoly::{count_fixed, repr_json, DEFAULT_BUDGET};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "parapoly", version, about = "Exact counting of integer points in parametric polyhedra", disable_help_subcommand = true)]
struct Cli {
    /// Seed for the generic-vector choice and the self tests.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Box budget for brute-force enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Output format.
    #[arg(long, global = true, default_value = "table", value_parser = ["json", "table"])]
    format: String,
    /// Worker threads for the build phase (results are identical for any
    /// count).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the integer points of a non-parametric system.
    Count { system: PathBuf },
    /// Build the piece-wise periodic step-polynomial representation.
    Build {
        system: PathBuf,
        /// Output path for the representation JSON.
        #[arg(short, long, default_value = "repr.json")]
        output: PathBuf,
    },
    /// Evaluate E(y) from a saved representation.
    Eval {
        repr: PathBuf,
        /// Query coordinates: comma-separated integers or p/q rationals.
        #[arg(long = "y", required = true, allow_hyphen_values = true)]
        y: String,
    },
    /// Ehrhart quasi-polynomial coefficients on the chamber of a point.
    Ehrhart(EhrhartArgs),
    /// Chamber decomposition dump of a system.
    Chambers { system: PathBuf },
    /// Parse, compile, simulate, or build a loop nest.
    Loopnest {
        file: PathBuf,
        /// Evaluate at integer parameter values (comma-separated) and
        /// compare against the simulator.
        #[arg(long = "eval", allow_hyphen_values = true)]
        eval: Option<String>,
        /// Build and save the representation of the compiled system.
        #[arg(long)]
        build: bool,
        #[arg(short, long, default_value = "repr.json")]
        output: PathBuf,
    },
    /// Run the oracle-equivalence suites.
    Selftest {
        /// Trial count for the randomized suites.
        #[arg(long = "n", default_value_t = 25)]
        trials: usize,
    },
}

#[derive(Args)]
struct EhrhartArgs {
    repr: PathBuf,
    /// Point whose chamber is inspected (original coordinates,
    /// comma-separated).
    #[arg(long = "chamber-of", required = true, allow_hyphen_values = true)]
    chamber_of: String,
    /// Single multi-index to evaluate, comma-separated (defaults to all
    /// with |j| ≤ n_x).
    #[arg(long = "j")]
    j: Option<String>,
    /// Also print the complete integer coefficient tables.
    #[arg(long)]
    complete: bool,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Input(_) | Error::Domain(_) => 2,
        Error::Unsupported(_) => 3,
        Error::Internal(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's own help/version paths exit 0
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn read_to_string(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_string(path: &PathBuf, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}

fn parse_point(s: &str) -> Result<Vec<Rat>, Error> {
    split_list(s).iter().map(|t| parse_rat(t)).collect()
}

fn load_repr(path: &PathBuf) -> Result<Representation, Error> {
    repr_json::from_json(&read_to_string(path)?)
}

fn emit(format: &str, json: serde_json::Value, table: String) {
    if format == "json" {
        println!("{}", serde_json::to_string_pretty(&json).expect("json output"));
    } else {
        println!("{table}");
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Count { system } => {
            let sys = ParametricSystem::from_json(&read_to_string(system)?)?;
            if sys.n_y() != 0 {
                return Err(Error::Input(
                    "system is parametric; use `build` and `eval` for parametric queries".into(),
                ));
            }
            let (canon, preds) = standard_to_canonical(&sys)?;
            let blocked = preds.iter().any(|p| !p.holds(&[]));
            let count = if blocked {
                Count::Finite(Int::from(0))
            } else {
                count_fixed(&canon.coeffs, &canon.offset, cli.seed)?
            };
            emit(
                &cli.format,
                serde_json::json!({ "count": count.to_string() }),
                format!("count {count}"),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Build { system, output } => {
            let sys = ParametricSystem::from_json(&read_to_string(system)?)?;
            let repr = build_representation_threaded(&sys, cli.seed, cli.threads.max(1))?;
            write_string(output, &repr_json::to_json(&repr))?;
            let summary = build_summary(&repr);
            emit(
                &cli.format,
                serde_json::json!({
                    "output": output.display().to_string(),
                    "chambers": repr.decomposition.chambers.len(),
                    "mu_measured": repr.mu_measured,
                    "delta_measured": repr.delta_measured.to_string(),
                    "chi": repr.chi.to_string(),
                    "f_vector": repr.f_vector,
                    "count_preserving": repr.trace.count_preserving,
                }),
                summary,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { repr, y } => {
            let repr = load_repr(repr)?;
            let point = parse_point(y)?;
            let result = repr.evaluate(&point)?;
            emit(
                &cli.format,
                serde_json::json!({
                    "y": split_list(y),
                    "result": result.to_string(),
                }),
                format!("E({y}) = {result}"),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Ehrhart(args) => run_ehrhart(cli, args),
        Command::Chambers { system } => {
            let sys = ParametricSystem::from_json(&read_to_string(system)?)?;
            let repr = build_representation_threaded(&sys, cli.seed, cli.threads.max(1))?;
            let dump = chambers_dump(&repr);
            if cli.format == "json" {
                println!("{}", serde_json::to_string_pretty(&dump).expect("json output"));
            } else {
                println!("{}", chambers_table(&repr));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Loopnest { file, eval, build, output } => {
            let src = read_to_string(file)?;
            let ast = parapoly::loopnest::parse_loopnest(&src)?;
            let sys = parapoly::loopnest::nest_to_polyhedron(&ast)?;
            if let Some(list) = eval {
                let vals: Vec<i64> = split_list(list)
                    .iter()
                    .map(|t| t.parse::<i64>().map_err(|e| Error::Input(format!("bad integer '{t}': {e}"))))
                    .collect::<Result<Vec<_>, Error>>()?;
                if vals.len() != ast.parameters.len() {
                    return Err(Error::Input(format!(
                        "nest has {} parameters, got {} values",
                        ast.parameters.len(),
                        vals.len()
                    )));
                }
                let repr = build_representation_threaded(&sys, cli.seed, cli.threads.max(1))?;
                let y: Vec<Rat> = vals.iter().map(|&v| Rat::from_integer(Int::from(v))).collect();
                let counted = match repr.evaluate(&y)? {
                    Evaluation::Outside => Count::Finite(Int::from(0)),
                    Evaluation::Count(c) => c,
                };
                let simulated = parapoly::loopnest::simulate_nest(&ast, &vals);
                let agree = counted == Count::Finite(simulated.clone());
                emit(
                    &cli.format,
                    serde_json::json!({
                        "count": counted.to_string(),
                        "simulated": simulated.to_string(),
                        "agree": agree,
                    }),
                    format!(
                        "count {counted}\nsimulated {simulated}\n{}",
                        if agree { "agree" } else { "MISMATCH" }
                    ),
                );
                if !agree {
                    return Err(Error::Internal("pipeline disagrees with the simulator".into()));
                }
            } else if *build {
                let repr = build_representation_threaded(&sys, cli.seed, cli.threads.max(1))?;
                write_string(output, &repr_json::to_json(&repr))?;
                emit(
                    &cli.format,
                    serde_json::json!({ "output": output.display().to_string() }),
                    format!("wrote {}", output.display()),
                );
            } else {
                println!("{}", sys.to_json());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { trials } => {
            let fixed = parapoly::selftest::run_fixed_suite(*trials, cli.seed, cli.budget);
            let series = parapoly::selftest::run_series_suite((*trials).min(15), cli.seed + 1);
            let parametric =
                parapoly::selftest::run_parametric_suite((*trials).min(15), cli.seed + 2, cli.budget);
            let nest = parapoly::selftest::run_loopnest_suite(3);
            let all = [&fixed, &series, &parametric, &nest];
            for s in &all {
                println!("{s}");
            }
            let ok = all.iter().all(|s| s.ok());
            println!("selftest {}", if ok { "PASS" } else { "FAIL" });
            if ok {
                Ok(ExitCode::SUCCESS)
            } else {
                Err(Error::Internal("selftest failures above".into()))
            }
        }
    }
}

fn run_ehrhart(cli: &Cli, args: &EhrhartArgs) -> Result<ExitCode, Error> {
    let repr = load_repr(&args.repr)?;
    let point = parse_point(&args.chamber_of)?;
    if point.len() != repr.original.n_y() {
        return Err(Error::Input("point arity does not match the system".into()));
    }
    let y_norm = repr.trace.replay(&point);
    let chamber = repr.chamber_of(&y_norm)?;
    let ch = &repr.decomposition.chambers[chamber];
    let indices = match &args.j {
        Some(j) => {
            let parsed: Vec<usize> = split_list(j)
                .iter()
                .map(|t| t.parse::<usize>().map_err(|e| Error::Input(format!("bad index '{t}': {e}"))))
                .collect::<Result<Vec<_>, Error>>()?;
            vec![parsed]
        }
        None => multi_indices(repr.n_y_normalized(), repr.n_x_normalized()),
    };
    let mut coeff_rows = Vec::new();
    for j in &indices {
        let a = repr.ehrhart_coefficient(chamber, j, &y_norm)?;
        coeff_rows.push((j.clone(), a));
    }
    let mut table = format!(
        "chamber {chamber}: dim {}, chdenom_Z {}, chdenom_Q {}\n",
        ch.dim,
        ch.chdenom_z,
        rat_to_string(&ch.chdenom_q)
    );
    for (j, a) in &coeff_rows {
        table.push_str(&format!("a_{j:?}({}) = {}\n", args.chamber_of, rat_to_string(a)));
    }
    let mut json = serde_json::json!({
        "chamber": chamber,
        "dim": ch.dim,
        "chdenom_z": ch.chdenom_z.to_string(),
        "chdenom_q": rat_to_string(&ch.chdenom_q),
        "coefficients": coeff_rows
            .iter()
            .map(|(j, a)| serde_json::json!({ "j": j, "value": rat_to_string(a) }))
            .collect::<Vec<_>>(),
    });
    if args.complete {
        let tables = repr.complete_integer_ehrhart()?;
        let t = &tables.per_chamber[chamber];
        table.push_str(&format!("complete table modulo {}:\n", t.modulus));
        let mut complete_json = Vec::new();
        for (residue, coeffs) in &t.entries {
            let res: Vec<String> = residue.iter().map(|v| v.to_string()).collect();
            table.push_str(&format!("  residue {res:?}:"));
            for (j, a) in tables.indices.iter().zip(coeffs) {
                table.push_str(&format!(" a_{j:?}={}", rat_to_string(a)));
            }
            table.push('\n');
            complete_json.push(serde_json::json!({
                "residue": res,
                "coefficients": tables
                    .indices
                    .iter()
                    .zip(coeffs)
                    .map(|(j, a)| serde_json::json!({ "j": j, "value": rat_to_string(a) }))
                    .collect::<Vec<_>>(),
            }));
        }
        json["complete"] = serde_json::json!({
            "modulus": t.modulus.to_string(),
            "entries": complete_json,
        });
    }
    emit(&cli.format, json, table.trim_end().to_string());
    Ok(ExitCode::SUCCESS)
}

fn build_summary(repr: &Representation) -> String {
    let mut s = String::new();
    s.push_str(&format!("chambers {}\n", repr.decomposition.chambers.len()));
    s.push_str(&format!("mu_measured {}\n", repr.mu_measured));
    s.push_str(&format!("delta_measured {}\n", repr.delta_measured));
    s.push_str(&format!("chi {}\n", repr.chi));
    if let Some(f) = &repr.f_vector {
        s.push_str(&format!("f_vector {f:?}\n"));
    }
    s.push_str(&format!("count_preserving {}", repr.trace.count_preserving));
    s
}

fn chambers_dump(repr: &Representation) -> serde_json::Value {
    let hyperplanes: Vec<_> = repr
        .decomposition
        .index
        .hyperplanes
        .iter()
        .map(|h| {
            serde_json::json!({
                "coeffs": h.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "rhs": h.rhs.to_string(),
            })
        })
        .collect();
    let chambers: Vec<_> = repr
        .decomposition
        .chambers
        .iter()
        .map(|c| {
            let (eqs, ineqs) = c.h_description(&repr.decomposition.index.hyperplanes);
            serde_json::json!({
                "dim": c.dim,
                "sign_vector": c.sign_vector,
                "witness": c.witness.iter().map(rat_to_string).collect::<Vec<_>>(),
                "chdenom_z": c.chdenom_z.to_string(),
                "chdenom_q": rat_to_string(&c.chdenom_q),
                "bases": c.maps.iter().map(|m| m.basis.clone()).collect::<Vec<_>>(),
                "equalities": eqs
                    .iter()
                    .map(|h| serde_json::json!({
                        "coeffs": h.coeffs.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "rhs": h.rhs.to_string(),
                    }))
                    .collect::<Vec<_>>(),
                "inequalities": ineqs
                    .iter()
                    .map(|(a, b)| serde_json::json!({
                        "coeffs": a.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "rhs": b.to_string(),
                    }))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({
        "hyperplanes": hyperplanes,
        "chambers": chambers,
        "projection": repr
            .decomposition
            .projection
            .iter()
            .map(|(a, b)| serde_json::json!({
                "coeffs": a.iter().map(rat_to_string).collect::<Vec<_>>(),
                "rhs": rat_to_string(b),
            }))
            .collect::<Vec<_>>(),
    })
}

fn chambers_table(repr: &Representation) -> String {
    let mut s = format!(
        "{} hyperplanes, {} chambers\n",
        repr.decomposition.index.hyperplanes.len(),
        repr.decomposition.chambers.len()
    );
    for (i, c) in repr.decomposition.chambers.iter().enumerate() {
        s.push_str(&format!(
            "chamber {i}: dim {} signs {:?} bases {} chdenom_Z {} witness [{}]\n",
            c.dim,
            c.sign_vector,
            c.maps.len(),
            c.chdenom_z,
            c.witness.iter().map(rat_to_string).collect::<Vec<_>>().join(", ")
        ));
    }
    s.trim_end().to_string()
}
