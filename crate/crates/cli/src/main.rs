//! Batch front end: ingest JSON specs, run the pipelines, emit JSON or
//! tabular reports. Identical inputs and seed produce byte-identical
//! output; every report carries the toolkit version and the input hash.
//!
//! Exit codes: 0 ok, 2 parse error, 3 size cap exceeded, 4 unsupported
//! structure (e.g. traces requested on a non-principal tight groupoid).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use invmono::af::{self, BratteliDiagram};
use invmono::cstar::{positivity_check, trace_from_mean, AtomRep};
use invmono::germs::{algebraic_predicates, tight_groupoid};
use invmono::json::{DiagramJson, GroupoidJson, MonoidSpec, PolytopeJson, TraceJson};
use invmono::means::mean_polytope;
use invmono::monoid::FiniteInverseMonoid;
use invmono::ratio::to_pq;
use invmono::selfsim::{unique_mean_check, Odometer};
use invmono::Error;

#[derive(Parser)]
#[command(name = "invmono", version, about = "inverse monoid / invariant mean toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input JSON file (monoid spec or Bratteli diagram)
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for the randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Element cap for closures and enumerations
    #[arg(long, global = true, default_value_t = 100_000)]
    cap_elements: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Level depth for the af command
    #[arg(long, global = true)]
    depth: Option<usize>,

    /// Random elements for the positivity section of traces
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Closure, axioms, and structure flags of a monoid spec
    Check,
    /// Tight groupoid of germs with predicates
    Groupoid,
    /// Exact polytope of normalized invariant means
    Means,
    /// Trace table of the matrix model; refuses non-principal input
    Traces,
    /// Dimension tables, level means, and coherence of a Bratteli diagram
    Af,
    /// Unique-mean check for the binary odometer truncation at depth n
    Odometer { n: usize },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    version: &'static str,
    command: &'static str,
    input_sha256: String,
    report: T,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::SizeLimit { .. }) => 3,
                Some(Error::NotPrincipal { .. }) | Some(Error::Structure(_)) => 4,
                Some(Error::SelfCheck(_)) => 1,
                Some(_) => 2,
                None => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Check => cmd_check(cli),
        Command::Groupoid => cmd_groupoid(cli),
        Command::Means => cmd_means(cli),
        Command::Traces => cmd_traces(cli),
        Command::Af => cmd_af(cli),
        Command::Odometer { n } => cmd_odometer(cli, *n),
    }
}

fn read_input(cli: &Cli) -> anyhow::Result<(Vec<u8>, String)> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--input is required".into()))?;
    let bytes = std::fs::read(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let hash = sha256_hex(&bytes);
    Ok((bytes, hash))
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn load_monoid(cli: &Cli) -> anyhow::Result<(FiniteInverseMonoid, String)> {
    let (bytes, hash) = read_input(cli)?;
    let spec: MonoidSpec = serde_json::from_slice(&bytes)
        .map_err(|e| Error::InvalidArgument(format!("bad monoid spec: {e}")))?;
    Ok((spec.build(cli.cap_elements)?, hash))
}

fn emit<T: Serialize>(
    cli: &Cli,
    command: &'static str,
    input_sha256: String,
    report: T,
    table: String,
) -> anyhow::Result<()> {
    let text = match cli.format {
        Format::Json => {
            let full = Report {
                version: env!("CARGO_PKG_VERSION"),
                command,
                input_sha256,
                report,
            };
            let mut s = serde_json::to_string_pretty(&full)?;
            s.push('\n');
            s
        }
        Format::Table => format!(
            "invmono {} {}\ninput sha256: {}\n{}",
            env!("CARGO_PKG_VERSION"),
            command,
            input_sha256,
            table
        ),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------

#[derive(Serialize)]
struct CheckReport {
    size: usize,
    idempotents: usize,
    atoms: usize,
    flags: CheckFlags,
}

#[derive(Serialize)]
struct CheckFlags {
    inverse: bool,
    distributive: bool,
    boolean: bool,
    condition_h: bool,
}

fn cmd_check(cli: &Cli) -> anyhow::Result<()> {
    let (m, hash) = load_monoid(cli)?;
    let report = CheckReport {
        size: m.size(),
        idempotents: m.idempotents().len(),
        atoms: m.atoms().len(),
        flags: CheckFlags {
            inverse: m.verify_axioms().is_ok(),
            distributive: m.is_distributive(),
            boolean: m.is_boolean(),
            condition_h: m.condition_h(),
        },
    };
    let table = format!(
        "size: {}\nidempotents: {}\natoms: {}\ninverse: {}\ndistributive: {}\nboolean: {}\ncondition (H): {}\n",
        report.size,
        report.idempotents,
        report.atoms,
        report.flags.inverse,
        report.flags.distributive,
        report.flags.boolean,
        report.flags.condition_h
    );
    emit(cli, "check", hash, report, table)
}

#[derive(Serialize)]
struct GroupoidReport {
    groupoid: GroupoidJson,
    orbits: usize,
    principal: bool,
    minimal: bool,
    predicates: PredicatesJson,
}

#[derive(Serialize)]
struct PredicatesJson {
    hausdorff: bool,
    essentially_principal: bool,
    minimal: bool,
}

fn cmd_groupoid(cli: &Cli) -> anyhow::Result<()> {
    let (m, hash) = load_monoid(cli)?;
    let g = tight_groupoid(&m)?;
    let p = algebraic_predicates(&m);
    let report = GroupoidReport {
        groupoid: GroupoidJson::from_groupoid(&g),
        orbits: g.orbits().len(),
        principal: g.is_principal(),
        minimal: g.is_minimal(),
        predicates: PredicatesJson {
            hausdorff: p.hausdorff,
            essentially_principal: p.essentially_principal,
            minimal: p.minimal,
        },
    };
    let table = format!(
        "units: {}\narrows: {}\norbits: {}\nprincipal: {}\nminimal: {}\nhausdorff: {}\nessentially principal: {}\n",
        report.groupoid.units,
        report.groupoid.arrows.len(),
        report.orbits,
        report.principal,
        report.minimal,
        report.predicates.hausdorff,
        report.predicates.essentially_principal
    );
    emit(cli, "groupoid", hash, report, table)
}

fn cmd_means(cli: &Cli) -> anyhow::Result<()> {
    let (m, hash) = load_monoid(cli)?;
    let p = mean_polytope(&m)?;
    let report = PolytopeJson::from_polytope(&p);
    let mut table = format!(
        "atoms: {:?}\ndimension: {}\nvertices ({}):\n",
        report.atoms,
        report.dimension,
        report.vertices.len()
    );
    for v in &report.vertices {
        table.push_str(&format!("  [{}]\n", v.join(", ")));
    }
    emit(cli, "means", hash, report, table)
}

#[derive(Serialize)]
struct TracesReport {
    trace: TraceJson,
    mean_weights: Vec<String>,
    mu_of_e_s: BTreeMap<String, String>,
    positivity: PositivityJson,
}

#[derive(Serialize)]
struct PositivityJson {
    trials: usize,
    seed: u64,
    all_nonnegative: bool,
    faithful_mean: bool,
    zero_forces_zero: bool,
}

#[derive(Serialize)]
struct NotPrincipalReport {
    error: &'static str,
    witness: usize,
    witness_label: String,
}

fn cmd_traces(cli: &Cli) -> anyhow::Result<()> {
    let (m, hash) = load_monoid(cli)?;
    let rep = AtomRep::new(&m)?;
    let poly = mean_polytope(&m)?;
    let mu = poly.barycenter();
    let tau = match trace_from_mean(&rep, &mu) {
        Ok(tau) => tau,
        Err(Error::NotPrincipal { witness }) => {
            let report = NotPrincipalReport {
                error: "not_principal",
                witness,
                witness_label: m.label(witness),
            };
            let table = format!(
                "not principal: isotropy witness element {witness} = {}\n",
                m.label(witness)
            );
            emit(cli, "traces", hash, report, table)?;
            return Err(Error::NotPrincipal { witness }.into());
        }
        Err(e) => return Err(e.into()),
    };
    let mut mu_of_e_s = BTreeMap::new();
    for s in 0..m.size() {
        let v = mu.evaluate(&m, m.e_of(s)?)?;
        mu_of_e_s.insert(s.to_string(), to_pq(&v));
    }
    let trace = TraceJson::from_trace(&rep, &tau);
    // the defining identity of the correspondence, row by row
    for (k, v) in &trace.tau_of {
        if mu_of_e_s.get(k) != Some(v) {
            return Err(Error::SelfCheck(format!("tau(delta_{k}) != mu(e_{k})")).into());
        }
    }
    let pos = positivity_check(&rep, &mu, cli.trials, cli.seed)?;
    let report = TracesReport {
        trace,
        mean_weights: mu.weights.iter().map(to_pq).collect(),
        mu_of_e_s,
        positivity: PositivityJson {
            trials: pos.trials,
            seed: cli.seed,
            all_nonnegative: pos.all_nonnegative,
            faithful_mean: pos.faithful_mean,
            zero_forces_zero: pos.zero_forces_zero,
        },
    };
    let mut table = String::from("s\ttau(delta_s)\tmu(e_s)\n");
    for (k, v) in &report.trace.tau_of {
        table.push_str(&format!("{k}\t{v}\t{}\n", report.mu_of_e_s[k]));
    }
    table.push_str(&format!(
        "positivity: trials={} nonneg={} zero_forces_zero={}\n",
        report.positivity.trials,
        report.positivity.all_nonnegative,
        report.positivity.zero_forces_zero
    ));
    emit(cli, "traces", hash, report, table)
}

#[derive(Serialize)]
struct AfReport {
    depth: usize,
    dims: Vec<Vec<u64>>,
    levels: Vec<AfLevelReport>,
    coherent_unique: bool,
    coherent_vertices: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct AfLevelReport {
    level: usize,
    paths: usize,
    polytope_vertices: usize,
    polytope_dimension: usize,
    /// None when the truncation monoid is over the element cap
    block_dims_checked: Option<bool>,
}

fn cmd_af(cli: &Cli) -> anyhow::Result<()> {
    let (bytes, hash) = read_input(cli)?;
    let dj: DiagramJson = serde_json::from_slice(&bytes)
        .map_err(|e| Error::InvalidArgument(format!("bad diagram spec: {e}")))?;
    let b: BratteliDiagram = dj.build()?;
    let depth = cli.depth.unwrap_or(b.depth());
    if depth == 0 || depth > b.depth() {
        return Err(
            Error::InvalidArgument(format!("--depth must be in 1..={}", b.depth())).into()
        );
    }
    let dims: Vec<Vec<u64>> = (0..=depth).map(|i| b.dims(i)).collect::<Result<_, _>>()?;
    let mut levels = Vec::new();
    for i in 1..=depth {
        let lm = af::level_means(&b, i)?;
        let checked = match af::block_dims_check(&b, i, cli.cap_elements) {
            Ok(ok) => Some(ok),
            Err(Error::SizeLimit { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        levels.push(AfLevelReport {
            level: i,
            paths: lm.terminals.len(),
            polytope_vertices: lm.vertices.len(),
            polytope_dimension: lm.dimension,
            block_dims_checked: checked,
        });
    }
    let coh = af::coherent_means(&b, depth)?;
    let report = AfReport {
        depth,
        dims,
        levels,
        coherent_unique: coh.unique,
        coherent_vertices: coh
            .vertices
            .iter()
            .map(|v| v.iter().map(|w| w.iter().map(to_pq).collect()).collect())
            .collect(),
    };
    let mut table = String::new();
    for (i, k) in report.dims.iter().enumerate() {
        table.push_str(&format!("k_{i}: {k:?}\n"));
    }
    for l in &report.levels {
        table.push_str(&format!(
            "level {}: paths={} vertices={} dim={} block_dims={:?}\n",
            l.level, l.paths, l.polytope_vertices, l.polytope_dimension, l.block_dims_checked
        ));
    }
    table.push_str(&format!("coherent means unique: {}\n", report.coherent_unique));
    emit(cli, "af", hash, report, table)
}

#[derive(Serialize)]
struct OdometerReport {
    n: usize,
    truncation_size: usize,
    unique: bool,
    single_atom_orbit: bool,
    cylinder_values_match: bool,
    cylinder_means: Vec<CylinderMean>,
}

#[derive(Serialize)]
struct CylinderMean {
    len: usize,
    value: String,
}

fn cmd_odometer(cli: &Cli, n: usize) -> anyhow::Result<()> {
    if n == 0 || n > 10 {
        return Err(Error::InvalidArgument("odometer depth must be 1..=10".into()).into());
    }
    let hash = sha256_hex(format!("odometer:{n}").as_bytes());
    let od = Odometer;
    let report = unique_mean_check(&od, n, &[1], cli.cap_elements)?;
    let truncation_size =
        invmono::selfsim::depth_truncation(&od, n, n, &[1], cli.cap_elements)?.size();
    let cylinder_means = (0..=n)
        .map(|len| CylinderMean { len, value: to_pq(&invmono::ratio::rat(1, 1 << len)) })
        .collect();
    let out = OdometerReport {
        n,
        truncation_size,
        unique: report.unique,
        single_atom_orbit: report.single_atom_orbit,
        cylinder_values_match: report.cylinder_values_match,
        cylinder_means,
    };
    let table = format!(
        "depth: {}\ntruncation size: {}\nunique mean: {}\nsingle atom orbit: {}\ncylinder values 2^-k: {}\n",
        out.n, out.truncation_size, out.unique, out.single_atom_orbit, out.cylinder_values_match
    );
    emit(cli, "odometer", hash, out, table)
}
