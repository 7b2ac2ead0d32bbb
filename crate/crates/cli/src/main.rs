//! `sl2prim` — batch front end for the primitive-representation engine.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sl2prim::brute_force::{self, DEFAULT_CAP};
use sl2prim::clifford::{self, ZetaPolynomial};
use sl2prim::extension::ExtensionProblem;
use sl2prim::linalg::{group_order, is_cyclic, CyclicTriple, GroupKind};
use sl2prim::orbits::{self, orbit_representatives};
use sl2prim::{Error, Ring, RingElem};

#[derive(Parser)]
#[command(name = "sl2prim", version, about = "Primitive irreducible representations of SL_2 over finite chain rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RingArgs {
    /// Ring description: `Z/2^r`, `Fq[t]/t^r` or `GR(2^r,n)`.
    #[arg(long)]
    ring: String,
    /// Override the length `r` of the ring.
    #[arg(long)]
    level: Option<u32>,
}

#[derive(Args, Clone, Copy)]
struct Output {
    /// Emit JSON.
    #[arg(long)]
    json: bool,
    /// Emit CSV (tabular commands only).
    #[arg(long, conflicts_with = "json")]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Basic invariants of the ring and of SL_2 over it.
    RingInfo {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Orbit representatives of cyclic characters of K^l.
    Orbits {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Extension sets for one triple or for every orbit representative.
    ExtensionSet {
        #[command(flatten)]
        ring: RingArgs,
        /// Triple `a,alpha,beta` over o_l', as formatted elements or codes.
        #[arg(long)]
        triple: Option<String>,
        /// Decide every lambda directly instead of using the closed forms.
        #[arg(long)]
        brute: bool,
        #[command(flatten)]
        out: Output,
    },
    /// The primitive table, orbit by orbit.
    Table {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        out: Output,
    },
    /// The primitive zeta polynomial.
    Zeta {
        #[command(flatten)]
        ring: RingArgs,
        /// Read degrees off the character table instead of the construction.
        #[arg(long)]
        brute: bool,
        /// All irreducibles rather than only the primitive ones.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[command(flatten)]
        out: Output,
    },
    /// The largest irreducible dimension and its multiplicity.
    Nmax {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the complex group algebras of SL_2 over two rings.
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Cross-check the construction against the brute-force oracles.
    Verify {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Seed of the character-table computation.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

/// Why a command failed, mapped to the process exit code.
enum Failure {
    Usage(String),
    Regime(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            Error::UnsupportedRegime(_) | Error::CapExceeded { .. } => Failure::Regime(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Regime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Mismatch(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::RingInfo { ring, out } => ring_info(&load(&ring)?, out),
        Command::Orbits { ring, out } => orbit_report(&load(&ring)?, out),
        Command::ExtensionSet { ring, triple, brute, out } => extension_sets(&load(&ring)?, triple.as_deref(), brute, out),
        Command::Table { ring, out } => table(&load(&ring)?, out),
        Command::Zeta { ring, brute, full, cap, out } => zeta(&load(&ring)?, brute, full, cap, out),
        Command::Nmax { ring, cap, out } => {
            let ring = load(&ring)?;
            let (d, c) = clifford::nmax(&ring, cap)?;
            if out.json {
                print_json(&json!({"ring": ring.spec().to_string(), "nmax": d, "count": c}));
            } else {
                println!("nmax = {d}, #nmax = {c}");
            }
            Ok(())
        }
        Command::Compare { a, b, cap, out } => {
            let (a, b) = (Ring::parse(&a)?, Ring::parse(&b)?);
            let verdict = clifford::compare_group_algebras(&a, &b, cap)?;
            if out.json {
                print_json(&json!({"a": a.spec().to_string(), "b": b.spec().to_string(), "result": verdict}));
            } else {
                println!("{verdict}");
            }
            Ok(())
        }
        Command::Verify { ring, cap, seed, out } => verify(&load(&ring)?, cap, seed, out),
    }
}

fn load(args: &RingArgs) -> std::result::Result<Ring, Failure> {
    let ring = Ring::parse(&args.ring)?;
    Ok(match args.level {
        Some(r) => ring.with_length(r)?,
        None => ring,
    })
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn ring_info(ring: &Ring, out: Output) -> CmdResult {
    let (q, r) = (ring.q(), ring.r());
    let info = json!({
        "ring": ring.spec().to_string(),
        "q": q,
        "r": r,
        "characteristic_two": ring.is_char_two(),
        "size": ring.size(),
        "units": ring.unit_count(),
        "l": r.div_ceil(2),
        "l_prime": r / 2,
        "threshold": clifford::threshold(ring),
        "psi_modulus": ring.psi_modulus(),
        "sl2_order": group_order(GroupKind::SL, q, r),
        "gl2_order": group_order(GroupKind::GL, q, r),
    });
    if out.json {
        print_json(&info);
    } else {
        for (k, v) in info.as_object().expect("object") {
            println!("{k:>18}: {v}");
        }
    }
    Ok(())
}

fn orbit_report(ring: &Ring, out: Output) -> CmdResult {
    let rows = orbits::orbit_table(ring)?;
    if out.json {
        print_json(&serde_json::to_value(&rows).expect("serializable"));
    } else if out.csv {
        println!("representative,type,k,s,orbit_size,stabilizer_order,provenance");
        for row in &rows {
            println!(
                "\"{}\",{},{},{},{},{},{}",
                row.representative,
                row.orbit_type,
                row.k,
                row.s.map(|s| s.to_string()).unwrap_or_default(),
                row.orbit_size,
                row.stabilizer_order,
                serde_json::to_value(row.provenance).expect("serializable").as_str().unwrap_or_default()
            );
        }
    } else {
        println!("{:<24} {:<4} {:>3} {:>3} {:>12} {:>12}", "representative", "type", "k", "s", "orbit", "stabilizer");
        for row in &rows {
            let s = row.s.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
            println!(
                "{:<24} {:<4} {:>3} {:>3} {:>12} {:>12}",
                row.representative, row.orbit_type, row.k, s, row.orbit_size, row.stabilizer_order
            );
        }
        let mut by_type: BTreeMap<String, u64> = BTreeMap::new();
        for row in &rows {
            *by_type.entry(row.orbit_type.to_string()).or_default() += 1;
        }
        let summary: Vec<String> = by_type.iter().map(|(t, n)| format!("{t}: {n}")).collect();
        println!("{} orbits ({})", rows.len(), summary.join(", "));
    }
    Ok(())
}

/// Parses one element of `level`, either as it is formatted or as a code.
fn parse_element(level: &Ring, text: &str) -> std::result::Result<RingElem, Failure> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(x) = level.elements().find(|&x| level.format(x) == compact) {
        return Ok(x);
    }
    compact
        .parse::<u64>()
        .ok()
        .filter(|&c| c < level.size())
        .map(RingElem)
        .ok_or_else(|| Failure::Usage(format!("{text:?} is not an element of {}", level.spec())))
}

fn parse_triple(level: &Ring, text: &str) -> std::result::Result<CyclicTriple, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    let [a, alpha, beta] = parts.as_slice() else {
        return Err(Failure::Usage(format!("triple {text:?} must have the form a,alpha,beta")));
    };
    let t = CyclicTriple::new(parse_element(level, a)?, parse_element(level, alpha)?, parse_element(level, beta)?);
    if !level.is_unit(t.a) || !is_cyclic(level, &t.matrix(level)) {
        return Err(Failure::Usage(format!("triple {text:?} needs a unit first entry")));
    }
    Ok(t)
}

fn extension_sets(ring: &Ring, triple: Option<&str>, brute: bool, out: Output) -> CmdResult {
    if ring.r() < 2 {
        return Err(Failure::Usage("extension sets need r >= 2".into()));
    }
    let level = ring.with_length(ring.r() / 2)?;
    let triples = match triple {
        Some(text) => vec![parse_triple(&level, text)?],
        None => orbit_representatives(&level).into_iter().map(|c| c.representative).collect(),
    };
    let mut reports = Vec::new();
    for t in triples {
        let problem = ExtensionProblem::new(ring, t)?;
        let e = if brute { problem.e_brute() } else { problem.e_set() };
        reports.push(problem.report(&e));
    }
    if out.json {
        print_json(&serde_json::to_value(&reports).expect("serializable"));
    } else {
        for rep in &reports {
            println!(
                "{:<24} index {}  [{}]  E = {{{}}} + (pi^{})",
                rep.triple,
                rep.index_over_pi_ell,
                serde_json::to_value(rep.regime).expect("serializable").as_str().unwrap_or_default(),
                rep.cosets.join(", "),
                ring.r().div_ceil(2)
            );
        }
    }
    Ok(())
}

fn table(ring: &Ring, out: Output) -> CmdResult {
    let t = clifford::primitive_table(ring)?;
    if out.json {
        print_json(&serde_json::to_value(&t).expect("serializable"));
    } else if out.csv {
        print!("{}", t.to_csv());
    } else {
        let g = group_order(GroupKind::SL, ring.q(), ring.r());
        println!(
            "{:<24} {:<4} {:>8} {:>10} {:>6} {:>8} {:>8} {:>10}  irreducibles",
            "orbit rep.", "type", "|C(A)|", "|M_A|", "theta", "Delta1", "Delta2", "|G|/|M_A|"
        );
        for row in &t.rows {
            let dims: Vec<String> = row.blocks.iter().map(|b| format!("{} x dim {}", b.count, b.dimension)).collect();
            println!(
                "{:<24} {:<4} {:>8} {:>10} {:>6} {:>8} {:>8} {:>10}  {}",
                row.representative,
                row.orbit_type,
                row.centralizer_sl,
                row.m_a,
                row.theta.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
                row.delta1,
                row.delta2,
                g / row.m_a,
                dims.join(", ")
            );
        }
        println!("primitive zeta polynomial: {}", t.zeta);
    }
    Ok(())
}

fn zeta(ring: &Ring, brute: bool, full: bool, cap: u64, out: Output) -> CmdResult {
    let poly = match (full, brute) {
        (true, true) => brute_force::zeta_polynomial(ring, cap)?,
        (true, false) => clifford::full_zeta(ring, cap)?,
        (false, true) => {
            let g = brute_force::enumerate_sl2(ring, cap)?;
            let table = brute_force::character_table(&g, 1)?;
            ZetaPolynomial::from_dimensions(brute_force::primitive_dimension_multiset(&g, &table)?)
        }
        (false, false) => clifford::primitive_zeta(ring)?,
    };
    if out.json {
        print_json(&json!({"ring": ring.spec().to_string(), "primitive": !full, "zeta": poly}));
    } else {
        println!("{poly}");
    }
    Ok(())
}

fn verify(ring: &Ring, cap: u64, seed: u64, out: Output) -> CmdResult {
    let mut checks: Vec<(String, bool)> = Vec::new();
    let r = ring.r();

    if r >= 2 {
        let level = ring.with_length(r / 2)?;
        let oracle = brute_force::orbit_oracle(&level);
        let reps = orbit_representatives(&level);
        checks.push((format!("orbit count {} = oracle {}", reps.len(), oracle.len()), reps.len() == oracle.len()));
        let mut mismatches = 0;
        for c in &reps {
            let problem = ExtensionProblem::new(ring, c.representative)?;
            if let Ok(fast) = problem.e_fast() {
                if !fast.same_set(&problem.e_brute()) {
                    mismatches += 1;
                }
            }
        }
        checks.push((format!("fast and direct extension sets: {mismatches} mismatches"), mismatches == 0));
    }

    let g = brute_force::enumerate_sl2(ring, cap)?;
    let table = brute_force::character_table(&g, seed)?;
    let orthogonal = table.check_orthogonality(&brute_force::inverse_classes(&g, &table));
    checks.push((format!("character table: {} classes, orthogonality", table.dims.len()), orthogonal));

    if r >= 2 && r.is_multiple_of(2) {
        let constructed = clifford::primitive_zeta(ring)?;
        let oracle = ZetaPolynomial::from_dimensions(brute_force::primitive_dimension_multiset(&g, &table)?);
        checks.push((format!("primitive degrees: construction {constructed} vs oracle {oracle}"), constructed == oracle));
        let mass = constructed.plancherel_mass();
        let expected = clifford::primitive_plancherel_mass(ring.q(), r);
        checks.push((format!("Plancherel mass {mass} = {expected}"), mass == expected));
    }

    if out.json {
        let list: Vec<_> = checks.iter().map(|(m, ok)| json!({"check": m, "pass": ok})).collect();
        print_json(&json!({"ring": ring.spec().to_string(), "checks": list}));
    } else {
        for (m, ok) in &checks {
            println!("[{}] {m}", if *ok { "PASS" } else { "FAIL" });
        }
    }
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(m, _)| m.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(failed.join("; ")))
    }
}
