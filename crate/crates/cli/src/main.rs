use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use dirtyperiod::catalog::{self, Construction, Instance, Params};
use dirtyperiod::shor::{build_period_finding, count_run, factor_with, ShorParams};
use dirtyperiod::sim::{check_contract, Verdict};
use dirtyperiod::{measure_resources, Circuit};

#[derive(Parser)]
#[command(name = "dirtyperiod", version, about = "Reversible arithmetic with dirty ancillae")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower a construction to NOT/CNOT/Toffoli and print its resources.
    Synthesize {
        op: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Write the gate list here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a construction (or a gate-list file) on every basis state.
    Verify {
        op: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        /// Gate list to check instead of a freshly built circuit.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Gate counts and depth of a gate-list file.
    Measure { file: PathBuf },
    /// List the available constructions.
    List,
    /// Factor a small odd modulus with simulated period finding.
    Shor {
        #[arg(short = 'R')]
        r: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Phase bits per run; defaults to 2n.
        #[arg(long)]
        p: Option<usize>,
    },
}

#[derive(Args, Clone, Copy, Default)]
struct ParamArgs {
    /// Register size.
    #[arg(short = 'n')]
    n: Option<usize>,
    /// Input width of add_wide.
    #[arg(short = 'm')]
    m: Option<usize>,
    /// Constant operand (offset, pivot, multiplier, rotation).
    #[arg(short = 'K')]
    k: Option<u64>,
    /// Modulus.
    #[arg(short = 'R')]
    r: Option<u64>,
    /// Number of control wires.
    #[arg(short = 'c', long = "controls", default_value_t = 0)]
    controls: usize,
    /// Dirty pool size; defaults to the smallest that works.
    #[arg(long)]
    dirty: Option<usize>,
}

impl ParamArgs {
    fn to_params(self, op: Construction) -> anyhow::Result<Params> {
        let needs_n = !op.is_modular() && op != Construction::Mcx;
        if needs_n && self.n.is_none() {
            bail!("{op} needs -n");
        }
        if op.is_modular() && self.r.is_none() {
            bail!("{op} needs -R");
        }
        Ok(Params {
            n: self.n.unwrap_or(0),
            m: self.m,
            k: self.k.unwrap_or(0),
            r: self.r.unwrap_or(0),
            controls: self.controls,
            pool: self.dirty,
        })
    }
}

enum Failure {
    /// Exit code 1.
    Verification,
    /// Exit code 2.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Synthesize { op, params, out } => synthesize(&op, params, out)?,
        Command::Verify { op, params, file } => return verify(op.as_deref(), params, file),
        Command::Measure { file } => {
            let circuit = read_circuit(&file)?;
            print!("{}", measure_resources(&circuit).to_key_value());
            println!("gates={}", circuit.gates.len());
        }
        Command::List => {
            for c in Construction::ALL {
                println!("{:<16} {}", c.name(), c.summary());
            }
        }
        Command::Shor { r, trials, seed, p } => {
            if !shor(r, trials, seed, p)? {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn parse_op(op: &str) -> anyhow::Result<Construction> {
    op.parse().map_err(|e| anyhow!("{e}; run `dirtyperiod list` for the names"))
}

fn describe(inst: &Instance) -> String {
    inst.header().trim_start_matches("# op ").to_string()
}

fn synthesize(op: &str, args: ParamArgs, out: Option<PathBuf>) -> anyhow::Result<()> {
    let op = parse_op(op)?;
    let inst = catalog::build(op, &args.to_params(op)?)?;
    let text = format!("{}\n{}", inst.header(), inst.circuit.to_text());
    let parsed = Circuit::from_text(&text)?;
    let same = parsed.width == inst.circuit.width
        && parsed.gates == inst.circuit.gates
        && parsed.clean_wires == inst.circuit.clean_wires;
    if !same {
        bail!("text round-trip changed the circuit");
    }
    println!("construction: {}", describe(&inst));
    print!("{}", measure_resources(&inst.circuit).to_key_value());
    println!("round_trip=ok");
    if let Some(path) = out {
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {} gates to {}", inst.circuit.gates.len(), path.display());
    }
    Ok(())
}

fn read_circuit(path: &PathBuf) -> anyhow::Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Circuit::from_text(&text)?)
}

fn verify(op: Option<&str>, args: ParamArgs, file: Option<PathBuf>) -> Result<(), Failure> {
    let text = match &file {
        Some(path) => Some(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?),
        None => None,
    };
    let (op, params) = match (op, &text) {
        (Some(op), _) => {
            let op = parse_op(op)?;
            (op, args.to_params(op)?)
        }
        (None, Some(text)) => catalog::parse_header(text)
            .ok_or_else(|| anyhow!("the file has no `# op` header; name the construction"))?
            .map_err(anyhow::Error::from)?,
        (None, None) => return Err(anyhow!("name a construction or pass --file").into()),
    };
    let mut inst = catalog::build(op, &params).map_err(anyhow::Error::from)?;
    if let Some(text) = &text {
        let circuit = Circuit::from_text(text).map_err(anyhow::Error::from)?;
        if circuit.width != inst.circuit.width {
            return Err(anyhow!(
                "file has width {}, {} expects {}",
                circuit.width,
                describe(&inst),
                inst.circuit.width
            )
            .into());
        }
        inst.circuit = circuit;
    }
    let contract = inst.contract().map_err(anyhow::Error::from)?;
    let verdict = check_contract(&inst.circuit, &contract).map_err(anyhow::Error::from)?;
    println!("construction: {}", describe(&inst));
    let pool = inst.layout.pool.len();
    if pool > 0 {
        println!("dirty sweep: all {} values of {} borrowed wire(s), for every input", 1u64 << pool, pool);
    } else {
        println!("dirty sweep: no borrowed wires");
    }
    match verdict {
        Verdict::Pass { checked } => {
            println!("result: pass ({checked} inputs)");
            Ok(())
        }
        Verdict::Fail(cx) => {
            println!("result: fail");
            println!("counterexample: {cx}");
            let show = |s: u64| {
                let mut parts: Vec<String> =
                    inst.layout.operands.iter().enumerate().map(|(i, r)| format!("op{i}={}", r.value_of(s))).collect();
                let ctl: String = inst.layout.controls.iter().map(|w| ((s >> w.0) & 1).to_string()).collect();
                if !ctl.is_empty() {
                    parts.push(format!("controls={ctl}"));
                }
                if pool > 0 {
                    parts.push(format!("dirty={}", inst.layout.pool.value_of(s)));
                }
                parts.join(" ")
            };
            println!("  input:    {}", show(cx.input));
            println!("  expected: {}", show(cx.expected));
            println!("  actual:   {}", show(cx.actual));
            Err(Failure::Verification)
        }
    }
}

/// Returns whether factors were found.
fn shor(r: u64, trials: usize, seed: u64, p: Option<usize>) -> anyhow::Result<bool> {
    if r.is_multiple_of(2) {
        bail!("even modulus {r}: strip factors of 2 first");
    }
    if r > 63 {
        bail!("modulus {r} too large to simulate (at most 63)");
    }
    let report = factor_with(r, trials, seed, p)?;
    println!("R={r}");
    if let Some(how) = &report.classical {
        let (a, b) = report.factors.expect("classical split");
        println!("factors: {a} {b} ({how})");
        return Ok(true);
    }
    if let Some(b) = report.budget {
        println!("budget: clean={} dirty={} total={}", b.clean, b.dirty, b.total);
    }
    for (i, t) in report.trials.iter().enumerate() {
        let opt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        let factors = t.factors.map_or("-".to_string(), |(a, b)| format!("{a},{b}"));
        let note = if t.lucky { " (shares a factor with R)" } else { "" };
        println!(
            "trial {i}: base={} sample={} period={} factors={factors}{note}",
            t.base,
            opt(t.sample),
            opt(t.period)
        );
    }
    let samples: Vec<String> = report.trials.iter().filter_map(|t| t.sample).map(|s| s.to_string()).collect();
    println!("samples: {}", samples.join(" "));
    let found = report.trials.iter().find(|t| t.factors.is_some() && !t.lucky);
    match found.and_then(|t| t.period.map(|l| (t.base, l))) {
        Some((base, l)) => println!("period: {l} (base {base})"),
        None => println!("period: none"),
    }
    match report.factors {
        Some((a, b)) => println!("factors: {a} {b}"),
        None => println!("factors: none after {trials} trials"),
    }
    if let Some(t) = report.trials.iter().find(|t| !t.lucky) {
        let mut params = ShorParams::new(r, t.base)?;
        if let Some(p) = p {
            params = params.with_p(p);
        }
        let pf = build_period_finding(params)?;
        let counts = count_run(&params)?;
        println!(
            "gates (base {}, p={}): not={} cnot={} toffoli={} depth={} width={}",
            t.base, params.p, counts.not_count, counts.cnot_count, counts.toffoli_count, counts.depth, pf.layout.width()
        );
    }
    Ok(report.factors.is_some())
}
