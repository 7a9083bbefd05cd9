use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use steiner_pd::components::build_catalog;
use steiner_pd::graph::metric_closure;
use steiner_pd::instances::{generate, Family, GeneratorSpec};
use steiner_pd::lp::solve_partition_lp;
use steiner_pd::oracle::{brute_force_opt_r_with, brute_force_opt_with};
use steiner_pd::rational::{q_to_f64, q_to_pq, to_q, Pretty};
use steiner_pd::report::write_report;
use steiner_pd::solver::{certify_ratio, rz_solve};
use steiner_pd::stp::{parse_stp, write_stp};
use steiner_pd::verify::{verify_instance, Limits};
use steiner_pd::{Error, Instance};

#[derive(Parser, Debug)]
#[command(name = "steiner-pd", version, about = "Primal-dual Steiner tree approximation with exact oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// STP instance to read.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Where to write the JSON report (or the STP text for `gen`).
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Largest number of terminals per full component.
    #[arg(long, global = true, default_value_t = 3)]
    r: usize,

    /// Generator family when no input file is given: skutella, random_bquasi, star, path.
    #[arg(long, global = true)]
    family: Option<Family>,

    #[arg(long, global = true, default_value_t = 10)]
    n: usize,

    #[arg(long, global = true, default_value_t = 1)]
    b: usize,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Partition LP ground-set guard.
    #[arg(long, global = true)]
    max_ground: Option<usize>,

    /// Steiner-vertex guard of the brute-force optimum.
    #[arg(long, global = true)]
    max_steiner: Option<usize>,

    /// Terminal guard of the r-restricted optimum.
    #[arg(long, global = true)]
    max_terminals: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Run the primal-dual algorithm and certify its ratio when the oracle fits.
    Solve,
    /// Brute-force optimum and r-restricted optimum.
    Exact,
    /// opt_r divided by the partition LP over terminal pairs.
    Gap,
    /// List the full-component catalog.
    Components,
    /// Check every invariant on the instance.
    Verify,
    /// Write a generated instance as STP.
    Gen,
}

enum Failure {
    Input(String),
    Guard(String),
    Invariant,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_guard() {
            Failure::Guard(format!("{e} (raise it with the matching --max-* flag)"))
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn limits(cli: &Cli) -> Limits {
    let base = Limits::default();
    let pick = |flag: &str, v: Option<usize>, default: usize| -> usize {
        match v {
            Some(x) if x != default => {
                eprintln!("warning: --{flag} overrides the default guard {default} with {x}");
                x
            }
            Some(x) => x,
            None => default,
        }
    };
    Limits {
        max_ground: pick("max-ground", cli.max_ground, base.max_ground),
        max_steiner: pick("max-steiner", cli.max_steiner, base.max_steiner),
        max_terminals: pick("max-terminals", cli.max_terminals, base.max_terminals),
    }
}

fn load(cli: &Cli) -> Result<Instance, Failure> {
    if let Some(path) = &cli.input {
        let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        return parse_stp(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())));
    }
    let family = cli.family.ok_or_else(|| Failure::Input("give --input <path> or --family <name>".into()))?;
    let mut spec = GeneratorSpec::random_bquasi(cli.n, cli.b, cli.seed);
    spec.family = family;
    Ok(generate(&spec)?)
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.report {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let inst = load(cli)?;
    let lim = limits(cli);
    match cli.command {
        Command::Gen => {
            let text = write_stp(&inst, cli.family.map(|f| format!("{f:?}")).as_deref());
            match &cli.report {
                Some(_) => emit(cli, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Solve => {
            let mut report = rz_solve(&inst, cli.r)?;
            let oracle = metric_closure(&inst)
                .and_then(|closed| build_catalog(&closed, cli.r))
                .and_then(|cat| brute_force_opt_r_with(&cat, lim.max_terminals));
            match oracle {
                Ok(o) if inst.terminals().len() > 1 => {
                    report.oracle.opt_r = Some(o.cost);
                    report.oracle.loss_star = Some(o.loss);
                }
                Ok(_) => {}
                Err(e) if e.is_guard() => eprintln!("warning: ratio not certified: {e}"),
                Err(e) => return Err(e.into()),
            }
            println!("terminals     {}", report.terminals);
            println!("b             {}", report.b);
            println!("r             {}", report.r);
            println!("iterations    {}", report.iterations.len());
            for (i, it) in report.iterations.iter().enumerate() {
                println!("  {:>3}: K = {:?}, f = {}, mst = {}", i + 1, it.terminals, Pretty(&it.f), Pretty(&it.mst));
            }
            println!("cost          {}", Pretty(&report.final_cost));
            println!("raw cost      {}", Pretty(&report.raw_cost));
            println!("lower bound   {}", Pretty(&report.lower_bound));
            println!("bound         {}", Pretty(&report.theorem_bound));
            if let Some(opt_r) = report.oracle.opt_r {
                let (_, ok) = certify_ratio(&report, report.b)?;
                println!("opt_r         {}", Pretty(&opt_r));
                println!("certified     {ok}");
            }
            emit(cli, &write_report(&report))?;
        }
        Command::Exact => {
            let closed = metric_closure(&inst)?;
            let (opt, _) = brute_force_opt_with(&closed, lim.max_steiner)?;
            let cat = build_catalog(&closed, cli.r)?;
            let o = brute_force_opt_r_with(&cat, lim.max_terminals)?;
            println!("opt           {}", Pretty(&opt));
            println!("opt_r         {}", Pretty(&o.cost));
            println!("loss of T*    {}", Pretty(&o.loss));
            for &k in &o.components {
                let c = &cat.components[k];
                let terms: Vec<usize> = c.terminals.iter().map(|&t| closed.origin_of(t)).collect();
                println!("  component {terms:?} cost {}", Pretty(&c.cost));
            }
            let mut report = rz_solve(&inst, cli.r)?;
            report.oracle.opt = Some(opt);
            report.oracle.opt_r = Some(o.cost);
            report.oracle.loss_star = Some(o.loss);
            emit(cli, &write_report(&report))?;
        }
        Command::Gap => {
            let closed = metric_closure(&inst)?;
            let cat = build_catalog(&closed, cli.r)?;
            let lp = solve_partition_lp(&cat, &[], lim.max_ground)?;
            let o = brute_force_opt_r_with(&cat, lim.max_terminals)?;
            let (opt, _) = brute_force_opt_with(&closed, lim.max_steiner)?;
            let gap = to_q(&o.cost) / &lp.value;
            println!("lp_value      {} ({:.6})", q_to_pq(&lp.value), q_to_f64(&lp.value));
            println!("opt_r         {}", Pretty(&o.cost));
            println!("opt           {}", Pretty(&opt));
            println!("gap           {} ({:.6})", q_to_pq(&gap), q_to_f64(&gap));
            let mut report = rz_solve(&inst, cli.r)?;
            report.oracle.opt = Some(opt);
            report.oracle.opt_r = Some(o.cost);
            report.oracle.loss_star = Some(o.loss);
            report.oracle.lp_value = steiner_pd::rational::from_q(&lp.value);
            emit(cli, &write_report(&report))?;
        }
        Command::Components => {
            let closed = metric_closure(&inst)?;
            let cat = build_catalog(&closed, cli.r)?;
            println!("{} components (r = {})", cat.len(), cat.r);
            for (k, c) in cat.components.iter().enumerate() {
                let terms: Vec<usize> = c.terminals.iter().map(|&t| closed.origin_of(t)).collect();
                let inner: Vec<usize> = c.internal.iter().map(|&s| closed.origin_of(s)).collect();
                println!("{k:>4}  K = {terms:?}  steiner = {inner:?}  cost = {}  loss = {}", Pretty(&c.cost), Pretty(&c.loss_cost));
            }
        }
        Command::Verify => {
            let v = verify_instance(&inst, cli.r, lim)?;
            for c in &v.checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                if c.detail.is_empty() {
                    println!("{mark} {}", c.name);
                } else {
                    println!("{mark} {} ({})", c.name, c.detail);
                }
            }
            emit(cli, &write_report(&v.report))?;
            if !v.all_passed() {
                return Err(Failure::Invariant);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.r < 2 && cli.command != Command::Gen {
        eprintln!("error: {}", Error::RTooSmall(cli.r));
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant) => {
            eprintln!("error: invariant check failed");
            ExitCode::from(3)
        }
    }
}
