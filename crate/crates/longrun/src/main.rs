use clap::{Args, Parser, Subcommand};
use longrun::cli::{
    parse_objective_arg, parse_rational, parse_sss_arg, print_report_and_exit, run_check,
    run_mecs, run_product, run_simulate, run_synthesize, CliError, RunConfig,
};
use longrun::lp::Objective;
use longrun::rational::Q;
use std::path::PathBuf;

/// Policy synthesis for MDPs under combined LTL, steady-state and long-run
/// average reward specifications, with exact rational verification.
#[derive(Parser)]
#[command(name = "longrun", version, about)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// MDP file (JSON).
    #[arg(long)]
    mdp: PathBuf,
    /// LTL formula matching a builtin automaton family.
    #[arg(long)]
    ltl: Option<String>,
    /// LDBA in HOA format (alternative to --ltl).
    #[arg(long)]
    hoa: Option<PathBuf>,
}

#[derive(Args)]
struct SpecArgs {
    /// LTL probability threshold.
    #[arg(long, value_parser = rational, default_value = "0")]
    theta: Q,
    /// Steady-state constraint p:lower:upper (repeatable).
    #[arg(long = "sss", value_parser = sss)]
    sss: Vec<longrun::lp::SssTriple>,
    /// Long-run average reward threshold, one per dimension (repeatable).
    #[arg(long = "reward-threshold", value_parser = rational)]
    reward_threshold: Vec<Q>,
    /// feasibility | max-reward[:w1,w2,...] | max-ltl-prob.
    #[arg(long, value_parser = objective, default_value = "feasibility")]
    objective: Objective,
    /// Lower bound: accepting actions used at least once per f steps.
    #[arg(long = "freq-bound", value_parser = rational)]
    freq_bound: Option<Q>,
    /// Apply the frequency bound inside each accepting MEC.
    #[arg(long = "per-mec", default_value_t = false)]
    per_mec: bool,
}

impl SpecArgs {
    fn empty() -> SpecArgs {
        SpecArgs {
            theta: Q::from_integer(0.into()),
            sss: Vec::new(),
            reward_threshold: Vec::new(),
            objective: Objective::Feasibility,
            freq_bound: None,
            per_mec: false,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability and extract a delta-satisfying policy.
    Synthesize {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        spec: SpecArgs,
        /// Imprecision bound (> 0 to extract a policy; 0 decides only).
        #[arg(long, value_parser = rational, default_value = "0")]
        delta: Q,
        /// Write the policy JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed recorded in reports (simulation uses it).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Embed the tagged LP text in the report.
        #[arg(long = "dump-lp", default_value_t = false)]
        dump_lp: bool,
    },
    /// Re-verify a stored policy against a specification.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        spec: SpecArgs,
        /// Policy JSON produced by synthesize.
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, value_parser = rational, default_value = "0")]
        delta: Q,
    },
    /// Emit the product MDP with its accepting state list.
    Product {
        #[command(flatten)]
        model: ModelArgs,
        /// Write the product here instead of only printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the maximal end component decomposition.
    Mecs {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Sample a trajectory under a stored policy.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn rational(text: &str) -> Result<Q, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn sss(text: &str) -> Result<longrun::lp::SssTriple, String> {
    parse_sss_arg(text)
}

fn objective(text: &str) -> Result<Objective, String> {
    parse_objective_arg(text)
}

fn config(model: ModelArgs, spec: SpecArgs) -> RunConfig {
    let mut cfg = RunConfig::new(model.mdp);
    cfg.ltl = model.ltl;
    cfg.hoa_path = model.hoa;
    cfg.theta = spec.theta;
    cfg.sss = spec.sss;
    cfg.reward_thresholds = spec.reward_threshold;
    cfg.objective = spec.objective;
    cfg.freq_bound = spec.freq_bound;
    cfg.per_mec_freq = spec.per_mec;
    cfg
}

fn main() {
    let args = CliArgs::parse();
    let outcome: Result<(i32, serde_json::Value), CliError> = match args.command {
        Command::Synthesize {
            model,
            spec,
            delta,
            out,
            seed,
            dump_lp,
        } => {
            let mut cfg = config(model, spec);
            cfg.delta = delta;
            cfg.out = out;
            cfg.seed = seed;
            cfg.dump_lp = dump_lp;
            run_synthesize(&cfg)
        }
        Command::Check {
            model,
            spec,
            policy,
            delta,
        } => {
            let mut cfg = config(model, spec);
            cfg.delta = delta;
            run_check(&cfg, &policy)
        }
        Command::Product { model, out } => {
            let mut cfg = config(model, SpecArgs::empty());
            cfg.out = out;
            run_product(&cfg)
        }
        Command::Mecs { model } => run_mecs(&config(model, SpecArgs::empty())),
        Command::Simulate {
            model,
            policy,
            steps,
            seed,
        } => {
            let mut cfg = config(model, SpecArgs::empty());
            cfg.seed = seed;
            run_simulate(&cfg, &policy, steps)
        }
    };
    print_report_and_exit(outcome);
}
