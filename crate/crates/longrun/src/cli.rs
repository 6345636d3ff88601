//! Pipeline entry points behind the command-line interface.
//!
//! Each `run_*` function returns an exit code plus a JSON report. Codes:
//! 0 success (synthesis verified, check passed, or satisfiability decided),
//! 1 usage or input error (surfaced as `CliError`), 2 infeasible or check
//! failed, 3 internal-guarantee violation (a feasible LP whose extracted
//! policy fails verification; must never happen).

use crate::automata::{accepts_lasso, builtin_ldba, match_builtin, parse_hoa, Ldba};
use crate::lp::{build_lp, solve_lp, LongRunSpec, LpStatus, Objective};
use crate::ltl::parse_ltl;
use crate::mdp::{parse_mdp, serialize_mdp, Mdp};
use crate::mec::{accepting_mecs, compute_mecs, Mec};
use crate::policy::{
    extract_policy, parse_policy, policy_to_file, serialize_policy, SynthesizedPolicy,
};
use crate::product::{build_product, ProductMdp};
use crate::rational::{format_rational, Q, Rat};
use crate::verify::{analyze_chain, check_spec, induced_chain, simulate, VerificationReport};
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

// Re-exported for callers assembling configs programmatically.
pub use crate::lp::SssTriple;

/// Everything one synthesis run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mdp_path: PathBuf,
    /// LTL formula text; must match a builtin automaton family.
    pub ltl: Option<String>,
    /// HOA automaton file; mutually exclusive with `ltl`.
    pub hoa_path: Option<PathBuf>,
    pub theta: Q,
    pub sss: Vec<SssTriple>,
    pub reward_thresholds: Vec<Q>,
    pub objective: Objective,
    /// Imprecision bound for the extracted policy; zero decides
    /// satisfiability only.
    pub delta: Q,
    pub freq_bound: Option<Q>,
    pub per_mec_freq: bool,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub dump_lp: bool,
}

impl RunConfig {
    pub fn new(mdp_path: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            mdp_path: mdp_path.into(),
            ltl: None,
            hoa_path: None,
            theta: Q::zero(),
            sss: Vec::new(),
            reward_thresholds: Vec::new(),
            objective: Objective::Feasibility,
            delta: Q::zero(),
            freq_bound: None,
            per_mec_freq: false,
            out: None,
            seed: 0,
            dump_lp: false,
        }
    }

    fn spec(&self) -> LongRunSpec {
        LongRunSpec {
            theta: self.theta.clone(),
            sss: self.sss.clone(),
            reward_thresholds: self.reward_thresholds.clone(),
            objective: self.objective.clone(),
            freq_bound: self.freq_bound.clone(),
            per_mec_freq: self.per_mec_freq,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Mdp(#[from] crate::mdp::MdpError),
    #[error(transparent)]
    Ltl(#[from] crate::ltl::LtlParseError),
    #[error(transparent)]
    Hoa(#[from] crate::automata::HoaError),
    #[error(transparent)]
    Product(#[from] crate::product::ProductError),
    #[error(transparent)]
    Spec(#[from] crate::lp::SpecError),
    #[error(transparent)]
    Policy(#[from] crate::policy::PolicyError),
    #[error("give either an LTL formula or an automaton file, not both")]
    BothAutomata,
    #[error(
        "no builtin automaton family matches {0}; supported shapes: \
         G F p, F G p, F p, G p, p U q, (G F a) -> (G F b). \
         Supply an LDBA in HOA form instead"
    )]
    NoBuiltinMatch(String),
    #[error("reward objective needs explicit weights for {0}-dimensional rewards")]
    AmbiguousWeights(usize),
    #[error("{0}")]
    Internal(String),
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves the monitored automaton: builtin family from an LTL formula, an
/// HOA file, or the trivial automaton when nothing is given.
pub fn resolve_automaton(
    ltl: Option<&str>,
    hoa_path: Option<&Path>,
) -> Result<(Ldba, Option<String>), CliError> {
    match (ltl, hoa_path) {
        (Some(_), Some(_)) => Err(CliError::BothAutomata),
        (Some(text), None) => {
            let formula = parse_ltl(text)?;
            let family = match_builtin(&formula)
                .ok_or_else(|| CliError::NoBuiltinMatch(formula.to_string()))?;
            Ok((builtin_ldba(&family), Some(formula.to_string())))
        }
        (None, Some(path)) => Ok((parse_hoa(&read_file(path)?)?, None)),
        (None, None) => Ok((Ldba::unit(), None)),
    }
}

fn spec_json(spec: &LongRunSpec, delta: &Q) -> serde_json::Value {
    let objective = match &spec.objective {
        Objective::Feasibility => serde_json::json!("feasibility"),
        Objective::MaxReward(weights) => serde_json::json!({
            "max-reward": weights.iter().map(format_rational).collect::<Vec<_>>()
        }),
        Objective::MaxLtlProb => serde_json::json!("max-ltl-prob"),
    };
    serde_json::json!({
        "theta": format_rational(&spec.theta),
        "sss": spec.sss.iter().map(|t| serde_json::json!({
            "ap": t.ap,
            "lower": format_rational(&t.lower),
            "upper": format_rational(&t.upper),
        })).collect::<Vec<_>>(),
        "reward_thresholds": spec.reward_thresholds.iter().map(format_rational).collect::<Vec<_>>(),
        "objective": objective,
        "freq_bound": spec.freq_bound.as_ref().map(format_rational),
        "per_mec": spec.per_mec_freq,
        "delta": format_rational(delta),
    })
}

#[derive(Serialize)]
struct StageSummary {
    product_states: usize,
    product_actions: usize,
    accepting_states: usize,
    mecs: usize,
    accepting_mecs: usize,
    lp_variables: usize,
    lp_constraints: usize,
}

struct Pipeline {
    mdp: Mdp,
    product: ProductMdp,
    mecs: Vec<Mec>,
    formula: Option<String>,
}

fn prepare(cfg_mdp: &Path, ltl: Option<&str>, hoa: Option<&Path>) -> Result<Pipeline, CliError> {
    let mdp = parse_mdp(&read_file(cfg_mdp)?)?;
    let (automaton, formula) = resolve_automaton(ltl, hoa)?;
    let product = build_product(&mdp, &automaton)?;
    let mecs = compute_mecs(&product.mdp);
    Ok(Pipeline {
        mdp,
        product,
        mecs,
        formula,
    })
}

/// Full pipeline: parse, product, MECs, LP, extraction, verification.
/// Writes the policy JSON to `cfg.out` when set; the report always embeds it.
pub fn run_synthesize(cfg: &RunConfig) -> Result<(i32, serde_json::Value), CliError> {
    let Pipeline {
        product,
        mut mecs,
        formula,
        ..
    } = prepare(&cfg.mdp_path, cfg.ltl.as_deref(), cfg.hoa_path.as_deref())?;
    let amec = accepting_mecs(&product, &mut mecs);

    let mut spec = cfg.spec();
    if let Objective::MaxReward(weights) = &spec.objective {
        if weights.is_empty() {
            let dim = product.mdp.reward_dim();
            if dim != 1 {
                return Err(CliError::AmbiguousWeights(dim));
            }
            spec.objective = Objective::MaxReward(vec![Q::from_integer(1.into())]);
        }
    }

    let lp = build_lp(&product, &mecs, &amec, &spec)?;
    let solution = solve_lp(&lp);

    let summary = StageSummary {
        product_states: product.mdp.states.len(),
        product_actions: product.mdp.actions.len(),
        accepting_states: product.accepting.len(),
        mecs: mecs.len(),
        accepting_mecs: amec.len(),
        lp_variables: lp.num_vars(),
        lp_constraints: lp.constraints.len(),
    };

    let mut report = serde_json::json!({
        "command": "synthesize",
        "mdp": cfg.mdp_path.display().to_string(),
        "formula": formula,
        "spec": spec_json(&spec, &cfg.delta),
        "pipeline": serde_json::to_value(&summary).expect("summary"),
        "lp_status": solution.status.to_string(),
        "lp_objective": solution.objective.as_ref().map(format_rational),
    });
    let object = report.as_object_mut().expect("report object");
    if cfg.dump_lp {
        object.insert("lp_dump".to_string(), serde_json::json!(lp.dump()));
    }

    match solution.status {
        LpStatus::Infeasible => {
            object.insert("satisfiable".to_string(), serde_json::json!(false));
            return Ok((2, report));
        }
        LpStatus::Unbounded => {
            return Err(CliError::Internal(
                "objective unbounded; the flow polytope should prevent this".to_string(),
            ));
        }
        LpStatus::Optimal | LpStatus::Feasible => {}
    }
    object.insert("satisfiable".to_string(), serde_json::json!(true));

    if !num_traits::Signed::is_positive(&cfg.delta) {
        object.insert(
            "note".to_string(),
            serde_json::json!(
                "satisfiability decided by the LP; finite-memory extraction needs delta > 0 \
                 (exact satisfaction can require unbounded memory)"
            ),
        );
        object.insert("policy".to_string(), serde_json::Value::Null);
        object.insert("verification".to_string(), serde_json::Value::Null);
        return Ok((0, report));
    }

    let policy = extract_policy(&solution, &product, &lp, &mecs, &cfg.delta)?;
    let chain = induced_chain(&product, &policy);
    let analysis = analyze_chain(&chain, &product);
    let verification = check_spec(&analysis, &spec, &cfg.delta);

    if let Some(path) = &cfg.out {
        std::fs::write(path, serialize_policy(&policy, &product)).map_err(|source| {
            CliError::Write {
                path: path.clone(),
                source,
            }
        })?;
        object.insert(
            "policy_path".to_string(),
            serde_json::json!(path.display().to_string()),
        );
    }
    object.insert(
        "policy".to_string(),
        serde_json::to_value(policy_to_file(&policy, &product)).expect("policy"),
    );
    object.insert(
        "values".to_string(),
        analysis_values_json(&analysis, &product),
    );
    let passed = verification.pass;
    object.insert(
        "verification".to_string(),
        serde_json::to_value(&verification).expect("verification"),
    );
    Ok((if passed { 0 } else { 3 }, report))
}

fn analysis_values_json(
    analysis: &crate::verify::ChainAnalysis,
    product: &ProductMdp,
) -> serde_json::Value {
    let pi: BTreeMap<String, String> = analysis
        .pi
        .iter()
        .map(|(ap, v)| (ap.clone(), format_rational(v)))
        .collect();
    let freq: BTreeMap<String, String> = analysis
        .action_freq
        .iter()
        .map(|(a, v)| (product.mdp.actions[*a].name.clone(), format_rational(v)))
        .collect();
    serde_json::json!({
        "steady_state": pi,
        "action_frequencies": freq,
        "lra": analysis.lra.iter().map(format_rational).collect::<Vec<_>>(),
        "ltl_probability": format_rational(&analysis.ltl_prob),
        "bsccs": analysis.bsccs.len(),
    })
}

/// Re-verifies a stored policy: induced chain, analysis, spec check.
pub fn run_check(
    cfg: &RunConfig,
    policy_path: &Path,
) -> Result<(i32, serde_json::Value), CliError> {
    let Pipeline {
        product,
        formula,
        ..
    } = prepare(&cfg.mdp_path, cfg.ltl.as_deref(), cfg.hoa_path.as_deref())?;
    let policy = parse_policy(&read_file(policy_path)?, &product)?;
    let spec = cfg.spec();
    spec.validate()?;
    let chain = induced_chain(&product, &policy);
    let analysis = analyze_chain(&chain, &product);
    let verification: VerificationReport = check_spec(&analysis, &spec, &cfg.delta);
    let pass = verification.pass;
    let report = serde_json::json!({
        "command": "check",
        "mdp": cfg.mdp_path.display().to_string(),
        "formula": formula,
        "policy": policy_path.display().to_string(),
        "spec": spec_json(&spec, &cfg.delta),
        "values": analysis_values_json(&analysis, &product),
        "verification": serde_json::to_value(&verification).expect("verification"),
    });
    Ok((if pass { 0 } else { 2 }, report))
}

/// Emits the product in the MDP file format plus the accepting state list.
pub fn run_product(cfg: &RunConfig) -> Result<(i32, serde_json::Value), CliError> {
    let Pipeline { product, .. } =
        prepare(&cfg.mdp_path, cfg.ltl.as_deref(), cfg.hoa_path.as_deref())?;
    let mut value: serde_json::Value =
        serde_json::from_str(&serialize_mdp(&product.mdp)).expect("own serialization");
    let accepting: Vec<String> = product
        .accepting
        .iter()
        .map(|&s| product.mdp.states[s].clone())
        .collect();
    value
        .as_object_mut()
        .expect("object")
        .insert("accepting".to_string(), serde_json::json!(accepting));
    if let Some(path) = &cfg.out {
        std::fs::write(path, serde_json::to_string_pretty(&value).expect("json"))
            .map_err(|source| CliError::Write {
                path: path.clone(),
                source,
            })?;
    }
    Ok((0, value))
}

/// Prints the MEC decomposition (of the product when an automaton is given,
/// otherwise of the MDP itself).
pub fn run_mecs(cfg: &RunConfig) -> Result<(i32, serde_json::Value), CliError> {
    let Pipeline {
        product, mut mecs, ..
    } = prepare(&cfg.mdp_path, cfg.ltl.as_deref(), cfg.hoa_path.as_deref())?;
    let amec = accepting_mecs(&product, &mut mecs);
    let entries: Vec<serde_json::Value> = mecs
        .iter()
        .map(|mec| {
            serde_json::json!({
                "states": mec.states.iter().map(|&s| product.mdp.states[s].clone()).collect::<Vec<_>>(),
                "actions": mec.actions.iter().map(|&a| product.mdp.actions[a].name.clone()).collect::<Vec<_>>(),
                "accepting": mec.accepting,
            })
        })
        .collect();
    let report = serde_json::json!({
        "command": "mecs",
        "mdp": cfg.mdp_path.display().to_string(),
        "mecs": entries,
        "accepting_mecs": amec.len(),
    });
    Ok((0, report))
}

/// Samples a trajectory under a stored policy and reports empirical
/// frequencies next to nothing else; deterministic in the seed.
pub fn run_simulate(
    cfg: &RunConfig,
    policy_path: &Path,
    steps: u64,
) -> Result<(i32, serde_json::Value), CliError> {
    let Pipeline { product, .. } =
        prepare(&cfg.mdp_path, cfg.ltl.as_deref(), cfg.hoa_path.as_deref())?;
    let policy = parse_policy(&read_file(policy_path)?, &product)?;
    let result = simulate(&product, &policy, steps, cfg.seed);
    let report = serde_json::json!({
        "command": "simulate",
        "mdp": cfg.mdp_path.display().to_string(),
        "policy": policy_path.display().to_string(),
        "result": serde_json::to_value(&result).expect("simulation"),
    });
    Ok((0, report))
}

/// Cross-check helper used by tests and examples: does the automaton accept
/// the label word of a lasso-shaped run of the MDP.
pub fn automaton_accepts_label_lasso(
    a: &Ldba,
    m: &Mdp,
    prefix_states: &[usize],
    cycle_states: &[usize],
) -> bool {
    let word = crate::ltl::LassoWord::new(
        prefix_states.iter().map(|&s| m.label_names(s)).collect(),
        cycle_states.iter().map(|&s| m.label_names(s)).collect(),
    );
    accepts_lasso(a, &word)
}

/// Parses an `--sss p:l:u` argument.
pub fn parse_sss_arg(text: &str) -> Result<SssTriple, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected p:lower:upper, got {text:?}"));
    }
    let lower = crate::rational::parse_rational(parts[1]).map_err(|e| e.to_string())?;
    let upper = crate::rational::parse_rational(parts[2]).map_err(|e| e.to_string())?;
    Ok(SssTriple {
        ap: parts[0].to_string(),
        lower,
        upper,
    })
}

/// Parses an `--objective` argument.
pub fn parse_objective_arg(text: &str) -> Result<Objective, String> {
    match text {
        "feasibility" => Ok(Objective::Feasibility),
        "max-ltl-prob" => Ok(Objective::MaxLtlProb),
        "max-reward" => Ok(Objective::MaxReward(Vec::new())),
        other => match other.strip_prefix("max-reward:") {
            Some(weights) => {
                let parsed: Result<Vec<Q>, _> = weights
                    .split(',')
                    .map(crate::rational::parse_rational)
                    .collect();
                Ok(Objective::MaxReward(parsed.map_err(|e| e.to_string())?))
            }
            None => Err(format!(
                "unknown objective {text:?} (feasibility | max-reward[:w1,w2,...] | max-ltl-prob)"
            )),
        },
    }
}

/// Export used by the binary to keep it thin.
pub fn print_report_and_exit(outcome: Result<(i32, serde_json::Value), CliError>) -> ! {
    match outcome {
        Ok((code, report)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serialization")
            );
            std::process::exit(code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(1);
        }
    }
}

// Re-export for the binary's signature needs.
pub use crate::rational::parse_rational;

#[allow(unused)]
fn _rat_for_docs(v: &Q) -> Rat {
    Rat(v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn two_loops_file() -> tempfile::NamedTempFile {
        write_temp(
            r#"{"states": ["s", "t"], "initial": "s",
                "labels": {"s": ["p_s"], "t": ["p_t"]},
                "actions": [
                    {"name": "a", "from": "s", "to": {"s": 1}},
                    {"name": "b", "from": "s", "to": {"t": 1}},
                    {"name": "c", "from": "t", "to": {"t": 1}}
                ]}"#,
        )
    }

    #[test]
    fn synthesize_two_loops_half_half() {
        let mdp = two_loops_file();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.sss = vec![
            SssTriple { ap: "p_s".into(), lower: q(1, 2), upper: q(1, 2) },
            SssTriple { ap: "p_t".into(), lower: q(1, 2), upper: q(1, 2) },
        ];
        cfg.delta = q(1, 100);
        let (code, report) = run_synthesize(&cfg).unwrap();
        assert_eq!(code, 0, "report: {report}");
        assert_eq!(report["satisfiable"], serde_json::json!(true));
        assert_eq!(report["values"]["steady_state"]["p_s"], "1/2");
        assert_eq!(report["verification"]["pass"], serde_json::json!(true));
    }

    #[test]
    fn synthesize_infeasible_exits_2() {
        let mdp = two_loops_file();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.sss = vec![
            SssTriple { ap: "p_s".into(), lower: q(3, 5), upper: Q::from_integer(1.into()) },
            SssTriple { ap: "p_t".into(), lower: q(3, 5), upper: Q::from_integer(1.into()) },
        ];
        cfg.delta = q(1, 100);
        let (code, report) = run_synthesize(&cfg).unwrap();
        assert_eq!(code, 2);
        assert_eq!(report["satisfiable"], serde_json::json!(false));
    }

    #[test]
    fn empty_spec_trivially_satisfiable() {
        let mdp = two_loops_file();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.delta = q(1, 10);
        let (code, _) = run_synthesize(&cfg).unwrap();
        assert_eq!(code, 0);
    }

    #[test]
    fn delta_zero_reports_satisfiable_without_policy() {
        let mdp = two_loops_file();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.sss = vec![SssTriple { ap: "p_s".into(), lower: q(1, 2), upper: q(1, 2) }];
        let (code, report) = run_synthesize(&cfg).unwrap();
        assert_eq!(code, 0);
        assert_eq!(report["satisfiable"], serde_json::json!(true));
        assert_eq!(report["policy"], serde_json::Value::Null);
        assert!(report["note"].as_str().unwrap().contains("delta > 0"));
    }

    #[test]
    fn unknown_formula_suggests_hoa() {
        let mdp = two_loops_file();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.ltl = Some("X p_s".into());
        let err = run_synthesize(&cfg).unwrap_err();
        assert!(matches!(err, CliError::NoBuiltinMatch(_)));
    }

    #[test]
    fn objective_arg_parsing() {
        assert_eq!(parse_objective_arg("feasibility").unwrap(), Objective::Feasibility);
        assert_eq!(parse_objective_arg("max-ltl-prob").unwrap(), Objective::MaxLtlProb);
        assert_eq!(
            parse_objective_arg("max-reward:1,1/2").unwrap(),
            Objective::MaxReward(vec![Q::from_integer(1.into()), q(1, 2)])
        );
        assert!(parse_objective_arg("noscope").is_err());
    }

    #[test]
    fn sss_arg_parsing() {
        let triple = parse_sss_arg("p_s:1/4:0.75").unwrap();
        assert_eq!(triple.ap, "p_s");
        assert_eq!(triple.lower, q(1, 4));
        assert_eq!(triple.upper, q(3, 4));
        assert!(parse_sss_arg("p_s:1/4").is_err());
    }

    #[test]
    fn check_roundtrip_on_emitted_policy() {
        let mdp = two_loops_file();
        let policy_out = tempfile::NamedTempFile::new().unwrap();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.sss = vec![
            SssTriple { ap: "p_s".into(), lower: q(1, 2), upper: q(1, 2) },
            SssTriple { ap: "p_t".into(), lower: q(1, 2), upper: q(1, 2) },
        ];
        cfg.delta = q(1, 100);
        cfg.out = Some(policy_out.path().to_path_buf());
        let (code, _) = run_synthesize(&cfg).unwrap();
        assert_eq!(code, 0);

        let (code, report) = run_check(&cfg, policy_out.path()).unwrap();
        assert_eq!(code, 0, "{report}");

        // A tighter bound than the achieved margin fails.
        let mut tight = cfg.clone();
        tight.sss = vec![SssTriple { ap: "p_s".into(), lower: q(3, 5), upper: q(3, 5) }];
        tight.delta = Q::zero();
        let (code, report) = run_check(&tight, policy_out.path()).unwrap();
        assert_eq!(code, 2);
        assert_eq!(report["verification"]["pass"], serde_json::json!(false));
    }

    #[test]
    fn product_subcommand_emits_mdp_format_with_accepting() {
        let mdp = two_loops_file();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.ltl = Some("G F p_t".into());
        let (code, value) = run_product(&cfg).unwrap();
        assert_eq!(code, 0);
        // Output parses back as an MDP.
        let text = serde_json::to_string(&value).unwrap();
        let m = parse_mdp(&text).unwrap();
        assert!(!m.states.is_empty());
        assert!(value["accepting"].as_array().is_some());
    }

    #[test]
    fn mecs_subcommand_counts() {
        let mdp = two_loops_file();
        let cfg = RunConfig::new(mdp.path());
        let (_, report) = run_mecs(&cfg).unwrap();
        assert_eq!(report["mecs"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn simulate_subcommand_deterministic() {
        let mdp = two_loops_file();
        let policy_out = tempfile::NamedTempFile::new().unwrap();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.sss = vec![
            SssTriple { ap: "p_s".into(), lower: q(1, 2), upper: q(1, 2) },
            SssTriple { ap: "p_t".into(), lower: q(1, 2), upper: q(1, 2) },
        ];
        cfg.delta = q(1, 100);
        cfg.out = Some(policy_out.path().to_path_buf());
        run_synthesize(&cfg).unwrap();

        cfg.seed = 1234;
        let (_, r1) = run_simulate(&cfg, policy_out.path(), 500).unwrap();
        let (_, r2) = run_simulate(&cfg, policy_out.path(), 500).unwrap();
        assert_eq!(r1["result"], r2["result"]);
    }

    #[test]
    fn identical_config_gives_byte_identical_report() {
        let mdp = two_loops_file();
        let mut cfg = RunConfig::new(mdp.path());
        cfg.sss = vec![
            SssTriple { ap: "p_s".into(), lower: q(1, 2), upper: q(1, 2) },
            SssTriple { ap: "p_t".into(), lower: q(1, 2), upper: q(1, 2) },
        ];
        cfg.delta = q(1, 100);
        let (_, r1) = run_synthesize(&cfg).unwrap();
        let (_, r2) = run_synthesize(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string_pretty(&r1).unwrap(),
            serde_json::to_string_pretty(&r2).unwrap()
        );
    }
}
