//! The policy-flow + specification linear program over a product MDP.
//!
//! Variables, all nonnegative:
//!   * `ya[a]` — expected number of uses of action `a` before switching to
//!     recurrent behaviour,
//!   * `ys[s]` — probability of switching upon reaching state `s`,
//!   * `x[a]`  — long-run frequency of action `a`.
//!
//! Constraints (each tagged for the LP dump):
//!   * `transient-flow[s]`: initial mass plus transient inflow equals
//!     transient outflow plus the switch mass,
//!   * `switch-total`: switching happens almost surely,
//!   * `switch-flow[C]`: per MEC, switch mass equals recurrent frequency,
//!   * `recurrent-flow[s]`: the x-flow is stationary,
//!   * `ltl-prob` / `ltl-zero[a]`: frequency outside accepting MECs is at
//!     most `1 - theta` (per-action zero equalities when `theta = 1`),
//!   * `steady[p]`: per steady-state triple, the frequency of `p`-states
//!     lies in `[l, u]`,
//!   * `reward[d]`: per reward dimension, expected frequency-weighted reward
//!     meets the threshold,
//!   * `acc-freq` / `acc-freq[C]`: optional lower bounds on the frequency of
//!     actions enabled at accepting states.

use crate::mec::Mec;
use crate::product::ProductMdp;
use crate::rational::{format_rational, in_unit_interval, Q};
use crate::simplex::{self, Rel, SimplexProblem, SimplexStatus};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Steady-state constraint: the long-run frequency of states labeled with
/// `ap` must lie in `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SssTriple {
    pub ap: String,
    pub lower: Q,
    pub upper: Q,
}

/// What to optimize once the specification constraints hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    Feasibility,
    /// Maximize the weighted long-run average reward; one weight per
    /// reward dimension.
    MaxReward(Vec<Q>),
    /// Maximize the frequency mass inside accepting MECs, a lower bound on
    /// the probability of satisfying the omega-regular specification.
    MaxLtlProb,
}

/// A long-run specification: LTL probability threshold (the automaton itself
/// travels separately), steady-state triples, reward thresholds, objective,
/// and optional accepting-frequency bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongRunSpec {
    pub theta: Q,
    pub sss: Vec<SssTriple>,
    pub reward_thresholds: Vec<Q>,
    pub objective: Objective,
    pub freq_bound: Option<Q>,
    pub per_mec_freq: bool,
}

impl Default for LongRunSpec {
    fn default() -> Self {
        LongRunSpec {
            theta: Q::zero(),
            sss: Vec::new(),
            reward_thresholds: Vec::new(),
            objective: Objective::Feasibility,
            freq_bound: None,
            per_mec_freq: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("theta {0} outside [0, 1]")]
    ThetaRange(String),
    #[error("steady-state triple for {ap:?}: bounds [{lower}, {upper}] invalid")]
    SssBounds {
        ap: String,
        lower: String,
        upper: String,
    },
    #[error("frequency bound {0} must be positive")]
    FreqBound(String),
    #[error("proposition {0:?} does not occur in the model")]
    UnknownAp(String),
    #[error("reward thresholds have dimension {given}, the model has {expected}")]
    ThresholdDim { given: usize, expected: usize },
    #[error("objective weights have dimension {given}, the model has {expected}")]
    WeightDim { given: usize, expected: usize },
    #[error("reward objective requested but the model declares no rewards")]
    NoRewards,
}

impl LongRunSpec {
    /// Checks the internal bounds (no model at hand yet).
    pub fn validate(&self) -> Result<(), SpecError> {
        if !in_unit_interval(&self.theta) {
            return Err(SpecError::ThetaRange(format_rational(&self.theta)));
        }
        for triple in &self.sss {
            let ok = in_unit_interval(&triple.lower)
                && in_unit_interval(&triple.upper)
                && triple.lower <= triple.upper;
            if !ok {
                return Err(SpecError::SssBounds {
                    ap: triple.ap.clone(),
                    lower: format_rational(&triple.lower),
                    upper: format_rational(&triple.upper),
                });
            }
        }
        if let Some(f) = &self.freq_bound {
            if !f.is_positive() {
                return Err(SpecError::FreqBound(format_rational(f)));
            }
        }
        Ok(())
    }
}

/// Origin tag of an LP constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintTag {
    /// Per product state: transient flow balance.
    TransientFlow(String),
    /// Switching to recurrent behaviour happens almost surely.
    SwitchTotal,
    /// Per MEC: switch mass equals recurrent action frequency.
    SwitchFlow(usize),
    /// Per product state: recurrent flow balance.
    RecurrentFlow(String),
    /// Frequency outside accepting MECs bounded by `1 - theta`.
    LtlProb,
    /// `theta = 1` specialization: the action's frequency is zero.
    LtlZero(String),
    /// Per steady-state triple (indexed), frequency of the proposition.
    Steady(usize, String),
    /// Per reward dimension.
    Reward(usize),
    /// Global accepting-action frequency bound.
    AccFreq,
    /// Per accepting MEC frequency bound.
    AccFreqMec(usize),
}

impl fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintTag::TransientFlow(s) => write!(f, "transient-flow[{s}]"),
            ConstraintTag::SwitchTotal => write!(f, "switch-total"),
            ConstraintTag::SwitchFlow(c) => write!(f, "switch-flow[mec{c}]"),
            ConstraintTag::RecurrentFlow(s) => write!(f, "recurrent-flow[{s}]"),
            ConstraintTag::LtlProb => write!(f, "ltl-prob"),
            ConstraintTag::LtlZero(a) => write!(f, "ltl-zero[{a}]"),
            ConstraintTag::Steady(i, p) => write!(f, "steady[{i}:{p}]"),
            ConstraintTag::Reward(d) => write!(f, "reward[{d}]"),
            ConstraintTag::AccFreq => write!(f, "acc-freq"),
            ConstraintTag::AccFreqMec(c) => write!(f, "acc-freq[mec{c}]"),
        }
    }
}

/// One tagged row `lower <= terms <= upper` (either bound optional,
/// equality when they coincide). Terms are `(variable index, coefficient)`.
#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub tag: ConstraintTag,
    pub terms: Vec<(usize, Q)>,
    pub lower: Option<Q>,
    pub upper: Option<Q>,
}

/// The assembled LP. Variable layout: `ya` per action, then `ys` per state,
/// then `x` per action.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub num_actions: usize,
    pub num_states: usize,
    pub constraints: Vec<LpConstraint>,
    /// Maximization terms, or `None` for pure feasibility.
    pub objective: Option<Vec<(usize, Q)>>,
    /// Variable display names, aligned with the layout.
    pub var_names: Vec<String>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        2 * self.num_actions + self.num_states
    }

    pub fn var_ya(&self, action: usize) -> usize {
        action
    }

    pub fn var_ys(&self, state: usize) -> usize {
        self.num_actions + state
    }

    pub fn var_x(&self, action: usize) -> usize {
        self.num_actions + self.num_states + action
    }

    /// Re-evaluates every constraint at `values`; returns the tags violated.
    pub fn check_solution(&self, values: &[Q]) -> Vec<String> {
        let mut violated = Vec::new();
        for c in &self.constraints {
            let total: Q = c
                .terms
                .iter()
                .map(|(v, coeff)| coeff * &values[*v])
                .fold(Q::zero(), |acc, t| acc + t);
            let low_ok = c.lower.as_ref().is_none_or(|l| total >= *l);
            let high_ok = c.upper.as_ref().is_none_or(|u| total <= *u);
            if !(low_ok && high_ok) {
                violated.push(c.tag.to_string());
            }
        }
        if values.iter().any(|v| v.is_negative()) {
            violated.push("nonnegativity".to_string());
        }
        violated
    }

    /// Tagged text form of the LP (the `--dump-lp` output).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        match &self.objective {
            None => out.push_str("feasibility\n"),
            Some(terms) => {
                out.push_str("maximize: ");
                out.push_str(&self.format_terms(terms));
                out.push('\n');
            }
        }
        out.push_str("subject to:\n");
        for c in &self.constraints {
            let body = self.format_terms(&c.terms);
            let line = match (&c.lower, &c.upper) {
                (Some(l), Some(u)) if l == u => {
                    format!("{}: {} = {}", c.tag, body, format_rational(l))
                }
                (Some(l), Some(u)) => format!(
                    "{}: {} <= {} <= {}",
                    c.tag,
                    format_rational(l),
                    body,
                    format_rational(u)
                ),
                (Some(l), None) => format!("{}: {} >= {}", c.tag, body, format_rational(l)),
                (None, Some(u)) => format!("{}: {} <= {}", c.tag, body, format_rational(u)),
                (None, None) => format!("{}: {} free", c.tag, body),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str("bounds: all variables >= 0\n");
        out
    }

    fn format_terms(&self, terms: &[(usize, Q)]) -> String {
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (var, coeff)) in terms.iter().enumerate() {
            if i == 0 {
                if coeff.is_negative() {
                    out.push_str("-");
                }
            } else if coeff.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = coeff.abs();
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
                out.push('*');
            }
            out.push_str(&self.var_names[*var]);
        }
        out
    }
}

/// Builds the LP for `spec` on the product, given its MEC decomposition and
/// the indices of the accepting MECs.
pub fn build_lp(
    p: &ProductMdp,
    mecs: &[Mec],
    amec: &[usize],
    spec: &LongRunSpec,
) -> Result<LpProblem, SpecError> {
    spec.validate()?;
    let m = &p.mdp;
    let num_actions = m.actions.len();
    let num_states = m.states.len();
    let dim = m.reward_dim();
    if !spec.reward_thresholds.is_empty() && spec.reward_thresholds.len() != dim {
        return Err(SpecError::ThresholdDim {
            given: spec.reward_thresholds.len(),
            expected: dim,
        });
    }
    if let Objective::MaxReward(weights) = &spec.objective {
        if dim == 0 {
            return Err(SpecError::NoRewards);
        }
        if weights.len() != dim {
            return Err(SpecError::WeightDim {
                given: weights.len(),
                expected: dim,
            });
        }
    }
    for triple in &spec.sss {
        if m.ap_index(&triple.ap).is_none() {
            return Err(SpecError::UnknownAp(triple.ap.clone()));
        }
    }

    let mut var_names = Vec::with_capacity(2 * num_actions + num_states);
    for a in &m.actions {
        var_names.push(format!("ya[{}]", a.name));
    }
    for s in &m.states {
        var_names.push(format!("ys[{}]", s));
    }
    for a in &m.actions {
        var_names.push(format!("x[{}]", a.name));
    }

    let mut problem = LpProblem {
        num_actions,
        num_states,
        constraints: Vec::new(),
        objective: None,
        var_names,
    };

    let combine = |terms: Vec<(usize, Q)>| -> Vec<(usize, Q)> {
        let mut merged: BTreeMap<usize, Q> = BTreeMap::new();
        for (v, c) in terms {
            *merged.entry(v).or_insert_with(Q::zero) += c;
        }
        merged.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    };

    // Transient flow, per state.
    for s in 0..num_states {
        let mut terms = Vec::new();
        for (a, action) in m.actions.iter().enumerate() {
            for (t, prob) in &action.successors {
                if *t == s {
                    terms.push((problem.var_ya(a), prob.clone()));
                }
            }
        }
        for &a in &m.enabled[s] {
            terms.push((problem.var_ya(a), -Q::one()));
        }
        terms.push((problem.var_ys(s), -Q::one()));
        let rhs = if s == m.initial { -Q::one() } else { Q::zero() };
        problem.constraints.push(LpConstraint {
            tag: ConstraintTag::TransientFlow(m.states[s].clone()),
            terms: combine(terms),
            lower: Some(rhs.clone()),
            upper: Some(rhs),
        });
    }

    // Switching happens almost surely.
    let mec_states: BTreeSet<usize> = mecs.iter().flat_map(|c| c.states.iter().copied()).collect();
    problem.constraints.push(LpConstraint {
        tag: ConstraintTag::SwitchTotal,
        terms: mec_states
            .iter()
            .map(|&s| (problem.var_ys(s), Q::one()))
            .collect(),
        lower: Some(Q::one()),
        upper: Some(Q::one()),
    });

    // Per MEC, switch mass equals recurrent frequency.
    for (i, mec) in mecs.iter().enumerate() {
        let mut terms: Vec<(usize, Q)> = mec
            .states
            .iter()
            .map(|&s| (problem.var_ys(s), Q::one()))
            .collect();
        terms.extend(mec.actions.iter().map(|&a| (problem.var_x(a), -Q::one())));
        problem.constraints.push(LpConstraint {
            tag: ConstraintTag::SwitchFlow(i),
            terms,
            lower: Some(Q::zero()),
            upper: Some(Q::zero()),
        });
    }

    // Recurrent flow, per state.
    for s in 0..num_states {
        let mut terms = Vec::new();
        for (a, action) in m.actions.iter().enumerate() {
            for (t, prob) in &action.successors {
                if *t == s {
                    terms.push((problem.var_x(a), prob.clone()));
                }
            }
        }
        for &a in &m.enabled[s] {
            terms.push((problem.var_x(a), -Q::one()));
        }
        problem.constraints.push(LpConstraint {
            tag: ConstraintTag::RecurrentFlow(m.states[s].clone()),
            terms: combine(terms),
            lower: Some(Q::zero()),
            upper: Some(Q::zero()),
        });
    }

    // LTL probability threshold.
    let amec_actions: BTreeSet<usize> = amec
        .iter()
        .flat_map(|&i| mecs[i].actions.iter().copied())
        .collect();
    if spec.theta.is_positive() {
        let outside: Vec<usize> = (0..num_actions)
            .filter(|a| !amec_actions.contains(a))
            .collect();
        if spec.theta.is_one() {
            for a in outside {
                problem.constraints.push(LpConstraint {
                    tag: ConstraintTag::LtlZero(m.actions[a].name.clone()),
                    terms: vec![(problem.var_x(a), Q::one())],
                    lower: Some(Q::zero()),
                    upper: Some(Q::zero()),
                });
            }
        } else if !outside.is_empty() {
            problem.constraints.push(LpConstraint {
                tag: ConstraintTag::LtlProb,
                terms: outside
                    .into_iter()
                    .map(|a| (problem.var_x(a), Q::one()))
                    .collect(),
                lower: None,
                upper: Some(Q::one() - &spec.theta),
            });
        }
    }

    // Steady-state triples.
    for (i, triple) in spec.sss.iter().enumerate() {
        let ap = m.ap_index(&triple.ap).expect("checked above");
        let terms: Vec<(usize, Q)> = (0..num_states)
            .filter(|&s| m.labels[s].contains(&ap))
            .flat_map(|s| m.enabled[s].iter().copied())
            .map(|a| (problem.var_x(a), Q::one()))
            .collect();
        problem.constraints.push(LpConstraint {
            tag: ConstraintTag::Steady(i, triple.ap.clone()),
            terms,
            lower: Some(triple.lower.clone()),
            upper: Some(triple.upper.clone()),
        });
    }

    // Reward thresholds, one per dimension.
    for (d, threshold) in spec.reward_thresholds.iter().enumerate() {
        let terms: Vec<(usize, Q)> = (0..num_actions)
            .map(|a| (problem.var_x(a), m.actions[a].reward[d].clone()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        problem.constraints.push(LpConstraint {
            tag: ConstraintTag::Reward(d),
            terms,
            lower: Some(threshold.clone()),
            upper: None,
        });
    }

    // Accepting-frequency bounds.
    if let Some(f) = &spec.freq_bound {
        let acc_actions: BTreeSet<usize> = p
            .accepting
            .iter()
            .flat_map(|&s| m.enabled[s].iter().copied())
            .collect();
        let inv_f = f.recip();
        if spec.per_mec_freq {
            for &i in amec {
                let mut terms: Vec<(usize, Q)> = Vec::new();
                for &a in &mecs[i].actions {
                    let mut coeff = -inv_f.clone();
                    if acc_actions.contains(&a) {
                        coeff += Q::one();
                    }
                    if !coeff.is_zero() {
                        terms.push((problem.var_x(a), coeff));
                    }
                }
                problem.constraints.push(LpConstraint {
                    tag: ConstraintTag::AccFreqMec(i),
                    terms,
                    lower: Some(Q::zero()),
                    upper: None,
                });
            }
        } else {
            let terms: Vec<(usize, Q)> = acc_actions
                .iter()
                .filter(|a| amec_actions.contains(a))
                .map(|&a| (problem.var_x(a), Q::one()))
                .collect();
            problem.constraints.push(LpConstraint {
                tag: ConstraintTag::AccFreq,
                terms,
                lower: Some(inv_f),
                upper: None,
            });
        }
    }

    // Objective.
    problem.objective = match &spec.objective {
        Objective::Feasibility => None,
        Objective::MaxReward(weights) => Some(
            (0..num_actions)
                .map(|a| {
                    let value = weights
                        .iter()
                        .zip(&m.actions[a].reward)
                        .map(|(w, r)| w * r)
                        .fold(Q::zero(), |acc, t| acc + t);
                    (problem.var_x(a), value)
                })
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        ),
        Objective::MaxLtlProb => Some(
            amec_actions
                .iter()
                .map(|&a| (problem.var_x(a), Q::one()))
                .collect(),
        ),
    };

    Ok(problem)
}

/// Exact LP solution status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Feasible => "feasible",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        };
        f.write_str(text)
    }
}

/// Rational values per variable plus the solve status.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<Q>,
    pub objective: Option<Q>,
}

impl LpSolution {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, LpStatus::Optimal | LpStatus::Feasible)
    }
}

/// Solves the LP with the exact simplex. Feasibility mode runs phase 1 only.
pub fn solve_lp(lp: &LpProblem) -> LpSolution {
    let n = lp.num_vars();
    let mut rows = Vec::new();
    for c in &lp.constraints {
        let mut coeffs = vec![Q::zero(); n];
        for (v, coeff) in &c.terms {
            coeffs[*v] = coeff.clone();
        }
        match (&c.lower, &c.upper) {
            (Some(l), Some(u)) if l == u => rows.push((coeffs, Rel::Eq, l.clone())),
            (Some(l), Some(u)) => {
                rows.push((coeffs.clone(), Rel::Ge, l.clone()));
                rows.push((coeffs, Rel::Le, u.clone()));
            }
            (Some(l), None) => rows.push((coeffs, Rel::Ge, l.clone())),
            (None, Some(u)) => rows.push((coeffs, Rel::Le, u.clone())),
            (None, None) => {}
        }
    }
    let objective = lp.objective.as_ref().map(|terms| {
        let mut coeffs = vec![Q::zero(); n];
        for (v, coeff) in terms {
            coeffs[*v] = coeff.clone();
        }
        coeffs
    });
    let outcome = simplex::solve(&SimplexProblem {
        num_vars: n,
        rows,
        objective,
    });
    let status = match outcome.status {
        SimplexStatus::Optimal => LpStatus::Optimal,
        SimplexStatus::Feasible => LpStatus::Feasible,
        SimplexStatus::Infeasible => LpStatus::Infeasible,
        SimplexStatus::Unbounded => LpStatus::Unbounded,
    };
    LpSolution {
        status,
        values: outcome.values,
        objective: outcome.objective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Ldba;
    use crate::mdp::parse_mdp;
    use crate::mec::{accepting_mecs, compute_mecs};
    use crate::product::build_product;
    use crate::rational::{q, qi};

    fn two_loops_product() -> (ProductMdp, Vec<Mec>, Vec<usize>) {
        let m = parse_mdp(
            r#"{"states": ["s", "t"], "initial": "s",
                "labels": {"s": ["p_s"], "t": ["p_t"]},
                "actions": [
                    {"name": "a", "from": "s", "to": {"s": 1}},
                    {"name": "b", "from": "s", "to": {"t": 1}},
                    {"name": "c", "from": "t", "to": {"t": 1}}
                ]}"#,
        )
        .unwrap();
        let p = build_product(&m, &Ldba::unit()).unwrap();
        let mut mecs = compute_mecs(&p.mdp);
        let amec = accepting_mecs(&p, &mut mecs);
        (p, mecs, amec)
    }

    fn half_half_spec() -> LongRunSpec {
        LongRunSpec {
            sss: vec![
                SssTriple {
                    ap: "p_s".into(),
                    lower: q(1, 2),
                    upper: q(1, 2),
                },
                SssTriple {
                    ap: "p_t".into(),
                    lower: q(1, 2),
                    upper: q(1, 2),
                },
            ],
            ..LongRunSpec::default()
        }
    }

    #[test]
    fn constraint_counts_match_construction() {
        let (p, mecs, amec) = two_loops_product();
        let lp = build_lp(&p, &mecs, &amec, &half_half_spec()).unwrap();
        assert_eq!(lp.num_vars(), 8, "3 ya + 2 ys + 3 x");
        let count = |pred: &dyn Fn(&ConstraintTag) -> bool| {
            lp.constraints.iter().filter(|c| pred(&c.tag)).count()
        };
        assert_eq!(count(&|t| matches!(t, ConstraintTag::TransientFlow(_))), 2);
        assert_eq!(count(&|t| matches!(t, ConstraintTag::SwitchTotal)), 1);
        assert_eq!(count(&|t| matches!(t, ConstraintTag::SwitchFlow(_))), 2);
        assert_eq!(count(&|t| matches!(t, ConstraintTag::RecurrentFlow(_))), 2);
        assert_eq!(count(&|t| matches!(t, ConstraintTag::Steady(..))), 2);
        assert_eq!(count(&|t| matches!(t, ConstraintTag::LtlProb)), 0, "theta = 0");
        assert_eq!(count(&|t| matches!(t, ConstraintTag::LtlZero(_))), 0);
    }

    #[test]
    fn two_loops_half_half_is_feasible_with_forced_split() {
        let (p, mecs, amec) = two_loops_product();
        let lp = build_lp(&p, &mecs, &amec, &half_half_spec()).unwrap();
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Feasible);
        assert!(lp.check_solution(&sol.values).is_empty());

        let x = |name: &str| {
            let a = p.mdp.action_index(name).unwrap();
            sol.values[lp.var_x(a)].clone()
        };
        assert_eq!(x("a@q0->q0"), q(1, 2));
        assert_eq!(x("c@q0->q0"), q(1, 2));
        assert_eq!(x("b@q0->q0"), qi(0));
        let ys = |name: &str| {
            let s = p.mdp.state_index(name).unwrap();
            sol.values[lp.var_ys(s)].clone()
        };
        assert_eq!(ys("s@q0"), q(1, 2));
        assert_eq!(ys("t@q0"), q(1, 2));
        let yb = sol.values[lp.var_ya(p.mdp.action_index("b@q0->q0").unwrap())].clone();
        assert_eq!(yb, q(1, 2));
    }

    #[test]
    fn tight_sss_is_infeasible() {
        let (p, mecs, amec) = two_loops_product();
        let spec = LongRunSpec {
            sss: vec![
                SssTriple {
                    ap: "p_s".into(),
                    lower: q(3, 5),
                    upper: qi(1),
                },
                SssTriple {
                    ap: "p_t".into(),
                    lower: q(3, 5),
                    upper: qi(1),
                },
            ],
            ..LongRunSpec::default()
        };
        let lp = build_lp(&p, &mecs, &amec, &spec).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn trivial_spec_gives_flow_constraints_only() {
        let (p, mecs, amec) = two_loops_product();
        let lp = build_lp(&p, &mecs, &amec, &LongRunSpec::default()).unwrap();
        assert!(lp
            .constraints
            .iter()
            .all(|c| matches!(
                c.tag,
                ConstraintTag::TransientFlow(_)
                    | ConstraintTag::SwitchTotal
                    | ConstraintTag::SwitchFlow(_)
                    | ConstraintTag::RecurrentFlow(_)
            )));
        let sol = solve_lp(&lp);
        assert!(sol.is_feasible());
    }

    #[test]
    fn theta_one_emits_zero_equalities_per_outside_action() {
        // Product with GF p_t on the two-loops MDP: the s-loop MEC is not
        // accepting, so its action and the crossing action must be zeroed.
        let m = parse_mdp(
            r#"{"states": ["s", "t"], "initial": "s",
                "labels": {"s": ["p_s"], "t": ["p_t"]},
                "actions": [
                    {"name": "a", "from": "s", "to": {"s": 1}},
                    {"name": "b", "from": "s", "to": {"t": 1}},
                    {"name": "c", "from": "t", "to": {"t": 1}}
                ]}"#,
        )
        .unwrap();
        let aut = crate::automata::builtin_ldba(&crate::automata::BuiltinFamily::GfAtom(
            "p_t".into(),
        ));
        let p = build_product(&m, &aut).unwrap();
        let mut mecs = compute_mecs(&p.mdp);
        let amec = accepting_mecs(&p, &mut mecs);
        assert!(!amec.is_empty());
        let spec = LongRunSpec {
            theta: qi(1),
            ..LongRunSpec::default()
        };
        let lp = build_lp(&p, &mecs, &amec, &spec).unwrap();
        let zeros = lp
            .constraints
            .iter()
            .filter(|c| matches!(c.tag, ConstraintTag::LtlZero(_)))
            .count();
        assert!(zeros > 0);
        let sol = solve_lp(&lp);
        assert!(sol.is_feasible(), "committing to the t-loop satisfies GF p_t");
        assert!(lp.check_solution(&sol.values).is_empty());
    }

    #[test]
    fn reward_threshold_and_objective() {
        let m = parse_mdp(
            r#"{"states": ["s", "t"], "initial": "s",
                "labels": {"s": ["p_s"], "t": ["p_t"]},
                "actions": [
                    {"name": "a", "from": "s", "to": {"s": 1}, "reward": [1]},
                    {"name": "b", "from": "s", "to": {"t": 1}, "reward": [0]},
                    {"name": "c", "from": "t", "to": {"t": 1}, "reward": [3]}
                ]}"#,
        )
        .unwrap();
        let p = build_product(&m, &Ldba::unit()).unwrap();
        let mut mecs = compute_mecs(&p.mdp);
        let amec = accepting_mecs(&p, &mut mecs);
        let spec = LongRunSpec {
            objective: Objective::MaxReward(vec![qi(1)]),
            ..LongRunSpec::default()
        };
        let lp = build_lp(&p, &mecs, &amec, &spec).unwrap();
        let sol = solve_lp(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, Some(qi(3)), "committing to the t-loop");

        // An unreachable threshold flips to infeasible.
        let spec = LongRunSpec {
            reward_thresholds: vec![qi(4)],
            ..LongRunSpec::default()
        };
        let lp = build_lp(&p, &mecs, &amec, &spec).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn rejects_unknown_ap_and_bad_bounds() {
        let (p, mecs, amec) = two_loops_product();
        let spec = LongRunSpec {
            sss: vec![SssTriple {
                ap: "nope".into(),
                lower: Q::zero(),
                upper: Q::one(),
            }],
            ..LongRunSpec::default()
        };
        assert!(matches!(
            build_lp(&p, &mecs, &amec, &spec),
            Err(SpecError::UnknownAp(_))
        ));

        let spec = LongRunSpec {
            sss: vec![SssTriple {
                ap: "p_s".into(),
                lower: q(2, 3),
                upper: q(1, 3),
            }],
            ..LongRunSpec::default()
        };
        assert!(matches!(
            build_lp(&p, &mecs, &amec, &spec),
            Err(SpecError::SssBounds { .. })
        ));
    }

    #[test]
    fn dump_contains_tagged_rows() {
        let (p, mecs, amec) = two_loops_product();
        let lp = build_lp(&p, &mecs, &amec, &half_half_spec()).unwrap();
        let dump = lp.dump();
        assert!(dump.contains("transient-flow[s@q0]:"));
        assert!(dump.contains("switch-total:"));
        assert!(dump.contains("recurrent-flow[t@q0]:"));
        assert!(dump.contains("steady[0:p_s]: x[a@q0->q0] + x[b@q0->q0] = 1/2"));
        assert!(dump.contains("bounds: all variables >= 0"));
    }
}
