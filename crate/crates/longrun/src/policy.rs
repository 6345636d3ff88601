//! Finite-memory policy extraction from an LP solution, and projection onto
//! the original MDP.
//!
//! The extracted policy has two memory modes. In TRANSIENT mode the next
//! move follows the transient flow `ya`, and on arrival at a state `s` the
//! memory switches to RECURRENT with probability `ys / (ys + sum of ya over
//! Act(s))` (the time-0 switch at the initial state lives in the initial
//! memory distribution). In RECURRENT mode inside a MEC `C` the policy plays
//! a perturbed recurrent flow: the normalized `x`-flow on `C` is mixed, in
//! frequency space, with the exact action frequencies of the uniform policy
//! on `C`,
//!
//! ```text
//!     x' = (1 - eps) * x/|x|  +  eps * u,        eps = delta / (|Q| * |A| * max(1, R_max))
//! ```
//!
//! with `|Q|` automaton states, `|A|` original-MDP actions and `R_max` the
//! largest absolute reward. Both mixands satisfy the stationary flow
//! equations on `C`, so `x'` does too, and since `u` is strictly positive the
//! induced chain restricted to `C` is irreducible with action frequencies
//! exactly `x'`. Every action frequency is therefore within `eps` of its LP
//! value, which bounds each steady-state deviation by `eps <= delta` and the
//! reward loss by `eps * R_max <= delta`.

use crate::linalg::solve_unique;
use crate::lp::{LpProblem, LpSolution};
use crate::mec::Mec;
use crate::product::ProductMdp;
use crate::rational::{format_rational, Q, Rat};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Memory mode of the synthesized policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    Transient,
    Recurrent,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Transient, Mode::Recurrent];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Transient => "TRANSIENT",
            Mode::Recurrent => "RECURRENT",
        }
    }

    fn from_name(name: &str) -> Option<Mode> {
        match name {
            "TRANSIENT" => Some(Mode::Transient),
            "RECURRENT" => Some(Mode::Recurrent),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Mode::Transient => 0,
            Mode::Recurrent => 1,
        }
    }
}

/// 2-memory stochastic-update policy on a product MDP.
///
/// `sigma_n[s][mode]` is the next-move distribution (pairs of product action
/// index and probability, sorted by action). The memory update is encoded by
/// `switch_prob[s]`: on arriving at `s` in TRANSIENT mode the memory moves to
/// RECURRENT with that probability; RECURRENT never reverts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesizedPolicy {
    /// Initial memory distribution: probability of TRANSIENT, RECURRENT.
    pub alpha: [Q; 2],
    pub sigma_n: Vec<[Vec<(usize, Q)>; 2]>,
    pub switch_prob: Vec<Q>,
    /// Mixing parameter actually used by the recurrent construction.
    pub epsilon: Q,
    /// The imprecision bound the policy was extracted for.
    pub delta: Q,
}

impl SynthesizedPolicy {
    /// Next-move distribution at `(state, mode)`.
    pub fn next_move(&self, state: usize, mode: Mode) -> &[(usize, Q)] {
        &self.sigma_n[state][mode.index()]
    }

    /// Memory-update distribution on arrival at `state` in `mode`.
    pub fn memory_update(&self, state: usize, mode: Mode) -> Vec<(Mode, Q)> {
        match mode {
            Mode::Recurrent => vec![(Mode::Recurrent, Q::one())],
            Mode::Transient => {
                let p = &self.switch_prob[state];
                let mut out = Vec::new();
                if !(Q::one() - p).is_zero() {
                    out.push((Mode::Transient, Q::one() - p));
                }
                if !p.is_zero() {
                    out.push((Mode::Recurrent, p.clone()));
                }
                out
            }
        }
    }

    /// A memoryless policy wrapped into the 2-memory shape: everything plays
    /// in RECURRENT mode from the start.
    pub fn memoryless(p: &ProductMdp, sigma: Vec<Vec<(usize, Q)>>) -> SynthesizedPolicy {
        let n = p.mdp.states.len();
        assert_eq!(sigma.len(), n);
        let sigma_n = sigma
            .into_iter()
            .enumerate()
            .map(|(s, row)| {
                let filler = vec![(p.mdp.enabled[s][0], Q::one())];
                [filler, row]
            })
            .collect();
        // The initial switch mirrors alpha so the file form reconstructs to
        // the same struct.
        let mut switch_prob = vec![Q::zero(); n];
        switch_prob[p.mdp.initial] = Q::one();
        SynthesizedPolicy {
            alpha: [Q::zero(), Q::one()],
            sigma_n,
            switch_prob,
            epsilon: Q::zero(),
            delta: Q::zero(),
        }
    }

    /// Structural checks against the product: distributions sum to one and
    /// respect enabledness; RECURRENT never reverts by construction.
    pub fn validate(&self, p: &ProductMdp) -> Result<(), PolicyError> {
        let n = p.mdp.states.len();
        if self.sigma_n.len() != n || self.switch_prob.len() != n {
            return Err(PolicyError::Shape(format!(
                "policy covers {} states, product has {n}",
                self.sigma_n.len()
            )));
        }
        let total = self.alpha[0].clone() + &self.alpha[1];
        if !total.is_one() || self.alpha.iter().any(|v| v.is_negative()) {
            return Err(PolicyError::BadDistribution("alpha".to_string()));
        }
        for (s, rows) in self.sigma_n.iter().enumerate() {
            for (mode, row) in Mode::ALL.iter().zip(rows) {
                let mut sum = Q::zero();
                for (a, prob) in row {
                    if prob.is_negative() || *a >= p.mdp.actions.len()
                        || p.mdp.actions[*a].from != s
                    {
                        return Err(PolicyError::BadDistribution(format!(
                            "sigma_n[{}][{}]",
                            p.mdp.states[s],
                            mode.name()
                        )));
                    }
                    sum += prob;
                }
                if !sum.is_one() {
                    return Err(PolicyError::BadDistribution(format!(
                        "sigma_n[{}][{}] sums to {}",
                        p.mdp.states[s],
                        mode.name(),
                        format_rational(&sum)
                    )));
                }
            }
        }
        for (s, prob) in self.switch_prob.iter().enumerate() {
            if prob.is_negative() || *prob > Q::one() {
                return Err(PolicyError::BadDistribution(format!(
                    "switch probability at {}",
                    p.mdp.states[s]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PolicyError {
    #[error("delta must be positive, got {0}")]
    NonPositiveDelta(String),
    #[error("LP solution is not feasible")]
    NotFeasible,
    #[error("policy does not match the product: {0}")]
    Shape(String),
    #[error("invalid distribution: {0}")]
    BadDistribution(String),
    #[error("malformed policy file: {0}")]
    Malformed(String),
}

/// Exact action frequencies of the uniform policy on a MEC: the stationary
/// distribution of playing every MEC action of the current state uniformly,
/// spread over those actions. Strictly positive and flow-stationary.
fn uniform_circulation(p: &ProductMdp, mec: &Mec) -> BTreeMap<usize, Q> {
    let states: Vec<usize> = mec.states.iter().copied().collect();
    let pos: BTreeMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let n = states.len();
    let mec_actions_of = |s: usize| -> Vec<usize> {
        p.mdp.enabled[s]
            .iter()
            .copied()
            .filter(|a| mec.actions.contains(a))
            .collect()
    };

    // Balance rows (pi P = pi) plus normalization.
    let mut rows = vec![vec![Q::zero(); n]; n + 1];
    let mut rhs = vec![Q::zero(); n + 1];
    for (i, &s) in states.iter().enumerate() {
        rows[i][i] -= Q::one();
        let actions = mec_actions_of(s);
        let weight = Q::new(1.into(), (actions.len() as i64).into());
        for a in actions {
            for (t, prob) in &p.mdp.actions[a].successors {
                let j = pos[t];
                rows[j][i] += &weight * prob;
            }
        }
    }
    // Rebuild: rows[j] currently accumulates column-wise; fix by transposing
    // construction: we want for each target j: sum_i pi_i P(i, j) - pi_j = 0.
    // The loop above already wrote P contributions into rows[j][i] and the
    // -1 into rows[i][i], which is exactly that system.
    for value in rows[n].iter_mut() {
        *value = Q::one();
    }
    rhs[n] = Q::one();

    let pi = solve_unique(rows, rhs).expect("uniform chain on a MEC is irreducible");
    let mut circulation = BTreeMap::new();
    for (i, &s) in states.iter().enumerate() {
        let actions = mec_actions_of(s);
        let share = &pi[i] / Q::from_integer((actions.len() as i64).into());
        for a in actions {
            circulation.insert(a, share.clone());
        }
    }
    circulation
}

/// Extracts the 2-memory policy described in the module docs from a feasible
/// LP solution.
pub fn extract_policy(
    sol: &LpSolution,
    p: &ProductMdp,
    lp: &LpProblem,
    mecs: &[Mec],
    delta: &Q,
) -> Result<SynthesizedPolicy, PolicyError> {
    if !delta.is_positive() {
        return Err(PolicyError::NonPositiveDelta(format_rational(delta)));
    }
    if !sol.is_feasible() {
        return Err(PolicyError::NotFeasible);
    }
    let m = &p.mdp;
    let n = m.states.len();

    let q_size = Q::from_integer((p.automaton_size as i64).into());
    let a_size = Q::from_integer((p.original_actions as i64).into());
    let r_max = if p.max_abs_reward > Q::one() {
        p.max_abs_reward.clone()
    } else {
        Q::one()
    };
    let epsilon = delta / (q_size * a_size * r_max);

    let ya = |a: usize| -> &Q { &sol.values[lp.var_ya(a)] };
    let ys = |s: usize| -> &Q { &sol.values[lp.var_ys(s)] };
    let x = |a: usize| -> &Q { &sol.values[lp.var_x(a)] };

    // Transient next moves and switch probabilities.
    let mut sigma_n: Vec<[Vec<(usize, Q)>; 2]> = Vec::with_capacity(n);
    let mut switch_prob = Vec::with_capacity(n);
    for s in 0..n {
        let flow: Q = m.enabled[s].iter().map(|&a| ya(a).clone()).sum();
        let denom = flow.clone() + ys(s);
        let transient = if flow.is_zero() {
            vec![(m.enabled[s][0], Q::one())]
        } else {
            m.enabled[s]
                .iter()
                .filter(|&&a| !ya(a).is_zero())
                .map(|&a| (a, ya(a) / &flow))
                .collect()
        };
        switch_prob.push(if denom.is_zero() {
            Q::zero()
        } else {
            ys(s) / &denom
        });
        sigma_n.push([transient, vec![(m.enabled[s][0], Q::one())]]);
    }

    // Recurrent next moves, per MEC with positive frequency mass.
    for mec in mecs {
        let mass: Q = mec.actions.iter().map(|&a| x(a).clone()).sum();
        if mass.is_zero() {
            continue;
        }
        let uniform = uniform_circulation(p, mec);
        let keep = Q::one() - &epsilon;
        let mixed: BTreeMap<usize, Q> = mec
            .actions
            .iter()
            .map(|&a| {
                let value = &keep * &(x(a) / &mass) + &epsilon * &uniform[&a];
                (a, value)
            })
            .collect();
        for &s in &mec.states {
            let total: Q = m.enabled[s]
                .iter()
                .filter(|a| mec.actions.contains(a))
                .map(|a| mixed[a].clone())
                .sum();
            let row: Vec<(usize, Q)> = m.enabled[s]
                .iter()
                .filter(|a| mec.actions.contains(a))
                .map(|&a| (a, &mixed[&a] / &total))
                .collect();
            sigma_n[s][Mode::Recurrent.index()] = row;
        }
    }

    let p0 = switch_prob[m.initial].clone();
    let policy = SynthesizedPolicy {
        alpha: [Q::one() - &p0, p0],
        sigma_n,
        switch_prob,
        epsilon,
        delta: delta.clone(),
    };
    policy.validate(p).expect("extracted policy is well-formed");
    Ok(policy)
}

// ---------------------------------------------------------------------------
// Projection onto the original MDP
// ---------------------------------------------------------------------------

/// Finite-memory policy on the original MDP with memory
/// `(automaton state, mode)`. Tables are keyed by original state/action
/// indices and defined on the combinations reachable in the product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedPolicy {
    /// Memory elements, sorted: automaton states occurring in the product
    /// crossed with the two modes.
    pub memory: Vec<(usize, Mode)>,
    pub alpha: Vec<((usize, Mode), Q)>,
    /// (original state, memory) -> distribution over original actions.
    pub sigma_n: BTreeMap<(usize, (usize, Mode)), Vec<(usize, Q)>>,
    /// (original action, next original state, memory) -> distribution over memory.
    pub sigma_u: BTreeMap<(usize, usize, (usize, Mode)), Vec<((usize, Mode), Q)>>,
}

/// Projects a product policy onto the original MDP. The automaton component
/// moves into the memory; the memory update carries both the automaton move
/// `q -> r` selected by the product action and the mode switch.
pub fn project_policy(sp: &SynthesizedPolicy, p: &ProductMdp) -> ProjectedPolicy {
    let m = &p.mdp;
    let auts: std::collections::BTreeSet<usize> = p.state_back.iter().map(|&(_, q)| q).collect();
    let memory: Vec<(usize, Mode)> = auts
        .iter()
        .flat_map(|&q| Mode::ALL.iter().map(move |&mode| (q, mode)))
        .collect();

    let initial_aut = p.state_back[m.initial].1;
    let alpha = vec![
        ((initial_aut, Mode::Transient), sp.alpha[0].clone()),
        ((initial_aut, Mode::Recurrent), sp.alpha[1].clone()),
    ];

    let mut sigma_n: BTreeMap<(usize, (usize, Mode)), Vec<(usize, Q)>> = BTreeMap::new();
    let mut sigma_u: BTreeMap<(usize, usize, (usize, Mode)), Vec<((usize, Mode), Q)>> =
        BTreeMap::new();

    for (ps, &(s, q)) in p.state_back.iter().enumerate() {
        for mode in Mode::ALL {
            let row = sp.next_move(ps, mode);
            // Marginal over the automaton move.
            let mut marginal: BTreeMap<usize, Q> = BTreeMap::new();
            for (pa, prob) in row {
                let (orig, _, _) = p.action_back[*pa];
                *marginal.entry(orig).or_insert_with(Q::zero) += prob;
            }
            sigma_n.insert(
                (s, (q, mode)),
                marginal.iter().map(|(a, v)| (*a, v.clone())).collect(),
            );

            // Memory update per original action and successor: pick the move
            // `q -> r` proportionally to the product policy, then apply the
            // mode switch of the product policy at the successor.
            for (pa, prob) in row {
                let (orig, _, r) = p.action_back[*pa];
                let share = prob / &marginal[&orig];
                for &(pt, _) in &m.actions[*pa].successors {
                    let (t, _) = p.state_back[pt];
                    let updates = sp.memory_update(pt, mode);
                    let entry = sigma_u.entry((orig, t, (q, mode))).or_default();
                    for (new_mode, update_prob) in updates {
                        let value = &share * &update_prob;
                        match entry.iter_mut().find(|(mem, _)| *mem == (r, new_mode)) {
                            Some((_, existing)) => *existing += value,
                            None => entry.push(((r, new_mode), value)),
                        }
                    }
                }
            }
        }
    }
    for entry in sigma_u.values_mut() {
        entry.sort_by_key(|(mem, _)| *mem);
        entry.retain(|(_, prob)| !prob.is_zero());
    }

    ProjectedPolicy {
        memory,
        alpha,
        sigma_n,
        sigma_u,
    }
}

// ---------------------------------------------------------------------------
// Policy file format
// ---------------------------------------------------------------------------

/// On-disk policy: memory element names, initial distribution, mixing
/// parameters, and the two tables. Field order is fixed for diff-friendly
/// output; probabilities are rational strings and zero entries are omitted.
#[derive(Debug, Serialize, Deserialize)]
pub struct PolicyFile {
    pub memory: Vec<String>,
    pub alpha: BTreeMap<String, Rat>,
    pub epsilon: Rat,
    pub delta: Rat,
    /// state -> memory -> action -> probability.
    pub sigma_n: BTreeMap<String, BTreeMap<String, BTreeMap<String, Rat>>>,
    /// action -> successor state -> memory -> memory' -> probability.
    pub sigma_u: BTreeMap<String, BTreeMap<String, BTreeMap<String, BTreeMap<String, Rat>>>>,
}

/// Serializes a policy against its product (for names).
pub fn policy_to_file(sp: &SynthesizedPolicy, p: &ProductMdp) -> PolicyFile {
    let m = &p.mdp;
    let mut alpha = BTreeMap::new();
    for (mode, value) in Mode::ALL.iter().zip(&sp.alpha) {
        if !value.is_zero() {
            alpha.insert(mode.name().to_string(), Rat(value.clone()));
        }
    }
    let mut sigma_n = BTreeMap::new();
    for (s, rows) in sp.sigma_n.iter().enumerate() {
        let mut per_mode = BTreeMap::new();
        for (mode, row) in Mode::ALL.iter().zip(rows) {
            let entries: BTreeMap<String, Rat> = row
                .iter()
                .filter(|(_, prob)| !prob.is_zero())
                .map(|(a, prob)| (m.actions[*a].name.clone(), Rat(prob.clone())))
                .collect();
            per_mode.insert(mode.name().to_string(), entries);
        }
        sigma_n.insert(m.states[s].clone(), per_mode);
    }
    let mut sigma_u = BTreeMap::new();
    for action in &m.actions {
        let mut per_succ = BTreeMap::new();
        for (t, _) in &action.successors {
            let mut per_mode = BTreeMap::new();
            for mode in Mode::ALL {
                let updates: BTreeMap<String, Rat> = sp
                    .memory_update(*t, mode)
                    .into_iter()
                    .map(|(m2, prob)| (m2.name().to_string(), Rat(prob)))
                    .collect();
                per_mode.insert(mode.name().to_string(), updates);
            }
            per_succ.insert(m.states[*t].clone(), per_mode);
        }
        sigma_u.insert(action.name.clone(), per_succ);
    }
    PolicyFile {
        memory: Mode::ALL.iter().map(|m| m.name().to_string()).collect(),
        alpha,
        epsilon: Rat(sp.epsilon.clone()),
        delta: Rat(sp.delta.clone()),
        sigma_n,
        sigma_u,
    }
}

/// Reconstructs and validates a policy from its file form.
pub fn policy_from_file(file: &PolicyFile, p: &ProductMdp) -> Result<SynthesizedPolicy, PolicyError> {
    let m = &p.mdp;
    for name in &file.memory {
        if Mode::from_name(name).is_none() {
            return Err(PolicyError::Malformed(format!("unknown memory element {name:?}")));
        }
    }
    let mut alpha = [Q::zero(), Q::zero()];
    for (name, value) in &file.alpha {
        let mode = Mode::from_name(name)
            .ok_or_else(|| PolicyError::Malformed(format!("unknown memory element {name:?}")))?;
        alpha[mode.index()] = value.0.clone();
    }

    let mut sigma_n = vec![[Vec::new(), Vec::new()]; m.states.len()];
    for (state_name, per_mode) in &file.sigma_n {
        let s = m
            .state_index(state_name)
            .ok_or_else(|| PolicyError::Shape(format!("unknown state {state_name:?}")))?;
        for (mode_name, entries) in per_mode {
            let mode = Mode::from_name(mode_name).ok_or_else(|| {
                PolicyError::Malformed(format!("unknown memory element {mode_name:?}"))
            })?;
            let mut row = Vec::new();
            for (action_name, prob) in entries {
                let a = m.action_index(action_name).ok_or_else(|| {
                    PolicyError::Shape(format!("unknown action {action_name:?}"))
                })?;
                row.push((a, prob.0.clone()));
            }
            row.sort_by_key(|&(a, _)| a);
            sigma_n[s][mode.index()] = row;
        }
    }

    // Switch probabilities come from the TRANSIENT rows of sigma_u; the
    // initial state's time-0 switch is alpha's RECURRENT mass.
    let mut switch_prob: Vec<Option<Q>> = vec![None; m.states.len()];
    for (action_name, per_succ) in &file.sigma_u {
        let a = m
            .action_index(action_name)
            .ok_or_else(|| PolicyError::Shape(format!("unknown action {action_name:?}")))?;
        for (succ_name, per_mode) in per_succ {
            let t = m
                .state_index(succ_name)
                .ok_or_else(|| PolicyError::Shape(format!("unknown state {succ_name:?}")))?;
            if !m.actions[a].successors.iter().any(|&(s2, _)| s2 == t) {
                return Err(PolicyError::Shape(format!(
                    "sigma_u entry for impossible transition {action_name} -> {succ_name}"
                )));
            }
            for (mode_name, updates) in per_mode {
                let mode = Mode::from_name(mode_name).ok_or_else(|| {
                    PolicyError::Malformed(format!("unknown memory element {mode_name:?}"))
                })?;
                let mut total = Q::zero();
                let mut to_recurrent = Q::zero();
                for (target_name, prob) in updates {
                    let target = Mode::from_name(target_name).ok_or_else(|| {
                        PolicyError::Malformed(format!("unknown memory element {target_name:?}"))
                    })?;
                    if prob.0.is_negative() {
                        return Err(PolicyError::BadDistribution(format!(
                            "sigma_u[{action_name}][{succ_name}][{mode_name}]"
                        )));
                    }
                    if mode == Mode::Recurrent && target == Mode::Transient && !prob.0.is_zero() {
                        return Err(PolicyError::BadDistribution(
                            "RECURRENT memory must not revert to TRANSIENT".to_string(),
                        ));
                    }
                    if target == Mode::Recurrent {
                        to_recurrent += &prob.0;
                    }
                    total += &prob.0;
                }
                if !total.is_one() {
                    return Err(PolicyError::BadDistribution(format!(
                        "sigma_u[{action_name}][{succ_name}][{mode_name}] sums to {}",
                        format_rational(&total)
                    )));
                }
                if mode == Mode::Transient {
                    match &switch_prob[t] {
                        None => switch_prob[t] = Some(to_recurrent),
                        Some(existing) if *existing == to_recurrent => {}
                        Some(_) => {
                            return Err(PolicyError::Malformed(format!(
                                "inconsistent switch probabilities at {succ_name}"
                            )));
                        }
                    }
                }
            }
        }
    }
    let mut switch_prob: Vec<Q> = switch_prob
        .into_iter()
        .map(|v| v.unwrap_or_else(Q::zero))
        .collect();
    if switch_prob[m.initial].is_zero() {
        switch_prob[m.initial] = alpha[Mode::Recurrent.index()].clone();
    }

    let policy = SynthesizedPolicy {
        alpha,
        sigma_n,
        switch_prob,
        epsilon: file.epsilon.0.clone(),
        delta: file.delta.0.clone(),
    };
    policy.validate(p)?;
    Ok(policy)
}

/// Parses a policy JSON document.
pub fn parse_policy(text: &str, p: &ProductMdp) -> Result<SynthesizedPolicy, PolicyError> {
    let file: PolicyFile =
        serde_json::from_str(text).map_err(|e| PolicyError::Malformed(e.to_string()))?;
    policy_from_file(&file, p)
}

/// Serializes a policy to its canonical JSON text.
pub fn serialize_policy(sp: &SynthesizedPolicy, p: &ProductMdp) -> String {
    serde_json::to_string_pretty(&policy_to_file(sp, p)).expect("policy serialization cannot fail")
}

/// JSON form of a projected policy; memory elements are `q|MODE`.
pub fn projected_to_json(pp: &ProjectedPolicy, m: &crate::mdp::Mdp) -> serde_json::Value {
    let mem_name = |(q, mode): (usize, Mode)| format!("q{q}|{}", mode.name());
    let alpha: BTreeMap<String, String> = pp
        .alpha
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(mem, v)| (mem_name(*mem), format_rational(v)))
        .collect();
    let mut sigma_n: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>> = BTreeMap::new();
    for ((s, mem), row) in &pp.sigma_n {
        sigma_n
            .entry(m.states[*s].clone())
            .or_default()
            .insert(
                mem_name(*mem),
                row.iter()
                    .filter(|(_, prob)| !prob.is_zero())
                    .map(|(a, prob)| (m.actions[*a].name.clone(), format_rational(prob)))
                    .collect(),
            );
    }
    let mut sigma_u: BTreeMap<String, BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>> =
        BTreeMap::new();
    for ((a, t, mem), row) in &pp.sigma_u {
        sigma_u
            .entry(m.actions[*a].name.clone())
            .or_default()
            .entry(m.states[*t].clone())
            .or_default()
            .insert(
                mem_name(*mem),
                row.iter()
                    .map(|(mem2, prob)| (mem_name(*mem2), format_rational(prob)))
                    .collect(),
            );
    }
    serde_json::json!({
        "memory": pp.memory.iter().map(|&mem| mem_name(mem)).collect::<Vec<_>>(),
        "alpha": alpha,
        "sigma_n": sigma_n,
        "sigma_u": sigma_u,
    })
}
