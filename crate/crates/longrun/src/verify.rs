//! Independent verification of a policy on its induced Markov chain.
//!
//! The chain's locations are `(product state, memory, pending action)`; the
//! transition probability factors into action outcome, memory update and
//! next-move choice. Everything downstream — bottom SCCs, reach
//! probabilities, stationary distributions, steady-state values, long-run
//! average rewards — is computed with exact rational elimination, so the
//! paper-scale checks are equalities, not tolerances.

use crate::graph::{component_ids, sccs};
use crate::linalg::solve_unique;
use crate::lp::LongRunSpec;
use crate::policy::{Mode, SynthesizedPolicy};
use crate::product::ProductMdp;
use crate::rational::{format_rational, to_f64, Q, Rat};
use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// Reachable fragment of the Markov chain induced by a policy.
#[derive(Debug, Clone)]
pub struct InducedChain {
    /// (product state, memory, pending action), in discovery order.
    pub locations: Vec<(usize, Mode, usize)>,
    /// Row-sparse transition matrix; rows sum to one.
    pub trans: Vec<Vec<(usize, Q)>>,
    /// Initial distribution (sparse).
    pub initial: Vec<(usize, Q)>,
    /// Per location: does its product state carry the accepting mark.
    pub accepting: Vec<bool>,
    /// Per location: reward vector of its pending action.
    pub reward: Vec<Vec<Q>>,
}

/// Builds the induced chain of a (validated) policy on the product.
pub fn induced_chain(p: &ProductMdp, sp: &SynthesizedPolicy) -> InducedChain {
    let m = &p.mdp;
    let mut index: BTreeMap<(usize, Mode, usize), usize> = BTreeMap::new();
    let mut locations = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |loc: (usize, Mode, usize),
                      locations: &mut Vec<(usize, Mode, usize)>,
                      queue: &mut VecDeque<(usize, Mode, usize)>|
     -> usize {
        *index.entry(loc).or_insert_with(|| {
            locations.push(loc);
            queue.push_back(loc);
            locations.len() - 1
        })
    };

    let mut initial = Vec::new();
    for (mode, weight) in Mode::ALL.iter().zip(&sp.alpha) {
        if weight.is_zero() {
            continue;
        }
        for (a, prob) in sp.next_move(m.initial, *mode) {
            if prob.is_zero() {
                continue;
            }
            let loc = intern((m.initial, *mode, *a), &mut locations, &mut queue);
            initial.push((loc, weight * prob));
        }
    }

    let mut trans: Vec<Vec<(usize, Q)>> = Vec::new();
    while let Some((_, mode, action)) = queue.pop_front() {
        let mut row: BTreeMap<usize, Q> = BTreeMap::new();
        for (t, succ_prob) in &m.actions[action].successors {
            for (next_mode, update_prob) in sp.memory_update(*t, mode) {
                for (a2, move_prob) in sp.next_move(*t, next_mode) {
                    if move_prob.is_zero() {
                        continue;
                    }
                    let loc = intern((*t, next_mode, *a2), &mut locations, &mut queue);
                    let value = succ_prob * &update_prob * move_prob;
                    *row.entry(loc).or_insert_with(Q::zero) += value;
                }
            }
        }
        trans.push(row.into_iter().collect());
    }

    let accepting = locations
        .iter()
        .map(|&(s, _, _)| p.accepting.contains(&s))
        .collect();
    let reward = locations
        .iter()
        .map(|&(_, _, a)| m.actions[a].reward.clone())
        .collect();
    InducedChain {
        locations,
        trans,
        initial,
        accepting,
        reward,
    }
}

/// Exact long-run analysis of a finite chain.
#[derive(Debug, Clone)]
pub struct ChainAnalysis {
    /// Bottom SCCs (location index lists).
    pub bsccs: Vec<Vec<usize>>,
    /// Probability of ending up in each bottom SCC; sums to one.
    pub reach: Vec<Q>,
    /// Stationary distribution per bottom SCC (location -> mass).
    pub stationary: Vec<BTreeMap<usize, Q>>,
    /// Long-run frequency of each atomic proposition (Cesàro value).
    pub pi: BTreeMap<String, Q>,
    /// Long-run frequency of each product action.
    pub action_freq: BTreeMap<usize, Q>,
    /// Long-run average reward per dimension.
    pub lra: Vec<Q>,
    /// Mass of bottom SCCs containing an accepting location.
    pub ltl_prob: Q,
}

/// Analyzes the chain: bottom SCCs, exact reach probabilities and stationary
/// distributions, then the derived steady-state, reward and acceptance
/// values. `p` supplies labels and reward dimension.
pub fn analyze_chain(c: &InducedChain, p: &ProductMdp) -> ChainAnalysis {
    let n = c.locations.len();
    let adj: Vec<Vec<usize>> = c
        .trans
        .iter()
        .map(|row| row.iter().map(|&(t, _)| t).collect())
        .collect();
    let components = sccs(&adj);
    let ids = component_ids(n, &components);
    let bsccs: Vec<Vec<usize>> = components
        .into_iter()
        .filter(|comp| {
            comp.iter()
                .all(|&v| c.trans[v].iter().all(|&(t, _)| ids[t] == ids[comp[0]]))
        })
        .collect();

    let in_bscc: Vec<Option<usize>> = {
        let mut marks = vec![None; n];
        for (b, comp) in bsccs.iter().enumerate() {
            for &v in comp {
                marks[v] = Some(b);
            }
        }
        marks
    };
    let transient: Vec<usize> = (0..n).filter(|&v| in_bscc[v].is_none()).collect();
    let tpos: BTreeMap<usize, usize> = transient.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Absorption probabilities: h_B = P_tt h_B + P_tB 1, one solve per BSCC.
    let nt = transient.len();
    let mut reach = Vec::with_capacity(bsccs.len());
    for (b, _) in bsccs.iter().enumerate() {
        let h = if nt > 0 {
            let mut rows = vec![vec![Q::zero(); nt]; nt];
            let mut rhs = vec![Q::zero(); nt];
            for (i, &v) in transient.iter().enumerate() {
                rows[i][i] += Q::one();
                for (t, prob) in &c.trans[v] {
                    match in_bscc[*t] {
                        None => rows[i][tpos[t]] -= prob,
                        Some(b2) if b2 == b => rhs[i] += prob,
                        Some(_) => {}
                    }
                }
            }
            solve_unique(rows, rhs).expect("absorption system is nonsingular")
        } else {
            Vec::new()
        };
        let mut total = Q::zero();
        for (loc, weight) in &c.initial {
            match in_bscc[*loc] {
                Some(b2) if b2 == b => total += weight,
                None => total += weight * &h[tpos[loc]],
                Some(_) => {}
            }
        }
        reach.push(total);
    }

    // Stationary distribution per BSCC: pi P = pi, sum pi = 1.
    let mut stationary: Vec<BTreeMap<usize, Q>> = Vec::with_capacity(bsccs.len());
    for comp in &bsccs {
        let k = comp.len();
        let pos: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut rows = vec![vec![Q::zero(); k]; k + 1];
        let mut rhs = vec![Q::zero(); k + 1];
        for (i, &v) in comp.iter().enumerate() {
            rows[i][i] -= Q::one();
            for (t, prob) in &c.trans[v] {
                rows[pos[t]][i] += prob;
            }
        }
        for value in rows[k].iter_mut() {
            *value = Q::one();
        }
        rhs[k] = Q::one();
        let pi = solve_unique(rows, rhs).expect("stationary system of a BSCC is nonsingular");
        stationary.push(comp.iter().enumerate().map(|(i, &v)| (v, pi[i].clone())).collect());
    }

    // Derived quantities.
    let mut pi_ap: BTreeMap<String, Q> = p
        .mdp
        .ap
        .iter()
        .map(|ap| (ap.clone(), Q::zero()))
        .collect();
    let mut action_freq: BTreeMap<usize, Q> = BTreeMap::new();
    let dim = p.mdp.reward_dim();
    let mut lra = vec![Q::zero(); dim];
    let mut ltl_prob = Q::zero();
    for (b, comp) in bsccs.iter().enumerate() {
        let weight = &reach[b];
        if comp.iter().any(|&v| c.accepting[v]) {
            ltl_prob += weight;
        }
        for (&loc, mass) in &stationary[b] {
            let contribution = weight * mass;
            let (state, _, action) = c.locations[loc];
            for &ap in &p.mdp.labels[state] {
                *pi_ap.get_mut(&p.mdp.ap[ap]).expect("ap universe") += &contribution;
            }
            *action_freq.entry(action).or_insert_with(Q::zero) += &contribution;
            for (d, r) in c.reward[loc].iter().enumerate() {
                lra[d] += &contribution * r;
            }
        }
    }

    ChainAnalysis {
        bsccs,
        reach,
        stationary,
        pi: pi_ap,
        action_freq,
        lra,
        ltl_prob,
    }
}

/// Expected transient arrival mass per location: for transient locations the
/// expected number of visits, for bottom-SCC locations the probability that
/// absorption happens exactly there.
pub fn entry_mass(c: &InducedChain) -> Vec<Q> {
    let n = c.locations.len();
    let adj: Vec<Vec<usize>> = c
        .trans
        .iter()
        .map(|row| row.iter().map(|&(t, _)| t).collect())
        .collect();
    let components = sccs(&adj);
    let ids = component_ids(n, &components);
    let bottom: Vec<bool> = {
        let mut marks = vec![false; n];
        for comp in &components {
            if comp
                .iter()
                .all(|&v| c.trans[v].iter().all(|&(t, _)| ids[t] == ids[comp[0]]))
            {
                for &v in comp {
                    marks[v] = true;
                }
            }
        }
        marks
    };
    let transient: Vec<usize> = (0..n).filter(|&v| !bottom[v]).collect();
    let tpos: BTreeMap<usize, usize> = transient.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let nt = transient.len();

    let mut mu = vec![Q::zero(); n];
    for (loc, w) in &c.initial {
        mu[*loc] += w;
    }

    // v = mu_t + v P_tt (expected visits on the transient part).
    let visits = if nt > 0 {
        let mut rows = vec![vec![Q::zero(); nt]; nt];
        let mut rhs = vec![Q::zero(); nt];
        for (i, &v) in transient.iter().enumerate() {
            rows[i][i] += Q::one();
            rhs[i] = mu[v].clone();
            for (t, prob) in &c.trans[v] {
                if !bottom[*t] {
                    rows[tpos[t]][i] -= prob;
                }
            }
        }
        solve_unique(rows, rhs).expect("transient visit system is nonsingular")
    } else {
        Vec::new()
    };

    let mut mass = vec![Q::zero(); n];
    for (i, &v) in transient.iter().enumerate() {
        mass[v] = visits[i].clone();
    }
    for v in 0..n {
        if bottom[v] {
            let mut total = mu[v].clone();
            for (i, &u) in transient.iter().enumerate() {
                for (t, prob) in &c.trans[u] {
                    if *t == v {
                        total += &visits[i] * prob;
                    }
                }
            }
            mass[v] = total;
        }
    }
    mass
}

// ---------------------------------------------------------------------------
// Specification checking
// ---------------------------------------------------------------------------

/// Outcome of one checked constraint, with its exact margin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckEntry {
    pub constraint: String,
    pub value: Rat,
    /// Distance to the nearest violated bound; negative when failing.
    pub margin: Rat,
    pub pass: bool,
}

/// Per-constraint verification of a chain analysis against a specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub delta: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ltl: Option<CheckEntry>,
    pub steady_state: Vec<CheckEntry>,
    pub rewards: Vec<CheckEntry>,
    pub pass: bool,
}

/// Checks the analysis: each steady-state triple within `[l - delta,
/// u + delta]`, each reward dimension at least `R - delta`, and the
/// acceptance probability at least `theta` (never relaxed).
pub fn check_spec(an: &ChainAnalysis, spec: &LongRunSpec, delta: &Q) -> VerificationReport {
    let mut pass = true;

    let ltl = if spec.theta.is_positive() {
        let margin = an.ltl_prob.clone() - &spec.theta;
        let ok = !margin.is_negative();
        pass &= ok;
        Some(CheckEntry {
            constraint: format!("ltl >= {}", format_rational(&spec.theta)),
            value: Rat(an.ltl_prob.clone()),
            margin: Rat(margin),
            pass: ok,
        })
    } else {
        None
    };

    let mut steady_state = Vec::new();
    for triple in &spec.sss {
        let value = an.pi.get(&triple.ap).cloned().unwrap_or_else(Q::zero);
        let low = value.clone() - (&triple.lower - delta);
        let high = (&triple.upper + delta) - &value;
        let margin = low.min(high);
        let ok = !margin.is_negative();
        pass &= ok;
        steady_state.push(CheckEntry {
            constraint: format!(
                "steady[{}] in [{}, {}]",
                triple.ap,
                format_rational(&triple.lower),
                format_rational(&triple.upper)
            ),
            value: Rat(value),
            margin: Rat(margin),
            pass: ok,
        });
    }

    let mut rewards = Vec::new();
    for (d, threshold) in spec.reward_thresholds.iter().enumerate() {
        let value = an.lra.get(d).cloned().unwrap_or_else(Q::zero);
        let margin = value.clone() - (threshold - delta);
        let ok = !margin.is_negative();
        pass &= ok;
        rewards.push(CheckEntry {
            constraint: format!("reward[{d}] >= {}", format_rational(threshold)),
            value: Rat(value),
            margin: Rat(margin),
            pass: ok,
        });
    }

    VerificationReport {
        delta: Rat(delta.clone()),
        ltl,
        steady_state,
        rewards,
        pass,
    }
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// Empirical frequencies from one sampled trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationResult {
    pub seed: u64,
    pub steps: u64,
    /// Action name -> fraction of steps it was played (exact count ratio).
    pub action_freq: BTreeMap<String, Rat>,
    /// Proposition name -> fraction of steps it held.
    pub ap_freq: BTreeMap<String, Rat>,
}

/// Samples one trajectory of `steps` steps under the policy, deterministic
/// in `seed`. Sampling draws an integer below the common denominator of each
/// distribution, so rational probabilities are honored exactly.
pub fn simulate(
    p: &ProductMdp,
    sp: &SynthesizedPolicy,
    steps: u64,
    seed: u64,
) -> SimulationResult {
    assert!(steps >= 1, "need at least one step");
    let m = &p.mdp;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    fn sample<'a, T>(rng: &mut rand_chacha::ChaCha8Rng, choices: &'a [(T, Q)]) -> &'a T {
        debug_assert!(!choices.is_empty());
        if choices.len() == 1 {
            return &choices[0].0;
        }
        let denom = choices
            .iter()
            .fold(BigUint::one(), |acc, (_, q)| {
                acc.lcm(&q.denom().magnitude().clone())
            });
        let draw = rng.gen_biguint_below(&denom);
        let mut cumulative = BigUint::zero();
        for (item, prob) in choices {
            let weight = prob.numer().magnitude() * (&denom / prob.denom().magnitude());
            cumulative += weight;
            if draw < cumulative {
                return item;
            }
        }
        &choices.last().expect("nonempty").0
    }

    let alpha: Vec<(Mode, Q)> = Mode::ALL
        .iter()
        .zip(&sp.alpha)
        .filter(|(_, w)| !w.is_zero())
        .map(|(mode, w)| (*mode, w.clone()))
        .collect();
    let mut mode = *sample(&mut rng, &alpha);
    let mut state = m.initial;
    let mut action = *sample(&mut rng, sp.next_move(state, mode));

    let mut action_counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut ap_counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..steps {
        *action_counts.entry(action).or_default() += 1;
        for &ap in &m.labels[state] {
            *ap_counts.entry(ap).or_default() += 1;
        }
        let next_state = *sample(&mut rng, &m.actions[action].successors);
        let update = sp.memory_update(next_state, mode);
        let next_mode = *sample(&mut rng, &update);
        let next_action = *sample(&mut rng, sp.next_move(next_state, next_mode));
        state = next_state;
        mode = next_mode;
        action = next_action;
    }

    let total = Q::from_integer((steps as i64).into());
    SimulationResult {
        seed,
        steps,
        action_freq: action_counts
            .into_iter()
            .map(|(a, count)| {
                (
                    m.actions[a].name.clone(),
                    Rat(Q::from_integer((count as i64).into()) / &total),
                )
            })
            .collect(),
        ap_freq: ap_counts
            .into_iter()
            .map(|(ap, count)| {
                (
                    m.ap[ap].clone(),
                    Rat(Q::from_integer((count as i64).into()) / &total),
                )
            })
            .collect(),
    }
}

/// `|empirical - expected|` measured in binomial standard errors over `steps`
/// trials; used by the statistical cross-checks.
pub fn standard_errors(empirical: &Q, expected: &Q, steps: u64) -> f64 {
    let e = to_f64(expected);
    let variance = (e * (1.0 - e)).max(1e-12);
    let se = (variance / steps as f64).sqrt();
    (to_f64(empirical) - e).abs() / se
}

#[allow(unused)]
fn _to_usize(q: &Q) -> Option<usize> {
    q.to_integer().to_usize()
}
