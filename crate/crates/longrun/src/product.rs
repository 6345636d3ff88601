//! Synchronous product of an MDP with an LDBA.
//!
//! The automaton monitors the label sequence: in product state `⟨s, q⟩` the
//! automaton reads `ν(s)` and moves to some `r`, so each original action `a`
//! splits into indexed actions `a@q->r`, one per automaton move. Only the
//! fragment reachable from `⟨ŝ, q0⟩` is materialized.

use crate::automata::Ldba;
use crate::mdp::{Action, Mdp};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Product MDP with accepting states and back-maps to the factors.
#[derive(Debug, Clone)]
pub struct ProductMdp {
    /// The product itself, as an ordinary MDP (states `s@q`, actions `a@q->r`).
    pub mdp: Mdp,
    /// Product states whose automaton component is accepting.
    pub accepting: BTreeSet<usize>,
    /// Product state index -> (original state, automaton state).
    pub state_back: Vec<(usize, usize)>,
    /// Product action index -> (original action, automaton move q -> r).
    pub action_back: Vec<(usize, usize, usize)>,
    /// Number of automaton states (the whole automaton, not just reachable).
    pub automaton_size: usize,
    /// Number of actions of the original MDP.
    pub original_actions: usize,
    /// Largest absolute reward entry of the original MDP.
    pub max_abs_reward: crate::rational::Q,
}

#[derive(Debug, thiserror::Error)]
pub enum ProductError {
    #[error("automaton proposition {0:?} does not occur in the MDP")]
    ApMismatch(String),
}

impl ProductMdp {
    /// Number of distinct automaton states in the reachable fragment.
    pub fn automaton_states(&self) -> BTreeSet<usize> {
        self.state_back.iter().map(|&(_, q)| q).collect()
    }
}

/// Builds the reachable product of a validated MDP and a validated LDBA
/// whose propositions all occur in the MDP.
pub fn build_product(m: &Mdp, a: &Ldba) -> Result<ProductMdp, ProductError> {
    for p in &a.ap {
        if m.ap_index(p).is_none() {
            return Err(ProductError::ApMismatch(p.clone()));
        }
    }

    // Letter read by the automaton in any product state over s.
    let letter_of_state: Vec<usize> = (0..m.states.len())
        .map(|s| a.letter_mask(&m.label_names(s)))
        .collect();

    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut state_back: Vec<(usize, usize)> = Vec::new();
    let mut queue = VecDeque::new();

    let start = (m.initial, a.initial);
    index.insert(start, 0);
    state_back.push(start);
    queue.push_back(start);

    let mut actions: Vec<Action> = Vec::new();
    let mut action_back: Vec<(usize, usize, usize)> = Vec::new();
    let mut enabled_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();

    while let Some((s, q)) = queue.pop_front() {
        let here = index[&(s, q)];
        let letter = letter_of_state[s];
        for &orig in &m.enabled[s] {
            for &r in &a.trans[q][letter] {
                let mut successors = Vec::new();
                for (t, p) in &m.actions[orig].successors {
                    let key = (*t, r);
                    let target = *index.entry(key).or_insert_with(|| {
                        state_back.push(key);
                        queue.push_back(key);
                        state_back.len() - 1
                    });
                    successors.push((target, p.clone()));
                }
                successors.sort_by_key(|&(t, _)| t);
                let product_action = actions.len();
                actions.push(Action {
                    name: format!(
                        "{}@{}->{}",
                        m.actions[orig].name,
                        a.state_name(q),
                        a.state_name(r)
                    ),
                    from: here,
                    successors,
                    reward: m.actions[orig].reward.clone(),
                });
                action_back.push((orig, q, r));
                enabled_of.entry(here).or_default().push(product_action);
            }
        }
    }

    let states: Vec<String> = state_back
        .iter()
        .map(|&(s, q)| format!("{}@{}", m.states[s], a.state_name(q)))
        .collect();
    let labels: Vec<BTreeSet<usize>> = state_back.iter().map(|&(s, _)| m.labels[s].clone()).collect();
    let enabled: Vec<Vec<usize>> = (0..states.len())
        .map(|i| enabled_of.remove(&i).unwrap_or_default())
        .collect();
    let accepting: BTreeSet<usize> = state_back
        .iter()
        .enumerate()
        .filter(|(_, &(_, q))| a.accepting.contains(&q))
        .map(|(i, _)| i)
        .collect();

    let max_abs_reward = m
        .actions
        .iter()
        .flat_map(|a| a.reward.iter())
        .map(num_traits::Signed::abs)
        .max()
        .unwrap_or_else(num_traits::Zero::zero);

    Ok(ProductMdp {
        mdp: Mdp {
            states,
            initial: 0,
            actions,
            enabled,
            labels,
            ap: m.ap.clone(),
        },
        accepting,
        state_back,
        action_back,
        automaton_size: a.states,
        original_actions: m.actions.len(),
        max_abs_reward,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{builtin_ldba, BuiltinFamily};
    use crate::mdp::{parse_mdp, validate_mdp};

    fn ping_pong() -> Mdp {
        parse_mdp(
            r#"{"states": ["s", "t"], "initial": "s",
                "labels": {"s": ["p_s"], "t": ["p_t"]},
                "actions": [
                    {"name": "a", "from": "s", "to": {"s": 1}},
                    {"name": "b", "from": "s", "to": {"t": 1}},
                    {"name": "c", "from": "t", "to": {"s": 1}}
                ]}"#,
        )
        .unwrap()
    }

    fn two_loops() -> Mdp {
        parse_mdp(
            r#"{"states": ["s", "t"], "initial": "s",
                "labels": {"s": ["p_s"], "t": ["p_t"]},
                "actions": [
                    {"name": "a", "from": "s", "to": {"s": 1}},
                    {"name": "b", "from": "s", "to": {"t": 1}},
                    {"name": "c", "from": "t", "to": {"t": 1}}
                ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn ping_pong_times_gf() {
        let m = ping_pong();
        let a = builtin_ldba(&BuiltinFamily::GfAtom("p_t".into()));
        let p = build_product(&m, &a).unwrap();
        assert!(p.mdp.states.len() <= 4);
        assert_eq!(p.mdp.states.len(), 3, "reachable: s@q0, t@q0, s@q1");
        assert!(validate_mdp(&p.mdp).is_empty());
        // Accepting product states pair with the automaton's F-state.
        for &i in &p.accepting {
            let (_, q) = p.state_back[i];
            assert!(a.accepting.contains(&q));
        }
        assert_eq!(p.accepting.len(), 1);
        // Rewards and labels survive the lift.
        for (i, action) in p.mdp.actions.iter().enumerate() {
            let (orig, _, _) = p.action_back[i];
            assert_eq!(action.reward, m.actions[orig].reward);
        }
        for (i, &(s, _)) in p.state_back.iter().enumerate() {
            assert_eq!(p.mdp.labels[i], m.labels[s]);
        }
    }

    #[test]
    fn unit_automaton_product_is_isomorphic() {
        let m = two_loops();
        let p = build_product(&m, &Ldba::unit()).unwrap();
        assert_eq!(p.mdp.states.len(), m.states.len());
        assert_eq!(p.mdp.actions.len(), m.actions.len());
        assert_eq!(p.accepting.len(), m.states.len(), "all states accepting");
        assert!(validate_mdp(&p.mdp).is_empty());
    }

    #[test]
    fn g_p_s_sends_b_successor_to_rejecting_sink() {
        let m = two_loops();
        let a = builtin_ldba(&BuiltinFamily::GAtom("p_s".into()));
        let p = build_product(&m, &a).unwrap();
        // t@q0 is reached via b while the automaton still reads p_s at s;
        // from there every successor has the dead automaton component q1.
        let t_q0 = p
            .state_back
            .iter()
            .position(|&(s, q)| s == 1 && q == 0)
            .expect("t paired with the live automaton state");
        for &act in &p.mdp.enabled[t_q0] {
            for &(succ, _) in &p.mdp.actions[act].successors {
                let (_, q) = p.state_back[succ];
                assert_eq!(q, 1, "after t the automaton is stuck in the sink");
                assert!(!p.accepting.contains(&succ));
            }
        }
    }

    #[test]
    fn rejects_ap_mismatch() {
        let m = two_loops();
        let a = builtin_ldba(&BuiltinFamily::GfAtom("nope".into()));
        assert!(matches!(
            build_product(&m, &a),
            Err(ProductError::ApMismatch(p)) if p == "nope"
        ));
    }

    #[test]
    fn product_action_distributions_sum_to_one() {
        let m = ping_pong();
        let a = builtin_ldba(&BuiltinFamily::FgAtom("p_s".into()));
        let p = build_product(&m, &a).unwrap();
        assert!(validate_mdp(&p.mdp).is_empty());
    }
}
