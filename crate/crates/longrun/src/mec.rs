//! Maximal end component decomposition.

use crate::graph::{component_ids, sccs};
use crate::mdp::Mdp;
use crate::product::ProductMdp;
use std::collections::BTreeSet;

/// A maximal end component: a closed, strongly connected set of states and
/// actions in which every state keeps at least one action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mec {
    pub states: BTreeSet<usize>,
    pub actions: BTreeSet<usize>,
    /// Set by [`accepting_mecs`] on products.
    pub accepting: bool,
}

/// Computes the unique MEC decomposition by iterated SCC pruning: actions
/// leaving their component and states left without actions are removed until
/// stable.
pub fn compute_mecs(m: &Mdp) -> Vec<Mec> {
    let n = m.states.len();
    let mut state_alive = vec![true; n];
    let mut action_alive = vec![true; m.actions.len()];

    let mut components: Vec<Vec<usize>>;
    loop {
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                if !state_alive[s] {
                    return Vec::new();
                }
                let mut succ = BTreeSet::new();
                for &a in &m.enabled[s] {
                    if action_alive[a] {
                        succ.extend(m.successors(a));
                    }
                }
                succ.into_iter().collect()
            })
            .collect();
        components = sccs(&adj)
            .into_iter()
            .filter(|c| c.iter().all(|&s| state_alive[s]))
            .collect();
        let ids = component_ids(n, &components);

        let mut changed = false;
        for (a, action) in m.actions.iter().enumerate() {
            if !action_alive[a] {
                continue;
            }
            let owner = action.from;
            let leaves = !state_alive[owner]
                || action
                    .successors
                    .iter()
                    .any(|&(t, _)| !state_alive[t] || ids[t] != ids[owner]);
            if leaves {
                action_alive[a] = false;
                changed = true;
            }
        }
        for s in 0..n {
            if state_alive[s] && m.enabled[s].iter().all(|&a| !action_alive[a]) {
                state_alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut mecs: Vec<Mec> = components
        .into_iter()
        .filter_map(|component| {
            let states: BTreeSet<usize> = component.into_iter().collect();
            let actions: BTreeSet<usize> = states
                .iter()
                .flat_map(|&s| m.enabled[s].iter().copied())
                .filter(|&a| action_alive[a])
                .collect();
            (!actions.is_empty()).then_some(Mec {
                states,
                actions,
                accepting: false,
            })
        })
        .collect();
    mecs.sort_by_key(|mec| *mec.states.iter().next().expect("nonempty MEC"));
    mecs
}

/// Marks MECs of a product that contain an accepting state and returns their
/// indices (the set `AMEC`).
pub fn accepting_mecs(p: &ProductMdp, mecs: &mut [Mec]) -> Vec<usize> {
    let mut amec = Vec::new();
    for (i, mec) in mecs.iter_mut().enumerate() {
        mec.accepting = mec.states.iter().any(|s| p.accepting.contains(s));
        if mec.accepting {
            amec.push(i);
        }
    }
    amec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{builtin_ldba, BuiltinFamily, Ldba};
    use crate::mdp::parse_mdp;
    use crate::product::build_product;

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

    #[test]
    fn two_loops_has_two_mecs() {
        let mecs = compute_mecs(&two_loops());
        assert_eq!(mecs.len(), 2);
        assert_eq!(mecs[0].states, [0].into());
        assert_eq!(mecs[0].actions, [0].into());
        assert_eq!(mecs[1].states, [1].into());
        assert_eq!(mecs[1].actions, [2].into());
        // The crossing action b belongs to no MEC.
        assert!(mecs.iter().all(|m| !m.actions.contains(&1)));
    }

    #[test]
    fn ping_pong_is_one_mec() {
        let mecs = compute_mecs(&ping_pong());
        assert_eq!(mecs.len(), 1);
        assert_eq!(mecs[0].states, [0, 1].into());
        assert_eq!(mecs[0].actions, [0, 1, 2].into());
    }

    #[test]
    fn single_self_loop_is_one_mec() {
        let m = parse_mdp(
            r#"{"states": ["s"], "initial": "s",
                "actions": [{"name": "a", "from": "s", "to": {"s": 1}}]}"#,
        )
        .unwrap();
        let mecs = compute_mecs(&m);
        assert_eq!(mecs.len(), 1);
        assert_eq!(mecs[0].states, [0].into());
    }

    #[test]
    fn transient_chain_states_form_no_mec() {
        // u -> v -> w(self loop); only {w} is a MEC.
        let m = parse_mdp(
            r#"{"states": ["u", "v", "w"], "initial": "u",
                "actions": [
                    {"name": "a", "from": "u", "to": {"v": 1}},
                    {"name": "b", "from": "v", "to": {"w": 1}},
                    {"name": "c", "from": "w", "to": {"w": 1}}
                ]}"#,
        )
        .unwrap();
        let mecs = compute_mecs(&m);
        assert_eq!(mecs.len(), 1);
        assert_eq!(mecs[0].states, [2].into());
    }

    #[test]
    fn probabilistic_exit_excludes_action() {
        // a keeps half the mass at s, half leaks to the sink t.
        let m = parse_mdp(
            r#"{"states": ["s", "t"], "initial": "s",
                "actions": [
                    {"name": "a", "from": "s", "to": {"s": "1/2", "t": "1/2"}},
                    {"name": "c", "from": "t", "to": {"t": 1}}
                ]}"#,
        )
        .unwrap();
        let mecs = compute_mecs(&m);
        assert_eq!(mecs.len(), 1);
        assert_eq!(mecs[0].states, [1].into());
    }

    #[test]
    fn amec_detection_on_products() {
        let m = ping_pong();
        let a = builtin_ldba(&BuiltinFamily::GfAtom("p_t".into()));
        let p = build_product(&m, &a).unwrap();
        let mut mecs = compute_mecs(&p.mdp);
        let amec = accepting_mecs(&p, &mut mecs);
        assert_eq!(mecs.len(), 1);
        assert_eq!(amec, vec![0], "the single MEC contains an accepting state");

        // G p_s on two_loops: committing to t kills acceptance, and the only
        // accepting product state is the s-loop with the live automaton state.
        let m2 = two_loops();
        let a2 = builtin_ldba(&BuiltinFamily::GAtom("p_t".into()));
        let p2 = build_product(&m2, &a2).unwrap();
        let mut mecs2 = compute_mecs(&p2.mdp);
        let amec2 = accepting_mecs(&p2, &mut mecs2);
        // p_t never holds at the initial state, so G p_t fails everywhere
        // reachable: no accepting MEC.
        assert!(amec2.is_empty());

        let unit = build_product(&m2, &Ldba::unit()).unwrap();
        let mut mecs3 = compute_mecs(&unit.mdp);
        let amec3 = accepting_mecs(&unit, &mut mecs3);
        assert_eq!(amec3.len(), mecs3.len(), "unit automaton accepts everywhere");
    }

    #[test]
    fn mec_actions_are_enabled_inside() {
        let mecs = compute_mecs(&ping_pong());
        for mec in &mecs {
            for &a in &mec.actions {
                assert!(mec.states.contains(&ping_pong().actions[a].from));
            }
        }
    }
}
