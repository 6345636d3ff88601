//! MDP data model, validation, and the on-disk JSON format.

use crate::rational::{format_rational, parse_rational, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// One action: owned by exactly one state, with an exact successor
/// distribution and a reward vector (one entry per reward dimension).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub from: usize,
    /// Successor distribution, sorted by state index; zero entries are not stored.
    pub successors: Vec<(usize, Q)>,
    pub reward: Vec<Q>,
}

/// A finite labeled MDP with rational transition probabilities.
///
/// Immutable after construction; every query borrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdp {
    pub states: Vec<String>,
    pub initial: usize,
    pub actions: Vec<Action>,
    /// Per state, the indices of its enabled actions (sorted).
    pub enabled: Vec<Vec<usize>>,
    /// Per state, the set of atomic propositions holding there (indices into `ap`).
    pub labels: Vec<BTreeSet<usize>>,
    /// Ordered universe of atomic propositions.
    pub ap: Vec<String>,
}

impl Mdp {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.ap.iter().position(|p| p == name)
    }

    /// Reward dimension shared by all actions.
    pub fn reward_dim(&self) -> usize {
        self.actions.first().map_or(0, |a| a.reward.len())
    }

    /// Label set of a state as proposition names.
    pub fn label_names(&self, state: usize) -> BTreeSet<String> {
        self.labels[state]
            .iter()
            .map(|&i| self.ap[i].clone())
            .collect()
    }

    /// States with successor probability > 0 under `action`.
    pub fn successors(&self, action: usize) -> impl Iterator<Item = usize> + '_ {
        self.actions[action].successors.iter().map(|&(t, _)| t)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MdpError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("duplicate action name {0:?}")]
    DuplicateAction(String),
    #[error("unknown state {state:?} referenced by {context}")]
    UnknownState { state: String, context: String },
    #[error("action {action:?}: distribution sums to {sum}")]
    DistributionSum { action: String, sum: String },
    #[error("action {action:?}: probability {value} of successor {state:?} outside (0,1]")]
    BadProbability {
        action: String,
        state: String,
        value: String,
    },
    #[error("state {0:?} has no actions")]
    NoActions(String),
    #[error("no states declared")]
    Empty,
    #[error("action {action:?}: {source}")]
    BadRational {
        action: String,
        source: crate::rational::ParseRationalError,
    },
    #[error("invalid MDP: {0}")]
    Invalid(ViolationList),
}

/// A single violated invariant, with the offending identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DistributionSum { action: String, sum: String },
    ActionNotUniquelyOwned { action: String },
    StateWithoutActions { state: String },
    RewardDimMismatch { action: String, dim: usize, expected: usize },
    DanglingSuccessor { action: String, state_index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DistributionSum { action, sum } => {
                write!(f, "action {action:?}: distribution sums to {sum}")
            }
            Violation::ActionNotUniquelyOwned { action } => {
                write!(f, "action {action:?} not uniquely owned")
            }
            Violation::StateWithoutActions { state } => {
                write!(f, "state {state:?} has no actions")
            }
            Violation::RewardDimMismatch { action, dim, expected } => write!(
                f,
                "action {action:?}: reward dimension {dim} (expected {expected})"
            ),
            Violation::DanglingSuccessor { action, state_index } => write!(
                f,
                "action {action:?}: successor index {state_index} out of range"
            ),
        }
    }
}

/// Display-friendly wrapper for a list of violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationList(pub Vec<Violation>);

impl fmt::Display for ViolationList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Checks every structural invariant and returns all violations found.
///
/// Parsing already enforces these for file input; this entry point exists for
/// programmatically constructed MDPs.
pub fn validate_mdp(m: &Mdp) -> Vec<Violation> {
    let mut violations = Vec::new();
    let one = Q::one();
    let expected_dim = m.reward_dim();
    let mut owner_count = vec![0usize; m.actions.len()];

    for (i, action) in m.actions.iter().enumerate() {
        let mut sum = Q::zero();
        for (t, p) in &action.successors {
            if *t >= m.states.len() {
                violations.push(Violation::DanglingSuccessor {
                    action: action.name.clone(),
                    state_index: *t,
                });
                continue;
            }
            sum += p;
        }
        if sum != one {
            violations.push(Violation::DistributionSum {
                action: action.name.clone(),
                sum: format_rational(&sum),
            });
        }
        if action.reward.len() != expected_dim {
            violations.push(Violation::RewardDimMismatch {
                action: action.name.clone(),
                dim: action.reward.len(),
                expected: expected_dim,
            });
        }
        let _ = i;
    }

    for (s, enabled) in m.enabled.iter().enumerate() {
        if enabled.is_empty() {
            violations.push(Violation::StateWithoutActions {
                state: m.states[s].clone(),
            });
        }
        for &a in enabled {
            owner_count[a] += 1;
            if m.actions[a].from != s {
                violations.push(Violation::ActionNotUniquelyOwned {
                    action: m.actions[a].name.clone(),
                });
            }
        }
    }
    for (a, &count) in owner_count.iter().enumerate() {
        if count != 1 {
            violations.push(Violation::ActionNotUniquelyOwned {
                action: m.actions[a].name.clone(),
            });
        }
    }
    violations.sort_by_key(|v| format!("{v}"));
    violations.dedup();
    violations
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Probability or reward entry: a JSON number (kept exact via its literal
/// digits) or a string like `"1/2"`, `"0.25"`, `"3"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum NumberOrString {
    Number(serde_json::Number),
    Text(String),
}

impl NumberOrString {
    fn to_rational(&self, action: &str) -> Result<Q, MdpError> {
        let text = match self {
            NumberOrString::Number(n) => n.to_string(),
            NumberOrString::Text(t) => t.clone(),
        };
        parse_rational(&text).map_err(|source| MdpError::BadRational {
            action: action.to_string(),
            source,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ActionFile {
    name: String,
    from: String,
    to: BTreeMap<String, NumberOrString>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reward: Option<Vec<NumberOrString>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MdpFile {
    states: Vec<String>,
    initial: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<BTreeMap<String, Vec<String>>>,
    actions: Vec<ActionFile>,
}

/// Parses the JSON MDP format into a validated [`Mdp`].
pub fn parse_mdp(text: &str) -> Result<Mdp, MdpError> {
    let file: MdpFile = serde_json::from_str(text).map_err(|e| MdpError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    mdp_from_file(file)
}

fn mdp_from_file(file: MdpFile) -> Result<Mdp, MdpError> {
    if file.states.is_empty() {
        return Err(MdpError::Empty);
    }
    let mut state_index = BTreeMap::new();
    for (i, name) in file.states.iter().enumerate() {
        if state_index.insert(name.clone(), i).is_some() {
            return Err(MdpError::DuplicateState(name.clone()));
        }
    }
    let initial = *state_index
        .get(&file.initial)
        .ok_or_else(|| MdpError::UnknownState {
            state: file.initial.clone(),
            context: "initial".to_string(),
        })?;

    // Atomic propositions: sorted union of all label sets.
    let labels_in = file.labels.unwrap_or_default();
    for state in labels_in.keys() {
        if !state_index.contains_key(state) {
            return Err(MdpError::UnknownState {
                state: state.clone(),
                context: "labels".to_string(),
            });
        }
    }
    let ap: Vec<String> = labels_in
        .values()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ap_index: BTreeMap<&str, usize> =
        ap.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let mut labels = vec![BTreeSet::new(); file.states.len()];
    for (state, props) in &labels_in {
        let s = state_index[state];
        labels[s] = props.iter().map(|p| ap_index[p.as_str()]).collect();
    }

    let mut actions = Vec::with_capacity(file.actions.len());
    let mut enabled = vec![Vec::new(); file.states.len()];
    let mut action_names = BTreeSet::new();
    let mut reward_dim: Option<usize> = None;
    for action in &file.actions {
        if !action_names.insert(action.name.clone()) {
            return Err(MdpError::DuplicateAction(action.name.clone()));
        }
        let from = *state_index
            .get(&action.from)
            .ok_or_else(|| MdpError::UnknownState {
                state: action.from.clone(),
                context: format!("action {:?} (from)", action.name),
            })?;
        let mut successors = Vec::new();
        let mut sum = Q::zero();
        for (target, prob) in &action.to {
            let t = *state_index
                .get(target)
                .ok_or_else(|| MdpError::UnknownState {
                    state: target.clone(),
                    context: format!("action {:?} (to)", action.name),
                })?;
            let p = prob.to_rational(&action.name)?;
            if p.is_zero() {
                continue;
            }
            if p.is_negative() || p > Q::one() {
                return Err(MdpError::BadProbability {
                    action: action.name.clone(),
                    state: target.clone(),
                    value: format_rational(&p),
                });
            }
            sum += &p;
            successors.push((t, p));
        }
        if sum != Q::one() {
            return Err(MdpError::DistributionSum {
                action: action.name.clone(),
                sum: format_rational(&sum),
            });
        }
        successors.sort_by_key(|&(t, _)| t);
        let reward = match &action.reward {
            Some(entries) => entries
                .iter()
                .map(|e| e.to_rational(&action.name))
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        if action.reward.is_some() {
            match reward_dim {
                None => reward_dim = Some(reward.len()),
                Some(d) if d != reward.len() => {
                    return Err(MdpError::Invalid(ViolationList(vec![
                        Violation::RewardDimMismatch {
                            action: action.name.clone(),
                            dim: reward.len(),
                            expected: d,
                        },
                    ])));
                }
                Some(_) => {}
            }
        }
        let index = actions.len();
        enabled[from].push(index);
        actions.push(Action {
            name: action.name.clone(),
            from,
            successors,
            reward,
        });
    }

    // Omitted rewards default to the all-zero vector of the common dimension.
    let dim = reward_dim.unwrap_or(0);
    for action in &mut actions {
        if action.reward.is_empty() && dim > 0 {
            action.reward = vec![Q::zero(); dim];
        }
    }

    for (s, acts) in enabled.iter().enumerate() {
        if acts.is_empty() {
            return Err(MdpError::NoActions(file.states[s].clone()));
        }
    }

    let mdp = Mdp {
        states: file.states,
        initial,
        actions,
        enabled,
        labels,
        ap,
    };
    let violations = validate_mdp(&mdp);
    if !violations.is_empty() {
        return Err(MdpError::Invalid(ViolationList(violations)));
    }
    Ok(mdp)
}

/// Serializes a validated MDP back into the JSON format.
///
/// Inverse of [`parse_mdp`] up to field-by-field rational equality.
pub fn serialize_mdp(m: &Mdp) -> String {
    let labels: BTreeMap<String, Vec<String>> = m
        .states
        .iter()
        .enumerate()
        .filter(|(s, _)| !m.labels[*s].is_empty())
        .map(|(s, name)| {
            (
                name.clone(),
                m.labels[s].iter().map(|&i| m.ap[i].clone()).collect(),
            )
        })
        .collect();
    let dim = m.reward_dim();
    let actions = m
        .actions
        .iter()
        .map(|a| ActionFile {
            name: a.name.clone(),
            from: m.states[a.from].clone(),
            to: a
                .successors
                .iter()
                .map(|(t, p)| (m.states[*t].clone(), NumberOrString::Text(format_rational(p))))
                .collect(),
            // The dimension must survive the round trip, so all-zero vectors
            // are written out whenever the MDP carries rewards at all.
            reward: (dim > 0).then(|| {
                a.reward
                    .iter()
                    .map(|r| NumberOrString::Text(format_rational(r)))
                    .collect()
            }),
        })
        .collect();
    let file = MdpFile {
        states: m.states.clone(),
        initial: m.states[m.initial].clone(),
        labels: (!labels.is_empty()).then_some(labels),
        actions,
    };
    serde_json::to_string_pretty(&file).expect("MDP serialization cannot fail")
}
