//! Limit-deterministic Büchi automata: data model, HOA-subset parser,
//! validation, builtin automata for canonical formula families, and a lasso
//! acceptance oracle.
//!
//! Letters are subsets of the automaton's atomic propositions, stored as
//! bitmask indices (bit `i` set means proposition `ap[i]` holds). Boolean
//! guards from HOA input are expanded into explicit letters, which keeps the
//! limit-determinism conditions checkable by direct enumeration.

use crate::ltl::{Formula, LassoWord};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Büchi automaton with a nondeterministic part `N` (no accepting states)
/// and a deterministic part `D`:
///
/// 1. every `D`-state has exactly one successor per letter, inside `D`;
/// 2. accepting states lie in `D`;
/// 3. every `N`-state has exactly one `N`-successor per letter (extra
///    successors in `D` are the "jump").
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ldba {
    /// Ordered atomic propositions; letters are subsets encoded as bitmasks.
    pub ap: Vec<String>,
    pub states: usize,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    /// `true` marks the deterministic part.
    pub dpart: Vec<bool>,
    /// `trans[state][letter_mask]` is the successor set.
    pub trans: Vec<Vec<BTreeSet<usize>>>,
}

impl Ldba {
    pub fn letter_count(&self) -> usize {
        1usize << self.ap.len()
    }

    /// Canonical state name used in products and reports.
    pub fn state_name(&self, q: usize) -> String {
        format!("q{q}")
    }

    /// Projects a label set (proposition names) onto this automaton's
    /// alphabet; propositions outside the alphabet are ignored.
    pub fn letter_mask(&self, label: &BTreeSet<String>) -> usize {
        self.ap
            .iter()
            .enumerate()
            .filter(|(_, p)| label.contains(*p))
            .fold(0, |mask, (i, _)| mask | (1 << i))
    }

    fn letter_names(&self, mask: usize) -> String {
        let inside: Vec<&str> = self
            .ap
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p.as_str())
            .collect();
        format!("{{{}}}", inside.join(", "))
    }

    /// The trivial automaton accepting every word: one accepting
    /// deterministic state over the empty alphabet.
    pub fn unit() -> Ldba {
        Ldba {
            ap: Vec::new(),
            states: 1,
            initial: 0,
            accepting: [0].into(),
            dpart: vec![true],
            trans: vec![vec![[0].into()]],
        }
    }
}

/// A violated limit-determinism condition, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LdbaViolation {
    /// D-state without exactly one D-successor on the letter.
    Deterministic { state: usize, letter: String },
    /// Accepting state outside the deterministic part.
    AcceptingInN { state: usize },
    /// N-state without exactly one N-successor on the letter.
    NondetBranch { state: usize, letter: String },
}

impl fmt::Display for LdbaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LdbaViolation::Deterministic { state, letter } => write!(
                f,
                "condition 1 violated: D-state {state} on letter {letter} lacks a unique D-successor"
            ),
            LdbaViolation::AcceptingInN { state } => {
                write!(f, "condition 2 violated: accepting state {state} lies in the N-part")
            }
            LdbaViolation::NondetBranch { state, letter } => write!(
                f,
                "condition 3 violated: N-state {state} on letter {letter} lacks a unique N-successor"
            ),
        }
    }
}

/// Checks limit-determinism exhaustively over all (state, letter) pairs.
pub fn validate_ldba(a: &Ldba) -> Vec<LdbaViolation> {
    let mut violations = Vec::new();
    for q in 0..a.states {
        for letter in 0..a.letter_count() {
            let succ = &a.trans[q][letter];
            if a.dpart[q] {
                if succ.len() != 1 || !succ.iter().all(|&r| a.dpart[r]) {
                    violations.push(LdbaViolation::Deterministic {
                        state: q,
                        letter: a.letter_names(letter),
                    });
                }
            } else {
                let n_succ = succ.iter().filter(|&&r| !a.dpart[r]).count();
                if n_succ != 1 {
                    violations.push(LdbaViolation::NondetBranch {
                        state: q,
                        letter: a.letter_names(letter),
                    });
                }
            }
        }
    }
    for &q in &a.accepting {
        if !a.dpart[q] {
            violations.push(LdbaViolation::AcceptingInN { state: q });
        }
    }
    violations
}

/// Infers the N/D partition as the largest successor-closed set of states
/// with exactly one successor per letter. Mutates `dpart` in place.
fn infer_partition(a: &mut Ldba) {
    let mut in_d: Vec<bool> = (0..a.states)
        .map(|q| a.trans[q].iter().all(|succ| succ.len() == 1))
        .collect();
    loop {
        let mut changed = false;
        for q in 0..a.states {
            if in_d[q] {
                let escapes = a.trans[q]
                    .iter()
                    .flatten()
                    .any(|&r| !in_d[r]);
                if escapes {
                    in_d[q] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    a.dpart = in_d;
}

// ---------------------------------------------------------------------------
// Builtin automata
// ---------------------------------------------------------------------------

/// Canonical formula families with builtin automata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinFamily {
    /// `G F p`
    GfAtom(String),
    /// `F G p`
    FgAtom(String),
    /// `F p`
    FAtom(String),
    /// `G p`
    GAtom(String),
    /// `p U q`
    Until(String, String),
    /// `(G F a) -> (G F b)`
    GfImpliesGf(String, String),
}

impl BuiltinFamily {
    /// The formula this family's automaton recognizes.
    pub fn formula(&self) -> Formula {
        let atom = |p: &str| Box::new(Formula::Atom(p.to_string()));
        match self {
            BuiltinFamily::GfAtom(p) => {
                Formula::Globally(Box::new(Formula::Eventually(atom(p))))
            }
            BuiltinFamily::FgAtom(p) => {
                Formula::Eventually(Box::new(Formula::Globally(atom(p))))
            }
            BuiltinFamily::FAtom(p) => Formula::Eventually(atom(p)),
            BuiltinFamily::GAtom(p) => Formula::Globally(atom(p)),
            BuiltinFamily::Until(p, q) => Formula::Until(atom(p), atom(q)),
            BuiltinFamily::GfImpliesGf(a, b) => Formula::Implies(
                Box::new(Formula::Globally(Box::new(Formula::Eventually(atom(a))))),
                Box::new(Formula::Globally(Box::new(Formula::Eventually(atom(b))))),
            ),
        }
    }
}

/// Recognizes formulas matching a builtin family structurally.
pub fn match_builtin(f: &Formula) -> Option<BuiltinFamily> {
    use Formula::*;
    match f {
        Globally(inner) => match inner.as_ref() {
            Eventually(x) => match x.as_ref() {
                Atom(p) => Some(BuiltinFamily::GfAtom(p.clone())),
                _ => None,
            },
            Atom(p) => Some(BuiltinFamily::GAtom(p.clone())),
            _ => None,
        },
        Eventually(inner) => match inner.as_ref() {
            Globally(x) => match x.as_ref() {
                Atom(p) => Some(BuiltinFamily::FgAtom(p.clone())),
                _ => None,
            },
            Atom(p) => Some(BuiltinFamily::FAtom(p.clone())),
            _ => None,
        },
        Until(p, q) => match (p.as_ref(), q.as_ref()) {
            (Atom(p), Atom(q)) => Some(BuiltinFamily::Until(p.clone(), q.clone())),
            _ => None,
        },
        Implies(l, r) => match (match_builtin(l), match_builtin(r)) {
            (Some(BuiltinFamily::GfAtom(a)), Some(BuiltinFamily::GfAtom(b))) => {
                Some(BuiltinFamily::GfImpliesGf(a, b))
            }
            _ => None,
        },
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no builtin automaton for formula {0}")]
pub struct NoBuiltin(pub String);

/// Hand-constructed automaton for a builtin family. Lasso acceptance agrees
/// with [`crate::ltl::eval_lasso`] of the corresponding formula (a tested
/// property).
pub fn builtin_ldba(family: &BuiltinFamily) -> Ldba {
    match family {
        BuiltinFamily::GfAtom(p) => {
            // 0: p not seen this step, 1: p seen (accepting); fully deterministic.
            build(&[p.clone()], 2, 0, &[1], |q, letter, _| {
                let _ = q;
                if letter & 1 != 0 {
                    vec![1]
                } else {
                    vec![0]
                }
            })
        }
        BuiltinFamily::FgAtom(p) => {
            // 0: waiting hub (N); 1: checking G p (accepting); 2: dead sink.
            build(&[p.clone()], 3, 0, &[1], |q, letter, _| match q {
                0 => {
                    if letter & 1 != 0 {
                        vec![0, 1]
                    } else {
                        vec![0]
                    }
                }
                1 => {
                    if letter & 1 != 0 {
                        vec![1]
                    } else {
                        vec![2]
                    }
                }
                _ => vec![2],
            })
        }
        BuiltinFamily::FAtom(p) => {
            // 0: waiting; 1: satisfied sink (accepting).
            build(&[p.clone()], 2, 0, &[1], |q, letter, _| match q {
                0 => {
                    if letter & 1 != 0 {
                        vec![1]
                    } else {
                        vec![0]
                    }
                }
                _ => vec![1],
            })
        }
        BuiltinFamily::GAtom(p) => {
            // 0: p has always held (accepting); 1: dead sink.
            build(&[p.clone()], 2, 0, &[0], |q, letter, _| match q {
                0 => {
                    if letter & 1 != 0 {
                        vec![0]
                    } else {
                        vec![1]
                    }
                }
                _ => vec![1],
            })
        }
        BuiltinFamily::Until(p, q) => {
            if p == q {
                // p U p is F p.
                return builtin_ldba(&BuiltinFamily::FAtom(p.clone()));
            }
            let ap = vec![p.clone(), q.clone()];
            // 0: waiting; 1: satisfied sink (accepting); 2: dead sink.
            build(&ap, 3, 0, &[1], |state, letter, _| match state {
                0 => {
                    if letter & 2 != 0 {
                        vec![1]
                    } else if letter & 1 != 0 {
                        vec![0]
                    } else {
                        vec![2]
                    }
                }
                1 => vec![1],
                _ => vec![2],
            })
        }
        BuiltinFamily::GfImpliesGf(a, b) => {
            if a == b {
                // (G F a) -> (G F a) holds on every word.
                return build(&[a.clone()], 1, 0, &[0], |_, _, _| vec![0]);
            }
            let ap = vec![a.clone(), b.clone()];
            // 0: hub (N); 1/2: G F b checker (2 accepting); 3: G !a checker
            // (accepting); 4: dead sink.
            build(&ap, 5, 0, &[2, 3], |state, letter, _| {
                let has_a = letter & 1 != 0;
                let has_b = letter & 2 != 0;
                match state {
                    0 => {
                        let mut succ = vec![0, if has_b { 2 } else { 1 }];
                        if !has_a {
                            succ.push(3);
                        }
                        succ
                    }
                    1 | 2 => {
                        if has_b {
                            vec![2]
                        } else {
                            vec![1]
                        }
                    }
                    3 => {
                        if has_a {
                            vec![4]
                        } else {
                            vec![3]
                        }
                    }
                    _ => vec![4],
                }
            })
        }
    }
}

fn build(
    ap: &[String],
    states: usize,
    initial: usize,
    accepting: &[usize],
    succ: impl Fn(usize, usize, usize) -> Vec<usize>,
) -> Ldba {
    let letters = 1usize << ap.len();
    let trans = (0..states)
        .map(|q| {
            (0..letters)
                .map(|letter| succ(q, letter, letters).into_iter().collect())
                .collect()
        })
        .collect();
    let mut a = Ldba {
        ap: ap.to_vec(),
        states,
        initial,
        accepting: accepting.iter().copied().collect(),
        dpart: vec![false; states],
        trans,
    };
    infer_partition(&mut a);
    debug_assert!(validate_ldba(&a).is_empty(), "builtin automaton invalid");
    a
}

// ---------------------------------------------------------------------------
// Lasso acceptance
// ---------------------------------------------------------------------------

/// Decides whether some run over `prefix · cycle^ω` visits accepting states
/// infinitely often. Requires a validated automaton.
///
/// A run makes at most one effective jump from the N-part into the D-part,
/// so it suffices to walk the unique N-run, trying every available jump,
/// until a (word position, state) pair repeats; after a jump the run is
/// deterministic and acceptance reduces to cycle detection.
pub fn accepts_lasso(a: &Ldba, word: &LassoWord) -> bool {
    let masks: Vec<usize> = (0..word.len())
        .map(|i| a.letter_mask(word.letter(i)))
        .collect();
    let next = |i: usize| word.next(i);

    // Deterministic acceptance from (position, D-state).
    let det_accepts = |start_pos: usize, start: usize| -> bool {
        let mut order: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut path: Vec<usize> = Vec::new();
        let (mut pos, mut q) = (start_pos, start);
        loop {
            if let Some(&first) = order.get(&(pos, q)) {
                return path[first..].iter().any(|s| a.accepting.contains(s));
            }
            order.insert((pos, q), path.len());
            path.push(q);
            let succ = &a.trans[q][masks[pos]];
            debug_assert_eq!(succ.len(), 1, "D-part must be deterministic");
            q = *succ.iter().next().expect("validated automaton");
            pos = next(pos);
        }
    };

    if a.dpart[a.initial] {
        return det_accepts(0, a.initial);
    }

    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let (mut pos, mut q) = (0usize, a.initial);
    loop {
        if !seen.insert((pos, q)) {
            // The N-run loops without a successful jump; F lies in D.
            return false;
        }
        let succ = &a.trans[q][masks[pos]];
        for &r in succ {
            if a.dpart[r] && det_accepts(next(pos), r) {
                return true;
            }
        }
        q = *succ
            .iter()
            .find(|&&r| !a.dpart[r])
            .expect("validated automaton: unique N-successor");
        pos = next(pos);
    }
}

// ---------------------------------------------------------------------------
// HOA subset
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum HoaError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unsupported acceptance condition {0:?} (need Büchi: '1 Inf(0)')")]
    UnsupportedAcceptance(String),
    #[error("transition-based acceptance is not supported (line {line})")]
    TransitionAcceptance { line: usize },
    #[error("non-total transition relation: state {state} has no successor on letter {letter}")]
    NonTotal { state: usize, letter: String },
    #[error("not limit-deterministic: {0}")]
    NotLimitDeterministic(LdbaViolation),
}

/// Parses the HOA subset (v1, single `Start:`, state-based Büchi acceptance,
/// explicit edge guards over AP indices) and infers the N/D partition as the
/// largest deterministic successor-closed set, then validates it.
pub fn parse_hoa(text: &str) -> Result<Ldba, HoaError> {
    let mut states: Option<usize> = None;
    let mut start: Option<usize> = None;
    let mut ap: Option<Vec<String>> = None;
    let mut acceptance_ok = false;
    let mut saw_version = false;

    let malformed = |line: usize, message: String| HoaError::Malformed { line, message };

    let mut lines = text.lines().enumerate().peekable();
    // Header.
    for (idx, raw) in lines.by_ref() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with("/*") {
            continue;
        }
        if line == "--BODY--" {
            break;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(malformed(line_no, format!("expected 'key: value', got {line:?}")));
        };
        let value = value.trim();
        match key.trim() {
            "HOA" => {
                if value != "v1" {
                    return Err(malformed(line_no, format!("unsupported HOA version {value:?}")));
                }
                saw_version = true;
            }
            "States" => {
                states = Some(value.parse().map_err(|_| {
                    malformed(line_no, format!("bad state count {value:?}"))
                })?);
            }
            "Start" => {
                if start.is_some() || value.contains(['&', ' ']) {
                    return Err(malformed(
                        line_no,
                        "exactly one initial state is required".to_string(),
                    ));
                }
                start = Some(value.parse().map_err(|_| {
                    malformed(line_no, format!("bad start state {value:?}"))
                })?);
            }
            "AP" => {
                ap = Some(parse_ap_line(value).map_err(|m| malformed(line_no, m))?);
            }
            "Acceptance" => {
                let squashed: String = value.split_whitespace().collect::<Vec<_>>().join(" ");
                if squashed != "1 Inf(0)" {
                    return Err(HoaError::UnsupportedAcceptance(value.to_string()));
                }
                acceptance_ok = true;
            }
            "acc-name" => {
                if value == "Buchi" {
                    acceptance_ok = true;
                } else {
                    return Err(HoaError::UnsupportedAcceptance(value.to_string()));
                }
            }
            // Informational headers are ignored.
            "name" | "tool" | "properties" | "owner" => {}
            other => {
                return Err(malformed(line_no, format!("unknown header {other:?}")));
            }
        }
    }

    if !saw_version {
        return Err(malformed(1, "missing 'HOA: v1' header".to_string()));
    }
    let states = states.ok_or_else(|| malformed(1, "missing 'States:' header".to_string()))?;
    let initial = start.ok_or_else(|| malformed(1, "missing 'Start:' header".to_string()))?;
    let ap = ap.ok_or_else(|| malformed(1, "missing 'AP:' header".to_string()))?;
    if !acceptance_ok {
        return Err(malformed(1, "missing acceptance header".to_string()));
    }
    if initial >= states {
        return Err(malformed(1, format!("start state {initial} out of range")));
    }

    let letters = 1usize << ap.len();
    let mut trans: Vec<Vec<BTreeSet<usize>>> = vec![vec![BTreeSet::new(); letters]; states];
    let mut accepting = BTreeSet::new();
    let mut current: Option<usize> = None;
    let mut ended = false;

    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "--END--" {
            ended = true;
            break;
        }
        if let Some(rest) = line.strip_prefix("State:") {
            let (state, is_accepting) =
                parse_state_line(rest.trim()).map_err(|m| malformed(line_no, m))?;
            if state >= states {
                return Err(malformed(line_no, format!("state {state} out of range")));
            }
            if is_accepting {
                accepting.insert(state);
            }
            current = Some(state);
        } else if line.starts_with('[') {
            let state = current
                .ok_or_else(|| malformed(line_no, "edge before any 'State:'".to_string()))?;
            let (guard_text, rest) = line[1..]
                .split_once(']')
                .ok_or_else(|| malformed(line_no, "unterminated guard".to_string()))?;
            let rest = rest.trim();
            if rest.contains('{') {
                return Err(HoaError::TransitionAcceptance { line: line_no });
            }
            let dest: usize = rest
                .parse()
                .map_err(|_| malformed(line_no, format!("bad destination {rest:?}")))?;
            if dest >= states {
                return Err(malformed(line_no, format!("destination {dest} out of range")));
            }
            let guard = parse_guard(guard_text, ap.len()).map_err(|m| malformed(line_no, m))?;
            for letter in 0..letters {
                if guard.eval(letter) {
                    trans[state][letter].insert(dest);
                }
            }
        } else {
            return Err(malformed(line_no, format!("unexpected body line {line:?}")));
        }
    }
    if !ended {
        return Err(malformed(0, "missing '--END--'".to_string()));
    }

    let mut a = Ldba {
        ap,
        states,
        initial,
        accepting,
        dpart: vec![false; states],
        trans,
    };
    for q in 0..a.states {
        for letter in 0..a.letter_count() {
            if a.trans[q][letter].is_empty() {
                return Err(HoaError::NonTotal {
                    state: q,
                    letter: a.letter_names(letter),
                });
            }
        }
    }
    infer_partition(&mut a);
    if let Some(v) = validate_ldba(&a).into_iter().next() {
        return Err(HoaError::NotLimitDeterministic(v));
    }
    Ok(a)
}

fn parse_ap_line(value: &str) -> Result<Vec<String>, String> {
    let mut parts = value.split_whitespace();
    let count: usize = parts
        .next()
        .ok_or("empty AP header")?
        .parse()
        .map_err(|_| "bad AP count".to_string())?;
    let rest: String = parts.collect::<Vec<_>>().join(" ");
    let mut names = Vec::new();
    let mut chars = rest.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            ' ' => {}
            '"' => {
                let mut name = String::new();
                for c in chars.by_ref() {
                    if c == '"' {
                        break;
                    }
                    name.push(c);
                }
                names.push(name);
            }
            other => return Err(format!("unexpected {other:?} in AP header")),
        }
    }
    if names.len() != count {
        return Err(format!("AP header declares {count} names, found {}", names.len()));
    }
    Ok(names)
}

fn parse_state_line(rest: &str) -> Result<(usize, bool), String> {
    // "<id> ["name"] [{sets}]"
    let mut accepting = false;
    let mut text = rest.to_string();
    if let Some(open) = text.find('{') {
        let close = text.find('}').ok_or("unterminated acceptance marks")?;
        let sets = text[open + 1..close].trim().to_string();
        if sets != "0" {
            return Err(format!("unsupported acceptance sets {{{sets}}} (only {{0}})"));
        }
        accepting = true;
        text.replace_range(open..=close, "");
    }
    if let Some(quote) = text.find('"') {
        let end = text[quote + 1..]
            .find('"')
            .map(|i| quote + 1 + i)
            .ok_or("unterminated state name")?;
        text.replace_range(quote..=end, "");
    }
    let id: usize = text
        .trim()
        .parse()
        .map_err(|_| format!("bad state id {:?}", text.trim()))?;
    Ok((id, accepting))
}

/// Boolean guard over AP indices: `t`, `f`, `!`, `&`, `|`, parentheses.
enum Guard {
    True,
    False,
    Ap(usize),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    fn eval(&self, letter: usize) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Ap(i) => letter & (1 << i) != 0,
            Guard::Not(g) => !g.eval(letter),
            Guard::And(a, b) => a.eval(letter) && b.eval(letter),
            Guard::Or(a, b) => a.eval(letter) || b.eval(letter),
        }
    }
}

fn parse_guard(text: &str, ap_count: usize) -> Result<Guard, String> {
    let tokens: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0usize;
    let guard = parse_guard_or(&tokens, &mut pos, ap_count)?;
    if pos != tokens.len() {
        return Err(format!("trailing input in guard {text:?}"));
    }
    Ok(guard)
}

fn parse_guard_or(tokens: &[char], pos: &mut usize, ap_count: usize) -> Result<Guard, String> {
    let mut left = parse_guard_and(tokens, pos, ap_count)?;
    while tokens.get(*pos) == Some(&'|') {
        *pos += 1;
        let right = parse_guard_and(tokens, pos, ap_count)?;
        left = Guard::Or(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_guard_and(tokens: &[char], pos: &mut usize, ap_count: usize) -> Result<Guard, String> {
    let mut left = parse_guard_atom(tokens, pos, ap_count)?;
    while tokens.get(*pos) == Some(&'&') {
        *pos += 1;
        let right = parse_guard_atom(tokens, pos, ap_count)?;
        left = Guard::And(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_guard_atom(tokens: &[char], pos: &mut usize, ap_count: usize) -> Result<Guard, String> {
    match tokens.get(*pos) {
        Some('!') => {
            *pos += 1;
            Ok(Guard::Not(Box::new(parse_guard_atom(tokens, pos, ap_count)?)))
        }
        Some('t') => {
            *pos += 1;
            Ok(Guard::True)
        }
        Some('f') => {
            *pos += 1;
            Ok(Guard::False)
        }
        Some('(') => {
            *pos += 1;
            let inner = parse_guard_or(tokens, pos, ap_count)?;
            if tokens.get(*pos) != Some(&')') {
                return Err("unclosed parenthesis in guard".to_string());
            }
            *pos += 1;
            Ok(inner)
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while tokens.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let index: usize = tokens[start..*pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| "bad AP index".to_string())?;
            if index >= ap_count {
                return Err(format!("AP index {index} out of range"));
            }
            Ok(Guard::Ap(index))
        }
        other => Err(format!("unexpected {other:?} in guard")),
    }
}

/// Emits the canonical HOA form: one edge line per (letter, destination),
/// guards as full conjunctions over all AP indices.
pub fn serialize_hoa(a: &Ldba) -> String {
    let mut out = String::new();
    out.push_str("HOA: v1\n");
    out.push_str(&format!("States: {}\n", a.states));
    out.push_str(&format!("Start: {}\n", a.initial));
    let names: Vec<String> = a.ap.iter().map(|p| format!("\"{p}\"")).collect();
    out.push_str(&format!("AP: {} {}\n", a.ap.len(), names.join(" ")).replace(" \n", "\n"));
    out.push_str("acc-name: Buchi\n");
    out.push_str("Acceptance: 1 Inf(0)\n");
    out.push_str("--BODY--\n");
    for q in 0..a.states {
        if a.accepting.contains(&q) {
            out.push_str(&format!("State: {q} {{0}}\n"));
        } else {
            out.push_str(&format!("State: {q}\n"));
        }
        for letter in 0..a.letter_count() {
            let guard = if a.ap.is_empty() {
                "t".to_string()
            } else {
                (0..a.ap.len())
                    .map(|i| {
                        if letter & (1 << i) != 0 {
                            format!("{i}")
                        } else {
                            format!("!{i}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" & ")
            };
            for &dest in &a.trans[q][letter] {
                out.push_str(&format!("[{guard}] {dest}\n"));
            }
        }
    }
    out.push_str("--END--\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{eval_lasso, parse_ltl};

    fn letters(spec: &[&[&str]]) -> Vec<BTreeSet<String>> {
        spec.iter()
            .map(|l| l.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    fn lasso(prefix: &[&[&str]], cycle: &[&[&str]]) -> LassoWord {
        LassoWord::new(letters(prefix), letters(cycle))
    }

    #[test]
    fn builtins_are_valid_ldbas() {
        let families = [
            BuiltinFamily::GfAtom("p".into()),
            BuiltinFamily::FgAtom("p".into()),
            BuiltinFamily::FAtom("p".into()),
            BuiltinFamily::GAtom("p".into()),
            BuiltinFamily::Until("p".into(), "q".into()),
            BuiltinFamily::GfImpliesGf("a".into(), "b".into()),
        ];
        for family in families {
            let a = builtin_ldba(&family);
            assert!(validate_ldba(&a).is_empty(), "{family:?}");
        }
    }

    #[test]
    fn gf_partition_is_fully_deterministic() {
        let a = builtin_ldba(&BuiltinFamily::GfAtom("p".into()));
        assert!(a.dpart.iter().all(|&d| d));
        assert_eq!(a.states, 2);
    }

    #[test]
    fn fg_has_single_n_state() {
        let a = builtin_ldba(&BuiltinFamily::FgAtom("p".into()));
        let n_count = a.dpart.iter().filter(|&&d| !d).count();
        assert_eq!(n_count, 1);
        assert!(a.accepting.iter().all(|&q| a.dpart[q]));
    }

    #[test]
    fn acceptance_matches_key_lassos() {
        let gf = builtin_ldba(&BuiltinFamily::GfAtom("p".into()));
        assert!(accepts_lasso(&gf, &lasso(&[], &[&["p"], &[]])));
        let fg = builtin_ldba(&BuiltinFamily::FgAtom("p".into()));
        assert!(!accepts_lasso(&fg, &lasso(&[], &[&["p"], &[]])));
        assert!(accepts_lasso(&fg, &lasso(&[&[]], &[&["p"]])));
        let until = builtin_ldba(&BuiltinFamily::Until("p".into(), "q".into()));
        assert!(accepts_lasso(&until, &lasso(&[&["p"], &["q"]], &[&[]])));
        assert!(!accepts_lasso(&until, &lasso(&[&["p"]], &[&[]])));
    }

    #[test]
    fn builtin_acceptance_agrees_with_formula_oracle() {
        use rand::prelude::*;
        let families = [
            BuiltinFamily::GfAtom("a".into()),
            BuiltinFamily::FgAtom("a".into()),
            BuiltinFamily::FAtom("a".into()),
            BuiltinFamily::GAtom("a".into()),
            BuiltinFamily::Until("a".into(), "b".into()),
            BuiltinFamily::GfImpliesGf("a".into(), "b".into()),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for family in &families {
            let automaton = builtin_ldba(family);
            let formula = family.formula();
            for _ in 0..300 {
                let word = random_lasso(&mut rng, &["a", "b"]);
                assert_eq!(
                    accepts_lasso(&automaton, &word),
                    eval_lasso(&formula, &word),
                    "{family:?} on {word:?}"
                );
            }
        }
    }

    pub(crate) fn random_lasso(rng: &mut impl rand::Rng, ap: &[&str]) -> LassoWord {
        let letter = |rng: &mut dyn rand::RngCore| -> BTreeSet<String> {
            ap.iter()
                .filter(|_| rng.next_u32() % 2 == 0)
                .map(|s| s.to_string())
                .collect()
        };
        let plen = rng.gen_range(0..=4);
        let clen = rng.gen_range(1..=4);
        LassoWord::new(
            (0..plen).map(|_| letter(rng)).collect(),
            (0..clen).map(|_| letter(rng)).collect(),
        )
    }

    #[test]
    fn n_runs_with_long_period_are_explored() {
        // N-part cycles 0 -> 1 -> 2 -> 0 on every letter; only state 2 offers
        // a jump to the accepting D-loop. The word cycle has length 1, so the
        // jump position lies beyond |prefix| + |cycle|.
        let ap = vec!["p".to_string()];
        let mk = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
        let a = Ldba {
            ap,
            states: 4,
            initial: 0,
            accepting: [3].into(),
            dpart: vec![false, false, false, true],
            trans: vec![
                vec![mk(&[1]), mk(&[1])],
                vec![mk(&[2]), mk(&[2])],
                vec![mk(&[0, 3]), mk(&[0, 3])],
                vec![mk(&[3]), mk(&[3])],
            ],
        };
        assert!(validate_ldba(&a).is_empty());
        assert!(accepts_lasso(&a, &lasso(&[], &[&["p"]])));
    }

    #[test]
    fn validate_flags_each_condition() {
        let mut a = builtin_ldba(&BuiltinFamily::GfAtom("p".into()));
        // Duplicate successor for a D-state.
        a.trans[0][0].insert(1);
        let violations = validate_ldba(&a);
        assert!(violations
            .iter()
            .any(|v| matches!(v, LdbaViolation::Deterministic { state: 0, .. })));

        let mut b = builtin_ldba(&BuiltinFamily::FgAtom("p".into()));
        // Claim the hub is accepting.
        b.accepting.insert(0);
        assert!(validate_ldba(&b)
            .iter()
            .any(|v| matches!(v, LdbaViolation::AcceptingInN { state: 0 })));

        let mut c = builtin_ldba(&BuiltinFamily::FgAtom("p".into()));
        // Remove the hub's N-successor on letter {}.
        c.trans[0][0].clear();
        c.trans[0][0].insert(1);
        assert!(validate_ldba(&c)
            .iter()
            .any(|v| matches!(v, LdbaViolation::NondetBranch { state: 0, .. })));
    }

    #[test]
    fn hoa_roundtrip_builtins() {
        for family in [
            BuiltinFamily::GfAtom("p".into()),
            BuiltinFamily::FgAtom("p".into()),
            BuiltinFamily::Until("p".into(), "q".into()),
            BuiltinFamily::GfImpliesGf("a".into(), "b".into()),
        ] {
            let a = builtin_ldba(&family);
            let text = serialize_hoa(&a);
            let back = parse_hoa(&text).unwrap();
            assert_eq!(a, back, "round trip failed for {family:?}\n{text}");
        }
        let unit = Ldba::unit();
        assert_eq!(parse_hoa(&serialize_hoa(&unit)).unwrap(), unit);
    }

    #[test]
    fn parses_handwritten_fg() {
        let text = r#"HOA: v1
States: 3
Start: 0
AP: 1 "p"
acc-name: Buchi
Acceptance: 1 Inf(0)
--BODY--
State: 0
[t] 0
[0] 1
State: 1 {0}
[0] 1
[!0] 2
State: 2
[t] 2
--END--
"#;
        let a = parse_hoa(text).unwrap();
        assert_eq!(a.dpart, vec![false, true, true]);
        assert_eq!(a.accepting, [1].into());
        assert_eq!(a, builtin_ldba(&BuiltinFamily::FgAtom("p".into())));
    }

    #[test]
    fn rejects_accepting_state_in_n_part() {
        // State 0 branches inside {0, 1} on letter p, so it is inferred
        // nondeterministic, yet it is marked accepting.
        let text = r#"HOA: v1
States: 2
Start: 0
AP: 1 "p"
Acceptance: 1 Inf(0)
--BODY--
State: 0 {0}
[t] 0
[0] 1
State: 1
[t] 1
--END--
"#;
        let err = parse_hoa(text).unwrap_err();
        assert!(
            matches!(
                err,
                HoaError::NotLimitDeterministic(LdbaViolation::AcceptingInN { state: 0 })
            ),
            "got {err}"
        );
    }

    #[test]
    fn rejects_non_total_and_bad_acceptance() {
        let missing = r#"HOA: v1
States: 1
Start: 0
AP: 1 "p"
Acceptance: 1 Inf(0)
--BODY--
State: 0
[0] 0
--END--
"#;
        assert!(matches!(
            parse_hoa(missing).unwrap_err(),
            HoaError::NonTotal { state: 0, .. }
        ));

        let rabin = r#"HOA: v1
States: 1
Start: 0
AP: 1 "p"
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0
[t] 0
--END--
"#;
        assert!(matches!(
            parse_hoa(rabin).unwrap_err(),
            HoaError::UnsupportedAcceptance(_)
        ));
    }

    #[test]
    fn matches_builtin_families() {
        let cases = [
            ("G F p_t", Some(BuiltinFamily::GfAtom("p_t".into()))),
            ("F G ok", Some(BuiltinFamily::FgAtom("ok".into()))),
            ("F done", Some(BuiltinFamily::FAtom("done".into()))),
            ("G safe", Some(BuiltinFamily::GAtom("safe".into()))),
            ("req U ack", Some(BuiltinFamily::Until("req".into(), "ack".into()))),
            (
                "(G F a) -> (G F b)",
                Some(BuiltinFamily::GfImpliesGf("a".into(), "b".into())),
            ),
            ("G (p & q)", None),
            ("X p", None),
        ];
        for (text, expected) in cases {
            assert_eq!(match_builtin(&parse_ltl(text).unwrap()), expected, "{text}");
        }
    }
}
