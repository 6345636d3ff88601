//! LTL syntax, parser, and an exact satisfaction oracle on lasso words.
//!
//! A lasso word `prefix · cycle^ω` is a finite graph of positions: the
//! prefix chains into the cycle, and the final cycle position loops back.
//! Temporal operators are evaluated as fixed points on that graph, so the
//! oracle is exact for all operators with no unrolling depth to pick.

use std::collections::BTreeSet;
use std::fmt;

/// LTL formula. Derived operators are first-class nodes so the paper-style
/// formulas round-trip readably.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    /// All atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.collect_atoms(&mut set);
        set
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Globally(f) => {
                f.collect_atoms(out)
            }
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Until(f, g)
            | Formula::Release(f, g) => {
                f.collect_atoms(out);
                g.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Fully parenthesized binary operators; unary operators bind tightest.
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Not(x) => write!(f, "!{}", Paren(x)),
            Formula::Next(x) => write!(f, "X {}", Paren(x)),
            Formula::Eventually(x) => write!(f, "F {}", Paren(x)),
            Formula::Globally(x) => write!(f, "G {}", Paren(x)),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
            Formula::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::True | Formula::False | Formula::Atom(_) => write!(f, "{}", self.0),
            Formula::Not(_)
            | Formula::Next(_)
            | Formula::Eventually(_)
            | Formula::Globally(_) => write!(f, "{}", self.0),
            other => write!(f, "({other})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {position}: {message}")]
pub struct LtlParseError {
    pub position: usize,
    pub message: String,
}

/// Parses the concrete LTL syntax.
///
/// Operators `! & | -> X U R F G`, words `true false`, identifiers as atoms,
/// parentheses. Precedence: unary > `U`/`R` > `&` > `|` > `->`; `U`, `R` and
/// `->` associate to the right. `X U R F G` are reserved words.
pub fn parse_ltl(text: &str) -> Result<Formula, LtlParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.implies()?;
    if parser.pos < parser.tokens.len() {
        let (position, ref tok) = parser.tokens[parser.pos];
        return Err(LtlParseError {
            position,
            message: format!("unexpected {tok}"),
        });
    }
    Ok(formula)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Release,
    Eventually,
    Globally,
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier {s:?}"),
            Token::True => write!(f, "'true'"),
            Token::False => write!(f, "'false'"),
            Token::Not => write!(f, "'!'"),
            Token::And => write!(f, "'&'"),
            Token::Or => write!(f, "'|'"),
            Token::Implies => write!(f, "'->'"),
            Token::Next => write!(f, "'X'"),
            Token::Until => write!(f, "'U'"),
            Token::Release => write!(f, "'R'"),
            Token::Eventually => write!(f, "'F'"),
            Token::Globally => write!(f, "'G'"),
            Token::LParen => write!(f, "'('"),
            Token::RParen => write!(f, "')'"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, LtlParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            '!' => {
                tokens.push((i, Token::Not));
                i += 1;
            }
            '&' => {
                tokens.push((i, Token::And));
                i += 1;
            }
            '|' => {
                tokens.push((i, Token::Or));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((i, Token::Implies));
                    i += 2;
                } else {
                    return Err(LtlParseError {
                        position: i,
                        message: "unknown operator '-'".to_string(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let token = match word {
                    "true" => Token::True,
                    "false" => Token::False,
                    "X" => Token::Next,
                    "U" => Token::Until,
                    "R" => Token::Release,
                    "F" => Token::Eventually,
                    "G" => Token::Globally,
                    _ => Token::Ident(word.to_string()),
                };
                tokens.push((start, token));
            }
            other => {
                return Err(LtlParseError {
                    position: i,
                    message: format!("unknown operator {other:?}"),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn eof_error(&self) -> LtlParseError {
        LtlParseError {
            position: self.tokens.last().map_or(0, |(p, _)| p + 1),
            message: "unexpected end of input".to_string(),
        }
    }

    fn implies(&mut self) -> Result<Formula, LtlParseError> {
        let left = self.or()?;
        if self.peek() == Some(&Token::Implies) {
            self.pos += 1;
            let right = self.implies()?;
            return Ok(Formula::Implies(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, LtlParseError> {
        let mut left = self.and()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let right = self.and()?;
            left = Formula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, LtlParseError> {
        let mut left = self.until()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let right = self.until()?;
            left = Formula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn until(&mut self) -> Result<Formula, LtlParseError> {
        let left = self.unary()?;
        match self.peek() {
            Some(Token::Until) => {
                self.pos += 1;
                let right = self.until()?;
                Ok(Formula::Until(Box::new(left), Box::new(right)))
            }
            Some(Token::Release) => {
                self.pos += 1;
                let right = self.until()?;
                Ok(Formula::Release(Box::new(left), Box::new(right)))
            }
            _ => Ok(left),
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlParseError> {
        match self.peek() {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(Token::Next) => {
                self.pos += 1;
                Ok(Formula::Next(Box::new(self.unary()?)))
            }
            Some(Token::Eventually) => {
                self.pos += 1;
                Ok(Formula::Eventually(Box::new(self.unary()?)))
            }
            Some(Token::Globally) => {
                self.pos += 1;
                Ok(Formula::Globally(Box::new(self.unary()?)))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, LtlParseError> {
        let Some((position, token)) = self.tokens.get(self.pos).cloned() else {
            return Err(self.eof_error());
        };
        match token {
            Token::True => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Token::False => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Token::Ident(name) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.implies()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(LtlParseError {
                        position,
                        message: "unclosed parenthesis".to_string(),
                    }),
                }
            }
            other => Err(LtlParseError {
                position,
                message: format!("unexpected {other}"),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Lasso words and the satisfaction oracle
// ---------------------------------------------------------------------------

/// Ultimately periodic infinite word `prefix · cycle^ω`; the cycle is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    pub prefix: Vec<BTreeSet<String>>,
    pub cycle: Vec<BTreeSet<String>>,
}

impl LassoWord {
    pub fn new(prefix: Vec<BTreeSet<String>>, cycle: Vec<BTreeSet<String>>) -> LassoWord {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        LassoWord { prefix, cycle }
    }

    /// Letter at graph position `i` (0-based over prefix then cycle).
    pub fn letter(&self, i: usize) -> &BTreeSet<String> {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    /// Number of positions in the lasso graph.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Successor position in the lasso graph.
    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Decides whether `prefix · cycle^ω` satisfies `formula`.
///
/// Atoms not occurring in a letter are false there. Until/Eventually are
/// least fixed points on the position graph, Release/Globally greatest.
pub fn eval_lasso(formula: &Formula, word: &LassoWord) -> bool {
    eval_positions(formula, word)[0]
}

fn eval_positions(formula: &Formula, word: &LassoWord) -> Vec<bool> {
    let n = word.len();
    match formula {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(p) => (0..n).map(|i| word.letter(i).contains(p)).collect(),
        Formula::Not(f) => {
            let v = eval_positions(f, word);
            v.into_iter().map(|b| !b).collect()
        }
        Formula::And(f, g) => zip_with(formula_pair(f, g, word), |a, b| a && b),
        Formula::Or(f, g) => zip_with(formula_pair(f, g, word), |a, b| a || b),
        Formula::Implies(f, g) => zip_with(formula_pair(f, g, word), |a, b| !a || b),
        Formula::Next(f) => {
            let v = eval_positions(f, word);
            (0..n).map(|i| v[word.next(i)]).collect()
        }
        Formula::Until(f, g) => {
            let vf = eval_positions(f, word);
            let vg = eval_positions(g, word);
            fixpoint(word, false, |v, i| vg[i] || (vf[i] && v[word.next(i)]))
        }
        Formula::Release(f, g) => {
            let vf = eval_positions(f, word);
            let vg = eval_positions(g, word);
            fixpoint(word, true, |v, i| vg[i] && (vf[i] || v[word.next(i)]))
        }
        Formula::Eventually(f) => {
            let vf = eval_positions(f, word);
            fixpoint(word, false, |v, i| vf[i] || v[word.next(i)])
        }
        Formula::Globally(f) => {
            let vf = eval_positions(f, word);
            fixpoint(word, true, |v, i| vf[i] && v[word.next(i)])
        }
    }
}

fn formula_pair(f: &Formula, g: &Formula, word: &LassoWord) -> (Vec<bool>, Vec<bool>) {
    (eval_positions(f, word), eval_positions(g, word))
}

fn zip_with((a, b): (Vec<bool>, Vec<bool>), op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Iterates a monotone step function from the all-`start` labeling until
/// stable. The graph has one successor per node, so at most `n` rounds.
fn fixpoint(
    word: &LassoWord,
    start: bool,
    step: impl Fn(&[bool], usize) -> bool,
) -> Vec<bool> {
    let n = word.len();
    let mut v = vec![start; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let new = step(&v, i);
            if new != v[i] {
                v[i] = new;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}
