use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    L,
    R,
}

/// One entry `δ(q, s) = (q′, s′, D)`, serialized as `[q, s, q′, s′, "L"|"R"]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule(pub i64, pub i64, pub i64, pub i64, pub Dir);

/// A deterministic Turing machine with start state 0 and blank 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuringMachine {
    pub states: Vec<i64>,
    pub accepting: Vec<i64>,
    /// Tape alphabet. When omitted it is 0 plus every symbol in `delta`
    /// and `input`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symbols: Vec<i64>,
    /// Input alphabet; defaults to the tape alphabet without the blank.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_alphabet: Option<Vec<i64>>,
    pub delta: Vec<Rule>,
    /// Default input for tools that take the machine file alone.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub input: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TmError {
    #[error("start state 0 is not among the states")]
    MissingStartState,
    #[error("accepting state {0} is not a state")]
    UnknownAcceptingState(i64),
    #[error("transition for ({0}, {1}) is defined more than once")]
    Nondeterministic(i64, i64),
    #[error("transition {0:?} uses a state outside the state set")]
    UnknownState(Rule),
    #[error("transition {0:?} uses a symbol outside the tape alphabet")]
    UnknownSymbol(Rule),
    #[error("the input alphabet may not contain the blank 0 or symbols outside the tape alphabet")]
    BadInputAlphabet,
    #[error("the input string is empty")]
    EmptyInput,
    #[error("input symbol {0} is not in the input alphabet")]
    BadInputSymbol(i64),
    #[error("invalid machine description: {0}")]
    Json(String),
}

impl TuringMachine {
    pub fn from_json(text: &str) -> Result<Self, TmError> {
        let tm: Self = serde_json::from_str(text).map_err(|e| TmError::Json(e.to_string()))?;
        tm.validate()?;
        Ok(tm)
    }

    pub fn tape_alphabet(&self) -> BTreeSet<i64> {
        if !self.symbols.is_empty() {
            return self.symbols.iter().copied().collect();
        }
        let mut g: BTreeSet<i64> = [0].into();
        for r in &self.delta {
            g.insert(r.1);
            g.insert(r.3);
        }
        g.extend(&self.input);
        g
    }

    pub fn input_alphabet_set(&self) -> BTreeSet<i64> {
        match &self.input_alphabet {
            Some(s) => s.iter().copied().collect(),
            None => self.tape_alphabet().into_iter().filter(|&s| s != 0).collect(),
        }
    }

    pub fn is_accepting(&self, q: i64) -> bool {
        self.accepting.contains(&q)
    }

    pub fn lookup(&self, q: i64, s: i64) -> Option<(i64, i64, Dir)> {
        self.delta.iter().find(|r| r.0 == q && r.1 == s).map(|r| (r.2, r.3, r.4))
    }

    pub fn validate(&self) -> Result<(), TmError> {
        let states: BTreeSet<i64> = self.states.iter().copied().collect();
        if !states.contains(&0) {
            return Err(TmError::MissingStartState);
        }
        if let Some(&q) = self.accepting.iter().find(|q| !states.contains(q)) {
            return Err(TmError::UnknownAcceptingState(q));
        }
        let gamma = self.tape_alphabet();
        let mut seen = BTreeSet::new();
        for r in &self.delta {
            if !seen.insert((r.0, r.1)) {
                return Err(TmError::Nondeterministic(r.0, r.1));
            }
            if !states.contains(&r.0) || !states.contains(&r.2) {
                return Err(TmError::UnknownState(*r));
            }
            if !gamma.contains(&r.1) || !gamma.contains(&r.3) {
                return Err(TmError::UnknownSymbol(*r));
            }
        }
        let sigma = self.input_alphabet_set();
        if sigma.contains(&0) || !sigma.is_subset(&gamma) {
            return Err(TmError::BadInputAlphabet);
        }
        Ok(())
    }

    pub fn check_input(&self, input: &[i64]) -> Result<(), TmError> {
        if input.is_empty() {
            return Err(TmError::EmptyInput);
        }
        let sigma = self.input_alphabet_set();
        match input.iter().find(|s| !sigma.contains(s)) {
            Some(&s) => Err(TmError::BadInputSymbol(s)),
            None => Ok(()),
        }
    }
}

/// A state and a tape whose cell 0 is under the head. Only non-blank cells
/// are stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TMConfiguration {
    pub state: i64,
    pub tape: BTreeMap<i64, i64>,
}

impl TMConfiguration {
    /// State 0 with `input` written from the head rightwards.
    pub fn initial(input: &[i64]) -> Self {
        let mut tape = BTreeMap::new();
        for (i, &s) in input.iter().enumerate() {
            if s != 0 {
                tape.insert(i as i64, s);
            }
        }
        Self { state: 0, tape }
    }

    pub fn symbol(&self, i: i64) -> i64 {
        self.tape.get(&i).copied().unwrap_or(0)
    }

    /// Sets cell `i`, keeping the blank-free representation.
    pub fn set(&mut self, i: i64, s: i64) {
        if s == 0 {
            self.tape.remove(&i);
        } else {
            self.tape.insert(i, s);
        }
    }
}

impl fmt::Display for TMConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state {} tape", self.state)?;
        if self.tape.is_empty() {
            return f.write_str(" blank");
        }
        let lo = (*self.tape.keys().next().expect("nonempty")).min(0);
        let hi = (*self.tape.keys().next_back().expect("nonempty")).max(0);
        for i in lo..=hi {
            if i == 0 {
                write!(f, " [{}]", self.symbol(i))?;
            } else {
                write!(f, " {}", self.symbol(i))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Next(TMConfiguration),
    Halt { accepting: bool },
}

/// One machine transition. Moving right shifts the tape left by one cell,
/// leaving the written symbol at -1; moving left leaves it at 1.
pub fn tm_step(config: &TMConfiguration, tm: &TuringMachine) -> StepResult {
    let Some((q2, s2, dir)) = tm.lookup(config.state, config.symbol(0)) else {
        return StepResult::Halt { accepting: tm.is_accepting(config.state) };
    };
    let shift = match dir {
        Dir::L => 1,
        Dir::R => -1,
    };
    let mut next = TMConfiguration { state: q2, tape: BTreeMap::new() };
    for (&i, &s) in &config.tape {
        if i != 0 {
            next.set(i + shift, s);
        }
    }
    next.set(shift, s2);
    StepResult::Next(next)
}
