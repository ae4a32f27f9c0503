//! Random machines for differential testing.

use rand::Rng;

use super::machine::{Dir, Rule, TuringMachine};

/// A machine with 1..=`max_states` states and 2..=`max_symbols` tape
/// symbols, each transition present with probability 3/4, and an input of
/// length 1..=`max_input` over the non-blank symbols.
pub fn random_tm(
    rng: &mut impl Rng,
    max_states: usize,
    max_symbols: usize,
    max_input: usize,
) -> (TuringMachine, Vec<i64>) {
    let n_states = rng.gen_range(1..=max_states.max(1)) as i64;
    let n_symbols = rng.gen_range(2..=max_symbols.max(2)) as i64;
    let mut delta = Vec::new();
    for q in 0..n_states {
        for s in 0..n_symbols {
            if rng.gen_bool(0.75) {
                let dir = if rng.gen_bool(0.5) { Dir::L } else { Dir::R };
                delta.push(Rule(q, s, rng.gen_range(0..n_states), rng.gen_range(0..n_symbols), dir));
            }
        }
    }
    let accepting = (0..n_states).filter(|_| rng.gen_bool(0.5)).collect();
    let len = rng.gen_range(1..=max_input.max(1));
    let input = (0..len).map(|_| rng.gen_range(1..n_symbols)).collect();
    let tm = TuringMachine {
        states: (0..n_states).collect(),
        accepting,
        symbols: (0..n_symbols).collect(),
        input_alphabet: None,
        delta,
        input: Vec::new(),
    };
    (tm, input)
}
