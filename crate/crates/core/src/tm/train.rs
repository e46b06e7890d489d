//! Minimal reference trainer.
//!
//! Vanilla Tsetlin automaton feedback (Type I reinforcement, Type II
//! false-positive blocking) over literal-indexed action states. The only
//! contract is producing valid desk-scale models deterministically; it makes
//! no attempt at competitive accuracy or speed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::BoolDataset;
use crate::error::{Error, Result};
use crate::tm::{ActionVector, Clause, Model, Polarity};

/// Hyperparameters for [`train_reference`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    /// Clauses per class `J`; must be even (half positive, half negative).
    pub clauses_per_class: usize,
    /// Specificity `s` (> 1); larger values grow more specific clauses.
    pub specificity: f64,
    /// Vote clamp threshold `T`.
    pub threshold: i32,
    /// Automaton states per action side.
    pub states_per_action: u32,
    pub epochs: u32,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        // tuned on the desk-scale noisy XOR benchmark: lands near the
        // published ~8.3% include ratio at 12 total clauses
        TrainParams {
            clauses_per_class: 6,
            specificity: 15.0,
            threshold: 8,
            states_per_action: 100,
            epochs: 150,
            seed: 1,
        }
    }
}

/// Automaton state matrix for one class: `J x K` integers in
/// `[1, 2*states_per_action]`, include iff state > states_per_action.
struct ClassAutomata {
    states: Vec<u32>,
    clauses_per_class: usize,
    literal_count: usize,
    boundary: u32,
}

impl ClassAutomata {
    fn new(clauses_per_class: usize, literal_count: usize, states_per_action: u32) -> Self {
        ClassAutomata {
            // initialized at the top of the exclude side
            states: vec![states_per_action; clauses_per_class * literal_count],
            clauses_per_class,
            literal_count,
            boundary: states_per_action,
        }
    }

    #[inline]
    fn idx(&self, clause: usize, literal: usize) -> usize {
        clause * self.literal_count + literal
    }

    #[inline]
    fn include(&self, clause: usize, literal: usize) -> bool {
        self.states[self.idx(clause, literal)] > self.boundary
    }

    #[inline]
    fn reward_include(&mut self, clause: usize, literal: usize) {
        let i = self.idx(clause, literal);
        if self.states[i] < 2 * self.boundary {
            self.states[i] += 1;
        }
    }

    #[inline]
    fn push_exclude(&mut self, clause: usize, literal: usize) {
        let i = self.idx(clause, literal);
        if self.states[i] > 1 {
            self.states[i] -= 1;
        }
    }

    fn clause_fires(&self, clause: usize, literals: &[bool]) -> bool {
        (0..self.literal_count).all(|k| literals[k] || !self.include(clause, k))
    }

    fn class_sum(&self, literals: &[bool], polarity_of: impl Fn(usize) -> Polarity) -> i32 {
        (0..self.clauses_per_class)
            .map(|j| {
                if self.clause_fires(j, literals) {
                    polarity_of(j).sign()
                } else {
                    0
                }
            })
            .sum()
    }
}

/// Clause `j` polarity convention used by the trainer: even index positive,
/// odd index negative.
fn polarity_of(clause: usize) -> Polarity {
    if clause.is_multiple_of(2) {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// Trains a model with standard Type I/II feedback.
///
/// Deterministic for a fixed `(dataset, params)` pair. Zero epochs leaves
/// every automaton at initialization, i.e. an all-exclude model.
pub fn train_reference(data: &BoolDataset, params: &TrainParams) -> Result<Model> {
    if data.is_empty() {
        return Err(Error::config("training dataset is empty"));
    }
    if params.clauses_per_class == 0 || !params.clauses_per_class.is_multiple_of(2) {
        return Err(Error::config(format!(
            "clauses per class must be even and positive, got {}",
            params.clauses_per_class
        )));
    }
    if params.specificity <= 1.0 {
        return Err(Error::config("specificity must be > 1"));
    }
    if params.threshold <= 0 {
        return Err(Error::config("threshold must be positive"));
    }
    if params.states_per_action == 0 {
        return Err(Error::config("states per action must be positive"));
    }

    let literal_count = data.literal_count();
    let num_classes = data.num_classes();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut automata: Vec<ClassAutomata> = (0..num_classes)
        .map(|_| ClassAutomata::new(params.clauses_per_class, literal_count, params.states_per_action))
        .collect();

    for _ in 0..params.epochs {
        for (sample, label) in data.iter() {
            let literals = sample.literals();
            feedback_round(&mut automata[label], literals, true, params, &mut rng);
            if num_classes > 1 {
                // push down one randomly drawn competing class
                let mut other = rng.random_range(0..num_classes - 1);
                if other >= label {
                    other += 1;
                }
                feedback_round(&mut automata[other], literals, false, params, &mut rng);
            }
        }
    }

    let mut clauses = Vec::with_capacity(num_classes * params.clauses_per_class);
    for class_automata in &automata {
        for j in 0..params.clauses_per_class {
            let bits = (0..literal_count)
                .map(|k| class_automata.include(j, k))
                .collect();
            clauses.push(Clause {
                actions: ActionVector::new(bits),
                polarity: polarity_of(j),
            });
        }
    }
    Model::new(num_classes, params.clauses_per_class, literal_count, clauses)
}

fn feedback_round(
    automata: &mut ClassAutomata,
    literals: &[bool],
    target: bool,
    params: &TrainParams,
    rng: &mut ChaCha8Rng,
) {
    let t = params.threshold;
    let sum = automata
        .class_sum(literals, polarity_of)
        .clamp(-t, t);
    let update_p = if target {
        (t - sum) as f64 / (2 * t) as f64
    } else {
        (t + sum) as f64 / (2 * t) as f64
    };

    for j in 0..automata.clauses_per_class {
        if rng.random::<f64>() >= update_p {
            continue;
        }
        let fires = automata.clause_fires(j, literals);
        let positive = polarity_of(j) == Polarity::Positive;
        if positive == target {
            type_i(automata, j, literals, fires, params.specificity, rng);
        } else if fires {
            type_ii(automata, j, literals);
        }
    }
}

/// Type I feedback: reinforce true-positive patterns, erode the rest.
fn type_i(
    automata: &mut ClassAutomata,
    clause: usize,
    literals: &[bool],
    fires: bool,
    s: f64,
    rng: &mut ChaCha8Rng,
) {
    let p_strengthen = (s - 1.0) / s;
    let p_weaken = 1.0 / s;
    for (k, literal) in literals.iter().enumerate() {
        if fires && *literal {
            if rng.random::<f64>() < p_strengthen {
                automata.reward_include(clause, k);
            }
        } else if rng.random::<f64>() < p_weaken {
            automata.push_exclude(clause, k);
        }
    }
}

/// Type II feedback: block false positives by including zero-valued
/// literals currently excluded.
fn type_ii(automata: &mut ClassAutomata, clause: usize, literals: &[bool]) {
    for (k, literal) in literals.iter().enumerate() {
        if !*literal && !automata.include(clause, k) {
            let i = automata.idx(clause, k);
            automata.states[i] += 1;
        }
    }
}
