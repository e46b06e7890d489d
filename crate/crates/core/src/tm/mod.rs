//! Digital Tsetlin machine ground truth.
//!
//! Everything in this module is exact Boolean/integer arithmetic: thermometer
//! booleanization, clause conjunctions over include/exclude action vectors,
//! polarity-weighted class sums, and argmax inference. The crossbar simulator
//! is checked against these routines, so they must stay independent of the
//! analog path.

mod train;

pub use train::{train_reference, TrainParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A booleanized input: feature bits followed by their complements.
///
/// The literal vector always has even length `K`, and `literals[i + K/2]`
/// is the negation of `literals[i]` for `i < K/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolSample {
    literals: Vec<bool>,
}

impl BoolSample {
    /// Builds a sample from the feature-bit half; complements are appended.
    pub fn from_feature_bits(bits: &[bool]) -> Self {
        let mut literals = Vec::with_capacity(bits.len() * 2);
        literals.extend_from_slice(bits);
        literals.extend(bits.iter().map(|b| !b));
        BoolSample { literals }
    }

    /// Wraps a full literal vector, checking the complement structure.
    pub fn from_literals(literals: Vec<bool>) -> Result<Self> {
        let k = literals.len();
        if !k.is_multiple_of(2) {
            return Err(Error::config(format!(
                "literal count must be even, got {k}"
            )));
        }
        for i in 0..k / 2 {
            if literals[i + k / 2] == literals[i] {
                return Err(Error::config(format!(
                    "literal {} is not the complement of literal {i}",
                    i + k / 2
                )));
            }
        }
        Ok(BoolSample { literals })
    }

    pub fn literals(&self) -> &[bool] {
        &self.literals
    }

    /// Total literal count `K` (feature bits plus complements).
    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

/// Per-feature ascending threshold lists for thermometer encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    per_feature: Vec<Vec<f64>>,
}

impl Thresholds {
    pub fn new(per_feature: Vec<Vec<f64>>) -> Result<Self> {
        for (f, list) in per_feature.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::config(format!("feature {f} has no thresholds")));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config(format!(
                    "thresholds for feature {f} are not strictly increasing"
                )));
            }
        }
        Ok(Thresholds { per_feature })
    }

    /// One 0.5 threshold per feature: passes already-binary data through.
    pub fn binary_passthrough(num_features: usize) -> Self {
        Thresholds {
            per_feature: vec![vec![0.5]; num_features],
        }
    }

    /// Derives `levels` thresholds per feature from the empirical quantiles
    /// of `columns` (one inner vector per feature). Duplicate quantiles are
    /// nudged apart so the lists stay strictly increasing.
    pub fn from_quantiles(columns: &[Vec<f64>], levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::config("quantile levels must be >= 1"));
        }
        let mut per_feature = Vec::with_capacity(columns.len());
        for (f, col) in columns.iter().enumerate() {
            if col.is_empty() {
                return Err(Error::config(format!("feature {f} has no data")));
            }
            let mut sorted = col.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN in feature data"));
            let n = sorted.len();
            let mut list = Vec::with_capacity(levels);
            for q in 1..=levels {
                let pos = (q as f64 / (levels + 1) as f64) * (n - 1) as f64;
                let lo = pos.floor() as usize;
                let hi = pos.ceil() as usize;
                let frac = pos - lo as f64;
                let v = sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
                list.push(v);
            }
            // Constant features collapse all quantiles onto one value.
            for i in 1..list.len() {
                if list[i] <= list[i - 1] {
                    list[i] = list[i - 1] + f64::EPSILON.max(list[i - 1].abs() * 1e-12);
                }
            }
            list.dedup();
            per_feature.push(list);
        }
        Thresholds::new(per_feature)
    }

    pub fn num_features(&self) -> usize {
        self.per_feature.len()
    }

    /// Total feature bits emitted, i.e. half the literal count.
    pub fn num_bits(&self) -> usize {
        self.per_feature.iter().map(Vec::len).sum()
    }

    pub fn per_feature(&self) -> &[Vec<f64>] {
        &self.per_feature
    }
}

/// Thermometer-booleanizes a raw sample: one bit per threshold,
/// `bit = raw >= threshold`, complements appended.
pub fn booleanize(raw: &[f64], thresholds: &Thresholds) -> Result<BoolSample> {
    if raw.len() != thresholds.num_features() {
        return Err(Error::config(format!(
            "sample has {} features but thresholds cover {}",
            raw.len(),
            thresholds.num_features()
        )));
    }
    let mut bits = Vec::with_capacity(thresholds.num_bits());
    for (value, list) in raw.iter().zip(thresholds.per_feature.iter()) {
        bits.extend(list.iter().map(|t| value >= t));
    }
    Ok(BoolSample::from_feature_bits(&bits))
}

/// Trained include/exclude decisions for one clause, indexed by literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionVector {
    bits: Vec<bool>,
}

impl ActionVector {
    pub fn new(bits: Vec<bool>) -> Self {
        ActionVector { bits }
    }

    pub fn all_exclude(literal_count: usize) -> Self {
        ActionVector {
            bits: vec![false; literal_count],
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn include_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

/// Clause polarity: positive clauses vote for their class, negative against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(self) -> i32 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Polarity::Positive),
            -1 => Ok(Polarity::Negative),
            other => Err(Error::config(format!("polarity must be +1 or -1, got {other}"))),
        }
    }
}

/// One trained clause: an action vector plus its voting polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub actions: ActionVector,
    pub polarity: Polarity,
}

/// A trained Tsetlin machine: `num_classes x clauses_per_class` clauses over
/// `literal_count` literals, with equal positive/negative polarity counts per
/// class.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    num_classes: usize,
    clauses_per_class: usize,
    literal_count: usize,
    clauses: Vec<Clause>,
    thresholds: Option<Thresholds>,
}

impl Model {
    pub fn new(
        num_classes: usize,
        clauses_per_class: usize,
        literal_count: usize,
        clauses: Vec<Clause>,
    ) -> Result<Self> {
        if num_classes == 0 {
            return Err(Error::config("model needs at least one class"));
        }
        if clauses_per_class == 0 || !clauses_per_class.is_multiple_of(2) {
            return Err(Error::config(format!(
                "clauses per class must be even and positive, got {clauses_per_class}"
            )));
        }
        if literal_count == 0 || !literal_count.is_multiple_of(2) {
            return Err(Error::config(format!(
                "literal count must be even and positive, got {literal_count}"
            )));
        }
        if clauses.len() != num_classes * clauses_per_class {
            return Err(Error::config(format!(
                "expected {} clauses, got {}",
                num_classes * clauses_per_class,
                clauses.len()
            )));
        }
        for (i, clause) in clauses.iter().enumerate() {
            if clause.actions.len() != literal_count {
                return Err(Error::config(format!(
                    "clause {i} has {} actions, expected {literal_count}",
                    clause.actions.len()
                )));
            }
        }
        for class in 0..num_classes {
            let positive = clauses[class * clauses_per_class..(class + 1) * clauses_per_class]
                .iter()
                .filter(|c| c.polarity == Polarity::Positive)
                .count();
            if positive != clauses_per_class / 2 {
                return Err(Error::config(format!(
                    "class {class} has {positive} positive clauses, expected {}",
                    clauses_per_class / 2
                )));
            }
        }
        Ok(Model {
            num_classes,
            clauses_per_class,
            literal_count,
            clauses,
            thresholds: None,
        })
    }

    /// Attaches the booleanizer used at training time so raw datasets can be
    /// encoded consistently at inference time.
    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Self {
        self.thresholds = Some(thresholds);
        self
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn clauses_per_class(&self) -> usize {
        self.clauses_per_class
    }

    pub fn literal_count(&self) -> usize {
        self.literal_count
    }

    pub fn thresholds(&self) -> Option<&Thresholds> {
        self.thresholds.as_ref()
    }

    /// Total TA cell count `m * J * K`.
    pub fn ta_cell_count(&self) -> usize {
        self.num_classes * self.clauses_per_class * self.literal_count
    }

    pub fn clause(&self, class: usize, index: usize) -> &Clause {
        &self.clauses[class * self.clauses_per_class + index]
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Iterates `(class, clause_index, clause)` in canonical order.
    pub fn iter_clauses(&self) -> impl Iterator<Item = (usize, usize, &Clause)> {
        self.clauses.iter().enumerate().map(move |(i, c)| {
            (i / self.clauses_per_class, i % self.clauses_per_class, c)
        })
    }
}

/// Evaluation semantics for clauses with no include actions.
///
/// The conjunction formula makes an all-exclude clause evaluate to 1, which
/// matches the analog column behavior (sub-threshold current). Some software
/// implementations force such clauses to 0 instead; the flag exists for
/// cross-checking against them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub empty_clause_fires: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            empty_clause_fires: true,
        }
    }
}

/// Clause conjunction: 1 iff no included literal is 0.
///
/// Equivalent to `AND_k (literal_k OR NOT include_k)`; an all-exclude clause
/// is the empty conjunction and returns 1.
pub fn clause_eval(sample: &BoolSample, actions: &ActionVector) -> Result<bool> {
    if sample.len() != actions.len() {
        return Err(Error::config(format!(
            "sample has {} literals but clause has {} actions",
            sample.len(),
            actions.len()
        )));
    }
    Ok(clause_eval_unchecked(sample.literals(), actions.bits()))
}

#[inline]
fn clause_eval_unchecked(literals: &[bool], actions: &[bool]) -> bool {
    literals
        .iter()
        .zip(actions)
        .all(|(lit, inc)| *lit || !*inc)
}

/// Per-class signed clause votes. Each sum lies in `[-J/2, +J/2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSums(pub Vec<i32>);

impl ClassSums {
    /// Argmax with ties broken toward the lowest class index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, sum) in self.0.iter().enumerate().skip(1) {
            if *sum > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Polarity-weighted clause sums for every class.
pub fn class_sums(sample: &BoolSample, model: &Model) -> Result<ClassSums> {
    class_sums_with(sample, model, EvalOptions::default())
}

pub fn class_sums_with(sample: &BoolSample, model: &Model, opts: EvalOptions) -> Result<ClassSums> {
    if sample.len() != model.literal_count {
        return Err(Error::config(format!(
            "sample has {} literals but model expects {}",
            sample.len(),
            model.literal_count
        )));
    }
    let mut sums = vec![0i32; model.num_classes];
    for (class, _, clause) in model.iter_clauses() {
        let mut fires = clause_eval_unchecked(sample.literals(), clause.actions.bits());
        if fires && !opts.empty_clause_fires && clause.actions.include_count() == 0 {
            fires = false;
        }
        if fires {
            sums[class] += clause.polarity.sign();
        }
    }
    Ok(ClassSums(sums))
}

/// Predicted class: argmax of the class sums, lowest index on ties.
pub fn infer(sample: &BoolSample, model: &Model) -> Result<usize> {
    Ok(class_sums(sample, model)?.argmax())
}

/// Builds a random model: every action is an include with probability
/// `include_prob`, polarities alternate positive/negative within each class.
/// Useful for characterization sweeps that do not depend on trained logic.
pub fn random_model<R: rand::Rng + ?Sized>(
    num_classes: usize,
    clauses_per_class: usize,
    literal_count: usize,
    include_prob: f64,
    rng: &mut R,
) -> Result<Model> {
    let mut clauses = Vec::with_capacity(num_classes * clauses_per_class);
    for _ in 0..num_classes {
        for j in 0..clauses_per_class {
            let bits = (0..literal_count)
                .map(|_| rng.random::<f64>() < include_prob)
                .collect();
            clauses.push(Clause {
                actions: ActionVector::new(bits),
                polarity: if j % 2 == 0 {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                },
            });
        }
    }
    Model::new(num_classes, clauses_per_class, literal_count, clauses)
}

/// Include statistics: `(count of include actions, count / total TA cells)`.
pub fn include_stats(model: &Model) -> (usize, f64) {
    let count: usize = model
        .clauses
        .iter()
        .map(|c| c.actions.include_count())
        .sum();
    (count, count as f64 / model.ta_cell_count() as f64)
}
