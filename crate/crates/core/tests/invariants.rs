//! Property tests for the simulator's structural invariants.
//!
//! The digital clause semantics act as the independent oracle for the analog
//! column path throughout: these tests recompute expectations from first
//! principles (set membership, exhaustive enumeration) rather than calling
//! the code paths they check.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use boolcur::crossbar::{
    map_model, margin_analysis, AnalogConfig, CellBank, CrossbarSim, MarginSpec,
};
use boolcur::device::{sample_d2d, step_c2c, CellNominal, StateVariation, VariationParams};
use boolcur::energy::{datapoint_energy, EnergyTable, EventCounts};
use boolcur::tm::{
    booleanize, class_sums, clause_eval, infer, random_model, ActionVector, BoolSample, Clause,
    Model, Thresholds,
};

fn sample_from_pattern(pattern: u64, feature_bits: usize) -> BoolSample {
    let bits: Vec<bool> = (0..feature_bits).map(|b| (pattern >> b) & 1 == 1).collect();
    BoolSample::from_feature_bits(&bits)
}

fn action_from_pattern(pattern: u64, k: usize) -> ActionVector {
    ActionVector::new((0..k).map(|b| (pattern >> b) & 1 == 1).collect())
}

// -- booleanization ---------------------------------------------------------

proptest! {
    #[test]
    fn booleanize_complement_structure(
        raw in prop::collection::vec(-100.0f64..100.0, 1..6),
        levels in 1usize..5,
        seed in 0u64..1_000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let per_feature: Vec<Vec<f64>> = raw
            .iter()
            .map(|_| {
                let mut t: Vec<f64> = (0..levels)
                    .map(|_| rand::Rng::random_range(&mut rng, -100.0f64..100.0))
                    .collect();
                t.sort_by(|a, b| a.partial_cmp(b).unwrap());
                t.dedup();
                t
            })
            .collect();
        let thresholds = Thresholds::new(per_feature).unwrap();
        let sample = booleanize(&raw, &thresholds).unwrap();
        let k = sample.len();
        prop_assert_eq!(k % 2, 0);
        for i in 0..k / 2 {
            prop_assert_eq!(sample.literals()[i + k / 2], !sample.literals()[i]);
        }
    }
}

// -- clause formula, exhaustive for K <= 8 -----------------------------------

#[test]
fn clause_formula_equivalence_brute_force() {
    for feature_bits in 1usize..=4 {
        let k = feature_bits * 2;
        for sample_pattern in 0..(1u64 << feature_bits) {
            let sample = sample_from_pattern(sample_pattern, feature_bits);
            for action_pattern in 0..(1u64 << k) {
                let actions = action_from_pattern(action_pattern, k);
                // oracle: clause is 0 iff some included literal reads 0
                let violated = sample
                    .literals()
                    .iter()
                    .zip(actions.bits())
                    .any(|(lit, inc)| *inc && !*lit);
                assert_eq!(clause_eval(&sample, &actions).unwrap(), !violated);
            }
        }
    }
}

// -- class sums and argmax ----------------------------------------------------

proptest! {
    #[test]
    fn class_sums_bounded_by_half_j(
        classes in 1usize..4,
        half_j in 1usize..5,
        feature_bits in 1usize..6,
        include_prob in 0.0f64..1.0,
        seed in 0u64..10_000,
        pattern in 0u64..64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_model(classes, half_j * 2, feature_bits * 2, include_prob, &mut rng).unwrap();
        let sample = sample_from_pattern(pattern, feature_bits);
        let sums = class_sums(&sample, &model).unwrap();
        let bound = half_j as i32;
        for s in &sums.0 {
            prop_assert!(-bound <= *s && *s <= bound);
        }
    }

    #[test]
    fn argmax_invariant_under_clause_permutation(
        classes in 1usize..4,
        half_j in 1usize..4,
        feature_bits in 1usize..5,
        include_prob in 0.0f64..0.6,
        seed in 0u64..10_000,
        pattern in 0u64..32,
        rotation in 1usize..6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = half_j * 2;
        let k = feature_bits * 2;
        let model = random_model(classes, j, k, include_prob, &mut rng).unwrap();
        let sample = sample_from_pattern(pattern, feature_bits);
        let baseline = infer(&sample, &model).unwrap();

        // rotate each class's clause list; polarities travel with their actions
        let mut permuted = Vec::new();
        for class in 0..classes {
            let mut class_clauses: Vec<Clause> =
                (0..j).map(|i| model.clause(class, i).clone()).collect();
            class_clauses.rotate_left(rotation % j);
            permuted.extend(class_clauses);
        }
        let permuted_model = Model::new(classes, j, k, permuted).unwrap();
        prop_assert_eq!(infer(&sample, &permuted_model).unwrap(), baseline);
    }
}

// -- layout -------------------------------------------------------------------

proptest! {
    #[test]
    fn layout_bijection(
        classes in 1usize..4,
        half_j in 1usize..5,
        feature_bits in 1usize..33,
        width in 1usize..40,
        seed in 0u64..1_000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = feature_bits * 2;
        let model = random_model(classes, half_j * 2, k, 0.1, &mut rng).unwrap();
        let layout = map_model(&model, width).unwrap();
        // flattening the layout recovers each TA cell exactly once
        let mut seen = vec![0u32; model.ta_cell_count()];
        for col in layout.columns() {
            prop_assert!(col.width() >= 1 && col.width() <= width);
            for literal in col.literal_start..col.literal_end {
                seen[layout.cell_index(col.class, col.clause, literal)] += 1;
            }
        }
        prop_assert!(seen.iter().all(|c| *c == 1));
        prop_assert_eq!(layout.partials_per_clause(), k.div_ceil(width));
    }
}

// -- golden equivalence (digital oracle vs analog path) ------------------------

#[test]
fn crossbar_matches_digital_oracle_exhaustively() {
    let nominal = CellNominal::default();
    for (classes, j, feature_bits, width, seed) in [
        (2usize, 2usize, 4usize, 4usize, 1u64),
        (3, 4, 6, 8, 2),
        (2, 6, 8, 32, 3),
        (4, 2, 5, 3, 4),
        (2, 4, 7, 5, 5),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = feature_bits * 2;
        let model = random_model(classes, j, k, 0.2, &mut rng).unwrap();
        let sim = CrossbarSim::new(&model, AnalogConfig::for_width(width, &nominal)).unwrap();
        for pattern in 0..(1u64 << feature_bits) {
            let sample = sample_from_pattern(pattern, feature_bits);
            let digital = infer(&sample, &model).unwrap();
            let trace = sim.infer(&sample, &CellBank::Nominal, &mut rng).unwrap();
            assert_eq!(
                trace.predicted, digital,
                "divergence at pattern {pattern:b} (m={classes} J={j} K={k} W={width})"
            );
            // clause bits must match the digital clause outputs too
            for (class, clause_idx, clause) in model.iter_clauses() {
                let expect = clause_eval(&sample, &clause.actions).unwrap();
                assert_eq!(trace.clause_bits[class * j + clause_idx], expect);
            }
        }
    }
}

// -- partial-clause digital semantics ------------------------------------------

#[test]
fn partial_clause_brute_force_small_widths() {
    // single-clause models whose first column is the whole clause
    let nominal = CellNominal::default();
    for w in 1usize..=6 {
        let k = w * 2;
        for action_pattern in 0..(1u64 << w) {
            // actions on the first w literals only; rest exclude
            let bits: Vec<bool> = (0..k)
                .map(|b| b < w && (action_pattern >> b) & 1 == 1)
                .collect();
            let model = Model::new(
                1,
                2,
                k,
                vec![
                    Clause {
                        actions: ActionVector::new(bits),
                        polarity: boolcur::tm::Polarity::Positive,
                    },
                    Clause {
                        actions: ActionVector::all_exclude(k),
                        polarity: boolcur::tm::Polarity::Negative,
                    },
                ],
            )
            .unwrap();
            let sim = CrossbarSim::new(&model, AnalogConfig::for_width(w, &nominal)).unwrap();
            for literal_pattern in 0..(1u64 << w) {
                let sample = sample_from_pattern(literal_pattern, w);
                let mut counts = EventCounts::default();
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let bit = sim
                    .partial_clause_eval(0, &sample, &CellBank::Nominal, &mut rng, &mut counts)
                    .unwrap();
                let violated = (0..w).any(|b| {
                    let include = (action_pattern >> b) & 1 == 1;
                    let literal = (literal_pattern >> b) & 1 == 1;
                    include && !literal
                });
                assert_eq!(bit, !violated, "w={w} actions={action_pattern:b} literals={literal_pattern:b}");
            }
        }
    }
}

// -- selector ideality ----------------------------------------------------------

#[test]
fn column_reads_touch_only_their_own_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let model = random_model(2, 4, 24, 0.3, &mut rng).unwrap();
    let sim = CrossbarSim::new(&model, AnalogConfig::for_width(8, &CellNominal::default())).unwrap();
    let sample = sample_from_pattern(0b0110_1100_1010, 12);
    for (col_id, col) in sim.layout().columns().iter().enumerate() {
        let mut counts = EventCounts::default();
        sim.column_current(col_id, &sample, &CellBank::Nominal, &mut counts)
            .unwrap();
        assert_eq!(counts.total_reads(), col.width() as f64);
        assert_eq!(counts.csa_evals, 0.0);
    }
}

// -- event accounting -----------------------------------------------------------

#[test]
fn include_read_events_average_half_the_includes() {
    // with complements, exactly half of all literals read '0'; include cells
    // are placed independently of the inputs, so include-at-'0' events per
    // datapoint average includes/2 over uniform inputs
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let model = random_model(2, 6, 48, 0.083, &mut rng).unwrap();
    let includes = boolcur::tm::include_stats(&model).0 as f64;
    let sim = CrossbarSim::new(&model, AnalogConfig::default()).unwrap();

    let n = 500;
    let mut total = EventCounts::default();
    for _ in 0..n {
        let bits: Vec<bool> = (0..24).map(|_| rand::Rng::random(&mut rng)).collect();
        let sample = BoolSample::from_feature_bits(&bits);
        let trace = sim.infer(&sample, &CellBank::Nominal, &mut rng).unwrap();
        // every cell is read exactly once per datapoint
        assert_eq!(trace.counts.total_reads(), 576.0);
        assert_eq!(trace.counts.csa_evals, 24.0);
        total.merge(&trace.counts);
    }
    let avg_include_zero = total.include_lit0 / n as f64;
    let expect = includes / 2.0;
    assert!(
        (avg_include_zero - expect).abs() < expect * 0.15,
        "avg include-at-'0' events {avg_include_zero} vs expected {expect}"
    );
}

// -- monotone degradation ---------------------------------------------------------

#[test]
fn margin_error_rate_monotone_in_width_and_offset() {
    let nominal = CellNominal::default();
    let variation = VariationParams::default();
    let rate_at = |w: usize, sigma: f64| {
        margin_analysis(
            &nominal,
            &variation,
            &MarginSpec {
                column_width: w,
                csa_offset_sigma_v: sigma,
                trials: 2000,
                seed: 99,
                ..MarginSpec::default()
            },
        )
        .unwrap()
        .overall_errors
        .rate
    };
    let mut last = 0.0f64;
    for w in [1usize, 4, 16, 32, 64] {
        let rate = rate_at(w, 1e-4);
        assert!(rate >= last - 0.02, "rate dropped from {last} to {rate} at W={w}");
        last = last.max(rate);
    }
    // offset sweep at a width where the margin is tight
    let mut last = 0.0f64;
    for sigma in [0.0, 2e-4, 1e-3, 5e-3] {
        let rate = rate_at(8, sigma);
        assert!(rate >= last - 0.02, "rate dropped from {last} to {rate} at sigma={sigma}");
        last = last.max(rate);
    }
}

// -- device walks ------------------------------------------------------------------

proptest! {
    #[test]
    fn c2c_walk_preserves_state_ordering(
        seed in 0u64..5_000,
        hrs_step in 0.0f64..0.3,
        lrs_step in 0.0f64..0.3,
        steps in 1usize..200,
    ) {
        let params = VariationParams {
            hrs: StateVariation {
                c2c_step: hrs_step,
                ..VariationParams::default().hrs
            },
            lrs: StateVariation {
                c2c_step: lrs_step,
                ..VariationParams::default().lrs
            },
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut device = sample_d2d(&params, &mut rng).unwrap();
        for _ in 0..steps {
            device = step_c2c(&device, &params, &mut rng);
            prop_assert!(device.r_lrs_ohm < device.r_hrs_ohm);
            prop_assert!(device.r_lrs_ohm > 0.0);
        }
    }
}

// -- energy linearity -----------------------------------------------------------------

proptest! {
    #[test]
    fn energy_additive_in_counts(
        a_inc in 0u32..100, a_exc in 0u32..1000, a_csa in 0u32..100,
        b_inc in 0u32..100, b_exc in 0u32..1000, b_csa in 0u32..100,
    ) {
        let table = EnergyTable::default();
        let a = EventCounts {
            include_lit0: a_inc as f64,
            exclude_lit0: a_exc as f64,
            csa_evals: a_csa as f64,
            ..EventCounts::default()
        };
        let b = EventCounts {
            include_lit0: b_inc as f64,
            exclude_lit0: b_exc as f64,
            csa_evals: b_csa as f64,
            ..EventCounts::default()
        };
        let mut merged = a;
        merged.merge(&b);
        let lhs = datapoint_energy(&merged, &table);
        let rhs = datapoint_energy(&a, &table) + datapoint_energy(&b, &table);
        prop_assert!((lhs - rhs).abs() <= 1e-18 + 1e-12 * rhs.abs());
    }
}
