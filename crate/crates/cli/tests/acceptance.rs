//! Acceptance suite: ten numbered criteria covering oracle equivalence,
//! brute-force clause semantics, margin and energy arithmetic, sampler
//! statistics, the programming threshold, and command determinism.
//!
//! Each criterion prints one `PASS criterion N` line on success (visible
//! with `--nocapture`); a failing assertion names its criterion.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use boolcur::crossbar::{
    infer_dataset, margin_analysis, AnalogConfig, CellBank, CrossbarSim, MarginSpec,
};
use boolcur::dataset::{noisy_xor, BoolDataset};
use boolcur::device::{
    program_cell, read_event_energy, sample_d2d, Action, CellNominal, CellPower, ProgramPulse,
    VariationParams,
};
use boolcur::energy::{compare_baseline, datapoint_energy, tops_per_joule, EnergyTable};
use boolcur::montecarlo::{run_c2c, run_pulse_sweep, ExperimentKind, ExperimentSpec};
use boolcur::tm::{self, random_model, train_reference, BoolSample, Thresholds, TrainParams};

fn pass(n: u32, detail: &str) {
    println!("PASS criterion {n}: {detail}");
}

fn sample_from_pattern(pattern: u64, feature_bits: usize) -> BoolSample {
    let bits: Vec<bool> = (0..feature_bits).map(|b| (pattern >> b) & 1 == 1).collect();
    BoolSample::from_feature_bits(&bits)
}

fn random_sample<R: Rng>(feature_bits: usize, rng: &mut R) -> BoolSample {
    let bits: Vec<bool> = (0..feature_bits).map(|_| rng.random()).collect();
    BoolSample::from_feature_bits(&bits)
}

fn baselines_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/baselines.toml")
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let nominal = CellNominal::default();
    let mut generator = ChaCha8Rng::seed_from_u64(0xACCE55);
    let widths = [4usize, 8, 32];
    let mut models_checked = 0;
    let mut samples_checked = 0u64;
    for model_idx in 0..21u64 {
        let classes = 1 + (model_idx % 4) as usize; // m <= 4
        let half_j = 1 + (model_idx % 8) as usize; // J <= 16
        let feature_bits = 2 + (model_idx % 31) as usize; // K <= 64
        let width = widths[model_idx as usize % widths.len()];
        let include_prob = 0.05 + 0.02 * (model_idx % 10) as f64;
        let model = random_model(
            classes,
            half_j * 2,
            feature_bits * 2,
            include_prob,
            &mut generator,
        )
        .unwrap();
        let sim = CrossbarSim::new(&model, AnalogConfig::for_width(width, &nominal)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(model_idx);

        let exhaustive = feature_bits <= 13;
        let count = if exhaustive {
            1u64 << feature_bits
        } else {
            10_000
        };
        for i in 0..count {
            let sample = if exhaustive {
                sample_from_pattern(i, feature_bits)
            } else {
                random_sample(feature_bits, &mut rng)
            };
            let digital = tm::infer(&sample, &model).unwrap();
            let analog = sim
                .infer(&sample, &CellBank::Nominal, &mut rng)
                .unwrap()
                .predicted;
            assert_eq!(
                analog, digital,
                "criterion 1: divergence (model {model_idx}, sample {i})"
            );
            samples_checked += 1;
        }
        models_checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(models_checked >= 20, "criterion 1: needs >= 20 models");
    assert!(
        elapsed.as_secs() < 60,
        "criterion 1: runtime {elapsed:?} exceeds one minute"
    );
    pass(
        1,
        &format!(
            "crossbar matched the digital oracle on {samples_checked} samples \
             across {models_checked} models in {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_02_partial_clause_brute_force() {
    // Single-clause models where column 0 is exactly the W driven literals.
    let nominal = CellNominal::default();
    let model_for = |w: usize, action_pattern: u64| {
        let k = w * 2;
        let bits: Vec<bool> = (0..k)
            .map(|b| b < w && (action_pattern >> b) & 1 == 1)
            .collect();
        tm::Model::new(
            1,
            2,
            k,
            vec![
                tm::Clause {
                    actions: tm::ActionVector::new(bits),
                    polarity: tm::Polarity::Positive,
                },
                tm::Clause {
                    actions: tm::ActionVector::all_exclude(k),
                    polarity: tm::Polarity::Negative,
                },
            ],
        )
        .unwrap()
    };

    let mut checked = 0u64;
    for w in 1usize..=10 {
        // exhaustive up to 2^16 combinations, sampled beyond (W = 9, 10)
        let exhaustive = 2 * w <= 16;
        let mut rng = ChaCha8Rng::seed_from_u64(w as u64);
        let action_patterns: Vec<u64> = if exhaustive {
            (0..1u64 << w).collect()
        } else {
            (0..256).map(|_| rng.random_range(0..1u64 << w)).collect()
        };
        for action_pattern in action_patterns {
            let model = model_for(w, action_pattern);
            let sim =
                CrossbarSim::new(&model, AnalogConfig::for_width(w, &nominal)).unwrap();
            let literal_patterns: Vec<u64> = if exhaustive {
                (0..1u64 << w).collect()
            } else {
                (0..256).map(|_| rng.random_range(0..1u64 << w)).collect()
            };
            for literal_pattern in literal_patterns {
                let sample = sample_from_pattern(literal_pattern, w);
                let mut counts = boolcur::energy::EventCounts::default();
                let mut eval_rng = ChaCha8Rng::seed_from_u64(0);
                let bit = sim
                    .partial_clause_eval(0, &sample, &CellBank::Nominal, &mut eval_rng, &mut counts)
                    .unwrap();
                let violated = (0..w).any(|b| {
                    ((action_pattern >> b) & 1 == 1) && ((literal_pattern >> b) & 1 == 0)
                });
                assert_eq!(
                    bit, !violated,
                    "criterion 2: mismatch at W={w} actions={action_pattern:b} literals={literal_pattern:b}"
                );
                checked += 1;
            }
        }
    }
    pass(2, &format!("{checked} (literal, action) patterns, zero mismatches"));
}

#[test]
fn criterion_03_margin_arithmetic() {
    let nominal = CellNominal::default();
    let spec = MarginSpec {
        column_width: 32,
        csa_offset_sigma_v: 0.0,
        trials: 1,
        seed: 1,
        ..MarginSpec::default()
    };
    let report = margin_analysis(&nominal, &VariationParams::table_nominal(), &spec).unwrap();
    assert!(
        (report.nominal_margin_v - 1.559e-3).abs() <= 1.0e-6,
        "criterion 3: margin {} V",
        report.nominal_margin_v
    );
    assert!(report.feasible, "criterion 3: W=32 must be feasible");

    let wide = margin_analysis(
        &nominal,
        &VariationParams::table_nominal(),
        &MarginSpec {
            column_width: 64,
            ..spec
        },
    )
    .unwrap();
    assert!(
        !wide.feasible && wide.nominal_margin_v < 0.0,
        "criterion 3: W=64 must be flagged infeasible"
    );
    // the feasibility check also rejects W=64 at configuration time
    assert!(AnalogConfig::for_width(64, &nominal).validate(&nominal).is_err());
    pass(
        3,
        &format!(
            "nominal margin {:.4} mV at W=32; W=64 infeasible ({:.4} mV)",
            report.nominal_margin_v * 1e3,
            wide.nominal_margin_v * 1e3
        ),
    );
}

#[test]
fn criterion_04_noisy_xor_energy() {
    // Table-scale geometry: 2 classes x 6 clauses x 48 literals = 576 cells
    let raw = noisy_xor(24, 4000, 0.4, 1);
    let thresholds = Thresholds::binary_passthrough(24);
    let data = raw.booleanize(&thresholds).unwrap();
    let model = train_reference(&data, &TrainParams::default()).unwrap();
    assert_eq!(model.ta_cell_count(), 576, "criterion 4: cell count");
    let (includes, _) = tm::include_stats(&model);
    assert!(
        (30..=70).contains(&includes),
        "criterion 4: trained include count {includes} strayed from ~48"
    );

    // uniform random inputs
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let samples: Vec<BoolSample> = (0..2000).map(|_| random_sample(24, &mut rng)).collect();
    let labels = vec![0usize; samples.len()];
    let eval = BoolDataset::new(samples, labels, 2).unwrap();

    let sim = CrossbarSim::new(&model, AnalogConfig::default()).unwrap();
    let batch = infer_dataset(&sim, &eval, &CellBank::Nominal, 7, false).unwrap();
    let avg = batch.total_counts.scaled(1.0 / eval.len() as f64);
    let energy = datapoint_energy(&avg, &EnergyTable::default());
    assert!(
        (0.01e-9..=0.03e-9).contains(&energy),
        "criterion 4: energy {} nJ outside [0.01, 0.03]",
        energy * 1e9
    );
    pass(
        4,
        &format!(
            "{includes}-include model averaged {:.4} nJ/datapoint",
            energy * 1e9
        ),
    );
}

#[test]
fn criterion_05_metric_reproduction() {
    let set = boolcur::io::read_baselines(&baselines_path()).unwrap();
    let fmnist = set.find("f-mnist").unwrap();
    let mnist = set.find("mnist").unwrap();

    let fmnist_topj = tops_per_joule(fmnist.ta_cells, fmnist.energy_nj * 1e-9).unwrap();
    assert!(
        (fmnist_topj - 331.0).abs() <= 1.0,
        "criterion 5: F-MNIST TopJ^-1 {fmnist_topj}"
    );
    let mnist_topj = tops_per_joule(mnist.ta_cells, mnist.energy_nj * 1e-9).unwrap();
    assert!(
        (mnist_topj - 225.6).abs() <= 0.5,
        "criterion 5: MNIST TopJ^-1 {mnist_topj}"
    );

    let fmnist_ratio =
        compare_baseline(fmnist.energy_nj * 1e-9, fmnist.cmos_tm_energy_nj * 1e-9).unwrap();
    assert!(
        (fmnist_ratio - 5.283).abs() <= 0.002,
        "criterion 5: F-MNIST reduction {fmnist_ratio}"
    );
    let mnist_ratio =
        compare_baseline(mnist.energy_nj * 1e-9, mnist.cmos_tm_energy_nj * 1e-9).unwrap();
    assert!(
        (mnist_ratio - 3.597).abs() <= 0.002,
        "criterion 5: MNIST reduction {mnist_ratio}"
    );
    pass(
        5,
        &format!(
            "TopJ^-1 {fmnist_topj:.1}/{mnist_topj:.1}, reductions {fmnist_ratio:.3}x/{mnist_ratio:.3}x"
        ),
    );
}

#[test]
fn criterion_06_event_energy_units() {
    let power = CellPower::default();
    let read = read_event_energy(false, Action::Include, 35e-9, &power);
    assert!(
        (read - 502.95e-15).abs() <= 0.01e-15,
        "criterion 6: include read energy {read}"
    );

    let mut device = boolcur::device::DeviceInstance::new(1.64e3, 65.56e3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let event = program_cell(
        &mut device,
        Action::Include,
        &ProgramPulse::set(35e-9),
        &power,
        &VariationParams::zero_variance(),
        &mut rng,
    )
    .unwrap();
    assert!(
        (event.energy_j - 7.53e-12).abs() <= 0.01e-12,
        "criterion 6: program energy {}",
        event.energy_j
    );
    pass(
        6,
        &format!(
            "include read {:.2} fJ, program-to-include {:.4} pJ",
            read * 1e15,
            event.energy_j * 1e12
        ),
    );
}

#[test]
fn criterion_07_d2d_sampler() {
    let params = VariationParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let n = 10_000;
    let mut hrs_sum = 0.0;
    let mut lrs_sum = 0.0;
    for _ in 0..n {
        let d = sample_d2d(&params, &mut rng).unwrap();
        assert!(
            (31e3..=155e3).contains(&d.r_hrs_ohm),
            "criterion 7: HRS {} out of range",
            d.r_hrs_ohm
        );
        assert!(
            (1.55e3..=1.67e3).contains(&d.r_lrs_ohm),
            "criterion 7: LRS {} out of range",
            d.r_lrs_ohm
        );
        hrs_sum += d.r_hrs_ohm;
        lrs_sum += d.r_lrs_ohm;
    }
    let hrs_mean = hrs_sum / n as f64;
    let lrs_mean = lrs_sum / n as f64;
    assert!(
        (hrs_mean - 65.56e3).abs() / 65.56e3 <= 0.02,
        "criterion 7: HRS mean {hrs_mean}"
    );
    assert!(
        (lrs_mean - 1.64e3).abs() / 1.64e3 <= 0.01,
        "criterion 7: LRS mean {lrs_mean}"
    );
    pass(
        7,
        &format!(
            "10^4 draws in range; means {:.2} kOhm / {:.4} kOhm",
            hrs_mean / 1e3,
            lrs_mean / 1e3
        ),
    );
}

#[test]
fn criterion_08_c2c_walk() {
    let spec = ExperimentSpec::new(ExperimentKind::C2c, 31);
    let report = run_c2c(&spec).unwrap();
    assert_eq!(report.hrs_samples.len(), 1000, "criterion 8: cycle count");
    // per-step bounds, checked over the recorded walk
    let mut prev: Option<(f64, f64)> = None;
    for (h, l) in report.hrs_samples.iter().zip(&report.lrs_samples) {
        if let Some((ph, pl)) = prev {
            let dh = (h - ph).abs() / ph;
            let dl = (l - pl).abs() / pl;
            assert!(dh <= 0.05 + 1e-12, "criterion 8: HRS step {dh}");
            assert!(dl <= 0.01 + 1e-12, "criterion 8: LRS step {dl}");
        }
        prev = Some((*h, *l));
    }
    assert!(
        report.hrs.std > 0.0 && report.lrs.std > 0.0,
        "criterion 8: histograms must have nonzero spread"
    );
    pass(
        8,
        &format!(
            "1000 cycles; max steps HRS {:.2}% / LRS {:.2}%, spreads {:.1}% / {:.2}%",
            report.max_step_hrs * 100.0,
            report.max_step_lrs * 100.0,
            report.hrs.relative_spread() * 100.0,
            report.lrs.relative_spread() * 100.0
        ),
    );
}

#[test]
fn criterion_09_pulse_sweep() {
    let spec = ExperimentSpec::new(ExperimentKind::PulseSweep, 2);
    let rows = run_pulse_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 20, "criterion 9: sweep is 5..=100 ns step 5");
    for row in &rows {
        let expect = row.duration_s >= 35e-9 - 1e-15;
        assert_eq!(
            row.switched, expect,
            "criterion 9: switching at {} ns",
            row.duration_s * 1e9
        );
    }
    for pair in rows.windows(2) {
        assert!(
            pair[1].energy_j > pair[0].energy_j,
            "criterion 9: energy not strictly increasing"
        );
    }
    let first = rows.iter().find(|r| r.switched).unwrap();
    assert!(
        (first.duration_s - 35e-9).abs() < 1e-15,
        "criterion 9: first switch at {} ns",
        first.duration_s * 1e9
    );
    pass(9, "switching exactly at 35 ns; energy strictly increasing");
}

// -- criterion 10: command determinism ----------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boolcur"))
}

fn run_ok(dir: &Path, args: &[&str]) {
    let output = bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "criterion 10: `boolcur {}` failed:\n{}",
        args.join(" "),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn criterion_10_determinism() {
    let baselines = baselines_path().canonicalize().unwrap();
    let baselines = baselines.to_str().unwrap();

    let mut total_files = 0usize;
    let runs: Vec<Vec<(String, Vec<u8>)>> = (0..2)
        .map(|_| {
            let tmp = tempfile::tempdir().unwrap();
            let dir = tmp.path();
            run_ok(
                dir,
                &[
                    "dataset", "noisy-xor", "--features", "8", "--samples", "300",
                    "--noise", "0.1", "--seed", "5", "--out-file", "xor.csv",
                ],
            );
            run_ok(
                dir,
                &[
                    "train", "--dataset", "xor.csv", "--out", "run",
                    "--clauses-per-class", "4", "--epochs", "20", "--seed", "5",
                ],
            );
            run_ok(
                dir,
                &[
                    "simulate", "--model", "run/model.toml", "--dataset", "xor.csv",
                    "--out", "run", "--seed", "5", "--column-width", "8", "--trace",
                    "--baselines", baselines, "--name", "noisy-xor",
                ],
            );
            run_ok(
                dir,
                &[
                    "montecarlo", "--kind", "d2d", "--out", "run/mc_d2d", "--seed", "5",
                ],
            );
            run_ok(
                dir,
                &[
                    "montecarlo", "--kind", "c2c", "--out", "run/mc_c2c", "--seed", "5",
                    "--cycles", "200",
                ],
            );
            run_ok(
                dir,
                &[
                    "montecarlo", "--kind", "pulse-sweep", "--out", "run/mc_pulse",
                    "--seed", "5",
                ],
            );
            run_ok(
                dir,
                &[
                    "montecarlo", "--kind", "margin", "--out", "run/mc_margin",
                    "--seed", "5", "--trials", "500",
                ],
            );
            run_ok(
                dir,
                &[
                    "montecarlo", "--kind", "accuracy", "--out", "run/mc_acc",
                    "--seed", "5", "--trials", "3", "--column-width", "8",
                    "--model", "run/model.toml", "--dataset", "xor.csv",
                ],
            );
            run_ok(
                dir,
                &[
                    "simulate", "--paper-aggregates", "mnist", "--baselines", baselines,
                    "--out", "run/paper", "--seed", "5",
                ],
            );
            run_ok(
                dir,
                &[
                    "report", "--inputs", "run/aggregate.toml", "run/paper/aggregate.toml",
                    "--baselines", baselines, "--out", "run/report",
                ],
            );
            let files = snapshot(dir);
            total_files = files.len();
            files
        })
        .collect();

    assert!(total_files >= 15, "criterion 10: expected a full file set");
    assert_eq!(
        runs[0].len(),
        runs[1].len(),
        "criterion 10: file sets differ"
    );
    for (a, b) in runs[0].iter().zip(&runs[1]) {
        assert_eq!(a.0, b.0, "criterion 10: file name mismatch");
        assert_eq!(
            a.1, b.1,
            "criterion 10: {} differs between identical runs",
            a.0
        );
    }
    pass(
        10,
        &format!("{total_files} output files byte-identical across reruns"),
    );
}
