//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any gated criterion fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use banknote::data::{gen_synthetic, read_fvec_from, write_fvec_to, Dataset, SynthConfig};
use banknote::eval::{self, BenchConfig, ImageCap, Partition};
use banknote::head::{self, train, AdamConfig, AdamState, Example, HeadParams, TrainConfig};
use banknote::rejector::{self, RejectThreshold};
use banknote::sorter::ecb_test;
use banknote::{Category, Error, FeatureVector, LabeledSample, Provenance, SampleLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    gated: bool,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn fv(v: Vec<f64>) -> FeatureVector {
    FeatureVector::new(v).unwrap()
}

fn main() {
    let criteria = [
        Criterion {
            name: "gradient vs central differences",
            budget: Some(Duration::from_secs(5)),
            gated: true,
            run: gradient_check,
        },
        Criterion {
            name: "softmax contract",
            budget: Some(Duration::from_secs(5)),
            gated: true,
            run: softmax_contract,
        },
        Criterion {
            name: "adam first step and oracle",
            budget: None,
            gated: true,
            run: adam_oracle,
        },
        Criterion {
            name: "training-condition grid",
            budget: Some(Duration::from_secs(300)),
            gated: true,
            run: training_grid,
        },
        Criterion {
            name: "calibrated threshold sweep",
            budget: Some(Duration::from_secs(60)),
            gated: true,
            run: calibrated_sweep,
        },
        Criterion {
            name: "ECB evaluator boundaries",
            budget: Some(Duration::from_secs(1)),
            gated: true,
            run: ecb_boundaries,
        },
        Criterion {
            name: "FVEC round-trip and corruption",
            budget: None,
            gated: true,
            run: fvec_suite,
        },
        Criterion {
            name: "CLI determinism",
            budget: None,
            gated: true,
            run: cli_determinism,
        },
        Criterion {
            name: "timing report",
            budget: None,
            gated: false,
            run: timing_report,
        },
    ];

    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match (result, c.budget) {
            (Ok(_), Some(budget)) if elapsed > budget => {
                Err(format!("took {elapsed:.2?}, budget {budget:.0?}"))
            }
            (r, _) => r,
        };
        let status = match (&result, c.gated) {
            (Ok(_), true) => "PASS",
            (Ok(_), false) => "INFO",
            (Err(_), true) => {
                failures += 1;
                "FAIL"
            }
            (Err(_), false) => "WARN",
        };
        let detail = result.unwrap_or_else(|e| e);
        println!("{status} {} [{elapsed:.2?}]: {detail}", c.name);
    }
    println!(
        "acceptance: {} of {} gated criteria passed",
        criteria.iter().filter(|c| c.gated).count() - failures,
        criteria.iter().filter(|c| c.gated).count()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}

fn gradient_check() -> Outcome {
    const STEP: f64 = 1e-6;
    let mut worst: f64 = 0.0;
    for case in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + case);
        let n = rng.random_range(2..=5);
        let l = rng.random_range(1..=8);
        let m = rng.random_range(1..=6);
        let theta: Vec<f64> = (0..n * l + n).map(|_| normal(&mut rng)).collect();
        let xs: Vec<FeatureVector> = (0..m)
            .map(|_| fv((0..l).map(|_| normal(&mut rng)).collect()))
            .collect();
        let batch: Vec<Example<'_>> = xs.iter().map(|x| (x, rng.random_range(1..=n))).collect();

        let params = HeadParams::from_flat(n, l, theta.clone()).unwrap();
        let analytic = head::gradient(&batch, &params).unwrap();
        let mut diff2 = 0.0;
        let mut a2 = 0.0;
        let mut f2 = 0.0;
        for j in 0..theta.len() {
            let mut plus = theta.clone();
            plus[j] += STEP;
            let mut minus = theta.clone();
            minus[j] -= STEP;
            let lp = head::loss(&batch, &HeadParams::from_flat(n, l, plus).unwrap()).unwrap();
            let lm = head::loss(&batch, &HeadParams::from_flat(n, l, minus).unwrap()).unwrap();
            let fd = (lp - lm) / (2.0 * STEP);
            let a = analytic.as_flat()[j];
            diff2 += (a - fd).powi(2);
            a2 += a * a;
            f2 += fd * fd;
        }
        let rel = diff2.sqrt() / a2.sqrt().max(f2.sqrt()).max(f64::MIN_POSITIVE);
        ensure(rel < 1e-5, || {
            format!("case {case} (n={n}, l={l}, batch={m}): relative error {rel:.3e}")
        })?;
        worst = worst.max(rel);
    }
    Ok(format!(
        "10 cases, worst relative error {worst:.2e} (< 1e-5)"
    ))
}

fn softmax_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_sum: f64 = 0.0;
    for i in 0..10_000 {
        let len = rng.random_range(2..=50);
        let scale = 10f64.powf(rng.random_range(-2.0..=4.0));
        let logits: Vec<f64> = (0..len)
            .map(|_| rng.random_range(-1.0..=1.0) * scale)
            .collect();
        let y = head::softmax(&logits).map_err(|e| format!("vector {i}: {e}"))?;
        ensure(y.values().iter().all(|&p| p >= 0.0), || {
            format!("vector {i}: negative entry")
        })?;
        let sum: f64 = y.values().iter().sum();
        worst_sum = worst_sum.max((sum - 1.0).abs());
        ensure((sum - 1.0).abs() <= 1e-9, || {
            format!("vector {i}: sum {sum}")
        })?;
        let mut best = 0;
        for (k, &v) in logits.iter().enumerate() {
            if v > logits[best] {
                best = k;
            }
        }
        ensure(y.argmax() == best + 1, || {
            format!("vector {i}: argmax {} vs {}", y.argmax(), best + 1)
        })?;
    }
    Ok(format!(
        "10^4 vectors, magnitudes to 1e4, worst |sum - 1| = {worst_sum:.1e}"
    ))
}

/// Scalar Adam recursion written out step by step.
struct ScalarAdam {
    s: f64,
    r: f64,
    t: u32,
}

impl ScalarAdam {
    fn step(&mut self, theta: f64, g: f64, cfg: &AdamConfig) -> f64 {
        self.t += 1;
        self.s = cfg.beta1 * self.s + (1.0 - cfg.beta1) * g;
        self.r = cfg.beta2 * self.r + (1.0 - cfg.beta2) * g * g;
        let mut rho1_t = 1.0;
        let mut rho2_t = 1.0;
        for _ in 0..self.t {
            rho1_t *= cfg.beta1;
            rho2_t *= cfg.beta2;
        }
        let s_hat = self.s / (1.0 - rho1_t);
        let r_hat = self.r / (1.0 - rho2_t);
        theta - cfg.learning_rate * s_hat / (r_hat.sqrt() + cfg.epsilon)
    }
}

fn adam_oracle() -> Outcome {
    let cfg = AdamConfig::default();
    let lr = cfg.learning_rate;
    let mut checked = 0;
    for k in 0..=112 {
        let mag = 10f64.powf(-3.0 + k as f64 / 16.0);
        for g in [mag, -mag] {
            let mut state = AdamState::new(1);
            let mut theta = [0.25];
            state
                .step(&mut theta, &[g], &cfg)
                .map_err(|e| e.to_string())?;
            let delta = (theta[0] - 0.25).abs();
            ensure(delta >= 0.99 * lr && delta <= lr, || {
                format!("g = {g}: |step| = {delta}")
            })?;
            ensure((theta[0] - 0.25).signum() == -g.signum(), || {
                format!("g = {g}: wrong direction")
            })?;
            let expected = ScalarAdam {
                s: 0.0,
                r: 0.0,
                t: 0,
            }
            .step(0.25, g, &cfg);
            ensure((theta[0] - expected).abs() <= 1e-15, || {
                format!("g = {g}: {} vs oracle {expected}", theta[0])
            })?;
            checked += 1;
        }
    }

    let mut state = AdamState::new(3);
    let mut theta = [1.0, -2.0, 0.5];
    for _ in 0..10 {
        state
            .step(&mut theta, &[0.0; 3], &cfg)
            .map_err(|e| e.to_string())?;
    }
    ensure(theta == [1.0, -2.0, 0.5], || {
        format!("zero gradient moved parameters to {theta:?}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut state = AdamState::new(5);
    let mut theta: Vec<f64> = (0..5).map(|_| normal(&mut rng)).collect();
    let mut oracles: Vec<(ScalarAdam, f64)> = theta
        .iter()
        .map(|&t| {
            (
                ScalarAdam {
                    s: 0.0,
                    r: 0.0,
                    t: 0,
                },
                t,
            )
        })
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let g: Vec<f64> = (0..5)
            .map(|_| normal(&mut rng) * 10f64.powf(rng.random_range(-3.0..=3.0)))
            .collect();
        state
            .step(&mut theta, &g, &cfg)
            .map_err(|e| e.to_string())?;
        for ((oracle, t), &gi) in oracles.iter_mut().zip(&g) {
            *t = oracle.step(*t, gi, &cfg);
        }
        for (a, (_, b)) in theta.iter().zip(&oracles) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-12, || {
        format!("200-step trajectory deviates from oracle by {worst:.2e}")
    })?;
    Ok(format!("{checked} first steps within [0.99, 1.00]·lr, zero gradient fixpoint, 200-step trajectory within {worst:.1e} of oracle"))
}

/// The canonical grid benchmark: 40 classes, dim 64, separation 6, 300 notes per class.
fn canonical_benchmark() -> SynthConfig {
    SynthConfig {
        seed: 7,
        ..SynthConfig::default()
    }
}

fn training_grid() -> Outcome {
    let cfg = canonical_benchmark();
    let samples = gen_synthetic(&cfg).map_err(|e| e.to_string())?;
    let dataset = Dataset {
        n_classes: cfg.n_classes,
        dim: cfg.dim,
        samples,
    };
    let partition = Partition::new(&dataset, cfg.seed).map_err(|e| e.to_string())?;
    let caps = [ImageCap::Limit(50), ImageCap::Limit(150), ImageCap::All];
    let episodes = [200, 1000, 3000];
    let base = TrainConfig {
        seed: cfg.seed,
        ..TrainConfig::default()
    };
    let grid = eval::run_grid(&partition, &caps, &episodes, &base).map_err(|e| e.to_string())?;
    print!("{}", grid.to_table());

    const SLACK: f64 = 0.002;
    for r in 0..caps.len() {
        for c in 0..episodes.len() {
            let a = grid.cell(r, c);
            ensure((0.0..=1.0).contains(&a), || {
                format!("cell ({r}, {c}) = {a} outside [0, 1]")
            })?;
            if r > 0 {
                ensure(a + SLACK >= grid.cell(r - 1, c), || {
                    format!("not monotone in images at ({r}, {c})")
                })?;
            }
            if c > 0 {
                ensure(a + SLACK >= grid.cell(r, c - 1), || {
                    format!("not monotone in episodes at ({r}, {c})")
                })?;
            }
        }
    }
    let top = grid.cell(caps.len() - 1, episodes.len() - 1);
    ensure(top >= 0.999, || {
        format!("top cell accuracy {:.3}% < 99.9%", 100.0 * top)
    })?;
    Ok(format!(
        "3x3 grid monotone within 0.2 pp, top cell {:.3}%",
        100.0 * top
    ))
}

/// Reject benchmark: separation 8 with a small population of degraded
/// legacy-rejected notes and a category-1 population around the origin.
fn reject_benchmark() -> SynthConfig {
    SynthConfig {
        cluster_separation: 8.0,
        per_class_counts: vec![800],
        legacy_reject_fraction: 0.005,
        legacy_widening: 1.25,
        legacy_attenuation: 0.8,
        cat1_count: 2000,
        cat1_dispersion: 1.0,
        seed: 11,
        ..SynthConfig::default()
    }
}

fn calibrated_sweep() -> Outcome {
    let cfg = reject_benchmark();
    let samples = gen_synthetic(&cfg).map_err(|e| e.to_string())?;
    let dataset = Dataset {
        n_classes: cfg.n_classes,
        dim: cfg.dim,
        samples,
    };
    let partition = Partition::new(&dataset, cfg.seed).map_err(|e| e.to_string())?;
    let tc = TrainConfig {
        episodes: 6000,
        seed: cfg.seed,
        ..TrainConfig::default()
    };
    let head = train(&partition.training_set(), cfg.n_classes, &tc)
        .map_err(|e| e.to_string())?
        .params;

    let mut max_probs = Vec::new();
    for s in partition.legacy_calibration_pool() {
        let y = head.forward(s.features()).map_err(|e| e.to_string())?;
        if Some(y.argmax()) == s.class() {
            max_probs.push(rejector::max_prob(&y));
        }
    }
    ensure(!max_probs.is_empty(), || {
        "empty calibration population".into()
    })?;
    let thresholds = [0.99, 0.95, 0.80, 0.50]
        .iter()
        .map(|&q| rejector::calibrate_threshold(&max_probs, q))
        .collect::<Result<Vec<RejectThreshold>, Error>>()
        .map_err(|e| e.to_string())?;
    let rows = rejector::threshold_sweep(
        &head,
        &thresholds,
        &partition.genuine_test(),
        &partition.cat1_test(),
    )
    .map_err(|e| e.to_string())?;
    print!("{}", rejector::sweep_to_table(&rows));

    for w in rows.windows(2) {
        ensure(w[1].threshold <= w[0].threshold, || {
            "thresholds not decreasing".into()
        })?;
        ensure(w[1].reject_rate_pct <= w[0].reject_rate_pct, || {
            "reject rate increased as T decreased".into()
        })?;
        ensure(w[1].cat1_accepted >= w[0].cat1_accepted, || {
            "cat1 accepted decreased as T decreased".into()
        })?;
    }
    let strict = rows[0];
    ensure(strict.reject_rate_pct < 1.0, || {
        format!("strictest reject rate {:.3}% >= 1%", strict.reject_rate_pct)
    })?;
    ensure(strict.cat1_accepted == 0, || {
        format!(
            "{} cat1 objects accepted at the strictest T",
            strict.cat1_accepted
        )
    })?;
    Ok(format!(
        "{} calibration values; strictest T = {:.6}: reject {:.3}%, cat1 accepted 0; sweep monotone",
        max_probs.len(),
        strict.threshold,
        strict.reject_rate_pct
    ))
}

fn deck(parts: &[(Category, usize)]) -> Vec<Category> {
    parts
        .iter()
        .flat_map(|&(c, k)| std::iter::repeat_n(c, k))
        .collect()
}

/// Label, counterfeit, unfit and fit decks, expected criteria verdicts.
type DeckCase = (
    &'static str,
    Vec<Category>,
    Vec<Category>,
    Vec<Category>,
    [bool; 4],
);

fn ecb_boundaries() -> Outcome {
    use Category::*;
    let good_cf = deck(&[(Cat2, 100)]);
    let good_unfit = deck(&[(Cat4b, 100)]);
    let good_fit = deck(&[(Cat4a, 100)]);
    // (label, counterfeit, unfit, fit, expected [detection, leakage, acceptance, reject])
    let cases: Vec<DeckCase> = vec![
        (
            "all clean",
            good_cf.clone(),
            good_unfit.clone(),
            good_fit.clone(),
            [true; 4],
        ),
        (
            "counterfeit 90% in 2/3",
            deck(&[(Cat2, 45), (Cat3, 45), (Cat1, 10)]),
            good_unfit.clone(),
            good_fit.clone(),
            [true; 4],
        ),
        (
            "counterfeit 89% in 2/3",
            deck(&[(Cat2, 89), (Cat1, 11)]),
            good_unfit.clone(),
            good_fit.clone(),
            [false, true, true, true],
        ),
        (
            "one counterfeit in 4a",
            deck(&[(Cat2, 99), (Cat4a, 1)]),
            good_unfit.clone(),
            good_fit.clone(),
            [false, true, true, true],
        ),
        (
            "one counterfeit in 4b",
            deck(&[(Cat3, 99), (Cat4b, 1)]),
            good_unfit.clone(),
            good_fit.clone(),
            [false, true, true, true],
        ),
        (
            "unfit 5% in 4a",
            good_cf.clone(),
            deck(&[(Cat4b, 95), (Cat4a, 5)]),
            good_fit.clone(),
            [true; 4],
        ),
        (
            "unfit 6% in 4a",
            good_cf.clone(),
            deck(&[(Cat4b, 94), (Cat4a, 6)]),
            good_fit.clone(),
            [true, false, true, true],
        ),
        (
            "fit 90% in 4a",
            good_cf.clone(),
            good_unfit.clone(),
            deck(&[(Cat4a, 90), (Cat4b, 10)]),
            [true; 4],
        ),
        (
            "fit 89% in 4a",
            good_cf.clone(),
            good_unfit.clone(),
            deck(&[(Cat4a, 89), (Cat4b, 11)]),
            [true, true, false, true],
        ),
        (
            "fit 1% rejected",
            good_cf.clone(),
            good_unfit.clone(),
            deck(&[(Cat4a, 99), (Cat1, 1)]),
            [true; 4],
        ),
        (
            "fit 2% rejected",
            good_cf.clone(),
            good_unfit.clone(),
            deck(&[(Cat4a, 98), (Cat2, 1), (Cat3, 1)]),
            [true, true, true, false],
        ),
        (
            "fit 1 of 20 rejected",
            good_cf.clone(),
            good_unfit.clone(),
            deck(&[(Cat4a, 19), (Cat1, 1)]),
            [true, true, true, false],
        ),
        (
            "unfit 1 of 20 in 4a",
            good_cf.clone(),
            deck(&[(Cat4b, 19), (Cat4a, 1)]),
            good_fit.clone(),
            [true; 4],
        ),
        (
            "all failing",
            deck(&[(Cat2, 80), (Cat4a, 20)]),
            deck(&[(Cat4a, 100)]),
            deck(&[(Cat1, 100)]),
            [false; 4],
        ),
    ];
    for (label, cf, un, fit, expected) in &cases {
        let r = ecb_test(cf, un, fit).map_err(|e| format!("{label}: {e}"))?;
        let got = [
            r.criteria.counterfeit_detection,
            r.criteria.unfit_leakage,
            r.criteria.fit_acceptance,
            r.criteria.genuine_reject,
        ];
        ensure(got == *expected, || {
            format!("{label}: got {got:?}, expected {expected:?}")
        })?;
        ensure(r.pass == expected.iter().all(|&b| b), || {
            format!("{label}: overall verdict wrong")
        })?;
    }
    Ok(format!(
        "{} boundary decks match the hand-counted pattern",
        cases.len()
    ))
}

fn fvec_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut samples = Vec::new();
    for i in 0..30 {
        let x = fv((0..4).map(|_| normal(&mut rng) * 100.0).collect());
        let s = match i % 3 {
            0 => LabeledSample::genuine(x, i % 40 + 1),
            1 => LabeledSample::new(
                x,
                SampleLabel::Class(i % 40 + 1),
                Provenance::LegacyRejectedGenuine,
            ),
            _ => LabeledSample::new(x, SampleLabel::Cat1, Provenance::NonEuroCat1),
        };
        samples.push(s.map_err(|e| e.to_string())?);
    }
    let mut bytes = Vec::new();
    write_fvec_to(&mut bytes, &samples).map_err(|e| e.to_string())?;
    let back = read_fvec_from(&bytes, 40).map_err(|e| e.to_string())?;
    ensure(back.samples.len() == samples.len() && back.dim == 4, || {
        "round-trip changed the shape".into()
    })?;
    for (a, b) in samples.iter().zip(&back.samples) {
        let rounded: Vec<f64> = a
            .features()
            .values()
            .iter()
            .map(|&v| v as f32 as f64)
            .collect();
        ensure(b.features().values() == rounded.as_slice(), || {
            "values differ from their f32 rounding".into()
        })?;
        ensure(
            a.label() == b.label() && a.provenance() == b.provenance(),
            || "labels differ".into(),
        )?;
    }

    let mut magic = bytes.clone();
    magic[..4].copy_from_slice(b"FVEX");
    let err = read_fvec_from(&magic, 40)
        .err()
        .ok_or("bad magic accepted")?;
    ensure(
        matches!(err, Error::BadMagic { .. }) && err.to_string().contains("bad magic"),
        || format!("bad magic: {err}"),
    )?;

    let mut nine = Vec::new();
    write_fvec_to(&mut nine, &samples[..9]).map_err(|e| e.to_string())?;
    nine[9..13].copy_from_slice(&10u32.to_le_bytes());
    let err = read_fvec_from(&nine, 40)
        .err()
        .ok_or("short file accepted")?;
    ensure(
        matches!(err, Error::Truncated { .. }) && err.to_string().contains("truncated"),
        || format!("truncation: {err}"),
    )?;
    for cut in [3, 12, bytes.len() - 1] {
        let err = read_fvec_from(&bytes[..cut], 40)
            .err()
            .ok_or("cut file accepted")?;
        ensure(err.to_string().contains("truncated"), || {
            format!("cut at {cut}: {err}")
        })?;
    }

    let label_at = 13 + samples.len() * 4 * 4;
    for bad in [41i32, -1] {
        let mut b = bytes.clone();
        b[label_at..label_at + 4].copy_from_slice(&bad.to_le_bytes());
        let err = read_fvec_from(&b, 40).err().ok_or("bad label accepted")?;
        ensure(
            matches!(err, Error::LabelOutOfRange { record: 0, .. })
                && err.to_string().contains("out of range"),
            || format!("label {bad}: {err}"),
        )?;
    }
    Ok(
        "30-sample round-trip exact at f32; bad magic, truncation and out-of-range labels rejected"
            .into(),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_banknote"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "`banknote {}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok(out.stdout)
}

const CLI_SCRIPT: &[&[&str]] = &[
    &[
        "gen",
        "--classes",
        "5",
        "--dim",
        "8",
        "--per-class",
        "60",
        "--legacy-fraction",
        "0.1",
        "--legacy-widening",
        "1.25",
        "--legacy-attenuation",
        "0.5",
        "--cat1-count",
        "40",
        "--seed",
        "3",
        "--out",
        "ds.fvec",
    ],
    &[
        "gen",
        "--classes",
        "5",
        "--dim",
        "8",
        "--per-class",
        "20",
        "--seed",
        "4",
        "--out",
        "deck.fvec",
    ],
    &[
        "train",
        "--data",
        "ds.fvec",
        "--episodes",
        "200",
        "--batch",
        "50",
        "--seed",
        "3",
        "--out",
        "head.model",
    ],
    &[
        "calibrate",
        "--model",
        "head.model",
        "--data",
        "ds.fvec",
        "--quantile",
        "0.5",
        "--seed",
        "3",
        "--ecdf-out",
        "ecdf.csv",
    ],
    &[
        "evaluate",
        "--model",
        "head.model",
        "--data",
        "ds.fvec",
        "--threshold",
        "0.9",
        "--seed",
        "3",
        "--out",
        "eval.json",
    ],
    &[
        "evaluate",
        "--grid",
        "--data",
        "ds.fvec",
        "--caps",
        "10,all",
        "--episodes",
        "50,100",
        "--batch",
        "50",
        "--seed",
        "3",
        "--out",
        "grid.csv",
    ],
    &[
        "sweep",
        "--model",
        "head.model",
        "--data",
        "ds.fvec",
        "--thresholds",
        "0.99,0.9,0.5",
        "--seed",
        "3",
        "--out",
        "sweep.csv",
    ],
    &[
        "sort",
        "--model",
        "head.model",
        "--deck",
        "deck.fvec",
        "--threshold",
        "0.5",
        "--out",
        "sort.json",
    ],
    &[
        "ecb-test",
        "--model",
        "head.model",
        "--threshold",
        "0.5",
        "--counterfeit",
        "deck.fvec",
        "--unfit",
        "deck.fvec",
        "--fit",
        "deck.fvec",
        "--out",
        "ecb.json",
    ],
];

fn cli_determinism() -> Outcome {
    let dirs = [
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    ];
    let mut stdouts = [Vec::new(), Vec::new()];
    for (dir, stdout) in dirs.iter().zip(&mut stdouts) {
        for args in CLI_SCRIPT {
            stdout.push(run_cli(dir.path(), args)?);
        }
    }
    for (i, (a, b)) in stdouts[0].iter().zip(&stdouts[1]).enumerate() {
        ensure(a == b, || {
            format!(
                "stdout of `banknote {}` differs between runs",
                CLI_SCRIPT[i][0]
            )
        })?;
    }
    let mut names: Vec<_> = fs::read_dir(dirs[0].path())
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.file_name()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    names.sort();
    for name in &names {
        let a = fs::read(dirs[0].path().join(name)).map_err(|e| e.to_string())?;
        let b = fs::read(dirs[1].path().join(name)).map_err(|e| e.to_string())?;
        ensure(a == b, || {
            format!("{} differs between runs", name.to_string_lossy())
        })?;
    }
    Ok(format!(
        "{} commands, {} output files byte-identical across two runs (bench excluded)",
        CLI_SCRIPT.len(),
        names.len()
    ))
}

fn timing_report() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (n, l) = (40, 2048);
    let head = HeadParams::from_flat(
        n,
        l,
        (0..n * l + n).map(|_| 0.01 * normal(&mut rng)).collect(),
    )
    .map_err(|e| e.to_string())?;
    let inputs: Vec<LabeledSample> = (0..256)
        .map(|i| {
            LabeledSample::genuine(fv((0..l).map(|_| normal(&mut rng)).collect()), i % n + 1)
                .unwrap()
        })
        .collect();
    let inference = eval::bench(
        &head,
        &inputs,
        &BenchConfig {
            retrain_episodes: vec![],
            retrain_batches: vec![],
            ..BenchConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;

    let cfg = SynthConfig {
        per_class_counts: vec![100],
        seed: 2,
        ..SynthConfig::default()
    };
    let data = gen_synthetic(&cfg).map_err(|e| e.to_string())?;
    let small = HeadParams::zeros(cfg.n_classes, cfg.dim).map_err(|e| e.to_string())?;
    let retrain = eval::bench(
        &small,
        &data,
        &BenchConfig {
            calls: 10_000,
            retrain_episodes: vec![100, 300, 1000],
            retrain_batches: vec![30, 300],
            ..BenchConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    print!("{}{}", inference.to_table(), retrain.to_table());

    let consistency = inference.throughput_per_s * inference.per_image_ms / 1e3;
    let mut notes = vec![format!(
        "l=2048, n=40: {:.4} ms per vector, throughput x time = {consistency:.2}",
        inference.per_image_ms
    )];
    if inference.per_image_ms >= 1.0 {
        notes.push("per-vector time above the 1 ms soft target".into());
    }
    notes.push(format!(
        "retraining time monotone in episodes: {}",
        if retrain.retrain_monotone_in_episodes() {
            "yes"
        } else {
            "no"
        }
    ));
    Ok(notes.join("; "))
}
