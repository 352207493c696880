//! Acceptance criteria, run sequentially with one PASS/FAIL line each.
//! Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use affect_cli::pipeline::{read_attitude, read_series};
use affect_cli::{run_pipeline, PipelineConfig};
use affect_core::analysis::{fisher_significance, hamming_smooth, rolling_correlation, window_size, NumericSeries};
use affect_core::emotion::{score_month, EmotionPanel};
use affect_core::forecast::{evaluate, fit_arma, fit_arma_from, model_suite, surrogate_test_from, ArmaSpec};
use affect_core::ingest::MonthlyBucket;
use affect_core::lexicon::{Dimension, Lexicon, LexiconEntry};
use affect_core::Month;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use statrs::function::gamma::ln_gamma;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(elapsed < limit, format!("{detail}; {:.2}s of {}s budget", elapsed.as_secs_f64(), limit.as_secs()))
}

fn start() -> Month {
    "2000-01".parse().unwrap()
}

fn dense(values: Vec<f64>) -> NumericSeries<f64> {
    NumericSeries::dense(start(), values)
}

// --- 1 -----------------------------------------------------------------

fn word(i: usize) -> String {
    let mut s = String::new();
    let mut k = i;
    loop {
        s.push((b'a' + (k % 26) as u8) as char);
        k /= 26;
        if k == 0 {
            break;
        }
    }
    s + "x"
}

/// Mean and population deviation over the bucket expanded into one score
/// per token occurrence.
fn brute_force(bucket: &MonthlyBucket, lex: &Lexicon<f64>, dim: Dimension) -> Option<(f64, f64)> {
    let mut tokens = Vec::new();
    for (w, &n) in &bucket.token_counts {
        if let Some(e) = lex.lookup(w) {
            tokens.extend(std::iter::repeat_n(e.score(dim), n));
        }
    }
    if tokens.is_empty() {
        return None;
    }
    let n = tokens.len() as f64;
    let mean = tokens.iter().sum::<f64>() / n;
    let var = tokens.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for _ in 0..1000 {
        // ANEW-style two-decimal scores
        let mut score = || (rng.random_range(100..=900) as f64) / 100.0;
        let entries: Vec<LexiconEntry<f64>> = (0..40)
            .map(|i| LexiconEntry { word: word(i), valence: score(), arousal: score(), dominance: score() })
            .collect();
        let lex = Lexicon::from_entries(entries).unwrap();
        let n_words = rng.random_range(1..=20);
        let mut counts = BTreeMap::new();
        for _ in 0..n_words {
            // indices past 39 are not in the lexicon
            counts.insert(word(rng.random_range(0..50)), rng.random_range(1..=50));
        }
        let bucket = MonthlyBucket { month: start(), token_counts: counts, thread_count: 1 };
        let scored = score_month(&bucket, &lex);
        for dim in Dimension::ALL {
            match (scored.stats(dim), brute_force(&bucket, &lex, dim)) {
                (None, None) => {}
                (Some(s), Some((mean, std))) => {
                    compared += 1;
                    worst = worst.max((s.mean - mean).abs() / mean.abs());
                    let distinct = bucket
                        .token_counts
                        .keys()
                        .filter_map(|w| lex.lookup(w))
                        .map(|e| e.score(dim).to_bits())
                        .collect::<std::collections::BTreeSet<_>>()
                        .len();
                    if distinct == 1 {
                        // a single score has zero spread; the expanded sum may not
                        if s.std != 0.0 || std > 1e-12 {
                            return Err(format!("single-score bucket: std {} vs {std}", s.std));
                        }
                    } else {
                        worst = worst.max((s.std - std).abs() / std);
                    }
                }
                (a, b) => return Err(format!("match mismatch: {a:?} vs {b:?}")),
            }
        }
    }
    let elapsed = t0.elapsed();
    if worst > 1e-12 {
        return Err(format!("max relative error {worst:.2e} over {compared} comparisons"));
    }
    within(elapsed, Duration::from_secs(5), format!("max relative error {worst:.2e} over {compared} comparisons"))
}

// --- 2 -----------------------------------------------------------------

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let mut expected: Vec<usize> = (7..=12).collect();
    expected.extend(std::iter::repeat_n(13, 66 - 12));
    expected.extend((7..=12).rev());
    let direct: Vec<usize> = (0..66).map(|t| window_size(t, 66, 13)).collect();
    let x = dense((0..66).map(|i| (i as f64 * 0.7).sin()).collect());
    let y = dense((0..66).map(|i| (i as f64 * 0.3).cos() + i as f64 * 0.01).collect());
    let track = rolling_correlation(&x, &y, 13, 0.05).map_err(|e| e.to_string())?;
    let from_track: Vec<usize> = track.points.iter().map(|p| p.n_window).collect();
    if direct != expected || from_track != expected {
        return Err(format!("got {from_track:?}"));
    }
    within(t0.elapsed(), Duration::from_secs(1), "66 window sizes match 7..12, 13 x54, 12..7".into())
}

// --- 3 -----------------------------------------------------------------

/// Two-sided Student t tail by composite Simpson quadrature of the density.
fn t_two_sided_quadrature(t: f64, df: f64) -> f64 {
    let log_c = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    let f = |x: f64| (log_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    let b = t.abs();
    let n = 4000;
    let h = b / n as f64;
    let mut s = f(0.0) + f(b);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (1.0 - 2.0 * s * h / 3.0).max(0.0)
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 1..=9 {
        for sign in [-1.0, 1.0] {
            let r = sign * k as f64 / 10.0;
            for n in 7..=66usize {
                let (p, significant) = fisher_significance(r, n, 0.05).map_err(|e| e.to_string())?;
                let df = (n - 2) as f64;
                let t = r * df.sqrt() / (1.0 - r * r).sqrt();
                let oracle = t_two_sided_quadrature(t, df);
                worst = worst.max((p - oracle).abs());
                if significant != (p < 0.05) {
                    return Err(format!("flag inconsistent at r={r}, n={n}"));
                }
                cases += 1;
            }
        }
    }
    if worst > 1e-6 {
        return Err(format!("max |p - oracle| {worst:.2e} over {cases} cases"));
    }
    within(t0.elapsed(), Duration::from_secs(10), format!("max |p - oracle| {worst:.2e} over {cases} cases"))
}

// --- 4 -----------------------------------------------------------------

fn criterion_4() -> Outcome {
    let constant = dense(vec![5.37; 40]);
    let smoothed = hamming_smooth(&constant, 4).map_err(|e| e.to_string())?;
    let const_err = smoothed.values.iter().map(|v| (v.unwrap() - 5.37).abs()).fold(0.0, f64::max);

    // 0.54 - 0.46 cos(2 pi k / 3) = 0.08, 0.77, 0.77, 0.08; sum 1.7
    let hand = [0.08 / 1.7, 0.77 / 1.7, 0.77 / 1.7, 0.08 / 1.7];
    let mut impulse = vec![0.0; 30];
    impulse[10] = 1.0;
    let response = hamming_smooth(&dense(impulse), 4).map_err(|e| e.to_string())?;
    let mut impulse_err = 0.0f64;
    for (t, v) in response.values.iter().enumerate() {
        let want = if (10..14).contains(&t) { hand[t - 10] } else { 0.0 };
        impulse_err = impulse_err.max((v.unwrap() - want).abs());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut lin_err = 0.0f64;
    for _ in 0..200 {
        let len = rng.random_range(1..60);
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(-50.0..50.0)).collect();
        let y: Vec<f64> = (0..len).map(|_| rng.random_range(-50.0..50.0)).collect();
        let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let sx = hamming_smooth(&dense(x), 4).unwrap();
        let sy = hamming_smooth(&dense(y), 4).unwrap();
        let sc = hamming_smooth(&dense(combo), 4).unwrap();
        for i in 0..len {
            let lhs = sc.values[i].unwrap();
            let rhs = a * sx.values[i].unwrap() + b * sy.values[i].unwrap();
            lin_err = lin_err.max((lhs - rhs).abs());
        }
    }
    check(
        const_err <= 1e-12 && impulse_err <= 1e-12 && lin_err <= 1e-10,
        format!("constant err {const_err:.1e}, impulse err {impulse_err:.1e}, linearity err {lin_err:.1e}"),
    )
}

// --- 5 -----------------------------------------------------------------

fn ar1_estimate(seed: u64, x0: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let mut x = vec![x0];
    for t in 1..200 {
        x.push(0.95 * x[t - 1] + noise.sample(&mut rng));
    }
    let model = fit_arma(&ArmaSpec::autoregressive(1).unwrap(), &dense(x), &[]).unwrap();
    model.ar[0]
}

fn criterion_5() -> Outcome {
    let t0 = Instant::now();
    // the series starts from a unit level and decays towards zero
    let hits = (0..100).filter(|&s| (ar1_estimate(s, 1.0) - 0.95).abs() <= 0.02).count();
    let elapsed = t0.elapsed();
    let stationary = (0..100).filter(|&s| (ar1_estimate(s, 0.0) - 0.95).abs() <= 0.02).count();
    if hits < 95 {
        return Err(format!("{hits}/100 seeds within 0.02"));
    }
    within(
        elapsed,
        Duration::from_secs(5),
        format!("{hits}/100 seeds within 0.02 (X0 = 1; from X0 = 0 it is {stationary}/100)"),
    )
}

// --- 6, 7, 8 -------------------------------------------------------------

const T_LEN: usize = 66;
const SIGMA: f64 = 0.25;

/// `X(t) = 0.9 X(t-1) + b Y(t-2) + e`, `Y` iid standard normal.
fn arx_fixture(seed: u64, b: f64) -> (NumericSeries<f64>, NumericSeries<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = (0..T_LEN).map(|_| StandardNormal.sample(&mut rng)).collect();
    let noise = Normal::new(0.0, SIGMA).unwrap();
    let mut x = vec![0.0; T_LEN];
    for t in 1..T_LEN {
        let exo = if t >= 2 { b * y[t - 2] } else { 0.0 };
        x[t] = 0.9 * x[t - 1] + exo + noise.sample(&mut rng);
    }
    (dense(x), dense(y))
}

fn arma_spec() -> ArmaSpec {
    ArmaSpec::new(1, 3, vec!["y".into()]).unwrap()
}

fn in_sample_mae(spec: &ArmaSpec, x: &NumericSeries<f64>, exo: &[NumericSeries<f64>]) -> f64 {
    let model = fit_arma_from(spec, x, exo, 3).unwrap();
    evaluate(&model, x, exo).unwrap().mae
}

fn criterion_6() -> Outcome {
    let t0 = Instant::now();
    let mut worst_gain = f64::INFINITY;
    for seed in 0..20 {
        let (x, y) = arx_fixture(seed, 0.5);
        let ar = in_sample_mae(&ArmaSpec::autoregressive(1).unwrap(), &x, &[]);
        let arma = in_sample_mae(&arma_spec(), &x, &[y]);
        worst_gain = worst_gain.min(1.0 - arma / ar);
    }
    if worst_gain < 0.20 {
        return Err(format!("smallest MAE reduction {:.1}%", 100.0 * worst_gain));
    }
    within(
        t0.elapsed(),
        Duration::from_secs(5),
        format!("MAE reduction at least {:.1}% in all 20 seeds", 100.0 * worst_gain),
    )
}

fn random_panel(rng: &mut ChaCha8Rng, len: usize) -> EmotionPanel<f64> {
    let series = (0..6)
        .map(|_| {
            let level = rng.random_range(2.0..7.0);
            dense((0..len).map(|_| level + rng.random_range(-1.0..1.0)).collect())
        })
        .collect();
    EmotionPanel::from_components(series).unwrap()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    let mut comparisons = 0;
    for _ in 0..100 {
        let len = rng.random_range(20..=90);
        let mut x = vec![rng.random_range(30.0..70.0)];
        for t in 1..len {
            let next: f64 = 0.9 * x[t - 1] + 5.0 + rng.random_range(-3.0..3.0);
            x.push(next);
        }
        let panel = random_panel(&mut rng, len);
        let suite = model_suite(&dense(x), &panel, 1, 3).map_err(|e| e.to_string())?;
        let ar_sse = suite[0].report.sse;
        for e in &suite[1..] {
            let excess = e.report.sse - ar_sse;
            ok &= excess <= 1e-9 * ar_sse.max(1.0);
            worst = worst.max(excess);
            comparisons += 1;
        }
    }
    check(ok, format!("{comparisons} nested comparisons, largest SSE(model) - SSE(ar) = {worst:.3e}"))
}

fn criterion_8() -> Outcome {
    let t0 = Instant::now();
    let (x, y) = arx_fixture(8, 0.5);
    let informative = surrogate_test_from(&arma_spec(), &x, &[y], 1000, 8, 3).map_err(|e| e.to_string())?;
    let mut not_rejected = 0;
    for seed in 0..100 {
        let (x, y) = arx_fixture(1000 + seed, 0.0);
        let r = surrogate_test_from(&arma_spec(), &x, &[y], 200, seed, 3).map_err(|e| e.to_string())?;
        if r.p_hat >= 0.05 {
            not_rejected += 1;
        }
    }
    let detail =
        format!("informative p_hat {} (n=1000); null p_hat >= 0.05 in {not_rejected}/100 runs", informative.p_hat);
    if informative.p_hat > 0.01 || not_rejected < 90 {
        return Err(detail);
    }
    within(t0.elapsed(), Duration::from_secs(120), detail)
}

// --- 9, 10 -------------------------------------------------------------

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn reference_run(out: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let cfg = PipelineConfig::reference(
        fixture("lexicon.csv"),
        fixture("messages.jsonl"),
        fixture("approval.csv"),
        out.to_path_buf(),
    );
    let manifest = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    manifest.artifacts.iter().map(|a| Ok((a.clone(), fs::read(out.join(a)).map_err(|e| e.to_string())?))).collect()
}

fn criterion_9(dir: &Path) -> Outcome {
    let a = reference_run(&dir.join("a"))?;
    let b = reference_run(&dir.join("b"))?;
    let differing: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
    let kinds = ["emotion_series", "correlations/", "models.json", "surrogate.json"];
    let covered = kinds.iter().all(|k| a.keys().any(|p| p.starts_with(k)));
    check(
        differing.is_empty() && a.len() == b.len() && covered,
        format!("{} artifacts compared, {} differ", a.len(), differing.len()),
    )
}

fn criterion_10(dir: &Path) -> Outcome {
    let out = dir.join("a");
    let (panel, _) = read_series(&out.join("emotion_series_smoothed.csv")).map_err(|e| e.to_string())?;
    let attitude = read_attitude(&out.join("attitude_smoothed.csv")).map_err(|e| e.to_string())?;
    let suite = model_suite(&attitude, &panel, 1, 3).map_err(|e| e.to_string())?;
    let expected = [
        "ar",
        "mean-valence",
        "mean-arousal",
        "mean-dominance",
        "std-valence",
        "std-arousal",
        "std-dominance",
        "both-valence",
        "both-arousal",
        "both-dominance",
    ];
    let names: Vec<String> = suite.iter().map(|e| e.model_kind.name()).collect();
    if names != expected {
        return Err(format!("names {names:?}"));
    }
    let mut worst = 0.0f64;
    for e in &suite {
        let r = &e.report;
        let n = r.evaluated_months.len();
        if [r.errors.len(), r.predictions.len(), r.cumulative.len()] != [n, n, n] || n == 0 {
            return Err(format!("{}: incomplete report", e.model_kind.name()));
        }
        let mut running = 0.0;
        for (k, err) in r.errors.iter().enumerate() {
            running += err.abs();
            worst = worst.max((r.cumulative[k] - running / (k + 1) as f64).abs());
        }
        worst = worst.max((r.cumulative[n - 1] - r.mae).abs());
    }
    check(worst <= 1e-12, format!("10 models in order, max cumulative/MAE deviation {worst:.1e}"))
}

fn main() {
    let tmp = tempfile::TempDir::new().expect("temporary directory");
    let dir = tmp.path().to_path_buf();
    let dir2 = dir.clone();
    let criteria: Vec<Criterion> = vec![
        ("scoring oracle equivalence", Box::new(criterion_1)),
        ("edge-window law", Box::new(criterion_2)),
        ("correlation significance oracle", Box::new(criterion_3)),
        ("smoothing identities", Box::new(criterion_4)),
        ("AR(1) recovery", Box::new(criterion_5)),
        ("ARMA improvement analog", Box::new(criterion_6)),
        ("nested SSE dominance", Box::new(criterion_7)),
        ("surrogate test calibration", Box::new(criterion_8)),
        ("pipeline determinism", Box::new(move || criterion_9(&dir))),
        ("ten-model suite shape", Box::new(move || criterion_10(&dir2))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        match outcome {
            Ok(detail) => println!("acceptance {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
