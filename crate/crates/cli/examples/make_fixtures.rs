//! Writes the synthetic fixture corpus: a small lexicon, 66 months of
//! threaded messages and a monthly approval series that lags the corpus mood.
//!
//! ```text
//! cargo run -p affect-cli --example make_fixtures -- crates/cli/fixtures
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEED: u64 = 20_040_101;
const MONTHS: usize = 66;
const START_YEAR: i32 = 1999;
const START_MONTH: u32 = 9;

// word, valence, arousal, dominance (synthetic values)
const PLEASANT: &[(&str, f64, f64, f64)] = &[
    ("peace", 7.72, 2.95, 5.45),
    ("hope", 7.05, 5.44, 5.78),
    ("freedom", 7.58, 5.52, 6.76),
    ("victory", 8.32, 6.63, 7.26),
    ("love", 8.72, 6.44, 7.11),
    ("friend", 7.74, 5.74, 6.74),
    ("success", 8.29, 6.11, 6.89),
    ("trust", 7.24, 5.30, 6.68),
    ("joy", 8.60, 7.22, 6.46),
    ("honest", 7.70, 5.32, 6.24),
    ("safe", 7.07, 3.86, 6.50),
    ("proud", 8.03, 5.56, 7.33),
    ("rescue", 7.70, 6.53, 6.45),
    ("unity", 7.25, 4.45, 6.10),
    ("win", 8.38, 7.72, 7.20),
];

const UNPLEASANT: &[(&str, f64, f64, f64)] = &[
    ("war", 2.08, 7.49, 4.16),
    ("terror", 1.89, 7.99, 3.40),
    ("crisis", 2.74, 5.44, 3.87),
    ("lie", 2.79, 5.96, 4.56),
    ("fear", 2.76, 6.96, 3.22),
    ("scandal", 2.52, 5.12, 3.99),
    ("death", 1.61, 4.59, 3.47),
    ("attack", 2.41, 6.84, 4.45),
    ("angry", 2.85, 7.17, 5.55),
    ("fraud", 2.67, 5.75, 4.52),
    ("bomb", 2.10, 7.15, 3.58),
    ("failure", 1.70, 4.95, 2.80),
    ("corrupt", 2.32, 4.67, 4.24),
    ("riot", 2.96, 6.39, 3.78),
    ("betray", 1.68, 7.24, 3.32),
];

const NEUTRAL: &[(&str, f64, f64, f64)] = &[
    ("vote", 5.92, 4.52, 6.05),
    ("tax", 3.98, 4.51, 4.63),
    ("president", 6.09, 4.83, 5.65),
    ("economy", 5.34, 4.05, 5.23),
    ("budget", 5.23, 3.91, 5.31),
    ("election", 5.76, 5.40, 5.62),
    ("congress", 5.08, 4.20, 5.06),
    ("news", 5.30, 5.17, 5.41),
];

// never in the lexicon
const FILLER: &[&str] = &[
    "the", "about", "bill", "senate", "today", "what", "policy", "new", "report", "update", "state", "debate", "week",
    "question", "plan",
];

fn month_label(i: usize) -> (i32, u32) {
    let ord = START_YEAR * 12 + START_MONTH as i32 - 1 + i as i32;
    (ord.div_euclid(12), ord.rem_euclid(12) as u32 + 1)
}

fn days_in(year: i32, month: u32) -> u32 {
    match month {
        2 if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        2 => 28,
        4 | 6 | 9 | 11 => 30,
        _ => 31,
    }
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/cli/fixtures".into()));
    fs::create_dir_all(&dir).expect("create fixture directory");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let noise = Normal::new(0.0, 1.0).unwrap();

    let mut lexicon = String::from("word,valence,arousal,dominance\n");
    for (w, v, a, d) in PLEASANT.iter().chain(UNPLEASANT).chain(NEUTRAL) {
        let _ = writeln!(lexicon, "{w},{v:.2},{a:.2},{d:.2}");
    }

    // latent mood in [-1, 1]: slow cycle plus persistent noise
    let mut mood = Vec::with_capacity(MONTHS);
    let mut drift = 0.0;
    for t in 0..MONTHS {
        drift = 0.7 * drift + 0.25 * noise.sample(&mut rng);
        let m: f64 = (2.0 * std::f64::consts::PI * t as f64 / 30.0).sin() * 0.6 + drift;
        mood.push(m.clamp(-1.0, 1.0));
    }

    let mut messages = String::new();
    let mut next_thread = 0usize;
    for (t, &m) in mood.iter().enumerate() {
        let (year, month) = month_label(t);
        let p_pleasant = 0.5 + 0.4 * m;
        let n_threads = rng.random_range(25..45);
        for _ in 0..n_threads {
            let thread = format!("t{next_thread:05}");
            next_thread += 1;
            let n_words = rng.random_range(3..7);
            let mut words = Vec::with_capacity(n_words);
            for _ in 0..n_words {
                let r: f64 = rng.random();
                let w = if r < 0.35 {
                    FILLER[rng.random_range(0..FILLER.len())]
                } else if r < 0.5 {
                    NEUTRAL[rng.random_range(0..NEUTRAL.len())].0
                } else if rng.random_bool(p_pleasant) {
                    PLEASANT[rng.random_range(0..PLEASANT.len())].0
                } else {
                    UNPLEASANT[rng.random_range(0..UNPLEASANT.len())].0
                };
                words.push(w);
            }
            let mut subject = words.join(" ");
            if let Some(first) = subject.get(0..1) {
                subject = first.to_uppercase() + &subject[1..];
            }
            let n_msgs = rng.random_range(1..8);
            let group = ["alt.politics", "talk.politics.misc", "alt.news"][rng.random_range(0..3)];
            let day = rng.random_range(1..=days_in(year, month));
            for k in 0..n_msgs {
                let (hh, mm) = (rng.random_range(0..24), rng.random_range(0..60));
                // replies may spill into the next days
                let d = (day + k).min(days_in(year, month));
                let subj = if k == 0 { subject.clone() } else { format!("Re: {subject}") };
                let line = serde_json::json!({
                    "message_id": format!("<{thread}.{k}@fixture>"),
                    "thread_id": thread,
                    "group": group,
                    "timestamp": format!("{year:04}-{month:02}-{d:02}T{hh:02}:{mm:02}:00Z"),
                    "subject": subj,
                });
                messages.push_str(&line.to_string());
                messages.push('\n');
            }
        }
    }

    // approval follows the mood two months later
    let mut approval = String::from("month,rate\n");
    let mut x = 55.0;
    for t in 0..MONTHS {
        let lagged = if t >= 2 { mood[t - 2] } else { 0.0 };
        x = 0.85 * x + 0.15 * (55.0 + 18.0 * lagged) + 0.6 * noise.sample(&mut rng);
        let (year, month) = month_label(t);
        let _ = writeln!(approval, "{year:04}-{month:02},{:.1}", x.clamp(0.0, 100.0));
    }

    fs::write(dir.join("lexicon.csv"), lexicon).expect("write lexicon");
    fs::write(dir.join("messages.jsonl"), messages).expect("write messages");
    fs::write(dir.join("approval.csv"), approval).expect("write approval");
    eprintln!("fixtures written to {}", dir.display());
}
