//! Message archives, thread rollups, monthly subject buckets and the external
//! attitude series.
//!
//! Message JSONL: one object per line with exactly the keys `message_id`,
//! `thread_id`, `group`, `timestamp` (ISO-8601, normalized to UTC) and
//! `subject`. Attitude CSV: header `month,rate`, month as `YYYY-MM`, rate in
//! percent.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Read};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::analysis::NumericSeries;
use crate::error::{Error, Result};
use crate::lexicon::tokenize;
use crate::month::{Month, MonthRange};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MessageRecord {
    pub message_id: String,
    pub thread_id: String,
    pub group: String,
    pub timestamp: DateTime<Utc>,
    pub subject: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMessage {
    message_id: String,
    thread_id: String,
    group: String,
    timestamp: String,
    subject: String,
}

/// Parses message JSONL. Blank lines are skipped; every other line must be a
/// complete record.
pub fn parse_messages<R: BufRead>(source: R) -> Result<Vec<MessageRecord>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawMessage =
            serde_json::from_str(&line).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        let timestamp = DateTime::parse_from_rfc3339(raw.timestamp.trim())
            .map_err(|e| Error::Parse { line: line_no, message: format!("bad timestamp `{}`: {e}", raw.timestamp) })?
            .with_timezone(&Utc);
        if !seen.insert(raw.message_id.clone()) {
            return Err(Error::DuplicateMessage(raw.message_id));
        }
        out.push(MessageRecord {
            message_id: raw.message_id,
            thread_id: raw.thread_id,
            group: raw.group,
            timestamp,
            subject: raw.subject,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreadSummary {
    pub thread_id: String,
    pub subject: String,
    pub message_count: usize,
    pub first_month: Month,
    /// The message format carries no author field, so this stays 0 for
    /// corpora read from JSONL.
    pub participant_count: usize,
}

/// Strips any number of leading reply markers (`re:`, any case, optional
/// whitespace around the colon) and surrounding whitespace.
pub fn canonical_subject(subject: &str) -> &str {
    let mut s = subject.trim_start();
    while let Some(prefix) = s.get(..2) {
        if !prefix.eq_ignore_ascii_case("re") {
            break;
        }
        let rest = s[2..].trim_start();
        match rest.strip_prefix(':') {
            Some(after) => s = after.trim_start(),
            None => break,
        }
    }
    s.trim_end()
}

/// One summary per distinct thread, ordered by earliest timestamp then
/// thread id. The canonical subject comes from the earliest message
/// (ties broken by message id).
pub fn build_threads(messages: &[MessageRecord]) -> Vec<ThreadSummary> {
    let mut by_thread: HashMap<&str, (usize, &MessageRecord)> = HashMap::new();
    for m in messages {
        by_thread
            .entry(m.thread_id.as_str())
            .and_modify(|(count, first)| {
                *count += 1;
                if (m.timestamp, &m.message_id) < (first.timestamp, &first.message_id) {
                    *first = m;
                }
            })
            .or_insert((1, m));
    }
    let mut rows: Vec<_> = by_thread.into_values().collect();
    rows.sort_by(|a, b| (a.1.timestamp, &a.1.thread_id).cmp(&(b.1.timestamp, &b.1.thread_id)));
    rows.into_iter()
        .map(|(count, first)| ThreadSummary {
            thread_id: first.thread_id.clone(),
            subject: canonical_subject(&first.subject).to_string(),
            message_count: count,
            first_month: Month::of(&first.timestamp),
            participant_count: 0,
        })
        .collect()
}

/// Keeps threads with at least `min_messages` messages, preserving order.
pub fn filter_threads(threads: &[ThreadSummary], min_messages: usize) -> Result<Vec<ThreadSummary>> {
    if min_messages < 1 {
        return Err(Error::InvalidParameter("min_messages must be at least 1".into()));
    }
    Ok(threads.iter().filter(|t| t.message_count >= min_messages).cloned().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthlyBucket {
    pub month: Month,
    pub token_counts: BTreeMap<String, usize>,
    pub thread_count: usize,
}

impl MonthlyBucket {
    pub fn empty(month: Month) -> Self {
        MonthlyBucket { month, token_counts: BTreeMap::new(), thread_count: 0 }
    }

    pub fn total_tokens(&self) -> usize {
        self.token_counts.values().sum()
    }
}

/// Buckets the canonical subject tokens of each thread by its first month.
/// Every month between the earliest and latest thread appears, empty or not.
pub fn monthly_subject_buckets(threads: &[ThreadSummary]) -> Vec<MonthlyBucket> {
    let (Some(first), Some(last)) =
        (threads.iter().map(|t| t.first_month).min(), threads.iter().map(|t| t.first_month).max())
    else {
        return Vec::new();
    };
    let range = MonthRange { first, last };
    let mut buckets: Vec<MonthlyBucket> = range.iter().map(MonthlyBucket::empty).collect();
    for t in threads {
        let b = &mut buckets[first.months_until(t.first_month) as usize];
        b.thread_count += 1;
        for tok in tokenize(&t.subject) {
            *b.token_counts.entry(tok).or_insert(0) += 1;
        }
    }
    buckets
}

/// Monthly percentage series of the external attitude measure (e.g. approval).
#[derive(Debug, Clone, PartialEq)]
pub struct AttitudeSeries<T> {
    pub start: Month,
    pub values: Vec<T>,
}

impl<T: Scalar> AttitudeSeries<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn range(&self) -> MonthRange {
        MonthRange::starting(self.start, self.values.len())
    }

    pub fn to_numeric(&self) -> NumericSeries<T> {
        NumericSeries::dense(self.start, self.values.clone())
    }
}

/// Reads `month,rate` rows in any order; the result is sorted and must be
/// gap-free with no duplicate months.
pub fn load_attitude_series<T: Scalar, R: Read>(source: R) -> Result<AttitudeSeries<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(source);
    let header = rdr.headers().map_err(|e| Error::Attitude(format!("header: {e}")))?;
    if header.iter().collect::<Vec<_>>() != ["month", "rate"] {
        return Err(Error::Attitude(format!(
            "expected header `month,rate`, found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: BTreeMap<Month, T> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Attitude(format!("row {row}: {e}")))?;
        if rec.len() != 2 {
            return Err(Error::Attitude(format!("row {row}: expected 2 fields")));
        }
        let month: Month = rec[0].parse()?;
        let rate: f64 = rec[1].parse().map_err(|_| Error::Attitude(format!("row {row}: bad rate `{}`", &rec[1])))?;
        if !(0.0..=100.0).contains(&rate) {
            return Err(Error::Attitude(format!("row {row}: rate {rate} for {month} outside [0, 100]")));
        }
        if rows.insert(month, T::lit(rate)).is_some() {
            return Err(Error::Attitude(format!("duplicate month {month}")));
        }
    }
    let Some((&start, _)) = rows.first_key_value() else {
        return Err(Error::Attitude("no data rows".into()));
    };
    let mut expected = start;
    for &m in rows.keys() {
        if m != expected {
            return Err(Error::Attitude(format!("missing month {expected}")));
        }
        expected = expected.succ();
    }
    Ok(AttitudeSeries { start, values: rows.into_values().collect() })
}
