//! Plot-ready CSV layouts.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! written file reads back to bit-identical values. Missing values are
//! empty fields.

use std::io::{Read, Write};

use crate::analysis::{CorrelationTrack, NumericSeries};
use crate::emotion::{EmotionPanel, EmotionSeries, WeightedWord};
use crate::error::{Error, Result};
use crate::month::{Month, MonthRange};
use crate::scalar::Scalar;

pub const SERIES_HEADER: [&str; 9] = [
    "month",
    "valence_mean",
    "valence_std",
    "arousal_mean",
    "arousal_std",
    "dominance_mean",
    "dominance_std",
    "match_count",
    "thread_count",
];

pub const CORRELATION_HEADER: [&str; 5] = ["month", "r", "n_window", "p_value", "significant"];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn fmt_opt<T: Scalar>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-month `(match_count, thread_count)` columns.
pub type Counts = Vec<(usize, usize)>;

pub fn series_counts<T: Scalar>(series: &EmotionSeries<T>) -> Counts {
    series.months.iter().map(|m| (m.match_count, m.thread_count)).collect()
}

/// Writes six component series plus count columns in the series layout.
pub fn write_series_csv<T: Scalar, W: Write>(out: W, panel: &EmotionPanel<T>, counts: &[(usize, usize)]) -> Result<()> {
    if counts.len() != panel.len() {
        return Err(Error::AxisMismatch(format!("{} count rows for {} months", counts.len(), panel.len())));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER).map_err(csv_err)?;
    let columns: Vec<&NumericSeries<T>> = panel.iter().map(|(_, s)| s).collect();
    for (i, &(matches, threads)) in counts.iter().enumerate() {
        let mut rec = vec![panel.start().offset(i as i64).to_string()];
        rec.extend(columns.iter().map(|s| fmt_opt(s.values[i])));
        rec.push(matches.to_string());
        rec.push(threads.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_emotion_csv<T: Scalar, W: Write>(out: W, series: &EmotionSeries<T>) -> Result<()> {
    write_series_csv(out, &EmotionPanel::from_series(series), &series_counts(series))
}

fn parse_field<T: Scalar>(raw: &str, row: usize, col: &str) -> Result<Option<T>> {
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>()
        .map(|v| Some(T::lit(v)))
        .map_err(|_| Error::Parse { line: row, message: format!("bad {col} value `{raw}`") })
}

/// Reads a series-layout CSV back into a panel and its count columns.
pub fn read_series_csv<T: Scalar, R: Read>(source: R) -> Result<(EmotionPanel<T>, Counts)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != SERIES_HEADER {
        return Err(Error::Parse { line: 1, message: format!("expected header `{}`", SERIES_HEADER.join(",")) });
    }
    let mut start: Option<Month> = None;
    let mut columns: Vec<Vec<Option<T>>> = vec![Vec::new(); 6];
    let mut counts = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse { line: row, message: e.to_string() })?;
        let month: Month = rec[0].parse()?;
        let expected = start.map_or(month, |s| s.offset(i as i64));
        if month != expected {
            return Err(Error::Parse {
                line: row,
                message: format!("month {month} breaks the axis, expected {expected}"),
            });
        }
        start.get_or_insert(month);
        for (k, col) in columns.iter_mut().enumerate() {
            col.push(parse_field(&rec[k + 1], row, SERIES_HEADER[k + 1])?);
        }
        let count = |k: usize| -> Result<usize> {
            rec[k]
                .parse()
                .map_err(|_| Error::Parse { line: row, message: format!("bad {} `{}`", SERIES_HEADER[k], &rec[k]) })
        };
        counts.push((count(7)?, count(8)?));
    }
    let start = start.ok_or_else(|| Error::Parse { line: 2, message: "no data rows".into() })?;
    let panel = EmotionPanel::from_components(columns.into_iter().map(|v| NumericSeries::new(start, v)).collect())?;
    Ok((panel, counts))
}

pub fn write_correlation_csv<T: Scalar, W: Write>(out: W, track: &CorrelationTrack<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CORRELATION_HEADER).map_err(csv_err)?;
    for p in &track.points {
        w.write_record([
            p.month.to_string(),
            fmt_opt(p.r),
            p.n_window.to_string(),
            fmt_opt(p.p_value),
            p.significant.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `month,rate` layout shared with the attitude input.
pub fn write_rate_csv<T: Scalar, W: Write>(out: W, series: &NumericSeries<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["month", "rate"]).map_err(csv_err)?;
    for (i, v) in series.values.iter().enumerate() {
        w.write_record([series.month_at(i).to_string(), fmt_opt(*v)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_discussion_counts<W: Write>(out: W, start: Month, counts: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["month", "thread_count"]).map_err(csv_err)?;
    for (i, c) in counts.iter().enumerate() {
        w.write_record([start.offset(i as i64).to_string(), c.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_top_words<T: Scalar, W: Write>(out: W, periods: &[(MonthRange, Vec<WeightedWord<T>>)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["period_start", "period_end", "rank", "word", "occurrences", "display_weight"]).map_err(csv_err)?;
    for (range, words) in periods {
        for (rank, word) in words.iter().enumerate() {
            w.write_record([
                range.first.to_string(),
                range.last.to_string(),
                (rank + 1).to_string(),
                word.word.clone(),
                word.occurrences.to_string(),
                word.display_weight.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}
