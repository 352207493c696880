//! Monthly valence/arousal/dominance statistics from subject-line buckets.
//!
//! For a month with lexicon words `w` occurring `f_w` times and scoring
//! `s(w)` on a dimension:
//!
//! ```text
//! mean = Σ f_w s(w) / Σ f_w
//! std  = sqrt( Σ f_w (s(w) - mean)² / Σ f_w )
//! ```
//!
//! i.e. the population statistics of the month's matched tokens.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analysis::NumericSeries;
use crate::error::{Error, Result};
use crate::ingest::MonthlyBucket;
use crate::lexicon::{Dimension, Lexicon};
use crate::month::{Month, MonthRange};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionStats<T> {
    pub mean: T,
    pub std: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthEmotion<T> {
    pub month: Month,
    pub valence: Option<DimensionStats<T>>,
    pub arousal: Option<DimensionStats<T>>,
    pub dominance: Option<DimensionStats<T>>,
    /// Lexicon-token occurrences in the month.
    pub match_count: usize,
    pub distinct_words: usize,
    pub thread_count: usize,
}

impl<T: Scalar> MonthEmotion<T> {
    pub fn stats(&self, dim: Dimension) -> Option<DimensionStats<T>> {
        match dim {
            Dimension::Valence => self.valence,
            Dimension::Arousal => self.arousal,
            Dimension::Dominance => self.dominance,
        }
    }
}

/// Which statistic of a dimension a series carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Moment {
    Mean,
    Std,
}

impl Moment {
    pub fn name(self) -> &'static str {
        match self {
            Moment::Mean => "mean",
            Moment::Std => "std",
        }
    }
}

/// Weighted mean and population deviation of `(score, weight)` pairs.
/// Deviations are taken from the first score so identical scores give an
/// exact mean and an exact zero deviation.
fn weighted_stats<T: Scalar>(pairs: &[(T, T)]) -> Option<DimensionStats<T>> {
    let &(pivot, _) = pairs.first()?;
    let total: T = pairs.iter().map(|&(_, f)| f).sum();
    let shift: T = pairs.iter().map(|&(s, f)| f * (s - pivot)).sum::<T>() / total;
    let mut mean = pivot + shift;
    let lo = pairs.iter().map(|p| p.0).fold(T::infinity(), T::min);
    let hi = pairs.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);
    mean = mean.max(lo).min(hi);
    let var: T = pairs.iter().map(|&(s, f)| f * (s - mean) * (s - mean)).sum::<T>() / total;
    Some(DimensionStats { mean, std: var.sqrt() })
}

/// Scores one month's bucket. Months without lexicon matches carry no
/// statistics.
pub fn score_month<T: Scalar>(bucket: &MonthlyBucket, lexicon: &Lexicon<T>) -> MonthEmotion<T> {
    let matched: Vec<_> = bucket
        .token_counts
        .iter()
        .filter(|(_, &n)| n > 0)
        .filter_map(|(w, &n)| lexicon.lookup(w).map(|e| (e, n)))
        .collect();
    let match_count = matched.iter().map(|(_, n)| n).sum();
    let dim = |d: Dimension| {
        let pairs: Vec<(T, T)> = matched.iter().map(|(e, n)| (e.score(d), T::from_count(*n))).collect();
        weighted_stats(&pairs)
    };
    MonthEmotion {
        month: bucket.month,
        valence: dim(Dimension::Valence),
        arousal: dim(Dimension::Arousal),
        dominance: dim(Dimension::Dominance),
        match_count,
        distinct_words: matched.len(),
        thread_count: bucket.thread_count,
    }
}

/// Per-month emotion statistics on a contiguous axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmotionSeries<T> {
    pub months: Vec<MonthEmotion<T>>,
}

impl<T: Scalar> EmotionSeries<T> {
    pub fn start(&self) -> Month {
        self.months[0].month
    }

    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }

    pub fn range(&self) -> MonthRange {
        MonthRange::starting(self.start(), self.months.len())
    }

    /// One statistic of one dimension as a numeric series (missing where the
    /// month had no matches).
    pub fn component(&self, dim: Dimension, moment: Moment) -> NumericSeries<T> {
        let values = self
            .months
            .iter()
            .map(|m| {
                m.stats(dim).map(|s| match moment {
                    Moment::Mean => s.mean,
                    Moment::Std => s.std,
                })
            })
            .collect();
        NumericSeries::new(self.start(), values)
    }

    pub fn thread_counts(&self) -> Vec<usize> {
        self.months.iter().map(|m| m.thread_count).collect()
    }

    /// Months whose every statistic is missing.
    pub fn unmatched_months(&self) -> Vec<Month> {
        self.months.iter().filter(|m| m.match_count == 0).map(|m| m.month).collect()
    }
}

/// The six component series (mean and std of each dimension) on one axis,
/// in the order valence, arousal, dominance with mean before std.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionPanel<T> {
    series: Vec<NumericSeries<T>>,
}

impl<T: Scalar> EmotionPanel<T> {
    pub const COMPONENTS: [(Dimension, Moment); 6] = [
        (Dimension::Valence, Moment::Mean),
        (Dimension::Valence, Moment::Std),
        (Dimension::Arousal, Moment::Mean),
        (Dimension::Arousal, Moment::Std),
        (Dimension::Dominance, Moment::Mean),
        (Dimension::Dominance, Moment::Std),
    ];

    /// Column name of a component, e.g. `arousal_std`.
    pub fn key(dim: Dimension, moment: Moment) -> String {
        format!("{}_{}", dim.name(), moment.name())
    }

    fn index(dim: Dimension, moment: Moment) -> usize {
        Self::COMPONENTS.iter().position(|&c| c == (dim, moment)).expect("all components listed")
    }

    pub fn from_series(series: &EmotionSeries<T>) -> Self {
        EmotionPanel { series: Self::COMPONENTS.iter().map(|&(d, m)| series.component(d, m)).collect() }
    }

    /// Builds a panel from six series in [`Self::COMPONENTS`] order.
    pub fn from_components(series: Vec<NumericSeries<T>>) -> Result<Self> {
        if series.len() != 6 {
            return Err(Error::InvalidParameter(format!("expected 6 component series, got {}", series.len())));
        }
        let (start, len) = (series[0].start, series[0].len());
        if len == 0 {
            return Err(Error::InsufficientData("empty component series".into()));
        }
        if series.iter().any(|s| s.start != start || s.len() != len) {
            return Err(Error::AxisMismatch("component series do not share one axis".into()));
        }
        Ok(EmotionPanel { series })
    }

    pub fn get(&self, dim: Dimension, moment: Moment) -> &NumericSeries<T> {
        &self.series[Self::index(dim, moment)]
    }

    /// `(key, series)` pairs in component order.
    pub fn iter(&self) -> impl Iterator<Item = (String, &NumericSeries<T>)> {
        Self::COMPONENTS.iter().zip(&self.series).map(|(&(d, m), s)| (Self::key(d, m), s))
    }

    pub fn start(&self) -> Month {
        self.series[0].start
    }

    pub fn len(&self) -> usize {
        self.series[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.series[0].is_empty()
    }

    pub fn range(&self) -> MonthRange {
        self.series[0].range()
    }

    /// Applies `f` to every component.
    pub fn try_map(&self, mut f: impl FnMut(&NumericSeries<T>) -> Result<NumericSeries<T>>) -> Result<Self> {
        Self::from_components(self.series.iter().map(&mut f).collect::<Result<_>>()?)
    }

    pub fn slice(&self, range: MonthRange) -> Result<Self> {
        self.try_map(|s| s.slice(range))
    }
}

/// Scores every bucket. Buckets must be contiguous and non-empty.
pub fn build_series<T: Scalar>(buckets: &[MonthlyBucket], lexicon: &Lexicon<T>) -> Result<EmotionSeries<T>> {
    let Some(first) = buckets.first() else {
        return Err(Error::InsufficientData("no monthly buckets".into()));
    };
    for (i, b) in buckets.iter().enumerate() {
        if b.month != first.month.offset(i as i64) {
            return Err(Error::AxisMismatch(format!("bucket months not contiguous at {}", b.month)));
        }
    }
    Ok(EmotionSeries { months: buckets.iter().map(|b| score_month(b, lexicon)).collect() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedWord<T> {
    pub word: String,
    pub occurrences: usize,
    /// Square root of `occurrences`, for tag-cloud sizing.
    pub display_weight: T,
}

/// The `k` most frequent lexicon words over `period`, descending by count,
/// ties in ascending word order.
pub fn top_lexicon_words<T: Scalar>(
    buckets: &[MonthlyBucket],
    lexicon: &Lexicon<T>,
    period: MonthRange,
    k: usize,
) -> Result<Vec<WeightedWord<T>>> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let (Some(first), Some(last)) = (buckets.first(), buckets.last()) else {
        return Err(Error::InsufficientData("no monthly buckets".into()));
    };
    if period.first < first.month || period.last > last.month {
        return Err(Error::InvalidParameter(format!(
            "period {period} outside bucket axis {}..{}",
            first.month, last.month
        )));
    }
    let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
    for b in buckets.iter().filter(|b| period.contains(b.month)) {
        for (w, &n) in &b.token_counts {
            if n > 0 && lexicon.contains(w) {
                *totals.entry(w.as_str()).or_insert(0) += n;
            }
        }
    }
    let mut ranked: Vec<(&str, usize)> = totals.into_iter().collect();
    // stable sort over word-ordered input keeps ties alphabetical
    ranked.sort_by_key(|w| std::cmp::Reverse(w.1));
    Ok(ranked
        .into_iter()
        .take(k)
        .map(|(w, n)| WeightedWord { word: w.to_string(), occurrences: n, display_weight: T::from_count(n).sqrt() })
        .collect())
}

/// Consecutive `block_len`-month periods starting at the first bucket; the
/// last period may be shorter.
pub fn periods(axis: MonthRange, block_len: usize) -> Vec<MonthRange> {
    let block_len = block_len.max(1);
    let mut out = Vec::new();
    let mut start = axis.first;
    while start <= axis.last {
        let end = start.offset(block_len as i64 - 1).min(axis.last);
        out.push(MonthRange { first: start, last: end });
        start = end.succ();
    }
    out
}
