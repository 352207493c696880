//! Series smoothing and rolling correlation with significance flags.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::month::{Month, MonthRange};
use crate::scalar::Scalar;
use crate::stats::{pearson, student_t_two_sided};

/// Monthly values on a contiguous axis; `None` marks a missing month.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericSeries<T> {
    pub start: Month,
    pub values: Vec<Option<T>>,
}

impl<T: Scalar> NumericSeries<T> {
    pub fn new(start: Month, values: Vec<Option<T>>) -> Self {
        NumericSeries { start, values }
    }

    pub fn dense(start: Month, values: Vec<T>) -> Self {
        NumericSeries { start, values: values.into_iter().map(Some).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn month_at(&self, i: usize) -> Month {
        self.start.offset(i as i64)
    }

    pub fn range(&self) -> MonthRange {
        MonthRange::starting(self.start, self.values.len())
    }

    pub fn first_missing(&self) -> Option<Month> {
        self.values.iter().position(Option::is_none).map(|i| self.month_at(i))
    }

    /// All values, or an error naming the first missing month.
    pub fn to_dense(&self) -> Result<Vec<T>> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MissingValue { month: self.month_at(i).to_string() }))
            .collect()
    }

    /// Restriction of the series to `range`, which must lie inside the axis.
    pub fn slice(&self, range: MonthRange) -> Result<Self> {
        let own = self.range();
        if range.first < own.first || range.last > own.last {
            return Err(Error::AxisMismatch(format!("{range} not within {own}")));
        }
        let off = self.start.months_until(range.first) as usize;
        Ok(NumericSeries { start: range.first, values: self.values[off..off + range.len()].to_vec() })
    }

    /// Fills interior gaps by linear interpolation between the nearest
    /// observed neighbours; leading and trailing gaps take the nearest
    /// observed value. Fails if nothing is observed.
    pub fn interpolate_linear(&self) -> Result<Self> {
        let known: Vec<(usize, T)> = self.values.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
        let (Some(&(first_i, first_v)), Some(&(last_i, last_v))) = (known.first(), known.last()) else {
            return Err(Error::InsufficientData("series has no observed values".into()));
        };
        let mut out: Vec<Option<T>> = self.values.clone();
        for v in out.iter_mut().take(first_i) {
            *v = Some(first_v);
        }
        for v in out.iter_mut().skip(last_i + 1) {
            *v = Some(last_v);
        }
        for w in known.windows(2) {
            let ((i0, v0), (i1, v1)) = (w[0], w[1]);
            let span = T::from_count(i1 - i0);
            for (k, slot) in out.iter_mut().enumerate().take(i1).skip(i0 + 1) {
                let frac = T::from_count(k - i0) / span;
                *slot = Some(v0 + (v1 - v0) * frac);
            }
        }
        Ok(NumericSeries { start: self.start, values: out })
    }
}

/// Generalized Hamming weights `0.54 - 0.46 cos(2πk/(L-1))`, `k = 0..L`.
/// A one-point window has the single weight 1.
pub fn hamming_weights<T: Scalar>(window_len: usize) -> Vec<T> {
    if window_len == 1 {
        return vec![T::one()];
    }
    let denom = T::from_count(window_len - 1);
    (0..window_len)
        .map(|k| T::lit(0.54) - T::lit(0.46) * (T::lit(2.0) * T::PI() * T::from_count(k) / denom).cos())
        .collect()
}

/// Causal Hamming-weighted moving average. The weight with index `k`
/// multiplies the value `k` months back; windows near the start truncate to
/// the available history and renormalize.
pub fn hamming_smooth<T: Scalar>(series: &NumericSeries<T>, window_len: usize) -> Result<NumericSeries<T>> {
    if window_len < 1 {
        return Err(Error::InvalidParameter("smoothing window must be at least 1".into()));
    }
    let xs = series.to_dense()?;
    let w = hamming_weights::<T>(window_len);
    let out = (0..xs.len())
        .map(|t| {
            let lags = window_len.min(t + 1);
            if lags == 1 {
                return Some(xs[t]);
            }
            let (mut num, mut den) = (T::zero(), T::zero());
            for (k, &wk) in w.iter().enumerate().take(lags) {
                num = num + wk * xs[t - k];
                den = den + wk;
            }
            Some(num / den)
        })
        .collect();
    Ok(NumericSeries { start: series.start, values: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationPoint<T> {
    pub month: Month,
    pub r: Option<T>,
    pub n_window: usize,
    pub p_value: Option<T>,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTrack<T> {
    pub alpha: T,
    pub window: usize,
    pub points: Vec<CorrelationPoint<T>>,
}

/// Two-sided p-value of a Pearson correlation `r` over `n` pairs using the t
/// statistic `r sqrt(n-2) / sqrt(1-r²)` with `n-2` degrees of freedom.
/// `|r| = 1` is the caller's business (p = 0).
pub fn fisher_significance<T: Scalar>(r: T, n: usize, alpha: T) -> Result<(T, bool)> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("significance needs n >= 3, got {n}")));
    }
    if r.is_nan() || r.abs() >= T::one() {
        return Err(Error::InvalidParameter(format!("correlation {r} outside (-1, 1)")));
    }
    let df = n - 2;
    let t = r * T::from_count(df).sqrt() / (T::one() - r * r).sqrt();
    let p = student_t_two_sided(t, df);
    Ok((p, p < alpha))
}

/// Number of pairs in the centred window at index `t` of a length-`len`
/// series.
pub fn window_size(t: usize, len: usize, window: usize) -> usize {
    let h = (window - 1) / 2;
    t.min(h) + (len - 1 - t).min(h) + 1
}

/// Centred rolling Pearson correlation, truncated at the series edges.
/// Windows touching a missing value, or with a constant side, yield no r.
pub fn rolling_correlation<T: Scalar>(
    x: &NumericSeries<T>,
    y: &NumericSeries<T>,
    window: usize,
    alpha: T,
) -> Result<CorrelationTrack<T>> {
    if x.start != y.start || x.len() != y.len() {
        return Err(Error::AxisMismatch(format!("{} vs {}", x.range(), y.range())));
    }
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("correlation window must be odd and >= 3, got {window}")));
    }
    if x.is_empty() {
        return Err(Error::InsufficientData("empty series".into()));
    }
    let h = (window - 1) / 2;
    let len = x.len();
    let points = (0..len)
        .map(|t| {
            let lo = t.saturating_sub(h);
            let hi = (t + h).min(len - 1);
            let n_window = hi - lo + 1;
            let xs: Option<Vec<T>> = x.values[lo..=hi].iter().copied().collect();
            let ys: Option<Vec<T>> = y.values[lo..=hi].iter().copied().collect();
            let r = xs.zip(ys).and_then(|(a, b)| pearson(&a, &b));
            let p_value = match r {
                Some(r) if n_window >= 3 && r.abs() >= T::one() => Some(T::zero()),
                Some(r) if n_window >= 3 => fisher_significance(r, n_window, alpha).ok().map(|(p, _)| p),
                _ => None,
            };
            CorrelationPoint {
                month: x.month_at(t),
                r,
                n_window,
                p_value,
                significant: p_value.is_some_and(|p| p < alpha),
            }
        })
        .collect();
    Ok(CorrelationTrack { alpha, window, points })
}
