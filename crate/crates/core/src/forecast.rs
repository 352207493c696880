//! Autoregressive forecasting of an attitude series with lagged exogenous
//! inputs:
//!
//! ```text
//! X(t) = Σ_{i=1..p} A_i X(t-i) + Σ_{j=1..m} Σ_{i=1..q} B_{j,i} Y_j(t-i)   [+ c]
//! ```
//!
//! Coefficients are the ordinary least-squares fit of the one-step predictor
//! over the training months. Rank-deficient designs (constant or duplicated
//! inputs) fall back to the minimum-norm solution and carry a warning.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::NumericSeries;
use crate::emotion::{EmotionPanel, Moment};
use crate::error::{Error, Result};
use crate::lexicon::Dimension;
use crate::linalg::{dot, solve_min_norm, Matrix};
use crate::month::{Month, MonthRange};
use crate::scalar::Scalar;

/// Model structure: autoregressive order `p`, exogenous lag order `q` and the
/// exogenous series by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArmaSpec {
    pub p: usize,
    pub q: usize,
    pub exogenous_names: Vec<String>,
    pub include_intercept: bool,
}

impl ArmaSpec {
    pub fn new(p: usize, q: usize, exogenous_names: Vec<String>) -> Result<Self> {
        let spec = ArmaSpec { p, q, exogenous_names, include_intercept: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn autoregressive(p: usize) -> Result<Self> {
        Self::new(p, 0, Vec::new())
    }

    pub fn with_intercept(mut self, on: bool) -> Self {
        self.include_intercept = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 && self.q == 0 {
            return Err(Error::InvalidParameter("need p >= 1 or q >= 1".into()));
        }
        if !self.exogenous_names.is_empty() && self.q == 0 {
            return Err(Error::InvalidParameter("exogenous series require q >= 1".into()));
        }
        if self.exogenous_names.is_empty() && self.p == 0 {
            return Err(Error::InvalidParameter("model without exogenous series needs p >= 1".into()));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.exogenous_names.len()
    }

    /// Number of lags a prediction needs.
    pub fn max_lag(&self) -> usize {
        if self.m() == 0 {
            self.p
        } else {
            self.p.max(self.q)
        }
    }

    pub fn n_columns(&self) -> usize {
        self.p + self.m() * self.q + usize::from(self.include_intercept)
    }
}

/// Regression rows for a spec over a contiguous month axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSystem<T> {
    pub design: Matrix<T>,
    pub response: Vec<T>,
    pub months: Vec<Month>,
}

/// Dense, axis-checked view of the model inputs.
struct Inputs<T> {
    start: Month,
    target: Vec<T>,
    exogenous: Vec<Vec<T>>,
}

fn prepare<T: Scalar>(spec: &ArmaSpec, target: &NumericSeries<T>, exogenous: &[NumericSeries<T>]) -> Result<Inputs<T>> {
    spec.validate()?;
    if exogenous.len() != spec.m() {
        return Err(Error::InvalidParameter(format!(
            "spec names {} exogenous series, {} supplied",
            spec.m(),
            exogenous.len()
        )));
    }
    for (name, s) in spec.exogenous_names.iter().zip(exogenous) {
        if s.start != target.start || s.len() != target.len() {
            return Err(Error::AxisMismatch(format!("{name}: {} vs target {}", s.range(), target.range())));
        }
    }
    let need = spec.max_lag() + 2;
    if target.len() < need {
        return Err(Error::InsufficientData(format!(
            "series of length {} shorter than max(p, q) + 2 = {need}",
            target.len()
        )));
    }
    Ok(Inputs {
        start: target.start,
        target: target.to_dense()?,
        exogenous: exogenous.iter().map(NumericSeries::to_dense).collect::<Result<_>>()?,
    })
}

fn regressors<T: Scalar>(spec: &ArmaSpec, target: &[T], exogenous: &[&[T]], t: usize) -> Vec<T> {
    let mut row = Vec::with_capacity(spec.n_columns());
    row.extend((1..=spec.p).map(|i| target[t - i]));
    for y in exogenous {
        row.extend((1..=spec.q).map(|i| y[t - i]));
    }
    if spec.include_intercept {
        row.push(T::one());
    }
    row
}

fn assemble_rows<T: Scalar>(spec: &ArmaSpec, inputs: &Inputs<T>, rows: Range<usize>) -> Result<DesignSystem<T>> {
    if rows.start < spec.max_lag() || rows.end > inputs.target.len() || rows.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "rows {}..{} not within {}..{}",
            rows.start,
            rows.end,
            spec.max_lag(),
            inputs.target.len()
        )));
    }
    let exo: Vec<&[T]> = inputs.exogenous.iter().map(Vec::as_slice).collect();
    let design: Vec<Vec<T>> = rows.clone().map(|t| regressors(spec, &inputs.target, &exo, t)).collect();
    let mut design = Matrix::from_rows(&design);
    if design.rows() == 0 {
        design = Matrix::zeros(0, spec.n_columns());
    }
    Ok(DesignSystem {
        design,
        response: rows.clone().map(|t| inputs.target[t]).collect(),
        months: rows.map(|t| inputs.start.offset(t as i64)).collect(),
    })
}

/// One row per month `t` with a full lag history: regressors
/// `[X(t-1)..X(t-p), Y_1(t-1)..Y_1(t-q), …, Y_m(t-1)..Y_m(t-q) (, 1)]`,
/// response `X(t)`.
pub fn assemble_regression<T: Scalar>(
    spec: &ArmaSpec,
    target: &NumericSeries<T>,
    exogenous: &[NumericSeries<T>],
) -> Result<DesignSystem<T>> {
    let inputs = prepare(spec, target, exogenous)?;
    let n = inputs.target.len();
    assemble_rows(spec, &inputs, spec.max_lag()..n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmaModel<T> {
    pub spec: ArmaSpec,
    /// `A_1..A_p`.
    pub ar: Vec<T>,
    /// `B`, one row per exogenous series, lags `1..q` along the row.
    pub exogenous: Vec<Vec<T>>,
    pub intercept: T,
    pub training_months: MonthRange,
    pub sse: T,
    pub rank: usize,
    pub warnings: Vec<String>,
}

impl<T: Scalar> ArmaModel<T> {
    /// Coefficients in design-column order.
    pub fn coefficient_vector(&self) -> Vec<T> {
        let mut v = self.ar.clone();
        for row in &self.exogenous {
            v.extend_from_slice(row);
        }
        if self.spec.include_intercept {
            v.push(self.intercept);
        }
        v
    }

    /// Builds a model from explicit coefficients (no fit diagnostics).
    pub fn from_coefficients(
        spec: ArmaSpec,
        ar: Vec<T>,
        exogenous: Vec<Vec<T>>,
        intercept: T,
        training_months: MonthRange,
    ) -> Result<Self> {
        spec.validate()?;
        if ar.len() != spec.p || exogenous.len() != spec.m() || exogenous.iter().any(|r| r.len() != spec.q) {
            return Err(Error::InvalidParameter("coefficient dimensions do not match spec".into()));
        }
        let rank = spec.n_columns();
        Ok(ArmaModel { spec, ar, exogenous, intercept, training_months, sse: T::zero(), rank, warnings: Vec::new() })
    }
}

fn fit_rows<T: Scalar>(spec: &ArmaSpec, inputs: &Inputs<T>, rows: Range<usize>) -> Result<ArmaModel<T>> {
    let sys = assemble_rows(spec, inputs, rows)?;
    let k = spec.n_columns();
    if sys.response.len() < k {
        return Err(Error::InsufficientData(format!("{} training rows for {k} coefficients", sys.response.len())));
    }
    let sol = solve_min_norm(&sys.design, &sys.response);
    let fitted = sys.design.mul_vec(&sol.coefficients);
    let sse = sys.response.iter().zip(&fitted).map(|(&y, &f)| (y - f) * (y - f)).sum();
    let mut warnings = Vec::new();
    if sol.rank_deficient() {
        warnings.push(format!("design rank {} < {k} columns; minimum-norm solution used", sol.rank));
    }
    let c = &sol.coefficients;
    let ar = c[..spec.p].to_vec();
    let exogenous = (0..spec.m()).map(|j| c[spec.p + j * spec.q..spec.p + (j + 1) * spec.q].to_vec()).collect();
    let intercept = if spec.include_intercept { c[k - 1] } else { T::zero() };
    Ok(ArmaModel {
        spec: spec.clone(),
        ar,
        exogenous,
        intercept,
        training_months: MonthRange { first: sys.months[0], last: *sys.months.last().expect("non-empty rows") },
        sse,
        rank: sol.rank,
        warnings,
    })
}

/// Least-squares fit over every month with a full lag history.
pub fn fit_arma<T: Scalar>(
    spec: &ArmaSpec,
    target: &NumericSeries<T>,
    exogenous: &[NumericSeries<T>],
) -> Result<ArmaModel<T>> {
    fit_arma_from(spec, target, exogenous, spec.max_lag())
}

/// Least-squares fit over months `first..` (series index). Used to put
/// models of different lag depth on the same evaluation months.
pub fn fit_arma_from<T: Scalar>(
    spec: &ArmaSpec,
    target: &NumericSeries<T>,
    exogenous: &[NumericSeries<T>],
    first: usize,
) -> Result<ArmaModel<T>> {
    let inputs = prepare(spec, target, exogenous)?;
    let n = inputs.target.len();
    fit_rows(spec, &inputs, first..n)
}

/// One-step prediction of `X(t)` from the lags before index `t`. `t` may
/// equal the history length, which forecasts the month after the data.
pub fn predict_one_step<T: Scalar>(model: &ArmaModel<T>, target: &[T], exogenous: &[&[T]], t: usize) -> Result<T> {
    let spec = &model.spec;
    if exogenous.len() != spec.m() {
        return Err(Error::InvalidParameter(format!("expected {} exogenous histories", spec.m())));
    }
    let short = t < spec.max_lag() || (spec.p > 0 && t > target.len()) || exogenous.iter().any(|y| t > y.len());
    if short {
        return Err(Error::InsufficientData(format!("history does not cover the lags of index {t}")));
    }
    let row = regressors(spec, target, exogenous, t);
    Ok(dot(&row, &model.coefficient_vector()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport<T> {
    pub mae: T,
    pub sse: T,
    /// `actual - predicted` per evaluated month.
    pub errors: Vec<T>,
    pub predictions: Vec<T>,
    /// Running mean of absolute errors.
    pub cumulative: Vec<T>,
    pub evaluated_months: MonthRange,
}

fn evaluate_rows<T: Scalar>(
    model: &ArmaModel<T>,
    inputs: &Inputs<T>,
    rows: Range<usize>,
) -> Result<EvaluationReport<T>> {
    if rows.is_empty() || rows.start < model.spec.max_lag() || rows.end > inputs.target.len() {
        return Err(Error::InvalidParameter("evaluation rows outside the fittable range".into()));
    }
    let exo: Vec<&[T]> = inputs.exogenous.iter().map(Vec::as_slice).collect();
    let mut predictions = Vec::with_capacity(rows.len());
    let mut errors = Vec::with_capacity(rows.len());
    let mut cumulative = Vec::with_capacity(rows.len());
    let (mut abs_sum, mut sse) = (T::zero(), T::zero());
    for (k, t) in rows.clone().enumerate() {
        let pred = predict_one_step(model, &inputs.target, &exo, t)?;
        let err = inputs.target[t] - pred;
        abs_sum = abs_sum + err.abs();
        sse = sse + err * err;
        predictions.push(pred);
        errors.push(err);
        cumulative.push(abs_sum / T::from_count(k + 1));
    }
    Ok(EvaluationReport {
        mae: *cumulative.last().expect("non-empty rows"),
        sse,
        errors,
        predictions,
        cumulative,
        evaluated_months: MonthRange {
            first: inputs.start.offset(rows.start as i64),
            last: inputs.start.offset(rows.end as i64 - 1),
        },
    })
}

/// In-sample one-step-ahead evaluation over the model's training months.
pub fn evaluate<T: Scalar>(
    model: &ArmaModel<T>,
    target: &NumericSeries<T>,
    exogenous: &[NumericSeries<T>],
) -> Result<EvaluationReport<T>> {
    let inputs = prepare(&model.spec, target, exogenous)?;
    let first = target.start.months_until(model.training_months.first);
    let last = target.start.months_until(model.training_months.last);
    if first < 0 || last as usize >= inputs.target.len() {
        return Err(Error::AxisMismatch(format!(
            "training months {} not within {}",
            model.training_months,
            target.range()
        )));
    }
    evaluate_rows(model, &inputs, first as usize..last as usize + 1)
}

/// Out-of-sample check: fit on the first `train_len` months (lag warm-up
/// included) and evaluate on the rest.
pub fn evaluate_holdout<T: Scalar>(
    spec: &ArmaSpec,
    target: &NumericSeries<T>,
    exogenous: &[NumericSeries<T>],
    train_len: usize,
) -> Result<(ArmaModel<T>, EvaluationReport<T>)> {
    let inputs = prepare(spec, target, exogenous)?;
    let n = inputs.target.len();
    if train_len <= spec.max_lag() || train_len >= n {
        return Err(Error::InvalidParameter(format!(
            "training length {train_len} must lie in {}..{n}",
            spec.max_lag() + 1
        )));
    }
    let model = fit_rows(spec, &inputs, spec.max_lag()..train_len)?;
    let report = evaluate_rows(&model, &inputs, train_len..n)?;
    Ok((model, report))
}

/// The comparison models: an autoregressive benchmark and nine models with
/// emotion inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SuiteModel {
    Ar,
    Mean(Dimension),
    Std(Dimension),
    Both(Dimension),
}

impl SuiteModel {
    pub const ALL: [SuiteModel; 10] = [
        SuiteModel::Ar,
        SuiteModel::Mean(Dimension::Valence),
        SuiteModel::Mean(Dimension::Arousal),
        SuiteModel::Mean(Dimension::Dominance),
        SuiteModel::Std(Dimension::Valence),
        SuiteModel::Std(Dimension::Arousal),
        SuiteModel::Std(Dimension::Dominance),
        SuiteModel::Both(Dimension::Valence),
        SuiteModel::Both(Dimension::Arousal),
        SuiteModel::Both(Dimension::Dominance),
    ];

    pub fn name(self) -> String {
        match self {
            SuiteModel::Ar => "ar".to_string(),
            SuiteModel::Mean(d) => format!("mean-{}", d.name()),
            SuiteModel::Std(d) => format!("std-{}", d.name()),
            SuiteModel::Both(d) => format!("both-{}", d.name()),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn inputs(self) -> Vec<(Dimension, Moment)> {
        match self {
            SuiteModel::Ar => vec![],
            SuiteModel::Mean(d) => vec![(d, Moment::Mean)],
            SuiteModel::Std(d) => vec![(d, Moment::Std)],
            SuiteModel::Both(d) => vec![(d, Moment::Mean), (d, Moment::Std)],
        }
    }

    pub fn spec(self, p: usize, q: usize) -> Result<ArmaSpec> {
        let names: Vec<String> = self.inputs().into_iter().map(|(d, m)| EmotionPanel::<f64>::key(d, m)).collect();
        if names.is_empty() {
            ArmaSpec::autoregressive(p)
        } else {
            ArmaSpec::new(p, q, names)
        }
    }

    pub fn exogenous<T: Scalar>(self, panel: &EmotionPanel<T>) -> Vec<NumericSeries<T>> {
        self.inputs().into_iter().map(|(d, m)| panel.get(d, m).clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry<T> {
    pub model_kind: SuiteModel,
    pub model: ArmaModel<T>,
    pub report: EvaluationReport<T>,
}

/// Fits and evaluates one suite model with evaluation starting at index
/// `first`.
pub fn run_suite_model<T: Scalar>(
    kind: SuiteModel,
    approval: &NumericSeries<T>,
    panel: &EmotionPanel<T>,
    p: usize,
    q: usize,
    first: usize,
) -> Result<SuiteEntry<T>> {
    let spec = kind.spec(p, q)?;
    let exo = kind.exogenous(panel);
    let model = fit_arma_from(&spec, approval, &exo, first)?;
    let report = evaluate(&model, approval, &exo)?;
    Ok(SuiteEntry { model_kind: kind, model, report })
}

/// First evaluation index shared by every suite model.
pub fn suite_start(p: usize, q: usize) -> usize {
    p.max(q)
}

/// The ten-model comparison. Every model is fitted and evaluated in-sample
/// over the same months so their errors are comparable.
pub fn model_suite<T: Scalar>(
    approval: &NumericSeries<T>,
    panel: &EmotionPanel<T>,
    p: usize,
    q: usize,
) -> Result<Vec<SuiteEntry<T>>> {
    if panel.start() != approval.start || panel.len() != approval.len() {
        return Err(Error::AxisMismatch(format!("emotion {} vs approval {}", panel.range(), approval.range())));
    }
    let first = suite_start(p, q);
    SuiteModel::ALL.par_iter().map(|&kind| run_suite_model(kind, approval, panel, p, q, first)).collect()
}

/// Serializable per-model report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport<T> {
    pub name: String,
    pub spec: ArmaSpec,
    pub coefficients: CoefficientReport<T>,
    pub rank: usize,
    pub warnings: Vec<String>,
    pub mae: T,
    pub sse: T,
    pub errors: Vec<T>,
    pub predictions: Vec<T>,
    pub cumulative: Vec<T>,
    pub evaluated_months: MonthRange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientReport<T> {
    #[serde(rename = "A")]
    pub ar: Vec<T>,
    /// Row-major by series, then lag.
    #[serde(rename = "B")]
    pub exogenous: Vec<Vec<T>>,
    pub intercept: T,
}

impl<T: Scalar> ModelReport<T> {
    pub fn new(name: String, model: &ArmaModel<T>, report: &EvaluationReport<T>) -> Self {
        ModelReport {
            name,
            spec: model.spec.clone(),
            coefficients: CoefficientReport {
                ar: model.ar.clone(),
                exogenous: model.exogenous.clone(),
                intercept: model.intercept,
            },
            rank: model.rank,
            warnings: model.warnings.clone(),
            mae: report.mae,
            sse: report.sse,
            errors: report.errors.clone(),
            predictions: report.predictions.clone(),
            cumulative: report.cumulative.clone(),
            evaluated_months: report.evaluated_months,
        }
    }
}

impl<T: Scalar> From<&SuiteEntry<T>> for ModelReport<T> {
    fn from(e: &SuiteEntry<T>) -> Self {
        ModelReport::new(e.model_kind.name(), &e.model, &e.report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateReport<T> {
    pub n_surrogates: usize,
    pub seed: u64,
    pub empirical_mae: T,
    pub surrogate_maes: Vec<T>,
    /// Fraction of surrogates whose MAE is at most the empirical MAE.
    pub p_hat: T,
}

/// Surrogate MAE quantile levels reported in summaries.
pub const SUMMARY_LEVELS: [f64; 7] = [0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantile<T> {
    pub level: f64,
    pub value: T,
}

impl<T: Scalar> SurrogateReport<T> {
    /// Linear-interpolation quantiles of the surrogate MAEs.
    pub fn quantiles(&self, levels: &[f64]) -> Vec<Quantile<T>> {
        let mut sorted = self.surrogate_maes.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let n = sorted.len();
        levels
            .iter()
            .map(|&level| {
                let pos = level.clamp(0.0, 1.0) * (n - 1) as f64;
                let lo = pos.floor() as usize;
                let hi = pos.ceil() as usize;
                let frac = T::lit(pos - lo as f64);
                Quantile { level, value: sorted[lo] + (sorted[hi] - sorted[lo]) * frac }
            })
            .collect()
    }
}

/// Random stream of surrogate `index`; independent of evaluation order.
pub fn surrogate_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Permutes each exogenous series independently with `rng`.
pub fn permute_series<T: Scalar>(exogenous: &[NumericSeries<T>], rng: &mut ChaCha8Rng) -> Vec<NumericSeries<T>> {
    exogenous
        .iter()
        .map(|s| {
            let mut values = s.values.clone();
            values.shuffle(rng);
            NumericSeries::new(s.start, values)
        })
        .collect()
}

/// Refits the model on temporally shuffled copies of its exogenous inputs
/// and compares their in-sample MAE with the empirical one.
pub fn surrogate_test<T: Scalar>(
    spec: &ArmaSpec,
    target: &NumericSeries<T>,
    exogenous: &[NumericSeries<T>],
    n_surrogates: usize,
    seed: u64,
) -> Result<SurrogateReport<T>> {
    surrogate_test_from(spec, target, exogenous, n_surrogates, seed, spec.max_lag())
}

/// As [`surrogate_test`], with fits and evaluation starting at index `first`.
pub fn surrogate_test_from<T: Scalar>(
    spec: &ArmaSpec,
    target: &NumericSeries<T>,
    exogenous: &[NumericSeries<T>],
    n_surrogates: usize,
    seed: u64,
    first: usize,
) -> Result<SurrogateReport<T>> {
    if n_surrogates < 1 {
        return Err(Error::InvalidParameter("n_surrogates must be at least 1".into()));
    }
    if spec.m() == 0 {
        return Err(Error::InvalidParameter("surrogate test needs at least one exogenous series".into()));
    }
    let empirical = fit_arma_from(spec, target, exogenous, first)?;
    let empirical_mae = evaluate(&empirical, target, exogenous)?.mae;
    let surrogate_maes: Vec<T> = (0..n_surrogates)
        .into_par_iter()
        .map(|i| {
            let mut rng = surrogate_rng(seed, i);
            let shuffled = permute_series(exogenous, &mut rng);
            let model = fit_arma_from(spec, target, &shuffled, first)?;
            Ok(evaluate(&model, target, &shuffled)?.mae)
        })
        .collect::<Result<_>>()?;
    let beaten = surrogate_maes.iter().filter(|&&m| m <= empirical_mae).count();
    Ok(SurrogateReport {
        n_surrogates,
        seed,
        empirical_mae,
        surrogate_maes,
        p_hat: T::from_count(beaten) / T::from_count(n_surrogates),
    })
}
