//! The metric-versus-MOS comparison report.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::bench::LatencyRow;
use super::mos::{MosAggregate, MAX_SCORE, MIN_SCORE};
use super::stats::{correlate, mann_whitney_u, quantile, sample_variance, welch_ttest, Correlation, MannWhitneyResult, WelchResult};
use super::EvalError;

pub const DEFAULT_ALPHA: f64 = 0.001;
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricValue {
    pub image_id: String,
    pub method_id: String,
    pub value: f64,
}

/// One metric's scores for every `(image, method)` candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricTable {
    pub metric: String,
    pub higher_is_better: bool,
    pub values: Vec<MetricValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSummary {
    pub method_id: String,
    pub n: usize,
    pub mean: f64,
    pub sd: Option<f64>,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Counts of scores 1 through 5.
    pub histogram: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairwiseTest {
    pub method_a: String,
    pub method_b: String,
    pub welch: Option<WelchResult>,
    pub welch_note: Option<String>,
    pub welch_reject: bool,
    pub mann_whitney: Option<MannWhitneyResult>,
    pub mann_whitney_note: Option<String>,
    pub mann_whitney_reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricCorrelation {
    pub metric: String,
    pub correlation: Option<Correlation>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankingVerdict {
    pub metric: String,
    /// Per-method mean over finite values, in method-id order.
    pub method_means: BTreeMap<String, Option<f64>>,
    /// Best first.
    pub ranking: Vec<String>,
    pub top_matches_mos: bool,
    pub order_matches_mos: bool,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub schema_version: u32,
    pub alpha: f64,
    pub methods: Vec<MethodSummary>,
    /// MOS ranking, best first.
    pub mos_ranking: Vec<String>,
    pub pairwise: Vec<PairwiseTest>,
    pub correlations: Vec<MetricCorrelation>,
    pub rankings: Vec<RankingVerdict>,
    pub latency: Vec<LatencyRow>,
}

fn rank_desc(means: &BTreeMap<String, Option<f64>>, higher_is_better: bool) -> Vec<String> {
    let mut ids: Vec<(&String, f64)> = means
        .iter()
        .map(|(k, v)| {
            let v = v.unwrap_or(f64::NEG_INFINITY);
            (k, if higher_is_better { v } else { -v })
        })
        .collect();
    ids.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ids.into_iter().map(|(k, _)| k.clone()).collect()
}

fn summarize(method: &str, sorted: &[f64]) -> MethodSummary {
    let n = sorted.len();
    let mut histogram = vec![0; (MAX_SCORE - MIN_SCORE + 1) as usize];
    for &s in sorted {
        histogram[(s as usize).saturating_sub(MIN_SCORE as usize)] += 1;
    }
    MethodSummary {
        method_id: method.to_string(),
        n,
        mean: sorted.iter().sum::<f64>() / n as f64,
        sd: (n >= 2).then(|| sample_variance(sorted).sqrt()),
        min: sorted[0],
        q1: quantile(sorted, 0.25),
        median: quantile(sorted, 0.5),
        q3: quantile(sorted, 0.75),
        max: sorted[n - 1],
        histogram,
    }
}

/// Assembles the report. Metric rows must refer to `(image, method)` cells
/// present in the MOS data.
pub fn build_report(mos: &MosAggregate, metrics: &[MetricTable], latency: &[LatencyRow], alpha: f64) -> Result<EvalReport, EvalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EvalError::InvalidAlpha(alpha));
    }
    let methods: Vec<MethodSummary> = mos.methods.iter().map(|(m, s)| summarize(m, s)).collect();
    let mos_means: BTreeMap<String, Option<f64>> = methods.iter().map(|m| (m.method_id.clone(), Some(m.mean))).collect();
    let mos_ranking = rank_desc(&mos_means, true);

    let ids: Vec<&String> = mos.methods.keys().collect();
    let mut pairwise = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            let (sa, sb) = (&mos.methods[*a], &mos.methods[*b]);
            let welch = welch_ttest(sa, sb);
            let mw = mann_whitney_u(sa, sb);
            pairwise.push(PairwiseTest {
                method_a: (*a).clone(),
                method_b: (*b).clone(),
                welch_reject: welch.as_ref().is_ok_and(|w| w.p_two_sided < alpha),
                welch_note: welch.as_ref().err().map(ToString::to_string),
                welch: welch.ok(),
                mann_whitney_reject: mw.as_ref().is_ok_and(|m| m.p_two_sided < alpha),
                mann_whitney_note: mw.as_ref().err().map(|e| match e {
                    EvalError::AllValuesTied => "all values tied; p = 1 by convention".to_string(),
                    other => other.to_string(),
                }),
                mann_whitney: mw.ok(),
            });
        }
    }

    let mut correlations = Vec::new();
    let mut rankings = Vec::new();
    let mut seen_metrics = BTreeSet::new();
    for table in metrics {
        if !seen_metrics.insert(table.metric.clone()) {
            return Err(EvalError::IdMismatch(format!("metric {:?} given twice", table.metric)));
        }
        let mut per_method: BTreeMap<String, Vec<f64>> = ids.iter().map(|m| ((*m).clone(), Vec::new())).collect();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        let mut cells = BTreeSet::new();
        for v in &table.values {
            let key = (v.image_id.clone(), v.method_id.clone());
            let cell = mos.cells.get(&key).ok_or_else(|| {
                EvalError::IdMismatch(format!(
                    "{} row for image {:?} / method {:?} has no MOS ratings",
                    table.metric, v.image_id, v.method_id
                ))
            })?;
            if !cells.insert(key) {
                return Err(EvalError::IdMismatch(format!(
                    "{} has two rows for image {:?} / method {:?}",
                    table.metric, v.image_id, v.method_id
                )));
            }
            if v.value.is_finite() {
                xs.push(v.value);
                ys.push(cell.mean);
                per_method.get_mut(&v.method_id).expect("cell implies method").push(v.value);
            }
        }
        let (correlation, note) = match correlate(&xs, &ys) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
        correlations.push(MetricCorrelation {
            metric: table.metric.clone(),
            correlation,
            note,
        });
        let method_means: BTreeMap<String, Option<f64>> = per_method
            .into_iter()
            .map(|(m, v)| {
                let mean = (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
                (m, mean)
            })
            .collect();
        let ranking = rank_desc(&method_means, table.higher_is_better);
        let top = ranking.first() == mos_ranking.first();
        let order = ranking == mos_ranking;
        let verdict = match (top, order) {
            (_, true) => "ranks methods in the same order as MOS",
            (true, false) => "picks the same best method as MOS but orders the rest differently",
            (false, _) => "disagrees with MOS on the best method",
        };
        rankings.push(RankingVerdict {
            metric: table.metric.clone(),
            method_means,
            ranking,
            top_matches_mos: top,
            order_matches_mos: order,
            verdict: verdict.to_string(),
        });
    }

    let report = EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        alpha,
        methods,
        mos_ranking,
        pairwise,
        correlations,
        rankings,
        latency: latency.to_vec(),
    };
    report.validate()?;
    Ok(report)
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), EvalError> {
    if ok {
        Ok(())
    } else {
        Err(EvalError::SchemaViolation(what()))
    }
}

fn unit(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

impl EvalReport {
    /// Checks the structural invariants of a report.
    pub fn validate(&self) -> Result<(), EvalError> {
        check(self.schema_version == REPORT_SCHEMA_VERSION, || {
            format!("schema_version {}", self.schema_version)
        })?;
        check(self.alpha > 0.0 && self.alpha < 1.0, || format!("alpha {}", self.alpha))?;
        let ids: BTreeSet<&str> = self.methods.iter().map(|m| m.method_id.as_str()).collect();
        check(ids.len() == self.methods.len(), || "duplicate method summaries".into())?;
        for m in &self.methods {
            check(m.n > 0 && m.histogram.iter().sum::<usize>() == m.n, || {
                format!("method {} histogram does not add up to n", m.method_id)
            })?;
            check(m.min <= m.q1 && m.q1 <= m.median && m.median <= m.q3 && m.q3 <= m.max, || {
                format!("method {} quartiles out of order", m.method_id)
            })?;
        }
        check(
            self.mos_ranking.len() == ids.len() && self.mos_ranking.iter().all(|m| ids.contains(m.as_str())),
            || "mos_ranking does not list every method".into(),
        )?;
        let n = ids.len();
        check(self.pairwise.len() == n * n.saturating_sub(1) / 2, || "pairwise count".into())?;
        for t in &self.pairwise {
            let pair = format!("{}/{}", t.method_a, t.method_b);
            if let Some(w) = &t.welch {
                check(unit(w.p_two_sided) && unit(w.p_one_sided), || format!("{pair}: Welch p out of [0,1]"))?;
                check(t.welch_reject == (w.p_two_sided < self.alpha), || format!("{pair}: Welch reject flag"))?;
            } else {
                check(!t.welch_reject && t.welch_note.is_some(), || format!("{pair}: missing Welch note"))?;
            }
            if let Some(m) = &t.mann_whitney {
                check(unit(m.p_two_sided) && unit(m.p_one_sided), || format!("{pair}: U-test p out of [0,1]"))?;
                check(t.mann_whitney_reject == (m.p_two_sided < self.alpha), || format!("{pair}: U-test reject flag"))?;
            } else {
                check(!t.mann_whitney_reject, || format!("{pair}: U-test reject without result"))?;
            }
        }
        for c in &self.correlations {
            if let Some(r) = &c.correlation {
                check((-1.0..=1.0).contains(&r.pearson) && (-1.0..=1.0).contains(&r.spearman), || {
                    format!("{}: correlation outside [-1,1]", c.metric)
                })?;
            }
        }
        check(self.rankings.len() == self.correlations.len(), || "one ranking per metric".into())?;
        for r in &self.rankings {
            check(r.ranking.len() == n, || format!("{}: ranking length", r.metric))?;
        }
        for l in &self.latency {
            check(l.median_ms >= 0.0 && l.iqr_ms >= 0.0 && l.repetitions >= 1, || {
                format!("latency row {}", l.method)
            })?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are finite")
    }

    /// Flat `section,subject,field,value` rows.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |s: &str, subj: &str, f: &str, v: String| {
            w.write_record([s, subj, f, &v]).expect("in-memory write");
        };
        row("section", "subject", "field", "value".into());
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
        for m in &self.methods {
            row("mos", &m.method_id, "n", m.n.to_string());
            row("mos", &m.method_id, "mean", m.mean.to_string());
            row("mos", &m.method_id, "sd", opt(m.sd));
            row("mos", &m.method_id, "median", m.median.to_string());
        }
        for t in &self.pairwise {
            let subj = format!("{} vs {}", t.method_a, t.method_b);
            row("welch", &subj, "t", opt(t.welch.map(|w| w.t)));
            row("welch", &subj, "df", opt(t.welch.map(|w| w.df)));
            row("welch", &subj, "p", opt(t.welch.map(|w| w.p_two_sided)));
            row("welch", &subj, "reject", t.welch_reject.to_string());
            row("mann_whitney", &subj, "u", opt(t.mann_whitney.map(|m| m.u)));
            row("mann_whitney", &subj, "p", opt(t.mann_whitney.map(|m| m.p_two_sided)));
            row("mann_whitney", &subj, "reject", t.mann_whitney_reject.to_string());
        }
        for c in &self.correlations {
            row("correlation", &c.metric, "pearson", opt(c.correlation.map(|r| r.pearson)));
            row("correlation", &c.metric, "spearman", opt(c.correlation.map(|r| r.spearman)));
        }
        for r in &self.rankings {
            row("ranking", &r.metric, "order", r.ranking.join(" > "));
            row("ranking", &r.metric, "verdict", r.verdict.clone());
        }
        for l in &self.latency {
            row("latency", &l.method, "median_ms", l.median_ms.to_string());
            row("latency", &l.method, "iqr_ms", l.iqr_ms.to_string());
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Per-method score distributions, one row per method.
    pub fn distributions_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["method_id", "n", "mean", "sd", "min", "q1", "median", "q3", "max"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        header.extend((MIN_SCORE..=MAX_SCORE).map(|s| format!("count_{s}")));
        w.write_record(&header).expect("in-memory write");
        for m in &self.methods {
            let mut rec = vec![
                m.method_id.clone(),
                m.n.to_string(),
                m.mean.to_string(),
                m.sd.map_or_else(String::new, |s| s.to_string()),
                m.min.to_string(),
                m.q1.to_string(),
                m.median.to_string(),
                m.q3.to_string(),
                m.max.to_string(),
            ];
            rec.extend(m.histogram.iter().map(ToString::to_string));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Parses and validates a serialised report.
pub fn validate_report_json(text: &str) -> Result<EvalReport, EvalError> {
    let report: EvalReport = serde_json::from_str(text).map_err(|e| EvalError::SchemaViolation(e.to_string()))?;
    report.validate()?;
    Ok(report)
}

/// Reads the score table written by the scoring step: `image_id`,
/// `method_id` and path columns followed by one column per metric.
pub fn read_score_table(bytes: &[u8], higher_is_better: impl Fn(&str) -> bool) -> Result<Vec<MetricTable>, EvalError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let header = reader.headers().map_err(|e| EvalError::BadHeader(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (Some(ic), Some(mc)) = (col("image_id"), col("method_id")) else {
        return Err(EvalError::BadHeader(header.iter().collect::<Vec<_>>().join(",")));
    };
    let metric_cols: Vec<(usize, String)> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| !matches!(*h, "image_id" | "method_id" | "reference_path" | "candidate_path"))
        .map(|(i, h)| (i, h.to_string()))
        .collect();
    let mut tables: Vec<MetricTable> = metric_cols
        .iter()
        .map(|(_, m)| MetricTable {
            metric: m.clone(),
            higher_is_better: higher_is_better(m),
            values: Vec::new(),
        })
        .collect();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| EvalError::MalformedRow { row: i + 1, detail: e.to_string() })?;
        for ((c, m), table) in metric_cols.iter().zip(&mut tables) {
            let raw = rec.get(*c).unwrap_or_default();
            let value: f64 = raw.parse().map_err(|_| EvalError::MalformedRow {
                row: i + 1,
                detail: format!("{m} value {raw:?}"),
            })?;
            table.values.push(MetricValue {
                image_id: rec.get(ic).unwrap_or_default().to_string(),
                method_id: rec.get(mc).unwrap_or_default().to_string(),
                value,
            });
        }
    }
    Ok(tables)
}
