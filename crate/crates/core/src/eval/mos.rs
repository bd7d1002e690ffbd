//! Mean-opinion-score ingestion and aggregation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const MOS_HEADER: [&str; 4] = ["rater_id", "image_id", "method_id", "score"];
pub const MIN_SCORE: u8 = 1;
pub const MAX_SCORE: u8 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MosRecord {
    pub rater_id: String,
    pub image_id: String,
    pub method_id: String,
    pub score: u8,
}

impl MosRecord {
    pub fn new(rater: impl Into<String>, image: impl Into<String>, method: impl Into<String>, score: u8) -> Self {
        Self {
            rater_id: rater.into(),
            image_id: image.into(),
            method_id: method.into(),
            score,
        }
    }
}

/// Parses a MOS CSV. Rows are numbered from 1 after the header.
pub fn ingest_mos(bytes: &[u8]) -> Result<Vec<MosRecord>, EvalError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let header = reader.headers().map_err(|e| EvalError::BadHeader(e.to_string()))?;
    if header.iter().ne(MOS_HEADER) {
        return Err(EvalError::BadHeader(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| EvalError::MalformedRow { row: row_no, detail: e.to_string() })?;
        let field = |k: usize| row.get(k).unwrap_or_default().to_string();
        let (rater, image, method) = (field(0), field(1), field(2));
        if rater.is_empty() || image.is_empty() || method.is_empty() {
            return Err(EvalError::MalformedRow {
                row: row_no,
                detail: "empty id".into(),
            });
        }
        let score: i64 = field(3).parse().map_err(|_| EvalError::MalformedRow {
            row: row_no,
            detail: format!("score {:?} is not an integer", field(3)),
        })?;
        if !(MIN_SCORE as i64..=MAX_SCORE as i64).contains(&score) {
            return Err(EvalError::ScoreOutOfRange { row: row_no, score });
        }
        if !seen.insert((rater.clone(), image.clone(), method.clone())) {
            return Err(EvalError::DuplicateRating { row: row_no });
        }
        out.push(MosRecord::new(rater, image, method, score as u8));
    }
    Ok(out)
}

/// Serialises records with the MOS header.
pub fn write_mos_csv(records: &[MosRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(MOS_HEADER).expect("in-memory write");
    for r in records {
        let score = r.score.to_string();
        w.write_record([r.rater_id.as_str(), &r.image_id, &r.method_id, &score]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMean {
    pub mean: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MosAggregate {
    /// Keyed by `(image_id, method_id)`.
    pub cells: BTreeMap<(String, String), CellMean>,
    /// All scores given to each method, ascending.
    pub methods: BTreeMap<String, Vec<f64>>,
}

impl MosAggregate {
    pub fn method_mean(&self, method: &str) -> Option<f64> {
        self.methods.get(method).map(|s| s.iter().sum::<f64>() / s.len() as f64)
    }

    pub fn method_ids(&self) -> impl Iterator<Item = &str> {
        self.methods.keys().map(String::as_str)
    }
}

/// Means per `(image, method)` cell and pooled samples per method.
pub fn aggregate_mos(records: &[MosRecord]) -> Result<MosAggregate, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    // integer sums keep the result independent of record order
    let mut sums: BTreeMap<(String, String), (u64, usize)> = BTreeMap::new();
    let mut methods: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records {
        let e = sums.entry((r.image_id.clone(), r.method_id.clone())).or_default();
        e.0 += r.score as u64;
        e.1 += 1;
        methods.entry(r.method_id.clone()).or_default().push(r.score as f64);
    }
    for scores in methods.values_mut() {
        scores.sort_by(f64::total_cmp);
    }
    let cells = sums
        .into_iter()
        .map(|(k, (s, n))| (k, CellMean { mean: s as f64 / n as f64, n }))
        .collect();
    Ok(MosAggregate { cells, methods })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_body() {
        assert!(ingest_mos(b"").unwrap().is_empty());
    }

    #[test]
    fn round_trip() {
        let recs = vec![MosRecord::new("r1", "img", "espcn", 4), MosRecord::new("r2", "img", "espcn", 2)];
        assert_eq!(ingest_mos(write_mos_csv(&recs).as_bytes()).unwrap(), recs);
    }

    #[test]
    fn validation_errors() {
        let hdr = "rater_id,image_id,method_id,score\n";
        assert!(matches!(ingest_mos(b"a,b,c,d\n1,2,3,4\n"), Err(EvalError::BadHeader(_))));
        assert_eq!(
            ingest_mos(format!("{hdr}r,i,m,3\nr,i,m,6\n").as_bytes()).unwrap_err(),
            EvalError::ScoreOutOfRange { row: 2, score: 6 }
        );
        assert_eq!(
            ingest_mos(format!("{hdr}r,i,m,3\nr,i,m,2\n").as_bytes()).unwrap_err(),
            EvalError::DuplicateRating { row: 2 }
        );
        assert!(matches!(
            ingest_mos(format!("{hdr}r,i,m,3.5\n").as_bytes()),
            Err(EvalError::MalformedRow { row: 1, .. })
        ));
    }

    #[test]
    fn means() {
        let agg = aggregate_mos(&[MosRecord::new("a", "x", "m", 1), MosRecord::new("b", "x", "m", 5)]).unwrap();
        assert_eq!(agg.cells[&("x".into(), "m".into())], CellMean { mean: 3.0, n: 2 });
        assert_eq!(agg.method_mean("m"), Some(3.0));
        assert_eq!(aggregate_mos(&[]).unwrap_err(), EvalError::Empty);
    }
}
