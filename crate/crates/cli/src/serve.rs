//! HTTP service collecting MOS ratings.
//!
//! Ratings are appended to `ratings.jsonl` and synced to disk before the
//! request is acknowledged, so a 201 always means the rating survives a
//! crash. All appends go through one mutex-guarded writer.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use survx_core::eval::{write_mos_csv, MosRecord};
use tower_http::services::ServeDir;

use crate::{CliError, ServeArgs};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const RATINGS_FILE: &str = "ratings.jsonl";

/// Labels of the five-point absolute category rating scale.
pub const SCALE_LABELS: [&str; 5] = ["Bad", "Poor", "Fair", "Good", "Excellent"];

/// One rateable frame: an image as produced by one method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionItem {
    pub id: String,
    pub image_id: String,
    pub method_id: String,
}

#[derive(Debug, Clone)]
struct ManifestEntry {
    item: SessionItem,
    path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleLabel {
    pub score: u8,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub rater_id: String,
    pub images: Vec<SessionItem>,
    pub scale: Vec<ScaleLabel>,
}

/// Body of `POST /api/rating`. The score is read as a wide integer so that
/// out-of-range values get a 400 with a clear message.
#[derive(Debug, Clone, Deserialize)]
pub struct RatingRequest {
    pub rater_id: String,
    pub image_id: String,
    pub method_id: String,
    pub score: i64,
}

struct Ratings {
    records: Vec<MosRecord>,
    seen: HashSet<(String, String, String)>,
    log: File,
    log_path: PathBuf,
}

pub struct MosServer {
    entries: Vec<ManifestEntry>,
    seed: u64,
    ratings: Mutex<Ratings>,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

fn key(r: &MosRecord) -> (String, String, String) {
    (r.rater_id.clone(), r.image_id.clone(), r.method_id.clone())
}

fn read_manifest(dir: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let path = dir.join(MANIFEST_FILE);
    let bytes = fs::read(&path).map_err(|e| CliError::BadManifest(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes.as_slice());
    let bad = |m: String| CliError::BadManifest(format!("{}: {m}", path.display()));
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| bad(format!("missing column {name}")));
    let (ic, mc, pc) = (col("image_id")?, col("method_id")?, col("path")?);
    let mut entries = Vec::new();
    let mut pairs = HashSet::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let get = |c: usize| rec.get(c).unwrap_or_default().to_string();
        let (image_id, method_id, rel) = (get(ic), get(mc), get(pc));
        if image_id.is_empty() || method_id.is_empty() || rel.is_empty() {
            return Err(bad(format!("row {} has an empty field", i + 1)));
        }
        if !pairs.insert((image_id.clone(), method_id.clone())) {
            return Err(bad(format!("row {}: ({image_id}, {method_id}) listed twice", i + 1)));
        }
        let file = dir.join(&rel);
        if !file.is_file() {
            return Err(bad(format!("row {}: no such image {rel}", i + 1)));
        }
        entries.push(ManifestEntry {
            item: SessionItem {
                id: entries.len().to_string(),
                image_id,
                method_id,
            },
            path: file,
        });
    }
    Ok(entries)
}

/// Replays the ratings log. A final line without its newline is the trace
/// of an interrupted append that was never acknowledged, so it is dropped.
fn replay(path: &Path) -> Result<Vec<MosRecord>, CliError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CliError::io(path, e)),
    };
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    if complete.len() < text.len() {
        log::warn!("dropping unterminated last line of {}", path.display());
    }
    complete
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CliError::CorruptRatings(format!("line {}: {e}", i + 1))))
        .collect()
}

impl MosServer {
    /// Loads the manifest and any earlier ratings from `data_dir`.
    pub fn open(data_dir: &Path, seed: u64) -> Result<Self, CliError> {
        let entries = read_manifest(data_dir)?;
        let log_path = data_dir.join(RATINGS_FILE);
        let records = replay(&log_path)?;
        let seen = records.iter().map(key).collect();
        let bytes = records
            .iter()
            .map(|r| serde_json::to_string(r).expect("plain struct") + "\n")
            .collect::<String>();
        // rewrite without any torn tail so new lines start on a boundary
        fs::write(&log_path, bytes).map_err(|e| CliError::io(&log_path, e))?;
        let log = OpenOptions::new()
            .append(true)
            .open(&log_path)
            .map_err(|e| CliError::io(&log_path, e))?;
        Ok(Self {
            entries,
            seed,
            ratings: Mutex::new(Ratings {
                records,
                seen,
                log,
                log_path,
            }),
        })
    }

    /// The rater's image order: a shuffle seeded by the server seed and the
    /// rater id, so a reload returns the same queue.
    pub fn session(&self, rater_id: &str) -> Session {
        let seed = self.seed ^ fnv1a(rater_id);
        let mut images: Vec<SessionItem> = self.entries.iter().map(|e| e.item.clone()).collect();
        images.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Session {
            session_id: format!("{seed:016x}"),
            rater_id: rater_id.to_string(),
            images,
            scale: SCALE_LABELS
                .iter()
                .zip(1u8..)
                .map(|(l, s)| ScaleLabel {
                    score: s,
                    label: l.to_string(),
                })
                .collect(),
        }
    }

    pub fn records(&self) -> Vec<MosRecord> {
        self.ratings.lock().expect("ratings lock").records.clone()
    }

    pub fn export_csv(&self) -> String {
        write_mos_csv(&self.ratings.lock().expect("ratings lock").records)
    }

    /// Validates and durably stores one rating.
    pub fn submit(&self, req: RatingRequest) -> Result<MosRecord, RatingError> {
        if req.rater_id.trim().is_empty() {
            return Err(RatingError::Invalid("rater_id is empty".into()));
        }
        if !(1..=5).contains(&req.score) {
            return Err(RatingError::Invalid(format!("score {} outside 1..=5", req.score)));
        }
        if !self
            .entries
            .iter()
            .any(|e| e.item.image_id == req.image_id && e.item.method_id == req.method_id)
        {
            return Err(RatingError::Invalid(format!(
                "({}, {}) is not in the manifest",
                req.image_id, req.method_id
            )));
        }
        let rec = MosRecord::new(req.rater_id, req.image_id, req.method_id, req.score as u8);
        let mut st = self.ratings.lock().expect("ratings lock");
        if st.seen.contains(&key(&rec)) {
            return Err(RatingError::Duplicate);
        }
        let line = serde_json::to_string(&rec).expect("plain struct") + "\n";
        let path = st.log_path.clone();
        st.log
            .write_all(line.as_bytes())
            .and_then(|()| st.log.sync_data())
            .map_err(|e| RatingError::Storage(format!("{}: {e}", path.display())))?;
        st.seen.insert(key(&rec));
        st.records.push(rec.clone());
        Ok(rec)
    }
}

#[derive(Debug)]
pub enum RatingError {
    Invalid(String),
    Duplicate,
    Storage(String),
}

impl IntoResponse for RatingError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            RatingError::Invalid(m) => (StatusCode::BAD_REQUEST, m),
            RatingError::Duplicate => (StatusCode::CONFLICT, "this rater already rated that image".into()),
            RatingError::Storage(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(serde_json::json!({ "error": msg }))).into_response()
    }
}

#[derive(Deserialize)]
struct SessionQuery {
    rater_id: Option<String>,
}

async fn get_session(State(s): State<Arc<MosServer>>, Query(q): Query<SessionQuery>) -> Response {
    match q.rater_id.filter(|r| !r.trim().is_empty()) {
        Some(r) => Json(s.session(&r)).into_response(),
        None => RatingError::Invalid("rater_id query parameter is required".into()).into_response(),
    }
}

async fn get_image(State(s): State<Arc<MosServer>>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(entry) = s.entries.iter().find(|e| e.item.id == id) else {
        return (StatusCode::NOT_FOUND, "unknown image id").into_response();
    };
    let mime = match entry.path.extension().and_then(|x| x.to_str()) {
        Some("png" | "PNG") => "image/png",
        Some("pgm") => "image/x-portable-graymap",
        _ => "image/x-portable-pixmap",
    };
    match tokio::fs::read(&entry.path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, mime)], bytes).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn post_rating(State(s): State<Arc<MosServer>>, body: Result<Json<RatingRequest>, JsonRejection>) -> Response {
    let Json(req) = match body {
        Ok(b) => b,
        Err(e) => return RatingError::Invalid(e.body_text()).into_response(),
    };
    let server = Arc::clone(&s);
    // the fsync blocks, so keep it off the async workers
    match tokio::task::spawn_blocking(move || server.submit(req)).await {
        Ok(Ok(rec)) => (StatusCode::CREATED, Json(rec)).into_response(),
        Ok(Err(e)) => e.into_response(),
        Err(e) => RatingError::Storage(e.to_string()).into_response(),
    }
}

async fn export(State(s): State<Arc<MosServer>>) -> Response {
    ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], s.export_csv()).into_response()
}

pub fn router(server: Arc<MosServer>, ui_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/session", get(get_session))
        .route("/api/image/{id}", get(get_image))
        .route("/api/rating", post(post_rating))
        .route("/api/export", get(export))
        .with_state(server);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(args: &ServeArgs) -> Result<(), CliError> {
    let server = Arc::new(MosServer::open(&args.data_dir, args.seed)?);
    let listener = match tokio::net::TcpListener::bind(("0.0.0.0", args.port)).await {
        Ok(l) => l,
        Err(e) if e.kind() == std::io::ErrorKind::AddrInUse => return Err(CliError::PortInUse(args.port)),
        Err(e) => return Err(CliError::io(Path::new(&format!("port {}", args.port)), e)),
    };
    log::info!(
        "serving {} items from {} on port {}",
        server.entries.len(),
        args.data_dir.display(),
        args.port
    );
    axum::serve(listener, router(server, args.ui_dir.as_deref()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| CliError::io(Path::new("http server"), e))
}

pub fn serve_blocking(args: &ServeArgs) -> Result<(), CliError> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::io(Path::new("tokio runtime"), e))?;
    rt.block_on(serve(args))
}
