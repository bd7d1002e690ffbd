//! The batch subcommands. Each reads its inputs, validates them before doing
//! any work, and writes results to files or standard output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::info;
use survx_core::convnet::ModelBundle;
use survx_core::eval::{
    aggregate_mos, build_report, ingest_mos, latency_bench, read_score_table, LatencyRow,
};
use survx_core::image::{read_image, to_luma, write_image, ImageError, ImageTensor};
use survx_core::metrics::{fid_images, FeatureExtractor, Metric, MetricSuite};
use survx_core::models::{
    build_espcn, build_srgan_generator, extract_training_patches, train_espcn, EspcnConfig, InputMode, ModelError,
    Optimizer, TrainConfig, Upscaler, ESPCN_KERNELS,
};
use survx_core::resample::{degrade as shrink, upscale_bicubic};

use crate::{
    BenchArgs, CliError, DegradeArgs, EvaluateArgs, FidArgs, InitExtractorArgs, OptimizerArg, ScoreArgs, TrainArgs,
    UpscaleArgs, UpscaleMethod,
};

const IMAGE_EXTENSIONS: [&str; 5] = ["png", "ppm", "pgm", "pnm", "PNG"];

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::io(path, std::io::Error::from(std::io::ErrorKind::NotFound)))
    }
}

/// Expands directories into their image files, sorted by name.
pub fn collect_images(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| CliError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.extension()
                        .and_then(|x| x.to_str())
                        .is_some_and(|x| IMAGE_EXTENSIONS.contains(&x))
                })
                .collect();
            found.sort();
            out.extend(found);
        } else {
            require_file(p)?;
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn load_extractor(stem: Option<&Path>) -> Result<FeatureExtractor, CliError> {
    match stem {
        Some(s) => Ok(FeatureExtractor::load(s)?),
        None => Ok(FeatureExtractor::shipped()),
    }
}

pub fn parse_metrics(list: &str) -> Result<Vec<Metric>, CliError> {
    let metrics: Vec<Metric> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Metric>().map_err(|e| CliError::Usage(format!("{e}\n"))))
        .collect::<Result<_, _>>()?;
    if metrics.is_empty() {
        return Err(CliError::Usage("--metrics selects nothing\n".into()));
    }
    Ok(metrics)
}

pub fn degrade(a: &DegradeArgs) -> Result<(), CliError> {
    require_file(&a.input)?;
    let hr = read_image(&a.input)?;
    let lr = shrink(&hr, a.factor as usize)?;
    write_image(&a.output, &lr)?;
    info!(
        "{}x{} -> {}x{} ({})",
        hr.height(),
        hr.width(),
        lr.height(),
        lr.width(),
        a.output.display()
    );
    Ok(())
}

pub fn train(a: &TrainArgs) -> Result<(), CliError> {
    let files = collect_images(&a.hr)?;
    if files.is_empty() {
        return Err(CliError::Usage("no training images found\n".into()));
    }
    let r = a.factor as usize;
    let mut patches = Vec::new();
    for f in &files {
        let img = read_image(f)?;
        let img = match a.mode {
            InputMode::Luma => to_luma(&img),
            InputMode::Rgb if img.channels() == 3 => img,
            InputMode::Rgb => {
                return Err(ImageError::ChannelMismatch {
                    expected: 3,
                    found: img.channels(),
                }
                .into())
            }
        };
        let mut ps = extract_training_patches(&img, r, &ESPCN_KERNELS);
        if !a.no_quantize {
            for p in &mut ps {
                p.lr = p.lr.quantized();
            }
        }
        patches.extend(ps);
    }
    let cfg = TrainConfig {
        max_epochs: a.epochs,
        batch_size: a.batch,
        seed: a.seed,
        optimizer: match a.optimizer {
            OptimizerArg::Sgd => Optimizer::Sgd,
            OptimizerArg::Adam => Optimizer::adam(),
        },
        ..TrainConfig::default()
    };
    info!("training on {} patches from {} images", patches.len(), files.len());
    let outcome = train_espcn(&patches, &EspcnConfig::new(r, a.mode), &cfg)?;
    if let Some(log_path) = &a.log {
        let mut w = csv::Writer::from_path(log_path)?;
        for rec in &outcome.log {
            w.serialize(rec)?;
        }
        w.flush().map_err(|e| CliError::io(log_path, e))?;
    }
    let (initial, best, epochs) = (outcome.initial_loss, outcome.best_loss(), outcome.log.len());
    let stop = outcome.stop;
    let bundle = ModelBundle::new(outcome.spec, outcome.weights)?;
    bundle.save(&a.output)?;
    println!(
        "{}: loss {initial:.6e} -> {best:.6e} in {epochs} epochs (stopped: {stop:?})",
        bundle.spec.name
    );
    Ok(())
}

fn infer_mode(bundle: &ModelBundle) -> Result<InputMode, CliError> {
    match bundle.spec.input_channels {
        1 => Ok(InputMode::Luma),
        3 => Ok(InputMode::Rgb),
        c => Err(ModelError::WeightMismatch(format!("bundle takes {c} channels")).into()),
    }
}

pub fn upscale(a: &UpscaleArgs) -> Result<(), CliError> {
    require_file(&a.input)?;
    let r = a.factor as usize;
    let up = match a.method {
        UpscaleMethod::Bicubic => Upscaler::Bicubic { factor: r },
        UpscaleMethod::Espcn | UpscaleMethod::Bundle => {
            let Some(stem) = &a.model else {
                return Err(CliError::Usage("--model is required for network methods\n".into()));
            };
            let bundle = ModelBundle::load(stem)?;
            let mode = match a.mode {
                Some(m) => m,
                None => infer_mode(&bundle)?,
            };
            if a.method == UpscaleMethod::Espcn && !bundle.spec.name.starts_with(&format!("espcn_x{r}_")) {
                return Err(ModelError::WeightMismatch(format!(
                    "{:?} is not an x{r} ESPCN bundle",
                    bundle.spec.name
                ))
                .into());
            }
            Upscaler::Network { bundle, factor: r, mode }
        }
    };
    let lr = read_image(&a.input)?;
    let sr = match &up {
        Upscaler::Bicubic { factor } => upscale_bicubic(&lr, *factor)?,
        net => net.upscale(&lr)?,
    };
    write_image(&a.output, &sr)?;
    Ok(())
}

struct ManifestRow {
    reference: String,
    candidate: String,
    method: String,
}

fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>, CliError> {
    let bytes = read_bytes(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes.as_slice());
    let header = reader.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::BadManifest(format!("{}: missing column {name}", path.display())))
    };
    let (rc, cc, mc) = (col("reference_path")?, col("candidate_path")?, col("method_id")?);
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let get = |c: usize| rec.get(c).unwrap_or_default().to_string();
        let row = ManifestRow {
            reference: get(rc),
            candidate: get(cc),
            method: get(mc),
        };
        if row.reference.is_empty() || row.candidate.is_empty() || row.method.is_empty() {
            return Err(CliError::BadManifest(format!("{}: row {} has an empty field", path.display(), i + 1)));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// The image id of a scored pair: the reference file name without extension.
pub fn image_id(reference: &str) -> String {
    Path::new(reference)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| reference.to_string())
}

pub fn score(a: &ScoreArgs) -> Result<(), CliError> {
    let metrics = parse_metrics(&a.metrics)?;
    require_file(&a.manifest)?;
    let rows = read_manifest(&a.manifest)?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    for row in &rows {
        require_file(&resolve(base, &row.reference))?;
        require_file(&resolve(base, &row.candidate))?;
    }
    let suite = MetricSuite::new(load_extractor(a.extractor.as_deref())?);

    let sink: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| CliError::io(p, e))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["image_id", "method_id", "reference_path", "candidate_path"];
    header.extend(metrics.iter().map(|m| m.name()));
    w.write_record(&header)?;
    for row in &rows {
        let reference = read_image(&resolve(base, &row.reference))?;
        let candidate = read_image(&resolve(base, &row.candidate))?;
        let values = suite.score(&reference, &candidate, &metrics)?;
        let mut rec = vec![
            image_id(&row.reference),
            row.method.clone(),
            row.reference.clone(),
            row.candidate.clone(),
        ];
        rec.extend(values.iter().map(f64::to_string));
        w.write_record(&rec)?;
        // one row per pair on disk before the next pair starts
        w.flush().map_err(|e| CliError::io(Path::new("score output"), e))?;
    }
    Ok(())
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<ImageTensor>, CliError> {
    paths.iter().map(|p| Ok(read_image(p)?)).collect()
}

pub fn fid(a: &FidArgs) -> Result<(), CliError> {
    for d in [&a.a, &a.b] {
        if !d.is_dir() {
            return Err(CliError::Usage(format!("not a directory: {}\n", d.display())));
        }
    }
    let fx = load_extractor(a.extractor.as_deref())?;
    let set_a = read_all(&collect_images(std::slice::from_ref(&a.a))?)?;
    let set_b = read_all(&collect_images(std::slice::from_ref(&a.b))?)?;
    println!("{}", fid_images(&set_a, &set_b, &fx)?);
    Ok(())
}

fn metric_direction(name: &str) -> bool {
    match name.parse::<Metric>() {
        Ok(m) => m.higher_is_better(),
        Err(_) => {
            log::warn!("unknown metric column {name:?}, treating higher as better");
            true
        }
    }
}

pub fn evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}\n", a.alpha)));
    }
    require_file(&a.mos)?;
    require_file(&a.scores)?;
    if let Some(l) = &a.latency {
        require_file(l)?;
    }
    let records = ingest_mos(&read_bytes(&a.mos)?)?;
    let agg = aggregate_mos(&records)?;
    let tables = read_score_table(&read_bytes(&a.scores)?, metric_direction)?;
    let latency: Vec<LatencyRow> = match &a.latency {
        Some(p) => csv::Reader::from_path(p)?.deserialize().collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let report = build_report(&agg, &tables, &latency, a.alpha)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::io(&a.out_dir, e))?;
    write_bytes(&a.out_dir.join("report.json"), report.to_json().as_bytes())?;
    write_bytes(&a.out_dir.join("report.csv"), report.to_csv().as_bytes())?;
    write_bytes(&a.out_dir.join("distributions.csv"), report.distributions_csv().as_bytes())?;
    println!("MOS ranking: {}", report.mos_ranking.join(" > "));
    for v in &report.rankings {
        println!("{}: {}", v.metric, v.verdict);
    }
    Ok(())
}

pub fn bench(a: &BenchArgs) -> Result<(), CliError> {
    let r = a.factor as usize;
    let espcn = match &a.espcn {
        Some(stem) => ModelBundle::load(stem)?,
        None => {
            let spec = build_espcn(&EspcnConfig::new(r, InputMode::Luma));
            let weights = spec.init_weights(a.seed);
            ModelBundle::new(spec, weights)?
        }
    };
    let espcn_mode = infer_mode(&espcn)?;
    let srgan = build_srgan_generator(a.srgan_blocks, r, 3)?;
    let srgan_weights = srgan.init_weights(a.seed);
    let mut methods = vec![
        ("bicubic".to_string(), Upscaler::Bicubic { factor: r }),
        (
            "espcn".to_string(),
            Upscaler::Network {
                bundle: espcn,
                factor: r,
                mode: espcn_mode,
            },
        ),
        (
            format!("srgan_b{}", a.srgan_blocks),
            Upscaler::Network {
                bundle: ModelBundle::new(srgan, srgan_weights)?,
                factor: r,
                mode: InputMode::Rgb,
            },
        ),
    ];
    for spec in &a.bundles {
        let Some((name, stem)) = spec.split_once('=') else {
            return Err(CliError::Usage(format!("--bundle expects name=stem, got {spec:?}\n")));
        };
        let bundle = ModelBundle::load(Path::new(stem))?;
        let mode = infer_mode(&bundle)?;
        methods.push((name.to_string(), Upscaler::Network { bundle, factor: r, mode }));
    }
    let rows = latency_bench(&methods, (3, a.size, a.size), a.reps)?;
    let sink: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| CliError::io(p, e))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io(Path::new("bench output"), e))?;
    if let (Some(e), Some(s)) = (rows.get(1), rows.get(2)) {
        info!("{} / {} median ratio: {:.1}x", s.method, e.method, s.median_ms / e.median_ms);
    }
    Ok(())
}

pub fn init_extractor(a: &InitExtractorArgs) -> Result<(), CliError> {
    if !matches!(a.channels, 1 | 3) {
        return Err(CliError::Usage(format!("--channels must be 1 or 3, got {}\n", a.channels)));
    }
    FeatureExtractor::random(a.channels, a.seed).save(&a.output)?;
    Ok(())
}
