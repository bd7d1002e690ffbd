//! Wall-clock latency of upscalers on identical inputs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::stats::quantile;
use super::EvalError;
use crate::image::synth;
use crate::models::Upscaler;

pub const MIN_REPETITIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyRow {
    pub method: String,
    pub median_ms: f64,
    pub iqr_ms: f64,
    pub repetitions: usize,
}

/// Times `repetitions` upscales of one seeded `channels × height × width`
/// image per method, after a discarded warm-up run.
pub fn latency_bench(
    methods: &[(String, Upscaler)],
    dims: (usize, usize, usize),
    repetitions: usize,
) -> Result<Vec<LatencyRow>, EvalError> {
    if repetitions < MIN_REPETITIONS {
        return Err(EvalError::TooFewRepetitions(repetitions));
    }
    let (c, h, w) = dims;
    let input = synth::noise(c, h, w, 0);
    methods
        .iter()
        .map(|(name, up)| {
            let run = || up.upscale(&input).map_err(|e| EvalError::ModelLoadFailure(format!("{name}: {e}")));
            run()?;
            let mut times = Vec::with_capacity(repetitions);
            for _ in 0..repetitions {
                let start = Instant::now();
                std::hint::black_box(run()?);
                times.push(start.elapsed().as_secs_f64() * 1e3);
            }
            times.sort_by(f64::total_cmp);
            Ok(LatencyRow {
                method: name.clone(),
                median_ms: quantile(&times, 0.5),
                iqr_ms: quantile(&times, 0.75) - quantile(&times, 0.25),
                repetitions,
            })
        })
        .collect()
}
