//! Algebraic properties checked over generated inputs.

use proptest::prelude::*;
use survx_core::convnet::{conv2d, pixel_shuffle, pixel_unshuffle, Tensor, WeightStore};
use survx_core::eval::{aggregate_mos, build_report, correlate, MetricTable, MetricValue, MosRecord, DEFAULT_ALPHA};
use survx_core::image::{decode_image, encode_image, synth, ImageFormat, ImageTensor};
use survx_core::metrics::{dists_score, ssim, DistsWeights, FeatureExtractor, SsimParams};

fn tensor(dims: Vec<usize>) -> impl Strategy<Value = Tensor> {
    let n: usize = dims.iter().product();
    prop::collection::vec(-1.0f64..1.0, n).prop_map(move |v| Tensor::new(dims.clone(), v).unwrap())
}

fn image(c: usize, h: usize, w: usize) -> impl Strategy<Value = ImageTensor> {
    prop::collection::vec(0.0f64..=1.0, c * h * w).prop_map(move |v| ImageTensor::new(c, h, w, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conv_is_linear(x in tensor(vec![2, 6, 5]), w in tensor(vec![3, 2, 3, 3]), a in -3.0f64..3.0) {
        let zero = Tensor::zeros(&[3]);
        let lhs = conv2d(&x.scale(a), &w, &zero, 1, 1).unwrap();
        let rhs = conv2d(&x, &w, &zero, 1, 1).unwrap().scale(a);
        for (l, r) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((l - r).abs() < 1e-9);
        }
    }

    #[test]
    fn shuffle_is_a_permutation(x in tensor(vec![8, 3, 4])) {
        let y = pixel_shuffle(&x, 2).unwrap();
        let energy = |t: &Tensor| t.values().iter().map(|v| v * v).sum::<f64>();
        let mut a = x.values().to_vec();
        let mut b = y.values().to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a, b);
        prop_assert!((energy(&x) - energy(&y)).abs() <= 1e-12 * energy(&x).max(1.0));
        prop_assert_eq!(pixel_unshuffle(&y, 2).unwrap(), x);
    }

    #[test]
    fn codec_fixpoint(img in image(3, 4, 5)) {
        for fmt in [ImageFormat::Png, ImageFormat::Pnm] {
            let once = decode_image(&encode_image(&img, fmt).unwrap()).unwrap();
            let twice = decode_image(&encode_image(&once, fmt).unwrap()).unwrap();
            prop_assert_eq!(&once, &twice);
            for (a, b) in once.samples().iter().zip(img.samples()) {
                prop_assert!((a - b).abs() <= 1.0 / 510.0 + 1e-12);
            }
        }
    }

    #[test]
    fn ssim_symmetric_and_bounded(x in image(1, 12, 13), y in image(1, 12, 13)) {
        let p = SsimParams::default();
        let (a, b) = (ssim(&x, &y, &p).unwrap().score, ssim(&y, &x, &p).unwrap().score);
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!((-1.0..=1.0 + 1e-12).contains(&a));
        prop_assert!((ssim(&x, &x, &p).unwrap().score - 1.0).abs() < 1e-9);
    }

    #[test]
    fn correlation_bounds(x in prop::collection::vec(-5.0f64..5.0, 3..20), k in 0.1f64..10.0) {
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * v - i as f64).collect();
        if let Ok(c) = correlate(&x, &y) {
            prop_assert!((-1.0..=1.0).contains(&c.pearson));
            prop_assert!((-1.0..=1.0).contains(&c.spearman));
            let scaled: Vec<f64> = x.iter().map(|v| v * k).collect();
            prop_assert_eq!(correlate(&scaled, &y).unwrap().spearman, c.spearman);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dists_symmetric(sx in 0u64..1000, sy in 0u64..1000) {
        let fx = FeatureExtractor::shipped();
        let w = DistsWeights::for_extractor(&fx);
        let (x, y) = (synth::noise(3, 16, 16, sx), synth::noise(3, 16, 16, sy));
        let (a, b) = (dists_score(&x, &y, &fx, &w).unwrap(), dists_score(&y, &x, &fx, &w).unwrap());
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn aggregation_ignores_record_order(seed in 0u64..1000, rot in 0usize..225) {
        let mut recs: Vec<MosRecord> = (0..225)
            .map(|i| MosRecord::new(format!("r{}", i % 15), format!("i{}", i / 15 % 5), ["a", "b", "c"][i / 75], ((i as u64 * 7 + seed) % 5 + 1) as u8))
            .collect();
        let before = aggregate_mos(&recs).unwrap();
        recs.rotate_left(rot);
        recs.reverse();
        prop_assert_eq!(aggregate_mos(&recs).unwrap(), before);
    }

    #[test]
    fn ranking_invariant_to_positive_scaling(k in 0.01f64..100.0) {
        let mut recs = Vec::new();
        for (m, base) in [("a", 1u8), ("b", 3), ("c", 4)] {
            for i in 0..4 {
                for r in 0..3 {
                    recs.push(MosRecord::new(format!("r{r}"), format!("i{i}"), m, base + ((i + r) % 2) as u8));
                }
            }
        }
        let agg = aggregate_mos(&recs).unwrap();
        let table = |scale: f64| MetricTable {
            metric: "ssim".into(),
            higher_is_better: true,
            values: agg.cells.iter().map(|((i, m), c)| MetricValue {
                image_id: i.clone(),
                method_id: m.clone(),
                value: scale * (c.mean + i.len() as f64 * 0.1 + if m == "b" { 0.7 } else { 0.0 }),
            }).collect(),
        };
        let base = build_report(&agg, &[table(1.0)], &[], DEFAULT_ALPHA).unwrap();
        let scaled = build_report(&agg, &[table(k)], &[], DEFAULT_ALPHA).unwrap();
        prop_assert_eq!(&base.rankings[0].ranking, &scaled.rankings[0].ranking);
        prop_assert_eq!(base.correlations[0].correlation.unwrap().spearman, scaled.correlations[0].correlation.unwrap().spearman);
    }
}

#[test]
fn weight_store_empty_file() {
    let bytes = WeightStore::new().to_bytes();
    assert_eq!(WeightStore::from_bytes(&bytes).unwrap().len(), 0);
}
