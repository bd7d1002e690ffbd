//! Independent scalar reference implementations used as test oracles.
//! Each one follows the textbook definition directly and shares no code
//! with the library.

#![allow(dead_code, clippy::needless_range_loop)]

pub mod gradcheck;
pub mod stats_cases;
pub mod tiling;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Direct cross-correlation with zero padding.
#[allow(clippy::too_many_arguments)]
pub fn conv_oracle(
    input: &[f64],
    (c, h, w): (usize, usize, usize),
    weight: &[f64],
    (k, f): (usize, usize),
    bias: &[f64],
    stride: usize,
    pad: usize,
) -> (Vec<f64>, usize, usize) {
    let oh = (h + 2 * pad - f) / stride + 1;
    let ow = (w + 2 * pad - f) / stride + 1;
    let mut out = vec![0.0; k * oh * ow];
    for ko in 0..k {
        for y in 0..oh {
            for x in 0..ow {
                let mut acc = bias[ko];
                for ci in 0..c {
                    for i in 0..f {
                        for j in 0..f {
                            let sy = (y * stride + i) as isize - pad as isize;
                            let sx = (x * stride + j) as isize - pad as isize;
                            if sy < 0 || sx < 0 || sy >= h as isize || sx >= w as isize {
                                continue;
                            }
                            acc += input[(ci * h + sy as usize) * w + sx as usize] * weight[((ko * c + ci) * f + i) * f + j];
                        }
                    }
                }
                out[(ko * oh + y) * ow + x] = acc;
            }
        }
    }
    (out, oh, ow)
}

fn keys(t: f64) -> f64 {
    // a = -0.5
    let t = t.abs();
    if t <= 1.0 {
        1.5 * t * t * t - 2.5 * t * t + 1.0
    } else if t < 2.0 {
        -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0
    } else {
        0.0
    }
}

/// Antialiased bicubic resize of one plane evaluated as a 2-D weighted sum
/// per output pixel.
pub fn resize_oracle(plane: &[f64], h: usize, w: usize, oh: usize, ow: usize) -> Vec<f64> {
    let axis = |n_in: usize, n_out: usize, i: usize| -> Vec<(usize, f64)> {
        let s = n_out as f64 / n_in as f64;
        let stretch = s.min(1.0);
        let centre = (i as f64 + 0.5) / s - 0.5;
        let reach = (2.0 / stretch).ceil() as isize + 1;
        let base = centre.floor() as isize;
        ((base - reach)..=(base + reach))
            .map(|j| (j.clamp(0, n_in as isize - 1) as usize, keys(stretch * (centre - j as f64))))
            .collect()
    };
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        let wy = axis(h, oh, y);
        for x in 0..ow {
            let wx = axis(w, ow, x);
            let (mut num, mut den) = (0.0, 0.0);
            for &(sy, ky) in &wy {
                for &(sx, kx) in &wx {
                    num += ky * kx * plane[sy * w + sx];
                    den += ky * kx;
                }
            }
            out[y * ow + x] = (num / den).clamp(0.0, 1.0);
        }
    }
    out
}

/// SSIM with an explicit 11×11 Gaussian window and two-pass local moments.
pub fn ssim_oracle(x: &[f64], y: &[f64], h: usize, w: usize) -> f64 {
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let mut g = [[0.0; 11]; 11];
    let mut total = 0.0;
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            total += *v;
        }
    }
    let mut sum = 0.0;
    let mut count = 0;
    for y0 in 0..=h - 11 {
        for x0 in 0..=w - 11 {
            let at = |img: &[f64], i: usize, j: usize| img[(y0 + i) * w + x0 + j];
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    mx += g[i][j] / total * at(x, i, j);
                    my += g[i][j] / total * at(y, i, j);
                }
            }
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let (dx, dy) = (at(x, i, j) - mx, at(y, i, j) - my);
                    let wgt = g[i][j] / total;
                    vx += wgt * dx * dx;
                    vy += wgt * dy * dy;
                    cxy += wgt * dx * dy;
                }
            }
            sum += (2.0 * mx * my + c1) * (2.0 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    sum / count as f64
}

/// DISTS similarity over a list of `(channels, plane_len, a, b)` maps with
/// uniform weights.
pub fn dists_oracle(maps: &[(usize, usize, &[f64], &[f64])]) -> f64 {
    let total_maps: usize = maps.iter().map(|m| m.0).sum();
    let weight = 1.0 / (2.0 * total_maps as f64);
    let mut sim = 0.0;
    for &(c, n, a, b) in maps {
        for k in 0..c {
            let xa = &a[k * n..(k + 1) * n];
            let xb = &b[k * n..(k + 1) * n];
            let ma = xa.iter().sum::<f64>() / n as f64;
            let mb = xb.iter().sum::<f64>() / n as f64;
            let mut va = 0.0;
            let mut vb = 0.0;
            let mut cab = 0.0;
            for i in 0..n {
                va += (xa[i] - ma).powi(2) / n as f64;
                vb += (xb[i] - mb).powi(2) / n as f64;
                cab += (xa[i] - ma) * (xb[i] - mb) / n as f64;
            }
            let l = (2.0 * ma * mb + 1e-6) / (ma * ma + mb * mb + 1e-6);
            let s = (2.0 * cab + 1e-6) / (va + vb + 1e-6);
            sim += weight * (l + s);
        }
    }
    sim
}

pub type Mat = Vec<Vec<f64>>;

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix. Returns the
/// eigenvalues and the eigenvectors as columns.
pub fn jacobi_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.len();
    let mut a = m.clone();
    let mut v: Mat = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

pub fn sqrtm_oracle(m: &Mat) -> Mat {
    let n = m.len();
    let (vals, vecs) = jacobi_eigen(m);
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| vecs[i][k] * vals[k].max(0.0).sqrt() * vecs[j][k]).sum()).collect())
        .collect()
}

/// Fréchet distance via the Jacobi solver.
pub fn fid_oracle(mu_a: &[f64], cov_a: &Mat, mu_b: &[f64], cov_b: &Mat) -> f64 {
    let n = mu_a.len();
    let mean: f64 = (0..n).map(|i| (mu_a[i] - mu_b[i]).powi(2)).sum();
    let ra = sqrtm_oracle(cov_a);
    let inner = matmul(&matmul(&ra, cov_b), &ra);
    let sym: Mat = (0..n).map(|i| (0..n).map(|j| 0.5 * (inner[i][j] + inner[j][i])).collect()).collect();
    let (vals, _) = jacobi_eigen(&sym);
    let cross: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    let tr = |m: &Mat| (0..n).map(|i| m[i][i]).sum::<f64>();
    (mean + tr(cov_a) + tr(cov_b) - 2.0 * cross).max(0.0)
}

/// Random symmetric positive semi-definite `B·Bᵀ`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let b: Mat = (0..n).map(|_| uniform_vec(rng, n, -1.0, 1.0)).collect();
    let bt: Mat = (0..n).map(|i| (0..n).map(|j| b[j][i]).collect()).collect();
    matmul(&b, &bt)
}

/// Average ranks with ties, computed by counting.
pub fn rank_by_counting(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
