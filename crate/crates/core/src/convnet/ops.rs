//! Layer kernels and their vector-Jacobian products.
//!
//! Activations are rank-3 `[C, H, W]` tensors (single image, no batch axis).

use super::{ConvnetError, Tensor};

fn shape_err(detail: impl Into<String>) -> ConvnetError {
    ConvnetError::ShapeMismatch {
        node: String::new(),
        detail: detail.into(),
    }
}

/// Bounds-checked wrapper over `matrixmultiply::dgemm`:
/// `C = alpha·A·B + beta·C` for an `m×k` A and `k×n` B with explicit strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    beta: f64,
    c: &mut [f64],
    (rsc, csc): (usize, usize),
) {
    if m == 0 || n == 0 {
        return;
    }
    let last = |rows: usize, cols: usize, rs: usize, cs: usize| (rows - 1) * rs + (cols - 1) * cs;
    if k > 0 {
        assert!(last(m, k, rsa, csa) < a.len(), "gemm: A out of bounds");
        assert!(last(k, n, rsb, csb) < b.len(), "gemm: B out of bounds");
    }
    assert!(last(m, n, rsc, csc) < c.len(), "gemm: C out of bounds");
    // SAFETY: every element addressed through the strides lies inside the
    // borrowed slices (checked above) and C is uniquely borrowed.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            rsc as isize,
            csc as isize,
        );
    }
}

#[derive(Debug, Clone, Copy)]
struct ConvGeom {
    c: usize,
    h: usize,
    w: usize,
    k: usize,
    f: usize,
    stride: usize,
    pad: usize,
    ho: usize,
    wo: usize,
}

impl ConvGeom {
    fn new(input: &Tensor, weight: &Tensor, stride: usize, pad: usize) -> Result<Self, ConvnetError> {
        let (c, h, w) = input.chw()?;
        let (k, wc, fh, fw) = match weight.dims()[..] {
            [k, c, fh, fw] => (k, c, fh, fw),
            _ => return Err(shape_err(format!("conv weight must be rank 4, got {:?}", weight.dims()))),
        };
        if wc != c || fh != fw {
            return Err(shape_err(format!(
                "conv weight {:?} incompatible with input {:?}",
                weight.dims(),
                input.dims()
            )));
        }
        if stride == 0 {
            return Err(shape_err("stride must be ≥ 1"));
        }
        let f = fh;
        if h + 2 * pad < f || w + 2 * pad < f {
            return Err(ConvnetError::EmptyOutput);
        }
        let ho = (h + 2 * pad - f) / stride + 1;
        let wo = (w + 2 * pad - f) / stride + 1;
        Ok(Self {
            c,
            h,
            w,
            k,
            f,
            stride,
            pad,
            ho,
            wo,
        })
    }

    fn patch(&self) -> usize {
        self.c * self.f * self.f
    }

    fn pixels(&self) -> usize {
        self.ho * self.wo
    }

    /// Output rows processed per im2col chunk, bounding the scratch buffer.
    fn rows_per_chunk(&self) -> usize {
        const SCRATCH: usize = 1 << 21;
        (SCRATCH / (self.patch() * self.wo).max(1)).clamp(1, self.ho)
    }

    /// Fills `cols` (`patch × rows·wo`) for output rows `y0..y0+rows`.
    fn im2col(&self, input: &[f64], y0: usize, rows: usize, cols: &mut [f64]) {
        let pc = rows * self.wo;
        for ci in 0..self.c {
            let plane = &input[ci * self.h * self.w..][..self.h * self.w];
            for i in 0..self.f {
                for j in 0..self.f {
                    let row = &mut cols[((ci * self.f + i) * self.f + j) * pc..][..pc];
                    for oy in 0..rows {
                        let sy = ((y0 + oy) * self.stride + i) as isize - self.pad as isize;
                        let dst = &mut row[oy * self.wo..][..self.wo];
                        if sy < 0 || sy >= self.h as isize {
                            dst.fill(0.0);
                            continue;
                        }
                        let src = &plane[sy as usize * self.w..][..self.w];
                        for (ox, d) in dst.iter_mut().enumerate() {
                            let sx = (ox * self.stride + j) as isize - self.pad as isize;
                            *d = if sx < 0 || sx >= self.w as isize {
                                0.0
                            } else {
                                src[sx as usize]
                            };
                        }
                    }
                }
            }
        }
    }

    fn col2im(&self, cols: &[f64], y0: usize, rows: usize, grad_in: &mut [f64]) {
        let pc = rows * self.wo;
        for ci in 0..self.c {
            let plane = &mut grad_in[ci * self.h * self.w..][..self.h * self.w];
            for i in 0..self.f {
                for j in 0..self.f {
                    let row = &cols[((ci * self.f + i) * self.f + j) * pc..][..pc];
                    for oy in 0..rows {
                        let sy = ((y0 + oy) * self.stride + i) as isize - self.pad as isize;
                        if sy < 0 || sy >= self.h as isize {
                            continue;
                        }
                        let dst = &mut plane[sy as usize * self.w..][..self.w];
                        for (ox, g) in row[oy * self.wo..][..self.wo].iter().enumerate() {
                            let sx = (ox * self.stride + j) as isize - self.pad as isize;
                            if sx >= 0 && sx < self.w as isize {
                                dst[sx as usize] += g;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// 2-D cross-correlation with zero padding.
///
/// `out[k][y][x] = bias[k] + Σ in[c][y·s−p+i][x·s−p+j] · w[k][c][i][j]`
pub fn conv2d(
    input: &Tensor,
    weight: &Tensor,
    bias: &Tensor,
    stride: usize,
    padding: usize,
) -> Result<Tensor, ConvnetError> {
    let g = ConvGeom::new(input, weight, stride, padding)?;
    if bias.len() != g.k {
        return Err(shape_err(format!("bias has {} values for {} kernels", bias.len(), g.k)));
    }
    let (patch, pixels) = (g.patch(), g.pixels());
    let mut out = vec![0.0; g.k * pixels];
    let chunk = g.rows_per_chunk();
    let mut cols = vec![0.0; patch * chunk * g.wo];
    let mut y0 = 0;
    while y0 < g.ho {
        let rows = chunk.min(g.ho - y0);
        let pc = rows * g.wo;
        g.im2col(input.values(), y0, rows, &mut cols);
        gemm(
            g.k,
            patch,
            pc,
            weight.values(),
            (patch, 1),
            &cols,
            (pc, 1),
            0.0,
            &mut out[y0 * g.wo..],
            (pixels, 1),
        );
        y0 += rows;
    }
    for (plane, b) in out.chunks_mut(pixels).zip(bias.values()) {
        for v in plane {
            *v += b;
        }
    }
    Ok(Tensor::from_parts(vec![g.k, g.ho, g.wo], out))
}

pub struct ConvGrads {
    pub input: Tensor,
    pub weight: Tensor,
    pub bias: Tensor,
}

pub fn conv2d_backward(
    input: &Tensor,
    weight: &Tensor,
    grad_out: &Tensor,
    stride: usize,
    padding: usize,
) -> Result<ConvGrads, ConvnetError> {
    let g = ConvGeom::new(input, weight, stride, padding)?;
    let (patch, pixels) = (g.patch(), g.pixels());
    if grad_out.dims() != [g.k, g.ho, g.wo] {
        return Err(shape_err(format!(
            "conv output gradient {:?}, expected {:?}",
            grad_out.dims(),
            [g.k, g.ho, g.wo]
        )));
    }
    let gout = grad_out.values();
    let mut d_weight = vec![0.0; g.k * patch];
    let mut d_input = vec![0.0; g.c * g.h * g.w];
    let chunk = g.rows_per_chunk();
    let mut cols = vec![0.0; patch * chunk * g.wo];
    let mut dcols = vec![0.0; patch * chunk * g.wo];
    let mut y0 = 0;
    while y0 < g.ho {
        let rows = chunk.min(g.ho - y0);
        let pc = rows * g.wo;
        g.im2col(input.values(), y0, rows, &mut cols);
        // dW += dOut · colsᵀ
        gemm(
            g.k,
            pc,
            patch,
            &gout[y0 * g.wo..],
            (pixels, 1),
            &cols,
            (1, pc),
            1.0,
            &mut d_weight,
            (patch, 1),
        );
        // dcols = Wᵀ · dOut
        gemm(
            patch,
            g.k,
            pc,
            weight.values(),
            (1, patch),
            &gout[y0 * g.wo..],
            (pixels, 1),
            0.0,
            &mut dcols,
            (pc, 1),
        );
        g.col2im(&dcols, y0, rows, &mut d_input);
        y0 += rows;
    }
    let d_bias = gout.chunks(pixels).map(|p| p.iter().sum()).collect();
    Ok(ConvGrads {
        input: Tensor::from_parts(input.dims().to_vec(), d_input),
        weight: Tensor::from_parts(weight.dims().to_vec(), d_weight),
        bias: Tensor::from_parts(vec![g.k], d_bias),
    })
}

/// `[C·r², H, W] → [C, rH, rW]`.
pub fn pixel_shuffle(input: &Tensor, r: usize) -> Result<Tensor, ConvnetError> {
    let (cr, h, w) = input.chw()?;
    if r == 0 || cr % (r * r) != 0 {
        return Err(ConvnetError::ChannelNotDivisible { channels: cr, factor: r });
    }
    let c = cr / (r * r);
    let (oh, ow) = (h * r, w * r);
    let src = input.values();
    let mut out = vec![0.0; src.len()];
    for ci in 0..c {
        for y in 0..oh {
            for x in 0..ow {
                let sc = ci * r * r + (y % r) * r + (x % r);
                out[(ci * oh + y) * ow + x] = src[(sc * h + y / r) * w + x / r];
            }
        }
    }
    Ok(Tensor::from_parts(vec![c, oh, ow], out))
}

/// Inverse of [`pixel_shuffle`]: `[C, rH, rW] → [C·r², H, W]`. Also the
/// shuffle's gradient.
pub fn pixel_unshuffle(input: &Tensor, r: usize) -> Result<Tensor, ConvnetError> {
    let (c, oh, ow) = input.chw()?;
    if r == 0 || oh % r != 0 || ow % r != 0 {
        return Err(shape_err(format!("{oh}x{ow} not divisible by {r}")));
    }
    let (h, w) = (oh / r, ow / r);
    let src = input.values();
    let mut out = vec![0.0; src.len()];
    for ci in 0..c {
        for y in 0..oh {
            for x in 0..ow {
                let dc = ci * r * r + (y % r) * r + (x % r);
                out[(dc * h + y / r) * w + x / r] = src[(ci * oh + y) * ow + x];
            }
        }
    }
    Ok(Tensor::from_parts(vec![c * r * r, h, w], out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    Relu,
    LeakyRelu,
    Prelu,
    Tanh,
    Sigmoid,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Per-channel slope lookup; `slope` is a single value or one per channel.
fn slope_of(kind: ActivationKind, slope: &[f64], channels: usize) -> Result<impl Fn(usize) -> f64 + '_, ConvnetError> {
    let ok = match kind {
        ActivationKind::Prelu => slope.len() == channels,
        ActivationKind::LeakyRelu => slope.len() == 1,
        _ => true,
    };
    if !ok {
        return Err(ConvnetError::SlopeShapeMismatch {
            expected: if kind == ActivationKind::Prelu { channels } else { 1 },
            found: slope.len(),
        });
    }
    Ok(move |c: usize| match slope.len() {
        0 => 0.0,
        1 => slope[0],
        _ => slope[c],
    })
}

/// Elementwise activation. `slope` holds α for leaky ReLU (one value) or the
/// per-channel PReLU coefficients; ignored by the other kinds.
pub fn apply_activation(input: &Tensor, kind: ActivationKind, slope: &[f64]) -> Result<Tensor, ConvnetError> {
    let (c, plane) = channel_layout(input);
    let a = slope_of(kind, slope, c)?;
    let mut out = input.values().to_vec();
    for (ci, chunk) in out.chunks_mut(plane).enumerate() {
        for v in chunk {
            *v = match kind {
                ActivationKind::Relu => v.max(0.0),
                ActivationKind::LeakyRelu | ActivationKind::Prelu => {
                    if *v > 0.0 {
                        *v
                    } else {
                        a(ci) * *v
                    }
                }
                ActivationKind::Tanh => v.tanh(),
                ActivationKind::Sigmoid => sigmoid(*v),
            };
        }
    }
    Ok(Tensor::from_parts(input.dims().to_vec(), out))
}

/// Returns `(grad_input, grad_slope)`; the slope gradient is per channel for
/// PReLU and empty otherwise.
#[allow(clippy::needless_range_loop)]
pub fn activation_backward(
    input: &Tensor,
    output: &Tensor,
    grad_out: &Tensor,
    kind: ActivationKind,
    slope: &[f64],
) -> Result<(Tensor, Vec<f64>), ConvnetError> {
    let (c, plane) = channel_layout(input);
    let a = slope_of(kind, slope, c)?;
    let mut gin = vec![0.0; input.len()];
    let mut gslope = if kind == ActivationKind::Prelu { vec![0.0; c] } else { Vec::new() };
    for ci in 0..c {
        let range = ci * plane..(ci + 1) * plane;
        for i in range {
            let (x, y, g) = (input.values()[i], output.values()[i], grad_out.values()[i]);
            gin[i] = match kind {
                ActivationKind::Relu => {
                    if x > 0.0 {
                        g
                    } else {
                        0.0
                    }
                }
                ActivationKind::LeakyRelu | ActivationKind::Prelu => {
                    if x > 0.0 {
                        g
                    } else {
                        if kind == ActivationKind::Prelu {
                            gslope[ci] += g * x;
                        }
                        a(ci) * g
                    }
                }
                ActivationKind::Tanh => g * (1.0 - y * y),
                ActivationKind::Sigmoid => g * y * (1.0 - y),
            };
        }
    }
    Ok((Tensor::from_parts(input.dims().to_vec(), gin), gslope))
}

fn channel_layout(t: &Tensor) -> (usize, usize) {
    match t.dims() {
        [c, rest @ ..] if !rest.is_empty() => (*c, rest.iter().product()),
        _ => (1, t.len()),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BatchNormParams<'a> {
    pub gamma: &'a [f64],
    pub beta: &'a [f64],
    pub mean: &'a [f64],
    pub var: &'a [f64],
    pub eps: f64,
}

impl BatchNormParams<'_> {
    fn check(&self, c: usize) -> Result<(), ConvnetError> {
        for (name, v) in [("gamma", self.gamma), ("beta", self.beta), ("mean", self.mean), ("var", self.var)] {
            if v.len() != c {
                return Err(shape_err(format!("batchnorm {name} has {} values for {c} channels", v.len())));
            }
        }
        Ok(())
    }

    fn inv_std(&self, c: usize) -> f64 {
        1.0 / (self.var[c] + self.eps).sqrt()
    }
}

/// Inference-mode batch normalization with stored statistics.
pub fn batchnorm_inference(input: &Tensor, p: &BatchNormParams) -> Result<Tensor, ConvnetError> {
    let (c, plane) = channel_layout(input);
    p.check(c)?;
    let mut out = input.values().to_vec();
    for (ci, chunk) in out.chunks_mut(plane).enumerate() {
        let scale = p.gamma[ci] * p.inv_std(ci);
        let shift = p.beta[ci] - p.mean[ci] * scale;
        for v in chunk {
            *v = *v * scale + shift;
        }
    }
    Ok(Tensor::from_parts(input.dims().to_vec(), out))
}

/// Returns `(grad_input, grad_gamma, grad_beta)`.
#[allow(clippy::needless_range_loop)]
pub fn batchnorm_backward(
    input: &Tensor,
    grad_out: &Tensor,
    p: &BatchNormParams,
) -> Result<(Tensor, Vec<f64>, Vec<f64>), ConvnetError> {
    let (c, plane) = channel_layout(input);
    p.check(c)?;
    let mut gin = vec![0.0; input.len()];
    let mut ggamma = vec![0.0; c];
    let mut gbeta = vec![0.0; c];
    for ci in 0..c {
        let inv = p.inv_std(ci);
        for i in ci * plane..(ci + 1) * plane {
            let g = grad_out.values()[i];
            gin[i] = g * p.gamma[ci] * inv;
            ggamma[ci] += g * (input.values()[i] - p.mean[ci]) * inv;
            gbeta[ci] += g;
        }
    }
    Ok((Tensor::from_parts(input.dims().to_vec(), gin), ggamma, gbeta))
}

/// 2×2 max pooling, stride 2, trailing odd row/column dropped. Also returns
/// the flat input index selected for each output (first maximum wins).
pub fn maxpool2(input: &Tensor) -> Result<(Tensor, Vec<usize>), ConvnetError> {
    let (c, h, w) = input.chw()?;
    let (oh, ow) = (h / 2, w / 2);
    if oh == 0 || ow == 0 {
        return Err(ConvnetError::EmptyOutput);
    }
    let src = input.values();
    let mut out = Vec::with_capacity(c * oh * ow);
    let mut arg = Vec::with_capacity(c * oh * ow);
    for ci in 0..c {
        for y in 0..oh {
            for x in 0..ow {
                let mut best = (ci * h + 2 * y) * w + 2 * x;
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let idx = (ci * h + 2 * y + dy) * w + 2 * x + dx;
                    if src[idx] > src[best] {
                        best = idx;
                    }
                }
                out.push(src[best]);
                arg.push(best);
            }
        }
    }
    Ok((Tensor::from_parts(vec![c, oh, ow], out), arg))
}

pub fn maxpool2_backward(input_dims: &[usize], argmax: &[usize], grad_out: &Tensor) -> Tensor {
    let mut gin = Tensor::zeros(input_dims);
    for (&idx, g) in argmax.iter().zip(grad_out.values()) {
        gin.values_mut()[idx] += g;
    }
    gin
}

/// Spatial mean per channel: `[C, H, W] → [C, 1, 1]`.
pub fn global_mean(input: &Tensor) -> Result<Tensor, ConvnetError> {
    let (c, h, w) = input.chw()?;
    let n = (h * w) as f64;
    let out = input.values().chunks(h * w).map(|p| p.iter().sum::<f64>() / n).collect();
    Ok(Tensor::from_parts(vec![c, 1, 1], out))
}

pub fn global_mean_backward(input_dims: &[usize], grad_out: &Tensor) -> Tensor {
    let (c, plane) = (input_dims[0], input_dims[1..].iter().product::<usize>());
    let mut out = Vec::with_capacity(c * plane);
    for g in grad_out.values() {
        out.extend(std::iter::repeat_n(g / plane as f64, plane));
    }
    Tensor::from_parts(input_dims.to_vec(), out)
}

/// Fully connected layer over the flattened input, computed as a 1×1
/// convolution of a `[N, 1, 1]` view. `weight` is `[M, N]`; output `[M, 1, 1]`.
pub fn dense(input: &Tensor, weight: &Tensor, bias: &Tensor) -> Result<Tensor, ConvnetError> {
    let (flat, kernel) = dense_views(input, weight)?;
    conv2d(&flat, &kernel, bias, 1, 0)
}

pub fn dense_backward(input: &Tensor, weight: &Tensor, grad_out: &Tensor) -> Result<ConvGrads, ConvnetError> {
    let (flat, kernel) = dense_views(input, weight)?;
    let g = conv2d_backward(&flat, &kernel, grad_out, 1, 0)?;
    Ok(ConvGrads {
        input: g.input.reshape(input.dims().to_vec())?,
        weight: g.weight.reshape(weight.dims().to_vec())?,
        bias: g.bias,
    })
}

fn dense_views(input: &Tensor, weight: &Tensor) -> Result<(Tensor, Tensor), ConvnetError> {
    let (m, n) = match weight.dims()[..] {
        [m, n] => (m, n),
        _ => return Err(shape_err(format!("dense weight must be [M,N], got {:?}", weight.dims()))),
    };
    if input.len() != n {
        return Err(shape_err(format!(
            "dense expects {n} input features, got {} ({:?})",
            input.len(),
            input.dims()
        )));
    }
    Ok((
        input.clone().reshape(vec![n, 1, 1])?,
        weight.clone().reshape(vec![m, n, 1, 1])?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(dims: &[usize], v: Vec<f64>) -> Tensor {
        Tensor::new(dims.to_vec(), v).unwrap()
    }

    #[test]
    fn one_by_one_identity_conv() {
        let x = t(&[1, 3, 4], (0..12).map(f64::from).collect());
        let w = t(&[1, 1, 1, 1], vec![1.0]);
        let out = conv2d(&x, &w, &Tensor::zeros(&[1]), 1, 0).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn box_filter_on_constant() {
        let x = Tensor::filled(&[1, 6, 6], 0.3);
        let w = Tensor::filled(&[1, 1, 3, 3], 1.0);
        let out = conv2d(&x, &w, &Tensor::zeros(&[1]), 1, 1).unwrap();
        assert_eq!(out.dims(), &[1, 6, 6]);
        for y in 1..5 {
            for xx in 1..5 {
                assert!((out.values()[y * 6 + xx] - 2.7).abs() < 1e-12);
            }
        }
        // corner sees 4 taps
        assert!((out.values()[0] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn conv_errors() {
        let x = Tensor::zeros(&[2, 3, 3]);
        assert!(matches!(
            conv2d(&x, &Tensor::zeros(&[1, 1, 3, 3]), &Tensor::zeros(&[1]), 1, 0),
            Err(ConvnetError::ShapeMismatch { .. })
        ));
        assert_eq!(
            conv2d(&x, &Tensor::zeros(&[1, 2, 5, 5]), &Tensor::zeros(&[1]), 1, 0).unwrap_err(),
            ConvnetError::EmptyOutput
        );
    }

    #[test]
    fn shuffle_small_cases() {
        let x = t(&[4, 1, 1], vec![1.0, 2.0, 3.0, 4.0]);
        let y = pixel_shuffle(&x, 2).unwrap();
        assert_eq!(y.dims(), &[1, 2, 2]);
        assert_eq!(y.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(pixel_shuffle(&x, 1).unwrap(), x);
        assert_eq!(
            pixel_shuffle(&Tensor::zeros(&[3, 2, 2]), 2).unwrap_err(),
            ConvnetError::ChannelNotDivisible { channels: 3, factor: 2 }
        );
    }

    #[test]
    fn activations() {
        let x = t(&[1, 1, 1], vec![-1.0]);
        let y = apply_activation(&x, ActivationKind::LeakyRelu, &[0.2]).unwrap();
        assert!((y.values()[0] + 0.2).abs() < 1e-15);
        let z = apply_activation(&Tensor::zeros(&[1, 1, 1]), ActivationKind::Sigmoid, &[]).unwrap();
        assert_eq!(z.values()[0], 0.5);
        let pos = t(&[2, 1, 2], vec![0.0, 1.0, 2.5, 7.0]);
        let p = apply_activation(&pos, ActivationKind::Prelu, &[0.3, -4.0]).unwrap();
        assert_eq!(p, pos);
        assert_eq!(
            apply_activation(&pos, ActivationKind::Prelu, &[0.3]).unwrap_err(),
            ConvnetError::SlopeShapeMismatch { expected: 2, found: 1 }
        );
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
    }

    #[test]
    fn pooling_and_mean() {
        let x = t(&[1, 2, 3], vec![1.0, 5.0, 9.0, 2.0, 3.0, 9.0]);
        let (p, arg) = maxpool2(&x).unwrap();
        assert_eq!(p.values(), &[5.0]);
        assert_eq!(arg, vec![1]);
        let m = global_mean(&x).unwrap();
        assert!((m.values()[0] - 29.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn dense_matches_matvec() {
        let x = t(&[2, 1, 2], vec![1.0, 2.0, 3.0, 4.0]);
        let w = t(&[2, 4], vec![1.0, 0.0, -1.0, 0.5, 0.0, 2.0, 0.0, 1.0]);
        let b = t(&[2], vec![0.5, -1.0]);
        let y = dense(&x, &w, &b).unwrap();
        assert_eq!(y.dims(), &[2, 1, 1]);
        assert_eq!(y.values(), &[1.0 - 3.0 + 2.0 + 0.5, 4.0 + 4.0 - 1.0]);
    }
}
