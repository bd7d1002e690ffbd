use std::io::Cursor;
use std::path::Path;

use super::{ImageError, ImageTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    /// Binary netpbm: P6 for colour, P5 for grayscale.
    Pnm,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self, ImageError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "png" => Ok(ImageFormat::Png),
            "ppm" | "pgm" | "pnm" => Ok(ImageFormat::Pnm),
            other => Err(ImageError::UnsupportedFormat(format!(
                "unknown extension {other:?} for {}",
                path.display()
            ))),
        }
    }
}

#[inline]
fn to_byte(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

fn interleave(img: &ImageTensor) -> Vec<u8> {
    let (c, n) = (img.channels(), img.plane_len());
    let mut out = vec![0u8; c * n];
    for ch in 0..c {
        for (i, v) in img.plane(ch).iter().enumerate() {
            out[i * c + ch] = to_byte(*v);
        }
    }
    out
}

fn deinterleave(bytes: &[u8], channels: usize, height: usize, width: usize, stride: usize) -> ImageTensor {
    let n = height * width;
    let mut samples = vec![0.0; channels * n];
    for y in 0..height {
        let row = &bytes[y * stride..];
        for x in 0..width {
            for c in 0..channels {
                samples[c * n + y * width + x] = f64::from(row[x * channels + c]) / 255.0;
            }
        }
    }
    ImageTensor::from_clamped(channels, height, width, samples)
}

/// Decodes a PNG or binary PPM/PGM file into `[0, 1]` samples (`v / 255`).
pub fn decode_image(bytes: &[u8]) -> Result<ImageTensor, ImageError> {
    if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P6") || bytes.starts_with(b"P5") {
        decode_pnm(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(ImageError::UnsupportedFormat(format!(
            "netpbm variant P{}",
            bytes[1] as char
        )))
    } else {
        Err(ImageError::MalformedFile("unrecognised magic".into()))
    }
}

/// Quantizes with `round(v·255)` and encodes. Channels must be 1 or 3.
pub fn encode_image(img: &ImageTensor, format: ImageFormat) -> Result<Vec<u8>, ImageError> {
    if !matches!(img.channels(), 1 | 3) {
        return Err(ImageError::UnsupportedChannelCount(img.channels()));
    }
    match format {
        ImageFormat::Pnm => {
            let magic = if img.channels() == 3 { "P6" } else { "P5" };
            let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
            out.extend(interleave(img));
            Ok(out)
        }
        ImageFormat::Png => {
            let mut out = Vec::new();
            {
                let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
                enc.set_color(if img.channels() == 3 {
                    png::ColorType::Rgb
                } else {
                    png::ColorType::Grayscale
                });
                enc.set_depth(png::BitDepth::Eight);
                let mut writer = enc
                    .write_header()
                    .map_err(|e| ImageError::MalformedFile(e.to_string()))?;
                writer
                    .write_image_data(&interleave(img))
                    .map_err(|e| ImageError::MalformedFile(e.to_string()))?;
            }
            Ok(out)
        }
    }
}

pub fn read_image(path: &Path) -> Result<ImageTensor, ImageError> {
    let bytes = std::fs::read(path).map_err(|e| ImageError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    decode_image(&bytes)
}

/// Writes `img` using the codec selected by the file extension.
pub fn write_image(path: &Path, img: &ImageTensor) -> Result<(), ImageError> {
    let bytes = encode_image(img, ImageFormat::from_path(path)?)?;
    std::fs::write(path, bytes).map_err(|e| ImageError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn decode_png(bytes: &[u8]) -> Result<ImageTensor, ImageError> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| ImageError::MalformedFile(e.to_string()))?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if depth != png::BitDepth::Eight {
        return Err(ImageError::UnsupportedFormat(format!("PNG bit depth {depth:?}")));
    }
    let (stored, keep) = match color {
        png::ColorType::Grayscale => (1, 1),
        png::ColorType::GrayscaleAlpha => (2, 1),
        png::ColorType::Rgb => (3, 3),
        png::ColorType::Rgba => (4, 3),
        png::ColorType::Indexed => {
            return Err(ImageError::UnsupportedFormat("palette PNG".into()))
        }
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ImageError::MalformedFile("PNG too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| ImageError::MalformedFile(e.to_string()))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let n = w * h;
    let mut samples = vec![0.0; keep * n];
    for y in 0..h {
        let row = &buf[y * frame.line_size..];
        for x in 0..w {
            for c in 0..keep {
                samples[c * n + y * w + x] = f64::from(row[x * stored + c]) / 255.0;
            }
        }
    }
    Ok(ImageTensor::from_clamped(keep, h, w, samples))
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self) -> Result<usize, ImageError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::MalformedFile("expected header number".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::MalformedFile("header number overflow".into()))
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<ImageTensor, ImageError> {
    let channels = if bytes[1] == b'6' { 3 } else { 1 };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number()?;
    let height = cur.number()?;
    let maxval = cur.number()?;
    if maxval != 255 {
        return Err(ImageError::UnsupportedFormat(format!("maxval {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedFile("zero image dimension".into()));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(ImageError::MalformedFile("missing header terminator".into())),
    }
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| ImageError::MalformedFile("dimensions overflow".into()))?;
    let data = &bytes[cur.pos..];
    if data.len() < need {
        return Err(ImageError::MalformedFile(format!(
            "truncated pixel data: {} of {need} bytes",
            data.len()
        )));
    }
    Ok(deinterleave(&data[..need], channels, height, width, width * channels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::synth;

    fn ppm(w: usize, h: usize, data: &[u8]) -> Vec<u8> {
        let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
        out.extend_from_slice(data);
        out
    }

    #[test]
    fn white_ppm_is_all_ones() {
        let img = decode_image(&ppm(2, 2, &[255; 12])).unwrap();
        assert_eq!(img.dims(), (3, 2, 2));
        assert!(img.samples().iter().all(|&s| s == 1.0));
    }

    #[test]
    fn black_pixel() {
        let img = decode_image(&ppm(1, 1, &[0, 0, 0])).unwrap();
        assert_eq!(img.samples(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P6 # comment\n1 # w\n1\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 20, 30]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.samples(), &[10.0 / 255.0, 20.0 / 255.0, 30.0 / 255.0]);
    }

    #[test]
    fn encode_quantization() {
        let img = ImageTensor::filled(3, 2, 2, 1.0);
        let bytes = encode_image(&img, ImageFormat::Pnm).unwrap();
        assert!(bytes.ends_with(&[255; 12]));
        let half = ImageTensor::filled(1, 1, 1, 0.5);
        let bytes = encode_image(&half, ImageFormat::Pnm).unwrap();
        assert_eq!(*bytes.last().unwrap(), 128);
    }

    #[test]
    fn quantization_error_bound_exhaustive() {
        // every byte value decodes to b/255 and re-encodes to itself
        let data: Vec<u8> = (0..=255u8).flat_map(|b| [b, b, b]).collect();
        let img = decode_image(&ppm(256, 1, &data)).unwrap();
        let back = encode_image(&img, ImageFormat::Pnm).unwrap();
        assert!(back.ends_with(&data));
        // arbitrary values land within half a quantization step
        let img = synth::noise(3, 17, 13, 9);
        for fmt in [ImageFormat::Pnm, ImageFormat::Png] {
            let back = decode_image(&encode_image(&img, fmt).unwrap()).unwrap();
            let worst = img
                .samples()
                .iter()
                .zip(back.samples())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1.0 / 510.0 + 1e-15, "{worst}");
        }
    }

    #[test]
    fn truncated_and_bad_magic() {
        assert!(matches!(
            decode_image(&ppm(2, 2, &[0; 5])),
            Err(ImageError::MalformedFile(_))
        ));
        assert!(matches!(decode_image(b"GIF89a"), Err(ImageError::MalformedFile(_))));
        assert!(matches!(
            decode_image(b"P3\n1 1\n255\n0 0 0"),
            Err(ImageError::UnsupportedFormat(_))
        ));
        assert!(matches!(
            decode_image(b"P6\n1 1\n65535\n\0\0\0\0\0\0"),
            Err(ImageError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn rejects_two_channel_encode() {
        let img = ImageTensor::filled(2, 2, 2, 0.1);
        assert_eq!(
            encode_image(&img, ImageFormat::Png),
            Err(ImageError::UnsupportedChannelCount(2))
        );
    }

    #[test]
    fn png_gray_and_rgb_round_trip() {
        for c in [1, 3] {
            let img = synth::natural(c, 9, 11);
            let once = decode_image(&encode_image(&img, ImageFormat::Png).unwrap()).unwrap();
            let twice = decode_image(&encode_image(&once, ImageFormat::Png).unwrap()).unwrap();
            assert_eq!(once, twice);
            assert_eq!(once.dims(), (c, 9, 11));
        }
    }

    #[test]
    fn png_16_bit_unsupported() {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, 1, 1);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Sixteen);
            enc.write_header().unwrap().write_image_data(&[0, 0]).unwrap();
        }
        assert!(matches!(decode_image(&out), Err(ImageError::UnsupportedFormat(_))));
    }
}
