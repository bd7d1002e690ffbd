//! Gaussian fits of feature populations and the Fréchet distance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::MetricError;

const SYMMETRY_TOL: f64 = 1e-8;
const NEGATIVE_EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub n: usize,
}

impl GaussianStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Sample mean and unbiased covariance, symmetrised.
pub fn gaussian_stats(features: &[Vec<f64>]) -> Result<GaussianStats, MetricError> {
    let n = features.len();
    if n < 2 {
        return Err(MetricError::TooFewSamples(n));
    }
    let d = features[0].len();
    if features.iter().any(|f| f.len() != d) {
        return Err(MetricError::DimMismatch("feature vectors of unequal length".into()));
    }
    let mut mean = DVector::zeros(d);
    for f in features {
        mean += DVector::from_column_slice(f);
    }
    mean /= n as f64;
    let mut cov = DMatrix::zeros(d, d);
    for f in features {
        let c = DVector::from_column_slice(f) - &mean;
        cov += &c * c.transpose();
    }
    cov /= (n - 1) as f64;
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianStats { mean, cov, n })
}

/// Principal square root of a symmetric PSD matrix. Slightly negative
/// eigenvalues (relative to the matrix scale) are clipped to zero.
pub fn sqrtm_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>, MetricError> {
    if !m.is_square() {
        return Err(MetricError::NotSymmetric(f64::INFINITY));
    }
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(MetricError::NotSymmetric(asym));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut roots = eig.eigenvalues.clone();
    for v in roots.iter_mut() {
        if *v < -NEGATIVE_EIGEN_TOL * scale {
            return Err(MetricError::SignificantlyNegativeEigenvalue(*v));
        }
        *v = v.max(0.0).sqrt();
    }
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

/// `‖µa − µb‖² + Tr(Σa + Σb − 2 (Σa^½ Σb Σa^½)^½)`, clamped at zero.
pub fn fid(a: &GaussianStats, b: &GaussianStats) -> Result<f64, MetricError> {
    if a.dim() != b.dim() {
        return Err(MetricError::DimMismatch(format!("{}-d vs {}-d statistics", a.dim(), b.dim())));
    }
    let mean_term = (&a.mean - &b.mean).norm_squared();
    let ra = sqrtm_psd(&a.cov)?;
    let inner = &ra * &b.cov * &ra;
    let inner = (&inner + inner.transpose()) * 0.5;
    let cross = sqrtm_psd(&inner)?.trace();
    let d = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross;
    Ok(d.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_two_points() {
        let s = gaussian_stats(&[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(s.mean[0], 1.0);
        assert_eq!(s.cov[(0, 0)], 2.0);
        let s = gaussian_stats(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert!(s.cov.iter().all(|&v| v == 0.0));
        assert_eq!(gaussian_stats(&[vec![1.0]]).unwrap_err(), MetricError::TooFewSamples(1));
    }

    #[test]
    fn sqrtm_diagonal() {
        let r = sqrtm_psd(&DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 9.0]))).unwrap();
        assert!((r - DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]))).amax() < 1e-12);
        let i = DMatrix::<f64>::identity(3, 3);
        assert!((sqrtm_psd(&i).unwrap() - &i).amax() < 1e-12);
    }

    #[test]
    fn sqrtm_errors() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(sqrtm_psd(&m), Err(MetricError::NotSymmetric(_))));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(sqrtm_psd(&m), Err(MetricError::SignificantlyNegativeEigenvalue(_))));
    }

    #[test]
    fn one_dimensional_closed_form() {
        let g = |m: f64, s: f64| GaussianStats {
            mean: DVector::from_vec(vec![m]),
            cov: DMatrix::from_element(1, 1, s * s),
            n: 10,
        };
        let d = fid(&g(0.5, 2.0), &g(-1.0, 0.5)).unwrap();
        assert!((d - (1.5f64.powi(2) + 1.5f64.powi(2))).abs() < 1e-9);
        assert!(fid(&g(3.0, 1.5), &g(3.0, 1.5)).unwrap().abs() < 1e-9);
    }
}
