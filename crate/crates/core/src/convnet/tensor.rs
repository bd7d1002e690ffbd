use super::ConvnetError;

/// Dense row-major tensor of rank 1–4.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self, ConvnetError> {
        if dims.is_empty() || dims.len() > 4 {
            return Err(ConvnetError::InvalidTensor(format!("rank {} not in 1..=4", dims.len())));
        }
        let n: usize = dims.iter().product();
        if n != values.len() {
            return Err(ConvnetError::InvalidTensor(format!(
                "{} values for dims {dims:?}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ConvnetError::InvalidTensor("non-finite value".into()));
        }
        Ok(Self { dims, values })
    }

    /// Caller guarantees `values.len() == product(dims)`.
    pub(crate) fn from_parts(dims: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), values.len());
        Self { dims, values }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        Self::from_parts(dims.to_vec(), vec![0.0; dims.iter().product()])
    }

    pub fn filled(dims: &[usize], value: f64) -> Self {
        Self::from_parts(dims.to_vec(), vec![value; dims.iter().product()])
    }

    pub fn scalar(value: f64) -> Self {
        Self::from_parts(vec![1], vec![value])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `(C, H, W)` view of a rank-3 tensor.
    pub fn chw(&self) -> Result<(usize, usize, usize), ConvnetError> {
        match self.dims[..] {
            [c, h, w] => Ok((c, h, w)),
            _ => Err(ConvnetError::ShapeMismatch {
                node: String::new(),
                detail: format!("expected rank-3 [C,H,W], got {:?}", self.dims),
            }),
        }
    }

    pub fn reshape(mut self, dims: Vec<usize>) -> Result<Self, ConvnetError> {
        if dims.iter().product::<usize>() != self.values.len() {
            return Err(ConvnetError::InvalidTensor(format!(
                "cannot reshape {:?} to {dims:?}",
                self.dims
            )));
        }
        self.dims = dims;
        Ok(self)
    }

    pub fn scale(&self, k: f64) -> Tensor {
        Self::from_parts(self.dims.clone(), self.values.iter().map(|v| v * k).collect())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, ConvnetError> {
        if self.dims != other.dims {
            return Err(ConvnetError::ShapeMismatch {
                node: String::new(),
                detail: format!("add {:?} + {:?}", self.dims, other.dims),
            });
        }
        Ok(Self::from_parts(
            self.dims.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        ))
    }

    pub(crate) fn add_assign(&mut self, other: &Tensor) {
        debug_assert_eq!(self.dims, other.dims);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    /// Rounds every value to the nearest `f32`, the precision of the weight file.
    pub fn round_to_f32(&mut self) {
        for v in &mut self.values {
            *v = f64::from(*v as f32);
        }
    }
}
