use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Matrix, NnError};

/// Fully connected layer, `Y = X·Wᵀ + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    /// `(out × in)`.
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Gradients of a [`DenseLayer`], shaped like its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrads {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self, NnError> {
        if bias.len() != weights.rows() {
            return Err(NnError::Dimension(format!(
                "bias has {} entries but layer has {} outputs",
                bias.len(),
                weights.rows()
            )));
        }
        Ok(Self { weights, bias })
    }

    /// Uniform init in `[-1/√in, 1/√in]` for weights and bias.
    pub fn random<R: Rng>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (inputs.max(1) as f64).sqrt();
        let mut weights = Matrix::zeros(outputs, inputs);
        for w in weights.as_mut_slice() {
            *w = rng.gen_range(-bound..=bound);
        }
        let bias = (0..outputs).map(|_| rng.gen_range(-bound..=bound)).collect();
        Self { weights, bias }
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn forward(&self, x: &Matrix) -> Result<Matrix, NnError> {
        let mut y = x.matmul_transposed(&self.weights)?;
        for r in 0..y.rows() {
            for (v, b) in y.row_mut(r).iter_mut().zip(&self.bias) {
                *v += b;
            }
        }
        Ok(y)
    }

    /// Backward pass for the input `x` that produced output gradient `dy`.
    /// Returns the gradient with respect to `x` and the parameter gradients.
    pub fn backward(&self, x: &Matrix, dy: &Matrix) -> (Matrix, DenseGrads) {
        let (n, out) = dy.shape();
        let inp = self.inputs();
        debug_assert_eq!(x.shape(), (n, inp));
        let mut dw = Matrix::zeros(out, inp);
        let mut db = vec![0.0; out];
        let mut dx = Matrix::zeros(n, inp);
        for i in 0..n {
            let xi = x.row(i);
            let dyi = dy.row(i);
            for o in 0..out {
                let g = dyi[o];
                db[o] += g;
                let wrow = self.weights.row(o);
                let dwrow = dw.row_mut(o);
                for j in 0..inp {
                    dwrow[j] += g * xi[j];
                }
                let dxi = dx.row_mut(i);
                for j in 0..inp {
                    dxi[j] += g * wrow[j];
                }
            }
        }
        (dx, DenseGrads { weights: dw, bias: db })
    }

    pub(crate) fn num_params(&self) -> usize {
        self.weights.as_slice().len() + self.bias.len()
    }

    pub(crate) fn write_params(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.weights.as_slice());
        out.extend_from_slice(&self.bias);
    }

    pub(crate) fn read_params(&mut self, src: &[f64]) -> usize {
        let nw = self.weights.as_slice().len();
        self.weights.as_mut_slice().copy_from_slice(&src[..nw]);
        let nb = self.bias.len();
        self.bias.copy_from_slice(&src[nw..nw + nb]);
        nw + nb
    }
}

impl DenseGrads {
    pub fn zeros_like(layer: &DenseLayer) -> Self {
        Self {
            weights: Matrix::zeros(layer.outputs(), layer.inputs()),
            bias: vec![0.0; layer.outputs()],
        }
    }

    pub(crate) fn accumulate(&mut self, other: &DenseGrads) {
        for (a, b) in self.weights.as_mut_slice().iter_mut().zip(other.weights.as_slice()) {
            *a += b;
        }
        for (a, b) in self.bias.iter_mut().zip(&other.bias) {
            *a += b;
        }
    }

    pub(crate) fn write_flat(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.weights.as_slice());
        out.extend_from_slice(&self.bias);
    }
}
