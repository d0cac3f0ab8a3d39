//! Per-class concept-attention layer.
//!
//! Each class owns a row of relevance logits `gamma`. The softmax of that row
//! (at temperature τ) is the class's attention over concepts; dividing by the
//! row maximum gives a mask in `(0, 1]` that scales the concept activations
//! before the class's own linear map. The entropy of the attention rows is the
//! regularizer that drives the mask towards a few concepts per class.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{DenseGrads, DenseLayer, Matrix, NnError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyLinearLayer {
    n_concepts: usize,
    hidden_units: usize,
    n_classes: usize,
    temperature: f64,
    /// `(C × k)` relevance logits.
    pub gamma: Matrix,
    /// One `(h × k)` linear map per class.
    pub class_maps: Vec<DenseLayer>,
}

/// Softmax attention and its max-normalized mask, both `(C × k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Attention {
    pub alpha: Matrix,
    pub alpha_norm: Matrix,
    /// Column holding the row maximum for each class (first on ties).
    pub argmax: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyGrads {
    pub gamma: Matrix,
    pub class_maps: Vec<DenseGrads>,
}

/// Cached per-class quantities from a forward pass.
#[derive(Debug, Clone)]
pub struct EntropyCache {
    pub attention: Attention,
    pub masked: Vec<Matrix>,
}

impl EntropyLinearLayer {
    /// Random class maps, gamma at zero (uniform attention, no masking).
    pub fn new<R: Rng>(
        n_concepts: usize,
        hidden_units: usize,
        n_classes: usize,
        temperature: f64,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        if n_concepts == 0 || hidden_units == 0 || n_classes == 0 {
            return Err(NnError::Dimension(
                "entropy layer needs at least one concept, hidden unit and class".into(),
            ));
        }
        check_temperature(temperature)?;
        let class_maps = (0..n_classes)
            .map(|_| DenseLayer::random(n_concepts, hidden_units, rng))
            .collect();
        Ok(Self {
            n_concepts,
            hidden_units,
            n_classes,
            temperature,
            gamma: Matrix::zeros(n_classes, n_concepts),
            class_maps,
        })
    }

    /// Assembles a layer from explicit parameters.
    pub fn from_parts(
        gamma: Matrix,
        class_maps: Vec<DenseLayer>,
        temperature: f64,
    ) -> Result<Self, NnError> {
        check_temperature(temperature)?;
        let (n_classes, n_concepts) = gamma.shape();
        if class_maps.len() != n_classes || n_classes == 0 {
            return Err(NnError::Dimension(format!(
                "{} class maps for {n_classes} gamma rows",
                class_maps.len()
            )));
        }
        let hidden_units = class_maps[0].outputs();
        for m in &class_maps {
            if m.inputs() != n_concepts || m.outputs() != hidden_units {
                return Err(NnError::Dimension(format!(
                    "class map is {}x{}, expected {hidden_units}x{n_concepts}",
                    m.outputs(),
                    m.inputs()
                )));
            }
        }
        if !gamma.all_finite() {
            return Err(NnError::NonFinite("gamma".into()));
        }
        Ok(Self {
            n_concepts,
            hidden_units,
            n_classes,
            temperature,
            gamma,
            class_maps,
        })
    }

    pub fn n_concepts(&self) -> usize {
        self.n_concepts
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_units
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn attention(&self) -> Attention {
        let (c, k) = self.gamma.shape();
        let mut alpha = Matrix::zeros(c, k);
        let mut alpha_norm = Matrix::zeros(c, k);
        let mut argmax = Vec::with_capacity(c);
        for r in 0..c {
            let g = self.gamma.row(r);
            let m = first_argmax(g);
            let top = g[m] / self.temperature;
            let mut sum = 0.0;
            for j in 0..k {
                let e = (g[j] / self.temperature - top).exp();
                alpha_norm.set(r, j, e);
                sum += e;
            }
            // exp(0) = 1 exactly, so the argmax column of alpha_norm is exactly 1
            for j in 0..k {
                alpha.set(r, j, alpha_norm.get(r, j) / sum);
            }
            argmax.push(m);
        }
        Attention {
            alpha,
            alpha_norm,
            argmax,
        }
    }

    pub fn forward(&self, x: &Matrix) -> Result<Vec<Matrix>, NnError> {
        self.forward_cached(x).map(|(out, _)| out)
    }

    /// Forward pass returning one `(n × h)` output per class plus the cache
    /// needed by [`EntropyLinearLayer::backward`].
    pub fn forward_cached(&self, x: &Matrix) -> Result<(Vec<Matrix>, EntropyCache), NnError> {
        if x.cols() != self.n_concepts {
            return Err(NnError::Dimension(format!(
                "input has {} columns, layer expects {} concepts",
                x.cols(),
                self.n_concepts
            )));
        }
        check_unit_interval(x)?;
        let attention = self.attention();
        let mut outputs = Vec::with_capacity(self.n_classes);
        let mut masked = Vec::with_capacity(self.n_classes);
        for c in 0..self.n_classes {
            let mask = attention.alpha_norm.row(c);
            let mut xm = x.clone();
            for r in 0..xm.rows() {
                for (v, a) in xm.row_mut(r).iter_mut().zip(mask) {
                    *v *= a;
                }
            }
            outputs.push(self.class_maps[c].forward(&xm)?);
            masked.push(xm);
        }
        Ok((outputs, EntropyCache { attention, masked }))
    }

    /// Gradients from per-class output gradients `d_out[c]` (each `n × h`).
    pub fn backward(&self, x: &Matrix, cache: &EntropyCache, d_out: &[Matrix]) -> EntropyGrads {
        let k = self.n_concepts;
        let tau = self.temperature;
        let mut d_gamma = Matrix::zeros(self.n_classes, k);
        let mut class_maps = Vec::with_capacity(self.n_classes);
        for c in 0..self.n_classes {
            let (d_masked, grads) = self.class_maps[c].backward(&cache.masked[c], &d_out[c]);
            class_maps.push(grads);
            let a = cache.attention.alpha_norm.row(c);
            // d mask_j = Σ_i dX̃[i,j]·x[i,j]
            let mut d_mask = vec![0.0; k];
            for i in 0..x.rows() {
                for j in 0..k {
                    d_mask[j] += d_masked.get(i, j) * x.get(i, j);
                }
            }
            // mask_j = exp((g_j - g_m)/τ): ∂/∂g_j = mask_j/τ, ∂/∂g_m = -mask_j/τ
            let m = cache.attention.argmax[c];
            let mut total = 0.0;
            for j in 0..k {
                let g = d_mask[j] * a[j] / tau;
                d_gamma.set(c, j, g);
                total += g;
            }
            d_gamma.set(c, m, d_gamma.get(c, m) - total);
        }
        EntropyGrads {
            gamma: d_gamma,
            class_maps,
        }
    }

    /// Sum over classes of the Shannon entropy (nats) of each attention row.
    pub fn entropy(&self) -> f64 {
        let att = self.attention();
        let cap = (self.n_concepts as f64).ln();
        (0..self.n_classes)
            .map(|c| row_entropy(att.alpha.row(c)).clamp(0.0, cap))
            .sum()
    }

    /// Gradient of [`EntropyLinearLayer::entropy`] with respect to gamma.
    pub fn entropy_grad(&self) -> Matrix {
        let att = self.attention();
        let k = self.n_concepts;
        let mut grad = Matrix::zeros(self.n_classes, k);
        for c in 0..self.n_classes {
            let p = att.alpha.row(c);
            let h = row_entropy(p);
            for j in 0..k {
                let lp = if p[j] > 0.0 { p[j].ln() } else { 0.0 };
                grad.set(c, j, -p[j] * (lp + h) / self.temperature);
            }
        }
        grad
    }

    pub(crate) fn num_params(&self) -> usize {
        self.gamma.as_slice().len() + self.class_maps.iter().map(|m| m.num_params()).sum::<usize>()
    }

    pub(crate) fn write_params(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.gamma.as_slice());
        for m in &self.class_maps {
            m.write_params(out);
        }
    }

    pub(crate) fn read_params(&mut self, src: &[f64]) -> usize {
        let ng = self.gamma.as_slice().len();
        self.gamma.as_mut_slice().copy_from_slice(&src[..ng]);
        let mut off = ng;
        for m in &mut self.class_maps {
            off += m.read_params(&src[off..]);
        }
        off
    }
}

impl EntropyGrads {
    pub(crate) fn write_flat(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self.gamma.as_slice());
        for g in &self.class_maps {
            g.write_flat(out);
        }
    }
}

fn row_entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

fn first_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn check_temperature(t: f64) -> Result<(), NnError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(NnError::Config(format!("temperature must be positive, got {t}")))
    }
}

pub(crate) fn check_unit_interval(x: &Matrix) -> Result<(), NnError> {
    for r in 0..x.rows() {
        for (c, &v) in x.row(r).iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(NnError::Domain(format!(
                    "concept value {v} at row {r}, column {c} is outside [0, 1]"
                )));
            }
        }
    }
    Ok(())
}
