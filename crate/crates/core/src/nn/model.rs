use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::entropy::EntropyCache;
use super::loss::{cross_entropy_loss, leaky_relu, leaky_relu_backward};
use super::{DenseGrads, DenseLayer, EntropyLinearLayer, Matrix, NnError, Parameterized};

pub const DEFAULT_SLOPE: f64 = 0.01;

/// One stage of the shared trunk that follows the entropy layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrunkLayer {
    Dense(DenseLayer),
    LeakyRelu,
}

/// Architecture knobs for [`EntropyModel::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyArch {
    /// First entry is the entropy layer's hidden width, the rest are dense
    /// trunk widths. A final `→ 1` dense layer is always appended.
    pub hidden: Vec<usize>,
    pub temperature: f64,
    pub slope: f64,
}

impl Default for EntropyArch {
    fn default() -> Self {
        Self {
            hidden: vec![10, 4],
            temperature: 1.0,
            slope: DEFAULT_SLOPE,
        }
    }
}

/// Entropy layer followed by a trunk shared across class channels; each
/// channel ends in a single logit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyModel {
    pub entry: EntropyLinearLayer,
    pub trunk: Vec<TrunkLayer>,
    pub slope: f64,
}

/// Loss components of a single evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub cross_entropy: f64,
    pub entropy: f64,
}

struct ChannelCache {
    /// Input to each trunk stage.
    inputs: Vec<Matrix>,
}

struct ForwardCache {
    entry: EntropyCache,
    channels: Vec<ChannelCache>,
}

impl EntropyModel {
    /// `EntropyLinear(k → h0) → [LeakyReLU → Dense]* → LeakyReLU → Dense(→ 1)`.
    pub fn new(
        n_concepts: usize,
        n_classes: usize,
        arch: &EntropyArch,
        seed: u64,
    ) -> Result<Self, NnError> {
        let Some((&first, rest)) = arch.hidden.split_first() else {
            return Err(NnError::Config("at least one hidden width is required".into()));
        };
        if arch.hidden.contains(&0) {
            return Err(NnError::Config("hidden widths must be positive".into()));
        }
        if !(arch.slope >= 0.0) {
            return Err(NnError::Config(format!("negative LeakyReLU slope {}", arch.slope)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entry = EntropyLinearLayer::new(n_concepts, first, n_classes, arch.temperature, &mut rng)?;
        let mut trunk = Vec::new();
        let mut width = first;
        for &h in rest.iter().chain(std::iter::once(&1)) {
            trunk.push(TrunkLayer::LeakyRelu);
            trunk.push(TrunkLayer::Dense(DenseLayer::random(width, h, &mut rng)));
            width = h;
        }
        Ok(Self {
            entry,
            trunk,
            slope: arch.slope,
        })
    }

    /// Assembles a model from explicit parts, validating the width chain.
    pub fn from_parts(
        entry: EntropyLinearLayer,
        trunk: Vec<TrunkLayer>,
        slope: f64,
    ) -> Result<Self, NnError> {
        let mut width = entry.hidden_units();
        for layer in &trunk {
            if let TrunkLayer::Dense(d) = layer {
                if d.inputs() != width {
                    return Err(NnError::Dimension(format!(
                        "trunk layer expects {} inputs, previous stage yields {width}",
                        d.inputs()
                    )));
                }
                width = d.outputs();
            }
        }
        if width != 1 {
            return Err(NnError::Dimension(format!(
                "trunk must end in one output per class channel, got {width}"
            )));
        }
        Ok(Self { entry, trunk, slope })
    }

    pub fn n_concepts(&self) -> usize {
        self.entry.n_concepts()
    }

    pub fn n_classes(&self) -> usize {
        self.entry.n_classes()
    }

    /// Logits, `(n × C)`.
    pub fn forward(&self, x: &Matrix) -> Result<Matrix, NnError> {
        self.forward_cached(x).map(|(logits, _)| logits)
    }

    /// Argmax class per row (lowest index on ties).
    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>, NnError> {
        let logits = self.forward(x)?;
        Ok(logits.iter_rows().map(argmax).collect())
    }

    fn forward_cached(&self, x: &Matrix) -> Result<(Matrix, ForwardCache), NnError> {
        let (outs, entry_cache) = self.entry.forward_cached(x)?;
        let n = x.rows();
        let c = self.n_classes();
        let mut logits = Matrix::zeros(n, c);
        let mut channels = Vec::with_capacity(c);
        for (class, mut h) in outs.into_iter().enumerate() {
            let mut inputs = Vec::with_capacity(self.trunk.len());
            for layer in &self.trunk {
                let next = match layer {
                    TrunkLayer::Dense(d) => d.forward(&h)?,
                    TrunkLayer::LeakyRelu => leaky_relu(&h, self.slope),
                };
                inputs.push(std::mem::replace(&mut h, next));
            }
            for r in 0..n {
                logits.set(r, class, h.get(r, 0));
            }
            channels.push(ChannelCache { inputs });
        }
        Ok((
            logits,
            ForwardCache {
                entry: entry_cache,
                channels,
            },
        ))
    }

    /// Cross-entropy plus `entropy_weight ×` attention entropy.
    pub fn loss(
        &self,
        x: &Matrix,
        labels: &[usize],
        entropy_weight: f64,
    ) -> Result<LossBreakdown, NnError> {
        let logits = self.forward(x)?;
        let (ce, _) = cross_entropy_loss(&logits, labels)?;
        let ent = self.entry.entropy();
        Ok(LossBreakdown {
            total: ce + entropy_weight * ent,
            cross_entropy: ce,
            entropy: ent,
        })
    }

    /// Loss and its exact gradient with respect to every parameter, flattened
    /// in [`Parameterized::params`] order.
    pub fn loss_and_grad(
        &self,
        x: &Matrix,
        labels: &[usize],
        entropy_weight: f64,
    ) -> Result<(LossBreakdown, Vec<f64>), NnError> {
        let (logits, cache) = self.forward_cached(x)?;
        let (ce, d_logits) = cross_entropy_loss(&logits, labels)?;
        let ent = self.entry.entropy();
        let n = x.rows();

        let mut trunk_grads: Vec<Option<DenseGrads>> = self
            .trunk
            .iter()
            .map(|l| match l {
                TrunkLayer::Dense(d) => Some(DenseGrads::zeros_like(d)),
                TrunkLayer::LeakyRelu => None,
            })
            .collect();
        let mut d_entry = Vec::with_capacity(self.n_classes());
        for (class, channel) in cache.channels.iter().enumerate() {
            let mut dy = Matrix::zeros(n, 1);
            for r in 0..n {
                dy.set(r, 0, d_logits.get(r, class));
            }
            for (idx, layer) in self.trunk.iter().enumerate().rev() {
                let input = &channel.inputs[idx];
                dy = match layer {
                    TrunkLayer::Dense(d) => {
                        let (dx, g) = d.backward(input, &dy);
                        if let Some(acc) = trunk_grads[idx].as_mut() {
                            acc.accumulate(&g);
                        }
                        dx
                    }
                    TrunkLayer::LeakyRelu => leaky_relu_backward(input, &dy, self.slope),
                };
            }
            d_entry.push(dy);
        }
        let mut entry_grads = self.entry.backward(x, &cache.entry, &d_entry);
        if entropy_weight != 0.0 {
            let eg = self.entry.entropy_grad();
            for (g, e) in entry_grads.gamma.as_mut_slice().iter_mut().zip(eg.as_slice()) {
                *g += entropy_weight * e;
            }
        }

        let mut flat = Vec::with_capacity(self.num_params());
        entry_grads.write_flat(&mut flat);
        for g in trunk_grads.iter().flatten() {
            g.write_flat(&mut flat);
        }
        Ok((
            LossBreakdown {
                total: ce + entropy_weight * ent,
                cross_entropy: ce,
                entropy: ent,
            },
            flat,
        ))
    }
}

impl Parameterized for EntropyModel {
    fn num_params(&self) -> usize {
        self.entry.num_params()
            + self
                .trunk
                .iter()
                .map(|l| match l {
                    TrunkLayer::Dense(d) => d.num_params(),
                    TrunkLayer::LeakyRelu => 0,
                })
                .sum::<usize>()
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        self.entry.write_params(&mut out);
        for l in &self.trunk {
            if let TrunkLayer::Dense(d) = l {
                d.write_params(&mut out);
            }
        }
        out
    }

    fn set_params(&mut self, src: &[f64]) {
        assert_eq!(src.len(), self.num_params(), "parameter vector length");
        let mut off = self.entry.read_params(src);
        for l in &mut self.trunk {
            if let TrunkLayer::Dense(d) = l {
                off += d.read_params(&src[off..]);
            }
        }
    }
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}
