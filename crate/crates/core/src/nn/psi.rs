//! ψ networks: sigmoid MLPs pruned so that every neuron keeps only a handful
//! of incoming connections, which keeps each neuron's truth table small.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::entropy::check_unit_interval;
use super::loss::{binary_cross_entropy_with_logits, sigmoid};
use super::model::argmax;
use super::train::check_finite;
use super::{adamw_step, AdamState, DenseLayer, Matrix, NnError, Parameterized, TrainConfig};

pub const DEFAULT_FAN_IN: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiNetwork {
    pub layers: Vec<DenseLayer>,
    pub fan_in_limit: usize,
    /// `masks[l][o * inputs + j]` is false once weight `(o, j)` of layer `l`
    /// has been pruned.
    masks: Vec<Vec<bool>>,
}

impl PsiNetwork {
    /// `k → hidden… → C`, sigmoid after every layer.
    pub fn new(
        n_concepts: usize,
        hidden: &[usize],
        n_classes: usize,
        fan_in_limit: usize,
        seed: u64,
    ) -> Result<Self, NnError> {
        if n_concepts == 0 || n_classes == 0 || hidden.contains(&0) {
            return Err(NnError::Config("layer widths must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut width = n_concepts;
        for &h in hidden.iter().chain(std::iter::once(&n_classes)) {
            layers.push(DenseLayer::random(width, h, &mut rng));
            width = h;
        }
        Self::from_layers(layers, fan_in_limit)
    }

    /// Wraps explicit layers. Weights that are exactly zero count as pruned.
    pub fn from_layers(layers: Vec<DenseLayer>, fan_in_limit: usize) -> Result<Self, NnError> {
        if layers.is_empty() {
            return Err(NnError::Config("a ψ network needs at least one layer".into()));
        }
        if fan_in_limit == 0 {
            return Err(NnError::Config("fan-in limit must be at least 1".into()));
        }
        for pair in layers.windows(2) {
            if pair[1].inputs() != pair[0].outputs() {
                return Err(NnError::Dimension(format!(
                    "layer of width {} feeds a layer expecting {} inputs",
                    pair[0].outputs(),
                    pair[1].inputs()
                )));
            }
        }
        let masks = layers
            .iter()
            .map(|l| l.weights.as_slice().iter().map(|&w| w != 0.0).collect())
            .collect();
        Ok(Self {
            layers,
            fan_in_limit,
            masks,
        })
    }

    pub fn n_concepts(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn n_classes(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs())
    }

    /// Indices of the inputs neuron `neuron` of layer `layer` still listens to.
    pub fn retained_inputs(&self, layer: usize, neuron: usize) -> Vec<usize> {
        let inputs = self.layers[layer].inputs();
        let mask = &self.masks[layer][neuron * inputs..(neuron + 1) * inputs];
        (0..inputs).filter(|&j| mask[j]).collect()
    }

    /// Largest number of nonzero incoming weights over all neurons.
    pub fn max_fan_in(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| {
                (0..l.outputs()).map(move |o| l.weights.row(o).iter().filter(|&&w| w != 0.0).count())
            })
            .max()
            .unwrap_or(0)
    }

    pub fn satisfies_fan_in(&self) -> bool {
        self.max_fan_in() <= self.fan_in_limit
    }

    /// Pre-sigmoid outputs of the last layer.
    pub fn logits(&self, x: &Matrix) -> Result<Matrix, NnError> {
        self.forward_cached(x).map(|(z, _)| z)
    }

    /// Sigmoid class scores, `(n × C)`.
    pub fn forward(&self, x: &Matrix) -> Result<Matrix, NnError> {
        Ok(self.logits(x)?.map(sigmoid))
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>, NnError> {
        Ok(self.logits(x)?.iter_rows().map(argmax).collect())
    }

    /// Propagates a boolean input, thresholding every neuron at 0.5.
    pub fn forward_boolean(&self, input: &[bool]) -> Vec<bool> {
        let mut h: Vec<bool> = input.to_vec();
        for layer in &self.layers {
            h = (0..layer.outputs())
                .map(|o| {
                    let row = layer.weights.row(o);
                    let mut z = layer.bias[o];
                    for (j, &on) in h.iter().enumerate() {
                        if on {
                            z += row[j];
                        }
                    }
                    sigmoid(z) > 0.5
                })
                .collect();
        }
        h
    }

    /// Returns the last layer's logits plus the input to every layer.
    fn forward_cached(&self, x: &Matrix) -> Result<(Matrix, Vec<Matrix>), NnError> {
        if x.cols() != self.n_concepts() {
            return Err(NnError::Dimension(format!(
                "input has {} columns, network expects {}",
                x.cols(),
                self.n_concepts()
            )));
        }
        check_unit_interval(x)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut h = x.clone();
        let last = self.layers.len() - 1;
        for (idx, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&h)?;
            inputs.push(h);
            if idx == last {
                return Ok((z, inputs));
            }
            h = z.map(sigmoid);
        }
        unreachable!("network has at least one layer")
    }

    /// Binary cross-entropy against one-hot targets and its gradient.
    pub fn loss_and_grad(&self, x: &Matrix, labels: &[usize]) -> Result<(f64, Vec<f64>), NnError> {
        let (z, inputs) = self.forward_cached(x)?;
        let (loss, mut dz) = binary_cross_entropy_with_logits(&z, labels)?;
        let mut per_layer = Vec::with_capacity(self.layers.len());
        for (idx, layer) in self.layers.iter().enumerate().rev() {
            let (dx, grads) = layer.backward(&inputs[idx], &dz);
            per_layer.push(grads);
            if idx > 0 {
                // inputs[idx] = σ(z_{idx-1}); σ' = σ(1-σ)
                dz = dx;
                for (d, &s) in dz.as_mut_slice().iter_mut().zip(inputs[idx].as_slice()) {
                    *d *= s * (1.0 - s);
                }
            }
        }
        let mut flat = Vec::with_capacity(self.num_params());
        for g in per_layer.iter().rev() {
            g.write_flat(&mut flat);
        }
        Ok((loss, flat))
    }

    /// Keeps the `fan_in` largest-magnitude incoming weights of every neuron
    /// (lowest index wins ties). Returns the flat parameter indices it zeroed.
    pub fn prune(&mut self, fan_in: usize) -> Result<Vec<usize>, NnError> {
        if fan_in == 0 {
            return Err(NnError::Config("fan-in must be at least 1".into()));
        }
        let mut zeroed = Vec::new();
        let mut offset = 0;
        for (layer, mask) in self.layers.iter_mut().zip(&mut self.masks) {
            let inputs = layer.inputs();
            if fan_in < inputs {
                for o in 0..layer.outputs() {
                    let row = layer.weights.row_mut(o);
                    let mut order: Vec<usize> = (0..inputs).collect();
                    order.sort_by(|&a, &b| row[b].abs().total_cmp(&row[a].abs()).then(a.cmp(&b)));
                    for &j in &order[fan_in..] {
                        if mask[o * inputs + j] || row[j] != 0.0 {
                            row[j] = 0.0;
                            mask[o * inputs + j] = false;
                            zeroed.push(offset + o * inputs + j);
                        }
                    }
                }
            }
            offset += layer.num_params();
        }
        self.fan_in_limit = fan_in;
        Ok(zeroed)
    }

    fn masked_param_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut offset = 0;
        for (layer, mask) in self.layers.iter().zip(&self.masks) {
            out.extend(mask.iter().enumerate().filter(|(_, &m)| !m).map(|(i, _)| offset + i));
            offset += layer.num_params();
        }
        out
    }
}

impl Parameterized for PsiNetwork {
    fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.num_params()).sum()
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            l.write_params(&mut out);
        }
        out
    }

    fn set_params(&mut self, src: &[f64]) {
        assert_eq!(src.len(), self.num_params(), "parameter vector length");
        let mut off = 0;
        for l in &mut self.layers {
            off += l.read_params(&src[off..]);
        }
    }
}

fn run_epochs(
    net: &mut PsiNetwork,
    x: &Matrix,
    labels: &[usize],
    cfg: &TrainConfig,
    state: &mut AdamState,
    epochs: usize,
    history: &mut Vec<f64>,
) -> Result<(), NnError> {
    let frozen = net.masked_param_indices();
    let mut params = net.params();
    for _ in 0..epochs {
        let (loss, mut grads) = net.loss_and_grad(x, labels)?;
        check_finite(history.len(), loss, &grads)?;
        history.push(loss);
        for &i in &frozen {
            grads[i] = 0.0;
        }
        adamw_step(&mut params, &grads, state, cfg);
        for &i in &frozen {
            params[i] = 0.0;
        }
        net.set_params(&params);
    }
    Ok(())
}

/// Plain full-batch training that still honors any existing pruning mask.
pub fn train_psi(
    net: &mut PsiNetwork,
    x: &Matrix,
    labels: &[usize],
    cfg: &TrainConfig,
) -> Result<Vec<f64>, NnError> {
    cfg.validate()?;
    let mut state = AdamState::new(net.num_params());
    let mut history = Vec::with_capacity(cfg.epochs);
    run_epochs(net, x, labels, cfg, &mut state, cfg.epochs, &mut history)?;
    Ok(history)
}

/// Trains densely for half the epochs, prunes every neuron to `fan_in`
/// inputs, then fine-tunes the survivors for the remaining epochs.
pub fn psi_train_prune(
    mut net: PsiNetwork,
    x: &Matrix,
    labels: &[usize],
    cfg: &TrainConfig,
    fan_in: usize,
) -> Result<(PsiNetwork, Vec<f64>), NnError> {
    cfg.validate()?;
    if fan_in == 0 {
        return Err(NnError::Config("fan-in must be at least 1".into()));
    }
    if x.rows() == 0 {
        return Err(NnError::Dimension("cannot train on an empty dataset".into()));
    }
    if net.layers.iter().all(|l| fan_in >= l.inputs()) {
        log::warn!("fan-in {fan_in} is at least every layer's input width; pruning is a no-op");
    }
    let dense_epochs = cfg.epochs / 2;
    let mut state = AdamState::new(net.num_params());
    let mut history = Vec::with_capacity(cfg.epochs);
    run_epochs(&mut net, x, labels, cfg, &mut state, dense_epochs, &mut history)?;
    for idx in net.prune(fan_in)? {
        state.reset_slot(idx);
    }
    run_epochs(
        &mut net,
        x,
        labels,
        cfg,
        &mut state,
        cfg.epochs - dense_epochs,
        &mut history,
    )?;
    Ok((net, history))
}
