use super::{adamw_step, AdamState, EntropyModel, Matrix, NnError, Parameterized, TrainConfig};

/// Full-batch AdamW training. Returns the total loss recorded at the start of
/// every epoch (before that epoch's update).
pub fn train(
    model: &mut EntropyModel,
    x: &Matrix,
    labels: &[usize],
    cfg: &TrainConfig,
) -> Result<Vec<f64>, NnError> {
    cfg.validate()?;
    if x.rows() == 0 {
        return Err(NnError::Dimension("cannot train on an empty dataset".into()));
    }
    let mut state = AdamState::new(model.num_params());
    let mut params = model.params();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (loss, grads) = model.loss_and_grad(x, labels, cfg.entropy_weight)?;
        check_finite(epoch, loss.total, &grads)?;
        history.push(loss.total);
        adamw_step(&mut params, &grads, &mut state, cfg);
        model.set_params(&params);
    }
    Ok(history)
}

pub(crate) fn check_finite(epoch: usize, loss: f64, grads: &[f64]) -> Result<(), NnError> {
    if !loss.is_finite() {
        return Err(NnError::Diverged {
            epoch,
            detail: format!("loss is {loss}"),
        });
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(NnError::Diverged {
            epoch,
            detail: format!("gradient of parameter {i} is {}", grads[i]),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::EntropyArch;

    fn xor() -> (Matrix, Vec<usize>) {
        (
            Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap(),
            vec![0, 1, 1, 0],
        )
    }

    #[test]
    fn zero_epochs_is_noop() {
        let (x, y) = xor();
        let mut m = EntropyModel::new(2, 2, &EntropyArch::default(), 3).unwrap();
        let before = m.clone();
        let hist = train(&mut m, &x, &y, &TrainConfig { epochs: 0, ..Default::default() }).unwrap();
        assert!(hist.is_empty());
        assert_eq!(m, before);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let (x, y) = xor();
        let cfg = TrainConfig { epochs: 200, ..Default::default() };
        let run = || {
            let mut m = EntropyModel::new(2, 2, &EntropyArch::default(), 11).unwrap();
            let h = train(&mut m, &x, &y, &cfg).unwrap();
            (h, m.params())
        };
        let (h1, p1) = run();
        let (h2, p2) = run();
        assert_eq!(h1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                   h2.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        assert_eq!(p1, p2);
    }

    #[test]
    fn loss_decreases_on_xor() {
        let (x, y) = xor();
        let mut m = EntropyModel::new(2, 2, &EntropyArch::default(), 0).unwrap();
        let h = train(&mut m, &x, &y, &TrainConfig::default()).unwrap();
        assert_eq!(h.len(), 1001);
        assert!(h.last().unwrap() < &(h[0] * 0.5));
    }

    #[test]
    fn divergence_is_reported() {
        let (x, y) = xor();
        let mut m = EntropyModel::new(2, 2, &EntropyArch::default(), 0).unwrap();
        if let crate::nn::TrunkLayer::Dense(d) = m.trunk.last_mut().unwrap() {
            d.bias[0] = f64::NAN;
        }
        let err = train(&mut m, &x, &y, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, NnError::Diverged { epoch: 0, .. }));
    }
}
