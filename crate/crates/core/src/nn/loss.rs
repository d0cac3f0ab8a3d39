use super::{Matrix, NnError};

/// Elementwise `max(x, slope·x)`.
pub fn leaky_relu(x: &Matrix, slope: f64) -> Matrix {
    x.map(|v| if v >= 0.0 { v } else { slope * v })
}

pub(crate) fn leaky_relu_backward(pre: &Matrix, dy: &Matrix, slope: f64) -> Matrix {
    let mut dx = dy.clone();
    for (d, &p) in dx.as_mut_slice().iter_mut().zip(pre.as_slice()) {
        if p < 0.0 {
            *d *= slope;
        }
    }
    dx
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        for v in row.iter_mut() {
            *v = (*v - m).exp();
            s += *v;
        }
        for v in row.iter_mut() {
            *v /= s;
        }
    }
    out
}

/// Mean softmax cross-entropy over rows and its gradient with respect to the logits.
pub fn cross_entropy_loss(logits: &Matrix, labels: &[usize]) -> Result<(f64, Matrix), NnError> {
    let (n, c) = logits.shape();
    if labels.len() != n {
        return Err(NnError::Dimension(format!(
            "{} labels for {n} rows of logits",
            labels.len()
        )));
    }
    if n == 0 {
        return Err(NnError::Dimension("empty batch".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
        return Err(NnError::Domain(format!("label {bad} outside [0, {c})")));
    }
    let mut grad = Matrix::zeros(n, c);
    let mut loss = 0.0;
    let inv_n = 1.0 / n as f64;
    for (r, &label) in labels.iter().enumerate() {
        let row = logits.row(r);
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - row[label];
        let g = grad.row_mut(r);
        for j in 0..c {
            g[j] = (row[j] - lse).exp() * inv_n;
        }
        g[label] -= inv_n;
    }
    Ok((loss * inv_n, grad))
}

/// Mean over rows of summed per-output binary cross-entropy, taken on
/// pre-sigmoid logits against one-hot class targets. Returns the loss and its
/// gradient with respect to the logits.
pub fn binary_cross_entropy_with_logits(
    logits: &Matrix,
    labels: &[usize],
) -> Result<(f64, Matrix), NnError> {
    let (n, c) = logits.shape();
    if labels.len() != n {
        return Err(NnError::Dimension(format!(
            "{} labels for {n} rows of logits",
            labels.len()
        )));
    }
    if n == 0 {
        return Err(NnError::Dimension("empty batch".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
        return Err(NnError::Domain(format!("label {bad} outside [0, {c})")));
    }
    let inv_n = 1.0 / n as f64;
    let mut grad = Matrix::zeros(n, c);
    let mut loss = 0.0;
    for (r, &label) in labels.iter().enumerate() {
        for j in 0..c {
            let z = logits.get(r, j);
            let t = if j == label { 1.0 } else { 0.0 };
            // softplus(z) - t·z, stable for both signs
            loss += z.max(0.0) + (-z.abs()).exp().ln_1p() - t * z;
            grad.set(r, j, (sigmoid(z) - t) * inv_n);
        }
    }
    Ok((loss * inv_n, grad))
}
