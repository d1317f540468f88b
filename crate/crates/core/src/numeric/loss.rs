//! Loss functions with analytic gradients.

use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// Mean softmax cross-entropy over the batch and its gradient w.r.t. the
/// logits. Labels are class indices into the logit columns.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<(f64, Matrix)> {
    if labels.len() != logits.rows() {
        return Err(Error::Input(format!(
            "{} labels for {} logit rows",
            labels.len(),
            logits.rows()
        )));
    }
    let classes = logits.cols();
    if let Some(bad) = labels.iter().find(|l| **l >= classes) {
        return Err(Error::Input(format!(
            "label {bad} out of range for {classes} classes"
        )));
    }
    let batch = logits.rows() as f64;
    let mut grad = Matrix::zeros(logits.rows(), classes);
    let mut loss = 0.0;
    for r in 0..logits.rows() {
        let row = logits.row(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum_exp: f64 = row.iter().map(|v| (v - max).exp()).sum();
        let log_sum = max + sum_exp.ln();
        loss += log_sum - row[labels[r]];
        for c in 0..classes {
            let p = (row[c] - log_sum).exp();
            let y = if c == labels[r] { 1.0 } else { 0.0 };
            grad.set(r, c, (p - y) / batch);
        }
    }
    Ok((loss / batch, grad))
}

/// Mean squared error over all entries and its gradient w.r.t. `pred`.
pub fn mse(pred: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
    if pred.rows() != target.rows() || pred.cols() != target.cols() {
        return Err(Error::Shape(format!(
            "mse {}x{} vs {}x{}",
            pred.rows(),
            pred.cols(),
            target.rows(),
            target.cols()
        )));
    }
    let n = (pred.rows() * pred.cols()) as f64;
    let diff = pred.sub(target)?;
    let loss = diff.as_slice().iter().map(|v| v * v).sum::<f64>() / n;
    let grad = diff.scale(2.0 / n);
    Ok((loss, grad))
}

/// Fraction of rows whose argmax logit equals the label.
pub fn accuracy(logits: &Matrix, labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let mut correct = 0usize;
    for r in 0..logits.rows() {
        let row = logits.row(r);
        let mut best = 0;
        for c in 1..row.len() {
            if row[c] > row[best] {
                best = c;
            }
        }
        if best == labels[r] {
            correct += 1;
        }
    }
    correct as f64 / labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn uniform_two_class_loss_is_ln2() {
        let logits = Matrix::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let (loss, _) = softmax_cross_entropy(&logits, &[0]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn huge_correct_margin_drives_loss_to_zero() {
        let logits = Matrix::from_rows(&[vec![50.0, -50.0]]).unwrap();
        let (loss, _) = softmax_cross_entropy(&logits, &[0]).unwrap();
        assert!(loss < 1e-12);
    }

    #[test]
    fn out_of_range_label_rejected() {
        let logits = Matrix::zeros(1, 3);
        assert!(matches!(
            softmax_cross_entropy(&logits, &[3]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha20Rng::seed_from_u64(20);
        let logits = Matrix::uniform(4, 5, -2.0, 2.0, &mut rng);
        let labels: Vec<usize> = (0..4).map(|_| rng.gen_range(0..5)).collect();
        let (_, grad) = softmax_cross_entropy(&logits, &labels).unwrap();
        let h = 1e-5;
        for r in 0..4 {
            for c in 0..5 {
                let mut up = logits.clone();
                up.set(r, c, logits.get(r, c) + h);
                let mut dn = logits.clone();
                dn.set(r, c, logits.get(r, c) - h);
                let num = (softmax_cross_entropy(&up, &labels).unwrap().0
                    - softmax_cross_entropy(&dn, &labels).unwrap().0)
                    / (2.0 * h);
                let ana = grad.get(r, c);
                let rel = (num - ana).abs() / num.abs().max(ana.abs()).max(1e-8);
                assert!(rel < 1e-4, "logit[{r},{c}]: {num} vs {ana}");
            }
        }
    }

    #[test]
    fn mse_gradient_matches_central_differences() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let pred = Matrix::uniform(3, 4, -1.0, 1.0, &mut rng);
        let target = Matrix::uniform(3, 4, -1.0, 1.0, &mut rng);
        let (_, grad) = mse(&pred, &target).unwrap();
        let h = 1e-6;
        for r in 0..3 {
            for c in 0..4 {
                let mut up = pred.clone();
                up.set(r, c, pred.get(r, c) + h);
                let mut dn = pred.clone();
                dn.set(r, c, pred.get(r, c) - h);
                let num = (mse(&up, &target).unwrap().0 - mse(&dn, &target).unwrap().0) / (2.0 * h);
                assert!((num - grad.get(r, c)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn accuracy_counts_argmax_hits() {
        let logits = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 3.0], vec![1.0, 0.0]]).unwrap();
        assert!((accuracy(&logits, &[0, 1, 1]) - 2.0 / 3.0).abs() < 1e-12);
    }
}
