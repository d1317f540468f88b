//! Multi-layer perceptron with reverse-mode gradients.

use crate::error::{Error, Result};
use crate::numeric::{DenseLayer, Matrix};

/// Element-wise activation applied after a dense layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
    /// Logistic squash onto (0, 1); used by the attack generator's output.
    Sigmoid,
}

impl Activation {
    pub fn apply(&self, z: &Matrix) -> Matrix {
        match self {
            Activation::Relu => z.map(|v| if v > 0.0 { v } else { 0.0 }),
            Activation::Identity => z.clone(),
            Activation::Sigmoid => z.map(sigmoid),
        }
    }

    /// Derivative evaluated at the pre-activation `z`.
    pub fn derivative(&self, z: &Matrix) -> Matrix {
        match self {
            Activation::Relu => z.map(|v| if v > 0.0 { 1.0 } else { 0.0 }),
            Activation::Identity => z.map(|_| 1.0),
            Activation::Sigmoid => z.map(|v| {
                let s = sigmoid(v);
                s * (1.0 - s)
            }),
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// A stack of dense layers, one activation per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
    activations: Vec<Activation>,
}

/// Per-layer tensors retained by [`Mlp::forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input to each layer (`inputs[0]` is the network input).
    inputs: Vec<Matrix>,
    /// Pre-activation output of each layer.
    pre_activations: Vec<Matrix>,
}

impl ForwardCache {
    pub fn batch_size(&self) -> usize {
        self.inputs[0].rows()
    }

    /// Input that was fed to layer `k`.
    pub fn layer_input(&self, k: usize) -> &Matrix {
        &self.inputs[k]
    }

    pub fn pre_activation(&self, k: usize) -> &Matrix {
        &self.pre_activations[k]
    }
}

/// Parameter gradients, shaped like the model.
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Option<Matrix>>,
}

impl MlpGrads {
    pub fn zeros_like(model: &Mlp) -> Self {
        MlpGrads {
            weights: model
                .layers
                .iter()
                .map(|l| Matrix::zeros(l.weight.rows(), l.weight.cols()))
                .collect(),
            biases: model
                .layers
                .iter()
                .map(|l| l.bias.as_ref().map(|b| Matrix::zeros(1, b.cols())))
                .collect(),
        }
    }
}

impl Mlp {
    pub fn new(layers: Vec<DenseLayer>, activations: Vec<Activation>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("empty MLP".into()));
        }
        if layers.len() != activations.len() {
            return Err(Error::Shape(format!(
                "{} layers but {} activations",
                layers.len(),
                activations.len()
            )));
        }
        for pair in layers.windows(2) {
            if pair[0].out_features() != pair[1].in_features() {
                return Err(Error::Shape(format!(
                    "layer chain break: {} out vs {} in",
                    pair[0].out_features(),
                    pair[1].in_features()
                )));
            }
        }
        Ok(Mlp {
            layers,
            activations,
        })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn in_features(&self) -> usize {
        self.layers[0].in_features()
    }

    pub fn out_features(&self) -> usize {
        self.layers.last().unwrap().out_features()
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, ForwardCache)> {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for (layer, act) in self.layers.iter().zip(&self.activations) {
            let z = layer.forward(&cur)?;
            inputs.push(cur);
            let a = act.apply(&z);
            pre_activations.push(z);
            cur = a;
        }
        Ok((
            cur,
            ForwardCache {
                inputs,
                pre_activations,
            },
        ))
    }

    /// Forward without retaining the cache.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        Ok(self.forward(x)?.0)
    }

    /// Backpropagates `grad_output` (gradient w.r.t. the network output)
    /// through a cache produced by [`Mlp::forward`] on this same model.
    ///
    /// Returns the gradient w.r.t. the network input and per-parameter
    /// gradients. A cache from a different model or batch is rejected.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &Matrix) -> Result<(Matrix, MlpGrads)> {
        if cache.inputs.len() != self.layers.len() {
            return Err(Error::State(format!(
                "cache covers {} layers, model has {}",
                cache.inputs.len(),
                self.layers.len()
            )));
        }
        for (k, layer) in self.layers.iter().enumerate() {
            if cache.inputs[k].cols() != layer.in_features()
                || cache.pre_activations[k].cols() != layer.out_features()
            {
                return Err(Error::State(format!("cache shape mismatch at layer {k}")));
            }
        }
        let last = self.layers.len() - 1;
        if grad_output.rows() != cache.batch_size()
            || grad_output.cols() != self.layers[last].out_features()
        {
            return Err(Error::State(format!(
                "grad_output {}x{} does not match cached forward",
                grad_output.rows(),
                grad_output.cols()
            )));
        }

        let mut grads = MlpGrads::zeros_like(self);
        let mut grad = grad_output.clone();
        for k in (0..self.layers.len()).rev() {
            // d/dz = d/da ∘ act'(z)
            let dz = grad.hadamard(&self.activations[k].derivative(&cache.pre_activations[k]))?;
            grads.weights[k] = dz.transpose_matmul(&cache.inputs[k])?;
            if self.layers[k].use_bias() {
                grads.biases[k] = Some(dz.sum_rows());
            }
            grad = dz.matmul(&self.layers[k].weight)?;
        }
        Ok((grad, grads))
    }

    /// Plain SGD: `w ← w − lr · grad` for every parameter.
    pub fn sgd_step(&mut self, grads: &MlpGrads, learning_rate: f64) -> Result<()> {
        if grads.weights.len() != self.layers.len() {
            return Err(Error::Shape("gradient count mismatch".into()));
        }
        for (k, layer) in self.layers.iter_mut().enumerate() {
            let gw = &grads.weights[k];
            if gw.rows() != layer.weight.rows() || gw.cols() != layer.weight.cols() {
                return Err(Error::Shape(format!("weight gradient shape at layer {k}")));
            }
            for (w, g) in layer.weight.as_mut_slice().iter_mut().zip(gw.as_slice()) {
                *w -= learning_rate * g;
            }
            match (&mut layer.bias, &grads.biases[k]) {
                (Some(b), Some(gb)) => {
                    if gb.cols() != b.cols() {
                        return Err(Error::Shape(format!("bias gradient shape at layer {k}")));
                    }
                    for (w, g) in b.as_mut_slice().iter_mut().zip(gb.as_slice()) {
                        *w -= learning_rate * g;
                    }
                }
                (None, None) => {}
                (Some(_), None) => {}
                (None, Some(_)) => {
                    return Err(Error::Shape(format!("bias gradient for bias-less layer {k}")))
                }
            }
        }
        Ok(())
    }

    /// Largest absolute difference over all parameters of two same-shaped models.
    pub fn max_param_diff(&self, other: &Mlp) -> f64 {
        let mut worst = 0.0f64;
        for (a, b) in self.layers.iter().zip(&other.layers) {
            worst = worst.max(a.weight.max_abs_diff(&b.weight));
            if let (Some(ba), Some(bb)) = (&a.bias, &b.bias) {
                worst = worst.max(ba.max_abs_diff(bb));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::softmax_cross_entropy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_mlp(dims: &[usize], rng: &mut ChaCha20Rng) -> Mlp {
        let mut layers = Vec::new();
        let mut acts = Vec::new();
        for w in dims.windows(2) {
            layers.push(DenseLayer::init(w[0], w[1], true, rng));
            acts.push(Activation::Relu);
        }
        *acts.last_mut().unwrap() = Activation::Identity;
        Mlp::new(layers, acts).unwrap()
    }

    #[test]
    fn single_identity_layer_equals_dense_forward() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let layer = DenseLayer::init(4, 3, true, &mut rng);
        let model = Mlp::new(vec![layer.clone()], vec![Activation::Identity]).unwrap();
        let x = Matrix::uniform(5, 4, -1.0, 1.0, &mut rng);
        let (out, _) = model.forward(&x).unwrap();
        assert_eq!(out, layer.forward(&x).unwrap());
    }

    #[test]
    fn relu_kills_negative_preactivations() {
        let layer = DenseLayer::from_parts(
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
            Some(Matrix::from_rows(&[vec![-10.0]]).unwrap()),
        )
        .unwrap();
        let model = Mlp::new(vec![layer], vec![Activation::Relu]).unwrap();
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let (out, _) = model.forward(&x).unwrap();
        assert!(out.as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn three_layer_forward_matches_manual_composition() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let model = random_mlp(&[5, 7, 6, 3], &mut rng);
        let x = Matrix::uniform(4, 5, -1.0, 1.0, &mut rng);
        let (out, _) = model.forward(&x).unwrap();

        let mut cur = x;
        for (layer, act) in model.layers().iter().zip(model.activations()) {
            cur = act.apply(&layer.forward(&cur).unwrap());
        }
        assert!(out.max_abs_diff(&cur) < 1e-12);
    }

    #[test]
    fn identity_layer_weight_grad_is_gt_x() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let model = Mlp::new(
            vec![DenseLayer::init(3, 2, false, &mut rng)],
            vec![Activation::Identity],
        )
        .unwrap();
        let x = Matrix::uniform(4, 3, -1.0, 1.0, &mut rng);
        let g = Matrix::uniform(4, 2, -1.0, 1.0, &mut rng);
        let (_, cache) = model.forward(&x).unwrap();
        let (_, grads) = model.backward(&cache, &g).unwrap();
        let want = g.transpose_matmul(&x).unwrap();
        assert!(grads.weights[0].max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn zero_grad_output_gives_zero_grads() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let model = random_mlp(&[4, 5, 2], &mut rng);
        let x = Matrix::uniform(3, 4, -1.0, 1.0, &mut rng);
        let (_, cache) = model.forward(&x).unwrap();
        let (gin, grads) = model.backward(&cache, &Matrix::zeros(3, 2)).unwrap();
        assert!(gin.as_slice().iter().all(|v| *v == 0.0));
        assert!(grads.weights.iter().all(|w| w.as_slice().iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn mismatched_cache_is_state_error() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let model = random_mlp(&[4, 5, 2], &mut rng);
        let other = random_mlp(&[4, 6, 2], &mut rng);
        let x = Matrix::uniform(3, 4, -1.0, 1.0, &mut rng);
        let (_, cache) = other.forward(&x).unwrap();
        let err = model.backward(&cache, &Matrix::zeros(3, 2));
        assert!(matches!(err, Err(Error::State(_))));
    }

    /// Central-difference gradient for a scalar loss over every parameter.
    fn finite_diff_check(model: &Mlp, x: &Matrix, labels: &[usize], tol: f64) {
        let loss_of = |m: &Mlp| {
            let (logits, _) = m.forward(x).unwrap();
            softmax_cross_entropy(&logits, labels).unwrap().0
        };
        let (logits, cache) = model.forward(x).unwrap();
        let (_, grad_logits) = softmax_cross_entropy(&logits, labels).unwrap();
        let (_, grads) = model.backward(&cache, &grad_logits).unwrap();

        let h = 1e-5;
        for k in 0..model.layers().len() {
            let (wr, wc) = (
                model.layers()[k].weight.rows(),
                model.layers()[k].weight.cols(),
            );
            for r in 0..wr {
                for c in 0..wc {
                    let mut up = model.clone();
                    let v = up.layers()[k].weight.get(r, c);
                    up.layers_mut()[k].weight.set(r, c, v + h);
                    let mut dn = model.clone();
                    dn.layers_mut()[k].weight.set(r, c, v - h);
                    let num = (loss_of(&up) - loss_of(&dn)) / (2.0 * h);
                    let ana = grads.weights[k].get(r, c);
                    let rel = (num - ana).abs() / num.abs().max(ana.abs()).max(1e-8);
                    assert!(rel < tol, "layer {k} w[{r},{c}]: {num} vs {ana}");
                }
            }
            if let Some(b) = &model.layers()[k].bias {
                for c in 0..b.cols() {
                    let mut up = model.clone();
                    let v = up.layers()[k].bias.as_ref().unwrap().get(0, c);
                    up.layers_mut()[k].bias.as_mut().unwrap().set(0, c, v + h);
                    let mut dn = model.clone();
                    dn.layers_mut()[k].bias.as_mut().unwrap().set(0, c, v - h);
                    let num = (loss_of(&up) - loss_of(&dn)) / (2.0 * h);
                    let ana = grads.biases[k].as_ref().unwrap().get(0, c);
                    let rel = (num - ana).abs() / num.abs().max(ana.abs()).max(1e-8);
                    assert!(rel < tol, "layer {k} b[{c}]: {num} vs {ana}");
                }
            }
        }
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        for dims in [vec![4, 6, 3], vec![5, 8, 8, 4], vec![3, 16, 16, 16, 2]] {
            let model = random_mlp(&dims, &mut rng);
            let x = Matrix::uniform(6, dims[0], -1.0, 1.0, &mut rng);
            let labels: Vec<usize> = (0..6)
                .map(|_| rng.gen_range(0..*dims.last().unwrap()))
                .collect();
            finite_diff_check(&model, &x, &labels, 1e-4);
        }
    }

    #[test]
    fn sgd_hand_case() {
        let layer =
            DenseLayer::from_parts(Matrix::from_rows(&[vec![1.0]]).unwrap(), None).unwrap();
        let mut model = Mlp::new(vec![layer], vec![Activation::Identity]).unwrap();
        let grads = MlpGrads {
            weights: vec![Matrix::from_rows(&[vec![2.0]]).unwrap()],
            biases: vec![None],
        };
        model.sgd_step(&grads, 0.1).unwrap();
        assert!((model.layers()[0].weight.get(0, 0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn sgd_zero_lr_is_noop() {
        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let mut model = random_mlp(&[4, 5, 2], &mut rng);
        let before = model.clone();
        let x = Matrix::uniform(3, 4, -1.0, 1.0, &mut rng);
        let (_, cache) = model.forward(&x).unwrap();
        let (_, grads) = model
            .backward(&cache, &Matrix::uniform(3, 2, -1.0, 1.0, &mut rng))
            .unwrap();
        model.sgd_step(&grads, 0.0).unwrap();
        assert_eq!(model.max_param_diff(&before), 0.0);
    }

    #[test]
    fn sgd_step_decreases_quadratic_loss() {
        // Toy quadratic: loss = ½‖Wx‖², gradient through identity MLP.
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let mut model = Mlp::new(
            vec![DenseLayer::init(3, 3, false, &mut rng)],
            vec![Activation::Identity],
        )
        .unwrap();
        let x = Matrix::uniform(8, 3, -1.0, 1.0, &mut rng);
        let loss_of = |m: &Mlp| {
            let (out, _) = m.forward(&x).unwrap();
            out.as_slice().iter().map(|v| 0.5 * v * v).sum::<f64>()
        };
        let before = loss_of(&model);
        let (out, cache) = model.forward(&x).unwrap();
        let (_, grads) = model.backward(&cache, &out).unwrap();
        model.sgd_step(&grads, 0.01).unwrap();
        assert!(loss_of(&model) < before);
    }

    #[test]
    fn forward_is_deterministic() {
        let mut rng = ChaCha20Rng::seed_from_u64(18);
        let model = random_mlp(&[4, 8, 2], &mut rng);
        let x = Matrix::uniform(3, 4, -1.0, 1.0, &mut rng);
        let a = model.forward(&x).unwrap().0;
        let b = model.forward(&x).unwrap().0;
        assert_eq!(a, b);
    }
}
