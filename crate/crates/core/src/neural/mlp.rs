use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::Classifier;
use crate::linalg::{sigmoid, softplus};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    #[default]
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    pub input_width: usize,
    pub hidden_widths: Vec<usize>,
    pub activation: Activation,
}

impl MlpArchitecture {
    pub fn new(input_width: usize, hidden_widths: &[usize]) -> Self {
        MlpArchitecture {
            input_width,
            hidden_widths: hidden_widths.to_vec(),
            activation: Activation::Relu,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.input_width == 0 {
            return Err(Error::InvalidParameter("mlp: input width must be >= 1".into()));
        }
        if self.hidden_widths.contains(&0) {
            return Err(Error::InvalidParameter("mlp: hidden widths must be >= 1".into()));
        }
        Ok(())
    }

    /// (fan_in, fan_out) of every layer, output layer last.
    fn shapes(&self) -> Vec<(usize, usize)> {
        let mut widths = vec![self.input_width];
        widths.extend(&self.hidden_widths);
        widths.push(1);
        widths.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Training configuration; `hidden_widths` and `activation` set the
/// architecture once the input width is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_widths: Vec<usize>,
    pub activation: Activation,
    pub lr: f64,
    pub momentum: f64,
    pub batch: usize,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden_widths: vec![32, 16],
            activation: Activation::Relu,
            lr: 0.01,
            momentum: 0.9,
            batch: 32,
            epochs: 500,
            l2: 1e-4,
        }
    }
}

impl MlpParams {
    /// Stacking meta-learner defaults. The inputs are only a handful of
    /// correlated probabilities, so the weight penalty is much stronger than
    /// for the standalone network.
    pub fn meta() -> Self {
        MlpParams {
            hidden_widths: vec![16, 8],
            l2: 3e-2,
            ..Default::default()
        }
    }

    pub fn architecture(&self, input_width: usize) -> MlpArchitecture {
        MlpArchitecture {
            input_width,
            hidden_widths: self.hidden_widths.clone(),
            activation: self.activation,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("mlp: {m}")));
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return bad("lr must be positive");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must be in [0, 1)");
        }
        if self.batch == 0 {
            return bad("batch must be >= 1");
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return bad("l2 must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `fan_out x fan_in`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub arch: MlpArchitecture,
    pub layers: Vec<Layer>,
    pub params: MlpParams,
    pub seed: u64,
    /// Mean training loss of each epoch (batch losses weighted by batch size).
    pub loss_trace: Vec<f64>,
}

/// Weights uniform on `(-1/sqrt(fan_in), 1/sqrt(fan_in))`, biases zero.
pub fn init_mlp(arch: &MlpArchitecture, seed: u64) -> Result<MlpModel> {
    arch.validate()?;
    let mut r = rng::stream(rng::derive_seed(seed, &[0]));
    let layers = arch
        .shapes()
        .into_iter()
        .map(|(fan_in, fan_out)| {
            let scale = 1.0 / (fan_in as f64).sqrt();
            let weights = Array2::from_shape_fn((fan_out, fan_in), |_| r.random_range(-scale..scale));
            Layer {
                weights,
                bias: Array1::zeros(fan_out),
            }
        })
        .collect();
    Ok(MlpModel {
        arch: arch.clone(),
        layers,
        params: MlpParams {
            hidden_widths: arch.hidden_widths.clone(),
            activation: arch.activation,
            ..Default::default()
        },
        seed,
        loss_trace: Vec::new(),
    })
}

impl MlpModel {
    fn logit(&self, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut next = layer.bias.to_vec();
            for (j, out) in next.iter_mut().enumerate() {
                let row = layer.weights.row(j);
                *out += row.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>();
                if l < last {
                    *out = self.arch.activation.apply(*out);
                }
            }
            a = next;
        }
        a[0]
    }

    /// Probability of class 1 for one row.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arch.input_width {
            return Err(Error::WidthMismatch {
                expected: self.arch.input_width,
                found: x.len(),
            });
        }
        Ok(sigmoid(self.logit(x)))
    }

    /// Pre-activations of every layer for a batch; the last entry holds logits.
    fn pre_activations(&self, x: ArrayView2<'_, f64>) -> (Vec<Array2<f64>>, Vec<Array2<f64>>) {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut a = x.to_owned();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let z = a.dot(&layer.weights.t()) + &layer.bias;
            let next = if l < last {
                z.mapv(|v| self.arch.activation.apply(v))
            } else {
                z.clone()
            };
            inputs.push(std::mem::replace(&mut a, next));
            pre.push(z);
        }
        (inputs, pre)
    }

    fn l2_penalty(&self) -> f64 {
        let sq: f64 = self.layers.iter().map(|l| l.weights.iter().map(|w| w * w).sum::<f64>()).sum();
        0.5 * self.params.l2 * sq
    }

    /// Loss only, same definition as [`backward`].
    pub fn loss(&self, features: ArrayView2<'_, f64>, labels: &[u8]) -> f64 {
        let (_, pre) = self.pre_activations(features);
        let logits = pre.last().expect("at least one layer");
        let data: f64 = logits
            .column(0)
            .iter()
            .zip(labels)
            .map(|(&z, &y)| softplus(z) - f64::from(y) * z)
            .sum::<f64>()
            / labels.len() as f64;
        data + self.l2_penalty()
    }
}

impl Classifier for MlpModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    fn n_features(&self) -> usize {
        self.arch.input_width
    }

    fn predict_proba_batch(&self, features: ArrayView2<'_, f64>) -> Vec<f64> {
        let (_, pre) = self.pre_activations(features);
        pre.last().expect("at least one layer").column(0).iter().map(|&z| sigmoid(z)).collect()
    }
}

/// Mean binary cross-entropy plus `(l2 / 2) * sum ||W||^2` over weight matrices
/// (biases unpenalized), and its gradient for every layer as `(dW, db)`.
pub fn backward(
    model: &MlpModel,
    features: ArrayView2<'_, f64>,
    labels: &[u8],
) -> Result<(f64, Vec<Layer>)> {
    if labels.is_empty() {
        return Err(Error::Empty("batch"));
    }
    if features.nrows() != labels.len() {
        return Err(Error::LengthMismatch {
            left: features.nrows(),
            right: labels.len(),
        });
    }
    if features.ncols() != model.arch.input_width {
        return Err(Error::WidthMismatch {
            expected: model.arch.input_width,
            found: features.ncols(),
        });
    }
    let n = labels.len() as f64;
    let (inputs, pre) = model.pre_activations(features);
    let logits = pre.last().expect("at least one layer");
    let mut loss = 0.0;
    let mut delta = Array2::zeros((labels.len(), 1));
    for (i, (&z, &y)) in logits.column(0).iter().zip(labels).enumerate() {
        let y = f64::from(y);
        loss += softplus(z) - y * z;
        delta[[i, 0]] = (sigmoid(z) - y) / n;
    }
    loss = loss / n + model.l2_penalty();

    let mut grads = Vec::with_capacity(model.layers.len());
    for l in (0..model.layers.len()).rev() {
        let layer = &model.layers[l];
        let d_w = delta.t().dot(&inputs[l]) + &(&layer.weights * model.params.l2);
        let d_b = delta.sum_axis(Axis(0));
        if l > 0 {
            let mut back = delta.dot(&layer.weights);
            let act = model.arch.activation;
            back.zip_mut_with(&pre[l - 1], |g, &z| *g *= act.derivative(z));
            delta = back;
        }
        grads.push(Layer {
            weights: d_w,
            bias: d_b,
        });
    }
    grads.reverse();
    Ok((loss, grads))
}

/// Mini-batch gradient descent with momentum (`v = mu v - lr g; theta += v`)
/// for a fixed number of epochs. Batch order is reshuffled every epoch from a
/// stream derived from `seed`. Returns the final-epoch model.
pub fn train_mlp(
    features: ArrayView2<'_, f64>,
    labels: &[u8],
    params: &MlpParams,
    seed: u64,
) -> Result<MlpModel> {
    params.validate()?;
    if features.nrows() != labels.len() {
        return Err(Error::LengthMismatch {
            left: features.nrows(),
            right: labels.len(),
        });
    }
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(Error::SingleClass);
    }
    let arch = params.architecture(features.ncols());
    let mut model = init_mlp(&arch, seed)?;
    model.params = params.clone();

    let mut velocity: Vec<Layer> = model
        .layers
        .iter()
        .map(|l| Layer {
            weights: Array2::zeros(l.weights.raw_dim()),
            bias: Array1::zeros(l.bias.raw_dim()),
        })
        .collect();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    let mut shuffle = rng::stream(rng::derive_seed(seed, &[1]));
    let full_batch = params.batch >= labels.len();
    let mut batch_labels = Vec::with_capacity(params.batch);

    for epoch in 0..params.epochs {
        if !full_batch {
            order.shuffle(&mut shuffle);
        }
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(params.batch) {
            let (loss, grads) = if full_batch {
                backward(&model, features, labels)?
            } else {
                let x = features.select(Axis(0), chunk);
                batch_labels.clear();
                batch_labels.extend(chunk.iter().map(|&i| labels[i]));
                backward(&model, x.view(), &batch_labels)?
            };
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            epoch_loss += loss * chunk.len() as f64;
            for ((layer, v), g) in model.layers.iter_mut().zip(&mut velocity).zip(&grads) {
                v.weights.zip_mut_with(&g.weights, |v, &g| *v = params.momentum * *v - params.lr * g);
                v.bias.zip_mut_with(&g.bias, |v, &g| *v = params.momentum * *v - params.lr * g);
                layer.weights += &v.weights;
                layer.bias += &v.bias;
            }
        }
        let mean = epoch_loss / labels.len() as f64;
        if !mean.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        model.loss_trace.push(mean);
    }
    Ok(model)
}
