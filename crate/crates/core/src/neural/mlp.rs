use ndarray::{Array1, Array2, Axis, Zip};
use rand::Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    pub(crate) fn code(self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Relu => 1,
            Activation::Tanh => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        Some(match c {
            0 => Activation::Identity,
            1 => Activation::Relu,
            2 => Activation::Tanh,
            _ => return None,
        })
    }

    fn apply(self, z: &mut Array2<f64>) {
        match self {
            Activation::Identity => {}
            Activation::Relu => z.mapv_inplace(|v| v.max(0.0)),
            Activation::Tanh => z.mapv_inplace(f64::tanh),
        }
    }

    /// Multiplies `grad` in place by the activation derivative, expressed
    /// through the activation output `y`.
    fn backprop(self, y: &Array2<f64>, grad: &mut Array2<f64>) {
        match self {
            Activation::Identity => {}
            Activation::Relu => Zip::from(grad).and(y).for_each(|g, &o| {
                if o <= 0.0 {
                    *g = 0.0;
                }
            }),
            Activation::Tanh => Zip::from(grad).and(y).for_each(|g, &o| *g *= 1.0 - o * o),
        }
    }
}

/// Fully connected layer, `y = act(x W + b)` with `W` of shape `in × out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

impl Dense {
    /// Weights and biases uniform in `±1/sqrt(fan_in)`.
    pub fn init<R: Rng + ?Sized>(
        inputs: usize,
        outputs: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let bound = 1.0 / (inputs as f64).sqrt();
        let weight = Array2::from_shape_fn((inputs, outputs), |_| rng.random_range(-bound..bound));
        let bias = Array1::from_shape_fn(outputs, |_| rng.random_range(-bound..bound));
        Self {
            weight,
            bias,
            activation,
        }
    }

    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        Self {
            weight: Array2::zeros((inputs, outputs)),
            bias: Array1::zeros(outputs),
            activation,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.weight.ncols()
    }
}

/// Per-layer `(dW, db)` pairs, same shapes as the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Array2<f64>, Array1<f64>)>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| (Array2::zeros(l.weight.raw_dim()), Array1::zeros(l.bias.raw_dim())))
                .collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|(w, b)| w.iter().all(|v| v.is_finite()) && b.iter().all(|v| v.is_finite()))
    }

    pub fn is_zero(&self) -> bool {
        self.layers
            .iter()
            .all(|(w, b)| w.iter().all(|&v| v == 0.0) && b.iter().all(|&v| v == 0.0))
    }
}

/// Activations recorded by [`Mlp::forward`]; `outputs[k]` is the
/// post-activation output of layer `k`, `inputs[k]` its input.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Array2<f64>>,
    outputs: Vec<Array2<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<Dense>,
}

impl Mlp {
    /// `sizes = [in, h1, ..., out]`; hidden layers use `hidden`, the last
    /// one `output`.
    pub fn new<R: Rng + ?Sized>(
        sizes: &[usize],
        hidden: Activation,
        output: Activation,
        rng: &mut R,
    ) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs at least input and output sizes");
        let n = sizes.len() - 1;
        let layers = (0..n)
            .map(|k| {
                let act = if k + 1 == n { output } else { hidden };
                Dense::init(sizes[k], sizes[k + 1], act, rng)
            })
            .collect();
        Self { layers }
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("network without layers".into()));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.bias.len() != l.outputs() {
                return Err(Error::Shape(format!("layer {k}: bias length mismatch")));
            }
            if k > 0 && layers[k - 1].outputs() != l.inputs() {
                return Err(Error::Shape(format!(
                    "layer {k} expects {} inputs, previous layer gives {}",
                    l.inputs(),
                    layers[k - 1].outputs()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").outputs()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.weight.iter().all(|v| v.is_finite()) && l.bias.iter().all(|v| v.is_finite())
        })
    }

    pub fn same_shape(&self, other: &Mlp) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.weight.dim() == b.weight.dim() && a.activation == b.activation
            })
    }

    fn check_input(&self, x: &Array2<f64>) -> Result<()> {
        if x.ncols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input has {} columns, network expects {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Batch forward pass (`x` is `batch × in`) keeping what backward needs.
    pub fn forward(&self, x: &Array2<f64>) -> Result<(Array2<f64>, ForwardCache)> {
        self.check_input(x)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut outputs = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for l in &self.layers {
            let mut z = cur.dot(&l.weight);
            z += &l.bias;
            l.activation.apply(&mut z);
            inputs.push(cur);
            cur = z.clone();
            outputs.push(z);
        }
        Ok((cur, ForwardCache { inputs, outputs }))
    }

    /// Forward pass without a cache.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_input(x)?;
        let mut cur: Option<Array2<f64>> = None;
        for l in &self.layers {
            let mut z = cur.as_ref().unwrap_or(x).dot(&l.weight);
            z += &l.bias;
            l.activation.apply(&mut z);
            cur = Some(z);
        }
        Ok(cur.expect("non-empty"))
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<Vec<f64>> {
        let a = Array2::from_shape_vec((1, x.len()), x.to_vec())
            .map_err(|e| Error::Shape(e.to_string()))?;
        Ok(self.predict(&a)?.into_raw_vec_and_offset().0)
    }

    /// Reverse-mode pass. `grad_out` is dLoss/dOutput (`batch × out`).
    /// Returns parameter gradients and dLoss/dInput.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        grad_out: &Array2<f64>,
    ) -> Result<(Gradients, Array2<f64>)> {
        if cache.outputs.len() != self.layers.len() {
            return Err(Error::Shape("cache from a different network".into()));
        }
        let last = cache.outputs.last().expect("non-empty");
        if grad_out.dim() != last.dim() {
            return Err(Error::Shape(format!(
                "output gradient {:?} does not match output {:?}",
                grad_out.dim(),
                last.dim()
            )));
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut g = grad_out.clone();
        for (k, l) in self.layers.iter().enumerate().rev() {
            l.activation.backprop(&cache.outputs[k], &mut g);
            let dw = cache.inputs[k].t().dot(&g);
            let db = g.sum_axis(Axis(0));
            let dx = g.dot(&l.weight.t());
            grads.push((dw, db));
            g = dx;
        }
        grads.reverse();
        Ok((Gradients { layers: grads }, g))
    }
}

/// `target ← τ·online + (1 − τ)·target`, element-wise.
pub fn soft_update(target: &mut Mlp, online: &Mlp, tau: f64) -> Result<()> {
    if !target.same_shape(online) {
        return Err(Error::Shape("soft update between differently shaped networks".into()));
    }
    for (t, o) in target.layers.iter_mut().zip(&online.layers) {
        Zip::from(&mut t.weight)
            .and(&o.weight)
            .for_each(|a, &b| *a = tau * b + (1.0 - tau) * *a);
        Zip::from(&mut t.bias)
            .and(&o.bias)
            .for_each(|a, &b| *a = tau * b + (1.0 - tau) * *a);
    }
    Ok(())
}
