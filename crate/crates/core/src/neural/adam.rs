use ndarray::Zip;

use super::mlp::{Gradients, Mlp};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub(crate) step: u64,
    pub(crate) m: Gradients,
    pub(crate) v: Gradients,
}

impl Adam {
    pub fn new(net: &Mlp, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn moments(&self) -> (&Gradients, &Gradients) {
        (&self.m, &self.v)
    }

    /// One bias-corrected Adam step. Non-finite gradients are rejected and
    /// leave both the network and the optimiser untouched.
    pub fn apply(&mut self, net: &mut Mlp, grads: &Gradients) -> Result<()> {
        if grads.layers.len() != net.layers().len() || grads.layers.len() != self.m.layers.len() {
            return Err(Error::Shape("gradient layout does not match network".into()));
        }
        for ((gw, gb), l) in grads.layers.iter().zip(net.layers()) {
            if gw.dim() != l.weight.dim() || gb.dim() != l.bias.dim() {
                return Err(Error::Shape("gradient layout does not match network".into()));
            }
        }
        if !grads.all_finite() {
            return Err(Error::NonFinite("non-finite gradient".into()));
        }
        self.step += 1;
        let t = self.step as i32;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        let lr = self.lr;
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        };
        for (k, layer) in net.layers_mut().iter_mut().enumerate() {
            let (gw, gb) = &grads.layers[k];
            let (mw, mb) = &mut self.m.layers[k];
            let (vw, vb) = &mut self.v.layers[k];
            Zip::from(&mut layer.weight)
                .and(mw)
                .and(vw)
                .and(gw)
                .for_each(|p, m, v, &g| update(p, m, v, g));
            Zip::from(&mut layer.bias)
                .and(mb)
                .and(vb)
                .and(gb)
                .for_each(|p, m, v, &g| update(p, m, v, g));
        }
        Ok(())
    }
}
