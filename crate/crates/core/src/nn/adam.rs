use crate::error::{Error, Result};

use super::network::Network;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators, one buffer per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
    pub step: u64,
}

impl AdamState {
    pub fn new(network: &Network, config: AdamConfig) -> Self {
        let shapes: Vec<usize> = network.params().iter().map(|p| p.len()).collect();
        AdamState {
            config,
            first: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            step: 0,
        }
    }

    /// Applies one bias-corrected Adam update to raw parameter slices.
    pub fn update_slices(&mut self, params: Vec<&mut [f64]>, grads: Vec<&[f64]>) -> Result<()> {
        if params.len() != self.first.len()
            || grads.len() != params.len()
            || params
                .iter()
                .zip(&grads)
                .zip(&self.first)
                .any(|((p, g), m)| p.len() != g.len() || p.len() != m.len())
        {
            return Err(Error::Shape(
                "Adam state, parameters and gradients disagree in shape".into(),
            ));
        }
        self.step += 1;
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let c1 = 1.0 - beta1.powi(self.step as i32);
        let c2 = 1.0 - beta2.powi(self.step as i32);
        for (((p, g), m), v) in params.into_iter().zip(grads).zip(&mut self.first).zip(&mut self.second) {
            for j in 0..p.len() {
                m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
                v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
                let m_hat = m[j] / c1;
                let v_hat = v[j] / c2;
                p[j] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }

    pub fn step_network(&mut self, network: &mut Network, grads: &Network) -> Result<()> {
        if network.spec != grads.spec {
            return Err(Error::Shape("gradient and network specs differ".into()));
        }
        self.update_slices(network.params_mut(), grads.params())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_state() -> AdamState {
        AdamState {
            config: AdamConfig::default(),
            first: vec![vec![0.0]],
            second: vec![vec![0.0]],
            step: 0,
        }
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut s = scalar_state();
        let mut w = [0.5];
        s.update_slices(vec![&mut w], vec![&[1.0]]).unwrap();
        let expected = 0.5 - 1e-3 / (1.0 + 1e-8);
        assert!((w[0] - expected).abs() < 1e-16);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut s = scalar_state();
        let mut w = [0.5];
        for _ in 0..10 {
            s.update_slices(vec![&mut w], vec![&[0.0]]).unwrap();
        }
        assert_eq!(w[0], 0.5);
    }

    #[test]
    fn quadratic_descends_monotonically() {
        let mut s = scalar_state();
        let mut w = [1.0];
        let mut prev = w[0];
        for _ in 0..100 {
            let g = 2.0 * w[0];
            s.update_slices(vec![&mut w], vec![&[g]]).unwrap();
            assert!(w[0] < prev && w[0] > 0.0);
            prev = w[0];
        }
        assert!(w[0].abs() < 1.0);
        // Oracle: a plain scalar re-implementation of the update.
        let (mut x, mut m, mut v) = (1.0_f64, 0.0_f64, 0.0_f64);
        for t in 1..=100 {
            let g = 2.0 * x;
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            let mh = m / (1.0 - 0.9_f64.powi(t));
            let vh = v / (1.0 - 0.999_f64.powi(t));
            x -= 1e-3 * mh / (vh.sqrt() + 1e-8);
        }
        assert!((x - w[0]).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut s = scalar_state();
        let mut w = [0.0, 1.0];
        assert!(s.update_slices(vec![&mut w], vec![&[0.0, 0.0]]).is_err());
    }
}
