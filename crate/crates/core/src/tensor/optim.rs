//! Adam with bias correction; the conventional default for this training.

use super::Tensor;

#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub lr: f32,
    pub beta1: f32,
    pub beta2: f32,
    pub eps: f32,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

pub struct Adam {
    cfg: AdamConfig,
    step_count: u64,
    first_moment: Vec<Vec<f32>>,
    second_moment: Vec<Vec<f32>>,
}

impl Adam {
    pub fn new(cfg: AdamConfig) -> Self {
        Adam {
            cfg,
            step_count: 0,
            first_moment: Vec::new(),
            second_moment: Vec::new(),
        }
    }

    /// One update over a parameter list; `grads[i]` pairs with `params[i]`.
    /// Moment buffers are allocated on the first call and must keep matching
    /// sizes afterwards.
    pub fn step(&mut self, params: &mut [&mut Tensor], grads: &[Vec<f32>]) {
        assert_eq!(params.len(), grads.len(), "params/grads length mismatch");
        if self.first_moment.is_empty() {
            self.first_moment = params.iter().map(|p| vec![0.0; p.numel()]).collect();
            self.second_moment = params.iter().map(|p| vec![0.0; p.numel()]).collect();
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let b1 = self.cfg.beta1 as f64;
        let b2 = self.cfg.beta2 as f64;
        let bc1 = 1.0 - b1.powi(t);
        let bc2 = 1.0 - b2.powi(t);
        let lr = self.cfg.lr as f64;
        let eps = self.cfg.eps as f64;
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.first_moment.iter_mut().zip(&mut self.second_moment))
        {
            assert_eq!(p.numel(), g.len(), "gradient size mismatch");
            for i in 0..g.len() {
                let gi = g[i] as f64;
                let mi = b1 * m[i] as f64 + (1.0 - b1) * gi;
                let vi = b2 * v[i] as f64 + (1.0 - b2) * gi * gi;
                m[i] = mi as f32;
                v[i] = vi as f32;
                let mhat = mi / bc1;
                let vhat = vi / bc2;
                p.data_mut()[i] -= (lr * mhat / (vhat.sqrt() + eps)) as f32;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_grads_leave_params_unchanged() {
        let mut p = Tensor::from_vec(vec![3], vec![1.0, -2.0, 0.5]).unwrap();
        let before = p.clone();
        let mut adam = Adam::new(AdamConfig::default());
        for _ in 0..5 {
            adam.step(&mut [&mut p], &[vec![0.0; 3]]);
        }
        assert_eq!(p, before);
    }

    #[test]
    fn constant_gradient_moves_opposite_sign() {
        let mut p = Tensor::scalar(0.0);
        let mut adam = Adam::new(AdamConfig::default());
        let mut last = 0.0f32;
        for _ in 0..20 {
            adam.step(&mut [&mut p], &[vec![2.5]]);
            let now = p.data()[0];
            assert!(now < last, "parameter must move monotonically against the gradient");
            last = now;
        }
    }

    #[test]
    fn quadratic_bowl_converges_100x() {
        // loss = 0.5 * sum(p^2), grad = p
        let mut p = Tensor::from_vec(vec![4], vec![1.0, -0.8, 0.6, -0.4]).unwrap();
        let loss = |p: &Tensor| -> f64 { p.data().iter().map(|&v| 0.5 * (v as f64).powi(2)).sum() };
        let initial = loss(&p);
        let mut adam = Adam::new(AdamConfig {
            lr: 0.05,
            ..AdamConfig::default()
        });
        for _ in 0..200 {
            let g = p.data().to_vec();
            adam.step(&mut [&mut p], &[g]);
        }
        let fin = loss(&p);
        assert!(
            fin * 100.0 <= initial,
            "loss only improved {initial} -> {fin}"
        );
    }
}
