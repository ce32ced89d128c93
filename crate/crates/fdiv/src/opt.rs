//! First-order optimizers over flat parameter slices.
//!
//! `step` always moves against the supplied gradient (minimization); callers
//! maximizing an objective pass the negated gradient.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which update rule to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    /// Gradient descent with heavy-ball momentum (default 0.9).
    #[default]
    Momentum,
    /// Per-parameter adaptive rule with bias-corrected moment estimates.
    Adam,
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<OptimizerKind, Error> {
        match s {
            "momentum" => Ok(OptimizerKind::Momentum),
            "adam" => Ok(OptimizerKind::Adam),
            other => Err(Error::Config(format!(
                "unknown optimizer '{other}', expected momentum or adam"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    lr: f64,
    momentum: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, lr: f64) -> Optimizer {
        assert!(lr > 0.0 && lr.is_finite(), "learning rate must be positive");
        Optimizer {
            kind,
            lr,
            momentum: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn momentum(lr: f64) -> Optimizer {
        Optimizer::new(OptimizerKind::Momentum, lr)
    }

    pub fn adam(lr: f64) -> Optimizer {
        Optimizer::new(OptimizerKind::Adam, lr)
    }

    /// Overrides the momentum coefficient (also used as Adam's first-moment
    /// decay).
    pub fn with_momentum(mut self, momentum: f64) -> Optimizer {
        assert!((0.0..1.0).contains(&momentum), "momentum must lie in [0, 1)");
        self.momentum = momentum;
        self
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    /// One descent step in place. Buffers are sized on first use; the
    /// parameter count must stay fixed across steps.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), grad.len(), "gradient length mismatch");
        if self.m.is_empty() {
            self.m = vec![0.0; params.len()];
            if self.kind == OptimizerKind::Adam {
                self.v = vec![0.0; params.len()];
            }
        }
        assert_eq!(self.m.len(), params.len(), "parameter count changed");
        match self.kind {
            OptimizerKind::Momentum => {
                for ((p, g), m) in params.iter_mut().zip(grad).zip(&mut self.m) {
                    *m = self.momentum * *m + g;
                    *p -= self.lr * *m;
                }
            }
            OptimizerKind::Adam => {
                self.t += 1;
                let c1 = 1.0 - self.momentum.powi(self.t as i32);
                let c2 = 1.0 - self.beta2.powi(self.t as i32);
                for (((p, g), m), v) in params
                    .iter_mut()
                    .zip(grad)
                    .zip(&mut self.m)
                    .zip(&mut self.v)
                {
                    *m = self.momentum * *m + (1.0 - self.momentum) * g;
                    *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                    *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
                }
            }
        }
    }
}
