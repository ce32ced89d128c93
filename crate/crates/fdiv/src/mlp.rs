//! Small fully-connected network with hand-written backpropagation.
//!
//! Hidden layers use tanh so the function is continuously differentiable in
//! both inputs and parameters; the output layer is linear and scalar.
//! Parameters live in one flat vector (per layer: row-major weights, then
//! biases) so optimizers can treat the network as a plain parameter slice.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// Layer widths, input first, ending with 1.
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Forward value plus gradients from one backward pass.
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub output: f64,
    /// ∂output/∂θ, aligned with the flat parameter vector.
    pub params: Vec<f64>,
    /// ∂output/∂x, one entry per input coordinate.
    pub input: Vec<f64>,
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Mlp {
    /// Fresh network with symmetric uniform init scaled by fan-in
    /// (weights in ±1/√fan_in, biases zero).
    pub fn new(input_dim: usize, hidden: &[usize], rng: &mut ChaCha8Rng) -> Mlp {
        assert!(input_dim > 0, "input dimension must be positive");
        assert!(hidden.iter().all(|&h| h > 0), "hidden widths must be positive");
        let mut sizes = vec![input_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut params = Vec::with_capacity(param_count(&sizes));
        for w in sizes.windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            let bound = 1.0 / (n_in as f64).sqrt();
            for _ in 0..n_in * n_out {
                params.push(rng.gen_range(-bound..bound));
            }
            params.extend(std::iter::repeat(0.0).take(n_out));
        }
        Mlp { sizes, params }
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Forward pass to the scalar output.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.sizes[0], "input dimension mismatch");
        let mut act = x.to_vec();
        let mut offset = 0;
        let last = self.sizes.len() - 2;
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &self.params[offset..offset + n_in * n_out];
            let biases = &self.params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            let mut next = vec![0.0; n_out];
            for (o, next_o) in next.iter_mut().enumerate() {
                let row = &weights[o * n_in..(o + 1) * n_in];
                let z: f64 = row.iter().zip(&act).map(|(wi, ai)| wi * ai).sum::<f64>() + biases[o];
                *next_o = if l == last { z } else { z.tanh() };
            }
            act = next;
            offset += n_in * n_out + n_out;
        }
        act[0]
    }

    /// Forward plus full backward pass: gradients of the scalar output with
    /// respect to every parameter and every input coordinate.
    pub fn grads(&self, x: &[f64]) -> MlpGrads {
        assert_eq!(x.len(), self.sizes[0], "input dimension mismatch");
        let n_layers = self.sizes.len() - 1;
        let last = n_layers - 1;

        // Forward, keeping every activation (post-nonlinearity).
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
        acts.push(x.to_vec());
        let mut offset = 0;
        let mut offsets = Vec::with_capacity(n_layers);
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            offsets.push(offset);
            let weights = &self.params[offset..offset + n_in * n_out];
            let biases = &self.params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            let prev = &acts[l];
            let mut next = vec![0.0; n_out];
            for (o, next_o) in next.iter_mut().enumerate() {
                let row = &weights[o * n_in..(o + 1) * n_in];
                let z: f64 =
                    row.iter().zip(prev).map(|(wi, ai)| wi * ai).sum::<f64>() + biases[o];
                *next_o = if l == last { z } else { z.tanh() };
            }
            acts.push(next);
            offset += n_in * n_out + n_out;
        }
        let output = acts[n_layers][0];

        // Backward: delta = ∂output/∂z for the current layer.
        let mut param_grad = vec![0.0; self.params.len()];
        let mut delta = vec![1.0]; // linear scalar output
        for l in (0..n_layers).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = offsets[l];
            let weights = &self.params[off..off + n_in * n_out];
            let prev = &acts[l];
            for o in 0..n_out {
                let d = delta[o];
                let wrow = off + o * n_in;
                for i in 0..n_in {
                    param_grad[wrow + i] = d * prev[i];
                }
                param_grad[off + n_in * n_out + o] = d;
            }
            // Propagate to the previous layer's activations, then through its
            // tanh (or straight to the input for l = 0).
            let mut prev_delta = vec![0.0; n_in];
            for (i, pd) in prev_delta.iter_mut().enumerate() {
                let mut s = 0.0;
                for (o, d) in delta.iter().enumerate() {
                    s += weights[o * n_in + i] * d;
                }
                // acts[l] is tanh(z) for hidden layers, the raw input for l=0.
                *pd = if l == 0 { s } else { s * (1.0 - prev[i] * prev[i]) };
            }
            delta = prev_delta;
        }

        MlpGrads {
            output,
            params: param_grad,
            input: delta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn net(input_dim: usize, hidden: &[usize], seed: u64) -> Mlp {
        let mut r = rng::substream(seed, rng::STREAM_INIT);
        Mlp::new(input_dim, hidden, &mut r)
    }

    #[test]
    fn test_deterministic_init() {
        let a = net(2, &[5, 4], 7);
        let b = net(2, &[5, 4], 7);
        assert_eq!(a, b);
        let c = net(2, &[5, 4], 8);
        assert_ne!(a, c);
    }

    #[test]
    fn test_init_scale_and_zero_biases() {
        let m = net(4, &[8], 3);
        // First layer: 32 weights bounded by 1/√4, then 8 zero biases.
        let w = &m.params()[..32];
        assert!(w.iter().all(|v| v.abs() <= 0.5));
        assert!(m.params()[32..40].iter().all(|&b| b == 0.0));
        assert_eq!(m.n_params(), 4 * 8 + 8 + 8 + 1);
    }

    #[test]
    fn test_forward_matches_hand_computation() {
        let mut m = net(1, &[2], 1);
        // Layout: w1 (2×1), b1 (2), w2 (1×2), b2 (1).
        m.params_mut().copy_from_slice(&[0.5, -1.0, 0.1, 0.2, 2.0, 3.0, 0.25]);
        let x = 0.8;
        let h1 = (0.5f64 * x + 0.1).tanh();
        let h2 = (-1.0f64 * x + 0.2).tanh();
        let want = 2.0 * h1 + 3.0 * h2 + 0.25;
        assert!((m.eval(&[x]) - want).abs() < 1e-15);
        let g = m.grads(&[x]);
        assert!((g.output - want).abs() < 1e-15);
    }

    #[test]
    fn test_param_gradients_match_finite_differences() {
        let m = net(2, &[5, 4], 11);
        let x = [0.3, -1.2];
        let g = m.grads(&x);
        let mut probe = m.clone();
        for i in 0..m.n_params() {
            let h = 1e-6 * (1.0 + m.params()[i].abs());
            let orig = m.params()[i];
            probe.params_mut()[i] = orig + h;
            let up = probe.eval(&x);
            probe.params_mut()[i] = orig - h;
            let dn = probe.eval(&x);
            probe.params_mut()[i] = orig;
            let fd = (up - dn) / (2.0 * h);
            assert!(
                (g.params[i] - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                "param {i}: {} vs {fd}",
                g.params[i]
            );
        }
    }

    #[test]
    fn test_input_gradients_match_finite_differences() {
        let m = net(2, &[6, 3], 13);
        let x = [0.9, 0.4];
        let g = m.grads(&x);
        for k in 0..2 {
            let h = 1e-6;
            let mut up = x;
            up[k] += h;
            let mut dn = x;
            dn[k] -= h;
            let fd = (m.eval(&up) - m.eval(&dn)) / (2.0 * h);
            assert!(
                (g.input[k] - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                "input {k}: {} vs {fd}",
                g.input[k]
            );
        }
    }

    #[test]
    fn test_zero_params_give_zero_output() {
        let mut m = net(1, &[32, 32], 5);
        for p in m.params_mut() {
            *p = 0.0;
        }
        assert_eq!(m.eval(&[3.7]), 0.0);
        let g = m.grads(&[3.7]);
        assert_eq!(g.input[0], 0.0);
    }
}
