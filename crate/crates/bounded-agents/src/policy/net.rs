//! Small dense network with hand-written backprop.
//!
//! Parameters live in one flat `Vec<f64>` (per layer: weight matrix row-major,
//! then bias), which keeps optimizers, checkpoints, and finite-difference
//! checks trivial. Hidden layers use tanh; the final layer is linear, with the
//! head (softmax or identity) applied by the caller.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Activations recorded by a forward pass: the input and every hidden layer
/// output, in order. Feeding them back through [`Mlp::backward`] yields exact
/// parameter gradients.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    layer_inputs: Vec<Vec<f64>>,
}

impl Mlp {
    pub fn param_count(sizes: &[usize]) -> usize {
        sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
    }

    fn check_sizes(sizes: &[usize]) -> Result<()> {
        if sizes.len() < 2 || sizes.iter().any(|&s| s == 0) {
            return Err(Error::Config(format!("bad layer sizes {sizes:?}")));
        }
        Ok(())
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        Self::check_sizes(sizes)?;
        Ok(Mlp { sizes: sizes.to_vec(), params: vec![0.0; Self::param_count(sizes)] })
    }

    /// Orthogonal weight matrices (Gram-Schmidt on Gaussian draws), zero
    /// biases. `output_gain` scales the last layer; near zero it makes a
    /// softmax head start close to uniform regardless of the input.
    pub fn orthogonal_init(sizes: &[usize], output_gain: f64, rng: &mut ChaCha8Rng) -> Result<Self> {
        Self::check_sizes(sizes)?;
        let mut net = Self::zeros(sizes)?;
        let layers = sizes.len() - 1;
        let mut offset = 0;
        for l in 0..layers {
            let (rows, cols) = (sizes[l + 1], sizes[l]);
            let gain = if l + 1 == layers { output_gain } else { 1.0 };
            let w = orthogonal_matrix(rows, cols, rng);
            for (i, v) in w.iter().enumerate() {
                net.params[offset + i] = gain * v;
            }
            offset += rows * cols + rows; // biases stay zero
        }
        Ok(net)
    }

    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Result<Self> {
        Self::check_sizes(sizes)?;
        let want = Self::param_count(sizes);
        if params.len() != want {
            return Err(Error::Dimension(format!(
                "layer sizes {sizes:?} need {want} parameters, got {}",
                params.len()
            )));
        }
        Ok(Mlp { sizes: sizes.to_vec(), params })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_len(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_len(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_traced(input).0
    }

    /// Forward pass that also records the activations needed for backprop.
    pub fn forward_traced(&self, input: &[f64]) -> (Vec<f64>, ForwardTrace) {
        assert_eq!(input.len(), self.sizes[0], "input width mismatch");
        let layers = self.sizes.len() - 1;
        let mut layer_inputs = Vec::with_capacity(layers);
        let mut a = input.to_vec();
        let mut offset = 0;
        for l in 0..layers {
            let (rows, cols) = (self.sizes[l + 1], self.sizes[l]);
            let mut z = vec![0.0; rows];
            for r in 0..rows {
                let row = &self.params[offset + r * cols..offset + (r + 1) * cols];
                let mut acc = self.params[offset + rows * cols + r];
                for c in 0..cols {
                    acc += row[c] * a[c];
                }
                z[r] = acc;
            }
            offset += rows * cols + rows;
            layer_inputs.push(a);
            a = if l + 1 == layers {
                z
            } else {
                z.iter().map(|v| v.tanh()).collect()
            };
        }
        (a, ForwardTrace { layer_inputs })
    }

    /// Accumulates dL/dparams into `grad` given dL/doutput. `grad` must have
    /// one slot per parameter; existing contents are added to, so one buffer
    /// can accumulate over a minibatch.
    pub fn backward(&self, trace: &ForwardTrace, out_grad: &[f64], grad: &mut [f64]) {
        assert_eq!(out_grad.len(), self.output_len(), "output gradient width mismatch");
        assert_eq!(grad.len(), self.params.len(), "gradient buffer size mismatch");
        let layers = self.sizes.len() - 1;
        let offsets: Vec<usize> = {
            let mut v = Vec::with_capacity(layers);
            let mut o = 0;
            for l in 0..layers {
                v.push(o);
                o += self.sizes[l + 1] * (self.sizes[l] + 1);
            }
            v
        };
        let mut delta = out_grad.to_vec();
        for l in (0..layers).rev() {
            let (rows, cols) = (self.sizes[l + 1], self.sizes[l]);
            let offset = offsets[l];
            let a_in = &trace.layer_inputs[l];
            for r in 0..rows {
                let d = delta[r];
                let g_row = &mut grad[offset + r * cols..offset + (r + 1) * cols];
                for c in 0..cols {
                    g_row[c] += d * a_in[c];
                }
            }
            for r in 0..rows {
                grad[offset + rows * cols + r] += delta[r];
            }
            if l > 0 {
                let mut prev = vec![0.0; cols];
                for r in 0..rows {
                    let d = delta[r];
                    let row = &self.params[offset + r * cols..offset + (r + 1) * cols];
                    for c in 0..cols {
                        prev[c] += row[c] * d;
                    }
                }
                // a_in holds tanh outputs of layer l-1, so tanh' = 1 - a^2
                for c in 0..cols {
                    prev[c] *= 1.0 - a_in[c] * a_in[c];
                }
                delta = prev;
            }
        }
    }
}

/// Row-major `rows x cols` matrix with orthonormal rows (if rows <= cols) or
/// orthonormal columns (otherwise), built by Gram-Schmidt on Gaussian draws.
fn orthogonal_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let k = rows.min(cols);
    let dim = rows.max(cols);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        for u in &basis {
            let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= d * ui;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for x in &mut v {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    let mut m = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            m[r * cols + c] = if rows <= cols { basis[r][c] } else { basis[c][r] };
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn param_count_matches_layout() {
        assert_eq!(Mlp::param_count(&[5, 64, 64, 3]), 5 * 64 + 64 + 64 * 64 + 64 + 64 * 3 + 3);
        let net = Mlp::zeros(&[5, 64, 64, 3]).unwrap();
        assert_eq!(net.params().len(), Mlp::param_count(&[5, 64, 64, 3]));
    }

    #[test]
    fn zero_net_outputs_zero() {
        let net = Mlp::zeros(&[4, 8, 2]).unwrap();
        assert_eq!(net.forward(&[1.0, -2.0, 3.0, 0.5]), vec![0.0, 0.0]);
    }

    #[test]
    fn single_layer_is_affine() {
        // one linear layer: y = W x + b, checked by hand
        let mut net = Mlp::zeros(&[2, 2]).unwrap();
        net.params_mut().copy_from_slice(&[1.0, 2.0, 3.0, 4.0, 0.5, -0.5]);
        let y = net.forward(&[1.0, 1.0]);
        assert_eq!(y, vec![1.0 + 2.0 + 0.5, 3.0 + 4.0 - 0.5]);
    }

    #[test]
    fn orthogonal_rows_are_orthonormal() {
        let mut rng = stream(5, &[]);
        let m = orthogonal_matrix(3, 7, &mut rng);
        for r1 in 0..3 {
            for r2 in 0..3 {
                let d: f64 = (0..7).map(|c| m[r1 * 7 + c] * m[r2 * 7 + c]).sum();
                let want = if r1 == r2 { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-10, "rows {r1},{r2}: {d}");
            }
        }
        // tall case: columns orthonormal
        let m = orthogonal_matrix(7, 3, &mut rng);
        for c1 in 0..3 {
            for c2 in 0..3 {
                let d: f64 = (0..7).map(|r| m[r * 3 + c1] * m[r * 3 + c2]).sum();
                let want = if c1 == c2 { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-10, "cols {c1},{c2}: {d}");
            }
        }
    }

    #[test]
    fn output_gain_scales_last_layer_only() {
        let mut rng = stream(9, &[]);
        let net = Mlp::orthogonal_init(&[3, 4, 2], 0.01, &mut rng).unwrap();
        let first_w = &net.params()[0..12];
        let last_w = &net.params()[12 + 4..12 + 4 + 8];
        let n1: f64 = first_w.iter().map(|x| x * x).sum::<f64>();
        let n2: f64 = last_w.iter().map(|x| x * x).sum::<f64>();
        // first layer rows are unit vectors (3 of min(4,3)=3 basis vectors)
        assert!((n1 - 3.0).abs() < 1e-9, "first-layer squared norm {n1}");
        assert!((n2 - 0.0001 * 2.0).abs() < 1e-9, "last-layer squared norm {n2}");
    }

    #[test]
    fn backward_matches_central_differences() {
        let mut rng = stream(17, &[]);
        let mut net = Mlp::orthogonal_init(&[4, 6, 5, 3], 1.0, &mut rng).unwrap();
        // nudge biases so they participate
        let n = net.params().len();
        for i in 0..n {
            net.params_mut()[i] += 0.01 * ((i % 7) as f64 - 3.0);
        }
        let input: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        // scalar loss: weighted sum of outputs
        let w = [0.7, -1.3, 0.4];
        let (out, trace) = net.forward_traced(&input);
        assert_eq!(out.len(), 3);
        let mut grad = vec![0.0; n];
        net.backward(&trace, &w, &mut grad);

        let h = 1e-6;
        let mut worst = 0.0f64;
        for i in (0..n).step_by(11) {
            let orig = net.params()[i];
            net.params_mut()[i] = orig + h;
            let up: f64 = net.forward(&input).iter().zip(&w).map(|(o, wi)| o * wi).sum();
            net.params_mut()[i] = orig - h;
            let dn: f64 = net.forward(&input).iter().zip(&w).map(|(o, wi)| o * wi).sum();
            net.params_mut()[i] = orig;
            let fd = (up - dn) / (2.0 * h);
            let denom = fd.abs().max(grad[i].abs()).max(1e-5);
            worst = worst.max((fd - grad[i]).abs() / denom);
        }
        assert!(worst < 1e-6, "worst relative gradient error {worst}");
    }

    #[test]
    fn wrong_param_count_rejected() {
        assert!(Mlp::from_params(&[2, 3], vec![0.0; 8]).is_err());
        assert!(Mlp::from_params(&[2, 3], vec![0.0; 9]).is_ok());
    }
}
