//! Two-hidden-layer ReLU perceptron shared by every scoring head.
//!
//! All weights live in one flat vector so the optimizer and the checkpoint
//! code can treat any head uniformly. Layout, row-major:
//! `w1 (N1×N_IN) | b1 (N1) | w2 (N2×N1) | b2 (N2) | w3 (n_out×N2) | b3 (n_out)`.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2, Axis};
use rand::Rng;

use crate::error::{Error, Result};
use crate::features::N_FEATURES;

pub const N_IN: usize = N_FEATURES;
pub const N1: usize = 64;
pub const N2: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n_out: usize,
    theta: Vec<f64>,
}

/// Borrowed per-layer views into a flat parameter (or gradient) vector.
pub struct Layers<'a> {
    pub w1: ArrayView2<'a, f64>,
    pub b1: ArrayView1<'a, f64>,
    pub w2: ArrayView2<'a, f64>,
    pub b2: ArrayView1<'a, f64>,
    pub w3: ArrayView2<'a, f64>,
    pub b3: ArrayView1<'a, f64>,
}

pub struct LayersMut<'a> {
    pub w1: ArrayViewMut2<'a, f64>,
    pub b1: ArrayViewMut1<'a, f64>,
    pub w2: ArrayViewMut2<'a, f64>,
    pub b2: ArrayViewMut1<'a, f64>,
    pub w3: ArrayViewMut2<'a, f64>,
    pub b3: ArrayViewMut1<'a, f64>,
}

/// Per-layer lengths for an output width.
pub fn layer_sizes(n_out: usize) -> [usize; 6] {
    [N1 * N_IN, N1, N2 * N1, N2, n_out * N2, n_out]
}

pub fn n_params(n_out: usize) -> usize {
    layer_sizes(n_out).iter().sum()
}

pub fn split_layers(theta: &[f64], n_out: usize) -> Layers<'_> {
    let s = layer_sizes(n_out);
    let (w1, rest) = theta.split_at(s[0]);
    let (b1, rest) = rest.split_at(s[1]);
    let (w2, rest) = rest.split_at(s[2]);
    let (b2, rest) = rest.split_at(s[3]);
    let (w3, b3) = rest.split_at(s[4]);
    Layers {
        w1: ArrayView2::from_shape((N1, N_IN), w1).unwrap(),
        b1: ArrayView1::from(b1),
        w2: ArrayView2::from_shape((N2, N1), w2).unwrap(),
        b2: ArrayView1::from(b2),
        w3: ArrayView2::from_shape((n_out, N2), w3).unwrap(),
        b3: ArrayView1::from(b3),
    }
}

pub fn split_layers_mut(theta: &mut [f64], n_out: usize) -> LayersMut<'_> {
    let s = layer_sizes(n_out);
    let (w1, rest) = theta.split_at_mut(s[0]);
    let (b1, rest) = rest.split_at_mut(s[1]);
    let (w2, rest) = rest.split_at_mut(s[2]);
    let (b2, rest) = rest.split_at_mut(s[3]);
    let (w3, b3) = rest.split_at_mut(s[4]);
    LayersMut {
        w1: ArrayViewMut2::from_shape((N1, N_IN), w1).unwrap(),
        b1: ArrayViewMut1::from(b1),
        w2: ArrayViewMut2::from_shape((N2, N1), w2).unwrap(),
        b2: ArrayViewMut1::from(b2),
        w3: ArrayViewMut2::from_shape((n_out, N2), w3).unwrap(),
        b3: ArrayViewMut1::from(b3),
    }
}

/// Hidden activations kept from a batched forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub input: Array2<f64>,
    pub h1: Array2<f64>,
    pub h2: Array2<f64>,
    pub output: Array2<f64>,
}

fn relu_in_place(a: &mut Array2<f64>) {
    a.mapv_inplace(|v| if v > 0.0 { v } else { 0.0 });
}

// ReLU derivative taken as 0 at exactly 0; h = relu(pre) > 0 iff pre > 0.
fn relu_mask(delta: &mut Array2<f64>, h: &Array2<f64>) {
    delta.zip_mut_with(h, |d, &hv| {
        if hv <= 0.0 {
            *d = 0.0
        }
    });
}

impl Network {
    pub fn zeros(n_out: usize) -> Self {
        Self {
            n_out,
            theta: vec![0.0; n_params(n_out)],
        }
    }

    /// Fan-in scaled uniform initialization, `U(-1/√fan_in, 1/√fan_in)` for
    /// weights and biases alike.
    pub fn init<R: Rng + ?Sized>(n_out: usize, rng: &mut R) -> Self {
        let mut net = Self::zeros(n_out);
        let fan_ins = [N_IN, N_IN, N1, N1, N2, N2];
        let mut offset = 0;
        for (len, fan_in) in layer_sizes(n_out).into_iter().zip(fan_ins) {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for v in &mut net.theta[offset..offset + len] {
                *v = bound * (2.0 * rng.random::<f64>() - 1.0);
            }
            offset += len;
        }
        net
    }

    pub fn from_flat(n_out: usize, theta: Vec<f64>) -> Result<Self> {
        let expected = n_params(n_out);
        if theta.len() != expected {
            return Err(Error::Shape {
                expected,
                got: theta.len(),
            });
        }
        Ok(Self { n_out, theta })
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn layers(&self) -> Layers<'_> {
        split_layers(&self.theta, self.n_out)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.theta.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("network parameters"))
        }
    }

    /// Batched forward pass over the rows of `input` (`B × N_IN`).
    pub fn forward(&self, input: Array2<f64>) -> ForwardCache {
        debug_assert_eq!(input.ncols(), N_IN);
        let l = self.layers();
        let mut h1 = input.dot(&l.w1.t());
        h1 += &l.b1;
        relu_in_place(&mut h1);
        let mut h2 = h1.dot(&l.w2.t());
        h2 += &l.b2;
        relu_in_place(&mut h2);
        let mut output = h2.dot(&l.w3.t());
        output += &l.b3;
        ForwardCache {
            input,
            h1,
            h2,
            output,
        }
    }

    /// Accumulates `Σ_rows d_output · ∂output/∂θ` into `grad`.
    pub fn backward(&self, cache: &ForwardCache, d_output: &Array2<f64>, grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), self.theta.len());
        let l = self.layers();
        let g = split_layers_mut(grad, self.n_out);
        let LayersMut {
            mut w1,
            mut b1,
            mut w2,
            mut b2,
            mut w3,
            mut b3,
        } = g;

        general_mat_mul(1.0, &d_output.t(), &cache.h2, 1.0, &mut w3);
        b3 += &d_output.sum_axis(Axis(0));

        let mut d2 = d_output.dot(&l.w3);
        relu_mask(&mut d2, &cache.h2);
        general_mat_mul(1.0, &d2.t(), &cache.h1, 1.0, &mut w2);
        b2 += &d2.sum_axis(Axis(0));

        let mut d1 = d2.dot(&l.w2);
        relu_mask(&mut d1, &cache.h1);
        general_mat_mul(1.0, &d1.t(), &cache.input, 1.0, &mut w1);
        b1 += &d1.sum_axis(Axis(0));
    }
}
