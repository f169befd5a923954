//! Recorded computation tape for one forward/backward cycle.
//!
//! Ops append nodes in execution order, so the tape is topologically sorted
//! by construction; `backward` walks it once in reverse, accumulating
//! gradients additively across fan-out. Inference tapes skip the bookkeeping
//! (dropout becomes the identity, batchnorm uses running statistics) and
//! refuse to backprop.

use super::kernels as k;
use super::Tensor;
use crate::{Error, ImageGrid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorId(usize);

pub use k::PoolMode;

enum BackOp {
    Leaf,
    Conv2d {
        input: TensorId,
        weight: TensorId,
        bias: TensorId,
        stride: usize,
        pad: usize,
    },
    LeakyRelu {
        input: TensorId,
        slope: f32,
    },
    Pool2x2 {
        input: TensorId,
        mode: PoolMode,
        argmax: Vec<u8>,
    },
    Bicubic2x {
        input: TensorId,
    },
    Linear {
        input: TensorId,
        weight: TensorId,
        bias: TensorId,
    },
    GlobalAvgPool {
        input: TensorId,
    },
    BatchNorm {
        input: TensorId,
        gamma: TensorId,
        beta: TensorId,
        saved: k::BatchNormSaved,
    },
    Dropout {
        input: TensorId,
        mask: Vec<u8>,
        scale: f32,
    },
    Sigmoid {
        input: TensorId,
    },
    SmoothL1 {
        pred: TensorId,
        target: TensorId,
        beta: f32,
    },
    AddChannelBias {
        input: TensorId,
        bias: TensorId,
    },
    Reshape {
        input: TensorId,
    },
    WaveletLatent {
        input: TensorId,
        levels: usize,
        shrink: f64,
    },
}

struct Node {
    value: Tensor,
    back: BackOp,
}

pub struct Tape {
    nodes: Vec<Node>,
    grads: Vec<Option<Vec<f32>>>,
    training: bool,
}

impl Tape {
    /// Tape that records backward rules; dropout and batch statistics active.
    pub fn training() -> Self {
        Tape {
            nodes: Vec::new(),
            grads: Vec::new(),
            training: true,
        }
    }

    /// Tape for inference: same forward math minus the stochastic layers;
    /// backward is rejected.
    pub fn inference() -> Self {
        Tape {
            nodes: Vec::new(),
            grads: Vec::new(),
            training: false,
        }
    }

    pub fn is_training(&self) -> bool {
        self.training
    }

    fn push(&mut self, value: Tensor, back: BackOp) -> TensorId {
        let back = if self.training { back } else { BackOp::Leaf };
        self.nodes.push(Node { value, back });
        self.grads.push(None);
        TensorId(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Tensor) -> TensorId {
        self.nodes.push(Node {
            value,
            back: BackOp::Leaf,
        });
        self.grads.push(None);
        TensorId(self.nodes.len() - 1)
    }

    pub fn value(&self, id: TensorId) -> &Tensor {
        &self.nodes[id.0].value
    }

    /// Gradient of a node after `backward`. Disconnected nodes report zeros.
    pub fn grad(&self, id: TensorId) -> Vec<f32> {
        match &self.grads[id.0] {
            Some(g) => g.clone(),
            None => vec![0.0; self.nodes[id.0].value.numel()],
        }
    }

    pub fn conv2d(
        &mut self,
        input: TensorId,
        weight: TensorId,
        bias: TensorId,
        stride: usize,
        pad: usize,
    ) -> Result<TensorId> {
        let out = k::conv2d_forward(
            self.value(input),
            self.value(weight),
            self.value(bias),
            stride,
            pad,
        )?;
        Ok(self.push(
            out,
            BackOp::Conv2d {
                input,
                weight,
                bias,
                stride,
                pad,
            },
        ))
    }

    pub fn leaky_relu(&mut self, input: TensorId, slope: f32) -> TensorId {
        debug_assert!(slope > 0.0 && slope < 1.0, "slope must lie in (0,1)");
        let out = k::leaky_relu_forward(self.value(input), slope);
        self.push(out, BackOp::LeakyRelu { input, slope })
    }

    pub fn pool2x2(&mut self, input: TensorId, mode: PoolMode) -> Result<TensorId> {
        let (out, argmax) = k::pool2x2_forward(self.value(input), mode)?;
        Ok(self.push(out, BackOp::Pool2x2 { input, mode, argmax }))
    }

    pub fn upsample_bicubic2x(&mut self, input: TensorId) -> Result<TensorId> {
        let out = k::bicubic2x_forward(self.value(input))?;
        Ok(self.push(out, BackOp::Bicubic2x { input }))
    }

    pub fn linear(&mut self, input: TensorId, weight: TensorId, bias: TensorId) -> Result<TensorId> {
        let out = k::linear_forward(self.value(input), self.value(weight), self.value(bias))?;
        Ok(self.push(out, BackOp::Linear { input, weight, bias }))
    }

    pub fn global_avg_pool(&mut self, input: TensorId) -> Result<TensorId> {
        let out = k::global_avg_pool_forward(self.value(input))?;
        Ok(self.push(out, BackOp::GlobalAvgPool { input }))
    }

    /// Batchnorm with external running statistics; training tapes normalize
    /// with batch statistics and update the running buffers in place.
    #[allow(clippy::too_many_arguments)]
    pub fn batchnorm2d(
        &mut self,
        input: TensorId,
        gamma: TensorId,
        beta: TensorId,
        eps: f32,
        momentum: f32,
        running_mean: &mut [f32],
        running_var: &mut [f32],
    ) -> Result<TensorId> {
        if self.training {
            let (out, saved) = k::batchnorm_train_forward(
                self.value(input),
                self.value(gamma),
                self.value(beta),
                eps,
                momentum,
                running_mean,
                running_var,
            )?;
            Ok(self.push(
                out,
                BackOp::BatchNorm {
                    input,
                    gamma,
                    beta,
                    saved,
                },
            ))
        } else {
            let out = k::batchnorm_eval_forward(
                self.value(input),
                self.value(gamma),
                self.value(beta),
                eps,
                running_mean,
                running_var,
            )?;
            Ok(self.push(out, BackOp::Leaf))
        }
    }

    /// Dropout is the identity on inference tapes, bit for bit.
    pub fn dropout(
        &mut self,
        input: TensorId,
        p: f32,
        rng: &mut impl rand::Rng,
    ) -> Result<TensorId> {
        if !self.training || p == 0.0 {
            let out = self.value(input).clone();
            return Ok(self.push(out, BackOp::Reshape { input }));
        }
        let (out, mask, scale) = k::dropout_forward(self.value(input), p, rng)?;
        Ok(self.push(out, BackOp::Dropout { input, mask, scale }))
    }

    pub fn sigmoid(&mut self, input: TensorId) -> TensorId {
        let out = k::sigmoid_forward(self.value(input));
        self.push(out, BackOp::Sigmoid { input })
    }

    pub fn smooth_l1(&mut self, pred: TensorId, target: TensorId, beta: f32) -> Result<TensorId> {
        let out = k::smooth_l1_forward(self.value(pred), self.value(target), beta)?;
        Ok(self.push(out, BackOp::SmoothL1 { pred, target, beta }))
    }

    pub fn add_channel_bias(&mut self, input: TensorId, bias: TensorId) -> Result<TensorId> {
        let out = k::add_channel_bias_forward(self.value(input), self.value(bias))?;
        Ok(self.push(out, BackOp::AddChannelBias { input, bias }))
    }

    pub fn reshape(&mut self, input: TensorId, shape: Vec<usize>) -> Result<TensorId> {
        let t = self.value(input);
        if shape.iter().product::<usize>() != t.numel() {
            return Err(Error::shape(
                "reshape",
                format!("{:?} cannot view as {:?}", t.shape(), shape),
            ));
        }
        let out = Tensor::from_vec(shape, t.data().to_vec())?;
        Ok(self.push(out, BackOp::Reshape { input }))
    }

    /// Per-channel wavelet analysis/synthesis roundtrip with optional
    /// soft-thresholded details; gradients flow through the exact adjoints.
    pub fn wavelet_latent(
        &mut self,
        input: TensorId,
        levels: usize,
        shrink: f64,
    ) -> Result<TensorId> {
        let x = self.value(input);
        let (b, c, h, w) = x.dims4("wavelet_latent input")?;
        let div = 1usize << levels;
        if h % div != 0 || w % div != 0 {
            return Err(Error::invalid(
                "wavelet_latent",
                format!("spatial extent {h}x{w} not divisible by 2^{levels}"),
            ));
        }
        let mut out = vec![0.0f32; x.numel()];
        for (dst, src) in out.chunks_mut(h * w).zip(x.data().chunks(h * w)) {
            let plane =
                ImageGrid::from_pixels(w, h, src.iter().map(|&v| v as f64).collect())?;
            let y = crate::wavelet::latent_roundtrip(&plane, levels, shrink)?;
            for (d, &v) in dst.iter_mut().zip(y.pixels()) {
                *d = v as f32;
            }
        }
        let out = Tensor::from_vec(vec![b, c, h, w], out)?;
        Ok(self.push(out, BackOp::WaveletLatent { input, levels, shrink }))
    }

    fn acc(grads: &mut [Option<Vec<f32>>], id: TensorId, contribution: &[f32]) {
        match &mut grads[id.0] {
            Some(g) => {
                for (a, b) in g.iter_mut().zip(contribution) {
                    *a += b;
                }
            }
            slot @ None => *slot = Some(contribution.to_vec()),
        }
    }

    /// Reverse pass from a scalar loss node. Visits each recorded op exactly
    /// once; leaf gradients survive, interior gradients are freed as they
    /// are consumed.
    pub fn backward(&mut self, loss: TensorId) -> Result<()> {
        if !self.training {
            return Err(Error::invalid(
                "backward",
                "cannot backpropagate through an inference tape",
            ));
        }
        if self.nodes[loss.0].value.numel() != 1 {
            return Err(Error::invalid(
                "backward",
                format!("loss must be scalar, got {:?}", self.nodes[loss.0].value.shape()),
            ));
        }
        self.grads[loss.0] = Some(vec![1.0]);
        for i in (0..=loss.0).rev() {
            let g = match &self.nodes[i].back {
                BackOp::Leaf => continue,
                _ => match self.grads[i].take() {
                    Some(g) => g,
                    None => continue, // node not on the path to the loss
                },
            };
            let nodes = &self.nodes;
            let grads = &mut self.grads;
            match &nodes[i].back {
                BackOp::Leaf => unreachable!(),
                BackOp::Conv2d {
                    input,
                    weight,
                    bias,
                    stride,
                    pad,
                } => {
                    let s = k::conv_shape(
                        &nodes[input.0].value,
                        &nodes[weight.0].value,
                        &nodes[bias.0].value,
                        *stride,
                        *pad,
                    )?;
                    let gr = k::conv2d_backward(&nodes[input.0].value, &nodes[weight.0].value, &g, &s);
                    Self::acc(grads, *input, &gr.input);
                    Self::acc(grads, *weight, &gr.weight);
                    Self::acc(grads, *bias, &gr.bias);
                }
                BackOp::LeakyRelu { input, slope } => {
                    let gx = k::leaky_relu_backward(&nodes[input.0].value, *slope, &g);
                    Self::acc(grads, *input, &gx);
                }
                BackOp::Pool2x2 { input, mode, argmax } => {
                    let gx = k::pool2x2_backward(nodes[input.0].value.shape(), *mode, argmax, &g);
                    Self::acc(grads, *input, &gx);
                }
                BackOp::Bicubic2x { input } => {
                    let gx = k::bicubic2x_backward(nodes[input.0].value.shape(), &g);
                    Self::acc(grads, *input, &gx);
                }
                BackOp::Linear { input, weight, bias } => {
                    let gr = k::linear_backward(&nodes[input.0].value, &nodes[weight.0].value, &g);
                    Self::acc(grads, *input, &gr.input);
                    Self::acc(grads, *weight, &gr.weight);
                    Self::acc(grads, *bias, &gr.bias);
                }
                BackOp::GlobalAvgPool { input } => {
                    let gx = k::global_avg_pool_backward(nodes[input.0].value.shape(), &g);
                    Self::acc(grads, *input, &gx);
                }
                BackOp::BatchNorm {
                    input,
                    gamma,
                    beta,
                    saved,
                } => {
                    let gr = k::batchnorm_backward(
                        nodes[input.0].value.shape(),
                        &nodes[gamma.0].value,
                        saved,
                        &g,
                    );
                    Self::acc(grads, *input, &gr.input);
                    Self::acc(grads, *gamma, &gr.gamma);
                    Self::acc(grads, *beta, &gr.beta);
                }
                BackOp::Dropout { input, mask, scale } => {
                    let gx = k::dropout_backward(mask, *scale, &g);
                    Self::acc(grads, *input, &gx);
                }
                BackOp::Sigmoid { input } => {
                    let gx = k::sigmoid_backward(&nodes[i].value, &g);
                    Self::acc(grads, *input, &gx);
                }
                BackOp::SmoothL1 { pred, target, beta } => {
                    let (gp, gt) =
                        k::smooth_l1_backward(&nodes[pred.0].value, &nodes[target.0].value, *beta, g[0]);
                    Self::acc(grads, *pred, &gp);
                    Self::acc(grads, *target, &gt);
                }
                BackOp::AddChannelBias { input, bias } => {
                    let (gx, gb) = k::add_channel_bias_backward(nodes[input.0].value.shape(), &g);
                    Self::acc(grads, *input, &gx);
                    Self::acc(grads, *bias, &gb);
                }
                BackOp::Reshape { input } => {
                    Self::acc(grads, *input, &g);
                }
                BackOp::WaveletLatent { input, levels, shrink } => {
                    let x = &nodes[input.0].value;
                    let (_, _, h, w) = x.dims4("wavelet_latent backward")?;
                    let mut gx = vec![0.0f32; x.numel()];
                    for (gin, (gout, src)) in gx
                        .chunks_mut(h * w)
                        .zip(g.chunks(h * w).zip(x.data().chunks(h * w)))
                    {
                        let plane =
                            ImageGrid::from_pixels(w, h, src.iter().map(|&v| v as f64).collect())?;
                        let g_plane =
                            ImageGrid::from_pixels(w, h, gout.iter().map(|&v| v as f64).collect())?;
                        let gi = crate::wavelet::latent_roundtrip_backward(
                            &plane, &g_plane, *levels, *shrink,
                        )?;
                        for (d, &v) in gin.iter_mut().zip(gi.pixels()) {
                            *d = v as f32;
                        }
                    }
                    Self::acc(grads, *input, &gx);
                }
            }
        }
        Ok(())
    }
}
