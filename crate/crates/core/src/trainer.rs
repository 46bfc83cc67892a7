//! Shallow hashing embedding: nu(x) = tanh(L^T q(x) + b), trained by
//! minibatch gradient descent with momentum against a fixed proxy set.
//!
//! Losses: softmax cross-entropy over proxy dot products (single label),
//! balanced binary cross-entropy (multi label), and a logistic triplet
//! loss on the continuous Hamming surrogate d_H = (d - nu_i' nu_j)/2.
//! All gradients are closed form; the proxy matrix receives no gradient
//! unless the trainable-proxy flag (the "learned" baseline) is set.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitMatrix;
use crate::data::{Annotations, FeatureDataset};
use crate::error::{Error, Result};
use crate::proxy::{ProxyKind, ProxySet};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Trade-off between proxy and triplet terms; 0 disables triplets.
    pub lambda: f64,
    /// Triplet margin in bits.
    pub triplet_margin: f64,
    /// Applied to single-label logits only.
    pub logit_scale: f64,
    /// Per-tag balance weights c_k in [0,1]; derived from tag frequencies
    /// (c_k = 1 - f_k) when absent.
    pub balance_weights: Option<Vec<f64>>,
    pub seed: u64,
    /// Release the proxy gradient; only legal for learned-kind proxies.
    pub train_proxies: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 50,
            learning_rate: 0.01,
            momentum: 0.9,
            lambda: 1.0,
            triplet_margin: 2.0,
            logit_scale: 1.0,
            balance_weights: None,
            seed: 0,
            train_proxies: false,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(Error::InvalidArgument("lambda must be >= 0".into()));
        }
        if self.triplet_margin < 0.0 {
            return Err(Error::InvalidArgument("triplet margin must be >= 0".into()));
        }
        if self.lambda > 0.0 && self.batch_size < 2 {
            return Err(Error::InvalidArgument(
                "batch_size must be >= 2 when the triplet loss is enabled".into(),
            ));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidArgument(
                "epochs and batch_size must be >= 1".into(),
            ));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidArgument("learning rate must be > 0".into()));
        }
        if let Some(w) = &self.balance_weights {
            if w.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::InvalidArgument(
                    "balance weights must lie in [0,1]".into(),
                ));
            }
        }
        Ok(())
    }
}

/// The trainable object: projection, bias, and the (fixed) proxy set.
#[derive(Debug, Clone, PartialEq)]
pub struct HashingLayer {
    projection: DMatrix<f64>,
    bias: DVector<f64>,
    proxies: ProxySet,
}

impl HashingLayer {
    pub fn new(projection: DMatrix<f64>, bias: DVector<f64>, proxies: ProxySet) -> Result<Self> {
        if projection.ncols() != proxies.dim() {
            return Err(Error::Dimension {
                context: "projection output vs proxy dimension",
                expected: proxies.dim(),
                actual: projection.ncols(),
            });
        }
        if bias.len() != proxies.dim() {
            return Err(Error::Dimension {
                context: "bias length vs proxy dimension",
                expected: proxies.dim(),
                actual: bias.len(),
            });
        }
        Ok(HashingLayer {
            projection,
            bias,
            proxies,
        })
    }

    /// Initialization used by `train`: L ~ N(0, 1/D), bias zero.
    pub fn init(input_dim: usize, proxies: ProxySet, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let std = (1.0 / input_dim as f64).sqrt();
        let d = proxies.dim();
        let projection = DMatrix::from_fn(input_dim, d, |_, _| {
            let g: f64 = rng.sample(rand_distr::StandardNormal);
            g * std
        });
        HashingLayer {
            projection,
            bias: DVector::zeros(d),
            proxies,
        }
    }

    pub fn projection(&self) -> &DMatrix<f64> {
        &self.projection
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    pub fn proxies(&self) -> &ProxySet {
        &self.proxies
    }

    pub fn input_dim(&self) -> usize {
        self.projection.nrows()
    }

    pub fn code_dim(&self) -> usize {
        self.projection.ncols()
    }

    /// nu(x) = tanh(L^T q + b), elementwise in (-1, 1).
    pub fn forward(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        if q.len() != self.input_dim() {
            return Err(Error::Dimension {
                context: "forward input dimension",
                expected: self.input_dim(),
                actual: q.len(),
            });
        }
        let mut a = self.projection.tr_mul(q);
        a += &self.bias;
        Ok(a.map(f64::tanh))
    }

    pub fn forward_sample(&self, data: &FeatureDataset, i: usize) -> Result<DVector<f64>> {
        self.forward(&data.feature_f64(i))
    }
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn log_sum_exp(z: &DVector<f64>) -> f64 {
    let m = z.max();
    m + z.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
}

/// -log softmax_y of the scaled proxy dot products.
pub fn proxy_loss_single(
    nu: &DVector<f64>,
    label: usize,
    w: &ProxySet,
    logit_scale: f64,
) -> Result<f64> {
    if nu.len() != w.dim() {
        return Err(Error::Dimension {
            context: "embedding vs proxy dimension",
            expected: w.dim(),
            actual: nu.len(),
        });
    }
    if label >= w.class_count() {
        return Err(Error::InvalidArgument(format!(
            "label {label} out of range for {} classes",
            w.class_count()
        )));
    }
    let z = w.columns().tr_mul(nu) * logit_scale;
    Ok(log_sum_exp(&z) - z[label])
}

/// Balanced binary cross-entropy with s_k = sigmoid(w_k' nu):
/// -sum_k [c_k t_k log s_k + (1-c_k)(1-t_k) log(1-s_k)].
pub fn proxy_loss_multi(
    nu: &DVector<f64>,
    tags: &[bool],
    w: &ProxySet,
    weights: &[f64],
) -> Result<f64> {
    if nu.len() != w.dim() {
        return Err(Error::Dimension {
            context: "embedding vs proxy dimension",
            expected: w.dim(),
            actual: nu.len(),
        });
    }
    if tags.len() != w.class_count() || weights.len() != w.class_count() {
        return Err(Error::Dimension {
            context: "tags/weights vs proxy count",
            expected: w.class_count(),
            actual: tags.len().min(weights.len()),
        });
    }
    let u = w.columns().tr_mul(nu);
    let mut loss = 0.0;
    for k in 0..tags.len() {
        // log sigmoid(u) = -softplus(-u); log(1 - sigmoid(u)) = -softplus(u)
        if tags[k] {
            loss += weights[k] * softplus(-u[k]);
        } else {
            loss += (1.0 - weights[k]) * softplus(u[k]);
        }
    }
    Ok(loss)
}

/// Continuous Hamming surrogate: (d - nu_i' nu_j) / 2.
pub fn hamming_surrogate(a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            context: "hamming surrogate operands",
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(0.5 * (a.len() as f64 - a.dot(b)))
}

/// log(1 + exp(m + d_H(a,p) - d_H(a,n))), softplus-stabilized.
pub fn triplet_loss(
    anchor: &DVector<f64>,
    positive: &DVector<f64>,
    negative: &DVector<f64>,
    margin: f64,
) -> Result<f64> {
    let dp = hamming_surrogate(anchor, positive)?;
    let dn = hamming_surrogate(anchor, negative)?;
    Ok(softplus(margin + dp - dn))
}

/// Sample indices into the dataset; positive shares the anchor's class
/// (or at least one tag), negative shares none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet {
    pub anchor: usize,
    pub positive: usize,
    pub negative: usize,
}

/// One triplet per anchor that has both a positive and a negative inside
/// the batch, chosen uniformly; anchors without either are skipped.
pub fn sample_triplets(data: &FeatureDataset, batch: &[usize], seed: u64) -> Vec<Triplet> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    for (pos, &anchor) in batch.iter().enumerate() {
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        for (other_pos, &other) in batch.iter().enumerate() {
            if other_pos == pos {
                continue;
            }
            if data.relevant(anchor, other) {
                positives.push(other);
            } else {
                negatives.push(other);
            }
        }
        if positives.is_empty() || negatives.is_empty() {
            continue;
        }
        let p = positives[rng.gen_range(0..positives.len())];
        let n = negatives[rng.gen_range(0..negatives.len())];
        out.push(Triplet {
            anchor,
            positive: p,
            negative: n,
        });
    }
    out
}

/// c_k = 1 - f_k where f_k is the fraction of samples carrying tag k.
pub fn tag_balance_weights(tags: &BitMatrix) -> Vec<f64> {
    let n = tags.rows() as f64;
    (0..tags.cols())
        .map(|k| 1.0 - tags.count_ones_in_col(k) as f64 / n)
        .collect()
}

fn resolve_balance_weights(data: &FeatureDataset, cfg: &TrainConfig) -> Result<Option<Vec<f64>>> {
    match data.annotations() {
        Annotations::Labels { .. } => Ok(None),
        Annotations::Tags(t) => {
            let w = match &cfg.balance_weights {
                Some(w) => {
                    if w.len() != t.cols() {
                        return Err(Error::Dimension {
                            context: "balance weights vs tag count",
                            expected: t.cols(),
                            actual: w.len(),
                        });
                    }
                    w.clone()
                }
                None => tag_balance_weights(t),
            };
            Ok(Some(w))
        }
    }
}

fn tags_row(t: &BitMatrix, i: usize) -> Vec<bool> {
    (0..t.cols()).map(|k| t.get(i, k)).collect()
}

/// Mean proxy loss over the batch plus lambda times the mean triplet
/// loss over the given triplets (0, with a warning, when none exist).
pub fn joint_loss(
    layer: &HashingLayer,
    data: &FeatureDataset,
    batch: &[usize],
    triplets: &[Triplet],
    cfg: &TrainConfig,
) -> Result<f64> {
    cfg.validate()?;
    let weights = resolve_balance_weights(data, cfg)?;
    let mut embeddings = std::collections::HashMap::new();
    let mut proxy_total = 0.0;
    for &i in batch {
        let nu = layer.forward_sample(data, i)?;
        proxy_total += sample_proxy_loss(&nu, data, i, layer.proxies(), cfg, weights.as_deref())?;
        embeddings.insert(i, nu);
    }
    let mut loss = proxy_total / batch.len() as f64;
    if cfg.lambda > 0.0 {
        if triplets.is_empty() {
            log::warn!("triplet term enabled but the batch contains no valid triplet");
        } else {
            let mut t_total = 0.0;
            for t in triplets {
                for idx in [t.anchor, t.positive, t.negative] {
                    if !embeddings.contains_key(&idx) {
                        embeddings.insert(idx, layer.forward_sample(data, idx)?);
                    }
                }
                t_total += triplet_loss(
                    &embeddings[&t.anchor],
                    &embeddings[&t.positive],
                    &embeddings[&t.negative],
                    cfg.triplet_margin,
                )?;
            }
            loss += cfg.lambda * t_total / triplets.len() as f64;
        }
    }
    Ok(loss)
}

fn sample_proxy_loss(
    nu: &DVector<f64>,
    data: &FeatureDataset,
    i: usize,
    w: &ProxySet,
    cfg: &TrainConfig,
    weights: Option<&[f64]>,
) -> Result<f64> {
    match data.annotations() {
        Annotations::Labels { labels, .. } => {
            proxy_loss_single(nu, labels[i], w, cfg.logit_scale)
        }
        Annotations::Tags(t) => {
            proxy_loss_multi(nu, &tags_row(t, i), w, weights.expect("weights resolved"))
        }
    }
}

/// Analytic gradients of the joint loss with respect to the projection
/// and bias. The proxy matrix is absent by construction.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub projection: DMatrix<f64>,
    pub bias: DVector<f64>,
}

pub fn gradients(
    layer: &HashingLayer,
    data: &FeatureDataset,
    batch: &[usize],
    triplets: &[Triplet],
    cfg: &TrainConfig,
) -> Result<Gradients> {
    let (g, _) = gradients_impl(layer, data, batch, triplets, cfg, false)?;
    Ok(g)
}

/// Full backprop; optionally also the proxy-matrix gradient (internal,
/// for the learned-proxy baseline only).
fn gradients_impl(
    layer: &HashingLayer,
    data: &FeatureDataset,
    batch: &[usize],
    triplets: &[Triplet],
    cfg: &TrainConfig,
    with_proxy_grad: bool,
) -> Result<(Gradients, Option<DMatrix<f64>>)> {
    cfg.validate()?;
    let weights = resolve_balance_weights(data, cfg)?;
    let w = layer.proxies().columns();
    let dim_in = layer.input_dim();
    let dim_out = layer.code_dim();
    let b_count = batch.len() as f64;

    // Embeddings and dL/dnu accumulators for every sample involved.
    let mut involved: Vec<usize> = batch.to_vec();
    for t in triplets {
        involved.extend_from_slice(&[t.anchor, t.positive, t.negative]);
    }
    involved.sort_unstable();
    involved.dedup();
    let mut nu_of = std::collections::HashMap::new();
    let mut dnu_of: std::collections::HashMap<usize, DVector<f64>> = std::collections::HashMap::new();
    for &i in &involved {
        nu_of.insert(i, layer.forward_sample(data, i)?);
        dnu_of.insert(i, DVector::zeros(dim_out));
    }

    let mut proxy_grad = with_proxy_grad.then(|| DMatrix::zeros(dim_out, w.ncols()));

    // Proxy term, mean over the batch.
    for &i in batch {
        let nu = &nu_of[&i];
        match data.annotations() {
            Annotations::Labels { labels, .. } => {
                let z = w.tr_mul(nu) * cfg.logit_scale;
                let m = z.max();
                let mut p = z.map(|v| (v - m).exp());
                p /= p.sum();
                p[labels[i]] -= 1.0;
                // dL/dnu = scale * W p / B
                let contrib = w * &p * (cfg.logit_scale / b_count);
                *dnu_of.get_mut(&i).unwrap() += contrib;
                if let Some(pg) = proxy_grad.as_mut() {
                    // dL/dW = scale * nu p^T / B
                    *pg += nu * p.transpose() * (cfg.logit_scale / b_count);
                }
            }
            Annotations::Tags(t) => {
                let cks = weights.as_deref().expect("weights resolved");
                let u = w.tr_mul(nu);
                let mut dvec = DVector::zeros(u.len());
                for k in 0..u.len() {
                    dvec[k] = if t.get(i, k) {
                        -cks[k] * sigmoid(-u[k])
                    } else {
                        (1.0 - cks[k]) * sigmoid(u[k])
                    };
                }
                let contrib = w * &dvec / b_count;
                *dnu_of.get_mut(&i).unwrap() += contrib;
                if let Some(pg) = proxy_grad.as_mut() {
                    *pg += nu * dvec.transpose() / b_count;
                }
            }
        }
    }

    // Triplet term, mean over triplets, weighted by lambda.
    if cfg.lambda > 0.0 && !triplets.is_empty() {
        let scale = cfg.lambda / triplets.len() as f64;
        for t in triplets {
            let (na, np, nn) = (&nu_of[&t.anchor], &nu_of[&t.positive], &nu_of[&t.negative]);
            // s = m + (na'nn - na'np)/2, dL/ds = sigmoid(s)
            let s = cfg.triplet_margin + 0.5 * (na.dot(nn) - na.dot(np));
            let g = sigmoid(s) * scale;
            *dnu_of.get_mut(&t.anchor).unwrap() += (nn - np) * (0.5 * g);
            *dnu_of.get_mut(&t.positive).unwrap() += na * (-0.5 * g);
            *dnu_of.get_mut(&t.negative).unwrap() += na * (0.5 * g);
        }
    }

    // Through tanh and the affine map.
    let mut proj_grad = DMatrix::zeros(dim_in, dim_out);
    let mut bias_grad = DVector::zeros(dim_out);
    for &i in &involved {
        let nu = &nu_of[&i];
        let dnu = &dnu_of[&i];
        let da = DVector::from_fn(dim_out, |j, _| dnu[j] * (1.0 - nu[j] * nu[j]));
        bias_grad += &da;
        let q = data.feature_f64(i);
        proj_grad += q * da.transpose();
    }

    Ok((
        Gradients {
            projection: proj_grad,
            bias: bias_grad,
        },
        proxy_grad,
    ))
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub layer: HashingLayer,
    /// Mean joint loss per epoch (sample-weighted over batches).
    pub epoch_losses: Vec<f64>,
}

/// Minibatch gradient descent with momentum against the fixed proxies;
/// step decay x0.1 at two thirds of the epochs, deterministic per seed.
pub fn train(data: &FeatureDataset, proxies: &ProxySet, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    match data.annotations() {
        Annotations::Labels { class_count, .. } => {
            if *class_count != proxies.class_count() {
                return Err(Error::Dimension {
                    context: "class count vs proxy count",
                    expected: proxies.class_count(),
                    actual: *class_count,
                });
            }
        }
        Annotations::Tags(t) => {
            if t.cols() != proxies.class_count() {
                return Err(Error::Dimension {
                    context: "tag count vs proxy count",
                    expected: proxies.class_count(),
                    actual: t.cols(),
                });
            }
        }
    }
    if cfg.train_proxies && proxies.kind() != ProxyKind::Learned {
        return Err(Error::InvalidArgument(
            "trainable proxies are reserved for the learned baseline".into(),
        ));
    }

    let mut layer = HashingLayer::init(data.dim(), proxies.clone(), derive_seed(cfg.seed, 0));
    let mut vel_proj = DMatrix::<f64>::zeros(layer.input_dim(), layer.code_dim());
    let mut vel_bias = DVector::<f64>::zeros(layer.code_dim());
    let mut vel_proxy = DMatrix::<f64>::zeros(layer.code_dim(), proxies.class_count());

    let decay_epoch = (2 * cfg.epochs).div_ceil(3);
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut indices: Vec<usize> = (0..data.len()).collect();

    for epoch in 0..cfg.epochs {
        let lr = if epoch >= decay_epoch {
            cfg.learning_rate * 0.1
        } else {
            cfg.learning_rate
        };
        let mut shuffle_rng = rng_from_seed(derive_seed(cfg.seed, 1 + epoch as u64));
        indices.shuffle(&mut shuffle_rng);

        let mut loss_sum = 0.0;
        for (batch_idx, batch) in indices.chunks(cfg.batch_size).enumerate() {
            let triplets = if cfg.lambda > 0.0 {
                let ts = derive_seed(
                    derive_seed(cfg.seed, 2 + epoch as u64),
                    batch_idx as u64,
                );
                sample_triplets(data, batch, ts)
            } else {
                Vec::new()
            };
            let loss = joint_loss(&layer, data, batch, &triplets, cfg)?;
            if !loss.is_finite() {
                return Err(Error::Diverged(format!(
                    "non-finite loss {loss} at epoch {epoch}, batch {batch_idx}"
                )));
            }
            loss_sum += loss * batch.len() as f64;

            let (grads, proxy_grad) =
                gradients_impl(&layer, data, batch, &triplets, cfg, cfg.train_proxies)?;
            vel_proj = &vel_proj * cfg.momentum - &grads.projection * lr;
            vel_bias = &vel_bias * cfg.momentum - &grads.bias * lr;
            layer.projection += &vel_proj;
            layer.bias += &vel_bias;
            if let Some(pg) = proxy_grad {
                vel_proxy = &vel_proxy * cfg.momentum - pg * lr;
                let updated = layer.proxies.columns() + &vel_proxy;
                layer.proxies =
                    ProxySet::new(updated, ProxyKind::Learned, layer.proxies.norm_constant())?;
            }
        }
        epoch_losses.push(loss_sum / data.len() as f64);
    }

    Ok(TrainOutcome {
        layer,
        epoch_losses,
    })
}

/// Softmax regression over +-1 code vectors.
#[derive(Debug, Clone)]
pub struct CodeClassifier {
    weights: DMatrix<f64>,
    bias: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct ClassifierConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            epochs: 300,
            learning_rate: 0.5,
            momentum: 0.9,
        }
    }
}

fn code_vector(codes: &BitMatrix, i: usize) -> DVector<f64> {
    DVector::from_fn(codes.cols(), |j, _| if codes.get(i, j) { 1.0 } else { -1.0 })
}

impl CodeClassifier {
    pub fn class_count(&self) -> usize {
        self.weights.ncols()
    }

    pub fn predict(&self, code: &DVector<f64>) -> usize {
        let z = self.weights.tr_mul(code) + &self.bias;
        let mut best = 0;
        for k in 1..z.len() {
            if z[k] > z[best] {
                best = k;
            }
        }
        best
    }

    pub fn accuracy(&self, codes: &BitMatrix, labels: &[usize]) -> Result<f64> {
        if codes.rows() != labels.len() {
            return Err(Error::Dimension {
                context: "codes vs labels",
                expected: codes.rows(),
                actual: labels.len(),
            });
        }
        let hits = (0..codes.rows())
            .filter(|&i| self.predict(&code_vector(codes, i)) == labels[i])
            .count();
        Ok(hits as f64 / codes.rows() as f64)
    }

    /// Mean cross-entropy and its gradients on a code set (full batch).
    fn loss_and_grads(
        &self,
        codes: &BitMatrix,
        labels: &[usize],
    ) -> (f64, DMatrix<f64>, DVector<f64>) {
        let n = codes.rows() as f64;
        let mut loss = 0.0;
        let mut gw = DMatrix::zeros(self.weights.nrows(), self.weights.ncols());
        let mut gb = DVector::zeros(self.bias.len());
        for i in 0..codes.rows() {
            let x = code_vector(codes, i);
            let z = self.weights.tr_mul(&x) + &self.bias;
            loss += log_sum_exp(&z) - z[labels[i]];
            let m = z.max();
            let mut p = z.map(|v| (v - m).exp());
            p /= p.sum();
            p[labels[i]] -= 1.0;
            gw += &x * p.transpose() / n;
            gb += p / n;
        }
        (loss / n, gw, gb)
    }
}

/// Multinomial logistic regression on hash codes by full-batch gradient
/// descent with momentum. Rejects single-class inputs.
pub fn train_code_classifier(
    codes: &BitMatrix,
    labels: &[usize],
    class_count: usize,
    cfg: &ClassifierConfig,
) -> Result<CodeClassifier> {
    if codes.rows() != labels.len() {
        return Err(Error::Dimension {
            context: "codes vs labels",
            expected: codes.rows(),
            actual: labels.len(),
        });
    }
    if codes.rows() == 0 {
        return Err(Error::InvalidArgument("no codes to train on".into()));
    }
    if class_count < 2 {
        return Err(Error::InvalidArgument(
            "classifier needs at least 2 classes".into(),
        ));
    }
    let mut seen = vec![false; class_count];
    for &l in labels {
        if l >= class_count {
            return Err(Error::InvalidArgument(format!(
                "label {l} out of range for {class_count} classes"
            )));
        }
        seen[l] = true;
    }
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(Error::InvalidArgument(
            "classifier training needs samples from at least 2 classes".into(),
        ));
    }

    let mut clf = CodeClassifier {
        weights: DMatrix::zeros(codes.cols(), class_count),
        bias: DVector::zeros(class_count),
    };
    let mut vw = DMatrix::<f64>::zeros(codes.cols(), class_count);
    let mut vb = DVector::<f64>::zeros(class_count);
    for _ in 0..cfg.epochs {
        let (loss, gw, gb) = clf.loss_and_grads(codes, labels);
        if !loss.is_finite() {
            return Err(Error::Diverged("code classifier loss is non-finite".into()));
        }
        vw = &vw * cfg.momentum - gw * cfg.learning_rate;
        vb = &vb * cfg.momentum - gb * cfg.learning_rate;
        clf.weights += &vw;
        clf.bias += &vb;
    }
    Ok(clf)
}
