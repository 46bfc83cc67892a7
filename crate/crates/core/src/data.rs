//! Feature datasets: n feature vectors with either one class label per
//! sample or a binary tag vector per sample, plus the hierarchical
//! Gaussian generator used for desk-scale experiments.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::rng::{gaussian_matrix, gaussian_vector, rng_from_seed};

/// Per-sample annotation: exactly one of the two is present.
#[derive(Debug, Clone, PartialEq)]
pub enum Annotations {
    /// 0-based class labels (the text file format is 1-based).
    Labels { labels: Vec<usize>, class_count: usize },
    /// n x T binary tag matrix; every row has at least one tag.
    Tags(BitMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitRole {
    Train,
    Database,
    Query,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    n: usize,
    dim: usize,
    /// Row-major n x dim.
    features: Vec<f32>,
    annotations: Annotations,
    splits: Option<Vec<SplitRole>>,
}

impl FeatureDataset {
    pub fn with_labels(
        features: Vec<f32>,
        dim: usize,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        let n = labels.len();
        Self::check_features(&features, n, dim)?;
        if class_count == 0 {
            return Err(Error::InvalidArgument("class count must be >= 1".into()));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= class_count) {
            return Err(Error::InvalidArgument(format!(
                "sample {i} has label {} but only {class_count} classes exist",
                l + 1
            )));
        }
        Ok(FeatureDataset {
            n,
            dim,
            features,
            annotations: Annotations::Labels {
                labels,
                class_count,
            },
            splits: None,
        })
    }

    pub fn with_tags(features: Vec<f32>, dim: usize, tags: BitMatrix) -> Result<Self> {
        let n = tags.rows();
        Self::check_features(&features, n, dim)?;
        if tags.cols() == 0 {
            return Err(Error::InvalidArgument("tag matrix has no columns".into()));
        }
        if let Some(i) = (0..n).find(|&i| tags.count_ones_in_row(i) == 0) {
            return Err(Error::InvalidArgument(format!(
                "sample {i} carries no tags"
            )));
        }
        Ok(FeatureDataset {
            n,
            dim,
            features,
            annotations: Annotations::Tags(tags),
            splits: None,
        })
    }

    fn check_features(features: &[f32], n: usize, dim: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("dataset must be non-empty".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("feature dim must be >= 1".into()));
        }
        if features.len() != n * dim {
            return Err(Error::Dimension {
                context: "feature buffer length vs n*dim",
                expected: n * dim,
                actual: features.len(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn feature_row(&self, i: usize) -> &[f32] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn feature_f64(&self, i: usize) -> DVector<f64> {
        DVector::from_iterator(self.dim, self.feature_row(i).iter().map(|&v| v as f64))
    }

    pub fn annotations(&self) -> &Annotations {
        &self.annotations
    }

    pub fn labels(&self) -> Option<&[usize]> {
        match &self.annotations {
            Annotations::Labels { labels, .. } => Some(labels),
            Annotations::Tags(_) => None,
        }
    }

    pub fn class_count(&self) -> Option<usize> {
        match &self.annotations {
            Annotations::Labels { class_count, .. } => Some(*class_count),
            Annotations::Tags(_) => None,
        }
    }

    pub fn tags(&self) -> Option<&BitMatrix> {
        match &self.annotations {
            Annotations::Tags(t) => Some(t),
            Annotations::Labels { .. } => None,
        }
    }

    pub fn tag_count(&self) -> Option<usize> {
        self.tags().map(|t| t.cols())
    }

    /// Number of proxy slots: classes for labeled data, tags for tagged
    /// data (proxies are assigned per tag in multi-label mode).
    pub fn proxy_slots(&self) -> usize {
        match &self.annotations {
            Annotations::Labels { class_count, .. } => *class_count,
            Annotations::Tags(t) => t.cols(),
        }
    }

    /// Two samples are relevant to each other when they share the class
    /// label, or at least one tag.
    pub fn relevant(&self, i: usize, j: usize) -> bool {
        match &self.annotations {
            Annotations::Labels { labels, .. } => labels[i] == labels[j],
            Annotations::Tags(t) => t.rows_intersect(i, j),
        }
    }

    pub fn splits(&self) -> Option<&[SplitRole]> {
        self.splits.as_deref()
    }

    pub fn set_splits(&mut self, splits: Vec<SplitRole>) -> Result<()> {
        if splits.len() != self.n {
            return Err(Error::Dimension {
                context: "split assignment length",
                expected: self.n,
                actual: splits.len(),
            });
        }
        self.splits = Some(splits);
        Ok(())
    }

    pub fn role_indices(&self, role: SplitRole) -> Vec<usize> {
        match &self.splits {
            Some(s) => (0..self.n).filter(|&i| s[i] == role).collect(),
            None => Vec::new(),
        }
    }

    /// Copy of the selected rows, annotations included. Splits are dropped.
    pub fn subset(&self, indices: &[usize]) -> Result<FeatureDataset> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty subset".into()));
        }
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "subset index {i} out of range (n={})",
                    self.n
                )));
            }
            features.extend_from_slice(self.feature_row(i));
        }
        match &self.annotations {
            Annotations::Labels {
                labels,
                class_count,
            } => {
                let sub: Vec<usize> = indices.iter().map(|&i| labels[i]).collect();
                FeatureDataset::with_labels(features, self.dim, sub, *class_count)
            }
            Annotations::Tags(t) => {
                let mut tags = BitMatrix::zeros(indices.len(), t.cols());
                for (row, &i) in indices.iter().enumerate() {
                    for c in 0..t.cols() {
                        if t.get(i, c) {
                            tags.set(row, c, true);
                        }
                    }
                }
                FeatureDataset::with_tags(features, self.dim, tags)
            }
        }
    }

    /// Subset that also compacts the surviving class labels to 0..k,
    /// returning the original class index for each new one. Labeled data
    /// only.
    pub fn subset_with_class_remap(
        &self,
        indices: &[usize],
    ) -> Result<(FeatureDataset, Vec<usize>)> {
        let labels = self
            .labels()
            .ok_or_else(|| Error::InvalidArgument("class remap needs labeled data".into()))?;
        let mut kept: Vec<usize> = indices.iter().map(|&i| labels[i]).collect();
        kept.sort_unstable();
        kept.dedup();
        let remap: std::collections::HashMap<usize, usize> = kept
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut new_labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.feature_row(i));
            new_labels.push(remap[&labels[i]]);
        }
        let ds = FeatureDataset::with_labels(features, self.dim, new_labels, kept.len())?;
        Ok((ds, kept))
    }
}

/// Hierarchical Gaussian generator configuration: classes are grouped
/// into superclasses so that class similarity has real structure for the
/// semantic assignment to exploit.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub superclasses: usize,
    pub classes_per_superclass: usize,
    pub samples_per_class: usize,
    pub feature_dim: usize,
    /// Per-coordinate standard deviation of the sample noise.
    pub noise_sigma: f64,
    /// Distance scale between superclass centers.
    pub separation: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            superclasses: 4,
            classes_per_superclass: 4,
            samples_per_class: 50,
            feature_dim: 64,
            noise_sigma: 1.0,
            separation: 40.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.superclasses == 0
            || self.classes_per_superclass == 0
            || self.samples_per_class == 0
            || self.feature_dim == 0
        {
            return Err(Error::InvalidArgument(
                "all synth counts must be >= 1".into(),
            ));
        }
        if self.noise_sigma <= 0.0 {
            return Err(Error::InvalidArgument("noise sigma must be > 0".into()));
        }
        Ok(())
    }

    pub fn class_count(&self) -> usize {
        self.superclasses * self.classes_per_superclass
    }
}

/// Superclass centers at mutual distance sqrt(2)*separation when the
/// dimension allows orthonormalization, random unit directions otherwise.
fn superclass_centers(cfg: &SynthConfig, rng: &mut impl Rng) -> Vec<DVector<f64>> {
    let s = cfg.superclasses;
    let d = cfg.feature_dim;
    if s <= d {
        let g = gaussian_matrix(rng, d, s);
        let q = g.qr().q();
        (0..s).map(|j| q.column(j) * cfg.separation).collect()
    } else {
        (0..s)
            .map(|_| {
                let v = gaussian_vector(rng, d);
                let n = v.norm();
                v / n * cfg.separation
            })
            .collect()
    }
}

/// Single-label hierarchical Gaussians: class mean = superclass center +
/// unit-scale class offset; sample = mean + sigma * noise. Samples are
/// emitted class-major, deterministically per seed.
pub fn synth_generate(cfg: &SynthConfig) -> Result<FeatureDataset> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let centers = superclass_centers(cfg, &mut rng);
    let classes = cfg.class_count();
    let d = cfg.feature_dim;

    let means: Vec<DVector<f64>> = (0..classes)
        .map(|c| {
            let sc = c / cfg.classes_per_superclass;
            &centers[sc] + gaussian_vector(&mut rng, d)
        })
        .collect();

    let n = classes * cfg.samples_per_class;
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (c, mean) in means.iter().enumerate() {
        for _ in 0..cfg.samples_per_class {
            for j in 0..d {
                let noise: f64 = rng.sample(StandardNormal);
                features.push((mean[j] + cfg.noise_sigma * noise) as f32);
            }
            labels.push(c);
        }
    }
    FeatureDataset::with_labels(features, d, labels, classes)
}

/// Multi-label variant: each class is a blend of two superclasses and
/// every sample carries the two corresponding tags (T = number of
/// superclasses), so tag co-occurrence reflects the class structure.
pub fn synth_generate_multilabel(cfg: &SynthConfig) -> Result<FeatureDataset> {
    cfg.validate()?;
    if cfg.superclasses < 2 {
        return Err(Error::InvalidArgument(
            "multi-label generation needs >= 2 superclasses".into(),
        ));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let centers = superclass_centers(cfg, &mut rng);
    let classes = cfg.class_count();
    let d = cfg.feature_dim;
    let s = cfg.superclasses;

    let parents: Vec<(usize, usize)> = (0..classes)
        .map(|c| {
            let s1 = c / cfg.classes_per_superclass;
            let s2 = (s1 + 1 + (c % (s - 1))) % s;
            (s1, s2)
        })
        .collect();
    let means: Vec<DVector<f64>> = parents
        .iter()
        .map(|&(s1, s2)| (&centers[s1] + &centers[s2]) * 0.5 + gaussian_vector(&mut rng, d))
        .collect();

    let n = classes * cfg.samples_per_class;
    let mut features = Vec::with_capacity(n * d);
    let mut tags = BitMatrix::zeros(n, s);
    let mut row = 0;
    for (c, mean) in means.iter().enumerate() {
        let (s1, s2) = parents[c];
        for _ in 0..cfg.samples_per_class {
            for j in 0..d {
                let noise: f64 = rng.sample(StandardNormal);
                features.push((mean[j] + cfg.noise_sigma * noise) as f32);
            }
            tags.set(row, s1, true);
            tags.set(row, s2, true);
            row += 1;
        }
    }
    FeatureDataset::with_tags(features, d, tags)
}
