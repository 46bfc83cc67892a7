//! Proxy sets: fixed class representatives in embedding space.
//!
//! A proxy set is a d x C matrix whose columns all share the same squared
//! norm K (K = 1 for real-valued kinds, K = d for binary kinds). Margins,
//! random baselines, and the norm/binary invariants live here; the Tammes
//! solver and the ITQ alignment are in their own modules.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{gaussian_vector, rng_from_seed};

pub const NORM_TOLERANCE: f64 = 1e-9;

/// Which stage of the design pipeline produced the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxyKind {
    Tammes,
    Aligned,
    Hclm,
    Shclm,
    Random,
    RandomBinary,
    Learned,
}

impl ProxyKind {
    pub fn is_binary(self) -> bool {
        matches!(self, ProxyKind::Hclm | ProxyKind::Shclm | ProxyKind::RandomBinary)
    }

    /// Stable on-disk tag, in the order the kinds are declared.
    pub fn code(self) -> u8 {
        match self {
            ProxyKind::Tammes => 0,
            ProxyKind::Aligned => 1,
            ProxyKind::Hclm => 2,
            ProxyKind::Shclm => 3,
            ProxyKind::Random => 4,
            ProxyKind::RandomBinary => 5,
            ProxyKind::Learned => 6,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => ProxyKind::Tammes,
            1 => ProxyKind::Aligned,
            2 => ProxyKind::Hclm,
            3 => ProxyKind::Shclm,
            4 => ProxyKind::Random,
            5 => ProxyKind::RandomBinary,
            6 => ProxyKind::Learned,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ProxyKind::Tammes => "tammes",
            ProxyKind::Aligned => "aligned",
            ProxyKind::Hclm => "hclm",
            ProxyKind::Shclm => "shclm",
            ProxyKind::Random => "random",
            ProxyKind::RandomBinary => "random_binary",
            ProxyKind::Learned => "learned",
        }
    }
}

/// C proxy vectors of dimension d, stored as columns, all with squared
/// norm K.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxySet {
    columns: DMatrix<f64>,
    kind: ProxyKind,
    norm_constant: f64,
}

impl ProxySet {
    /// Validates the column-norm invariant (and exact +-1 entries for
    /// binary kinds) before accepting the matrix.
    pub fn new(columns: DMatrix<f64>, kind: ProxyKind, norm_constant: f64) -> Result<Self> {
        let (d, c) = columns.shape();
        if d == 0 || c == 0 {
            return Err(Error::InvalidArgument(format!(
                "proxy matrix must be non-empty, got d={d}, C={c}"
            )));
        }
        // Learned proxies drift off the sphere during training; K is the
        // initialization norm target for them, not an invariant.
        if kind != ProxyKind::Learned {
            for j in 0..c {
                let sq = columns.column(j).norm_squared();
                if (sq - norm_constant).abs() >= NORM_TOLERANCE {
                    return Err(Error::InvalidArgument(format!(
                        "column {j} has squared norm {sq:.12}, expected K={norm_constant:.12}"
                    )));
                }
            }
        }
        if kind.is_binary() {
            for v in columns.iter() {
                if *v != 1.0 && *v != -1.0 {
                    return Err(Error::InvalidArgument(format!(
                        "binary proxy set contains non +-1 entry {v}"
                    )));
                }
            }
        }
        Ok(ProxySet {
            columns,
            kind,
            norm_constant,
        })
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn kind(&self) -> ProxyKind {
        self.kind
    }

    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn class_count(&self) -> usize {
        self.columns.ncols()
    }

    pub fn column(&self, class: usize) -> DVector<f64> {
        self.columns.column(class).into_owned()
    }

    /// Gram matrix W^T W of raw dot products.
    pub fn gram(&self) -> DMatrix<f64> {
        self.columns.transpose() * &self.columns
    }

    /// Same vectors re-tagged with a different kind (norms unchanged).
    pub fn with_kind(&self, kind: ProxyKind) -> Result<Self> {
        ProxySet::new(self.columns.clone(), kind, self.norm_constant)
    }

    /// Columns reordered so class y gets column `assignment[y]`.
    pub fn permuted(&self, assignment: &[usize], kind: ProxyKind) -> Result<Self> {
        if assignment.len() != self.class_count() {
            return Err(Error::Dimension {
                context: "assignment length vs class count",
                expected: self.class_count(),
                actual: assignment.len(),
            });
        }
        let d = self.dim();
        let mut m = DMatrix::zeros(d, self.class_count());
        for (class, &col) in assignment.iter().enumerate() {
            m.set_column(class, &self.columns.column(col));
        }
        ProxySet::new(m, kind, self.norm_constant)
    }

    /// Pairs of identical columns (collapsed classes), i < j.
    pub fn duplicate_columns(&self) -> Vec<(usize, usize)> {
        let c = self.class_count();
        let mut dups = Vec::new();
        for i in 0..c {
            for j in i + 1..c {
                if self.columns.column(i) == self.columns.column(j) {
                    dups.push((i, j));
                }
            }
        }
        dups
    }
}

/// Classification margin per class: M_y = K - max_{c != y} <w_y, w_c>.
pub fn margins(p: &ProxySet) -> Result<Vec<f64>> {
    let c = p.class_count();
    if c < 2 {
        return Err(Error::InvalidArgument(
            "margins need at least 2 classes".into(),
        ));
    }
    let gram = p.gram();
    let k = p.norm_constant();
    let mut out = Vec::with_capacity(c);
    for y in 0..c {
        let worst = (0..c)
            .filter(|&j| j != y)
            .map(|j| gram[(y, j)])
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(k - worst);
    }
    Ok(out)
}

/// Fixed random baseline: unit-norm Gaussian directions.
pub fn random_proxies(classes: usize, dim: usize, seed: u64) -> Result<ProxySet> {
    check_counts(classes, dim)?;
    let mut rng = rng_from_seed(seed);
    let mut m = DMatrix::zeros(dim, classes);
    for j in 0..classes {
        let mut v = gaussian_vector(&mut rng, dim);
        let mut n = v.norm();
        while n == 0.0 {
            v = gaussian_vector(&mut rng, dim);
            n = v.norm();
        }
        v /= n;
        m.set_column(j, &v);
    }
    ProxySet::new(m, ProxyKind::Random, 1.0)
}

/// Fixed random binary baseline: i.i.d. uniform +-1 entries, K = d.
pub fn random_binary_proxies(classes: usize, dim: usize, seed: u64) -> Result<ProxySet> {
    check_counts(classes, dim)?;
    let capacity = if dim >= 63 { u64::MAX } else { 1u64 << dim };
    if classes as u64 > capacity {
        return Err(Error::BinaryCapacity {
            classes,
            bits: dim,
        });
    }
    let mut rng = rng_from_seed(seed);
    let m = DMatrix::from_fn(dim, classes, |_, _| {
        if rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    });
    ProxySet::new(m, ProxyKind::RandomBinary, dim as f64)
}

fn check_counts(classes: usize, dim: usize) -> Result<()> {
    if classes < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 classes, got {classes}"
        )));
    }
    if dim < 1 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    Ok(())
}
