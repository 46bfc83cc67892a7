//! Binary-code retrieval: encode embeddings to packed sign bits, rank by
//! Hamming distance with word-level popcounts, and score rankings with
//! average precision and precision at K.

use rayon::prelude::*;

use crate::bits::{hamming, BitMatrix};
use crate::data::{Annotations, FeatureDataset};
use crate::error::{Error, Result};
use crate::trainer::HashingLayer;

/// Packed codes plus the per-item relevance payload.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryCodeDatabase {
    codes: BitMatrix,
    relevance: Relevance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Relevance {
    Labels(Vec<usize>),
    Tags(BitMatrix),
}

impl BinaryCodeDatabase {
    pub fn new(codes: BitMatrix, relevance: Relevance) -> Result<Self> {
        let n = match &relevance {
            Relevance::Labels(l) => l.len(),
            Relevance::Tags(t) => t.rows(),
        };
        if n != codes.rows() {
            return Err(Error::Dimension {
                context: "relevance payload vs code count",
                expected: codes.rows(),
                actual: n,
            });
        }
        Ok(BinaryCodeDatabase { codes, relevance })
    }

    pub fn len(&self) -> usize {
        self.codes.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.rows() == 0
    }

    pub fn code_bits(&self) -> usize {
        self.codes.cols()
    }

    pub fn codes(&self) -> &BitMatrix {
        &self.codes
    }

    pub fn relevance(&self) -> &Relevance {
        &self.relevance
    }

    /// Same class label, or at least one shared tag.
    fn relevant(&self, i: usize, other: &BinaryCodeDatabase, j: usize) -> Result<bool> {
        match (&self.relevance, &other.relevance) {
            (Relevance::Labels(a), Relevance::Labels(b)) => Ok(a[i] == b[j]),
            (Relevance::Tags(a), Relevance::Tags(b)) => {
                if a.cols() != b.cols() {
                    return Err(Error::Dimension {
                        context: "tag vocabulary sizes",
                        expected: a.cols(),
                        actual: b.cols(),
                    });
                }
                Ok(a.row_words(i)
                    .iter()
                    .zip(b.row_words(j))
                    .any(|(x, y)| x & y != 0))
            }
            _ => Err(Error::InvalidArgument(
                "cannot mix label and tag relevance payloads".into(),
            )),
        }
    }
}

/// Sign-threshold codes: bit j set iff nu_j(x) >= 0 (sgn(0) = +1).
pub fn encode_matrix(
    layer: &HashingLayer,
    features: &[f32],
    n: usize,
    dim: usize,
) -> Result<BitMatrix> {
    if features.len() != n * dim {
        return Err(Error::Dimension {
            context: "feature buffer vs n*dim",
            expected: n * dim,
            actual: features.len(),
        });
    }
    if dim != layer.input_dim() {
        return Err(Error::Dimension {
            context: "feature dim vs layer input",
            expected: layer.input_dim(),
            actual: dim,
        });
    }
    let d = layer.code_dim();
    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let q = nalgebra::DVector::from_iterator(
                dim,
                features[i * dim..(i + 1) * dim].iter().map(|&v| v as f64),
            );
            let nu = layer.forward(&q).expect("dims checked");
            let mut words = vec![0u64; d.div_ceil(64)];
            for j in 0..d {
                if nu[j] >= 0.0 {
                    words[j / 64] |= 1u64 << (j % 64);
                }
            }
            words
        })
        .collect();
    let mut words = Vec::with_capacity(n * d.div_ceil(64));
    for r in rows {
        words.extend_from_slice(&r);
    }
    BitMatrix::from_words(n, d, words)
}

/// Encode a dataset, carrying its labels or tags as the relevance payload.
pub fn encode(layer: &HashingLayer, data: &FeatureDataset) -> Result<BinaryCodeDatabase> {
    let codes = encode_matrix(layer, data.features(), data.len(), data.dim())?;
    let relevance = match data.annotations() {
        Annotations::Labels { labels, .. } => Relevance::Labels(labels.clone()),
        Annotations::Tags(t) => Relevance::Tags(t.clone()),
    };
    BinaryCodeDatabase::new(codes, relevance)
}

/// Database indices ordered by ascending Hamming distance, ties broken
/// by ascending index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedList {
    indices: Vec<usize>,
    distances: Vec<u32>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn distances(&self) -> &[u32] {
        &self.distances
    }
}

/// Counting sort over distances 0..=d: O(n) and stable by index.
pub fn rank(query: &[u64], db: &BitMatrix) -> Result<RankedList> {
    if db.rows() == 0 {
        return Err(Error::InvalidArgument("empty database".into()));
    }
    let d = db.cols();
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); d + 1];
    for i in 0..db.rows() {
        let dist = hamming(query, db.row_words(i))? as usize;
        buckets[dist].push(i);
    }
    let mut indices = Vec::with_capacity(db.rows());
    let mut distances = Vec::with_capacity(db.rows());
    for (dist, bucket) in buckets.into_iter().enumerate() {
        for i in bucket {
            indices.push(i);
            distances.push(dist as u32);
        }
    }
    Ok(RankedList { indices, distances })
}

/// Average precision of a ranked relevance sequence over its first
/// `top_n` positions: sum_k P(k) * dr(k), with recall normalized by the
/// relevant count inside the evaluated prefix. `flagged` marks rankings
/// with no relevant item in the prefix (AP counted as 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApOutcome {
    pub value: f64,
    pub flagged: bool,
}

pub fn average_precision(relevance: &[bool], top_n: usize) -> ApOutcome {
    let prefix = relevance.len().min(top_n);
    let total_relevant = relevance[..prefix].iter().filter(|&&r| r).count();
    if total_relevant == 0 {
        return ApOutcome {
            value: 0.0,
            flagged: true,
        };
    }
    let mut hits = 0usize;
    let mut ap = 0.0;
    for (k, &rel) in relevance[..prefix].iter().enumerate() {
        if rel {
            hits += 1;
            ap += hits as f64 / (k + 1) as f64;
        }
    }
    ApOutcome {
        value: ap / total_relevant as f64,
        flagged: false,
    }
}

/// Ranked relevance bits of one query against the database, with the
/// query's own database row optionally removed (overlapping query/db
/// protocols).
fn ranked_relevance(
    queries: &BinaryCodeDatabase,
    db: &BinaryCodeDatabase,
    query_idx: usize,
    exclude_db_index: Option<usize>,
) -> Result<Vec<bool>> {
    let ranking = rank(queries.codes().row_words(query_idx), db.codes())?;
    let mut bits = Vec::with_capacity(ranking.len());
    for &db_idx in ranking.indices() {
        if exclude_db_index == Some(db_idx) {
            continue;
        }
        bits.push(queries.relevant(query_idx, db, db_idx)?);
    }
    Ok(bits)
}

/// Per-query average precision. `self_indices`, when given, maps each
/// query to its own row in the database, which is excluded from its
/// ranking. `top_n` of None scores the full ranking.
pub fn per_query_average_precision(
    queries: &BinaryCodeDatabase,
    db: &BinaryCodeDatabase,
    top_n: Option<usize>,
    self_indices: Option<&[usize]>,
) -> Result<Vec<ApOutcome>> {
    if queries.is_empty() {
        return Err(Error::InvalidArgument("empty query set".into()));
    }
    if queries.code_bits() != db.code_bits() {
        return Err(Error::Dimension {
            context: "query vs database code length",
            expected: db.code_bits(),
            actual: queries.code_bits(),
        });
    }
    if let Some(s) = self_indices {
        if s.len() != queries.len() {
            return Err(Error::Dimension {
                context: "self-index list vs query count",
                expected: queries.len(),
                actual: s.len(),
            });
        }
    }
    let top = top_n.unwrap_or(usize::MAX);
    (0..queries.len())
        .into_par_iter()
        .map(|i| {
            let bits = ranked_relevance(queries, db, i, self_indices.map(|s| s[i]))?;
            Ok(average_precision(&bits, top))
        })
        .collect()
}

pub fn mean_ap(
    queries: &BinaryCodeDatabase,
    db: &BinaryCodeDatabase,
    top_n: Option<usize>,
    self_indices: Option<&[usize]>,
) -> Result<f64> {
    let aps = per_query_average_precision(queries, db, top_n, self_indices)?;
    Ok(aps.iter().map(|a| a.value).sum::<f64>() / aps.len() as f64)
}

/// Mean precision of the top K results per cutoff K. Cutoffs beyond the
/// (possibly self-excluded) ranking length are clamped to it.
pub fn precision_at_k(
    queries: &BinaryCodeDatabase,
    db: &BinaryCodeDatabase,
    ks: &[usize],
    self_indices: Option<&[usize]>,
) -> Result<Vec<(usize, f64)>> {
    if queries.is_empty() {
        return Err(Error::InvalidArgument("empty query set".into()));
    }
    if ks.iter().any(|&k| k == 0) {
        return Err(Error::InvalidArgument("precision cutoff 0".into()));
    }
    let per_query: Vec<Vec<f64>> = (0..queries.len())
        .into_par_iter()
        .map(|i| {
            let bits = ranked_relevance(queries, db, i, self_indices.map(|s| s[i]))?;
            Ok(ks
                .iter()
                .map(|&k| {
                    let kk = k.min(bits.len());
                    let hits = bits[..kk].iter().filter(|&&r| r).count();
                    hits as f64 / kk as f64
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let mean = per_query.iter().map(|row| row[j]).sum::<f64>() / per_query.len() as f64;
            (k, mean)
        })
        .collect())
}
