//! Semantic proxy/class assignment.
//!
//! Class (or tag) similarities are summarized in a symmetric matrix with
//! entries in [0,1]; the assignment search permutes proxy columns so that
//! similar classes receive nearby proxies, minimizing
//! sum_{i!=j} s_ij (1 - <w_gamma_i, w_gamma_j>).

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::data::FeatureDataset;
use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::proxy::ProxySet;
use crate::rng::{derive_seed, rng_from_seed};

const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilaritySource {
    GaussianMeans,
    TagCooccurrence,
    UserSupplied,
}

/// C x C symmetric similarity with entries in [0,1]. The diagonal is
/// never read by consumers.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    s: DMatrix<f64>,
    source: SimilaritySource,
}

impl SimilarityMatrix {
    pub fn new(s: DMatrix<f64>, source: SimilaritySource) -> Result<Self> {
        if s.nrows() != s.ncols() {
            return Err(Error::Dimension {
                context: "similarity matrix must be square",
                expected: s.nrows(),
                actual: s.ncols(),
            });
        }
        for i in 0..s.nrows() {
            for j in 0..i {
                if (s[(i, j)] - s[(j, i)]).abs() >= SYMMETRY_TOLERANCE {
                    return Err(Error::InvalidArgument(format!(
                        "similarity not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if let Some(v) = s.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "similarity entry {v} outside [0,1]"
            )));
        }
        Ok(SimilarityMatrix { s, source })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn source(&self) -> SimilaritySource {
        self.source
    }

    pub fn class_count(&self) -> usize {
        self.s.nrows()
    }
}

/// Column y holds the mean feature vector of class y.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMeans {
    means: DMatrix<f64>,
    counts: Vec<usize>,
}

impl ClassMeans {
    pub fn new(means: DMatrix<f64>, counts: Vec<usize>) -> Result<Self> {
        if means.ncols() != counts.len() {
            return Err(Error::Dimension {
                context: "class means vs counts",
                expected: means.ncols(),
                actual: counts.len(),
            });
        }
        if let Some(class) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass { class });
        }
        Ok(ClassMeans { means, counts })
    }

    pub fn means(&self) -> &DMatrix<f64> {
        &self.means
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn class_count(&self) -> usize {
        self.means.ncols()
    }

    pub fn mean(&self, class: usize) -> DVector<f64> {
        self.means.column(class).into_owned()
    }
}

/// Average feature vector per class. Errors on an empty class, naming it.
pub fn class_means(data: &FeatureDataset) -> Result<ClassMeans> {
    let labels = data
        .labels()
        .ok_or_else(|| Error::InvalidArgument("class means need labeled data".into()))?;
    let classes = data.class_count().unwrap();
    let mut sums = DMatrix::<f64>::zeros(data.dim(), classes);
    let mut counts = vec![0usize; classes];
    for (i, &y) in labels.iter().enumerate() {
        let mut col = sums.column_mut(y);
        for (j, &v) in data.feature_row(i).iter().enumerate() {
            col[j] += v as f64;
        }
        counts[y] += 1;
    }
    if let Some(class) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyClass { class });
    }
    for (y, &c) in counts.iter().enumerate() {
        let mut col = sums.column_mut(y);
        col /= c as f64;
    }
    Ok(ClassMeans {
        means: sums,
        counts,
    })
}

/// s_ij = exp(-||u_i - u_j||^2 / (2 kappa^2)) with kappa the mean
/// Euclidean distance over unordered pairs of class means. Identical
/// means everywhere degenerate to the all-ones limit, with a warning.
pub fn gaussian_similarity(means: &ClassMeans) -> Result<SimilarityMatrix> {
    let c = means.class_count();
    if c < 2 {
        return Err(Error::InvalidArgument(
            "similarity needs at least 2 classes".into(),
        ));
    }
    let mut dist = DMatrix::<f64>::zeros(c, c);
    let mut kappa = 0.0;
    for i in 0..c {
        for j in i + 1..c {
            let d = (means.means().column(i) - means.means().column(j)).norm();
            dist[(i, j)] = d;
            dist[(j, i)] = d;
            kappa += d;
        }
    }
    kappa /= (c * (c - 1) / 2) as f64;
    if kappa == 0.0 {
        log::warn!("all class means identical; similarity degenerates to all ones");
        return SimilarityMatrix::new(
            DMatrix::from_element(c, c, 1.0),
            SimilaritySource::GaussianMeans,
        );
    }
    let s = dist.map(|d| (-d * d / (2.0 * kappa * kappa)).exp());
    SimilarityMatrix::new(s, SimilaritySource::GaussianMeans)
}

/// Dice-style tag co-occurrence: s_ij = 2 sum_n t_ni t_nj /
/// (sum_n t_ni + sum_n t_nj). Errors on a tag that never occurs.
pub fn tag_cooccurrence_similarity(tags: &BitMatrix) -> Result<SimilarityMatrix> {
    let t = tags.cols();
    if t < 2 {
        return Err(Error::InvalidArgument(
            "similarity needs at least 2 tags".into(),
        ));
    }
    let totals: Vec<usize> = (0..t).map(|k| tags.count_ones_in_col(k)).collect();
    if let Some(tag) = totals.iter().position(|&c| c == 0) {
        return Err(Error::EmptyTag { tag });
    }
    let mut s = DMatrix::<f64>::zeros(t, t);
    for i in 0..t {
        for j in i..t {
            let co = (0..tags.rows())
                .filter(|&n| tags.get(n, i) && tags.get(n, j))
                .count();
            let v = 2.0 * co as f64 / (totals[i] + totals[j]) as f64;
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    SimilarityMatrix::new(s, SimilaritySource::TagCooccurrence)
}

/// Permutation mapping class index -> proxy column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    perm: Vec<usize>,
}

impl Assignment {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidArgument(
                    "assignment is not a permutation".into(),
                ));
            }
            seen[p] = true;
        }
        Ok(Assignment { perm })
    }

    pub fn identity(c: usize) -> Self {
        Assignment {
            perm: (0..c).collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn proxy_for_class(&self, class: usize) -> usize {
        self.perm[class]
    }
}

fn check_compatible(s: &SimilarityMatrix, p: &ProxySet, a: Option<&Assignment>) -> Result<()> {
    if s.class_count() != p.class_count() {
        return Err(Error::Dimension {
            context: "similarity vs proxy class count",
            expected: p.class_count(),
            actual: s.class_count(),
        });
    }
    if let Some(a) = a {
        if a.perm().len() != p.class_count() {
            return Err(Error::Dimension {
                context: "assignment vs proxy class count",
                expected: p.class_count(),
                actual: a.perm().len(),
            });
        }
    }
    Ok(())
}

/// sum_{i != j} s_ij (1 - <w_gamma_i, w_gamma_j>), raw dot products.
pub fn assignment_objective(
    s: &SimilarityMatrix,
    p: &ProxySet,
    a: &Assignment,
) -> Result<f64> {
    check_compatible(s, p, Some(a))?;
    let gram = p.gram();
    Ok(objective_from_parts(s.matrix(), &gram, a.perm()))
}

fn objective_from_parts(s: &DMatrix<f64>, gram: &DMatrix<f64>, perm: &[usize]) -> f64 {
    let c = perm.len();
    let mut total = 0.0;
    for i in 0..c {
        for j in 0..c {
            if i != j {
                total += s[(i, j)] * (1.0 - gram[(perm[i], perm[j])]);
            }
        }
    }
    total
}

/// Objective change from swapping the proxies of classes a and b
/// (ordered-pair objective, hence the factor 2).
fn swap_delta(
    s: &DMatrix<f64>,
    gram: &DMatrix<f64>,
    perm: &[usize],
    a: usize,
    b: usize,
) -> f64 {
    let mut delta = 0.0;
    for k in 0..perm.len() {
        if k == a || k == b {
            continue;
        }
        delta += (s[(a, k)] - s[(b, k)]) * (gram[(perm[a], perm[k])] - gram[(perm[b], perm[k])]);
    }
    2.0 * delta
}

/// Steepest-descent pairwise swaps from a random start, best of
/// `restarts` (lowest restart index wins ties); within a step, ties go to
/// the lexicographically smallest swap pair.
pub fn greedy_assign(
    s: &SimilarityMatrix,
    p: &ProxySet,
    restarts: usize,
    seed: u64,
) -> Result<Assignment> {
    check_compatible(s, p, None)?;
    if restarts < 1 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    let c = p.class_count();
    if c < 2 {
        return Err(Error::InvalidArgument(
            "assignment needs at least 2 classes".into(),
        ));
    }
    let gram = p.gram();
    let sm = s.matrix();

    let runs: Vec<(usize, Vec<usize>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(derive_seed(seed, r as u64));
            let mut perm: Vec<usize> = (0..c).collect();
            perm.shuffle(&mut rng);
            let value = descend(sm, &gram, &mut perm);
            (r, perm, value)
        })
        .collect();

    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.2 < best.2 {
            best = run;
        }
    }
    Assignment::new(best.1.clone())
}

/// Apply improving swaps until none remains; returns the final objective.
fn descend(s: &DMatrix<f64>, gram: &DMatrix<f64>, perm: &mut [usize]) -> f64 {
    let c = perm.len();
    let mut value = objective_from_parts(s, gram, perm);
    loop {
        let mut best_delta = 0.0;
        let mut best_pair = None;
        for a in 0..c {
            for b in a + 1..c {
                let delta = swap_delta(s, gram, perm, a, b);
                if delta < best_delta - 1e-15 {
                    best_delta = delta;
                    best_pair = Some((a, b));
                }
            }
        }
        match best_pair {
            Some((a, b)) => {
                perm.swap(a, b);
                value += best_delta;
            }
            None => return value,
        }
    }
}

const BRUTE_FORCE_MAX: usize = 9;

/// Exhaustive optimum over all permutations; ties resolved toward the
/// lexicographically smallest permutation. Guarded to C <= 9.
pub fn brute_force_assign(s: &SimilarityMatrix, p: &ProxySet) -> Result<Assignment> {
    check_compatible(s, p, None)?;
    let c = p.class_count();
    if c > BRUTE_FORCE_MAX {
        return Err(Error::BruteForceTooLarge {
            max: BRUTE_FORCE_MAX,
            actual: c,
        });
    }
    let gram = p.gram();
    let sm = s.matrix();
    let mut perm: Vec<usize> = (0..c).collect();
    let mut best_perm = perm.clone();
    let mut best_value = objective_from_parts(sm, &gram, &perm);
    // Lexicographic next-permutation enumeration; first optimum found is
    // the lexicographically smallest.
    while next_permutation(&mut perm) {
        let value = objective_from_parts(sm, &gram, &perm);
        if value < best_value - 1e-15 {
            best_value = value;
            best_perm.copy_from_slice(&perm);
        }
    }
    Assignment::new(best_perm)
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_generate, SynthConfig};
    use crate::proxy::{random_proxies, ProxyKind};
    use approx::assert_abs_diff_eq;

    fn uniform_similarity(c: usize, v: f64) -> SimilarityMatrix {
        let mut m = DMatrix::from_element(c, c, v);
        for i in 0..c {
            m[(i, i)] = 1.0;
        }
        SimilarityMatrix::new(m, SimilaritySource::UserSupplied).unwrap()
    }

    fn random_similarity(c: usize, seed: u64) -> SimilarityMatrix {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let mut m = DMatrix::<f64>::zeros(c, c);
        for i in 0..c {
            m[(i, i)] = 1.0;
            for j in 0..i {
                let v: f64 = rng.gen();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SimilarityMatrix::new(m, SimilaritySource::UserSupplied).unwrap()
    }

    #[test]
    fn gaussian_similarity_two_classes() {
        // Two means at distance delta: kappa = delta, s = exp(-1/2).
        let means = ClassMeans::new(
            DMatrix::from_columns(&[
                DVector::from_vec(vec![0.0, 0.0]),
                DVector::from_vec(vec![3.0, 0.0]),
            ]),
            vec![1, 1],
        )
        .unwrap();
        let s = gaussian_similarity(&means).unwrap();
        assert_abs_diff_eq!(s.matrix()[(0, 1)], (-0.5f64).exp(), epsilon = 1e-12);
        assert_eq!(s.matrix()[(0, 1)], s.matrix()[(1, 0)]);
        assert_abs_diff_eq!(s.matrix()[(0, 0)], 1.0);
    }

    #[test]
    fn gaussian_similarity_identical_means_warns_all_ones() {
        let col = DVector::from_vec(vec![1.0, 2.0]);
        let means =
            ClassMeans::new(DMatrix::from_columns(&[col.clone(), col.clone(), col]), vec![1; 3])
                .unwrap();
        let s = gaussian_similarity(&means).unwrap();
        assert!(s.matrix().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn cooccurrence_small_example() {
        // tag A on samples {0,1}, tag B on {1,2} -> s = 2*1/(2+2) = 0.5
        let mut tags = BitMatrix::zeros(3, 2);
        tags.set(0, 0, true);
        tags.set(1, 0, true);
        tags.set(1, 1, true);
        tags.set(2, 1, true);
        let s = tag_cooccurrence_similarity(&tags).unwrap();
        assert_abs_diff_eq!(s.matrix()[(0, 1)], 0.5);
        assert_abs_diff_eq!(s.matrix()[(0, 0)], 1.0);
    }

    #[test]
    fn cooccurrence_identical_and_disjoint() {
        let mut tags = BitMatrix::zeros(4, 3);
        // tags 0 and 1 identical on rows 0,1; tag 2 on rows 2,3.
        for r in 0..2 {
            tags.set(r, 0, true);
            tags.set(r, 1, true);
        }
        tags.set(2, 2, true);
        tags.set(3, 2, true);
        let s = tag_cooccurrence_similarity(&tags).unwrap();
        assert_abs_diff_eq!(s.matrix()[(0, 1)], 1.0);
        assert_abs_diff_eq!(s.matrix()[(0, 2)], 0.0);
    }

    #[test]
    fn cooccurrence_rejects_empty_tag() {
        let mut tags = BitMatrix::zeros(2, 2);
        tags.set(0, 0, true);
        tags.set(1, 0, true);
        match tag_cooccurrence_similarity(&tags) {
            Err(Error::EmptyTag { tag }) => assert_eq!(tag, 1),
            other => panic!("expected EmptyTag, got {other:?}"),
        }
    }

    #[test]
    fn objective_hand_computed_c3() {
        // s_01=0.9, s_02=0.1, s_12=0.2; proxies (1,0),(0,1),(-1,0).
        // identity assignment: 2*(0.9*1 + 0.1*2 + 0.2*1) = 2.6
        let mut sm = DMatrix::from_element(3, 3, 0.0);
        sm[(0, 0)] = 1.0;
        sm[(1, 1)] = 1.0;
        sm[(2, 2)] = 1.0;
        sm[(0, 1)] = 0.9;
        sm[(1, 0)] = 0.9;
        sm[(0, 2)] = 0.1;
        sm[(2, 0)] = 0.1;
        sm[(1, 2)] = 0.2;
        sm[(2, 1)] = 0.2;
        let s = SimilarityMatrix::new(sm, SimilaritySource::UserSupplied).unwrap();
        let p = ProxySet::new(
            DMatrix::from_columns(&[
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0]),
                DVector::from_vec(vec![-1.0, 0.0]),
            ]),
            ProxyKind::Tammes,
            1.0,
        )
        .unwrap();
        let obj = assignment_objective(&s, &p, &Assignment::identity(3)).unwrap();
        assert_abs_diff_eq!(obj, 2.6, epsilon = 1e-12);
    }

    #[test]
    fn objective_zero_when_similarity_zero() {
        let s = uniform_similarity(4, 0.0);
        let p = random_proxies(4, 3, 1).unwrap();
        for seed in 0..3 {
            let a = greedy_assign(&s, &p, 2, seed).unwrap();
            assert_abs_diff_eq!(assignment_objective(&s, &p, &a).unwrap(), 0.0);
        }
    }

    #[test]
    fn c2_both_assignments_equal() {
        let s = uniform_similarity(2, 0.7);
        let p = random_proxies(2, 4, 9).unwrap();
        let a = assignment_objective(&s, &p, &Assignment::identity(2)).unwrap();
        let b =
            assignment_objective(&s, &p, &Assignment::new(vec![1, 0]).unwrap()).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        // brute force tie resolves to the identity (lexicographic).
        let bf = brute_force_assign(&s, &p).unwrap();
        assert_eq!(bf.perm(), &[0, 1]);
    }

    #[test]
    fn brute_force_finds_dominant_pairing() {
        // Classes 0,1 strongly similar; proxies 1,2 nearly parallel.
        // The optimum must put classes {0,1} on proxies {1,2}.
        let mut sm = DMatrix::from_element(3, 3, 0.01);
        for i in 0..3 {
            sm[(i, i)] = 1.0;
        }
        sm[(0, 1)] = 0.99;
        sm[(1, 0)] = 0.99;
        let s = SimilarityMatrix::new(sm, SimilaritySource::UserSupplied).unwrap();
        let c = (0.1f64).cos();
        let sn = (0.1f64).sin();
        let p = ProxySet::new(
            DMatrix::from_columns(&[
                DVector::from_vec(vec![-1.0, 0.0]),
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![c, sn]),
            ]),
            ProxyKind::Tammes,
            1.0,
        )
        .unwrap();
        let a = brute_force_assign(&s, &p).unwrap();
        let mut pair = [a.proxy_for_class(0), a.proxy_for_class(1)];
        pair.sort_unstable();
        assert_eq!(pair, [1, 2]);
    }

    #[test]
    fn greedy_descends_and_brute_force_bounds_it() {
        for seed in 0..10u64 {
            let c = 6;
            let s = random_similarity(c, derive_seed(77, seed));
            let p = random_proxies(c, 4, derive_seed(78, seed)).unwrap();
            let greedy = greedy_assign(&s, &p, 16, derive_seed(79, seed)).unwrap();
            let brute = brute_force_assign(&s, &p).unwrap();
            let gv = assignment_objective(&s, &p, &greedy).unwrap();
            let bv = assignment_objective(&s, &p, &brute).unwrap();
            assert!(bv <= gv + 1e-12, "brute force must be optimal");
            // random initial assignment never beats the descent result
            let mut rng = rng_from_seed(derive_seed(80, seed));
            let mut init: Vec<usize> = (0..c).collect();
            init.shuffle(&mut rng);
            let iv =
                assignment_objective(&s, &p, &Assignment::new(init).unwrap()).unwrap();
            assert!(gv <= iv + 1e-12);
        }
    }

    #[test]
    fn greedy_deterministic_per_seed() {
        let s = random_similarity(8, 5);
        let p = random_proxies(8, 4, 6).unwrap();
        let a = greedy_assign(&s, &p, 4, 11).unwrap();
        let b = greedy_assign(&s, &p, 4, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn argmin_scale_invariant() {
        for seed in 0..20u64 {
            let c = 5;
            let s = random_similarity(c, derive_seed(31, seed));
            let p = random_proxies(c, 3, derive_seed(32, seed)).unwrap();
            let p3 = ProxySet::new(p.columns() * 3.0, ProxyKind::Learned, 9.0).unwrap();
            let a1 = brute_force_assign(&s, &p).unwrap();
            let a3 = brute_force_assign(&s, &p3).unwrap();
            assert_eq!(a1, a3, "seed {seed}");
        }
    }

    #[test]
    fn brute_force_equivariant_under_relabeling() {
        use rand::seq::SliceRandom;
        for seed in 0..10u64 {
            let c = 5;
            let s = random_similarity(c, derive_seed(41, seed));
            let p = random_proxies(c, 3, derive_seed(42, seed)).unwrap();
            let a = brute_force_assign(&s, &p).unwrap();

            // relabel classes by sigma: new class i is old class sigma[i]
            let mut sigma: Vec<usize> = (0..c).collect();
            let mut rng = rng_from_seed(derive_seed(43, seed));
            sigma.shuffle(&mut rng);
            let mut sm = DMatrix::<f64>::zeros(c, c);
            for i in 0..c {
                for j in 0..c {
                    sm[(i, j)] = s.matrix()[(sigma[i], sigma[j])];
                }
            }
            let s2 = SimilarityMatrix::new(sm, SimilaritySource::UserSupplied).unwrap();
            let a2 = brute_force_assign(&s2, &p).unwrap();
            for i in 0..c {
                assert_eq!(
                    a2.proxy_for_class(i),
                    a.proxy_for_class(sigma[i]),
                    "seed {seed}"
                );
            }
        }
    }

    #[test]
    fn brute_force_guard() {
        let s = uniform_similarity(10, 0.5);
        let p = random_proxies(10, 4, 0).unwrap();
        assert!(matches!(
            brute_force_assign(&s, &p),
            Err(Error::BruteForceTooLarge { .. })
        ));
    }

    #[test]
    fn synth_superclass_similarity_structure() {
        // Two well-separated superclasses: within-superclass similarity
        // exceeds every across-superclass similarity.
        let cfg = SynthConfig {
            superclasses: 2,
            classes_per_superclass: 3,
            samples_per_class: 60,
            feature_dim: 16,
            noise_sigma: 0.5,
            separation: 30.0,
            seed: 7,
        };
        let ds = synth_generate(&cfg).unwrap();
        let means = class_means(&ds).unwrap();
        let s = gaussian_similarity(&means).unwrap();
        let within = |i: usize, j: usize| (i / 3) == (j / 3);
        let mut min_within = f64::INFINITY;
        let mut max_across = f64::NEG_INFINITY;
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let v = s.matrix()[(i, j)];
                if within(i, j) {
                    min_within = min_within.min(v);
                } else {
                    max_across = max_across.max(v);
                }
            }
        }
        assert!(
            min_within > max_across,
            "within {min_within} vs across {max_across}"
        );
    }

    #[test]
    fn similarity_matrix_invariants_enforced() {
        let mut m = DMatrix::from_element(2, 2, 0.5);
        m[(0, 1)] = 0.5 + 1e-9;
        assert!(SimilarityMatrix::new(m, SimilaritySource::UserSupplied).is_err());
        let m = DMatrix::from_element(2, 2, 1.5);
        assert!(SimilarityMatrix::new(m, SimilaritySource::UserSupplied).is_err());
    }
}
