//! Numerical checks behind the approach: the dot-product softmax equals
//! the distance softmax under matched biases (Gaussian case, where the
//! Bregman divergence is half the squared Euclidean distance), and the
//! proxy loss is rotation invariant while the hash codes are not.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::itq::{sgn, RotationMatrix};
use crate::rng::{derive_seed, gaussian_matrix, gaussian_vector, random_orthogonal, rng_from_seed};

/// One equivalence instance. The cumulant and its conjugate are fixed to
/// phi(a) = psi(a) = ||a||^2 / 2 throughout, under which the class means
/// coincide with the proxies.
#[derive(Debug, Clone)]
pub struct EquivalenceCase {
    pub embedding: DVector<f64>,
    pub proxies: DMatrix<f64>,
    pub biases: DVector<f64>,
}

impl EquivalenceCase {
    /// Matched biases b_y = -||w_y||^2 / 2 (any shared constant may be
    /// added without changing either softmax).
    pub fn with_matched_biases(embedding: DVector<f64>, proxies: DMatrix<f64>) -> Self {
        let biases = matched_biases(&proxies);
        EquivalenceCase {
            embedding,
            proxies,
            biases,
        }
    }
}

pub fn matched_biases(proxies: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(proxies.ncols(), |j, _| {
        -0.5 * proxies.column(j).norm_squared()
    })
}

fn stable_softmax(z: &DVector<f64>) -> DVector<f64> {
    let m = z.max();
    let mut p = z.map(|v| (v - m).exp());
    let s = p.sum();
    p /= s;
    p
}

/// softmax over w_y' nu + b_y.
pub fn softmax_dot_form(
    embedding: &DVector<f64>,
    proxies: &DMatrix<f64>,
    biases: &DVector<f64>,
) -> Result<DVector<f64>> {
    if proxies.nrows() != embedding.len() {
        return Err(Error::Dimension {
            context: "proxy rows vs embedding",
            expected: embedding.len(),
            actual: proxies.nrows(),
        });
    }
    if biases.len() != proxies.ncols() {
        return Err(Error::Dimension {
            context: "bias count vs proxy count",
            expected: proxies.ncols(),
            actual: biases.len(),
        });
    }
    let z = proxies.tr_mul(embedding) + biases;
    Ok(stable_softmax(&z))
}

/// softmax over -d(nu, w_y) with d the Bregman divergence of
/// phi = ||.||^2/2, i.e. half the squared Euclidean distance.
pub fn softmax_distance_form(
    embedding: &DVector<f64>,
    proxies: &DMatrix<f64>,
) -> Result<DVector<f64>> {
    if proxies.nrows() != embedding.len() {
        return Err(Error::Dimension {
            context: "proxy rows vs embedding",
            expected: embedding.len(),
            actual: proxies.nrows(),
        });
    }
    let z = DVector::from_fn(proxies.ncols(), |j, _| {
        -0.5 * (embedding - proxies.column(j)).norm_squared()
    });
    Ok(stable_softmax(&z))
}

/// Maximum absolute probability discrepancy between the two forms.
pub fn check_equivalence(case: &EquivalenceCase) -> Result<f64> {
    let dot = softmax_dot_form(&case.embedding, &case.proxies, &case.biases)?;
    let dist = softmax_distance_form(&case.embedding, &case.proxies)?;
    Ok((dot - dist).amax())
}

/// Mean cross-entropy of labeled embeddings under the dot-product softmax
/// with zero biases (raw Eq.-style proxy loss, no scaling).
fn mean_proxy_loss(points: &[(DVector<f64>, usize)], proxies: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    for (nu, y) in points {
        let z = proxies.tr_mul(nu);
        let m = z.max();
        let lse = m + z.iter().map(|&v| (v - m).exp()).sum::<f64>().ln();
        total += lse - z[*y];
    }
    total / points.len() as f64
}

fn sign_pattern(v: &DVector<f64>) -> Vec<i8> {
    v.iter().map(|&x| sgn(x) as i8).collect()
}

fn pattern_hamming(a: &[i8], b: &[i8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationAmbiguityReport {
    pub loss_before: f64,
    pub loss_after: f64,
    pub loss_difference: f64,
    /// Points whose sign pattern changed under the joint rotation.
    pub changed_codes: usize,
    /// Unordered point pairs whose mutual Hamming distance changed.
    pub changed_pairs: usize,
    pub point_count: usize,
}

/// Jointly rotate embeddings and proxies: the proxy loss is unchanged
/// while the sign patterns (hence Hamming distances) generally are not.
pub fn rotation_ambiguity_demo(
    points: &[(DVector<f64>, usize)],
    proxies: &DMatrix<f64>,
    rotation: &RotationMatrix,
) -> Result<RotationAmbiguityReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points given".into()));
    }
    let d = proxies.nrows();
    if rotation.dim() != d {
        return Err(Error::Dimension {
            context: "rotation vs proxy dimension",
            expected: d,
            actual: rotation.dim(),
        });
    }
    for (nu, y) in points {
        if nu.len() != d {
            return Err(Error::Dimension {
                context: "point vs proxy dimension",
                expected: d,
                actual: nu.len(),
            });
        }
        if *y >= proxies.ncols() {
            return Err(Error::InvalidArgument(format!(
                "label {y} out of range for {} proxies",
                proxies.ncols()
            )));
        }
    }

    let loss_before = mean_proxy_loss(points, proxies);
    let r = rotation.matrix();
    let rotated_proxies = r * proxies;
    let rotated: Vec<(DVector<f64>, usize)> =
        points.iter().map(|(nu, y)| (r * nu, *y)).collect();
    let loss_after = mean_proxy_loss(&rotated, &rotated_proxies);

    let before_patterns: Vec<Vec<i8>> = points.iter().map(|(nu, _)| sign_pattern(nu)).collect();
    let after_patterns: Vec<Vec<i8>> = rotated.iter().map(|(nu, _)| sign_pattern(nu)).collect();
    let changed_codes = before_patterns
        .iter()
        .zip(&after_patterns)
        .filter(|(a, b)| a != b)
        .count();
    let mut changed_pairs = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let db = pattern_hamming(&before_patterns[i], &before_patterns[j]);
            let da = pattern_hamming(&after_patterns[i], &after_patterns[j]);
            if db != da {
                changed_pairs += 1;
            }
        }
    }

    Ok(RotationAmbiguityReport {
        loss_before,
        loss_after,
        loss_difference: (loss_before - loss_after).abs(),
        changed_codes,
        changed_pairs,
        point_count: points.len(),
    })
}

pub const EQUIVALENCE_TOLERANCE: f64 = 1e-12;
pub const NEGATIVE_CONTROL_MINIMUM: f64 = 1e-6;
pub const ROTATION_LOSS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceSuiteReport {
    pub trials: usize,
    pub max_discrepancy: f64,
    /// Discrepancy of a zero-bias, unequal-norm control (must be large).
    pub negative_control_discrepancy: f64,
    pub passed: bool,
}

/// Random instances with matched biases must agree to 1e-12; a zero-bias
/// unequal-norm instance must visibly disagree.
pub fn run_equivalence_suite(trials: usize, seed: u64) -> Result<EquivalenceSuiteReport> {
    let mut max_discrepancy: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        let d = 2 + (t % 7);
        let c = 2 + (t % 5);
        let proxies = gaussian_matrix(&mut rng, d, c);
        let embedding = gaussian_vector(&mut rng, d);
        let case = EquivalenceCase::with_matched_biases(embedding, proxies);
        max_discrepancy = max_discrepancy.max(check_equivalence(&case)?);
    }

    // Negative control: zero biases with clearly unequal proxy norms.
    let mut rng = rng_from_seed(derive_seed(seed, trials as u64 + 1));
    let mut proxies = gaussian_matrix(&mut rng, 4, 3);
    let scaled = proxies.column(0) * 3.0;
    proxies.set_column(0, &scaled);
    let control = EquivalenceCase {
        embedding: gaussian_vector(&mut rng, 4),
        proxies,
        biases: DVector::zeros(3),
    };
    let negative_control_discrepancy = check_equivalence(&control)?;

    let passed = max_discrepancy < EQUIVALENCE_TOLERANCE
        && negative_control_discrepancy > NEGATIVE_CONTROL_MINIMUM;
    Ok(EquivalenceSuiteReport {
        trials,
        max_discrepancy,
        negative_control_discrepancy,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationSuiteReport {
    pub trials: usize,
    pub max_loss_difference: f64,
    /// Trials in which at least one hash code changed.
    pub trials_with_changed_codes: usize,
    pub passed: bool,
}

/// Random joint rotations: loss preserved to 1e-12 in every trial, codes
/// changed in at least one.
pub fn run_rotation_suite(trials: usize, seed: u64) -> Result<RotationSuiteReport> {
    let mut max_loss_difference: f64 = 0.0;
    let mut trials_with_changed_codes = 0;
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, 1000 + t as u64));
        let d = 2 + (t % 6);
        let c = 2 + (t % 4);
        let proxies = gaussian_matrix(&mut rng, d, c);
        let points: Vec<(DVector<f64>, usize)> = (0..10)
            .map(|k| (gaussian_vector(&mut rng, d), k % c))
            .collect();
        let rotation = RotationMatrix::new(random_orthogonal(&mut rng, d))?;
        let report = rotation_ambiguity_demo(&points, &proxies, &rotation)?;
        max_loss_difference = max_loss_difference.max(report.loss_difference);
        if report.changed_codes > 0 {
            trials_with_changed_codes += 1;
        }
    }
    let passed =
        max_loss_difference < ROTATION_LOSS_TOLERANCE && trials_with_changed_codes >= 1;
    Ok(RotationSuiteReport {
        trials,
        max_loss_difference,
        trials_with_changed_codes,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dot_form_uniform_at_zero() {
        let p = gaussian_matrix(&mut rng_from_seed(1), 3, 5);
        let out = softmax_dot_form(&DVector::zeros(3), &p, &DVector::zeros(5)).unwrap();
        for v in out.iter() {
            assert_abs_diff_eq!(*v, 0.2, epsilon = 1e-15);
        }
    }

    #[test]
    fn single_class_probability_one() {
        let p = DMatrix::from_columns(&[DVector::from_vec(vec![1.0, 2.0])]);
        let dot = softmax_dot_form(&DVector::from_vec(vec![0.3, -0.1]), &p, &DVector::zeros(1))
            .unwrap();
        assert_abs_diff_eq!(dot[0], 1.0);
        let dist =
            softmax_distance_form(&DVector::from_vec(vec![0.3, -0.1]), &p).unwrap();
        assert_abs_diff_eq!(dist[0], 1.0);
    }

    #[test]
    fn distributions_are_normalized() {
        let mut rng = rng_from_seed(2);
        for _ in 0..50 {
            let p = gaussian_matrix(&mut rng, 4, 6);
            let nu = gaussian_vector(&mut rng, 4);
            let b = gaussian_vector(&mut rng, 6);
            let dot = softmax_dot_form(&nu, &p, &b).unwrap();
            let dist = softmax_distance_form(&nu, &p).unwrap();
            assert_abs_diff_eq!(dot.sum(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(dist.sum(), 1.0, epsilon = 1e-12);
            assert!(dot.iter().all(|&v| v >= 0.0));
            assert!(dist.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn axis_case_both_forms() {
        // nu=(1,0), w1=(1,0), w2=(0,1): p1 = e/(e+1) in both forms.
        let p = DMatrix::from_columns(&[
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        ]);
        let nu = DVector::from_vec(vec![1.0, 0.0]);
        let expected = std::f64::consts::E / (std::f64::consts::E + 1.0);
        let dist = softmax_distance_form(&nu, &p).unwrap();
        assert_abs_diff_eq!(dist[0], expected, epsilon = 1e-15);
        let case = EquivalenceCase::with_matched_biases(nu, p);
        assert!(check_equivalence(&case).unwrap() < 1e-15);
        assert_abs_diff_eq!(expected, 0.73106, epsilon = 5e-6);
    }

    #[test]
    fn distance_form_favors_nearest() {
        let p = DMatrix::from_columns(&[
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![-30.0, 0.0]),
        ]);
        let dist = softmax_distance_form(&DVector::from_vec(vec![1.0, 0.0]), &p).unwrap();
        assert!(dist[0] > 1.0 - 1e-12);
    }

    #[test]
    fn equivalence_random_instances() {
        let report = run_equivalence_suite(200, 9).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.max_discrepancy < 1e-12);
        assert!(report.negative_control_discrepancy > 1e-6);
    }

    #[test]
    fn negative_control_requires_matched_biases() {
        // b = 0 with unequal norms must break the identity.
        let p = DMatrix::from_columns(&[
            DVector::from_vec(vec![2.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.5]),
        ]);
        let case = EquivalenceCase {
            embedding: DVector::from_vec(vec![0.3, 0.4]),
            proxies: p,
            biases: DVector::zeros(2),
        };
        assert!(check_equivalence(&case).unwrap() > 1e-6);
    }

    #[test]
    fn shared_bias_constant_is_irrelevant() {
        let mut rng = rng_from_seed(3);
        let p = gaussian_matrix(&mut rng, 3, 4);
        let nu = gaussian_vector(&mut rng, 3);
        let case = EquivalenceCase::with_matched_biases(nu.clone(), p.clone());
        let shifted = EquivalenceCase {
            embedding: nu,
            biases: case.biases.add_scalar(4.2),
            proxies: p,
        };
        assert!(check_equivalence(&shifted).unwrap() < 1e-12);
    }

    #[test]
    fn identity_rotation_changes_nothing() {
        let mut rng = rng_from_seed(4);
        let p = gaussian_matrix(&mut rng, 3, 4);
        let points: Vec<(DVector<f64>, usize)> =
            (0..8).map(|k| (gaussian_vector(&mut rng, 3), k % 4)).collect();
        let report =
            rotation_ambiguity_demo(&points, &p, &RotationMatrix::identity(3)).unwrap();
        assert_eq!(report.changed_codes, 0);
        assert_eq!(report.changed_pairs, 0);
        assert_abs_diff_eq!(report.loss_before, report.loss_after, epsilon = 0.0);
    }

    #[test]
    fn quadrant_layout_rotated_45_degrees() {
        // Four classes at the diagonal directions of the plane; every
        // point shares its class's quadrant, so same-class codes agree.
        // A 45 degree rotation puts proxies on the axes and splits the
        // clusters across quadrant boundaries: the loss is unchanged but
        // same-class codes stop agreeing.
        let s = 1.0 / 2f64.sqrt();
        let proxies = DMatrix::from_columns(&[
            DVector::from_vec(vec![s, s]),
            DVector::from_vec(vec![-s, s]),
            DVector::from_vec(vec![-s, -s]),
            DVector::from_vec(vec![s, -s]),
        ]);
        let mut points = Vec::new();
        let mut rng = rng_from_seed(5);
        for class in 0..4usize {
            for _ in 0..6 {
                let jitter = gaussian_vector(&mut rng, 2) * 0.15;
                points.push((proxies.column(class) + jitter, class));
            }
        }
        let theta = std::f64::consts::FRAC_PI_4;
        let rot = RotationMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        ))
        .unwrap();
        let report = rotation_ambiguity_demo(&points, &proxies, &rot).unwrap();
        assert!(report.loss_difference < 1e-12);
        assert!(report.changed_codes > 0, "rotation must alter codes");
        assert!(report.changed_pairs > 0);
    }

    #[test]
    fn rotation_suite_passes() {
        let report = run_rotation_suite(100, 11).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.trials, 100);
    }

    #[test]
    fn non_orthogonal_rotation_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.0, 1.0]);
        assert!(RotationMatrix::new(m).is_err());
    }
}
