//! Binary alignment of a real-valued proxy set.
//!
//! Finds the rotation that makes the proxies as binary as possible by
//! alternating minimization of sum_k ||G w_k - sgn(G w_k)||^2: fix the
//! rotation and snap to signs, fix the signs and solve the orthogonal
//! Procrustes problem. Binarizing the rotated set yields the
//! hash-consistent large-margin proxies.
//!
//! Sign convention: sgn(0) = +1, everywhere.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::proxy::{ProxyKind, ProxySet};
use crate::rng::{derive_seed, random_orthogonal, rng_from_seed};

/// sgn with sgn(0) = +1.
pub fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;
const DETERMINANT_TOLERANCE: f64 = 1e-6;
const ERROR_CHANGE_TOLERANCE: f64 = 1e-10;

/// Orthogonal d x d matrix, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    m: DMatrix<f64>,
}

impl RotationMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                context: "rotation matrix must be square",
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        let n = m.nrows();
        let gram = m.transpose() * &m;
        let deviation = (gram - DMatrix::<f64>::identity(n, n)).amax();
        if deviation >= ORTHOGONALITY_TOLERANCE {
            return Err(Error::NotOrthogonal { deviation });
        }
        let det = m.determinant();
        if (det.abs() - 1.0).abs() >= DETERMINANT_TOLERANCE {
            return Err(Error::NotOrthogonal {
                deviation: (det.abs() - 1.0).abs(),
            });
        }
        Ok(RotationMatrix { m })
    }

    pub fn identity(n: usize) -> Self {
        RotationMatrix {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }
}

/// Per-iteration quantization error of one alignment run.
#[derive(Debug, Clone)]
pub struct AlignmentTrace {
    pub errors: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Total quantization error sum_k ||G w_k - sgn(G w_k)||^2.
pub fn quantization_error(rotation: &RotationMatrix, p: &ProxySet) -> Result<f64> {
    if rotation.dim() != p.dim() {
        return Err(Error::Dimension {
            context: "rotation vs proxy dimension",
            expected: p.dim(),
            actual: rotation.dim(),
        });
    }
    Ok(raw_quantization_error(rotation.matrix(), p.columns()))
}

fn sign_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(sgn)
}

/// Rotation minimizing the quantization error.
///
/// Each restart runs the alternation from a random orthogonal
/// initialization (QR of a Gaussian matrix). The alternation alone cannot
/// escape sign-pattern basins, so when the input is an exact rotation of a
/// +-1 matrix (integral Gram), an additional candidate initialization is
/// recovered combinatorially first; it competes with the restarts under
/// the same error criterion. Lowest restart index wins ties.
pub fn itq_rotation(
    p: &ProxySet,
    max_iters: usize,
    restarts: usize,
    seed: u64,
) -> Result<(RotationMatrix, AlignmentTrace)> {
    if p.kind().is_binary() {
        return Err(Error::InvalidArgument(format!(
            "alignment expects a real-valued proxy set, got kind {}",
            p.kind().name()
        )));
    }
    if restarts < 1 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    let w = p.columns();

    let frame_run = binary_frame_candidate(w, p.norm_constant())
        .map(|init| run_alternation(init, w, max_iters));

    let runs: Vec<(usize, DMatrix<f64>, AlignmentTrace)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(derive_seed(seed, r as u64));
            let init = random_orthogonal(&mut rng, p.dim());
            let (gamma, trace) = run_alternation(init, w, max_iters);
            (r, gamma, trace)
        })
        .collect();

    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.2.errors.last() < best.2.errors.last() {
            best = run;
        }
    }
    // The exact-frame candidate wins only when strictly better.
    if let Some((gamma, trace)) = &frame_run {
        if trace.errors.last() < best.2.errors.last() {
            let rotation = RotationMatrix::new(gamma.clone())?;
            return Ok((rotation, trace.clone()));
        }
    }
    let rotation = RotationMatrix::new(best.1.clone())?;
    Ok((rotation, best.2.clone()))
}

/// When W is (a rotation of) a +-1 matrix scaled to column norm K, the
/// scaled Gram (d/K) * W^T W equals the integer Gram of the underlying
/// sign matrix. Any +-1 matrix with that Gram gives an orthogonal map
/// onto sign vectors, i.e. a zero-loss initialization for the alternation.
/// Returns None when the Gram is not integral or no sign matrix fits.
fn binary_frame_candidate(w: &DMatrix<f64>, norm_constant: f64) -> Option<DMatrix<f64>> {
    let d = w.nrows();
    let c = w.ncols();
    if norm_constant <= 0.0 || c < 2 {
        return None;
    }
    let scale = d as f64 / norm_constant;
    let gram_real = w.transpose() * w * scale;
    let mut gram = vec![vec![0i64; c]; c];
    for i in 0..c {
        for j in 0..c {
            let v = gram_real[(i, j)];
            let r = v.round();
            if (v - r).abs() > 1e-6 || r.abs() > d as f64 + 0.5 {
                return None;
            }
            // Dot products of +-1 vectors in dimension d share d's parity.
            if (r as i64 - d as i64).rem_euclid(2) != 0 {
                return None;
            }
            gram[i][j] = r as i64;
        }
    }
    for (i, row) in gram.iter().enumerate() {
        if row[i] != d as i64 {
            return None;
        }
    }

    let signs = gram_consistent_sign_matrix(&gram, d, c)?;
    // Orientation: Procrustes onto the recovered sign targets.
    let svd = (&signs * w.transpose()).svd(true, true);
    let gamma = svd.u? * svd.v_t?;
    // Verify the candidate is exact: |gamma w| entries all sqrt(K/d).
    let expected = (norm_constant / d as f64).sqrt();
    let rotated = &gamma * w;
    let ok = rotated
        .iter()
        .all(|v| (v.abs() - expected).abs() < 1e-7 * expected.max(1.0));
    if ok {
        Some(gamma)
    } else {
        None
    }
}

/// Depth-first recovery of a d x C +-1 matrix with prescribed integer Gram.
///
/// Row signs and row order are free (they only compose the rotation with a
/// signed permutation), so the first column is fixed to all ones and +1
/// entries are packed to the front of every interchangeable row block
/// (blocks are rows on which all previously assigned columns agree).
/// Columns are assigned fail-first: the unassigned column with the fewest
/// Gram-feasible block assignments is chosen at every step.
fn gram_consistent_sign_matrix(gram: &[Vec<i64>], d: usize, c: usize) -> Option<DMatrix<f64>> {
    const NODE_CAP: usize = 4_000_000;
    const ENUM_CAP: usize = 64;

    struct Search<'a> {
        gram: &'a [Vec<i64>],
        d: usize,
        /// Assigned columns, in assignment order.
        cols: Vec<Vec<i8>>,
        /// Gram indices of the assigned columns.
        placed: Vec<usize>,
        nodes: usize,
    }

    impl Search<'_> {
        /// All block assignments for column j consistent with the Gram rows
        /// of the already-placed columns, up to `cap` of them.
        fn feasible_assignments(
            &mut self,
            j: usize,
            blocks: &[Vec<usize>],
            cap: usize,
        ) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut assignment = vec![0usize; blocks.len()];
            self.enumerate(j, blocks, 0, &mut assignment, cap, &mut out);
            out
        }

        fn enumerate(
            &mut self,
            j: usize,
            blocks: &[Vec<usize>],
            b: usize,
            assignment: &mut Vec<usize>,
            cap: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if out.len() >= cap || self.nodes > NODE_CAP {
                return;
            }
            self.nodes += 1;
            if b == blocks.len() {
                for (rank, &i) in self.placed.iter().enumerate() {
                    let mut dot = 0i64;
                    for (blk, &x) in blocks.iter().zip(assignment.iter()) {
                        let s = self.cols[rank][blk[0]] as i64;
                        dot += s * (2 * x as i64 - blk.len() as i64);
                    }
                    if dot != self.gram[i][j] {
                        return;
                    }
                }
                out.push(assignment.clone());
                return;
            }
            let n_b = blocks[b].len();
            let remaining: i64 = blocks[b + 1..].iter().map(|blk| blk.len() as i64).sum();
            let remaining_parity = remaining.rem_euclid(2);
            for x in 0..=n_b {
                assignment[b] = x;
                let mut feasible = true;
                for (rank, &i) in self.placed.iter().enumerate() {
                    let mut partial = 0i64;
                    for (blk, &xx) in blocks[..=b].iter().zip(assignment[..=b].iter()) {
                        let s = self.cols[rank][blk[0]] as i64;
                        partial += s * (2 * xx as i64 - blk.len() as i64);
                    }
                    let gap = self.gram[i][j] - partial;
                    if gap.abs() > remaining || gap.rem_euclid(2) != remaining_parity {
                        feasible = false;
                        break;
                    }
                }
                if feasible {
                    self.enumerate(j, blocks, b + 1, assignment, cap, out);
                }
            }
        }

        fn apply(
            &mut self,
            j: usize,
            blocks: &[Vec<usize>],
            assignment: &[usize],
        ) -> (Vec<i8>, Vec<Vec<usize>>) {
            let mut col = vec![0i8; self.d];
            let mut new_blocks = Vec::new();
            for (blk, &x) in blocks.iter().zip(assignment.iter()) {
                for (pos, &row) in blk.iter().enumerate() {
                    col[row] = if pos < x { 1 } else { -1 };
                }
                if x > 0 {
                    new_blocks.push(blk[..x].to_vec());
                }
                if x < blk.len() {
                    new_blocks.push(blk[x..].to_vec());
                }
            }
            self.cols.push(col.clone());
            self.placed.push(j);
            (col, new_blocks)
        }

        fn unapply(&mut self) {
            self.cols.pop();
            self.placed.pop();
        }

        fn solve(&mut self, pending: &[usize], blocks: &[Vec<usize>]) -> bool {
            if pending.is_empty() {
                return true;
            }
            if self.nodes > NODE_CAP {
                return false;
            }
            // Fail-first: expand the column with the fewest options.
            let mut best: Option<(usize, Vec<Vec<usize>>)> = None;
            for &j in pending {
                let opts = self.feasible_assignments(j, blocks, ENUM_CAP);
                if opts.is_empty() {
                    return false;
                }
                let better = match &best {
                    None => true,
                    Some((_, prev)) => opts.len() < prev.len(),
                };
                if better {
                    let single = opts.len() == 1;
                    best = Some((j, opts));
                    if single {
                        break;
                    }
                }
            }
            let (j, opts) = best.unwrap();
            let rest: Vec<usize> = pending.iter().copied().filter(|&x| x != j).collect();
            for assignment in opts {
                let (_, new_blocks) = self.apply(j, blocks, &assignment);
                if self.solve(&rest, &new_blocks) {
                    return true;
                }
                self.unapply();
            }
            false
        }
    }

    let mut search = Search {
        gram,
        d,
        cols: vec![vec![1i8; d]],
        placed: vec![0],
        nodes: 0,
    };
    let blocks = vec![(0..d).collect::<Vec<_>>()];
    let pending: Vec<usize> = (1..c).collect();
    if !search.solve(&pending, &blocks) {
        return None;
    }
    let mut m = DMatrix::zeros(d, c);
    for (rank, &j) in search.placed.iter().enumerate() {
        for (i, &s) in search.cols[rank].iter().enumerate() {
            m[(i, j)] = s as f64;
        }
    }
    Some(m)
}

fn run_alternation(
    init: DMatrix<f64>,
    w: &DMatrix<f64>,
    max_iters: usize,
) -> (DMatrix<f64>, AlignmentTrace) {
    let mut gamma = init;
    let mut errors = vec![raw_quantization_error(&gamma, w)];
    let mut prev_signs: Option<DMatrix<f64>> = None;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iters {
        let signs = sign_matrix(&(&gamma * w));
        // Sign fixpoint: the Procrustes step would reproduce gamma.
        if prev_signs.as_ref() == Some(&signs) {
            converged = true;
            break;
        }
        // Fix B, solve min ||G W - B||_F over orthogonal G:
        // SVD of B W^T = U S V^T gives G = U V^T.
        let svd = (&signs * w.transpose()).svd(true, true);
        gamma = svd.u.expect("svd with u") * svd.v_t.expect("svd with v_t");
        iterations += 1;

        let err = raw_quantization_error(&gamma, w);
        let delta = errors.last().unwrap() - err;
        errors.push(err);
        if delta.abs() < ERROR_CHANGE_TOLERANCE {
            converged = true;
            break;
        }
        prev_signs = Some(signs);
    }

    (
        gamma,
        AlignmentTrace {
            errors,
            iterations,
            converged,
        },
    )
}

fn raw_quantization_error(gamma: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    (gamma * w).iter().map(|&v| (v - sgn(v)).powi(2)).sum()
}

/// sgn(G W) as a proxy set of kind hclm with K = d. Duplicate columns
/// (collapsed classes) are kept and logged; they remain discoverable via
/// [`ProxySet::duplicate_columns`].
pub fn binarize(rotation: &RotationMatrix, p: &ProxySet) -> Result<ProxySet> {
    if p.kind().is_binary() {
        return Err(Error::InvalidArgument(
            "binarize expects a real-valued proxy set".into(),
        ));
    }
    if rotation.dim() != p.dim() {
        return Err(Error::Dimension {
            context: "rotation vs proxy dimension",
            expected: p.dim(),
            actual: rotation.dim(),
        });
    }
    let binary = sign_matrix(&(rotation.matrix() * p.columns()));
    let out = ProxySet::new(binary, ProxyKind::Hclm, p.dim() as f64)?;
    let dups = out.duplicate_columns();
    if !dups.is_empty() {
        log::warn!(
            "binarization collapsed {} class pair(s): {:?}",
            dups.len(),
            dups
        );
    }
    Ok(out)
}

/// Total l1 mass sum_k ||G w_k||_1; the alternation maximizes this
/// (error = ||W||^2 + C*d - 2 * l1 mass).
pub fn rotated_l1_mass(rotation: &RotationMatrix, p: &ProxySet) -> f64 {
    (rotation.matrix() * p.columns())
        .iter()
        .map(|v| v.abs())
        .sum()
}
