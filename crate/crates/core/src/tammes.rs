//! Sphere-packing solver: place C unit vectors maximizing the minimum
//! pairwise squared distance.
//!
//! The max-min objective is smoothed with a log-sum-exp over pairwise
//! squared distances and maximized by projected gradient ascent on the
//! sphere, annealing the temperature geometrically so the smooth objective
//! sharpens toward the true minimum. Restarts are independent and the best
//! iterate (by the true min distance) is kept, so the reported objective
//! never decreases across accepted iterates.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::proxy::{ProxyKind, ProxySet};
use crate::rng::{derive_seed, gaussian_vector, rng_from_seed};

#[derive(Debug, Clone)]
pub struct TammesConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_size: f64,
    /// Initial log-sum-exp temperature; annealed geometrically down to
    /// `FINAL_TEMPERATURE` over the first 80% of iterations.
    pub smoothing_temperature: f64,
    /// A restart counts as converged once the true objective stops
    /// improving by more than this over a trailing window.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for TammesConfig {
    fn default() -> Self {
        TammesConfig {
            restarts: 8,
            max_iters: 2000,
            step_size: 0.1,
            smoothing_temperature: 0.5,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl TammesConfig {
    pub fn with_seed(seed: u64) -> Self {
        TammesConfig {
            seed,
            ..TammesConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidArgument("restarts must be >= 1".into()));
        }
        if self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be > 0".into()));
        }
        if self.step_size <= 0.0 || self.smoothing_temperature <= 0.0 {
            return Err(Error::InvalidArgument(
                "step_size and smoothing_temperature must be > 0".into(),
            ));
        }
        Ok(())
    }
}

const FINAL_TEMPERATURE: f64 = 1e-3;
const PLATEAU_WINDOW: usize = 200;

#[derive(Debug, Clone)]
pub struct TammesSolution {
    pub proxies: ProxySet,
    /// min_{i != j} ||w_i - w_j||^2 of the returned set.
    pub min_squared_distance: f64,
    /// False when no restart plateaued within max_iters; the best iterate
    /// is still returned.
    pub converged: bool,
    /// Restart that produced the winner (lowest index wins ties).
    pub restart_index: usize,
}

/// Min pairwise squared distance of a column set.
pub fn min_pairwise_sq_dist(w: &DMatrix<f64>) -> f64 {
    let c = w.ncols();
    let mut best = f64::INFINITY;
    for i in 0..c {
        for j in i + 1..c {
            let d = (w.column(i) - w.column(j)).norm_squared();
            if d < best {
                best = d;
            }
        }
    }
    best
}

pub fn solve_tammes(classes: usize, dim: usize, cfg: &TammesConfig) -> Result<TammesSolution> {
    if classes < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 classes, got {classes}"
        )));
    }
    if dim < 1 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    cfg.validate()?;

    let runs: Vec<(usize, DMatrix<f64>, f64, bool)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let (w, obj, conv) = run_restart(classes, dim, cfg, derive_seed(cfg.seed, r as u64));
            (r, w, obj, conv)
        })
        .collect();

    // Merge deterministically: higher objective wins, lowest index on ties.
    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.2 > best.2 {
            best = run;
        }
    }
    let converged = runs.iter().any(|r| r.3);
    if !converged {
        log::warn!(
            "tammes solver did not plateau within {} iterations; returning best iterate",
            cfg.max_iters
        );
    }

    let mut w = best.1.clone();
    renormalize(&mut w);
    Ok(TammesSolution {
        proxies: ProxySet::new(w, ProxyKind::Tammes, 1.0)?,
        min_squared_distance: best.2,
        converged,
        restart_index: best.0,
    })
}

fn run_restart(
    classes: usize,
    dim: usize,
    cfg: &TammesConfig,
    seed: u64,
) -> (DMatrix<f64>, f64, bool) {
    let mut rng = rng_from_seed(seed);
    let mut w = DMatrix::zeros(dim, classes);
    for j in 0..classes {
        let mut v = gaussian_vector(&mut rng, dim);
        let mut n = v.norm();
        while n == 0.0 {
            v = gaussian_vector(&mut rng, dim);
            n = v.norm();
        }
        w.set_column(j, &(v / n));
    }

    let anneal_iters = (cfg.max_iters as f64 * 0.8).max(1.0);
    let decay = (FINAL_TEMPERATURE / cfg.smoothing_temperature).powf(1.0 / anneal_iters);

    let mut best_w = w.clone();
    let mut best_obj = min_pairwise_sq_dist(&w);
    let mut last_improved = 0usize;
    let mut converged = false;
    let mut temperature = cfg.smoothing_temperature;
    let mut grad = DMatrix::zeros(dim, classes);

    for iter in 0..cfg.max_iters {
        smoothed_min_gradient(&w, temperature, &mut grad);

        // Riemannian step: project the gradient onto the tangent space of
        // each sphere before the retraction (normalize).
        for j in 0..classes {
            let wj = w.column(j).into_owned();
            let gj = grad.column(j).into_owned();
            let tangent = &gj - &wj * wj.dot(&gj);
            let stepped = &wj + tangent * cfg.step_size;
            let n = stepped.norm();
            if n > 0.0 {
                w.set_column(j, &(stepped / n));
            }
        }

        let obj = min_pairwise_sq_dist(&w);
        if obj > best_obj + cfg.tolerance {
            best_obj = obj;
            best_w.copy_from(&w);
            last_improved = iter;
        } else if obj > best_obj {
            // Keep the strictly-better iterate without resetting the plateau
            // clock, so tolerance-scale dithering cannot stall termination.
            best_obj = obj;
            best_w.copy_from(&w);
        }

        temperature = (temperature * decay).max(FINAL_TEMPERATURE);

        if temperature <= FINAL_TEMPERATURE && iter - last_improved >= PLATEAU_WINDOW {
            converged = true;
            break;
        }
    }

    (best_w, best_obj, converged)
}

/// Gradient of -tau*log sum_{i<j} exp(-D_ij/tau) with respect to every
/// column, written into `grad`. Computed with the max-subtraction trick.
fn smoothed_min_gradient(w: &DMatrix<f64>, temperature: f64, grad: &mut DMatrix<f64>) {
    let c = w.ncols();
    let mut dists = Vec::with_capacity(c * (c - 1) / 2);
    let mut dmin = f64::INFINITY;
    for i in 0..c {
        for j in i + 1..c {
            let d = (w.column(i) - w.column(j)).norm_squared();
            dists.push((i, j, d));
            if d < dmin {
                dmin = d;
            }
        }
    }
    let mut z = 0.0;
    let mut weights = Vec::with_capacity(dists.len());
    for &(_, _, d) in &dists {
        let e = (-(d - dmin) / temperature).exp();
        weights.push(e);
        z += e;
    }
    grad.fill(0.0);
    for (&(i, j, _), &e) in dists.iter().zip(&weights) {
        let p = e / z;
        let diff = (w.column(i) - w.column(j)) * (2.0 * p);
        let gi = grad.column(i) + &diff;
        grad.set_column(i, &gi);
        let gj = grad.column(j) - &diff;
        grad.set_column(j, &gj);
    }
}

fn renormalize(w: &mut DMatrix<f64>) {
    for j in 0..w.ncols() {
        let n = w.column(j).norm();
        if n > 0.0 {
            let col = w.column(j) / n;
            w.set_column(j, &col);
        }
    }
}

/// Simplex bound 2C/(C-1): the optimal min squared distance when C <= d+1.
pub fn simplex_bound(classes: usize) -> f64 {
    2.0 * classes as f64 / (classes as f64 - 1.0)
}
