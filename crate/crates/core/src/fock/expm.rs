//! Action of `exp((r/2)(a² − a†²))` on vectors of a padded truncated space.
//!
//! The generator is real, antisymmetric and couples only levels two apart,
//! so its exponential is applied by scaled Taylor steps instead of forming
//! a dense matrix. This keeps single-mode squeezing affordable at cutoffs
//! in the thousands.

use num_complex::Complex64;

/// Taylor step size bound, in units of the generator 1-norm.
const STEP_NORM: f64 = 2.0;
const TAYLOR_TOL: f64 = 1e-18;
const MAX_TERMS: usize = 80;

/// Extra levels carried above the cutoff while squeezing.
pub(crate) fn padding(cutoff: usize) -> usize {
    (cutoff / 2).max(32)
}

/// `w = (r/2)(a² − a†²) v`.
fn apply_generator(r: f64, v: &[Complex64], w: &mut [Complex64]) {
    let dim = v.len();
    let half = 0.5 * r;
    for n in 0..dim {
        let mut acc = Complex64::new(0.0, 0.0);
        if n + 2 < dim {
            acc += v[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt();
        }
        if n >= 2 {
            acc -= v[n - 2] * ((n * (n - 1)) as f64).sqrt();
        }
        w[n] = acc * half;
    }
}

/// Upper bound on the 1-norm of the truncated generator of dimension `dim`.
fn generator_norm(r: f64, dim: usize) -> f64 {
    r.abs() * dim as f64
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Applies `exp((r/2)(a² − a†²))` to `v` in place, treating `v.len()` as the
/// truncated dimension.
pub(crate) fn squeeze_in_place(r: f64, v: &mut [Complex64]) {
    let dim = v.len();
    if r == 0.0 || dim == 0 {
        return;
    }
    let steps = (generator_norm(r, dim) / STEP_NORM).ceil().max(1.0) as usize;
    let dt = r / steps as f64;
    let mut term = vec![Complex64::new(0.0, 0.0); dim];
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for _ in 0..steps {
        term.copy_from_slice(v);
        let scale = inf_norm(v).max(f64::MIN_POSITIVE);
        let mut previous_small = false;
        for k in 1..=MAX_TERMS {
            apply_generator(dt, &term, &mut next);
            let inv_k = 1.0 / k as f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * inv_k;
            }
            for (x, t) in v.iter_mut().zip(&term) {
                *x += t;
            }
            let small = inf_norm(&term) <= TAYLOR_TOL * scale;
            if small && previous_small {
                break;
            }
            previous_small = small;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_block_rotation() {
        // On span{|0⟩, |2⟩} at dim 3 the generator is (r/2)√2 [[0,1],[-1,0]].
        let r = 0.9;
        let mut v = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        squeeze_in_place(r, &mut v);
        let theta = r / 2.0 * 2f64.sqrt();
        assert!((v[0].re - theta.cos()).abs() < 1e-14);
        assert!((v[2].re + theta.sin()).abs() < 1e-14);
        assert_eq!(v[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inverse_and_norm() {
        let mut v: Vec<Complex64> = (0..40)
            .map(|n| Complex64::new(1.0 / (1.0 + n as f64), (n as f64 * 0.3).sin()))
            .collect();
        let norm0: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let original = v.clone();
        squeeze_in_place(0.7, &mut v);
        let norm1: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm0 - norm1).abs() < 1e-12 * norm0);
        squeeze_in_place(-0.7, &mut v);
        for (a, b) in v.iter().zip(&original) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
