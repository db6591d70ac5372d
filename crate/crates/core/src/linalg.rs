//! One-sided Jacobi singular value decomposition for complex matrices.

use num_complex::Complex64;

use crate::zak::CMatrix;
use crate::Vector;

const MAX_SWEEPS: usize = 80;

/// Singular values of `a` with their left singular vectors, largest first.
/// At most `min(rows, cols)` pairs are returned; the vector of a zero singular
/// value is the zero vector.
pub(crate) fn left_singular_pairs(a: &CMatrix) -> Vec<(f64, Vector)> {
    let mut cols: Vec<Vector> = a.column_iter().map(|c| c.into_owned()).collect();
    let n = cols.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = cols[p].norm_squared();
                let beta = cols[q].norm_squared();
                let gamma = cols[p].dotc(&cols[q]);
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // rotate a_p and e^{-i phi} a_q, which have a real inner product
                let aq = &cols[q] * phase.conj();
                let ap = cols[p].clone();
                cols[p] = &ap * Complex64::new(c, 0.0) - &aq * Complex64::new(s, 0.0);
                cols[q] = &ap * Complex64::new(s, 0.0) + &aq * Complex64::new(c, 0.0);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(f64, Vector)> = cols
        .into_iter()
        .map(|c| {
            let sigma = c.norm();
            if sigma > 0.0 {
                (sigma, &c / Complex64::new(sigma, 0.0))
            } else {
                (0.0, c)
            }
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    pairs.truncate(a.nrows().min(a.ncols()));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(r: &mut ChaCha8Rng, n: usize, m: usize) -> CMatrix {
        CMatrix::from_fn(n, m, |_, _| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
    }

    fn check(a: &CMatrix) {
        let pairs = left_singular_pairs(a);
        let energy: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
        assert!((energy - a.norm_squared()).abs() < 1e-10 * a.norm_squared().max(1.0));
        let nonzero: Vec<&(f64, Vector)> = pairs.iter().filter(|p| p.0 > 1e-12 * pairs[0].0.max(1e-300)).collect();
        if nonzero.is_empty() {
            return;
        }
        let u = CMatrix::from_columns(&nonzero.iter().map(|p| p.1.clone()).collect::<Vec<_>>());
        let k = u.ncols();
        assert!((u.adjoint() * &u - CMatrix::identity(k, k)).camax() < 1e-12);
        // A lies in the span of the retained vectors
        assert!((a - &u * (u.adjoint() * a)).camax() < 1e-12);
        // singular values agree with the Gram eigenvalues
        let mut eig: Vec<f64> = (a.adjoint() * a).symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        for (p, e) in pairs.iter().zip(eig) {
            assert!((p.0 * p.0 - e.max(0.0)).abs() < 1e-10 * pairs[0].0.powi(2).max(1.0));
        }
    }

    #[test]
    fn random_and_rank_deficient_matrices() {
        let mut r = ChaCha8Rng::seed_from_u64(11);
        for (n, m) in [(8, 3), (3, 8), (5, 5), (1, 4), (6, 1)] {
            check(&random(&mut r, n, m));
            let low = random(&mut r, n, 1) * random(&mut r, 1, m);
            check(&low);
            check(&CMatrix::zeros(n, m));
        }
        // repeated columns with phases
        let a = random(&mut r, 8, 1);
        let b = CMatrix::from_columns(&[
            a.column(0).into_owned(),
            a.column(0) * Complex64::new(0.0, 2.0),
            a.column(0) * Complex64::new(-1.0, 1.0),
        ]);
        check(&b);
    }
}
