//! Reference computations written directly from the defining sums, using only
//! group and action primitives of the library.

#![allow(dead_code)]

use extrainv_core::subspace::Subspace;
use extrainv_core::zak::CMatrix;
use extrainv_core::{Setting, Vector};
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn pairing(s: &Setting, x: usize, xi: usize) -> Complex64 {
    let g = s.group();
    g.pairing(&g.element(x), &g.element(xi)).unwrap()
}

/// `(Pi_tau f)(y) = J(-tau, y)^{1/2} f(sigma_{-tau} y)`.
pub fn pi(s: &Setting, tau: usize, f: &Vector) -> Vector {
    let g = s.group();
    let a = s.action();
    let back = g.neg(tau);
    Vector::from_fn(f.len(), |y, _| {
        let x = a.act(back, y);
        c((a.weights()[x] / a.weights()[y]).sqrt()) * f[x]
    })
}

pub fn norm(s: &Setting, f: &Vector) -> f64 {
    f.iter().zip(s.weights()).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt()
}

pub fn inner(s: &Setting, f: &Vector, g: &Vector) -> Complex64 {
    f.iter().zip(g.iter()).zip(s.weights()).map(|((a, b), w)| a * b.conj() * *w).sum()
}

/// `sum_{h in H} (Pi_h f)(y) conj((h, d))` for every dual point `d` in `duals`
/// and every `y` in `tiles`.
fn zak_over(s: &Setting, f: &Vector, subgroup: &[usize], duals: &[usize], tiles: &[usize]) -> CMatrix {
    let moved: Vec<Vector> = subgroup.iter().map(|&h| pi(s, h, f)).collect();
    CMatrix::from_fn(duals.len(), tiles.len(), |r, col| {
        subgroup
            .iter()
            .zip(&moved)
            .map(|(&h, m)| m[tiles[col]] * pairing(s, h, duals[r]).conj())
            .sum()
    })
}

pub fn zak_gamma(s: &Setting, f: &Vector) -> CMatrix {
    zak_over(
        s,
        f,
        s.gamma().element_indices(),
        s.omega().representative_indices(),
        s.tiling().c_gamma(),
    )
}

pub fn zak_t(s: &Setting, f: &Vector) -> CMatrix {
    let all: Vec<usize> = (0..s.group().order()).collect();
    zak_over(s, f, &all, &all, s.tiling().c_t())
}

/// Rows `Omega`, column `k |C_T| + c`.
pub fn zak_vector(s: &Setting, f: &Vector) -> CMatrix {
    let zt = zak_t(s, f);
    let g = s.group();
    let ct = s.c_t_len();
    let gstar = s.gamma_star().element_indices();
    let omega = s.omega().representative_indices();
    let norm = 1.0 / (gstar.len() as f64).sqrt();
    CMatrix::from_fn(omega.len(), gstar.len() * ct, |r, col| {
        zt[(g.add(omega[r], gstar[col / ct]), col % ct)] * norm
    })
}

/// `Phi(f)(x)(tau) = J(tau, x)^{1/2} f(sigma_tau x)`, rows `C_T`.
pub fn phi(s: &Setting, f: &Vector) -> CMatrix {
    let a = s.action();
    let ct = s.tiling().c_t();
    CMatrix::from_fn(ct.len(), s.group().order(), |r, tau| {
        let x = ct[r];
        let y = a.act(tau, x);
        f[y] * c((a.weights()[y] / a.weights()[x]).sqrt())
    })
}

/// Weighted L2 norm of an array whose column `i` sits over point `points[i]`,
/// with a uniform weight per row.
pub fn array_norm(s: &Setting, m: &CMatrix, points: impl Fn(usize) -> usize, row_weight: f64) -> f64 {
    let mut acc = 0.0;
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            acc += m[(r, col)].norm_sqr() * s.weights()[points(col)];
        }
    }
    (acc * row_weight).sqrt()
}

/// Fibers of `Z[f]` in `mu^{1/2}` coordinates, one column per point of `Omega`.
pub fn weighted_fibers(s: &Setting, f: &Vector) -> CMatrix {
    let z = zak_vector(s, f);
    let ct = s.tiling().c_t();
    CMatrix::from_fn(z.ncols(), z.nrows(), |i, w| z[(w, i)] * c(s.weights()[ct[i % ct.len()]].sqrt()))
}

/// `||f - P f||` for `P` the projection onto the span of `vectors`, through a
/// Hermitian eigendecomposition of the weighted Gram matrix.
pub fn span_residual(s: &Setting, vectors: &[Vector], f: &Vector) -> f64 {
    if vectors.is_empty() {
        return norm(s, f);
    }
    let k = vectors.len();
    let gram = CMatrix::from_fn(k, k, |i, j| inner(s, &vectors[j], &vectors[i]));
    let rhs = Vector::from_fn(k, |i, _| inner(s, f, &vectors[i]));
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut coef = Vector::zeros(k);
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 1e-13 * top {
            let q = eig.eigenvectors.column(i);
            let proj = q.adjoint() * &rhs;
            coef += q * (proj[0] / lam);
        }
    }
    let mut pf = Vector::zeros(f.len());
    for (a, v) in coef.iter().zip(vectors) {
        pf += v * *a;
    }
    norm(s, &(f - pf))
}

/// Orthogonal projector onto a subspace, from its frame: `F F^* diag(mu)`.
pub fn projector(s: &Setting, v: &Subspace) -> CMatrix {
    let f = v.frame();
    let mut p = f * f.adjoint();
    for (j, w) in s.weights().iter().enumerate() {
        p.column_mut(j).scale_mut(*w);
    }
    p
}

/// Largest `||Pi_h v - P Pi_h v||` over every element `h` of the subgroup and
/// every frame vector `v`.
pub fn invariance_residual(s: &Setting, v: &Subspace, elements: &[usize]) -> f64 {
    let p = projector(s, v);
    let mut worst: f64 = 0.0;
    for &h in elements {
        for col in v.frame().column_iter() {
            let moved = pi(s, h, &col.into_owned());
            worst = worst.max(norm(s, &(&moved - &p * &moved)));
        }
    }
    worst
}

/// Positions `k` of `Gamma*` with `gamma*_k - xi in Delta*`.
pub fn block_members(s: &Setting, xi: usize) -> Vec<usize> {
    let g = s.group();
    s.gamma_star()
        .element_indices()
        .iter()
        .enumerate()
        .filter(|(_, &gs)| s.delta_star().contains_index(g.sub(gs, xi)))
        .map(|(k, _)| k)
        .collect()
}

/// Zeroes every fiber coordinate outside the blocks of `xi`.
pub fn block_project(s: &Setting, xi: usize, fibers: &CMatrix) -> CMatrix {
    let ct = s.c_t_len();
    let members = block_members(s, xi);
    CMatrix::from_fn(fibers.nrows(), fibers.ncols(), |i, w| {
        if members.contains(&(i / ct)) {
            fibers[(i, w)]
        } else {
            c(0.0)
        }
    })
}

/// Eigenvalues of `A A^*`, largest first.
pub fn energies(a: &CMatrix) -> Vec<f64> {
    let mut e: Vec<f64> = (a * a.adjoint())
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0))
        .collect();
    e.sort_by(|x, y| y.total_cmp(x));
    e
}
