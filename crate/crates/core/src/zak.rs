//! Zak transforms over `Gamma` and over `T`, the vector transform `Z` with
//! blocks indexed by `Gamma*`, the block relation `F D V = U`, and the
//! orbit fiberization `Phi`.
//!
//! Haar conventions: counting measure on the groups, weight `1 / |Gamma|` on
//! `Omega` (for `Z_Gamma` and `Z`) and `1 / |T|` on `T^` (for `Z_T`). With
//! these, every transform is an isometry onto its weighted `L^2` space.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Setting;
use crate::Vector;

pub type CMatrix = DMatrix<Complex64>;

/// `Z_Gamma[f]`: rows indexed by `Omega` (section order), columns by `C_Gamma`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZakGamma {
    pub values: CMatrix,
}

/// `Z_T[f]`: rows indexed by every dual point of `T` (index order), columns by `C_T`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZakT {
    pub values: CMatrix,
}

/// `Z[f]`: rows indexed by `Omega`, column `k * |C_T| + c` holds
/// `(s + 1)^{-1/2} Z_T[f](omega + gamma*_k)(C_T[c])`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorZak {
    pub values: CMatrix,
}

// sum_{h in H} J(-h, y)^{1/2} f(sigma_{-h} y) (-h, d) at every (d, y)
fn forward(s: &Setting, f: &Vector, subgroup: &[usize], duals: &[usize], tiles: &[usize]) -> CMatrix {
    let action = s.action();
    let group = s.group();
    CMatrix::from_fn(duals.len(), tiles.len(), |r, c| {
        let y = tiles[c];
        subgroup
            .iter()
            .map(|&h| {
                let back = group.neg(h);
                f[action.act(back, y)] * action.jacobian_idx(back, y).sqrt() * group.pairing_idx(back, duals[r])
            })
            .sum()
    })
}

fn inverse(s: &Setting, values: &CMatrix, subgroup: &[usize], duals: &[usize], tiles: &[usize]) -> Vector {
    let action = s.action();
    let group = s.group();
    let scale = 1.0 / subgroup.len() as f64;
    let mut f = Vector::zeros(s.points());
    for (c, &y) in tiles.iter().enumerate() {
        for &h in subgroup {
            let pi_h_f: Complex64 = duals
                .iter()
                .enumerate()
                .map(|(r, &d)| values[(r, c)] * group.pairing_idx(h, d))
                .sum::<Complex64>()
                * scale;
            let back = group.neg(h);
            f[action.act(back, y)] = pi_h_f / action.jacobian_idx(back, y).sqrt();
        }
    }
    f
}

fn check_vector(s: &Setting, f: &Vector) -> Result<()> {
    Error::check_len(s.points(), f.len())
}

fn check_shape(m: &CMatrix, rows: usize, cols: usize) -> Result<()> {
    Error::check_len(rows, m.nrows())?;
    Error::check_len(cols, m.ncols())
}

fn weighted_norm(values: &CMatrix, weights: impl Fn(usize) -> f64, dual_weight: f64) -> f64 {
    let mut acc = 0.0;
    for r in 0..values.nrows() {
        for c in 0..values.ncols() {
            acc += values[(r, c)].norm_sqr() * weights(c);
        }
    }
    (acc * dual_weight).sqrt()
}

pub fn zak_gamma(s: &Setting, f: &Vector) -> Result<ZakGamma> {
    check_vector(s, f)?;
    Ok(ZakGamma {
        values: forward(
            s,
            f,
            s.gamma().element_indices(),
            s.omega().representative_indices(),
            s.tiling().c_gamma(),
        ),
    })
}

pub fn zak_gamma_inv(s: &Setting, z: &ZakGamma) -> Result<Vector> {
    check_shape(&z.values, s.omega_len(), s.tiling().c_gamma().len())?;
    Ok(inverse(
        s,
        &z.values,
        s.gamma().element_indices(),
        s.omega().representative_indices(),
        s.tiling().c_gamma(),
    ))
}

/// Evaluates the defining sum of `Z_Gamma[f]` at an arbitrary dual point.
pub fn zak_gamma_at(s: &Setting, f: &Vector, tau_hat: usize) -> Result<Vector> {
    check_vector(s, f)?;
    let row = forward(s, f, s.gamma().element_indices(), &[tau_hat], s.tiling().c_gamma());
    Ok(row.row(0).transpose())
}

impl ZakGamma {
    /// The `Gamma*`-periodic extension to all of `T^`.
    pub fn periodic(&self, s: &Setting, tau_hat: usize) -> Vector {
        let pos = s
            .omega()
            .coset_position(tau_hat)
            .expect("Omega is a section of the whole dual group");
        self.values.row(pos).transpose()
    }

    pub fn norm(&self, s: &Setting) -> f64 {
        let w = s.weights();
        let c = s.tiling().c_gamma();
        weighted_norm(&self.values, |i| w[c[i]], 1.0 / s.omega_len() as f64)
    }
}

pub fn zak_t(s: &Setting, f: &Vector) -> Result<ZakT> {
    check_vector(s, f)?;
    let duals: Vec<usize> = (0..s.group().order()).collect();
    Ok(ZakT {
        values: forward(s, f, s.t_full().element_indices(), &duals, s.tiling().c_t()),
    })
}

pub fn zak_t_inv(s: &Setting, z: &ZakT) -> Result<Vector> {
    check_shape(&z.values, s.group().order(), s.c_t_len())?;
    let duals: Vec<usize> = (0..s.group().order()).collect();
    Ok(inverse(s, &z.values, s.t_full().element_indices(), &duals, s.tiling().c_t()))
}

impl ZakT {
    pub fn norm(&self, s: &Setting) -> f64 {
        let w = s.weights();
        let c = s.tiling().c_t();
        weighted_norm(&self.values, |i| w[c[i]], 1.0 / s.group().order() as f64)
    }
}

pub fn zak_vector(s: &Setting, f: &Vector) -> Result<VectorZak> {
    Ok(vector_from_t(s, &zak_t(s, f)?))
}

pub(crate) fn vector_from_t(s: &Setting, zt: &ZakT) -> VectorZak {
    let group = s.group();
    let ct = s.c_t_len();
    let norm = 1.0 / (s.blocks() as f64).sqrt();
    let omega = s.omega().representative_indices();
    let gstar = s.gamma_star().element_indices();
    VectorZak {
        values: CMatrix::from_fn(omega.len(), gstar.len() * ct, |r, col| {
            let (k, c) = (col / ct, col % ct);
            zt.values[(group.add(omega[r], gstar[k]), c)] * norm
        }),
    }
}

pub(crate) fn t_from_vector(s: &Setting, z: &VectorZak) -> ZakT {
    let group = s.group();
    let ct = s.c_t_len();
    let scale = (s.blocks() as f64).sqrt();
    let omega = s.omega().representative_indices();
    let gstar = s.gamma_star().element_indices();
    let mut values = CMatrix::zeros(group.order(), ct);
    for (r, &w) in omega.iter().enumerate() {
        for (k, &g) in gstar.iter().enumerate() {
            for c in 0..ct {
                values[(group.add(w, g), c)] = z.values[(r, k * ct + c)] * scale;
            }
        }
    }
    ZakT { values }
}

pub fn zak_vector_inv(s: &Setting, z: &VectorZak) -> Result<Vector> {
    check_shape(&z.values, s.omega_len(), s.fiber_dim())?;
    zak_t_inv(s, &t_from_vector(s, z))
}

impl VectorZak {
    pub fn norm(&self, s: &Setting) -> f64 {
        let w = s.weights();
        let c = s.tiling().c_t();
        let ct = c.len();
        weighted_norm(&self.values, |i| w[c[i % ct]], 1.0 / s.omega_len() as f64)
    }
}

/// Fibers of `Z[f]` in `mu^{1/2}`-weighted coordinates: column `omega` is a
/// vector of length `(s + 1) |C_T|` and `||f||^2 = sum_omega |column|^2 / |Omega|`.
pub fn weighted_fibers(s: &Setting, f: &Vector) -> Result<CMatrix> {
    let z = zak_vector(s, f)?;
    let root = fiber_weight_roots(s);
    Ok(CMatrix::from_fn(s.fiber_dim(), s.omega_len(), |i, w| z.values[(w, i)] * root[i]))
}

/// Inverse of [`weighted_fibers`].
pub fn from_weighted_fibers(s: &Setting, fibers: &CMatrix) -> Result<Vector> {
    check_shape(fibers, s.fiber_dim(), s.omega_len())?;
    let root = fiber_weight_roots(s);
    let values = CMatrix::from_fn(s.omega_len(), s.fiber_dim(), |w, i| fibers[(i, w)] / root[i]);
    zak_vector_inv(s, &VectorZak { values })
}

fn fiber_weight_roots(s: &Setting) -> Vec<f64> {
    let w = s.weights();
    let c = s.tiling().c_t();
    (0..s.fiber_dim()).map(|i| w[c[i % c.len()]].sqrt()).collect()
}

/// `F[k][j] = (-a_j, gamma*_k)`, the DFT matrix of `T / Gamma`.
pub fn dft_matrix(s: &Setting) -> CMatrix {
    let group = s.group();
    let a = s.coset_section().representative_indices();
    let gstar = s.gamma_star().element_indices();
    CMatrix::from_fn(gstar.len(), a.len(), |k, j| group.pairing_idx(group.neg(a[j]), gstar[k]))
}

/// Largest entry of `|F D(omega, x) V(omega, x) - U(omega, x)|` over all
/// `omega in Omega`, `x in C_T`, where `V` collects `Z_Gamma[f](omega)` at the
/// points `sigma_{-a_j}(x)` and `U` the unnormalized `Z_T[f](omega + gamma*_k)(x)`.
pub fn zak_relation_check(s: &Setting, f: &Vector) -> Result<f64> {
    let zg = zak_gamma(s, f)?;
    let zt = zak_t(s, f)?;
    let group = s.group();
    let action = s.action();
    let a = s.coset_section().representative_indices();
    let gstar = s.gamma_star().element_indices();
    let omega = s.omega().representative_indices();
    let ct = s.c_t_len();
    let dft = dft_matrix(s);

    let mut worst: f64 = 0.0;
    for (r, &w) in omega.iter().enumerate() {
        for (c, &x) in s.tiling().c_t().iter().enumerate() {
            let dv = Vector::from_iterator(
                a.len(),
                a.iter().enumerate().map(|(j, &aj)| {
                    let back = group.neg(aj);
                    // C_Gamma index j * |C_T| + c is sigma_{-a_j}(x)
                    let v = zg.values[(r, j * ct + c)];
                    v * action.jacobian_idx(back, x).sqrt() * group.pairing_idx(back, w)
                }),
            );
            let fdv = &dft * dv;
            for (k, &g) in gstar.iter().enumerate() {
                worst = worst.max((fdv[k] - zt.values[(group.add(w, g), c)]).norm());
            }
        }
    }
    Ok(worst)
}

/// `Phi(f)(x)(tau) = J(tau, x)^{1/2} f(sigma_tau(x))`: rows indexed by `C_T`,
/// columns by `T`.
pub fn phi_map(s: &Setting, f: &Vector) -> Result<CMatrix> {
    check_vector(s, f)?;
    let action = s.action();
    let ct = s.tiling().c_t();
    Ok(CMatrix::from_fn(ct.len(), s.group().order(), |c, tau| {
        let x = ct[c];
        f[action.act(tau, x)] * action.jacobian_idx(tau, x).sqrt()
    }))
}

pub fn phi_inv(s: &Setting, phi: &CMatrix) -> Result<Vector> {
    check_shape(phi, s.c_t_len(), s.group().order())?;
    let action = s.action();
    let mut f = Vector::zeros(s.points());
    for (c, &x) in s.tiling().c_t().iter().enumerate() {
        for tau in 0..s.group().order() {
            f[action.act(tau, x)] = phi[(c, tau)] / action.jacobian_idx(tau, x).sqrt();
        }
    }
    Ok(f)
}

/// Norm of `Phi(f)` in `L^2(C_T, l^2(T))`.
pub fn phi_norm(s: &Setting, phi: &CMatrix) -> f64 {
    let w = s.weights();
    let ct = s.tiling().c_t();
    weighted_norm(&phi.transpose(), |c| w[ct[c]], 1.0)
}

/// `(t_gamma a)(tau) = a(tau - gamma)` on `l^2(T)`.
pub fn translate(s: &Setting, a: &Vector, gamma: usize) -> Vector {
    let group = s.group();
    Vector::from_fn(a.len(), |tau, _| a[group.sub(tau, gamma)])
}

/// `a^(tau_hat) = sum_tau a(tau) (-tau, tau_hat)` on `l^2(T)`.
pub fn dft(s: &Setting, a: &Vector) -> Vector {
    let group = s.group();
    Vector::from_fn(a.len(), |th, _| {
        (0..a.len())
            .map(|tau| a[tau] * group.pairing_idx(group.neg(tau), th))
            .sum()
    })
}

pub fn idft(s: &Setting, a_hat: &Vector) -> Vector {
    let group = s.group();
    let scale = 1.0 / a_hat.len() as f64;
    Vector::from_fn(a_hat.len(), |tau, _| {
        (0..a_hat.len())
            .map(|th| a_hat[th] * group.pairing_idx(tau, th))
            .sum::<Complex64>()
            * scale
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{self, random_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn unit(n: usize, at: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[at] = c(1.0);
        v
    }

    #[test]
    fn z2_direct_sums() {
        let s = scenarios::regular_cyclic(2, &[1], &[1], 1, None);
        // Gamma = T = Z_2, so Omega = {0, 1} and C_Gamma = {0}
        let z = zak_gamma(&s, &unit(2, 1)).unwrap();
        assert_eq!(z.values[(0, 0)], c(1.0));
        assert_eq!(z.values[(1, 0)], c(-1.0));
        let z = zak_gamma(&s, &unit(2, 0)).unwrap();
        assert_eq!(z.values[(0, 0)], c(1.0));
        assert_eq!(z.values[(1, 0)], c(1.0));
        let zt = zak_t(&s, &unit(2, 1)).unwrap();
        assert_eq!(zt.values[(0, 0)], c(1.0));
        assert_eq!(zt.values[(1, 0)], c(-1.0));
    }

    #[test]
    fn constant_zak_t_is_unit_atom() {
        let s = scenarios::z8_weighted();
        let ones = ZakT {
            values: CMatrix::from_element(s.group().order(), s.c_t_len(), c(1.0)),
        };
        let f = zak_t_inv(&s, &ones).unwrap();
        let mut expected = Vector::zeros(s.points());
        for &x in s.tiling().c_t() {
            expected[x] = c(1.0);
        }
        assert!((f - expected).norm() < 1e-12);
    }

    #[test]
    fn round_trips_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in scenarios::all() {
            for _ in 0..5 {
                let f = random_vector(&mut rng, s.points());
                let n = s.action().norm(&f);
                let zg = zak_gamma(&s, &f).unwrap();
                let zt = zak_t(&s, &f).unwrap();
                let zv = zak_vector(&s, &f).unwrap();
                assert!((zg.norm(&s) - n).abs() < 1e-12 * n);
                assert!((zt.norm(&s) - n).abs() < 1e-12 * n);
                assert!((zv.norm(&s) - n).abs() < 1e-12 * n);
                assert!((zak_gamma_inv(&s, &zg).unwrap() - &f).norm() < 1e-12 * n);
                assert!((zak_t_inv(&s, &zt).unwrap() - &f).norm() < 1e-12 * n);
                assert!((zak_vector_inv(&s, &zv).unwrap() - &f).norm() < 1e-12 * n);
                let fib = weighted_fibers(&s, &f).unwrap();
                assert!((fib.norm_squared() / s.omega_len() as f64 - n * n).abs() < 1e-12 * n * n);
                assert!((from_weighted_fibers(&s, &fib).unwrap() - &f).norm() < 1e-12 * n);
            }
        }
    }

    #[test]
    fn intertwining_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for s in scenarios::all() {
            let f = random_vector(&mut rng, s.points());
            let group = s.group();
            let zg = zak_gamma(&s, &f).unwrap();
            let zt = zak_t(&s, &f).unwrap();
            let zv = zak_vector(&s, &f).unwrap();
            for &g in s.gamma().generator_indices() {
                let moved = s.action().pi_apply_idx(g, &f);
                let zg2 = zak_gamma(&s, &moved).unwrap();
                let zv2 = zak_vector(&s, &moved).unwrap();
                for (r, &w) in s.omega().representative_indices().iter().enumerate() {
                    let e = group.pairing_idx(g, w);
                    assert!((zg2.values.row(r) - zg.values.row(r) * e).norm() < 1e-12);
                    assert!((zv2.values.row(r) - zv.values.row(r) * e).norm() < 1e-12);
                }
            }
            for tau in 0..group.order() {
                let zt2 = zak_t(&s, &s.action().pi_apply_idx(tau, &f)).unwrap();
                for th in 0..group.order() {
                    let e = group.pairing_idx(tau, th);
                    assert!((zt2.values.row(th) - zt.values.row(th) * e).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gamma_star_periodicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for s in scenarios::all() {
            let f = random_vector(&mut rng, s.points());
            let zg = zak_gamma(&s, &f).unwrap();
            for th in 0..s.group().order() {
                let direct = zak_gamma_at(&s, &f, th).unwrap();
                assert!((zg.periodic(&s, th) - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_chain_vector_zak_is_zak_t() {
        let s = scenarios::regular_cyclic(6, &[1], &[1], 2, None);
        assert_eq!(s.blocks(), 1);
        let f = random_vector(&mut ChaCha8Rng::seed_from_u64(3), s.points());
        let zv = zak_vector(&s, &f).unwrap();
        let zt = zak_t(&s, &f).unwrap();
        assert_eq!(zv.values, zt.values);
        let dft = dft_matrix(&s);
        assert_eq!(dft, CMatrix::from_element(1, 1, c(1.0)));
        assert!(zak_relation_check(&s, &f).unwrap() < 1e-12);
    }

    #[test]
    fn relation_holds_for_shifted_inputs() {
        let s = scenarios::z12_chain();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let g = random_vector(&mut rng, s.points());
        let a1 = s.coset_section().representative_indices()[1];
        let f = s.action().pi_apply_idx(a1, &g);
        assert!(zak_relation_check(&s, &g).unwrap() < 1e-10);
        assert!(zak_relation_check(&s, &f).unwrap() < 1e-10);
    }

    #[test]
    fn normalized_dft_is_unitary() {
        for s in scenarios::all() {
            let f = dft_matrix(&s) / c((s.blocks() as f64).sqrt());
            let gram = f.adjoint() * &f;
            assert!((gram - CMatrix::identity(s.blocks(), s.blocks())).camax() < 1e-12);
        }
    }

    #[test]
    fn phi_examples() {
        let s = scenarios::regular_cyclic(6, &[2], &[1], 1, None);
        for tau in 0..6 {
            let phi = phi_map(&s, &unit(6, s.action().act(tau, 0))).unwrap();
            assert_eq!(phi.row(0).transpose(), unit(6, tau));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for s in scenarios::all() {
            let f = random_vector(&mut rng, s.points());
            let phi = phi_map(&s, &f).unwrap();
            let n = s.action().norm(&f);
            assert!((phi_norm(&s, &phi) - n).abs() < 1e-12 * n);
            assert!((phi_inv(&s, &phi).unwrap() - &f).norm() < 1e-12 * n);
            for &g in s.gamma().element_indices() {
                let moved = phi_map(&s, &s.action().pi_apply_idx(g, &f)).unwrap();
                for r in 0..s.c_t_len() {
                    let shifted = translate(&s, &phi.row(r).transpose(), g);
                    assert!((moved.row(r).transpose() - shifted).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn phi_dft_matches_reflected_zak_t() {
        let s = scenarios::product_group();
        let f = random_vector(&mut ChaCha8Rng::seed_from_u64(16), s.points());
        let phi = phi_map(&s, &f).unwrap();
        let zt = zak_t(&s, &f).unwrap();
        for r in 0..s.c_t_len() {
            let hat = dft(&s, &phi.row(r).transpose());
            for th in 0..s.group().order() {
                assert!((hat[th] - zt.values[(s.group().neg(th), r)]).norm() < 1e-12);
            }
            assert!((idft(&s, &hat) - phi.row(r).transpose()).norm() < 1e-12);
        }
    }

    #[test]
    fn shape_errors() {
        let s = scenarios::z12_chain();
        assert!(matches!(zak_gamma(&s, &Vector::zeros(3)), Err(Error::Dimension { .. })));
        let bad = ZakGamma {
            values: CMatrix::zeros(1, 1),
        };
        assert!(zak_gamma_inv(&s, &bad).is_err());
    }
}
