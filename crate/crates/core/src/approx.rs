//! Least-squares approximation of finite data by invariant spaces of bounded
//! length, by fiberwise truncated SVD.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extra::HxiBlocks;
use crate::group::GroupElement;
use crate::linalg::left_singular_pairs;
use crate::subspace::Subspace;
use crate::zak::{from_weighted_fibers, weighted_fibers, CMatrix};
use crate::{Setting, Vector};

/// Singular values below this fraction of the largest one count as zero.
const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberSpectrum {
    pub omega: GroupElement,
    pub retained: Vec<f64>,
    pub discarded: Vec<f64>,
    /// Block (position in `N`) of each retained value; only for the extra-invariant problem.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retained_blocks: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct ApproxResult {
    pub space: Subspace,
    /// Generators of `space` as a `Gamma`-invariant space, at most `ell` of them.
    pub generators: Vec<Vector>,
    /// `sum_j ||psi_j - P psi_j||^2`.
    pub error: f64,
    pub spectra: Vec<FiberSpectrum>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxSummary {
    pub dim: usize,
    pub length: usize,
    pub error: f64,
    pub spectra: Vec<FiberSpectrum>,
}

impl ApproxResult {
    pub fn summary(&self) -> ApproxSummary {
        ApproxSummary {
            dim: self.space.dim(),
            length: self.generators.len(),
            error: self.error,
            spectra: self.spectra.clone(),
        }
    }
}

struct Triple {
    sigma: f64,
    vector: Vector,
    block: usize,
}

fn check_inputs(s: &Setting, psi: &[Vector], ell: usize) -> Result<()> {
    if ell < 1 {
        return Err(Error::InvalidLength);
    }
    if psi.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    for p in psi {
        Error::check_len(s.points(), p.len())?;
    }
    Ok(())
}

/// `A(omega)`: one matrix per fiber, column `j` the weighted fiber of `psi_j`.
fn data_fibers(s: &Setting, psi: &[Vector]) -> Result<Vec<CMatrix>> {
    let fibers = psi.iter().map(|p| weighted_fibers(s, p)).collect::<Result<Vec<_>>>()?;
    Ok((0..s.omega_len())
        .map(|w| CMatrix::from_fn(s.fiber_dim(), psi.len(), |i, j| fibers[j][(i, w)]))
        .collect())
}

/// Singular triples of `a`, largest first, with the phase of every left
/// singular vector fixed so that its first nonzero entry is real positive.
fn singular_triples(a: &CMatrix, block: usize) -> Vec<Triple> {
    left_singular_pairs(a)
        .into_iter()
        .map(|(sigma, u)| Triple {
            sigma,
            vector: normalize_phase(u),
            block,
        })
        .collect()
}

fn normalize_phase(v: Vector) -> Vector {
    let cut = v.camax() * 1e-8;
    match v.iter().find(|z| z.norm() > cut) {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v * phase
        }
        None => v,
    }
}

fn assemble(
    s: &Setting,
    retained: Vec<Vec<Triple>>,
    discarded: Vec<Vec<f64>>,
    with_blocks: bool,
) -> Result<ApproxResult> {
    let scale = (s.omega_len() as f64).sqrt();
    let w_omega = 1.0 / s.omega_len() as f64;
    let error = discarded
        .iter()
        .map(|d| d.iter().map(|x| x * x).sum::<f64>() * w_omega)
        .sum();

    let mut frame = Vec::new();
    for (w, keep) in retained.iter().enumerate() {
        for t in keep {
            let mut fibers = CMatrix::zeros(s.fiber_dim(), s.omega_len());
            fibers.set_column(w, &(&t.vector * Complex64::new(scale, 0.0)));
            frame.push(from_weighted_fibers(s, &fibers)?);
        }
    }
    let space = Subspace::from_vectors(s.weights(), &frame)?;

    let len = retained.iter().map(|k| k.len()).max().unwrap_or(0);
    let generators = (0..len)
        .map(|i| {
            let fibers = CMatrix::from_fn(s.fiber_dim(), s.omega_len(), |r, w| match retained[w].get(i) {
                Some(t) => t.vector[r],
                None => Complex64::new(0.0, 0.0),
            });
            from_weighted_fibers(s, &fibers)
        })
        .collect::<Result<Vec<_>>>()?;

    let omegas = s.omega().representatives();
    let spectra = retained
        .iter()
        .zip(discarded)
        .zip(omegas)
        .map(|((keep, discarded), omega)| FiberSpectrum {
            omega,
            retained: keep.iter().map(|t| t.sigma).collect(),
            discarded,
            retained_blocks: with_blocks.then(|| keep.iter().map(|t| t.block).collect()),
        })
        .collect();
    Ok(ApproxResult {
        space,
        generators,
        error,
        spectra,
    })
}

fn global_cutoff(triples: &[Vec<Triple>]) -> f64 {
    triples.iter().flatten().map(|t| t.sigma).fold(0.0, f64::max) * RANK_TOL
}

fn split(mut triples: Vec<Triple>, ell: usize, cutoff: f64) -> (Vec<Triple>, Vec<f64>) {
    let rest = if triples.len() > ell { triples.split_off(ell) } else { Vec::new() };
    let mut discarded: Vec<f64> = rest.iter().map(|t| t.sigma).collect();
    let (keep, dropped): (Vec<Triple>, Vec<Triple>) = triples.into_iter().partition(|t| t.sigma > cutoff);
    discarded.extend(dropped.iter().map(|t| t.sigma));
    discarded.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    (keep, discarded)
}

/// Problem (1): the `Gamma`-invariant space of length at most `ell` closest to
/// the data in the summed squared error.
pub fn best_invariant(s: &Setting, psi: &[Vector], ell: usize) -> Result<ApproxResult> {
    check_inputs(s, psi, ell)?;
    let triples: Vec<Vec<Triple>> = data_fibers(s, psi)?.iter().map(|a| singular_triples(a, 0)).collect();
    let cutoff = global_cutoff(&triples);
    let (retained, discarded) = triples.into_iter().map(|t| split(t, ell, cutoff)).unzip();
    assemble(s, retained, discarded, false)
}

/// Problem (2): the same with the extra constraint of `Delta`-invariance.
/// Every fiber is split along the blocks `H_xi`, and the `ell` largest
/// singular values pooled over all blocks are kept (ties go to the lower block).
pub fn best_extra_invariant(s: &Setting, psi: &[Vector], ell: usize) -> Result<ApproxResult> {
    check_inputs(s, psi, ell)?;
    let blocks = HxiBlocks::new(s);
    let triples: Vec<Vec<Triple>> = data_fibers(s, psi)?
        .iter()
        .map(|a| {
            let mut pooled: Vec<Triple> = (0..blocks.blocks.len())
                .flat_map(|xi| singular_triples(&blocks.project(s, xi, a), xi))
                .collect();
            pooled.sort_by(|a, b| {
                b.sigma
                    .partial_cmp(&a.sigma)
                    .unwrap_or(Ordering::Equal)
                    .then(a.block.cmp(&b.block))
            });
            pooled
        })
        .collect();
    let cutoff = global_cutoff(&triples);
    let (retained, discarded) = triples.into_iter().map(|t| split(t, ell, cutoff)).unzip();
    assemble(s, retained, discarded, true)
}

/// `sum_j ||psi_j - P_W psi_j||^2`.
pub fn evaluate_candidate(psi: &[Vector], w: &Subspace) -> Result<f64> {
    psi.iter()
        .map(|p| {
            Error::check_len(w.ambient_dim(), p.len())?;
            Ok(w.residual(p).powi(2))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extra::{canonical_generator, check_extra_invariance, decomposable_mi_check};
    use crate::scenarios::{self, random_vector};
    use crate::setting::ChainMember;
    use crate::subspace::{length, span_invariant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_data(r: &mut ChaCha8Rng, s: &Setting, m: usize) -> Vec<Vector> {
        (0..m).map(|_| random_vector(r, s.points())).collect()
    }

    #[test]
    fn single_vector_is_reproduced() {
        let mut r = rng(1);
        for s in scenarios::all() {
            let psi = random_data(&mut r, &s, 1);
            let res = best_invariant(&s, &psi, 1).unwrap();
            assert!(res.error.abs() < 1e-20);
            let v = span_invariant(&s, &psi, ChainMember::Gamma).unwrap();
            assert!(res.space.projector_distance(&v) < 1e-9);
            assert_eq!(res.generators.len(), 1);
        }
    }

    #[test]
    fn error_is_discarded_energy() {
        let s = scenarios::z12_chain();
        let mut r = rng(2);
        let psi = random_data(&mut r, &s, 3);
        let res = best_invariant(&s, &psi, 1).unwrap();
        let direct = evaluate_candidate(&psi, &res.space).unwrap();
        assert!((res.error - direct).abs() <= 1e-9 * direct.max(1.0));
        for sp in &res.spectra {
            assert_eq!(sp.retained.len(), 1);
            assert_eq!(sp.discarded.len(), 2);
        }
        assert_eq!(length(&s, &res.space).unwrap(), 1);
    }

    #[test]
    fn data_inside_a_length_one_space() {
        let mut r = rng(3);
        for s in scenarios::all() {
            let phi = random_vector(&mut r, s.points());
            let w = span_invariant(&s, &[phi.clone()], ChainMember::Gamma).unwrap();
            let psi: Vec<Vector> = (0..3)
                .map(|_| {
                    let mut f = Vector::zeros(s.points());
                    for &g in s.gamma().element_indices() {
                        f += s.action().pi_apply_idx(g, &phi) * Complex64::new(r.gen_range(-1.0..1.0), 0.0);
                    }
                    f
                })
                .collect();
            let res = best_invariant(&s, &psi, 1).unwrap();
            assert!(res.error < 1e-18);
            assert!(res.space.inclusion_residual(&w) < 1e-9);
        }
    }

    #[test]
    fn monotone_in_ell_and_constrained_is_worse() {
        let mut r = rng(4);
        for s in scenarios::all() {
            let psi = random_data(&mut r, &s, 3);
            let mut last = f64::INFINITY;
            for ell in 1..=4 {
                let a = best_invariant(&s, &psi, ell).unwrap();
                let b = best_extra_invariant(&s, &psi, ell).unwrap();
                assert!(a.error <= last + 1e-12);
                assert!(b.error >= a.error - 1e-9);
                last = a.error;
            }
            assert!(best_invariant(&s, &psi, 3).unwrap().error < 1e-18);
        }
    }

    #[test]
    fn extra_invariant_output_is_extra_invariant() {
        let mut r = rng(5);
        for s in scenarios::all() {
            let psi = random_data(&mut r, &s, 2);
            let res = best_extra_invariant(&s, &psi, 1).unwrap();
            let direct = evaluate_candidate(&psi, &res.space).unwrap();
            assert!((res.error - direct).abs() <= 1e-9 * direct.max(1.0));
            assert!(check_extra_invariance(&s, &res.space).unwrap().delta_invariant);
            assert!(decomposable_mi_check(&s, &res.space).unwrap().decomposable);
        }
    }

    #[test]
    fn canonical_data_costs_nothing_under_the_constraint() {
        for s in scenarios::all() {
            let psi = vec![canonical_generator(&s).unwrap()];
            let res = best_extra_invariant(&s, &psi, 1).unwrap();
            assert!(res.error < 1e-18);
        }
    }

    #[test]
    fn input_errors() {
        let s = scenarios::shear();
        assert_eq!(best_invariant(&s, &[], 1).unwrap_err(), Error::EmptyGenerators);
        let psi = vec![Vector::zeros(s.points())];
        assert_eq!(best_invariant(&s, &psi, 0).unwrap_err(), Error::InvalidLength);
        assert_eq!(best_extra_invariant(&s, &psi, 0).unwrap_err(), Error::InvalidLength);
        let res = best_invariant(&s, &psi, 1).unwrap();
        assert_eq!(res.space.dim(), 0);
        assert_eq!(res.error, 0.0);
    }

    #[test]
    fn evaluate_candidate_examples() {
        let s = scenarios::z8_weighted();
        let psi = random_data(&mut rng(6), &s, 2);
        let total: f64 = psi.iter().map(|p| s.action().norm(p).powi(2)).sum();
        let zero = Subspace::zero(s.weights());
        assert!((evaluate_candidate(&psi, &zero).unwrap() - total).abs() < 1e-12);
        let full = Subspace::full(s.weights());
        assert!(evaluate_candidate(&psi, &full).unwrap() < 1e-20);
    }
}
