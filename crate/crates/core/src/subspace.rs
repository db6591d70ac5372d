//! Closed subspaces of `L^2(X, mu)` stored as `mu`-orthonormal frames, and the
//! invariant-space operations built on them.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::setting::ChainMember;
use crate::zak::{from_weighted_fibers, weighted_fibers, zak_gamma, CMatrix};
use crate::{Setting, Vector};

/// Relative pivot tolerance of the orthonormalization.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Subspace {
    frame: CMatrix,
    weights: Vec<f64>,
}

pub fn weighted_norm(weights: &[f64], f: &Vector) -> f64 {
    f.iter()
        .zip(weights)
        .map(|(a, w)| a.norm_sqr() * w)
        .sum::<f64>()
        .sqrt()
}

/// Orthonormal basis (Euclidean) of the column span of `vectors`, built by
/// Gram-Schmidt with largest-residual pivoting and one re-orthogonalization
/// pass. Columns whose residual falls to `abs_tol` or below are dropped.
pub(crate) fn orthonormal_basis(vectors: &CMatrix, abs_tol: f64) -> CMatrix {
    let n = vectors.nrows();
    let mut work: Vec<Vector> = vectors.column_iter().map(|c| c.into_owned()).collect();
    let mut basis: Vec<Vector> = Vec::new();
    let mut active: Vec<bool> = vec![true; work.len()];
    loop {
        let pick = (0..work.len())
            .filter(|&i| active[i])
            .map(|i| (i, work[i].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((i, norm)) = pick else { break };
        if norm <= abs_tol || basis.len() == n {
            break;
        }
        active[i] = false;
        let mut q = &work[i] / Complex64::new(norm, 0.0);
        for b in &basis {
            let proj = b.dotc(&q);
            q -= b * proj;
        }
        let renorm = q.norm();
        if renorm <= abs_tol {
            continue;
        }
        q /= Complex64::new(renorm, 0.0);
        for j in 0..work.len() {
            if active[j] {
                let proj = q.dotc(&work[j]);
                work[j] -= &q * proj;
            }
        }
        basis.push(q);
    }
    if basis.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&basis)
    }
}

impl Subspace {
    pub fn zero(weights: &[f64]) -> Self {
        Self {
            frame: CMatrix::zeros(weights.len(), 0),
            weights: weights.to_vec(),
        }
    }

    pub fn full(weights: &[f64]) -> Self {
        let n = weights.len();
        Self {
            frame: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(1.0 / weights[i].sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            weights: weights.to_vec(),
        }
    }

    /// Span of `vectors`, orthonormalized under the `mu`-weighted inner product.
    /// The rank cut-off is relative to the largest input norm.
    pub fn from_vectors(weights: &[f64], vectors: &[Vector]) -> Result<Self> {
        Self::from_vectors_scaled(weights, vectors, None)
    }

    /// As [`Subspace::from_vectors`], with the rank cut-off taken relative to
    /// `scale` instead. Used when the inputs are images of unit vectors under a
    /// contraction and may all be numerically zero.
    pub fn from_vectors_relative_to(weights: &[f64], vectors: &[Vector], scale: f64) -> Result<Self> {
        Self::from_vectors_scaled(weights, vectors, Some(scale))
    }

    fn from_vectors_scaled(weights: &[f64], vectors: &[Vector], scale: Option<f64>) -> Result<Self> {
        for v in vectors {
            Error::check_len(weights.len(), v.len())?;
        }
        if vectors.is_empty() {
            return Ok(Self::zero(weights));
        }
        let roots: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let scaled = CMatrix::from_fn(weights.len(), vectors.len(), |i, j| vectors[j][i] * roots[i]);
        let scale = scale.unwrap_or_else(|| scaled.column_iter().map(|c| c.norm()).fold(0.0, f64::max));
        let q = orthonormal_basis(&scaled, PIVOT_TOL * scale);
        let frame = CMatrix::from_fn(q.nrows(), q.ncols(), |i, j| q[(i, j)] / roots[i]);
        Ok(Self {
            frame,
            weights: weights.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    pub fn columns(&self) -> Vec<Vector> {
        self.frame.column_iter().map(|c| c.into_owned()).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Coefficients `<f, v_k>` against the frame.
    fn coefficients(&self, f: &Vector) -> Vector {
        let wf = Vector::from_fn(f.len(), |i, _| f[i] * self.weights[i]);
        self.frame.adjoint() * wf
    }

    pub fn project(&self, f: &Vector) -> Vector {
        &self.frame * self.coefficients(f)
    }

    /// `||f - P f||`.
    pub fn residual(&self, f: &Vector) -> f64 {
        weighted_norm(&self.weights, &(f - self.project(f)))
    }

    /// Matrix of the orthogonal projection, `F F^* diag(mu)`.
    pub fn projector(&self) -> CMatrix {
        let mut p = &self.frame * self.frame.adjoint();
        for (j, w) in self.weights.iter().enumerate() {
            p.column_mut(j).scale_mut(*w);
        }
        p
    }

    /// Largest `||v - P_other v||` over the frame of `self`; zero iff `self <= other`.
    pub fn inclusion_residual(&self, other: &Subspace) -> f64 {
        self.frame
            .column_iter()
            .map(|c| other.residual(&c.into_owned()))
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|P_self - P_other|`.
    pub fn projector_distance(&self, other: &Subspace) -> f64 {
        (self.projector() - other.projector()).camax()
    }

    /// Largest entry of `|Gram - I|`.
    pub fn gram_deviation(&self) -> f64 {
        let roots: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let scaled = CMatrix::from_fn(self.frame.nrows(), self.frame.ncols(), |i, j| self.frame[(i, j)] * roots[i]);
        (scaled.adjoint() * &scaled - CMatrix::identity(self.dim(), self.dim())).camax()
    }
}

/// `S_H(A) = span{ Pi_h phi : h in H, phi in A }`.
pub fn span_invariant(s: &Setting, generators: &[Vector], which: ChainMember) -> Result<Subspace> {
    span_over(s, generators, s.member(which))
}

pub fn span_over(s: &Setting, generators: &[Vector], subgroup: &Subgroup) -> Result<Subspace> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let mut orbit = Vec::with_capacity(generators.len() * subgroup.order());
    for phi in generators {
        Error::check_len(s.points(), phi.len())?;
        for &h in subgroup.element_indices() {
            orbit.push(s.action().pi_apply_idx(h, phi));
        }
    }
    Subspace::from_vectors(s.weights(), &orbit)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvarianceCheck {
    pub invariant: bool,
    pub max_residual: f64,
}

/// Tests `Pi_h V <= V` on the generators of `subgroup`.
pub fn is_invariant(s: &Setting, v: &Subspace, subgroup: &Subgroup) -> InvarianceCheck {
    let mut worst: f64 = 0.0;
    for &h in subgroup.generator_indices() {
        for col in v.frame.column_iter() {
            let moved = s.action().pi_apply_idx(h, &col.into_owned());
            worst = worst.max(v.residual(&moved));
        }
    }
    InvarianceCheck {
        invariant: worst < s.tol(),
        max_residual: worst,
    }
}

pub fn is_invariant_under(s: &Setting, v: &Subspace, which: ChainMember) -> InvarianceCheck {
    is_invariant(s, v, s.member(which))
}

pub(crate) fn require_gamma_invariant(s: &Setting, v: &Subspace) -> Result<()> {
    Error::check_len(s.points(), v.ambient_dim())?;
    let check = is_invariant(s, v, s.gamma());
    if check.invariant {
        Ok(())
    } else {
        Err(Error::NotInvariant {
            residual: check.max_residual,
        })
    }
}

/// The multiplier `h` of a principal-space member, one value per point of `Omega`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierH {
    pub values: Vec<Complex64>,
    /// `E_psi`: fibers where `Z_Gamma[psi]` does not vanish.
    pub support: Vec<bool>,
    /// `||f - P f||` reconstructed from the fibers.
    pub residual: f64,
}

impl MultiplierH {
    /// Value of the `Gamma*`-periodic extension at any dual point.
    pub fn at(&self, s: &Setting, tau_hat: usize) -> Complex64 {
        let pos = s.omega().coset_position(tau_hat).expect("Omega covers the dual group");
        self.values[pos]
    }
}

/// The fiberwise multiplier `h_f = <Z f, Z psi> / ||Z psi||^2` on `E_psi`
/// together with the fiberwise residual of `f` against `S_Gamma(psi)`.
pub fn principal_multiplier(s: &Setting, f: &Vector, psi: &Vector) -> Result<MultiplierH> {
    Error::check_len(s.points(), f.len())?;
    let psi_norm = s.action().norm(psi);
    if psi_norm == 0.0 {
        return Err(Error::DegenerateGenerator);
    }
    let zf = zak_gamma(s, f)?.values;
    let zp = zak_gamma(s, psi)?.values;
    let w = s.weights();
    let tiles = s.tiling().c_gamma();
    let fiber_inner = |a: &CMatrix, b: &CMatrix, r: usize| -> Complex64 {
        (0..tiles.len())
            .map(|i| a[(r, i)] * b[(r, i)].conj() * w[tiles[i]])
            .sum()
    };
    let norms: Vec<f64> = (0..s.omega_len()).map(|r| fiber_inner(&zp, &zp, r).re).collect();
    let biggest = norms.iter().cloned().fold(0.0, f64::max);
    let support: Vec<bool> = norms.iter().map(|&n| n.sqrt() > s.tol() * biggest.sqrt()).collect();
    let values: Vec<Complex64> = (0..s.omega_len())
        .map(|r| {
            if support[r] {
                fiber_inner(&zf, &zp, r) / norms[r]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let mut residual_sq = 0.0;
    for r in 0..s.omega_len() {
        for i in 0..tiles.len() {
            residual_sq += (zf[(r, i)] - values[r] * zp[(r, i)]).norm_sqr() * w[tiles[i]];
        }
    }
    Ok(MultiplierH {
        values,
        support,
        residual: (residual_sq / s.omega_len() as f64).sqrt(),
    })
}

/// `Some(h)` iff `Z_Gamma[f] = h Z_Gamma[psi]` fiberwise, i.e. `f in S_Gamma(psi)`.
pub fn principal_membership(s: &Setting, f: &Vector, psi: &Vector) -> Result<Option<MultiplierH>> {
    let h = principal_multiplier(s, f, psi)?;
    let scale = s.action().norm(f);
    Ok((h.residual <= s.tol() * scale).then_some(h))
}

pub fn project(v: &Subspace, f: &Vector) -> Result<Vector> {
    Error::check_len(v.ambient_dim(), f.len())?;
    Ok(v.project(f))
}

/// Orthonormal bases of the fibers `span{ Z[v](omega) }` in weighted
/// coordinates, one matrix per point of `Omega`.
pub fn fiber_bases(s: &Setting, v: &Subspace) -> Result<Vec<CMatrix>> {
    Error::check_len(s.points(), v.ambient_dim())?;
    let fibers: Vec<CMatrix> = v
        .frame
        .column_iter()
        .map(|c| weighted_fibers(s, &c.into_owned()))
        .collect::<Result<_>>()?;
    let scale = fibers
        .iter()
        .flat_map(|m| m.column_iter().map(|c| c.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    Ok((0..s.omega_len())
        .map(|w| {
            if fibers.is_empty() {
                return CMatrix::zeros(s.fiber_dim(), 0);
            }
            let cols: Vec<Vector> = fibers.iter().map(|m| m.column(w).into_owned()).collect();
            orthonormal_basis(&CMatrix::from_columns(&cols), s.tol() * scale)
        })
        .collect())
}

/// Minimal number of generators of a `Gamma`-invariant space: the largest
/// fiber dimension.
pub fn length(s: &Setting, v: &Subspace) -> Result<usize> {
    require_gamma_invariant(s, v)?;
    Ok(fiber_bases(s, v)?.iter().map(|b| b.ncols()).max().unwrap_or(0))
}

/// `length(V)` generators whose `Gamma`-span is `V`: generator `i` carries the
/// `i`-th basis vector of every fiber that has one.
pub fn generators(s: &Setting, v: &Subspace) -> Result<Vec<Vector>> {
    require_gamma_invariant(s, v)?;
    let bases = fiber_bases(s, v)?;
    let len = bases.iter().map(|b| b.ncols()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let fibers = CMatrix::from_fn(s.fiber_dim(), s.omega_len(), |r, w| {
                if i < bases[w].ncols() {
                    bases[w][(r, i)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            from_weighted_fibers(s, &fibers)
        })
        .collect()
}
