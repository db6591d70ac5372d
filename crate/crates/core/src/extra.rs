//! The dual partition `B_xi = Omega + xi + Delta*`, the mask spaces `U_xi`,
//! and the checks relating `Delta`-invariance to them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::subspace::{fiber_bases, is_invariant, orthonormal_basis, require_gamma_invariant, span_over, Subspace};
use crate::zak::{dft, idft, phi_map, translate, zak_t, zak_t_inv, CMatrix, ZakT};
use crate::{Setting, Vector};

/// `B_xi` for every `xi` in the section `N` of `Gamma* / Delta*`, as sorted
/// index sets of the dual group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BPartition {
    pub xi: Vec<GroupElement>,
    pub blocks: Vec<Vec<usize>>,
    #[serde(skip)]
    block_of: Vec<usize>,
}

impl BPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Position in `N` of the block containing `tau_hat`.
    pub fn block_of(&self, tau_hat: usize) -> usize {
        self.block_of[tau_hat]
    }

    pub fn contains(&self, xi: usize, tau_hat: usize) -> bool {
        self.block_of[tau_hat] == xi
    }
}

pub fn build_partition(s: &Setting) -> BPartition {
    let group = s.group();
    let nu = s.nu();
    let mut block_of = vec![usize::MAX; group.order()];
    let mut blocks = vec![Vec::new(); nu.len()];
    for (pos, &xi) in nu.representative_indices().iter().enumerate() {
        for &w in s.omega().representative_indices() {
            for &d in s.delta_star().element_indices() {
                let th = group.add(group.add(w, xi), d);
                block_of[th] = pos;
                blocks[pos].push(th);
            }
        }
        blocks[pos].sort_unstable();
    }
    debug_assert!(block_of.iter().all(|&b| b != usize::MAX));
    BPartition {
        xi: nu.representatives(),
        blocks,
        block_of,
    }
}

/// `H_xi`: the blocks `k` of the vector Zak fiber with `gamma*_k in xi + Delta*`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HxiBlocks {
    pub blocks: Vec<Vec<usize>>,
}

impl HxiBlocks {
    pub fn new(s: &Setting) -> Self {
        let group = s.group();
        let gstar = s.gamma_star().element_indices();
        let blocks = s
            .nu()
            .representative_indices()
            .iter()
            .map(|&xi| {
                (0..gstar.len())
                    .filter(|&k| s.delta_star().contains_index(group.sub(gstar[k], xi)))
                    .collect()
            })
            .collect();
        Self { blocks }
    }

    /// Fiber coordinates (of length `(s + 1) |C_T|`) belonging to block `xi`.
    pub fn coordinates(&self, s: &Setting, xi: usize) -> Vec<usize> {
        let ct = s.c_t_len();
        self.blocks[xi]
            .iter()
            .flat_map(|&k| (k * ct..(k + 1) * ct).collect::<Vec<_>>())
            .collect()
    }

    /// `P_xi` applied to the columns of a fiber matrix.
    pub fn project(&self, s: &Setting, xi: usize, fiber: &CMatrix) -> CMatrix {
        let mut keep = vec![false; fiber.nrows()];
        for i in self.coordinates(s, xi) {
            keep[i] = true;
        }
        CMatrix::from_fn(fiber.nrows(), fiber.ncols(), |r, c| {
            if keep[r] {
                fiber[(r, c)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

fn check_xi(s: &Setting, xi: usize) -> Result<()> {
    if xi < s.nu().len() {
        Ok(())
    } else {
        Err(Error::UnknownBlock(xi))
    }
}

/// `M_xi f = Z_T^{-1}(1_{B_xi} Z_T f)`.
pub fn mask_operator(s: &Setting, xi: usize, f: &Vector) -> Result<Vector> {
    check_xi(s, xi)?;
    let partition = build_partition(s);
    mask_with(s, &partition, xi, f)
}

fn mask_with(s: &Setting, partition: &BPartition, xi: usize, f: &Vector) -> Result<Vector> {
    let mut z = zak_t(s, f)?;
    for th in 0..s.group().order() {
        if !partition.contains(xi, th) {
            z.values.row_mut(th).fill(Complex64::new(0.0, 0.0));
        }
    }
    zak_t_inv(s, &z)
}

/// `U_xi = M_xi(V)`.
pub fn u_xi(s: &Setting, v: &Subspace, xi: usize) -> Result<Subspace> {
    check_xi(s, xi)?;
    require_gamma_invariant(s, v)?;
    let partition = build_partition(s);
    masked_space(s, &partition, v, xi)
}

fn masked_space(s: &Setting, partition: &BPartition, v: &Subspace, xi: usize) -> Result<Subspace> {
    let cols = v
        .columns()
        .iter()
        .map(|c| mask_with(s, partition, xi, c))
        .collect::<Result<Vec<_>>>()?;
    Subspace::from_vectors_relative_to(s.weights(), &cols, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockReport {
    pub xi: GroupElement,
    pub dim: usize,
    pub included: bool,
    pub inclusion_residual: f64,
    pub gamma_invariant: bool,
    pub delta_invariant: bool,
    pub invariance_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtraInvarianceReport {
    pub dim: usize,
    pub delta_invariant: bool,
    pub delta_residual: f64,
    pub blocks: Vec<BlockReport>,
    /// `max |P_V - sum_xi P_{U_xi}|`, only when `V` is `Delta`-invariant.
    pub decomposition_deviation: Option<f64>,
    pub decomposition_ok: Option<bool>,
    /// Largest `|<u, u'>|` between frames of different `U_xi`.
    pub cross_inner_product: f64,
}

/// Tests `Pi_delta V <= V` directly and `U_xi <= V` for every `xi`, and fails
/// with a theorem violation if the two answers differ. When both hold, also
/// checks `V = (+)_xi U_xi` and the invariance of every `U_xi`.
pub fn check_extra_invariance(s: &Setting, v: &Subspace) -> Result<ExtraInvarianceReport> {
    Ok(extra_invariance_with_spaces(s, v)?.0)
}

/// The report together with the spaces `U_xi` it was computed from.
pub fn extra_invariance_with_spaces(s: &Setting, v: &Subspace) -> Result<(ExtraInvarianceReport, Vec<Subspace>)> {
    require_gamma_invariant(s, v)?;
    let tol = s.tol();
    let partition = build_partition(s);
    let direct = is_invariant(s, v, s.delta());
    let spaces = (0..partition.len())
        .map(|xi| masked_space(s, &partition, v, xi))
        .collect::<Result<Vec<_>>>()?;

    let blocks: Vec<BlockReport> = spaces
        .iter()
        .zip(&partition.xi)
        .map(|(u, xi)| {
            let inclusion_residual = u.inclusion_residual(v);
            let g = is_invariant(s, u, s.gamma());
            let d = is_invariant(s, u, s.delta());
            BlockReport {
                xi: xi.clone(),
                dim: u.dim(),
                included: inclusion_residual < tol,
                inclusion_residual,
                gamma_invariant: g.invariant,
                delta_invariant: d.invariant,
                invariance_residual: g.max_residual.max(d.max_residual),
            }
        })
        .collect();

    let all_included = blocks.iter().all(|b| b.included);
    if all_included != direct.invariant {
        return Err(Error::TheoremViolation(format!(
            "direct Delta-invariance is {} (residual {:e}) but inclusion of every U_xi is {}",
            direct.invariant, direct.max_residual, all_included
        )));
    }

    let mut cross: f64 = 0.0;
    for i in 0..spaces.len() {
        for j in i + 1..spaces.len() {
            for a in spaces[i].columns() {
                for b in spaces[j].columns() {
                    cross = cross.max(s.action().inner(&a, &b).norm());
                }
            }
        }
    }

    let (decomposition_deviation, decomposition_ok) = if direct.invariant {
        let mut sum = CMatrix::zeros(s.points(), s.points());
        for u in &spaces {
            sum += u.projector();
        }
        let dev = (v.projector() - sum).camax();
        let ok = dev < tol;
        if !ok {
            return Err(Error::TheoremViolation(format!(
                "V is Delta-invariant but differs from the sum of the U_xi by {dev:e}"
            )));
        }
        if let Some(b) = blocks.iter().find(|b| !(b.gamma_invariant && b.delta_invariant)) {
            return Err(Error::TheoremViolation(format!(
                "U_xi for xi = {} is not invariant (residual {:e})",
                b.xi, b.invariance_residual
            )));
        }
        (Some(dev), Some(ok))
    } else {
        (None, None)
    };

    Ok((
        ExtraInvarianceReport {
            dim: v.dim(),
            delta_invariant: direct.invariant,
            delta_residual: direct.max_residual,
            blocks,
            decomposition_deviation,
            decomposition_ok,
            cross_inner_product: cross,
        },
        spaces,
    ))
}

/// `phi = Z_T^{-1}(1_{B_e})`, with `e` the identity coset of `N`.
pub fn canonical_generator(s: &Setting) -> Result<Vector> {
    let partition = build_partition(s);
    let values = CMatrix::from_fn(s.group().order(), s.c_t_len(), |th, _| {
        if partition.contains(0, th) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    zak_t_inv(s, &ZakT { values })
}

/// `S_Gamma(phi)` for the canonical generator: always `Delta`-invariant.
pub fn canonical_extra_invariant(s: &Setting) -> Result<Subspace> {
    span_over(s, &[canonical_generator(s)?], s.gamma())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecomposableReport {
    pub decomposable: bool,
    /// Largest distance of `P_xi b` from the fiber, over fibers, blocks and basis vectors `b`.
    pub block_residual: f64,
    /// Largest entry of `|proj(Z[U_xi](omega)) - proj(P_xi Z[V](omega))|`.
    pub fiber_deviation: f64,
    pub agrees_with_direct: bool,
}

/// Tests whether the fibers of `Z[V]` are stable under every block
/// projection `P_xi`, compares with [`check_extra_invariance`], and checks
/// `Z[U_xi](omega) = P_xi Z[V](omega)` on every fiber.
pub fn decomposable_mi_check(s: &Setting, v: &Subspace) -> Result<DecomposableReport> {
    let (direct, spaces) = extra_invariance_with_spaces(s, v)?;
    let blocks = HxiBlocks::new(s);
    let bases = fiber_bases(s, v)?;
    let tol = s.tol();

    let mut block_residual: f64 = 0.0;
    for q in &bases {
        if q.ncols() == 0 {
            continue;
        }
        for xi in 0..blocks.blocks.len() {
            let p = blocks.project(s, xi, q);
            let back = q * (q.adjoint() * &p);
            for (a, b) in p.column_iter().zip(back.column_iter()) {
                block_residual = block_residual.max((a - b).norm());
            }
        }
    }
    let decomposable = block_residual < tol;

    let mut fiber_deviation: f64 = 0.0;
    for (xi, u) in spaces.iter().enumerate() {
        let ubases = fiber_bases(s, u)?;
        for (q, qu) in bases.iter().zip(&ubases) {
            let p = blocks.project(s, xi, q);
            let scale = p.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
            let pq = orthonormal_basis(&p, tol * scale.max(1.0));
            let dev = (pq.clone() * pq.adjoint() - qu * qu.adjoint()).camax();
            fiber_deviation = fiber_deviation.max(dev);
        }
    }

    let agrees = decomposable == direct.delta_invariant;
    if !agrees {
        return Err(Error::TheoremViolation(format!(
            "fibers are {}decomposable (residual {block_residual:e}) but direct Delta-invariance is {}",
            if decomposable { "" } else { "not " },
            direct.delta_invariant
        )));
    }
    if fiber_deviation >= tol {
        return Err(Error::TheoremViolation(format!(
            "Z[U_xi] differs from P_xi Z[V] by {fiber_deviation:e}"
        )));
    }
    Ok(DecomposableReport {
        decomposable,
        block_residual,
        fiber_deviation,
        agrees_with_direct: agrees,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L2tReport {
    pub dim: usize,
    pub delta_invariant: bool,
    pub delta_residual: f64,
    pub included: Vec<bool>,
    pub inclusion_residuals: Vec<f64>,
}

/// Euclidean orthonormal basis of a subspace of `l^2(T)`, cut off relative to
/// the largest spanning vector.
fn l2t_basis(s: &Setting, spanning: &[Vector]) -> Result<CMatrix> {
    let n = s.group().order();
    for v in spanning {
        Error::check_len(n, v.len())?;
    }
    if spanning.is_empty() {
        return Ok(CMatrix::zeros(n, 0));
    }
    let m = CMatrix::from_columns(spanning);
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(orthonormal_basis(&m, crate::subspace::PIVOT_TOL * scale))
}

fn l2t_residual(q: &CMatrix, a: &Vector) -> f64 {
    (a - q * (q.adjoint() * a)).norm()
}

/// The same equivalence on `l^2(T)` with translations `t_gamma` and masks
/// `U~_xi = { a : a^ = 1_{B_xi} b^, b in W }`. `W` must be invariant under
/// every `t_gamma`, `gamma in Gamma`.
pub fn l2t_extra_invariance(s: &Setting, spanning: &[Vector]) -> Result<L2tReport> {
    let q = l2t_basis(s, spanning)?;
    let tol = s.tol();
    let cols: Vec<Vector> = q.column_iter().map(|c| c.into_owned()).collect();
    let worst_under = |gens: &[usize]| -> f64 {
        gens.iter()
            .flat_map(|&g| cols.iter().map(move |c| (g, c)))
            .map(|(g, c)| l2t_residual(&q, &translate(s, c, g)))
            .fold(0.0, f64::max)
    };
    let gamma_residual = worst_under(s.gamma().generator_indices());
    if gamma_residual >= tol {
        return Err(Error::NotInvariant {
            residual: gamma_residual,
        });
    }
    let delta_residual = worst_under(s.delta().generator_indices());
    let delta_invariant = delta_residual < tol;

    let partition = build_partition(s);
    let mut included = Vec::with_capacity(partition.len());
    let mut inclusion_residuals = Vec::with_capacity(partition.len());
    for xi in 0..partition.len() {
        let mut worst: f64 = 0.0;
        for c in &cols {
            let mut hat = dft(s, c);
            for th in 0..hat.len() {
                if !partition.contains(xi, th) {
                    hat[th] = Complex64::new(0.0, 0.0);
                }
            }
            worst = worst.max(l2t_residual(&q, &idft(s, &hat)));
        }
        included.push(worst < tol);
        inclusion_residuals.push(worst);
    }
    if included.iter().all(|&b| b) != delta_invariant {
        return Err(Error::TheoremViolation(format!(
            "on l2(T): Delta-invariance is {delta_invariant} (residual {delta_residual:e}) but mask inclusions are {included:?}"
        )));
    }
    Ok(L2tReport {
        dim: q.ncols(),
        delta_invariant,
        delta_residual,
        included,
        inclusion_residuals,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeFunctionReport {
    pub delta_invariant: bool,
    /// `dim J(x)` for each `x in C_T`.
    pub fiber_dims: Vec<usize>,
    /// Whether each `J(x)` is `Delta`-translation invariant.
    pub fiber_delta_invariant: Vec<bool>,
    /// Largest distance of `Phi(f)(x)` from `J(x)` over the frame of `V` and random `f in V`.
    pub membership_residual: f64,
    pub consistent: bool,
}

/// Builds the range function `J(x) = span{ t_gamma Phi(phi)(x) }` from a
/// generating set of `V` and checks that every `Phi(f)(x)`, `f in V`, lies in
/// it and that `Delta`-invariance of `V` passes to every `J(x)`.
pub fn range_function_consistency(s: &Setting, v: &Subspace, generators: &[Vector]) -> Result<RangeFunctionReport> {
    let direct = check_extra_invariance(s, v)?;
    let tol = s.tol();
    let ct = s.c_t_len();

    let phis = generators.iter().map(|g| phi_map(s, g)).collect::<Result<Vec<_>>>()?;
    let mut probes: Vec<Vector> = v.columns();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7261_6e67);
    for _ in 0..4 {
        let mut f = Vector::zeros(s.points());
        for c in v.columns() {
            f += c * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        probes.push(f);
    }
    let probe_phis = probes.iter().map(|f| phi_map(s, f)).collect::<Result<Vec<_>>>()?;

    let mut fiber_dims = Vec::with_capacity(ct);
    let mut fiber_delta_invariant = Vec::with_capacity(ct);
    let mut membership_residual: f64 = 0.0;
    for c in 0..ct {
        let spanning: Vec<Vector> = phis
            .iter()
            .flat_map(|p| {
                let row: Vector = p.row(c).transpose();
                s.gamma()
                    .element_indices()
                    .iter()
                    .map(|&g| translate(s, &row, g))
                    .collect::<Vec<_>>()
            })
            .collect();
        let q = l2t_basis(s, &spanning)?;
        for p in &probe_phis {
            let row: Vector = p.row(c).transpose();
            let scale = row.norm().max(1.0);
            membership_residual = membership_residual.max(l2t_residual(&q, &row) / scale);
        }
        let report = l2t_extra_invariance(s, &spanning)?;
        fiber_dims.push(report.dim);
        fiber_delta_invariant.push(report.delta_invariant);
    }
    let forward_ok = !direct.delta_invariant || fiber_delta_invariant.iter().all(|&b| b);
    Ok(RangeFunctionReport {
        delta_invariant: direct.delta_invariant,
        fiber_dims,
        fiber_delta_invariant,
        membership_residual,
        consistent: forward_ok && membership_residual < tol,
    })
}
