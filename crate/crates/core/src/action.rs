//! Finite weighted measure spaces carrying a free action of a finite abelian
//! group, the induced Jacobian cocycle, the unitary representation `Pi` and
//! tiling sets.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{CosetSection, FiniteAbelianGroup, GroupElement, Subgroup};
use crate::Vector;

#[derive(Clone, Debug)]
pub struct ActionSpace {
    group: FiniteAbelianGroup,
    mu: Vec<f64>,
    generators: Vec<Vec<usize>>,
    // table[tau][x] = sigma_tau(x)
    table: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionReport {
    pub points: usize,
    pub group_order: usize,
    pub orbits: usize,
}

impl ActionSpace {
    /// Builds the action from one permutation of the points per canonical
    /// generator `e_j` of the group. Weights default to 1.
    pub fn new(
        group: &FiniteAbelianGroup,
        points: usize,
        mu: Option<Vec<f64>>,
        generators: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if generators.len() != group.rank() {
            return Err(Error::GeneratorCount {
                expected: group.rank(),
                found: generators.len(),
            });
        }
        for (j, perm) in generators.iter().enumerate() {
            if !is_permutation(perm, points) {
                return Err(Error::NotPermutation {
                    generator: j,
                    points,
                });
            }
        }
        let mu = mu.unwrap_or_else(|| vec![1.0; points]);
        Error::check_len(points, mu.len())?;
        if let Some((point, &value)) = mu
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidWeight { point, value });
        }

        let table = (0..group.order())
            .map(|tau| {
                let coords = group.element(tau);
                let mut map: Vec<usize> = (0..points).collect();
                for (j, &c) in coords.coords().iter().enumerate() {
                    for _ in 0..c {
                        for y in map.iter_mut() {
                            *y = generators[j][*y];
                        }
                    }
                }
                map
            })
            .collect();

        Ok(Self {
            group: group.clone(),
            mu,
            generators,
            table,
        })
    }

    /// `orbits` disjoint copies of the group acting on itself by translation;
    /// point `o * |T| + tau` is `sigma_tau` of the orbit base point `o * |T|`.
    pub fn regular(group: &FiniteAbelianGroup, orbits: usize, mu: Option<Vec<f64>>) -> Result<Self> {
        let n = group.order();
        let generators = (0..group.rank())
            .map(|j| {
                let e = group.unit_index(j);
                (0..n * orbits)
                    .map(|x| (x / n) * n + group.add(x % n, e))
                    .collect()
            })
            .collect();
        Self::new(group, n * orbits, mu, generators)
    }

    /// The same action transported along the point bijection `x -> relabel[x]`.
    pub fn relabeled(&self, relabel: &[usize]) -> Result<Self> {
        if !is_permutation(relabel, self.points()) {
            return Err(Error::NotPermutation {
                generator: usize::MAX,
                points: self.points(),
            });
        }
        let mut inverse = vec![0; relabel.len()];
        for (x, &y) in relabel.iter().enumerate() {
            inverse[y] = x;
        }
        let generators = self
            .generators
            .iter()
            .map(|g| (0..self.points()).map(|y| relabel[g[inverse[y]]]).collect())
            .collect();
        let mu = (0..self.points()).map(|y| self.mu[inverse[y]]).collect();
        Self::new(&self.group, self.points(), Some(mu), generators)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn points(&self) -> usize {
        self.mu.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.mu
    }

    pub fn generator_permutations(&self) -> &[Vec<usize>] {
        &self.generators
    }

    #[inline]
    pub fn act(&self, tau: usize, x: usize) -> usize {
        self.table[tau][x]
    }

    /// `J(tau, x) = mu(sigma_tau(x)) / mu(x)`.
    #[inline]
    pub fn jacobian_idx(&self, tau: usize, x: usize) -> f64 {
        self.mu[self.act(tau, x)] / self.mu[x]
    }

    pub fn jacobian(&self, tau: &GroupElement, x: usize) -> Result<f64> {
        let t = self.group.index_of(tau)?;
        if x >= self.points() {
            return Err(Error::Dimension {
                expected: self.points(),
                found: x + 1,
            });
        }
        Ok(self.jacobian_idx(t, x))
    }

    /// `(Pi_gamma f)(x) = J(-gamma, x)^{1/2} f(sigma_{-gamma}(x))`.
    pub fn pi_apply_idx(&self, gamma: usize, f: &Vector) -> Vector {
        let back = self.group.neg(gamma);
        Vector::from_iterator(
            self.points(),
            (0..self.points()).map(|x| f[self.act(back, x)] * self.jacobian_idx(back, x).sqrt()),
        )
    }

    pub fn pi_apply(&self, gamma: &GroupElement, f: &Vector) -> Result<Vector> {
        Error::check_len(self.points(), f.len())?;
        Ok(self.pi_apply_idx(self.group.index_of(gamma)?, f))
    }

    /// `<f, g> = sum_x f(x) conj(g(x)) mu(x)`.
    pub fn inner(&self, f: &Vector, g: &Vector) -> Complex64 {
        f.iter()
            .zip(g.iter())
            .zip(&self.mu)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum()
    }

    pub fn norm(&self, f: &Vector) -> f64 {
        f.iter()
            .zip(&self.mu)
            .map(|(a, w)| a.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Checks the action laws against every generator, freeness, and that the
    /// points split into whole orbits.
    pub fn validate(&self) -> Result<ActionReport> {
        let order = self.group.order();
        let points = self.points();
        if points % order != 0 {
            return Err(Error::OrbitCount { points, order });
        }
        if self.table[0].iter().enumerate().any(|(x, &y)| x != y) {
            return Err(Error::ActionLaw("sigma_0 is not the identity".to_string()));
        }
        // sigma_{tau + e_j} = g_j o sigma_tau for every tau and generator j
        for (j, g) in self.generators.iter().enumerate() {
            let e = self.group.unit_index(j);
            for tau in 0..order {
                let next = &self.table[self.group.add(tau, e)];
                if (0..points).any(|x| next[x] != g[self.table[tau][x]]) {
                    return Err(Error::ActionLaw(format!(
                        "generator {j} is incompatible with the group relations at {}",
                        self.group.element(tau)
                    )));
                }
            }
        }
        for tau in 1..order {
            if let Some(point) = (0..points).find(|&x| self.table[tau][x] == x) {
                return Err(Error::NotFree {
                    tau: self.group.element(tau).0,
                    point,
                });
            }
        }
        Ok(ActionReport {
            points,
            group_order: order,
            orbits: points / order,
        })
    }

    /// `C_T` (smallest point of each orbit) and
    /// `C_Gamma = U_j sigma_{-a_j}(C_T)` for the section `a_0, ..., a_s` of `T / Gamma`.
    pub fn tiling_sets(&self, gamma: &Subgroup, coset_section: &CosetSection) -> Result<TilingSet> {
        self.validate()?;
        self.group.same_as(gamma.group())?;
        let group = &self.group;
        let points = self.points();
        if coset_section.len() * gamma.order() != group.order() {
            return Err(Error::Chain(
                "coset section does not match the index of Gamma".to_string(),
            ));
        }

        let mut locate_t = vec![None; points];
        let mut c_t = Vec::new();
        for x in 0..points {
            if locate_t[x].is_some() {
                continue;
            }
            let c = c_t.len();
            c_t.push(x);
            for tau in 0..group.order() {
                let y = self.act(tau, x);
                if locate_t[y].replace((c, tau)).is_some() {
                    return Err(Error::NotFree {
                        tau: group.element(tau).0,
                        point: x,
                    });
                }
            }
        }
        let locate_t: Vec<(usize, usize)> = locate_t.into_iter().map(Option::unwrap).collect();

        let c_gamma: Vec<usize> = coset_section
            .representative_indices()
            .iter()
            .flat_map(|&a| {
                let back = group.neg(a);
                c_t.iter().map(move |&c| (back, c))
            })
            .map(|(back, c)| self.act(back, c))
            .collect();

        let mut locate_gamma = vec![None; points];
        for (i, &y) in c_gamma.iter().enumerate() {
            for &g in gamma.element_indices() {
                let z = self.act(g, y);
                if locate_gamma[z].replace((i, g)).is_some() {
                    return Err(Error::ActionLaw(
                        "Gamma-translates of C_Gamma overlap".to_string(),
                    ));
                }
            }
        }
        if locate_gamma.iter().any(Option::is_none) {
            return Err(Error::ActionLaw(
                "Gamma-translates of C_Gamma do not cover X".to_string(),
            ));
        }
        let locate_gamma = locate_gamma.into_iter().map(Option::unwrap).collect();

        Ok(TilingSet {
            c_t,
            c_gamma,
            locate_t,
            locate_gamma,
        })
    }
}

fn is_permutation(perm: &[usize], points: usize) -> bool {
    if perm.len() != points {
        return false;
    }
    let mut seen = vec![false; points];
    for &y in perm {
        if y >= points || std::mem::replace(&mut seen[y], true) {
            return false;
        }
    }
    true
}

/// Tiling sets of a free action. `C_Gamma` is ordered block by block: entry
/// `j * |C_T| + c` is `sigma_{-a_j}` of the `c`-th point of `C_T`.
#[derive(Clone, Debug)]
pub struct TilingSet {
    c_t: Vec<usize>,
    c_gamma: Vec<usize>,
    locate_t: Vec<(usize, usize)>,
    locate_gamma: Vec<(usize, usize)>,
}

impl TilingSet {
    pub fn c_t(&self) -> &[usize] {
        &self.c_t
    }

    pub fn c_gamma(&self) -> &[usize] {
        &self.c_gamma
    }

    /// `(c, tau)` with `x = sigma_tau(C_T[c])`.
    pub fn locate_t(&self, x: usize) -> (usize, usize) {
        self.locate_t[x]
    }

    /// `(i, gamma)` with `x = sigma_gamma(C_Gamma[i])`.
    pub fn locate_gamma(&self, x: usize) -> (usize, usize) {
        self.locate_gamma[x]
    }
}
