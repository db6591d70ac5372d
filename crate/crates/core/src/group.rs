//! Finite abelian groups `Z_{n_1} x ... x Z_{n_k}`, their subgroups, duals and
//! coset sections.
//!
//! The dual group is identified with the group itself through the pairing
//! `(x, xi) = exp(2 pi i sum_j x_j xi_j / n_j)`, so annihilators and dual
//! sections are ordinary [`Subgroup`]s and [`CosetSection`]s of the same group.
//!
//! Elements are addressed internally by their mixed-radix index with the first
//! coordinate most significant; index order therefore coincides with the
//! lexicographic order of coordinate tuples.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate tuple of a group element, reduced componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, c) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u64>,
    strides: Vec<usize>,
    order: usize,
    // lcm of the moduli and the per-coordinate factors lcm / n_j
    lcm: u64,
    phase_factors: Vec<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = moduli.iter().find(|&&n| n == 0) {
            return Err(Error::InvalidModulus(bad));
        }
        let mut strides = vec![1usize; moduli.len()];
        for j in (0..moduli.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * moduli[j + 1] as usize;
        }
        let order = moduli.iter().map(|&n| n as usize).product();
        let lcm = moduli.iter().fold(1u64, |l, &n| l / gcd(l, n) * n);
        let phase_factors = moduli.iter().map(|&n| lcm / n).collect();
        Ok(Self {
            moduli,
            strides,
            order,
            lcm,
            phase_factors,
        })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    #[inline]
    fn coord(&self, idx: usize, j: usize) -> u64 {
        ((idx / self.strides[j]) as u64) % self.moduli[j]
    }

    pub fn element(&self, idx: usize) -> GroupElement {
        GroupElement((0..self.rank()).map(|j| self.coord(idx, j)).collect())
    }

    pub fn index_of(&self, x: &GroupElement) -> Result<usize> {
        if x.0.len() != self.rank() || x.0.iter().zip(&self.moduli).any(|(&c, &n)| c >= n) {
            return Err(Error::NotAnElement {
                coords: x.0.clone(),
                moduli: self.moduli.clone(),
            });
        }
        Ok(x.0
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum())
    }

    /// Reduces an arbitrary integer tuple modulo the moduli.
    pub fn reduce(&self, coords: &[i64]) -> Result<GroupElement> {
        Error::check_len(self.rank(), coords.len())?;
        Ok(GroupElement(
            coords
                .iter()
                .zip(&self.moduli)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(|i| self.element(i))
    }

    /// Index of the canonical generator `e_j`.
    pub fn unit_index(&self, j: usize) -> usize {
        if self.moduli[j] == 1 {
            0
        } else {
            self.strides[j]
        }
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        (0..self.rank())
            .map(|j| ((self.coord(a, j) + self.coord(b, j)) % self.moduli[j]) as usize * self.strides[j])
            .sum()
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.rank())
            .map(|j| {
                let n = self.moduli[j];
                ((n - self.coord(a, j)) % n) as usize * self.strides[j]
            })
            .sum()
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Numerator `k` of the phase `k / lcm` of the pairing.
    pub(crate) fn phase(&self, x: usize, xi: usize) -> u64 {
        let l = self.lcm as u128;
        let mut acc: u128 = 0;
        for j in 0..self.rank() {
            let t = self.coord(x, j) as u128 * self.coord(xi, j) as u128 % l;
            acc = (acc + t * self.phase_factors[j] as u128) % l;
        }
        acc as u64
    }

    pub(crate) fn pairing_idx(&self, x: usize, xi: usize) -> Complex64 {
        root_of_unity(self.phase(x, xi), self.lcm)
    }

    /// The character `xi` evaluated at `x`.
    pub fn pairing(&self, x: &GroupElement, xi: &GroupElement) -> Result<Complex64> {
        for e in [x, xi] {
            if e.0.len() != self.rank() {
                return Err(Error::Dimension {
                    expected: self.rank(),
                    found: e.0.len(),
                });
            }
        }
        Ok(self.pairing_idx(self.index_of(x)?, self.index_of(xi)?))
    }

    pub(crate) fn same_as(&self, other: &FiniteAbelianGroup) -> Result<()> {
        if self.moduli == other.moduli {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.moduli.clone(),
                right: other.moduli.clone(),
            })
        }
    }
}

/// `exp(2 pi i k / n)`, exact at the quarter turns.
pub(crate) fn root_of_unity(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if (4 * k) % n == 0 {
        return match 4 * k / n {
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// A subgroup stored with its full, sorted element enumeration.
#[derive(Clone, Debug)]
pub struct Subgroup {
    group: FiniteAbelianGroup,
    generators: Vec<usize>,
    elements: Vec<usize>,
    member: Vec<bool>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elements == other.elements
    }
}

impl Subgroup {
    pub fn generated_by(group: &FiniteAbelianGroup, generators: &[GroupElement]) -> Result<Self> {
        let gens = generators
            .iter()
            .map(|g| group.index_of(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_generator_indices(group, gens))
    }

    pub fn full(group: &FiniteAbelianGroup) -> Self {
        let gens = (0..group.rank())
            .map(|j| group.unit_index(j))
            .filter(|&g| g != 0)
            .collect();
        Self::from_generator_indices(group, gens)
    }

    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        Self::from_generator_indices(group, Vec::new())
    }

    pub(crate) fn from_generator_indices(group: &FiniteAbelianGroup, generators: Vec<usize>) -> Self {
        let member = closure(group, &generators);
        let elements = (0..group.order()).filter(|&i| member[i]).collect();
        Self {
            group: group.clone(),
            generators,
            elements,
            member,
        }
    }

    /// Builds a subgroup from a membership mask that is already known to be
    /// closed, picking a small generating set greedily.
    fn from_member_mask(group: &FiniteAbelianGroup, member: Vec<bool>) -> Self {
        let elements: Vec<usize> = (0..group.order()).filter(|&i| member[i]).collect();
        let mut generators = Vec::new();
        let mut reached = closure(group, &generators);
        for &e in &elements {
            if !reached[e] {
                generators.push(e);
                reached = closure(group, &generators);
            }
        }
        debug_assert_eq!(reached, member);
        Self {
            group: group.clone(),
            generators,
            elements,
            member,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element_indices(&self) -> &[usize] {
        &self.elements
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.elements.iter().map(|&i| self.group.element(i)).collect()
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        self.generators.iter().map(|&i| self.group.element(i)).collect()
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.member.get(idx).copied().unwrap_or(false)
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.group
            .index_of(x)
            .map(|i| self.member[i])
            .unwrap_or(false)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.group == other.group && self.elements.iter().all(|&e| other.member[e])
    }

    /// Characters trivial on this subgroup, `H* = { xi : (h, xi) = 1 for all h in H }`.
    pub fn annihilator(&self) -> Subgroup {
        // a character is trivial on H iff it is trivial on its generators
        let member = (0..self.group.order())
            .map(|xi| self.generators.iter().all(|&h| self.group.phase(h, xi) == 0))
            .collect();
        Self::from_member_mask(&self.group, member)
    }
}

fn closure(group: &FiniteAbelianGroup, generators: &[usize]) -> Vec<bool> {
    let mut member = vec![false; group.order()];
    member[0] = true;
    let mut stack = vec![0usize];
    while let Some(e) = stack.pop() {
        for &g in generators {
            let next = group.add(e, g);
            if !member[next] {
                member[next] = true;
                stack.push(next);
            }
        }
    }
    member
}

/// One representative per coset of `H` in `G`: the lexicographically smallest
/// coordinate tuple of each coset, listed in increasing order.
#[derive(Clone, Debug)]
pub struct CosetSection {
    group: FiniteAbelianGroup,
    representatives: Vec<usize>,
    // position of the coset representative, for elements of G
    coset_of: Vec<Option<usize>>,
}

pub fn section(g: &Subgroup, h: &Subgroup) -> Result<CosetSection> {
    if !h.is_subgroup_of(g) {
        return Err(Error::Chain(
            "section requires H to be a subgroup of G".to_string(),
        ));
    }
    let group = g.group();
    let mut representatives = Vec::with_capacity(g.order() / h.order());
    let mut coset_of = vec![None; group.order()];
    for &x in g.element_indices() {
        if coset_of[x].is_some() {
            continue;
        }
        let pos = representatives.len();
        representatives.push(x);
        for &y in h.element_indices() {
            coset_of[group.add(x, y)] = Some(pos);
        }
    }
    Ok(CosetSection {
        group: group.clone(),
        representatives,
        coset_of,
    })
}

impl CosetSection {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn representative_indices(&self) -> &[usize] {
        &self.representatives
    }

    pub fn representatives(&self) -> Vec<GroupElement> {
        self.representatives
            .iter()
            .map(|&i| self.group.element(i))
            .collect()
    }

    /// Position of the coset containing `idx`, if `idx` lies in `G`.
    pub fn coset_position(&self, idx: usize) -> Option<usize> {
        self.coset_of.get(idx).copied().flatten()
    }

    /// Splits `idx = rep + h` and returns `(position of rep, h)`.
    pub fn decompose(&self, idx: usize) -> Option<(usize, usize)> {
        let pos = self.coset_position(idx)?;
        Some((pos, self.group.sub(idx, self.representatives[pos])))
    }
}

/// Indices and annihilators of a validated chain `Gamma <= Delta <= T`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub index_t_gamma: usize,
    pub index_t_delta: usize,
    pub index_delta_gamma: usize,
    pub gamma_star: Vec<GroupElement>,
    pub delta_star: Vec<GroupElement>,
}

pub fn validate_chain(
    gamma: &Subgroup,
    delta: &Subgroup,
    group: &FiniteAbelianGroup,
) -> Result<ChainReport> {
    gamma.group().same_as(group)?;
    delta.group().same_as(group)?;
    if !gamma.is_subgroup_of(delta) {
        let stray = gamma
            .element_indices()
            .iter()
            .find(|&&g| !delta.contains_index(g))
            .map(|&g| group.element(g).to_string())
            .unwrap_or_default();
        return Err(Error::Chain(format!(
            "Gamma is not contained in Delta: {stray} is missing"
        )));
    }
    let gamma_star = gamma.annihilator();
    let delta_star = delta.annihilator();
    if !delta_star.is_subgroup_of(&gamma_star) {
        return Err(Error::Chain("Delta* is not contained in Gamma*".to_string()));
    }
    Ok(ChainReport {
        index_t_gamma: group.order() / gamma.order(),
        index_t_delta: group.order() / delta.order(),
        index_delta_gamma: delta.order() / gamma.order(),
        gamma_star: gamma_star.elements(),
        delta_star: delta_star.elements(),
    })
}
