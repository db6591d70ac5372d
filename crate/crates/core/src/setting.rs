use serde::{Deserialize, Serialize};

use crate::action::{ActionReport, ActionSpace, TilingSet};
use crate::error::{Error, Result};
use crate::group::{section, validate_chain, ChainReport, CosetSection, FiniteAbelianGroup, Subgroup};

/// Default tolerance for membership, inclusion and invariance decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Which member of the chain `Gamma <= Delta <= T` a generating set is spread over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMember {
    Gamma,
    Delta,
    T,
}

/// A validated chain `Gamma <= Delta <= T` together with a free action of `T`
/// and every derived section the transforms need:
///
/// * `F = {a_0, ..., a_s}`, a section of `T / Gamma`,
/// * `Gamma* = {gamma*_0 = 0, ..., gamma*_s}` in increasing order,
/// * `Omega`, a section of `T^ / Gamma*`,
/// * `N`, a section of `Gamma* / Delta*`,
/// * the tiling sets `C_T` and `C_Gamma`.
#[derive(Clone, Debug)]
pub struct Setting {
    group: FiniteAbelianGroup,
    gamma: Subgroup,
    delta: Subgroup,
    t_full: Subgroup,
    action: ActionSpace,
    chain: ChainReport,
    action_report: ActionReport,
    coset_section: CosetSection,
    gamma_star: Subgroup,
    delta_star: Subgroup,
    omega: CosetSection,
    nu: CosetSection,
    tiling: TilingSet,
    tol: f64,
}

impl Setting {
    pub fn new(gamma: Subgroup, delta: Subgroup, action: ActionSpace) -> Result<Self> {
        let group = action.group().clone();
        let chain = validate_chain(&gamma, &delta, &group)?;
        let action_report = action.validate()?;
        let t_full = Subgroup::full(&group);
        let coset_section = section(&t_full, &gamma)?;
        let gamma_star = gamma.annihilator();
        let delta_star = delta.annihilator();
        let omega = section(&t_full, &gamma_star)?;
        let nu = section(&gamma_star, &delta_star)?;
        let tiling = action.tiling_sets(&gamma, &coset_section)?;
        Ok(Self {
            group,
            gamma,
            delta,
            t_full,
            action,
            chain,
            action_report,
            coset_section,
            gamma_star,
            delta_star,
            omega,
            nu,
            tiling,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Config {
                path: "tol".to_string(),
                message: format!("tolerance must be positive, got {tol}"),
            });
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn gamma(&self) -> &Subgroup {
        &self.gamma
    }

    pub fn delta(&self) -> &Subgroup {
        &self.delta
    }

    pub fn t_full(&self) -> &Subgroup {
        &self.t_full
    }

    pub fn member(&self, which: ChainMember) -> &Subgroup {
        match which {
            ChainMember::Gamma => &self.gamma,
            ChainMember::Delta => &self.delta,
            ChainMember::T => &self.t_full,
        }
    }

    pub fn action(&self) -> &ActionSpace {
        &self.action
    }

    pub fn chain(&self) -> &ChainReport {
        &self.chain
    }

    pub fn action_report(&self) -> &ActionReport {
        &self.action_report
    }

    /// Section `a_0, ..., a_s` of `T / Gamma`.
    pub fn coset_section(&self) -> &CosetSection {
        &self.coset_section
    }

    pub fn gamma_star(&self) -> &Subgroup {
        &self.gamma_star
    }

    pub fn delta_star(&self) -> &Subgroup {
        &self.delta_star
    }

    pub fn omega(&self) -> &CosetSection {
        &self.omega
    }

    pub fn nu(&self) -> &CosetSection {
        &self.nu
    }

    pub fn tiling(&self) -> &TilingSet {
        &self.tiling
    }

    pub fn points(&self) -> usize {
        self.action.points()
    }

    pub fn weights(&self) -> &[f64] {
        self.action.weights()
    }

    /// `s + 1 = [T : Gamma] = |Gamma*|`.
    pub fn blocks(&self) -> usize {
        self.gamma_star.order()
    }

    pub fn omega_len(&self) -> usize {
        self.omega.len()
    }

    pub fn c_t_len(&self) -> usize {
        self.tiling.c_t().len()
    }

    /// Dimension `(s + 1) |C_T|` of a fiber of the vector Zak transform.
    pub fn fiber_dim(&self) -> usize {
        self.blocks() * self.c_t_len()
    }
}
