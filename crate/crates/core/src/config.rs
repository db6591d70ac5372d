//! JSON scenario files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "group": { "moduli": [12] },
//!   "gamma": [[4]],
//!   "delta": [[2]],
//!   "action": { "regular": { "orbits": 2 }, "weights": [1.0, ...] },
//!   "subspace": { "member": "gamma", "random": 2 },
//!   "data": { "csv": "psi.csv" },
//!   "options": { "ell": 1, "seed": 7 }
//! }
//! ```
//!
//! The action is given either as `"regular"` (point `o |T| + tau` is
//! `sigma_tau` of point `o |T|`) or as `"points"` plus one permutation per
//! modulus in `"generators"`. Complex vectors are lists of `[re, im]` pairs.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::action::ActionSpace;
use crate::error::{Error, Result};
use crate::extra::canonical_generator;
use crate::group::{FiniteAbelianGroup, GroupElement, Subgroup};
use crate::io::read_vectors_csv;
use crate::scenarios::random_vector;
use crate::setting::{ChainMember, DEFAULT_TOL};
use crate::subspace::{span_invariant, Subspace};
use crate::{Setting, Vector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub group: GroupConfig,
    pub gamma: Vec<Vec<u64>>,
    pub delta: Vec<Vec<u64>>,
    pub action: ActionConfig,
    #[serde(default)]
    pub subspace: Option<SubspaceConfig>,
    #[serde(default)]
    pub data: Option<DataConfig>,
    #[serde(default)]
    pub options: Options,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub moduli: Vec<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionConfig {
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub generators: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub regular: Option<RegularConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularConfig {
    pub orbits: usize,
}

pub type ComplexList = Vec<[f64; 2]>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceConfig {
    /// Subgroup the generators are spread over; `gamma` by default.
    #[serde(default)]
    pub member: Option<ChainMember>,
    #[serde(default)]
    pub generators: Option<Vec<ComplexList>>,
    /// Number of seeded random generators.
    #[serde(default)]
    pub random: Option<usize>,
    /// Use the canonical extra-invariant generator.
    #[serde(default)]
    pub canonical: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default)]
    pub vectors: Option<Vec<ComplexList>>,
    /// CSV file, relative to the config file, one vector per `re,im` column pair.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub random: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    #[default]
    Invariant,
    Extra,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub ell: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub problem: Problem,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn locate(path: &str, err: Error) -> Error {
    match err {
        Error::Config { .. } => err,
        Error::InvalidModulus(_)
        | Error::NotAnElement { .. }
        | Error::Dimension { .. }
        | Error::NotPermutation { .. }
        | Error::GeneratorCount { .. }
        | Error::InvalidWeight { .. } => config_error(path, err.to_string()),
        other => other,
    }
}

fn to_vector(list: &ComplexList) -> Vector {
    Vector::from_iterator(list.len(), list.iter().map(|[re, im]| Complex64::new(*re, *im)))
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        if cfg.version != SCHEMA_VERSION {
            return Err(config_error(
                "version",
                format!("unsupported schema version {}, expected {SCHEMA_VERSION}", cfg.version),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.options.seed.unwrap_or(0)
    }

    pub fn tol(&self) -> f64 {
        self.options.tol.unwrap_or(DEFAULT_TOL)
    }

    fn subgroup(&self, group: &FiniteAbelianGroup, gens: &[Vec<u64>], field: &str) -> Result<Subgroup> {
        let elems: Vec<GroupElement> = gens.iter().map(|g| GroupElement(g.clone())).collect();
        for (i, e) in elems.iter().enumerate() {
            group.index_of(e).map_err(|err| locate(&format!("{field}[{i}]"), err))?;
        }
        Subgroup::generated_by(group, &elems).map_err(|err| locate(field, err))
    }

    /// Group, chain and action, validated. Structural problems (wrong lengths,
    /// non-permutations, bad weights) are config errors; a non-free action or
    /// a broken chain is reported as is.
    pub fn build_setting(&self, tol: f64) -> Result<Setting> {
        let group = FiniteAbelianGroup::new(self.group.moduli.clone()).map_err(|e| locate("group.moduli", e))?;
        let gamma = self.subgroup(&group, &self.gamma, "gamma")?;
        let delta = self.subgroup(&group, &self.delta, "delta")?;
        let a = &self.action;
        let action = match (&a.regular, &a.generators) {
            (Some(reg), None) => {
                if let Some(p) = a.points {
                    if p != reg.orbits * group.order() {
                        return Err(config_error(
                            "action.points",
                            format!("{p} points do not match {} regular orbits", reg.orbits),
                        ));
                    }
                }
                ActionSpace::regular(&group, reg.orbits, a.weights.clone()).map_err(|e| locate("action.weights", e))?
            }
            (None, Some(gens)) => {
                let points = a
                    .points
                    .ok_or_else(|| config_error("action.points", "required with explicit generators"))?;
                ActionSpace::new(&group, points, a.weights.clone(), gens.clone()).map_err(|e| match e {
                    Error::NotPermutation { generator, .. } => locate(&format!("action.generators[{generator}]"), e),
                    Error::InvalidWeight { point, .. } => locate(&format!("action.weights[{point}]"), e),
                    Error::Dimension { .. } => locate("action.weights", e),
                    other => locate("action.generators", other),
                })?
            }
            _ => {
                return Err(config_error(
                    "action",
                    "give exactly one of `regular` or `generators`",
                ))
            }
        };
        Setting::new(gamma, delta, action)?.with_tolerance(tol)
    }

    /// The generating set of the configured subspace.
    pub fn subspace_generators(&self, s: &Setting, rng: &mut ChaCha8Rng) -> Result<(Vec<Vector>, ChainMember)> {
        let sub = self
            .subspace
            .as_ref()
            .ok_or_else(|| config_error("subspace", "this command needs a `subspace` section"))?;
        let mut gens = Vec::new();
        if let Some(list) = &sub.generators {
            for (i, g) in list.iter().enumerate() {
                if g.len() != s.points() {
                    return Err(config_error(
                        format!("subspace.generators[{i}]"),
                        format!("expected {} entries, found {}", s.points(), g.len()),
                    ));
                }
                gens.push(to_vector(g));
            }
        }
        for _ in 0..sub.random.unwrap_or(0) {
            gens.push(random_vector(rng, s.points()));
        }
        if sub.canonical {
            gens.push(canonical_generator(s)?);
        }
        if gens.is_empty() {
            return Err(config_error("subspace", "no generators: give `generators`, `random` or `canonical`"));
        }
        Ok((gens, sub.member.unwrap_or(ChainMember::Gamma)))
    }

    pub fn build_subspace(&self, s: &Setting, rng: &mut ChaCha8Rng) -> Result<(Subspace, Vec<Vector>)> {
        let (gens, member) = self.subspace_generators(s, rng)?;
        Ok((span_invariant(s, &gens, member)?, gens))
    }

    pub fn data_vectors(&self, s: &Setting, rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
        let data = self
            .data
            .as_ref()
            .ok_or_else(|| config_error("data", "this command needs a `data` section"))?;
        let mut out = Vec::new();
        if let Some(list) = &data.vectors {
            for (i, v) in list.iter().enumerate() {
                if v.len() != s.points() {
                    return Err(config_error(
                        format!("data.vectors[{i}]"),
                        format!("expected {} entries, found {}", s.points(), v.len()),
                    ));
                }
                out.push(to_vector(v));
            }
        }
        if let Some(csv) = &data.csv {
            let path = match &self.base_dir {
                Some(dir) if csv.is_relative() => dir.join(csv),
                _ => csv.clone(),
            };
            let file = std::fs::File::open(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let vectors = read_vectors_csv(file).map_err(|e| locate("data.csv", e))?;
            for v in vectors {
                if v.len() != s.points() {
                    return Err(config_error(
                        "data.csv",
                        format!("expected {} rows, found {}", s.points(), v.len()),
                    ));
                }
                out.push(v);
            }
        }
        for _ in 0..data.random.unwrap_or(0) {
            out.push(random_vector(rng, s.points()));
        }
        if out.is_empty() {
            return Err(config_error("data", "no data vectors"));
        }
        Ok(out)
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
