//! Small fixed configurations used by the demos and the test suites.
//!
//! The two continuous examples, shear and dilation on `R^2`, are represented by
//! finite surrogates that keep the combinatorics of the dual partition: each
//! unit interval of the dual picture `[0, |T/Gamma|)` becomes one dual point.
//!
//! * shear: `T = (1/6)Z`, `Gamma = Z`, `Delta = (1/2)Z` becomes
//!   `T = Z_6`, `Gamma = {0}`, `Delta = {0, 3}` with uniform weights (`J = 1`).
//! * dilation: `T = (1/4)Z`, `Gamma = Z`, `Delta = (1/2)Z` becomes
//!   `T = Z_4`, `Gamma = {0}`, `Delta = {0, 2}`, with weights growing by
//!   `2^{3/8}` per step along each orbit as the dilation Jacobian does.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::ActionSpace;
use crate::group::{FiniteAbelianGroup, GroupElement, Subgroup};
use crate::{Setting, Vector};

fn cyclic_subgroup(group: &FiniteAbelianGroup, gens: &[u64]) -> Subgroup {
    let gens: Vec<_> = gens.iter().map(|&g| GroupElement(vec![g % group.moduli()[0]])).collect();
    Subgroup::generated_by(group, &gens).expect("generator in range")
}

/// Regular action of `Z_n` on `orbits` copies of itself.
pub fn regular_cyclic(n: u64, gamma: &[u64], delta: &[u64], orbits: usize, mu: Option<Vec<f64>>) -> Setting {
    let group = FiniteAbelianGroup::cyclic(n).expect("positive modulus");
    let action = ActionSpace::regular(&group, orbits, mu).expect("valid regular action");
    Setting::new(
        cyclic_subgroup(&group, gamma),
        cyclic_subgroup(&group, delta),
        action,
    )
    .expect("valid chain")
}

fn shuffled(action: ActionSpace, seed: u64) -> ActionSpace {
    let mut relabel: Vec<usize> = (0..action.points()).collect();
    relabel.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    action.relabeled(&relabel).expect("bijection")
}

fn random_weights(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0.25..4.0)).collect()
}

/// `T = Z_12`, `Gamma = {0, 4, 8}`, `Delta = 2 Z_12`, one orbit, uniform weights.
pub fn z12_chain() -> Setting {
    regular_cyclic(12, &[4], &[2], 1, None)
}

/// The `Z_12` chain on two orbits with random weights and shuffled point labels.
pub fn z12_weighted() -> Setting {
    let group = FiniteAbelianGroup::cyclic(12).unwrap();
    let action = ActionSpace::regular(&group, 2, Some(random_weights(24, 1201))).unwrap();
    Setting::new(
        cyclic_subgroup(&group, &[4]),
        cyclic_subgroup(&group, &[2]),
        shuffled(action, 1202),
    )
    .unwrap()
}

pub fn shear() -> Setting {
    regular_cyclic(6, &[0], &[3], 2, None)
}

pub fn dilation() -> Setting {
    let step = 2f64.powf(3.0 / 8.0);
    let mu = (0..8).map(|x| step.powi((x % 4) as i32) * if x < 4 { 1.0 } else { 3.0 }).collect();
    regular_cyclic(4, &[0], &[2], 2, Some(mu))
}

/// `T = Z_8`, `Gamma = {0, 4}`, `Delta = 2 Z_8`, two weighted, shuffled orbits.
pub fn z8_weighted() -> Setting {
    let group = FiniteAbelianGroup::cyclic(8).unwrap();
    let action = ActionSpace::regular(&group, 2, Some(random_weights(16, 801))).unwrap();
    Setting::new(
        cyclic_subgroup(&group, &[4]),
        cyclic_subgroup(&group, &[2]),
        shuffled(action, 802),
    )
    .unwrap()
}

/// `T = Z_2 x Z_4`, `Gamma = <(0,2)>`, `Delta = <(1,0), (0,2)>`, two weighted orbits.
pub fn product_group() -> Setting {
    let group = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
    let gamma = Subgroup::generated_by(&group, &[GroupElement(vec![0, 2])]).unwrap();
    let delta = Subgroup::generated_by(&group, &[GroupElement(vec![1, 0]), GroupElement(vec![0, 2])]).unwrap();
    let action = ActionSpace::regular(&group, 2, Some(random_weights(16, 2401))).unwrap();
    Setting::new(gamma, delta, shuffled(action, 2402)).unwrap()
}

/// `T = Z_18`, `Gamma = 6 Z_18`, `Delta = 2 Z_18`: three blocks in the dual partition.
pub fn z18_three_blocks() -> Setting {
    let group = FiniteAbelianGroup::cyclic(18).unwrap();
    let action = ActionSpace::regular(&group, 1, Some(random_weights(18, 1801))).unwrap();
    Setting::new(
        cyclic_subgroup(&group, &[6]),
        cyclic_subgroup(&group, &[2]),
        shuffled(action, 1802),
    )
    .unwrap()
}

/// Every named scenario; three of them carry non-uniform weights.
pub fn all() -> Vec<Setting> {
    vec![
        z12_chain(),
        z12_weighted(),
        shear(),
        dilation(),
        z8_weighted(),
        product_group(),
        z18_three_blocks(),
    ]
}

pub fn by_name(name: &str) -> Option<Setting> {
    Some(match name {
        "z12" => z12_chain(),
        "z12-weighted" => z12_weighted(),
        "shear" => shear(),
        "dilation" => dilation(),
        "z8-weighted" => z8_weighted(),
        "product" => product_group(),
        "z18" => z18_three_blocks(),
        _ => return None,
    })
}

pub const NAMES: [&str; 7] = ["z12", "z12-weighted", "shear", "dilation", "z8-weighted", "product", "z18"];

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}
