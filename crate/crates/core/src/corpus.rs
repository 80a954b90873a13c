//! Seeded test corpora for the axiom harness.
//!
//! Random elements are drawn from a class where the perturbation is too soft
//! to create critical points: with `Σ 6|a|/R² < 2` the Hessian of `q_h` keeps
//! one positive and one negative eigenvalue everywhere, so the origin's saddle
//! is the only critical point and its value is the selector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axioms::Hamiltonian;
use crate::field::{Bump, PerturbedQuadratic};
use crate::fixtures;

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_RANDOM: usize = 50;
pub const DEFAULT_LIPSCHITZ_PAIRS: usize = 100;
pub const DEFAULT_MONOTONE_PAIRS: usize = 50;

/// Upper bound on `Σ 6|a|/R²` for the soft class.
pub const SOFT_BUDGET: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub seed: u64,
    pub elements: Vec<Hamiltonian>,
    /// Index of the non-positive origin-covering element.
    #[serde(default)]
    pub witness: Option<usize>,
    #[serde(default)]
    pub lipschitz_pairs: Vec<(Hamiltonian, Hamiltonian)>,
    /// `(h0, h1)` with `h0 ≤ h1` pointwise.
    #[serde(default)]
    pub monotone_pairs: Vec<(Hamiltonian, Hamiltonian)>,
    /// Elements on which shift, scaling and reflection are checked.
    #[serde(default)]
    pub property_elements: Vec<usize>,
}

/// `Σ 6|a|/R²`, the softness measure of a perturbation.
pub fn softness(h: &PerturbedQuadratic) -> f64 {
    h.bumps.iter().map(|b| 6.0 * b.amplitude.abs() / (b.radius * b.radius)).sum()
}

pub fn is_soft(h: &PerturbedQuadratic) -> bool {
    softness(h) < SOFT_BUDGET
}

/// A bump with random centre and radius whose softness contribution is `budget`.
fn random_bump<R: Rng>(rng: &mut R, budget: f64, sign: f64) -> Bump {
    let center = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
    let radius = rng.gen_range(0.3..0.9);
    Bump { center, amplitude: sign * budget * radius * radius / 6.0, radius }
}

fn random_sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// One to three bumps with total softness in `[0.3, 1.5]`.
pub fn random_soft<R: Rng>(rng: &mut R) -> PerturbedQuadratic {
    let n = rng.gen_range(1..=3);
    let total = rng.gen_range(0.3..1.5);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let sum: f64 = weights.iter().sum();
    let bumps = weights
        .iter()
        .map(|w| {
            let sign = random_sign(rng);
            random_bump(rng, total * w / sum, sign)
        })
        .collect();
    PerturbedQuadratic { bumps, offset: 0.0 }
}

/// Structured elements: `q` itself, the non-positive origin bump, and the two figure models.
pub fn structured() -> Vec<PerturbedQuadratic> {
    vec![
        PerturbedQuadratic::zero(),
        fixtures::negative_origin_bump(),
        fixtures::fig2_saddle(),
        fixtures::fig3_nose().model,
    ]
}

/// A small perturbation whose softness is at most `budget`.
fn small_bump<R: Rng>(rng: &mut R, budget: f64) -> Bump {
    let b = rng.gen_range(0.2..1.0) * budget;
    let sign = random_sign(rng);
    random_bump(rng, b, sign)
}

impl Corpus {
    pub fn toy(&self, i: usize) -> Option<&PerturbedQuadratic> {
        match self.elements.get(i) {
            Some(Hamiltonian::Toy(h)) => Some(h),
            _ => None,
        }
    }

    /// Builds pairs and property indices for a list of elements.
    ///
    /// Lipschitz pairs: every element perturbed by a small bump, then random
    /// index pairs up to `n_lipschitz`. Monotone pairs: soft elements raised
    /// by a non-negative bump that keeps them soft.
    pub fn from_elements(elements: Vec<Hamiltonian>, seed: u64, n_lipschitz: usize, n_monotone: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let witness = elements.iter().position(|e| match e {
            Hamiltonian::Toy(h) => is_origin_witness(h),
            _ => false,
        });
        let toys: Vec<(usize, &PerturbedQuadratic)> = elements
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e {
                Hamiltonian::Toy(h) => Some((i, h)),
                _ => None,
            })
            .collect();
        let mut lipschitz = Vec::new();
        for &(_, h) in &toys {
            if lipschitz.len() >= n_lipschitz {
                break;
            }
            let room = if is_soft(h) { 0.5 * (SOFT_BUDGET - softness(h)) } else { 0.25 };
            let p = h.with_bump(small_bump(&mut rng, room.min(0.25)));
            lipschitz.push((Hamiltonian::Toy(h.clone()), Hamiltonian::Toy(p)));
        }
        if elements.len() >= 2 {
            while lipschitz.len() < n_lipschitz {
                let i = rng.gen_range(0..elements.len());
                let j = rng.gen_range(0..elements.len());
                if i != j && elements[i].same_kind(&elements[j]) {
                    lipschitz.push((elements[i].clone(), elements[j].clone()));
                }
            }
        }
        let soft: Vec<&PerturbedQuadratic> = toys.iter().map(|(_, h)| *h).filter(|h| is_soft(h) && !h.bumps.is_empty()).collect();
        let mut monotone = Vec::new();
        for k in 0..n_monotone {
            let Some(h) = soft.get(k % soft.len().max(1)) else { break };
            let room = 0.9 * (SOFT_BUDGET - softness(h));
            let budget = rng.gen_range(0.2..1.0) * room;
            let b = random_bump(&mut rng, budget, 1.0);
            monotone.push((Hamiltonian::Toy((*h).clone()), Hamiltonian::Toy(h.with_bump(b))));
        }
        let mut property_elements: Vec<usize> = toys.iter().filter(|(_, h)| !is_soft(h) || h.bumps.is_empty()).map(|(i, _)| *i).collect();
        property_elements.extend(toys.iter().filter(|(_, h)| is_soft(h) && !h.bumps.is_empty()).map(|(i, _)| *i).take(6));
        property_elements.sort_unstable();
        Self { seed, elements, witness, lipschitz_pairs: lipschitz, monotone_pairs: monotone, property_elements }
    }
}

/// Non-positive, non-zero, and strictly negative on a disk around the origin.
pub fn is_origin_witness(h: &PerturbedQuadratic) -> bool {
    !h.bumps.is_empty()
        && h.offset == 0.0
        && h.bumps.iter().all(|b| b.amplitude <= 0.0)
        && h.bumps.iter().any(|b| b.amplitude < 0.0 && b.covers(crate::field::Point::zeros()))
}

/// `n` random soft elements drawn with ChaCha8 from `seed`.
pub fn random_corpus(seed: u64, n: usize) -> Vec<PerturbedQuadratic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_soft(&mut rng)).collect()
}

/// Structured elements followed by `DEFAULT_RANDOM` soft ones, with default pair counts.
pub fn default_corpus(seed: u64) -> Corpus {
    // the witness sits at index 1
    let mut elements: Vec<Hamiltonian> = structured().into_iter().map(Hamiltonian::Toy).collect();
    elements.extend(random_corpus(seed, DEFAULT_RANDOM).into_iter().map(Hamiltonian::Toy));
    Corpus::from_elements(elements, seed, DEFAULT_LIPSCHITZ_PAIRS, DEFAULT_MONOTONE_PAIRS)
}

/// The radial profiles `f`, `f₊`, `f₋` with the pairs `(f, f₊)` and `(f, f₋)`.
pub fn fig1_corpus() -> Corpus {
    let f = Hamiltonian::Radial(fixtures::fig1_f());
    let plus = Hamiltonian::Radial(fixtures::fig1_f_plus());
    let minus = Hamiltonian::Radial(fixtures::fig1_f_minus());
    Corpus {
        seed: 0,
        elements: vec![f.clone(), plus.clone(), minus.clone()],
        witness: None,
        lipschitz_pairs: vec![(f.clone(), plus), (f, minus)],
        monotone_pairs: Vec::new(),
        property_elements: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        assert_eq!(default_corpus(7), default_corpus(7));
        assert_ne!(random_corpus(7, 3), random_corpus(8, 3));
    }

    #[test]
    fn default_shape() {
        let c = default_corpus(DEFAULT_SEED);
        assert_eq!(c.elements.len(), 4 + DEFAULT_RANDOM);
        assert_eq!(c.witness, Some(1));
        assert_eq!(c.lipschitz_pairs.len(), DEFAULT_LIPSCHITZ_PAIRS);
        assert_eq!(c.monotone_pairs.len(), DEFAULT_MONOTONE_PAIRS);
        for e in &c.elements[4..] {
            let Hamiltonian::Toy(h) = e else { panic!() };
            assert!(is_soft(h));
        }
        for (a, b) in &c.monotone_pairs {
            let (Hamiltonian::Toy(a), Hamiltonian::Toy(b)) = (a, b) else { panic!() };
            assert!(is_soft(b));
            assert_eq!(b.bumps[..a.bumps.len()], a.bumps[..]);
            assert!(b.bumps.len() == a.bumps.len() + 1 && b.bumps.last().unwrap().amplitude > 0.0);
        }
    }
}
