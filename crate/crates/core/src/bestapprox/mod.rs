//! Best-approximation error: how far the worst state of a state space lies
//! from the circuit image, estimated on a finite sample set `D`.
//!
//! `α^D = max_ψ min_j ‖ψ − C(θ_j)‖` in the chordal metric. When every image
//! point is within `ε` of `D`, `α^D − ε ≤ α ≤ α^D`.

pub mod alpha;
pub mod embed;
pub mod sobol;
pub mod volume;

use num_complex::Complex64;
use serde::Serialize;

pub use alpha::{covering_radius, CoveringRadius, Method, ProbeOptions};
pub use embed::{embed_states, gram_embed, real_gram, Embedding};
pub use sobol::{sobol_points, MAX_SOBOL_DIM};
pub use volume::{lower_bound, volume, LowerBound, Quadrature, VolumeEstimate};

use crate::circuit::ParametricCircuit;
use crate::error::{Error, Result};
use crate::sectors::{sector_basis, SectorSpec};
use crate::simulator::{evolve, inner, StateVector};

/// Per-coordinate parameter interval `[lower, lower + width)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub lower: f64,
    pub width: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Self { lower: 0.0, width: std::f64::consts::TAU }
    }
}

impl Domain {
    pub fn new(lower: f64, width: f64) -> Result<Self> {
        if !lower.is_finite() || !(width > 0.0) || !width.is_finite() {
            return Err(Error::Unsupported(format!("parameter domain [{lower}, {lower} + {width})")));
        }
        Ok(Self { lower, width })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    /// Tensor grid of cell midpoints with these spacings.
    Grid {
        spacings: Vec<f64>,
    },
    Sobol {
        seed: Option<u64>,
    },
    User,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub thetas: Vec<Vec<f64>>,
    pub states: Vec<StateVector<f64>>,
    pub provenance: Provenance,
}

impl SampleSet {
    pub fn from_thetas(c: &ParametricCircuit, thetas: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(c, thetas, Provenance::User)
    }

    fn build(c: &ParametricCircuit, thetas: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        let states = thetas.iter().map(|t| evolve(c, t)).collect::<Result<_>>()?;
        Ok(Self { thetas, states, provenance })
    }

    /// Midpoints of a tensor grid with `per_dim[k]` cells along coordinate `k`;
    /// the last coordinate varies fastest.
    pub fn grid(c: &ParametricCircuit, per_dim: &[usize], domain: Domain) -> Result<Self> {
        if per_dim.len() != c.num_params() {
            return Err(Error::RosterMismatch { expected: c.num_params(), got: per_dim.len() });
        }
        if per_dim.contains(&0) {
            return Err(Error::EmptySampleSet);
        }
        let spacings: Vec<f64> = per_dim.iter().map(|n| domain.width / *n as f64).collect();
        let total: usize = per_dim.iter().product();
        let thetas = (0..total)
            .map(|mut i| {
                let mut t = vec![0.0; per_dim.len()];
                for k in (0..per_dim.len()).rev() {
                    t[k] = domain.lower + ((i % per_dim[k]) as f64 + 0.5) * spacings[k];
                    i /= per_dim[k];
                }
                t
            })
            .collect();
        Self::build(c, thetas, Provenance::Grid { spacings })
    }

    /// First `n` points of the (optionally scrambled) Sobol' sequence.
    pub fn sobol(c: &ParametricCircuit, n: usize, seed: Option<u64>, domain: Domain) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySampleSet);
        }
        let thetas = sobol_points(c.num_params(), n, seed)?
            .into_iter()
            .map(|u| u.into_iter().map(|x| domain.lower + x * domain.width).collect())
            .collect();
        Self::build(c, thetas, Provenance::Sobol { seed })
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

/// Bound `‖∂_k C‖ ≤ (terms in G_k)/2` for every roster parameter.
pub fn lipschitz_constants(c: &ParametricCircuit) -> Result<Vec<f64>> {
    (0..c.num_params()).map(|k| Ok(c.generator_of_param(k)?.terms().len() as f64 / 2.0)).collect()
}

/// Certified density of `D` in the circuit image. Grids use the worst case
/// within a cell, `½ Σ_k h_k L_k`; other sample sets need a dispersion bound
/// `δ` (every parameter point within Euclidean distance `δ` of a sample),
/// giving `δ·‖L‖`.
pub fn epsilon_density(c: &ParametricCircuit, set: &SampleSet, dispersion: Option<f64>) -> Result<f64> {
    let l = lipschitz_constants(c)?;
    match (&set.provenance, dispersion) {
        (Provenance::Grid { spacings }, _) => Ok(0.5 * spacings.iter().zip(&l).map(|(h, lk)| h * lk).sum::<f64>()),
        (_, Some(delta)) if delta >= 0.0 => Ok(delta * l.iter().map(|x| x * x).sum::<f64>().sqrt()),
        _ => Err(Error::MissingDensityBound("sample set is not a grid and no dispersion bound was given".into())),
    }
}

/// State space in which the worst-approximated state is sought.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpace {
    /// Unit sphere of the real span of the sample states.
    SampleSpan,
    /// Unit sphere of the whole register, real dimension `2^{Q+1}`.
    Full,
    /// Unit sphere of a translation sector.
    Sector(SectorSpec),
}

pub const SECTOR_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Largest norm of the component of any state outside the sector.
pub fn sector_residual(states: &[StateVector<f64>], spec: SectorSpec) -> Result<f64> {
    let basis = sector_basis(spec)?;
    let mut worst = 0.0f64;
    for s in states {
        if s.qubits() != spec.qubits {
            return Err(Error::LengthMismatch { expected: spec.qubits, got: s.qubits() });
        }
        let inside: f64 = basis.iter().map(|e| inner(e, s).map(|z: Complex64| z.norm_sqr())).sum::<Result<f64>>()?;
        worst = worst.max((s.norm() * s.norm() - inside).max(0.0).sqrt());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaEstimate {
    pub alpha_hat: f64,
    pub epsilon: Option<f64>,
    pub lower: Option<f64>,
    pub method: &'static str,
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    /// Real dimension of the ambient space whose unit sphere was searched.
    pub ambient_dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound_formula: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flagged_exceeds_diameter: Option<bool>,
}

impl AlphaEstimate {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self.lower = Some(self.alpha_hat - epsilon);
        self
    }

    pub fn with_lower_bound(mut self, vol: f64, bound: LowerBound) -> Self {
        self.volume = Some(vol);
        self.lower_bound_formula = Some(bound.value);
        self.flagged_exceeds_diameter = Some(bound.flagged_exceeds_diameter);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }
}

/// `α^D` from an embedding whose points lie on the unit sphere of a space of
/// real dimension `ambient` (`None` for the span of the points themselves).
/// If the points span less than the ambient space, one extra orthogonal
/// direction is enough to realize the optimum.
pub fn alpha_from_embedding(emb: &Embedding, ambient: Option<usize>, opts: &ProbeOptions) -> Result<AlphaEstimate> {
    if emb.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let r = emb.rank;
    let ambient = ambient.unwrap_or(r);
    let n = if r >= ambient { r } else { r + 1 };
    let cov = covering_radius(&emb.coordinates, n, opts)?;
    Ok(AlphaEstimate {
        alpha_hat: cov.value,
        epsilon: None,
        lower: None,
        method: cov.method.name(),
        samples: emb.len(),
        probes: cov.probes,
        vertex_count: cov.vertices,
        ambient_dimension: ambient,
        volume: None,
        lower_bound_formula: None,
        flagged_exceeds_diameter: None,
    })
}

/// `α^D` for the sample states of `set` in `space`.
pub fn alpha_hat(set: &SampleSet, space: StateSpace, opts: &ProbeOptions) -> Result<AlphaEstimate> {
    if set.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let qubits = set.states[0].qubits();
    let ambient = match space {
        StateSpace::SampleSpan => None,
        StateSpace::Full => Some(1usize << (qubits + 1)),
        StateSpace::Sector(spec) => {
            let residual = sector_residual(&set.states, spec)?;
            if residual > SECTOR_RESIDUAL_TOLERANCE {
                return Err(Error::OutsideSector(residual));
            }
            Some(sector_basis(spec)?.len() * 2)
        }
    };
    alpha_from_embedding(&embed_states(&set.states)?, ambient, opts)
}

/// `α^D` together with the certified `ε` when one is available.
pub fn estimate(
    c: &ParametricCircuit,
    set: &SampleSet,
    space: StateSpace,
    opts: &ProbeOptions,
    dispersion: Option<f64>,
) -> Result<AlphaEstimate> {
    let est = alpha_hat(set, space, opts)?;
    Ok(match epsilon_density(c, set, dispersion) {
        Ok(eps) => est.with_epsilon(eps),
        Err(Error::MissingDensityBound(_)) => est,
        Err(e) => return Err(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::pauli::Generator;
    use std::f64::consts::PI;

    #[test]
    fn grid_midpoints_and_epsilon() {
        let c = CircuitBuilder::new(1).rx(0, "a").build().unwrap();
        let set = SampleSet::grid(&c, &[4], Domain::default()).unwrap();
        let t: Vec<f64> = set.thetas.iter().map(|t| t[0]).collect();
        assert_eq!(t, [PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0, 7.0 * PI / 4.0]);
        let h = PI / 2.0;
        assert!((epsilon_density(&c, &set, None).unwrap() - h / 4.0).abs() < 1e-15);

        let c2 = CircuitBuilder::new(1).rx(0, "a").rz(0, "b").build().unwrap();
        let set2 = SampleSet::grid(&c2, &[4, 4], Domain::default()).unwrap();
        assert!((epsilon_density(&c2, &set2, None).unwrap() - h / 2.0).abs() < 1e-15);
        let sob = SampleSet::sobol(&c2, 16, Some(1), Domain::default()).unwrap();
        assert!(matches!(epsilon_density(&c2, &sob, None), Err(Error::MissingDensityBound(_))));
    }

    #[test]
    fn multi_term_generators_raise_the_lipschitz_constant() {
        let g = Generator::new(vec!["XI".parse().unwrap(), "IX".parse().unwrap()]).unwrap();
        let c = CircuitBuilder::new(2).rotation(g, "a").build().unwrap();
        assert_eq!(lipschitz_constants(&c).unwrap(), [1.0]);
    }

    #[test]
    fn single_sample_on_full_sphere() {
        let c = CircuitBuilder::new(1).rx(0, "a").build().unwrap();
        let set = SampleSet::from_thetas(&c, vec![vec![0.0]]).unwrap();
        let est = alpha_hat(&set, StateSpace::Full, &ProbeOptions::default()).unwrap();
        assert!((est.alpha_hat - 2.0).abs() < 1e-12);
        assert_eq!(est.ambient_dimension, 4);
    }

    #[test]
    fn sector_membership_is_checked() {
        let c = CircuitBuilder::new(2).rx(0, "a").build().unwrap();
        let set = SampleSet::from_thetas(&c, vec![vec![1.0]]).unwrap();
        let spec = SectorSpec::new(2, 0).unwrap();
        assert!(matches!(
            alpha_hat(&set, StateSpace::Sector(spec), &ProbeOptions::default()),
            Err(Error::OutsideSector(_))
        ));
    }
}
