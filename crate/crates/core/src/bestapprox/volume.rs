//! Riemannian volume of the circuit image and the covering lower bound.

use serde::Serialize;
use statrs::function::gamma::gamma;

use super::sobol::sobol_points;
use super::Domain;
use crate::circuit::ParametricCircuit;
use crate::dea::{s_matrix, TolerancePolicy};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quadrature {
    /// Periodic tensor trapezoid rule with this many nodes per coordinate.
    Trapezoid { nodes_per_dim: usize },
    /// Equal-weight quasi-Monte Carlo on Sobol' nodes.
    Sobol { nodes: usize, seed: Option<u64> },
}

impl Quadrature {
    pub fn default_for(dim: usize) -> Self {
        match dim {
            0 | 1 => Quadrature::Trapezoid { nodes_per_dim: 512 },
            2 => Quadrature::Trapezoid { nodes_per_dim: 128 },
            3 => Quadrature::Trapezoid { nodes_per_dim: 32 },
            _ => Quadrature::Sobol { nodes: 1 << 14, seed: None },
        }
    }

    fn nodes(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        match *self {
            Quadrature::Trapezoid { nodes_per_dim } => {
                if nodes_per_dim == 0 {
                    return Err(Error::Unsupported("zero quadrature nodes".into()));
                }
                let total = (nodes_per_dim as u64).checked_pow(dim as u32).filter(|t| *t <= 1 << 26);
                let Some(total) = total else {
                    return Err(Error::Unsupported(format!("{nodes_per_dim}^{dim} quadrature nodes")));
                };
                Ok((0..total)
                    .map(|mut i| {
                        let mut u = vec![0.0; dim];
                        for x in u.iter_mut().rev() {
                            *x = (i % nodes_per_dim as u64) as f64 / nodes_per_dim as f64;
                            i /= nodes_per_dim as u64;
                        }
                        u
                    })
                    .collect())
            }
            Quadrature::Sobol { nodes, seed } => {
                if nodes == 0 {
                    return Err(Error::Unsupported("zero quadrature nodes".into()));
                }
                sobol_points(dim, nodes, seed)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub volume: f64,
    pub nodes: usize,
    pub singular_nodes: usize,
}

/// `∫ √det S(θ) dθ` over the full roster on `domain^m`. Nodes where the S
/// matrix fails the tolerance test count as singular; if more than half are
/// singular the circuit is not minimal and [`Error::SingularMetric`] is
/// returned.
pub fn volume(c: &ParametricCircuit, domain: Domain, quad: Quadrature, tol: TolerancePolicy) -> Result<VolumeEstimate> {
    let m = c.num_params();
    if m == 0 {
        return Err(Error::Unsupported("volume of a circuit without parameters".into()));
    }
    let all: Vec<usize> = (0..m).collect();
    let nodes = quad.nodes(m)?;
    let mut sum = 0.0;
    let mut singular = 0;
    for u in &nodes {
        let theta: Vec<f64> = u.iter().map(|x| domain.lower + x * domain.width).collect();
        let s = s_matrix(c, &theta, &all)?;
        let ev = symmetric_eigenvalues(s.matrix());
        let lmax = *ev.last().expect("nonempty");
        if ev[0] <= tol.threshold(lmax) {
            singular += 1;
        }
        sum += ev.iter().map(|v| v.max(0.0)).product::<f64>().sqrt();
    }
    if 2 * singular > nodes.len() {
        return Err(Error::SingularMetric);
    }
    let volume = sum / nodes.len() as f64 * domain.width.powi(m as i32);
    Ok(VolumeEstimate { volume, nodes: nodes.len(), singular_nodes: singular })
}

/// Covering estimate `4 π^{m/2+1} / (Γ(m/2) · vol)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    /// The value exceeds 2, the diameter of the unit sphere, so it carries no
    /// information.
    pub flagged_exceeds_diameter: bool,
}

pub fn lower_bound(dim: usize, vol: f64) -> Result<LowerBound> {
    if dim == 0 || !(vol > 0.0) || !vol.is_finite() {
        return Err(Error::Unsupported(format!("lower bound for dim {dim}, volume {vol}")));
    }
    let m = dim as f64;
    let value = 4.0 * std::f64::consts::PI.powf(m / 2.0 + 1.0) / (gamma(m / 2.0) * vol);
    Ok(LowerBound { value, flagged_exceeds_diameter: value > 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use std::f64::consts::PI;

    #[test]
    fn single_rotation_volume() {
        let c = CircuitBuilder::new(1).rx(0, "a").build().unwrap();
        let v = volume(&c, Domain::default(), Quadrature::default_for(1), TolerancePolicy::default()).unwrap();
        assert!((v.volume - PI).abs() < 1e-12);
        assert_eq!(v.singular_nodes, 0);
    }

    #[test]
    fn non_minimal_circuit_is_singular() {
        let c = CircuitBuilder::new(1).rx(0, "a").rx(0, "b").build().unwrap();
        let r = volume(&c, Domain::default(), Quadrature::default_for(2), TolerancePolicy::default());
        assert_eq!(r, Err(Error::SingularMetric));
    }

    #[test]
    fn lower_bound_closed_forms() {
        let b = lower_bound(1, PI).unwrap();
        assert!((b.value - 4.0).abs() < 1e-12);
        assert!(b.flagged_exceeds_diameter);
        let b = lower_bound(2, 100.0).unwrap();
        assert!((b.value - 4.0 * PI * PI / 100.0).abs() < 1e-12);
        assert!(!b.flagged_exceeds_diameter);
        assert!(lower_bound(2, 0.0).is_err());
    }
}
