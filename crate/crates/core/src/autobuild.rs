//! Automatic construction of minimal, maximally expressive circuits for the
//! translation-invariant (`ω = 1`) sector.

use serde::Serialize;

use crate::circuit::{Angle, Bitstring, Gate, ParametricCircuit};
use crate::dea::{classify_parameters, random_theta, TolerancePolicy, Verdict};
use crate::error::{Error, Result};
use crate::pauli::{rotate_left, Generator, PauliString};
use crate::sectors::{equivalence_classes, orbit, sector_dimension, SectorSpec, Translation};
use crate::simulator::evolve;

pub const MAX_BUILD_QUBITS: usize = 16;
pub const MAX_VERIFY_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CanonicalRep {
    pub qubits: usize,
    /// Bit `q` is `B_q`.
    pub bits: u64,
    pub weight: u32,
    pub class_order: usize,
}

impl CanonicalRep {
    pub fn bitstring(&self) -> Bitstring {
        Bitstring { bits: self.bits, len: self.qubits }
    }

    pub fn is_all_ones(&self) -> bool {
        self.bits == (1u64 << self.qubits) - 1
    }
}

/// One representative per nonzero class: the smallest member with `B_0 = 1`
/// and `B_{Q-1} = 0`, or the all-ones string for its own class. Sorted by
/// (weight, integer value).
pub fn canonical_representatives(qubits: usize) -> Result<Vec<CanonicalRep>> {
    if qubits == 0 || qubits > MAX_BUILD_QUBITS {
        return Err(Error::Unsupported(format!("sector circuits for {qubits} qubits (max {MAX_BUILD_QUBITS})")));
    }
    let high = 1u64 << (qubits - 1);
    let all = (1u64 << qubits) - 1;
    let mut reps: Vec<CanonicalRep> = equivalence_classes(qubits)?
        .into_iter()
        .filter(|c| c.representative != 0)
        .map(|c| {
            let bits = if c.representative == all {
                all
            } else {
                *c.members
                    .iter()
                    .filter(|&&b| b & 1 == 1 && b & high == 0)
                    .min()
                    .expect("every non-constant class has a member of the form 0…1")
            };
            CanonicalRep { qubits, bits, weight: bits.count_ones(), class_order: c.order() }
        })
        .collect();
    reps.sort_by_key(|r| (r.weight, r.bits));
    Ok(reps)
}

fn x_string(qubits: usize, bits: u64) -> PauliString {
    PauliString::from_masks(qubits, bits, 0).expect("mask within range")
}

/// `Σ_j X^{τ^j B}` over the class of `B`.
pub fn build_x_gate(rep: &CanonicalRep) -> Result<Generator> {
    let t = Translation::new(rep.qubits)?;
    Generator::new(orbit(&t, rep.bits).into_iter().map(|b| x_string(rep.qubits, b)).collect())
}

/// `X^B` with the lowest-index `X` replaced by `Y`, summed over all
/// translations of that string so that the generator commutes with `τ`.
/// For aperiodic `B` this is one term per class member; periodic classes
/// (including all-ones) get `Q` terms because the `Y` breaks the period.
pub fn build_xy_gate(rep: &CanonicalRep) -> Result<Generator> {
    let low = rep.bits & rep.bits.wrapping_neg();
    let q = rep.qubits;
    let mut terms = Vec::with_capacity(q);
    let (mut x, mut z) = (rep.bits, low);
    for _ in 0..q {
        let p = PauliString::from_masks(q, x, z)?;
        if !terms.contains(&p) {
            terms.push(p);
        }
        x = rotate_left(x, q);
        z = rotate_left(z, q);
    }
    Generator::new(terms)
}

/// `Σ_q Z_q`.
pub fn build_z_gate(qubits: usize) -> Result<Generator> {
    Generator::new((0..qubits).map(|q| PauliString::from_masks(qubits, 0, 1u64 << q)).collect::<Result<_>>()?)
}

/// `R_{Z,Q}` followed by `R_{X^B}, R_{(X|Y)^B}` for every canonical
/// representative, acting on `|0…0⟩`. Parameters are named `z`, `x_<B>` and
/// `xy_<B>`.
pub fn build_sector_circuit(qubits: usize) -> Result<ParametricCircuit> {
    let mut gates = vec![Gate::Rotation { generator: build_z_gate(qubits)?, angle: Angle::Param("z".into()) }];
    for rep in canonical_representatives(qubits)? {
        let label = rep.bitstring().to_string();
        gates.push(Gate::Rotation { generator: build_x_gate(&rep)?, angle: Angle::Param(format!("x_{label}")) });
        gates.push(Gate::Rotation { generator: build_xy_gate(&rep)?, angle: Angle::Param(format!("xy_{label}")) });
    }
    ParametricCircuit::new(qubits, Bitstring::zeros(qubits), gates, Vec::new())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialCheck {
    pub theta: Vec<f64>,
    pub independent: usize,
    pub all_independent: bool,
    pub translation_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorVerification {
    #[serde(rename = "Q")]
    pub qubits: usize,
    pub parameters: usize,
    pub expected_dimension: usize,
    pub trials: Vec<TrialCheck>,
    pub passed: bool,
}

pub const TRANSLATION_TOLERANCE: f64 = 1e-10;

/// Runs DEA at `θ = 0` and at `trials` random points with cap equal to the
/// `ω = 1` sector dimension, and checks `‖τ·C(θ) − C(θ)‖` at each point.
pub fn verify_sector_circuit(c: &ParametricCircuit, trials: usize, seed: u64) -> Result<SectorVerification> {
    let qubits = c.qubits();
    if qubits > MAX_VERIFY_QUBITS {
        return Err(Error::Unsupported(format!("verification for {qubits} qubits (max {MAX_VERIFY_QUBITS})")));
    }
    let dim = sector_dimension(SectorSpec::new(qubits, 0)?);
    let n = c.num_params();
    let mut points = vec![vec![0.0; n]];
    points.extend((0..trials as u64).map(|t| random_theta(n, seed.wrapping_add(t))));
    let mut checks = Vec::with_capacity(points.len());
    for theta in points {
        let report = classify_parameters(c, &theta, TolerancePolicy::default(), Some(dim))?;
        let independent = report.verdicts.iter().filter(|v| **v == Verdict::Independent).count();
        let state = evolve(c, &theta)?;
        let residual = state.translate().distance(&state);
        checks.push(TrialCheck {
            theta,
            independent,
            all_independent: independent == n,
            translation_residual: residual,
        });
    }
    let passed = n == dim && checks.iter().all(|t| t.all_independent && t.translation_residual < TRANSLATION_TOLERANCE);
    Ok(SectorVerification { qubits, parameters: n, expected_dimension: dim, trials: checks, passed })
}

impl SectorVerification {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verification serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::derivative_state;
    use num_complex::Complex64;

    fn rep_strings(q: usize) -> Vec<String> {
        canonical_representatives(q).unwrap().iter().map(|r| r.bitstring().to_string()).collect()
    }

    fn term_strings(g: &Generator) -> Vec<String> {
        let mut v: Vec<String> = g.terms().iter().map(|t| t.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn representatives() {
        assert_eq!(rep_strings(3), ["001", "011", "111"]);
        assert_eq!(rep_strings(2), ["01", "11"]);
        assert_eq!(rep_strings(1), ["1"]);
        for q in 2..=8 {
            for r in canonical_representatives(q).unwrap() {
                if !r.is_all_ones() {
                    assert!(r.bits & 1 == 1 && r.bits >> (q - 1) == 0);
                }
            }
        }
    }

    #[test]
    fn gate_terms() {
        let reps = canonical_representatives(3).unwrap();
        assert_eq!(term_strings(&build_x_gate(&reps[0]).unwrap()), ["IIX", "IXI", "XII"]);
        assert_eq!(term_strings(&build_x_gate(&reps[2]).unwrap()), ["XXX"]);
        let b101 = CanonicalRep { qubits: 3, bits: 0b101, weight: 2, class_order: 3 };
        assert_eq!(term_strings(&build_xy_gate(&b101).unwrap()), ["IYX", "XIY", "YXI"]);
        assert_eq!(term_strings(&build_z_gate(3).unwrap()), ["IIZ", "IZI", "ZII"]);
        assert_eq!(term_strings(&build_z_gate(1).unwrap()), ["Z"]);
    }

    #[test]
    fn generators_are_translation_invariant() {
        for q in 1..=6 {
            let c = build_sector_circuit(q).unwrap();
            for k in 0..c.num_params() {
                assert!(c.generator_of_param(k).unwrap().is_translation_invariant());
            }
        }
    }

    #[test]
    fn parameter_counts() {
        for q in 1..=8 {
            let c = build_sector_circuit(q).unwrap();
            assert_eq!(c.num_params(), sector_dimension(SectorSpec::new(q, 0).unwrap()));
        }
        assert_eq!(
            build_sector_circuit(3).unwrap().roster(),
            ["z", "x_001", "xy_001", "x_011", "xy_011", "x_111", "xy_111"]
        );
    }

    #[test]
    fn x_gate_derivative_at_zero() {
        let c = build_sector_circuit(3).unwrap();
        let d = derivative_state(&c, &[0.0; 7], 3).unwrap();
        for (b, a) in d.amplitudes().iter().enumerate() {
            let want =
                if [0b011, 0b110, 0b101].contains(&b) { Complex64::new(0.0, -0.5) } else { Complex64::new(0.0, 0.0) };
            assert!((a - want).norm() < 1e-14, "{b}: {a}");
        }
    }

    #[test]
    fn verification_passes_and_detects_duplicates() {
        for q in 1..=3 {
            let c = build_sector_circuit(q).unwrap();
            assert!(verify_sector_circuit(&c, 2, 11).unwrap().passed, "Q = {q}");
        }
        let c = build_sector_circuit(2).unwrap();
        let mut gates = c.gates().to_vec();
        gates.push(Gate::Rotation { generator: build_z_gate(2).unwrap(), angle: Angle::Param("extra".into()) });
        let dup = ParametricCircuit::new(2, Bitstring::zeros(2), gates, Vec::new()).unwrap();
        let r = classify_parameters(&dup, &random_theta(6, 3), TolerancePolicy::default(), None).unwrap();
        assert_eq!(r.verdicts.last(), Some(&Verdict::Redundant));
        assert!(!verify_sector_circuit(&dup, 1, 1).unwrap().passed);
    }
}
