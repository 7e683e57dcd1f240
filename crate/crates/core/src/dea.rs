//! Dimensional expressivity analysis: S matrices, inductive parameter
//! classification, the row-echelon alternative and symmetry removal.
//!
//! The real partial Jacobian is never formed. Its Gram matrix
//! `S[m][n] = Re⟨∂_m C, ∂_n C⟩` carries the same rank information, and the
//! real part of the complex inner product is the dot product of the
//! realified derivative columns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Angle, Gate, ParametricCircuit};
use crate::error::{Error, Result};
use crate::linalg::{rref_pivots, symmetric_eigenvalues, Matrix};
use crate::scalar::Real;
use crate::simulator::{derivative_state, inner, StateVector};

/// Invertibility threshold: `λ_min > max(abs, rel·λ_max)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub abs: f64,
    pub rel: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-9 }
    }
}

impl TolerancePolicy {
    pub fn threshold<T: Real>(&self, lambda_max: T) -> T {
        T::lit(self.abs).max(T::lit(self.rel) * lambda_max)
    }
}

/// Real symmetric Gram matrix of derivative states over an ordered subset of
/// roster indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix<T> {
    params: Vec<usize>,
    matrix: Matrix<T>,
}

impl<T: Real> SMatrix<T> {
    pub fn from_matrix(params: Vec<usize>, matrix: Matrix<T>) -> Self {
        assert_eq!(params.len(), matrix.dim());
        Self { params, matrix }
    }

    /// Roster indices labelling rows and columns.
    pub fn params(&self) -> &[usize] {
        &self.params
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.matrix[(i, j)]
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        symmetric_eigenvalues(&self.matrix)
    }
}

fn check_subset(c: &ParametricCircuit, subset: &[usize]) -> Result<()> {
    for (i, &k) in subset.iter().enumerate() {
        if k >= c.num_params() {
            return Err(Error::InvalidSubset(format!("index {k} outside roster of {}", c.num_params())));
        }
        if subset[..i].contains(&k) {
            return Err(Error::InvalidSubset(format!("index {k} repeated")));
        }
    }
    Ok(())
}

/// Gram matrix of already computed derivative states.
pub fn gram_of_states<T: Real>(states: &[StateVector<T>]) -> Result<Matrix<T>> {
    let n = states.len();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = inner(&states[i], &states[j])?.re;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// `S[i][j] = Re⟨∂_{subset[i]} C(θ), ∂_{subset[j]} C(θ)⟩`.
pub fn s_matrix<T: Real>(c: &ParametricCircuit, theta: &[T], subset: &[usize]) -> Result<SMatrix<T>> {
    c.check_assignment(theta)?;
    check_subset(c, subset)?;
    let states = subset.iter().map(|&k| derivative_state(c, theta, k)).collect::<Result<Vec<_>>>()?;
    Ok(SMatrix { params: subset.to_vec(), matrix: gram_of_states(&states)? })
}

/// `(λ_min, λ_second)`; the second is `None` for a 1×1 matrix.
pub fn smallest_two_eigenvalues<T: Real>(s: &SMatrix<T>) -> (T, Option<T>) {
    let ev = s.eigenvalues();
    (ev[0], ev.get(1).copied())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Independent,
    Redundant,
}

/// Eigenvalue data recorded while testing one parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Roster index of the parameter under test.
    pub param: usize,
    /// Size of the S matrix (independent set so far plus the candidate).
    pub size: usize,
    pub lambda_min: f64,
    pub lambda_second: Option<f64>,
    pub lambda_min_std: Option<f64>,
    pub lambda_second_std: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub names: Vec<String>,
    pub verdicts: Vec<Verdict>,
    /// One entry per roster parameter; `None` once the cap stopped the analysis.
    pub steps: Vec<Option<StepRecord>>,
    pub cap: Option<usize>,
    pub tolerance: TolerancePolicy,
    pub theta: Vec<f64>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
}

impl ClassificationReport {
    pub fn independent(&self) -> Vec<usize> {
        self.verdicts.iter().enumerate().filter(|(_, v)| **v == Verdict::Independent).map(|(i, _)| i).collect()
    }

    pub fn redundant(&self) -> Vec<usize> {
        self.verdicts.iter().enumerate().filter(|(_, v)| **v == Verdict::Redundant).map(|(i, _)| i).collect()
    }

    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            parameters: self
                .names
                .iter()
                .zip(&self.verdicts)
                .zip(&self.steps)
                .map(|((name, verdict), step)| ParamDoc {
                    name: name.clone(),
                    verdict: *verdict,
                    lambda_min: step.as_ref().map(|s| s.lambda_min),
                    lambda_second: step.as_ref().and_then(|s| s.lambda_second),
                    lambda_min_std: step.as_ref().and_then(|s| s.lambda_min_std),
                    lambda_second_std: step.as_ref().and_then(|s| s.lambda_second_std),
                })
                .collect(),
            cap: self.cap,
            tolerance: self.tolerance,
            theta: self.theta.clone(),
            seed: self.seed,
            shots: self.shots,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
struct ParamDoc {
    name: String,
    verdict: Verdict,
    lambda_min: Option<f64>,
    lambda_second: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_min_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_second_std: Option<f64>,
}

#[derive(Serialize)]
struct ReportDoc {
    parameters: Vec<ParamDoc>,
    cap: Option<usize>,
    tolerance: TolerancePolicy,
    theta: Vec<f64>,
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
}

/// Real dimension of the tangent space of the device state sphere.
pub fn sphere_dimension(qubits: usize) -> usize {
    (1usize << (qubits + 1)) - 1
}

/// Inductive fold over a full derivative Gram matrix. `decide` receives the
/// S matrix over the current independent set plus the candidate, and returns
/// whether the candidate is independent together with its step record.
pub(crate) fn inductive_fold(
    n: usize,
    cap: usize,
    mut decide: impl FnMut(&[usize]) -> Result<(bool, StepRecord)>,
) -> Result<(Vec<Verdict>, Vec<Option<StepRecord>>)> {
    let mut independent: Vec<usize> = Vec::new();
    let mut verdicts = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    for k in 0..n {
        if independent.len() >= cap {
            verdicts.push(Verdict::Redundant);
            steps.push(None);
            continue;
        }
        let mut candidate = independent.clone();
        candidate.push(k);
        let (is_independent, record) = decide(&candidate)?;
        if is_independent {
            independent.push(k);
            verdicts.push(Verdict::Independent);
        } else {
            verdicts.push(Verdict::Redundant);
        }
        steps.push(Some(record));
    }
    Ok((verdicts, steps))
}

/// Classifies every roster parameter as independent or redundant at `θ`.
///
/// Parameters are visited in roster order; a parameter is independent when the
/// smallest eigenvalue of S over (independent set ∪ {k}) exceeds the tolerance.
/// Once `cap` parameters are independent the rest are redundant without
/// further checks.
pub fn classify_parameters<T: Real>(
    c: &ParametricCircuit,
    theta: &[T],
    tol: TolerancePolicy,
    cap: Option<usize>,
) -> Result<ClassificationReport> {
    c.check_assignment(theta)?;
    let all: Vec<usize> = (0..c.num_params()).collect();
    let full = s_matrix(c, theta, &all)?;
    let (verdicts, steps) = inductive_fold(c.num_params(), cap.unwrap_or(usize::MAX), |idx| {
        let sub = full.matrix.select(idx);
        let ev = symmetric_eigenvalues(&sub);
        let lmax = *ev.last().expect("nonempty");
        let independent = ev[0] > tol.threshold(lmax);
        Ok((
            independent,
            StepRecord {
                param: *idx.last().expect("nonempty"),
                size: idx.len(),
                lambda_min: ev[0].as_f64(),
                lambda_second: ev.get(1).map(|v| v.as_f64()),
                lambda_min_std: None,
                lambda_second_std: None,
            },
        ))
    })?;
    Ok(ClassificationReport {
        names: c.roster().to_vec(),
        verdicts,
        steps,
        cap,
        tolerance: tol,
        theta: theta.iter().map(|t| t.as_f64()).collect(),
        seed: None,
        shots: None,
    })
}

/// Pivot columns (positions within `s`) of the reduced row echelon form of a
/// full S matrix. The pivot threshold is `max(abs, rel·max|S|)`.
pub fn rref_classification<T: Real>(s: &SMatrix<T>, tol: TolerancePolicy) -> Vec<usize> {
    let pivot_tol = tol.threshold(s.matrix.max_abs());
    rref_pivots(&s.matrix, pivot_tol)
}

/// Distance kept between random parameters and the non-generic points 0, π, 2π.
pub const NON_GENERIC_MARGIN: f64 = 1e-3;

/// Uniform draw from `[0, 2π)^n` avoiding small neighbourhoods of 0, π and 2π.
pub fn random_theta(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_pi = std::f64::consts::TAU;
    let pi = std::f64::consts::PI;
    (0..n)
        .map(|_| loop {
            let t: f64 = rng.gen_range(0.0..two_pi);
            if [0.0, pi, two_pi].iter().all(|p| (t - p).abs() > NON_GENERIC_MARGIN) {
                break t;
            }
        })
        .collect()
}

/// Value assigned to parameters removed from a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FreezePolicy {
    /// Keep the value the parameter had at the analysis point.
    #[default]
    CurrentValue,
    /// Set to zero, which removes the gate.
    Zero,
}

/// Returns a copy of `c` with the listed roster parameters replaced by fixed
/// angles. Rotations frozen at exactly zero are dropped.
pub fn freeze_parameters(c: &ParametricCircuit, frozen: &[(usize, f64)]) -> Result<ParametricCircuit> {
    let gate_params = c.gate_params();
    let mut gates = Vec::with_capacity(c.gates().len());
    for (i, g) in c.gates().iter().enumerate() {
        let hit = gate_params[i].and_then(|k| frozen.iter().find(|(f, _)| *f == k));
        match (g, hit) {
            (Gate::Rotation { .. }, Some((_, v))) if *v == 0.0 => {}
            (Gate::Rotation { generator, .. }, Some((_, v))) => {
                gates.push(Gate::Rotation { generator: generator.clone(), angle: Angle::Fixed(*v) })
            }
            _ => gates.push(g.clone()),
        }
    }
    let frozen_names: Vec<&str> = frozen.iter().map(|(k, _)| c.roster()[*k].as_str()).collect();
    let symmetry = c.symmetry_params().iter().filter(|s| !frozen_names.contains(&s.as_str())).cloned().collect();
    ParametricCircuit::new(c.qubits(), c.init(), gates, symmetry)
}

/// Removes parameters that only generate an unwanted symmetry.
///
/// `phi0` gives the values of the symmetry parameters that recover the
/// original circuit, `theta` the values of the remaining parameters in roster
/// order. The classification runs with the symmetry parameters first; every
/// symmetry parameter is frozen to `phi0` and every redundant parameter
/// according to `freeze`.
pub fn remove_symmetry<T: Real>(
    c: &ParametricCircuit,
    phi0: &[f64],
    theta: &[T],
    tol: TolerancePolicy,
    freeze: FreezePolicy,
) -> Result<(ParametricCircuit, ClassificationReport)> {
    let n_sym = c.symmetry_params().len();
    if n_sym == 0 {
        return Err(Error::MissingSymmetry);
    }
    if phi0.len() != n_sym {
        return Err(Error::LengthMismatch { expected: n_sym, got: phi0.len() });
    }
    if theta.len() != c.num_params() - n_sym {
        return Err(Error::RosterMismatch { expected: c.num_params() - n_sym, got: theta.len() });
    }
    let point: Vec<T> = phi0.iter().map(|&p| T::lit(p)).chain(theta.iter().copied()).collect();
    let report = classify_parameters(c, &point, tol, None)?;
    let mut frozen: Vec<(usize, f64)> = (0..n_sym).map(|k| (k, phi0[k])).collect();
    for k in report.redundant() {
        if k < n_sym {
            continue;
        }
        let v = match freeze {
            FreezePolicy::CurrentValue => point[k].as_f64(),
            FreezePolicy::Zero => 0.0,
        };
        frozen.push((k, v));
    }
    Ok((freeze_parameters(c, &frozen)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use approx::assert_abs_diff_eq;

    fn minimal() -> ParametricCircuit {
        CircuitBuilder::new(1).rx(0, "t1").rz(0, "t2").build().unwrap()
    }

    fn reducible() -> ParametricCircuit {
        CircuitBuilder::new(1).rx(0, "t1").rx(0, "t2").build().unwrap()
    }

    #[test]
    fn s_matrix_examples() {
        let s = s_matrix(&minimal(), &[0.9, 2.3], &[0, 1]).unwrap();
        assert_abs_diff_eq!(s.get(0, 0), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(s.get(0, 1), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.get(1, 1), 0.25, epsilon = 1e-15);

        let s = s_matrix(&reducible(), &[0.9, 2.3], &[0, 1]).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_abs_diff_eq!(s.get(i, j), 0.25, epsilon = 1e-15);
        }
        let s = s_matrix(&reducible(), &[0.9, 2.3], &[1]).unwrap();
        assert_abs_diff_eq!(s.get(0, 0), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn invalid_subsets() {
        assert!(matches!(s_matrix(&minimal(), &[0.1, 0.2], &[0, 0]), Err(Error::InvalidSubset(_))));
        assert!(matches!(s_matrix(&minimal(), &[0.1, 0.2], &[2]), Err(Error::InvalidSubset(_))));
    }

    #[test]
    fn two_smallest_eigenvalues() {
        let one = SMatrix::from_matrix(vec![0], Matrix::from_rows(&[vec![0.25]]));
        assert_eq!(smallest_two_eigenvalues(&one), (0.25, None));
        let rank1 = SMatrix::from_matrix(vec![0, 1], Matrix::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]));
        let (a, b) = smallest_two_eigenvalues(&rank1);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.unwrap(), 0.5, epsilon = 1e-15);
        let diag = SMatrix::from_matrix(vec![0, 1], Matrix::from_rows(&[vec![0.25, 0.0], vec![0.0, 0.25]]));
        assert_eq!(smallest_two_eigenvalues(&diag), (0.25, Some(0.25)));
    }

    #[test]
    fn classification_examples() {
        let tol = TolerancePolicy::default();
        let r = classify_parameters(&minimal(), &[0.9, 2.3], tol, None).unwrap();
        assert_eq!(r.verdicts, vec![Verdict::Independent; 2]);
        let r = classify_parameters(&reducible(), &[0.9, 2.3], tol, None).unwrap();
        assert_eq!(r.verdicts, vec![Verdict::Independent, Verdict::Redundant]);
    }

    #[test]
    fn cap_stops_early() {
        let c = CircuitBuilder::new(1).rz(0, "a").rx(0, "b").rz(0, "c").ry(0, "d").build().unwrap();
        let theta = random_theta(4, 3);
        let r = classify_parameters(&c, &theta, TolerancePolicy::default(), Some(2)).unwrap();
        assert_eq!(r.independent(), vec![0, 1]);
        assert!(r.steps[2].is_none() && r.steps[3].is_none());
    }

    #[test]
    fn rref_examples() {
        let tol = TolerancePolicy::default();
        let diag = SMatrix::from_matrix(vec![0, 1], Matrix::from_rows(&[vec![0.25, 0.0], vec![0.0, 0.25]]));
        assert_eq!(rref_classification(&diag, tol), vec![0, 1]);
        let rank1 = SMatrix::from_matrix(vec![0, 1], Matrix::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]));
        assert_eq!(rref_classification(&rank1, tol), vec![0]);
    }

    #[test]
    fn random_theta_avoids_special_points() {
        let t = random_theta(10_000, 11);
        let pi = std::f64::consts::PI;
        assert!(t.iter().all(|&x| (0.0..std::f64::consts::TAU).contains(&x)));
        assert!(t.iter().all(|&x| x.abs() > 1e-3 && (x - pi).abs() > 1e-3 && (x - 2.0 * pi).abs() > 1e-3));
        assert_eq!(t, random_theta(10_000, 11));
    }

    #[test]
    fn symmetry_removal_requires_declaration() {
        assert_eq!(
            remove_symmetry(&minimal(), &[], &[0.1, 0.2], TolerancePolicy::default(), FreezePolicy::Zero),
            Err(Error::MissingSymmetry)
        );
        let ext = CircuitBuilder::new(1).rz(0, "phi").rx(0, "t1").symmetry("phi").build().unwrap();
        assert!(matches!(
            remove_symmetry(&ext, &[0.0, 1.0], &[0.3], TolerancePolicy::default(), FreezePolicy::Zero),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn report_json_shape() {
        let r = classify_parameters(&reducible(), &[0.9, 2.3], TolerancePolicy::default(), None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["parameters"][1]["verdict"], "redundant");
        assert_eq!(v["parameters"][0]["lambda_second"], serde_json::Value::Null);
        assert_eq!(v["tolerance"]["abs"], 1e-10);
        assert_eq!(v["theta"][1], 2.3);
    }
}
