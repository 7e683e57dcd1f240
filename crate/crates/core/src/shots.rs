//! One-ancilla measurement of S-matrix entries with simulated shot noise.
//!
//! `Re⟨init|γ_m* γ_n|init⟩` is read off the ancilla of a Hadamard-test
//! circuit, `prob(ancilla = 0) = (1 + Re⟨…⟩)/2`. Shot statistics come from a
//! binomial draw at the exact probability, and eigenvalue error bars from a
//! parametric bootstrap around the observed frequencies.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::{Angle, FixedKind, Gate, ParametricCircuit};
use crate::dea::{inductive_fold, ClassificationReport, SMatrix, StepRecord, TolerancePolicy};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::simulator::evolve;

/// Shot presets used for the single-qubit hardware comparison.
pub const SHOT_PRESETS: [u64; 3] = [1000, 4000, 8000];

pub const DEFAULT_RESAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    /// No shot noise: entries take their exact values.
    Exact,
    Count(u64),
}

impl Shots {
    pub fn count(self) -> Option<u64> {
        match self {
            Shots::Exact => None,
            Shots::Count(n) => Some(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapEstimate {
    /// Estimate of `Re⟨init|γ_m* γ_n|init⟩`, i.e. `2·p0_hat − 1`.
    pub value: f64,
    pub shots: u64,
    pub p0_hat: f64,
    pub seed: u64,
}

/// S-matrix estimate with bootstrap error bars on its eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisySMatrix {
    pub mean: SMatrix<f64>,
    /// Ascending eigenvalues of `mean`.
    pub eigenvalues: Vec<f64>,
    /// Standard deviation of the i-th smallest eigenvalue over the replicas.
    pub stddev: Vec<f64>,
    pub resamples: usize,
}

fn single_string_generator(c: &ParametricCircuit, k: usize) -> Result<crate::pauli::PauliString> {
    let g = c.generator_of_param(k)?;
    if !g.is_single_string() {
        return Err(Error::MultiTermGenerator(c.roster()[k].clone()));
    }
    Ok(g.terms()[0])
}

/// Builds the single-pass Hadamard-test circuit on `Q+1` qubits (ancilla is
/// qubit `Q`): `H` on the ancilla, then the gates of `c` with a controlled
/// `G_n` right after `R_{G_n}` and an `X`-bracketed controlled `G_m` right
/// after `R_{G_m}`, then a final `H`. The ancilla-zero probability is
/// `(1 + Re⟨init|γ_m* γ_n|init⟩)/2`.
pub fn hadamard_test_circuit(c: &ParametricCircuit, m: usize, n: usize) -> Result<ParametricCircuit> {
    let gm = single_string_generator(c, m)?;
    let gn = single_string_generator(c, n)?;
    let q = c.qubits();
    let wide = q + 1;
    let (gate_m, gate_n) = (c.gate_of_param(m)?, c.gate_of_param(n)?);
    let anc_x = Gate::Single { kind: FixedKind::X, qubit: q };

    let mut gates = vec![Gate::Single { kind: FixedKind::H, qubit: q }];
    for (i, g) in c.gates().iter().enumerate() {
        gates.push(widen_gate(g, wide)?);
        if i == gate_n {
            gates.push(Gate::ControlledPauli { control: q, string: gn.widen(wide)? });
        }
        if i == gate_m {
            gates.push(anc_x.clone());
            gates.push(Gate::ControlledPauli { control: q, string: gm.widen(wide)? });
            gates.push(anc_x.clone());
        }
    }
    gates.push(Gate::Single { kind: FixedKind::H, qubit: q });
    let init = crate::circuit::Bitstring::new(c.init().bits, wide)?;
    ParametricCircuit::new(wide, init, gates, c.symmetry_params().to_vec())
}

fn widen_gate(g: &Gate, wide: usize) -> Result<Gate> {
    Ok(match g {
        Gate::ControlledPauli { control, string } => {
            Gate::ControlledPauli { control: *control, string: string.widen(wide)? }
        }
        Gate::Rotation { generator, angle } => Gate::Rotation {
            generator: generator.widen(wide)?,
            angle: match angle {
                Angle::Param(p) => Angle::Param(p.clone()),
                Angle::Fixed(v) => Angle::Fixed(*v),
            },
        },
        other => other.clone(),
    })
}

/// Exact ancilla-zero probability of the Hadamard-test circuit for `(m, n)`.
pub fn exact_p0(c: &ParametricCircuit, theta: &[f64], m: usize, n: usize) -> Result<f64> {
    let ht = hadamard_test_circuit(c, m, n)?;
    let s = evolve(&ht, theta)?;
    Ok(s.prob_zero(c.qubits()))
}

fn draw_binomial(rng: &mut ChaCha8Rng, shots: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    Binomial::new(shots, p).expect("valid binomial parameters").sample(rng)
}

fn from_p0(p0: f64, shots: u64, seed: u64) -> OverlapEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = draw_binomial(&mut rng, shots, p0);
    let p0_hat = z as f64 / shots as f64;
    OverlapEstimate { value: 2.0 * p0_hat - 1.0, shots, p0_hat, seed }
}

/// Simulated measurement of `Re⟨init|γ_m* γ_n|init⟩` with `shots` repetitions.
pub fn estimate_overlap(
    c: &ParametricCircuit,
    theta: &[f64],
    m: usize,
    n: usize,
    shots: u64,
    seed: u64,
) -> Result<OverlapEstimate> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    Ok(from_p0(exact_p0(c, theta, m, n)?, shots, seed))
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the task `(stream, m, n)` derived from the user seed, independent
/// of evaluation order.
pub fn derive_seed(seed: u64, stream: u64, m: usize, n: usize) -> u64 {
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    mix(mix(mix(mix(seed) ^ stream) ^ m as u64) ^ n as u64)
}

const STREAM_MEASURE: u64 = 1;
const STREAM_BOOTSTRAP: u64 = 2;

/// Shot-based estimator of S-matrix entries for one circuit at one point.
/// Exact probabilities are computed once per pair and reused across steps.
struct Sampler<'a> {
    circuit: &'a ParametricCircuit,
    theta: &'a [f64],
    shots: Shots,
    seed: u64,
    resamples: usize,
    p0: Vec<Option<f64>>,
}

impl<'a> Sampler<'a> {
    fn new(
        circuit: &'a ParametricCircuit,
        theta: &'a [f64],
        shots: Shots,
        seed: u64,
        resamples: usize,
    ) -> Result<Self> {
        circuit.check_assignment(theta)?;
        if shots == Shots::Count(0) {
            return Err(Error::ZeroShots);
        }
        let n = circuit.num_params();
        for k in 0..n {
            single_string_generator(circuit, k)?;
        }
        Ok(Self { circuit, theta, shots, seed, resamples, p0: vec![None; n * n] })
    }

    fn exact(&mut self, m: usize, n: usize) -> Result<f64> {
        let (m, n) = if m <= n { (m, n) } else { (n, m) };
        let slot = m * self.circuit.num_params() + n;
        if let Some(p) = self.p0[slot] {
            return Ok(p);
        }
        let p = exact_p0(self.circuit, self.theta, m, n)?;
        self.p0[slot] = Some(p);
        Ok(p)
    }

    fn estimate(&mut self, subset: &[usize]) -> Result<NoisySMatrix> {
        let k = subset.len();
        let mut mean = Matrix::identity(k);
        // (position i, position j, observed p0) of every measured entry.
        let mut measured = Vec::new();
        for i in 0..k {
            mean[(i, i)] = 0.25;
            for j in i + 1..k {
                let (m, n) = (subset[i], subset[j]);
                let p = self.exact(m, n)?;
                let p_hat = match self.shots {
                    Shots::Exact => p,
                    Shots::Count(shots) => from_p0(p, shots, derive_seed(self.seed, STREAM_MEASURE, m, n)).p0_hat,
                };
                let v = (2.0 * p_hat - 1.0) / 4.0;
                mean[(i, j)] = v;
                mean[(j, i)] = v;
                measured.push((i, j, p_hat));
            }
        }
        let eigenvalues = symmetric_eigenvalues(&mean);
        let (stddev, resamples) = match self.shots {
            Shots::Exact => (vec![0.0; k], 0),
            Shots::Count(shots) => (self.bootstrap(subset, &mean, &measured, shots), self.resamples),
        };
        Ok(NoisySMatrix { mean: SMatrix::from_matrix(subset.to_vec(), mean), eigenvalues, stddev, resamples })
    }

    /// Redraws every measured entry from `Binomial(shots, p0_hat)` and returns
    /// the per-eigenvalue standard deviation over the replicas.
    fn bootstrap(
        &self,
        subset: &[usize],
        mean: &Matrix<f64>,
        measured: &[(usize, usize, f64)],
        shots: u64,
    ) -> Vec<f64> {
        let k = subset.len();
        let r = self.resamples;
        if r < 2 {
            return vec![0.0; k];
        }
        let draws: Vec<Vec<f64>> = measured
            .iter()
            .map(|&(i, j, p_hat)| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, STREAM_BOOTSTRAP, subset[i], subset[j]));
                (0..r)
                    .map(|_| (2.0 * draw_binomial(&mut rng, shots, p_hat) as f64 / shots as f64 - 1.0) / 4.0)
                    .collect()
            })
            .collect();
        let mut sum = vec![0.0; k];
        let mut sum_sq = vec![0.0; k];
        let mut replica = mean.clone();
        #[allow(clippy::needless_range_loop)]
        for rep in 0..r {
            for (e, &(i, j, _)) in measured.iter().enumerate() {
                replica[(i, j)] = draws[e][rep];
                replica[(j, i)] = draws[e][rep];
            }
            for (idx, ev) in symmetric_eigenvalues(&replica).into_iter().enumerate() {
                sum[idx] += ev;
                sum_sq[idx] += ev * ev;
            }
        }
        let rf = r as f64;
        sum.iter().zip(&sum_sq).map(|(s, sq)| ((sq - s * s / rf) / (rf - 1.0)).max(0.0).sqrt()).collect()
    }
}

/// Estimates `S_k` over the first `k` roster parameters.
pub fn estimate_s_matrix(
    c: &ParametricCircuit,
    theta: &[f64],
    k: usize,
    shots: Shots,
    seed: u64,
    resamples: usize,
) -> Result<NoisySMatrix> {
    if k == 0 || k > c.num_params() {
        return Err(Error::IndexOutOfRange { index: k, len: c.num_params() });
    }
    let subset: Vec<usize> = (0..k).collect();
    Sampler::new(c, theta, shots, seed, resamples)?.estimate(&subset)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig {
    pub shots: Shots,
    pub seed: u64,
    /// A candidate needs `λ_min > z_threshold·σ(λ_min)`.
    pub z_threshold: f64,
    pub resamples: usize,
}

impl NoiseConfig {
    pub fn new(shots: Shots, seed: u64) -> Self {
        Self { shots, seed, z_threshold: 3.0, resamples: DEFAULT_RESAMPLES }
    }
}

/// Inductive classification on shot-based S matrices: a candidate is
/// independent when `λ_min > z_threshold·σ(λ_min)` and also above the exact
/// tolerance policy, so that exact mode reproduces the noiseless analysis.
pub fn classify_with_noise(
    c: &ParametricCircuit,
    theta: &[f64],
    noise: NoiseConfig,
    tol: TolerancePolicy,
    cap: Option<usize>,
) -> Result<ClassificationReport> {
    let NoiseConfig { shots, seed, z_threshold, resamples } = noise;
    let mut sampler = Sampler::new(c, theta, shots, seed, resamples)?;
    let (verdicts, steps) = inductive_fold(c.num_params(), cap.unwrap_or(usize::MAX), |idx| {
        let est = sampler.estimate(idx)?;
        let ev = &est.eigenvalues;
        let lmax = *ev.last().expect("nonempty");
        let bar = (z_threshold * est.stddev[0]).max(tol.threshold(lmax));
        let noisy = shots != Shots::Exact;
        Ok((
            ev[0] > bar,
            StepRecord {
                param: *idx.last().expect("nonempty"),
                size: idx.len(),
                lambda_min: ev[0],
                lambda_second: ev.get(1).copied(),
                lambda_min_std: noisy.then(|| est.stddev[0]),
                lambda_second_std: if noisy { est.stddev.get(1).copied() } else { None },
            },
        ))
    })?;
    Ok(ClassificationReport {
        names: c.roster().to_vec(),
        verdicts,
        steps,
        cap,
        tolerance: tol,
        theta: theta.to_vec(),
        seed: Some(seed),
        shots: shots.count(),
    })
}

/// CSV rows `k, lambda_min, lambda_min_std, lambda_second, lambda_second_std, shots, seed`
/// for every step whose S matrix is at least 2×2; `k` is the 1-based roster position.
pub fn steps_csv(report: &ClassificationReport) -> String {
    let mut out = String::from("k,lambda_min,lambda_min_std,lambda_second,lambda_second_std,shots,seed\n");
    let shots = report.shots.map_or_else(|| "exact".to_string(), |s| s.to_string());
    let seed = report.seed.map_or_else(String::new, |s| s.to_string());
    for step in report.steps.iter().flatten() {
        let Some(second) = step.lambda_second else { continue };
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{},{}",
            step.param + 1,
            step.lambda_min,
            step.lambda_min_std.unwrap_or(0.0),
            second,
            step.lambda_second_std.unwrap_or(0.0),
            shots,
            seed
        );
    }
    out
}
