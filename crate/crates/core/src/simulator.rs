//! Exact statevector evolution and analytic derivative states.

use num_complex::Complex;

use crate::circuit::{Angle, FixedKind, Gate, ParametricCircuit};
use crate::error::{Error, Result};
use crate::pauli::{Generator, PauliString};
use crate::scalar::Real;

/// Largest register the dense simulator accepts.
pub const MAX_SIM_QUBITS: usize = 24;

/// Target bound on the truncated exponential series remainder.
const TAYLOR_REMAINDER: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Computational basis state `|index⟩`.
    pub fn basis(qubits: usize, index: u64) -> Result<Self> {
        if qubits == 0 || qubits > MAX_SIM_QUBITS {
            return Err(Error::Unsupported(format!("{qubits} qubits in the dense simulator")));
        }
        let dim = 1usize << qubits;
        if index as usize >= dim {
            return Err(Error::InvalidBitstring(format!("{index} on {qubits} qubits")));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index as usize] = Complex::new(T::one(), T::zero());
        Ok(Self { qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Unsupported(format!("amplitude vector of length {dim}")));
        }
        Ok(Self { qubits: dim.trailing_zeros() as usize, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn scale(&mut self, factor: Complex<T>) {
        for a in &mut self.amps {
            *a = *a * factor;
        }
    }

    /// Euclidean distance of the realified vectors.
    pub fn distance(&self, other: &Self) -> T {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<T>().sqrt()
    }

    /// `(Re ψ_0, Im ψ_0, Re ψ_1, ...)`.
    pub fn realify(&self) -> Vec<T> {
        self.amps.iter().flat_map(|a| [a.re, a.im]).collect()
    }

    /// Probability that qubit `q` is measured in |0⟩.
    pub fn prob_zero(&self, q: usize) -> T {
        self.amps.iter().enumerate().filter(|(i, _)| (i >> q) & 1 == 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Applies the translation `|b_{Q-1}…b_0⟩ ↦ |b_{Q-2}…b_0 b_{Q-1}⟩`.
    pub fn translate(&self) -> Self {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        for (b, a) in self.amps.iter().enumerate() {
            out[crate::pauli::rotate_left(b as u64, self.qubits) as usize] = *a;
        }
        Self { qubits: self.qubits, amps: out }
    }

    fn check_len(&self, p: &PauliString) -> Result<()> {
        if p.len() != self.qubits {
            return Err(Error::LengthMismatch { expected: self.qubits, got: p.len() });
        }
        Ok(())
    }
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Complex<T>> {
    if a.dim() != b.dim() {
        return Err(Error::LengthMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(a.amps.iter().zip(&b.amps).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y))
}

#[inline]
fn i_pow<T: Real>(k: u32) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match k % 4 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

/// `P|ψ⟩` for a Pauli string; `P|b⟩ = i^{#Y} (-1)^{|b ∧ z|} |b ⊕ x⟩`.
fn pauli_image<T: Real>(p: &PauliString, amps: &[Complex<T>], out: &mut [Complex<T>]) {
    let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
    let phase = i_pow::<T>(p.y_count());
    for (b, a) in amps.iter().enumerate() {
        let v = *a * phase;
        out[b ^ x] = if (b & z).count_ones() % 2 == 1 { -v } else { v };
    }
}

/// Applies a single Pauli string in place.
pub fn apply_pauli<T: Real>(s: &mut StateVector<T>, p: &PauliString) -> Result<()> {
    s.check_len(p)?;
    let mut out = s.amps.clone();
    pauli_image(p, &s.amps, &mut out);
    s.amps = out;
    Ok(())
}

/// `G|ψ⟩ = Σ_t P_t|ψ⟩` (not unitary for more than one term).
pub fn apply_generator<T: Real>(s: &StateVector<T>, g: &Generator) -> Result<StateVector<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut acc = vec![zero; s.dim()];
    let mut tmp = vec![zero; s.dim()];
    for p in g.terms() {
        s.check_len(p)?;
        pauli_image(p, &s.amps, &mut tmp);
        for (a, t) in acc.iter_mut().zip(&tmp) {
            *a = *a + t;
        }
    }
    Ok(StateVector { qubits: s.qubits, amps: acc })
}

/// `exp(-i·angle·G/2)|s⟩`.
///
/// Pairwise commuting terms factor into `cos(angle/2) − i sin(angle/2) P`.
/// Otherwise the exponential is a Taylor series over sub-steps of size
/// `r·|step|/2 ≤ 1/2` (r = term count, so `‖G‖ ≤ r`), each truncated once the
/// remainder bound drops below the target.
pub fn apply_pauli_sum_exponential<T: Real>(s: &StateVector<T>, g: &Generator, angle: T) -> Result<StateVector<T>> {
    if g.num_qubits() != s.qubits {
        return Err(Error::LengthMismatch { expected: s.qubits, got: g.num_qubits() });
    }
    if g.all_commute() {
        Ok(exp_commuting(s, g, angle))
    } else {
        Ok(exp_taylor(s, g, angle))
    }
}

pub(crate) fn exp_commuting<T: Real>(s: &StateVector<T>, g: &Generator, angle: T) -> StateVector<T> {
    let half = angle * T::lit(0.5);
    let (c, sn) = (half.cos(), half.sin());
    let mut cur = s.amps.clone();
    let mut img = cur.clone();
    let mis = Complex::new(T::zero(), -sn);
    for p in g.terms() {
        pauli_image(p, &cur, &mut img);
        for (a, b) in cur.iter_mut().zip(&img) {
            *a = *a * c + *b * mis;
        }
    }
    StateVector { qubits: s.qubits, amps: cur }
}

pub(crate) fn exp_taylor<T: Real>(s: &StateVector<T>, g: &Generator, angle: T) -> StateVector<T> {
    let r = g.terms().len() as f64;
    let x_total = r * angle.as_f64().abs() * 0.5;
    let steps = (x_total / 0.5).ceil().max(1.0) as usize;
    let step = angle / T::lit(steps as f64);
    let x = x_total / steps as f64;
    let tol = TAYLOR_REMAINDER / steps as f64;
    // Smallest K with x^(K+1)/(K+1)! · e^x below the per-step tolerance.
    let mut order = 1usize;
    let mut term = x;
    while term * x / (order + 1) as f64 * x.exp() > tol && order < 200 {
        order += 1;
        term *= x / order as f64;
    }

    // Each step multiplies by Σ_k (-i·step/2·G)^k / k!.
    let coef = Complex::new(T::zero(), -step * T::lit(0.5));
    let mut cur = s.clone();
    for _ in 0..steps {
        let mut sum = cur.amps.clone();
        let mut power = cur.clone();
        for k in 1..=order {
            let mut next = apply_generator(&power, g).expect("lengths checked by caller");
            let f = coef / T::lit(k as f64);
            next.scale(f);
            for (a, b) in sum.iter_mut().zip(&next.amps) {
                *a = *a + b;
            }
            power = next;
        }
        cur.amps = sum;
    }
    cur
}

fn apply_fixed<T: Real>(s: &mut StateVector<T>, g: &Gate) {
    let dim = s.dim();
    match g {
        Gate::Single { kind: FixedKind::H, qubit } => {
            let bit = 1usize << qubit;
            let r = T::FRAC_1_SQRT_2();
            for b in 0..dim {
                if b & bit == 0 {
                    let (a0, a1) = (s.amps[b], s.amps[b | bit]);
                    s.amps[b] = (a0 + a1) * r;
                    s.amps[b | bit] = (a0 - a1) * r;
                }
            }
        }
        Gate::Single { kind, qubit } => {
            let p = match kind {
                FixedKind::X => crate::pauli::Pauli::X,
                FixedKind::Y => crate::pauli::Pauli::Y,
                _ => crate::pauli::Pauli::Z,
            };
            let ps = PauliString::single(s.qubits, *qubit, p).expect("validated gate");
            apply_pauli(s, &ps).expect("validated gate");
        }
        Gate::Cnot { control, target } => {
            let (c, t) = (1usize << control, 1usize << target);
            for b in 0..dim {
                if b & c != 0 && b & t == 0 {
                    s.amps.swap(b, b | t);
                }
            }
        }
        Gate::Cz { control, target } => {
            let mask = (1usize << control) | (1usize << target);
            for (b, a) in s.amps.iter_mut().enumerate() {
                if b & mask == mask {
                    *a = -*a;
                }
            }
        }
        Gate::ControlledPauli { control, string } => {
            let c = 1usize << control;
            let mut img = s.amps.clone();
            pauli_image(string, &s.amps, &mut img);
            // The string acts trivially on the control, so b and b ⊕ x share it.
            for (b, a) in s.amps.iter_mut().enumerate() {
                if b & c != 0 {
                    *a = img[b];
                }
            }
        }
        Gate::Rotation { .. } => unreachable!("rotations are applied by the caller"),
    }
}

/// Per-gate data cached for a circuit: whether a rotation's terms commute.
struct Prepared<'a> {
    circuit: &'a ParametricCircuit,
    gate_params: Vec<Option<usize>>,
    commuting: Vec<bool>,
}

impl<'a> Prepared<'a> {
    fn new(circuit: &'a ParametricCircuit) -> Self {
        let commuting = circuit
            .gates()
            .iter()
            .map(|g| match g {
                Gate::Rotation { generator, .. } => generator.all_commute(),
                _ => true,
            })
            .collect();
        Self { circuit, gate_params: circuit.gate_params(), commuting }
    }

    fn init_state<T: Real>(&self) -> Result<StateVector<T>> {
        StateVector::basis(self.circuit.qubits(), self.circuit.init().bits)
    }

    fn apply_gate<T: Real>(&self, s: &mut StateVector<T>, i: usize, theta: &[T]) {
        match &self.circuit.gates()[i] {
            Gate::Rotation { generator, angle } => {
                let a = match angle {
                    Angle::Param(_) => theta[self.gate_params[i].expect("named rotation")],
                    Angle::Fixed(v) => T::lit(*v),
                };
                if a == T::zero() {
                    return;
                }
                *s = if self.commuting[i] { exp_commuting(s, generator, a) } else { exp_taylor(s, generator, a) };
            }
            g => apply_fixed(s, g),
        }
    }
}

/// `C(θ)`: init state followed by every gate in list order.
pub fn evolve<T: Real>(c: &ParametricCircuit, theta: &[T]) -> Result<StateVector<T>> {
    c.check_assignment(theta)?;
    let prep = Prepared::new(c);
    let mut s = prep.init_state()?;
    for i in 0..c.gates().len() {
        prep.apply_gate(&mut s, i, theta);
    }
    Ok(s)
}

/// `∂_k C(θ) = -(i/2)·γ_k|init⟩`, with `γ_k` the circuit with `G_k` inserted
/// right after its rotation.
pub fn derivative_state<T: Real>(c: &ParametricCircuit, theta: &[T], k: usize) -> Result<StateVector<T>> {
    c.check_assignment(theta)?;
    let target = c.gate_of_param(k)?;
    let prep = Prepared::new(c);
    let mut s = prep.init_state()?;
    for i in 0..c.gates().len() {
        prep.apply_gate(&mut s, i, theta);
        if i == target {
            s = apply_generator(&s, c.generator_of_param(k)?)?;
            s.scale(Complex::new(T::zero(), -T::lit(0.5)));
        }
    }
    Ok(s)
}

/// Derivative states for every roster index in `subset`.
pub fn derivative_states<T: Real>(c: &ParametricCircuit, theta: &[T], subset: &[usize]) -> Result<Vec<StateVector<T>>> {
    subset.iter().map(|&k| derivative_state(c, theta, k)).collect()
}
