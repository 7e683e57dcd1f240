//! Translational symmetry: equivalence classes of basis states, sector
//! dimensions and explicit sector bases.

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::Bitstring;
use crate::error::{Error, Result};
use crate::pauli::rotate_left;
use crate::simulator::StateVector;

pub const MAX_CLASS_QUBITS: usize = 24;
pub const MAX_BASIS_QUBITS: usize = 12;
pub const MAX_BRUTE_FORCE_QUBITS: usize = 10;

/// A cyclic permutation symmetry of computational basis states.
pub trait CyclicAction {
    fn qubits(&self) -> usize;

    /// Smallest `n ≥ 1` with `action^n = id`.
    fn period(&self) -> usize;

    fn apply(&self, bits: u64) -> u64;
}

/// `τ_Q`: `|b_{Q-1}…b_0⟩ ↦ |b_{Q-2}…b_0 b_{Q-1}⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Translation {
    qubits: usize,
}

impl Translation {
    pub fn new(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > crate::pauli::MAX_QUBITS {
            return Err(Error::Unsupported(format!("{qubits} qubits for translation")));
        }
        Ok(Self { qubits })
    }
}

impl CyclicAction for Translation {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn period(&self) -> usize {
        self.qubits
    }

    fn apply(&self, bits: u64) -> u64 {
        rotate_left(bits, self.qubits)
    }
}

pub fn translate_state(b: &Bitstring) -> Result<Bitstring> {
    let t = Translation::new(b.len)?;
    Bitstring::new(t.apply(b.bits), b.len)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// Smallest member read as an integer (equivalently, lexicographically).
    pub representative: u64,
    /// Representative followed by repeated applications of the action.
    pub members: Vec<u64>,
}

impl EquivalenceClass {
    pub fn order(&self) -> usize {
        self.members.len()
    }
}

/// Orbit of `start` under `action`, starting at `start`.
pub fn orbit<A: CyclicAction>(action: &A, start: u64) -> Vec<u64> {
    let mut members = vec![start];
    let mut b = action.apply(start);
    while b != start {
        members.push(b);
        b = action.apply(b);
    }
    members
}

/// Partition of all basis states into orbits, sorted by (order, representative).
pub fn classes_of<A: CyclicAction>(action: &A) -> Result<Vec<EquivalenceClass>> {
    let q = action.qubits();
    if q == 0 || q > MAX_CLASS_QUBITS {
        return Err(Error::Unsupported(format!("class enumeration for {q} qubits (max {MAX_CLASS_QUBITS})")));
    }
    let n = 1u64 << q;
    let mut seen = vec![false; n as usize];
    let mut classes = Vec::new();
    for b in 0..n {
        if seen[b as usize] {
            continue;
        }
        // b is the smallest unseen state, hence the smallest of its orbit.
        let members = orbit(action, b);
        for &m in &members {
            seen[m as usize] = true;
        }
        classes.push(EquivalenceClass { representative: b, members });
    }
    classes.sort_by_key(|c| (c.order(), c.representative));
    Ok(classes)
}

pub fn equivalence_classes(qubits: usize) -> Result<Vec<EquivalenceClass>> {
    classes_of(&Translation::new(qubits)?)
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |k| n.is_multiple_of(*k))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Number of binary strings of length `k` whose smallest period is `k`.
pub fn aperiodic_count(k: usize) -> u64 {
    assert!((1..64).contains(&k), "aperiodic_count needs 1 <= k < 64");
    let proper: u64 = divisors(k).filter(|&j| j < k).map(aperiodic_count).sum();
    (1u64 << k) - proper
}

/// Eigenvalue `ω = exp(2πi·p/Q)` of the translation on `Q` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SectorSpec {
    #[serde(rename = "Q")]
    pub qubits: usize,
    pub p: usize,
    /// Multiplicative order of ω.
    pub d: usize,
}

impl SectorSpec {
    pub fn new(qubits: usize, p: usize) -> Result<Self> {
        if qubits == 0 || qubits > crate::pauli::MAX_QUBITS {
            return Err(Error::InvalidSector(format!("Q = {qubits}")));
        }
        if p >= qubits {
            return Err(Error::InvalidSector(format!("p = {p} not in [0, {})", qubits)));
        }
        Ok(Self { qubits, p, d: qubits / gcd(p, qubits) })
    }

    /// Sector with `ω = exp(2πi/d)`.
    pub fn with_order(qubits: usize, d: usize) -> Result<Self> {
        if d == 0 || qubits == 0 || !qubits.is_multiple_of(d) {
            return Err(Error::InvalidSector(format!("order {d} does not divide Q = {qubits}")));
        }
        Self::new(qubits, (qubits / d) % qubits)
    }

    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.p as f64 / self.qubits as f64)
    }

    fn omega_pow(&self, j: usize) -> Complex64 {
        let r = (j * self.p) % self.qubits;
        Complex64::from_polar(1.0, std::f64::consts::TAU * r as f64 / self.qubits as f64)
    }
}

/// Real dimension of the unit sphere in the ω-eigenspace of `τ_Q`:
/// `−1 + 2·Σ_{d|k|Q} #(k)/k`.
pub fn sector_dimension(spec: SectorSpec) -> usize {
    let classes: u64 = divisors(spec.qubits).filter(|k| k % spec.d == 0).map(|k| aperiodic_count(k) / k as u64).sum();
    (2 * classes - 1) as usize
}

/// Orthonormal basis of the ω-eigenspace, one vector
/// `order^{-1/2}·Σ_j ω^j τ^j|b⟩` per class whose order is divisible by `d`.
/// Each vector satisfies `τ·e = ω̄·e`.
pub fn sector_basis(spec: SectorSpec) -> Result<Vec<StateVector<f64>>> {
    let q = spec.qubits;
    if q > MAX_BASIS_QUBITS {
        return Err(Error::Unsupported(format!("sector basis for {q} qubits (max {MAX_BASIS_QUBITS})")));
    }
    let mut out = Vec::new();
    for class in equivalence_classes(q)? {
        if class.order() % spec.d != 0 {
            continue;
        }
        let norm = (class.order() as f64).sqrt().recip();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << q];
        for (j, &b) in class.members.iter().enumerate() {
            amps[b as usize] = spec.omega_pow(j) * norm;
        }
        out.push(StateVector::from_amplitudes(amps)?);
    }
    Ok(out)
}

/// Sector dimension from the multiplicity of ω as an eigenvalue of the dense
/// permutation matrix of `τ_Q`. Since the matrix is unitary the multiplicity
/// is the nullity of `P − ωI`, found by Gaussian elimination.
pub fn brute_force_sector_dimension(spec: SectorSpec) -> Result<usize> {
    let q = spec.qubits;
    if q > MAX_BRUTE_FORCE_QUBITS {
        return Err(Error::Unsupported(format!("brute force for {q} qubits (max {MAX_BRUTE_FORCE_QUBITS})")));
    }
    let n = 1usize << q;
    let omega = spec.omega();
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![vec![zero; n]; n];
    for (col, row) in (0..n).map(|b| (b, rotate_left(b as u64, q) as usize)) {
        a[row][col] += 1.0;
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= omega;
    }
    let tol = 1e-9;
    let mut rank = 0;
    for col in 0..n {
        let Some((best, mag)) = (rank..n).map(|r| (r, a[r][col].norm())).max_by(|x, y| x.1.total_cmp(&y.1)) else {
            break;
        };
        if mag <= tol {
            continue;
        }
        a.swap(rank, best);
        let pivot_row = std::mem::take(&mut a[rank]);
        let nz: Vec<usize> = (col..n).filter(|&j| pivot_row[j] != zero).collect();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[col] / pivot_row[col];
            if f == zero {
                continue;
            }
            for &j in &nz {
                row[j] -= f * pivot_row[j];
            }
            row[col] = zero;
        }
        a[rank] = pivot_row;
        rank += 1;
    }
    Ok(2 * (n - rank) - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorEntry {
    pub p: usize,
    pub d: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorTable {
    #[serde(rename = "Q")]
    pub qubits: usize,
    pub sectors: Vec<SectorEntry>,
}

/// All `Q` sectors of `τ_Q`, by `p`.
pub fn sector_table(qubits: usize) -> Result<SectorTable> {
    if qubits == 0 {
        return Err(Error::InvalidSector("Q = 0".into()));
    }
    let sectors = (0..qubits)
        .map(|p| {
            let spec = SectorSpec::new(qubits, p)?;
            Ok(SectorEntry { p, d: spec.d, dim: sector_dimension(spec) })
        })
        .collect::<Result<_>>()?;
    Ok(SectorTable { qubits, sectors })
}

impl SectorTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sector table serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:>3} {:>3} {:>3} {:>8}\n", "Q", "p", "d", "dim");
        for s in &self.sectors {
            out.push_str(&format!("{:>3} {:>3} {:>3} {:>8}\n", self.qubits, s.p, s.d, s.dim));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::inner;

    #[test]
    fn translation_examples() {
        let b = Bitstring::parse("101").unwrap();
        assert_eq!(translate_state(&b).unwrap().to_string(), "011");
        let z = Bitstring::parse("000").unwrap();
        assert_eq!(translate_state(&z).unwrap(), z);
        let mut x = Bitstring::parse("10110").unwrap();
        for _ in 0..5 {
            x = translate_state(&x).unwrap();
        }
        assert_eq!(x.to_string(), "10110");
    }

    #[test]
    fn three_qubit_classes() {
        let classes = equivalence_classes(3).unwrap();
        let members: Vec<Vec<u64>> = classes.iter().map(|c| c.members.clone()).collect();
        assert_eq!(members, vec![vec![0], vec![7], vec![0b001, 0b010, 0b100], vec![0b011, 0b110, 0b101]]);
        assert_eq!(classes[3].order(), 3);
        assert_eq!(equivalence_classes(1).unwrap().len(), 2);
        assert!(equivalence_classes(25).is_err());
    }

    #[test]
    fn aperiodic_counts() {
        assert_eq!([1, 2, 3, 4].map(aperiodic_count), [2, 2, 6, 12]);
        for q in 1..=16 {
            let total: u64 = divisors(q).map(aperiodic_count).sum();
            assert_eq!(total, 1 << q);
        }
    }

    #[test]
    fn dimension_examples() {
        let dim = |q, d| sector_dimension(SectorSpec::with_order(q, d).unwrap());
        assert_eq!(dim(3, 1), 7);
        assert_eq!(dim(4, 1), 11);
        assert_eq!(dim(4, 2), 7);
        assert_eq!(dim(1, 1), 3);
        assert_eq!(dim(2, 1), 5);
        assert_eq!(dim(2, 2), 1);
        assert!(SectorSpec::with_order(4, 3).is_err());
        assert!(SectorSpec::new(4, 4).is_err());
        assert_eq!(SectorSpec::new(6, 4).unwrap().d, 3);
    }

    #[test]
    fn brute_force_small_cases() {
        for (q, d, want) in [(2, 1, 5), (2, 2, 1), (3, 1, 7), (4, 2, 7)] {
            let spec = SectorSpec::with_order(q, d).unwrap();
            assert_eq!(brute_force_sector_dimension(spec).unwrap(), want);
        }
    }

    #[test]
    fn basis_is_orthonormal_eigenbasis() {
        for q in 1..=6 {
            for p in 0..q {
                let spec = SectorSpec::new(q, p).unwrap();
                let basis = sector_basis(spec).unwrap();
                assert_eq!(2 * basis.len() - 1, sector_dimension(spec));
                for (i, a) in basis.iter().enumerate() {
                    for (j, b) in basis.iter().enumerate() {
                        let g = inner(a, b).unwrap();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((g - Complex64::new(want, 0.0)).norm() < 1e-12);
                    }
                    let mut scaled = a.clone();
                    scaled.scale(spec.omega().conj());
                    assert!(a.translate().distance(&scaled) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn q3_trivial_sector_contains_symmetric_state() {
        let spec = SectorSpec::with_order(3, 1).unwrap();
        let basis = sector_basis(spec).unwrap();
        let amps = basis[3].amplitudes();
        let s = 1.0 / 3f64.sqrt();
        for b in [0b011, 0b110, 0b101] {
            assert!((amps[b] - Complex64::new(s, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn table_json_shape() {
        let t = sector_table(2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["Q"], 2);
        assert_eq!(v["sectors"][1]["p"], 1);
        assert_eq!(v["sectors"][1]["d"], 2);
        assert_eq!(v["sectors"][1]["dim"], 1);
    }
}
