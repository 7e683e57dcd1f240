//! Pauli words and Pauli-sum generators.
//!
//! A [`PauliString`] is stored in symplectic form: bit `q` of `x` / `z` marks an
//! `X` / `Z` factor on qubit `q`, and `Y = iXZ` has both bits set. Text
//! serialization writes qubit `Q-1` leftmost, so `"XIZ"` is `X_2 ⊗ Z_0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    len: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(len: usize) -> Result<Self> {
        if len == 0 || len > MAX_QUBITS {
            return Err(Error::InvalidPauliWord(format!("length {len}")));
        }
        Ok(Self { len, x: 0, z: 0 })
    }

    /// A single Pauli factor on `qubit`, identity elsewhere.
    pub fn single(len: usize, qubit: usize, p: Pauli) -> Result<Self> {
        let mut s = Self::identity(len)?;
        if qubit >= len {
            return Err(Error::QubitOutOfRange { index: qubit as i64, qubits: len });
        }
        s.set(qubit, p);
        Ok(s)
    }

    pub fn from_masks(len: usize, x: u64, z: u64) -> Result<Self> {
        let s = Self::identity(len)?;
        let m = s.mask();
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::InvalidPauliWord(format!("masks exceed {len} qubits")));
        }
        Ok(Self { len, x, z })
    }

    #[inline]
    fn mask(&self) -> u64 {
        (1u64 << self.len) - 1
    }

    /// Number of qubits; never zero.
    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let (bx, bz) = p.bits();
        let bit = 1u64 << qubit;
        self.x = if bx { self.x | bit } else { self.x & !bit };
        self.z = if bz { self.z | bit } else { self.z & !bit };
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Number of `Y` factors.
    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// True iff the two strings commute: the number of positions where both
    /// letters are non-identity and different is even.
    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len, got: other.len });
        }
        let anti = (self.x & other.z) ^ (self.z & other.x);
        Ok(anti.count_ones().is_multiple_of(2))
    }

    /// Moves the letter on qubit `q` to qubit `q+1 mod Q`.
    pub fn translate(&self) -> PauliString {
        PauliString { len: self.len, x: rotate_left(self.x, self.len), z: rotate_left(self.z, self.len) }
    }

    /// Same string on `len` qubits, identity on the added high qubits.
    pub fn widen(&self, len: usize) -> Result<PauliString> {
        if len < self.len {
            return Err(Error::LengthMismatch { expected: self.len, got: len });
        }
        PauliString::from_masks(len, self.x, self.z)
    }
}

/// Cyclic shift of the low `len` bits by one position towards the high end.
#[inline]
pub(crate) fn rotate_left(bits: u64, len: usize) -> u64 {
    if len <= 1 {
        return bits;
    }
    let mask = (1u64 << len) - 1;
    ((bits << 1) | (bits >> (len - 1))) & mask
}

pub fn pauli_commute(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes_with(b)
}

pub fn translate_string(p: &PauliString) -> PauliString {
    p.translate()
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(word: &str) -> Result<Self> {
        let len = word.chars().count();
        let mut s = PauliString::identity(len).map_err(|_| Error::InvalidPauliWord(word.into()))?;
        for (pos, ch) in word.chars().enumerate() {
            let p = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::InvalidPauliWord(word.into())),
            };
            s.set(len - 1 - pos, p);
        }
        Ok(s)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.len).rev() {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

/// Hermitian sum of distinct, non-identity Pauli strings with unit coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    terms: Vec<PauliString>,
}

impl Generator {
    pub fn new(terms: Vec<PauliString>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidGenerator("no terms".into()))?;
        let len = first.len();
        for (i, t) in terms.iter().enumerate() {
            if t.len() != len {
                return Err(Error::LengthMismatch { expected: len, got: t.len() });
            }
            if t.is_identity() {
                return Err(Error::InvalidGenerator("identity term".into()));
            }
            if terms[..i].contains(t) {
                return Err(Error::InvalidGenerator(format!("duplicate term {t}")));
            }
        }
        Ok(Self { terms })
    }

    pub fn single(p: PauliString) -> Result<Self> {
        Self::new(vec![p])
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn num_qubits(&self) -> usize {
        self.terms[0].len()
    }

    pub fn is_single_string(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn all_commute(&self) -> bool {
        self.terms
            .iter()
            .enumerate()
            .all(|(i, a)| self.terms[i + 1..].iter().all(|b| a.commutes_with(b).unwrap_or(false)))
    }

    /// Applies `translate_string` to every term.
    pub fn translate(&self) -> Generator {
        Generator { terms: self.terms.iter().map(PauliString::translate).collect() }
    }

    /// Term multiset is fixed by the translation.
    pub fn is_translation_invariant(&self) -> bool {
        let mut a = self.terms.clone();
        let mut b: Vec<_> = self.terms.iter().map(PauliString::translate).collect();
        a.sort();
        b.sort();
        a == b
    }

    pub fn widen(&self, len: usize) -> Result<Generator> {
        Ok(Generator { terms: self.terms.iter().map(|t| t.widen(len)).collect::<Result<_>>()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_use_high_qubit_first() {
        let p = ps("XIZ");
        assert_eq!(p.get(2), Pauli::X);
        assert_eq!(p.get(1), Pauli::I);
        assert_eq!(p.get(0), Pauli::Z);
        assert_eq!(p.to_string(), "XIZ");
        assert!("XAZ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn commutation_examples() {
        assert!(pauli_commute(&ps("XIX"), &ps("IXX")).unwrap());
        assert!(pauli_commute(&ps("XY"), &ps("YX")).unwrap());
        assert!(!pauli_commute(&ps("XI"), &ps("ZI")).unwrap());
        assert!(pauli_commute(&ps("XI"), &ps("ZIX")).is_err());
    }

    #[test]
    fn translation_examples() {
        assert_eq!(ps("XII").translate(), ps("IIX"));
        let mut p = ps("IXY");
        for _ in 0..3 {
            p = p.translate();
        }
        assert_eq!(p, ps("IXY"));
        // X_2 ⊗ Y_0 -> X_0 ⊗ Y_1
        assert_eq!(ps("XIY").translate(), ps("IYX"));
    }

    #[test]
    fn generator_rejects_identity_and_duplicates() {
        assert!(Generator::new(vec![ps("II")]).is_err());
        assert!(Generator::new(vec![ps("XI"), ps("XI")]).is_err());
        assert!(Generator::new(vec![]).is_err());
        assert!(Generator::new(vec![ps("XI"), ps("XII")]).is_err());
        let g = Generator::new(vec![ps("XIY"), ps("IYX"), ps("YXI")]).unwrap();
        assert!(g.is_translation_invariant());
        assert!(!g.all_commute());
    }
}
