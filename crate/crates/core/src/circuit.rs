//! Parametric circuits and their JSON description format.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Generator, Pauli, PauliString, MAX_QUBITS};

/// Computational basis state of `len` qubits; bit `q` is qubit `q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Bitstring {
    pub bits: u64,
    pub len: usize,
}

impl Bitstring {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_QUBITS || bits >> len != 0 {
            return Err(Error::InvalidBitstring(format!("{bits:b} on {len} qubits")));
        }
        Ok(Self { bits, len })
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: 0, len }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let len = s.chars().count();
        if len == 0 || len > MAX_QUBITS {
            return Err(Error::InvalidBitstring(s.into()));
        }
        let mut bits = 0u64;
        for ch in s.chars() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::InvalidBitstring(s.into())),
            }
        }
        Ok(Self { bits, len })
    }

    pub fn bit(&self, q: usize) -> bool {
        (self.bits >> q) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.len).rev() {
            f.write_str(if self.bit(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedKind {
    H,
    X,
    Y,
    Z,
}

/// Angle of a rotation: a named circuit parameter or a frozen value.
#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    Param(String),
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Single {
        kind: FixedKind,
        qubit: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Cz {
        control: usize,
        target: usize,
    },
    /// Pauli string applied when `control` is |1⟩; the string is identity on `control`.
    ControlledPauli {
        control: usize,
        string: PauliString,
    },
    /// `exp(-i·angle·G/2)`.
    Rotation {
        generator: Generator,
        angle: Angle,
    },
}

impl Gate {
    pub fn param(&self) -> Option<&str> {
        match self {
            Gate::Rotation { angle: Angle::Param(name), .. } => Some(name),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParametricCircuit {
    qubits: usize,
    init: Bitstring,
    gates: Vec<Gate>,
    symmetry_params: Vec<String>,
    roster: Vec<String>,
    /// Gate index of every roster entry.
    param_gates: Vec<usize>,
}

impl ParametricCircuit {
    /// Validates the gate list and builds the parameter roster: symmetry
    /// parameters first in declared order, then the rest by first appearance.
    pub fn new(qubits: usize, init: Bitstring, gates: Vec<Gate>, symmetry_params: Vec<String>) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Malformed(format!("qubit count {qubits}")));
        }
        if init.len != qubits {
            return Err(Error::LengthMismatch { expected: qubits, got: init.len });
        }
        let mut by_name: HashMap<&str, usize> = HashMap::new();
        let mut order = Vec::new();
        for (i, g) in gates.iter().enumerate() {
            validate_gate(g, qubits)?;
            if let Some(name) = g.param() {
                if by_name.insert(name, i).is_some() {
                    return Err(Error::DuplicateParameter(name.to_string()));
                }
                order.push(name);
            }
        }
        let mut roster: Vec<String> = Vec::with_capacity(order.len());
        for s in &symmetry_params {
            if !by_name.contains_key(s.as_str()) {
                return Err(Error::UnknownSymmetryParam(s.clone()));
            }
            if roster.contains(s) {
                return Err(Error::DuplicateParameter(s.clone()));
            }
            roster.push(s.clone());
        }
        for name in order {
            if !symmetry_params.iter().any(|s| s == name) {
                roster.push(name.to_string());
            }
        }
        let param_gates = roster.iter().map(|n| by_name[n.as_str()]).collect();
        Ok(Self { qubits, init, gates, symmetry_params, roster, param_gates })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn init(&self) -> Bitstring {
        self.init
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn symmetry_params(&self) -> &[String] {
        &self.symmetry_params
    }

    /// Parameter names in analysis order.
    pub fn roster(&self) -> &[String] {
        &self.roster
    }

    pub fn num_params(&self) -> usize {
        self.roster.len()
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.roster.iter().position(|n| n == name)
    }

    /// Gate index holding roster parameter `k`.
    pub fn gate_of_param(&self, k: usize) -> Result<usize> {
        self.param_gates.get(k).copied().ok_or(Error::IndexOutOfRange { index: k, len: self.roster.len() })
    }

    pub fn generator_of_param(&self, k: usize) -> Result<&Generator> {
        match &self.gates[self.gate_of_param(k)?] {
            Gate::Rotation { generator, .. } => Ok(generator),
            _ => unreachable!("roster entries always point at rotations"),
        }
    }

    /// Roster index for every gate (None for non-parametric gates).
    pub fn gate_params(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.gates.len()];
        for (k, &g) in self.param_gates.iter().enumerate() {
            out[g] = Some(k);
        }
        out
    }

    /// Checks a parameter assignment against the roster.
    pub fn check_assignment<T: num_traits::Float>(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.roster.len() {
            return Err(Error::RosterMismatch { expected: self.roster.len(), got: theta.len() });
        }
        if let Some(i) = theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        parse_circuit(text)
    }

    pub fn to_json(&self) -> String {
        let doc = CircuitDoc::from(self);
        let mut s = serde_json::to_string_pretty(&doc).expect("circuit documents always serialize");
        s.push('\n');
        s
    }
}

fn check_qubit(q: usize, qubits: usize) -> Result<()> {
    if q >= qubits {
        return Err(Error::QubitOutOfRange { index: q as i64, qubits });
    }
    Ok(())
}

fn validate_gate(g: &Gate, qubits: usize) -> Result<()> {
    match g {
        Gate::Single { qubit, .. } => check_qubit(*qubit, qubits),
        Gate::Cnot { control, target } | Gate::Cz { control, target } => {
            check_qubit(*control, qubits)?;
            check_qubit(*target, qubits)?;
            if control == target {
                return Err(Error::ControlEqualsTarget(*control));
            }
            Ok(())
        }
        Gate::ControlledPauli { control, string } => {
            check_qubit(*control, qubits)?;
            if string.len() != qubits {
                return Err(Error::LengthMismatch { expected: qubits, got: string.len() });
            }
            if string.support() >> control & 1 == 1 {
                return Err(Error::ControlEqualsTarget(*control));
            }
            Ok(())
        }
        Gate::Rotation { generator, angle } => {
            if generator.num_qubits() != qubits {
                return Err(Error::LengthMismatch { expected: qubits, got: generator.num_qubits() });
            }
            match angle {
                Angle::Param(name) if name.is_empty() => Err(Error::Malformed("empty parameter name".into())),
                Angle::Fixed(v) if !v.is_finite() => Err(Error::Malformed("non-finite angle".into())),
                _ => Ok(()),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON document

#[derive(Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    #[serde(rename = "type")]
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    qubit: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    control: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strings: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    string: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    param: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    qubits: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    init: Option<String>,
    gates: Vec<GateDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    symmetry_params: Vec<String>,
}

fn field<T>(v: Option<T>, kind: &str, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Malformed(format!("gate `{kind}` is missing `{name}`")))
}

fn qubit_index(v: i64, qubits: usize) -> Result<usize> {
    if v < 0 || v as usize >= qubits {
        return Err(Error::QubitOutOfRange { index: v, qubits });
    }
    Ok(v as usize)
}

fn angle_of(doc: &GateDoc) -> Result<Angle> {
    match (&doc.param, doc.angle) {
        (Some(p), None) => Ok(Angle::Param(p.clone())),
        (None, Some(a)) => Ok(Angle::Fixed(a)),
        _ => Err(Error::Malformed(format!("gate `{}` needs exactly one of `param` or `angle`", doc.kind))),
    }
}

fn gate_from_doc(doc: &GateDoc, qubits: usize) -> Result<Gate> {
    let kind = doc.kind.as_str();
    let gate = match kind {
        "rx" | "ry" | "rz" => {
            let q = qubit_index(field(doc.qubit, kind, "qubit")?, qubits)?;
            let p = match kind {
                "rx" => Pauli::X,
                "ry" => Pauli::Y,
                _ => Pauli::Z,
            };
            Gate::Rotation { generator: Generator::single(PauliString::single(qubits, q, p)?)?, angle: angle_of(doc)? }
        }
        "rp" => {
            let words = field(doc.strings.as_ref(), kind, "strings")?;
            let mut terms = Vec::with_capacity(words.len());
            for w in words {
                let t: PauliString = w.parse()?;
                if t.len() != qubits {
                    return Err(Error::LengthMismatch { expected: qubits, got: t.len() });
                }
                terms.push(t);
            }
            Gate::Rotation { generator: Generator::new(terms)?, angle: angle_of(doc)? }
        }
        "h" | "x" | "y" | "z" => {
            let q = qubit_index(field(doc.qubit, kind, "qubit")?, qubits)?;
            let kind = match kind {
                "h" => FixedKind::H,
                "x" => FixedKind::X,
                "y" => FixedKind::Y,
                _ => FixedKind::Z,
            };
            Gate::Single { kind, qubit: q }
        }
        "cnot" | "cz" => {
            let control = qubit_index(field(doc.control, kind, "control")?, qubits)?;
            let target = qubit_index(field(doc.target, kind, "target")?, qubits)?;
            if kind == "cnot" {
                Gate::Cnot { control, target }
            } else {
                Gate::Cz { control, target }
            }
        }
        "cp" => {
            let control = qubit_index(field(doc.control, kind, "control")?, qubits)?;
            let string: PauliString = field(doc.string.as_ref(), kind, "string")?.parse()?;
            Gate::ControlledPauli { control, string }
        }
        other => return Err(Error::UnknownGate(other.to_string())),
    };
    Ok(gate)
}

fn gate_to_doc(g: &Gate) -> GateDoc {
    let mut doc = GateDoc::default();
    match g {
        Gate::Single { kind, qubit } => {
            doc.kind = match kind {
                FixedKind::H => "h",
                FixedKind::X => "x",
                FixedKind::Y => "y",
                FixedKind::Z => "z",
            }
            .into();
            doc.qubit = Some(*qubit as i64);
        }
        Gate::Cnot { control, target } | Gate::Cz { control, target } => {
            doc.kind = if matches!(g, Gate::Cnot { .. }) { "cnot" } else { "cz" }.into();
            doc.control = Some(*control as i64);
            doc.target = Some(*target as i64);
        }
        Gate::ControlledPauli { control, string } => {
            doc.kind = "cp".into();
            doc.control = Some(*control as i64);
            doc.string = Some(string.to_string());
        }
        Gate::Rotation { generator, angle } => {
            let single_qubit = generator.is_single_string() && generator.terms()[0].support().count_ones() == 1;
            if single_qubit {
                let t = generator.terms()[0];
                let q = t.support().trailing_zeros() as usize;
                doc.kind = match t.get(q) {
                    Pauli::X => "rx",
                    Pauli::Y => "ry",
                    _ => "rz",
                }
                .into();
                doc.qubit = Some(q as i64);
            } else {
                doc.kind = "rp".into();
                doc.strings = Some(generator.terms().iter().map(|t| t.to_string()).collect());
            }
            match angle {
                Angle::Param(p) => doc.param = Some(p.clone()),
                Angle::Fixed(a) => doc.angle = Some(*a),
            }
        }
    }
    doc
}

impl From<&ParametricCircuit> for CircuitDoc {
    fn from(c: &ParametricCircuit) -> Self {
        CircuitDoc {
            qubits: c.qubits as i64,
            init: (c.init.bits != 0).then(|| c.init.to_string()),
            gates: c.gates.iter().map(gate_to_doc).collect(),
            symmetry_params: c.symmetry_params.clone(),
        }
    }
}

/// Parses and validates a circuit description document.
pub fn parse_circuit(text: &str) -> Result<ParametricCircuit> {
    let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    if doc.qubits < 1 || doc.qubits as usize > MAX_QUBITS {
        return Err(Error::Malformed(format!("qubit count {}", doc.qubits)));
    }
    let qubits = doc.qubits as usize;
    let init = match &doc.init {
        Some(s) => {
            let b = Bitstring::parse(s)?;
            if b.len != qubits {
                return Err(Error::LengthMismatch { expected: qubits, got: b.len });
            }
            b
        }
        None => Bitstring::zeros(qubits),
    };
    let gates = doc.gates.iter().map(|g| gate_from_doc(g, qubits)).collect::<Result<Vec<_>>>()?;
    ParametricCircuit::new(qubits, init, gates, doc.symmetry_params)
}

/// Convenience builder used by tests and by the circuit constructors.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    qubits: usize,
    init: Bitstring,
    gates: Vec<Gate>,
    symmetry_params: Vec<String>,
}

impl CircuitBuilder {
    pub fn new(qubits: usize) -> Self {
        Self { qubits, init: Bitstring::zeros(qubits), gates: Vec::new(), symmetry_params: Vec::new() }
    }

    pub fn init(mut self, init: Bitstring) -> Self {
        self.init = init;
        self
    }

    fn single_rotation(mut self, p: Pauli, qubit: usize, name: &str) -> Self {
        let generator = PauliString::single(self.qubits, qubit, p).and_then(Generator::single).expect("qubit in range");
        self.gates.push(Gate::Rotation { generator, angle: Angle::Param(name.into()) });
        self
    }

    pub fn rx(self, qubit: usize, name: &str) -> Self {
        self.single_rotation(Pauli::X, qubit, name)
    }

    pub fn ry(self, qubit: usize, name: &str) -> Self {
        self.single_rotation(Pauli::Y, qubit, name)
    }

    pub fn rz(self, qubit: usize, name: &str) -> Self {
        self.single_rotation(Pauli::Z, qubit, name)
    }

    pub fn rotation(mut self, generator: Generator, name: &str) -> Self {
        self.gates.push(Gate::Rotation { generator, angle: Angle::Param(name.into()) });
        self
    }

    pub fn gate(mut self, g: Gate) -> Self {
        self.gates.push(g);
        self
    }

    pub fn symmetry(mut self, name: &str) -> Self {
        self.symmetry_params.push(name.into());
        self
    }

    pub fn build(self) -> Result<ParametricCircuit> {
        ParametricCircuit::new(self.qubits, self.init, self.gates, self.symmetry_params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roster_follows_gate_order() {
        let c = parse_circuit(
            r#"{"qubits":1,"gates":[{"type":"rx","qubit":0,"param":"t1"},{"type":"rz","qubit":0,"param":"t2"}]}"#,
        )
        .unwrap();
        assert_eq!(c.roster(), ["t1", "t2"]);
    }

    #[test]
    fn symmetry_params_come_first() {
        let c = parse_circuit(
            r#"{"qubits":1,"gates":[
                {"type":"rz","qubit":0,"param":"phi"},
                {"type":"rx","qubit":0,"param":"t1"},
                {"type":"rz","qubit":0,"param":"t2"},
                {"type":"ry","qubit":0,"param":"t3"}],
              "symmetry_params":["phi"]}"#,
        )
        .unwrap();
        assert_eq!(c.roster(), ["phi", "t1", "t2", "t3"]);

        let c = parse_circuit(
            r#"{"qubits":1,"gates":[
                {"type":"rx","qubit":0,"param":"t1"},
                {"type":"rz","qubit":0,"param":"phi"}],
              "symmetry_params":["phi"]}"#,
        )
        .unwrap();
        assert_eq!(c.roster(), ["phi", "t1"]);
        assert_eq!(c.gate_of_param(0).unwrap(), 1);
    }

    #[test]
    fn error_paths() {
        let dup = r#"{"qubits":1,"gates":[{"type":"rx","qubit":0,"param":"t1"},{"type":"ry","qubit":0,"param":"t1"}]}"#;
        assert_eq!(parse_circuit(dup), Err(Error::DuplicateParameter("t1".into())));

        let unknown = r#"{"qubits":1,"gates":[{"type":"swap","qubit":0}]}"#;
        assert_eq!(parse_circuit(unknown), Err(Error::UnknownGate("swap".into())));

        let range = r#"{"qubits":2,"gates":[{"type":"h","qubit":2}]}"#;
        assert!(matches!(parse_circuit(range), Err(Error::QubitOutOfRange { index: 2, .. })));

        let neg = r#"{"qubits":2,"gates":[{"type":"h","qubit":-1}]}"#;
        assert!(matches!(parse_circuit(neg), Err(Error::QubitOutOfRange { index: -1, .. })));

        let sym = r#"{"qubits":1,"gates":[{"type":"rx","qubit":0,"param":"t1"}],"symmetry_params":["phi"]}"#;
        assert_eq!(parse_circuit(sym), Err(Error::UnknownSymmetryParam("phi".into())));

        let same = r#"{"qubits":2,"gates":[{"type":"cnot","control":1,"target":1}]}"#;
        assert_eq!(parse_circuit(same), Err(Error::ControlEqualsTarget(1)));

        assert!(matches!(parse_circuit("{not json"), Err(Error::Malformed(_))));
        let word = r#"{"qubits":2,"gates":[{"type":"rp","strings":["XYZ"],"param":"a"}]}"#;
        assert!(matches!(parse_circuit(word), Err(Error::LengthMismatch { .. })));
        let both = r#"{"qubits":1,"gates":[{"type":"rx","qubit":0,"param":"a","angle":1.0}]}"#;
        assert!(matches!(parse_circuit(both), Err(Error::Malformed(_))));
        let init = r#"{"qubits":2,"init":"1","gates":[]}"#;
        assert!(matches!(parse_circuit(init), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"qubits":3,"init":"010","gates":[
            {"type":"h","qubit":0},
            {"type":"cnot","control":0,"target":2},
            {"type":"cz","control":1,"target":0},
            {"type":"rp","strings":["XIY","IYX","YXI"],"param":"a"},
            {"type":"rp","strings":["IZI"],"param":"b"},
            {"type":"ry","qubit":2,"angle":0.25},
            {"type":"cp","control":2,"string":"IXZ"}],
          "symmetry_params":["b"]}"#;
        let c = parse_circuit(text).unwrap();
        let again = parse_circuit(&c.to_json()).unwrap();
        assert_eq!(c, again);
        assert_eq!(again.init().to_string(), "010");
        assert_eq!(again.roster(), ["b", "a"]);
    }
}
