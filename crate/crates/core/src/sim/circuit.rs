use serde::{Deserialize, Serialize};

use super::gate::GateOp;
use crate::error::{Error, Result};

/// Ordered gate sequence with optional layer boundaries.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<GateOp>,
    /// Gate counts at which a layer ends; strictly increasing.
    layer_marks: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), layer_marks: Vec::new() }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<GateOp>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn layer_marks(&self) -> &[usize] {
        &self.layer_marks
    }

    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends another circuit of the same or smaller width.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::InvalidArgument(format!(
                "cannot append a {}-qubit circuit to a {}-qubit one",
                other.n_qubits, self.n_qubits
            )));
        }
        let offset = self.gates.len();
        self.gates.extend(other.gates.iter().cloned());
        for &m in &other.layer_marks {
            self.push_mark(offset + m);
        }
        Ok(())
    }

    /// Marks the end of a layer at the current position.
    pub fn mark_layer(&mut self) {
        let pos = self.gates.len();
        self.push_mark(pos);
    }

    fn push_mark(&mut self, pos: usize) {
        if self.layer_marks.last().is_none_or(|&last| pos > last) {
            self.layer_marks.push(pos);
        }
    }

    /// Inverse circuit: reversed order, each gate inverted. Layer marks are dropped.
    pub fn inverse(&self) -> Result<Circuit> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(GateOp::inverse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit { n_qubits: self.n_qubits, gates, layer_marks: Vec::new() })
    }

    /// Number of two-qubit noise positions, counting a Fredkin gate as the
    /// eight CNOTs of its decomposition and a block XY gate as one position
    /// per qubit pair.
    pub fn two_qubit_count(&self) -> usize {
        self.gates
            .iter()
            .map(|g| match g {
                GateOp::Cswap { .. } => 8,
                GateOp::BlockXY { qubits, .. } => qubits.len() * qubits.len().saturating_sub(1) / 2,
                g if g.is_two_qubit() => 1,
                _ => 0,
            })
            .sum()
    }

    pub fn count_by_name(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }
}
