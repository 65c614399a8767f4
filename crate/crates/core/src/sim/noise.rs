//! Two-qubit depolarizing noise by stochastic unraveling.
//!
//! Each two-qubit gate is followed by an independent depolarizing channel of
//! strength `p` on both of its qubits. A gate error rate `eps` fixes `p`
//! through `eps = (4p/5)(2 - p)`, and each channel application is unraveled
//! into one random kick of angle `xi = asin(sqrt(p))`.

use std::f64::consts::FRAC_PI_8;

use super::circuit::Circuit;
use super::gate::GateOp;
use crate::error::{Error, Result};

/// Depolarizing strength `p` with `(4p/5)(2 - p) = eps`, the root in `[0, 1)`.
pub fn depolarizing_strength(eps: f64) -> Result<f64> {
    if !(0.0..0.8).contains(&eps) {
        return Err(Error::ErrorRateOutOfRange(eps));
    }
    Ok(1.0 - (1.0 - 1.25 * eps).sqrt())
}

/// Two-qubit gate error rate of a depolarizing strength `p`.
pub fn gate_error_rate(p: f64) -> f64 {
    0.8 * p * (2.0 - p)
}

/// Kick angle reproducing a depolarizing channel of strength `p`.
pub fn kick_angle(p: f64) -> f64 {
    p.sqrt().asin()
}

/// Standard six-CNOT Toffoli network with controls `a`, `b` and target `t`.
pub fn toffoli_network(a: usize, b: usize, t: usize) -> Vec<GateOp> {
    let h = |q| GateOp::Hadamard { qubit: q };
    let cx = |c, t| GateOp::Cnot { control: c, target: t };
    // T = e^{i pi/8} RZ(pi/8); the scalar is collected in one global phase
    let t_gate = |q| GateOp::RZ { qubit: q, theta: FRAC_PI_8 };
    let tdg = |q| GateOp::RZ { qubit: q, theta: -FRAC_PI_8 };
    vec![
        h(t),
        cx(b, t),
        tdg(t),
        cx(a, t),
        t_gate(t),
        cx(b, t),
        tdg(t),
        cx(a, t),
        t_gate(b),
        t_gate(t),
        h(t),
        cx(a, b),
        t_gate(a),
        tdg(b),
        cx(a, b),
        GateOp::GlobalPhase { theta: -FRAC_PI_8 },
    ]
}

/// Fredkin gate as `CX(b,a) Toffoli(c,a;b) CX(b,a)`: eight CNOTs in total.
pub fn cswap_network(control: usize, a: usize, b: usize) -> Vec<GateOp> {
    let mut gates = vec![GateOp::Cnot { control: b, target: a }];
    gates.extend(toffoli_network(control, a, b));
    gates.push(GateOp::Cnot { control: b, target: a });
    gates
}

/// Inserts noise events after every two-qubit interaction.
///
/// Fredkin gates are first expanded with [`cswap_network`]. A block XY gate is
/// kept exact and followed by one noise position per qubit pair. Single-qubit
/// gates stay noiseless. At `eps = 0` the circuit is returned unchanged apart
/// from dropping zero-angle noise events.
pub fn compile_to_noisy(circuit: &Circuit, eps: f64) -> Result<Circuit> {
    let p = depolarizing_strength(eps)?;
    let xi = kick_angle(p);
    let mut out = Circuit::new(circuit.n_qubits());
    let marks = circuit.layer_marks();
    let mut next_mark = 0;
    let noise = |out: &mut Circuit, qubits: &[usize]| -> Result<()> {
        for &q in qubits {
            out.push(GateOp::NoiseEvent { qubit: q, xi })?;
        }
        Ok(())
    };
    for (i, g) in circuit.gates().iter().enumerate() {
        while next_mark < marks.len() && marks[next_mark] == i {
            out.mark_layer();
            next_mark += 1;
        }
        match g {
            GateOp::NoiseEvent { xi, .. } if eps == 0.0 && *xi == 0.0 => {}
            _ if eps == 0.0 => out.push(g.clone())?,
            GateOp::Cswap { control, a, b } => {
                for sub in cswap_network(*control, *a, *b) {
                    let qs = if sub.is_two_qubit() { sub.qubits() } else { Vec::new() };
                    out.push(sub)?;
                    noise(&mut out, &qs)?;
                }
            }
            GateOp::BlockXY { qubits, .. } => {
                out.push(g.clone())?;
                for (j, &qa) in qubits.iter().enumerate() {
                    for &qb in &qubits[j + 1..] {
                        noise(&mut out, &[qa, qb])?;
                    }
                }
            }
            g if g.is_two_qubit() => {
                out.push(g.clone())?;
                noise(&mut out, &g.qubits())?;
            }
            _ => out.push(g.clone())?,
        }
    }
    while next_mark < marks.len() {
        out.mark_layer();
        next_mark += 1;
    }
    Ok(out)
}
