//! Ancilla-free quantum increment: a phase gradient conjugated by the
//! quantum Fourier transform.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::circuit::{Register, Wire};
use crate::error::Result;
use crate::sim::statevector::StateVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuantumGate {
    H(Wire),
    Phase(Wire, f64),
    ControlledPhase(Wire, Wire, f64),
    Swap(Wire, Wire),
}

impl QuantumGate {
    pub fn apply(&self, s: &mut StateVector) -> Result<()> {
        match *self {
            QuantumGate::H(w) => s.h(w),
            QuantumGate::Phase(w, t) => s.phase(w, t),
            QuantumGate::ControlledPhase(c, w, t) => s.controlled_phase(c, w, t),
            QuantumGate::Swap(a, b) => s.swap(a, b),
        }
    }

    fn inverse(self) -> Self {
        match self {
            QuantumGate::Phase(w, t) => QuantumGate::Phase(w, -t),
            QuantumGate::ControlledPhase(c, w, t) => QuantumGate::ControlledPhase(c, w, -t),
            g => g,
        }
    }
}

/// `|v⟩ -> Σ_k e^{2πi·vk/2^n} |k⟩ / √2^n` over `t` (LSB first).
pub fn qft(t: &Register) -> Vec<QuantumGate> {
    let n = t.len();
    let mut gates = Vec::new();
    for j in (0..n).rev() {
        gates.push(QuantumGate::H(t.get(j)));
        for m in (0..j).rev() {
            gates.push(QuantumGate::ControlledPhase(t.get(m), t.get(j), PI / (1u64 << (j - m)) as f64));
        }
    }
    for i in 0..n / 2 {
        gates.push(QuantumGate::Swap(t.get(i), t.get(n - 1 - i)));
    }
    gates
}

pub fn inverse(gates: &[QuantumGate]) -> Vec<QuantumGate> {
    gates.iter().rev().map(|g| g.inverse()).collect()
}

/// `t += 1 (mod 2^n)` up to global phase, with no ancillae: in the Fourier
/// basis the shift is diagonal, one `Z^{2^{j+1-n}}` per qubit.
pub fn quantum_increment_bootstrap(t: &Register) -> Vec<QuantumGate> {
    let n = t.len();
    let f = qft(t);
    let mut gates = f.clone();
    for j in 0..n {
        gates.push(QuantumGate::Phase(t.get(j), 2.0 * PI * (1u64 << j) as f64 / (1u64 << n) as f64));
    }
    gates.extend(inverse(&f));
    gates
}

/// Column `j` is the image of `|j⟩`.
pub fn unitary(width: usize, gates: &[QuantumGate]) -> Result<Vec<Vec<Complex64>>> {
    (0..1u64 << width)
        .map(|j| {
            let mut s = StateVector::basis(width, j)?;
            for g in gates {
                g.apply(&mut s)?;
            }
            Ok(s.amplitudes().to_vec())
        })
        .collect()
}

/// Largest entrywise distance between `u` and `phase · P`, where `P` is the
/// permutation matrix of `perm` and the phase is taken from column 0.
pub fn deviation_from_permutation(u: &[Vec<Complex64>], perm: impl Fn(usize) -> usize) -> f64 {
    let phase = u[0][perm(0)];
    let mut worst: f64 = 0.0;
    for (j, col) in u.iter().enumerate() {
        for (i, a) in col.iter().enumerate() {
            let want = if i == perm(j) { phase } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((a - want).norm());
        }
    }
    worst
}
