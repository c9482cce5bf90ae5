//! Programs mixing reversible blocks with measurement-driven quantum steps.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Register, Wire};
use crate::error::{Error, Result};
use crate::sim::classical::Permutation;
use crate::sim::statevector::StateVector;

type Expand = dyn Fn(&Record) -> Result<Vec<Instruction>> + Send + Sync;

#[derive(Clone)]
pub enum Instruction {
    H(Wire),
    X(Wire),
    /// A reversible block, applied as its basis-state permutation.
    Classical(Arc<Permutation>),
    /// Phase `e^{iθ}` on `|1⟩` of `wire`, with `θ = Σ angle` over the terms
    /// whose recorded bit is 1.
    ConditionedPhase { wire: Wire, terms: Vec<(usize, f64)> },
    Measure { wire: Wire, slot: usize },
    MeasureRegister { register: Register, slot: usize },
    Reset(Wire),
    /// Instructions generated from the measurements taken so far.
    Adaptive(Arc<Expand>),
}

impl fmt::Debug for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::H(w) => write!(f, "H({w})"),
            Instruction::X(w) => write!(f, "X({w})"),
            Instruction::Classical(p) => write!(f, "Classical(width {})", p.width),
            Instruction::ConditionedPhase { wire, terms } => write!(f, "Phase({wire}, {terms:?})"),
            Instruction::Measure { wire, slot } => write!(f, "Measure({wire} -> {slot})"),
            Instruction::MeasureRegister { register, slot } => write!(f, "Measure({:?} -> {slot})", register.wires()),
            Instruction::Reset(w) => write!(f, "Reset({w})"),
            Instruction::Adaptive(_) => write!(f, "Adaptive"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Program {
    pub width: usize,
    pub slots: usize,
    pub instructions: Vec<Instruction>,
}

/// Measurement outcomes by slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record {
    pub values: Vec<u64>,
}

impl Record {
    pub fn bit(&self, slot: usize) -> bool {
        self.values[slot] & 1 == 1
    }
}

/// Runs `program` from `|0…0⟩`.
pub fn run_semiclassical(program: &Program, seed: u64) -> Result<Record> {
    let state = StateVector::new(program.width)?;
    run_semiclassical_from(program, state, seed).map(|(record, _)| record)
}

/// Runs `program` from a given state and returns the final state as well.
pub fn run_semiclassical_from(program: &Program, mut state: StateVector, seed: u64) -> Result<(Record, StateVector)> {
    if state.width() != program.width {
        return Err(Error::InvalidParameter(format!(
            "state has {} qubits, program needs {}",
            state.width(),
            program.width
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut record = Record { values: vec![0; program.slots] };
    execute(&program.instructions, &mut state, &mut record, &mut rng)?;
    Ok((record, state))
}

fn execute(
    instructions: &[Instruction],
    state: &mut StateVector,
    record: &mut Record,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let slot_check = |slot: usize, record: &Record| {
        if slot >= record.values.len() {
            Err(Error::InvalidParameter(format!("measurement slot {slot} out of range")))
        } else {
            Ok(())
        }
    };
    for ins in instructions {
        match ins {
            Instruction::H(w) => state.h(*w)?,
            Instruction::X(w) => state.x(*w)?,
            Instruction::Classical(p) => state.apply_permutation(p)?,
            Instruction::ConditionedPhase { wire, terms } => {
                let mut theta = 0.0;
                for &(slot, angle) in terms {
                    slot_check(slot, record)?;
                    if record.bit(slot) {
                        theta += angle;
                    }
                }
                if theta != 0.0 {
                    state.phase(*wire, theta)?;
                }
            }
            Instruction::Measure { wire, slot } => {
                slot_check(*slot, record)?;
                record.values[*slot] = state.measure(*wire, rng)? as u64;
            }
            Instruction::MeasureRegister { register, slot } => {
                slot_check(*slot, record)?;
                record.values[*slot] = state.measure_register(register, rng)?;
            }
            Instruction::Reset(w) => {
                state.reset(*w, rng)?;
            }
            Instruction::Adaptive(expand) => {
                let generated = expand(record)?;
                execute(&generated, state, record, rng)?;
            }
        }
        state.check_norm()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_flip_distribution() {
        let program = Program {
            width: 1,
            slots: 1,
            instructions: vec![Instruction::H(Wire(0)), Instruction::Measure { wire: Wire(0), slot: 0 }],
        };
        let ones: u64 = (0..1000).map(|seed| run_semiclassical(&program, seed).unwrap().values[0]).sum();
        assert!((ones as f64 / 1000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn reset_restores_zero() {
        let program = Program {
            width: 1,
            slots: 1,
            instructions: vec![
                Instruction::X(Wire(0)),
                Instruction::Reset(Wire(0)),
                Instruction::Measure { wire: Wire(0), slot: 0 },
            ],
        };
        assert_eq!(run_semiclassical(&program, 9).unwrap().values, vec![0]);
    }

    #[test]
    fn conditioned_phase_and_adaptive() {
        // |+⟩ with phase π becomes |−⟩, which H maps to |1⟩.
        let program = Program {
            width: 2,
            slots: 2,
            instructions: vec![
                Instruction::X(Wire(1)),
                Instruction::Measure { wire: Wire(1), slot: 0 },
                Instruction::H(Wire(0)),
                Instruction::ConditionedPhase { wire: Wire(0), terms: vec![(0, std::f64::consts::PI)] },
                Instruction::H(Wire(0)),
                Instruction::Adaptive(Arc::new(|r: &Record| {
                    Ok(if r.bit(0) { vec![Instruction::X(Wire(1))] } else { vec![] })
                })),
                Instruction::MeasureRegister { register: Register::range(0, 2), slot: 1 },
            ],
        };
        assert_eq!(run_semiclassical(&program, 1).unwrap().values, vec![1, 1]);
    }
}
