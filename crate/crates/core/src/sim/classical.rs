//! Bit-level simulation, permutation extraction and contract checking.

use std::fmt;

use rayon::prelude::*;

use crate::circuit::{Circuit, Register, Wire};
use crate::error::{Error, Result};

/// Largest width swept exhaustively.
pub const MAX_SWEEP_WIDTH: usize = 24;

/// Words of 64 lanes simulated together by one worker.
const CHUNK_WORDS: usize = 256;

/// Applies a lowered circuit to one basis state.
pub fn run_classical(circuit: &Circuit, state: u64) -> Result<u64> {
    let mut s = state;
    for g in &circuit.gates {
        if g.controls.len() > 2 {
            return Err(Error::Unlowered { controls: g.controls.len() });
        }
        s = g.apply(s);
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// The full basis-state map of a reversible circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    pub width: usize,
    pub map: Vec<u64>,
}

impl Permutation {
    pub fn identity(width: usize) -> Self {
        Permutation { width, map: (0..1u64 << width).collect() }
    }

    /// Image of `state`; bits above `width` pass through.
    #[inline]
    pub fn apply(&self, state: u64) -> u64 {
        let low_mask = (1u64 << self.width) - 1;
        (state & !low_mask) | self.map[(state & low_mask) as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i as u64 == v)
    }

    /// Parity from the cycle count: `(2^width - cycles) mod 2`.
    pub fn parity(&self) -> Parity {
        let n = self.map.len();
        let mut seen = vec![false; n];
        let mut cycles = 0usize;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.map[i] as usize;
            }
        }
        if (n - cycles).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Runs every basis state through the circuit, 64 states per machine word,
/// and checks that the result is a bijection.
pub fn extract_permutation(circuit: &Circuit) -> Result<Permutation> {
    let map = simulate_all(circuit)?;
    let mut preimage = vec![u64::MAX; map.len()];
    for (s, &img) in map.iter().enumerate() {
        let slot = &mut preimage[img as usize];
        if *slot != u64::MAX {
            return Err(Error::NotReversible { first: *slot, second: s as u64, image: img });
        }
        *slot = s as u64;
    }
    Ok(Permutation { width: circuit.width, map })
}

fn simulate_all(circuit: &Circuit) -> Result<Vec<u64>> {
    let width = circuit.width;
    if width > MAX_SWEEP_WIDTH {
        return Err(Error::WidthTooLarge { width, limit: MAX_SWEEP_WIDTH });
    }
    let states = 1usize << width;
    let gates: Vec<(Vec<usize>, usize)> = circuit
        .gates
        .iter()
        .map(|g| (g.controls.iter().map(|c| c.index()).collect(), g.target.index()))
        .collect();
    let mut out = vec![0u64; states];
    out.par_chunks_mut(CHUNK_WORDS * 64).enumerate().for_each(|(chunk, dst)| {
        let first_word = chunk * CHUNK_WORDS;
        let len = dst.len().div_ceil(64);
        let mut lanes = vec![0u64; width * len];
        for wire in 0..width {
            for j in 0..len {
                lanes[wire * len + j] = initial_lane(wire, first_word + j);
            }
        }
        for (controls, target) in &gates {
            for j in 0..len {
                let mut m = u64::MAX;
                for &c in controls {
                    m &= lanes[c * len + j];
                }
                lanes[target * len + j] ^= m;
            }
        }
        for (i, slot) in dst.iter_mut().enumerate() {
            let (j, bit) = (i / 64, i % 64);
            let mut v = 0u64;
            for wire in 0..width {
                v |= ((lanes[wire * len + j] >> bit) & 1) << wire;
            }
            *slot = v;
        }
    });
    Ok(out)
}

/// Value of `wire` across the 64 states held by `word`.
fn initial_lane(wire: usize, word: usize) -> u64 {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    if wire < 6 {
        PATTERNS[wire]
    } else if (word >> (wire - 6)) & 1 == 1 {
        u64::MAX
    } else {
        0
    }
}

type Oracle = dyn Fn(&[u64]) -> Option<Vec<u64>> + Send + Sync;

/// What a circuit must do: map `operands` through `oracle` when every
/// control is on, act as the identity otherwise, and leave every other wire
/// untouched. The oracle returns `None` outside its domain; such inputs are
/// skipped. Inputs with a clean wire set are skipped too.
pub struct Contract {
    pub operands: Vec<Register>,
    pub controls: Vec<Wire>,
    pub clean: Vec<Wire>,
    oracle: Box<Oracle>,
}

impl Contract {
    pub fn new(
        operands: Vec<Register>,
        controls: Vec<Wire>,
        oracle: impl Fn(&[u64]) -> Option<Vec<u64>> + Send + Sync + 'static,
    ) -> Self {
        Contract { operands, controls, clean: Vec::new(), oracle: Box::new(oracle) }
    }

    pub fn with_clean(mut self, clean: Vec<Wire>) -> Self {
        self.clean = clean;
        self
    }

    /// Expected image of `s`, or `None` when `s` is outside the domain.
    pub fn expected(&self, s: u64) -> Option<u64> {
        if self.clean.iter().any(|w| (s >> w.0) & 1 == 1) {
            return None;
        }
        let values: Vec<u64> = self.operands.iter().map(|r| r.value_of(s)).collect();
        let out = (self.oracle)(&values)?;
        if !self.controls.iter().all(|c| (s >> c.0) & 1 == 1) {
            return Some(s);
        }
        Some(self.operands.iter().zip(&out).fold(s, |acc, (r, &v)| r.place(acc, v)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub input: u64,
    pub expected: u64,
    pub actual: u64,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "input={:#x} expected={:#x} actual={:#x}", self.input, self.expected, self.actual)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Number of in-domain inputs checked.
    Pass { checked: u64 },
    Fail(Counterexample),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

/// Checks `circuit` against `contract` on every basis state; reports the
/// smallest failing input.
pub fn check_contract(circuit: &Circuit, contract: &Contract) -> Result<Verdict> {
    let perm = extract_permutation(circuit)?;
    let failure = (0..perm.map.len()).into_par_iter().find_first(|&s| {
        contract.expected(s as u64).is_some_and(|want| want != perm.map[s])
    });
    if let Some(s) = failure {
        let input = s as u64;
        let expected = contract.expected(input).expect("in domain");
        return Ok(Verdict::Fail(Counterexample { input, expected, actual: perm.map[s] }));
    }
    let checked = (0..perm.map.len()).into_par_iter().filter(|&s| contract.expected(s as u64).is_some()).count();
    Ok(Verdict::Pass { checked: checked as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn run_basics() {
        let mut c = Circuit::new(3);
        assert_eq!(run_classical(&c, 5).unwrap(), 5);
        c.push(Gate::x(Wire(0))).unwrap();
        assert_eq!(run_classical(&c, 0).unwrap(), 1);
        c.push(Gate::mcx(&[Wire(0), Wire(1)], Wire(2))).unwrap();
        c.gates.push(Gate { controls: [Wire(0), Wire(1), Wire(2)].into_iter().collect(), target: Wire(0) });
        assert_eq!(run_classical(&c, 0), Err(Error::Unlowered { controls: 3 }));
    }

    #[test]
    fn bitsliced_matches_scalar() {
        for width in [1usize, 3, 6, 7, 9, 15] {
            let mut c = Circuit::new(width);
            for i in 0..width as u32 {
                let t = Wire(i);
                let a = Wire((i + 1) % width as u32);
                let b = Wire((i + 2) % width as u32);
                if width >= 3 {
                    c.push(Gate::ccx(a, b, t)).unwrap();
                } else if width == 2 {
                    c.push(Gate::cx(a, t)).unwrap();
                }
                c.push(Gate::x(t)).unwrap();
            }
            let p = extract_permutation(&c).unwrap();
            for s in 0..(1u64 << width) {
                assert_eq!(p.map[s as usize], c.apply(s));
            }
        }
    }

    #[test]
    fn identity_and_parity() {
        let c = Circuit::new(4);
        let p = extract_permutation(&c).unwrap();
        assert!(p.is_identity());
        assert_eq!(p.parity(), Parity::Even);
        let mut one = Circuit::new(1);
        one.push(Gate::x(Wire(0))).unwrap();
        assert_eq!(extract_permutation(&one).unwrap().parity(), Parity::Odd);
        let mut two = Circuit::new(2);
        two.push(Gate::x(Wire(0))).unwrap();
        assert_eq!(extract_permutation(&two).unwrap().parity(), Parity::Even);
    }

    #[test]
    fn width_limit() {
        let c = Circuit::new(MAX_SWEEP_WIDTH + 1);
        assert!(matches!(extract_permutation(&c), Err(Error::WidthTooLarge { .. })));
    }

    #[test]
    fn contract_counterexample() {
        let mut c = Circuit::new(3);
        c.push(Gate::cx(Wire(2), Wire(0))).unwrap();
        let t = Register::range(0, 2);
        let good = Contract::new(vec![t.clone()], vec![Wire(2)], |v| Some(vec![v[0] ^ 1]));
        assert_eq!(check_contract(&c, &good).unwrap(), Verdict::Pass { checked: 8 });
        let bad = Contract::new(vec![t], vec![Wire(2)], |v| Some(vec![(v[0] + 1) % 4]));
        let Verdict::Fail(cx) = check_contract(&c, &bad).unwrap() else { panic!() };
        assert_eq!(cx, Counterexample { input: 0b101, expected: 0b110, actual: 0b100 });
    }
}
