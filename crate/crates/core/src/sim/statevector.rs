//! Dense state vectors over a handful of qubits.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{Circuit, Gate, Register, Wire};
use crate::error::{Error, Result};
use crate::sim::classical::Permutation;

pub const MAX_STATE_WIDTH: usize = 14;

/// Largest tolerated deviation of the squared norm from 1.
const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `width` qubits.
    pub fn new(width: usize) -> Result<Self> {
        Self::basis(width, 0)
    }

    pub fn basis(width: usize, state: u64) -> Result<Self> {
        if width > MAX_STATE_WIDTH {
            return Err(Error::WidthTooLarge { width, limit: MAX_STATE_WIDTH });
        }
        if state >> width != 0 {
            return Err(Error::InvalidParameter(format!("basis state {state} exceeds {width} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
        amps[state as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probability(&self, state: u64) -> f64 {
        self.amps[state as usize].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_norm(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NormDrift(n));
        }
        Ok(())
    }

    fn bit(&self, w: Wire) -> Result<usize> {
        if w.index() >= self.width {
            return Err(Error::WireOutOfRange { wire: w.0, width: self.width });
        }
        Ok(1 << w.index())
    }

    pub fn h(&mut self, w: Wire) -> Result<()> {
        let m = self.bit(w)?;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    pub fn x(&mut self, w: Wire) -> Result<()> {
        self.apply_gate(&Gate::x(w))
    }

    /// Multiplies the `|1⟩` component of `w` by `e^{iθ}`.
    pub fn phase(&mut self, w: Wire, theta: f64) -> Result<()> {
        let m = self.bit(w)?;
        let f = Complex64::from_polar(1.0, theta);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a *= f;
            }
        }
        Ok(())
    }

    /// Phase `e^{iθ}` on states where both wires are 1.
    pub fn controlled_phase(&mut self, c: Wire, t: Wire, theta: f64) -> Result<()> {
        let m = self.bit(c)? | self.bit(t)?;
        let f = Complex64::from_polar(1.0, theta);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *a *= f;
            }
        }
        Ok(())
    }

    pub fn swap(&mut self, a: Wire, b: Wire) -> Result<()> {
        self.apply_gate(&Gate::cx(a, b))?;
        self.apply_gate(&Gate::cx(b, a))?;
        self.apply_gate(&Gate::cx(a, b))
    }

    /// Any X-family gate.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let t = self.bit(gate.target)?;
        let mut cm = 0usize;
        for &c in &gate.controls {
            cm |= self.bit(c)?;
        }
        for i in 0..self.amps.len() {
            if i & t == 0 && i & cm == cm {
                self.amps.swap(i, i | t);
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        circuit.gates.iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Moves the amplitude of `|s⟩` to `|perm(s)⟩`; the permutation acts on
    /// the low `perm.width` qubits.
    pub fn apply_permutation(&mut self, perm: &Permutation) -> Result<()> {
        if perm.width > self.width {
            return Err(Error::WidthTooLarge { width: perm.width, limit: self.width });
        }
        let mut next = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (s, a) in self.amps.iter().enumerate() {
            next[perm.apply(s as u64) as usize] = *a;
        }
        self.amps = next;
        Ok(())
    }

    /// Moves `|s⟩` to `|f(s)⟩`; `f` must be a bijection on `0..2^width`.
    pub fn apply_map(&mut self, f: impl Fn(u64) -> u64) -> Result<()> {
        let mut next = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut hit = vec![false; self.amps.len()];
        for (s, a) in self.amps.iter().enumerate() {
            let img = f(s as u64) as usize;
            if img >= next.len() || hit[img] {
                return Err(Error::InvalidParameter(format!("map is not a bijection at {s}")));
            }
            hit[img] = true;
            next[img] = *a;
        }
        self.amps = next;
        Ok(())
    }

    pub fn prob_one(&self, w: Wire) -> Result<f64> {
        let m = self.bit(w)?;
        Ok(self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Marginal distribution of `reg`'s value.
    pub fn distribution(&self, reg: &Register) -> Vec<f64> {
        let mut d = vec![0.0; 1 << reg.len()];
        for (s, a) in self.amps.iter().enumerate() {
            d[reg.value_of(s as u64) as usize] += a.norm_sqr();
        }
        d
    }

    /// Projective measurement of `reg`; collapses and renormalizes.
    pub fn measure_register(&mut self, reg: &Register, rng: &mut impl Rng) -> Result<u64> {
        for &w in reg.wires() {
            self.bit(w)?;
        }
        let d = self.distribution(reg);
        let total: f64 = d.iter().sum();
        let mut u = rng.gen::<f64>() * total;
        let mut outcome = d.len() - 1;
        for (v, p) in d.iter().enumerate() {
            if u < *p {
                outcome = v;
                break;
            }
            u -= p;
        }
        while d[outcome] == 0.0 {
            outcome -= 1;
        }
        let scale = 1.0 / d[outcome].sqrt();
        for (s, a) in self.amps.iter_mut().enumerate() {
            if reg.value_of(s as u64) == outcome as u64 {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.check_norm()?;
        Ok(outcome as u64)
    }

    pub fn measure(&mut self, w: Wire, rng: &mut impl Rng) -> Result<bool> {
        Ok(self.measure_register(&Register::from(vec![w]), rng)? == 1)
    }

    /// Measures `w` and flips it back to `|0⟩` if it read 1.
    pub fn reset(&mut self, w: Wire, rng: &mut impl Rng) -> Result<bool> {
        let one = self.measure(w, rng)?;
        if one {
            self.x(w)?;
        }
        Ok(one)
    }
}
