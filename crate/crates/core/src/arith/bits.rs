//! Bit reversal and rotation, ancilla-free.

use crate::circuit::{Builder, Register, Wire};
use crate::error::{Error, Result};

/// Swaps bit `i` with bit `n-1-i` when every control is on.
///
/// Each swap is three CNOT layers; only the middle layer needs controls.
/// With two or more controls the middle layer is toggle-controlled through
/// a wire outside the swapped pairs (the middle bit for odd sizes, bit 0
/// otherwise, whose own pair is swapped last with one multi-control gate).
pub fn bit_reverse(b: &mut Builder, t: &Register, controls: &[Wire]) -> Result<()> {
    let n = t.len();
    let w = t.wires();
    if n < 2 {
        return Ok(());
    }
    if controls.len() <= 1 || n % 2 == 1 {
        let pairs: Vec<(Wire, Wire)> = (0..n / 2).map(|i| (w[i], w[n - 1 - i])).collect();
        let toggle = if controls.len() >= 2 { Some(w[n / 2]) } else { None };
        return swap_pairs(b, &pairs, controls, toggle);
    }
    let inner: Vec<(Wire, Wire)> = (1..n / 2).map(|i| (w[i], w[n - 1 - i])).collect();
    swap_pairs(b, &inner, controls, Some(w[0]))?;
    swap_pairs(b, &[(w[0], w[n - 1])], controls, None)
}

fn swap_pairs(b: &mut Builder, pairs: &[(Wire, Wire)], controls: &[Wire], toggle: Option<Wire>) -> Result<()> {
    if pairs.is_empty() {
        return Ok(());
    }
    for &(lo, hi) in pairs {
        b.cx(lo, hi)?;
    }
    match toggle {
        Some(tw) => {
            for _ in 0..2 {
                for &(lo, hi) in pairs {
                    b.ccx(tw, hi, lo)?;
                }
                b.mcx(controls, tw)?;
            }
        }
        None => {
            for &(lo, hi) in pairs {
                let mut ctl = controls.to_vec();
                ctl.push(hi);
                b.mcx(&ctl, lo)?;
            }
        }
    }
    for &(lo, hi) in pairs {
        b.cx(lo, hi)?;
    }
    Ok(())
}

/// Left-rotates the bits of `t` by `shift` when every control is on:
/// `v -> (v << shift | v >> (n - shift)) mod 2^n`.
pub fn bit_rotate(b: &mut Builder, t: &Register, shift: usize, controls: &[Wire]) -> Result<()> {
    let n = t.len();
    if shift >= n.max(1) {
        return Err(Error::InvalidParameter(format!("rotation {shift} out of range for {n} bits")));
    }
    if shift == 0 {
        return Ok(());
    }
    bit_reverse(b, t, controls)?;
    bit_reverse(b, &t.low(shift), controls)?;
    bit_reverse(b, &t.high_from(shift), controls)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reverse_bits(v: u64, n: usize) -> u64 {
        (0..n).fold(0, |acc, i| acc | (((v >> i) & 1) << (n - 1 - i)))
    }

    #[test]
    fn reverse_exhaustive() {
        for n in 1..=6 {
            for c in 0..=3 {
                if n == 2 && c >= 2 {
                    // A multiply-controlled swap spanning the whole pool is odd.
                    continue;
                }
                let mut b = Builder::new();
                let t = b.add_operand(n);
                let ctl = b.add_operand(c);
                bit_reverse(&mut b, &t, ctl.wires()).unwrap();
                let circ = b.finish().unwrap();
                for s in 0..(1u64 << circ.width) {
                    let on = ctl.value_of(s) == (1 << c) - 1;
                    let v = t.value_of(s);
                    let want = if on { reverse_bits(v, n) } else { v };
                    let out = circ.apply(s);
                    assert_eq!(t.value_of(out), want, "n={n} c={c}");
                    assert_eq!(out & !t.mask(), s & !t.mask());
                }
            }
        }
    }

    #[test]
    fn rotate_exhaustive() {
        for n in 1..=5 {
            for shift in 0..n {
                for c in 0..=2 {
                    if n == 2 && c == 2 {
                        continue;
                    }
                    let mut b = Builder::new();
                    let t = b.add_operand(n);
                    let ctl = b.add_operand(c);
                    bit_rotate(&mut b, &t, shift, ctl.wires()).unwrap();
                    let circ = b.finish().unwrap();
                    for s in 0..(1u64 << circ.width) {
                        let on = ctl.value_of(s) == (1 << c) - 1;
                        let v = t.value_of(s);
                        let rot = ((v << shift) | (v >> (n - shift))) & ((1 << n) - 1);
                        assert_eq!(t.value_of(circ.apply(s)), if on { rot } else { v });
                    }
                }
            }
        }
    }

    #[test]
    fn rotate_example() {
        let mut b = Builder::new();
        let t = b.add_operand(4);
        bit_rotate(&mut b, &t, 1, &[]).unwrap();
        assert_eq!(b.finish().unwrap().apply(0b1001), 0b0011);
    }
}
