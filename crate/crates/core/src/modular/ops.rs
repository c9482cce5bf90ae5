//! Modular offset, addition, negation, doubling and halving.

use crate::arith::bits::bit_rotate;
use crate::arith::increment::{decrement, increment};
use crate::arith::mcx::multi_not;
use crate::arith::offset::offset;
use crate::arith::{mask, neg_mod};
use crate::circuit::{Builder, Register, Wire};
use crate::error::{Error, Result};
use crate::modular::flips::{bi_flip, pivot_chain, pivot_flip, pivot_flip_reg};
use crate::modular::require_odd;

/// The middle flip at `r`: a pivot-flip, or a bi-flip when the builder's
/// options ask for it (identical on `[0, r)`).
fn flip_at_modulus(b: &mut Builder, r: u64, t: &Register, controls: &[Wire]) -> Result<()> {
    if b.options().biflip_at_modulus {
        bi_flip(b, r as u128, t, controls)
    } else {
        pivot_flip(b, r as u128, t, controls)
    }
}

/// `t -> t + k (mod r)` for `t < r`, as pivot-flips at `r - k`, `r`, `k`.
pub fn mod_offset(b: &mut Builder, k: u64, r: u64, t: &Register, controls: &[Wire]) -> Result<()> {
    if k >= r {
        return Err(Error::InvalidParameter(format!("offset {k} not below modulus {r}")));
    }
    if k == 0 {
        return Ok(());
    }
    if b.options().biflip_at_modulus {
        pivot_flip(b, (r - k) as u128, t, controls)?;
        bi_flip(b, r as u128, t, controls)?;
        return pivot_flip(b, k as u128, t, controls);
    }
    pivot_chain(b, &[(r - k) as u128, r as u128, k as u128], t, controls)
}

/// `t -> t + a (mod r)` for `a, t < r`; `a` is restored.
///
/// The pivot `r - a` is formed in place as `!a + r + 1`. The controlled form
/// needs `r` odd: it halves `a`, and wraps the subtraction of the half in
/// controlled negations of `t`, so only negations carry controls and the
/// control wires themselves are free to be borrowed.
pub fn mod_add_reg(b: &mut Builder, a: &Register, r: u64, t: &Register, controls: &[Wire]) -> Result<()> {
    if controls.is_empty() {
        return add_uncontrolled(b, a, r, t);
    }
    require_odd(r)?;
    mod_halve(b, r, a, &[])?;
    add_uncontrolled(b, a, r, t)?;
    mod_negate(b, r, t, controls)?;
    b.inverted(|b| add_uncontrolled(b, a, r, t))?;
    mod_negate(b, r, t, controls)?;
    mod_double(b, r, a, &[])
}

fn add_uncontrolled(b: &mut Builder, a: &Register, r: u64, t: &Register) -> Result<()> {
    let n = a.len();
    let complement = |b: &mut Builder| -> Result<()> {
        multi_not(b, &[], a.wires())?;
        offset(b, (r as u128 + 1) & mask(n), a, &[])
    };
    complement(b)?;
    pivot_flip_reg(b, a, t, &[])?;
    b.inverted(complement)?;
    flip_at_modulus(b, r, t, &[])?;
    pivot_flip_reg(b, a, t, &[])
}

/// `t -> -t (mod r)` for `t < r`: decrement, pivot-flip at `r - 1`, increment.
pub fn mod_negate(b: &mut Builder, r: u64, t: &Register, controls: &[Wire]) -> Result<()> {
    if r < 2 {
        return Ok(());
    }
    decrement(b, t, &[])?;
    pivot_flip(b, (r - 1) as u128, t, controls)?;
    increment(b, t, &[])
}

/// `t -> 2t (mod r)` for `t < r`, `r` odd.
///
/// Subtracting `(r+1)/2` leaves the MSB set exactly for the small inputs;
/// the MSB-controlled re-add on the low bits undoes it there, and after
/// toggling the MSB a left rotation moves it into the parity position.
pub fn mod_double(b: &mut Builder, r: u64, t: &Register, controls: &[Wire]) -> Result<()> {
    require_odd(r)?;
    let n = t.len();
    if (r as u128) > mask(n) {
        return Err(Error::InvalidParameter(format!("modulus {r} does not fit in {n} wires")));
    }
    let half = (r as u128).div_ceil(2);
    let msb = t.msb();
    offset(b, neg_mod(half, n), t, controls)?;
    let mut msb_controls = controls.to_vec();
    msb_controls.push(msb);
    offset(b, half & mask(n - 1), &t.low(n - 1), &msb_controls)?;
    multi_not(b, controls, &[msb])?;
    bit_rotate(b, t, 1, controls)
}

/// `t -> t/2 (mod r)`, the reverse of [`mod_double`].
pub fn mod_halve(b: &mut Builder, r: u64, t: &Register, controls: &[Wire]) -> Result<()> {
    b.inverted(|b| mod_double(b, r, t, controls))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::BuildOptions;
    use crate::modular::register_size;

    struct Layout {
        circ: crate::circuit::Circuit,
        t: Register,
        a: Register,
        ctl: Register,
    }

    fn layout(r: u64, with_a: bool, c: usize, pool: usize, f: impl FnOnce(&mut Builder, &Register, &Register, &[Wire])) -> Layout {
        let n = register_size(r);
        let mut b = Builder::new();
        let a = b.add_operand(if with_a { n } else { 0 });
        let t = b.add_operand(n);
        let ctl = b.add_operand(c);
        b.add_dirty_pool(pool);
        f(&mut b, &a, &t, ctl.wires());
        Layout { circ: b.finish().unwrap(), t, a, ctl }
    }

    fn sweep(l: &Layout, r: u64, oracle: impl Fn(u64, u64) -> u64) {
        let c = l.ctl.len();
        for s in 0..(1u64 << l.circ.width) {
            let v = l.t.value_of(s);
            let av = l.a.value_of(s);
            if v >= r || av >= r {
                continue;
            }
            let on = l.ctl.value_of(s) == (1 << c) - 1;
            let out = l.circ.apply(s);
            assert_eq!(l.t.value_of(out), if on { oracle(av, v) } else { v }, "r={r} s={s:b}");
            assert_eq!(out & !l.t.mask(), s & !l.t.mask());
        }
    }

    #[test]
    fn offset_examples_and_sweep() {
        for r in [5u64, 7, 9] {
            for k in 0..r {
                for c in 0..=1 {
                    let l = layout(r, false, c, 2, |b, _, t, ctl| mod_offset(b, k, r, t, ctl).unwrap());
                    assert!(l.circ.ledger.dirty_highwater <= 2);
                    sweep(&l, r, |_, v| (v + k) % r);
                }
            }
        }
    }

    #[test]
    fn offset_with_biflip() {
        for r in [7u64, 9] {
            for k in 0..r {
                let mut b = Builder::new();
                b.set_options(BuildOptions { biflip_at_modulus: true, ..Default::default() });
                let t = b.add_operand(register_size(r));
                b.add_dirty_pool(2);
                mod_offset(&mut b, k, r, &t, &[]).unwrap();
                let circ = b.finish().unwrap();
                for v in 0..r {
                    assert_eq!(t.value_of(circ.apply(v)), (v + k) % r);
                }
            }
        }
    }

    #[test]
    fn add_reg_sweep() {
        for r in [5u64, 7] {
            for c in 0..=2 {
                let l = layout(r, true, c, 2, |b, a, t, ctl| mod_add_reg(b, a, r, t, ctl).unwrap());
                assert_eq!(l.circ.ledger.dirty_highwater, 2usize.saturating_sub(c), "r={r} c={c}");
                sweep(&l, r, |a, v| (v + a) % r);
            }
        }
    }

    #[test]
    fn negate_sweep() {
        for r in [5u64, 7, 15] {
            for c in 0..=1 {
                let l = layout(r, false, c, 2, |b, _, t, ctl| mod_negate(b, r, t, ctl).unwrap());
                sweep(&l, r, |_, v| (r - v) % r);
            }
        }
    }

    #[test]
    fn double_and_halve_sweep() {
        for r in [3u64, 5, 7, 9, 15] {
            for c in 0..=1 {
                let l = layout(r, false, c, 2, |b, _, t, ctl| mod_double(b, r, t, ctl).unwrap());
                sweep(&l, r, |_, v| 2 * v % r);
                let l = layout(r, false, c, 2, |b, _, t, ctl| mod_halve(b, r, t, ctl).unwrap());
                sweep(&l, r, |_, v| v * (r + 1) / 2 % r);
            }
        }
        assert!(mod_double(&mut Builder::with_width(6), 8, &Register::range(0, 4), &[]).is_err());
    }
}
