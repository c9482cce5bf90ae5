//! Bi-flips and pivot-flips.

use crate::arith::adder::add_reg;
use crate::arith::compare::{compare_lt_toggle, compare_lt_toggle_const};
use crate::arith::increment::increment;
use crate::arith::mcx::multi_not;
use crate::arith::offset::offset;
use crate::arith::{mask, neg_mod};
use crate::circuit::{wires_of, Builder, Register, Wire};
use crate::error::Result;

/// `t -> !(t - k) = !t + k (mod 2^n)` when every control is on. Self-inverse,
/// and preserves `[t < k]`.
///
/// Controlled form: `-(k/2)`, controlled NOT, `+(k/2)`, then a controlled
/// increment when `k` is odd. Only the NOT and the increment see the controls.
pub fn bi_flip(b: &mut Builder, k: u128, t: &Register, controls: &[Wire]) -> Result<()> {
    let n = t.len();
    let k = k & mask(n);
    if controls.is_empty() {
        multi_not(b, &[], t.wires())?;
        return offset(b, k, t, &[]);
    }
    let half = k / 2;
    offset(b, neg_mod(half, n), t, &[])?;
    multi_not(b, controls, t.wires())?;
    offset(b, half, t, &[])?;
    if k % 2 == 1 {
        increment(b, t, controls)?;
    }
    Ok(())
}

/// `t -> !t + a (mod 2^|t|)` when every control is on. Requires `|t| >= |a|`.
pub fn bi_flip_reg(b: &mut Builder, a: &Register, t: &Register, controls: &[Wire]) -> Result<()> {
    multi_not(b, controls, t.wires())?;
    add_reg(b, a, t, controls)
}

/// Reverses the states below `k` (`i -> k-1-i`) and fixes the rest, when
/// every control is on. Borrows one toggle wire plus whatever the inner
/// comparisons and offsets need.
pub fn pivot_flip(b: &mut Builder, k: u128, t: &Register, controls: &[Wire]) -> Result<()> {
    pivot_chain(b, &[k], t, controls)
}

/// Pivot-flips at each of `pivots` in turn.
///
/// Each flip is two toggle-controlled bi-flips around a comparison. The
/// `+k/2` closing a bi-flip is not applied; the register is tracked as
/// `value - pending`, comparisons test the shifted interval instead, and the
/// pending offset is paid only before the next controlled negation.
pub(crate) fn pivot_chain(b: &mut Builder, pivots: &[u128], t: &Register, controls: &[Wire]) -> Result<()> {
    let n = t.len();
    let m = mask(n);
    let mut pending: u128 = 0;
    for &k in pivots {
        if k <= 1 {
            continue;
        }
        let tw = b.borrow_dirty(1, &wires_of(&[t], controls))?;
        let flip_controls = [&tw[..], controls].concat();
        let half = k / 2;
        for _ in 0..2 {
            let due = pending.wrapping_sub(half) & m;
            if due != 0 {
                offset(b, due, t, &[])?;
            }
            multi_not(b, &flip_controls, t.wires())?;
            pending = half & m;
            if k % 2 == 1 {
                increment(b, t, &flip_controls)?;
            }
            shifted_compare(b, k, pending, t, tw[0])?;
        }
        b.release_dirty(&tw)?;
    }
    if pending != 0 {
        offset(b, pending, t, &[])?;
    }
    Ok(())
}

/// `flag ^= [(t + p) mod 2^n < k]`, as one or two comparisons on `t`.
fn shifted_compare(b: &mut Builder, k: u128, p: u128, t: &Register, flag: Wire) -> Result<()> {
    let n = t.len();
    let size = mask(n) + 1;
    if k == 0 {
        return Ok(());
    }
    if k >= size {
        return b.x(flag);
    }
    let start = neg_mod(p, n);
    let end = start + k;
    if end <= size {
        compare_lt_toggle_const(b, end, t, flag, &[])?;
        return compare_lt_toggle_const(b, start, t, flag, &[]);
    }
    compare_lt_toggle_const(b, end - size, t, flag, &[])?;
    compare_lt_toggle_const(b, start, t, flag, &[])?;
    b.x(flag)
}

/// Pivot-flip whose pivot is the value held in register `a`.
pub fn pivot_flip_reg(b: &mut Builder, a: &Register, t: &Register, controls: &[Wire]) -> Result<()> {
    let tw = b.borrow_dirty(1, &wires_of(&[a, t], controls))?;
    let flip_controls = [&tw[..], controls].concat();
    for _ in 0..2 {
        bi_flip_reg(b, a, t, &flip_controls)?;
        compare_lt_toggle(b, a, t, tw[0], &[])?;
    }
    b.release_dirty(&tw)
}
