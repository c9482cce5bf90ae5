//! Constant addition `t += k`.

use crate::arith::carry::carry_toggle;
use crate::arith::increment::{decrement, increment};
use crate::arith::mcx::multi_not;
use crate::arith::commutator::control_via_commutator;
use crate::arith::mask;
use crate::circuit::{wires_of, Builder, Register, Wire};
use crate::error::Result;

/// `t += k (mod 2^|t|)` when every control is on.
///
/// Uncontrolled: one dirty wire. Controlled: two dirty wires, one of them
/// prepended to the target so that a commutator with a controlled negation
/// adds `2k` to the extended register.
pub fn offset(b: &mut Builder, k: u128, t: &Register, controls: &[Wire]) -> Result<()> {
    let n = t.len();
    let k = k & mask(n);
    if k == 0 || n == 0 {
        return Ok(());
    }
    if controls.is_empty() {
        if n == 1 {
            return b.x(t.get(0));
        }
        let g = b.borrow_dirty(1, t.wires())?;
        let spare = borrow_spare(b, n, &wires_of(&[t], &g))?;
        offset_with(b, k, t, g[0], &spare)?;
        b.release_dirty(&spare)?;
        return b.release_dirty(&g);
    }
    let dg = b.borrow_dirty(2, &wires_of(&[t], controls))?;
    let ext = t.with_lsb(dg[0]);
    let spare = borrow_spare(b, n + 1, &wires_of(&[&ext], &[&[dg[1]][..], controls].concat()))?;
    control_via_commutator(
        b,
        controls,
        |b| offset_with(b, k, &ext, dg[1], &spare),
        |b, ctl| multi_not(b, ctl, ext.wires()),
    )?;
    b.release_dirty(&spare)?;
    b.release_dirty(&dg)
}

/// Extra busy wires handed to the recursion so that sibling halves can run
/// side by side, each with its own carry wire.
fn borrow_spare(b: &mut Builder, n: usize, excluded: &[Wire]) -> Result<Vec<Wire>> {
    let count = b.available_busy(excluded).min(n / 2);
    b.borrow_dirty(count, excluded)
}

/// Uncontrolled offset using the caller's dirty wire `g` (outside `t`).
///
/// Splits `t` into halves, pushes the low half's carry into the high half
/// with a `g`-controlled decrement/increment pair around two carry toggles,
/// then recurses on both halves. With `spare` wires the high half takes one
/// of them as its own `g` and the halves are confined to disjoint wires.
pub(crate) fn offset_with(b: &mut Builder, k: u128, t: &Register, g: Wire, spare: &[Wire]) -> Result<()> {
    let n = t.len();
    let k = k & mask(n);
    if k == 0 {
        return Ok(());
    }
    if n == 1 {
        return b.x(t.get(0));
    }
    let h = n.div_ceil(2);
    let low = t.low(h);
    let high = t.high_from(h);
    let kl = k & mask(h);
    let kh = k.checked_shr(h as u32).unwrap_or(0);
    if kl != 0 {
        multi_not(b, &[g], high.wires())?;
        decrement(b, &high, &[g])?;
        carry_toggle(b, &low, kl, g, &[])?;
        increment(b, &high, &[g])?;
        carry_toggle(b, &low, kl, g, &[])?;
        multi_not(b, &[g], high.wires())?;
    }
    let Some((&gh, rest)) = spare.split_first() else {
        offset_with(b, kl, &low, g, &[])?;
        return offset_with(b, kh, &high, g, &[]);
    };
    let (spare_low, spare_high) = rest.split_at(rest.len() / 2);
    let zone_low = wires_of(&[&low], &[&[g][..], spare_low].concat());
    b.confined(&zone_low, |b| offset_with(b, kl, &low, g, spare_low))?;
    let zone_high = wires_of(&[&high], &[&[gh][..], spare_high].concat());
    b.confined(&zone_high, |b| offset_with(b, kh, &high, gh, spare_high))
}
