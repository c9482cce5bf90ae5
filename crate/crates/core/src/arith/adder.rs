//! In-place register addition `t += a`.

use crate::arith::commutator::control_via_commutator;
use crate::arith::increment::{decrement, increment};
use crate::arith::mcx::multi_not;
use crate::circuit::{wires_of, Builder, Register, Wire};
use crate::error::{Error, Result};

/// `t += a (mod 2^|t|)` when every control is on. Requires `|t| >= |a|`.
///
/// Equal sizes use an ancilla-free ripple adder. A larger target runs the
/// ripple over the low bits and patches the carry into the high part with
/// controlled increments. Controls go through a commutator with a controlled
/// negation of the target extended by one borrowed low bit.
pub fn add_reg(b: &mut Builder, a: &Register, t: &Register, controls: &[Wire]) -> Result<()> {
    if t.len() < a.len() {
        return Err(Error::InvalidParameter(format!(
            "adder target has {} wires but input has {}",
            t.len(),
            a.len()
        )));
    }
    if a.is_empty() {
        return Ok(());
    }
    if controls.is_empty() {
        return add_uncontrolled(b, a, t);
    }
    let d = b.borrow_dirty(1, &wires_of(&[a, t], controls))?;
    let ext = t.with_lsb(d[0]);
    control_via_commutator(
        b,
        controls,
        |b| add_uncontrolled(b, a, &ext),
        |b, ctl| multi_not(b, ctl, ext.wires()),
    )?;
    b.release_dirty(&d)
}

/// `t -= a (mod 2^|t|)` when every control is on.
pub fn sub_reg(b: &mut Builder, a: &Register, t: &Register, controls: &[Wire]) -> Result<()> {
    b.inverted(|b| add_reg(b, a, t, controls))
}

fn add_uncontrolled(b: &mut Builder, a: &Register, t: &Register) -> Result<()> {
    if a.len() == t.len() {
        add_same(b, a.wires(), t.wires())
    } else {
        add_larger(b, a, t)
    }
}

/// Ancilla-free same-size ripple adder, `7n - 8` gates for `n >= 2`.
fn add_same(b: &mut Builder, a: &[Wire], t: &[Wire]) -> Result<()> {
    let n = a.len();
    for i in 1..n {
        b.cx(a[i], t[i])?;
    }
    for i in (1..n.saturating_sub(1)).rev() {
        b.cx(a[i], a[i + 1])?;
    }
    for i in 0..n.saturating_sub(1) {
        b.ccx(a[i], t[i], a[i + 1])?;
    }
    for i in (1..n).rev() {
        b.cx(a[i], t[i])?;
        b.ccx(a[i - 1], t[i - 1], a[i])?;
    }
    for i in 1..n.saturating_sub(1) {
        b.cx(a[i], a[i + 1])?;
    }
    for i in 0..n {
        b.cx(a[i], t[i])?;
    }
    Ok(())
}

/// Larger-target adder: majority ripple over the low `n - 1` bits with the
/// input MSB as carry-in, a carry-controlled increment of the high target,
/// and two fix-ups that turn the carry-in into the input MSB's weight.
fn add_larger(b: &mut Builder, a: &Register, t: &Register) -> Result<()> {
    let n = a.len();
    if n == 1 {
        return increment(b, t, &[a.get(0)]);
    }
    let k = n - 1;
    let c0 = a.get(k);
    let aw = a.wires();
    let tw = t.wires();
    let carry_in = |i: usize| if i == 0 { c0 } else { aw[i - 1] };
    for i in 0..k {
        let (c, y, x) = (carry_in(i), tw[i], aw[i]);
        b.cx(x, y)?;
        b.cx(x, c)?;
        b.ccx(c, y, x)?;
    }
    increment(b, &t.high_from(k), &[aw[k - 1]])?;
    for i in (0..k).rev() {
        let (c, y, x) = (carry_in(i), tw[i], aw[i]);
        b.ccx(c, y, x)?;
        b.cx(x, c)?;
        b.cx(c, y)?;
    }
    decrement(b, t, &[c0])?;
    increment(b, &t.high_from(n - 1), &[c0])
}
