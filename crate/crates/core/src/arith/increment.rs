//! Increments built from same-size subtractions and borrowed wires.

use crate::arith::adder::{add_reg, sub_reg};
use crate::arith::mcx::multi_not;
use crate::circuit::{wires_of, Builder, IncrementStrategy, Register, Wire};
use crate::error::{Error, Result};

/// `t += 1 (mod 2^|t|)` when every control is on.
///
/// With `|t|` borrowable wires `x`, the register is incremented by
/// subtracting `x` and then `!x`. Otherwise one borrowed wire suffices: the
/// register is split in half, the high half absorbs the low half's carry
/// through a toggle-controlled add/subtract pair, and the low half is
/// incremented using the high half as its `x`. Even sizes peel the LSB off
/// first.
pub fn increment(b: &mut Builder, t: &Register, controls: &[Wire]) -> Result<()> {
    let n = t.len();
    match n {
        0 => return Ok(()),
        1 => return multi_not(b, controls, t.wires()),
        _ => {}
    }
    let excluded = wires_of(&[t], controls);
    let available = b.available_dirty(&excluded);
    let many = match b.options().increment {
        IncrementStrategy::ManyDirty => {
            if available < n {
                return Err(Error::InsufficientFreeWires { needed: n, available });
            }
            true
        }
        IncrementStrategy::SingleDirty => false,
        IncrementStrategy::Auto => b.available_busy(&excluded) >= n,
    };
    if many {
        let x = b.borrow_dirty(n, &excluded)?;
        increment_with(b, t, &Register::from(x.clone()), controls)?;
        return b.release_dirty(&x);
    }
    if available == 0 {
        return Err(Error::InsufficientFreeWires { needed: 1, available: 0 });
    }
    if n.is_multiple_of(2) {
        let mut inner_controls = controls.to_vec();
        inner_controls.push(t.get(0));
        increment(b, &t.high_from(1), &inner_controls)?;
        return multi_not(b, controls, &[t.get(0)]);
    }
    let h = n.div_ceil(2);
    let low = t.low(h);
    let d = b.borrow_dirty(1, &excluded)?;
    let high = t.high_from(h).with_lsb(d[0]);
    let mut carry_controls = low.wires().to_vec();
    carry_controls.extend_from_slice(controls);
    multi_not(b, &carry_controls, high.wires())?;
    add_reg(b, &low, &high, &[])?;
    multi_not(b, &carry_controls, high.wires())?;
    sub_reg(b, &low, &high, &[])?;
    increment_with(b, &low, &high, controls)?;
    b.release_dirty(&d)
}

/// `t -= 1 (mod 2^|t|)` when every control is on.
pub fn decrement(b: &mut Builder, t: &Register, controls: &[Wire]) -> Result<()> {
    b.inverted(|b| increment(b, t, controls))
}

/// Increment of `t` using the equally sized dirty register `x`.
fn increment_with(b: &mut Builder, t: &Register, x: &Register, controls: &[Wire]) -> Result<()> {
    debug_assert_eq!(t.len(), x.len());
    sub_reg(b, x, t, &[])?;
    if controls.is_empty() {
        multi_not(b, &[], x.wires())?;
        sub_reg(b, x, t, &[])?;
        multi_not(b, &[], x.wires())
    } else {
        let both = x.concat(t);
        multi_not(b, controls, both.wires())?;
        add_reg(b, x, t, &[])?;
        multi_not(b, controls, both.wires())
    }
}
