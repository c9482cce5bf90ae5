//! Comparisons toggled onto a flag wire.

use crate::arith::adder::{add_reg, sub_reg};
use crate::arith::carry::carry_toggle;
use crate::arith::mcx::multi_not;
use crate::arith::offset::offset;
use crate::arith::{mask, neg_mod};
use crate::circuit::{wires_of, Builder, CompareStrategy, Register, Wire};
use crate::error::Result;

/// `flag ^= [y < a]` when every control is on. Requires `|y| >= |a|`.
///
/// The flag is appended above `y` as a borrow bit: subtracting `a` flips it
/// exactly when `y < a`, and adding `a` back into `y` alone clears the rest.
pub fn compare_lt_toggle(
    b: &mut Builder,
    a: &Register,
    y: &Register,
    flag: Wire,
    controls: &[Wire],
) -> Result<()> {
    let uncontrolled = |b: &mut Builder, f: Wire| -> Result<()> {
        let ext = y.concat(&Register::from(vec![f]));
        sub_reg(b, a, &ext, &[])?;
        add_reg(b, a, y, &[])
    };
    if controls.is_empty() {
        return uncontrolled(b, flag);
    }
    through_dirty(b, &wires_of(&[a, y], &[flag]), controls, flag, uncontrolled)
}

/// `flag ^= [y < k]` when every control is on.
///
/// Uses the carry of `y + 2^n - k` when `n - 1` wires are borrowable,
/// otherwise a pair of offsets.
pub fn compare_lt_toggle_const(
    b: &mut Builder,
    k: u128,
    y: &Register,
    flag: Wire,
    controls: &[Wire],
) -> Result<()> {
    let n = y.len();
    if k == 0 {
        return Ok(());
    }
    if n < 128 && k > mask(n) {
        return multi_not(b, controls, &[flag]);
    }
    let excluded = wires_of(&[y], &[&[flag][..], controls].concat());
    let use_carry = match b.options().compare {
        CompareStrategy::Carry => true,
        CompareStrategy::Offset => false,
        CompareStrategy::Auto => b.available_busy(&excluded) + 1 >= n,
    };
    if use_carry {
        carry_toggle(b, y, neg_mod(k, n), flag, controls)?;
        return multi_not(b, controls, &[flag]);
    }
    let uncontrolled = |b: &mut Builder, f: Wire| -> Result<()> {
        let ext = y.concat(&Register::from(vec![f]));
        offset(b, neg_mod(k, n + 1), &ext, &[])?;
        offset(b, k, y, &[])
    };
    if controls.is_empty() {
        return uncontrolled(b, flag);
    }
    through_dirty(b, &wires_of(&[y], &[flag]), controls, flag, uncontrolled)
}

/// Computes an uncontrolled toggle into a borrowed wire `d` twice, with
/// `flag ^= controls & d` after each, so `flag` picks up the toggle exactly
/// when the controls are on.
fn through_dirty(
    b: &mut Builder,
    operands: &[Wire],
    controls: &[Wire],
    flag: Wire,
    mut toggle: impl FnMut(&mut Builder, Wire) -> Result<()>,
) -> Result<()> {
    let excluded = [operands, controls].concat();
    let d = b.borrow_dirty(1, &excluded)?;
    let mut ctl = controls.to_vec();
    ctl.push(d[0]);
    for _ in 0..2 {
        toggle(b, d[0])?;
        b.mcx(&ctl, flag)?;
    }
    b.release_dirty(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::BuildOptions;

    #[test]
    fn register_exhaustive() {
        for n in 1..=3 {
            for c in 0..=2 {
                let mut b = Builder::new();
                let a = b.add_operand(n);
                let y = b.add_operand(n);
                let f = b.add_operand(1).get(0);
                let ctl = b.add_operand(c);
                b.add_dirty_pool(2);
                compare_lt_toggle(&mut b, &a, &y, f, ctl.wires()).unwrap();
                let circ = b.finish().unwrap();
                for s in 0..(1u64 << circ.width) {
                    let on = ctl.value_of(s) == (1 << c) - 1;
                    let lt = y.value_of(s) < a.value_of(s);
                    assert_eq!(circ.apply(s), s ^ (((on && lt) as u64) << f.0));
                }
            }
        }
    }

    #[test]
    fn const_exhaustive() {
        for strategy in [CompareStrategy::Offset, CompareStrategy::Carry] {
            for n in 1..=4usize {
                for c in 0..=1 {
                    for k in 0..=(1u128 << n) + 1 {
                        let mut b = Builder::new();
                        b.set_options(BuildOptions { compare: strategy, ..Default::default() });
                        let y = b.add_operand(n);
                        let f = b.add_operand(1).get(0);
                        let ctl = b.add_operand(c);
                        b.add_dirty_pool(n.max(2));
                        compare_lt_toggle_const(&mut b, k, &y, f, ctl.wires()).unwrap();
                        let circ = b.finish().unwrap();
                        for s in 0..(1u64 << circ.width) {
                            let on = ctl.value_of(s) == (1 << c) - 1;
                            let lt = (y.value_of(s) as u128) < k;
                            assert_eq!(circ.apply(s), s ^ (((on && lt) as u64) << f.0), "{strategy:?} n={n} k={k} c={c}");
                        }
                    }
                }
            }
        }
    }
}
