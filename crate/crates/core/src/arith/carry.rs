//! Carry-out of a constant addition, toggled onto a wire.

use crate::arith::mask;
use crate::circuit::{wires_of, Builder, Register, Wire};
use crate::error::Result;

/// `t ^= [a + k >= 2^|a|]` when every control is on; `a` is left unchanged.
///
/// Uses `|a| - 1` dirty wires as a chain of partial carries. The chain is
/// run twice so the garbage in the dirty wires cancels out of `t`.
pub fn carry_toggle(b: &mut Builder, a: &Register, k: u128, t: Wire, controls: &[Wire]) -> Result<()> {
    let n = a.len();
    let k = k & mask(n);
    if n == 0 || k == 0 {
        return Ok(());
    }
    if n == 1 {
        let mut ctl = controls.to_vec();
        ctl.push(a.get(0));
        return b.mcx(&ctl, t);
    }
    let d = b.borrow_dirty(n - 1, &wires_of(&[a], &[&[t][..], controls].concat()))?;
    let chain = Chain { a: a.wires(), d: &d, t, k, controls };
    for i in (1..n).rev() {
        chain.step(b, i, false)?;
    }
    chain.first(b)?;
    for i in 1..n {
        chain.step(b, i, true)?;
    }
    for i in (1..n - 1).rev() {
        chain.step(b, i, false)?;
    }
    chain.first(b)?;
    for i in 1..n - 1 {
        chain.step(b, i, true)?;
    }
    b.release_dirty(&d)
}

struct Chain<'a> {
    a: &'a [Wire],
    d: &'a [Wire],
    t: Wire,
    k: u128,
    controls: &'a [Wire],
}

impl Chain<'_> {
    fn bit(&self, i: usize) -> bool {
        (self.k >> i) & 1 == 1
    }

    fn dst(&self, i: usize) -> Wire {
        if i == self.a.len() {
            self.t
        } else {
            self.d[i - 1]
        }
    }

    fn write(&self, b: &mut Builder, sources: &[Wire], dst: Wire) -> Result<()> {
        if dst == self.t && !self.controls.is_empty() {
            let mut ctl = self.controls.to_vec();
            ctl.extend_from_slice(sources);
            b.mcx(&ctl, dst)
        } else {
            b.mcx(sources, dst)
        }
    }

    fn first(&self, b: &mut Builder) -> Result<()> {
        if self.bit(0) {
            self.write(b, &[self.a[0]], self.dst(1))?;
        }
        Ok(())
    }

    /// Carry into bit `i + 1` from bit `i` and the carry held in `d[i-1]`.
    fn step(&self, b: &mut Builder, i: usize, up: bool) -> Result<()> {
        let (ai, src, dst) = (self.a[i], self.d[i - 1], self.dst(i + 1));
        if !self.bit(i) {
            return self.write(b, &[ai, src], dst);
        }
        b.x(ai)?;
        self.write(b, &[ai, src], dst)?;
        b.x(ai)?;
        if up {
            self.write(b, &[ai], dst)?;
        }
        Ok(())
    }
}
