//! Controlling an operation through a commutator.

use crate::circuit::{Builder, Wire};
use crate::error::Result;

/// Emits `G, H_c, G^-1, H_c` in temporal order.
///
/// When `G·G = U` and `H·G·H = G^-1` with `H` self-inverse, the block equals
/// `U` with the controls on and the identity otherwise. Only `H` ever
/// receives the controls; `g` is run once forwards and once inverted.
pub fn control_via_commutator(
    b: &mut Builder,
    controls: &[Wire],
    mut g: impl FnMut(&mut Builder) -> Result<()>,
    mut h: impl FnMut(&mut Builder, &[Wire]) -> Result<()>,
) -> Result<()> {
    g(b)?;
    h(b, controls)?;
    b.inverted(&mut g)?;
    h(b, controls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mcx::multi_not;
    use crate::arith::offset::offset;
    use crate::circuit::Register;

    #[test]
    fn doubled_offset_on_extended_register() {
        let mut b = Builder::new();
        let t = b.add_operand(4);
        let c = b.add_operand(1);
        let d = b.add_dirty_pool(2);
        let ext = t.with_lsb(d.get(0));
        let k = 3u128;
        let targets: Vec<Wire> = ext.wires().to_vec();
        control_via_commutator(
            &mut b,
            c.wires(),
            |b| offset(b, k, &ext, &[]),
            |b, ctl| multi_not(b, ctl, &targets),
        )
        .unwrap();
        let circ = b.finish().unwrap();
        let low = Register::from(t.wires().to_vec());
        for s in 0..(1u64 << circ.width) {
            let on = c.value_of(s) == 1;
            let want = (low.value_of(s) + if on { k as u64 } else { 0 }) % 16;
            let out = circ.apply(s);
            assert_eq!(low.value_of(out), want);
            assert_eq!(out & !low.mask(), s & !low.mask());
        }
    }
}
