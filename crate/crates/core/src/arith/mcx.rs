//! Multi-control reduction and multi-target NOTs.

use crate::circuit::{Builder, Gate, Wire};
use crate::error::{Error, Result};

/// Reduces a gate with more than two controls to Toffolis, borrowing the
/// lowest-indexed wires in `0..width` that the gate does not touch.
///
/// With `c - 2` such wires the result has exactly `4c - 8` Toffolis. With
/// fewer (but at least one) the controls are split in half around a single
/// borrowed wire and each half is reduced recursively.
pub fn lower_mcx(gate: &Gate, width: usize) -> Result<Vec<Gate>> {
    let free: Vec<Wire> = (0..width as u32).map(Wire).filter(|w| !gate.touches(*w)).collect();
    lower_mcx_in(gate, &free)
}

/// [`lower_mcx`] drawing helpers from `free` in order.
pub(crate) fn lower_mcx_in(gate: &Gate, free: &[Wire]) -> Result<Vec<Gate>> {
    let c = gate.controls.len();
    if c <= 2 {
        return Ok(vec![gate.clone()]);
    }
    if free.len() >= c - 2 {
        return Ok(barenco(&gate.controls, gate.target, &free[..c - 2]));
    }
    if free.is_empty() {
        return Err(Error::InsufficientFreeWires { needed: 1, available: 0 });
    }
    // Split: t ^= A.B via w ^= A; t ^= B.w; w ^= A; t ^= B.w.
    let w = free[0];
    let half = c.div_ceil(2);
    let (a, rest) = gate.controls.split_at(half);
    let mut b_ctrl = rest.to_vec();
    b_ctrl.push(w);
    let first_gate = Gate::mcx(a, w);
    let second_gate = Gate::mcx(&b_ctrl, gate.target);
    let avoid = |g: &Gate| free.iter().copied().chain(gate.wires()).filter(|f| !g.touches(*f)).collect::<Vec<_>>();
    let first = lower_mcx_in(&first_gate, &avoid(&first_gate))?;
    let second = lower_mcx_in(&second_gate, &avoid(&second_gate))?;
    let mut out = Vec::with_capacity(2 * (first.len() + second.len()));
    for _ in 0..2 {
        out.extend_from_slice(&first);
        out.extend_from_slice(&second);
    }
    Ok(out)
}

/// Wires used by `lowered` that `gate` itself does not touch.
pub(crate) fn helper_wires(gate: &Gate, lowered: &[Gate]) -> Vec<Wire> {
    let mut out: Vec<Wire> = Vec::new();
    for g in lowered {
        for w in g.wires() {
            if !gate.touches(w) && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

/// The `4c - 8` Toffoli ladder over `c - 2` dirty helpers.
fn barenco(controls: &[Wire], target: Wire, helpers: &[Wire]) -> Vec<Gate> {
    let c = controls.len();
    let mut out = Vec::with_capacity(4 * c - 8);
    for _ in 0..2 {
        out.push(Gate::ccx(controls[c - 1], helpers[c - 3], target));
        for i in (1..=c - 3).rev() {
            out.push(Gate::ccx(controls[i + 1], helpers[i - 1], helpers[i]));
        }
        out.push(Gate::ccx(controls[0], controls[1], helpers[0]));
        for i in 1..=c - 3 {
            out.push(Gate::ccx(controls[i + 1], helpers[i - 1], helpers[i]));
        }
    }
    out
}

/// Toggles every target iff all controls are on.
pub fn multi_not(b: &mut Builder, controls: &[Wire], targets: &[Wire]) -> Result<()> {
    match (controls.len(), targets.len()) {
        (_, 0) => Ok(()),
        (0, _) => targets.iter().try_for_each(|&t| b.x(t)),
        (1, _) => targets.iter().try_for_each(|&t| b.cx(controls[0], t)),
        (_, 1) => b.mcx(controls, targets[0]),
        _ => {
            let (first, rest) = targets.split_first().expect("nonempty");
            for &t in rest {
                b.cx(*first, t)?;
            }
            b.mcx(controls, *first)?;
            for &t in rest {
                b.cx(*first, t)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;

    fn check_mcx(c: usize, width: usize) {
        let controls: Vec<Wire> = (0..c as u32).map(Wire).collect();
        let gate = Gate::mcx(&controls, Wire(c as u32));
        let lowered = lower_mcx(&gate, width).unwrap();
        let mut circ = Circuit::new(width);
        for g in lowered {
            circ.push(g).unwrap();
        }
        for s in 0..(1u64 << width) {
            assert_eq!(circ.apply(s), gate.apply(s), "c={c} width={width} state={s:b}");
        }
    }

    #[test]
    fn barenco_counts() {
        for c in 3..=12 {
            let controls: Vec<Wire> = (0..c as u32).map(Wire).collect();
            let g = Gate::mcx(&controls, Wire(c as u32));
            assert_eq!(lower_mcx(&g, 2 * c).unwrap().len(), 4 * c - 8);
        }
    }

    #[test]
    fn barenco_exhaustive() {
        check_mcx(3, 5);
        check_mcx(4, 7);
        check_mcx(5, 9);
    }

    #[test]
    fn split_fallback_exhaustive() {
        check_mcx(4, 6);
        check_mcx(5, 7);
        check_mcx(6, 8);
    }

    #[test]
    fn no_free_wire() {
        let g = Gate::mcx(&[Wire(0), Wire(1), Wire(2)], Wire(3));
        assert!(matches!(lower_mcx(&g, 4), Err(Error::InsufficientFreeWires { .. })));
    }
}
