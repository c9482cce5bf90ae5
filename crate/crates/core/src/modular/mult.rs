//! Modular scaled addition and bimultiplication.

use crate::circuit::{Builder, Register, Wire};
use crate::error::{Error, Result};
use crate::modular::ops::{mod_double, mod_halve, mod_negate, mod_offset};
use crate::modular::{mod_inverse, require_odd};

/// `y -> y + k·x (mod r)`, `x` unchanged.
///
/// Halves `y` once per bit below the MSB, then walks the bits of `x` from
/// the top, adding `k` under each bit and doubling in between.
pub fn mod_scale_add(
    b: &mut Builder,
    k: u64,
    r: u64,
    x: &Register,
    y: &Register,
    controls: &[Wire],
) -> Result<()> {
    require_odd(r)?;
    if k >= r {
        return Err(Error::InvalidParameter(format!("multiplier {k} not below modulus {r}")));
    }
    if k == 0 || x.is_empty() {
        return Ok(());
    }
    let n = x.len();
    for _ in 1..n {
        mod_halve(b, r, y, &[])?;
    }
    let mut bit_controls = controls.to_vec();
    bit_controls.push(x.get(0));
    let last = bit_controls.len() - 1;
    for i in (0..n).rev() {
        bit_controls[last] = x.get(i);
        mod_offset(b, k, r, y, &bit_controls)?;
        if i > 0 {
            mod_double(b, r, y, &[])?;
        }
    }
    Ok(())
}

/// `(x, y) -> (k·x mod r, k⁻¹·y mod r)` when every control is on.
///
/// Three scaled additions leave `(-k⁻¹·y, k·x)`; a swap and a negation of
/// the second register finish the job. No wires beyond the two registers
/// and the controls are needed.
pub fn mod_bimultiply(
    b: &mut Builder,
    k: u64,
    r: u64,
    x: &Register,
    y: &Register,
    controls: &[Wire],
) -> Result<()> {
    require_odd(r)?;
    let k = k % r;
    let inv = mod_inverse(k, r)?;
    if k == 1 {
        return Ok(());
    }
    mod_scale_add(b, k, r, x, y, controls)?;
    mod_scale_add(b, r - inv, r, y, x, controls)?;
    mod_scale_add(b, k, r, x, y, controls)?;
    for (&xi, &yi) in x.wires().iter().zip(y.wires()) {
        let mut ctl = controls.to_vec();
        ctl.push(xi);
        b.cx(yi, xi)?;
        b.mcx(&ctl, yi)?;
        b.cx(yi, xi)?;
    }
    mod_negate(b, r, y, controls)
}
