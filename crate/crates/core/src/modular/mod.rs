//! Modular constructions: flips, modular offsets and additions, negation,
//! doubling and halving, scaled addition and bimultiplication.
//!
//! Modular operands hold values below the odd modulus `R` in `ceil(lg R)`
//! wires. Outside that domain the circuits are still permutations but their
//! action is unspecified.

pub mod flips;
pub mod mult;
pub mod ops;

pub use flips::{bi_flip, bi_flip_reg, pivot_flip, pivot_flip_reg};
pub use mult::{mod_bimultiply, mod_scale_add};
pub use ops::{mod_add_reg, mod_double, mod_halve, mod_negate, mod_offset};

use num_integer::Integer;

use crate::error::{Error, Result};

/// Bits needed for values below `r`.
pub fn register_size(r: u64) -> usize {
    (64 - r.saturating_sub(1).leading_zeros()) as usize
}

pub(crate) fn require_odd(r: u64) -> Result<()> {
    if r < 3 || r.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("modulus {r} must be odd and at least 3")));
    }
    Ok(())
}

/// Inverse of `k` modulo `r`, or the gcd when there is none.
pub fn mod_inverse(k: u64, r: u64) -> Result<u64> {
    let e = ((k % r) as i128).extended_gcd(&(r as i128));
    if e.gcd != 1 {
        return Err(Error::NotInvertible { k, r, gcd: e.gcd as u64 });
    }
    Ok(e.x.rem_euclid(r as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(register_size(15), 4);
        assert_eq!(register_size(16), 4);
        assert_eq!(register_size(17), 5);
        assert_eq!(register_size(21), 5);
        assert_eq!(register_size(7), 3);
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(7, 15).unwrap(), 13);
        assert_eq!(mod_inverse(6, 15), Err(Error::NotInvertible { k: 6, r: 15, gcd: 3 }));
        for r in [5u64, 7, 15, 21] {
            for k in 1..r {
                if let Ok(inv) = mod_inverse(k, r) {
                    assert_eq!(k * inv % r, 1);
                }
            }
        }
    }
}
