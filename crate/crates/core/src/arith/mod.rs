//! Non-modular constructions: adders, offsets, increments, comparisons,
//! bit permutations, multi-nots and multi-control reduction.

pub mod adder;
pub mod bits;
pub mod carry;
pub mod commutator;
pub mod compare;
pub mod increment;
pub mod mcx;
pub mod offset;

pub use adder::{add_reg, sub_reg};
pub use bits::{bit_reverse, bit_rotate};
pub use commutator::control_via_commutator;
pub use compare::{compare_lt_toggle, compare_lt_toggle_const};
pub use increment::{decrement, increment};
pub use mcx::{lower_mcx, multi_not};
pub use offset::offset;

/// `2^n - 1`, saturating at 128 bits.
pub fn mask(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// `-k mod 2^n`.
pub fn neg_mod(k: u128, n: usize) -> u128 {
    k.wrapping_neg() & mask(n)
}
