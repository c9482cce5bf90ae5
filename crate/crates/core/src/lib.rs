//! Reversible arithmetic built from dirty ancillae and lowered to
//! NOT/CNOT/Toffoli. The `shor` module assembles it into period finding
//! with `n + 2` clean and `n - 1` dirty wires.

pub mod arith;
pub mod catalog;
pub mod circuit;
pub mod error;
pub mod lowering;
pub mod modular;
pub mod shor;
pub mod sim;

pub use circuit::{AncillaLedger, BorrowKind, BuildOptions, Builder, Circuit, Gate, GateKind, Register, Wire};
pub use error::{Error, Result};
pub use lowering::{lower, measure_resources, OpKind, OpNode, ResourceReport};
