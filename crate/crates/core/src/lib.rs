//! Taylor-series cosine and sine checked three ways: in exact rational
//! arithmetic, in an axiomatized fix-point arithmetic, and in IEEE-754
//! binary32.
//!
//! * [`exact`]: canonical arbitrary-precision rationals.
//! * [`fixpoint`]: the fix-point datatype with half-even rounding.
//! * [`oracle`]: exact-arithmetic algorithms for pi, cos and sin whose loop
//!   invariants are asserted at every loop head.
//! * [`fixtrig`]: fix-point cos/sin with a-priori error bounds and a
//!   lockstep tracer comparing every term against its exact counterpart.
//! * [`floatrepro`]: the naive binary32 cosine and its divergence scan.
//! * [`verify`]: seeded property suites shared by the CLI and the tests.

pub mod exact;
pub mod fixpoint;
pub mod fixtrig;
pub mod floatrepro;
pub mod oracle;
pub mod verify;

pub use exact::{Rat, RatError};
pub use fixpoint::{parse_format, FixError, FixFormat, FixNum};
pub use oracle::{AlgoResult, OracleError, Series};
