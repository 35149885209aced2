//! Kepler's equation through its Kapteyn (Bessel) series, resummed with
//! Levin-type nonlinear sequence transformations, together with the Debye
//! expansion machinery used to probe the Stieltjes character of that series.

pub mod arith;
pub mod bessel;
pub mod debye;
pub mod error;
pub mod kapteyn;
pub mod kepler;
pub mod oracle;
pub mod repro;
pub mod selfcheck;
pub mod seqxform;

pub use arith::{with_precision, BigComplex, BigRational, BigReal, Precision};
pub use error::{Error, Result};
pub use seqxform::{RemainderEstimate, TermSequence, TransformKind, TransformTable};
