//! Acceleration driven clause learning for linear constrained Horn clauses
//! over integer and Boolean arithmetic.
//!
//! [`driver::solve`] goes from SMT-LIB text to a verdict. The modules below
//! it can be used on their own: [`smtlib`] parses problems, [`engine`] runs
//! the rule loop, [`accel`] accelerates loops, [`automata`] decides
//! redundancy, and [`witness`] writes, checks and expands refutations.

pub mod accel;
pub mod automata;
pub mod chc;
pub mod driver;
pub mod engine;
pub mod formula;
pub mod smt;
pub mod smtlib;
pub mod witness;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/input.md")]
    pub struct Input;
    #[doc = include_str!("../../../book/src/engine.md")]
    pub struct Engine;
    #[doc = include_str!("../../../book/src/acceleration.md")]
    pub struct Acceleration;
    #[doc = include_str!("../../../book/src/redundancy.md")]
    pub struct Redundancy;
    #[doc = include_str!("../../../book/src/witnesses.md")]
    pub struct Witnesses;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
