//! Exact sum-product combinatorics over the rationals.
//!
//! Sets of rationals, their sumsets and product sets, representation
//! functions and higher energies, coset coverings of few-prime sets,
//! S-unit solution counts and an inequality harness. Every count is exact.

pub mod budget;
pub mod covering;
pub mod energy;
pub mod error;
pub mod factored;
pub mod families;
pub mod io;
pub(crate) mod kernel;
pub mod prime;
pub mod rational;
pub(crate) mod serde_integer;
pub mod set;
pub mod setops;
pub mod sunit;
pub mod verify;

pub use budget::Budget;
pub use energy::{Counter, EnergyMethod, EnergyReport};
pub use error::{Error, Result};
pub use factored::{factor, factor_over, FactoredRational};
pub use families::FamilySpec;
pub use io::LoadedSet;
pub use prime::{Prime, PrimePool, DEFAULT_FACTOR_BOUND};
pub use rational::ExactRational;
pub use set::FiniteSet;
pub use verify::{CheckReport, Grade, Quantity, Relation};

pub use rug;
