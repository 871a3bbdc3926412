//! Exact computation of thin-completion hierarchy levels for subsets of groups.

pub mod bounds;
pub mod cayley;
pub mod group;
pub mod ideal;
pub mod oracle;
pub mod sample;
pub mod selftest;
pub mod symbolic;
pub mod tau;
