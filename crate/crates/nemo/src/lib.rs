//! Std companion of `nemo-core`: corpus files, the in-memory fixture
//! network, the synthetic corpus generator and the evaluation runner.

pub mod audit;
pub mod corpus;
pub mod fixture;
pub mod generate;
pub mod report;
pub mod runner;
