pub mod cli;
pub mod doubly;
pub mod error;
pub mod exactmat;
pub mod sse;
pub mod stochastic;
