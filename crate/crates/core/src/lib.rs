//! Tree-strategy weight-function certificates for graph pebbling.
//!
//! The crate covers the whole pipeline: graphs and their products
//! ([`graph`], [`catalog`]), a brute-force oracle for ground truth on small
//! graphs ([`oracle`]), exact certificate checking ([`dyadic`], [`strategy`], [`cert`],
//! [`certfile`], [`lp`]), MILP model generation and solution ingestion ([`milp`]) and a
//! solver-free strategy generator ([`heuristic`]), plus oracle-backed
//! property sweeps ([`sweep`]).

pub mod catalog;
pub mod cert;
pub mod certfile;
pub mod config;
pub mod dyadic;
pub mod graph;
pub mod heuristic;
pub mod lp;
pub mod milp;
pub mod oracle;
pub mod par;
pub mod strategy;
pub mod sweep;

pub use catalog::catalog;
pub use cert::{CertificateBundle, CertificateReport};
pub use config::Configuration;
pub use dyadic::DyadicRational;
pub use graph::{ArcGraph, Graph, GraphError, ProductVertex};
pub use par::Execution;
pub use strategy::TreeStrategy;
