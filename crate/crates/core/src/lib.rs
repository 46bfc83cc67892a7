//! Hash-consistent large-margin proxy design and shallow hashing embeddings.
//!
//! The pipeline: solve a sphere packing problem for maximally separated
//! proxies ([`tammes`]), rotate them to be as binary as possible and
//! binarize ([`itq`]), permute proxies onto classes so proxy geometry
//! follows class similarity ([`assign`]), train a tanh hashing layer
//! against the fixed proxies ([`trainer`]), then encode, rank by Hamming
//! distance, and score retrieval ([`retrieval`]). [`theory`] holds the
//! numerical checks behind the approach; [`pipeline`] wires the stages
//! into the ablation and transfer experiments.

pub mod assign;
pub mod bits;
pub mod data;
pub mod error;
pub mod io;
pub mod itq;
pub mod pipeline;
pub mod proxy;
pub mod report;
pub mod retrieval;
pub mod rng;
pub mod tammes;
pub mod theory;
pub mod trainer;

pub use error::{Error, Result};
pub use proxy::{margins, random_binary_proxies, random_proxies, ProxyKind, ProxySet};
pub use tammes::{solve_tammes, TammesConfig, TammesSolution};
