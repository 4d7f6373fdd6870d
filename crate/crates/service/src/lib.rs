//! Command line entry points and the HTTP service of the spine visualization
//! workbench.

pub mod api;
pub mod cli;
pub mod store;

pub use api::router;
pub use store::Store;
