//! Batch command line and HTTP service for `voidlens`.
//!
//! [`service`] exposes the pipeline over HTTP along with collaboration rooms
//! from [`collab`]; [`cli`] drives batch runs through [`job`].

pub mod cli;
pub mod collab;
pub mod job;
pub mod service;
pub mod translate;
