//! Shared test oracles.

#![allow(dead_code)]

pub mod dense;
