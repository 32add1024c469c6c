#![no_std]

extern crate alloc;

pub mod engine;
pub mod env;
pub mod gdy;
pub mod observers;
pub mod yaml;
