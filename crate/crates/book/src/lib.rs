//! Code listings of the guide, compiled and run as doctests.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/linear.md")]
pub mod linear {}

#[doc = include_str!("../../../book/src/master.md")]
pub mod master {}

#[doc = include_str!("../../../book/src/bistability.md")]
pub mod bistability {}

#[doc = include_str!("../../../book/src/pulses.md")]
pub mod pulses {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
