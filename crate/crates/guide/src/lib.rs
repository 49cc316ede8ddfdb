//! Guide chapters compiled as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/blankets.md")]
mod blankets {}

#[doc = include_str!("../../../book/src/inference.md")]
mod inference {}

#[doc = include_str!("../../../book/src/detection.md")]
mod detection {}

#[doc = include_str!("../../../book/src/isolation.md")]
mod isolation {}

#[doc = include_str!("../../../book/src/selection.md")]
mod selection {}

#[doc = include_str!("../../../book/src/experiments.md")]
mod experiments {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
