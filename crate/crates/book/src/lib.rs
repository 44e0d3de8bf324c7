//! Compiles the guide under `book/src` so its listings run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/frames.md")]
pub mod frames {}

#[doc = include_str!("../../../book/src/mass-functions.md")]
pub mod mass_functions {}

#[doc = include_str!("../../../book/src/networks.md")]
pub mod networks {}

#[doc = include_str!("../../../book/src/explanations.md")]
pub mod explanations {}

#[doc = include_str!("../../../book/src/files-and-cli.md")]
pub mod files_and_cli {}
