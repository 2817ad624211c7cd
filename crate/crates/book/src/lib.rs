//! The guide's chapters, compiled as doc-tests so every snippet stays runnable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/tagged.md")]
pub mod tagged {}
#[doc = include_str!("../../../book/src/dictionary.md")]
pub mod dictionary {}
#[doc = include_str!("../../../book/src/augmentation.md")]
pub mod augmentation {}
#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}
#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}
#[doc = include_str!("../../../book/src/backends.md")]
pub mod backends {}
#[doc = include_str!("../../../book/src/configuration.md")]
pub mod configuration {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
