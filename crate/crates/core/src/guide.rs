//! The guide chapters under `book/src` compiled in as module docs, so that
//! `cargo test --doc` runs every code snippet in the book.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model_and_units {}

#[doc = include_str!("../../../book/src/two-body.md")]
pub mod two_body {}

#[doc = include_str!("../../../book/src/three-body.md")]
pub mod three_body {}

#[doc = include_str!("../../../book/src/contact-relations.md")]
pub mod contact_relations {}

#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerical_toolbox {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod command_line {}
