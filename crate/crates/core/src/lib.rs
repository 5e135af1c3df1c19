//! A permutation-and-rotation cipher for 2D and 3D point clouds, a
//! linear-algebra decryption classifier, and tools for checking whether
//! the ciphertext stays inside the plaintext's bounding sphere.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cipher;
pub mod error;
pub mod geometry;
pub mod keystream;
pub mod stability;

pub use error::{Error, Result};
