//! Generalized pseudoskeleton (CUR) decompositions over arbitrary fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod cli;
pub mod cur;
pub mod error;
pub mod field;
pub mod geninv;
pub mod io;
pub mod matrix;
pub mod tensor;
pub mod tprod;

pub use error::{Error, Result};
pub use field::{Complexes, Field, FieldSpec, PrimeField, Rationals, Reals, C64};
pub use matrix::{IndexSet, Matrix, RankNormalForm};

/// The deterministic generator used for every seeded operation.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The guide's code blocks, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/generalized-inverses.md")]
    mod generalized_inverses {}
    #[doc = include_str!("../../../book/src/cur.md")]
    mod cur {}
    #[doc = include_str!("../../../book/src/tensors.md")]
    mod tensors {}
    #[doc = include_str!("../../../book/src/t-product.md")]
    mod t_product {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
