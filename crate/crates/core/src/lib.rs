pub mod error;
pub mod hyper;
pub mod moments;
pub mod numeric;
pub mod pipeline;
pub mod quantum;
pub mod recognize;

pub use error::{Error, ErrorClass, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/hypergeometric.md")]
    mod hypergeometric {}
    #[doc = include_str!("../../../book/src/recognition.md")]
    mod recognition {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
