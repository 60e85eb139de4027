//! Exact Malliavin calculus on a finite-dimensional Gaussian space.

pub mod calculus;
pub mod hermite;
pub mod identities;
pub mod poly;
pub mod space;
pub mod tensor;

pub use calculus::{
    chaos_projection, derivative, derivative_tensor, isonormal, multiple_integral, ou_generator, ou_generator_chaos,
    skorohod, skorohod_partial, Basis, MultipleIntegral, PolyTensor,
};
pub use hermite::{hermite_eval, hermite_monic, Normalization};
pub use poly::{wick_expectation, PolyRv};
pub use space::{GaussianSpace, HilbertVec};
pub use tensor::Tensor;
