//! Fractional Brownian motion: grid covariances and exact samplers.

pub mod covariance;
pub mod export;
pub mod properties;
pub mod sampler;

pub use covariance::{alpha_diag, cov_rh, eps_del, grid_inner, rho, rho_power_sum, FbmGrid, GridInner, LagSeries};
pub use export::{read_paths, write_paths, PathFile};
pub use sampler::{
    embedding_spectrum, increment_covariance, levels_from_increments, sample_paths, FbmPathBatch, IncrementSampler,
    SamplingMethod,
};
