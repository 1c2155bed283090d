//! The auxiliary walk on the positive integers.
//!
//! From 1 the walk moves to 2. From 2 it moves to 1 or 3 with probability
//! 1/2 each. From `k >= 3` it moves down with probability 3/4 and up with
//! probability 1/4. It stochastically bounds the plate count from below and
//! its first-return time to 1 controls how often the table collapses to a
//! single plate.

mod identities;
mod mean;
mod pmf;
mod walk;

pub use identities::{
    catalan, verify_binomial_series, verify_catalan_convolution, verify_gould_identity, BinomialSeriesReport,
    CatalanConvolutionReport, CatalanConvolutionRow, GouldReport, GouldRow, SeriesCheck,
};
pub use mean::{
    mean_return_time_series, mean_return_time_stationary, stationary_distribution, SeriesEstimate, StationaryDist,
    PRINTED_MEAN_RETURN_TIME,
};
pub use pmf::{
    closed_form_with_constant, first_return_cdf, first_return_pmf_closed, first_return_pmf_convolution,
    first_return_pmf_dp, printed_convolution_pmf, printed_first_return_pmf, printed_first_return_pmf_at_one,
    ReturnTimePMF, UnitConvention,
};
pub use walk::{chain_step, down_probability, simulate_walk, up_probability, WalkRunStats};
