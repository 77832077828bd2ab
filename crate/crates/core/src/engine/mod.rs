//! Monte-Carlo evaluation of the uplink SE lower bound.

mod accumulator;
mod reception;
mod report;
mod run;

pub use accumulator::{spectral_efficiency, SinrAccumulator, UserSinr};
pub use reception::{combine_terms, simulate_uplink_reception, CombinedTerms, UplinkReception};
pub use report::{aggregate_cdf, percentile, ExclusionCount, SeReport, SeSummary, UserRecord};
pub use run::{run_experiment, DetectorOutcome, DropSimulation};
