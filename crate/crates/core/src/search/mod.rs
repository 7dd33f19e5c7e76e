//! Constructive search: the step-by-step decode loop with feasibility
//! masking, rule-based and external action scorers, greedy / sampling /
//! beam / multi-start decoding, simulation-guided beam search, and the
//! fixed-endpoint 2-Opt path used as a feasibility witness.

mod decode;
mod greedy;
mod path;
mod scorer;
mod sgbs;
mod state;
mod trajectory;

pub use decode::{
    action_probabilities, beam_trace, best_route, decode, DecodeConfig, DecodeMode,
};
pub use greedy::{default_starts, greedy_search, multi_start_greedy, MultiStart};
pub use path::{nearest_neighbor_path, two_opt_path};
pub use scorer::{ExternalScorer, FitnessScorer, Scorer};
pub use sgbs::{sgbs, SgbsConfig};
pub use state::{compute_mask, DecodeState, MaskMode, MaskVector};
pub use trajectory::{read_records, write_trajectories, ExternalRecord, LogitRecord, TrajectoryRecord};
