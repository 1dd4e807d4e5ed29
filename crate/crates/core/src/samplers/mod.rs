//! Random-walk Metropolis, equi-energy, limiting and parallel-tempering
//! samplers driven in lockstep over a ladder of levels.

mod config;
mod moves;
mod ring_index;
mod run;

pub use config::{InitialLaw, LevelSchedule, RunConfig, SamplerKind};
pub use moves::{mh_step, pt_swap_probability, MoveKind, Proposal};
pub use ring_index::RingIndex;
pub use run::{run_multilevel, LevelTrace, MultiLevelRun, Observer, Trace};
