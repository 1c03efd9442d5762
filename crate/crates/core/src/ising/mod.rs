//! Problem Hamiltonians, spin states and annealing schedules.

mod instance;
mod problem;
mod schedule;
mod state;

pub use instance::{generate_instance, EdgeKind, Topology};
pub use problem::IsingProblem;
pub use schedule::{schedule_at, Scales, Schedule, SchedulePoint};
pub use state::SpinState;

pub(crate) use state::{lex_cmp_words, words_for, WORD_BITS};
