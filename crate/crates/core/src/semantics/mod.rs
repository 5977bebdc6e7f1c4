//! Finite-universe semantics of Event-B events and of JML method
//! specifications, as sets of state pairs.

mod eval;
mod relations;
mod universe;
mod value;

pub use eval::{EvalError, Evaluator};
pub use relations::{
    eb_assg_rel, eb_event_rel, eb_init_states, jml_initially_states, jml_invariant_states,
    jml_method_rel, EbModel, EbStep, JmlModel, Stutter,
};
pub use universe::{
    enumerate_states, machine_vars, SemanticsError, Universe, DEFAULT_CARRIER_SIZE,
    DEFAULT_CEILING, DEFAULT_INT_RANGE,
};
pub use value::{format_state, state, Env, Relation, State, Transition, Value};
