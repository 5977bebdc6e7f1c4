//! Translation of Event-B machines into JML-annotated abstract Java classes,
//! together with executable semantics for both notations and an exhaustive
//! finite-universe check that every JML transition of a translated event is
//! also a transition of the source event.

pub mod checker;
pub mod cli;
pub mod eventb;
pub mod jml;
pub mod semantics;
pub mod translate;
