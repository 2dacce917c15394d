//! Classical causal networks, graphical separation criteria and the Bell
//! scenario's local polytope, small enough to check exhaustively.
//!
//! * [`graph`]: typed DAGs and their text format.
//! * [`separation`]: d-separation, q-separation and a path-enumeration oracle.
//! * [`distributions`]: exact joint tables, CI tests and graph audits.
//! * [`bell`]: behaviors, CHSH, local-polytope membership and related audits.
//! * [`cli`]: the command-line front end.

pub mod bell;
pub mod cli;
pub mod distributions;
pub mod graph;
pub mod report;
pub mod separation;
