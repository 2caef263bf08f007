//! Library surface of the smithcalc command-line tool: the two expression
//! DSLs, the versioned JSON document types, and the text renderers. The
//! binary in `main.rs` is a thin dispatcher over these plus
//! `smithcalc-core`.

pub mod dsl;
pub mod jsonio;
pub mod render;
