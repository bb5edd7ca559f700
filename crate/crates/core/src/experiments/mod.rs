//! Reproduction and verification harness: tables, trace comparisons,
//! convergence sweeps and their CSV/SVG output.

pub mod compare;
pub mod emit;
pub mod suite;
pub mod sweep;
pub mod tables;

pub use compare::{solve_foldy_lax, trace_compare, CompareOptions, TraceComparison};
pub use emit::{emit_csv, emit_svg, fmt_g12, Component, Table};
pub use suite::{run_default_suite, SuiteReport};
pub use sweep::{
    convergence_sweep, fit_slope, Metric, Reference, SlopeFit, SweepResult, SweepSpec, Verdict,
};
pub use tables::{reproduce_table1, reproduce_table2, Table1Row, Table2Row};
