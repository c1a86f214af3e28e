pub mod berger_curve;
pub mod bound;
pub mod compare_ode;
pub mod s1_dissect;
pub mod sl_solve;
pub mod tube_sweep;

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// All verification checks of the run held.
    pub passed: bool,
    pub summary: String,
}
