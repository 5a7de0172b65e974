//! Independent solver runs over a batch of problems.
//!
//! With the `parallel` feature (on by default) batches fan out over the
//! rayon thread pool; without it every helper runs sequentially. Results
//! are returned in input order either way.

use crate::engine::{solve, EngineError, SolveOptions, SolveReport};
use crate::reduction::ReducedProblem;

/// `items.iter().map(f)`, in parallel when the `parallel` feature is on.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Solves every problem.
pub fn solve_all(
    problems: &[ReducedProblem],
    opts: &SolveOptions,
) -> Vec<Result<SolveReport, EngineError>> {
    map(problems, |p| solve(p, opts))
}

/// Solves every problem on the calling thread regardless of features.
pub fn solve_all_sequential(
    problems: &[ReducedProblem],
    opts: &SolveOptions,
) -> Vec<Result<SolveReport, EngineError>> {
    problems.iter().map(|p| solve(p, opts)).collect()
}
