//! Completion-forest engine: rule application, blocking and backtracking
//! search over nondeterministic choices.

mod dot;
mod forest;
mod rules;
mod tables;
mod trace;

use std::collections::VecDeque;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::reduction::ReducedProblem;
use crate::syntax::SignatureError;

pub use dot::to_dot;
pub use forest::{Blocking, ClashReport, CompletionForest, NodeId, NodeKind, RoleSet};
pub use rules::{
    applicable_rule, apply_alternative, apply_deterministic, Alternative, RuleInstance, RuleKind,
};
pub use tables::{ConceptId, RoleId, Tables};
pub use trace::TraceRecord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("node budget of {limit} exhausted")]
    NodeBudget { limit: usize },
    #[error("step budget of {limit} exhausted")]
    StepBudget { limit: u64 },
    #[error("node {node} at path length {length} exceeds the bound {bound}")]
    PathBound { node: NodeId, length: u64, bound: u64 },
    #[error("node {node} generated {count} successors, above the bound {bound}")]
    OutDegreeBound {
        node: NodeId,
        count: usize,
        bound: usize,
    },
}

/// Termination bounds derived from the closure and role signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// `m`, closure size.
    pub closure_size: usize,
    /// `n`, number of roles including inverses.
    pub role_count: usize,
    /// Largest number of an at-least restriction in the closure.
    pub max_at_least: u32,
    /// `2^(2mn)`, saturating.
    pub max_path_length: u64,
    /// `m · max(n_max, 1) · n`.
    pub max_out_degree: usize,
    pub max_nodes: usize,
}

impl SearchLimits {
    pub fn new(tables: &Tables, max_nodes: usize) -> Self {
        let m = tables.closure_size();
        let n = tables.role_count();
        let exp = 2u128 * m as u128 * n as u128;
        let max_path_length = if exp >= 64 { u64::MAX } else { 1u64 << exp };
        let max_out_degree = m
            .saturating_mul(tables.max_at_least().max(1) as usize)
            .saturating_mul(n);
        SearchLimits {
            closure_size: m,
            role_count: n,
            max_at_least: tables.max_at_least(),
            max_path_length,
            max_out_degree,
            max_nodes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Forest size at which the run gives up with [`EngineError::NodeBudget`].
    pub max_nodes: usize,
    /// Rule applications after which the run gives up.
    pub max_steps: Option<u64>,
    /// Shuffles the alternatives of every choice point when set.
    pub seed: Option<u64>,
    pub record_trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_nodes: 50_000,
            max_steps: None,
            seed: None,
            record_trace: false,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    /// A complete, clash-free forest.
    Consistent(Box<CompletionForest>),
    Inconsistent,
}

impl Outcome {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Outcome::Consistent(_))
    }

    pub fn forest(&self) -> Option<&CompletionForest> {
        match self {
            Outcome::Consistent(f) => Some(f),
            Outcome::Inconsistent => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub steps: u64,
    pub choice_points: u64,
    pub backtracks: u64,
    pub clashes: u64,
    pub peak_nodes: usize,
    pub max_choice_depth: usize,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub limits: SearchLimits,
    pub stats: SolveStats,
    pub trace: Vec<TraceRecord>,
    /// The most recent clash seen, if any.
    pub last_clash: Option<ClashReport>,
}

/// Pending alternatives of one nondeterministic rule application, together
/// with the forest as it was before the rule fired.
#[derive(Clone, Debug)]
pub struct ChoicePoint {
    pub rule: RuleKind,
    pub node: NodeId,
    pub concept: ConceptId,
    snapshot: CompletionForest,
    remaining: VecDeque<Alternative>,
}

struct Search<'o> {
    opts: &'o SolveOptions,
    limits: SearchLimits,
    rng: Option<ChaCha8Rng>,
    stats: SolveStats,
    trace: Vec<TraceRecord>,
    stack: Vec<ChoicePoint>,
}

impl Search<'_> {
    fn record(&mut self, rule: RuleKind, node: NodeId, concept: ConceptId, f: &CompletionForest) {
        self.stats.steps += 1;
        if self.opts.record_trace {
            self.trace.push(TraceRecord {
                step: self.stats.steps,
                rule,
                node,
                concept: f.tables().concept(concept).to_string(),
                depth: self.stack.len(),
            });
        }
    }

    fn check_created(&mut self, f: &CompletionForest, parent: NodeId, created: &[NodeId]) -> Result<(), EngineError> {
        self.stats.peak_nodes = self.stats.peak_nodes.max(f.node_count());
        if f.node_count() > self.limits.max_nodes {
            return Err(EngineError::NodeBudget {
                limit: self.limits.max_nodes,
            });
        }
        let count = f.generated(parent);
        if count > self.limits.max_out_degree {
            return Err(EngineError::OutDegreeBound {
                node: parent,
                count,
                bound: self.limits.max_out_degree,
            });
        }
        for &y in created {
            let length = f.depth(y) as u64;
            if length > self.limits.max_path_length {
                return Err(EngineError::PathBound {
                    node: y,
                    length,
                    bound: self.limits.max_path_length,
                });
            }
        }
        Ok(())
    }

    /// Resumes the deepest choice point with alternatives left; `None` when
    /// the search space is exhausted.
    fn backtrack(&mut self) -> Option<CompletionForest> {
        loop {
            let cp = self.stack.last_mut()?;
            let Some(alt) = cp.remaining.pop_front() else {
                self.stack.pop();
                continue;
            };
            self.stats.backtracks += 1;
            let (rule, node, concept) = (cp.rule, cp.node, cp.concept);
            let mut f = if cp.remaining.is_empty() {
                self.stack.pop().expect("non-empty").snapshot
            } else {
                cp.snapshot.clone()
            };
            apply_alternative(&mut f, alt);
            self.record(rule, node, concept, &f);
            return Some(f);
        }
    }
}

/// Decides consistency of a reduced problem.
///
/// Budget exhaustion and bound violations are reported as errors and never
/// as a verdict.
pub fn solve(problem: &ReducedProblem, opts: &SolveOptions) -> Result<SolveReport, EngineError> {
    let tables = Arc::new(Tables::new(problem)?);
    let limits = SearchLimits::new(&tables, opts.max_nodes);
    let mut forest = CompletionForest::init(tables, problem);
    let mut search = Search {
        opts,
        limits,
        rng: opts.seed.map(ChaCha8Rng::seed_from_u64),
        stats: SolveStats {
            peak_nodes: forest.node_count(),
            ..SolveStats::default()
        },
        trace: Vec::new(),
        stack: Vec::new(),
    };
    let mut last_clash = None;

    loop {
        if let Some(limit) = opts.max_steps {
            if search.stats.steps >= limit {
                return Err(EngineError::StepBudget { limit });
            }
        }
        if let Some(clash) = forest.detect_clash() {
            search.stats.clashes += 1;
            last_clash = Some(clash);
            match search.backtrack() {
                Some(f) => {
                    forest = f;
                    continue;
                }
                None => {
                    return Ok(SolveReport {
                        outcome: Outcome::Inconsistent,
                        limits,
                        stats: search.stats,
                        trace: search.trace,
                        last_clash,
                    })
                }
            }
        }
        let Some(inst) = applicable_rule(&forest) else {
            return Ok(SolveReport {
                outcome: Outcome::Consistent(Box::new(forest)),
                limits,
                stats: search.stats,
                trace: search.trace,
                last_clash,
            });
        };
        let (rule, node, concept) = (inst.kind(), inst.node(), inst.concept());
        if inst.is_branching() {
            let mut alts = inst.alternatives(&forest);
            if let Some(rng) = search.rng.as_mut() {
                alts.shuffle(rng);
            }
            let mut alts: VecDeque<Alternative> = alts.into();
            let first = alts.pop_front().expect("branching rule has an alternative");
            search.stats.choice_points += 1;
            if !alts.is_empty() {
                search.stack.push(ChoicePoint {
                    rule,
                    node,
                    concept,
                    snapshot: forest.clone(),
                    remaining: alts,
                });
                search.stats.max_choice_depth =
                    search.stats.max_choice_depth.max(search.stack.len());
            }
            apply_alternative(&mut forest, first);
            search.record(rule, node, concept, &forest);
        } else {
            let created = apply_deterministic(&mut forest, &inst);
            search.record(rule, node, concept, &forest);
            if !created.is_empty() {
                search.check_created(&forest, node, &created)?;
            }
        }
    }
}
