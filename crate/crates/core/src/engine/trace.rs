use std::fmt;

use super::forest::NodeId;
use super::rules::RuleKind;

/// One rule application of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub step: u64,
    pub rule: RuleKind,
    pub node: NodeId,
    /// The triggering concept, printed as an s-expression.
    pub concept: String,
    /// Number of open choice points when the rule fired.
    pub depth: usize,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step={} rule={} node={} concept={} depth={}",
            self.step, self.rule, self.node, self.concept, self.depth
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_format() {
        let r = TraceRecord {
            step: 3,
            rule: RuleKind::ForallPlus,
            node: NodeId(2),
            concept: "(all R A)".into(),
            depth: 1,
        };
        assert_eq!(
            r.to_string(),
            "step=3 rule=all-plus node=x2 concept=(all R A) depth=1"
        );
    }
}
