//! Verification reports and counterexample witnesses.

use std::fmt;

use serde_json::{json, Value};

use crate::format::{write_graph, write_relation};
use crate::graph::Graph;
use crate::relation::Relation;
use crate::rules::Violation;

/// Witnesses kept per report; the total count is tracked separately.
pub const MAX_WITNESSES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Population {
    /// Every relation (and graph, where relevant) over `p` vertices.
    Exhaustive { p: usize },
    /// Seeded random sample.
    Sampled { p: usize, budget: u64, seed: u64 },
    /// A single caller-supplied instance.
    Single,
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Population::Exhaustive { p } => write!(f, "exhaustive |V|={p}"),
            Population::Sampled { p, budget, seed } => {
                write!(f, "sampled |V|={p} budget={budget} seed={seed}")
            }
            Population::Single => f.write_str("single instance"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub detail: String,
    pub relation: Option<Relation>,
    pub graph: Option<Graph>,
    pub violation: Option<Violation>,
}

impl Witness {
    pub fn new(detail: impl Into<String>) -> Self {
        Witness {
            detail: detail.into(),
            relation: None,
            graph: None,
            violation: None,
        }
    }

    pub fn with_relation(mut self, l: &Relation) -> Self {
        self.relation = Some(l.clone());
        self
    }

    pub fn with_graph(mut self, g: &Graph) -> Self {
        self.graph = Some(g.clone());
        self
    }

    pub fn with_violation(mut self, v: Violation) -> Self {
        self.violation = Some(v);
        self
    }

    fn to_json(&self) -> Value {
        json!({
            "detail": self.detail,
            "relation": self.relation.as_ref().map(write_relation),
            "graph": self.graph.as_ref().map(write_graph),
            "violation": match (&self.violation, &self.relation) {
                (Some(v), Some(l)) => Some(v.display(l.ground()).to_string()),
                (Some(v), None) => Some(format!("{v:?}")),
                _ => None,
            },
        })
    }
}

/// Outcome of checking one claim over a population. Passed iff no
/// counterexample was found.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub claim: String,
    pub population: Population,
    /// Instances where the claim's hypotheses held and it was evaluated.
    pub checked: u64,
    /// Instances skipped because a hypothesis failed.
    pub vacuous: u64,
    pub counterexample_count: u64,
    /// The first [`MAX_WITNESSES`] counterexamples in population order.
    pub counterexamples: Vec<Witness>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(claim: impl Into<String>, population: Population) -> Self {
        VerificationReport {
            claim: claim.into(),
            population,
            checked: 0,
            vacuous: 0,
            counterexample_count: 0,
            counterexamples: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexample_count == 0
    }

    pub fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Holds => self.checked += 1,
            Outcome::Vacuous => self.vacuous += 1,
            Outcome::Fails(w) => {
                self.checked += 1;
                self.counterexample_count += 1;
                if self.counterexamples.len() < MAX_WITNESSES {
                    self.counterexamples.push(*w);
                }
            }
        }
    }

    pub fn summary_line(&self) -> String {
        if self.passed() {
            "passed, 0 counterexamples".to_string()
        } else {
            format!("FAILED, {} counterexamples", self.counterexample_count)
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "claim": self.claim,
            "population": self.population.to_string(),
            "checked": self.checked,
            "vacuous": self.vacuous,
            "passed": self.passed(),
            "counterexample_count": self.counterexample_count,
            "counterexamples": self.counterexamples.iter().map(Witness::to_json).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "claim: {}", self.claim)?;
        writeln!(f, "population: {}", self.population)?;
        writeln!(f, "checked: {}", self.checked)?;
        writeln!(f, "vacuous: {}", self.vacuous)?;
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        for (i, w) in self.counterexamples.iter().enumerate() {
            writeln!(f, "counterexample {}: {}", i + 1, w.detail)?;
            if let Some(l) = &w.relation {
                for line in write_relation(l).lines() {
                    writeln!(f, "  {line}")?;
                }
                if let Some(v) = &w.violation {
                    writeln!(f, "  violation: {}", v.display(l.ground()))?;
                }
            }
            if let Some(g) = &w.graph {
                for line in write_graph(g).lines() {
                    writeln!(f, "  {line}")?;
                }
            }
        }
        writeln!(f, "result: {}", self.summary_line())
    }
}

/// Result of checking a claim on one instance.
#[derive(Debug)]
pub enum Outcome {
    Holds,
    Vacuous,
    Fails(Box<Witness>),
}

impl Outcome {
    pub fn fails(w: Witness) -> Self {
        Outcome::Fails(Box::new(w))
    }

    /// `Holds` when `ok`, otherwise a failure built lazily.
    pub fn check(ok: bool, witness: impl FnOnce() -> Witness) -> Self {
        if ok {
            Outcome::Holds
        } else {
            Outcome::fails(witness())
        }
    }
}
