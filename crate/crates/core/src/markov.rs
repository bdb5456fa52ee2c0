//! Pairwise and global Markov properties, faithfulness, and per-instance
//! checkers for the pseudographoid Markov theorems and tree faithfulness.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{bidirected_graph_of, undirected_graph_of, Graph};
use crate::relation::{enumerate_triples, Relation};
use crate::report::{Outcome, Population, VerificationReport, Witness};
use crate::rules::{is_closed, is_closed_under, is_localizable, is_semigraphoid, Rule};
use crate::vertex::VertexSet;

/// How a graph encodes independences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Concentration graph: a missing edge means `(a,b|V\ab)`.
    Undirected,
    /// Covariance graph: a missing edge means `(a,b|∅)`.
    Bidirected,
}

impl Mode {
    /// Short form used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Mode::Undirected => "un",
            Mode::Bidirected => "bi",
        }
    }

    /// `P` for undirected graphs, `R` for bidirected ones.
    pub fn pseudo_rule(self) -> Rule {
        match self {
            Mode::Undirected => Rule::P,
            Mode::Bidirected => Rule::R,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "un" | "undirected" | "concentration" => Ok(Mode::Undirected),
            "bi" | "bidirected" | "covariance" => Ok(Mode::Bidirected),
            _ => Err(Error::Unsupported(format!(
                "unknown mode `{s}` (use un or bi)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Undirected => "undirected",
            Mode::Bidirected => "bidirected",
        })
    }
}

fn same_ground(l: &Relation, g: &Graph) -> Result<()> {
    if **l.ground() == **g.ground() {
        Ok(())
    } else {
        Err(Error::GroundMismatch)
    }
}

/// Every non-edge yields its pairwise triple: `(a,b|V\ab)` undirected,
/// `(a,b|∅)` bidirected.
pub fn is_pairwise_markov(l: &Relation, g: &Graph, mode: Mode) -> Result<bool> {
    same_ground(l, g)?;
    let full = VertexSet::full(g.p());
    Ok(Graph::pairs(g.p())
        .into_iter()
        .filter(|&(u, v)| !g.has_edge(u, v))
        .all(|(u, v)| {
            let (a, b) = (VertexSet::singleton(u), VertexSet::singleton(v));
            let c = match mode {
                Mode::Undirected => full - a - b,
                Mode::Bidirected => VertexSet::EMPTY,
            };
            l.has(a, b, c)
        }))
}

/// `[G] ⊆ L` undirected, `[G]^⌉ ⊆ L` bidirected.
pub fn is_global_markov(l: &Relation, g: &Graph, mode: Mode) -> Result<bool> {
    same_ground(l, g)?;
    let p = g.p();
    Ok(enumerate_triples(p)
        .filter(|t| g.separates_triple(t))
        .all(|t| match mode {
            Mode::Undirected => l.contains(&t),
            Mode::Bidirected => l.contains(&t.dual(p)),
        }))
}

/// `L ⊆ [G]` undirected, `L^⌉ ⊆ [G]` bidirected.
pub fn is_faithful(l: &Relation, g: &Graph, mode: Mode) -> Result<bool> {
    same_ground(l, g)?;
    let p = g.p();
    Ok(l.iter().all(|t| match mode {
        Mode::Undirected => g.separates_triple(&t),
        Mode::Bidirected => g.separates_triple(&t.dual(p)),
    }))
}

/// Both sides of the pseudographoid Markov theorem for one `(L, G)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PseudoMarkovCheck {
    pub global_markov: bool,
    /// `L ∩ [G]` (undirected) or `L ∩ [G]^⌉` (bidirected) is localizable.
    pub localizable: bool,
    /// The same intersection is closed under `P` (undirected) or `R`.
    pub pseudo_closed: bool,
}

impl PseudoMarkovCheck {
    pub fn holds(&self) -> bool {
        self.global_markov == (self.localizable && self.pseudo_closed)
    }
}

/// Evaluates both sides of the theorem. Fails unless `L` is pairwise
/// Markov to `G` in `mode`.
pub fn pseudo_markov_check(l: &Relation, g: &Graph, mode: Mode) -> Result<PseudoMarkovCheck> {
    if !is_pairwise_markov(l, g, mode)? {
        return Err(Error::Hypothesis(format!(
            "relation is not {mode} pairwise Markov to the graph"
        )));
    }
    let sep = g.separation_relation();
    let sep = match mode {
        Mode::Undirected => sep,
        Mode::Bidirected => sep.dual(),
    };
    let inter = l.intersection(&sep)?;
    Ok(PseudoMarkovCheck {
        global_markov: is_global_markov(l, g, mode)?,
        localizable: is_localizable(&inter),
        pseudo_closed: is_closed(&inter, mode.pseudo_rule()).is_none(),
    })
}

/// Checks, for one pairwise Markov `(L, G)`, that global Markov holds iff
/// the relevant intersection is localizable and closed under `P` (or `R`).
pub fn verify_pseudo_markov_theorem(
    g: &Graph,
    l: &Relation,
    mode: Mode,
) -> Result<VerificationReport> {
    let check = pseudo_markov_check(l, g, mode)?;
    let claim = match mode {
        Mode::Undirected => "pseudo-conc",
        Mode::Bidirected => "pseudo-cov",
    };
    let mut report = VerificationReport::new(claim, Population::Single);
    report.notes.push(format!(
        "global Markov: {}, intersection localizable: {}, intersection {}-closed: {}",
        check.global_markov,
        check.localizable,
        mode.pseudo_rule(),
        check.pseudo_closed
    ));
    report.record(Outcome::check(check.holds(), || {
        Witness::new(format!("{check:?}"))
            .with_relation(l)
            .with_graph(g)
    }));
    Ok(report)
}

/// Tree faithfulness verdicts for one relation; `None` when the
/// corresponding hypotheses fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeCheck {
    /// A semigraphoid closed under `I` and `DT` with a forest as
    /// undirected graph: whether `L = [G_un(L)]`.
    pub undirected: Option<bool>,
    /// A semigraphoid closed under `M` and `DDT` with a forest as
    /// bidirected graph: whether `L^⌉ = [G_bi(L)]`.
    pub bidirected: Option<bool>,
}

/// Rules a relation must be closed under, beyond the semigraphoid rules,
/// for the tree faithfulness statement in `mode`.
pub fn tree_hypothesis_rules(mode: Mode) -> [Rule; 2] {
    match mode {
        Mode::Undirected => [Rule::I, Rule::Dt],
        Mode::Bidirected => [Rule::M, Rule::Ddt],
    }
}

/// Whether `L` (undirected) or `L^⌉` (bidirected) equals the separation
/// relation of the matching extracted graph, or `None` when the
/// hypotheses fail.
///
/// The semigraphoid requirement is what makes the statement hold for
/// abstract relations; without it small counterexamples exist, such as
/// `{(a,b|∅), (b,c|a)}`.
pub fn tree_faithfulness(l: &Relation, mode: Mode) -> Option<bool> {
    let g = match mode {
        Mode::Undirected => undirected_graph_of(l),
        Mode::Bidirected => bidirected_graph_of(l),
    };
    if !g.is_forest() || !is_semigraphoid(l) || !is_closed_under(l, &tree_hypothesis_rules(mode)) {
        return None;
    }
    let sep = g.separation_relation();
    Some(match mode {
        Mode::Undirected => *l == sep,
        Mode::Bidirected => l.dual() == sep,
    })
}

pub fn tree_faithfulness_check(l: &Relation) -> TreeCheck {
    TreeCheck {
        undirected: tree_faithfulness(l, Mode::Undirected),
        bidirected: tree_faithfulness(l, Mode::Bidirected),
    }
}

/// Checks both tree-faithfulness implications on one relation. Each
/// direction whose hypotheses fail is counted as vacuous.
pub fn verify_tree_faithfulness(l: &Relation) -> VerificationReport {
    let check = tree_faithfulness_check(l);
    let mut report = VerificationReport::new("tree-faithfulness", Population::Single);
    for (name, verdict) in [
        ("conc-trees", check.undirected),
        ("cov-trees", check.bidirected),
    ] {
        report.record(match verdict {
            None => Outcome::Vacuous,
            Some(ok) => Outcome::check(ok, || {
                Witness::new(format!("{name}: faithfulness equality fails")).with_relation(l)
            }),
        });
    }
    report
}
