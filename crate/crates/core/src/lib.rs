//! Conditional-independence relations over small finite ground sets:
//! inference rules and their closure, graph separation, Markov and
//! faithfulness checks, and a Gaussian CI oracle.

pub mod closure;
pub mod error;
pub mod format;
pub mod gaussian;
pub mod graph;
pub mod markov;
pub mod relation;
pub mod report;
pub mod rules;
pub mod triple;
pub mod verify;
pub mod vertex;

pub use closure::{close, close_naive, ClosureProgram};
pub use error::{Error, Result};
pub use gaussian::{check_gaussian_duality, check_gaussian_rule, GaussianModel};
pub use graph::{bidirected_graph_of, undirected_graph_of, Graph};
pub use markov::{is_faithful, is_global_markov, is_pairwise_markov, Mode};
pub use relation::{enumerate_triples, Relation};
pub use report::{Outcome, Population, VerificationReport, Witness};
pub use rules::{
    is_closed, is_closed_under, is_localizable, is_semigraphoid, Rule, RuleInstance, Violation,
};
pub use triple::Triple;
pub use verify::{run_claim, search_counterexample, verify_instance, Claim, Instance, Strategy};
pub use vertex::{GroundSet, VertexSet};
