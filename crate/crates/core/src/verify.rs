//! Named claims about relations, graphs and Gaussian models, checked over
//! exhaustive or seeded random populations.
//!
//! Relation claims are exhaustive for `p ≤ 3` (every subset of `T(V)`,
//! crossed with every graph where a graph is involved) and sampled above
//! that. Sampling mixes uniform relations with structured ones (closures of
//! small seeds, separation relations, their duals and perturbations) so
//! that hypotheses such as "is a semigraphoid" are actually met.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closure::ClosureProgram;
use crate::error::{Error, Result};
use crate::gaussian::{
    check_gaussian_duality, random_forest, random_model, tree_structured_model, GaussianModel,
};
use crate::graph::{bidirected_graph_of, undirected_graph_of, Graph};
use crate::markov::{
    is_pairwise_markov, pseudo_markov_check, tree_faithfulness, tree_hypothesis_rules, Mode,
};
use crate::relation::{enumerate_triples, Relation};
use crate::report::{Outcome, Population, VerificationReport, Witness};
use crate::rules::{
    biconditional_form_holds, duc_biconditional_holds, first_violation, is_closed, is_closed_under,
    is_localizable, Rule,
};
use crate::triple::Triple;
use crate::vertex::{GroundSet, VertexSet};

/// Largest `p` for exhaustive relation populations (`2^9` relations).
pub const EXHAUSTIVE_MAX_VERTICES: usize = 3;
/// Largest `p` for exhaustive graph populations (`2^10` graphs).
pub const EXHAUSTIVE_GRAPH_MAX_VERTICES: usize = 5;
/// Largest `p` for sampled relation populations.
pub const SAMPLED_MAX_VERTICES: usize = 6;
/// Largest `p` for graph and Gaussian populations.
pub const MODEL_MAX_VERTICES: usize = 7;

const MAX_NOTES: usize = 16;
const CHUNK: u64 = 4096;

/// Pairs of properties related by the dual operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DualItem {
    /// Localizability is self-dual.
    L,
    /// Being a semigraphoid is self-dual.
    Sg,
    /// `I` on `L` matches `M` on the dual.
    Im,
    /// `P` on `L` matches `R` on the dual.
    Pr,
    /// `DT` on `L` matches `DDT` on the dual.
    Dt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    /// Closure under `D`, `U`, `C` equals the `DUC` biconditional.
    SemiParsim,
    /// Semigraphoid ⇒ localizable ⇒ closed under `D` and `U`.
    SemiLocalComparison,
    /// Localizable ⇒ closed under `C`. False; kept to exercise
    /// counterexample reporting.
    LocalizableImpliesC,
    DualOperator(DualItem),
    /// Pairwise Markov (undirected): global Markov iff `L ∩ [G]` is
    /// localizable and `P`-closed.
    PseudoConc,
    /// The bidirected version with `R`, which must also agree with the
    /// undirected verdict on `(L^⌉, G)`.
    PseudoCov,
    /// On semigraphoids, closure under `I`, `M`, `P` or `R` equals its
    /// biconditional form.
    Equivalence(Rule),
    /// On semigraphoids, `P`-closed iff `I`-closed.
    PIffI,
    /// On semigraphoids, `R`-closed iff `M`-closed.
    RIffM,
    /// Closure under `D`, `U`, `C`, `I` implies localizable and `P`-closed,
    /// but not conversely.
    SduciVsSlp,
    /// Closure under `D`, `U`, `C`, `M` implies localizable and `R`-closed,
    /// but not conversely.
    SducmVsSlr,
    ConcTrees,
    CovTrees,
    /// `[G]` is localizable, a semigraphoid, and closed under `P`, `I`, `M`;
    /// both graph extractions recover `G`.
    GraphRelationProps,
    /// `[Σ⁻¹] = [Σ]^⌉`.
    GaussianDuality,
    /// Gaussian CI structures are semigraphoids closed under `I`, `M`,
    /// `DT`, `DDT`.
    GaussianRules,
    /// Models supported on a forest are faithful to it.
    GaussianTrees,
}

/// What a claim quantifies over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Subject {
    Relations,
    RelationsAndGraphs(Mode),
    Graphs,
    Models,
    Forests,
}

impl Claim {
    pub const ALL: [Claim; 24] = [
        Claim::SemiParsim,
        Claim::SemiLocalComparison,
        Claim::LocalizableImpliesC,
        Claim::DualOperator(DualItem::L),
        Claim::DualOperator(DualItem::Sg),
        Claim::DualOperator(DualItem::Im),
        Claim::DualOperator(DualItem::Pr),
        Claim::DualOperator(DualItem::Dt),
        Claim::PseudoConc,
        Claim::PseudoCov,
        Claim::Equivalence(Rule::I),
        Claim::Equivalence(Rule::M),
        Claim::Equivalence(Rule::P),
        Claim::Equivalence(Rule::R),
        Claim::PIffI,
        Claim::RIffM,
        Claim::SduciVsSlp,
        Claim::SducmVsSlr,
        Claim::ConcTrees,
        Claim::CovTrees,
        Claim::GraphRelationProps,
        Claim::GaussianDuality,
        Claim::GaussianRules,
        Claim::GaussianTrees,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::SemiParsim => "semi-parsim",
            Claim::SemiLocalComparison => "semi-local-comparison",
            Claim::LocalizableImpliesC => "localizable-implies-c",
            Claim::DualOperator(DualItem::L) => "dual-operator-L",
            Claim::DualOperator(DualItem::Sg) => "dual-operator-SG",
            Claim::DualOperator(DualItem::Im) => "dual-operator-IM",
            Claim::DualOperator(DualItem::Pr) => "dual-operator-PR",
            Claim::DualOperator(DualItem::Dt) => "dual-operator-DT",
            Claim::PseudoConc => "pseudo-conc",
            Claim::PseudoCov => "pseudo-cov",
            Claim::Equivalence(Rule::I) => "equivalences-1",
            Claim::Equivalence(Rule::M) => "equivalences-2",
            Claim::Equivalence(Rule::P) => "equivalences-3",
            Claim::Equivalence(_) => "equivalences-4",
            Claim::PIffI => "p-iff-i",
            Claim::RIffM => "r-iff-m",
            Claim::SduciVsSlp => "sduci-vs-slp",
            Claim::SducmVsSlr => "sducm-vs-slr",
            Claim::ConcTrees => "conc-trees",
            Claim::CovTrees => "cov-trees",
            Claim::GraphRelationProps => "graph-relation-props",
            Claim::GaussianDuality => "gaussian-duality",
            Claim::GaussianRules => "gaussian-rules",
            Claim::GaussianTrees => "gaussian-trees",
        }
    }

    fn subject(self) -> Subject {
        match self {
            Claim::PseudoConc => Subject::RelationsAndGraphs(Mode::Undirected),
            Claim::PseudoCov => Subject::RelationsAndGraphs(Mode::Bidirected),
            Claim::GraphRelationProps => Subject::Graphs,
            Claim::GaussianDuality | Claim::GaussianRules => Subject::Models,
            Claim::GaussianTrees => Subject::Forests,
            _ => Subject::Relations,
        }
    }

    /// Claims whose hypothesis is "is a semigraphoid" sample only
    /// semigraphoids.
    fn semigraphoid_population(self) -> bool {
        matches!(self, Claim::Equivalence(_) | Claim::PIffI | Claim::RIffM)
    }

    /// Whether the claim can be checked exhaustively at size `p`.
    pub fn exhaustive_supported(self, p: usize) -> bool {
        match self.subject() {
            Subject::Relations | Subject::RelationsAndGraphs(_) => p <= EXHAUSTIVE_MAX_VERTICES,
            Subject::Graphs => p <= EXHAUSTIVE_GRAPH_MAX_VERTICES,
            Subject::Models | Subject::Forests => false,
        }
    }

    fn max_vertices(self) -> usize {
        match self.subject() {
            Subject::Relations | Subject::RelationsAndGraphs(_) => SAMPLED_MAX_VERTICES,
            _ => MODEL_MAX_VERTICES,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Claim {
    type Err = Error;

    /// Case-insensitive; whitespace is ignored and a few descriptive
    /// aliases are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_lowercase();
        let alias = match key.as_str() {
            "dual-operator-p-r" => Some(Claim::DualOperator(DualItem::Pr)),
            "dual-operator-i-m" => Some(Claim::DualOperator(DualItem::Im)),
            "dual-operator-dt-ddt" => Some(Claim::DualOperator(DualItem::Dt)),
            "semigraphoid-p-iff-i" => Some(Claim::PIffI),
            "semigraphoid-r-iff-m" => Some(Claim::RIffM),
            _ => None,
        };
        alias
            .or_else(|| {
                Claim::ALL
                    .into_iter()
                    .find(|c| c.id().to_ascii_lowercase() == key)
            })
            .ok_or_else(|| Error::UnknownClaim(s.to_string()))
    }
}

/// How to choose the population for [`run_claim`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Exhaustive when supported at this size, sampled otherwise.
    Auto,
    Exhaustive,
    Sampled,
}

/// Runs `claim` exhaustively when the population at size `p` is small
/// enough, otherwise on `budget` seeded samples. Deterministic given the
/// arguments, independent of the number of worker threads.
pub fn search_counterexample(
    claim: Claim,
    p: usize,
    budget: u64,
    seed: u64,
) -> Result<VerificationReport> {
    run_claim(claim, p, budget, seed, Strategy::Auto)
}

pub fn run_claim(
    claim: Claim,
    p: usize,
    budget: u64,
    seed: u64,
    strategy: Strategy,
) -> Result<VerificationReport> {
    if p == 0 || p > claim.max_vertices() {
        return Err(Error::Unsupported(format!(
            "{claim} supports 1 to {} vertices, got {p}",
            claim.max_vertices()
        )));
    }
    let exhaustive = match strategy {
        Strategy::Auto => claim.exhaustive_supported(p),
        Strategy::Exhaustive if claim.exhaustive_supported(p) => true,
        Strategy::Exhaustive => {
            return Err(Error::Unsupported(format!(
                "{claim} cannot be checked exhaustively with {p} vertices"
            )))
        }
        Strategy::Sampled => false,
    };
    let ground = GroundSet::standard(p)?.shared();
    let ctx = Context::new(claim, ground.clone());
    let (population, size) = if exhaustive {
        (Population::Exhaustive { p }, ctx.exhaustive_size())
    } else {
        (Population::Sampled { p, budget, seed }, budget)
    };
    let mut report = VerificationReport::new(claim.id(), population);
    let mut notes = Vec::new();
    let mut note_total = 0usize;
    let mut tags = BTreeMap::new();
    for range in chunks(size) {
        let results: Vec<Eval> = range
            .into_par_iter()
            .map(|i| {
                if exhaustive {
                    ctx.exhaustive_instance(i)
                } else {
                    ctx.sampled_instance(seed, i)
                }
            })
            .collect();
        for e in results {
            if let Some(tag) = e.tag {
                *tags.entry(tag).or_insert(0u64) += 1;
            }
            report.record(e.outcome);
            note_total += e.notes.len();
            notes.extend(
                e.notes
                    .into_iter()
                    .take(MAX_NOTES.saturating_sub(notes.len())),
            );
        }
    }
    for outcome in stored_examples(claim, &ground) {
        report.record(outcome);
    }
    if note_total > notes.len() {
        notes.push(format!(
            "{} further notes omitted",
            note_total - notes.len()
        ));
    }
    for (tag, n) in tags {
        notes.push(format!("{tag}: {n}"));
    }
    report.notes = notes;
    Ok(report)
}

/// Result of one population member: the outcome, numeric notes, and an
/// optional category counted in the report so coverage is visible.
struct Eval {
    outcome: Outcome,
    notes: Vec<String>,
    tag: Option<String>,
}

impl From<Outcome> for Eval {
    fn from(outcome: Outcome) -> Self {
        Eval {
            outcome,
            notes: Vec::new(),
            tag: None,
        }
    }
}

impl Eval {
    fn tagged(outcome: Outcome, tag: impl Into<String>, notes: Vec<String>) -> Self {
        Eval {
            outcome,
            notes,
            tag: Some(tag.into()),
        }
    }
}

/// Per-run state shared by all workers.
struct Context {
    claim: Claim,
    ground: Arc<GroundSet>,
    triples: Vec<Triple>,
    programs: Vec<OnceLock<ClosureProgram>>,
}

/// Optional rules added on top of `D`, `U`, `C` for structured samples.
const EXTRA_RULES: [Rule; 6] = [Rule::I, Rule::M, Rule::P, Rule::R, Rule::LFwd, Rule::LBwd];

impl Context {
    fn new(claim: Claim, ground: Arc<GroundSet>) -> Self {
        let p = ground.len();
        Context {
            claim,
            ground,
            triples: enumerate_triples(p).collect(),
            programs: (0..1 << EXTRA_RULES.len())
                .map(|_| OnceLock::new())
                .collect(),
        }
    }

    fn p(&self) -> usize {
        self.ground.len()
    }

    /// Only meaningful where [`Claim::exhaustive_supported`] holds.
    fn exhaustive_size(&self) -> u64 {
        let relations = || 1u64 << self.triples.len();
        let graphs = || 1u64 << (self.p() * (self.p() - 1) / 2);
        match self.claim.subject() {
            Subject::Relations => relations(),
            Subject::RelationsAndGraphs(_) => relations() * graphs(),
            Subject::Graphs => graphs(),
            Subject::Models | Subject::Forests => 0,
        }
    }

    fn relation_from_mask(&self, mask: u64) -> Relation {
        let mut l = Relation::empty(self.ground.clone());
        for (i, t) in self.triples.iter().enumerate() {
            if mask >> i & 1 == 1 {
                l.insert_unchecked(*t);
            }
        }
        l
    }

    fn exhaustive_instance(&self, i: u64) -> Eval {
        let graphs = 1u64 << (self.p() * (self.p() - 1) / 2);
        match self.claim.subject() {
            Subject::Relations => check_relation(self.claim, &self.relation_from_mask(i)).into(),
            Subject::RelationsAndGraphs(mode) => {
                let l = self.relation_from_mask(i / graphs);
                let g = Graph::from_edge_mask(self.ground.clone(), i % graphs);
                check_relation_graph(mode, &l, &g)
            }
            Subject::Graphs => check_graph(&Graph::from_edge_mask(self.ground.clone(), i)).into(),
            Subject::Models | Subject::Forests => unreachable!("no exhaustive model population"),
        }
    }

    fn sampled_instance(&self, seed: u64, i: u64) -> Eval {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        match self.claim.subject() {
            Subject::Relations => {
                let l = if self.claim.semigraphoid_population() {
                    self.structured(&mut rng)
                } else {
                    self.mixed(&mut rng)
                };
                check_relation(self.claim, &l).into()
            }
            Subject::RelationsAndGraphs(mode) => {
                let g = self.random_graph(&mut rng);
                let l = self.pairwise_markov_relation(&g, &mut rng);
                let l = match mode {
                    Mode::Undirected => l,
                    Mode::Bidirected => l.dual(),
                };
                check_relation_graph(mode, &l, &g)
            }
            Subject::Graphs => check_graph(&self.random_graph(&mut rng)).into(),
            Subject::Models => self.check_model(&mut rng),
            Subject::Forests => self.check_forest(&mut rng),
        }
    }

    fn random_graph(&self, rng: &mut ChaCha8Rng) -> Graph {
        if rng.random_bool(0.3) {
            return random_forest(self.ground.clone(), rng);
        }
        let density = rng.random_range(0.2..0.8);
        let mut g = Graph::empty(self.ground.clone());
        for (u, v) in Graph::pairs(self.p()) {
            if rng.random_bool(density) {
                g.add_edge(u, v).expect("valid pair");
            }
        }
        g
    }

    fn random_subset(&self, density: f64, rng: &mut ChaCha8Rng) -> Relation {
        let mut l = Relation::empty(self.ground.clone());
        for t in &self.triples {
            if rng.random_bool(density) {
                l.insert_unchecked(*t);
            }
        }
        l
    }

    /// Closure of one to four random triples under `D`, `U`, `C` plus a
    /// random subset of the other Horn rules; always a semigraphoid.
    fn structured(&self, rng: &mut ChaCha8Rng) -> Relation {
        let extra: usize = rng.random_range(0..self.programs.len());
        let program = self.programs[extra].get_or_init(|| {
            let mut rules = vec![Rule::D, Rule::U, Rule::C];
            rules.extend(
                EXTRA_RULES
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| extra >> k & 1 == 1)
                    .map(|(_, r)| *r),
            );
            ClosureProgram::new(self.p(), &rules).expect("Horn rules within the compiled size")
        });
        let mut seeds = Relation::empty(self.ground.clone());
        for _ in 0..rng.random_range(1..=4) {
            seeds.insert_unchecked(*self.triples.choose(rng).expect("p >= 2"));
        }
        program.close(&seeds).expect("same ground set")
    }

    fn perturb(&self, mut l: Relation, rng: &mut ChaCha8Rng) -> Relation {
        for _ in 0..rng.random_range(1..=3) {
            let t = *self.triples.choose(rng).expect("p >= 2");
            if !l.remove(&t) {
                l.insert_unchecked(t);
            }
        }
        l
    }

    fn mixed(&self, rng: &mut ChaCha8Rng) -> Relation {
        if self.triples.is_empty() {
            return Relation::empty(self.ground.clone());
        }
        match rng.random_range(0..6) {
            0 => self.random_subset(0.5, rng),
            1 => {
                let density = rng.random_range(0.0..0.25);
                self.random_subset(density, rng)
            }
            2 => self.structured(rng),
            3 => self.structured(rng).dual(),
            4 => {
                let sep = self.random_graph(rng).separation_relation();
                if rng.random_bool(0.5) {
                    sep
                } else {
                    sep.dual()
                }
            }
            _ => {
                let base = if rng.random_bool(0.5) {
                    self.random_graph(rng).separation_relation()
                } else {
                    self.structured(rng)
                };
                self.perturb(base, rng)
            }
        }
    }

    /// A relation containing `(a,b|V\ab)` for every non-edge of `g`.
    fn pairwise_markov_relation(&self, g: &Graph, rng: &mut ChaCha8Rng) -> Relation {
        let p = self.p();
        let full = VertexSet::full(p);
        let mut required = Relation::empty(self.ground.clone());
        for (u, v) in Graph::pairs(p) {
            if !g.has_edge(u, v) {
                let (a, b) = (VertexSet::singleton(u), VertexSet::singleton(v));
                required.insert_unchecked(Triple::canonical(a, b, full - a - b));
            }
        }
        let sep = g.separation_relation();
        let extra = match rng.random_range(0..4) {
            0 => self.mixed(rng),
            1 => sep.clone(),
            2 => sep.filter(|_| rng.random_bool(0.8)),
            _ => self.perturb(sep.clone(), rng),
        };
        required.union(&extra).expect("same ground set")
    }

    fn check_model(&self, rng: &mut ChaCha8Rng) -> Eval {
        let (family, model) = match random_model(self.ground.clone(), rng) {
            Ok(m) => m,
            Err(e) => return Outcome::fails(Witness::new(format!("model generation: {e}"))).into(),
        };
        let (outcome, notes) = check_model(self.claim, &model, &format!("{family:?} model"));
        Eval::tagged(outcome, format!("{family:?} models"), notes)
    }

    fn check_forest(&self, rng: &mut ChaCha8Rng) -> Eval {
        let tree = random_forest(self.ground.clone(), rng);
        let mode = if rng.random_bool(0.5) {
            Mode::Undirected
        } else {
            Mode::Bidirected
        };
        let model = match tree_structured_model(&tree, mode, rng.random()) {
            Ok(m) => m,
            Err(e) => return Outcome::fails(Witness::new(format!("model generation: {e}"))).into(),
        };
        let (rel, notes) = model.relation_with_warnings();
        Eval::tagged(
            check_tree_model(&rel, &tree, mode),
            format!("{mode} tree models"),
            notes,
        )
    }
}

fn check_model(claim: Claim, model: &GaussianModel, label: &str) -> (Outcome, Vec<String>) {
    if claim == Claim::GaussianDuality {
        return match check_gaussian_duality(model) {
            Ok(r) => {
                let outcome = match r.counterexamples.first() {
                    None => Outcome::Holds,
                    Some(w) => {
                        let mut w = w.clone();
                        w.detail = format!("{label}: {}", w.detail);
                        Outcome::fails(w)
                    }
                };
                (outcome, r.notes)
            }
            Err(e) => (
                Outcome::fails(Witness::new(format!("{label}: {e}"))),
                Vec::new(),
            ),
        };
    }
    let (rel, notes) = model.relation_with_warnings();
    let rules = [
        Rule::D,
        Rule::U,
        Rule::C,
        Rule::I,
        Rule::M,
        Rule::Dt,
        Rule::Ddt,
    ];
    let outcome = match first_violation(&rel, &rules) {
        None => Outcome::Holds,
        Some(v) => Outcome::fails(
            Witness::new(format!("{label} violates {}", v.instance.rule))
                .with_relation(&rel)
                .with_violation(v),
        ),
    };
    (outcome, notes)
}

fn check_relation(claim: Claim, l: &Relation) -> Outcome {
    let witness = |detail: String| Witness::new(detail).with_relation(l);
    let dsg = |l: &Relation| is_closed_under(l, &[Rule::D, Rule::U, Rule::C]);
    match claim {
        Claim::SemiParsim => {
            let rules = dsg(l);
            let direct = duc_biconditional_holds(l);
            let duc = is_closed(l, Rule::Duc).is_none();
            Outcome::check(rules == direct && direct == duc, || {
                witness(format!(
                    "closed under D,U,C: {rules}; DUC biconditional: {direct}; DUC rule: {duc}"
                ))
            })
        }
        Claim::SemiLocalComparison => {
            let sg = dsg(l);
            let loc = is_localizable(l);
            let du = is_closed_under(l, &[Rule::D, Rule::U]);
            Outcome::check((!sg || loc) && (!loc || du), || {
                witness(format!(
                    "semigraphoid: {sg}; localizable: {loc}; closed under D,U: {du}"
                ))
            })
        }
        Claim::LocalizableImpliesC => {
            if !is_localizable(l) {
                return Outcome::Vacuous;
            }
            match is_closed(l, Rule::C) {
                None => Outcome::Holds,
                Some(v) => Outcome::fails(
                    witness("localizable but not closed under C".into()).with_violation(v),
                ),
            }
        }
        Claim::DualOperator(item) => {
            let d = l.dual();
            let (name, lhs, rhs) = match item {
                DualItem::L => ("localizable", is_localizable(l), is_localizable(&d)),
                DualItem::Sg => ("semigraphoid", dsg(l), dsg(&d)),
                DualItem::Im => (
                    "I-closed vs dual M-closed",
                    is_closed(l, Rule::I).is_none(),
                    is_closed(&d, Rule::M).is_none(),
                ),
                DualItem::Pr => (
                    "P-closed vs dual R-closed",
                    is_closed(l, Rule::P).is_none(),
                    is_closed(&d, Rule::R).is_none(),
                ),
                DualItem::Dt => (
                    "DT-closed vs dual DDT-closed",
                    is_closed(l, Rule::Dt).is_none(),
                    is_closed(&d, Rule::Ddt).is_none(),
                ),
            };
            Outcome::check(lhs == rhs, || {
                witness(format!("{name}: relation {lhs}, dual {rhs}"))
            })
        }
        Claim::Equivalence(rule) => {
            if !dsg(l) {
                return Outcome::Vacuous;
            }
            let closed = is_closed(l, rule).is_none();
            let form = biconditional_form_holds(l, rule).expect("rule has a biconditional form");
            Outcome::check(closed == form, || {
                witness(format!(
                    "{rule}-closed: {closed}; biconditional form: {form}"
                ))
            })
        }
        Claim::PIffI | Claim::RIffM => {
            if !dsg(l) {
                return Outcome::Vacuous;
            }
            let (weak, strong) = if claim == Claim::PIffI {
                (Rule::P, Rule::I)
            } else {
                (Rule::R, Rule::M)
            };
            let w = is_closed(l, weak);
            let s = is_closed(l, strong);
            Outcome::check(w.is_none() == s.is_none(), || {
                let mut out = witness(format!(
                    "{weak}-closed: {}; {strong}-closed: {}",
                    w.is_none(),
                    s.is_none()
                ));
                if let Some(v) = w.or(s) {
                    out = out.with_violation(v);
                }
                out
            })
        }
        Claim::SduciVsSlp | Claim::SducmVsSlr => {
            let (strong, weak) = if claim == Claim::SduciVsSlp {
                (Rule::I, Rule::P)
            } else {
                (Rule::M, Rule::R)
            };
            if !is_closed_under(l, &[Rule::D, Rule::U, Rule::C, strong]) {
                return Outcome::Vacuous;
            }
            match [Rule::LFwd, Rule::LBwd, weak]
                .iter()
                .find_map(|&r| is_closed(l, r))
            {
                None => Outcome::Holds,
                Some(v) => Outcome::fails(
                    witness(format!(
                        "closed under D,U,C,{strong} but not {}",
                        v.instance.rule
                    ))
                    .with_violation(v),
                ),
            }
        }
        Claim::ConcTrees | Claim::CovTrees => {
            let mode = if claim == Claim::ConcTrees {
                Mode::Undirected
            } else {
                Mode::Bidirected
            };
            match tree_faithfulness(l, mode) {
                None => Outcome::Vacuous,
                Some(true) => Outcome::Holds,
                Some(false) => {
                    let g = match mode {
                        Mode::Undirected => undirected_graph_of(l),
                        Mode::Bidirected => bidirected_graph_of(l),
                    };
                    Outcome::fails(
                        witness(format!("{mode} tree hypotheses hold but equality fails"))
                            .with_graph(&g),
                    )
                }
            }
        }
        _ => unreachable!("{claim} is not a relation claim"),
    }
}

fn check_relation_graph(mode: Mode, l: &Relation, g: &Graph) -> Eval {
    if !is_pairwise_markov(l, g, mode).expect("same ground set") {
        return Outcome::Vacuous.into();
    }
    let check = pseudo_markov_check(l, g, mode).expect("pairwise Markov");
    let witness = |detail: String| Witness::new(detail).with_relation(l).with_graph(g);
    let outcome = match mode {
        Mode::Undirected => Outcome::check(check.holds(), || witness(format!("{check:?}"))),
        Mode::Bidirected => {
            let dual = pseudo_markov_check(&l.dual(), g, Mode::Undirected).expect(
                "dual of a bidirected pairwise Markov relation is undirected pairwise Markov",
            );
            Outcome::check(check.holds() && check == dual, || {
                witness(format!("bidirected {check:?}; undirected on dual {dual:?}"))
            })
        }
    };
    let tag = if check.global_markov {
        "globally Markov instances"
    } else {
        "not globally Markov instances"
    };
    Eval::tagged(outcome, tag, Vec::new())
}

fn check_graph(g: &Graph) -> Outcome {
    let sep = g.separation_relation();
    let mut failed = Vec::new();
    if !is_localizable(&sep) {
        failed.push("localizable");
    }
    if !is_closed_under(&sep, &[Rule::D, Rule::U, Rule::C]) {
        failed.push("semigraphoid");
    }
    for (rule, name) in [
        (Rule::P, "P-closed"),
        (Rule::I, "I-closed"),
        (Rule::M, "M-closed"),
    ] {
        if is_closed(&sep, rule).is_some() {
            failed.push(name);
        }
    }
    if undirected_graph_of(&sep) != *g {
        failed.push("undirected extraction");
    }
    if bidirected_graph_of(&sep.dual()) != *g {
        failed.push("bidirected extraction of the dual");
    }
    Outcome::check(failed.is_empty(), || {
        Witness::new(format!("[G] fails: {}", failed.join(", ")))
            .with_graph(g)
            .with_relation(&sep)
    })
}

/// For a model supported on `tree` in `mode`: the extracted relation meets
/// the tree hypotheses and the faithfulness equality, and the extracted
/// graph is `tree`.
pub fn check_tree_model(rel: &Relation, tree: &Graph, mode: Mode) -> Outcome {
    let extracted = match mode {
        Mode::Undirected => undirected_graph_of(rel),
        Mode::Bidirected => bidirected_graph_of(rel),
    };
    let sep = tree.separation_relation();
    let equal = match mode {
        Mode::Undirected => *rel == sep,
        Mode::Bidirected => rel.dual() == sep,
    };
    let mut rules = vec![Rule::D, Rule::U, Rule::C];
    rules.extend(tree_hypothesis_rules(mode));
    let violation = first_violation(rel, &rules);
    let ok = extracted == *tree && equal && violation.is_none();
    Outcome::check(ok, || {
        let mut w = Witness::new(format!(
            "{mode} tree model: graph recovered {}, equality {equal}",
            extracted == *tree
        ))
        .with_relation(rel)
        .with_graph(tree);
        if let Some(v) = violation {
            w = w.with_violation(v);
        }
        w
    })
}

/// Inputs for checking a claim on one caller-supplied instance.
#[derive(Clone, Copy, Debug, Default)]
pub struct Instance<'a> {
    pub relation: Option<&'a Relation>,
    pub graph: Option<&'a Graph>,
    pub model: Option<&'a GaussianModel>,
}

/// Checks `claim` on a single instance. Pseudo-Markov claims require the
/// relation to be pairwise Markov to the graph; Gaussian tree claims are
/// vacuous unless one of the model's graphs is a forest.
pub fn verify_instance(claim: Claim, inst: Instance<'_>) -> Result<VerificationReport> {
    let missing = |what: &str| Error::Unsupported(format!("{claim} needs a {what}"));
    let mut report = VerificationReport::new(claim.id(), Population::Single);
    match claim.subject() {
        Subject::Relations => {
            let l = inst.relation.ok_or_else(|| missing("relation"))?;
            report.record(check_relation(claim, l));
        }
        Subject::RelationsAndGraphs(mode) => {
            let l = inst.relation.ok_or_else(|| missing("relation"))?;
            let g = inst.graph.ok_or_else(|| missing("graph"))?;
            if !is_pairwise_markov(l, g, mode)? {
                return Err(Error::Hypothesis(format!(
                    "relation is not {mode} pairwise Markov to the graph"
                )));
            }
            let e = check_relation_graph(mode, l, g);
            report.notes.extend(e.tag);
            report.record(e.outcome);
        }
        Subject::Graphs => {
            let g = inst.graph.ok_or_else(|| missing("graph"))?;
            report.record(check_graph(g));
        }
        Subject::Models => {
            let m = inst.model.ok_or_else(|| missing("covariance model"))?;
            let (outcome, notes) = check_model(claim, m, "model");
            report.notes = notes;
            report.record(outcome);
        }
        Subject::Forests => {
            let m = inst.model.ok_or_else(|| missing("covariance model"))?;
            let (rel, notes) = m.relation_with_warnings();
            report.notes = notes;
            let mut any = false;
            for mode in [Mode::Undirected, Mode::Bidirected] {
                let g = match mode {
                    Mode::Undirected => undirected_graph_of(&rel),
                    Mode::Bidirected => bidirected_graph_of(&rel),
                };
                if g.is_forest() {
                    any = true;
                    report.notes.push(format!("{mode} graph is a forest"));
                    report.record(check_tree_model(&rel, &g, mode));
                }
            }
            if !any {
                report.record(Outcome::Vacuous);
            }
        }
    }
    Ok(report)
}

fn standard_triple(a: &[usize], b: &[usize], c: &[usize]) -> Triple {
    Triple::new(
        VertexSet::from_indices(a.iter().copied()),
        VertexSet::from_indices(b.iter().copied()),
        VertexSet::from_indices(c.iter().copied()),
    )
    .expect("valid fixed triple")
}

/// `{(a,b|∅), (a,c|b)}`: localizable and closed under `P`, but not under
/// contraction.
pub fn contraction_witness(ground: Arc<GroundSet>) -> Result<Relation> {
    Relation::from_triples(
        ground,
        [
            standard_triple(&[0], &[1], &[]),
            standard_triple(&[0], &[2], &[1]),
        ],
    )
}

/// Fixed instances checked in addition to the population, for claims
/// whose statement includes a "but not conversely" part.
fn stored_examples(claim: Claim, ground: &Arc<GroundSet>) -> Vec<Outcome> {
    if ground.len() < 3 {
        return Vec::new();
    }
    let w = contraction_witness(ground.clone()).expect("p >= 3");
    match claim {
        Claim::SemiLocalComparison => {
            let violation = is_closed(&w, Rule::C);
            let ok = is_localizable(&w) && violation.is_some();
            vec![Outcome::check(ok, || {
                Witness::new("stored witness should be localizable but not C-closed")
                    .with_relation(&w)
            })]
        }
        Claim::SduciVsSlp | Claim::SducmVsSlr => {
            let (w, strong, weak) = if claim == Claim::SduciVsSlp {
                (w, Rule::I, Rule::P)
            } else {
                (w.dual(), Rule::M, Rule::R)
            };
            let slp = is_closed_under(&w, &[Rule::LFwd, Rule::LBwd, weak]);
            let sduc = is_closed_under(&w, &[Rule::D, Rule::U, Rule::C, strong]);
            vec![Outcome::check(slp && !sduc, || {
                Witness::new(format!(
                    "converse witness: L,{weak}-closed {slp}; D,U,C,{strong}-closed {sduc}"
                ))
                .with_relation(&w)
            })]
        }
        _ => Vec::new(),
    }
}

/// Index batches evaluated in parallel and merged in order.
fn chunks(size: u64) -> impl Iterator<Item = Range<u64>> {
    (0..size.div_ceil(CHUNK)).map(move |k| k * CHUNK..((k + 1) * CHUNK).min(size))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_ids_round_trip() {
        for c in Claim::ALL.into_iter() {
            assert_eq!(c.id().parse::<Claim>().unwrap(), c);
            assert_eq!(c.id().to_uppercase().parse::<Claim>().unwrap(), c);
        }
        assert_eq!("sdu ci-vs-slp".parse::<Claim>().unwrap(), Claim::SduciVsSlp);
        assert_eq!(
            "dual-operator-P-R".parse::<Claim>().unwrap(),
            Claim::DualOperator(DualItem::Pr)
        );
        assert_eq!(
            "semigraphoid-P-iff-I".parse::<Claim>().unwrap(),
            Claim::PIffI
        );
        assert!(matches!(
            "nope".parse::<Claim>(),
            Err(Error::UnknownClaim(_))
        ));
    }

    #[test]
    fn exhaustive_dual_pr_at_three() {
        let r = search_counterexample(Claim::DualOperator(DualItem::Pr), 3, 0, 0).unwrap();
        assert_eq!(r.population, Population::Exhaustive { p: 3 });
        assert_eq!(r.checked, 512);
        assert!(r.passed());
    }

    #[test]
    fn localizable_implies_c_fails_with_witness() {
        let r = search_counterexample(Claim::LocalizableImpliesC, 3, 0, 0).unwrap();
        assert!(!r.passed());
        let w = contraction_witness(GroundSet::standard(3).unwrap().shared()).unwrap();
        assert!(matches!(
            check_relation(Claim::LocalizableImpliesC, &w),
            Outcome::Fails(_)
        ));
    }

    #[test]
    fn sampled_runs_are_deterministic() {
        let a = search_counterexample(Claim::SemiParsim, 4, 300, 11).unwrap();
        let b = search_counterexample(Claim::SemiParsim, 4, 300, 11).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.checked, 300);
        assert!(a.passed());
    }

    #[test]
    fn semigraphoid_population_is_never_vacuous() {
        let r = search_counterexample(Claim::PIffI, 4, 200, 3).unwrap();
        assert_eq!(r.vacuous, 0);
        assert_eq!(r.checked, 200);
        assert!(r.passed());
    }

    #[test]
    fn size_limits() {
        assert!(search_counterexample(Claim::SemiParsim, 7, 1, 0).is_err());
        assert!(run_claim(Claim::SemiParsim, 4, 1, 0, Strategy::Exhaustive).is_err());
        assert!(run_claim(Claim::GaussianDuality, 3, 1, 0, Strategy::Exhaustive).is_err());
    }

    #[test]
    fn chunking_covers_range() {
        let v: Vec<_> = chunks(CHUNK * 2 + 5).collect();
        assert_eq!(v.len(), 3);
        assert_eq!(v[2], 2 * CHUNK..2 * CHUNK + 5);
    }
}
