//! The rule catalog: instance enumeration and closure checks with witnesses.
//!
//! Every rule is a schema over pairwise disjoint vertex sets. Instances are
//! enumerated by iterating disjoint submasks of the ground set, in a fixed
//! order, so the first reported violation is deterministic.
//!
//! | tag     | antecedents                              | consequents                        |
//! |---------|------------------------------------------|------------------------------------|
//! | `D`     | `(A,BC|S)`                               | `(A,B|S)`                          |
//! | `U`     | `(A,BC|S)`                               | `(A,B|SC)`                         |
//! | `C`     | `(A,B|S)`, `(A,C|SB)`                    | `(A,BC|S)`                         |
//! | `DUC`   | `(A,BC|S)` / `(A,B|S)`, `(A,C|SB)`       | the other side                     |
//! | `L_fwd` | `(A,B|S)`                                | `(a,b|S')` for the local family    |
//! | `L_bwd` | the local family of `(A,B|S)`            | `(A,B|S)`                          |
//! | `I`     | `(A,B|SC)`, `(A,C|SB)`                   | `(A,BC|S)`                         |
//! | `M`     | `(A,B|S)`, `(A,C|S)`                     | `(A,BC|S)`                         |
//! | `P`     | `(a,b|Sc)`, `(a,c|Sb)`                   | `(a,b|S)` and `(a,c|S)`            |
//! | `R`     | `(a,b|S)`, `(a,c|S)`                     | `(a,b|Sc)` and `(a,c|Sb)`          |
//! | `DT`    | `(aB,De|c)`, `(a,e|BD)`                  | `(a,c|B)` or `(c,e|D)`             |
//! | `DDT`   | `(aB,De|V\aBcDe)`, `(a,e|V\aBDe)`        | `(a,c|V\aBc)` or `(c,e|V\cDe)`     |
//!
//! The local family of `(A,B|S)` is every `(a,b|S')` with `a ∈ A`, `b ∈ B`
//! and `S ⊆ S' ⊆ SAB\ab`.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relation::{enumerate_triples, Relation};
use crate::triple::Triple;
use crate::vertex::{GroundSet, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    D,
    U,
    C,
    Duc,
    LFwd,
    LBwd,
    I,
    M,
    P,
    R,
    Dt,
    Ddt,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::D,
        Rule::U,
        Rule::C,
        Rule::Duc,
        Rule::LFwd,
        Rule::LBwd,
        Rule::I,
        Rule::M,
        Rule::P,
        Rule::R,
        Rule::Dt,
        Rule::Ddt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::D => "D",
            Rule::U => "U",
            Rule::C => "C",
            Rule::Duc => "DUC",
            Rule::LFwd => "L_fwd",
            Rule::LBwd => "L_bwd",
            Rule::I => "I",
            Rule::M => "M",
            Rule::P => "P",
            Rule::R => "R",
            Rule::Dt => "DT",
            Rule::Ddt => "DDT",
        }
    }

    /// Horn rules have a conjunctive consequent and can drive closure.
    pub fn is_horn(self) -> bool {
        !matches!(self, Rule::Dt | Rule::Ddt)
    }

    /// Parses a comma-separated, case-insensitive rule list. `L` expands to
    /// both localizability directions. Duplicates are dropped.
    pub fn parse_list(s: &str) -> Result<Vec<Rule>> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let rules: &[Rule] = if tok.eq_ignore_ascii_case("L") {
                &[Rule::LFwd, Rule::LBwd]
            } else {
                &[tok.parse::<Rule>()?]
            };
            for &r in rules {
                if !out.contains(&r) {
                    out.push(r);
                }
            }
        }
        Ok(out)
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One instantiation of a rule schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: Rule,
    pub antecedents: Vec<Triple>,
    /// Conjunctive for Horn rules, a disjunction for `DT`/`DDT`.
    pub consequents: Vec<Triple>,
}

impl RuleInstance {
    pub fn is_disjunctive(&self) -> bool {
        !self.rule.is_horn()
    }

    pub fn display<'a>(&'a self, ground: &'a GroundSet) -> impl fmt::Display + 'a {
        InstanceDisplay { inst: self, ground }
    }
}

struct InstanceDisplay<'a> {
    inst: &'a RuleInstance,
    ground: &'a GroundSet,
}

impl fmt::Display for InstanceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ts: &[Triple], sep: &str| {
            ts.iter()
                .map(|t| format!("({})", t.display(self.ground)))
                .collect::<Vec<_>>()
                .join(sep)
        };
        let sep = if self.inst.is_disjunctive() {
            " or "
        } else {
            ", "
        };
        write!(
            f,
            "{}: {} => {}",
            self.inst.rule,
            join(&self.inst.antecedents, ", "),
            join(&self.inst.consequents, sep)
        )
    }
}

/// An instance whose antecedents all hold while its consequent does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub instance: RuleInstance,
    /// Absent consequents: the unmet conjuncts, or both disjuncts.
    pub missing: Vec<Triple>,
}

impl Violation {
    pub fn display<'a>(&'a self, ground: &'a GroundSet) -> impl fmt::Display + 'a {
        ViolationDisplay {
            violation: self,
            ground,
        }
    }
}

struct ViolationDisplay<'a> {
    violation: &'a Violation,
    ground: &'a GroundSet,
}

impl fmt::Display for ViolationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}; missing",
            self.violation.instance.display(self.ground)
        )?;
        for t in &self.violation.missing {
            write!(f, " ({})", t.display(self.ground))?;
        }
        Ok(())
    }
}

/// Calls `f(antecedents, consequents)` for every instance of `rule` over a
/// ground set of size `p`, stopping early on `Break`.
pub fn for_each_instance<F>(rule: Rule, p: usize, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[Triple], &[Triple]) -> ControlFlow<()>,
{
    let v = VertexSet::full(p);
    let tr = Triple::canonical;
    match rule {
        Rule::D => four_sets(v, false, |a, b, c, s| f(&[tr(a, b | c, s)], &[tr(a, b, s)])),
        Rule::U => four_sets(v, false, |a, b, c, s| {
            f(&[tr(a, b | c, s)], &[tr(a, b, s | c)])
        }),
        Rule::C => four_sets(v, false, |a, b, c, s| {
            f(&[tr(a, b, s), tr(a, c, s | b)], &[tr(a, b | c, s)])
        }),
        Rule::Duc => four_sets(v, false, |a, b, c, s| {
            let whole = tr(a, b | c, s);
            let parts = [tr(a, b, s), tr(a, c, s | b)];
            f(&[whole], &parts)?;
            f(&parts, &[whole])
        }),
        Rule::LFwd | Rule::LBwd => {
            let mut family = Vec::new();
            for t in enumerate_triples(p).filter(|t| !t.is_pairwise()) {
                local_family(&t, &mut family);
                if rule == Rule::LFwd {
                    f(&[t], &family)?;
                } else {
                    f(&family, &[t])?;
                }
            }
            ControlFlow::Continue(())
        }
        Rule::I => four_sets(v, true, |a, b, c, s| {
            f(&[tr(a, b, s | c), tr(a, c, s | b)], &[tr(a, b | c, s)])
        }),
        Rule::M => four_sets(v, true, |a, b, c, s| {
            f(&[tr(a, b, s), tr(a, c, s)], &[tr(a, b | c, s)])
        }),
        Rule::P => three_singletons(v, |a, b, c, s| {
            f(
                &[tr(a, b, s | c), tr(a, c, s | b)],
                &[tr(a, b, s), tr(a, c, s)],
            )
        }),
        Rule::R => three_singletons(v, |a, b, c, s| {
            f(
                &[tr(a, b, s), tr(a, c, s)],
                &[tr(a, b, s | c), tr(a, c, s | b)],
            )
        }),
        Rule::Dt => transitivity(v, |a, bb, c, dd, e| {
            f(
                &[tr(a | bb, dd | e, c), tr(a, e, bb | dd)],
                &[tr(a, c, bb), tr(c, e, dd)],
            )
        }),
        Rule::Ddt => transitivity(v, |a, bb, c, dd, e| {
            let rest = |x: VertexSet| v - x;
            f(
                &[
                    tr(a | bb, dd | e, rest(a | bb | c | dd | e)),
                    tr(a, e, rest(a | bb | dd | e)),
                ],
                &[tr(a, c, rest(a | bb | c)), tr(c, e, rest(c | dd | e))],
            )
        }),
    }
}

/// Disjoint `(A,B,C,S)` with `A`, `B`, `C` nonempty. With `ordered_bc`,
/// only `B < C` is produced, for rules symmetric in `B` and `C`.
fn four_sets<F>(v: VertexSet, ordered_bc: bool, mut f: F) -> ControlFlow<()>
where
    F: FnMut(VertexSet, VertexSet, VertexSet, VertexSet) -> ControlFlow<()>,
{
    for a in v.nonempty_subsets() {
        for b in (v - a).nonempty_subsets() {
            for c in (v - a - b).nonempty_subsets() {
                if ordered_bc && c.bits() < b.bits() {
                    continue;
                }
                for s in (v - a - b - c).subsets() {
                    f(a, b, c, s)?;
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Distinct singletons `a`, `b < c` and `S` disjoint from all three.
fn three_singletons<F>(v: VertexSet, mut f: F) -> ControlFlow<()>
where
    F: FnMut(VertexSet, VertexSet, VertexSet, VertexSet) -> ControlFlow<()>,
{
    for ai in v.iter() {
        let a = VertexSet::singleton(ai);
        for bi in (v - a).iter() {
            let b = VertexSet::singleton(bi);
            for ci in (v - a - b).iter().filter(|&ci| ci > bi) {
                let c = VertexSet::singleton(ci);
                for s in (v - a - b - c).subsets() {
                    f(a, b, c, s)?;
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Singletons `a < e`, `c` and disjoint sets `B`, `D` for the transitivity
/// rules, which are symmetric under `(a,B) <-> (e,D)`.
fn transitivity<F>(v: VertexSet, mut f: F) -> ControlFlow<()>
where
    F: FnMut(VertexSet, VertexSet, VertexSet, VertexSet, VertexSet) -> ControlFlow<()>,
{
    for ai in v.iter() {
        let a = VertexSet::singleton(ai);
        for ei in v.iter().filter(|&ei| ei > ai) {
            let e = VertexSet::singleton(ei);
            for ci in (v - a - e).iter() {
                let c = VertexSet::singleton(ci);
                let rest = v - a - c - e;
                for bb in rest.subsets() {
                    for dd in (rest - bb).subsets() {
                        f(a, bb, c, dd, e)?;
                    }
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Fills `out` with the local family of `t`: `(a,b|S')` for `a ∈ A`,
/// `b ∈ B`, `S ⊆ S' ⊆ SAB\ab`.
pub(crate) fn local_family(t: &Triple, out: &mut Vec<Triple>) {
    out.clear();
    for ai in t.a().iter() {
        for bi in t.b().iter() {
            let (a, b) = (VertexSet::singleton(ai), VertexSet::singleton(bi));
            let free = (t.a() | t.b()) - a - b;
            for x in free.subsets() {
                out.push(Triple::canonical(a, b, t.c() | x));
            }
        }
    }
}

/// Every instance of `rule` over a ground set of size `p`, in enumeration
/// order.
pub fn instances(rule: Rule, p: usize) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    let _ = for_each_instance(rule, p, |ante, cons| {
        out.push(RuleInstance {
            rule,
            antecedents: ante.to_vec(),
            consequents: cons.to_vec(),
        });
        ControlFlow::Continue(())
    });
    out
}

/// The first instance of `rule` violated by `l`, if any.
pub fn is_closed(l: &Relation, rule: Rule) -> Option<Violation> {
    let disjunctive = !rule.is_horn();
    let mut found = None;
    let _ = for_each_instance(rule, l.p(), |ante, cons| {
        if !ante.iter().all(|t| l.contains(t)) {
            return ControlFlow::Continue(());
        }
        let violated = if disjunctive {
            !cons.iter().any(|t| l.contains(t))
        } else {
            !cons.iter().all(|t| l.contains(t))
        };
        if !violated {
            return ControlFlow::Continue(());
        }
        found = Some(Violation {
            instance: RuleInstance {
                rule,
                antecedents: ante.to_vec(),
                consequents: cons.to_vec(),
            },
            missing: cons.iter().copied().filter(|t| !l.contains(t)).collect(),
        });
        ControlFlow::Break(())
    });
    found
}

/// First violation of any rule in `rules`, checked in the given order.
pub fn first_violation(l: &Relation, rules: &[Rule]) -> Option<Violation> {
    rules.iter().find_map(|&r| is_closed(l, r))
}

pub fn is_closed_under(l: &Relation, rules: &[Rule]) -> bool {
    first_violation(l, rules).is_none()
}

/// Checks `(A,BC|S) ∈ L ⟺ (A,B|S), (A,C|SB) ∈ L` for all disjoint
/// `A`, `B`, `C` nonempty and `S`, directly rather than rule by rule.
pub fn duc_biconditional_holds(l: &Relation) -> bool {
    let v = VertexSet::full(l.p());
    four_sets(v, false, |a, b, c, s| {
        let whole = l.has(a, b | c, s);
        let parts = l.has(a, b, s) && l.has(a, c, s | b);
        if whole == parts {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    })
    .is_continue()
}

/// Checks the single-biconditional form of closure under `rule`, which
/// must be one of `I`, `M`, `P`, `R`:
///
/// | rule | biconditional |
/// |------|---------------|
/// | I | `(A,BC\|S) ∈ L ⟺ (A,B\|SC), (A,C\|SB) ∈ L` |
/// | M | `(A,BC\|S) ∈ L ⟺ (A,B\|S), (A,C\|S) ∈ L` |
/// | P | `(a,bc\|S) ∈ L ⟺ (a,b\|Sc), (a,c\|Sb) ∈ L` |
/// | R | `(a,bc\|S) ∈ L ⟺ (a,b\|S), (a,c\|S) ∈ L` |
///
/// On semigraphoids each is equivalent to closure under the rule itself.
pub fn biconditional_form_holds(l: &Relation, rule: Rule) -> Result<bool> {
    let v = VertexSet::full(l.p());
    let marginal = matches!(rule, Rule::M | Rule::R);
    let check = |a: VertexSet, b: VertexSet, c: VertexSet, s: VertexSet| {
        let parts = if marginal {
            l.has(a, b, s) && l.has(a, c, s)
        } else {
            l.has(a, b, s | c) && l.has(a, c, s | b)
        };
        if l.has(a, b | c, s) == parts {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    };
    let flow = match rule {
        Rule::I | Rule::M => four_sets(v, true, check),
        Rule::P | Rule::R => three_singletons(v, check),
        other => {
            return Err(Error::Unsupported(format!(
                "no biconditional form for rule {other}"
            )))
        }
    };
    Ok(flow.is_continue())
}

/// Closure under decomposition, weak union and contraction.
///
/// Panics if the rule-by-rule check and the single `DUC` biconditional
/// disagree, which would mean the two are not equivalent.
pub fn is_semigraphoid(l: &Relation) -> bool {
    let by_rules = is_closed_under(l, &[Rule::D, Rule::U, Rule::C]);
    assert_eq!(
        by_rules,
        duc_biconditional_holds(l),
        "D/U/C closure disagrees with the DUC biconditional"
    );
    by_rules
}

/// Both directions of localizability.
pub fn is_localizable(l: &Relation) -> bool {
    is_closed_under(l, &[Rule::LFwd, Rule::LBwd])
}
