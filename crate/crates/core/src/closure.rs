//! Least fixed points under Horn rules.
//!
//! [`ClosureProgram`] compiles the instances of a rule set once and then
//! closes relations by counter-based forward chaining: every instance keeps
//! the number of antecedents not yet derived, and fires when it reaches
//! zero. [`close_naive`] rescans all instances until nothing changes and is
//! kept as the reference implementation.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::rules::{for_each_instance, Rule};
use crate::triple::Triple;

/// Largest ground set for which instances are compiled; beyond it
/// [`close`] falls back to [`close_naive`].
pub const COMPILED_MAX_VERTICES: usize = 8;

/// Compiled Horn instances for a fixed ground-set size and rule set.
pub struct ClosureProgram {
    p: usize,
    rules: Vec<Rule>,
    /// Antecedent count per instance.
    needs: Vec<u32>,
    cons_start: Vec<u32>,
    cons: Vec<u64>,
    /// Instances watching each triple code, CSR layout.
    watch_start: Vec<u32>,
    watch: Vec<u32>,
}

impl ClosureProgram {
    pub fn new(p: usize, rules: &[Rule]) -> Result<Self> {
        check_horn(rules)?;
        if p > COMPILED_MAX_VERTICES {
            return Err(Error::Unsupported(format!(
                "compiled closure supports at most {COMPILED_MAX_VERTICES} vertices"
            )));
        }
        let codes = 1usize << (2 * p);
        let mut needs = Vec::new();
        let mut cons_start = vec![0u32];
        let mut cons = Vec::new();
        let mut edges: Vec<(u64, u32)> = Vec::new();
        let mut ante_buf: Vec<u64> = Vec::new();

        for &rule in rules {
            let _ = for_each_instance(rule, p, |ante, con| {
                let id = needs.len() as u32;
                ante_buf.clear();
                ante_buf.extend(ante.iter().map(Triple::code));
                ante_buf.sort_unstable();
                ante_buf.dedup();
                needs.push(ante_buf.len() as u32);
                edges.extend(ante_buf.iter().map(|&c| (c, id)));
                cons.extend(con.iter().map(Triple::code));
                cons_start.push(cons.len() as u32);
                ControlFlow::Continue(())
            });
        }

        let mut watch_start = vec![0u32; codes + 1];
        for &(code, _) in &edges {
            watch_start[code as usize + 1] += 1;
        }
        for i in 0..codes {
            watch_start[i + 1] += watch_start[i];
        }
        let mut fill = watch_start.clone();
        let mut watch = vec![0u32; edges.len()];
        for (code, id) in edges {
            let slot = &mut fill[code as usize];
            watch[*slot as usize] = id;
            *slot += 1;
        }

        Ok(ClosureProgram {
            p,
            rules: rules.to_vec(),
            needs,
            cons_start,
            cons,
            watch_start,
            watch,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn instance_count(&self) -> usize {
        self.needs.len()
    }

    /// Smallest superset of `l` closed under the program's rules.
    pub fn close(&self, l: &Relation) -> Result<Relation> {
        if l.p() != self.p {
            return Err(Error::GroundMismatch);
        }
        let mut out = l.clone();
        let mut remaining = self.needs.clone();
        let mut queue: Vec<u64> = l.iter().map(|t| t.code()).collect();
        while let Some(code) = queue.pop() {
            let (lo, hi) = (
                self.watch_start[code as usize] as usize,
                self.watch_start[code as usize + 1] as usize,
            );
            for &id in &self.watch[lo..hi] {
                let left = &mut remaining[id as usize];
                *left -= 1;
                if *left != 0 {
                    continue;
                }
                let (cs, ce) = (
                    self.cons_start[id as usize] as usize,
                    self.cons_start[id as usize + 1] as usize,
                );
                for &c in &self.cons[cs..ce] {
                    let t = Triple::from_code(c).expect("compiled codes are canonical");
                    if out.insert_unchecked(t) {
                        queue.push(c);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn check_horn(rules: &[Rule]) -> Result<()> {
    match rules.iter().find(|r| !r.is_horn()) {
        Some(r) => Err(Error::NonHornRule(r.name())),
        None => Ok(()),
    }
}

/// Smallest superset of `l` closed under every rule in `rules`.
///
/// Fails if a rule has a disjunctive consequent.
pub fn close(l: &Relation, rules: &[Rule]) -> Result<Relation> {
    check_horn(rules)?;
    if rules.is_empty() {
        return Ok(l.clone());
    }
    if l.p() > COMPILED_MAX_VERTICES {
        return close_naive(l, rules);
    }
    ClosureProgram::new(l.p(), rules)?.close(l)
}

/// Fixed point by repeated full passes over all instances.
pub fn close_naive(l: &Relation, rules: &[Rule]) -> Result<Relation> {
    check_horn(rules)?;
    let mut cur = l.clone();
    loop {
        let mut changed = false;
        for &rule in rules {
            let _ = for_each_instance(rule, cur.p(), |ante, cons| {
                if ante.iter().all(|t| cur.contains(t)) {
                    for &t in cons {
                        changed |= cur.insert_unchecked(t);
                    }
                }
                ControlFlow::Continue(())
            });
        }
        if !changed {
            return Ok(cur);
        }
    }
}
