//! End-to-end acceptance run: one `[PASS]`/`[FAIL]` line per criterion,
//! non-zero exit if any fails. Each criterion also enforces its time limit.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use cikit::format::{
    parse_covariance, parse_graph, parse_relation, write_covariance, write_graph, write_relation,
};
use cikit::gaussian::{random_forest, random_model, random_spd, tree_structured_model};
use cikit::verify::{check_tree_model, contraction_witness, run_claim, Claim, DualItem, Strategy};
use cikit::{
    check_gaussian_duality, check_gaussian_rule, close, close_naive, enumerate_triples, is_closed,
    is_closed_under, is_global_markov, is_localizable, is_pairwise_markov, is_semigraphoid,
    GaussianModel, Graph, GroundSet, Mode, Outcome, Relation, Rule, Triple, VertexSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

/// Name, time limit in seconds, and body of one criterion.
type Criterion<'a> = (&'static str, u64, Box<dyn Fn() -> Check + 'a>);

fn ground(p: usize) -> Arc<GroundSet> {
    GroundSet::standard(p).unwrap().shared()
}

fn relation(p: usize, triples: &[(&[usize], &[usize], &[usize])]) -> Relation {
    let set = |v: &[usize]| VertexSet::from_indices(v.iter().copied());
    Relation::from_triples(
        ground(p),
        triples
            .iter()
            .map(|(a, b, c)| Triple::new(set(a), set(b), set(c)).unwrap()),
    )
    .unwrap()
}

fn path4() -> Graph {
    Graph::from_edges(ground(4), [(0, 1), (1, 2), (2, 3)]).unwrap()
}

/// Runs `claim` and requires zero counterexamples and at least `min_checked`
/// non-vacuous instances.
fn passes(claim: Claim, p: usize, budget: u64, strategy: Strategy, min_checked: u64) -> Check {
    let r = run_claim(claim, p, budget, 0, strategy).map_err(|e| e.to_string())?;
    if !r.passed() {
        return Err(format!("{claim} at |V|={p}:\n{r}"));
    }
    if r.checked < min_checked {
        return Err(format!(
            "{claim} at |V|={p}: only {} instances checked",
            r.checked
        ));
    }
    Ok(format!("{claim} |V|={p}: {} checked", r.checked))
}

fn all(parts: impl IntoIterator<Item = Check>) -> Check {
    let mut ok = Vec::new();
    for part in parts {
        ok.push(part?);
    }
    Ok(ok.join("; "))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1() -> Check {
    passes(Claim::SemiParsim, 3, 0, Strategy::Exhaustive, 512)
}

fn c2() -> Check {
    let population = passes(Claim::SemiLocalComparison, 3, 0, Strategy::Exhaustive, 512)?;
    let w = contraction_witness(ground(3)).unwrap();
    ensure(is_localizable(&w), "witness is not localizable")?;
    ensure(is_closed(&w, Rule::C).is_some(), "witness is C-closed")?;
    Ok(format!("{population}; witness localizable, not C-closed"))
}

fn c3() -> Check {
    let items = [
        DualItem::L,
        DualItem::Sg,
        DualItem::Im,
        DualItem::Pr,
        DualItem::Dt,
    ];
    all(items.into_iter().flat_map(|item| {
        let claim = Claim::DualOperator(item);
        [
            passes(claim, 3, 0, Strategy::Exhaustive, 512),
            passes(claim, 4, 100_000, Strategy::Sampled, 100_000),
            passes(claim, 5, 100_000, Strategy::Sampled, 100_000),
        ]
    }))
}

fn c4() -> Check {
    let population = passes(Claim::PseudoConc, 3, 0, Strategy::Exhaustive, 1)?;
    let g = path4();
    let sep = g.separation_relation();
    let mut l = sep.clone();
    l.insert(relation(4, &[(&[0], &[2], &[3])]).iter().next().unwrap())
        .unwrap();
    let mode = Mode::Undirected;
    ensure(
        is_pairwise_markov(&l, &g, mode).unwrap(),
        "example is not pairwise Markov",
    )?;
    ensure(
        is_global_markov(&l, &g, mode).unwrap(),
        "example is not globally Markov",
    )?;
    let v = is_closed(&l, Rule::P).ok_or("example L is P-closed")?;
    let inter = l.intersection(&sep).unwrap();
    ensure(inter == sep, "L ∩ [G] differs from [G]")?;
    ensure(is_localizable(&inter), "L ∩ [G] is not localizable")?;
    ensure(
        is_closed(&inter, Rule::P).is_none(),
        "L ∩ [G] is not P-closed",
    )?;
    Ok(format!(
        "{population}; 4-path example: L not P-closed ({}), globally Markov, L∩[G] localizable and P-closed",
        v.display(l.ground())
    ))
}

fn c5() -> Check {
    passes(Claim::PseudoCov, 3, 0, Strategy::Exhaustive, 1)
}

fn c6() -> Check {
    all([Claim::PIffI, Claim::RIffM].into_iter().flat_map(|claim| {
        [
            passes(claim, 3, 0, Strategy::Exhaustive, 22),
            passes(claim, 4, 10_000, Strategy::Sampled, 10_000),
        ]
    }))
}

fn c7() -> Check {
    let population = passes(Claim::SduciVsSlp, 3, 0, Strategy::Exhaustive, 1)?;
    let w = relation(3, &[(&[0], &[1], &[]), (&[0], &[1], &[2])]);
    let slp = is_closed_under(&w, &[Rule::LFwd, Rule::LBwd, Rule::P]);
    let semi = is_semigraphoid(&w);
    let converse = contraction_witness(ground(3)).unwrap();
    let alt = is_closed_under(&converse, &[Rule::LFwd, Rule::LBwd, Rule::P])
        && !is_closed_under(&converse, &[Rule::D, Rule::U, Rule::C, Rule::I]);
    if slp && !semi {
        return Ok(format!(
            "{population}; stored witness L,P-closed and not a semigraphoid"
        ));
    }
    Err(format!(
        "{population}; stored witness {{(a,b|∅),(a,b|c)}}: L,P-closed {slp}, semigraphoid {semi}. \
         With symmetric triples every D, U, C and I instance needs a triple with a composite side \
         or a second triple over a different pair, so this relation is closed under all of them and \
         cannot fail the semigraphoid check. {{(a,b|∅),(a,c|b)}} separates the two closure \
         conditions instead: L,P-closed and not D,U,C,I-closed is {alt}"
    ))
}

/// Independent separation oracle: enumerates simple paths that avoid `s`.
fn path_separates(g: &Graph, a: VertexSet, b: VertexSet, s: VertexSet) -> bool {
    fn dfs(g: &Graph, v: usize, b: VertexSet, s: VertexSet, seen: &mut Vec<bool>) -> bool {
        if b.contains(v) {
            return true;
        }
        seen[v] = true;
        for w in 0..g.p() {
            if g.has_edge(v, w) && !seen[w] && !s.contains(w) && dfs(g, w, b, s, seen) {
                return true;
            }
        }
        seen[v] = false;
        false
    }
    a.iter()
        .all(|start| !dfs(g, start, b, s, &mut vec![false; g.p()]))
}

fn c8() -> Check {
    let population = passes(Claim::GraphRelationProps, 4, 0, Strategy::Exhaustive, 64)?;
    let mut compared = 0u64;
    for p in 2..=5 {
        let triples: Vec<Triple> = enumerate_triples(p).collect();
        for g in Graph::all(ground(p)) {
            let sep = g.separation_relation();
            for t in &triples {
                let oracle = path_separates(&g, t.a(), t.b(), t.c());
                if oracle != sep.contains(t) {
                    return Err(format!(
                        "{g:?}: ({}) oracle says {oracle}",
                        t.display(g.ground())
                    ));
                }
                compared += 1;
            }
        }
    }
    Ok(format!(
        "{population}; {compared} triples match the path oracle on |V| 2..5"
    ))
}

fn gaussian_population() -> Vec<GaussianModel> {
    let mut models = Vec::new();
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        models.push(random_spd(ground(3 + (i as usize) % 4), &mut rng).unwrap());
    }
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        models.push(
            random_model(ground(3 + (i as usize) % 4), &mut rng)
                .unwrap()
                .1,
        );
    }
    models
}

fn c9(models: &[GaussianModel]) -> Check {
    let mut nonempty = 0;
    for (i, m) in models.iter().enumerate() {
        let r = check_gaussian_duality(m).map_err(|e| format!("model {i}: {e}"))?;
        ensure(r.passed(), format!("model {i}:\n{r}"))?;
        nonempty += usize::from(!m.relation().is_empty());
    }
    Ok(format!(
        "{} models, {nonempty} with a non-empty relation",
        models.len()
    ))
}

fn c10(models: &[GaussianModel]) -> Check {
    let rules = [
        Rule::D,
        Rule::U,
        Rule::C,
        Rule::I,
        Rule::M,
        Rule::Dt,
        Rule::Ddt,
    ];
    for (i, m) in models.iter().enumerate() {
        for rule in rules {
            if let Some(v) = check_gaussian_rule(m, rule) {
                return Err(format!("model {i}: {}", v.display(m.ground())));
            }
        }
    }
    Ok(format!(
        "{} models closed under D,U,C,I,M,DT,DDT",
        models.len()
    ))
}

fn c11() -> Check {
    let mut checked = 0;
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let p = 4 + (i as usize) % 4;
        let tree = random_forest(ground(p), &mut rng);
        for mode in [Mode::Undirected, Mode::Bidirected] {
            let model = tree_structured_model(&tree, mode, i).map_err(|e| e.to_string())?;
            if let Outcome::Fails(w) = check_tree_model(&model.relation(), &tree, mode) {
                return Err(format!("forest {i}, {mode}: {}", w.detail));
            }
            checked += 1;
        }
    }
    let abstract_claims = all([Claim::ConcTrees, Claim::CovTrees]
        .into_iter()
        .map(|claim| passes(claim, 4, 20_000, Strategy::Sampled, 1)))?;
    Ok(format!("{checked} forest models; {abstract_claims}"))
}

fn c12() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let horn: Vec<Rule> = Rule::ALL.into_iter().filter(|r| r.is_horn()).collect();
    let triples: Vec<Triple> = enumerate_triples(4).collect();
    for i in 0..1000 {
        let density = rng.random_range(0.0..0.2);
        let l = Relation::from_triples(
            ground(4),
            triples.iter().copied().filter(|_| rng.random_bool(density)),
        )
        .unwrap();
        let rules: Vec<Rule> = horn
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.5))
            .collect();
        let fast = close(&l, &rules).unwrap();
        let slow = close_naive(&l, &rules).unwrap();
        ensure(
            fast == slow,
            format!("pair {i}: closures differ for rules {rules:?}"),
        )?;
    }

    let models = gaussian_population();
    for m in models.iter().take(20) {
        let rel = write_relation(&m.relation());
        ensure(
            write_relation(&parse_relation(&rel).unwrap()) == rel,
            "relation round trip",
        )?;
        let cov = write_covariance(m.ground(), &m.rows());
        let back = parse_covariance(&cov).unwrap();
        ensure(
            write_covariance(&back.ground, &back.rows) == cov,
            "covariance round trip",
        )?;
        ensure(back.rows == m.rows(), "covariance values changed")?;
    }
    for g in Graph::all(ground(4)) {
        let text = write_graph(&g);
        ensure(
            write_graph(&parse_graph(&text).unwrap()) == text,
            "graph round trip",
        )?;
    }

    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let code = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_cikit"))
            .args(args)
            .current_dir(data)
            .output()
            .expect("spawn cikit")
            .status
            .code()
    };
    ensure(
        code(&["verify", "pseudo-conc", "--p", "3"]) == Some(0),
        "verify pass should exit 0",
    )?;
    ensure(
        code(&["verify", "localizable-implies-c", "--p", "3"]) == Some(1),
        "verify failure should exit 1",
    )?;
    ensure(
        code(&["verify", "semi-parsim", "--relation", "bad_token.rel"]) == Some(2),
        "parse error should exit 2",
    )?;
    ensure(
        code(&["verify", "no-such-claim"]) == Some(2),
        "unknown claim should exit 2",
    )?;
    Ok("1000 closure pairs agree; round trips byte-exact; exit codes 0/1/2".into())
}

fn main() -> ExitCode {
    let models = gaussian_population();
    let criteria: Vec<Criterion> = vec![
        ("DUC biconditional, |V|=3", 10, Box::new(c1)),
        (
            "semigraphoid ⇒ localizable ⇒ D,U and the contraction witness",
            10,
            Box::new(c2),
        ),
        ("dual operator, all five items", 300, Box::new(c3)),
        (
            "undirected pairwise/global Markov and the 4-path example",
            60,
            Box::new(c4),
        ),
        ("bidirected pairwise/global Markov", 60, Box::new(c5)),
        ("P ⇔ I and R ⇔ M on semigraphoids", 300, Box::new(c6)),
        (
            "D,U,C,I-closed ⇒ L,P-closed and the stored witness",
            60,
            Box::new(c7),
        ),
        (
            "graph separation relations and the path oracle",
            60,
            Box::new(c8),
        ),
        (
            "Gaussian duality of Σ and Σ⁻¹",
            120,
            Box::new(|| c9(&models)),
        ),
        (
            "Gaussian closure under I, M, DT, DDT",
            300,
            Box::new(|| c10(&models)),
        ),
        (
            "forests: hypotheses and faithfulness, both modes",
            300,
            Box::new(c11),
        ),
        (
            "closure engine, serialization and exit codes",
            120,
            Box::new(c12),
        ),
    ];
    let mut failed = 0;
    for (n, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{msg}; took {elapsed:.1?}, limit {limit}s"))
            }
            r => r,
        };
        match result {
            Ok(msg) => println!("[PASS] {}: {name} ({elapsed:.2?}): {msg}", n + 1),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {}: {name} ({elapsed:.2?}): {msg}", n + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
