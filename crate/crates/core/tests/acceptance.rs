//! One PASS/FAIL line per acceptance criterion.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dualgame::catalog::{self, Instance};
use dualgame::game::{all_plays, b_partition, binders_defined, child_of, enumerate_plays, extends, play_with_choices, verdict, Play, DEFAULT_BUDGET};
use dualgame::partition::p_partition;
use dualgame::problem::{ground_closure, subterms_rel, Problem};
use dualgame::term::Term;
use dualgame::tiles;
use dualgame::tiletree::TreeOfTiles;
use dualgame::transforms::{self, shrink, total_size};
use dualgame::tree::{Label, TermTree};
use dualgame::{fuzz, oracle};

type Outcome = Result<(), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn strings(ts: &[Term]) -> Vec<String> {
    let mut v: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
    v.sort();
    v
}

fn sorted(xs: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = xs.iter().map(|s| s.to_string()).collect();
    v.sort();
    v
}

fn curated_verdicts() -> Outcome {
    for inst in catalog::ALL {
        let (p, t) = inst.load();
        let start = Instant::now();
        let g = verdict(&TermTree::from_term(&t), &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let o = oracle::solves(&t, &p).map_err(|e| e.to_string())?.overall;
        let took = start.elapsed();
        check(g && o, || format!("{}: game {} oracle {}", inst.name, g, o))?;
        check(took < Duration::from_secs(1), || format!("{} took {:?}", inst.name, took))?;
    }
    Ok(())
}

fn golden_traces() -> Outcome {
    let (p, t) = catalog::FIFTH.load();
    let tree = TermTree::from_term(&t);
    let plays = all_plays(&tree, &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    check(plays.len() == 1, || format!("{} plays", plays.len()))?;
    let want = [1, 2, 3, 4, 5, 6, 17, 18, 19, 20, 3, 4, 5, 6, 7, 8, 13, 14, 15, 16, 5, 6, 17, 18, 19, 20, 3, 4, 5, 6, 7, 8, 9, 10, 17, 18, 19, 20, 3, 4, 5, 6, 11, 12];
    let got: Vec<usize> = plays[0].nodes().iter().map(|n| n + 1).collect();
    check(got == want, || format!("node column {:?}", got))?;
    check(plays[0].won_by_exists(), || "does not end in an exists state".into())?;

    let (p, t) = catalog::BINDER.load();
    let tree = TermTree::from_term(&t);
    let plays = enumerate_plays(&tree, &p, 0, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    check(plays.len() == 2, || format!("{} plays", plays.len()))?;
    let first = play_with_choices(&tree, &p, 0, &[1], DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let got: Vec<usize> = first.nodes().iter().map(|n| n + 1).collect();
    check(got == [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 12], || format!("choice 1 nodes {:?}", got))?;
    check(plays.iter().all(|pl| pl.won_by_exists()), || "a play ends in a forall state".into())
}

fn derived_sets() -> Outcome {
    let (p, _) = catalog::TWICE.load();
    let (sets, m) = p.build_sets();
    check(strings(&sets.r) == sorted(&["f (f a)", "f a", "a"]), || format!("R = {:?}", strings(&sets.r)))?;
    check(strings(&sets.l[0]) == sorted(&["λy1 y2.y1 y2", "y1 y2", "y2"]), || format!("L1 = {:?}", strings(&sets.l[0])))?;
    check(m.alpha == 2, || format!("alpha {}", m.alpha))?;

    let (p, _) = catalog::BINDER.load();
    let it = &p.items[0];
    let cl = ground_closure(&it.rhs, &it.forbidden);
    check(strings(&cl) == sorted(&["f (λx1 x2 x3.x1 x3) a", "#c1 #c3", "#c3", "a"]), || format!("closure {:?}", strings(&cl)))?;
    check(p.metrics().delta == 2, || format!("delta {}", p.metrics().delta))?;
    let cs = it.forbidden_consts();
    check(strings(&subterms_rel(&it.args[0], &cs)) == sorted(&["λz.z", "z"]), || "Sub of the identity".into())?;
    let mut scope = p.scope();
    for c in &cs {
        scope.consts.insert(c.name.to_string(), c.ty.clone());
    }
    let v = dualgame::parse::parse_term(r"\z:o. f (\z1:o->o z2:o z3:o. z1 z2) z", &scope).map_err(|e| e.to_string())?;
    let want = sorted(&["λz.f (λz1 z2 z3.z1 z2) z", "f (λz1 z2 z3.z1 z2) z", "#c1 #c2", "#c1 #c3", "#c2", "#c3", "z"]);
    check(strings(&subterms_rel(&v, &cs)) == want, || format!("Sub {:?}", strings(&subterms_rel(&v, &cs))))?;

    let (p, _) = catalog::FIFTH.load();
    let it = &p.items[0];
    let cl = ground_closure(&it.rhs, &it.forbidden);
    check(strings(&cl) == sorted(&["h (g (h (h a)))", "g (h (h a))", "h (h a)", "h a", "a"]), || format!("closure {:?}", strings(&cl)))?;
    check(p.metrics().delta == 4, || format!("delta {}", p.metrics().delta))
}

fn shrink_endpoint(inst: &Instance, literal: &str) -> Outcome {
    let (p, t) = inst.load();
    let small = p.parse_term(literal).map_err(|e| e.to_string())?;
    let ok = verdict(&TermTree::from_term(&small), &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    check(ok, || format!("{} does not pass", literal))?;
    let r = shrink(&t, &p).map_err(|e| e.to_string())?;
    let ok = verdict(&TermTree::from_term(&r.term), &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    check(ok, || format!("shrunk term {} fails", r.term))?;
    check(total_size(&r.term) <= total_size(&small), || format!("{} is larger than {}", r.term, literal))
}

fn shrinking_endpoints() -> Outcome {
    shrink_endpoint(&catalog::TWICE, r"\z:(o->o)->o->o. z (\x:o. f x) a")?;
    shrink_endpoint(&catalog::BINDER, r"\y:o->o. f (\x:o->o z1:o z2:o. x z2) a")
}

type Table = (Vec<(usize, usize)>, Vec<(usize, &'static str, usize)>);

fn partition_table(inst: &Instance, item: usize, want: Table) -> Outcome {
    let (p, t) = inst.load();
    let tree = TermTree::from_term(&t);
    let plays = enumerate_plays(&tree, &p, item, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let pp = p_partition(&tree, &plays[0]);
    check(pp.intervals() == want.0, || format!("{} intervals {:?}", inst.name, pp.intervals()))?;
    let edges: Vec<(usize, String, usize)> = pp.stages.iter().skip(1).map(|s| (s.edge.0, tree.label_string(s.edge.1), s.edge.1 + 1)).collect();
    let want_edges: Vec<(usize, String, usize)> = want.1.iter().map(|&(l, s, n)| (l, s.to_string(), n)).collect();
    check(edges == want_edges, || format!("{} edges {:?}", inst.name, edges))
}

fn partition_tables() -> Outcome {
    partition_table(
        &catalog::TWICE,
        1,
        (
            vec![(2, 3), (4, 5), (6, 7), (8, 15), (16, 17), (18, 19), (20, 23), (24, 33), (34, 34)],
            vec![(1, "λx", 3), (2, "λ", 5), (3, "λu", 7), (1, "λ", 11), (5, "λy", 13), (6, "λs", 15), (6, "λ", 17), (5, "λ", 19)],
        ),
    )?;
    partition_table(
        &catalog::FIFTH,
        0,
        (
            vec![(2, 3), (4, 5), (6, 7), (8, 9), (10, 15), (16, 17), (18, 19), (20, 33), (34, 43), (44, 44)],
            vec![(1, "λz1", 3), (2, "λx1", 5), (1, "λz2", 17), (4, "λ", 19), (3, "λ", 7), (2, "λx2", 13), (7, "λ", 15), (6, "λ", 9), (9, "λ", 11)],
        ),
    )
}

fn unfolding_example() -> Outcome {
    let (p, t) = catalog::TWICE.load();
    let tree = TermTree::from_term(&t);
    let tt = TreeOfTiles::from_game(&tree, &p).map_err(|e| e.to_string())?;
    check(tt.unfoldable_at(5, 6).is_ok(), || "the sixth tile should unfold at the seventh".into())?;
    let u = tt.unfold(4, 7).map_err(|e| e.to_string())?;
    let tau8 = &u.occs[7];
    let head_ok = matches!(&tau8.tile.head, Term::Var(z) if z.name() == "z");
    let inner = tau8.tile.args[0].sub.as_deref();
    let leaf_ok = tau8.tile.args.len() == 2
        && tau8.tile.args[0].binders.len() == 1
        && matches!(inner, Some(s) if s.args.is_empty() && s.head_var() == Some(&tau8.tile.args[0].binders[0]))
        && tau8.tile.args[1].sub.is_none();
    check(head_ok && leaf_ok, || format!("unfolded tile {}", tau8.tile.render()))?;
    check(tau8.edge == Some((5, vec![1])), || format!("unfolded tile hangs at {:?}", tau8.edge))?;
    check(u.occs[8].edge == Some((7, vec![1])), || format!("last tile hangs at {:?}", u.occs[8].edge))?;
    let x = u.extract().map_err(|e| e.to_string())?;
    let ok = verdict(&TermTree::from_term(&x), &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    check(ok, || format!("extraction {} fails", x))?;
    let r = shrink(&x, &p).map_err(|e| e.to_string())?;
    check(r.steps.iter().any(|s| s.kind == transforms::StepKind::T2), || "no T2 removal applied".into())?;
    let ok = verdict(&TermTree::from_term(&r.term), &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    check(ok && oracle::solves(&r.term, &p).map(|o| o.overall).unwrap_or(false), || format!("after removals {} fails", r.term))
}

fn differential_fuzzing() -> Outcome {
    let start = Instant::now();
    let r = fuzz::fuzz(&fuzz::FuzzConfig { seed: 1, count: 1000, max_order: 5 });
    let took = start.elapsed();
    check(r.pairs == 1000 && r.mismatches.is_empty(), || r.render())?;
    check(took < Duration::from_secs(60), || format!("took {:?}", took))
}

fn third_order_small_model() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..100 {
        let (p, t) = fuzz::planted(&mut rng, 3);
        let r = shrink(&t, &p).map_err(|e| e.to_string())?;
        for s in &r.steps {
            let ok = verdict(&TermTree::from_term(&s.term), &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            check(ok, || format!("problem {}: step {} loses the verdict", k, s.step))?;
        }
        let m = p.metrics();
        let bound = transforms::third_order_bound(m.delta, m.p);
        check(total_size(&r.term) <= bound, || format!("problem {}: size {} above {}\n{}", k, total_size(&r.term), bound, p.to_source()))?;
    }
    Ok(())
}

/// Every structural property over every play of one instance.
fn properties_of(p: &Problem, t: &Term) -> Outcome {
    let tree = TermTree::from_term(t);
    let plays: Vec<Play> = all_plays(&tree, p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    for (pi, play) in plays.iter().enumerate() {
        let n = play.len();
        for j in 2..n {
            let i = child_of(&tree, play, j);
            check(matches!(i, Some(i) if i < j), || format!("play {} position {} has no parent", pi, j))?;
            let i = i.unwrap_or(1);
            let (a, b) = (play.at(i), play.at(j));
            check(extends(&b.theta, &a.theta) && extends(&b.xi, &a.xi), || format!("play {} position {} does not extend {}", pi, j, i))?;
        }
        for j in 1..=n {
            let q = play.at(j);
            if !q.state.is_final() {
                check(binders_defined(&tree, q), || format!("play {} position {} has undefined binders", pi, j))?;
            }
            if tree.is_lambda(q.node) {
                let bp = b_partition(&tree, play, j).ok_or_else(|| format!("play {} position {} has no b-partition", pi, j))?;
                let covers = bp.first() == Some(&(1, 1)) && bp.last().map(|s| s.1) == Some(j) && bp.windows(2).all(|w| w[1].0 == w[0].1 + 1);
                let children = bp.iter().skip(1).all(|&(s, e)| child_of(&tree, play, e) == Some(s));
                check(covers && children, || format!("play {} position {} b-partition {:?}", pi, j, bp))?;
            }
        }
        for tile in tiles::simple_tiles(&tree) {
            let on = tiles::plays_on(&tree, play, tile.root);
            if matches!(tree.node(tile.root).label, Label::Const(_)) {
                check(on.iter().all(|q| q.end == q.start + 1), || format!("constant tile {} play spans more", tile.root + 1))?;
            }
            let class = tiles::classify(&tree, tile.root);
            for q in &on {
                if class.j_end.contains(&q.leaf) {
                    let later = on.iter().any(|r| r.start == q.start && r.end > q.end);
                    check(!later, || format!("end tile {} has a play from {} past {}", tile.root + 1, q.start, q.end))?;
                }
            }
        }
    }
    Ok(())
}

fn property_suite() -> Outcome {
    for inst in catalog::ALL {
        let (p, t) = inst.load();
        properties_of(&p, &t).map_err(|e| format!("{}: {}", inst.name, e))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..100 {
        let (p, t) = fuzz::planted(&mut rng, 2 + k % 4);
        properties_of(&p, &t).map_err(|e| format!("fuzzed {}: {}\n{}\n{}", k, e, t, p.to_source()))?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("game and oracle agree on the curated instances", curated_verdicts),
        ("golden traces", golden_traces),
        ("derived sets", derived_sets),
        ("shrinking endpoints", shrinking_endpoints),
        ("p-partition tables", partition_tables),
        ("unfolding example", unfolding_example),
        ("differential fuzzing", differential_fuzzing),
        ("third-order small model", third_order_small_model),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(()) => println!("criterion {}: PASS {}", i + 1, name),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {}: {}", i + 1, name, e);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
