use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dualgame::fuzz::{self, FuzzConfig};
use dualgame::game::{self, all_plays, play_with_choices, trace_lines, DEFAULT_BUDGET};
use dualgame::oracle;
use dualgame::problem::{Problem, Rel};
use dualgame::solver::{self, SearchConfig, SolveError};
use dualgame::term::Term;
use dualgame::tiles;
use dualgame::tiletree::TreeOfTiles;
use dualgame::transforms::{self, show_bound};
use dualgame::tree::TermTree;

#[derive(Parser)]
#[command(name = "dualgame", version, about = "Tree-checking games for dual interpolation problems")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Print nothing; only the exit status reports the outcome.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a term solves a problem.
    Check { problem: PathBuf, term: PathBuf },
    /// Print one play of the game.
    Trace {
        problem: PathBuf,
        term: PathBuf,
        /// 1-based item number.
        #[arg(long, default_value_t = 1)]
        eq: usize,
        /// Comma-separated forall choices, in order.
        #[arg(long, value_delimiter = ',')]
        choices: Vec<usize>,
        /// Append look-up table changes.
        #[arg(long)]
        tables: bool,
    },
    /// Dump the tree of tiles built from every play.
    Tiles {
        problem: PathBuf,
        term: PathBuf,
        /// Also unfold until nothing is unfoldable and extract a term.
        #[arg(long)]
        saturate: bool,
    },
    /// Apply T1 and T2 until neither applies.
    Shrink {
        problem: PathBuf,
        term: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a solution by size.
    Solve {
        problem: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        steps: usize,
        #[arg(long)]
        use_size_bound: bool,
    },
    /// Print the problem metrics and size bounds.
    Bound {
        problem: PathBuf,
        /// Number of top tiles for the fifth-order depth bound.
        #[arg(long)]
        top_tiles: Option<usize>,
    },
    /// Compare the game with the oracle on random planted problems.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_order: usize,
    },
}

struct Report {
    code: u8,
    text: String,
    json: Value,
}

fn fail(msg: String) -> Report {
    Report { code: 2, text: format!("error: {}\n", msg), json: json!({ "error": msg }) }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))
}

fn load_problem(path: &Path) -> Result<Problem, String> {
    Problem::parse(&read(path)?).map_err(|e| format!("{}:{}", path.display(), e))
}

fn load_term(p: &Problem, path: &Path) -> Result<Term, String> {
    let t = p.parse_term(read(path)?.trim()).map_err(|e| format!("{}:{}", path.display(), e))?;
    oracle::check_candidate(&t, p).map_err(|e| format!("{}: {}", path.display(), e))?;
    Ok(t)
}

fn check(problem: &Path, term: &Path) -> Result<Report, String> {
    let p = load_problem(problem)?;
    let t = load_term(&p, term)?;
    let tree = TermTree::from_term(&t);
    let mut text = String::new();
    let mut items = Vec::new();
    let mut held = 0;
    for (i, it) in p.items.iter().enumerate() {
        let ok = game::item_holds(&tree, &p, i, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        held += usize::from(ok);
        let rel = if it.rel == Rel::Eq { "eq" } else { "neq" };
        text.push_str(&format!("{}\t{}\t{}\n", i + 1, rel, if ok { "holds" } else { "fails" }));
        items.push(json!({ "item": i + 1, "rel": rel, "holds": ok }));
    }
    let all = held == p.items.len();
    let agrees = oracle::solves(&t, &p).map(|r| r.overall == all).unwrap_or(false);
    text.push_str(&format!("{}/{} equations hold\n", held, p.items.len()));
    if !agrees {
        text.push_str("warning: the oracle disagrees\n");
    }
    let json = json!({ "items": items, "holds": held, "total": p.items.len(), "solves": all, "oracle_agrees": agrees });
    Ok(Report { code: if all { 0 } else { 1 }, text, json })
}

fn trace(problem: &Path, term: &Path, eq: usize, choices: &[usize], tables: bool) -> Result<Report, String> {
    let p = load_problem(problem)?;
    let t = load_term(&p, term)?;
    if eq == 0 || eq > p.items.len() {
        return Err(format!("no item {}", eq));
    }
    let tree = TermTree::from_term(&t);
    let play = play_with_choices(&tree, &p, eq - 1, choices, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let lines = trace_lines(&play, tables);
    let mut text = lines.join("\n");
    text.push('\n');
    let rows: Vec<Value> = play
        .positions
        .iter()
        .map(|q| json!({ "index": q.index, "node": q.node + 1, "move": q.mv.to_string(), "state": q.state.to_string(), "choice": q.choice }))
        .collect();
    let won = play.won_by_exists();
    Ok(Report { code: if won { 0 } else { 1 }, text, json: json!({ "positions": rows, "exists_wins": won }) })
}

fn tiles_cmd(problem: &Path, term: &Path, saturate: bool) -> Result<Report, String> {
    let p = load_problem(problem)?;
    let t = load_term(&p, term)?;
    let tree = TermTree::from_term(&t);
    let plays = all_plays(&tree, &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let tt = TreeOfTiles::build(&tree, &plays);
    let mut text = String::from("id\troot\tleaves\tclass\tlevel\tfamily\tplays\tspecial\n");
    let mut rows = Vec::new();
    for (i, o) in tt.occs.iter().enumerate() {
        let root = o.root.expect("built from simple tiles");
        let c = tiles::classify(&tree, root);
        let leaves: Vec<String> = tree.children(root).iter().map(|l| (l + 1).to_string()).collect();
        let mut class = Vec::new();
        if c.is_top {
            class.push("top".to_string());
        }
        if c.is_constant {
            class.push("constant".to_string());
        }
        if c.is_end {
            class.push("end".to_string());
        } else if !c.j_end.is_empty() {
            class.push(format!("end{:?}", c.j_end.iter().collect::<Vec<_>>()));
        }
        if c.is_embedded {
            class.push("embedded".to_string());
        }
        let family = tiles::family_root(&tree, root) + 1;
        let ps: Vec<String> = o.plays.iter().map(|(pl, k, (s, e))| format!("{}:{}:({},{})", pl + 1, k, s, e)).collect();
        let special: Vec<&str> = [(o.nri, "nri"), (o.final_stage, "final"), (o.separator, "separator")].iter().filter(|f| f.0).map(|f| f.1).collect();
        let level = c.level.map_or("-".to_string(), |l| l.to_string());
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            i + 1,
            root + 1,
            leaves.join(","),
            class.join(","),
            level,
            family,
            ps.join(" "),
            special.join(",")
        ));
        rows.push(json!({
            "id": i + 1, "root": root + 1, "tile": o.tile.render(), "leaves": leaves, "class": class,
            "level": c.level, "family": family, "plays": ps, "special": special,
            "edge": o.edge.as_ref().map(|(t, path)| json!({ "tile": t + 1, "leaf": path.iter().map(|x| x + 1).collect::<Vec<_>>() })),
        }));
    }
    let mut json = json!({ "tiles": rows });
    if saturate {
        let (sat, log) = tt.saturate(10_000);
        text.push_str("\nunfoldings\n");
        for (k, m) in &log {
            text.push_str(&format!("{} at {}\n", k + 1, m + 1));
        }
        text.push('\n');
        text.push_str(&sat.render());
        let extracted = sat.extract().map_err(|e| e.to_string())?;
        let ok = game::verdict(&TermTree::from_term(&extracted), &p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        text.push_str(&format!("extraction\t{}\t{}\n", extracted, if ok { "solves" } else { "fails" }));
        json["unfoldings"] = json!(log.iter().map(|(k, m)| [k + 1, m + 1]).collect::<Vec<_>>());
        json["extraction"] = json!({ "term": extracted.to_string(), "solves": ok });
    }
    Ok(Report { code: 0, text, json })
}

fn shrink_cmd(problem: &Path, term: &Path, out: Option<&Path>) -> Result<Report, String> {
    let p = load_problem(problem)?;
    let t = load_term(&p, term)?;
    let r = transforms::shrink(&t, &p).map_err(|e| e.to_string())?;
    let mut text = String::from("step\tkind\tnode\tbefore\tafter\n");
    let mut steps = Vec::new();
    for s in &r.steps {
        text.push_str(&format!("{}\n", s));
        steps.push(json!({ "step": s.step, "kind": format!("{:?}", s.kind), "node": s.node, "before": s.before, "after": s.after, "term": s.term.to_string() }));
    }
    text.push_str(&format!("{}\n", r.term.to_source()));
    if let Some(path) = out {
        fs::write(path, format!("{}\n", r.term.to_source())).map_err(|e| format!("{}: {}", path.display(), e))?;
    }
    let sizes = transforms::sizes(&r.term);
    let json = json!({ "steps": steps, "term": r.term.to_source(), "total_tiles": sizes.total_tiles, "depth_tiles": sizes.depth_tiles });
    Ok(Report { code: 0, text, json })
}

fn solve_cmd(problem: &Path, cfg: SearchConfig) -> Result<Report, String> {
    let p = load_problem(problem)?;
    match solver::solve(&p, &cfg) {
        Ok(s) => {
            let mut text = String::new();
            if let Some(w) = &s.warning {
                text.push_str(&format!("warning: {}\n", w));
            }
            text.push_str(&format!("{}\ntried {}\n", s.term.to_source(), s.tried));
            Ok(Report { code: 0, text, json: json!({ "term": s.term.to_source(), "tried": s.tried, "warning": s.warning }) })
        }
        Err(SolveError::CapExhausted { tried }) => {
            Ok(Report { code: 1, text: format!("no solution within the caps\ntried {}\n", tried), json: json!({ "term": null, "tried": tried }) })
        }
        Err(e) => Err(e.to_string()),
    }
}

fn bound_cmd(problem: &Path, top_tiles: Option<usize>) -> Result<Report, String> {
    let p = load_problem(problem)?;
    let b = transforms::bounds(&p);
    let g: Vec<String> = b.g_table.iter().map(|v| show_bound(*v)).collect();
    let mut text = format!(
        "order\t{}\nn\t{}\ndelta\t{}\nalpha\t{}\np\t{}\ng\t{}\nN(n)\t{}\nthird-order bound\t{}\ngeneral bound\t{}\n",
        b.order,
        b.order_n,
        b.delta,
        b.alpha,
        b.p,
        g.join(","),
        show_bound(b.n_n),
        b.third_order_bound,
        show_bound(b.general_bound)
    );
    let fifth = top_tiles.map(|k| transforms::fifth_order_bound(k, b.alpha, b.delta, b.p));
    if let Some(f) = fifth {
        text.push_str(&format!("fifth-order depth bound\t{}\n", f));
    }
    let json = json!({
        "order": b.order, "n": b.order_n, "delta": b.delta, "alpha": b.alpha, "p": b.p, "g": g,
        "N": show_bound(b.n_n), "third_order_bound": b.third_order_bound,
        "general_bound": show_bound(b.general_bound), "fifth_order_bound": fifth,
    });
    Ok(Report { code: 0, text, json })
}

fn fuzz_cmd(cfg: FuzzConfig) -> Report {
    let r = fuzz::fuzz(&cfg);
    let mismatches: Vec<Value> = r
        .mismatches
        .iter()
        .map(|m| json!({ "problem": m.problem, "term": m.term, "game": format!("{:?}", m.game), "oracle": m.oracle }))
        .collect();
    let json = json!({ "seed": cfg.seed, "pairs": r.pairs, "solutions": r.solutions, "mismatches": mismatches });
    Report { code: if r.mismatches.is_empty() { 0 } else { 1 }, text: r.render(), json }
}

fn run(cli: &Cli) -> Report {
    let r = match &cli.cmd {
        Command::Check { problem, term } => check(problem, term),
        Command::Trace { problem, term, eq, choices, tables } => trace(problem, term, *eq, choices, *tables),
        Command::Tiles { problem, term, saturate } => tiles_cmd(problem, term, *saturate),
        Command::Shrink { problem, term, out } => shrink_cmd(problem, term, out.as_deref()),
        Command::Solve { problem, max_size, max_depth, steps, use_size_bound } => {
            let cfg = SearchConfig { max_total_tiles: *max_size, max_depth_tiles: *max_depth, step_budget: *steps, use_bound: *use_size_bound, ..Default::default() };
            solve_cmd(problem, cfg)
        }
        Command::Bound { problem, top_tiles } => bound_cmd(problem, *top_tiles),
        Command::Fuzz { seed, count, max_order } => Ok(fuzz_cmd(FuzzConfig { seed: *seed, count: *count, max_order: *max_order })),
    };
    r.unwrap_or_else(fail)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let r = run(&cli);
    if !cli.quiet {
        match cli.format {
            Format::Text if r.code == 2 => eprint!("{}", r.text),
            Format::Text => print!("{}", r.text),
            Format::Json => println!("{}", serde_json::to_string_pretty(&r.json).expect("serializable")),
        }
    }
    ExitCode::from(r.code)
}
