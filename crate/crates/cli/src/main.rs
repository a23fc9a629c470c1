//! `omega`: command-line front end.
//!
//! Exit status is 0 for true verdicts, 1 for false verdicts (a witness is
//! printed) and 2 for input errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use omega_core::formats::{
    builtin_ref, cellular_from_json, free_cell_to_json, gset_from_json, operad_from_json, operad_to_json,
    tree_from_str,
};
use omega_core::freecat::{face, free_cells, multiply, unit_of_free, wrap_units};
use omega_core::globset::{GlobularSet, HomSearch, Side};
use omega_core::kontraction::build_k;
use omega_core::nerve::{
    boundary_extension_check, category_of_elements, nerve_complex_stats, representable, segal_check, CellularSet,
    LimitCheck, Theta,
};
use omega_core::operad::{builtin, check_operad, is_contractible, Builtin, OperadData, NEST_BOUND};
use omega_core::tree::{boundary_union, enumerate_trees, subtrees, Tree};

#[derive(Parser)]
#[command(name = "omega", version, about = "Finite computations with globular operads and their nerves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tree enumeration.
    Trees {
        #[command(subcommand)]
        action: TreesCmd,
    },
    /// Globular maps between two globular sets or trees.
    Hom {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Print only the number of maps.
        #[arg(long)]
        count_only: bool,
    },
    /// Cells of the free strict ω-category on a graph.
    FreeCells {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        max_tree_cells: usize,
    },
    /// Segal condition of a cellular set, at one tree or at all of them.
    Segal {
        #[arg(long)]
        cellular: PathBuf,
        #[arg(long)]
        tree: Option<String>,
    },
    /// Boundary of a tree, or the boundary extension condition of a cellular set.
    Boundary {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        cellular: Option<PathBuf>,
    },
    /// Lifting property of an operad against the sphere inclusions.
    Contractible {
        /// `initial`, `terminal`, `initial:D:B`, `terminal:D:B` or an operad-json file.
        #[arg(long)]
        operad: String,
        #[arg(long)]
        max_dim: usize,
        /// Arity-tree bound for builtin operads.
        #[arg(long, default_value_t = 7)]
        tree_bound: usize,
    },
    /// Build the bounded initial operad with contraction.
    BuildK {
        #[arg(long)]
        max_dim: usize,
        #[arg(long)]
        max_tree_cells: usize,
        #[arg(long)]
        max_term_size: usize,
        /// Where to write operad-json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Category of elements of a cellular set and its nerve.
    #[command(group(ArgGroup::new("input").required(true).args(["cellular", "representable"])))]
    Elements {
        #[arg(long)]
        cellular: Option<PathBuf>,
        /// Tree `t`: use the representable presheaf at `t`.
        #[arg(long)]
        representable: Option<String>,
        #[arg(long, default_value = "initial")]
        operad: String,
        /// Largest trees in the representable; defaults to the size of `t`.
        #[arg(long)]
        max_cells: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_simplex_dim: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Validation of files, and sampled law checks.
    #[command(group(ArgGroup::new("what").required(true).args(["gset", "operad", "laws"])))]
    Check {
        #[arg(long)]
        gset: Option<PathBuf>,
        #[arg(long)]
        operad: Option<String>,
        #[arg(long)]
        laws: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum TreesCmd {
    Enumerate {
        #[arg(long)]
        max_cells: usize,
    },
}

struct Report {
    text: String,
    verdict: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// An inline ptree-json string, or a file holding ptree-json or gset-json.
fn load_tree(arg: &str) -> Result<Tree> {
    if arg.trim_start().starts_with('[') {
        return Ok(tree_from_str(arg)?);
    }
    tree_from_str(&read(Path::new(arg))?).with_context(|| format!("in {arg}"))
}

fn load_gset(arg: &str) -> Result<GlobularSet> {
    if arg.trim_start().starts_with('[') {
        return Ok(load_tree(arg)?.gset().clone());
    }
    let s = read(Path::new(arg))?;
    if s.trim_start().starts_with('[') {
        return Ok(tree_from_str(&s)?.gset().clone());
    }
    gset_from_json(&s).with_context(|| format!("in {arg}"))
}

fn load_operad(arg: &str, dim: usize, bound: usize, base: &Path) -> Result<OperadData> {
    match arg {
        "initial" => return Ok(builtin(Builtin::Initial, dim, bound)?),
        "terminal" => return Ok(builtin(Builtin::Terminal, dim, bound)?),
        _ => {}
    }
    if let Some(o) = builtin_ref(arg) {
        return Ok(o?);
    }
    let path = base.join(arg);
    operad_from_json(&read(&path)?).with_context(|| format!("in {}", path.display()))
}

fn load_cellular(path: &Path) -> Result<CellularSet> {
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let s = read(path)?;
    let x = cellular_from_json(&s, |r| {
        load_operad(r, 0, 0, &base)
            .map(Arc::new)
            .map_err(|e| omega_core::Error::Format(format!("{e:#}")))
    })
    .with_context(|| format!("in {}", path.display()))?;
    Ok(x)
}

fn limit_line(kind: &str, c: &LimitCheck, out: &mut String) -> Result<bool> {
    match c.verdict() {
        None => bail!("tree {} lies outside the cellular set", c.tree),
        Some(true) => {
            writeln!(out, "{kind} {}: holds ({} elements, {} compatible families)", c.tree, c.elements, c.families)?;
            Ok(true)
        }
        Some(false) => {
            let w = c.witness.as_ref().expect("false verdicts carry a witness");
            writeln!(out, "{kind} {}: fails ({} elements, {} compatible families)", c.tree, c.elements, c.families)?;
            writeln!(out, "  witness: {w}")?;
            Ok(false)
        }
    }
}

fn run(cmd: Cmd) -> Result<Report> {
    let mut out = String::new();
    let verdict = match cmd {
        Cmd::Trees {
            action: TreesCmd::Enumerate { max_cells },
        } => {
            let trees = enumerate_trees(max_cells);
            for t in &trees {
                writeln!(out, "{t}  cells={} height={}", t.cell_count(), t.height())?;
            }
            writeln!(out, "trees: {}", trees.len())?;
            true
        }
        Cmd::Hom { from, to, count_only } => {
            let x = load_gset(&from)?;
            let y = load_gset(&to)?;
            if count_only {
                writeln!(out, "homs: {}", HomSearch::new(&x, &y).count())?;
            } else {
                let maps = HomSearch::new(&x, &y).collect();
                for m in &maps {
                    let parts: Vec<String> = m
                        .iter()
                        .enumerate()
                        .map(|(c, &d)| format!("{}->{}", x.id(c), y.id(d)))
                        .collect();
                    writeln!(out, "{}", parts.join(" "))?;
                }
                writeln!(out, "homs: {}", maps.len())?;
            }
            true
        }
        Cmd::FreeCells {
            graph,
            dim,
            max_tree_cells,
        } => {
            let x = load_gset(&graph)?;
            let fc = free_cells(&x, dim, max_tree_cells);
            for c in &fc.cells {
                writeln!(out, "{}", serde_json::to_string(&free_cell_to_json(c, &x))?)?;
            }
            writeln!(out, "free cells: {}", fc.cells.len())?;
            writeln!(out, "truncated: {}", fc.truncated)?;
            true
        }
        Cmd::Segal { cellular, tree } => {
            let x = load_cellular(&cellular)?;
            let trees = match tree {
                Some(t) => vec![load_tree(&t)?],
                None => x.trees.clone(),
            };
            let mut all = true;
            for t in &trees {
                all &= limit_line("segal", &segal_check(&x, t)?, &mut out)?;
            }
            all
        }
        Cmd::Boundary { tree, cellular } => {
            let t = load_tree(&tree)?;
            match cellular {
                Some(path) => {
                    let x = load_cellular(&path)?;
                    limit_line("boundary extension", &boundary_extension_check(&x, &t)?, &mut out)?
                }
                None => {
                    let (_, mask_cells) = boundary_union(&t);
                    let whole = mask_cells.len() == t.cell_count();
                    writeln!(out, "tree {t}: linear={} proper subtrees={}", t.is_linear(), subtrees(&t, true).len())?;
                    if whole {
                        writeln!(out, "boundary: whole tree")?;
                    } else {
                        let g = t.gset();
                        let missing: Vec<&str> = (0..g.len())
                            .filter(|c| !mask_cells.contains(c))
                            .map(|c| g.id(c))
                            .collect();
                        writeln!(out, "boundary: proper, missing cells {}", missing.join(","))?;
                    }
                    whole
                }
            }
        }
        Cmd::Contractible {
            operad,
            max_dim,
            tree_bound,
        } => {
            let o = load_operad(&operad, max_dim, tree_bound, Path::new("."))?;
            let c = is_contractible(&o, max_dim)?;
            for d in &c.dims {
                writeln!(
                    out,
                    "dim {}: {} squares, {} unfilled{}",
                    d.dim,
                    d.squares,
                    d.witnesses.len(),
                    if d.exact { "" } else { " (within bounds)" }
                )?;
            }
            match c.first_failure() {
                None => writeln!(out, "contractible through dimension {max_dim}")?,
                Some(d) => {
                    writeln!(out, "not contractible in dimension {}", d.dim)?;
                    for w in d.witnesses.iter().take(20) {
                        writeln!(out, "  witness: {}", w.display(o.total()))?;
                    }
                    if d.witnesses.len() > 20 {
                        writeln!(out, "  ... {} more", d.witnesses.len() - 20)?;
                    }
                }
            }
            c.holds()
        }
        Cmd::BuildK {
            max_dim,
            max_tree_cells,
            max_term_size,
            out: path,
        } => {
            let k = build_k(max_dim, max_tree_cells, max_term_size)?;
            writeln!(out, "operations: {}", k.terms.len())?;
            for e in &k.inventory {
                writeln!(
                    out,
                    "dim {} over {}: units={} generators={} composites={}",
                    e.dim, e.tree, e.units, e.generators, e.composites
                )?;
                for enc in &e.encodings {
                    writeln!(out, "  {enc}")?;
                }
            }
            for f in &k.frontier {
                writeln!(out, "frontier: dim {} outer {} ({}): {} skipped", f.dim, f.outer, f.reason, f.count)?;
            }
            let c = is_contractible(&k.operad, max_dim)?;
            writeln!(out, "contractible within bounds: {}", c.holds())?;
            if let Some(p) = path {
                std::fs::write(&p, operad_to_json(&k.operad)).with_context(|| format!("cannot write {}", p.display()))?;
                writeln!(out, "wrote {}", p.display())?;
            }
            c.holds()
        }
        Cmd::Elements {
            cellular,
            representable: rep,
            operad,
            max_cells,
            max_simplex_dim,
            dot,
        } => {
            let x = match (cellular, rep) {
                (Some(p), _) => load_cellular(&p)?,
                (None, Some(t)) => {
                    let t = load_tree(&t)?;
                    let m = max_cells.unwrap_or(t.cell_count());
                    let o = load_operad(&operad, t.height(), m.max(2 * t.height() + 1), Path::new("."))?;
                    representable(Arc::new(o), &t, m)?
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let theta = Theta::new(x.operad.clone(), &x.trees)?;
            let el = category_of_elements(&x, &theta)?;
            let cat = &el.category;
            let violations = cat.check_axioms();
            let st = nerve_complex_stats(cat, max_simplex_dim);
            writeln!(out, "objects: {}", cat.objects.len())?;
            writeln!(out, "morphisms: {}", cat.morphisms.len())?;
            writeln!(out, "category axioms: {}", if violations.is_empty() { "hold" } else { "fail" })?;
            for v in violations.iter().take(20) {
                writeln!(out, "  witness: {v}")?;
            }
            let counts: Vec<String> = st.simplex_counts.iter().map(u128::to_string).collect();
            writeln!(out, "simplices: {}", counts.join(" "))?;
            writeln!(out, "euler characteristic: {}{}", st.euler, if st.exact { "" } else { " (partial)" })?;
            match st.terminal {
                Some(t) => writeln!(out, "terminal object: {}", cat.objects[t])?,
                None => writeln!(out, "terminal object: none")?,
            }
            if let Some(p) = dot {
                std::fs::write(&p, cat.to_dot()).with_context(|| format!("cannot write {}", p.display()))?;
                writeln!(out, "wrote {}", p.display())?;
            }
            violations.is_empty()
        }
        Cmd::Check {
            gset,
            operad,
            laws,
            seed,
            samples,
        } => {
            if let Some(p) = gset {
                let g = gset_from_json(&read(&p)?).with_context(|| format!("in {}", p.display()))?;
                let r = g.validate();
                writeln!(out, "cells: {}", g.len())?;
                for v in &r.violations {
                    writeln!(out, "  witness: {v}")?;
                }
                writeln!(out, "globular: {}", r.is_ok())?;
                r.is_ok()
            } else if let Some(o) = operad {
                let o = load_operad(&o, 2, 7, Path::new("."))?;
                let r = check_operad(&o, NEST_BOUND);
                writeln!(
                    out,
                    "products: {} undefined: {} associativity triples: {}",
                    r.products, r.undefined, r.triples
                )?;
                for v in r.violations.iter().take(20) {
                    writeln!(out, "  witness: {v}")?;
                }
                writeln!(out, "operad laws: {}", if r.is_ok() { "hold" } else { "fail" })?;
                r.is_ok()
            } else {
                debug_assert!(laws);
                sample_laws(seed, samples, &mut out)?
            }
        }
    };
    Ok(Report { text: out, verdict })
}

/// Unit laws of the free-category monad and globularity of faces on random
/// cells of small graphs.
fn sample_laws(seed: u64, samples: usize, out: &mut String) -> Result<bool> {
    let graphs = [
        GlobularSet::globe(2),
        GlobularSet::path(2),
        Tree::star(2).gset().clone(),
        GlobularSet::terminal(2),
    ];
    let pools: Vec<Vec<_>> = graphs
        .iter()
        .map(|g| (0..=2).flat_map(|n| free_cells(g, n, 7).cells).collect())
        .collect();
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut units, mut glob) = (0usize, 0usize);
    let mut failures = Vec::new();
    for _ in 0..samples {
        let gi = rng.gen_range(0..graphs.len());
        let pool = &pools[gi];
        let c = &pool[rng.gen_range(0..pool.len())];
        let g = &graphs[gi];
        let l = multiply(&unit_of_free(c), None)?;
        let r = multiply(&wrap_units(g, c), None)?;
        units += 1;
        if l != *c || r != *c {
            failures.push(format!("unit law at {}", c.display(g)));
        }
        if c.dim >= 2 {
            glob += 1;
            let ss = face(&face(c, Side::Source)?, Side::Source)?;
            let ts = face(&face(c, Side::Target)?, Side::Source)?;
            let st = face(&face(c, Side::Source)?, Side::Target)?;
            let tt = face(&face(c, Side::Target)?, Side::Target)?;
            if ss != ts || st != tt {
                failures.push(format!("globularity at {}", c.display(g)));
            }
        }
    }
    writeln!(out, "seed {seed}: {units} unit-law samples, {glob} globularity samples")?;
    for f in failures.iter().take(20) {
        writeln!(out, "  witness: {f}")?;
    }
    writeln!(out, "laws: {}", if failures.is_empty() { "hold" } else { "fail" })?;
    Ok(failures.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("OMEGA_MAX_WORKERS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: OMEGA_MAX_WORKERS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli.cmd) {
        Ok(r) => {
            print!("{}", r.text);
            ExitCode::from(if r.verdict { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
