//! Input files for the command-line tests, written through the library.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use omega_core::formats::{cellular_to_json, gset_to_json};
use omega_core::globset::GlobularSet;
use omega_core::nerve::{nerve_of_algebra, representable, Theta};
use omega_core::operad::{builtin, Algebra, Builtin};
use omega_core::tree::Tree;

pub const BIN: &str = env!("CARGO_BIN_EXE_omega");

/// Writes `path2.json`, `good.json` (nerve of a free algebra) and `bad.json`
/// (a representable with one duplicated element) into `dir`.
pub fn write_fixtures(dir: &Path) {
    std::fs::write(dir.join("path2.json"), gset_to_json(&GlobularSet::path(2))).unwrap();
    std::fs::write(dir.join("globe2.json"), gset_to_json(&GlobularSet::globe(2))).unwrap();

    let t = Arc::new(builtin(Builtin::Terminal, 2, 5).unwrap());
    let free = Arc::new(Algebra::free(t.clone(), &Tree::star(2)).unwrap());
    let n = nerve_of_algebra(free, 5).unwrap();
    let theta = Theta::new(t, &n.trees).unwrap();
    std::fs::write(dir.join("good.json"), cellular_to_json(&n, &theta, "terminal:2:5").unwrap()).unwrap();

    let i = Arc::new(builtin(Builtin::Initial, 2, 5).unwrap());
    let r = representable(i.clone(), &Tree::star(2), 5).unwrap();
    let theta = Theta::new(i, &r.trees).unwrap();
    let bad = r.with_duplicate(&theta, &Tree::star(2), 0, "extra").unwrap();
    std::fs::write(dir.join("bad.json"), cellular_to_json(&bad, &theta, "initial:2:5").unwrap()).unwrap();
}

/// One invocation per command, with paths relative to the fixture directory.
pub fn commands() -> Vec<Vec<&'static str>> {
    vec![
        vec!["trees", "enumerate", "--max-cells", "7"],
        vec!["hom", "--from", "[[]]", "--to", "[[],[]]"],
        vec!["hom", "--from", "globe2.json", "--to", "[[[]],[]]", "--count-only"],
        vec!["free-cells", "--graph", "path2.json", "--dim", "1", "--max-tree-cells", "5"],
        vec!["segal", "--cellular", "good.json"],
        vec!["segal", "--cellular", "bad.json", "--tree", "[[],[]]"],
        vec!["boundary", "--tree", "[[[]],[]]"],
        vec!["boundary", "--tree", "[[],[]]", "--cellular", "good.json"],
        vec!["contractible", "--operad", "terminal", "--max-dim", "2", "--tree-bound", "5"],
        vec!["contractible", "--operad", "initial", "--max-dim", "2", "--tree-bound", "5"],
        vec!["build-k", "--max-dim", "2", "--max-tree-cells", "7", "--max-term-size", "5", "--out", "k.json"],
        vec!["contractible", "--operad", "k.json", "--max-dim", "2"],
        vec!["elements", "--representable", "[[],[]]", "--dot", "el.dot"],
        vec!["elements", "--cellular", "bad.json", "--max-simplex-dim", "3"],
        vec!["check", "--gset", "path2.json"],
        vec!["check", "--operad", "initial:2:5"],
        vec!["check", "--laws", "--seed", "7", "--samples", "50"],
    ]
}

pub fn run(dir: &Path, args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).current_dir(dir);
    match workers {
        Some(w) => cmd.env("OMEGA_MAX_WORKERS", w),
        None => cmd.env_remove("OMEGA_MAX_WORKERS"),
    };
    cmd.output().expect("the binary runs")
}

pub fn fixture_dir() -> (tempfile::TempDir, PathBuf) {
    let d = tempfile::tempdir().unwrap();
    write_fixtures(d.path());
    let p = d.path().to_path_buf();
    (d, p)
}
