//! Independent oracles for the integration tests. Nothing here uses the
//! library's tree, truncation or colimit code: trees are rebuilt from planar
//! nesting and gluing is done with a local union-find.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use omega_core::freecat::{
    compose_along, face, face_to, free_cells, multiply, unit, unit_of_free, wrap_units, FreeCell, FreeGraph, NestedCell,
};
use omega_core::globset::{CellIx, CellRecord, GlobularSet, HomSearch, Side};
use omega_core::tree::{enumerate_trees, PlanarTree};

/// `(dim, src, tgt)` per cell.
pub type Shape = Vec<(usize, Option<usize>, Option<usize>)>;

pub fn shape_of(g: &GlobularSet) -> Shape {
    (0..g.len()).map(|c| (g.dim(c), g.src(c), g.tgt(c))).collect()
}

pub fn to_gset(s: &Shape) -> GlobularSet {
    let records: Vec<CellRecord> = s
        .iter()
        .enumerate()
        .map(|(i, &(dim, src, tgt))| CellRecord {
            id: format!("c{i}"),
            dim,
            src: src.map(|x| format!("c{x}")),
            tgt: tgt.map(|x| format!("c{x}")),
        })
        .collect();
    GlobularSet::from_records(&records).unwrap()
}

/// Non-empty, and the preorder generated by `s(x) ≤ x ≤ t(x)` is a total order.
pub fn is_tree_oracle(s: &Shape) -> bool {
    let n = s.len();
    if n == 0 {
        return false;
    }
    let mut le = vec![vec![false; n]; n];
    for (i, &(_, src, tgt)) in s.iter().enumerate() {
        le[i][i] = true;
        if let (Some(a), Some(b)) = (src, tgt) {
            le[a][i] = true;
            le[i][b] = true;
        }
    }
    for k in 0..n {
        let through = le[k].clone();
        for row in le.iter_mut() {
            if row[k] {
                for (j, &b) in through.iter().enumerate() {
                    row[j] |= b;
                }
            }
        }
    }
    (0..n).all(|i| (0..n).all(|j| i == j || (le[i][j] != le[j][i])))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical(s: &Shape, perms: &[Vec<usize>]) -> Shape {
    let mut best: Option<Shape> = None;
    for p in perms {
        if (0..s.len()).any(|i| s[p[i]].0 != s[i].0) {
            continue;
        }
        let mut t = vec![(0, None, None); s.len()];
        for (i, &(d, a, b)) in s.iter().enumerate() {
            t[p[i]] = (d, a.map(|x| p[x]), b.map(|x| p[x]));
        }
        if best.as_ref().is_none_or(|b| t < *b) {
            best = Some(t);
        }
    }
    best.unwrap()
}

/// Every globular set with exactly `n` cells of dimension at most `max_dim`,
/// one per isomorphism class, cells sorted by dimension.
pub fn gsets_with_cells(n: usize, max_dim: usize) -> Vec<Shape> {
    fn go(n: usize, max_dim: usize, cur: &mut Shape, out: &mut Vec<Shape>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().map_or(0, |c| c.0);
        for d in lo..=max_dim {
            if d == 0 {
                cur.push((0, None, None));
                go(n, max_dim, cur, out);
                cur.pop();
                continue;
            }
            let below: Vec<usize> = (0..cur.len()).filter(|&i| cur[i].0 == d - 1).collect();
            for &a in &below {
                for &b in &below {
                    if d >= 2 && (cur[a].1 != cur[b].1 || cur[a].2 != cur[b].2) {
                        continue;
                    }
                    cur.push((d, Some(a), Some(b)));
                    go(n, max_dim, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut raw = Vec::new();
    go(n, max_dim, &mut Vec::new(), &mut raw);
    let perms = permutations(n);
    let mut seen: BTreeMap<Shape, ()> = BTreeMap::new();
    for s in raw {
        seen.insert(canonical(&s, &perms), ());
    }
    seen.into_keys().collect()
}

/// Cells of a planar tree in Euler order, with their node paths and gaps.
pub struct PlanarCells {
    pub shape: Shape,
    /// `(path to node, gap)`.
    pub addr: Vec<(Vec<usize>, usize)>,
    pub children: HashMap<Vec<usize>, usize>,
}

pub fn planar_cells(p: &PlanarTree) -> PlanarCells {
    fn visit(p: &PlanarTree, path: &mut Vec<usize>, addr: &mut Vec<(Vec<usize>, usize)>, kids: &mut HashMap<Vec<usize>, usize>) {
        kids.insert(path.clone(), p.0.len());
        addr.push((path.clone(), 0));
        for (i, c) in p.0.iter().enumerate() {
            path.push(i);
            visit(c, path, addr, kids);
            path.pop();
            addr.push((path.clone(), i + 1));
        }
    }
    let mut addr = Vec::new();
    let mut children = HashMap::new();
    visit(p, &mut Vec::new(), &mut addr, &mut children);
    let pos: HashMap<(Vec<usize>, usize), usize> = addr.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let shape = addr
        .iter()
        .map(|(path, _)| {
            let d = path.len();
            if d == 0 {
                return (0, None, None);
            }
            let parent = path[..d - 1].to_vec();
            let i = path[d - 1];
            (d, Some(pos[&(parent.clone(), i)]), Some(pos[&(parent, i + 1)]))
        })
        .collect();
    PlanarCells { shape, addr, children }
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let next = p[y];
        p[y] = r;
        y = next;
    }
    r
}

/// Multiplication by gluing: the inner tree on a face of an outer cell is
/// identified with the matching face of the inner tree on that cell.
/// Returns the glued globular set and its labels, or `None` if labels clash.
pub fn oracle_multiply(n: &NestedCell) -> Option<(Shape, Vec<CellIx>)> {
    let outer = planar_cells(n.shape.planar());
    let inners: Vec<PlanarCells> = n.inner.iter().map(|fc| planar_cells(fc.shape.planar())).collect();
    let mut offset = Vec::new();
    let mut total = 0;
    for pc in &inners {
        offset.push(total);
        total += pc.shape.len();
    }
    let mut parent: Vec<usize> = (0..total).collect();
    for (c, &(d, src, tgt)) in outer.shape.iter().enumerate() {
        let (Some(s), Some(t)) = (src, tgt) else { continue };
        let big = &inners[c];
        let pos: HashMap<&(Vec<usize>, usize), usize> = big.addr.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let height = big.addr.iter().map(|a| a.0.len()).max().unwrap_or(0);
        for (face, target_side) in [(s, false), (t, true)] {
            let small = &inners[face];
            for (i, (path, gap)) in small.addr.iter().enumerate() {
                let j = if height < d || path.len() < d - 1 {
                    pos[&(path.clone(), *gap)]
                } else {
                    let g = if target_side { big.children[path] } else { 0 };
                    pos[&(path.clone(), g)]
                };
                let a = find(&mut parent, offset[face] + i);
                let b = find(&mut parent, offset[c] + j);
                parent[a] = b;
            }
        }
    }
    let mut class: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rep = Vec::new();
    for x in 0..total {
        let r = find(&mut parent, x);
        if let std::collections::btree_map::Entry::Vacant(e) = class.entry(r) {
            e.insert(rep.len());
            rep.push(x);
        }
    }
    let locate = |x: usize| {
        let c = offset.iter().rposition(|&o| o <= x).unwrap();
        (c, x - offset[c])
    };
    let mut labels = vec![usize::MAX; rep.len()];
    for x in 0..total {
        let (c, i) = locate(x);
        let k = class[&find(&mut parent, x)];
        let l = n.inner[c].label[i];
        if labels[k] != usize::MAX && labels[k] != l {
            return None;
        }
        labels[k] = l;
    }
    let shape = rep
        .iter()
        .map(|&x| {
            let (c, i) = locate(x);
            let (d, s, t) = inners[c].shape[i];
            let f = |y: Option<usize>, parent: &mut [usize]| y.map(|y| class[&find(parent, offset[c] + y)]);
            (d, f(s, &mut parent), f(t, &mut parent))
        })
        .collect();
    Some((shape, labels))
}

/// Number of edge paths (including empty ones) in a 1-dimensional graph.
pub fn path_count(g: &GlobularSet) -> usize {
    let edges: Vec<(usize, usize)> = g
        .cells_of_dim(1)
        .map(|e| (g.src(e).unwrap(), g.tgt(e).unwrap()))
        .collect();
    // paths of each length ending at each vertex; the graphs used are acyclic
    let mut ending: Vec<usize> = vec![1; g.len()];
    let mut count = g.count_of_dim(0);
    for _ in 0..edges.len() {
        let mut next = vec![0; g.len()];
        for &(a, b) in &edges {
            next[b] += ending[a];
        }
        count += next.iter().sum::<usize>();
        ending = next;
    }
    count
}

/// Normal-form 1-dimensional terms of the initial operad with contraction:
/// `u1`, generators `κ_k` over `star(k)`, and `κ_k` applied to terms on its
/// `k` edges (not all `u1`). Returns counts keyed by arity, for arity trees
/// of at most `max_tree_cells` cells and term size at most `max_size`.
pub fn k_dim1_census(max_tree_cells: usize, max_size: usize) -> BTreeMap<usize, usize> {
    // term = (size, arity, is_unit)
    let kmax = (max_tree_cells - 1) / 2;
    let mut by_size: Vec<Vec<(usize, bool)>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1].push((1, true));
    }
    if max_size >= 3 {
        for k in 0..=kmax {
            by_size[3].push((k, false));
        }
    }
    for s in 4..=max_size {
        for k in 1..=kmax {
            let rest = s as isize - 1 - 3 - (k as isize + 1);
            if rest < k as isize {
                continue;
            }
            // sequences of k terms with sizes summing to rest
            let mut found = Vec::new();
            fn seqs(k: usize, rest: usize, by: &[Vec<(usize, bool)>], acc: (usize, bool), out: &mut Vec<(usize, bool)>) {
                if k == 0 {
                    if rest == 0 {
                        out.push(acc);
                    }
                    return;
                }
                for sz in 1..=rest {
                    if sz >= by.len() {
                        break;
                    }
                    for &(a, u) in &by[sz] {
                        seqs(k - 1, rest - sz, by, (acc.0 + a, acc.1 && u), out);
                    }
                }
            }
            seqs(k, rest as usize, &by_size, (0, true), &mut found);
            for (arity, all_units) in found {
                if !all_units && 2 * arity < max_tree_cells {
                    by_size[s].push((arity, false));
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for terms in &by_size {
        for &(a, _) in terms {
            *out.entry(a).or_insert(0) += 1;
        }
    }
    out
}

/// Small globular sets used as generators for the free-category laws.
pub fn test_graphs() -> Vec<(&'static str, GlobularSet)> {
    let mut parallel = GlobularSet::new();
    let a = parallel.add("a", 0, None, None).unwrap();
    let b = parallel.add("b", 0, None, None).unwrap();
    parallel.add("f", 1, Some(a), Some(b)).unwrap();
    parallel.add("g", 1, Some(a), Some(b)).unwrap();
    vec![
        ("point", GlobularSet::globe(0)),
        ("globe1", GlobularSet::globe(1)),
        ("globe2", GlobularSet::globe(2)),
        ("path2", GlobularSet::path(2)),
        ("loop", GlobularSet::terminal(1)),
        ("terminal2", GlobularSet::terminal(2)),
        ("parallel", parallel),
        ("star2", omega_core::tree::Tree::star(2).gset().clone()),
    ]
}

/// Cells of `ω(ω(X))` with outer trees of at most `outer` cells whose
/// labels are free cells with trees of at most `inner` cells.
pub fn nested_cells(x: &GlobularSet, outer: usize, inner: usize, max_dim: usize) -> Vec<NestedCell> {
    let y = FreeGraph::build(x, max_dim, inner);
    let mut out = Vec::new();
    for n in 0..=max_dim {
        for s in enumerate_trees(outer).into_iter().filter(|s| s.height() <= n) {
            for a in HomSearch::new(s.gset(), &y.gset).collect() {
                out.push(NestedCell {
                    shape: s.clone(),
                    dim: n,
                    inner: a.iter().map(|&c| y.cells[c].clone()).collect(),
                });
            }
        }
    }
    out
}

fn all_free_cells(x: &GlobularSet, max_dim: usize, bound: usize) -> Vec<FreeCell> {
    (0..=max_dim).flat_map(|n| free_cells(x, n, bound).cells).collect()
}

/// Both unit laws of the monad and unit naturality for faces.
pub fn check_unit_laws(x: &GlobularSet, max_dim: usize, bound: usize) -> Result<usize, String> {
    let mut checked = 0;
    for c in all_free_cells(x, max_dim, bound) {
        let shown = c.display(x);
        let left = multiply(&wrap_units(x, &c), None).map_err(|e| format!("{shown}: {e}"))?;
        let right = multiply(&unit_of_free(&c), None).map_err(|e| format!("{shown}: {e}"))?;
        if left != c || right != c {
            return Err(format!("unit law fails at {shown}"));
        }
        checked += 1;
    }
    for a in 0..x.len() {
        if let (Some(s), Some(t)) = (x.src(a), x.tgt(a)) {
            let u = unit(x, a);
            if face(&u, Side::Source).unwrap() != unit(x, s) || face(&u, Side::Target).unwrap() != unit(x, t) {
                return Err(format!("faces of the unit at {} are not units", x.id(a)));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// `ss = st` and `ts = tt` on every free cell of dimension at least 2.
pub fn check_face_globularity(x: &GlobularSet, max_dim: usize, bound: usize) -> Result<usize, String> {
    let mut checked = 0;
    for c in all_free_cells(x, max_dim, bound).into_iter().filter(|c| c.dim >= 2) {
        let s = face(&c, Side::Source).unwrap();
        let t = face(&c, Side::Target).unwrap();
        for side in [Side::Source, Side::Target] {
            if face(&s, side).unwrap() != face(&t, side).unwrap() {
                return Err(format!("{side} faces of {} disagree", c.display(x)));
            }
        }
        if s.check_label(x).is_err() || t.check_label(x).is_err() {
            return Err(format!("a face of {} is not a free cell", c.display(x)));
        }
        checked += 1;
    }
    Ok(checked)
}

/// `μ ∘ μω = μ ∘ ωμ` on cells of `ω(ω(ω(X)))` built from the given bounds.
pub fn check_associativity(x: &GlobularSet, max_dim: usize, outer: usize, mid: usize, inner: usize) -> Result<usize, String> {
    let y = FreeGraph::build(x, max_dim, inner);
    let flatten = |fc: &FreeCell| NestedCell {
        shape: fc.shape.clone(),
        dim: fc.dim,
        inner: fc.label.iter().map(|&l| y.cells[l].clone()).collect(),
    };
    let mut checked = 0;
    for t in nested_cells(&y.gset, outer, mid, max_dim) {
        let first = multiply(&t, None).map_err(|e| e.to_string())?;
        let left = multiply(&flatten(&first), None).map_err(|e| e.to_string())?;
        let inner_done = NestedCell {
            shape: t.shape.clone(),
            dim: t.dim,
            inner: t
                .inner
                .iter()
                .map(|fc| multiply(&flatten(fc), None))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?,
        };
        let right = multiply(&inner_done, None).map_err(|e| e.to_string())?;
        if left != right {
            return Err(format!("associativity fails: {} vs {}", left.display(x), right.display(x)));
        }
        checked += 1;
    }
    Ok(checked)
}

/// `(a ∘₁ b) ∘₀ (c ∘₁ d) = (a ∘₀ c) ∘₁ (b ∘₀ d)` for all composable
/// 2-dimensional free cells with trees of at most `bound` cells.
pub fn check_interchange(x: &GlobularSet, bound: usize) -> Result<usize, String> {
    let cells = free_cells(x, 2, bound).cells;
    let f = |c: &FreeCell, side, k| face_to(c, side, k).unwrap();
    let mut by_src1: HashMap<FreeCell, Vec<usize>> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        by_src1.entry(f(c, Side::Source, 1)).or_default().push(i);
    }
    // vertical pairs keyed by their source 0-face
    let mut vertical: Vec<(usize, usize, FreeCell)> = Vec::new();
    for (a, c) in cells.iter().enumerate() {
        for &b in by_src1.get(&f(c, Side::Target, 1)).into_iter().flatten() {
            let ab = compose_along(c, &cells[b], 1, None).map_err(|e| e.to_string())?;
            vertical.push((a, b, ab));
        }
    }
    let mut by_src0: HashMap<FreeCell, Vec<usize>> = HashMap::new();
    for (i, (a, _, _)) in vertical.iter().enumerate() {
        by_src0.entry(f(&cells[*a], Side::Source, 0)).or_default().push(i);
    }
    let mut checked = 0;
    for (a, b, ab) in &vertical {
        for &j in by_src0.get(&f(&cells[*a], Side::Target, 0)).into_iter().flatten() {
            let (c, d, cd) = &vertical[j];
            let left = compose_along(ab, cd, 0, None).map_err(|e| e.to_string())?;
            let ac = compose_along(&cells[*a], &cells[*c], 0, None).map_err(|e| e.to_string())?;
            let bd = compose_along(&cells[*b], &cells[*d], 0, None).map_err(|e| e.to_string())?;
            let right = compose_along(&ac, &bd, 1, None).map_err(|e| e.to_string())?;
            if left != right {
                return Err(format!(
                    "interchange fails for {}, {}, {}, {}",
                    cells[*a].display(x),
                    cells[*b].display(x),
                    cells[*c].display(x),
                    cells[*d].display(x)
                ));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// The naturality square of `μ` at `f: X → Y` is a pullback of sets:
/// every pair `(a ∈ ω(X), b ∈ ω(ω(Y)))` with `ω(f)(a) = μ(b)` has exactly
/// one preimage in `ω(ω(X))`. Cells of `ω(ω(Y))` range over the bounds.
pub fn check_cartesian(
    x: &GlobularSet,
    y: &GlobularSet,
    f: &[CellIx],
    max_dim: usize,
    outer: usize,
    inner: usize,
) -> Result<usize, String> {
    let push = |n: &NestedCell| NestedCell {
        shape: n.shape.clone(),
        dim: n.dim,
        inner: n.inner.iter().map(|c| c.relabel(f)).collect(),
    };
    let mut preimages: HashMap<(FreeCell, NestedCell), usize> = HashMap::new();
    for c in nested_cells(x, outer, inner, max_dim) {
        let a = multiply(&c, None).map_err(|e| e.to_string())?;
        let b = push(&c);
        let mu_b = multiply(&b, None).map_err(|e| e.to_string())?;
        if a.relabel(f) != mu_b {
            return Err("the square does not commute".into());
        }
        *preimages.entry((a, b)).or_insert(0) += 1;
    }
    let mut checked = 0;
    for b in nested_cells(y, outer, inner, max_dim) {
        let m = multiply(&b, None).map_err(|e| e.to_string())?;
        for label in HomSearch::new(m.shape.gset(), x).collect() {
            if label.iter().map(|&l| f[l]).collect::<Vec<_>>() != m.label {
                continue;
            }
            let a = FreeCell::new(m.shape.clone(), label, m.dim).unwrap();
            let n = preimages.get(&(a.clone(), b.clone())).copied().unwrap_or(0);
            if n != 1 {
                return Err(format!("{n} preimages over {}", a.display(x)));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
