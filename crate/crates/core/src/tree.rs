//! Pasting trees: finite non-empty globular sets whose generated preorder is
//! total, together with their planar level-tree encoding.
//!
//! A [`Tree`] is always held in canonical form. Its cells are the pairs
//! `(node, gap)` of the planar tree, where a node with `m` children has `m + 1`
//! gaps; the cell has the node's depth as dimension and, for a node that is
//! child `i` of its parent, source `(parent, i)` and target `(parent, i + 1)`.
//! Cells are inserted in Euler-tour order, which is exactly the total order
//! `≤` of the tree. Isomorphic trees therefore have identical representations
//! and equality is equality of planar shapes.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::globset::{
    self, check_assignment, colimit, hom_assignments, preorder_closure, Cell, CellIx, Diagram,
    GlobularMap, GlobularSet, HomSearch,
};

/// A finite planar level tree: a node is the sequence of its children.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarTree(pub Vec<PlanarTree>);

impl PlanarTree {
    pub fn point() -> Self {
        PlanarTree(Vec::new())
    }

    pub fn linear(n: usize) -> Self {
        let mut t = Self::point();
        for _ in 0..n {
            t = PlanarTree(vec![t]);
        }
        t
    }

    pub fn star(k: usize) -> Self {
        PlanarTree(vec![Self::point(); k])
    }

    pub fn children(&self) -> &[PlanarTree] {
        &self.0
    }

    pub fn node_count(&self) -> usize {
        1 + self.0.iter().map(PlanarTree::node_count).sum::<usize>()
    }

    /// Number of cells of the corresponding globular set.
    pub fn cell_count(&self) -> usize {
        2 * self.node_count() - 1
    }

    pub fn height(&self) -> usize {
        self.0.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Drops every node deeper than `k`.
    pub fn chop(&self, k: usize) -> PlanarTree {
        if k == 0 {
            return Self::point();
        }
        PlanarTree(self.0.iter().map(|c| c.chop(k - 1)).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.0.iter().map(PlanarTree::to_json).collect())
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Array(items) => Ok(PlanarTree(
                items.iter().map(PlanarTree::from_json).collect::<Result<_>>()?,
            )),
            other => Err(Error::MalformedPlanar(format!(
                "expected a nested array, found `{other}`"
            ))),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::MalformedPlanar(e.to_string()))?;
        Self::from_json(&v)
    }
}

impl fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug)]
struct TreeInner {
    planar: PlanarTree,
    gset: Arc<GlobularSet>,
    /// `(node, gap)` of each cell; nodes are numbered in preorder.
    addr: Vec<(usize, usize)>,
    node_depth: Vec<usize>,
    node_children: Vec<Vec<usize>>,
    /// `(parent, child position)`, `None` for the root.
    node_parent: Vec<Option<(usize, usize)>>,
    cell_at: HashMap<(usize, usize), CellIx>,
}

#[derive(Clone, Debug)]
pub struct Tree(Arc<TreeInner>);

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.planar == other.0.planar
    }
}
impl Eq for Tree {}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.planar.hash(state);
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by cell count, then by planar shape.
impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.cell_count(), &self.0.planar).cmp(&(other.cell_count(), &other.0.planar))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.planar.fmt(f)
    }
}

impl Tree {
    pub fn from_planar(planar: &PlanarTree) -> Tree {
        let mut node_depth = Vec::new();
        let mut node_children = Vec::new();
        let mut node_parent = Vec::new();
        fn number(
            p: &PlanarTree,
            depth: usize,
            parent: Option<(usize, usize)>,
            node_depth: &mut Vec<usize>,
            node_children: &mut Vec<Vec<usize>>,
            node_parent: &mut Vec<Option<(usize, usize)>>,
        ) -> usize {
            let me = node_depth.len();
            node_depth.push(depth);
            node_children.push(Vec::new());
            node_parent.push(parent);
            for (i, c) in p.0.iter().enumerate() {
                let ci = number(c, depth + 1, Some((me, i)), node_depth, node_children, node_parent);
                node_children[me].push(ci);
            }
            me
        }
        number(planar, 0, None, &mut node_depth, &mut node_children, &mut node_parent);

        let mut addr = Vec::new();
        fn tour(x: usize, children: &[Vec<usize>], addr: &mut Vec<(usize, usize)>) {
            addr.push((x, 0));
            for (i, &c) in children[x].iter().enumerate() {
                tour(c, children, addr);
                addr.push((x, i + 1));
            }
        }
        tour(0, &node_children, &mut addr);
        let cell_at: HashMap<(usize, usize), CellIx> =
            addr.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut per_dim: Vec<usize> = Vec::new();
        let cells = addr
            .iter()
            .map(|&(x, _)| {
                let dim = node_depth[x];
                if per_dim.len() <= dim {
                    per_dim.resize(dim + 1, 0);
                }
                let j = per_dim[dim];
                per_dim[dim] += 1;
                let (src, tgt) = match node_parent[x] {
                    None => (None, None),
                    Some((p, i)) => (Some(cell_at[&(p, i)]), Some(cell_at[&(p, i + 1)])),
                };
                Cell {
                    id: format!("{dim}:{j}"),
                    dim,
                    src,
                    tgt,
                }
            })
            .collect();
        Tree(Arc::new(TreeInner {
            planar: planar.clone(),
            gset: Arc::new(GlobularSet::from_cells(cells)),
            addr,
            node_depth,
            node_children,
            node_parent,
            cell_at,
        }))
    }

    /// Recognises a tree and returns it in canonical form with an isomorphism
    /// `g → tree` (as an assignment indexed by the cells of `g`).
    pub fn from_gset(g: &GlobularSet) -> Result<(Tree, Vec<CellIx>)> {
        if g.is_empty() {
            return Err(Error::NotATree("empty".into()));
        }
        if !g.validate().is_ok() {
            return Err(Error::NotATree("not a valid globular set".into()));
        }
        let order = preorder_closure(g)
            .linear_order()
            .ok_or_else(|| Error::NotATree("preorder is not total".into()))?;
        let dims: Vec<usize> = order.iter().map(|&i| g.dim(i)).collect();
        let planar = planar_from_tour(&dims)?;
        let tree = Tree::from_planar(&planar);
        let mut iso = vec![0; g.len()];
        for (k, &i) in order.iter().enumerate() {
            iso[i] = k;
        }
        check_assignment(g, tree.gset(), &iso)
            .map_err(|e| Error::NotATree(format!("tour does not match faces: {e}")))?;
        Ok((tree, iso))
    }

    pub fn point() -> Tree {
        Tree::from_planar(&PlanarTree::point())
    }

    pub fn linear(n: usize) -> Tree {
        Tree::from_planar(&PlanarTree::linear(n))
    }

    pub fn star(k: usize) -> Tree {
        Tree::from_planar(&PlanarTree::star(k))
    }

    pub fn planar(&self) -> &PlanarTree {
        &self.0.planar
    }

    pub fn gset(&self) -> &GlobularSet {
        &self.0.gset
    }

    pub fn gset_arc(&self) -> Arc<GlobularSet> {
        self.0.gset.clone()
    }

    pub fn cell_count(&self) -> usize {
        self.0.addr.len()
    }

    pub fn height(&self) -> usize {
        self.0.node_depth.iter().copied().max().unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.0.node_children.iter().all(|c| c.len() <= 1)
    }

    pub fn classify(&self) -> (usize, bool) {
        (self.height(), self.is_linear())
    }

    pub fn addr(&self, cell: CellIx) -> (usize, usize) {
        self.0.addr[cell]
    }

    pub fn cell_at(&self, node: usize, gap: usize) -> CellIx {
        self.0.cell_at[&(node, gap)]
    }

    pub fn node_count(&self) -> usize {
        self.0.node_depth.len()
    }

    pub fn node_depth(&self, node: usize) -> usize {
        self.0.node_depth[node]
    }

    pub fn node_children(&self, node: usize) -> &[usize] {
        &self.0.node_children[node]
    }

    pub fn node_parent(&self, node: usize) -> Option<(usize, usize)> {
        self.0.node_parent[node]
    }

    /// Maximal cells: one per leaf node, in Euler order.
    pub fn leaf_cells(&self) -> Vec<CellIx> {
        (0..self.cell_count())
            .filter(|&c| {
                let (x, _) = self.0.addr[c];
                self.0.node_children[x].is_empty()
            })
            .collect()
    }

    /// The planar chop at level `k` with its source and target embeddings.
    ///
    /// The source embedding sends each cell to the `≤`-least compatible cell,
    /// the target embedding to the `≤`-greatest.
    pub fn truncate(&self, k: usize) -> Result<Truncation> {
        let height = self.height();
        if k > height {
            return Err(Error::TruncationTooDeep { level: k, height });
        }
        let chopped = Tree::from_planar(&self.0.planar.chop(k));
        // kept nodes in preorder are exactly the preorder of the chop
        let kept: Vec<usize> = (0..self.node_count())
            .filter(|&x| self.0.node_depth[x] <= k)
            .collect();
        let mut src_embed = Vec::with_capacity(chopped.cell_count());
        let mut tgt_embed = Vec::with_capacity(chopped.cell_count());
        for &(sx, g) in &chopped.0.addr {
            let x = kept[sx];
            src_embed.push(self.cell_at(x, g));
            let tg = if self.0.node_depth[x] == k {
                self.0.node_children[x].len()
            } else {
                g
            };
            tgt_embed.push(self.cell_at(x, tg));
        }
        Ok(Truncation {
            tree: chopped,
            src_embed,
            tgt_embed,
        })
    }

    /// Truncation at `k`, or the tree itself when `k ≥ height`.
    pub fn truncate_or_self(&self, k: usize) -> Tree {
        if k >= self.height() {
            self.clone()
        } else {
            self.truncate(k).expect("k below height").tree
        }
    }

    pub fn identity_map(&self) -> GlobularMap {
        GlobularMap::identity(self.gset_arc())
    }
}

fn planar_from_tour(dims: &[usize]) -> Result<PlanarTree> {
    if dims.first() != Some(&0) || dims.last() != Some(&0) {
        return Err(Error::NotATree("tour must start and end in dimension 0".into()));
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut stack = vec![0usize];
    for w in dims.windows(2) {
        let (cur, next) = (w[0], w[1]);
        if next == cur + 1 {
            let id = children.len();
            children.push(Vec::new());
            children[*stack.last().unwrap()].push(id);
            stack.push(id);
        } else if next + 1 == cur {
            stack.pop();
            if stack.is_empty() {
                return Err(Error::NotATree("tour leaves the root".into()));
            }
        } else {
            return Err(Error::NotATree(format!("tour jumps from {cur} to {next}")));
        }
    }
    if stack.len() != 1 {
        return Err(Error::NotATree("unbalanced tour".into()));
    }
    fn build(x: usize, children: &[Vec<usize>]) -> PlanarTree {
        PlanarTree(children[x].iter().map(|&c| build(c, children)).collect())
    }
    Ok(build(0, &children))
}

#[derive(Clone, Debug)]
pub struct Truncation {
    pub tree: Tree,
    pub src_embed: Vec<CellIx>,
    pub tgt_embed: Vec<CellIx>,
}

pub fn is_tree(g: &GlobularSet) -> bool {
    !g.is_empty() && g.validate().is_ok() && preorder_closure(g).is_total()
}

/// Tree → planar encoding.
pub fn convert(t: &Tree) -> PlanarTree {
    t.planar().clone()
}

/// Planar encoding → tree.
pub fn convert_back(p: &PlanarTree) -> Tree {
    Tree::from_planar(p)
}

/// All planar trees with exactly `nodes` nodes, sorted.
pub fn planar_trees_with_nodes(nodes: usize) -> Vec<PlanarTree> {
    fn forests(m: usize, memo: &mut HashMap<usize, Vec<Vec<PlanarTree>>>) -> Vec<Vec<PlanarTree>> {
        if let Some(v) = memo.get(&m) {
            return v.clone();
        }
        let mut out = Vec::new();
        if m == 0 {
            out.push(Vec::new());
        } else {
            for first in 1..=m {
                let heads = trees(first, memo);
                let tails = forests(m - first, memo);
                for h in &heads {
                    for t in &tails {
                        let mut f = Vec::with_capacity(t.len() + 1);
                        f.push(h.clone());
                        f.extend(t.iter().cloned());
                        out.push(f);
                    }
                }
            }
        }
        memo.insert(m, out.clone());
        out
    }
    fn trees(n: usize, memo: &mut HashMap<usize, Vec<Vec<PlanarTree>>>) -> Vec<PlanarTree> {
        if n == 0 {
            return Vec::new();
        }
        forests(n - 1, memo).into_iter().map(PlanarTree).collect()
    }
    let mut v = trees(nodes, &mut HashMap::new());
    v.sort();
    v
}

/// One tree per isomorphism class with at most `max_cells` cells, in canonical order.
pub fn enumerate_trees(max_cells: usize) -> Vec<Tree> {
    let max_nodes = max_cells.div_ceil(2);
    let mut out: Vec<Tree> = (1..=max_nodes)
        .flat_map(planar_trees_with_nodes)
        .filter(|p| p.cell_count() <= max_cells)
        .map(|p| Tree::from_planar(&p))
        .collect();
    out.sort();
    out
}

/// A subtree with its inclusion into the ambient tree.
#[derive(Clone, Debug)]
pub struct Subtree {
    pub tree: Tree,
    pub inclusion: Vec<CellIx>,
    /// Membership mask over the ambient tree's cells.
    pub mask: Vec<bool>,
}

impl Subtree {
    pub fn as_map(&self, ambient: &Tree) -> GlobularMap {
        GlobularMap::new(self.tree.gset_arc(), ambient.gset_arc(), self.inclusion.clone())
    }
}

/// Face-closed subsets of `t` that are trees, ordered by their masks'
/// position in the canonical enumeration.
pub fn subtrees(t: &Tree, proper_only: bool) -> Vec<Subtree> {
    let g = t.gset();
    let order = g.canonical_order();
    let mut out = Vec::new();
    let mut mask = vec![false; g.len()];
    fn go(k: usize, order: &[CellIx], g: &GlobularSet, mask: &mut Vec<bool>, visit: &mut dyn FnMut(&[bool])) {
        if k == order.len() {
            visit(mask);
            return;
        }
        let i = order[k];
        go(k + 1, order, g, mask, visit);
        let faces_in = [g.src(i), g.tgt(i)].into_iter().flatten().all(|f| mask[f]);
        if faces_in {
            mask[i] = true;
            go(k + 1, order, g, mask, visit);
            mask[i] = false;
        }
    }
    go(0, &order, g, &mut mask, &mut |m| {
        if proper_only && m.iter().all(|&b| b) {
            return;
        }
        let (sub, incl) = g.restrict(m).expect("face-closed");
        if let Ok((tree, iso)) = Tree::from_gset(&sub) {
            let mut inclusion = vec![0; tree.cell_count()];
            for (i, &j) in iso.iter().enumerate() {
                inclusion[j] = incl[i];
            }
            out.push(Subtree {
                tree,
                inclusion,
                mask: m.to_vec(),
            });
        }
    });
    out
}

/// Union of all proper subtrees, as a sub-globular set with its inclusion.
pub fn boundary_union(t: &Tree) -> (GlobularSet, Vec<CellIx>) {
    let mut mask = vec![false; t.cell_count()];
    for s in subtrees(t, true) {
        for (m, b) in mask.iter_mut().zip(&s.mask) {
            *m |= *b;
        }
    }
    t.gset().restrict(&mask).expect("union of subtrees is face-closed")
}

/// Whether the images of `family` jointly contain every cell of `t`.
pub fn is_cover(family: &[GlobularMap], t: &Tree) -> bool {
    let mut hit = vec![false; t.cell_count()];
    for f in family {
        for &j in &f.assign {
            hit[j] = true;
        }
    }
    hit.into_iter().all(|b| b)
}

/// Result of gluing all globes mapping into a tree.
#[derive(Clone, Debug)]
pub struct GlobeCover {
    pub is_iso: bool,
    /// The comparison map `colim → t`.
    pub comparison: Vec<CellIx>,
    pub apex: GlobularSet,
}

/// Builds the diagram of all maps `globe(n) → t` with all factorisations
/// among them, takes its colimit and tests the comparison map to `t`.
pub fn globe_cover_check(t: &Tree) -> GlobeCover {
    let tg = t.gset();
    let globes: Vec<Arc<GlobularSet>> = (0..=t.height())
        .map(|n| Arc::new(GlobularSet::globe(n)))
        .collect();
    let mut objects = Vec::new();
    let mut elems: Vec<(usize, Vec<CellIx>)> = Vec::new();
    for (n, gl) in globes.iter().enumerate() {
        for a in hom_assignments(gl, tg) {
            objects.push(gl.clone());
            elems.push((n, a));
        }
    }
    let globe_maps: Vec<Vec<Vec<Vec<CellIx>>>> = globes
        .iter()
        .map(|a| globes.iter().map(|b| hom_assignments(a, b)).collect())
        .collect();
    let mut arrows = Vec::new();
    for (i, (n, a)) in elems.iter().enumerate() {
        for (j, (m, b)) in elems.iter().enumerate() {
            for u in &globe_maps[*n][*m] {
                if u.iter().enumerate().all(|(c, &uc)| b[uc] == a[c]) {
                    arrows.push((i, j, u.clone()));
                }
            }
        }
    }
    let col = colimit(&Diagram { objects, arrows });
    let mut comparison = vec![usize::MAX; col.apex.len()];
    for (o, leg) in col.legs.iter().enumerate() {
        for (c, &k) in leg.iter().enumerate() {
            comparison[k] = elems[o].1[c];
        }
    }
    let is_iso = comparison.iter().all(|&c| c != usize::MAX)
        && col.apex.len() == tg.len()
        && globset::is_injective(&comparison, tg.len())
        && check_assignment(&col.apex, tg, &comparison).is_ok();
    GlobeCover {
        is_iso,
        comparison,
        apex: col.apex,
    }
}

/// All tree morphisms `s → t`.
pub fn tree_homs(s: &Tree, t: &Tree) -> Vec<Vec<CellIx>> {
    hom_assignments(s.gset(), t.gset())
}

/// Whether some morphism `s → t` exists.
pub fn has_hom(s: &Tree, t: &Tree) -> bool {
    let mut any = false;
    HomSearch::new(s.gset(), t.gset()).for_each(|_| {
        any = true;
        ControlFlow::Break(())
    });
    any
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PlanarTree {
        PlanarTree::parse(s).unwrap()
    }

    #[test]
    fn is_tree_examples() {
        for n in 0..=5 {
            assert!(is_tree(&GlobularSet::globe(n)));
        }
        let mut two = GlobularSet::new();
        two.add("a", 0, None, None).unwrap();
        two.add("b", 0, None, None).unwrap();
        assert!(!is_tree(&two));
        let mut lp = GlobularSet::new();
        let v = lp.add("v", 0, None, None).unwrap();
        lp.add("e", 1, Some(v), Some(v)).unwrap();
        assert!(!is_tree(&lp));
        assert!(!is_tree(&GlobularSet::new()));
    }

    #[test]
    fn planar_conversions() {
        let point = Tree::from_planar(&p("[]"));
        assert_eq!(point.cell_count(), 1);
        let star2 = Tree::from_planar(&p("[[],[]]"));
        assert_eq!(star2.cell_count(), 5);
        assert!(globset::is_isomorphic(star2.gset(), &GlobularSet::path(2)));
        let globe2 = Tree::from_planar(&p("[[[]]]"));
        assert_eq!(globe2.cell_count(), 5);
        let (back, iso) = Tree::from_gset(&GlobularSet::globe(2)).unwrap();
        assert_eq!(back, globe2);
        assert!(check_assignment(&GlobularSet::globe(2), back.gset(), &iso).is_ok());
        let (back, _) = Tree::from_gset(&GlobularSet::path(2)).unwrap();
        assert_eq!(back.planar(), &p("[[],[]]"));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(Tree::point().classify(), (0, true));
        assert_eq!(Tree::star(2).classify(), (1, false));
        assert_eq!(Tree::linear(2).classify(), (2, true));
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate_trees(1).len(), 1);
        assert_eq!(enumerate_trees(3).len(), 2);
        let five: Vec<String> = enumerate_trees(5).iter().map(|t| t.to_string()).collect();
        assert_eq!(five, ["[]", "[[]]", "[[],[]]", "[[[]]]"]);
    }

    #[test]
    fn subtree_counts() {
        assert_eq!(subtrees(&Tree::star(2), true).len(), 5);
        assert_eq!(subtrees(&Tree::linear(2), true).len(), 4);
        assert_eq!(subtrees(&Tree::point(), true).len(), 0);
        assert_eq!(subtrees(&Tree::point(), false).len(), 1);
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(boundary_union(&Tree::star(2)).0.len(), 5);
        let (b, _) = boundary_union(&Tree::linear(2));
        assert!(globset::is_isomorphic(&b, &GlobularSet::sphere(2).0));
        assert!(boundary_union(&Tree::point()).0.is_empty());
    }

    #[test]
    fn truncation_examples() {
        let star2 = Tree::star(2);
        let tr = star2.truncate(0).unwrap();
        assert_eq!(tr.tree, Tree::point());
        assert_eq!(star2.gset().id(tr.src_embed[0]), "0:0");
        assert_eq!(star2.gset().id(tr.tgt_embed[0]), "0:2");

        let g2 = Tree::linear(2);
        let tr = g2.truncate(1).unwrap();
        assert_eq!(tr.tree, Tree::linear(1));
        let edge = tr.tree.gset().cells_of_dim(1).next().unwrap();
        let (s, t) = (tr.src_embed[edge], tr.tgt_embed[edge]);
        let top = g2.gset().cells_of_dim(2).next().unwrap();
        assert_eq!((Some(s), Some(t)), (g2.gset().src(top), g2.gset().tgt(top)));

        let tr = g2.truncate(2).unwrap();
        assert_eq!(tr.tree, g2);
        let id: Vec<_> = (0..g2.cell_count()).collect();
        assert_eq!((tr.src_embed.clone(), tr.tgt_embed.clone()), (id.clone(), id));

        assert!(matches!(
            star2.truncate(2),
            Err(Error::TruncationTooDeep { level: 2, height: 1 })
        ));
    }

    #[test]
    fn cover_examples() {
        let star2 = Tree::star(2);
        let fam: Vec<_> = subtrees(&star2, true).iter().map(|s| s.as_map(&star2)).collect();
        assert!(is_cover(&fam, &star2));
        let g2 = Tree::linear(2);
        let fam: Vec<_> = subtrees(&g2, true).iter().map(|s| s.as_map(&g2)).collect();
        assert!(!is_cover(&fam, &g2));
        assert!(is_cover(&[g2.identity_map()], &g2));
    }

    #[test]
    fn globe_cover_examples() {
        assert!(globe_cover_check(&Tree::star(2)).is_iso);
        assert!(globe_cover_check(&Tree::linear(3)).is_iso);
    }

    #[test]
    fn planar_json_round_trip() {
        let t = p("[[[]],[]]");
        assert_eq!(PlanarTree::from_json(&t.to_json()).unwrap(), t);
        assert!(PlanarTree::parse("[1]").is_err());
    }
}
