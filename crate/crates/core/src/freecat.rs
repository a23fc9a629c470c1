//! The free strict ω-category monad on globular sets.
//!
//! An `n`-cell of `ω(X)` is a pair `(T, f)` of a tree of height at most `n`
//! and a globular map `f: T → X`. Faces truncate the tree and restrict the
//! label along the truncation's source or target embedding. Multiplication
//! glues the inner trees of a tree-of-trees along those embeddings; it is a
//! colimit of globular sets, so grafting and pasting share one implementation.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::globset::{colimit, CellIx, Diagram, GlobularSet, HomSearch, Side};
use crate::tree::{enumerate_trees, PlanarTree, Tree};

/// A cell of `ω(X)`; `label` indexes the cells of `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeCell {
    pub shape: Tree,
    pub label: Vec<CellIx>,
    pub dim: usize,
}

impl FreeCell {
    pub fn new(shape: Tree, label: Vec<CellIx>, dim: usize) -> Result<Self> {
        if shape.height() > dim {
            return Err(Error::InvalidMap(format!(
                "tree {shape} has height above {dim}"
            )));
        }
        if label.len() != shape.cell_count() {
            return Err(Error::InvalidMap("label length differs from tree size".into()));
        }
        Ok(Self { shape, label, dim })
    }

    pub fn check_label(&self, x: &GlobularSet) -> Result<()> {
        crate::globset::check_assignment(self.shape.gset(), x, &self.label)
    }

    /// The same pasting diagram regarded as a cell one dimension up.
    pub fn raised(&self, dim: usize) -> FreeCell {
        debug_assert!(dim >= self.dim);
        FreeCell {
            dim,
            ..self.clone()
        }
    }

    pub fn relabel(&self, phi: &[CellIx]) -> FreeCell {
        FreeCell {
            shape: self.shape.clone(),
            label: self.label.iter().map(|&i| phi[i]).collect(),
            dim: self.dim,
        }
    }

    pub fn display(&self, x: &GlobularSet) -> String {
        let labels: Vec<&str> = self.label.iter().map(|&i| x.id(i)).collect();
        format!("{}@{}[{}]", self.shape, self.dim, labels.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct FreeCells {
    pub cells: Vec<FreeCell>,
    /// Some pasting diagram above the tree bound also maps into `x`.
    pub truncated: bool,
}

/// All `n`-cells of `ω(x)` whose trees have at most `max_tree_cells` cells.
pub fn free_cells(x: &GlobularSet, n: usize, max_tree_cells: usize) -> FreeCells {
    let mut cells = Vec::new();
    for t in enumerate_trees(max_tree_cells) {
        if t.height() > n {
            continue;
        }
        for label in HomSearch::new(t.gset(), x).collect() {
            cells.push(FreeCell {
                shape: t.clone(),
                label,
                dim: n,
            });
        }
    }
    // A tree with a map into x has a subtree two cells smaller (drop a
    // last-child leaf), so checking the next size up decides truncation.
    let next = if max_tree_cells.is_multiple_of(2) {
        max_tree_cells + 1
    } else {
        max_tree_cells + 2
    };
    let truncated = crate::tree::planar_trees_with_nodes(next.div_ceil(2))
        .into_iter()
        .filter(|p| p.height() <= n)
        .any(|p| {
            let t = Tree::from_planar(&p);
            let mut any = false;
            HomSearch::new(t.gset(), x).for_each(|_| {
                any = true;
                ControlFlow::Break(())
            });
            any
        });
    FreeCells { cells, truncated }
}

/// Labels of the linear tree `globe(n)` picking out the cell `c`.
pub fn globe_label(x: &GlobularSet, c: CellIx) -> Vec<CellIx> {
    let n = x.dim(c);
    let t = Tree::linear(n);
    (0..t.cell_count())
        .map(|cell| {
            let (node, gap) = t.addr(cell);
            let depth = t.node_depth(node);
            if depth == n {
                c
            } else {
                let side = if gap == 0 { Side::Source } else { Side::Target };
                x.face_iter(c, side, n - depth)
            }
        })
        .collect()
}

pub fn unit(x: &GlobularSet, c: CellIx) -> FreeCell {
    let n = x.dim(c);
    FreeCell {
        shape: Tree::linear(n),
        label: globe_label(x, c),
        dim: n,
    }
}

pub fn face(c: &FreeCell, side: Side) -> Result<FreeCell> {
    if c.dim == 0 {
        return Err(Error::NoFaceAtDimZero);
    }
    let k = c.dim - 1;
    if c.shape.height() <= k {
        return Ok(FreeCell {
            shape: c.shape.clone(),
            label: c.label.clone(),
            dim: k,
        });
    }
    let tr = c.shape.truncate(k)?;
    let embed = match side {
        Side::Source => &tr.src_embed,
        Side::Target => &tr.tgt_embed,
    };
    Ok(FreeCell {
        shape: tr.tree,
        label: embed.iter().map(|&i| c.label[i]).collect(),
        dim: k,
    })
}

/// Iterated face down to dimension `k`.
pub fn face_to(c: &FreeCell, side: Side, k: usize) -> Result<FreeCell> {
    let mut cur = c.clone();
    while cur.dim > k {
        cur = face(&cur, side)?;
    }
    Ok(cur)
}

/// A cell of `ω(ω(X))`: an outer tree whose cells carry cells of `ω(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NestedCell {
    pub shape: Tree,
    pub dim: usize,
    /// Indexed by the cells of `shape`; `inner[c].dim` equals the dimension of `c`.
    pub inner: Vec<FreeCell>,
}

impl NestedCell {
    /// Checks that the inner cells form a globular map `shape → ω(X)`.
    pub fn check(&self) -> Result<()> {
        let g = self.shape.gset();
        if self.inner.len() != g.len() || self.shape.height() > self.dim {
            return Err(Error::IncompatibleAssignment("wrong arity".into()));
        }
        for (c, cell) in g.cells().iter().enumerate() {
            let inner = &self.inner[c];
            if inner.dim != cell.dim {
                return Err(Error::IncompatibleAssignment(format!(
                    "cell {} carries a {}-cell",
                    cell.id, inner.dim
                )));
            }
            if let (Some(s), Some(t)) = (cell.src, cell.tgt) {
                if face(inner, Side::Source)? != self.inner[s]
                    || face(inner, Side::Target)? != self.inner[t]
                {
                    return Err(Error::IncompatibleAssignment(format!(
                        "faces of the cell at {} disagree",
                        cell.id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The monad multiplication `μ: ω∘ω → ω` on one cell.
///
/// The result tree is the colimit of the inner trees glued along their face
/// embeddings; `bound` caps its size.
pub fn multiply(nested: &NestedCell, bound: Option<usize>) -> Result<FreeCell> {
    nested.check()?;
    multiply_unchecked(nested, bound)
}

pub(crate) fn multiply_unchecked(nested: &NestedCell, bound: Option<usize>) -> Result<FreeCell> {
    let (shape, legs) = glue(nested, bound)?;
    let mut label = vec![usize::MAX; shape.cell_count()];
    for (o, leg) in legs.iter().enumerate() {
        for (i, &k) in leg.iter().enumerate() {
            let l = nested.inner[o].label[i];
            if label[k] == usize::MAX {
                label[k] = l;
            } else if label[k] != l {
                return Err(Error::IncompatibleAssignment("labels disagree on glued cells".into()));
            }
        }
    }
    Ok(FreeCell {
        shape,
        label,
        dim: nested.dim,
    })
}

/// Glues the inner trees and returns the canonical result tree together with
/// the embedding of every inner tree into it.
fn glue(nested: &NestedCell, bound: Option<usize>) -> Result<(Tree, Vec<Vec<CellIx>>)> {
    let g = nested.shape.gset();
    let objects = nested.inner.iter().map(|c| c.shape.gset_arc()).collect();
    let mut arrows = Vec::new();
    for (c, cell) in g.cells().iter().enumerate() {
        let (Some(s), Some(t)) = (cell.src, cell.tgt) else {
            continue;
        };
        let inner = &nested.inner[c];
        if inner.shape.height() < cell.dim {
            let id: Vec<CellIx> = (0..inner.shape.cell_count()).collect();
            arrows.push((s, c, id.clone()));
            arrows.push((t, c, id));
        } else {
            let tr = inner.shape.truncate(cell.dim - 1)?;
            arrows.push((s, c, tr.src_embed));
            arrows.push((t, c, tr.tgt_embed));
        }
    }
    let col = colimit(&Diagram { objects, arrows });
    if let Some(b) = bound {
        if col.apex.len() > b {
            return Err(Error::TruncationOverflow {
                cells: col.apex.len(),
                bound: b,
            });
        }
    }
    let (shape, iso) = Tree::from_gset(&col.apex)
        .map_err(|e| Error::IncompatibleAssignment(format!("glued diagram: {e}")))?;
    let legs = col
        .legs
        .into_iter()
        .map(|leg| leg.into_iter().map(|k| iso[k]).collect())
        .collect();
    Ok((shape, legs))
}

/// The inner cells `η(c)` for a free cell, giving `ω(η)` applied to it.
pub fn wrap_units(x: &GlobularSet, c: &FreeCell) -> NestedCell {
    NestedCell {
        shape: c.shape.clone(),
        dim: c.dim,
        inner: c.label.iter().map(|&l| unit(x, l)).collect(),
    }
}

/// `η_{ω(X)}(c)`: the cell as the single label of a globe.
pub fn unit_of_free(c: &FreeCell) -> NestedCell {
    let n = c.dim;
    let t = Tree::linear(n);
    let inner = (0..t.cell_count())
        .map(|cell| {
            let (node, gap) = t.addr(cell);
            let depth = t.node_depth(node);
            if depth == n {
                c.clone()
            } else {
                let side = if gap == 0 { Side::Source } else { Side::Target };
                face_to(c, side, depth).expect("depth below dim")
            }
        })
        .collect();
    NestedCell { shape: t, dim: n, inner }
}

/// A tree whose cells carry trees: a cell of `ω(ω(e))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeOfTrees {
    pub outer: Tree,
    pub inner: Vec<Tree>,
}

impl TreeOfTrees {
    pub fn check(&self) -> Result<()> {
        self.to_nested().check()
    }

    fn to_nested(&self) -> NestedCell {
        let g = self.outer.gset();
        let inner = self
            .inner
            .iter()
            .zip(g.cells())
            .map(|(t, cell)| FreeCell {
                shape: t.clone(),
                label: (0..t.cell_count()).map(|i| t.gset().dim(i)).collect(),
                dim: cell.dim,
            })
            .collect();
        NestedCell {
            shape: self.outer.clone(),
            dim: self.outer.height(),
            inner,
        }
    }
}

/// Substitution of trees into a tree: `μ` at the terminal globular set.
pub fn graft(tt: &TreeOfTrees) -> Result<Tree> {
    Ok(graft_with_legs(tt)?.0)
}

/// Grafting together with the embedding of each inner tree into the result.
pub fn graft_with_legs(tt: &TreeOfTrees) -> Result<(Tree, Vec<Vec<CellIx>>)> {
    // labels index the terminal ω-graph, whose k-cell is numbered k
    if tt.inner.len() != tt.outer.cell_count() {
        return Err(Error::IncompatibleAssignment("wrong arity".into()));
    }
    for (t, cell) in tt.inner.iter().zip(tt.outer.gset().cells()) {
        if t.height() > cell.dim {
            return Err(Error::IncompatibleAssignment(format!(
                "tree {t} is too tall for a {}-cell",
                cell.dim
            )));
        }
    }
    let nested = tt.to_nested();
    nested.check()?;
    glue(&nested, None)
}

/// Strict composition of `a` then `b` along their common `k`-boundary.
pub fn compose_along(a: &FreeCell, b: &FreeCell, k: usize, bound: Option<usize>) -> Result<FreeCell> {
    if k >= a.dim || k >= b.dim {
        return Err(Error::BoundaryMismatch(format!(
            "cannot compose a {}-cell and a {}-cell along dimension {k}",
            a.dim, b.dim
        )));
    }
    if face_to(a, Side::Target, k)? != face_to(b, Side::Source, k)? {
        return Err(Error::BoundaryMismatch(format!(
            "target {k}-face of the first cell differs from the source {k}-face of the second"
        )));
    }
    let mut top = PlanarTree(vec![
        PlanarTree::linear(a.dim - k - 1),
        PlanarTree::linear(b.dim - k - 1),
    ]);
    for _ in 0..k {
        top = PlanarTree(vec![top]);
    }
    let outer = Tree::from_planar(&top);
    let dim = a.dim.max(b.dim);
    let mut inner = Vec::with_capacity(outer.cell_count());
    for cell in 0..outer.cell_count() {
        let (node, gap) = outer.addr(cell);
        let depth = outer.node_depth(node);
        let fc = if depth < k {
            let side = if gap == 0 { Side::Source } else { Side::Target };
            face_to(a, side, depth)?
        } else if depth == k {
            match gap {
                0 => face_to(a, Side::Source, k)?,
                1 => face_to(a, Side::Target, k)?,
                _ => face_to(b, Side::Target, k)?,
            }
        } else {
            // which branch above the fork
            let mut x = node;
            while outer.node_depth(x) > k + 1 {
                x = outer.node_parent(x).unwrap().0;
            }
            let branch = outer.node_parent(x).unwrap().1;
            let c = if branch == 0 { a } else { b };
            if depth == c.dim {
                c.clone()
            } else {
                let side = if gap == 0 { Side::Source } else { Side::Target };
                face_to(c, side, depth)?
            }
        };
        inner.push(fc);
    }
    multiply(&NestedCell { shape: outer, dim, inner }, bound)
}

/// `ω(X)` truncated at `max_dim` with trees of at most `bound` cells,
/// materialised as a globular set.
#[derive(Clone, Debug)]
pub struct FreeGraph {
    pub gset: Arc<GlobularSet>,
    pub cells: Vec<FreeCell>,
    pub index: HashMap<FreeCell, CellIx>,
    pub truncated: bool,
}

impl FreeGraph {
    pub fn build(x: &GlobularSet, max_dim: usize, bound: usize) -> FreeGraph {
        let mut g = GlobularSet::new();
        let mut cells = Vec::new();
        let mut index = HashMap::new();
        let mut truncated = false;
        for n in 0..=max_dim {
            let fc = free_cells(x, n, bound);
            truncated |= fc.truncated;
            for c in fc.cells {
                let (s, t) = if n == 0 {
                    (None, None)
                } else {
                    (
                        Some(index[&face(&c, Side::Source).unwrap()]),
                        Some(index[&face(&c, Side::Target).unwrap()]),
                    )
                };
                let ix = g
                    .add(c.display(x).to_string(), n, s, t)
                    .expect("free cells are distinct");
                index.insert(c.clone(), ix);
                cells.push(c);
            }
        }
        FreeGraph {
            gset: Arc::new(g),
            cells,
            index,
            truncated,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperadTag {
    Initial,
    Terminal,
}

impl fmt::Display for OperadTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperadTag::Initial => "initial",
            OperadTag::Terminal => "terminal",
        })
    }
}

/// A Kleisli map `s → ω(t)` (for the initial operad, every value is a unit).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KleisliMap {
    pub source: Tree,
    pub target: Tree,
    pub cells: Vec<FreeCell>,
}

impl KleisliMap {
    /// `other ∘ self` in the Kleisli category: `μ ∘ ω(other) ∘ self`.
    pub fn then(&self, other: &KleisliMap) -> Result<KleisliMap> {
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let nested = NestedCell {
                    shape: c.shape.clone(),
                    dim: c.dim,
                    inner: c.label.iter().map(|&l| other.cells[l].clone()).collect(),
                };
                multiply_unchecked(&nested, None)
            })
            .collect::<Result<_>>()?;
        Ok(KleisliMap {
            source: self.source.clone(),
            target: other.target.clone(),
            cells,
        })
    }

    pub fn identity(t: &Tree) -> KleisliMap {
        KleisliMap {
            source: t.clone(),
            target: t.clone(),
            cells: (0..t.cell_count()).map(|c| unit(t.gset(), c)).collect(),
        }
    }
}

/// Morphisms `s → t` in `Θ₀` (initial) or `Θ_ω` (terminal).
pub fn theta_hom(tag: OperadTag, s: &Tree, t: &Tree) -> Vec<KleisliMap> {
    match tag {
        OperadTag::Initial => HomSearch::new(s.gset(), t.gset())
            .collect()
            .into_iter()
            .map(|a| KleisliMap {
                source: s.clone(),
                target: t.clone(),
                cells: a.iter().map(|&j| unit(t.gset(), j)).collect(),
            })
            .collect(),
        OperadTag::Terminal => {
            // labels of free cells over a tree are monomorphisms, so trees
            // with at most |t| cells exhaust ω(t)
            let free = FreeGraph::build(t.gset(), s.height(), t.cell_count());
            HomSearch::new(s.gset(), &free.gset)
                .collect()
                .into_iter()
                .map(|a| KleisliMap {
                    source: s.clone(),
                    target: t.clone(),
                    cells: a.iter().map(|&j| free.cells[j].clone()).collect(),
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_graph() -> GlobularSet {
        let mut g = GlobularSet::new();
        let v = g.add("v", 0, None, None).unwrap();
        g.add("e", 1, Some(v), Some(v)).unwrap();
        g
    }

    #[test]
    fn free_cells_on_a_path() {
        let x = GlobularSet::path(2);
        let fc = free_cells(&x, 1, 5);
        assert_eq!(fc.cells.len(), 6);
        let shapes: Vec<String> = fc.cells.iter().map(|c| c.shape.to_string()).collect();
        assert_eq!(shapes, ["[]", "[]", "[]", "[[]]", "[[]]", "[[],[]]"]);
        assert!(!fc.truncated);
        assert_eq!(free_cells(&GlobularSet::globe(0), 0, 1).cells.len(), 1);
    }

    #[test]
    fn free_cells_on_a_loop_are_paths() {
        let x = loop_graph();
        for k in 0..5 {
            let fc = free_cells(&x, 1, 2 * k + 1);
            assert_eq!(fc.cells.len(), k + 1);
            assert!(fc.truncated);
        }
    }

    #[test]
    fn unit_and_faces() {
        let x = GlobularSet::path(2);
        let u = x.index_of("v0").unwrap();
        let e = x.index_of("e1").unwrap();
        assert_eq!(unit(&x, u).shape, Tree::point());
        let ue = unit(&x, e);
        assert_eq!((ue.shape.clone(), ue.label[1]), (Tree::linear(1), e));
        assert_eq!(face(&ue, Side::Source).unwrap(), unit(&x, u));

        let comp = free_cells(&x, 1, 5).cells.pop().unwrap();
        let w = x.index_of("v2").unwrap();
        assert_eq!(face(&comp, Side::Source).unwrap(), unit(&x, u));
        assert_eq!(face(&comp, Side::Target).unwrap(), unit(&x, w));
        assert_eq!(face(&unit(&x, u), Side::Source), Err(Error::NoFaceAtDimZero));
    }

    #[test]
    fn graft_examples() {
        let tt = TreeOfTrees {
            outer: Tree::star(2),
            inner: vec![Tree::point(), Tree::star(3), Tree::point(), Tree::star(1), Tree::point()],
        };
        assert_eq!(graft(&tt).unwrap(), Tree::star(4));
        let tt = TreeOfTrees {
            outer: Tree::point(),
            inner: vec![Tree::point()],
        };
        assert_eq!(graft(&tt).unwrap(), Tree::point());
        // the identity substitution on a globe
        let g2 = Tree::linear(2);
        let inner = (0..5)
            .map(|c| Tree::linear(g2.gset().dim(c)))
            .collect();
        assert_eq!(graft(&TreeOfTrees { outer: g2.clone(), inner }).unwrap(), g2);
        let bad = TreeOfTrees {
            outer: Tree::linear(1),
            inner: vec![Tree::point(), Tree::linear(2), Tree::point()],
        };
        assert!(graft(&bad).is_err());
    }

    #[test]
    fn multiply_concatenates_paths() {
        let x = GlobularSet::path(3);
        let fc = free_cells(&x, 1, 7);
        let ef = fc
            .cells
            .iter()
            .find(|c| c.shape == Tree::star(2) && x.id(c.label[0]) == "v0")
            .unwrap()
            .clone();
        let g = unit(&x, x.index_of("e3").unwrap());
        let outer = Tree::star(2);
        let v2 = unit(&x, x.index_of("v2").unwrap());
        let nested = NestedCell {
            shape: outer,
            dim: 1,
            inner: vec![
                face(&ef, Side::Source).unwrap(),
                ef.clone(),
                v2,
                g.clone(),
                face(&g, Side::Target).unwrap(),
            ],
        };
        let r = multiply(&nested, None).unwrap();
        assert_eq!(r.shape, Tree::star(3));
        let edges: Vec<&str> = r
            .label
            .iter()
            .enumerate()
            .filter(|(i, _)| r.shape.gset().dim(*i) == 1)
            .map(|(_, &l)| x.id(l))
            .collect();
        assert_eq!(edges, ["e1", "e2", "e3"]);
        assert_eq!(multiply(&nested, Some(5)), Err(Error::TruncationOverflow { cells: 7, bound: 5 }));
    }

    #[test]
    fn compose_paths_and_units() {
        let x = GlobularSet::path(2);
        let e1 = unit(&x, x.index_of("e1").unwrap());
        let e2 = unit(&x, x.index_of("e2").unwrap());
        let c = compose_along(&e1, &e2, 0, None).unwrap();
        assert_eq!(c.shape, Tree::star(2));
        let v1 = unit(&x, x.index_of("v1").unwrap()).raised(1);
        assert_eq!(compose_along(&e1, &v1, 0, None).unwrap(), e1);
        assert!(compose_along(&e2, &e1, 0, None).is_err());
    }

    #[test]
    fn theta_hom_counts() {
        assert_eq!(theta_hom(OperadTag::Initial, &Tree::linear(1), &Tree::star(2)).len(), 2);
        assert_eq!(theta_hom(OperadTag::Terminal, &Tree::linear(1), &Tree::star(2)).len(), 6);
        for t in enumerate_trees(7) {
            assert_eq!(
                theta_hom(OperadTag::Terminal, &Tree::point(), &t).len(),
                t.gset().count_of_dim(0)
            );
        }
    }

    #[test]
    fn kleisli_composition_is_associative_on_small_trees() {
        let trees = enumerate_trees(5);
        for a in &trees {
            for b in &trees {
                for c in &trees {
                    let ab = theta_hom(OperadTag::Terminal, a, b);
                    let bc = theta_hom(OperadTag::Terminal, b, c);
                    let cd = theta_hom(OperadTag::Terminal, c, &Tree::star(2));
                    for f in ab.iter().take(3) {
                        for g in bc.iter().take(3) {
                            for h in cd.iter().take(3) {
                                let l = f.then(g).unwrap().then(h).unwrap();
                                let r = f.then(&g.then(h).unwrap()).unwrap();
                                assert_eq!(l, r);
                            }
                        }
                    }
                }
            }
        }
    }
}
