//! Globular operads presented by their operations over the terminal ω-graph.
//!
//! A collection `p: A → ω` is cartesian, so `A(X) = A(e) ×_{ω(e)} ω(X)` and the
//! whole endofunctor is recovered from the globular set `A(e)` of operations
//! together with the arity tree of each operation. Everything here works on
//! that presentation, truncated in dimension and in arity-tree size.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freecat::{
    globe_label, graft, graft_with_legs, multiply_unchecked, FreeCell, NestedCell, TreeOfTrees,
};
use crate::globset::{check_assignment, CellIx, CellRecord, GlobularSet, HomSearch, Side};
use crate::tree::{enumerate_trees, Tree};

/// Operations of a collection with their arity trees.
#[derive(Clone, Debug)]
pub struct Collection {
    pub total: Arc<GlobularSet>,
    /// Arity tree of each operation; a cell of the tree classifier.
    pub over: Vec<Tree>,
    pub trunc_dim: usize,
    pub tree_bound: usize,
    fibers: HashMap<(usize, Tree), Vec<CellIx>>,
}

impl Collection {
    /// Checks that `over` is a globular map into the tree classifier.
    pub fn new(total: GlobularSet, over: Vec<Tree>, trunc_dim: usize, tree_bound: usize) -> Result<Self> {
        let bad = |m: String| Err(Error::InconsistentOperad(m));
        if over.len() != total.len() {
            return bad(format!("{} arity trees for {} operations", over.len(), total.len()));
        }
        let report = total.validate();
        if let Some(v) = report.violations.first() {
            return bad(format!("operations do not form a globular set: {v}"));
        }
        let mut fibers: HashMap<(usize, Tree), Vec<CellIx>> = HashMap::new();
        for (a, cell) in total.cells().iter().enumerate() {
            let t = &over[a];
            if cell.dim > trunc_dim {
                return bad(format!("operation `{}` lies above dimension {trunc_dim}", cell.id));
            }
            if t.height() > cell.dim {
                return bad(format!("operation `{}` has arity {t} of height above {}", cell.id, cell.dim));
            }
            if t.cell_count() > tree_bound {
                return bad(format!("operation `{}` has arity {t} above the tree bound", cell.id));
            }
            if let (Some(s), Some(u)) = (cell.src, cell.tgt) {
                let face = t.truncate_or_self(cell.dim - 1);
                if over[s] != face || over[u] != face {
                    return bad(format!("faces of `{}` do not lie over {face}", cell.id));
                }
            }
            fibers.entry((cell.dim, t.clone())).or_default().push(a);
        }
        Ok(Self {
            total: Arc::new(total),
            over,
            trunc_dim,
            tree_bound,
            fibers,
        })
    }

    /// The tree classifier `ω(e)` truncated at dimension `d`, trees of at
    /// most `bound` cells. Its `n`-cells are the trees of height at most `n`.
    pub fn tree_classifier(d: usize, bound: usize) -> Self {
        let trees = enumerate_trees(bound);
        let mut g = GlobularSet::new();
        let mut over = Vec::new();
        let mut index: HashMap<(usize, Tree), CellIx> = HashMap::new();
        for n in 0..=d {
            for t in trees.iter().filter(|t| t.height() <= n) {
                let face = (n > 0).then(|| index[&(n - 1, t.truncate_or_self(n - 1))]);
                let ix = g.add(format!("{n}:{t}"), n, face, face).expect("fresh ids");
                index.insert((n, t.clone()), ix);
                over.push(t.clone());
            }
        }
        Self::new(g, over, d, bound).expect("the classifier is consistent")
    }

    pub fn over(&self, a: CellIx) -> &Tree {
        &self.over[a]
    }

    pub fn dim(&self, a: CellIx) -> usize {
        self.total.dim(a)
    }

    /// Operations of dimension `dim` over `tree`, in cell order.
    pub fn fiber(&self, dim: usize, tree: &Tree) -> &[CellIx] {
        self.fibers
            .get(&(dim, tree.clone()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// The tree `μ(p(a); p∘label)` a product must lie over.
    pub fn grafted(&self, a: CellIx, label: &[CellIx]) -> Result<Tree> {
        graft(&TreeOfTrees {
            outer: self.over[a].clone(),
            inner: label.iter().map(|&l| self.over[l].clone()).collect(),
        })
    }

    /// Labellings of the arity tree of `a` by operations.
    pub fn labellings(&self, a: CellIx) -> Vec<Vec<CellIx>> {
        HomSearch::new(self.over[a].gset(), &self.total).collect()
    }
}

/// The multiplication `A∘A → A` on operations.
///
/// `label` assigns an operation to every cell of the arity tree of `a`;
/// `None` means the product falls outside the stored truncation.
pub trait MultRule: fmt::Debug + Send + Sync {
    fn mult(&self, coll: &Collection, a: CellIx, label: &[CellIx]) -> Option<CellIx>;
}

/// Multiplication of the terminal operad: grafting.
#[derive(Clone, Copy, Debug, Default)]
pub struct GraftRule;

impl MultRule for GraftRule {
    fn mult(&self, coll: &Collection, a: CellIx, label: &[CellIx]) -> Option<CellIx> {
        let g = coll.grafted(a, label).ok()?;
        coll.fiber(coll.dim(a), &g).first().copied()
    }
}

/// Multiplication where every operation is a unit: the product is the label
/// of the top cell.
#[derive(Clone, Copy, Debug, Default)]
pub struct TopLabelRule;

impl MultRule for TopLabelRule {
    fn mult(&self, coll: &Collection, a: CellIx, label: &[CellIx]) -> Option<CellIx> {
        let t = coll.over(a);
        if !t.is_linear() || t.height() != coll.dim(a) {
            return None;
        }
        let top = t.gset().cells_of_dim(t.height()).next()?;
        Some(label[top])
    }
}

/// An explicit multiplication table.
#[derive(Clone, Debug, Default)]
pub struct MultTable(pub HashMap<(CellIx, Vec<CellIx>), CellIx>);

impl MultRule for MultTable {
    fn mult(&self, _coll: &Collection, a: CellIx, label: &[CellIx]) -> Option<CellIx> {
        self.0.get(&(a, label.to_vec())).copied()
    }
}

/// A boundary-compatible square against `∂n̄ → n̄`: a parallel pair of
/// `(n-1)`-operations (absent for `n = 0`) and an `n`-cell of the tree
/// classifier restricting to their arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square {
    pub dim: usize,
    pub tree: Tree,
    pub src: Option<CellIx>,
    pub tgt: Option<CellIx>,
}

impl Square {
    pub fn display(&self, total: &GlobularSet) -> String {
        match (self.src, self.tgt) {
            (Some(s), Some(t)) => format!(
                "dim {} over {}: {} => {}",
                self.dim,
                self.tree,
                total.id(s),
                total.id(t)
            ),
            _ => format!("dim {} over {}", self.dim, self.tree),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OperadData {
    pub coll: Collection,
    /// `units[n]` lies over the linear tree of height `n`.
    pub units: Vec<CellIx>,
    pub mult: Arc<dyn MultRule>,
    /// Every fiber over a tree within the bound is stored completely.
    pub complete_fibers: bool,
    /// Chosen lifts, for operads with contraction.
    pub lifts: Option<HashMap<Square, CellIx>>,
}

impl OperadData {
    pub fn new(coll: Collection, units: Vec<CellIx>, mult: Arc<dyn MultRule>, complete_fibers: bool) -> Result<Self> {
        if units.len() != coll.trunc_dim + 1 {
            return Err(Error::InconsistentOperad(format!(
                "{} units for truncation dimension {}",
                units.len(),
                coll.trunc_dim
            )));
        }
        for (n, &u) in units.iter().enumerate() {
            if u >= coll.total.len() || coll.dim(u) != n || *coll.over(u) != Tree::linear(n) {
                return Err(Error::InconsistentOperad(format!("unit {n} is not an {n}-cell over the globe")));
            }
            if n > 0 && (coll.total.src(u) != Some(units[n - 1]) || coll.total.tgt(u) != Some(units[n - 1])) {
                return Err(Error::InconsistentOperad(format!("faces of unit {n} are not unit {}", n - 1)));
            }
        }
        Ok(Self {
            coll,
            units,
            mult: mult.clone(),
            complete_fibers,
            lifts: None,
        })
    }

    pub fn total(&self) -> &GlobularSet {
        &self.coll.total
    }

    pub fn trunc_dim(&self) -> usize {
        self.coll.trunc_dim
    }

    pub fn tree_bound(&self) -> usize {
        self.coll.tree_bound
    }

    pub fn mult(&self, a: CellIx, label: &[CellIx]) -> Option<CellIx> {
        self.mult.mult(&self.coll, a, label)
    }

    /// The labelling of the arity tree of `a` by units.
    pub fn unit_labelling(&self, a: CellIx) -> Vec<CellIx> {
        let g = self.coll.over(a).gset();
        (0..g.len()).map(|c| self.units[g.dim(c)]).collect()
    }

    /// Every defined product `((a, label), result)`, in canonical order.
    pub fn mult_entries(&self) -> Vec<((CellIx, Vec<CellIx>), CellIx)> {
        let mut out = Vec::new();
        for a in self.total().canonical_order() {
            for label in self.coll.labellings(a) {
                if let Some(r) = self.mult(a, &label) {
                    out.push(((a, label), r));
                }
            }
        }
        out
    }

    /// The operations filling `sq`.
    pub fn fillers(&self, sq: &Square) -> Vec<CellIx> {
        let g = self.total();
        self.coll
            .fiber(sq.dim, &sq.tree)
            .iter()
            .copied()
            .filter(|&c| g.src(c) == sq.src && g.tgt(c) == sq.tgt)
            .collect()
    }

    /// The same operad with its operations reordered: operation `a` moves to
    /// position `perm[a]` and is renamed. The multiplication is tabulated.
    pub fn relabeled(&self, perm: &[CellIx]) -> Result<OperadData> {
        let g = self.total();
        let n = g.len();
        let mut inv = vec![usize::MAX; n];
        for (a, &p) in perm.iter().enumerate() {
            if p >= n || inv[p] != usize::MAX {
                return Err(Error::InvalidMap("not a permutation".into()));
            }
            inv[p] = a;
        }
        let name = |a: CellIx| format!("p{}", perm[a]);
        let records: Vec<CellRecord> = inv
            .iter()
            .map(|&a| CellRecord {
                id: name(a),
                dim: g.dim(a),
                src: g.src(a).map(name),
                tgt: g.tgt(a).map(name),
            })
            .collect();
        let total = GlobularSet::from_records(&records)?;
        let over = inv.iter().map(|&a| self.coll.over[a].clone()).collect();
        let coll = Collection::new(total, over, self.trunc_dim(), self.tree_bound())?;
        let table = self
            .mult_entries()
            .into_iter()
            .map(|((a, l), r)| ((perm[a], l.iter().map(|&x| perm[x]).collect()), perm[r]))
            .collect();
        let units = self.units.iter().map(|&u| perm[u]).collect();
        let mut out = OperadData::new(coll, units, Arc::new(MultTable(table)), self.complete_fibers)?;
        out.lifts = self.lifts.as_ref().map(|l| {
            l.iter()
                .map(|(sq, &c)| {
                    let sq = Square {
                        src: sq.src.map(|s| perm[s]),
                        tgt: sq.tgt.map(|t| perm[t]),
                        ..sq.clone()
                    };
                    (sq, perm[c])
                })
                .collect()
        });
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Initial,
    Terminal,
}

impl From<crate::freecat::OperadTag> for Builtin {
    fn from(t: crate::freecat::OperadTag) -> Self {
        match t {
            crate::freecat::OperadTag::Initial => Builtin::Initial,
            crate::freecat::OperadTag::Terminal => Builtin::Terminal,
        }
    }
}

/// The initial operad (only units; its monad is the identity) or the terminal
/// one (one operation per tree; its monad is `ω`).
pub fn builtin(tag: Builtin, d: usize, tree_bound: usize) -> Result<OperadData> {
    if tree_bound < 2 * d + 1 {
        return Err(Error::InconsistentOperad(format!(
            "tree bound {tree_bound} cannot hold the {d}-globe"
        )));
    }
    match tag {
        Builtin::Terminal => {
            let coll = Collection::tree_classifier(d, tree_bound);
            let units = (0..=d).map(|n| coll.fiber(n, &Tree::linear(n))[0]).collect();
            OperadData::new(coll, units, Arc::new(GraftRule), true)
        }
        Builtin::Initial => {
            let mut g = GlobularSet::new();
            let mut prev = None;
            for n in 0..=d {
                prev = Some(g.add(format!("u{n}"), n, prev, prev)?);
            }
            let over = (0..=d).map(Tree::linear).collect();
            let coll = Collection::new(g, over, d, tree_bound)?;
            OperadData::new(coll, (0..=d).collect(), Arc::new(TopLabelRule), true)
        }
    }
}

/// Multiplication of [`doubled_terminal`]: graft the arities and mark the
/// product if any 2-dimensional ingredient is marked.
#[derive(Clone, Debug)]
struct DoubledRule {
    marked: Vec<bool>,
}

impl MultRule for DoubledRule {
    fn mult(&self, coll: &Collection, a: CellIx, label: &[CellIx]) -> Option<CellIx> {
        let g = coll.grafted(a, label).ok()?;
        let n = coll.dim(a);
        let mark = n == 2 && (self.marked[a] || label.iter().any(|&l| self.marked[l]));
        coll.fiber(n, &g).iter().copied().find(|&c| self.marked[c] == mark)
    }
}

/// A contractible 2-truncated operad with two parallel operations over every
/// tree in dimension 2, so that every 2-dimensional lifting problem has two
/// solutions.
pub fn doubled_terminal(tree_bound: usize) -> Result<OperadData> {
    let base = Collection::tree_classifier(2, tree_bound);
    let bg = &base.total;
    let mut g = GlobularSet::new();
    let mut over = Vec::new();
    let mut marked = Vec::new();
    let mut plain = vec![0; bg.len()];
    for a in 0..bg.len() {
        let c = bg.cell(a);
        let (s, t) = (c.src.map(|s| plain[s]), c.tgt.map(|t| plain[t]));
        plain[a] = g.add(c.id.clone(), c.dim, s, t)?;
        over.push(base.over[a].clone());
        marked.push(false);
        if c.dim == 2 {
            g.add(format!("{}'", c.id), 2, s, t)?;
            over.push(base.over[a].clone());
            marked.push(true);
        }
    }
    let coll = Collection::new(g, over, 2, tree_bound)?;
    let units = (0..=2).map(|n| coll.fiber(n, &Tree::linear(n))[0]).collect();
    OperadData::new(coll, units, Arc::new(DoubledRule { marked }), true)
}

/// `A(e)_n ×_{ω(e)_n} ω(x)_n`: operations paired with labellings of their
/// arity tree in `x`, trees of at most `bound` cells.
pub fn collection_apply(o: &OperadData, x: &GlobularSet, n: usize, bound: usize) -> Result<Vec<(CellIx, FreeCell)>> {
    if n > o.trunc_dim() {
        return Err(Error::DimensionExceeded {
            requested: n,
            limit: o.trunc_dim(),
        });
    }
    if bound > o.tree_bound() {
        return Err(Error::TreeBoundExceeded {
            requested: bound,
            limit: o.tree_bound(),
        });
    }
    let mut out = Vec::new();
    for a in o.total().cells_of_dim(n) {
        let t = o.coll.over(a);
        if t.cell_count() > bound {
            continue;
        }
        for label in HomSearch::new(t.gset(), x).collect() {
            out.push((
                a,
                FreeCell {
                    shape: t.clone(),
                    label,
                    dim: n,
                },
            ));
        }
    }
    Ok(out)
}

/// `A(x)` up to dimension `max_dim`, materialised as a globular set.
#[derive(Clone, Debug)]
pub struct Applied {
    pub gset: Arc<GlobularSet>,
    pub cells: Vec<(CellIx, FreeCell)>,
    pub index: HashMap<(CellIx, FreeCell), CellIx>,
}

pub fn apply(o: &OperadData, x: &GlobularSet, max_dim: usize, bound: usize) -> Result<Applied> {
    let mut g = GlobularSet::new();
    let mut cells = Vec::new();
    let mut index = HashMap::new();
    let total = o.total();
    for n in 0..=max_dim {
        for (a, fc) in collection_apply(o, x, n, bound)? {
            let faces = if n == 0 {
                (None, None)
            } else {
                let face = |side: Side| -> Option<CellIx> {
                    let op = if side == Side::Source { total.src(a) } else { total.tgt(a) }?;
                    let f = crate::freecat::face(&fc, side).ok()?;
                    index.get(&(op, f)).copied()
                };
                (face(Side::Source), face(Side::Target))
            };
            if n > 0 && (faces.0.is_none() || faces.1.is_none()) {
                return Err(Error::InconsistentOperad(format!(
                    "face of `{}` at {} falls outside the bound",
                    total.id(a),
                    fc.display(x)
                )));
            }
            let ix = g.add(format!("{}|{}", total.id(a), fc.display(x)), n, faces.0, faces.1)?;
            index.insert((a, fc.clone()), ix);
            cells.push((a, fc));
        }
    }
    Ok(Applied {
        gset: Arc::new(g),
        cells,
        index,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperadViolation {
    /// A product within the truncation is missing although fibers are complete.
    Undefined { op: String, label: Vec<String> },
    /// `p∘mult ≠ graft`.
    WrongTree { op: String, label: Vec<String>, expected: String, found: String },
    NotGlobular { op: String, label: Vec<String>, side: Side },
    LeftUnit { cell: String },
    RightUnit { cell: String },
    Associativity { op: String, label: Vec<String>, outer: Vec<String> },
}

impl fmt::Display for OperadViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Undefined { op, label } => write!(f, "product of {op} with [{}] is undefined", label.join(",")),
            Self::WrongTree { op, label, expected, found } => write!(
                f,
                "product of {op} with [{}] lies over {found}, expected {expected}",
                label.join(",")
            ),
            Self::NotGlobular { op, label, side } => write!(
                f,
                "{side} of the product of {op} with [{}] is not the product of the {side}s",
                label.join(",")
            ),
            Self::LeftUnit { cell } => write!(f, "unit acting on {cell} does not return it"),
            Self::RightUnit { cell } => write!(f, "{cell} acting on units does not return it"),
            Self::Associativity { op, label, outer } => write!(
                f,
                "associativity fails for {op} with [{}] and [{}]",
                label.join(","),
                outer.join(",")
            ),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct OperadReport {
    pub violations: Vec<OperadViolation>,
    pub products: usize,
    /// Products within the bound that the data does not define.
    pub undefined: usize,
    pub triples: usize,
}

impl OperadReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Default size bound for the outer trees of associativity triples.
pub const NEST_BOUND: usize = 5;

/// Unit laws, `p∘mult = graft`, globularity of the multiplication and
/// associativity (for triples whose two grafted trees have at most
/// `nest_bound` cells).
pub fn check_operad(o: &OperadData, nest_bound: usize) -> OperadReport {
    let g = o.total();
    let ids = |l: &[CellIx]| l.iter().map(|&c| g.id(c).to_owned()).collect::<Vec<_>>();
    let order = g.canonical_order();

    let per_op: Vec<OperadReport> = order
        .par_iter()
        .map(|&a| {
            let mut rep = OperadReport::default();
            let t = o.coll.over(a);
            let n = g.dim(a);
            for label in o.coll.labellings(a) {
                let Ok((expected, legs)) = graft_with_legs(&TreeOfTrees {
                    outer: t.clone(),
                    inner: label.iter().map(|&l| o.coll.over(l).clone()).collect(),
                }) else {
                    continue;
                };
                if expected.cell_count() > o.tree_bound() {
                    continue;
                }
                rep.products += 1;
                let Some(r) = o.mult(a, &label) else {
                    rep.undefined += 1;
                    if o.complete_fibers {
                        rep.violations.push(OperadViolation::Undefined {
                            op: g.id(a).into(),
                            label: ids(&label),
                        });
                    }
                    continue;
                };
                if g.dim(r) != n || *o.coll.over(r) != expected {
                    rep.violations.push(OperadViolation::WrongTree {
                        op: g.id(a).into(),
                        label: ids(&label),
                        expected: expected.to_string(),
                        found: format!("{} in dimension {}", o.coll.over(r), g.dim(r)),
                    });
                    continue;
                }
                if n > 0 {
                    for side in [Side::Source, Side::Target] {
                        let (fa, fr) = match side {
                            Side::Source => (g.src(a), g.src(r)),
                            Side::Target => (g.tgt(a), g.tgt(r)),
                        };
                        let fl: Vec<CellIx> = if t.height() < n {
                            label.clone()
                        } else {
                            let tr = t.truncate(n - 1).expect("below height");
                            let e = if side == Side::Source { tr.src_embed } else { tr.tgt_embed };
                            e.iter().map(|&c| label[c]).collect()
                        };
                        match o.mult(fa.unwrap(), &fl) {
                            Some(m) if Some(m) == fr => {}
                            None if !o.complete_fibers => {}
                            _ => rep.violations.push(OperadViolation::NotGlobular {
                                op: g.id(a).into(),
                                label: ids(&label),
                                side,
                            }),
                        }
                    }
                }
                if t.cell_count() > nest_bound || expected.cell_count() > nest_bound {
                    continue;
                }
                // associativity: mult(mult(a, f), h) = mult(a, c ↦ mult(f(c), h∘leg_c))
                for h in HomSearch::new(expected.gset(), g).collect() {
                    let Some(left) = o.mult(r, &h) else { continue };
                    let inner: Option<Vec<CellIx>> = label
                        .iter()
                        .zip(&legs)
                        .map(|(&f, leg)| {
                            let hc: Vec<CellIx> = leg.iter().map(|&k| h[k]).collect();
                            o.mult(f, &hc)
                        })
                        .collect();
                    let Some(inner) = inner else { continue };
                    let Some(right) = o.mult(a, &inner) else { continue };
                    rep.triples += 1;
                    if left != right {
                        rep.violations.push(OperadViolation::Associativity {
                            op: g.id(a).into(),
                            label: ids(&label),
                            outer: ids(&h),
                        });
                    }
                }
            }
            if o.mult(a, &o.unit_labelling(a)) != Some(a) {
                rep.violations.push(OperadViolation::RightUnit { cell: g.id(a).into() });
            }
            if n <= o.trunc_dim() && o.mult(o.units[n], &globe_label(g, a)) != Some(a) {
                rep.violations.push(OperadViolation::LeftUnit { cell: g.id(a).into() });
            }
            rep
        })
        .collect();
    let mut out = OperadReport::default();
    for r in per_op {
        out.violations.extend(r.violations);
        out.products += r.products;
        out.undefined += r.undefined;
        out.triples += r.triples;
    }
    out
}

/// Verdict of the lifting property in one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimVerdict {
    pub dim: usize,
    pub squares: usize,
    /// Unfilled squares, least first.
    pub witnesses: Vec<Square>,
    /// Fibers are complete, so the verdict is not only within the bound.
    pub exact: bool,
}

impl DimVerdict {
    pub fn holds(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contractibility {
    pub dims: Vec<DimVerdict>,
}

impl Contractibility {
    pub fn holds(&self) -> bool {
        self.dims.iter().all(DimVerdict::holds)
    }

    pub fn first_failure(&self) -> Option<&DimVerdict> {
        self.dims.iter().find(|d| !d.holds())
    }
}

/// All squares of dimension `n` against `∂n̄ → n̄` over trees within the bound.
pub fn squares(o: &OperadData, n: usize) -> Vec<Square> {
    let g = o.total();
    let trees: Vec<Tree> = enumerate_trees(o.tree_bound())
        .into_iter()
        .filter(|t| t.height() <= n)
        .collect();
    if n == 0 {
        return trees
            .into_iter()
            .map(|tree| Square {
                dim: 0,
                tree,
                src: None,
                tgt: None,
            })
            .collect();
    }
    // (n-1)-operations grouped by arity and, above dimension 1, boundary
    let mut groups: HashMap<(Tree, Option<CellIx>, Option<CellIx>), Vec<CellIx>> = HashMap::new();
    for c in g.cells_of_dim(n - 1) {
        groups
            .entry((o.coll.over(c).clone(), g.src(c), g.tgt(c)))
            .or_default()
            .push(c);
    }
    let mut out = Vec::new();
    for tree in trees {
        let face = tree.truncate_or_self(n - 1);
        let mut keys: Vec<_> = groups.keys().filter(|k| k.0 == face).cloned().collect();
        keys.sort();
        for k in keys {
            let cells = &groups[&k];
            for &a in cells {
                for &b in cells {
                    out.push(Square {
                        dim: n,
                        tree: tree.clone(),
                        src: Some(a),
                        tgt: Some(b),
                    });
                }
            }
        }
    }
    out.sort();
    out
}

/// The lifting property against the sphere inclusions, dimension by dimension
/// up to `max_dim`.
pub fn is_contractible(o: &OperadData, max_dim: usize) -> Result<Contractibility> {
    if max_dim > o.trunc_dim() {
        return Err(Error::DimensionExceeded {
            requested: max_dim,
            limit: o.trunc_dim(),
        });
    }
    let g = o.total();
    let dims = (0..=max_dim)
        .map(|n| {
            let filled: HashSet<(Tree, Option<CellIx>, Option<CellIx>)> = g
                .cells_of_dim(n)
                .map(|c| (o.coll.over(c).clone(), g.src(c), g.tgt(c)))
                .collect();
            let sq = squares(o, n);
            let witnesses: Vec<Square> = sq
                .par_iter()
                .filter(|s| !filled.contains(&(s.tree.clone(), s.src, s.tgt)))
                .cloned()
                .collect();
            DimVerdict {
                dim: n,
                squares: sq.len(),
                witnesses,
                exact: o.complete_fibers,
            }
        })
        .collect();
    Ok(Contractibility { dims })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    Arity { expected: usize, found: usize },
    NotGlobular(String),
    OverNotPreserved { cell: String },
    UnitNotPreserved { dim: usize },
    MultNotPreserved { op: String, label: Vec<String> },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Arity { expected, found } => write!(f, "map assigns {found} of {expected} operations"),
            Self::NotGlobular(m) => write!(f, "not a globular map: {m}"),
            Self::OverNotPreserved { cell } => write!(f, "over not preserved at {cell}"),
            Self::UnitNotPreserved { dim } => write!(f, "unit {dim} not preserved"),
            Self::MultNotPreserved { op, label } => {
                write!(f, "product of {op} with [{}] not preserved", label.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct MorphismReport {
    pub violations: Vec<MorphismViolation>,
    pub products: usize,
    /// Products whose image falls outside the target's truncation.
    pub not_evaluated: usize,
}

impl MorphismReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `phi` (operations of `a` ↦ operations of `b`) is a morphism
/// of operads: globular, over ω, and preserving units and products.
pub fn operad_morphism_check(phi: &[CellIx], a: &OperadData, b: &OperadData) -> MorphismReport {
    let mut rep = MorphismReport::default();
    let (ga, gb) = (a.total(), b.total());
    if phi.len() != ga.len() || phi.iter().any(|&p| p >= gb.len()) {
        rep.violations.push(MorphismViolation::Arity {
            expected: ga.len(),
            found: phi.len(),
        });
        return rep;
    }
    if let Err(e) = check_assignment(ga, gb, phi) {
        rep.violations.push(MorphismViolation::NotGlobular(e.to_string()));
    }
    for x in ga.canonical_order() {
        if b.coll.over(phi[x]) != a.coll.over(x) {
            rep.violations.push(MorphismViolation::OverNotPreserved { cell: ga.id(x).into() });
        }
    }
    for n in 0..=a.trunc_dim().min(b.trunc_dim()) {
        if phi[a.units[n]] != b.units[n] {
            rep.violations.push(MorphismViolation::UnitNotPreserved { dim: n });
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    let parts: Vec<MorphismReport> = ga
        .canonical_order()
        .par_iter()
        .map(|&x| {
            let mut r = MorphismReport::default();
            for label in a.coll.labellings(x) {
                let Some(m) = a.mult(x, &label) else { continue };
                r.products += 1;
                let img: Vec<CellIx> = label.iter().map(|&l| phi[l]).collect();
                match b.mult(phi[x], &img) {
                    Some(bm) if bm == phi[m] => {}
                    Some(_) => r.violations.push(MorphismViolation::MultNotPreserved {
                        op: ga.id(x).into(),
                        label: label.iter().map(|&l| ga.id(l).to_owned()).collect(),
                    }),
                    None => r.not_evaluated += 1,
                }
            }
            r
        })
        .collect();
    for p in parts {
        rep.violations.extend(p.violations);
        rep.products += p.products;
        rep.not_evaluated += p.not_evaluated;
    }
    rep
}

/// How an algebra evaluates an operation on a labelling of its arity tree.
#[derive(Clone, Debug)]
pub enum Structure {
    /// Keyed by operation and labelling.
    Table(HashMap<(CellIx, Vec<CellIx>), CellIx>),
    /// Only units act, returning the label of the top cell. Every globular
    /// set is such an algebra over the initial operad.
    Units,
    /// The free algebra `A(t)`: the carrier is the applied graph.
    Free(Arc<Applied>),
}

/// An algebra over an operad, truncated at the operad's dimension.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub operad: Arc<OperadData>,
    pub carrier: Arc<GlobularSet>,
    pub structure: Structure,
}

impl Algebra {
    /// The free algebra on a tree. Labellings of trees into a tree are
    /// injective, so arity trees of at most `|t|` cells exhaust it.
    pub fn free(o: Arc<OperadData>, t: &Tree) -> Result<Algebra> {
        let d = o.trunc_dim();
        let applied = apply(&o, t.gset(), d, t.cell_count().min(o.tree_bound()))?;
        Ok(Algebra {
            operad: o,
            carrier: applied.gset.clone(),
            structure: Structure::Free(Arc::new(applied)),
        })
    }

    pub fn trivial(o: Arc<OperadData>, x: GlobularSet) -> Algebra {
        Algebra {
            operad: o,
            carrier: Arc::new(x),
            structure: Structure::Units,
        }
    }

    /// The action on operation `a` with `label` mapping its arity tree into
    /// the carrier; `None` outside the stored truncation.
    pub fn act(&self, a: CellIx, label: &[CellIx]) -> Option<CellIx> {
        let o = &self.operad;
        match &self.structure {
            Structure::Table(t) => t.get(&(a, label.to_vec())).copied(),
            Structure::Units => {
                let n = o.coll.dim(a);
                if o.units.get(n) != Some(&a) {
                    return None;
                }
                Some(label[n])
            }
            Structure::Free(applied) => {
                let parts: Vec<&(CellIx, FreeCell)> = label.iter().map(|&l| &applied.cells[l]).collect();
                let ops: Vec<CellIx> = parts.iter().map(|p| p.0).collect();
                let m = o.mult(a, &ops)?;
                let nested = NestedCell {
                    shape: o.coll.over(a).clone(),
                    dim: o.coll.dim(a),
                    inner: parts.iter().map(|p| p.1.clone()).collect(),
                };
                let fc = multiply_unchecked(&nested, None).ok()?;
                applied.index.get(&(m, fc)).copied()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraViolation {
    Unit { cell: String },
    Undefined { op: String, label: Vec<String> },
    NotGlobular { op: String, label: Vec<String> },
    Multiplication { op: String, label: Vec<String> },
}

impl fmt::Display for AlgebraViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unit { cell } => write!(f, "unit does not act trivially on {cell}"),
            Self::Undefined { op, label } => write!(f, "{op} is undefined on [{}]", label.join(",")),
            Self::NotGlobular { op, label } => {
                write!(f, "{op} on [{}] does not commute with faces", label.join(","))
            }
            Self::Multiplication { op, label } => {
                write!(f, "multiplication axiom fails for {op} on [{}]", label.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AlgebraReport {
    pub violations: Vec<AlgebraViolation>,
    pub actions: usize,
    pub composites: usize,
}

impl AlgebraReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Eilenberg–Moore axioms within arity trees of at most `bound` cells; the
/// multiplication axiom uses outer trees of at most `nest_bound` cells.
pub fn algebra_check(alg: &Algebra, bound: usize, nest_bound: usize) -> Result<AlgebraReport> {
    let o = &alg.operad;
    let x = &*alg.carrier;
    let d = o.trunc_dim().min(x.max_dim().unwrap_or(0));
    let mut rep = AlgebraReport::default();
    let ids = |l: &[CellIx]| l.iter().map(|&c| x.id(c).to_owned()).collect::<Vec<_>>();
    for c in x.canonical_order() {
        let n = x.dim(c);
        if n > o.trunc_dim() {
            continue;
        }
        if alg.act(o.units[n], &globe_label(x, c)) != Some(c) {
            rep.violations.push(AlgebraViolation::Unit { cell: x.id(c).into() });
        }
    }
    let applied = apply(o, x, d, bound)?;
    let total = o.total();
    for (a, fc) in &applied.cells {
        rep.actions += 1;
        let Some(r) = alg.act(*a, &fc.label) else {
            rep.violations.push(AlgebraViolation::Undefined {
                op: total.id(*a).into(),
                label: ids(&fc.label),
            });
            continue;
        };
        let mut ok = x.dim(r) == fc.dim;
        if ok && fc.dim > 0 {
            for side in [Side::Source, Side::Target] {
                let (fa, fr) = match side {
                    Side::Source => (total.src(*a), x.src(r)),
                    Side::Target => (total.tgt(*a), x.tgt(r)),
                };
                let ff = crate::freecat::face(fc, side)?;
                ok &= alg.act(fa.unwrap(), &ff.label) == fr;
            }
        }
        if !ok {
            rep.violations.push(AlgebraViolation::NotGlobular {
                op: total.id(*a).into(),
                label: ids(&fc.label),
            });
        }
    }
    // act ∘ A(act) = act ∘ μ on elements of A(A(x))
    for b in total.canonical_order() {
        let t = o.coll.over(b);
        if t.cell_count() > nest_bound {
            continue;
        }
        for g in HomSearch::new(t.gset(), &applied.gset).collect() {
            let parts: Vec<&(CellIx, FreeCell)> = g.iter().map(|&k| &applied.cells[k]).collect();
            let inner: Option<Vec<CellIx>> = parts.iter().map(|(a, fc)| alg.act(*a, &fc.label)).collect();
            let Some(inner) = inner else { continue };
            let Some(left) = alg.act(b, &inner) else { continue };
            let ops: Vec<CellIx> = parts.iter().map(|p| p.0).collect();
            let Some(m) = o.mult(b, &ops) else { continue };
            let nested = NestedCell {
                shape: t.clone(),
                dim: total.dim(b),
                inner: parts.iter().map(|p| p.1.clone()).collect(),
            };
            let Ok(fc) = multiply_unchecked(&nested, Some(bound)) else { continue };
            let Some(right) = alg.act(m, &fc.label) else { continue };
            rep.composites += 1;
            if left != right {
                rep.violations.push(AlgebraViolation::Multiplication {
                    op: total.id(b).into(),
                    label: g.iter().map(|&k| applied.gset.id(k).to_owned()).collect(),
                });
            }
        }
    }
    Ok(rep)
}
