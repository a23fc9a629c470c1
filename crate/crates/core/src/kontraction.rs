//! The initial operad with contraction `K`, built dimension by dimension
//! inside explicit bounds, and maps from it into contractible operads.
//!
//! Operations of `K` are terms in normal form. A contraction generator is
//! added for every boundary-compatible square, including squares a unit
//! could fill: `K` carries chosen lifts, so `κ` over `1̄` is not `u1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::freecat::{graft, graft_with_legs, TreeOfTrees};
use crate::globset::{CellIx, GlobularSet, HomSearch};
use crate::operad::{operad_morphism_check, Collection, MorphismReport, MultRule, OperadData, Square};
use crate::tree::{enumerate_trees, Tree};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KTerm {
    /// The unit over the globe `n̄`.
    Unit(usize),
    /// A chosen filler over `tau` for the parallel pair `src, tgt`.
    Contraction {
        tau: Tree,
        src: Box<KTerm>,
        tgt: Box<KTerm>,
    },
    /// `outer` with a term on every cell of its arity tree.
    Composite { outer: Box<KTerm>, inner: Vec<KTerm> },
}

fn ill(m: impl Into<String>) -> Error {
    Error::IllFormedTerm(m.into())
}

impl KTerm {
    pub fn dim(&self) -> usize {
        match self {
            Self::Unit(n) => *n,
            Self::Contraction { src, .. } => src.dim() + 1,
            Self::Composite { outer, .. } => outer.dim(),
        }
    }

    /// The arity tree.
    pub fn over(&self) -> Result<Tree> {
        match self {
            Self::Unit(n) => Ok(Tree::linear(*n)),
            Self::Contraction { tau, .. } => Ok(tau.clone()),
            Self::Composite { outer, inner } => graft(&TreeOfTrees {
                outer: outer.over()?,
                inner: inner.iter().map(KTerm::over).collect::<Result<_>>()?,
            }),
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Self::Unit(_) => 1,
            Self::Contraction { src, tgt, .. } => 1 + src.size() + tgt.size(),
            Self::Composite { outer, inner } => 1 + outer.size() + inner.iter().map(KTerm::size).sum::<usize>(),
        }
    }

    /// Normalized source and target, `None` in dimension 0.
    pub fn faces(&self) -> Result<Option<(KTerm, KTerm)>> {
        match self {
            Self::Unit(0) => Ok(None),
            Self::Unit(n) => Ok(Some((Self::Unit(n - 1), Self::Unit(n - 1)))),
            Self::Contraction { src, tgt, .. } => Ok(Some((normalize(src)?, normalize(tgt)?))),
            Self::Composite { outer, inner } => {
                let n = outer.dim();
                let Some((os, ot)) = outer.faces()? else {
                    return Ok(None);
                };
                let t = outer.over()?;
                let (is, it) = if t.height() < n {
                    (inner.clone(), inner.clone())
                } else {
                    let tr = t.truncate(n - 1)?;
                    let pick = |e: &[CellIx]| e.iter().map(|&c| inner[c].clone()).collect::<Vec<_>>();
                    (pick(&tr.src_embed), pick(&tr.tgt_embed))
                };
                let s = normalize(&Self::Composite {
                    outer: Box::new(os),
                    inner: is,
                })?;
                let t = normalize(&Self::Composite {
                    outer: Box::new(ot),
                    inner: it,
                })?;
                Ok(Some((s, t)))
            }
        }
    }

    /// Well-formedness: parallel faces under contractions, globular
    /// labellings under composites.
    pub fn check(&self) -> Result<()> {
        match self {
            Self::Unit(_) => Ok(()),
            Self::Contraction { tau, src, tgt } => {
                src.check()?;
                tgt.check()?;
                check_pair(src, tgt, tau)
            }
            Self::Composite { outer, inner } => {
                outer.check()?;
                let t = outer.over()?;
                let g = t.gset();
                if inner.len() != g.len() {
                    return Err(ill(format!("{} inner terms for {} cells of {t}", inner.len(), g.len())));
                }
                for (c, x) in inner.iter().enumerate() {
                    x.check()?;
                    if x.dim() != g.dim(c) {
                        return Err(ill(format!("inner term {x} sits on a {}-cell", g.dim(c))));
                    }
                    if let (Some((s, u)), Some(gs), Some(gt)) = (x.faces()?, g.src(c), g.tgt(c)) {
                        if s != normalize(&inner[gs])? || u != normalize(&inner[gt])? {
                            return Err(ill(format!("inner labelling is not globular at {x}")));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for KTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unit(n) => write!(f, "u{n}"),
            Self::Contraction { tau, src, tgt } => write!(f, "k{tau}({src},{tgt})"),
            Self::Composite { outer, inner } => {
                write!(f, "{outer}<")?;
                for (i, x) in inner.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(">")
            }
        }
    }
}

fn check_pair(a: &KTerm, b: &KTerm, tau: &Tree) -> Result<()> {
    let n = a.dim() + 1;
    if b.dim() + 1 != n {
        return Err(Error::NonParallel(format!("{a} and {b} differ in dimension")));
    }
    if tau.height() > n {
        return Err(ill(format!("{tau} is too high for a {n}-cell")));
    }
    let face = tau.truncate_or_self(n - 1);
    if a.over()? != face || b.over()? != face {
        return Err(ill(format!("{a} and {b} do not lie over the truncation {face} of {tau}")));
    }
    if a.faces()? != b.faces()? {
        return Err(Error::NonParallel(format!("{a} and {b} have different boundaries")));
    }
    Ok(())
}

/// Flattens composites in outer position and applies the unit laws.
pub fn normalize(t: &KTerm) -> Result<KTerm> {
    match t {
        KTerm::Unit(_) => Ok(t.clone()),
        KTerm::Contraction { tau, src, tgt } => Ok(KTerm::Contraction {
            tau: tau.clone(),
            src: Box::new(normalize(src)?),
            tgt: Box::new(normalize(tgt)?),
        }),
        KTerm::Composite { outer, inner } => {
            let outer = normalize(outer)?;
            let inner: Vec<KTerm> = inner.iter().map(normalize).collect::<Result<_>>()?;
            let g = outer.over()?.gset_arc();
            if inner.len() != g.len() {
                return Err(ill(format!("{} inner terms for {} cells", inner.len(), g.len())));
            }
            match outer {
                KTerm::Unit(n) => {
                    let top = g.cells_of_dim(n).next().ok_or_else(|| ill("unit without a top cell"))?;
                    Ok(inner[top].clone())
                }
                KTerm::Composite { outer: o2, inner: in2 } => {
                    let (_, legs) = graft_with_legs(&TreeOfTrees {
                        outer: o2.over()?,
                        inner: in2.iter().map(KTerm::over).collect::<Result<_>>()?,
                    })?;
                    let merged = in2
                        .iter()
                        .zip(&legs)
                        .map(|(x, leg)| {
                            normalize(&KTerm::Composite {
                                outer: Box::new(x.clone()),
                                inner: leg.iter().map(|&k| inner[k].clone()).collect(),
                            })
                        })
                        .collect::<Result<_>>()?;
                    normalize(&KTerm::Composite { outer: o2, inner: merged })
                }
                outer @ KTerm::Contraction { .. } => {
                    if inner.iter().enumerate().all(|(c, x)| *x == KTerm::Unit(g.dim(c))) {
                        Ok(outer)
                    } else {
                        Ok(KTerm::Composite {
                            outer: Box::new(outer),
                            inner,
                        })
                    }
                }
            }
        }
    }
}

/// The generator filling the square `(a, b)` over `tau`.
pub fn contract_pair(a: &KTerm, b: &KTerm, tau: &Tree) -> Result<KTerm> {
    check_pair(a, b, tau)?;
    Ok(KTerm::Contraction {
        tau: tau.clone(),
        src: Box::new(normalize(a)?),
        tgt: Box::new(normalize(b)?),
    })
}

/// Multiplication of `K`: form the composite, normalize, look it up.
#[derive(Debug)]
struct KMult {
    terms: Vec<KTerm>,
    index: HashMap<KTerm, CellIx>,
}

impl MultRule for KMult {
    fn mult(&self, _coll: &Collection, a: CellIx, label: &[CellIx]) -> Option<CellIx> {
        let t = KTerm::Composite {
            outer: Box::new(self.terms[a].clone()),
            inner: label.iter().map(|&l| self.terms[l].clone()).collect(),
        };
        normalize(&t).ok().and_then(|n| self.index.get(&n).copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InventoryEntry {
    pub dim: usize,
    pub tree: Tree,
    pub units: usize,
    pub generators: usize,
    pub composites: usize,
    pub encodings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrontierReason {
    TermSize,
    TreeBound,
    MissingFace,
}

impl fmt::Display for FrontierReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TermSize => "term size",
            Self::TreeBound => "tree bound",
            Self::MissingFace => "face outside the bound",
        })
    }
}

/// Composites that were not formed, grouped by outer generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierEntry {
    pub dim: usize,
    pub outer: String,
    pub reason: FrontierReason,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct KBuild {
    pub operad: OperadData,
    /// Term of every operation, in cell order.
    pub terms: Vec<KTerm>,
    pub inventory: Vec<InventoryEntry>,
    pub frontier: Vec<FrontierEntry>,
}

impl KBuild {
    pub fn index_of(&self, t: &KTerm) -> Option<CellIx> {
        self.terms.iter().position(|x| x == t)
    }

    pub fn frontier_is_empty(&self) -> bool {
        self.frontier.is_empty()
    }
}

struct Builder {
    g: GlobularSet,
    terms: Vec<KTerm>,
    over: Vec<Tree>,
    index: HashMap<KTerm, CellIx>,
}

impl Builder {
    fn push(&mut self, id: String, t: KTerm, tree: Tree) -> Result<CellIx> {
        let faces = match t.faces()? {
            Some((s, u)) => Some((self.index[&s], self.index[&u])),
            None => None,
        };
        let ix = self.g.add(id, t.dim(), faces.map(|f| f.0), faces.map(|f| f.1))?;
        self.index.insert(t.clone(), ix);
        self.terms.push(t);
        self.over.push(tree);
        Ok(ix)
    }
}

/// `K` truncated at `max_dim`, with arity trees of at most `max_tree_cells`
/// cells and composites of size at most `max_term_size`.
pub fn build_k(max_dim: usize, max_tree_cells: usize, max_term_size: usize) -> Result<KBuild> {
    if max_dim == 0 && max_tree_cells == 0 || max_tree_cells == 0 || max_term_size == 0 {
        return Err(Error::EmptyBounds);
    }
    if max_tree_cells < 2 * max_dim + 1 {
        return Err(Error::TreeBoundExceeded {
            requested: 2 * max_dim + 1,
            limit: max_tree_cells,
        });
    }
    let trees = enumerate_trees(max_tree_cells);
    let mut b = Builder {
        g: GlobularSet::new(),
        terms: Vec::new(),
        over: Vec::new(),
        index: HashMap::new(),
    };
    let mut units = vec![b.push("u0".into(), KTerm::Unit(0), Tree::point())?];
    let mut lifts: HashMap<Square, CellIx> = HashMap::new();
    let mut frontier: Vec<FrontierEntry> = Vec::new();

    for n in 1..=max_dim {
        units.push(b.push(format!("u{n}"), KTerm::Unit(n), Tree::linear(n))?);

        let mut groups: BTreeMap<(Tree, Option<CellIx>, Option<CellIx>), Vec<CellIx>> = BTreeMap::new();
        for c in b.g.cells_of_dim(n - 1) {
            groups
                .entry((b.over[c].clone(), b.g.src(c), b.g.tgt(c)))
                .or_default()
                .push(c);
        }
        let mut squares = Vec::new();
        for tau in trees.iter().filter(|t| t.height() <= n) {
            let face = tau.truncate_or_self(n - 1);
            for ((tree, _, _), cells) in &groups {
                if *tree != face {
                    continue;
                }
                for &x in cells {
                    for &y in cells {
                        squares.push(Square {
                            dim: n,
                            tree: tau.clone(),
                            src: Some(x),
                            tgt: Some(y),
                        });
                    }
                }
            }
        }
        squares.sort();
        let mut generators = Vec::new();
        for (j, sq) in squares.into_iter().enumerate() {
            let t = contract_pair(&b.terms[sq.src.unwrap()], &b.terms[sq.tgt.unwrap()], &sq.tree)?;
            let ix = b.push(format!("k{n}.{j}"), t, sq.tree.clone())?;
            generators.push(ix);
            lifts.insert(sq, ix);
        }

        // close under composites with a generator outside, to a fixpoint
        let mut made = 0;
        loop {
            let mut dropped: BTreeMap<(CellIx, FrontierReason), usize> = BTreeMap::new();
            let mut fresh: Vec<(usize, String, KTerm, Tree)> = Vec::new();
            for &c in &generators {
                let t = b.over[c].clone();
                let base = 1 + b.terms[c].size();
                if base + t.cell_count() > max_term_size {
                    *dropped.entry((c, FrontierReason::TermSize)).or_default() += 1;
                    continue;
                }
                for label in HomSearch::new(t.gset(), &b.g).collect() {
                    if label.iter().enumerate().all(|(k, &l)| l == units[t.gset().dim(k)]) {
                        continue;
                    }
                    let size = base + label.iter().map(|&l| b.terms[l].size()).sum::<usize>();
                    if size > max_term_size {
                        *dropped.entry((c, FrontierReason::TermSize)).or_default() += 1;
                        continue;
                    }
                    let term = normalize(&KTerm::Composite {
                        outer: Box::new(b.terms[c].clone()),
                        inner: label.iter().map(|&l| b.terms[l].clone()).collect(),
                    })?;
                    if b.index.contains_key(&term) || fresh.iter().any(|f| f.2 == term) {
                        continue;
                    }
                    let tree = term.over()?;
                    if tree.cell_count() > max_tree_cells {
                        *dropped.entry((c, FrontierReason::TreeBound)).or_default() += 1;
                        continue;
                    }
                    if let Some((s, u)) = term.faces()? {
                        if !b.index.contains_key(&s) || !b.index.contains_key(&u) {
                            *dropped.entry((c, FrontierReason::MissingFace)).or_default() += 1;
                            continue;
                        }
                    }
                    fresh.push((term.size(), term.to_string(), term, tree));
                }
            }
            if fresh.is_empty() {
                frontier.extend(dropped.into_iter().map(|((c, reason), count)| FrontierEntry {
                    dim: n,
                    outer: b.g.id(c).to_owned(),
                    reason,
                    count,
                }));
                break;
            }
            fresh.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
            for (_, _, term, tree) in fresh {
                b.push(format!("m{n}.{made}"), term, tree)?;
                made += 1;
            }
        }
    }

    let mut inv: BTreeMap<(usize, Tree), InventoryEntry> = BTreeMap::new();
    for (c, t) in b.terms.iter().enumerate() {
        let e = inv.entry((t.dim(), b.over[c].clone())).or_insert_with(|| InventoryEntry {
            dim: t.dim(),
            tree: b.over[c].clone(),
            units: 0,
            generators: 0,
            composites: 0,
            encodings: Vec::new(),
        });
        match t {
            KTerm::Unit(_) => e.units += 1,
            KTerm::Contraction { .. } => e.generators += 1,
            KTerm::Composite { .. } => e.composites += 1,
        }
        e.encodings.push(t.to_string());
    }

    let Builder { g, terms, over, index } = b;
    let coll = Collection::new(g, over, max_dim, max_tree_cells)?;
    let mult = Arc::new(KMult {
        terms: terms.clone(),
        index,
    });
    let mut operad = OperadData::new(coll, units, mult, false)?;
    operad.lifts = Some(lifts);
    Ok(KBuild {
        operad,
        terms,
        inventory: inv.into_values().collect(),
        frontier,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FillerChoice {
    #[default]
    Least,
    Greatest,
}

/// A morphism `K → o` built by induction on cells: units to units,
/// generators to chosen lifts of `o` (or a filler by `choice` when `o` has
/// no chosen lifts), composites to products. Returns the map and its check.
pub fn weak_initial_map(k: &KBuild, o: &OperadData, choice: FillerChoice) -> Result<(Vec<CellIx>, MorphismReport)> {
    if k.operad.trunc_dim() > o.trunc_dim() {
        return Err(Error::DimensionExceeded {
            requested: k.operad.trunc_dim(),
            limit: o.trunc_dim(),
        });
    }
    let kg = k.operad.total();
    let mut phi: Vec<CellIx> = Vec::with_capacity(k.terms.len());
    for (c, t) in k.terms.iter().enumerate() {
        let image = match t {
            KTerm::Unit(n) => o.units[*n],
            KTerm::Contraction { tau, .. } => {
                let sq = Square {
                    dim: t.dim(),
                    tree: tau.clone(),
                    src: kg.src(c).map(|s| phi[s]),
                    tgt: kg.tgt(c).map(|s| phi[s]),
                };
                let chosen = o.lifts.as_ref().and_then(|l| l.get(&sq)).copied();
                let fillers = o.fillers(&sq);
                let picked = match choice {
                    FillerChoice::Least => fillers.first(),
                    FillerChoice::Greatest => fillers.last(),
                };
                chosen
                    .or(picked.copied())
                    .ok_or_else(|| Error::NoFiller(sq.display(o.total())))?
            }
            KTerm::Composite { outer, inner } => {
                let a = k.index_of(outer).ok_or_else(|| ill(format!("outer {outer} is not an operation")))?;
                let label: Vec<CellIx> = inner
                    .iter()
                    .map(|x| k.index_of(x).map(|i| phi[i]))
                    .collect::<Option<_>>()
                    .ok_or_else(|| ill(format!("an inner term of {t} is not an operation")))?;
                o.mult(phi[a], &label).ok_or_else(|| {
                    Error::InconsistentOperad(format!("product for {t} is undefined in the target"))
                })?
            }
        };
        phi.push(image);
    }
    let report = operad_morphism_check(&phi, &k.operad, o);
    Ok((phi, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{builtin, check_operad, doubled_terminal, is_contractible, Builtin, NEST_BOUND};

    fn k1(n: usize) -> KTerm {
        contract_pair(&KTerm::Unit(0), &KTerm::Unit(0), &Tree::star(n)).unwrap()
    }

    #[test]
    fn normal_forms() {
        let x = k1(2);
        let g = Tree::star(2);
        let units: Vec<KTerm> = (0..g.cell_count()).map(|c| KTerm::Unit(g.gset().dim(c))).collect();
        let c = KTerm::Composite {
            outer: Box::new(x.clone()),
            inner: units.clone(),
        };
        assert_eq!(normalize(&c).unwrap(), x);
        let left = KTerm::Composite {
            outer: Box::new(KTerm::Unit(1)),
            inner: vec![KTerm::Unit(0), x.clone(), KTerm::Unit(0)],
        };
        assert_eq!(normalize(&left).unwrap(), x);

        // composite(composite(κ1; κ2); κ1 on both edges) flattens
        let inner1 = KTerm::Composite {
            outer: Box::new(k1(1)),
            inner: vec![KTerm::Unit(0), k1(2), KTerm::Unit(0)],
        };
        assert_eq!(inner1.over().unwrap(), Tree::star(2));
        let nested = KTerm::Composite {
            outer: Box::new(inner1.clone()),
            inner: vec![KTerm::Unit(0), k1(1), KTerm::Unit(0), k1(1), KTerm::Unit(0)],
        };
        let n = normalize(&nested).unwrap();
        assert!(matches!(&n, KTerm::Composite { outer, .. } if **outer == k1(1)));
        assert_eq!(n.over().unwrap(), nested.over().unwrap());
        assert_eq!(normalize(&n).unwrap(), n);
        n.check().unwrap();
    }

    #[test]
    fn contraction_pairs() {
        let k = contract_pair(&KTerm::Unit(0), &KTerm::Unit(0), &Tree::linear(1)).unwrap();
        assert_ne!(k, KTerm::Unit(1));
        assert_eq!(k.faces().unwrap(), Some((KTerm::Unit(0), KTerm::Unit(0))));
        assert!(matches!(
            contract_pair(&KTerm::Unit(1), &k1(2), &Tree::star(2)),
            Err(Error::IllFormedTerm(_))
        ));
        assert!(matches!(
            contract_pair(&KTerm::Unit(0), &KTerm::Unit(1), &Tree::star(2)),
            Err(Error::NonParallel(_))
        ));
        let a = k1(1);
        assert!(contract_pair(&a, &KTerm::Unit(1), &Tree::linear(2)).is_ok());
    }

    #[test]
    fn small_k() {
        let k = build_k(2, 7, 5).unwrap();
        let g = k.operad.total();
        assert_eq!(g.count_of_dim(0), 1);
        assert_eq!(g.count_of_dim(1), 5);
        assert!(is_contractible(&k.operad, 2).unwrap().holds());
        let rep = check_operad(&k.operad, NEST_BOUND);
        assert!(rep.is_ok(), "{:?}", rep.violations.first());

        let t = builtin(Builtin::Terminal, 2, 7).unwrap();
        let (_, r) = weak_initial_map(&k, &t, FillerChoice::Least).unwrap();
        assert!(r.is_ok());
        let d = doubled_terminal(7).unwrap();
        for choice in [FillerChoice::Least, FillerChoice::Greatest] {
            let (_, r) = weak_initial_map(&k, &d, choice).unwrap();
            assert!(r.is_ok(), "{:?}", r.violations.first());
        }
        let (phi, r) = weak_initial_map(&k, &k.operad, FillerChoice::Least).unwrap();
        assert!(r.is_ok());
        assert!(phi.iter().enumerate().all(|(i, &p)| i == p));
    }

    #[test]
    fn composites_appear_with_room() {
        let k = build_k(1, 5, 9).unwrap();
        assert!(k.terms.iter().any(|t| matches!(t, KTerm::Composite { .. })));
        assert!(is_contractible(&k.operad, 1).unwrap().holds());
        let rep = check_operad(&k.operad, NEST_BOUND);
        assert!(rep.is_ok(), "{:?}", rep.violations.first());
        let t = builtin(Builtin::Terminal, 1, 5).unwrap();
        assert!(weak_initial_map(&k, &t, FillerChoice::Least).unwrap().1.is_ok());
    }
}
