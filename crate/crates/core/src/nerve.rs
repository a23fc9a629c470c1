//! Presheaves on the truncated category `Θ_A`, nerves of algebras, the Segal
//! and boundary conditions, and categories of elements.
//!
//! A morphism `S → T` of `Θ_A` is a map of free algebras `A(S) → A(T)`, stored
//! as its restriction to generators: a globular map `S → A(T)`. Every check
//! below computes limits as explicit sets of compatible families.
//!
//! The Segal limit at `T` is indexed by the category of globes over `T` with
//! all maps of `Θ₀` between them; these enter `Θ_A` through the units.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freecat::{multiply_unchecked, unit, FreeCell, NestedCell};
use crate::globset::{CellIx, HomSearch};
use crate::operad::{apply, Algebra, OperadData};
use crate::tree::{enumerate_trees, subtrees, tree_homs, Tree};

/// A morphism `source → target` of `Θ_A`: per cell of the source, an
/// operation and a labelling of its arity tree in the target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaMorphism {
    pub source: Tree,
    pub target: Tree,
    pub cells: Vec<(CellIx, FreeCell)>,
}

impl ThetaMorphism {
    /// The image of a tree morphism under `Θ₀ → Θ_A`.
    pub fn from_tree_map(o: &OperadData, s: &Tree, t: &Tree, assign: &[CellIx]) -> ThetaMorphism {
        let tg = t.gset();
        ThetaMorphism {
            source: s.clone(),
            target: t.clone(),
            cells: assign
                .iter()
                .map(|&j| (o.units[tg.dim(j)], unit(tg, j)))
                .collect(),
        }
    }

    pub fn identity(o: &OperadData, t: &Tree) -> ThetaMorphism {
        let id: Vec<CellIx> = (0..t.cell_count()).collect();
        Self::from_tree_map(o, t, t, &id)
    }

    /// `next ∘ self`.
    pub fn then(&self, o: &OperadData, next: &ThetaMorphism) -> Result<ThetaMorphism> {
        let total = o.total();
        let cells = self
            .cells
            .iter()
            .map(|(a, fc)| {
                let parts: Vec<&(CellIx, FreeCell)> = fc.label.iter().map(|&l| &next.cells[l]).collect();
                let ops: Vec<CellIx> = parts.iter().map(|p| p.0).collect();
                let m = o.mult(*a, &ops).ok_or_else(|| {
                    Error::InconsistentOperad(format!("product of `{}` falls outside the truncation", total.id(*a)))
                })?;
                let nested = NestedCell {
                    shape: fc.shape.clone(),
                    dim: fc.dim,
                    inner: parts.iter().map(|p| p.1.clone()).collect(),
                };
                Ok((m, multiply_unchecked(&nested, None)?))
            })
            .collect::<Result<_>>()?;
        Ok(ThetaMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            cells,
        })
    }

    pub fn display(&self, o: &OperadData) -> String {
        let tg = self.target.gset();
        let parts: Vec<String> = self
            .cells
            .iter()
            .map(|(a, fc)| format!("{}:{}", o.total().id(*a), fc.display(tg)))
            .collect();
        format!("{}->{} {{{}}}", self.source, self.target, parts.join(" "))
    }
}

/// `Hom_{Θ_A}(s, t)`: globular maps `s → A(t)`. Arity trees labelled in a
/// tree are subtrees of it, so the applied graph is computed exactly.
pub fn theta_homs(o: &OperadData, s: &Tree, t: &Tree) -> Result<Vec<ThetaMorphism>> {
    let applied = apply(o, t.gset(), s.height(), t.cell_count().min(o.tree_bound()))?;
    Ok(HomSearch::new(s.gset(), &applied.gset)
        .collect()
        .into_iter()
        .map(|a| ThetaMorphism {
            source: s.clone(),
            target: t.clone(),
            cells: a.iter().map(|&k| applied.cells[k].clone()).collect(),
        })
        .collect())
}

/// `Θ_A` restricted to a finite list of trees, with all hom-sets.
#[derive(Clone, Debug)]
pub struct Theta {
    pub operad: Arc<OperadData>,
    pub trees: Vec<Tree>,
    homs: Vec<Vec<Vec<ThetaMorphism>>>,
    index: Vec<Vec<HashMap<ThetaMorphism, usize>>>,
}

impl Theta {
    pub fn new(o: Arc<OperadData>, trees: &[Tree]) -> Result<Theta> {
        let homs: Vec<Vec<Vec<ThetaMorphism>>> = trees
            .par_iter()
            .map(|s| trees.iter().map(|t| theta_homs(&o, s, t)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let index = homs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|hs| hs.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect())
                    .collect()
            })
            .collect();
        Ok(Theta {
            operad: o,
            trees: trees.to_vec(),
            homs,
            index,
        })
    }

    pub fn homs(&self, s: usize, t: usize) -> &[ThetaMorphism] {
        &self.homs[s][t]
    }

    pub fn position(&self, s: usize, t: usize, m: &ThetaMorphism) -> Option<usize> {
        self.index[s][t].get(m).copied()
    }

    pub fn morphism_count(&self) -> usize {
        self.homs.iter().flatten().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug)]
enum Action {
    Table(HashMap<ThetaMorphism, Vec<usize>>),
    Nerve {
        algebra: Arc<Algebra>,
        elems: Vec<Vec<Vec<CellIx>>>,
        index: Vec<HashMap<Vec<CellIx>, usize>>,
    },
    Representable {
        elems: Vec<Vec<ThetaMorphism>>,
        index: Vec<HashMap<ThetaMorphism, usize>>,
    },
}

/// A presheaf on `Θ_A` restricted to finitely many trees. Elements are
/// numbered per tree and carry display names.
#[derive(Clone, Debug)]
pub struct CellularSet {
    pub operad: Arc<OperadData>,
    pub trees: Vec<Tree>,
    pub values: Vec<Vec<String>>,
    tree_ix: HashMap<Tree, usize>,
    action: Action,
}

fn bounded_trees(o: &OperadData, max_cells: usize) -> Vec<Tree> {
    enumerate_trees(max_cells)
        .into_iter()
        .filter(|t| t.height() <= o.trunc_dim())
        .collect()
}

fn index_of<T: Clone + Eq + std::hash::Hash>(items: &[T]) -> HashMap<T, usize> {
    items.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect()
}

impl CellularSet {
    fn assemble(o: Arc<OperadData>, trees: Vec<Tree>, values: Vec<Vec<String>>, action: Action) -> CellularSet {
        let tree_ix = index_of(&trees);
        CellularSet {
            operad: o,
            trees,
            values,
            tree_ix,
            action,
        }
    }

    /// A presheaf given by explicit restriction tables: for a morphism
    /// `S → T`, entry `e` of its table is the restriction of element `e` of
    /// `T`.
    pub fn tabulated(
        o: Arc<OperadData>,
        trees: Vec<Tree>,
        values: Vec<Vec<String>>,
        table: HashMap<ThetaMorphism, Vec<usize>>,
    ) -> Result<CellularSet> {
        if values.len() != trees.len() {
            return Err(Error::Format("one value list per tree is required".into()));
        }
        let tree_ix = index_of(&trees);
        for (m, row) in &table {
            let (Some(&s), Some(&t)) = (tree_ix.get(&m.source), tree_ix.get(&m.target)) else {
                return Err(Error::Format(format!("morphism between unlisted trees {}", m.display(&o))));
            };
            if row.len() != values[t].len() || row.iter().any(|&e| e >= values[s].len()) {
                return Err(Error::Format(format!("restriction table of {} has the wrong shape", m.display(&o))));
            }
        }
        Ok(Self::assemble(o, trees, values, Action::Table(table)))
    }

    pub fn tree_index(&self, t: &Tree) -> Option<usize> {
        self.tree_ix.get(t).copied()
    }

    pub fn value_count(&self, t: &Tree) -> Option<usize> {
        self.tree_index(t).map(|i| self.values[i].len())
    }

    /// Restriction of element `e` of `m.target` along `m`.
    pub fn act(&self, m: &ThetaMorphism, e: usize) -> Result<usize> {
        let missing = || Error::MissingAction(m.display(&self.operad));
        let s = self.tree_index(&m.source).ok_or_else(missing)?;
        let t = self.tree_index(&m.target).ok_or_else(missing)?;
        if e >= self.values[t].len() {
            return Err(Error::BadIndex(e));
        }
        match &self.action {
            Action::Table(table) => table.get(m).map(|row| row[e]).ok_or_else(missing),
            Action::Nerve { algebra, elems, index } => {
                let phi = &elems[t][e];
                let img: Option<Vec<CellIx>> = m
                    .cells
                    .iter()
                    .map(|(a, fc)| {
                        let label: Vec<CellIx> = fc.label.iter().map(|&l| phi[l]).collect();
                        algebra.act(*a, &label)
                    })
                    .collect();
                img.and_then(|img| index[s].get(&img).copied()).ok_or_else(missing)
            }
            Action::Representable { elems, index } => {
                let composite = m.then(&self.operad, &elems[t][e])?;
                index[s].get(&composite).copied().ok_or_else(missing)
            }
        }
    }

    /// The restriction table of `m`.
    pub fn table(&self, m: &ThetaMorphism) -> Result<Vec<usize>> {
        let t = self
            .tree_index(&m.target)
            .ok_or_else(|| Error::MissingAction(m.display(&self.operad)))?;
        (0..self.values[t].len()).map(|e| self.act(m, e)).collect()
    }

    /// The same presheaf with every restriction tabulated.
    pub fn tabulate(&self, theta: &Theta) -> Result<CellularSet> {
        let mut table = HashMap::new();
        for s in 0..theta.trees.len() {
            for t in 0..theta.trees.len() {
                for m in theta.homs(s, t) {
                    table.insert(m.clone(), self.table(m)?);
                }
            }
        }
        CellularSet::tabulated(self.operad.clone(), self.trees.clone(), self.values.clone(), table)
    }

    /// Adds a copy `name` of element `like` at tree `t`: it restricts like
    /// `like` along every morphism, except that it is its own restriction
    /// wherever `like` is. The result is again a presheaf, but at `t` two
    /// elements now share all restrictions to smaller trees.
    pub fn with_duplicate(&self, theta: &Theta, t: &Tree, like: usize, name: &str) -> Result<CellularSet> {
        let ti = self
            .tree_index(t)
            .ok_or_else(|| Error::Format(format!("tree {t} is not in the presheaf")))?;
        let base = self.tabulate(theta)?;
        let Action::Table(mut table) = base.action else {
            unreachable!()
        };
        let extra = self.values[ti].len();
        for (m, row) in table.iter_mut() {
            let src_is_t = m.source == *t;
            if m.target == *t {
                let r = row[like];
                row.push(if src_is_t && r == like { extra } else { r });
            }
        }
        let mut values = self.values.clone();
        values[ti].push(name.to_owned());
        CellularSet::tabulated(self.operad.clone(), self.trees.clone(), values, table)
    }
}

/// `T ↦ Hom_{Alg}(A(T), C) = Hom(T, C)` on trees with at most `max_cells`
/// cells.
pub fn nerve_of_algebra(alg: Arc<Algebra>, max_cells: usize) -> Result<CellularSet> {
    let trees = bounded_trees(&alg.operad, max_cells);
    let carrier = &*alg.carrier;
    let elems: Vec<Vec<Vec<CellIx>>> = trees
        .iter()
        .map(|t| HomSearch::new(t.gset(), carrier).collect())
        .collect();
    let values = elems
        .iter()
        .map(|es| {
            es.iter()
                .map(|phi| {
                    let ids: Vec<&str> = phi.iter().map(|&c| carrier.id(c)).collect();
                    format!("[{}]", ids.join(","))
                })
                .collect()
        })
        .collect();
    let index = elems.iter().map(|es| index_of(es)).collect();
    Ok(CellularSet::assemble(
        alg.operad.clone(),
        trees,
        values,
        Action::Nerve {
            algebra: alg,
            elems,
            index,
        },
    ))
}

/// The representable presheaf `Θ_A[t]` on trees with at most `max_cells` cells.
pub fn representable(o: Arc<OperadData>, t: &Tree, max_cells: usize) -> Result<CellularSet> {
    let trees = bounded_trees(&o, max_cells);
    let elems: Vec<Vec<ThetaMorphism>> = trees
        .iter()
        .map(|s| theta_homs(&o, s, t))
        .collect::<Result<_>>()?;
    let values = elems
        .iter()
        .map(|es| es.iter().map(|m| m.display(&o)).collect())
        .collect();
    let index = elems.iter().map(|es| index_of(es)).collect();
    Ok(CellularSet::assemble(o, trees, values, Action::Representable { elems, index }))
}

/// Failure of the comparison map from the value at a tree to a limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitWitness {
    /// Two elements with the same compatible family.
    NonInjective { first: String, second: String },
    /// A compatible family that no element restricts to, as `object = element`.
    NonSurjective { family: Vec<String> },
}

impl fmt::Display for LimitWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonInjective { first, second } => {
                write!(f, "elements {first} and {second} have the same restrictions")
            }
            Self::NonSurjective { family } => {
                write!(f, "no element restricts to the family {{{}}}", family.join("; "))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LimitCheck {
    pub tree: Tree,
    /// `false` when some tree of the diagram lies outside the presheaf.
    pub evaluated: bool,
    pub elements: usize,
    pub families: usize,
    pub witness: Option<LimitWitness>,
}

impl LimitCheck {
    /// `None` when not evaluated.
    pub fn verdict(&self) -> Option<bool> {
        self.evaluated.then_some(self.witness.is_none())
    }

    fn not_evaluated(t: &Tree) -> LimitCheck {
        LimitCheck {
            tree: t.clone(),
            evaluated: false,
            elements: 0,
            families: 0,
            witness: None,
        }
    }
}

/// A finite diagram over `t`: objects are trees with a leg into `t`, arrows
/// `(from, to, m)` are morphisms `tree(from) → tree(to)` over `t`.
struct IndexDiagram {
    objects: Vec<Tree>,
    names: Vec<String>,
    legs: Vec<ThetaMorphism>,
    arrows: Vec<(usize, usize, ThetaMorphism)>,
}

/// Compatible families of `x` over the diagram, by backtracking with
/// propagation along the arrows.
fn compatible_families(x: &CellularSet, d: &IndexDiagram) -> Result<Vec<Vec<usize>>> {
    let n = d.objects.len();
    let sizes: Vec<usize> = d
        .objects
        .iter()
        .map(|t| x.value_count(t).expect("checked by caller"))
        .collect();
    let tables: Vec<Vec<usize>> = d.arrows.iter().map(|(_, _, m)| x.table(m)).collect::<Result<_>>()?;
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, (from, to, _)) in d.arrows.iter().enumerate() {
        into[*to].push(k);
        out_of[*from].push(k);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&o| (std::cmp::Reverse(d.objects[o].cell_count()), o));

    struct Search<'a> {
        arrows: &'a [(usize, usize, ThetaMorphism)],
        tables: &'a [Vec<usize>],
        into: &'a [Vec<usize>],
        out_of: &'a [Vec<usize>],
        order: &'a [usize],
        sizes: &'a [usize],
        assign: Vec<Option<usize>>,
        found: Vec<Vec<usize>>,
    }
    impl Search<'_> {
        /// Assigns and propagates; returns the objects set, or `None` on conflict
        /// (after undoing).
        fn set(&mut self, obj: usize, v: usize) -> Option<Vec<usize>> {
            let mut done = Vec::new();
            let mut stack = vec![(obj, v)];
            while let Some((o, v)) = stack.pop() {
                match self.assign[o] {
                    Some(w) if w == v => continue,
                    Some(_) => {
                        self.undo(&done);
                        return None;
                    }
                    None => {}
                }
                self.assign[o] = Some(v);
                done.push(o);
                for &k in &self.into[o] {
                    stack.push((self.arrows[k].0, self.tables[k][v]));
                }
                for &k in &self.out_of[o] {
                    let to = self.arrows[k].1;
                    if let Some(w) = self.assign[to] {
                        if self.tables[k][w] != v {
                            self.undo(&done);
                            return None;
                        }
                    }
                }
            }
            Some(done)
        }

        fn undo(&mut self, done: &[usize]) {
            for &o in done {
                self.assign[o] = None;
            }
        }

        fn go(&mut self, k: usize) {
            if k == self.order.len() {
                self.found.push(self.assign.iter().map(|v| v.unwrap()).collect());
                return;
            }
            let obj = self.order[k];
            if self.assign[obj].is_some() {
                self.go(k + 1);
                return;
            }
            for v in 0..self.sizes[obj] {
                if let Some(done) = self.set(obj, v) {
                    self.go(k + 1);
                    self.undo(&done);
                }
            }
        }
    }
    let mut s = Search {
        arrows: &d.arrows,
        tables: &tables,
        into: &into,
        out_of: &out_of,
        order: &order,
        sizes: &sizes,
        assign: vec![None; n],
        found: Vec::new(),
    };
    s.go(0);
    let mut found = s.found;
    found.sort();
    Ok(found)
}

fn compare_with_limit(x: &CellularSet, t: &Tree, d: &IndexDiagram) -> Result<LimitCheck> {
    let Some(ti) = x.tree_index(t) else {
        return Ok(LimitCheck::not_evaluated(t));
    };
    if d.objects.iter().any(|o| x.tree_index(o).is_none()) {
        return Ok(LimitCheck::not_evaluated(t));
    }
    let families = compatible_families(x, d)?;
    let legs: Vec<Vec<usize>> = d.legs.iter().map(|m| x.table(m)).collect::<Result<_>>()?;
    let elements = x.values[ti].len();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut witness = None;
    for e in 0..elements {
        let fam: Vec<usize> = legs.iter().map(|leg| leg[e]).collect();
        if let Some(&first) = seen.get(&fam) {
            witness.get_or_insert(LimitWitness::NonInjective {
                first: x.values[ti][first].clone(),
                second: x.values[ti][e].clone(),
            });
        } else {
            seen.insert(fam, e);
        }
    }
    if witness.is_none() {
        if let Some(fam) = families.iter().find(|f| !seen.contains_key(*f)) {
            witness = Some(LimitWitness::NonSurjective {
                family: fam
                    .iter()
                    .enumerate()
                    .map(|(o, &v)| {
                        let oi = x.tree_index(&d.objects[o]).unwrap();
                        format!("{} = {}", d.names[o], x.values[oi][v])
                    })
                    .collect(),
            });
        }
    }
    Ok(LimitCheck {
        tree: t.clone(),
        evaluated: true,
        elements,
        families: families.len(),
        witness,
    })
}

fn compose_assign(u: &[CellIx], g: &[CellIx]) -> Vec<CellIx> {
    u.iter().map(|&c| g[c]).collect()
}

/// Whether the value at `t` is the limit of the values at the globes over `t`.
pub fn segal_check(x: &CellularSet, t: &Tree) -> Result<LimitCheck> {
    let o = &*x.operad;
    let globes: Vec<Tree> = (0..=t.height()).map(Tree::linear).collect();
    let mut objs: Vec<(usize, Vec<CellIx>)> = Vec::new();
    for (n, g) in globes.iter().enumerate() {
        for a in tree_homs(g, t) {
            objs.push((n, a));
        }
    }
    let mut arrows = Vec::new();
    for (i, (m, gi)) in objs.iter().enumerate() {
        for (j, (n, gj)) in objs.iter().enumerate() {
            for u in tree_homs(&globes[*m], &globes[*n]) {
                if compose_assign(&u, gj) == *gi {
                    arrows.push((i, j, ThetaMorphism::from_tree_map(o, &globes[*m], &globes[*n], &u)));
                }
            }
        }
    }
    let d = IndexDiagram {
        objects: objs.iter().map(|(n, _)| globes[*n].clone()).collect(),
        names: objs
            .iter()
            .map(|(n, a)| {
                let ids: Vec<&str> = a.iter().map(|&c| t.gset().id(c)).collect();
                format!("{n}[{}]", ids.join(","))
            })
            .collect(),
        legs: objs
            .iter()
            .map(|(n, a)| ThetaMorphism::from_tree_map(o, &globes[*n], t, a))
            .collect(),
        arrows,
    };
    compare_with_limit(x, t, &d)
}

/// Whether the value at a non-linear `t` is the limit over its proper subtrees.
pub fn boundary_extension_check(x: &CellularSet, t: &Tree) -> Result<LimitCheck> {
    if t.is_linear() {
        return Err(Error::LinearTree(t.to_string()));
    }
    let o = &*x.operad;
    let subs = subtrees(t, true);
    let mut arrows = Vec::new();
    for (i, a) in subs.iter().enumerate() {
        for (j, b) in subs.iter().enumerate() {
            if i == j || !a.mask.iter().zip(&b.mask).all(|(&p, &q)| !p || q) {
                continue;
            }
            let pos: HashMap<CellIx, CellIx> = b.inclusion.iter().enumerate().map(|(k, &c)| (c, k)).collect();
            let incl: Vec<CellIx> = a.inclusion.iter().map(|c| pos[c]).collect();
            arrows.push((i, j, ThetaMorphism::from_tree_map(o, &a.tree, &b.tree, &incl)));
        }
    }
    let d = IndexDiagram {
        objects: subs.iter().map(|s| s.tree.clone()).collect(),
        names: subs
            .iter()
            .map(|s| {
                let ids: Vec<&str> = s.inclusion.iter().map(|&c| t.gset().id(c)).collect();
                format!("{{{}}}", ids.join(","))
            })
            .collect(),
        legs: subs
            .iter()
            .map(|s| ThetaMorphism::from_tree_map(o, &s.tree, t, &s.inclusion))
            .collect(),
        arrows,
    };
    compare_with_limit(x, t, &d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub src: usize,
    pub tgt: usize,
    pub name: String,
}

/// A finite category with an explicit composition table.
#[derive(Clone, Debug, Default)]
pub struct SmallCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    pub identities: Vec<usize>,
    /// `(f, g) ↦ g∘f` for every composable pair.
    pub compose: HashMap<(usize, usize), usize>,
}

impl SmallCategory {
    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&f| self.morphisms[f].src == a && self.morphisms[f].tgt == b)
            .collect()
    }

    /// Violations of the category axioms, empty when there are none.
    pub fn check_axioms(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut by_src: Vec<Vec<usize>> = vec![Vec::new(); self.objects.len()];
        for (f, m) in self.morphisms.iter().enumerate() {
            by_src[m.src].push(f);
        }
        for (x, &i) in self.identities.iter().enumerate() {
            let m = &self.morphisms[i];
            if m.src != x || m.tgt != x {
                out.push(format!("identity of {} has the wrong ends", self.objects[x]));
            }
        }
        for (f, mf) in self.morphisms.iter().enumerate() {
            if self.compose.get(&(self.identities[mf.src], f)) != Some(&f)
                || self.compose.get(&(f, self.identities[mf.tgt])) != Some(&f)
            {
                out.push(format!("unit law fails at {}", mf.name));
            }
            for &g in &by_src[mf.tgt] {
                let Some(&gf) = self.compose.get(&(f, g)) else {
                    out.push(format!("{} then {} is not composed", mf.name, self.morphisms[g].name));
                    continue;
                };
                let mg = &self.morphisms[g];
                if self.morphisms[gf].src != mf.src || self.morphisms[gf].tgt != mg.tgt {
                    out.push(format!("{} then {} has the wrong ends", mf.name, mg.name));
                }
                for &h in &by_src[mg.tgt] {
                    let l = self.compose.get(&(gf, h));
                    let r = self.compose.get(&(g, h)).and_then(|&hg| self.compose.get(&(f, hg)));
                    if l.is_none() || l != r {
                        out.push(format!("associativity fails at {}, {}, {}", mf.name, mg.name, self.morphisms[h].name));
                    }
                }
            }
        }
        out
    }

    /// Graphviz rendering of objects and non-identity morphisms.
    pub fn to_dot(&self) -> String {
        let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut s = String::from("digraph C {\n");
        for (i, o) in self.objects.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", esc(o)));
        }
        for (f, m) in self.morphisms.iter().enumerate() {
            if self.identities[m.src] == f {
                continue;
            }
            s.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", m.src, m.tgt, esc(&m.name)));
        }
        s.push_str("}\n");
        s
    }
}

/// The category of elements with its projection to trees.
#[derive(Clone, Debug)]
pub struct Elements {
    pub category: SmallCategory,
    /// Object ↦ index of its tree in the presheaf.
    pub projection: Vec<usize>,
}

/// Objects `(T, s)` with `s ∈ X(T)`; morphisms `(T, u^*s') → (T', s')` for
/// `u: T → T'` in `Θ_A`.
pub fn category_of_elements(x: &CellularSet, theta: &Theta) -> Result<Elements> {
    let o = &*x.operad;
    let nt = x.trees.len();
    if theta.trees != x.trees {
        return Err(Error::Format("the hom-sets were computed for other trees".into()));
    }
    let mut obj_of: Vec<Vec<usize>> = Vec::with_capacity(nt);
    let mut cat = SmallCategory::default();
    let mut projection = Vec::new();
    for (i, t) in x.trees.iter().enumerate() {
        obj_of.push(Vec::new());
        for name in &x.values[i] {
            obj_of[i].push(cat.objects.len());
            cat.objects.push(format!("{t}:{name}"));
            projection.push(i);
        }
    }
    // morphism (s, t, k, e) with k indexing hom(s, t) and e an element at t
    let mut mor_ix: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
    for s in 0..nt {
        for t in 0..nt {
            for (k, m) in theta.homs(s, t).iter().enumerate() {
                let table = x.table(m)?;
                for (e, &r) in table.iter().enumerate() {
                    mor_ix.insert((s, t, k, e), cat.morphisms.len());
                    cat.morphisms.push(Morphism {
                        src: obj_of[s][r],
                        tgt: obj_of[t][e],
                        name: format!("{}->{}#{k}|{}", x.trees[s], x.trees[t], x.values[t][e]),
                    });
                }
            }
        }
    }
    for t in 0..nt {
        let k = theta
            .position(t, t, &ThetaMorphism::identity(o, &x.trees[t]))
            .ok_or_else(|| Error::MissingAction(format!("identity of {}", x.trees[t])))?;
        for e in 0..x.values[t].len() {
            cat.identities.push(mor_ix[&(t, t, k, e)]);
        }
    }
    let mut keys: Vec<(usize, usize, usize, usize)> = mor_ix.keys().copied().collect();
    keys.sort();
    let mut by_tgt: HashMap<usize, Vec<(usize, usize, usize, usize)>> = HashMap::new();
    for &key in &keys {
        by_tgt.entry(cat.morphisms[mor_ix[&key]].tgt).or_default().push(key);
    }
    let mut composed: HashMap<(usize, usize, usize, usize, usize), usize> = HashMap::new();
    for &(t, u, k2, e) in &keys {
        let g = mor_ix[&(t, u, k2, e)];
        let src_g = cat.morphisms[g].src;
        for &(s, _, k1, e1) in by_tgt.get(&src_g).map(Vec::as_slice).unwrap_or(&[]) {
            let f = mor_ix[&(s, t, k1, e1)];
            let k3 = match composed.get(&(s, t, u, k1, k2)) {
                Some(&k3) => k3,
                None => {
                    let c = theta.homs(s, t)[k1].then(o, &theta.homs(t, u)[k2])?;
                    let k3 = theta
                        .position(s, u, &c)
                        .ok_or_else(|| Error::MissingAction(c.display(o)))?;
                    composed.insert((s, t, u, k1, k2), k3);
                    k3
                }
            };
            cat.compose.insert((f, g), mor_ix[&(s, u, k3, e)]);
        }
    }
    Ok(Elements {
        category: cat,
        projection,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexStats {
    /// Non-degenerate simplices per dimension, up to the requested dimension.
    pub simplex_counts: Vec<u128>,
    pub euler: i128,
    /// No non-degenerate simplex exists above the requested dimension.
    pub exact: bool,
    pub terminal: Option<usize>,
}

/// Simplex counts of the nerve (chains of composable non-identity
/// morphisms), the Euler characteristic and a terminal object if any.
pub fn nerve_complex_stats(c: &SmallCategory, max_simplex_dim: usize) -> ComplexStats {
    let n = c.objects.len();
    let non_id: Vec<&Morphism> = c
        .morphisms
        .iter()
        .enumerate()
        .filter(|(f, m)| c.identities[m.src] != *f)
        .map(|(_, m)| m)
        .collect();
    let mut ending = vec![1u128; n];
    let mut counts = vec![n as u128];
    for _ in 0..=max_simplex_dim {
        let mut next = vec![0u128; n];
        for m in &non_id {
            next[m.tgt] = next[m.tgt].saturating_add(ending[m.src]);
        }
        counts.push(next.iter().fold(0u128, |a, &b| a.saturating_add(b)));
        ending = next;
    }
    let beyond = counts.pop().unwrap_or(0);
    counts.truncate(max_simplex_dim + 1);
    let euler = counts
        .iter()
        .enumerate()
        .map(|(k, &v)| if k % 2 == 0 { v as i128 } else { -(v as i128) })
        .sum();
    let mut hom_count = vec![vec![0usize; n]; n];
    for m in &c.morphisms {
        hom_count[m.src][m.tgt] += 1;
    }
    let terminal = (0..n).find(|&y| (0..n).all(|x| hom_count[x][y] == 1));
    ComplexStats {
        simplex_counts: counts,
        euler,
        exact: beyond == 0,
        terminal,
    }
}

/// All natural transformations `x → y` of presheaves on the trees of `theta`,
/// as components `[tree][element of x] = element of y`.
pub fn natural_transformations(x: &CellularSet, y: &CellularSet, theta: &Theta) -> Result<Vec<Vec<Vec<usize>>>> {
    if x.trees != y.trees || theta.trees != x.trees {
        return Err(Error::Format("presheaves over different trees".into()));
    }
    let nt = x.trees.len();
    let mut var_of: Vec<Vec<usize>> = Vec::new();
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for t in 0..nt {
        var_of.push((0..x.values[t].len()).map(|e| vars.len() + e).collect());
        vars.extend((0..x.values[t].len()).map(|e| (t, e)));
    }
    // constraint: α(lhs) = ytable[rhs value]; lhs = restriction in x
    struct Con {
        lhs: usize,
        rhs: usize,
        ytable: usize,
    }
    let mut ytables: Vec<Vec<usize>> = Vec::new();
    let mut cons: Vec<Con> = Vec::new();
    for s in 0..nt {
        for t in 0..nt {
            for m in theta.homs(s, t) {
                let xt = x.table(m)?;
                let yt = y.table(m)?;
                let k = ytables.len();
                ytables.push(yt);
                for (e, &r) in xt.iter().enumerate() {
                    cons.push(Con {
                        lhs: var_of[s][r],
                        rhs: var_of[t][e],
                        ytable: k,
                    });
                }
            }
        }
    }
    let mut as_rhs: Vec<Vec<usize>> = vec![Vec::new(); vars.len()];
    let mut as_lhs: Vec<Vec<usize>> = vec![Vec::new(); vars.len()];
    for (k, c) in cons.iter().enumerate() {
        as_rhs[c.rhs].push(k);
        as_lhs[c.lhs].push(k);
    }
    let mut order: Vec<usize> = (0..vars.len()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(x.trees[vars[v].0].cell_count()), v));

    struct Search<'a> {
        cons: &'a [Con],
        ytables: &'a [Vec<usize>],
        as_rhs: &'a [Vec<usize>],
        as_lhs: &'a [Vec<usize>],
        order: &'a [usize],
        range: Vec<usize>,
        assign: Vec<Option<usize>>,
        found: Vec<Vec<usize>>,
    }
    impl Search<'_> {
        fn set(&mut self, var: usize, v: usize) -> Option<Vec<usize>> {
            let mut done = Vec::new();
            let mut stack = vec![(var, v)];
            while let Some((var, v)) = stack.pop() {
                match self.assign[var] {
                    Some(w) if w == v => continue,
                    Some(_) => {
                        self.undo(&done);
                        return None;
                    }
                    None => {}
                }
                self.assign[var] = Some(v);
                done.push(var);
                for &k in &self.as_rhs[var] {
                    let c = &self.cons[k];
                    stack.push((c.lhs, self.ytables[c.ytable][v]));
                }
                for &k in &self.as_lhs[var] {
                    let c = &self.cons[k];
                    if let Some(w) = self.assign[c.rhs] {
                        if self.ytables[c.ytable][w] != v {
                            self.undo(&done);
                            return None;
                        }
                    }
                }
            }
            Some(done)
        }

        fn undo(&mut self, done: &[usize]) {
            for &v in done {
                self.assign[v] = None;
            }
        }

        fn go(&mut self, k: usize) {
            if k == self.order.len() {
                self.found.push(self.assign.iter().map(|v| v.unwrap()).collect());
                return;
            }
            let var = self.order[k];
            if self.assign[var].is_some() {
                self.go(k + 1);
                return;
            }
            for v in 0..self.range[var] {
                if let Some(done) = self.set(var, v) {
                    self.go(k + 1);
                    self.undo(&done);
                }
            }
        }
    }
    let mut s = Search {
        cons: &cons,
        ytables: &ytables,
        as_rhs: &as_rhs,
        as_lhs: &as_lhs,
        order: &order,
        range: vars.iter().map(|&(t, _)| y.values[t].len()).collect(),
        assign: vec![None; vars.len()],
        found: Vec::new(),
    };
    s.go(0);
    let mut out: Vec<Vec<Vec<usize>>> = s
        .found
        .into_iter()
        .map(|flat| var_of.iter().map(|vs| vs.iter().map(|&v| flat[v]).collect()).collect())
        .collect();
    out.sort();
    Ok(out)
}

/// The natural transformation `N(h)` induced by an algebra map `h`, for nerves
/// built by [`nerve_of_algebra`].
pub fn nerve_map(x: &CellularSet, y: &CellularSet, h: &[CellIx]) -> Result<Vec<Vec<usize>>> {
    let (
        Action::Nerve { elems: xe, .. },
        Action::Nerve { index: yi, .. },
    ) = (&x.action, &y.action)
    else {
        return Err(Error::Format("nerve_map needs two nerves".into()));
    };
    xe.iter()
        .enumerate()
        .map(|(t, es)| {
            es.iter()
                .map(|phi| {
                    let img: Vec<CellIx> = phi.iter().map(|&c| h[c]).collect();
                    yi[t]
                        .get(&img)
                        .copied()
                        .ok_or_else(|| Error::InvalidMap("image is not an element".into()))
                })
                .collect()
        })
        .collect()
}

/// Globular maps between carriers that commute with the actions on all
/// elements of `A(C)` with arity trees of at most `bound` cells.
pub fn algebra_homs(c: &Algebra, d: &Algebra, bound: usize) -> Result<Vec<Vec<CellIx>>> {
    let o = &c.operad;
    let dim = o.trunc_dim().min(c.carrier.max_dim().unwrap_or(0));
    let applied = apply(o, &c.carrier, dim, bound)?;
    let acts: Vec<(CellIx, CellIx, &[CellIx])> = applied
        .cells
        .iter()
        .filter_map(|(a, fc)| c.act(*a, &fc.label).map(|r| (r, *a, fc.label.as_slice())))
        .collect();
    let candidates = HomSearch::new(&c.carrier, &d.carrier).collect();
    Ok(candidates
        .into_par_iter()
        .filter(|h| {
            acts.iter().all(|&(r, a, label)| {
                let img: Vec<CellIx> = label.iter().map(|&l| h[l]).collect();
                d.act(a, &img) == Some(h[r])
            })
        })
        .collect())
}

/// Data for the fullness comparison `Hom_Alg(C, D) → Hom(N C, N D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fullness {
    pub algebra_maps: usize,
    pub natural_transformations: usize,
    /// `N` is injective on the algebra maps and hits every transformation.
    pub bijective: bool,
}

pub fn nerve_fullness(c: Arc<Algebra>, d: Arc<Algebra>, max_cells: usize) -> Result<Fullness> {
    let bound = max_cells.min(c.operad.tree_bound());
    let maps = algebra_homs(&c, &d, bound)?;
    let nc = nerve_of_algebra(c, max_cells)?;
    let nd = nerve_of_algebra(d, max_cells)?;
    let theta = Theta::new(nc.operad.clone(), &nc.trees)?;
    let nats = natural_transformations(&nc, &nd, &theta)?;
    let mut images: Vec<Vec<Vec<usize>>> = maps.iter().map(|h| nerve_map(&nc, &nd, h)).collect::<Result<_>>()?;
    images.sort();
    let distinct = images.windows(2).all(|w| w[0] != w[1]);
    Ok(Fullness {
        algebra_maps: maps.len(),
        natural_transformations: nats.len(),
        bijective: distinct && images == nats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecat::{theta_hom, OperadTag};
    use crate::globset::GlobularSet;
    use crate::operad::{builtin, Builtin};

    fn terminal(d: usize, b: usize) -> Arc<OperadData> {
        Arc::new(builtin(Builtin::Terminal, d, b).unwrap())
    }

    fn initial(d: usize, b: usize) -> Arc<OperadData> {
        Arc::new(builtin(Builtin::Initial, d, b).unwrap())
    }

    #[test]
    fn theta_homs_match_freecat() {
        let t = terminal(2, 7);
        let i = initial(2, 7);
        for s in enumerate_trees(5) {
            for u in enumerate_trees(5) {
                assert_eq!(
                    theta_homs(&t, &s, &u).unwrap().len(),
                    theta_hom(OperadTag::Terminal, &s, &u).len()
                );
                assert_eq!(
                    theta_homs(&i, &s, &u).unwrap().len(),
                    theta_hom(OperadTag::Initial, &s, &u).len()
                );
            }
        }
    }

    #[test]
    fn nerve_of_free_algebra_values() {
        let t = terminal(2, 5);
        let free = Arc::new(Algebra::free(t.clone(), &Tree::star(2)).unwrap());
        let n = nerve_of_algebra(free, 5).unwrap();
        assert_eq!(n.value_count(&Tree::linear(1)), Some(6));
        assert_eq!(n.value_count(&Tree::point()), Some(3));
        // functoriality on every composable pair between trees of ≤ 5 cells
        let theta = Theta::new(t.clone(), &n.trees).unwrap();
        let k = n.trees.len();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for f in theta.homs(a, b) {
                        for g in theta.homs(b, c) {
                            let gf = f.then(&t, g).unwrap();
                            for e in 0..n.values[c].len() {
                                let lhs = n.act(&gf, e).unwrap();
                                let rhs = n.act(f, n.act(g, e).unwrap()).unwrap();
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
            let id = ThetaMorphism::identity(&t, &n.trees[a]);
            for e in 0..n.values[a].len() {
                assert_eq!(n.act(&id, e).unwrap(), e);
            }
        }
    }

    #[test]
    fn segal_on_nerves_and_representables() {
        let t = terminal(2, 5);
        let free = Arc::new(Algebra::free(t.clone(), &Tree::star(2)).unwrap());
        let n = nerve_of_algebra(free, 5).unwrap();
        for tr in n.trees.clone() {
            assert_eq!(segal_check(&n, &tr).unwrap().verdict(), Some(true), "{tr}");
        }
        let i = initial(2, 5);
        let r = representable(i.clone(), &Tree::star(2), 5).unwrap();
        assert_eq!(segal_check(&r, &Tree::star(2)).unwrap().verdict(), Some(true));

        let theta = Theta::new(i.clone(), &r.trees).unwrap();
        let bad = r.with_duplicate(&theta, &Tree::star(2), 0, "extra").unwrap();
        let c = segal_check(&bad, &Tree::star(2)).unwrap();
        assert_eq!(c.verdict(), Some(false));
        assert!(matches!(c.witness, Some(LimitWitness::NonInjective { ref second, .. }) if second == "extra"));
        let b = boundary_extension_check(&bad, &Tree::star(2)).unwrap();
        assert_eq!(b.verdict(), Some(false));
    }

    #[test]
    fn boundary_examples() {
        let t = terminal(2, 5);
        let free = Arc::new(Algebra::free(t, &Tree::star(2)).unwrap());
        let n = nerve_of_algebra(free, 5).unwrap();
        assert_eq!(boundary_extension_check(&n, &Tree::star(2)).unwrap().verdict(), Some(true));
        assert!(matches!(
            boundary_extension_check(&n, &Tree::linear(1)),
            Err(Error::LinearTree(_))
        ));
        let i = initial(1, 7);
        let x = Arc::new(Algebra::trivial(i, GlobularSet::path(3)));
        let n = nerve_of_algebra(x, 7).unwrap();
        assert_eq!(boundary_extension_check(&n, &Tree::star(3)).unwrap().verdict(), Some(true));
    }

    #[test]
    fn elements_of_representables() {
        let i = initial(2, 5);
        let r = representable(i.clone(), &Tree::point(), 1).unwrap();
        let theta = Theta::new(i.clone(), &r.trees).unwrap();
        let el = category_of_elements(&r, &theta).unwrap();
        assert_eq!(el.category.objects.len(), 1);
        assert_eq!(el.category.morphisms.len(), 1);

        // the slice over 1̄: s, t, id and the two inclusions
        let r = representable(i.clone(), &Tree::linear(1), 3).unwrap();
        let theta = Theta::new(i.clone(), &r.trees).unwrap();
        let el = category_of_elements(&r, &theta).unwrap();
        assert!(el.category.check_axioms().is_empty());
        assert_eq!(el.category.objects.len(), 3);
        assert_eq!(el.category.morphisms.len(), 5);
        let st = nerve_complex_stats(&el.category, 3);
        assert_eq!(st.simplex_counts, vec![3, 2, 0, 0]);
        assert_eq!((st.euler, st.exact), (1, true));
        assert!(st.terminal.is_some());
    }

    #[test]
    fn stats_of_tiny_categories() {
        let mut c = SmallCategory {
            objects: vec!["a".into()],
            morphisms: vec![Morphism { src: 0, tgt: 0, name: "id".into() }],
            identities: vec![0],
            compose: HashMap::new(),
        };
        c.compose.insert((0, 0), 0);
        let st = nerve_complex_stats(&c, 2);
        assert_eq!((st.simplex_counts[0], st.euler, st.terminal), (1, 1, Some(0)));
        c.objects.push("b".into());
        c.morphisms.push(Morphism { src: 1, tgt: 1, name: "id".into() });
        c.identities.push(1);
        c.compose.insert((1, 1), 1);
        let st = nerve_complex_stats(&c, 2);
        assert_eq!((st.euler, st.terminal), (2, None));
        assert!(c.to_dot().contains("n1 [label=\"b\"]"));
    }

    #[test]
    fn fullness_on_a_small_pair() {
        let t = terminal(1, 3);
        let a = Arc::new(Algebra::free(t.clone(), &Tree::linear(1)).unwrap());
        let b = Arc::new(Algebra::free(t, &Tree::linear(1)).unwrap());
        let f = nerve_fullness(a, b, 3).unwrap();
        assert!(f.bijective, "{f:?}");
        assert_eq!(f.algebra_maps, 3);
    }
}
