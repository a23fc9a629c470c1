//! Finite globular sets (ω-graphs), their morphisms, finite colimits and the
//! preorder generated by `src(x) ≤ x ≤ tgt(x)`.
//!
//! Cells are stored in insertion order and addressed by [`CellIx`]. Every cell
//! of positive dimension carries exactly one source and one target; the maps
//! of the globe category are generated by these two, so nothing is lost.
//! The canonical cell order is `(dim, insertion index)` and all enumeration
//! output follows it.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type CellIx = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    pub src: Option<CellIx>,
    pub tgt: Option<CellIx>,
}

/// A cell record whose faces are referenced by id, as found in `gset-json`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellRecord {
    pub id: String,
    pub dim: usize,
    pub src: Option<String>,
    pub tgt: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct GlobularSet {
    cells: Vec<Cell>,
    by_id: HashMap<String, CellIx>,
}

impl PartialEq for GlobularSet {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}
impl Eq for GlobularSet {}

impl GlobularSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a cell. Faces are referenced by index and must already exist.
    pub fn add(
        &mut self,
        id: impl Into<String>,
        dim: usize,
        src: Option<CellIx>,
        tgt: Option<CellIx>,
    ) -> Result<CellIx> {
        let id = id.into();
        if self.by_id.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        for f in [src, tgt].into_iter().flatten() {
            if f >= self.cells.len() {
                return Err(Error::BadIndex(f));
            }
        }
        let ix = self.cells.len();
        self.by_id.insert(id.clone(), ix);
        self.cells.push(Cell { id, dim, src, tgt });
        Ok(ix)
    }

    /// Builds a globular set from id-referencing records, in record order.
    /// Records may reference cells that appear later in the list.
    pub fn from_records(records: &[CellRecord]) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if by_id.insert(r.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        let resolve = |f: &Option<String>| -> Result<Option<CellIx>> {
            match f {
                None => Ok(None),
                Some(id) => by_id
                    .get(id)
                    .copied()
                    .map(Some)
                    .ok_or_else(|| Error::UnknownId(id.clone())),
            }
        };
        let mut cells = Vec::with_capacity(records.len());
        for r in records {
            cells.push(Cell {
                id: r.id.clone(),
                dim: r.dim,
                src: resolve(&r.src)?,
                tgt: resolve(&r.tgt)?,
            });
        }
        Ok(Self { cells, by_id })
    }

    /// Trusted constructor for internally generated cell lists.
    pub(crate) fn from_cells(cells: Vec<Cell>) -> Self {
        let by_id = cells.iter().enumerate().map(|(i, c)| (c.id.clone(), i)).collect();
        Self { cells, by_id }
    }

    pub fn records(&self) -> Vec<CellRecord> {
        self.cells
            .iter()
            .map(|c| CellRecord {
                id: c.id.clone(),
                dim: c.dim,
                src: c.src.map(|s| self.cells[s].id.clone()),
                tgt: c.tgt.map(|t| self.cells[t].id.clone()),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, ix: CellIx) -> &Cell {
        &self.cells[ix]
    }

    pub fn dim(&self, ix: CellIx) -> usize {
        self.cells[ix].dim
    }

    pub fn src(&self, ix: CellIx) -> Option<CellIx> {
        self.cells[ix].src
    }

    pub fn tgt(&self, ix: CellIx) -> Option<CellIx> {
        self.cells[ix].tgt
    }

    pub fn id(&self, ix: CellIx) -> &str {
        &self.cells[ix].id
    }

    pub fn index_of(&self, id: &str) -> Option<CellIx> {
        self.by_id.get(id).copied()
    }

    /// Largest cell dimension, `None` for the empty set.
    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn cells_of_dim(&self, dim: usize) -> impl Iterator<Item = CellIx> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.dim == dim)
            .map(|(i, _)| i)
    }

    pub fn count_of_dim(&self, dim: usize) -> usize {
        self.cells.iter().filter(|c| c.dim == dim).count()
    }

    /// Cell indices sorted by `(dim, insertion index)`.
    pub fn canonical_order(&self) -> Vec<CellIx> {
        let mut order: Vec<CellIx> = (0..self.cells.len()).collect();
        order.sort_by_key(|&i| (self.cells[i].dim, i));
        order
    }

    /// Iterated face: `side` applied `times` times.
    pub fn face_iter(&self, mut ix: CellIx, side: Side, times: usize) -> CellIx {
        for _ in 0..times {
            ix = match side {
                Side::Source => self.cells[ix].src,
                Side::Target => self.cells[ix].tgt,
            }
            .expect("face of a 0-cell");
        }
        ix
    }

    pub fn validate(&self) -> Report {
        let mut violations = Vec::new();
        for c in &self.cells {
            let faces_present = c.src.is_some() && c.tgt.is_some();
            let faces_absent = c.src.is_none() && c.tgt.is_none();
            if (c.dim == 0 && !faces_absent) || (c.dim > 0 && !faces_present) {
                violations.push(Violation::FacePresence { cell: c.id.clone() });
                continue;
            }
            if c.dim == 0 {
                continue;
            }
            let (s, t) = (c.src.unwrap(), c.tgt.unwrap());
            if self.cells[s].dim + 1 != c.dim || self.cells[t].dim + 1 != c.dim {
                violations.push(Violation::FaceDimension { cell: c.id.clone() });
                continue;
            }
            if c.dim >= 2 {
                let (ss, st) = (self.cells[s].src, self.cells[t].src);
                let (ts, tt) = (self.cells[s].tgt, self.cells[t].tgt);
                if ss != st {
                    violations.push(Violation::SourceIdentity { cell: c.id.clone() });
                }
                if ts != tt {
                    violations.push(Violation::TargetIdentity { cell: c.id.clone() });
                }
            }
        }
        Report { violations }
    }

    /// The representable globe: two cells in each dimension below `n`, one in `n`.
    pub fn globe(n: usize) -> Self {
        let mut g = Self::new();
        let mut below: Option<(CellIx, CellIx)> = None;
        for k in 0..n {
            let (s, t) = match below {
                None => (None, None),
                Some((s, t)) => (Some(s), Some(t)),
            };
            let a = g.add(format!("s{k}"), k, s, t).unwrap();
            let b = g.add(format!("t{k}"), k, s, t).unwrap();
            below = Some((a, b));
        }
        let (s, t) = match below {
            None => (None, None),
            Some((s, t)) => (Some(s), Some(t)),
        };
        g.add(format!("c{n}"), n, s, t).unwrap();
        g
    }

    /// The boundary of the `n`-globe together with its inclusion into `globe(n)`.
    pub fn sphere(n: usize) -> (Self, GlobularMap) {
        let globe = Self::globe(n);
        let mut sphere = Self::new();
        for c in globe.cells.iter().filter(|c| c.dim < n) {
            sphere.add(c.id.clone(), c.dim, c.src, c.tgt).unwrap();
        }
        let assign = (0..sphere.len()).collect();
        let incl = GlobularMap::new(Arc::new(sphere.clone()), Arc::new(globe), assign);
        (sphere, incl)
    }

    /// `k` composable edges `v0 → v1 → … → vk`.
    pub fn path(k: usize) -> Self {
        let mut g = Self::new();
        let mut prev = g.add("v0", 0, None, None).unwrap();
        for i in 1..=k {
            let v = g.add(format!("v{i}"), 0, None, None).unwrap();
            g.add(format!("e{i}"), 1, Some(prev), Some(v)).unwrap();
            prev = v;
        }
        g
    }

    /// The terminal ω-graph truncated at dimension `d`: one cell per dimension.
    pub fn terminal(d: usize) -> Self {
        let mut g = Self::new();
        let mut prev = None;
        for k in 0..=d {
            let ix = g.add(format!("*{k}"), k, prev, prev).unwrap();
            prev = Some(ix);
        }
        g
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let mut g = Self::new();
        for c in &self.cells {
            g.add(format!("0.{}", c.id), c.dim, c.src, c.tgt).unwrap();
        }
        let off = self.len();
        for c in &other.cells {
            g.add(
                format!("1.{}", c.id),
                c.dim,
                c.src.map(|s| s + off),
                c.tgt.map(|t| t + off),
            )
            .unwrap();
        }
        g
    }

    /// The sub-globular set on the cells where `keep` holds, which must be
    /// closed under faces. Returns the subset and its inclusion assignment.
    pub fn restrict(&self, keep: &[bool]) -> Result<(Self, Vec<CellIx>)> {
        let mut renum = vec![usize::MAX; self.len()];
        let mut sub = Self::new();
        let mut incl = Vec::new();
        for i in self.canonical_order() {
            if !keep[i] {
                continue;
            }
            let c = &self.cells[i];
            let map_face = |f: Option<CellIx>| -> Result<Option<CellIx>> {
                match f {
                    None => Ok(None),
                    Some(f) if renum[f] == usize::MAX => Err(Error::InvalidMap(format!(
                        "subset not closed under faces at `{}`",
                        c.id
                    ))),
                    Some(f) => Ok(Some(renum[f])),
                }
            };
            let (s, t) = (map_face(c.src)?, map_face(c.tgt)?);
            renum[i] = sub.add(c.id.clone(), c.dim, s, t)?;
            incl.push(i);
        }
        Ok((sub, incl))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Source,
    Target,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Source => "source",
            Side::Target => "target",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    FacePresence { cell: String },
    FaceDimension { cell: String },
    SourceIdentity { cell: String },
    TargetIdentity { cell: String },
}

impl Violation {
    pub fn cell(&self) -> &str {
        match self {
            Violation::FacePresence { cell }
            | Violation::FaceDimension { cell }
            | Violation::SourceIdentity { cell }
            | Violation::TargetIdentity { cell } => cell,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FacePresence { cell } => {
                write!(f, "`{cell}`: faces must be absent exactly in dimension 0")
            }
            Violation::FaceDimension { cell } => {
                write!(f, "`{cell}`: faces must have dimension one less")
            }
            Violation::SourceIdentity { cell } => {
                write!(f, "`{cell}`: src(src) differs from src(tgt)")
            }
            Violation::TargetIdentity { cell } => {
                write!(f, "`{cell}`: tgt(tgt) differs from tgt(src)")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A morphism of globular sets, stored as a cell-index assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobularMap {
    pub source: Arc<GlobularSet>,
    pub target: Arc<GlobularSet>,
    pub assign: Vec<CellIx>,
}

impl GlobularMap {
    pub fn new(source: Arc<GlobularSet>, target: Arc<GlobularSet>, assign: Vec<CellIx>) -> Self {
        Self {
            source,
            target,
            assign,
        }
    }

    pub fn identity(g: Arc<GlobularSet>) -> Self {
        let assign = (0..g.len()).collect();
        Self::new(g.clone(), g, assign)
    }

    pub fn apply(&self, ix: CellIx) -> CellIx {
        self.assign[ix]
    }

    pub fn check(&self) -> Result<()> {
        check_assignment(&self.source, &self.target, &self.assign)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GlobularMap) -> GlobularMap {
        let assign = self.assign.iter().map(|&i| other.assign[i]).collect();
        GlobularMap::new(self.source.clone(), other.target.clone(), assign)
    }

    pub fn is_mono(&self) -> bool {
        is_injective(&self.assign, self.target.len())
    }

    pub fn is_iso(&self) -> bool {
        self.source.len() == self.target.len() && self.is_mono() && self.check().is_ok()
    }

    /// Assignment keyed by cell ids.
    pub fn id_assignment(&self) -> Vec<(String, String)> {
        self.assign
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.source.id(i).to_owned(), self.target.id(j).to_owned()))
            .collect()
    }
}

pub(crate) fn is_injective(assign: &[CellIx], target_len: usize) -> bool {
    let mut seen = vec![false; target_len];
    assign.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
}

pub fn check_assignment(x: &GlobularSet, y: &GlobularSet, assign: &[CellIx]) -> Result<()> {
    if assign.len() != x.len() {
        return Err(Error::InvalidMap(format!(
            "assignment covers {} of {} cells",
            assign.len(),
            x.len()
        )));
    }
    for (i, c) in x.cells.iter().enumerate() {
        let j = assign[i];
        if j >= y.len() {
            return Err(Error::BadIndex(j));
        }
        let d = &y.cells[j];
        if d.dim != c.dim {
            return Err(Error::InvalidMap(format!(
                "`{}` (dim {}) sent to `{}` (dim {})",
                c.id, c.dim, d.id, d.dim
            )));
        }
        if c.src.map(|s| assign[s]) != d.src || c.tgt.map(|t| assign[t]) != d.tgt {
            return Err(Error::InvalidMap(format!(
                "`{}` ↦ `{}` does not commute with faces",
                c.id, d.id
            )));
        }
    }
    Ok(())
}

/// Backtracking search over globular maps `x → y`, in lexicographic order of
/// assignments under the canonical cell orders of both sides.
pub struct HomSearch<'a> {
    x: &'a GlobularSet,
    order: Vec<CellIx>,
    by_dim: Vec<Vec<CellIx>>,
    by_faces: HashMap<(CellIx, CellIx), Vec<CellIx>>,
    fixed: Vec<Option<CellIx>>,
}

impl<'a> HomSearch<'a> {
    pub fn new(x: &'a GlobularSet, y: &'a GlobularSet) -> Self {
        let top = y.max_dim().map_or(0, |d| d + 1);
        let mut by_dim = vec![Vec::new(); top];
        let mut by_faces: HashMap<(CellIx, CellIx), Vec<CellIx>> = HashMap::new();
        for j in y.canonical_order() {
            let c = y.cell(j);
            by_dim[c.dim].push(j);
            if let (Some(s), Some(t)) = (c.src, c.tgt) {
                by_faces.entry((s, t)).or_default().push(j);
            }
        }
        Self {
            x,
            order: x.canonical_order(),
            by_dim,
            by_faces,
            fixed: vec![None; x.len()],
        }
    }

    /// Restricts the search to maps sending `cell` to `image`.
    pub fn fix(mut self, cell: CellIx, image: CellIx) -> Self {
        self.fixed[cell] = Some(image);
        self
    }

    pub fn for_each<F>(&self, mut visit: F)
    where
        F: FnMut(&[CellIx]) -> ControlFlow<()>,
    {
        let mut assign = vec![usize::MAX; self.x.len()];
        let _ = self.go(0, &mut assign, &mut visit);
    }

    fn go<F>(&self, k: usize, assign: &mut [CellIx], visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[CellIx]) -> ControlFlow<()>,
    {
        if k == self.order.len() {
            return visit(assign);
        }
        let i = self.order[k];
        let c = self.x.cell(i);
        let empty = Vec::new();
        let candidates: &Vec<CellIx> = match (c.src, c.tgt) {
            (Some(s), Some(t)) => self.by_faces.get(&(assign[s], assign[t])).unwrap_or(&empty),
            _ => self.by_dim.get(c.dim).unwrap_or(&empty),
        };
        for &j in candidates {
            if let Some(f) = self.fixed[i] {
                if f != j {
                    continue;
                }
            }
            assign[i] = j;
            self.go(k + 1, assign, visit)?;
        }
        assign[i] = usize::MAX;
        ControlFlow::Continue(())
    }

    pub fn collect(&self) -> Vec<Vec<CellIx>> {
        let mut out = Vec::new();
        self.for_each(|a| {
            out.push(a.to_vec());
            ControlFlow::Continue(())
        });
        out
    }

    pub fn count(&self) -> usize {
        let mut n = 0;
        self.for_each(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    pub fn first(&self) -> Option<Vec<CellIx>> {
        let mut out = None;
        self.for_each(|a| {
            out = Some(a.to_vec());
            ControlFlow::Break(())
        });
        out
    }
}

/// All globular maps `x → y` as raw assignments.
pub fn hom_assignments(x: &GlobularSet, y: &GlobularSet) -> Vec<Vec<CellIx>> {
    HomSearch::new(x, y).collect()
}

/// All globular maps `x → y`, deterministic lexicographic order.
pub fn hom_enumerate(x: &Arc<GlobularSet>, y: &Arc<GlobularSet>) -> Vec<GlobularMap> {
    hom_assignments(x, y)
        .into_iter()
        .map(|a| GlobularMap::new(x.clone(), y.clone(), a))
        .collect()
}

/// Some isomorphism `a → b`, if one exists.
pub fn find_isomorphism(a: &GlobularSet, b: &GlobularSet) -> Option<Vec<CellIx>> {
    if a.len() != b.len() {
        return None;
    }
    let top = a.max_dim().max(b.max_dim()).map_or(0, |d| d + 1);
    for d in 0..top {
        if a.count_of_dim(d) != b.count_of_dim(d) {
            return None;
        }
    }
    let mut found = None;
    HomSearch::new(a, b).for_each(|assign| {
        if is_injective(assign, b.len()) {
            found = Some(assign.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

pub fn is_isomorphic(a: &GlobularSet, b: &GlobularSet) -> bool {
    find_isomorphism(a, b).is_some()
}

/// A finite diagram of globular sets.
#[derive(Clone, Debug, Default)]
pub struct Diagram {
    pub objects: Vec<Arc<GlobularSet>>,
    /// `(from, to, assignment)`.
    pub arrows: Vec<(usize, usize, Vec<CellIx>)>,
}

#[derive(Clone, Debug)]
pub struct Colimit {
    pub apex: GlobularSet,
    /// One leg per object: cell of the object ↦ cell of the apex.
    pub legs: Vec<Vec<CellIx>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller index as root so representatives are the least element
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

/// Levelwise colimit: disjoint union quotiented by the equivalence generated by
/// `c ~ f(c)` for every arrow `f`. Arrows must be globular maps.
pub fn colimit(diagram: &Diagram) -> Colimit {
    // Flatten in (object, canonical cell) order so class roots are least elements.
    let mut offsets = Vec::with_capacity(diagram.objects.len());
    let mut flat: Vec<(usize, CellIx)> = Vec::new();
    let mut pos: Vec<Vec<usize>> = Vec::with_capacity(diagram.objects.len());
    for (o, g) in diagram.objects.iter().enumerate() {
        offsets.push(flat.len());
        let mut p = vec![0; g.len()];
        for i in g.canonical_order() {
            p[i] = flat.len();
            flat.push((o, i));
        }
        pos.push(p);
    }
    let mut uf = UnionFind::new(flat.len());
    for (from, to, assign) in &diagram.arrows {
        for (i, &j) in assign.iter().enumerate() {
            uf.union(pos[*from][i], pos[*to][j]);
        }
    }
    let prefix = diagram.objects.len() > 1;
    let mut roots: Vec<usize> = (0..flat.len()).filter(|&k| uf.find(k) == k).collect();
    roots.sort_by_key(|&k| {
        let (o, i) = flat[k];
        (diagram.objects[o].dim(i), k)
    });
    let mut class_ix = vec![usize::MAX; flat.len()];
    let mut apex = GlobularSet::new();
    for &r in &roots {
        let (o, i) = flat[r];
        let c = diagram.objects[o].cell(i);
        let face = |f: Option<CellIx>, uf: &mut UnionFind| f.map(|f| class_ix[uf.find(pos[o][f])]);
        let s = face(c.src, &mut uf);
        let t = face(c.tgt, &mut uf);
        let id = if prefix {
            format!("{o}.{}", c.id)
        } else {
            c.id.clone()
        };
        class_ix[r] = apex.add(id, c.dim, s, t).expect("colimit class");
    }
    let legs = diagram
        .objects
        .iter()
        .enumerate()
        .map(|(o, g)| {
            (0..g.len())
                .map(|i| class_ix[uf.find(pos[o][i])])
                .collect()
        })
        .collect();
    Colimit { apex, legs }
}

/// Reflexive-transitive closure of `src(x) ≤ x ≤ tgt(x)` on all cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preorder {
    pub carrier: Vec<CellIx>,
    reach: Vec<Vec<u64>>,
}

impl Preorder {
    pub fn le(&self, a: CellIx, b: CellIx) -> bool {
        self.reach[a][b / 64] >> (b % 64) & 1 == 1
    }

    pub fn pairs(&self) -> Vec<(CellIx, CellIx)> {
        let mut out = Vec::new();
        for &a in &self.carrier {
            for &b in &self.carrier {
                if self.le(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_total(&self) -> bool {
        self.carrier.iter().all(|&a| {
            self.carrier
                .iter()
                .all(|&b| a == b || (self.le(a, b) != self.le(b, a)))
        })
    }

    /// The cells sorted ascending, when the order is total.
    pub fn linear_order(&self) -> Option<Vec<CellIx>> {
        if !self.is_total() {
            return None;
        }
        let mut v = self.carrier.clone();
        v.sort_by(|&a, &b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if self.le(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        Some(v)
    }
}

pub fn preorder_closure(g: &GlobularSet) -> Preorder {
    let n = g.len();
    let words = n.div_ceil(64).max(1);
    let mut succ: Vec<Vec<CellIx>> = vec![Vec::new(); n];
    for (i, c) in g.cells().iter().enumerate() {
        if let Some(s) = c.src {
            succ[s].push(i);
        }
        if let Some(t) = c.tgt {
            succ[i].push(t);
        }
    }
    let mut reach = vec![vec![0u64; words]; n];
    for (a, row) in reach.iter_mut().enumerate() {
        let mut stack = vec![a];
        row[a / 64] |= 1 << (a % 64);
        while let Some(v) = stack.pop() {
            for &w in &succ[v] {
                if row[w / 64] >> (w % 64) & 1 == 0 {
                    row[w / 64] |= 1 << (w % 64);
                    stack.push(w);
                }
            }
        }
    }
    Preorder {
        carrier: g.canonical_order(),
        reach,
    }
}
