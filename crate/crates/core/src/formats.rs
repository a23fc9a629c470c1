//! JSON file formats and their parsers.
//!
//! Serialization is deterministic: cells are written in storage order and
//! every keyed collection is a `BTreeMap`. Parse errors from `serde_json`
//! carry line and column.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::freecat::FreeCell;
use crate::globset::{CellIx, CellRecord, GlobularMap, GlobularSet};
use crate::nerve::{theta_homs, CellularSet, Theta, ThetaMorphism};
use crate::operad::{builtin, Builtin, Collection, MultTable, OperadData, Square};
use crate::tree::{PlanarTree, Tree};

fn fmt_err(what: &str, e: serde_json::Error) -> Error {
    Error::Format(format!("{what}: {e}"))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellJson {
    id: String,
    dim: usize,
    src: Option<String>,
    tgt: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GsetJson {
    cells: Vec<CellJson>,
}

pub fn gset_to_json(g: &GlobularSet) -> String {
    pretty(&GsetJson {
        cells: g
            .records()
            .into_iter()
            .map(|r| CellJson {
                id: r.id,
                dim: r.dim,
                src: r.src,
                tgt: r.tgt,
            })
            .collect(),
    })
}

pub fn gset_from_json(s: &str) -> Result<GlobularSet> {
    let j: GsetJson = serde_json::from_str(s).map_err(|e| fmt_err("gset-json", e))?;
    let records: Vec<CellRecord> = j
        .cells
        .into_iter()
        .map(|c| CellRecord {
            id: c.id,
            dim: c.dim,
            src: c.src,
            tgt: c.tgt,
        })
        .collect();
    GlobularSet::from_records(&records)
}

/// A map file before its endpoints are loaded.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub from: String,
    pub to: String,
    pub assign: BTreeMap<String, String>,
}

pub fn map_file_from_json(s: &str) -> Result<MapFile> {
    serde_json::from_str(s).map_err(|e| fmt_err("map", e))
}

pub fn map_to_json(m: &GlobularMap, from: &str, to: &str) -> String {
    pretty(&MapFile {
        from: from.into(),
        to: to.into(),
        assign: m
            .assign
            .iter()
            .enumerate()
            .map(|(c, &d)| (m.source.id(c).to_owned(), m.target.id(d).to_owned()))
            .collect(),
    })
}

/// Resolves ids against loaded endpoints and checks globularity.
pub fn resolve_map(f: &MapFile, source: Arc<GlobularSet>, target: Arc<GlobularSet>) -> Result<GlobularMap> {
    let mut assign = Vec::with_capacity(source.len());
    for c in 0..source.len() {
        let id = source.id(c);
        let to = f
            .assign
            .get(id)
            .ok_or_else(|| Error::Format(format!("map: no image for cell `{id}`")))?;
        assign.push(target.index_of(to).ok_or_else(|| Error::UnknownId(to.clone()))?);
    }
    if let Some(extra) = f.assign.keys().find(|k| source.index_of(k).is_none()) {
        return Err(Error::UnknownId(extra.clone()));
    }
    let m = GlobularMap::new(source, target, assign);
    m.check()?;
    Ok(m)
}

/// A tree given either as ptree-json or as gset-json.
pub fn tree_from_str(s: &str) -> Result<Tree> {
    let t = s.trim_start();
    if t.starts_with('[') {
        Ok(Tree::from_planar(&PlanarTree::parse(t)?))
    } else {
        Ok(Tree::from_gset(&gset_from_json(t)?)?.0)
    }
}

fn tree_from_value(v: &Value) -> Result<Tree> {
    Ok(Tree::from_planar(&PlanarTree::from_json(v)?))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FreeCellJson {
    tree: Value,
    label: BTreeMap<String, String>,
    dim: usize,
}

pub fn free_cell_to_json(fc: &FreeCell, x: &GlobularSet) -> Value {
    let tg = fc.shape.gset();
    serde_json::to_value(FreeCellJson {
        tree: fc.shape.planar().to_json(),
        label: fc
            .label
            .iter()
            .enumerate()
            .map(|(c, &l)| (tg.id(c).to_owned(), x.id(l).to_owned()))
            .collect(),
        dim: fc.dim,
    })
    .expect("plain data serializes")
}

pub fn free_cell_from_json(v: &Value, x: &GlobularSet) -> Result<FreeCell> {
    let j: FreeCellJson = serde_json::from_value(v.clone()).map_err(|e| fmt_err("free cell", e))?;
    let shape = tree_from_value(&j.tree)?;
    let tg = shape.gset();
    let label = (0..tg.len())
        .map(|c| {
            let id = j
                .label
                .get(tg.id(c))
                .ok_or_else(|| Error::Format(format!("free cell: no label for `{}`", tg.id(c))))?;
            x.index_of(id).ok_or_else(|| Error::UnknownId(id.clone()))
        })
        .collect::<Result<_>>()?;
    let fc = FreeCell::new(shape, label, j.dim)?;
    fc.check_label(x)?;
    Ok(fc)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperadCellJson {
    id: String,
    dim: usize,
    src: Option<String>,
    tgt: Option<String>,
    over: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultJson {
    outer: String,
    inner: Vec<String>,
    result: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftJson {
    dim: usize,
    tree: Value,
    src: Option<String>,
    tgt: Option<String>,
    cell: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperadJson {
    trunc_dim: usize,
    tree_bound: usize,
    cells: Vec<OperadCellJson>,
    unit: BTreeMap<String, String>,
    mult: Vec<MultJson>,
    complete_fibers: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lifts: Option<Vec<LiftJson>>,
}

/// operad-json with the multiplication written out as a table of every
/// defined product.
pub fn operad_to_json(o: &OperadData) -> String {
    let g = o.total();
    let id = |c: CellIx| g.id(c).to_owned();
    let lifts = o.lifts.as_ref().map(|l| {
        let mut v: Vec<(&Square, &CellIx)> = l.iter().collect();
        v.sort();
        v.into_iter()
            .map(|(sq, &c)| LiftJson {
                dim: sq.dim,
                tree: sq.tree.planar().to_json(),
                src: sq.src.map(id),
                tgt: sq.tgt.map(id),
                cell: id(c),
            })
            .collect()
    });
    pretty(&OperadJson {
        trunc_dim: o.trunc_dim(),
        tree_bound: o.tree_bound(),
        cells: g
            .records()
            .into_iter()
            .enumerate()
            .map(|(c, r)| OperadCellJson {
                id: r.id,
                dim: r.dim,
                src: r.src,
                tgt: r.tgt,
                over: o.coll.over(c).planar().to_json(),
            })
            .collect(),
        unit: o.units.iter().enumerate().map(|(n, &u)| (n.to_string(), id(u))).collect(),
        mult: o
            .mult_entries()
            .into_iter()
            .map(|((a, l), r)| MultJson {
                outer: id(a),
                inner: l.into_iter().map(id).collect(),
                result: id(r),
            })
            .collect(),
        complete_fibers: o.complete_fibers,
        lifts,
    })
}

pub fn operad_from_json(s: &str) -> Result<OperadData> {
    let j: OperadJson = serde_json::from_str(s).map_err(|e| fmt_err("operad-json", e))?;
    let records: Vec<CellRecord> = j
        .cells
        .iter()
        .map(|c| CellRecord {
            id: c.id.clone(),
            dim: c.dim,
            src: c.src.clone(),
            tgt: c.tgt.clone(),
        })
        .collect();
    let total = GlobularSet::from_records(&records)?;
    let over: Vec<Tree> = j.cells.iter().map(|c| tree_from_value(&c.over)).collect::<Result<_>>()?;
    let look = |id: &str| total.index_of(id).ok_or_else(|| Error::UnknownId(id.to_owned()));
    let mut units = Vec::new();
    for n in 0..=j.trunc_dim {
        let u = j
            .unit
            .get(&n.to_string())
            .ok_or_else(|| Error::Format(format!("operad-json: no unit in dimension {n}")))?;
        units.push(look(u)?);
    }
    if j.unit.len() != j.trunc_dim + 1 {
        return Err(Error::Format("operad-json: units above the truncation".into()));
    }
    let mut table = HashMap::new();
    for m in &j.mult {
        let inner = m.inner.iter().map(|i| look(i)).collect::<Result<Vec<_>>>()?;
        if table.insert((look(&m.outer)?, inner), look(&m.result)?).is_some() {
            return Err(Error::Format(format!("operad-json: product of `{}` listed twice", m.outer)));
        }
    }
    let lifts = match &j.lifts {
        None => None,
        Some(ls) => Some(
            ls.iter()
                .map(|l| {
                    let sq = Square {
                        dim: l.dim,
                        tree: tree_from_value(&l.tree)?,
                        src: l.src.as_deref().map(look).transpose()?,
                        tgt: l.tgt.as_deref().map(look).transpose()?,
                    };
                    Ok((sq, look(&l.cell)?))
                })
                .collect::<Result<HashMap<_, _>>>()?,
        ),
    };
    let coll = Collection::new(total.clone(), over, j.trunc_dim, j.tree_bound)?;
    let mut o = OperadData::new(coll, units, Arc::new(MultTable(table)), j.complete_fibers)?;
    o.lifts = lifts;
    Ok(o)
}

/// `initial:D:B` or `terminal:D:B`; `None` for anything else.
pub fn builtin_ref(s: &str) -> Option<Result<OperadData>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, d, b] = parts.as_slice() else {
        return None;
    };
    let tag = match *name {
        "initial" => Builtin::Initial,
        "terminal" => Builtin::Terminal,
        _ => return None,
    };
    let (Ok(d), Ok(b)) = (d.parse(), b.parse()) else {
        return Some(Err(Error::Format(format!("bad builtin reference `{s}`"))));
    };
    Some(builtin(tag, d, b))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionJson {
    hom: String,
    table: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellularJson {
    operad: String,
    values: BTreeMap<String, Vec<String>>,
    action: Vec<ActionJson>,
}

/// `S->T#k` names the `k`-th morphism `S → T` in enumeration order.
pub fn hom_id(s: &Tree, t: &Tree, k: usize) -> String {
    format!("{s}->{t}#{k}")
}

fn parse_hom_id(h: &str) -> Result<(Tree, Tree, usize)> {
    let bad = || Error::Format(format!("cell-json: bad hom id `{h}`"));
    let (st, k) = h.rsplit_once('#').ok_or_else(bad)?;
    let (s, t) = st.split_once("->").ok_or_else(bad)?;
    Ok((tree_from_str(s)?, tree_from_str(t)?, k.parse().map_err(|_| bad())?))
}

/// cell-json with every restriction tabulated; `operad_ref` is written as is.
pub fn cellular_to_json(x: &CellularSet, theta: &Theta, operad_ref: &str) -> Result<String> {
    let mut action = Vec::new();
    for (si, s) in theta.trees.iter().enumerate() {
        for (ti, t) in theta.trees.iter().enumerate() {
            for (k, m) in theta.homs(si, ti).iter().enumerate() {
                let sx = x.tree_index(s).ok_or_else(|| Error::Format(format!("tree {s} not in presheaf")))?;
                action.push(ActionJson {
                    hom: hom_id(s, t, k),
                    table: x.table(m)?.into_iter().map(|e| x.values[sx][e].clone()).collect(),
                });
            }
        }
    }
    Ok(pretty(&CellularJson {
        operad: operad_ref.into(),
        values: x
            .trees
            .iter()
            .zip(&x.values)
            .map(|(t, v)| (t.to_string(), v.clone()))
            .collect(),
        action,
    }))
}

/// Parses cell-json; `resolve` loads the operad reference.
pub fn cellular_from_json(
    s: &str,
    resolve: impl Fn(&str) -> Result<Arc<OperadData>>,
) -> Result<CellularSet> {
    let j: CellularJson = serde_json::from_str(s).map_err(|e| fmt_err("cell-json", e))?;
    let o = resolve(&j.operad)?;
    let mut entries: Vec<(Tree, Vec<String>)> = j
        .values
        .iter()
        .map(|(k, v)| Ok((tree_from_str(k)?, v.clone())))
        .collect::<Result<_>>()?;
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    for w in entries.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Format(format!("cell-json: tree {} listed twice", w[0].0)));
        }
    }
    let elem_ix: HashMap<Tree, HashMap<&str, usize>> = entries
        .iter()
        .map(|(t, v)| (t.clone(), v.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect()))
        .collect();
    for (t, v) in &entries {
        if elem_ix[t].len() != v.len() {
            return Err(Error::Format(format!("cell-json: repeated element at {t}")));
        }
    }
    let mut homs: HashMap<(Tree, Tree), Vec<ThetaMorphism>> = HashMap::new();
    let mut table = HashMap::new();
    for a in &j.action {
        let (src, tgt, k) = parse_hom_id(&a.hom)?;
        let list = match homs.entry((src.clone(), tgt.clone())) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(theta_homs(&o, &src, &tgt)?),
        };
        let m = list
            .get(k)
            .ok_or_else(|| Error::Format(format!("cell-json: `{}` does not exist", a.hom)))?
            .clone();
        let ix = elem_ix
            .get(&src)
            .ok_or_else(|| Error::Format(format!("cell-json: no values at {src}")))?;
        let row = a
            .table
            .iter()
            .map(|e| {
                ix.get(e.as_str())
                    .copied()
                    .ok_or_else(|| Error::Format(format!("cell-json: `{e}` is not an element at {src}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if table.insert(m, row).is_some() {
            return Err(Error::Format(format!("cell-json: `{}` listed twice", a.hom)));
        }
    }
    let (trees, values) = entries.into_iter().unzip();
    CellularSet::tabulated(o, trees, values, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nerve::{representable, segal_check};
    use crate::operad::{check_operad, NEST_BOUND};

    #[test]
    fn gset_round_trip() {
        let g = GlobularSet::path(2);
        let back = gset_from_json(&gset_to_json(&g)).unwrap();
        assert_eq!(back.records(), g.records());
        let err = gset_from_json("{\"cells\": [ {\"id\": 1} ]}").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn trees_from_either_format() {
        let t = tree_from_str("[[],[]]").unwrap();
        assert_eq!(t, Tree::star(2));
        let again = tree_from_str(&gset_to_json(t.gset())).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn operad_round_trip() {
        let o = builtin(Builtin::Terminal, 2, 7).unwrap();
        let back = operad_from_json(&operad_to_json(&o)).unwrap();
        assert!(check_operad(&back, NEST_BOUND).is_ok());
        assert_eq!(back.mult_entries(), o.mult_entries());
        let no_flag = operad_to_json(&o).replace("\"complete_fibers\": true", "\"x\": 1");
        assert!(operad_from_json(&no_flag).is_err());
    }

    #[test]
    fn cellular_round_trip() {
        let o = Arc::new(builtin(Builtin::Initial, 2, 5).unwrap());
        let r = representable(o.clone(), &Tree::star(2), 5).unwrap();
        let theta = Theta::new(o.clone(), &r.trees).unwrap();
        let s = cellular_to_json(&r, &theta, "initial:2:5").unwrap();
        let back = cellular_from_json(&s, |name| builtin_ref(name).unwrap().map(Arc::new)).unwrap();
        assert_eq!(back.values, r.values);
        assert_eq!(segal_check(&back, &Tree::star(2)).unwrap().verdict(), Some(true));
        assert_eq!(cellular_to_json(&back, &theta, "initial:2:5").unwrap(), s);
    }
}
