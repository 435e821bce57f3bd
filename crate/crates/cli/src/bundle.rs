//! Graph bundles: a directory of CSV files describing one property graph.
//!
//! * `<Type>.nodes.csv` has the header `id,<prop>:<kind>,...`. The `id` value
//!   is the external key and is also stored as the `id` property (as an int
//!   when it parses as one). A first column named `_id` is a key only.
//! * `<Type>.edges.csv` has the header `src,dst,<prop>:<kind>,...`. Endpoint
//!   columns may be qualified as `src:<NodeType>` when keys repeat across
//!   node files.
//! * `schema.txt` lists supertype links, one `child < parent` per line.
//!
//! Kinds are `int`, `decimal`, `bool`, `text` and `timestamp`; an empty cell
//! leaves the property unset.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use gqlengine::{ElementId, Ident, Properties, Store, StoreError, TypeRef, Value, ValueKind};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: malformed header: {message}")]
    MalformedHeader { file: String, message: String },
    #[error("{file}, line {line}: unknown kind {kind}")]
    BadKind { file: String, line: u64, kind: String },
    #[error("{file}, line {line}: bad {kind} value {text:?}")]
    BadValue {
        file: String,
        line: u64,
        kind: String,
        text: String,
    },
    #[error("{file}, line {line}: {column} id {id} does not name a node")]
    DanglingEdge {
        file: String,
        line: u64,
        column: String,
        id: String,
    },
    #[error("{file}, line {line}: {column} id {id} is ambiguous; qualify the column as {column}:<Type>")]
    AmbiguousId {
        file: String,
        line: u64,
        column: String,
        id: String,
    },
    #[error("{file}, line {line}: duplicate id {id}")]
    DuplicateId { file: String, line: u64, id: String },
    #[error("{file}, line {line}: {message}")]
    Csv { file: String, line: u64, message: String },
    #[error("schema.txt, line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("{0} contains no node files")]
    Empty(PathBuf),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot export {kind} property {property} of {type_name}")]
    Unexportable {
        type_name: String,
        property: String,
        kind: ValueKind,
    },
}

/// A loaded bundle: the store plus the external key of every node.
#[derive(Debug, Default)]
pub struct Bundle {
    pub store: Store,
    /// (node type name, external id) → element id.
    pub manifest: BTreeMap<(String, String), ElementId>,
}

impl Bundle {
    pub fn node(&self, type_name: &str, external: &str) -> Option<ElementId> {
        self.manifest
            .get(&(type_name.to_string(), external.to_string()))
            .copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Int,
    Decimal,
    Bool,
    Text,
    Timestamp,
}

impl Kind {
    fn parse(s: &str) -> Option<Kind> {
        Some(match s.trim().to_ascii_lowercase().as_str() {
            "int" => Kind::Int,
            "decimal" => Kind::Decimal,
            "bool" => Kind::Bool,
            "text" => Kind::Text,
            "timestamp" => Kind::Timestamp,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Int => "int",
            Kind::Decimal => "decimal",
            Kind::Bool => "bool",
            Kind::Text => "text",
            Kind::Timestamp => "timestamp",
        }
    }

    fn of(kind: ValueKind) -> Option<Kind> {
        Some(match kind {
            ValueKind::Int => Kind::Int,
            ValueKind::Decimal => Kind::Decimal,
            ValueKind::Bool => Kind::Bool,
            ValueKind::Text => Kind::Text,
            ValueKind::Timestamp => Kind::Timestamp,
            _ => return None,
        })
    }

    fn value(self, text: &str) -> Option<Value> {
        match self {
            Kind::Int => text.trim().parse().ok().map(Value::Int),
            Kind::Decimal => Value::decimal(text.trim()),
            Kind::Bool => match text.trim().to_ascii_lowercase().as_str() {
                "true" => Some(Value::Bool(true)),
                "false" => Some(Value::Bool(false)),
                _ => None,
            },
            Kind::Text => Some(Value::Text(text.to_string())),
            Kind::Timestamp => Value::timestamp(text),
        }
    }
}

struct PropColumn {
    name: String,
    kind: Kind,
}

struct Table {
    file: String,
    key_columns: Vec<(String, Option<String>)>,
    props: Vec<PropColumn>,
    rows: Vec<(u64, csv::StringRecord)>,
}

fn read_table(path: &Path, keys: &[&str]) -> Result<Table, BundleError> {
    let file = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(&file, e))?;
    let header = reader.headers().map_err(|e| csv_error(&file, e))?.clone();
    if header.len() < keys.len() {
        return Err(BundleError::MalformedHeader {
            file,
            message: format!("expected leading column(s) {}", keys.join(",")),
        });
    }
    let mut key_columns = Vec::new();
    for (i, expected) in keys.iter().enumerate() {
        let cell = header[i].trim();
        let (name, qualifier) = match cell.split_once(':') {
            Some((n, q)) => (n.trim(), Some(q.trim().to_string())),
            None => (cell, None),
        };
        let ok = name == *expected || (*expected == "id" && name == "_id" && qualifier.is_none());
        if !ok || (*expected == "id" && qualifier.is_some()) {
            return Err(BundleError::MalformedHeader {
                file,
                message: format!("column {} must be {expected}, found {cell:?}", i + 1),
            });
        }
        key_columns.push((name.to_string(), qualifier));
    }
    let mut props = Vec::new();
    for cell in header.iter().skip(keys.len()) {
        let Some((name, kind)) = cell.rsplit_once(':') else {
            return Err(BundleError::MalformedHeader {
                file,
                message: format!("column {cell:?} needs a kind, as in name:int"),
            });
        };
        let Some(kind) = Kind::parse(kind) else {
            return Err(BundleError::BadKind {
                file,
                line: 1,
                kind: kind.to_string(),
            });
        };
        if name.is_empty() || props.iter().any(|p: &PropColumn| p.name == name) {
            return Err(BundleError::MalformedHeader {
                file,
                message: format!("empty or repeated property name in {cell:?}"),
            });
        }
        props.push(PropColumn {
            name: name.to_string(),
            kind,
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&file, e))?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record));
    }
    Ok(Table {
        file,
        key_columns,
        props,
        rows,
    })
}

fn csv_error(file: &str, e: csv::Error) -> BundleError {
    let line = e.position().map_or(0, |p| p.line());
    BundleError::Csv {
        file: file.to_string(),
        line,
        message: e.to_string(),
    }
}

fn row_properties(table: &Table, line: u64, record: &csv::StringRecord, skip: usize) -> Result<Properties, BundleError> {
    let mut props = Properties::new();
    for (i, col) in table.props.iter().enumerate() {
        let text = record.get(skip + i).unwrap_or("");
        if text.is_empty() {
            continue;
        }
        let v = col.kind.value(text).ok_or_else(|| BundleError::BadValue {
            file: table.file.clone(),
            line,
            kind: col.kind.name().to_string(),
            text: text.to_string(),
        })?;
        props.insert(col.name.clone(), v);
    }
    Ok(props)
}

fn files_with_suffix(dir: &Path, suffix: &str) -> Result<Vec<(String, PathBuf)>, BundleError> {
    let io = |source| BundleError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        let name = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        if let Some(stem) = name.strip_suffix(suffix) {
            if !stem.is_empty() {
                out.push((stem.to_string(), path));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn read_schema(dir: &Path) -> Result<Vec<(String, String)>, BundleError> {
    let path = dir.join("schema.txt");
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(&path).map_err(|source| BundleError::Io { path, source })?;
    let mut links = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((child, parent)) = line.split_once('<') else {
            return Err(BundleError::Schema {
                line: i + 1,
                message: format!("expected `child < parent`, found {raw:?}"),
            });
        };
        let (child, parent) = (child.trim(), parent.trim());
        if child.is_empty() || parent.is_empty() {
            return Err(BundleError::Schema {
                line: i + 1,
                message: "empty type name".into(),
            });
        }
        if links.iter().any(|(c, _): &(String, String)| c == child) {
            return Err(BundleError::Schema {
                line: i + 1,
                message: format!("{child} already has a supertype"),
            });
        }
        links.push((child.to_string(), parent.to_string()));
    }
    Ok(links)
}

/// Orders `names` (plus any parents they mention) so parents come first.
fn parents_first(names: &[String], links: &[(String, String)]) -> Result<Vec<String>, BundleError> {
    let parent_of: HashMap<&str, &str> = links.iter().map(|(c, p)| (c.as_str(), p.as_str())).collect();
    let mut out: Vec<String> = Vec::new();
    for name in names {
        let mut chain = vec![name.as_str()];
        let mut cur = name.as_str();
        while let Some(&p) = parent_of.get(cur) {
            if chain.contains(&p) {
                return Err(BundleError::Store(StoreError::SupertypeCycle(p.to_string())));
            }
            chain.push(p);
            cur = p;
        }
        for n in chain.into_iter().rev() {
            if !out.iter().any(|o| o == n) {
                out.push(n.to_string());
            }
        }
    }
    Ok(out)
}

pub fn load_bundle(dir: &Path) -> Result<Bundle, BundleError> {
    let node_files = files_with_suffix(dir, ".nodes.csv")?;
    if node_files.is_empty() {
        return Err(BundleError::Empty(dir.to_path_buf()));
    }
    let edge_files = files_with_suffix(dir, ".edges.csv")?;
    let links = read_schema(dir)?;
    let node_names: Vec<String> = node_files.iter().map(|(n, _)| n.clone()).collect();
    let edge_names: Vec<String> = edge_files.iter().map(|(n, _)| n.clone()).collect();
    let parent_of: HashMap<&str, &str> = links.iter().map(|(c, p)| (c.as_str(), p.as_str())).collect();

    let mut bundle = Bundle::default();
    let is_edge_name = |n: &str| edge_names.iter().any(|e| e == n);
    for name in parents_first(&node_names, &links)? {
        if is_edge_name(&name) {
            continue;
        }
        bundle.store.define_node_type(&name, parent_of.get(name.as_str()).copied())?;
    }

    let mut by_key: HashMap<String, Vec<(String, ElementId)>> = HashMap::new();
    for (type_name, path) in &node_files {
        let table = read_table(path, &["id"])?;
        let key_only = table.key_columns[0].0 == "_id";
        let t = bundle
            .store
            .find_node_type(&Ident::quoted(type_name.clone()))
            .ok_or_else(|| StoreError::UnknownType(type_name.clone()))?;
        let mut seen = BTreeSet::new();
        for (line, record) in &table.rows {
            let key = record.get(0).unwrap_or("").trim().to_string();
            if !seen.insert(key.clone()) {
                return Err(BundleError::DuplicateId {
                    file: table.file.clone(),
                    line: *line,
                    id: key,
                });
            }
            let mut props = row_properties(&table, *line, record, 1)?;
            if !key_only {
                let id_value = key.parse::<i64>().map(Value::Int).unwrap_or_else(|_| Value::Text(key.clone()));
                props.insert("id".to_string(), id_value);
            }
            let id = bundle.store.insert_node_typed(t, props);
            bundle.manifest.insert((type_name.clone(), key.clone()), id);
            by_key.entry(key).or_default().push((type_name.clone(), id));
        }
    }

    let mut tables = Vec::new();
    for (type_name, path) in &edge_files {
        tables.push((type_name.clone(), read_table(path, &["src", "dst"])?));
    }
    let resolve = |table: &Table, line: u64, col: usize, key: &str| -> Result<ElementId, BundleError> {
        let (column, qualifier) = &table.key_columns[col];
        let dangling = || BundleError::DanglingEdge {
            file: table.file.clone(),
            line,
            column: column.clone(),
            id: key.to_string(),
        };
        let candidates = by_key.get(key).ok_or_else(dangling)?;
        let mut hits = candidates
            .iter()
            .filter(|(t, _)| qualifier.as_ref().is_none_or(|q| Ident::plain(q.clone()).matches(t)));
        let first = hits.next().ok_or_else(dangling)?;
        if hits.next().is_some() {
            return Err(BundleError::AmbiguousId {
                file: table.file.clone(),
                line,
                column: column.clone(),
                id: key.to_string(),
            });
        }
        Ok(first.1)
    };

    // endpoints of the first row fix each edge type's declared source and destination
    let mut endpoints: HashMap<String, (String, String)> = HashMap::new();
    let mut resolved: Vec<Vec<(ElementId, ElementId, Properties)>> = Vec::new();
    for (type_name, table) in &tables {
        let mut rows = Vec::with_capacity(table.rows.len());
        for (line, record) in &table.rows {
            let src = resolve(table, *line, 0, record.get(0).unwrap_or("").trim())?;
            let dst = resolve(table, *line, 1, record.get(1).unwrap_or("").trim())?;
            if !endpoints.contains_key(type_name) {
                let name_of = |n: ElementId| {
                    let t = bundle.store.node(n).map(|x| x.node_type).expect("resolved node");
                    bundle.store.type_name(TypeRef::Node(t)).to_string()
                };
                endpoints.insert(type_name.clone(), (name_of(src), name_of(dst)));
            }
            rows.push((src, dst, row_properties(table, *line, record, 2)?));
        }
        resolved.push(rows);
    }
    let fallback = bundle
        .store
        .node_types()
        .next()
        .map(|(_, t)| t.name.clone())
        .unwrap_or_default();
    for name in parents_first(&edge_names, &links)? {
        // a supertype with no file of its own borrows a child's endpoints
        let ends = endpoints.get(&name).cloned().or_else(|| {
            links
                .iter()
                .filter(|(_, p)| p == &name)
                .find_map(|(c, _)| endpoints.get(c).cloned())
        });
        let (src, dst) = ends.unwrap_or_else(|| (fallback.clone(), fallback.clone()));
        bundle
            .store
            .define_edge_type(&name, &src, &dst, parent_of.get(name.as_str()).copied())?;
    }
    for ((type_name, _), rows) in tables.iter().zip(resolved) {
        let t = bundle
            .store
            .find_edge_type(&Ident::quoted(type_name.clone()))
            .ok_or_else(|| StoreError::UnknownType(type_name.clone()))?;
        for (src, dst, props) in rows {
            bundle.store.insert_edge_typed(t, src, dst, props)?;
        }
    }
    Ok(bundle)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Timestamp(_) => v.to_iso_string(),
        other => other.to_string(),
    }
}

/// Property columns for a set of elements. Ints mixed with decimals widen
/// to decimal; any other mix cannot be written.
fn columns<'p>(
    type_name: &str,
    elements: impl Iterator<Item = &'p Properties>,
) -> Result<Vec<(String, Kind)>, BundleError> {
    let mut kinds: BTreeMap<String, Kind> = BTreeMap::new();
    for props in elements {
        for (name, v) in props {
            let unexportable = || BundleError::Unexportable {
                type_name: type_name.to_string(),
                property: name.clone(),
                kind: v.kind(),
            };
            let k = Kind::of(v.kind()).ok_or_else(unexportable)?;
            match kinds.get(name).copied() {
                None => {
                    kinds.insert(name.clone(), k);
                }
                Some(old) if old == k => {}
                Some(Kind::Int | Kind::Decimal) if matches!(k, Kind::Int | Kind::Decimal) => {
                    kinds.insert(name.clone(), Kind::Decimal);
                }
                Some(_) => return Err(unexportable()),
            }
        }
    }
    Ok(kinds.into_iter().collect())
}

fn header(keys: &[&str], cols: &[(String, Kind)]) -> Vec<String> {
    keys.iter()
        .map(|k| k.to_string())
        .chain(cols.iter().map(|(n, k)| format!("{n}:{}", k.name())))
        .collect()
}

/// Writes `store` as a bundle. Node keys are the store's element ids, so
/// edge endpoints never need qualifying.
pub fn export_bundle(store: &Store, dir: &Path) -> Result<(), BundleError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| BundleError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let write_err = |path: &Path, e: csv::Error| BundleError::Csv {
        file: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    };
    let mut schema = String::new();
    for (t, nt) in store.node_types() {
        if let Some(p) = nt.supertype {
            schema.push_str(&format!("{} < {}\n", nt.name, store.node_type(p).name));
        }
        let path = dir.join(format!("{}.nodes.csv", nt.name));
        let ids = store.nodes_of_type(t);
        let cols = columns(&nt.name, ids.iter().filter_map(|&id| store.properties(id)))?;
        let mut w = csv::Writer::from_path(&path).map_err(|e| write_err(&path, e))?;
        w.write_record(header(&["_id"], &cols)).map_err(|e| write_err(&path, e))?;
        for &id in ids {
            let props = store.properties(id).expect("live node");
            let mut rec = vec![id.to_string()];
            rec.extend(cols.iter().map(|(n, _)| props.get(n).map(cell).unwrap_or_default()));
            w.write_record(&rec).map_err(|e| write_err(&path, e))?;
        }
        w.flush().map_err(io(&path))?;
    }
    let mut edges_by_type: BTreeMap<usize, Vec<ElementId>> = BTreeMap::new();
    for e in store.edges() {
        edges_by_type.entry(e.edge_type.0).or_default().push(e.id);
    }
    for (t, et) in store.edge_types() {
        if let Some(p) = et.supertype {
            schema.push_str(&format!("{} < {}\n", et.name, store.edge_type(p).name));
        }
        let path = dir.join(format!("{}.edges.csv", et.name));
        let ids = edges_by_type.get(&t.0).map(Vec::as_slice).unwrap_or_default();
        let cols = columns(&et.name, ids.iter().filter_map(|&id| store.properties(id)))?;
        let mut w = csv::Writer::from_path(&path).map_err(|e| write_err(&path, e))?;
        w.write_record(header(&["src", "dst"], &cols)).map_err(|e| write_err(&path, e))?;
        for &id in ids {
            let e = store.edge(id).expect("live edge");
            let mut rec = vec![e.source.to_string(), e.dest.to_string()];
            rec.extend(cols.iter().map(|(n, _)| e.properties.get(n).map(cell).unwrap_or_default()));
            w.write_record(&rec).map_err(|e| write_err(&path, e))?;
        }
        w.flush().map_err(io(&path))?;
    }
    if !schema.is_empty() {
        let path = dir.join("schema.txt");
        fs::write(&path, schema).map_err(io(&path))?;
    }
    Ok(())
}
