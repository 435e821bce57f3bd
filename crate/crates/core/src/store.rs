//! The in-memory typed property graph.
//!
//! Nodes and edges share one id space. Ids are assigned in increasing order
//! and never reused; a rolled-back insert leaves a vacant slot behind.
//! Every node keeps outgoing and incoming edge lists per edge type, sorted
//! ascending by edge id, which gives deterministic enumeration order.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ident::Ident;
use crate::value::{Value, ValueKind};

pub type ElementId = u64;

/// Property map of a node or edge.
pub type Properties = BTreeMap<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeTypeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeTypeId(pub usize);

/// A node type or an edge type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Node(NodeTypeId),
    Edge(EdgeTypeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Outgoing,
    Incoming,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoreError {
    #[error("type {0} already exists")]
    DuplicateType(String),
    #[error("unknown supertype {0}")]
    UnknownSupertype(String),
    #[error("supertype cycle through {0}")]
    SupertypeCycle(String),
    #[error("unknown type {0}")]
    UnknownType(String),
    #[error("unknown node {0}")]
    UnknownNode(ElementId),
}

#[derive(Clone, Debug)]
pub struct NodeType {
    pub name: String,
    pub supertype: Option<NodeTypeId>,
    /// Advisory; grown on write and never enforced.
    pub known_properties: BTreeMap<String, ValueKind>,
}

#[derive(Clone, Debug)]
pub struct EdgeType {
    pub name: String,
    pub supertype: Option<EdgeTypeId>,
    pub first_seen_source: NodeTypeId,
    pub first_seen_dest: NodeTypeId,
    pub known_properties: BTreeMap<String, ValueKind>,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: ElementId,
    pub node_type: NodeTypeId,
    pub properties: Properties,
    outgoing: BTreeMap<EdgeTypeId, Vec<ElementId>>,
    incoming: BTreeMap<EdgeTypeId, Vec<ElementId>>,
}

impl Node {
    fn adjacency(&self, direction: Direction) -> &BTreeMap<EdgeTypeId, Vec<ElementId>> {
        match direction {
            Direction::Outgoing => &self.outgoing,
            Direction::Incoming => &self.incoming,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub id: ElementId,
    pub edge_type: EdgeTypeId,
    pub source: ElementId,
    pub dest: ElementId,
    pub properties: Properties,
}

impl Edge {
    /// The endpoint reached when traversing this edge in `direction`.
    pub fn far_end(&self, direction: Direction) -> ElementId {
        match direction {
            Direction::Outgoing => self.dest,
            Direction::Incoming => self.source,
        }
    }
}

#[derive(Clone, Debug)]
enum Slot {
    Node(Node),
    Edge(Edge),
    Vacant,
}

/// Marks a point the store can be rolled back to.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    slots: usize,
    node_types: Vec<NodeType>,
    edge_types: Vec<EdgeType>,
}

/// Looks up a property by identifier: exact name first, then the
/// case-insensitive match for unquoted identifiers.
pub fn property<'p>(props: &'p Properties, name: &Ident) -> Option<&'p Value> {
    if let Some(v) = props.get(&name.name) {
        return Some(v);
    }
    if name.quoted {
        return None;
    }
    props
        .iter()
        .find(|(k, _)| name.matches(k))
        .map(|(_, v)| v)
}

#[derive(Clone, Debug, Default)]
pub struct Store {
    node_types: Vec<NodeType>,
    edge_types: Vec<EdgeType>,
    /// Slot `i` holds element id `i + 1`.
    slots: Vec<Slot>,
    nodes_by_type: Vec<Vec<ElementId>>,
    node_count: usize,
    edge_count: usize,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    // ---- schema ----

    pub fn node_types(&self) -> impl Iterator<Item = (NodeTypeId, &NodeType)> {
        self.node_types.iter().enumerate().map(|(i, t)| (NodeTypeId(i), t))
    }

    pub fn edge_types(&self) -> impl Iterator<Item = (EdgeTypeId, &EdgeType)> {
        self.edge_types.iter().enumerate().map(|(i, t)| (EdgeTypeId(i), t))
    }

    pub fn node_type(&self, id: NodeTypeId) -> &NodeType {
        &self.node_types[id.0]
    }

    pub fn edge_type(&self, id: EdgeTypeId) -> &EdgeType {
        &self.edge_types[id.0]
    }

    pub fn find_node_type(&self, name: &Ident) -> Option<NodeTypeId> {
        self.node_types
            .iter()
            .position(|t| name.matches(&t.name))
            .map(NodeTypeId)
    }

    pub fn find_edge_type(&self, name: &Ident) -> Option<EdgeTypeId> {
        self.edge_types
            .iter()
            .position(|t| name.matches(&t.name))
            .map(EdgeTypeId)
    }

    pub fn define_node_type(&mut self, name: &str, supertype: Option<&str>) -> Result<NodeTypeId, StoreError> {
        let supertype = match supertype {
            Some(s) if s.to_lowercase() == name.to_lowercase() => {
                return Err(StoreError::SupertypeCycle(name.to_string()))
            }
            Some(s) => Some(s),
            None => None,
        };
        if self.find_node_type(&Ident::plain(name)).is_some() {
            return Err(StoreError::DuplicateType(name.to_string()));
        }
        let supertype = supertype
            .map(|s| {
                self.find_node_type(&Ident::plain(s))
                    .ok_or_else(|| StoreError::UnknownSupertype(s.to_string()))
            })
            .transpose()?;
        self.node_types.push(NodeType {
            name: name.to_string(),
            supertype,
            known_properties: BTreeMap::new(),
        });
        self.nodes_by_type.push(Vec::new());
        Ok(NodeTypeId(self.node_types.len() - 1))
    }

    pub fn define_edge_type(
        &mut self,
        name: &str,
        source_type: &str,
        dest_type: &str,
        supertype: Option<&str>,
    ) -> Result<EdgeTypeId, StoreError> {
        if let Some(s) = supertype {
            if s.to_lowercase() == name.to_lowercase() {
                return Err(StoreError::SupertypeCycle(name.to_string()));
            }
        }
        if self.find_edge_type(&Ident::plain(name)).is_some() {
            return Err(StoreError::DuplicateType(name.to_string()));
        }
        let supertype = supertype
            .map(|s| {
                self.find_edge_type(&Ident::plain(s))
                    .ok_or_else(|| StoreError::UnknownSupertype(s.to_string()))
            })
            .transpose()?;
        let resolve = |t: &str| {
            self.find_node_type(&Ident::plain(t))
                .ok_or_else(|| StoreError::UnknownType(t.to_string()))
        };
        let first_seen_source = resolve(source_type)?;
        let first_seen_dest = resolve(dest_type)?;
        self.edge_types.push(EdgeType {
            name: name.to_string(),
            supertype,
            first_seen_source,
            first_seen_dest,
            known_properties: BTreeMap::new(),
        });
        Ok(EdgeTypeId(self.edge_types.len() - 1))
    }

    /// Supertype chain starting at `t` itself.
    pub fn ancestors(&self, t: TypeRef) -> Vec<TypeRef> {
        let mut out = vec![t];
        let mut cur = t;
        loop {
            let next = match cur {
                TypeRef::Node(n) => self.node_types[n.0].supertype.map(TypeRef::Node),
                TypeRef::Edge(e) => self.edge_types[e.0].supertype.map(TypeRef::Edge),
            };
            match next {
                Some(n) => {
                    out.push(n);
                    cur = n;
                }
                None => return out,
            }
        }
    }

    pub fn type_name(&self, t: TypeRef) -> &str {
        match t {
            TypeRef::Node(n) => &self.node_types[n.0].name,
            TypeRef::Edge(e) => &self.edge_types[e.0].name,
        }
    }

    /// True iff `label` names `concrete` or one of its supertypes.
    pub fn type_conforms(&self, concrete: TypeRef, label: &Ident) -> bool {
        self.ancestors(concrete)
            .into_iter()
            .any(|t| label.matches(self.type_name(t)))
    }

    /// Edge types conforming to `label`.
    pub fn conforming_edge_types(&self, label: &Ident) -> Vec<EdgeTypeId> {
        (0..self.edge_types.len())
            .map(EdgeTypeId)
            .filter(|&t| self.type_conforms(TypeRef::Edge(t), label))
            .collect()
    }

    /// Node types conforming to `label`.
    pub fn conforming_node_types(&self, label: &Ident) -> Vec<NodeTypeId> {
        (0..self.node_types.len())
            .map(NodeTypeId)
            .filter(|&t| self.type_conforms(TypeRef::Node(t), label))
            .collect()
    }

    // ---- elements ----

    fn alloc_id(&self) -> ElementId {
        self.slots.len() as ElementId + 1
    }

    pub fn insert_node(&mut self, type_name: &str, properties: Properties) -> Result<ElementId, StoreError> {
        let t = self
            .find_node_type(&Ident::plain(type_name))
            .ok_or_else(|| StoreError::UnknownType(type_name.to_string()))?;
        Ok(self.insert_node_typed(t, properties))
    }

    pub fn insert_node_typed(&mut self, node_type: NodeTypeId, properties: Properties) -> ElementId {
        let id = self.alloc_id();
        let known = &mut self.node_types[node_type.0].known_properties;
        for (k, v) in &properties {
            known.entry(k.clone()).or_insert(v.kind());
        }
        self.slots.push(Slot::Node(Node {
            id,
            node_type,
            properties,
            outgoing: BTreeMap::new(),
            incoming: BTreeMap::new(),
        }));
        self.nodes_by_type[node_type.0].push(id);
        self.node_count += 1;
        id
    }

    pub fn insert_edge(
        &mut self,
        type_name: &str,
        source: ElementId,
        dest: ElementId,
        properties: Properties,
    ) -> Result<ElementId, StoreError> {
        let t = self
            .find_edge_type(&Ident::plain(type_name))
            .ok_or_else(|| StoreError::UnknownType(type_name.to_string()))?;
        self.insert_edge_typed(t, source, dest, properties)
    }

    pub fn insert_edge_typed(
        &mut self,
        edge_type: EdgeTypeId,
        source: ElementId,
        dest: ElementId,
        properties: Properties,
    ) -> Result<ElementId, StoreError> {
        for n in [source, dest] {
            if self.node(n).is_none() {
                return Err(StoreError::UnknownNode(n));
            }
        }
        let id = self.alloc_id();
        let known = &mut self.edge_types[edge_type.0].known_properties;
        for (k, v) in &properties {
            known.entry(k.clone()).or_insert(v.kind());
        }
        self.slots.push(Slot::Edge(Edge {
            id,
            edge_type,
            source,
            dest,
            properties,
        }));
        if let Some(Slot::Node(n)) = self.slots.get_mut(source as usize - 1) {
            n.outgoing.entry(edge_type).or_default().push(id);
        }
        if let Some(Slot::Node(n)) = self.slots.get_mut(dest as usize - 1) {
            n.incoming.entry(edge_type).or_default().push(id);
        }
        self.edge_count += 1;
        Ok(id)
    }

    pub fn node(&self, id: ElementId) -> Option<&Node> {
        match self.slot(id)? {
            Slot::Node(n) => Some(n),
            _ => None,
        }
    }

    pub fn edge(&self, id: ElementId) -> Option<&Edge> {
        match self.slot(id)? {
            Slot::Edge(e) => Some(e),
            _ => None,
        }
    }

    fn slot(&self, id: ElementId) -> Option<&Slot> {
        if id == 0 {
            return None;
        }
        self.slots.get(id as usize - 1)
    }

    /// Properties of a node or edge.
    pub fn properties(&self, id: ElementId) -> Option<&Properties> {
        match self.slot(id)? {
            Slot::Node(n) => Some(&n.properties),
            Slot::Edge(e) => Some(&e.properties),
            Slot::Vacant => None,
        }
    }

    /// All live nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.slots.iter().filter_map(|s| match s {
            Slot::Node(n) => Some(n),
            _ => None,
        })
    }

    /// All live edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.slots.iter().filter_map(|s| match s {
            Slot::Edge(e) => Some(e),
            _ => None,
        })
    }

    /// Nodes of exactly this type, ascending id.
    pub fn nodes_of_type(&self, t: NodeTypeId) -> &[ElementId] {
        &self.nodes_by_type[t.0]
    }

    /// Edges incident to `node` in `direction` whose type conforms to
    /// `label` (any type when `None`), ascending by edge id.
    pub fn edges_from(
        &self,
        node: ElementId,
        direction: Direction,
        label: Option<&Ident>,
    ) -> Result<Vec<ElementId>, StoreError> {
        let types = label.map(|l| self.conforming_edge_types(l));
        let mut out = Vec::new();
        self.collect_edges(node, direction, types.as_deref(), &mut out)?;
        Ok(out)
    }

    /// Like [`Store::edges_from`] with the label already resolved to a set of
    /// edge types. Appends to `out`.
    pub fn collect_edges(
        &self,
        node: ElementId,
        direction: Direction,
        types: Option<&[EdgeTypeId]>,
        out: &mut Vec<ElementId>,
    ) -> Result<(), StoreError> {
        let n = self.node(node).ok_or(StoreError::UnknownNode(node))?;
        let adj = n.adjacency(direction);
        let start = out.len();
        let mut lists = 0;
        match types {
            None => {
                for list in adj.values() {
                    out.extend_from_slice(list);
                    lists += 1;
                }
            }
            Some(types) => {
                for t in types {
                    if let Some(list) = adj.get(t) {
                        out.extend_from_slice(list);
                        lists += 1;
                    }
                }
            }
        }
        if lists > 1 {
            out[start..].sort_unstable();
        }
        Ok(())
    }

    // ---- atomicity ----

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            slots: self.slots.len(),
            node_types: self.node_types.clone(),
            edge_types: self.edge_types.clone(),
        }
    }

    /// Undoes every insert and type definition made since `cp`. Rolled-back
    /// ids stay allocated.
    pub fn rollback(&mut self, cp: Checkpoint) {
        for idx in (cp.slots..self.slots.len()).rev() {
            match std::mem::replace(&mut self.slots[idx], Slot::Vacant) {
                Slot::Edge(e) => {
                    self.edge_count -= 1;
                    for (end, outgoing) in [(e.source, true), (e.dest, false)] {
                        if let Some(Slot::Node(n)) = self.slots.get_mut(end as usize - 1) {
                            let map = if outgoing { &mut n.outgoing } else { &mut n.incoming };
                            if let Some(list) = map.get_mut(&e.edge_type) {
                                list.retain(|&x| x != e.id);
                                if list.is_empty() {
                                    map.remove(&e.edge_type);
                                }
                            }
                        }
                    }
                }
                Slot::Node(n) => {
                    self.node_count -= 1;
                    if let Some(list) = self.nodes_by_type.get_mut(n.node_type.0) {
                        list.retain(|&x| x != n.id);
                    }
                }
                Slot::Vacant => {}
            }
        }
        self.node_types = cp.node_types;
        self.edge_types = cp.edge_types;
        self.nodes_by_type.truncate(self.node_types.len());
    }

    /// Exhaustive consistency check of the adjacency indexes.
    pub fn check_integrity(&self) -> Result<(), String> {
        let mut seen_out = 0usize;
        let mut seen_in = 0usize;
        for n in self.nodes() {
            for (dir, adj) in [(Direction::Outgoing, &n.outgoing), (Direction::Incoming, &n.incoming)] {
                for (t, list) in adj {
                    if list.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(format!("node {} {:?} list for {:?} not ascending", n.id, dir, t));
                    }
                    for &e in list {
                        let edge = self.edge(e).ok_or(format!("dangling edge {e} at node {}", n.id))?;
                        let end = match dir {
                            Direction::Outgoing => edge.source,
                            Direction::Incoming => edge.dest,
                        };
                        if end != n.id || edge.edge_type != *t {
                            return Err(format!("edge {e} misfiled at node {}", n.id));
                        }
                    }
                    match dir {
                        Direction::Outgoing => seen_out += list.len(),
                        Direction::Incoming => seen_in += list.len(),
                    }
                }
            }
        }
        for e in self.edges() {
            if self.node(e.source).is_none() || self.node(e.dest).is_none() {
                return Err(format!("edge {} references a missing node", e.id));
            }
        }
        if seen_out != self.edge_count || seen_in != self.edge_count {
            return Err(format!(
                "{} edges but {} outgoing and {} incoming index entries",
                self.edge_count, seen_out, seen_in
            ));
        }
        Ok(())
    }
}
