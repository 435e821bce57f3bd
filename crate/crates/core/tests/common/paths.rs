//! Random small graphs and path patterns, plus a brute-force enumerator that
//! expands each quantifier into explicit repetition counts.

use gqlengine::{ElementId, ElementRef, Properties, Store};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `B < A` for nodes and `s < r` for edges.
pub struct Graph {
    pub store: Store,
    /// (id, is_b)
    pub nodes: Vec<(ElementId, bool)>,
    /// (id, src, dst, is_s)
    pub edges: Vec<(ElementId, ElementId, ElementId, bool)>,
}

pub fn random_graph(rng: &mut ChaCha8Rng) -> Graph {
    let mut store = Store::new();
    store.define_node_type("A", None).unwrap();
    store.define_node_type("B", Some("A")).unwrap();
    store.define_edge_type("r", "A", "A", None).unwrap();
    store.define_edge_type("s", "A", "A", Some("r")).unwrap();
    // sparse enough that unbounded walks stay enumerable
    let n = rng.random_range(8..=20);
    let mut nodes = Vec::new();
    for _ in 0..n {
        let b = rng.random_bool(0.4);
        let id = store.insert_node(if b { "B" } else { "A" }, Properties::new()).unwrap();
        nodes.push((id, b));
    }
    let m = rng.random_range(0..=(2 * n).min(30));
    let mut edges = Vec::new();
    for _ in 0..m {
        let src = nodes[rng.random_range(0..n)].0;
        let dst = nodes[rng.random_range(0..n)].0;
        let s = rng.random_bool(0.5);
        let id = store.insert_edge(if s { "s" } else { "r" }, src, dst, Properties::new()).unwrap();
        edges.push((id, src, dst, s));
    }
    Graph { store, nodes, edges }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeLabel {
    Any,
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeLabel {
    Any,
    R,
    S,
}

#[derive(Clone, Copy, Debug)]
pub struct EdgeSpec {
    pub label: EdgeLabel,
    pub forward: bool,
}

#[derive(Clone, Debug)]
pub enum Segment {
    Edge(EdgeSpec),
    /// Inner chain `(l0)-e0->(l1)-e1->...`, quantified.
    Group {
        start: NodeLabel,
        inner: Vec<(EdgeSpec, NodeLabel)>,
        min: u32,
        max: Option<u32>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Default,
    Trail,
    Acyclic,
}

#[derive(Clone, Debug)]
pub struct PathPattern {
    pub mode: Mode,
    pub start: NodeLabel,
    pub segments: Vec<(Segment, NodeLabel)>,
    /// The last node repeats the start node's variable.
    pub closes: bool,
}

const QUANTIFIERS: [(u32, Option<u32>, &str); 5] =
    [(0, Some(1), "?"), (1, None, "+"), (0, None, "*"), (1, Some(3), "{1,3}"), (2, Some(2), "{2,2}")];

fn node_label(rng: &mut ChaCha8Rng) -> NodeLabel {
    [NodeLabel::Any, NodeLabel::Any, NodeLabel::A, NodeLabel::B][rng.random_range(0..4)]
}

fn edge_spec(rng: &mut ChaCha8Rng) -> EdgeSpec {
    EdgeSpec {
        label: [EdgeLabel::Any, EdgeLabel::R, EdgeLabel::S][rng.random_range(0..3)],
        forward: rng.random_bool(0.7),
    }
}

pub fn random_pattern(rng: &mut ChaCha8Rng) -> PathPattern {
    let mode = [Mode::Default, Mode::Trail, Mode::Acyclic][rng.random_range(0..3)];
    let mut segments = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        let seg = if rng.random_bool(0.5) {
            let (min, max, _) = QUANTIFIERS[rng.random_range(0..QUANTIFIERS.len())];
            let inner = (0..rng.random_range(1..=2)).map(|_| (edge_spec(rng), node_label(rng))).collect();
            Segment::Group {
                start: node_label(rng),
                inner,
                min,
                max,
            }
        } else {
            Segment::Edge(edge_spec(rng))
        };
        segments.push((seg, node_label(rng)));
    }
    PathPattern {
        mode,
        start: node_label(rng),
        segments,
        closes: rng.random_bool(0.2),
    }
}

fn node_text(label: NodeLabel, alias: &str) -> String {
    match label {
        NodeLabel::Any => format!("({alias})"),
        NodeLabel::A => format!("({alias}:A)"),
        NodeLabel::B => format!("({alias}:B)"),
    }
}

fn edge_text(e: EdgeSpec) -> String {
    let label = match e.label {
        EdgeLabel::Any => "",
        EdgeLabel::R => ":r",
        EdgeLabel::S => ":s",
    };
    if e.forward {
        format!("-[{label}]->")
    } else {
        format!("<-[{label}]-")
    }
}

impl PathPattern {
    pub fn text(&self) -> String {
        let mode = match self.mode {
            Mode::Default => "",
            Mode::Trail => "TRAIL ",
            Mode::Acyclic => "ACYCLIC ",
        };
        let mut out = format!("MATCH {mode}p={}", node_text(self.start, "a"));
        for (i, (seg, label)) in self.segments.iter().enumerate() {
            match seg {
                Segment::Edge(e) => out.push_str(&edge_text(*e)),
                Segment::Group { start, inner, min, max } => {
                    out.push('[');
                    out.push_str(&node_text(*start, ""));
                    for (e, l) in inner {
                        out.push_str(&edge_text(*e));
                        out.push_str(&node_text(*l, ""));
                    }
                    out.push(']');
                    let q = QUANTIFIERS.iter().find(|q| q.0 == *min && q.1 == *max).unwrap();
                    out.push_str(q.2);
                }
            }
            let last = i + 1 == self.segments.len();
            out.push_str(&node_text(*label, if last && self.closes { "a" } else { "" }));
        }
        out
    }
}

/// One concrete step after quantifier expansion.
struct Flat {
    edge: EdgeSpec,
    /// Labels the node reached must carry.
    labels: Vec<NodeLabel>,
    /// Index of the repetition group this edge belongs to, if unbounded.
    guarded: Option<usize>,
}

fn conforms_node(g: &Graph, n: ElementId, l: NodeLabel) -> bool {
    match l {
        NodeLabel::Any | NodeLabel::A => true,
        NodeLabel::B => g.nodes.iter().any(|&(id, b)| id == n && b),
    }
}

fn conforms_edge(is_s: bool, l: EdgeLabel) -> bool {
    match l {
        EdgeLabel::Any | EdgeLabel::R => true,
        EdgeLabel::S => is_s,
    }
}

/// Every expansion of the quantifiers, as (start labels, flat steps).
fn expansions(p: &PathPattern, edge_total: usize) -> Vec<(Vec<NodeLabel>, Vec<Flat>)> {
    let mut out: Vec<(Vec<NodeLabel>, Vec<Flat>)> = vec![(vec![p.start], Vec::new())];
    for (gi, (seg, after)) in p.segments.iter().enumerate() {
        let mut next = Vec::new();
        for (start, flat) in out {
            match seg {
                Segment::Edge(e) => {
                    let mut f = clone_flat(&flat);
                    f.push(Flat {
                        edge: *e,
                        labels: vec![*after],
                        guarded: None,
                    });
                    next.push((start.clone(), f));
                }
                Segment::Group { start: s0, inner, min, max } => {
                    // distinct edges within the group caps unbounded repetition
                    let cap = max.unwrap_or((edge_total / inner.len()) as u32);
                    for k in *min..=cap {
                        let mut st = start.clone();
                        let mut f = clone_flat(&flat);
                        if k == 0 {
                            push_label(&mut st, &mut f, *after);
                        }
                        for rep in 0..k {
                            push_label(&mut st, &mut f, *s0);
                            for (j, (e, l)) in inner.iter().enumerate() {
                                let mut labels = vec![*l];
                                if rep + 1 == k && j + 1 == inner.len() {
                                    labels.push(*after);
                                }
                                f.push(Flat {
                                    edge: *e,
                                    labels,
                                    guarded: max.is_none().then_some(gi),
                                });
                            }
                        }
                        next.push((st, f));
                    }
                }
            }
        }
        out = next;
    }
    out
}

fn push_label(start: &mut Vec<NodeLabel>, flat: &mut [Flat], l: NodeLabel) {
    match flat.last_mut() {
        Some(f) => f.labels.push(l),
        None => start.push(l),
    }
}

fn clone_flat(f: &[Flat]) -> Vec<Flat> {
    f.iter()
        .map(|x| Flat {
            edge: x.edge,
            labels: x.labels.clone(),
            guarded: x.guarded,
        })
        .collect()
}

/// All matching paths, one per (expansion, walk), as element sequences.
pub fn enumerate(g: &Graph, p: &PathPattern) -> Vec<Vec<ElementRef>> {
    let mut rows = Vec::new();
    for (start, flat) in expansions(p, g.edges.len()) {
        for &(n, _) in &g.nodes {
            if start.iter().all(|&l| conforms_node(g, n, l)) {
                let mut path = vec![ElementRef::Node(n)];
                walk(g, p, &flat, &mut path, &mut rows);
            }
        }
    }
    rows
}

fn walk(g: &Graph, p: &PathPattern, flat: &[Flat], path: &mut Vec<ElementRef>, rows: &mut Vec<Vec<ElementRef>>) {
    let step = (path.len() - 1) / 2;
    let Some(f) = flat.get(step) else {
        if accept(g, p, flat, path) {
            rows.push(path.clone());
        }
        return;
    };
    let cur = path.last().unwrap().id();
    for &(id, src, dst, is_s) in &g.edges {
        let far = if f.edge.forward {
            (src == cur).then_some(dst)
        } else {
            (dst == cur).then_some(src)
        };
        let Some(far) = far else { continue };
        if !conforms_edge(is_s, f.edge.label) || !f.labels.iter().all(|&l| conforms_node(g, far, l)) {
            continue;
        }
        // every distinctness rule holds on prefixes, so violations prune early
        let e = ElementRef::Edge(id);
        let repeats_edge = |filter: &dyn Fn(usize) -> bool| {
            path.iter()
                .skip(1)
                .step_by(2)
                .enumerate()
                .any(|(i, x)| filter(i) && *x == e)
        };
        if p.mode == Mode::Trail && repeats_edge(&|_| true) {
            continue;
        }
        if f.guarded.is_some() && repeats_edge(&|i| flat[i].guarded == f.guarded) {
            continue;
        }
        if p.mode == Mode::Acyclic && path.iter().step_by(2).any(|x| x.id() == far) {
            continue;
        }
        path.push(ElementRef::Edge(id));
        path.push(ElementRef::Node(far));
        walk(g, p, flat, path, rows);
        path.truncate(path.len() - 2);
    }
}

fn all_distinct<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().all(|(i, x)| !items[..i].contains(x))
}

fn accept(_g: &Graph, p: &PathPattern, flat: &[Flat], path: &[ElementRef]) -> bool {
    let nodes: Vec<_> = path.iter().step_by(2).copied().collect();
    let edges: Vec<_> = path.iter().skip(1).step_by(2).copied().collect();
    if p.closes && nodes.first() != nodes.last() {
        return false;
    }
    match p.mode {
        Mode::Trail if !all_distinct(&edges) => return false,
        Mode::Acyclic if !all_distinct(&nodes) => return false,
        _ => {}
    }
    let groups: Vec<usize> = flat.iter().filter_map(|f| f.guarded).collect();
    groups.iter().all(|&gi| {
        let within: Vec<_> = edges
            .iter()
            .zip(flat)
            .filter(|(_, f)| f.guarded == Some(gi))
            .map(|(e, _)| *e)
            .collect();
        all_distinct(&within)
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
