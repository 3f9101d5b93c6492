//! Simple connected undirected graphs with positive integer weights, and the
//! plain-text edge-list format they are read from.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: Vertex,
    pub b: Vertex,
    pub weight: u64,
}

impl Edge {
    pub fn new(a: Vertex, b: Vertex, weight: u64) -> Self {
        Edge { a, b, weight }
    }

    /// The endpoint opposite to `x`. `x` must be an endpoint.
    pub fn other(&self, x: Vertex) -> Vertex {
        debug_assert!(x == self.a || x == self.b);
        if x == self.a {
            self.b
        } else {
            self.a
        }
    }

    fn unordered(&self) -> (Vertex, Vertex) {
        (self.a.min(self.b), self.a.max(self.b))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed input: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("edge {edge}: weight must be a positive integer")]
    NonPositiveWeight { edge: EdgeId },
    #[error("edge {edge}: self-loop on vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: Vertex },
    #[error("edge {edge}: duplicates edge {first} between {a} and {b}")]
    DuplicateEdge {
        edge: EdgeId,
        first: EdgeId,
        a: Vertex,
        b: Vertex,
    },
    #[error("edge {edge}: endpoint {vertex} out of range for {n} vertices")]
    VertexOutOfRange { edge: EdgeId, vertex: Vertex, n: usize },
    #[error("header declares {declared} edges but {found} were given")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("graph is disconnected: vertex {unreached} is not reachable from vertex 0")]
    Disconnected { unreached: Vertex },
    #[error("graph has no vertices")]
    Empty,
}

/// Validated simple connected graph. Edge ids are positions in `edges()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(Vertex, EdgeId)>>,
    by_endpoints: HashMap<(Vertex, Vertex), EdgeId>,
}

impl Graph {
    /// Build and validate.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Graph, GraphError> {
        validate(n, &edges)?;
        let mut adjacency = vec![Vec::new(); n];
        let mut by_endpoints = HashMap::with_capacity(edges.len());
        for (id, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, id));
            adjacency[e.b].push((e.a, id));
            by_endpoints.insert(e.unordered(), id);
        }
        // Ascending neighbour order keeps every traversal deterministic.
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adjacency,
            by_endpoints,
        })
    }

    pub fn from_triples(n: usize, triples: &[(Vertex, Vertex, u64)]) -> Result<Graph, GraphError> {
        Graph::new(n, triples.iter().map(|&(a, b, w)| Edge::new(a, b, w)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// `(neighbour, edge id)` pairs, ascending by neighbour.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, a: Vertex, b: Vertex) -> Option<EdgeId> {
        self.by_endpoints.get(&(a.min(b), a.max(b))).copied()
    }

    /// Parse the text edge-list format: `#` comments, a `n m` header, then
    /// `m` lines of `a b w`.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(GraphError::Malformed {
            line: 1,
            reason: "missing `n m` header".into(),
        })?;
        let header = parse_fields::<2>(header_line, header)?;
        let (n, m) = (header[0] as usize, header[1] as usize);
        if n == 0 {
            return Err(GraphError::Empty);
        }

        let mut edges = Vec::with_capacity(m);
        for (line, body) in lines {
            let [a, b, w] = parse_fields::<3>(line, body)?;
            if w == 0 {
                return Err(GraphError::NonPositiveWeight { edge: edges.len() });
            }
            edges.push(Edge::new(a as usize, b as usize, w));
        }
        if edges.len() != m {
            return Err(GraphError::EdgeCountMismatch {
                declared: m,
                found: edges.len(),
            });
        }
        Graph::new(n, edges)
    }

    /// Inverse of [`Graph::parse`].
    pub fn emit(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.edges.len()).unwrap();
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.a, e.b, e.weight).unwrap();
        }
        out
    }
}

fn parse_fields<const N: usize>(line: usize, body: &str) -> Result<[u64; N], GraphError> {
    let mut out = [0u64; N];
    let mut fields = body.split_whitespace();
    for slot in out.iter_mut() {
        let tok = fields.next().ok_or_else(|| GraphError::Malformed {
            line,
            reason: format!("expected {N} integers, got `{body}`"),
        })?;
        if let Some(rest) = tok.strip_prefix('-') {
            if rest.chars().all(|c| c.is_ascii_digit()) && !rest.is_empty() {
                return Err(GraphError::Malformed {
                    line,
                    reason: format!("negative value `{tok}`"),
                });
            }
        }
        *slot = tok.parse().map_err(|_| GraphError::Malformed {
            line,
            reason: format!("`{tok}` is not a nonnegative integer"),
        })?;
    }
    if fields.next().is_some() {
        return Err(GraphError::Malformed {
            line,
            reason: format!("expected {N} integers, got `{body}`"),
        });
    }
    Ok(out)
}

/// Check every graph invariant: ids in range, weights ≥ 1, no self-loops,
/// no duplicate unordered pairs, connected.
pub fn validate(n: usize, edges: &[Edge]) -> Result<(), GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut seen: HashMap<(Vertex, Vertex), EdgeId> = HashMap::with_capacity(edges.len());
    let mut adjacency = vec![Vec::new(); n];
    for (id, e) in edges.iter().enumerate() {
        for v in [e.a, e.b] {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { edge: id, vertex: v, n });
            }
        }
        if e.weight == 0 {
            return Err(GraphError::NonPositiveWeight { edge: id });
        }
        if e.a == e.b {
            return Err(GraphError::SelfLoop { edge: id, vertex: e.a });
        }
        if let Some(&first) = seen.get(&e.unordered()) {
            return Err(GraphError::DuplicateEdge {
                edge: id,
                first,
                a: e.a,
                b: e.b,
            });
        }
        seen.insert(e.unordered(), id);
        adjacency[e.a].push(e.b);
        adjacency[e.b].push(e.a);
    }

    let mut reached = vec![false; n];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adjacency[x] {
            if !reached[y] {
                reached[y] = true;
                stack.push(y);
            }
        }
    }
    match reached.iter().position(|r| !r) {
        Some(unreached) => Err(GraphError::Disconnected { unreached }),
        None => Ok(()),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FailureSetError {
    #[error("edge id {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("no edge between vertices {0} and {1}")]
    NoSuchEdge(Vertex, Vertex),
}

/// Sorted, duplicate-free set of failed edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FailureSet {
    ids: Vec<EdgeId>,
}

impl FailureSet {
    pub fn empty() -> Self {
        FailureSet::default()
    }

    /// Sorts and deduplicates `ids`, rejecting ids that are not edges of `g`.
    pub fn new(g: &Graph, ids: impl IntoIterator<Item = EdgeId>) -> Result<Self, FailureSetError> {
        let mut ids: Vec<EdgeId> = ids.into_iter().collect();
        if let Some(&bad) = ids.iter().find(|&&id| id >= g.edge_count()) {
            return Err(FailureSetError::UnknownEdge(bad));
        }
        ids.sort_unstable();
        ids.dedup();
        Ok(FailureSet { ids })
    }

    /// Failures named by their endpoint pairs.
    pub fn from_endpoints(
        g: &Graph,
        pairs: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, FailureSetError> {
        let ids = pairs
            .into_iter()
            .map(|(a, b)| g.edge_between(a, b).ok_or(FailureSetError::NoSuchEdge(a, b)))
            .collect::<Result<Vec<_>, _>>()?;
        FailureSet::new(g, ids)
    }

    /// Caller guarantees `ids` is strictly increasing and in range.
    pub(crate) fn from_sorted_unchecked(ids: Vec<EdgeId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        FailureSet { ids }
    }

    pub fn ids(&self) -> &[EdgeId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    /// V(D): endpoints of all failed edges, sorted and deduplicated.
    pub fn endpoints(&self, g: &Graph) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self
            .ids
            .iter()
            .flat_map(|&id| {
                let e = g.edge(id);
                [e.a, e.b]
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Edge-removal mask over all edge ids of a graph with `m` edges.
    pub fn mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &id in &self.ids {
            mask[id] = true;
        }
        mask
    }
}

/// Small graphs used throughout the tests and examples.
pub mod fixtures {
    use super::Graph;

    /// 4-cycle: e0=(0,1,1), e1=(1,2,2), e2=(2,3,1), e3=(0,3,5).
    pub fn g1() -> Graph {
        Graph::from_triples(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 3, 5)]).unwrap()
    }

    /// Star around vertex 0: f0=(0,1,1), f1=(0,2,1), f2=(0,3,1).
    pub fn g3() -> Graph {
        Graph::from_triples(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap()
    }

    /// Path 0-1-2-3-4 with detours 1-5-2 and 3-6-2.
    pub fn g6() -> Graph {
        Graph::from_triples(
            7,
            &[
                (0, 1, 1),
                (1, 2, 1),
                (2, 3, 1),
                (3, 4, 1),
                (1, 5, 1),
                (5, 2, 3),
                (3, 6, 1),
                (6, 2, 3),
            ],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const G1_TEXT: &str = "# fixture G1\n4 4\n0 1 1\n1 2 2\n2 3 1\n0 3 5\n";

    #[test]
    fn parses_g1() {
        let g = Graph::parse(G1_TEXT).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g, fixtures::g1());
        assert_eq!(g.edge_between(3, 0), Some(3));
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::parse("2 2\n0 1 1\n0 0 5\n").unwrap_err();
        assert_eq!(err, GraphError::SelfLoop { edge: 1, vertex: 0 });
    }

    #[test]
    fn rejects_disconnected() {
        let err = Graph::parse("4 2\n0 1 1\n2 3 1\n").unwrap_err();
        assert!(matches!(err, GraphError::Disconnected { .. }));
    }

    #[test]
    fn rejects_zero_weight() {
        let err = Graph::from_triples(2, &[(0, 1, 0)]).unwrap_err();
        assert_eq!(err, GraphError::NonPositiveWeight { edge: 0 });
        assert!(matches!(
            Graph::parse("2 1\n0 1 0\n"),
            Err(GraphError::NonPositiveWeight { edge: 0 })
        ));
        assert!(matches!(
            Graph::parse("2 1\n0 1 -3\n"),
            Err(GraphError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_reversed_duplicate() {
        let err = Graph::from_triples(2, &[(0, 1, 1), (1, 0, 2)]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge { edge: 1, first: 0, .. }));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(Graph::parse(""), Err(GraphError::Malformed { .. })));
        assert!(matches!(
            Graph::parse("2 1\n0 1\n"),
            Err(GraphError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            Graph::parse("2 1\n0 1 x\n"),
            Err(GraphError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            Graph::parse("2 2\n0 1 1\n"),
            Err(GraphError::EdgeCountMismatch { declared: 2, found: 1 })
        ));
        assert!(matches!(
            Graph::parse("2 1\n0 2 1\n"),
            Err(GraphError::VertexOutOfRange { vertex: 2, .. })
        ));
    }

    #[test]
    fn fixtures_validate() {
        for g in [fixtures::g1(), fixtures::g3(), fixtures::g6()] {
            assert!(validate(g.vertex_count(), g.edges()).is_ok());
        }
    }

    #[test]
    fn failure_set_is_canonical() {
        let g = fixtures::g1();
        let d = FailureSet::new(&g, [3, 1, 3]).unwrap();
        assert_eq!(d.ids(), &[1, 3]);
        assert_eq!(d.endpoints(&g), vec![0, 1, 2, 3]);
        assert_eq!(FailureSet::new(&g, [4]), Err(FailureSetError::UnknownEdge(4)));
        assert_eq!(FailureSet::from_endpoints(&g, [(2, 1)]).unwrap().ids(), &[1]);
        assert_eq!(
            FailureSet::from_endpoints(&g, [(0, 2)]),
            Err(FailureSetError::NoSuchEdge(0, 2))
        );
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..9)
            .prop_flat_map(|n| {
                let tree = proptest::collection::vec((0usize..1000, 1u64..50), n - 1);
                let extra = proptest::collection::vec((0..n, 0..n, 1u64..50), 0..12);
                (Just(n), tree, extra)
            })
            .prop_map(|(n, tree, extra)| {
                let mut triples = Vec::new();
                let mut seen = std::collections::HashSet::new();
                for (i, (p, w)) in tree.into_iter().enumerate() {
                    let child = i + 1;
                    let parent = p % child;
                    seen.insert((parent, child));
                    triples.push((child, parent, w));
                }
                for (a, b, w) in extra {
                    if a != b && seen.insert((a.min(b), a.max(b))) {
                        triples.push((a, b, w));
                    }
                }
                Graph::from_triples(n, &triples).unwrap()
            })
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(g in arb_graph()) {
            let text = g.emit();
            let back = Graph::parse(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.emit(), text);
        }
    }
}
