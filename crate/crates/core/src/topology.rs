//! Agent graph and component covers.
//!
//! Vertices are addressed by their position in [`Graph::labels`]; the
//! external [`VertexId`] labels only appear at the boundary (config files,
//! error messages). A [`ComponentCover`] is a list of vertex subsets
//! `A_1..A_L` kept in a canonical sorted order, so component indices are
//! stable across runs.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    /// Sorted, deduplicated, each pair stored as `(i, j)` with `i < j`.
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds an undirected graph. Duplicate edges collapse; self-loops,
    /// duplicate vertices and dangling endpoints are rejected.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let labels: Vec<VertexId> = vertices.into_iter().collect();
        if labels.is_empty() {
            return Err(Error::InvalidGraph("vertex set is empty".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, &label) in labels.iter().enumerate() {
            if index.insert(label, i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex {label}")));
            }
        }
        let mut pairs = Vec::new();
        for (a, b) in edges {
            let ia = *index.get(&a).ok_or_else(|| {
                Error::InvalidGraph(format!("edge {{{a}, {b}}} references unknown vertex {a}"))
            })?;
            let ib = *index.get(&b).ok_or_else(|| {
                Error::InvalidGraph(format!("edge {{{a}, {b}}} references unknown vertex {b}"))
            })?;
            if ia == ib {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            pairs.push((ia.min(ib), ia.max(ib)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut neighbors = vec![Vec::new(); labels.len()];
        for &(i, j) in &pairs {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        Ok(Graph {
            labels,
            index,
            edges: pairs,
            neighbors,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[VertexId] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> VertexId {
        self.labels[v]
    }

    pub fn index_of(&self, label: VertexId) -> Option<usize> {
        self.index.get(&label).copied()
    }

    /// Edges as index pairs `(i, j)`, `i < j`, in sorted order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        self.edge_index(v, w).is_some()
    }

    /// Position of `{v, w}` in [`Graph::edges`].
    pub fn edge_index(&self, v: usize, w: usize) -> Option<usize> {
        let key = (v.min(w), v.max(w));
        self.edges.binary_search(&key).ok()
    }

    pub fn is_connected(&self) -> bool {
        let mut dsu = DisjointSets::new(self.len());
        for &(i, j) in &self.edges {
            dsu.union(i, j);
        }
        dsu.count() == 1
    }
}

/// Components `A_1..A_L` plus the incidence map `sigma(v) = {l : v in A_l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCover {
    components: Vec<Vec<usize>>,
    /// For each vertex, `(component, position of the vertex inside it)`.
    memberships: Vec<Vec<(usize, usize)>>,
}

impl ComponentCover {
    /// Builds a cover from vertex-index sets. Each set is sorted and
    /// deduplicated, then the list of sets is sorted lexicographically.
    /// Only well-formedness is checked here; see [`validate_cover`].
    pub fn new(num_vertices: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut components = Vec::with_capacity(sets.len());
        for (l, mut set) in sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidCover(format!("component {l} is empty")));
            }
            if let Some(&bad) = set.iter().find(|&&v| v >= num_vertices) {
                return Err(Error::InvalidCover(format!(
                    "component {l} references vertex index {bad} outside the graph"
                )));
            }
            set.sort_unstable();
            set.dedup();
            components.push(set);
        }
        if components.is_empty() {
            return Err(Error::InvalidCover("cover has no components".into()));
        }
        components.sort();
        let mut memberships = vec![Vec::new(); num_vertices];
        for (l, set) in components.iter().enumerate() {
            for (pos, &v) in set.iter().enumerate() {
                memberships[v].push((l, pos));
            }
        }
        Ok(ComponentCover {
            components,
            memberships,
        })
    }

    /// Same as [`ComponentCover::new`] but with sets given by vertex label.
    pub fn from_labels(graph: &Graph, sets: &[Vec<VertexId>]) -> Result<Self> {
        let sets = sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|&label| {
                        graph
                            .index_of(label)
                            .ok_or_else(|| Error::InvalidCover(format!("unknown vertex {label}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ComponentCover::new(graph.len(), sets)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.memberships.len()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, l: usize) -> &[usize] {
        &self.components[l]
    }

    /// `sigma(v)` with the position of `v` inside each component.
    pub fn memberships(&self, v: usize) -> &[(usize, usize)] {
        &self.memberships[v]
    }

    /// `sigma(v) = {l : v in A_l}`, ascending.
    pub fn sigma(&self, v: usize) -> Vec<usize> {
        self.memberships[v].iter().map(|&(l, _)| l).collect()
    }

    pub fn sigma_len(&self, v: usize) -> usize {
        self.memberships[v].len()
    }

    /// Whether the components are exactly the edges of `graph`, one each.
    pub fn is_edge_cover(&self, graph: &Graph) -> bool {
        self.components.len() == graph.edges().len()
            && self
                .components
                .iter()
                .zip(graph.edges())
                .all(|(set, &(i, j))| set.as_slice() == [i, j])
    }
}

/// `sigma_map(c)[v] = {l : v in A_l}`.
pub fn sigma_map(cover: &ComponentCover) -> Vec<Vec<usize>> {
    (0..cover.num_vertices()).map(|v| cover.sigma(v)).collect()
}

/// One component per edge, in sorted edge order.
pub fn edge_cover(graph: &Graph) -> Result<ComponentCover> {
    if graph.edges().is_empty() {
        return Err(Error::EmptyGraph);
    }
    let sets = graph.edges().iter().map(|&(i, j)| vec![i, j]).collect();
    ComponentCover::new(graph.len(), sets)
}

/// The single component `A_1 = V`.
pub fn full_cover(graph: &Graph) -> ComponentCover {
    ComponentCover::new(graph.len(), vec![(0..graph.len()).collect()])
        .expect("graph has at least one vertex")
}

/// Outcome of a successful [`validate_cover`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverReport {
    /// Components whose induced subgraph is not itself connected. Such
    /// covers are accepted, but averaging inside them needs a relay.
    pub disconnected_components: Vec<usize>,
}

/// Checks that the components cover every vertex and that the union of the
/// induced subgraphs `G(A_l)` is connected.
pub fn validate_cover(graph: &Graph, cover: &ComponentCover) -> Result<CoverReport> {
    if cover.num_vertices() != graph.len() {
        return Err(Error::InvalidCover(format!(
            "cover is built for {} vertices, graph has {}",
            cover.num_vertices(),
            graph.len()
        )));
    }
    if let Some(v) = (0..graph.len()).find(|&v| cover.sigma_len(v) == 0) {
        return Err(Error::CoverIncomplete {
            vertex: graph.label(v),
        });
    }

    let mut union = DisjointSets::new(graph.len());
    let mut report = CoverReport::default();
    let mut inside = vec![false; graph.len()];
    for (l, set) in cover.components().iter().enumerate() {
        for &v in set {
            inside[v] = true;
        }
        let mut local = DisjointSets::new(graph.len());
        for &(i, j) in graph.edges() {
            if inside[i] && inside[j] {
                union.union(i, j);
                local.union(i, j);
            }
        }
        let root = local.find(set[0]);
        if set.iter().any(|&v| local.find(v) != root) {
            report.disconnected_components.push(l);
        }
        for &v in set {
            inside[v] = false;
        }
    }

    if union.count() > 1 {
        let witness = graph
            .edges()
            .iter()
            .copied()
            .find(|&(i, j)| union.find(i) != union.find(j))
            .unwrap_or_else(|| {
                let other = (1..graph.len())
                    .find(|&v| union.find(v) != union.find(0))
                    .expect("more than one class");
                (0, other)
            });
        return Err(Error::UnionDisconnected {
            a: graph.label(witness.0),
            b: graph.label(witness.1),
        });
    }
    Ok(report)
}

struct DisjointSets {
    parent: Vec<usize>,
    classes: usize,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            classes: n,
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.classes -= 1;
        }
    }

    fn count(&self) -> usize {
        self.classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g5() -> Graph {
        Graph::new(1..=5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    fn sigma_len_of(cover: &ComponentCover, g: &Graph, label: VertexId) -> usize {
        cover.sigma_len(g.index_of(label).unwrap())
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(matches!(
            Graph::new([1, 2], [(1, 1)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            Graph::new([1, 2], [(1, 3)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            Graph::new([1, 1], []),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(Graph::new([], []), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn neighborhoods_match_edges() {
        let g = g5();
        assert_eq!(g.edges().len(), 5);
        let three = g.index_of(3).unwrap();
        let labels: Vec<_> = g.neighbors(three).iter().map(|&w| g.label(w)).collect();
        assert_eq!(labels, vec![2, 4, 5]);
        for &(i, j) in g.edges() {
            assert!(g.neighbors(i).contains(&j) && g.neighbors(j).contains(&i));
        }
    }

    #[test]
    fn g5_edge_cover_is_valid() {
        let g = g5();
        let cover = edge_cover(&g).unwrap();
        assert_eq!(cover.len(), 5);
        assert!(cover.is_edge_cover(&g));
        assert_eq!(validate_cover(&g, &cover).unwrap(), CoverReport::default());
    }

    #[test]
    fn incomplete_cover_names_missing_vertex() {
        let g = g5();
        let cover = ComponentCover::from_labels(&g, &[vec![1, 2], vec![4, 5]]).unwrap();
        assert_eq!(
            validate_cover(&g, &cover),
            Err(Error::CoverIncomplete { vertex: 3 })
        );
    }

    #[test]
    fn disconnected_union_names_crossing_pair() {
        let g = g5();
        let cover = ComponentCover::from_labels(&g, &[vec![1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(
            validate_cover(&g, &cover),
            Err(Error::UnionDisconnected { a: 2, b: 3 })
        );
    }

    #[test]
    fn sigma_sizes_on_g5_edge_cover() {
        let g = g5();
        let cover = edge_cover(&g).unwrap();
        assert_eq!(sigma_len_of(&cover, &g, 3), 3);
        assert_eq!(sigma_len_of(&cover, &g, 1), 1);
        let map = sigma_map(&cover);
        for (v, set) in map.iter().enumerate() {
            assert_eq!(set.len(), g.degree(v));
            for &l in set {
                assert!(cover.component(l).contains(&v));
            }
        }
    }

    #[test]
    fn full_cover_has_single_component() {
        let g = g5();
        let cover = full_cover(&g);
        assert_eq!(cover.len(), 1);
        assert_eq!(cover.component(0).len(), 5);
        assert!(sigma_map(&cover).iter().all(|s| s == &[0]));
        assert!(validate_cover(&g, &cover).is_ok());

        let single = Graph::new([1], []).unwrap();
        let cover = full_cover(&single);
        assert_eq!(cover.components(), &[vec![0]]);
        assert!(validate_cover(&single, &cover).is_ok());
    }

    #[test]
    fn small_edge_covers() {
        let path = Graph::new([1, 2], [(1, 2)]).unwrap();
        let cover = edge_cover(&path).unwrap();
        assert_eq!(cover.components(), &[vec![0, 1]]);

        let star = Graph::new(1..=4, [(1, 2), (1, 3), (1, 4)]).unwrap();
        let cover = edge_cover(&star).unwrap();
        assert_eq!(cover.len(), 3);
        assert_eq!(sigma_len_of(&cover, &star, 1), 3);

        let lonely = Graph::new([1], []).unwrap();
        assert_eq!(edge_cover(&lonely), Err(Error::EmptyGraph));
    }

    #[test]
    fn components_are_canonically_ordered() {
        let g = g5();
        let a = ComponentCover::from_labels(&g, &[vec![5, 3, 4], vec![2, 1], vec![3, 2]]).unwrap();
        let b = ComponentCover::from_labels(&g, &[vec![2, 3], vec![1, 2], vec![4, 3, 5]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.component(0), &[0, 1]);
    }

    #[test]
    fn warns_on_disconnected_component() {
        let g = g5();
        // {1, 3} induces no edge but the remaining components keep the union connected.
        let mut sets: Vec<Vec<VertexId>> = vec![vec![1, 3]];
        sets.extend([vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5]]);
        let cover = ComponentCover::from_labels(&g, &sets).unwrap();
        let report = validate_cover(&g, &cover).unwrap();
        assert_eq!(report.disconnected_components.len(), 1);
        assert_eq!(cover.component(report.disconnected_components[0]), &[0, 2]);
    }

    #[test]
    fn rejects_empty_component() {
        assert!(matches!(
            ComponentCover::new(3, vec![vec![0], vec![]]),
            Err(Error::InvalidCover(_))
        ));
    }
}
