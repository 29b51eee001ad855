//! Domain types and the lineage graph container.
//!
//! Edges are stored child→parent, the way designers attach their work to the
//! designs they remixed. Algorithms that need another orientation build it
//! themselves from [`LineageGraph::parent_indices`] and
//! [`LineageGraph::child_indices`].

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("design id must not be empty")]
    EmptyId,
    #[error("design `{0}` already exists")]
    DuplicateDesign(DesignId),
    #[error("design `{0}` lists itself as a parent")]
    SelfLoop(DesignId),
    #[error("edge {child} -> {parent} would close a cycle")]
    Cycle { child: DesignId, parent: DesignId },
    #[error("unknown design `{0}`")]
    UnknownDesign(DesignId),
}

/// Opaque design identifier. Never empty, compared byte-wise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DesignId(String);

impl DesignId {
    pub fn new(value: impl Into<String>) -> Result<Self, GraphError> {
        let value = value.into();
        let trimmed = value.trim();
        if trimmed.is_empty() {
            return Err(GraphError::EmptyId);
        }
        if trimmed.len() == value.len() {
            Ok(DesignId(value))
        } else {
            Ok(DesignId(trimmed.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for DesignId {
    type Error = GraphError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        DesignId::new(value)
    }
}

impl TryFrom<&str> for DesignId {
    type Error = GraphError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        DesignId::new(value)
    }
}

impl From<DesignId> for String {
    fn from(id: DesignId) -> String {
        id.0
    }
}

impl fmt::Display for DesignId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for DesignId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A set of normalized tags: lowercase, trimmed, internal whitespace collapsed.
///
/// Iteration order is sorted, which keeps every serialized form stable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TagSet(BTreeSet<String>);

impl TagSet {
    pub fn new() -> Self {
        TagSet(BTreeSet::new())
    }

    /// Normalizes one raw tag. Returns `None` when nothing is left.
    pub fn normalize_tag(raw: &str) -> Option<String> {
        let mut out = String::with_capacity(raw.len());
        for word in raw.split_whitespace() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.extend(word.chars().flat_map(char::to_lowercase));
        }
        (!out.is_empty()).then_some(out)
    }

    /// Inserts a raw tag after normalizing it. Returns whether the set grew.
    pub fn insert(&mut self, raw: &str) -> bool {
        match Self::normalize_tag(raw) {
            Some(tag) => self.0.insert(tag),
            None => false,
        }
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.0.contains(tag)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(String::as_str)
    }

    pub fn intersection_len(&self, other: &TagSet) -> usize {
        self.0.intersection(&other.0).count()
    }

    pub fn union_len(&self, other: &TagSet) -> usize {
        self.0.len() + other.0.len() - self.intersection_len(other)
    }
}

impl<S: AsRef<str>> FromIterator<S> for TagSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut set = TagSet::new();
        for raw in iter {
            set.insert(raw.as_ref());
        }
        set
    }
}

/// One design in the remix network.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub id: DesignId,
    pub title: String,
    pub author: String,
    pub created_at: Option<DateTime<Utc>>,
    pub tags: TagSet,
    pub parent_ids: Vec<DesignId>,
    pub is_stub: bool,
}

impl Design {
    pub fn new(id: DesignId) -> Self {
        Design {
            id,
            title: String::new(),
            author: String::new(),
            created_at: None,
            tags: TagSet::new(),
            parent_ids: Vec::new(),
            is_stub: false,
        }
    }

    /// Placeholder for a parent that was referenced but never described.
    pub fn stub(id: DesignId) -> Self {
        Design {
            is_stub: true,
            ..Design::new(id)
        }
    }

    pub fn with_tags(mut self, tags: TagSet) -> Self {
        self.tags = tags;
        self
    }

    pub fn with_parents(mut self, parents: impl IntoIterator<Item = DesignId>) -> Self {
        self.parent_ids = parents.into_iter().collect();
        self
    }
}

/// Dense node index into a [`LineageGraph`]. Stable for the life of the graph.
pub type NodeIx = usize;

/// The acyclic child→parent remix network.
///
/// Nodes are kept in insertion order; `parents[i]` is insertion ordered and
/// `children[i]` is kept sorted by design id.
#[derive(Debug, Clone, Default)]
pub struct LineageGraph {
    designs: Vec<Design>,
    index: HashMap<DesignId, NodeIx>,
    parents: Vec<Vec<NodeIx>>,
    children: Vec<Vec<NodeIx>>,
    edge_count: usize,
    stub_count: usize,
}

impl LineageGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of nodes, stubs included.
    pub fn node_count(&self) -> usize {
        self.designs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn stub_count(&self) -> usize {
        self.stub_count
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    pub fn contains(&self, id: &DesignId) -> bool {
        self.index.contains_key(id)
    }

    pub fn get(&self, id: &DesignId) -> Option<&Design> {
        self.index.get(id).map(|&ix| &self.designs[ix])
    }

    pub fn index_of(&self, id: &DesignId) -> Result<NodeIx, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownDesign(id.clone()))
    }

    pub fn design(&self, ix: NodeIx) -> &Design {
        &self.designs[ix]
    }

    /// All designs in insertion order, stubs included.
    pub fn designs(&self) -> impl ExactSizeIterator<Item = &Design> + '_ {
        self.designs.iter()
    }

    pub fn parent_indices(&self, ix: NodeIx) -> &[NodeIx] {
        &self.parents[ix]
    }

    pub fn child_indices(&self, ix: NodeIx) -> &[NodeIx] {
        &self.children[ix]
    }

    /// Node indices ordered by design id.
    pub fn sorted_indices(&self) -> Vec<NodeIx> {
        let mut ixs: Vec<NodeIx> = (0..self.designs.len()).collect();
        ixs.sort_unstable_by(|&a, &b| self.designs[a].id.cmp(&self.designs[b].id));
        ixs
    }

    /// Inserts a design, creating stubs for any parent that is not yet known.
    ///
    /// A stub with the same id is replaced in place and keeps its children.
    /// Repeated parent ids are collapsed to their first occurrence. The call
    /// is atomic: on error the graph is unchanged.
    pub fn add_design(&mut self, mut design: Design) -> Result<NodeIx, GraphError> {
        let mut seen = BTreeSet::new();
        design.parent_ids.retain(|p| seen.insert(p.clone()));
        if design.parent_ids.contains(&design.id) {
            return Err(GraphError::SelfLoop(design.id));
        }

        let existing = self.index.get(&design.id).copied();
        if let Some(ix) = existing {
            if !self.designs[ix].is_stub {
                return Err(GraphError::DuplicateDesign(design.id));
            }
            // A stub may already have descendants; a parent among them closes a cycle.
            for parent in &design.parent_ids {
                if let Some(&p) = self.index.get(parent) {
                    if self.reaches_ancestor(p, ix) {
                        return Err(GraphError::Cycle {
                            child: design.id.clone(),
                            parent: parent.clone(),
                        });
                    }
                }
            }
        }

        let parent_ids = std::mem::take(&mut design.parent_ids);
        let ix = match existing {
            Some(ix) => {
                if !design.is_stub {
                    self.stub_count -= 1;
                }
                self.designs[ix] = design;
                ix
            }
            None => self.push_node(design),
        };
        for parent in parent_ids {
            let p = self.resolve_or_stub(parent);
            self.link(ix, p);
        }
        Ok(ix)
    }

    /// Adds the edge `child -> parent`. Re-adding an existing edge is a no-op.
    pub fn add_edge(&mut self, child: &DesignId, parent: &DesignId) -> Result<(), GraphError> {
        if child == parent {
            return Err(GraphError::SelfLoop(child.clone()));
        }
        let c = self.index_of(child)?;
        let p = self.index_of(parent)?;
        if self.parents[c].contains(&p) {
            return Ok(());
        }
        if self.reaches_ancestor(p, c) {
            return Err(GraphError::Cycle {
                child: child.clone(),
                parent: parent.clone(),
            });
        }
        self.link(c, p);
        Ok(())
    }

    /// Inserts a stub for `id` unless a node already exists.
    pub fn ensure_node(&mut self, id: DesignId) -> NodeIx {
        self.resolve_or_stub(id)
    }

    pub fn parents_of(&self, id: &DesignId) -> Result<Vec<DesignId>, GraphError> {
        let ix = self.index_of(id)?;
        Ok(self.designs[ix].parent_ids.clone())
    }

    pub fn children_of(&self, id: &DesignId) -> Result<Vec<DesignId>, GraphError> {
        let ix = self.index_of(id)?;
        Ok(self.children[ix]
            .iter()
            .map(|&c| self.designs[c].id.clone())
            .collect())
    }

    /// Non-stub designs listing two or more parents, sorted by id.
    ///
    /// Stub parents count: the reference existed even if the parent did not.
    pub fn multi_parent_designs(&self) -> Vec<DesignId> {
        let mut out: Vec<DesignId> = self
            .designs
            .iter()
            .enumerate()
            .filter(|(ix, d)| !d.is_stub && self.parents[*ix].len() >= 2)
            .map(|(_, d)| d.id.clone())
            .collect();
        out.sort_unstable();
        out
    }

    /// Hop count of the shortest path ignoring edge direction.
    /// `None` when the designs sit in different weakly connected components.
    pub fn undirected_distance(&self, a: &DesignId, b: &DesignId) -> Result<Option<usize>, GraphError> {
        let a = self.index_of(a)?;
        let b = self.index_of(b)?;
        if a == b {
            return Ok(Some(0));
        }
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[a] = 0;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            for &w in self.parents[v].iter().chain(&self.children[v]) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    if w == b {
                        return Ok(Some(dist[w]));
                    }
                    queue.push_back(w);
                }
            }
        }
        Ok(None)
    }

    /// Undirected BFS hop counts from `source` to every node (`usize::MAX` if unreachable).
    pub fn undirected_distances_from(&self, source: NodeIx) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        self.undirected_bfs_into(source, &mut dist, &mut VecDeque::new());
        dist
    }

    pub(crate) fn undirected_bfs_into(&self, source: NodeIx, dist: &mut [usize], queue: &mut VecDeque<NodeIx>) {
        dist.fill(usize::MAX);
        queue.clear();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &w in self.parents[v].iter().chain(&self.children[v]) {
                if dist[w] == usize::MAX {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
    }

    /// Weakly connected components as lists of node indices. Each list is
    /// ascending and components are ordered by their smallest index.
    pub fn weak_components(&self) -> Vec<Vec<NodeIx>> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in self.parents[v].iter().chain(&self.children[v]) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Whether `to` is reachable from `from` following child→parent edges,
    /// i.e. `to` is an ancestor of `from` (or the same node).
    pub fn is_ancestor_or_self(&self, from: NodeIx, to: NodeIx) -> bool {
        self.reaches_ancestor(from, to)
    }

    /// Kahn's algorithm over child→parent edges. `None` means a cycle exists,
    /// which a graph built through this API never has.
    pub fn topological_order(&self) -> Option<Vec<NodeIx>> {
        let n = self.node_count();
        let mut pending: Vec<usize> = (0..n).map(|v| self.children[v].len()).collect();
        let mut ready: VecDeque<NodeIx> = (0..n).filter(|&v| pending[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_front() {
            order.push(v);
            for &p in &self.parents[v] {
                pending[p] -= 1;
                if pending[p] == 0 {
                    ready.push_back(p);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Edges whose child is timestamped strictly earlier than its parent.
    pub fn timestamp_violations(&self) -> usize {
        self.designs
            .iter()
            .enumerate()
            .map(|(c, child)| match child.created_at {
                Some(ct) => self.parents[c]
                    .iter()
                    .filter(|&&p| matches!(self.designs[p].created_at, Some(pt) if ct < pt))
                    .count(),
                None => 0,
            })
            .sum()
    }

    fn push_node(&mut self, design: Design) -> NodeIx {
        let ix = self.designs.len();
        if design.is_stub {
            self.stub_count += 1;
        }
        self.index.insert(design.id.clone(), ix);
        self.designs.push(design);
        self.parents.push(Vec::new());
        self.children.push(Vec::new());
        ix
    }

    fn resolve_or_stub(&mut self, id: DesignId) -> NodeIx {
        match self.index.get(&id) {
            Some(&ix) => ix,
            None => self.push_node(Design::stub(id)),
        }
    }

    fn link(&mut self, child: NodeIx, parent: NodeIx) {
        self.parents[child].push(parent);
        let parent_id = self.designs[parent].id.clone();
        self.designs[child].parent_ids.push(parent_id);
        let child_id = &self.designs[child].id;
        let designs = &self.designs;
        let siblings = &mut self.children[parent];
        let at = siblings.partition_point(|&s| designs[s].id < *child_id);
        siblings.insert(at, child);
        self.edge_count += 1;
    }

    fn reaches_ancestor(&self, from: NodeIx, to: NodeIx) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if p == to {
                    return true;
                }
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        false
    }
}
