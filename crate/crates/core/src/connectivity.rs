//! Blocking, z-adjacency and the Wolfrum connection criterion; connection
//! graphs, their transitive closure, Sturm balls, basins and reversors.
//!
//! Vertices are identified by axis position (`1..=N`), which is also their
//! id in the resulting [`ConnectionGraph`].

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Result, SturmError};
use crate::model::{ConnectionGraph, MeanderAnalysis, Reversor, Vertex};

/// Order along which blocking equilibria are required to lie between the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Betweenness {
    /// Meander order (boundary order at `x = 0`).
    Meander,
    /// Axis order (boundary order at `x = 1`).
    Axis,
}

/// Connection criterion bound to one analysis.
///
/// [`Wolfrum::new`] insists on the Morse property; [`Wolfrum::formal`] applies
/// the same recursions to non-Morse meanders, where the result carries no
/// dynamical meaning but still obeys the suspension identities.
#[derive(Clone, Copy, Debug)]
pub struct Wolfrum<'a> {
    analysis: &'a MeanderAnalysis,
    order: Betweenness,
}

impl<'a> Wolfrum<'a> {
    pub fn new(analysis: &'a MeanderAnalysis) -> Result<Self> {
        if let Some((j, &i)) = analysis.morse().iter().enumerate().find(|(_, &i)| i < 0) {
            return Err(SturmError::NotMorse {
                position: j + 1,
                morse: i,
            });
        }
        Ok(Self::formal(analysis))
    }

    pub fn formal(analysis: &'a MeanderAnalysis) -> Self {
        Self {
            analysis,
            order: Betweenness::Meander,
        }
    }

    pub fn with_order(mut self, order: Betweenness) -> Self {
        self.order = order;
        self
    }

    pub fn analysis(&self) -> &'a MeanderAnalysis {
        self.analysis
    }

    fn rank(&self, v: usize) -> usize {
        match self.order {
            Betweenness::Meander => self.analysis.sigma().at(v),
            Betweenness::Axis => v,
        }
    }

    fn vertex_at_rank(&self, k: usize) -> usize {
        match self.order {
            Betweenness::Meander => self.analysis.axis_of(k),
            Betweenness::Axis => k,
        }
    }

    fn between(&self, w: usize, v1: usize, v2: usize) -> bool {
        let (a, b, c) = (self.rank(v1), self.rank(w), self.rank(v2));
        (a < b && b < c) || (c < b && b < a)
    }

    /// `w` lies strictly between `v1` and `v2` and has the same zero number
    /// to both of them as they have to each other.
    pub fn blocks(&self, w: usize, v1: usize, v2: usize) -> bool {
        if w == v1 || w == v2 || v1 == v2 || !self.between(w, v1, v2) {
            return false;
        }
        let z = |a, b| self.analysis.zero_axis(a, b);
        let z12 = z(v1, v2);
        z(v1, w) == z12 && z(w, v2) == z12
    }

    /// No equilibrium between `v1` and `v2` blocks them.
    pub fn z_adjacent(&self, v1: usize, v2: usize) -> bool {
        if v1 == v2 {
            return false;
        }
        let (lo, hi) = {
            let (a, b) = (self.rank(v1), self.rank(v2));
            (a.min(b), a.max(b))
        };
        let z12 = self.analysis.zero_axis(v1, v2);
        !(lo + 1..hi).any(|k| {
            let w = self.vertex_at_rank(k);
            self.analysis.zero_axis(v1, w) == z12 && self.analysis.zero_axis(w, v2) == z12
        })
    }

    /// Heteroclinic orbit `v1 ~> v2` exists.
    pub fn connects(&self, v1: usize, v2: usize) -> bool {
        let m = |v| self.analysis.morse_axis(v);
        m(v1) > m(v2) && self.z_adjacent(v1, v2)
    }

    /// All connected pairs, any Morse gap.
    pub fn relation(&self) -> BTreeSet<(usize, usize)> {
        let n = self.analysis.n();
        let mut out = BTreeSet::new();
        for v1 in 1..=n {
            for v2 in 1..=n {
                if self.connects(v1, v2) {
                    out.insert((v1, v2));
                }
            }
        }
        out
    }

    /// Connected pairs with Morse drop exactly one.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let n = self.analysis.n();
        let mut out = BTreeSet::new();
        for v1 in 1..=n {
            let i1 = self.analysis.morse_axis(v1);
            for v2 in 1..=n {
                if self.analysis.morse_axis(v2) + 1 == i1 && self.z_adjacent(v1, v2) {
                    out.insert((v1, v2));
                }
            }
        }
        out
    }

    pub fn graph(&self) -> Result<ConnectionGraph> {
        let vertices = (1..=self.analysis.n())
            .map(|p| Vertex {
                id: p,
                position: p,
                morse: self.analysis.morse_axis(p),
                label: None,
            })
            .collect();
        ConnectionGraph::new(vertices, self.edges())
    }
}

pub fn blocks(w: usize, v1: usize, v2: usize, analysis: &MeanderAnalysis) -> Result<bool> {
    Ok(Wolfrum::new(analysis)?.blocks(w, v1, v2))
}

pub fn z_adjacent(v1: usize, v2: usize, analysis: &MeanderAnalysis) -> Result<bool> {
    Ok(Wolfrum::new(analysis)?.z_adjacent(v1, v2))
}

pub fn connects(v1: usize, v2: usize, analysis: &MeanderAnalysis) -> Result<bool> {
    Ok(Wolfrum::new(analysis)?.connects(v1, v2))
}

pub fn connection_graph(analysis: &MeanderAnalysis) -> Result<ConnectionGraph> {
    Wolfrum::new(analysis)?.graph()
}

/// Every pair connected by the Wolfrum criterion, regardless of Morse gap.
pub fn wolfrum_relation(analysis: &MeanderAnalysis) -> Result<BTreeSet<(usize, usize)>> {
    Ok(Wolfrum::new(analysis)?.relation())
}

/// Vertices reachable from `start` along edges, excluding `start`.
pub fn descendants(graph: &ConnectionGraph, start: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for w in graph.successors(v) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// Transitive closure of the edge relation (no reflexive pairs).
pub fn full_heteroclinic_relation(graph: &ConnectionGraph) -> BTreeSet<(usize, usize)> {
    graph
        .vertices()
        .iter()
        .flat_map(|v| descendants(graph, v.id).into_iter().map(move |w| (v.id, w)))
        .collect()
}

/// The top vertex if its Morse index is attained only once and it reaches
/// every other vertex.
pub fn sturm_ball_top(graph: &ConnectionGraph) -> Option<usize> {
    let d = graph.dimension();
    let mut tops = graph.vertices().iter().filter(|v| v.morse == d);
    let top = tops.next()?.id;
    if tops.next().is_some() {
        return None;
    }
    (descendants(graph, top).len() + 1 == graph.vertices().len()).then_some(top)
}

pub fn is_sturm_ball(graph: &ConnectionGraph) -> bool {
    sturm_ball_top(graph).is_some()
}

/// For each sink, the sink itself and every vertex with a (cascading)
/// heteroclinic orbit to it.
pub fn basins(graph: &ConnectionGraph) -> BTreeMap<usize, BTreeSet<usize>> {
    let closure = full_heteroclinic_relation(graph);
    graph
        .vertices()
        .iter()
        .filter(|v| v.morse == 0)
        .map(|sink| {
            let mut basin: BTreeSet<usize> = closure
                .iter()
                .filter(|&&(_, b)| b == sink.id)
                .map(|&(a, _)| a)
                .collect();
            basin.insert(sink.id);
            (sink.id, basin)
        })
        .collect()
}

struct ReversorSearch<'g> {
    graph: &'g ConnectionGraph,
    order: Vec<usize>,
    candidates: BTreeMap<usize, Vec<usize>>,
    assignment: BTreeMap<usize, usize>,
}

impl ReversorSearch<'_> {
    fn consistent(&self, x: usize) -> bool {
        let rx = self.assignment[&x];
        self.assignment.iter().all(|(&u, &ru)| {
            self.graph.has_edge(x, u) == self.graph.has_edge(ru, rx)
                && self.graph.has_edge(u, x) == self.graph.has_edge(rx, ru)
        })
    }

    fn run(&mut self, k: usize) -> bool {
        let Some(&v) = self.order.get(k) else {
            return true;
        };
        if self.assignment.contains_key(&v) {
            return self.run(k + 1);
        }
        for w in self.candidates[&v].clone() {
            if self.assignment.contains_key(&w) {
                continue;
            }
            self.assignment.insert(v, w);
            self.assignment.insert(w, v);
            if self.consistent(v) && self.consistent(w) && self.run(k + 1) {
                return true;
            }
            self.assignment.remove(&v);
            self.assignment.remove(&w);
        }
        false
    }
}

/// Searches for an involution on the graph minus its top vertex that maps
/// Morse index `i` to `d-1-i` and reverses every edge. A verified `hint` is
/// returned directly.
pub fn find_reversor(graph: &ConnectionGraph, hint: Option<&Reversor>) -> Result<Reversor> {
    let top = sturm_ball_top(graph).ok_or(SturmError::NotABall)?;
    if let Some(h) = hint {
        if h.top() == top && h.verify(graph).is_ok() {
            return Ok(h.clone());
        }
    }
    let d = graph.dimension();
    let rest: Vec<&Vertex> = graph.vertices().iter().filter(|v| v.id != top).collect();

    let mut levels: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for v in &rest {
        levels.entry(v.morse).or_default().push(v.id);
    }
    for i in 0..d {
        let len = |k| levels.get(&k).map_or(0, Vec::len);
        if len(i) != len(d - 1 - i) {
            return Err(SturmError::NotReversible);
        }
    }

    let mut indeg: BTreeMap<usize, usize> = rest.iter().map(|v| (v.id, 0)).collect();
    let mut outdeg = indeg.clone();
    for &(a, b) in graph.edges() {
        if a != top && b != top {
            *outdeg.get_mut(&a).unwrap() += 1;
            *indeg.get_mut(&b).unwrap() += 1;
        }
    }

    let candidates = rest
        .iter()
        .map(|v| {
            let c = levels
                .get(&(d - 1 - v.morse))
                .into_iter()
                .flatten()
                .copied()
                .filter(|&w| indeg[&v.id] == outdeg[&w] && outdeg[&v.id] == indeg[&w])
                .collect::<Vec<_>>();
            (v.id, c)
        })
        .collect::<BTreeMap<_, _>>();
    if candidates.values().any(Vec::is_empty) {
        return Err(SturmError::NotReversible);
    }

    // breadth-first from the top level keeps each new vertex tied to assigned ones
    let mut order = Vec::with_capacity(rest.len());
    let mut seen = BTreeSet::new();
    let mut queue: std::collections::VecDeque<usize> = graph.successors(top).collect();
    for v in levels.values().rev().flatten() {
        queue.push_back(*v);
    }
    while let Some(v) = queue.pop_front() {
        if v == top || !seen.insert(v) {
            continue;
        }
        order.push(v);
        queue.extend(graph.successors(v));
    }

    let mut search = ReversorSearch {
        graph,
        order,
        candidates,
        assignment: BTreeMap::new(),
    };
    if !search.run(0) {
        return Err(SturmError::NotReversible);
    }
    let reversor = Reversor::from_pairs(top, search.assignment)?;
    reversor
        .verify(graph)
        .map_err(|e| SturmError::ConsistencyFailure(format!("reversor search: {e}")))?;
    Ok(reversor)
}
