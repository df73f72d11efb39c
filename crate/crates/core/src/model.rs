//! Shared value types: permutations, arc diagrams, Morse/zero analyses,
//! connection graphs and reversors.
//!
//! Positions and values are 1-based in every public interface. Equilibria are
//! identified with their axis position `j` (the `h1` order); `sigma(j)` is the
//! position of that vertex along the meander curve (the `h0` order).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SturmError};

/// One-line permutation `sigma(1) .. sigma(n)` with 1-based values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MeanderPermutation {
    map: Vec<usize>,
}

impl MeanderPermutation {
    /// Validates that `map` is a bijection on `1..=map.len()`.
    ///
    /// Even lengths are accepted here and rejected once Morse data is requested.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(SturmError::Empty);
        }
        let mut seen = vec![false; n + 1];
        for &v in &map {
            if v == 0 || v > n {
                return Err(SturmError::NotABijection {
                    n,
                    detail: format!("value {v} out of range"),
                });
            }
            if seen[v] {
                return Err(SturmError::NotABijection {
                    n,
                    detail: format!("value {v} repeated"),
                });
            }
            seen[v] = true;
        }
        Ok(Self { map })
    }

    /// Whitespace or comma separated integers; surrounding parentheses are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let map = text
            .split(|c: char| c.is_whitespace() || c == ',' || c == '(' || c == ')')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| SturmError::Parse { token: t.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(map)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (1..=n).collect(),
        }
    }

    /// The order-reversing flip `j -> n+1-j`.
    pub fn flip(n: usize) -> Self {
        Self {
            map: (1..=n).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_odd_length(&self) -> bool {
        self.map.len() % 2 == 1
    }

    /// `sigma(j)` for 1-based `j`.
    #[inline]
    pub fn at(&self, j: usize) -> usize {
        self.map[j - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (j, &v) in self.map.iter().enumerate() {
            inv[v - 1] = j + 1;
        }
        Self { map: inv }
    }

    /// Composition `self ∘ other`, i.e. `j -> self(other(j))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different size");
        Self {
            map: other.map.iter().map(|&j| self.at(j)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(j, &v)| v == j + 1)
    }
}

impl TryFrom<Vec<usize>> for MeanderPermutation {
    type Error = SturmError;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Self::new(map)
    }
}

impl From<MeanderPermutation> for Vec<usize> {
    fn from(p: MeanderPermutation) -> Self {
        p.map
    }
}

impl FromStr for MeanderPermutation {
    type Err = SturmError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for MeanderPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.map.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MeanderPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// An arc between two axis positions, stored with `left < right`.
pub type Arc = (usize, usize);

/// Upper and lower arc matchings over `n` axis positions.
///
/// Arcs on one side may cross; crossing is a property checked by the
/// meander routines, not forbidden by the type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcDiagram {
    n: usize,
    upper: Vec<Arc>,
    lower: Vec<Arc>,
}

impl ArcDiagram {
    pub fn new(n: usize, upper: Vec<Arc>, lower: Vec<Arc>) -> Result<Self> {
        if n == 0 {
            return Err(SturmError::Empty);
        }
        let normalize = |arcs: Vec<Arc>, side: &str| -> Result<Vec<Arc>> {
            let mut used = vec![false; n + 1];
            let mut out = Vec::with_capacity(arcs.len());
            for (a, b) in arcs {
                let (l, r) = if a < b { (a, b) } else { (b, a) };
                if l == 0 || r > n || l == r {
                    return Err(SturmError::BadDiagram(format!(
                        "{side} arc ({a},{b}) is not a pair of distinct positions in 1..{n}"
                    )));
                }
                for p in [l, r] {
                    if used[p] {
                        return Err(SturmError::BadDiagram(format!(
                            "position {p} carries two {side} arcs"
                        )));
                    }
                    used[p] = true;
                }
                out.push((l, r));
            }
            out.sort_unstable();
            Ok(out)
        };
        let upper = normalize(upper, "upper")?;
        let lower = normalize(lower, "lower")?;
        let diagram = Self { n, upper, lower };
        if n > 1 {
            let deg = diagram.degrees();
            let isolated = (1..=n).filter(|&p| deg[p] == 0).count();
            let ends = (1..=n).filter(|&p| deg[p] == 1).count();
            if isolated > 0 || ends != 2 {
                return Err(SturmError::BadDiagram(format!(
                    "expected exactly two degree-1 terminals and no isolated positions \
                     (found {ends} terminals, {isolated} isolated)"
                )));
            }
        }
        Ok(diagram)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[Arc] {
        &self.upper
    }

    pub fn lower(&self) -> &[Arc] {
        &self.lower
    }

    fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n + 1];
        for &(a, b) in self.upper.iter().chain(&self.lower) {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Positions of degree at most one.
    pub fn terminals(&self) -> Vec<usize> {
        let deg = self.degrees();
        (1..=self.n).filter(|&p| deg[p] <= 1).collect()
    }

    /// Partner of `pos` across an upper arc.
    pub fn upper_partner(&self, pos: usize) -> Option<usize> {
        partner(&self.upper, pos)
    }

    pub fn lower_partner(&self, pos: usize) -> Option<usize> {
        partner(&self.lower, pos)
    }

    /// Connected components of the curve(s) drawn by the diagram.
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for &(a, b) in self.upper.iter().chain(&self.lower) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (1..=self.n).filter(|&p| find(&mut parent, p) == p).count()
    }
}

fn partner(arcs: &[Arc], pos: usize) -> Option<usize> {
    arcs.iter().find_map(|&(a, b)| {
        if a == pos {
            Some(b)
        } else if b == pos {
            Some(a)
        } else {
            None
        }
    })
}

/// Morse numbers and zero numbers of a dissipative meander.
///
/// Both arrays are indexed by meander order: `morse_h0(j)` is the Morse number
/// of the `j`-th vertex along the curve, `zero(j, k)` the zero number between
/// the `j`-th and `k`-th. The `*_axis` accessors translate from axis positions.
#[derive(Clone, Debug)]
pub struct MeanderAnalysis {
    pub(crate) sigma: MeanderPermutation,
    pub(crate) inverse: MeanderPermutation,
    pub(crate) morse: Vec<i32>,
    /// Dense row-major matrix, absent above the dense size limit.
    pub(crate) zero: Option<Vec<i32>>,
}

impl MeanderAnalysis {
    pub fn sigma(&self) -> &MeanderPermutation {
        &self.sigma
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    /// Morse numbers `i_1 .. i_N` in meander order.
    pub fn morse(&self) -> &[i32] {
        &self.morse
    }

    pub fn morse_h0(&self, j: usize) -> i32 {
        self.morse[j - 1]
    }

    /// Morse number of the vertex at axis position `pos`.
    pub fn morse_axis(&self, pos: usize) -> i32 {
        self.morse[self.sigma.at(pos) - 1]
    }

    /// Morse numbers listed in axis order.
    pub fn morse_by_axis(&self) -> Vec<i32> {
        (1..=self.n()).map(|p| self.morse_axis(p)).collect()
    }

    /// Axis position of the `j`-th vertex along the meander.
    pub fn axis_of(&self, j: usize) -> usize {
        self.inverse.at(j)
    }

    /// Zero number `z_{jk}` in meander order.
    pub fn zero(&self, j: usize, k: usize) -> i32 {
        let n = self.n();
        match &self.zero {
            Some(m) => m[(j - 1) * n + (k - 1)],
            None => crate::kernel::zero_column(&self.inverse, &self.morse, k)
                .map(|col| col[j - 1])
                .expect("zero column of a validated analysis"),
        }
    }

    /// Zero number between the vertices at axis positions `a` and `b`.
    pub fn zero_axis(&self, a: usize, b: usize) -> i32 {
        self.zero(self.sigma.at(a), self.sigma.at(b))
    }

    pub fn is_morse(&self) -> bool {
        self.morse.iter().all(|&i| i >= 0)
    }

    pub fn dimension(&self) -> i32 {
        self.morse.iter().copied().max().unwrap_or(0)
    }

    pub fn min_morse(&self) -> i32 {
        self.morse.iter().copied().min().unwrap_or(0)
    }

    pub fn zero_matrix(&self) -> Vec<Vec<i32>> {
        let n = self.n();
        (1..=n)
            .map(|j| (1..=n).map(|k| self.zero(j, k)).collect())
            .collect()
    }

    /// Counts of vertices per Morse number.
    pub fn morse_histogram(&self) -> BTreeMap<i32, usize> {
        let mut hist = BTreeMap::new();
        for &i in &self.morse {
            *hist.entry(i).or_insert(0) += 1;
        }
        hist
    }

    /// Alternating sum of the Morse counts.
    pub fn euler_characteristic(&self) -> Result<i64> {
        if let Some((pos, &i)) = self.morse.iter().enumerate().find(|(_, &i)| i < 0) {
            return Err(SturmError::NotMorse {
                position: pos + 1,
                morse: i,
            });
        }
        Ok(self
            .morse_histogram()
            .iter()
            .map(|(&i, &m)| if i % 2 == 0 { m as i64 } else { -(m as i64) })
            .sum())
    }
}

#[derive(Serialize)]
struct AnalysisJson<'a> {
    n: usize,
    sigma: &'a [usize],
    morse: &'a [i32],
    zero: Vec<Vec<i32>>,
}

impl Serialize for MeanderAnalysis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AnalysisJson {
            n: self.n(),
            sigma: self.sigma.as_slice(),
            morse: &self.morse,
            zero: self.zero_matrix(),
        }
        .serialize(s)
    }
}

/// Label families used for named equilibria.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    A,
    B,
    C,
    D,
    /// Generic axis-indexed equilibrium `E_j`.
    E,
    /// Top vertex of a Sturm ball.
    O,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub tag: Tag,
    pub index: usize,
}

impl Label {
    pub const fn new(tag: Tag, index: usize) -> Self {
        Self { tag, index }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            Tag::O => f.write_str("O"),
            tag => write!(f, "{:?}{}", tag, self.index),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub position: usize,
    pub morse: i32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<Label>,
}

impl Vertex {
    pub fn name(&self) -> String {
        match self.label {
            Some(l) => l.to_string(),
            None => format!("E{}", self.position),
        }
    }
}

/// Morse-graded directed graph of heteroclinic edges between Morse-adjacent
/// equilibria.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionGraph {
    vertices: Vec<Vertex>,
    edges: BTreeSet<(usize, usize)>,
}

impl ConnectionGraph {
    /// Checks ids are unique, edges join Morse-adjacent vertices and the
    /// vertex count is odd.
    pub fn new(mut vertices: Vec<Vertex>, edges: BTreeSet<(usize, usize)>) -> Result<Self> {
        vertices.sort_by_key(|v| v.id);
        if vertices.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(SturmError::InvalidParameter("duplicate vertex id".into()));
        }
        if vertices.len() % 2 == 0 {
            return Err(SturmError::EvenLength(vertices.len()));
        }
        let graph = Self { vertices, edges };
        for &(a, b) in &graph.edges {
            let (va, vb) = match (graph.vertex(a), graph.vertex(b)) {
                (Some(va), Some(vb)) => (va, vb),
                _ => {
                    return Err(SturmError::InvalidParameter(format!(
                        "edge ({a},{b}) references an unknown vertex"
                    )))
                }
            };
            if va.morse != vb.morse + 1 {
                return Err(SturmError::InvalidParameter(format!(
                    "edge {} -> {} does not drop the Morse index by one",
                    va.name(),
                    vb.name()
                )));
            }
        }
        Ok(graph)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn vertex(&self, id: usize) -> Option<&Vertex> {
        self.vertices
            .binary_search_by_key(&id, |v| v.id)
            .ok()
            .map(|k| &self.vertices[k])
    }

    pub fn morse(&self, id: usize) -> i32 {
        self.vertex(id).map(|v| v.morse).expect("unknown vertex id")
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn successors(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .range((id, 0)..(id + 1, 0))
            .map(|&(_, b)| b)
    }

    pub fn dimension(&self) -> i32 {
        self.vertices.iter().map(|v| v.morse).max().unwrap_or(0)
    }

    pub fn morse_histogram(&self) -> BTreeMap<i32, usize> {
        let mut hist = BTreeMap::new();
        for v in &self.vertices {
            *hist.entry(v.morse).or_insert(0) += 1;
        }
        hist
    }

    /// Vertex id carrying `label`, if any.
    pub fn find_label(&self, label: Label) -> Option<usize> {
        self.vertices
            .iter()
            .find(|v| v.label == Some(label))
            .map(|v| v.id)
    }

    /// Replaces vertex labels through `labeler(position)`.
    pub fn with_labels(mut self, labeler: impl Fn(usize) -> Option<Label>) -> Self {
        for v in &mut self.vertices {
            v.label = labeler(v.position);
        }
        self
    }

    /// Edges rendered with vertex names, for label-level comparisons.
    pub fn named_edges(&self) -> BTreeSet<(String, String)> {
        self.edges
            .iter()
            .map(|&(a, b)| {
                (
                    self.vertex(a).map(Vertex::name).unwrap_or_default(),
                    self.vertex(b).map(Vertex::name).unwrap_or_default(),
                )
            })
            .collect()
    }
}

/// Involutive vertex map on a graph minus its top vertex that reverses edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reversor {
    top: usize,
    map: BTreeMap<usize, usize>,
}

impl Reversor {
    /// Builds the map from unordered pairs; fixed points are pairs `(v, v)`.
    pub fn from_pairs(top: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            for (x, y) in [(a, b), (b, a)] {
                if let Some(&prev) = map.get(&x) {
                    if prev != y {
                        return Err(SturmError::InvalidParameter(format!(
                            "vertex {x} mapped to both {prev} and {y}"
                        )));
                    }
                }
                map.insert(x, y);
            }
        }
        if map.contains_key(&top) {
            return Err(SturmError::InvalidParameter(
                "the top vertex cannot be mapped".into(),
            ));
        }
        Ok(Self { top, map })
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn apply(&self, v: usize) -> Option<usize> {
        self.map.get(&v).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map
            .iter()
            .filter(|(a, b)| a <= b)
            .map(|(&a, &b)| (a, b))
    }

    /// Checks involution, domain, Morse reflection and edge reversal against `graph`.
    pub fn verify(&self, graph: &ConnectionGraph) -> std::result::Result<(), String> {
        let d = graph.dimension();
        for v in graph.vertices() {
            if v.id == self.top {
                continue;
            }
            let image = self
                .apply(v.id)
                .ok_or_else(|| format!("vertex {} not in the domain", v.name()))?;
            if self.apply(image) != Some(v.id) {
                return Err(format!("not an involution at {}", v.name()));
            }
            let w = graph
                .vertex(image)
                .ok_or_else(|| format!("image {image} of {} is not a vertex", v.name()))?;
            if w.morse != d - 1 - v.morse {
                return Err(format!(
                    "{} (i={}) maps to {} (i={}), expected i={}",
                    v.name(),
                    v.morse,
                    w.name(),
                    w.morse,
                    d - 1 - v.morse
                ));
            }
        }
        if self.map.len() + 1 != graph.vertices().len() {
            return Err("domain is not the vertex set minus the top vertex".into());
        }
        for &(a, b) in graph.edges() {
            if a == self.top || b == self.top {
                continue;
            }
            let (ra, rb) = (self.map[&a], self.map[&b]);
            if !graph.has_edge(rb, ra) {
                let name = |x| graph.vertex(x).map(Vertex::name).unwrap_or_default();
                return Err(format!(
                    "edge {} -> {} has no reversed image {} -> {}",
                    name(a),
                    name(b),
                    name(rb),
                    name(ra)
                ));
            }
        }
        Ok(())
    }
}
