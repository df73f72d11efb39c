//! Named meander families: Chafee–Infante `M_d`, 3-nose `M_pq`, primitive
//! `sigma_rq`, with their closed forms, predicted Morse counts, labeled
//! connection graphs and reversors.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::connectivity::{connection_graph, find_reversor};
use crate::error::{Result, SturmError};
use crate::kernel::{analyze, permutation_from_arcs};
use crate::model::{
    ArcDiagram, ConnectionGraph, Label, MeanderPermutation, Reversor, Tag, Vertex,
};
use crate::transforms::{kappa, rho};

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(SturmError::InvalidParameter(msg()))
    }
}

fn consistency(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(SturmError::ConsistencyFailure(msg()))
    }
}

// ---- Chafee–Infante -------------------------------------------------------

/// `sigma_d(j) = j` for odd `j`, `N+1-j` for even `j`, `N = 2d+1`.
pub fn chafee_infante(d: usize) -> Result<MeanderPermutation> {
    require(d >= 1, || format!("Chafee-Infante dimension must be >= 1, got {d}"))?;
    let n = 2 * d + 1;
    let sigma = MeanderPermutation::new(
        (1..=n)
            .map(|j| if j % 2 == 1 { j } else { n + 1 - j })
            .collect(),
    )?;
    let inv = sigma.inverse();
    for j in 1..n {
        let expected = if j % 2 == 1 { n } else { n + 2 };
        consistency(inv.at(j) + inv.at(j + 1) == expected, || {
            format!("nesting sum fails at j={j} for d={d}")
        })?;
    }
    Ok(sigma)
}

/// `A_{j-1}` left of the centre, `O` at the centre, `B_{N-j}` to the right.
pub fn ci_label(d: usize, position: usize) -> Option<Label> {
    let n = 2 * d + 1;
    match position {
        p if (1..=d).contains(&p) => Some(Label::new(Tag::A, p - 1)),
        p if p == d + 1 => Some(Label::new(Tag::O, d)),
        p if p > d + 1 && p <= n => Some(Label::new(Tag::B, n - p)),
        _ => None,
    }
}

fn label_positions(n: usize, labeler: impl Fn(usize) -> Option<Label>) -> BTreeMap<Label, usize> {
    (1..=n).filter_map(|p| labeler(p).map(|l| (l, p))).collect()
}

fn labeled_graph(
    n: usize,
    labeler: impl Fn(usize) -> Option<Label> + Copy,
    named_edges: &[(Label, Label)],
) -> Result<ConnectionGraph> {
    let at = label_positions(n, labeler);
    let vertices = (1..=n)
        .map(|p| {
            let label = labeler(p)
                .ok_or_else(|| SturmError::InvalidParameter(format!("unlabeled position {p}")))?;
            Ok(Vertex {
                id: p,
                position: p,
                morse: label.index as i32,
                label: Some(label),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = named_edges
        .iter()
        .map(|(a, b)| {
            match (at.get(a), at.get(b)) {
                (Some(&x), Some(&y)) => Ok((x, y)),
                _ => Err(SturmError::InvalidParameter(format!("unknown label in {a} -> {b}"))),
            }
        })
        .collect::<Result<BTreeSet<_>>>()?;
    ConnectionGraph::new(vertices, edges)
}

/// Predicted graph: `O ~> {A_{d-1}, B_{d-1}}`, `A_j, B_j ~> {A_{j-1}, B_{j-1}}`.
pub fn ci_expected_graph(d: usize) -> Result<ConnectionGraph> {
    require(d >= 1, || format!("d must be >= 1, got {d}"))?;
    let a = |j| Label::new(Tag::A, j);
    let b = |j| Label::new(Tag::B, j);
    let mut edges = vec![
        (Label::new(Tag::O, d), a(d - 1)),
        (Label::new(Tag::O, d), b(d - 1)),
    ];
    for j in 1..d {
        for src in [a(j), b(j)] {
            edges.push((src, a(j - 1)));
            edges.push((src, b(j - 1)));
        }
    }
    labeled_graph(2 * d + 1, |p| ci_label(d, p), &edges)
}

/// `A_j <-> B_{d-1-j}` on axis positions.
pub fn ci_reversor(d: usize) -> Result<Reversor> {
    require(d >= 1, || format!("d must be >= 1, got {d}"))?;
    let at = label_positions(2 * d + 1, |p| ci_label(d, p));
    let pairs = (0..d).map(|j| (at[&Label::new(Tag::A, j)], at[&Label::new(Tag::B, d - 1 - j)]));
    Reversor::from_pairs(d + 1, pairs)
}

// ---- 3-nose meanders ----------------------------------------------------

/// Upper `p`-nest on `1..2p`, upper `q`-nest on `2p+1..2p+2q`, lower
/// `(p+q)`-rainbow on `2..N`, `N = 2(p+q)+1`.
pub fn three_nose_diagram(p: usize, q: usize) -> Result<ArcDiagram> {
    require(p >= 1 && q >= 1, || format!("p, q must be >= 1, got ({p}, {q})"))?;
    let n = 2 * (p + q) + 1;
    let mut upper: Vec<_> = (1..=p).map(|k| (k, 2 * p + 1 - k)).collect();
    upper.extend((1..=q).map(|k| (2 * p + k, 2 * p + 2 * q + 1 - k)));
    let lower = (1..=p + q).map(|k| (1 + k, n + 1 - k)).collect();
    ArcDiagram::new(n, upper, lower)
}

pub fn three_nose_permutation(p: usize, q: usize) -> Result<MeanderPermutation> {
    permutation_from_arcs(&three_nose_diagram(p, q)?)
}

/// `gcd(p-1, q+1) = 1` and `p >= 2`, cross-checked against curve traversal.
pub fn three_nose_is_meander(p: usize, q: usize) -> Result<bool> {
    require(p >= 1 && q >= 1, || format!("p, q must be >= 1, got ({p}, {q})"))?;
    let predicted = p >= 2 && gcd(p - 1, q + 1) == 1;
    let traversed = match three_nose_permutation(p, q) {
        Ok(_) => true,
        Err(SturmError::NotConnected { .. }) => false,
        Err(e) => return Err(e),
    };
    consistency(predicted == traversed, || {
        format!("meander criterion disagrees with traversal at (p, q) = ({p}, {q})")
    })?;
    Ok(predicted)
}

/// `sigma_rq`: the permutation of `M_{r(q+1), q}`; checked to be Sturm.
pub fn primitive_sigma(r: usize, q: usize) -> Result<MeanderPermutation> {
    require(r >= 1 && q >= 1, || format!("r, q must be >= 1, got ({r}, {q})"))?;
    let sigma = three_nose_permutation(r * (q + 1), q)?;
    consistency(analyze(&sigma)?.is_morse(), || {
        format!("primitive meander ({r}, {q}) is not Morse")
    })?;
    Ok(sigma)
}

// ---- closed forms for r = 1 and q = 1 ------------------------------------

fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Result<MeanderPermutation> {
    MeanderPermutation::new((1..=n).map(f).collect())
}

/// `sigma_{q1}` in residues of the argument mod 4.
pub fn closed_form_sigma_q1(q: usize) -> Result<MeanderPermutation> {
    require(q >= 1, || "q must be >= 1".into())?;
    from_fn(4 * q + 3, |m| {
        let j = m / 4;
        match m % 4 {
            0 => 2 * q + 2 - 2 * j,
            1 => 2 * j + 1,
            2 => 4 * q + 2 - 2 * j,
            _ => 2 * q + 2 * j + 3,
        }
    })
}

pub fn closed_form_sigma_q1_inverse(q: usize) -> Result<MeanderPermutation> {
    require(q >= 1, || "q must be >= 1".into())?;
    from_fn(4 * q + 3, |m| {
        let jp = m / 2;
        if m % 2 == 1 {
            if jp <= q {
                4 * jp + 1
            } else {
                4 * (jp - q - 1) + 3
            }
        } else if jp <= q {
            4 * (q + 1 - jp)
        } else {
            4 * (2 * q + 1 - jp) + 2
        }
    })
}

pub fn closed_form_sigma_1q(q: usize) -> Result<MeanderPermutation> {
    require(q >= 1, || "q must be >= 1".into())?;
    from_fn(4 * q + 3, |m| {
        let jp = m / 2;
        if m % 2 == 1 {
            if jp <= q {
                4 * jp + 1
            } else {
                4 * (jp - q - 1) + 3
            }
        } else if jp <= q + 1 {
            4 * (q + 1 - jp) + 2
        } else {
            4 * (2 * q + 2 - jp)
        }
    })
}

pub fn closed_form_sigma_1q_inverse(q: usize) -> Result<MeanderPermutation> {
    require(q >= 1, || "q must be >= 1".into())?;
    from_fn(4 * q + 3, |m| {
        let j = m / 4;
        match m % 4 {
            0 => 4 * q + 4 - 2 * j,
            1 => 2 * j + 1,
            2 => 2 * q + 2 - 2 * j,
            _ => 2 * q + 2 * j + 3,
        }
    })
}

/// Checks the four closed forms against traversal, mutual inversion, the
/// rainbow and nest sums, and `sigma_1q = kappa sigma_q1^-1 kappa`.
pub fn check_closed_forms(q: usize) -> Result<()> {
    let sq1 = closed_form_sigma_q1(q)?;
    let sq1i = closed_form_sigma_q1_inverse(q)?;
    let s1q = closed_form_sigma_1q(q)?;
    let s1qi = closed_form_sigma_1q_inverse(q)?;
    consistency(sq1 == primitive_sigma(q, 1)?, || format!("sigma_q1 differs, q={q}"))?;
    consistency(s1q == primitive_sigma(1, q)?, || format!("sigma_1q differs, q={q}"))?;
    consistency(sq1.compose(&sq1i).is_identity(), || format!("sigma_q1 inverse, q={q}"))?;
    consistency(s1q.compose(&s1qi).is_identity(), || format!("sigma_1q inverse, q={q}"))?;
    consistency(kappa(&sq1i) == s1q, || format!("kappa rho relation, q={q}"))?;
    consistency(kappa(&sq1) == s1qi, || format!("kappa relation of inverses, q={q}"))?;
    for jp in 1..=2 * q + 1 {
        consistency(sq1i.at(2 * jp) + sq1i.at(2 * jp + 1) == 4 * q + 5, || {
            format!("lower rainbow sum at j'={jp}, q={q}")
        })?;
    }
    for jp in (0..2 * q + 1).filter(|&jp| jp != q) {
        consistency(sq1i.at(2 * jp + 1) + sq1i.at(2 * jp + 2) == 4 * q + 1, || {
            format!("upper nest sum at j'={jp}, q={q}")
        })?;
    }
    Ok(())
}

// ---- Morse counts ----------------------------------------------------------

/// Predicted Morse histogram of the `s`-fold suspended primitive `sigma_rq`.
pub fn expected_morse_counts(r: usize, q: usize, s: usize) -> Result<BTreeMap<i32, usize>> {
    require(r >= 1 && q >= 1, || format!("r, q must be >= 1, got ({r}, {q})"))?;
    let base: BTreeMap<i32, usize> = if r * q == 1 {
        analyze(&primitive_sigma(1, 1)?)?.morse_histogram()
    } else {
        let (lo, hi) = (r.min(q), r.max(q));
        (0..=r + q)
            .map(|i| {
                let m = if i < lo {
                    3 + 2 * i
                } else if i < hi {
                    2 + 2 * lo
                } else {
                    2 * (r + q) + 1 - 2 * i
                };
                (i as i32, m)
            })
            .collect()
    };
    let mut out: BTreeMap<i32, usize> = (0..s as i32).map(|i| (i, 2)).collect();
    out.extend(base.into_iter().map(|(i, m)| (i + s as i32, m)));
    Ok(out)
}

// ---- labeled graph of kappa sigma_1q kappa ---------------------------------

/// Axis labels of `kappa sigma_1q kappa`, `N = 4q+3`; the top vertex
/// `D_{q+1}` carries the tag `O`.
pub fn label_1q(q: usize, position: usize) -> Option<Label> {
    let j = position;
    let l = match j {
        _ if (1..=q + 1).contains(&j) => Label::new(Tag::A, j - 1),
        _ if (q + 2..=2 * q + 1).contains(&j) => Label::new(Tag::B, 2 * q + 1 - j),
        _ if (2 * q + 2..=3 * q + 1).contains(&j) => Label::new(Tag::C, j - 2 * q - 1),
        _ if j == 3 * q + 2 => Label::new(Tag::O, q + 1),
        _ if (3 * q + 3..=4 * q + 3).contains(&j) => Label::new(Tag::D, 4 * q + 3 - j),
        _ => return None,
    };
    Some(l)
}

/// The graph predicted for `kappa sigma_1q kappa`, `q >= 2`.
pub fn expected_connection_graph_1q(q: usize) -> Result<ConnectionGraph> {
    require(q >= 2, || format!("q must be >= 2, got {q}"))?;
    let a = |j| Label::new(Tag::A, j);
    let b = |j| Label::new(Tag::B, j);
    let c = |j| Label::new(Tag::C, j);
    let d = |j| {
        if j == q + 1 {
            Label::new(Tag::O, j)
        } else {
            Label::new(Tag::D, j)
        }
    };
    let mut edges = Vec::new();
    for j in 1..=q {
        edges.extend([(a(j), a(j - 1)), (a(j), b(j - 1))]);
    }
    for j in 1..q {
        edges.extend([(b(j), a(j - 1)), (b(j), b(j - 1))]);
    }
    for j in 2..=q {
        edges.extend([(c(j), b(j - 1)), (c(j), c(j - 1)), (c(j), d(j - 1))]);
    }
    for j in 2..=q + 1 {
        edges.extend([(d(j), a(j - 1)), (d(j), c(j - 1)), (d(j), d(j - 1))]);
    }
    edges.extend([(c(1), b(0)), (c(1), d(0)), (d(1), a(0)), (d(1), d(0))]);
    labeled_graph(4 * q + 3, |p| label_1q(q, p), &edges)
}

/// `A_j <-> D_{q-j}`, `B_j <-> C_{q-j}` on axis positions of `kappa sigma_1q kappa`.
pub fn reversor_1q_rotated(q: usize) -> Result<Reversor> {
    require(q >= 2, || format!("q must be >= 2, got {q}"))?;
    let at = label_positions(4 * q + 3, |p| label_1q(q, p));
    let mut pairs = Vec::new();
    for j in 0..=q {
        pairs.push((at[&Label::new(Tag::A, j)], at[&Label::new(Tag::D, q - j)]));
    }
    for j in 0..q {
        pairs.push((at[&Label::new(Tag::B, j)], at[&Label::new(Tag::C, q - j)]));
    }
    Reversor::from_pairs(3 * q + 2, pairs)
}

fn transport(r: &Reversor, map: impl Fn(usize) -> usize) -> Result<Reversor> {
    Reversor::from_pairs(map(r.top()), r.pairs().map(|(a, b)| (map(a), map(b))))
}

/// A reversor of the connection graph of `sigma_rq` (vertex ids are axis
/// positions of `sigma_rq`). Closed form for `r = 1`, its image under
/// `kappa rho` for `q = 1`, otherwise found by search.
pub fn expected_reversor(r: usize, q: usize) -> Result<Reversor> {
    let sigma = primitive_sigma(r, q)?;
    let n = sigma.len();
    let graph = connection_graph(&analyze(&sigma)?)?;
    let candidate = if r == 1 && q >= 2 {
        // kappa maps axis j of sigma_1q to axis N+1-j of its rotation
        Some(transport(&reversor_1q_rotated(q)?, |v| n + 1 - v)?)
    } else if q == 1 && r >= 2 {
        // sigma_r1 = kappa sigma_1r^-1 kappa: axis j of sigma_1r goes to N+1-sigma_1r(j)
        let s1r = primitive_sigma(1, r)?;
        let base = transport(&reversor_1q_rotated(r)?, |v| n + 1 - v)?;
        Some(transport(&base, |v| n + 1 - s1r.at(v))?)
    } else {
        None
    };
    match candidate {
        Some(c) => {
            c.verify(&graph).map_err(|e| {
                SturmError::ConsistencyFailure(format!("closed-form reversor ({r}, {q}): {e}"))
            })?;
            Ok(c)
        }
        None => find_reversor(&graph, None),
    }
}

// ---- nose locations --------------------------------------------------------

/// Nose written as `((a1, b1), (a0, b0))`: axis and meander positions of its two vertices.
pub type Nose = ((usize, usize), (usize, usize));

#[derive(Clone, Debug, Serialize)]
pub struct NoseReport {
    pub q: usize,
    pub mismatches: Vec<String>,
}

impl NoseReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn is_nose_of(sigma: &MeanderPermutation, ((a1, b1), (a0, b0)): Nose) -> bool {
    a1.abs_diff(b1) == 1
        && a0.abs_diff(b0) == 1
        && b1 <= sigma.len()
        && sigma.at(a1) == a0
        && sigma.at(b1) == b0
}

fn kappa_nose(n: usize, ((a1, b1), (a0, b0)): Nose) -> Nose {
    ((n + 1 - b1, n + 1 - a1), (n + 1 - b0, n + 1 - a0))
}

fn rho_nose(((a1, b1), (a0, b0)): Nose) -> Nose {
    ((a0, b0), (a1, b1))
}

/// Checks the corresponding nose locations on `sigma_q1`, its rotation,
/// the rotation of `sigma_1q`, and `sigma_1q`, plus their `kappa`/`rho` links.
pub fn nose_locations_check(q: usize) -> Result<NoseReport> {
    require(q >= 2, || format!("q must be >= 2, got {q}"))?;
    let n = 4 * q + 3;
    let sq1 = primitive_sigma(q, 1)?;
    let s1q = primitive_sigma(1, q)?;
    let perms = [
        ("sigma_q1", sq1.clone()),
        ("kappa(sigma_q1)", kappa(&sq1)),
        ("kappa(sigma_1q)", kappa(&s1q)),
        ("sigma_1q", s1q.clone()),
    ];
    let noses: [Nose; 4] = [
        ((4 * q + 1, 4 * q + 2), (2 * q + 1, 2 * q + 2)),
        ((2, 3), (2 * q + 2, 2 * q + 3)),
        ((2 * q + 1, 2 * q + 2), (4 * q + 1, 4 * q + 2)),
        ((2 * q + 2, 2 * q + 3), (2, 3)),
    ];
    let mut mismatches = Vec::new();
    for ((name, sigma), nose) in perms.iter().zip(noses) {
        if !is_nose_of(sigma, nose) {
            mismatches.push(format!("{name}: no nose at {nose:?}"));
        }
    }
    let links = [
        (0, 1, kappa_nose(n, noses[0]), "kappa (a) -> (b)"),
        (2, 3, kappa_nose(n, noses[2]), "kappa (c) -> (d)"),
        (2, 0, rho_nose(noses[2]), "rho (c) -> (a)"),
        (3, 1, rho_nose(noses[3]), "rho (d) -> (b)"),
    ];
    for (from, to, image, what) in links {
        if image != noses[to] {
            mismatches.push(format!("{what}: {image:?} != {:?}", noses[to]));
        }
        let mapped = if what.starts_with("kappa") {
            kappa(&perms[from].1)
        } else {
            rho(&perms[from].1)
        };
        if mapped != perms[to].1 {
            mismatches.push(format!("{what}: permutations do not correspond"));
        }
    }
    Ok(NoseReport { q, mismatches })
}
