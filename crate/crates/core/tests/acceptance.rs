//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use sturm::connectivity::{connection_graph, find_reversor, full_heteroclinic_relation, wolfrum_relation};
use sturm::enumerate::{enumerate_sturm_with, EnumerateOptions};
use sturm::families::{
    chafee_infante, closed_form_sigma_1q, closed_form_sigma_1q_inverse, closed_form_sigma_q1,
    closed_form_sigma_q1_inverse, expected_reversor, primitive_sigma, three_nose_is_meander,
    three_nose_permutation,
};
use sturm::kernel::analyze;
use sturm::ode::{model_connection_audit, model_equilibria, equilibrium_residual, reversor_round_trip, ModelState, ReversibleField};
use sturm::transforms::{kappa, suspend, suspend_times, verify_suspension_properties};
use sturm::verify::labeled_graph_1q;
use sturm::{ConnectionGraph, MeanderPermutation, SturmError};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: sturm::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn perm(text: &str) -> MeanderPermutation {
    MeanderPermutation::parse(text).unwrap()
}

fn perm_of(v: Vec<usize>) -> MeanderPermutation {
    MeanderPermutation::new(v).unwrap()
}

// ---- oracles ----------------------------------------------------------------

fn flip_conj(s: &MeanderPermutation) -> MeanderPermutation {
    let n = s.len();
    perm_of((1..=n).map(|j| n + 1 - s.at(n + 1 - j)).collect())
}

fn inv(s: &MeanderPermutation) -> MeanderPermutation {
    let mut v = vec![0; s.len()];
    for j in 1..=s.len() {
        v[s.at(j) - 1] = j;
    }
    perm_of(v)
}

/// Morse indices and zero numbers by explicit sums, indexed by axis position.
struct Oracle {
    n: usize,
    morse: Vec<i64>,
    zero: Vec<Vec<i64>>,
}

impl Oracle {
    fn new(sigma: &MeanderPermutation) -> Self {
        let n = sigma.len();
        let a: Vec<i64> = std::iter::once(0).chain((1..=n).map(|j| inv(sigma).at(j) as i64)).collect();
        let pm = |l: usize| if l % 2 == 0 { 1 } else { -1 };
        let mut i = vec![0i64; n + 1];
        for j in 1..n {
            i[j + 1] = i[j] - pm(j) * (a[j + 1] - a[j]).signum();
        }
        let mut zh = vec![vec![0i64; n + 1]; n + 1];
        for j in 1..=n {
            zh[j][j] = i[j];
            for k in j + 1..=n {
                let inner: i64 = (j + 1..k).map(|l| pm(l) * (a[l] - a[j]).signum()).sum();
                let z = i[j] + (pm(k) * (a[k] - a[j]).signum() - 1) / 2 + inner;
                zh[j][k] = z;
                zh[k][j] = z;
            }
        }
        let mut morse = vec![0; n + 1];
        let mut zero = vec![vec![0; n + 1]; n + 1];
        for p in 1..=n {
            morse[p] = i[sigma.at(p)];
            for r in 1..=n {
                zero[p][r] = zh[sigma.at(p)][sigma.at(r)];
            }
        }
        Oracle { n, morse, zero }
    }

    fn is_morse(&self) -> bool {
        self.morse[1..].iter().all(|&m| m >= 0)
    }

    /// Blocking along the axis order.
    fn relation(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for v1 in 1..=self.n {
            for v2 in 1..=self.n {
                if v1 == v2 || self.morse[v1] <= self.morse[v2] {
                    continue;
                }
                let z = self.zero[v1][v2];
                let blocked = (v1.min(v2) + 1..v1.max(v2)).any(|w| self.zero[v1][w] == z && self.zero[w][v2] == z);
                if !blocked {
                    out.insert((v1, v2));
                }
            }
        }
        out
    }

    fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.relation()
            .into_iter()
            .filter(|&(a, b)| self.morse[a] == self.morse[b] + 1)
            .collect()
    }

    fn histogram(&self) -> BTreeMap<i64, usize> {
        let mut h = BTreeMap::new();
        for &m in &self.morse[1..] {
            *h.entry(m).or_default() += 1;
        }
        h
    }
}

fn reach(edges: &BTreeSet<(usize, usize)>, start: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(_, w) in edges.range((v, 0)..(v + 1, 0)) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

fn closure(edges: &BTreeSet<(usize, usize)>, n: usize) -> BTreeSet<(usize, usize)> {
    (1..=n).flat_map(|v| reach(edges, v).into_iter().map(move |w| (v, w))).collect()
}

/// Unique top vertex reaching everything.
fn ball_top(o: &Oracle, edges: &BTreeSet<(usize, usize)>) -> Option<usize> {
    let d = *o.morse[1..].iter().max()?;
    let tops: Vec<usize> = (1..=o.n).filter(|&p| o.morse[p] == d).collect();
    (tops.len() == 1 && reach(edges, tops[0]).len() == o.n - 1).then(|| tops[0])
}

/// Involutive bijection of the vertices other than `top`, reversing every edge among them.
fn is_reversor(map: &BTreeMap<usize, usize>, top: usize, edges: &BTreeSet<(usize, usize)>, n: usize) -> bool {
    let rest: BTreeSet<usize> = (1..=n).filter(|&v| v != top).collect();
    let keys: BTreeSet<usize> = map.keys().copied().collect();
    if keys != rest || map.values().copied().collect::<BTreeSet<_>>() != rest {
        return false;
    }
    if rest.iter().any(|v| map[&map[v]] != *v) {
        return false;
    }
    let inner: BTreeSet<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| a != top && b != top).collect();
    inner.iter().all(|&(a, b)| inner.contains(&(map[&b], map[&a])))
}

fn reversor_map(r: &sturm::Reversor) -> BTreeMap<usize, usize> {
    r.pairs().flat_map(|(a, b)| [(a, b), (b, a)]).collect()
}

fn named(graph: &ConnectionGraph) -> BTreeSet<(String, String)> {
    graph.named_edges()
}

// ---- criteria -----------------------------------------------------------------

fn figures() -> Check {
    let cases = [
        (lib(primitive_sigma(2, 1))?, "1 10 7 4 3 8 9 2 5 6 11"),
        (lib(three_nose_permutation(4, 1))?, "1 10 7 4 3 8 9 2 5 6 11"),
        (kappa(&lib(primitive_sigma(1, 1))?), "1 4 5 6 3 2 7"),
        (lib(suspend(&perm("1 4 5 6 3 2 7")))?, "1 8 5 4 3 6 7 2 9"),
        (lib(three_nose_permutation(2, 2))?, "1 8 7 2 5 4 3 6 9"),
        (lib(suspend(&lib(three_nose_permutation(2, 2))?))?, "1 10 3 4 9 6 7 8 5 2 11"),
    ];
    for (got, want) in &cases {
        ensure(got.to_string() == *want, || format!("got ({got}), expected ({want})"))?;
    }
    let m22 = lib(three_nose_permutation(2, 2))?;
    ensure(!Oracle::new(&m22).is_morse(), || "M_22 should not be Morse".into())?;
    Ok(format!("{} permutations verbatim", cases.len()))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Closed-curve components and traversal order of the 3-nose arc system.
fn three_nose_oracle(p: usize, q: usize) -> (usize, Option<Vec<usize>>) {
    let n = 2 * (p + q) + 1;
    let mut up = vec![0; n + 1];
    let mut lo = vec![0; n + 1];
    for k in 1..=p {
        up[k] = 2 * p + 1 - k;
        up[2 * p + 1 - k] = k;
    }
    for k in 1..=q {
        up[2 * p + k] = 2 * p + 2 * q + 1 - k;
        up[2 * p + 2 * q + 1 - k] = 2 * p + k;
    }
    for k in 1..=p + q {
        lo[1 + k] = n + 1 - k;
        lo[n + 1 - k] = 1 + k;
    }
    // union-find over arcs
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for x in 1..=n {
        for y in [up[x], lo[x]] {
            if y != 0 {
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                parent[a] = b;
            }
        }
    }
    let comps = (1..=n).filter(|&x| find(&mut parent, x) == x).count();
    if comps != 1 {
        return (comps, None);
    }
    let mut path = vec![1];
    let mut upper = true;
    while path.len() < n {
        let x = *path.last().unwrap();
        path.push(if upper { up[x] } else { lo[x] });
        upper = !upper;
    }
    (1, Some(path))
}

fn meander_criterion() -> Check {
    let mut cases = 0;
    for p in 1..=40 {
        for q in 1..=12 {
            cases += 1;
            let predicted = p >= 2 && gcd(p - 1, q + 1) == 1;
            let (comps, path) = three_nose_oracle(p, q);
            ensure(path.is_some() == predicted, || format!("M_{p},{q}: {comps} components"))?;
            ensure(three_nose_is_meander(p, q).unwrap_or(false) == predicted, || {
                format!("M_{p},{q}: library disagrees")
            })?;
            if let Some(path) = path {
                let sigma = lib(three_nose_permutation(p, q))?;
                ensure(inv(&sigma).as_slice() == path.as_slice(), || format!("M_{p},{q}: traversal differs"))?;
                let morse = Oracle::new(&sigma).is_morse();
                ensure(morse == (p % (q + 1) == 0), || format!("M_{p},{q}: Morse = {morse}"))?;
                ensure(lib(analyze(&sigma))?.is_morse() == morse, || format!("M_{p},{q}: library Morse"))?;
            }
        }
    }
    Ok(format!("{cases} pairs (p, q)"))
}

fn primitive_pairs(max_sum: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 1..max_sum {
        for q in 1..max_sum {
            if r + q <= max_sum {
                out.push((r, q));
            }
        }
    }
    out
}

fn krmu(r: usize, q: usize) -> BTreeMap<i64, usize> {
    let (lo, hi) = (r.min(q) as i64, r.max(q) as i64);
    let s = (r + q) as i64;
    (0..=s)
        .map(|i| {
            let m = if i < lo {
                3 + 2 * i
            } else if i < hi {
                2 + 2 * lo
            } else {
                2 * s + 1 - 2 * i
            };
            (i, m as usize)
        })
        .collect()
}

fn morse_counts() -> Check {
    let pairs: Vec<_> = primitive_pairs(12).into_iter().filter(|&(r, q)| r * q > 1).collect();
    for &(r, q) in &pairs {
        let sigma = lib(primitive_sigma(r, q))?;
        let o = Oracle::new(&sigma);
        let hist = o.histogram();
        let want = krmu(r, q);
        ensure(hist == want, || format!("sigma_{r},{q}: {hist:?} vs {want:?}"))?;
        let lib_hist: BTreeMap<i64, usize> =
            lib(analyze(&sigma))?.morse_histogram().into_iter().map(|(k, v)| (k as i64, v)).collect();
        ensure(lib_hist == hist, || format!("sigma_{r},{q}: library histogram"))?;
        let s = (r + q) as i64;
        for i in 0..s {
            ensure(hist[&i] == hist[&(s - 1 - i)], || format!("sigma_{r},{q}: asymmetric at {i}"))?;
        }
        let chi: i64 = hist.iter().map(|(&i, &m)| if i % 2 == 0 { m as i64 } else { -(m as i64) }).sum();
        ensure(chi == 1, || format!("sigma_{r},{q}: chi = {chi}"))?;
    }
    Ok(format!("{} pairs (r, q)", pairs.len()))
}

fn trivial_equivalence() -> Check {
    let pairs = primitive_pairs(12);
    for &(r, q) in &pairs {
        let rq = lib(primitive_sigma(r, q))?;
        let qr = lib(primitive_sigma(q, r))?;
        ensure(qr == flip_conj(&inv(&rq)), || format!("sigma_{q},{r} != kappa sigma_{r},{q}^-1 kappa"))?;
    }
    for q in 1..=20 {
        let s1q = lib(primitive_sigma(1, q))?;
        let sq1 = lib(primitive_sigma(q, 1))?;
        ensure(lib(closed_form_sigma_1q(q))? == s1q, || format!("closed form sigma_1,{q}"))?;
        ensure(lib(closed_form_sigma_q1(q))? == sq1, || format!("closed form sigma_{q},1"))?;
        ensure(lib(closed_form_sigma_1q_inverse(q))? == inv(&s1q), || format!("closed form sigma_1,{q}^-1"))?;
        ensure(lib(closed_form_sigma_q1_inverse(q))? == inv(&sq1), || format!("closed form sigma_{q},1^-1"))?;
    }
    Ok(format!("{} pairs, closed forms q <= 20", pairs.len()))
}

fn ball_reversibility() -> Check {
    let pairs = primitive_pairs(12);
    let mut suspended = 0;
    for &(r, q) in &pairs {
        let sigma = lib(primitive_sigma(r, q))?;
        let o = Oracle::new(&sigma);
        let edges = o.edges();
        let top = ball_top(&o, &edges).ok_or_else(|| format!("sigma_{r},{q} is not a ball"))?;
        let graph = lib(connection_graph(&lib(analyze(&sigma))?))?;
        ensure(graph.edges() == &edges, || format!("sigma_{r},{q}: library edges differ"))?;
        let rev = if r == 1 && q >= 2 {
            lib(expected_reversor(r, q))?
        } else {
            lib(find_reversor(&graph, None))?
        };
        ensure(rev.top() == top && is_reversor(&reversor_map(&rev), top, &edges, o.n), || {
            format!("sigma_{r},{q}: reversor fails")
        })?;
        for s in 1..=3 {
            let sus = lib(suspend_times(&sigma, s))?;
            let so = Oracle::new(&sus);
            let se = so.edges();
            ensure(ball_top(&so, &se).is_some(), || format!("{s}-fold suspension of sigma_{r},{q}: not a ball"))?;
            let g = lib(connection_graph(&lib(analyze(&sus))?))?;
            match find_reversor(&g, None) {
                Err(SturmError::NotReversible) => {}
                other => return Err(format!("{s}-fold suspension of sigma_{r},{q}: {other:?}")),
            }
            // an edge-reversing involution would mirror the level sizes below the top
            let mut h = so.histogram();
            let d = *h.keys().max().unwrap();
            h.remove(&d);
            let mirrored = (0..d).all(|i| h.get(&i) == h.get(&(d - 1 - i)));
            ensure(!mirrored, || format!("{s}-fold suspension of sigma_{r},{q}: mirrored levels"))?;
            suspended += 1;
        }
    }
    // closed form on the rotated labeling
    for q in 2..=10 {
        let g = lib(labeled_graph_1q(q))?;
        let id = |name: String| g.vertices().iter().find(|v| v.name() == name).map(|v| v.id).unwrap();
        let mut map = BTreeMap::new();
        for j in 0..=q {
            let (a, d) = (id(format!("A{j}")), id(format!("D{}", q - j)));
            map.insert(a, d);
            map.insert(d, a);
        }
        for j in 0..q {
            let (b, c) = (id(format!("B{j}")), id(format!("C{}", q - j)));
            map.insert(b, c);
            map.insert(c, b);
        }
        let top = id("O".into());
        ensure(is_reversor(&map, top, g.edges(), g.vertices().len()), || format!("closed-form reversor q = {q}"))?;
    }
    Ok(format!("{} primitive graphs, {suspended} suspensions without reversor", pairs.len()))
}

fn expected_1q(q: usize) -> BTreeSet<(String, String)> {
    let l = |t: char, j: usize| {
        if t == 'D' && j == q + 1 {
            "O".to_string()
        } else {
            format!("{t}{j}")
        }
    };
    let mut e = BTreeSet::new();
    let mut add = |from: String, to: &[(char, usize)]| {
        for &(t, j) in to {
            e.insert((from.clone(), l(t, j)));
        }
    };
    for j in 1..=q {
        add(l('A', j), &[('A', j - 1), ('B', j - 1)]);
    }
    for j in 1..q {
        add(l('B', j), &[('A', j - 1), ('B', j - 1)]);
    }
    for j in 2..=q {
        add(l('C', j), &[('B', j - 1), ('C', j - 1), ('D', j - 1)]);
    }
    for j in 2..=q + 1 {
        add(l('D', j), &[('A', j - 1), ('C', j - 1), ('D', j - 1)]);
    }
    add(l('C', 1), &[('B', 0), ('D', 0)]);
    add(l('D', 1), &[('A', 0), ('D', 0)]);
    e
}

fn connection_graph_1q() -> Check {
    for q in 2..=10 {
        let g = lib(labeled_graph_1q(q))?;
        let got = named(&g);
        let want = expected_1q(q);
        ensure(got == want, || {
            let extra: Vec<_> = got.difference(&want).collect();
            let missing: Vec<_> = want.difference(&got).collect();
            format!("q = {q}: extra {extra:?}, missing {missing:?}")
        })?;
        for v in g.vertices() {
            let want = if v.name() == "O" { q + 1 } else { v.name()[1..].parse().unwrap() };
            ensure(v.morse as usize == want, || format!("q = {q}: i({}) = {}", v.name(), v.morse))?;
        }
    }
    Ok("q = 2..10 label-isomorphic".into())
}

fn lift(s: &MeanderPermutation) -> MeanderPermutation {
    let n = s.len();
    perm_of(std::iter::once(1).chain((1..=n).map(|j| s.at(j) + 1)).chain([n + 2]).collect())
}

fn compose(a: &MeanderPermutation, b: &MeanderPermutation) -> MeanderPermutation {
    perm_of((1..=a.len()).map(|j| a.at(b.at(j))).collect())
}

fn flip(n: usize) -> MeanderPermutation {
    perm_of((1..=n).rev().collect())
}

fn suspension_clauses(sigma: &MeanderPermutation) -> Result<(), String> {
    let n = sigma.len();
    let t = lib(suspend(sigma))?;
    // (i), (ii)
    ensure(t.at(1) == 1 && t.at(n + 2) == n + 2, || "(i)".into())?;
    ensure((1..=n).all(|j| t.at(j + 1) == n + 2 - sigma.at(j)), || "(ii)".into())?;
    let (o, ot) = (Oracle::new(sigma), Oracle::new(&t));
    // (iii)-(vi)
    ensure(ot.morse[1] == 0 && ot.morse[n + 2] == 0, || "(iii)".into())?;
    ensure((1..=n).all(|j| ot.morse[j + 1] == o.morse[j] + 1), || "(iv)".into())?;
    ensure((1..=n).all(|j| ot.zero[j + 1][1] == 0 && ot.zero[j + 1][n + 2] == 0), || "(v)".into())?;
    for j in 1..=n {
        for k in 1..=n {
            if j != k {
                ensure(ot.zero[j + 1][k + 1] == o.zero[j][k] + 1, || format!("(vi) at {j},{k}"))?;
            }
        }
    }
    // (vii), (viii)
    let (rel, trel) = (o.relation(), ot.relation());
    for j in 1..=n {
        for k in 1..=n {
            if j != k {
                ensure(rel.contains(&(j, k)) == trel.contains(&(j + 1, k + 1)), || format!("(vii) at {j},{k}"))?;
            }
        }
        if o.is_morse() {
            ensure(trel.contains(&(j + 1, 1)) && trel.contains(&(j + 1, n + 2)), || format!("(viii) at {j}"))?;
        }
    }
    let report = lib(verify_suspension_properties(sigma))?;
    ensure(report.passed(), || format!("library report: {:?}", report.failures()))?;
    // suspk, suspr
    ensure(lib(suspend(&flip_conj(sigma)))? == flip_conj(&t), || "suspk".into())?;
    ensure(lib(suspend(&inv(sigma)))? == inv(&flip_conj(&t)), || "suspr".into())?;
    // append form
    ensure(t == lift(&compose(&flip(n), sigma)), || "append form".into())?;
    Ok(())
}

fn suspension() -> Check {
    let start = Instant::now();
    let mut all = Vec::new();
    for n in [1, 3, 5, 7, 9] {
        all.extend(lib(enumerate_sturm_with(n, EnumerateOptions::default()))?);
    }
    let enumeration = start.elapsed();
    ensure(enumeration < Duration::from_secs(60), || format!("enumeration took {enumeration:?}"))?;
    for sigma in &all {
        suspension_clauses(sigma).map_err(|e| format!("({sigma}): {e}"))?;
    }
    for d in 1..=10 {
        let s = lib(chafee_infante(d))?;
        let n = s.len();
        ensure(flip_conj(&s) == s, || format!("sigma_{d} not flip-isotropic"))?;
        ensure(lift(&compose(&s, &flip(n))) == lib(suspend(&s))?, || format!("prepend form at d = {d}"))?;
    }
    Ok(format!(
        "{} Sturm permutations (enumerated single-threaded in {} ms), prepend identity d <= 10",
        all.len(),
        enumeration.as_millis()
    ))
}

fn cisigma(d: usize) -> MeanderPermutation {
    let n = 2 * d + 1;
    perm_of((1..=n).map(|j| if j % 2 == 1 { j } else { n + 1 - j }).collect())
}

fn ci_label(d: usize, j: usize) -> String {
    let n = 2 * d + 1;
    if j <= d {
        format!("A{}", j - 1)
    } else if j == d + 1 {
        "O".into()
    } else {
        format!("B{}", n - j)
    }
}

fn chafee_infante_checks() -> Check {
    for d in 1..=10 {
        let s = lib(chafee_infante(d))?;
        ensure(s == cisigma(d), || format!("sigma_{d} differs from the explicit form"))?;
        ensure(lib(suspend(&s))? == cisigma(d + 1), || format!("suspension of sigma_{d}"))?;
        let o = Oracle::new(&s);
        let edges = o.edges();
        let got: BTreeSet<(String, String)> = edges.iter().map(|&(a, b)| (ci_label(d, a), ci_label(d, b))).collect();
        let mut want = BTreeSet::new();
        for t in ['A', 'B'] {
            want.insert(("O".to_string(), format!("{t}{}", d - 1)));
            for j in 1..d {
                for u in ['A', 'B'] {
                    want.insert((format!("{t}{j}"), format!("{u}{}", j - 1)));
                }
            }
        }
        ensure(got == want, || format!("C_{d} edges differ"))?;
        let graph = lib(connection_graph(&lib(analyze(&s))?))?;
        ensure(graph.edges() == &edges, || format!("C_{d}: library edges differ"))?;
        let n = 2 * d + 1;
        let pos = |name: String| (1..=n).find(|&j| ci_label(d, j) == name).unwrap();
        let mut map = BTreeMap::new();
        for j in 0..d {
            let (a, b) = (pos(format!("A{j}")), pos(format!("B{}", d - 1 - j)));
            map.insert(a, b);
            map.insert(b, a);
        }
        ensure(is_reversor(&map, d + 1, &edges, n), || format!("reversor of C_{d}"))?;
    }
    for d in 1..=4 {
        let all = lib(enumerate_sturm_with(2 * d + 1, EnumerateOptions::default()))?;
        let tops: Vec<_> = all
            .iter()
            .filter(|s| Oracle::new(s).morse.iter().max() == Some(&(d as i64)))
            .collect();
        ensure(tops.len() == 1 && *tops[0] == cisigma(d), || format!("top index {d} at N = {}: {tops:?}", 2 * d + 1))?;
    }
    Ok("d <= 10 graphs and reversors, uniqueness for N <= 9".into())
}

fn cascading() -> Check {
    let mut count = 0;
    for n in [1, 3, 5, 7, 9] {
        for sigma in lib(enumerate_sturm_with(n, EnumerateOptions::default()))? {
            let a = lib(analyze(&sigma))?;
            let graph = lib(connection_graph(&a))?;
            let o = Oracle::new(&sigma);
            let full = o.relation();
            ensure(full_heteroclinic_relation(&graph) == full, || format!("({sigma}): closure differs"))?;
            ensure(closure(&o.edges(), n) == full, || format!("({sigma}): oracle closure differs"))?;
            ensure(lib(wolfrum_relation(&a))? == full, || format!("({sigma}): library relation differs"))?;
            count += 1;
        }
    }
    Ok(format!("{count} Sturm permutations"))
}

fn ode_model() -> Check {
    let mut worst_residual = 0.0f64;
    let mut worst_trip = 0.0f64;
    for q in [2usize, 3] {
        let field = ReversibleField::<f64>::standard(q).map_err(|e| e.to_string())?;
        for e in model_equilibria(q) {
            let r = equilibrium_residual(&field, &e);
            worst_residual = worst_residual.max(r);
            ensure(r < 1e-12, || format!("q = {q}: residual at {} = {r:e}", e.name()))?;
        }
        let mut angle = vec![0.0; q];
        angle[q - 1] = 1.0;
        angle[q - 2] = 1e-8;
        let start = ModelState::new(0.5, angle).map_err(|e| e.to_string())?;
        let err = reversor_round_trip(&field, &start, 20.0).map_err(|e| e.to_string())?;
        worst_trip = worst_trip.max(err);
        ensure(err < 1e-6, || format!("q = {q}: round trip error {err:e}"))?;
        let report = model_connection_audit(q).map_err(|e| e.to_string())?;
        for j in 0..q {
            for (from, to) in [(format!("D{}", j + 1), format!("A{j}")), (format!("C{}", j + 1), format!("B{j}"))] {
                ensure(report.radial_targets(&from).contains(&Some(to.clone())), || {
                    format!("q = {q}: {from} does not reach {to}")
                })?;
            }
        }
        ensure(report.passed(), || format!("q = {q}: {:?}", report.mismatches))?;
    }
    Ok(format!("max residual {worst_residual:.1e}, max round-trip error {worst_trip:.1e}"))
}

fn main() {
    let criteria: [(u32, &str, Option<u64>, fn() -> Check); 10] = [
        (1, "figure-exact permutations", Some(1), figures),
        (2, "3-nose meander criterion", Some(10), meander_criterion),
        (3, "primitive Morse counts", Some(10), morse_counts),
        (4, "kappa-rho equivalence and closed forms", None, trivial_equivalence),
        (5, "ball property and reversors", Some(30), ball_reversibility),
        (6, "connection graph of the rotated 1q family", None, connection_graph_1q),
        (7, "suspension clauses on all Sturm N <= 9", None, suspension),
        (8, "Chafee-Infante family", None, chafee_infante_checks),
        (9, "cascading equals blocking relation", None, cascading),
        (10, "reversible ODE model", Some(120), ode_model),
    ];
    let mut failed = 0;
    for (n, name, limit, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(s)) if elapsed > Duration::from_secs(s) => Err(format!("exceeded {s} s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS {name}: {detail} ({} ms)", elapsed.as_millis()),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL {name}: {detail} ({} ms)", elapsed.as_millis());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
