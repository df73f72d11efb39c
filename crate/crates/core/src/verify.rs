//! Property sweeps over the named families and over exhaustive enumerations.
//! Each suite returns a report listing counterexamples instead of panicking.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::connectivity::{
    connection_graph, find_reversor, full_heteroclinic_relation, sturm_ball_top, Betweenness,
    Wolfrum,
};
use crate::enumerate::{enumerate_sturm_with, EnumerateOptions};
use crate::error::{Result, SturmError};
use crate::families::{
    check_closed_forms, chafee_infante, ci_expected_graph, ci_label, ci_reversor,
    closed_form_sigma_1q, expected_connection_graph_1q, expected_morse_counts, expected_reversor,
    gcd, label_1q, nose_locations_check, primitive_sigma, three_nose_is_meander,
    three_nose_permutation,
};
use crate::kernel::analyze;
use crate::model::{ConnectionGraph, MeanderPermutation};
use crate::transforms::{
    kappa, klein_orbit, lifted_graph_embeds, prepend_identity, suspend, suspend_times,
    suspension_commutes_with_kappa, suspension_inversion_identity, verify_suspension_properties,
    Equivalence,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Suite {
    MeanderCriterion,
    MorseCounts,
    TrivialEquivalence,
    BallReversibility,
    ConnectionGraph1q,
    Suspension,
    ClosedForms,
    ChafeeInfante,
    Cascading,
    NoseLocations,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::MeanderCriterion,
        Suite::MorseCounts,
        Suite::TrivialEquivalence,
        Suite::BallReversibility,
        Suite::ConnectionGraph1q,
        Suite::Suspension,
        Suite::ClosedForms,
        Suite::ChafeeInfante,
        Suite::Cascading,
        Suite::NoseLocations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::MeanderCriterion => "meander-criterion",
            Suite::MorseCounts => "morse-counts",
            Suite::TrivialEquivalence => "trivial-equivalence",
            Suite::BallReversibility => "ball-reversibility",
            Suite::ConnectionGraph1q => "connection-graph-1q",
            Suite::Suspension => "suspension",
            Suite::ClosedForms => "closed-forms",
            Suite::ChafeeInfante => "chafee-infante",
            Suite::Cascading => "cascading",
            Suite::NoseLocations => "nose-locations",
        }
    }

    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            Suite::MeanderCriterion => &["thm51"],
            Suite::MorseCounts => &["thm52", "cor53"],
            Suite::TrivialEquivalence => &["thm54"],
            Suite::BallReversibility => &["thm56", "thm58"],
            Suite::ConnectionGraph1q => &["thm72"],
            Suite::Suspension => &["prop31"],
            Suite::ClosedForms => &["prop74"],
            Suite::ChafeeInfante => &["ci"],
            Suite::Cascading => &["cascade"],
            Suite::NoseLocations => &["lemma71"],
        }
    }

    /// The claim being checked, in words.
    pub fn claim(self) -> &'static str {
        match self {
            Suite::MeanderCriterion => {
                "M_pq is a dissipative meander iff gcd(p-1,q+1)=1 and p>=2; \
                 it fails to be Morse unless p is a multiple of q+1"
            }
            Suite::MorseCounts => {
                "primitive Morse counts follow the piecewise 3+2i / 2+2min / 2(r+q)+1-2i law, \
                 are symmetric, give Euler characteristic 1, and shift under suspension"
            }
            Suite::TrivialEquivalence => {
                "sigma_qr = kappa sigma_rq^-1 kappa; r=1 closed forms agree"
            }
            Suite::BallReversibility => {
                "primitive attractors are Sturm balls with an edge-reversing involution on the \
                 boundary sphere; their suspensions are balls without one"
            }
            Suite::ConnectionGraph1q => {
                "the connection graph of kappa sigma_1q kappa equals the labeled A/B/C/D edge lists"
            }
            Suite::Suspension => {
                "suspension clauses (i)-(viii), graph embedding, and the kappa/rho/prepend identities"
            }
            Suite::ClosedForms => {
                "explicit sigma_q1, sigma_1q and inverses match traversal, rainbow and nest sums"
            }
            Suite::ChafeeInfante => {
                "suspension steps sigma_d to sigma_(d+1); graph, reversor, and maximal-dimension uniqueness"
            }
            Suite::Cascading => {
                "transitive closure of Morse-adjacent edges equals the full connection relation, \
                 with either boundary order for blocking"
            }
            Suite::NoseLocations => {
                "nose locations of the four trivially equivalent r=1 permutations correspond"
            }
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SturmError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == key || suite.aliases().contains(&key.as_str()))
            .ok_or_else(|| SturmError::UnknownSuite(s.to_string()))
    }
}

/// Sweep limits. Defaults reproduce the desk-scale ranges.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bounds {
    pub max_p: usize,
    pub max_q: usize,
    pub max_r: usize,
    /// Limit on `r + q` for the primitive family.
    pub max_sum: usize,
    pub max_n: usize,
    pub max_d: usize,
    /// Largest `q` for the closed forms and nose locations.
    pub max_closed_q: usize,
    /// Largest `q` for the labeled 1q connection graph.
    pub max_graph_q: usize,
    /// Largest number of suspensions of primitive graphs.
    pub max_s: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            max_p: 40,
            max_q: 12,
            max_r: 11,
            max_sum: 12,
            max_n: 9,
            max_d: 10,
            max_closed_q: 20,
            max_graph_q: 10,
            max_s: 3,
        }
    }
}

impl Bounds {
    fn primitive_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 1..=self.max_r {
            for q in 1..=self.max_q {
                if r + q <= self.max_sum {
                    out.push((r, q));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub permutation: Option<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub claim: String,
    pub cases: usize,
    pub failures: Vec<Counterexample>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "{status} {} ({} cases, {} ms): {}",
            self.suite, self.cases, self.elapsed_ms, self.claim
        )?;
        for c in &self.failures {
            match &c.permutation {
                Some(p) => writeln!(f, "  counterexample ({p}): {}", c.detail)?,
                None => writeln!(f, "  counterexample: {}", c.detail)?,
            }
        }
        Ok(())
    }
}

/// Collects failures of one case; errors count as failures.
#[derive(Default)]
struct Case {
    failures: Vec<Counterexample>,
}

impl Case {
    fn fail(&mut self, sigma: Option<&MeanderPermutation>, detail: impl Into<String>) {
        self.failures.push(Counterexample {
            permutation: sigma.map(ToString::to_string),
            detail: detail.into(),
        });
    }

    fn check(&mut self, sigma: Option<&MeanderPermutation>, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.fail(sigma, detail());
        }
    }

    fn run(f: impl FnOnce(&mut Case) -> Result<()>) -> Vec<Counterexample> {
        let mut case = Case::default();
        if let Err(e) = f(&mut case) {
            case.fail(None, e.to_string());
        }
        case.failures
    }
}

fn sweep<T: Sync>(items: &[T], f: impl Fn(&T, &mut Case) -> Result<()> + Sync) -> Vec<Counterexample> {
    items
        .par_iter()
        .flat_map_iter(|item| Case::run(|c| f(item, c)))
        .collect()
}

fn sturm_up_to(max_n: usize) -> Result<Vec<MeanderPermutation>> {
    let mut out = Vec::new();
    for n in (1..=max_n).step_by(2) {
        out.extend(enumerate_sturm_with(
            n,
            EnumerateOptions {
                allow_large: true,
                parallel: true,
            },
        )?);
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, bounds: &Bounds) -> Result<SuiteReport> {
    let start = Instant::now();
    let (cases, failures) = match suite {
        Suite::MeanderCriterion => meander_criterion(bounds),
        Suite::MorseCounts => morse_counts(bounds),
        Suite::TrivialEquivalence => trivial_equivalence(bounds),
        Suite::BallReversibility => ball_reversibility(bounds),
        Suite::ConnectionGraph1q => connection_graph_1q(bounds),
        Suite::Suspension => suspension(bounds)?,
        Suite::ClosedForms => closed_forms(bounds),
        Suite::ChafeeInfante => chafee_infante_suite(bounds)?,
        Suite::Cascading => cascading(bounds)?,
        Suite::NoseLocations => nose_locations(bounds),
    };
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        claim: suite.claim().to_string(),
        cases,
        failures,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

pub fn run_all(bounds: &Bounds) -> Result<Vec<SuiteReport>> {
    Suite::ALL.into_iter().map(|s| run_suite(s, bounds)).collect()
}

type Outcome = (usize, Vec<Counterexample>);

fn meander_criterion(b: &Bounds) -> Outcome {
    let pairs: Vec<(usize, usize)> = (1..=b.max_p)
        .flat_map(|p| (1..=b.max_q).map(move |q| (p, q)))
        .collect();
    let failures = sweep(&pairs, |&(p, q), c| {
        let predicted = p >= 2 && gcd(p - 1, q + 1) == 1;
        let meander = three_nose_is_meander(p, q)?;
        c.check(None, meander == predicted, || {
            format!("(p, q) = ({p}, {q}): meander = {meander}, predicted {predicted}")
        });
        if meander {
            let sigma = three_nose_permutation(p, q)?;
            let morse = analyze(&sigma)?.is_morse();
            let primitive = p % (q + 1) == 0;
            c.check(Some(&sigma), morse == primitive, || {
                format!("(p, q) = ({p}, {q}): Morse = {morse}, expected {primitive}")
            });
        }
        Ok(())
    });
    (pairs.len(), failures)
}

fn morse_counts(b: &Bounds) -> Outcome {
    let pairs: Vec<_> = b.primitive_pairs().into_iter().filter(|&(r, q)| r * q > 1).collect();
    let failures = sweep(&pairs, |&(r, q), c| {
        let sigma = primitive_sigma(r, q)?;
        let a = analyze(&sigma)?;
        let hist = a.morse_histogram();
        let expected = expected_morse_counts(r, q, 0)?;
        c.check(Some(&sigma), hist == expected, || {
            format!("(r, q) = ({r}, {q}): histogram {hist:?}, expected {expected:?}")
        });
        let top = (r + q) as i32;
        for i in 0..top {
            let (x, y) = (hist.get(&i), hist.get(&(top - 1 - i)));
            c.check(Some(&sigma), x == y, || {
                format!("(r, q) = ({r}, {q}): m({i}) = {x:?} but m({}) = {y:?}", top - 1 - i)
            });
        }
        let chi = a.euler_characteristic()?;
        c.check(Some(&sigma), chi == 1, || format!("(r, q) = ({r}, {q}): chi = {chi}"));
        for s in 1..=b.max_s {
            let suspended = suspend_times(&sigma, s)?;
            let h = analyze(&suspended)?.morse_histogram();
            let e = expected_morse_counts(r, q, s)?;
            c.check(Some(&suspended), h == e, || {
                format!("(r, q, s) = ({r}, {q}, {s}): histogram {h:?}, expected {e:?}")
            });
        }
        Ok(())
    });
    (pairs.len(), failures)
}

fn trivial_equivalence(b: &Bounds) -> Outcome {
    let pairs = b.primitive_pairs();
    let mut failures = sweep(&pairs, |&(r, q), c| {
        let srq = primitive_sigma(r, q)?;
        let sqr = primitive_sigma(q, r)?;
        let image = kappa(&srq.inverse());
        c.check(Some(&srq), sqr == image, || {
            format!("(r, q) = ({r}, {q}): kappa sigma^-1 kappa = {image}, sigma_qr = {sqr}")
        });
        if r == q {
            let iso = klein_orbit(&srq).isotropy;
            c.check(Some(&srq), iso.contains(&Equivalence::KappaRho), || {
                format!("r = q = {r}: isotropy {iso:?} lacks kappa*rho")
            });
        }
        Ok(())
    });
    let qs: Vec<usize> = (1..=b.max_closed_q).collect();
    failures.extend(sweep(&qs, |&q, c| {
        let closed = closed_form_sigma_1q(q)?;
        let image = kappa(&primitive_sigma(q, 1)?.inverse());
        c.check(Some(&closed), closed == image, || {
            format!("q = {q}: closed form differs from kappa sigma_q1^-1 kappa = {image}")
        });
        Ok(())
    }));
    (pairs.len() + qs.len(), failures)
}

fn ball_reversibility(b: &Bounds) -> Outcome {
    let pairs = b.primitive_pairs();
    let failures = sweep(&pairs, |&(r, q), c| {
        let sigma = primitive_sigma(r, q)?;
        let graph = connection_graph(&analyze(&sigma)?)?;
        let top = sturm_ball_top(&graph);
        c.check(Some(&sigma), top.is_some(), || format!("(r, q) = ({r}, {q}): not a ball"));
        c.check(Some(&sigma), graph.dimension() == (r + q) as i32, || {
            format!("(r, q) = ({r}, {q}): dimension {}", graph.dimension())
        });
        match find_reversor(&graph, None) {
            Ok(rev) => {
                if let Err(e) = rev.verify(&graph) {
                    c.fail(Some(&sigma), format!("(r, q) = ({r}, {q}): found reversor fails: {e}"));
                }
            }
            Err(e) => c.fail(Some(&sigma), format!("(r, q) = ({r}, {q}): {e}")),
        }
        if r == 1 || q == 1 {
            let closed = expected_reversor(r, q)?;
            if let Err(e) = closed.verify(&graph) {
                c.fail(Some(&sigma), format!("(r, q) = ({r}, {q}): closed form: {e}"));
            }
        }
        for s in 1..=b.max_s {
            let susp = suspend_times(&sigma, s)?;
            let g = connection_graph(&analyze(&susp)?)?;
            c.check(Some(&susp), sturm_ball_top(&g).is_some(), || {
                format!("(r, q, s) = ({r}, {q}, {s}): suspension is not a ball")
            });
            match find_reversor(&g, None) {
                Err(SturmError::NotReversible) => {}
                Ok(_) => c.fail(
                    Some(&susp),
                    format!("(r, q, s) = ({r}, {q}, {s}): suspension admits a reversor"),
                ),
                Err(e) => c.fail(Some(&susp), format!("(r, q, s) = ({r}, {q}, {s}): {e}")),
            }
        }
        Ok(())
    });
    (pairs.len(), failures)
}

/// Computed graph of `kappa sigma_1q kappa` with positional labels.
pub fn labeled_graph_1q(q: usize) -> Result<ConnectionGraph> {
    let rotated = kappa(&closed_form_sigma_1q(q)?);
    Ok(connection_graph(&analyze(&rotated)?)?.with_labels(|p| label_1q(q, p)))
}

fn graph_mismatch(computed: &ConnectionGraph, expected: &ConnectionGraph) -> Option<String> {
    let morse_of = |g: &ConnectionGraph| -> BTreeSet<(String, i32)> {
        g.vertices().iter().map(|v| (v.name(), v.morse)).collect()
    };
    if morse_of(computed) != morse_of(expected) {
        return Some("vertex labels or Morse indices differ".into());
    }
    let (x, y) = (computed.named_edges(), expected.named_edges());
    if x != y {
        let extra: Vec<_> = x.difference(&y).collect();
        let missing: Vec<_> = y.difference(&x).collect();
        return Some(format!("extra edges {extra:?}, missing edges {missing:?}"));
    }
    None
}

fn connection_graph_1q(b: &Bounds) -> Outcome {
    let qs: Vec<usize> = (2..=b.max_graph_q).collect();
    let failures = sweep(&qs, |&q, c| {
        let computed = labeled_graph_1q(q)?;
        let expected = expected_connection_graph_1q(q)?;
        if let Some(m) = graph_mismatch(&computed, &expected) {
            c.fail(Some(&kappa(&closed_form_sigma_1q(q)?)), format!("q = {q}: {m}"));
        }
        Ok(())
    });
    (qs.len(), failures)
}

fn suspension(b: &Bounds) -> Result<Outcome> {
    let mut all = sturm_up_to(b.max_n)?;
    // non-Morse dissipative meanders exercise clauses (i)-(vii) formally
    for p in 2..=8 {
        for q in 1..=4 {
            if three_nose_is_meander(p, q)? && p % (q + 1) != 0 {
                all.push(three_nose_permutation(p, q)?);
            }
        }
    }
    let mut failures = sweep(&all, |sigma, c| {
        let report = verify_suspension_properties(sigma)?;
        for (clause, detail) in report.failures() {
            c.fail(Some(sigma), format!("clause ({clause}): {detail}"));
        }
        if analyze(sigma)?.is_morse() {
            c.check(Some(sigma), lifted_graph_embeds(sigma)?, || {
                "lifted graph is not embedded in the suspension graph".into()
            });
        }
        c.check(Some(sigma), suspension_commutes_with_kappa(sigma)?, || {
            "suspension does not commute with kappa".into()
        });
        c.check(Some(sigma), suspension_inversion_identity(sigma)?, || {
            "suspension of the inverse is not (kappa suspension kappa)^-1".into()
        });
        Ok(())
    });
    let ds: Vec<usize> = (1..=b.max_d).collect();
    failures.extend(sweep(&ds, |&d, c| {
        let sigma = chafee_infante(d)?;
        c.check(Some(&sigma), prepend_identity(&sigma)? == Some(true), || {
            "prepend construction differs from suspension".into()
        });
        Ok(())
    }));
    Ok((all.len() + ds.len(), failures))
}

fn closed_forms(b: &Bounds) -> Outcome {
    let qs: Vec<usize> = (1..=b.max_closed_q).collect();
    let failures = sweep(&qs, |&q, _| check_closed_forms(q));
    (qs.len(), failures)
}

fn chafee_infante_suite(b: &Bounds) -> Result<Outcome> {
    let ds: Vec<usize> = (1..=b.max_d).collect();
    let mut failures = sweep(&ds, |&d, c| {
        let sigma = chafee_infante(d)?;
        let next = chafee_infante(d + 1)?;
        c.check(Some(&sigma), suspend(&sigma)? == next, || {
            format!("d = {d}: suspension is not sigma_(d+1)")
        });
        let computed = connection_graph(&analyze(&sigma)?)?.with_labels(|p| ci_label(d, p));
        let expected = ci_expected_graph(d)?;
        if let Some(m) = graph_mismatch(&computed, &expected) {
            c.fail(Some(&sigma), format!("d = {d}: {m}"));
        }
        if let Err(e) = ci_reversor(d)?.verify(&computed) {
            c.fail(Some(&sigma), format!("d = {d}: reversor: {e}"));
        }
        c.check(Some(&sigma), klein_orbit(&sigma).len() == 1, || {
            format!("d = {d}: not fixed by kappa and rho")
        });
        Ok(())
    });
    let mut cases = ds.len();
    for n in (3..=b.max_n).step_by(2) {
        let d = (n - 1) / 2;
        let top: Vec<MeanderPermutation> = sturm_up_to(n)?
            .into_iter()
            .filter(|s| s.len() == n)
            .filter(|s| analyze(s).map(|a| a.dimension() == d as i32).unwrap_or(false))
            .collect();
        cases += 1;
        let ci = chafee_infante(d)?;
        if top != vec![ci.clone()] {
            failures.push(Counterexample {
                permutation: Some(ci.to_string()),
                detail: format!(
                    "N = {n}: dimension-{d} Sturm permutations are {:?}",
                    top.iter().map(ToString::to_string).collect::<Vec<_>>()
                ),
            });
        }
    }
    Ok((cases, failures))
}

fn cascading(b: &Bounds) -> Result<Outcome> {
    let all = sturm_up_to(b.max_n)?;
    let failures = sweep(&all, |sigma, c| {
        let a = analyze(sigma)?;
        let w = Wolfrum::new(&a)?;
        let graph = w.graph()?;
        let closure = full_heteroclinic_relation(&graph);
        let relation = w.relation();
        c.check(Some(sigma), closure == relation, || {
            format!(
                "closure has {} pairs, relation {}: differences {:?}",
                closure.len(),
                relation.len(),
                closure.symmetric_difference(&relation).collect::<Vec<_>>()
            )
        });
        let axis = w.with_order(Betweenness::Axis).relation();
        c.check(Some(sigma), axis == relation, || {
            "axis-order blocking disagrees with meander-order blocking".into()
        });
        Ok(())
    });
    Ok((all.len(), failures))
}

fn nose_locations(b: &Bounds) -> Outcome {
    let qs: Vec<usize> = (2..=b.max_closed_q).collect();
    let failures = sweep(&qs, |&q, c| {
        let report = nose_locations_check(q)?;
        for m in report.mismatches {
            c.fail(None, format!("q = {q}: {m}"));
        }
        Ok(())
    });
    (qs.len(), failures)
}
