//! Trivial equivalences (rotation `kappa`, inversion `rho`), the lift and
//! suspension operators, and checks of the suspension properties.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::connectivity::{connection_graph, Wolfrum};
use crate::error::{Result, SturmError};
use crate::kernel::{analyze, is_dissipative, nose_positions};
use crate::model::MeanderPermutation;

/// Rotation by 180 degrees: `j -> N+1-sigma(N+1-j)`.
pub fn kappa(sigma: &MeanderPermutation) -> MeanderPermutation {
    let n = sigma.len();
    let map = (1..=n).map(|j| n + 1 - sigma.at(n + 1 - j)).collect();
    MeanderPermutation::new(map).expect("conjugate of a permutation")
}

/// Reversal of `x`, i.e. inversion of the permutation.
pub fn rho(sigma: &MeanderPermutation) -> MeanderPermutation {
    sigma.inverse()
}

/// Element of the Klein group generated by `kappa` and `rho`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Equivalence {
    Identity,
    Kappa,
    Rho,
    KappaRho,
}

impl Equivalence {
    pub const ALL: [Equivalence; 4] = [
        Equivalence::Identity,
        Equivalence::Kappa,
        Equivalence::Rho,
        Equivalence::KappaRho,
    ];

    pub fn apply(self, sigma: &MeanderPermutation) -> MeanderPermutation {
        match self {
            Equivalence::Identity => sigma.clone(),
            Equivalence::Kappa => kappa(sigma),
            Equivalence::Rho => rho(sigma),
            Equivalence::KappaRho => kappa(&rho(sigma)),
        }
    }
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equivalence::Identity => "id",
            Equivalence::Kappa => "kappa",
            Equivalence::Rho => "rho",
            Equivalence::KappaRho => "kappa*rho",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KleinOrbit {
    /// Distinct images, each with the first group element producing it.
    pub members: Vec<(Equivalence, MeanderPermutation)>,
    /// Group elements fixing the permutation.
    pub isotropy: Vec<Equivalence>,
}

impl KleinOrbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn klein_orbit(sigma: &MeanderPermutation) -> KleinOrbit {
    let mut members: Vec<(Equivalence, MeanderPermutation)> = Vec::new();
    let mut isotropy = Vec::new();
    for g in Equivalence::ALL {
        let image = g.apply(sigma);
        if &image == sigma {
            isotropy.push(g);
        }
        if !members.iter().any(|(_, m)| *m == image) {
            members.push((g, image));
        }
    }
    KleinOrbit { members, isotropy }
}

/// `Lambda`: fixes `1` and `N+2` and shifts `sigma` by one in both senses.
pub fn lift(sigma: &MeanderPermutation) -> MeanderPermutation {
    let n = sigma.len();
    let mut map = Vec::with_capacity(n + 2);
    map.push(1);
    map.extend(sigma.as_slice().iter().map(|&v| v + 1));
    map.push(n + 2);
    MeanderPermutation::new(map).expect("lift of a permutation")
}

/// Two-arc suspension `N -> N+2`. Computed directly and as `Lambda(kappa o sigma)`.
pub fn suspend(sigma: &MeanderPermutation) -> Result<MeanderPermutation> {
    if !is_dissipative(sigma) {
        return Err(SturmError::NotDissipative);
    }
    let n = sigma.len();
    let mut map = vec![0; n + 2];
    map[0] = 1;
    map[n + 1] = n + 2;
    for j in 1..=n {
        map[j] = n + 2 - sigma.at(j);
    }
    let direct = MeanderPermutation::new(map)?;
    let appended = lift(&MeanderPermutation::flip(n).compose(sigma));
    if direct != appended {
        return Err(SturmError::ConsistencyFailure(format!(
            "suspension routes disagree: {direct} vs {appended}"
        )));
    }
    Ok(direct)
}

pub fn suspend_times(sigma: &MeanderPermutation, s: usize) -> Result<MeanderPermutation> {
    let mut out = sigma.clone();
    for _ in 0..s {
        out = suspend(&out)?;
    }
    Ok(out)
}

/// `Lambda(sigma o kappa)`, the prepend construction.
pub fn prepend_suspension(sigma: &MeanderPermutation) -> MeanderPermutation {
    lift(&sigma.compose(&MeanderPermutation::flip(sigma.len())))
}

/// `suspend(kappa sigma kappa) == kappa suspend(sigma) kappa`.
pub fn suspension_commutes_with_kappa(sigma: &MeanderPermutation) -> Result<bool> {
    Ok(suspend(&kappa(sigma))? == kappa(&suspend(sigma)?))
}

/// `suspend(sigma^-1) == (kappa suspend(sigma) kappa)^-1`.
pub fn suspension_inversion_identity(sigma: &MeanderPermutation) -> Result<bool> {
    Ok(suspend(&sigma.inverse())? == kappa(&suspend(sigma)?).inverse())
}

/// For `kappa`-isotropic `sigma`, whether prepending agrees with suspending;
/// `None` if `sigma` lacks the isotropy.
pub fn prepend_identity(sigma: &MeanderPermutation) -> Result<Option<bool>> {
    if kappa(sigma) != *sigma {
        return Ok(None);
    }
    Ok(Some(prepend_suspension(sigma) == suspend(sigma)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClauseStatus {
    Pass,
    Fail(String),
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuspensionReport {
    pub sigma: MeanderPermutation,
    pub suspension: MeanderPermutation,
    /// Clauses `i` .. `viii` in order.
    pub clauses: Vec<(&'static str, ClauseStatus)>,
}

impl SuspensionReport {
    pub fn passed(&self) -> bool {
        self.clauses
            .iter()
            .all(|(_, s)| !matches!(s, ClauseStatus::Fail(_)))
    }

    pub fn failures(&self) -> Vec<(&'static str, String)> {
        self.clauses
            .iter()
            .filter_map(|(c, s)| match s {
                ClauseStatus::Fail(m) => Some((*c, m.clone())),
                _ => None,
            })
            .collect()
    }
}

fn status(failure: Option<String>) -> ClauseStatus {
    match failure {
        None => ClauseStatus::Pass,
        Some(m) => ClauseStatus::Fail(m),
    }
}

/// Checks the suspension clauses on a dissipative meander. Old vertex at axis
/// position `j` becomes `j+1`; the poles sit at `1` and `N+2`.
pub fn verify_suspension_properties(sigma: &MeanderPermutation) -> Result<SuspensionReport> {
    let tilde = suspend(sigma)?;
    let a = analyze(sigma)?;
    let b = analyze(&tilde)?;
    let n = sigma.len();
    let (south, north) = (1, n + 2);
    let mut clauses = Vec::with_capacity(8);

    clauses.push((
        "i",
        status(
            (tilde.at(1) != 1 || tilde.at(n + 2) != n + 2)
                .then(|| format!("{tilde} does not fix its endpoints")),
        ),
    ));
    clauses.push((
        "ii",
        status(
            (1..=n)
                .find(|&j| tilde.at(j + 1) != n + 2 - sigma.at(j))
                .map(|j| format!("position {}", j + 1)),
        ),
    ));
    clauses.push((
        "iii",
        status(
            (b.morse_axis(south) != 0 || b.morse_axis(north) != 0)
                .then(|| "poles are not sinks".to_string()),
        ),
    ));
    clauses.push((
        "iv",
        status(
            (1..=n)
                .find(|&j| b.morse_axis(j + 1) != a.morse_axis(j) + 1)
                .map(|j| format!("vertex E{j}")),
        ),
    ));
    clauses.push((
        "v",
        status(
            (1..=n)
                .find(|&j| b.zero_axis(j + 1, south) != 0 || b.zero_axis(j + 1, north) != 0)
                .map(|j| format!("vertex E{j}")),
        ),
    ));
    let mut vi = None;
    'outer: for j in 1..=n {
        for k in 1..=n {
            if j != k && b.zero_axis(j + 1, k + 1) != a.zero_axis(j, k) + 1 {
                vi = Some(format!("pair (E{j}, E{k})"));
                break 'outer;
            }
        }
    }
    clauses.push(("vi", status(vi)));

    let old = Wolfrum::formal(&a);
    let new = Wolfrum::formal(&b);
    let mut vii = None;
    'outer: for j in 1..=n {
        for k in 1..=n {
            if j != k && old.connects(j, k) != new.connects(j + 1, k + 1) {
                vii = Some(format!("pair (E{j}, E{k})"));
                break 'outer;
            }
        }
    }
    clauses.push(("vii", status(vii)));

    if a.is_morse() {
        clauses.push((
            "viii",
            status(
                (1..=n)
                    .find(|&j| !new.connects(j + 1, south) || !new.connects(j + 1, north))
                    .map(|j| format!("E{j} misses a pole")),
            ),
        ));
    } else {
        clauses.push(("viii", ClauseStatus::Skipped));
    }

    Ok(SuspensionReport {
        sigma: sigma.clone(),
        suspension: tilde,
        clauses,
    })
}

/// The suspension graph on the lifted vertices, with Morse indices lowered by
/// one, reproduces the original connection graph.
pub fn lifted_graph_embeds(sigma: &MeanderPermutation) -> Result<bool> {
    let g = connection_graph(&analyze(sigma)?)?;
    let h = connection_graph(&analyze(&suspend(sigma)?)?)?;
    let n = sigma.len();
    let lifted: BTreeSet<(usize, usize)> = h
        .edges()
        .iter()
        .filter(|&&(a, b)| (2..=n + 1).contains(&a) && (2..=n + 1).contains(&b))
        .map(|&(a, b)| (a - 1, b - 1))
        .collect();
    let levels_agree = (1..=n).all(|j| h.morse(j + 1) == g.morse(j) + 1);
    Ok(levels_agree && &lifted == g.edges())
}

/// Number of suspensions after which a dissipative meander becomes Morse.
pub fn minimal_suspensions_to_sturm(sigma: &MeanderPermutation) -> Result<usize> {
    let a = analyze(sigma)?;
    let s = (-a.min_morse()).max(0) as usize;
    if s > 0 {
        let before = suspend_times(sigma, s - 1)?;
        if analyze(&before)?.is_morse() {
            return Err(SturmError::ConsistencyFailure(format!(
                "{} suspensions already suffice",
                s - 1
            )));
        }
    }
    if !analyze(&suspend_times(sigma, s)?)?.is_morse() {
        return Err(SturmError::ConsistencyFailure(format!(
            "{s} suspensions do not reach the Morse property"
        )));
    }
    Ok(s)
}

/// `Lambda(kappa sigma kappa)`: the rotated meander reflected up-down, with
/// the two polar stubs that make it dissipative. It serves as the first
/// formal suspension of the flipped curve, whose Morse numbers are `1 - i`.
pub fn vertical_flip_suspension(sigma: &MeanderPermutation) -> MeanderPermutation {
    lift(&kappa(sigma))
}

/// Total suspension count making the up-down flip of `kappa sigma kappa` Morse.
pub fn suspensions_after_vertical_flip(sigma: &MeanderPermutation) -> Result<usize> {
    Ok(minimal_suspensions_to_sturm(&vertical_flip_suspension(sigma))? + 1)
}

/// Nose count is unchanged by suspension (for `N >= 3`).
pub fn suspension_preserves_noses(sigma: &MeanderPermutation) -> Result<bool> {
    Ok(nose_positions(sigma).len() == nose_positions(&suspend(sigma)?).len())
}
