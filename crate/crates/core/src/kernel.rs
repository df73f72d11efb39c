//! Dissipativeness, the meander (Jordan) property, Morse and zero numbers,
//! noses, and the arc diagram <-> permutation correspondence.

use crate::error::{Result, SturmError};
use crate::model::{Arc, ArcDiagram, MeanderAnalysis, MeanderPermutation};

/// Largest vertex count for which the zero-number matrix is stored densely.
pub const DENSE_ZERO_LIMIT: usize = 10_000;

#[inline]
fn sign(a: usize, b: usize) -> i32 {
    // a == b cannot happen for distinct meander positions
    assert_ne!(a, b, "sign(0) in a permutation recursion");
    if a > b {
        1
    } else {
        -1
    }
}

/// `(-1)^(j+1)`: `+1` for odd `j`, `-1` for even `j`.
#[inline]
fn alternating(j: usize) -> i32 {
    if j % 2 == 1 {
        1
    } else {
        -1
    }
}

pub fn is_dissipative(sigma: &MeanderPermutation) -> bool {
    let n = sigma.len();
    n >= 1 && sigma.at(1) == 1 && sigma.at(n) == n
}

fn require_dissipative(sigma: &MeanderPermutation) -> Result<()> {
    if is_dissipative(sigma) {
        Ok(())
    } else {
        Err(SturmError::NotDissipative)
    }
}

/// Upper arcs join `sigma^-1(k), sigma^-1(k+1)` for odd `k`, lower arcs for even `k`.
pub fn arcs_from_permutation(sigma: &MeanderPermutation) -> Result<ArcDiagram> {
    require_dissipative(sigma)?;
    let inv = sigma.inverse();
    let n = sigma.len();
    let mut upper = Vec::with_capacity(n / 2);
    let mut lower = Vec::with_capacity(n / 2);
    for k in 1..n {
        let arc = (inv.at(k), inv.at(k + 1));
        if k % 2 == 1 {
            upper.push(arc);
        } else {
            lower.push(arc);
        }
    }
    ArcDiagram::new(n, upper, lower)
}

#[inline]
fn crosses((a, b): Arc, (c, d): Arc) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// First pair of crossing arcs, if any. Arcs must be stored as `(left, right)`.
pub fn find_crossing(arcs: &[Arc]) -> Option<(Arc, Arc)> {
    for (k, &x) in arcs.iter().enumerate() {
        for &y in &arcs[k + 1..] {
            if crosses(x, y) {
                return Some((x, y));
            }
        }
    }
    None
}

fn crossing_error(diagram: &ArcDiagram) -> Option<SturmError> {
    for (side, arcs) in [("upper", diagram.upper()), ("lower", diagram.lower())] {
        if let Some(((a1, b1), (a2, b2))) = find_crossing(arcs) {
            return Some(SturmError::NotMeander {
                side,
                a1,
                b1,
                a2,
                b2,
            });
        }
    }
    None
}

/// True iff no two arcs on the same side cross.
pub fn is_meander(sigma: &MeanderPermutation) -> Result<bool> {
    let diagram = arcs_from_permutation(sigma)?;
    Ok(crossing_error(&diagram).is_none())
}

/// Like [`is_meander`] but reports the offending pair of arcs.
pub fn check_meander(sigma: &MeanderPermutation) -> Result<ArcDiagram> {
    let diagram = arcs_from_permutation(sigma)?;
    match crossing_error(&diagram) {
        Some(err) => Err(err),
        None => Ok(diagram),
    }
}

/// Follows the curve from the terminal lacking a lower arc, alternating
/// upper and lower arcs; `sigma(pos)` is the traversal index of `pos`.
pub fn permutation_from_arcs(diagram: &ArcDiagram) -> Result<MeanderPermutation> {
    let n = diagram.n();
    if n == 1 {
        return MeanderPermutation::new(vec![1]);
    }
    let terminals = diagram.terminals();
    let starts: Vec<usize> = terminals
        .iter()
        .copied()
        .filter(|&p| diagram.lower_partner(p).is_none())
        .collect();
    let ends: Vec<usize> = terminals
        .iter()
        .copied()
        .filter(|&p| diagram.upper_partner(p).is_none())
        .collect();
    let start = match (starts.as_slice(), ends.as_slice()) {
        ([s], [_]) => *s,
        _ => return Err(SturmError::BadTerminals),
    };

    let mut order = vec![0usize; n + 1];
    let mut pos = start;
    let mut visited = 1;
    order[pos] = 1;
    let mut use_upper = true;
    loop {
        let next = if use_upper {
            diagram.upper_partner(pos)
        } else {
            diagram.lower_partner(pos)
        };
        let Some(next) = next else { break };
        if order[next] != 0 {
            // a closed loop through the start cannot happen for a degree-1 start
            return Err(SturmError::ConsistencyFailure(format!(
                "traversal revisited position {next}"
            )));
        }
        visited += 1;
        order[next] = visited;
        pos = next;
        use_upper = !use_upper;
    }
    if visited < n {
        return Err(SturmError::NotConnected {
            visited,
            n,
            components: diagram.component_count(),
        });
    }
    MeanderPermutation::new(order[1..].to_vec())
}

/// Formal Morse recursion on `inverse = sigma^-1`, without any validity checks.
pub(crate) fn morse_recursion(inverse: &MeanderPermutation) -> Vec<i32> {
    let n = inverse.len();
    let mut morse = Vec::with_capacity(n);
    morse.push(0);
    for j in 1..n {
        let step = alternating(j) * sign(inverse.at(j + 1), inverse.at(j));
        morse.push(morse[j - 1] + step);
    }
    morse
}

fn require_odd(sigma: &MeanderPermutation) -> Result<()> {
    if sigma.is_odd_length() {
        Ok(())
    } else {
        Err(SturmError::EvenLength(sigma.len()))
    }
}

/// Morse numbers `i_1 .. i_N` in meander order for a dissipative meander.
pub fn morse_indices(sigma: &MeanderPermutation) -> Result<Vec<i32>> {
    require_odd(sigma)?;
    check_meander(sigma)?;
    let morse = morse_recursion(&sigma.inverse());
    if morse[morse.len() - 1] != 0 {
        return Err(SturmError::ConsistencyFailure(format!(
            "Morse recursion ends at {} instead of 0",
            morse[morse.len() - 1]
        )));
    }
    Ok(morse)
}

pub fn is_morse(sigma: &MeanderPermutation) -> Result<bool> {
    Ok(morse_indices(sigma)?.iter().all(|&i| i >= 0))
}

/// Morse numbers from the turning rule: walking the curve, every right turn
/// raises the number by one and every left turn lowers it. An upper arc
/// traversed left-to-right or a lower arc traversed right-to-left is a right
/// turn. Result is in traversal (meander) order.
pub fn morse_by_turns(diagram: &ArcDiagram) -> Result<Vec<i32>> {
    let sigma = permutation_from_arcs(diagram)?;
    let inv = sigma.inverse();
    let n = diagram.n();
    let mut morse = vec![0; n];
    let mut pos = inv.at(1);
    for k in 1..n {
        let upper = k % 2 == 1;
        let next = if upper {
            diagram.upper_partner(pos)
        } else {
            diagram.lower_partner(pos)
        }
        .ok_or_else(|| SturmError::ConsistencyFailure("curve ended early".into()))?;
        let rightwards = next > pos;
        let right_turn = upper == rightwards;
        morse[k] = morse[k - 1] + if right_turn { 1 } else { -1 };
        pos = next;
    }
    Ok(morse)
}

/// Column `k` of the zero-number matrix (meander order, 1-based `k`).
///
/// The sweep runs over the whole column with doubled values so that the half
/// steps next to the diagonal stay integral; `sign(0)` contributes nothing.
/// The diagonal is set to `i_k`, and the anchors `z_{k±1,k} = min(i_k, i_{k±1})`
/// and the vanishing boundary row are checked, not imposed.
pub(crate) fn zero_column(
    inverse: &MeanderPermutation,
    morse: &[i32],
    k: usize,
) -> Result<Vec<i32>> {
    let n = inverse.len();
    let pivot = inverse.at(k);
    let side = |m: usize| -> i32 {
        let x = inverse.at(m);
        match x.cmp(&pivot) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
        }
    };
    let mut col = vec![0i32; n];
    if n == 1 {
        col[0] = morse[0];
        return Ok(col);
    }
    // doubled zero number
    let mut twice: i32;
    if k > 1 {
        twice = 0;
        for j in 1..n {
            twice += alternating(j) * (side(j + 1) - side(j));
            if j + 1 != k {
                if twice % 2 != 0 {
                    return Err(SturmError::ConsistencyFailure(format!(
                        "odd doubled zero number at ({}, {k})",
                        j + 1
                    )));
                }
                col[j] = twice / 2;
            }
        }
        if k != n && col[n - 1] != 0 {
            return Err(SturmError::ConsistencyFailure(format!(
                "z_(N,{k}) = {} instead of 0",
                col[n - 1]
            )));
        }
    } else {
        // column 1 runs backwards from z_(N,1) = 0
        twice = 0;
        for j in (1..n).rev() {
            twice -= alternating(j) * (side(j + 1) - side(j));
            if j != 1 {
                if twice % 2 != 0 {
                    return Err(SturmError::ConsistencyFailure(format!(
                        "odd doubled zero number at ({j}, 1)"
                    )));
                }
                col[j - 1] = twice / 2;
            }
        }
    }
    col[k - 1] = morse[k - 1];
    if k < n {
        let anchor = morse[k - 1].min(morse[k]);
        if col[k] != anchor {
            return Err(SturmError::ConsistencyFailure(format!(
                "z_({},{k}) = {} but min(i_{k}, i_{}) = {anchor}",
                k + 1,
                col[k],
                k + 1
            )));
        }
    }
    if k > 1 {
        let anchor = morse[k - 1].min(morse[k - 2]);
        if col[k - 2] != anchor {
            return Err(SturmError::ConsistencyFailure(format!(
                "z_({},{k}) = {} but min(i_{k}, i_{}) = {anchor}",
                k - 1,
                col[k - 2],
                k - 1
            )));
        }
    }
    if k != 1 && col[0] != 0 {
        return Err(SturmError::ConsistencyFailure(format!("z_(1,{k}) != 0")));
    }
    Ok(col)
}

/// Full zero-number matrix in meander order (`z[j-1][k-1] = z_{jk}`).
pub fn zero_numbers(sigma: &MeanderPermutation) -> Result<Vec<Vec<i32>>> {
    let morse = morse_indices(sigma)?;
    let inv = sigma.inverse();
    let n = sigma.len();
    let mut rows = vec![vec![0; n]; n];
    for k in 1..=n {
        let col = zero_column(&inv, &morse, k)?;
        for (j, z) in col.into_iter().enumerate() {
            rows[j][k - 1] = z;
        }
    }
    Ok(rows)
}

/// Morse and zero numbers of a dissipative meander, with all internal
/// consistency checks (recursion vs turning rule, parity, zero-number
/// anchors and symmetry). The Morse property itself is not required.
pub fn analyze(sigma: &MeanderPermutation) -> Result<MeanderAnalysis> {
    require_odd(sigma)?;
    let diagram = check_meander(sigma)?;
    let inverse = sigma.inverse();
    let morse = morse_recursion(&inverse);
    let n = sigma.len();
    if morse[n - 1] != 0 {
        return Err(SturmError::ConsistencyFailure(format!(
            "Morse recursion ends at {} instead of 0",
            morse[n - 1]
        )));
    }
    if let Some(j) = (1..=n).find(|&j| (morse[j - 1] + j as i32) % 2 == 0) {
        return Err(SturmError::ConsistencyFailure(format!(
            "Morse number {} at meander position {j} has the parity of its position",
            morse[j - 1]
        )));
    }
    let turns = morse_by_turns(&diagram)?;
    if turns != morse {
        return Err(SturmError::ConsistencyFailure(
            "turning rule disagrees with the Morse recursion".into(),
        ));
    }

    let zero = if n <= DENSE_ZERO_LIMIT {
        let mut dense = vec![0i32; n * n];
        for k in 1..=n {
            let col = zero_column(&inverse, &morse, k)?;
            for (j, z) in col.into_iter().enumerate() {
                dense[j * n + (k - 1)] = z;
            }
        }
        for j in 0..n {
            for k in 0..j {
                if dense[j * n + k] != dense[k * n + j] {
                    return Err(SturmError::ConsistencyFailure(format!(
                        "zero numbers not symmetric at ({}, {})",
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        Some(dense)
    } else {
        None
    };

    Ok(MeanderAnalysis {
        sigma: sigma.clone(),
        inverse,
        morse,
        zero,
    })
}

/// Axis positions `j` with `|sigma(j+1) - sigma(j)| = 1`.
pub fn nose_positions(sigma: &MeanderPermutation) -> Vec<usize> {
    (1..sigma.len())
        .filter(|&j| sigma.at(j).abs_diff(sigma.at(j + 1)) == 1)
        .collect()
}
