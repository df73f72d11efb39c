//! Exhaustive enumeration of Sturm permutations for small `N`.
//!
//! The inverse `a = sigma^-1` is built one entry at a time. A prefix is cut
//! as soon as its newest arc crosses an earlier arc on the same side or the
//! running Morse number turns negative.

use rayon::prelude::*;

use crate::error::{Result, SturmError};
use crate::model::{Arc, MeanderPermutation};

/// Largest `N` enumerated without opting in.
pub const DEFAULT_MAX_N: usize = 9;
/// Hard cap.
pub const HARD_MAX_N: usize = 11;

#[derive(Clone, Copy, Debug, Default)]
pub struct EnumerateOptions {
    /// Permit `N = 11`.
    pub allow_large: bool,
    pub parallel: bool,
}

struct Prefix {
    n: usize,
    a: Vec<usize>,
    used: Vec<bool>,
    upper: Vec<Arc>,
    lower: Vec<Arc>,
    morse: i32,
}

fn crosses((a, b): Arc, (c, d): Arc) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

impl Prefix {
    fn new(n: usize) -> Self {
        let mut used = vec![false; n + 1];
        used[1] = true;
        Self {
            n,
            a: vec![1],
            used,
            upper: Vec::new(),
            lower: Vec::new(),
            morse: 0,
        }
    }

    /// Tries to append `x`; returns false (and leaves state untouched) if pruned.
    fn push(&mut self, x: usize) -> bool {
        let k = self.a.len();
        let last = self.a[k - 1];
        let arc = (last.min(x), last.max(x));
        let upper = k % 2 == 1;
        let side = if upper { &self.upper } else { &self.lower };
        if side.iter().any(|&other| crosses(arc, other)) {
            return false;
        }
        let step = if x > last { 1 } else { -1 };
        let morse = self.morse + if upper { step } else { -step };
        if morse < 0 {
            return false;
        }
        if upper {
            self.upper.push(arc);
        } else {
            self.lower.push(arc);
        }
        self.a.push(x);
        self.used[x] = true;
        self.morse = morse;
        true
    }

    fn pop(&mut self) {
        let x = self.a.pop().expect("nonempty prefix");
        self.used[x] = false;
        let k = self.a.len();
        if k % 2 == 1 {
            self.upper.pop();
        } else {
            self.lower.pop();
        }
        // recompute rather than store a history
        let last = self.a[k - 1];
        let step = if x > last { 1 } else { -1 };
        self.morse -= if k % 2 == 1 { step } else { -step };
    }

    fn extend(&mut self, out: &mut Vec<MeanderPermutation>) {
        let k = self.a.len();
        if k == self.n {
            debug_assert_eq!(self.morse, 0);
            let inv = MeanderPermutation::new(self.a.clone()).expect("prefix is a bijection");
            out.push(inv.inverse());
            return;
        }
        if k == self.n - 1 {
            if self.push(self.n) {
                self.extend(out);
                self.pop();
            }
            return;
        }
        for x in 2..self.n {
            if !self.used[x] && self.push(x) {
                self.extend(out);
                self.pop();
            }
        }
    }
}

fn check_n(n: usize, options: EnumerateOptions) -> Result<()> {
    if n == 0 {
        return Err(SturmError::Empty);
    }
    if n % 2 == 0 {
        return Err(SturmError::EvenLength(n));
    }
    if n > HARD_MAX_N {
        return Err(SturmError::CapExceeded(format!(
            "N = {n} exceeds the hard cap {HARD_MAX_N}"
        )));
    }
    if n > DEFAULT_MAX_N && !options.allow_large {
        return Err(SturmError::CapExceeded(format!(
            "N = {n} requires the large-enumeration opt-in"
        )));
    }
    Ok(())
}

/// All Sturm permutations (dissipative, meander, Morse) in `S_N`, sorted
/// lexicographically.
pub fn enumerate_sturm_with(n: usize, options: EnumerateOptions) -> Result<Vec<MeanderPermutation>> {
    check_n(n, options)?;
    if n == 1 {
        return Ok(vec![MeanderPermutation::identity(1)]);
    }
    let mut out = if options.parallel && n > 3 {
        (2..n)
            .into_par_iter()
            .map(|x| {
                let mut prefix = Prefix::new(n);
                let mut part = Vec::new();
                if prefix.push(x) {
                    prefix.extend(&mut part);
                }
                part
            })
            .flatten()
            .collect()
    } else {
        let mut prefix = Prefix::new(n);
        let mut out = Vec::new();
        prefix.extend(&mut out);
        out
    };
    out.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
    Ok(out)
}

/// Parallel enumeration up to the default cap.
pub fn enumerate_sturm(n: usize) -> Result<Vec<MeanderPermutation>> {
    enumerate_sturm_with(
        n,
        EnumerateOptions {
            allow_large: false,
            parallel: true,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_cases() {
        assert_eq!(enumerate_sturm(1).unwrap(), vec![MeanderPermutation::identity(1)]);
        assert_eq!(enumerate_sturm(3).unwrap(), vec![MeanderPermutation::identity(3)]);
    }

    #[test]
    fn counts() {
        let counts: Vec<usize> = [1, 3, 5, 7, 9]
            .iter()
            .map(|&n| enumerate_sturm(n).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 7, 32]);
    }

    #[test]
    fn seven_contains_known() {
        let all = enumerate_sturm(7).unwrap();
        for s in ["1 6 3 4 5 2 7", "1 4 5 6 3 2 7"] {
            assert!(all.contains(&MeanderPermutation::parse(s).unwrap()));
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let seq = enumerate_sturm_with(9, EnumerateOptions::default()).unwrap();
        assert_eq!(seq, enumerate_sturm(9).unwrap());
    }

    #[test]
    fn caps() {
        assert!(matches!(enumerate_sturm(11), Err(SturmError::CapExceeded(_))));
        assert!(matches!(enumerate_sturm(13), Err(SturmError::CapExceeded(_))));
        assert_eq!(enumerate_sturm(4), Err(SturmError::EvenLength(4)));
    }
}
