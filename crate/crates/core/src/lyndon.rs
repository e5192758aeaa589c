//! Words over an alphabet whose order is supplied by the caller.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Lexicographic comparison; a proper prefix is smaller.
pub fn compare_words<T>(a: &[T], b: &[T], cmp: impl Fn(&T, &T) -> Ordering) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match cmp(x, y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Every proper nonempty suffix is strictly greater than the word.
pub fn is_lyndon<T>(w: &[T], cmp: impl Fn(&T, &T) -> Ordering) -> Result<bool> {
    if w.is_empty() {
        return Err(Error::domain("the empty word is not a Lyndon candidate"));
    }
    Ok((1..w.len()).all(|i| compare_words(&w[i..], w, &cmp) == Ordering::Greater))
}

/// Chen–Fox–Lyndon factorization (Duval). Factors are Lyndon and
/// nonincreasing; their concatenation is `w`.
pub fn cfl_factorize<T: Clone>(w: &[T], cmp: impl Fn(&T, &T) -> Ordering) -> Vec<Vec<T>> {
    let n = w.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut j, mut k) = (i + 1, i);
        while j < n {
            match cmp(&w[k], &w[j]) {
                Ordering::Less => k = i,
                Ordering::Equal => k += 1,
                Ordering::Greater => break,
            }
            j += 1;
        }
        while i <= k {
            out.push(w[i..i + j - k].to_vec());
            i += j - k;
        }
    }
    out
}

/// Whether `w` is a shuffle of `parts`. On success returns, for every
/// position of `w`, the index of the part it was read from.
pub fn is_word_shuffle<T>(w: &[T], parts: &[Vec<T>], cmp: impl Fn(&T, &T) -> Ordering) -> Option<Vec<usize>> {
    if parts.iter().map(Vec::len).sum::<usize>() != w.len() {
        return None;
    }
    let mut dead: HashSet<Vec<usize>> = HashSet::new();
    let mut progress = vec![0; parts.len()];
    let mut witness = Vec::with_capacity(w.len());
    fn search<T>(
        w: &[T],
        parts: &[Vec<T>],
        cmp: &dyn Fn(&T, &T) -> Ordering,
        progress: &mut Vec<usize>,
        witness: &mut Vec<usize>,
        dead: &mut HashSet<Vec<usize>>,
    ) -> bool {
        let pos = witness.len();
        if pos == w.len() {
            return true;
        }
        if dead.contains(progress) {
            return false;
        }
        for p in 0..parts.len() {
            let at = progress[p];
            if at < parts[p].len() && cmp(&parts[p][at], &w[pos]) == Ordering::Equal {
                progress[p] += 1;
                witness.push(p);
                if search(w, parts, cmp, progress, witness, dead) {
                    return true;
                }
                witness.pop();
                progress[p] -= 1;
            }
        }
        dead.insert(progress.clone());
        false
    }
    search(w, parts, &cmp, &mut progress, &mut witness, &mut dead).then_some(witness)
}
