//! Exact rank of integer matrices.

use num_bigint::BigInt;
use num_traits::Zero;

/// Rank by fraction-free (Bareiss) elimination. Rows may be any length;
/// missing entries count as zero.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.resize(width, BigInt::zero());
            r
        })
        .collect();
    let h = m.len();
    let mut k = 0;
    let mut prev = BigInt::from(1);
    for c in 0..width {
        if k == h {
            break;
        }
        let Some(p) = (k..h).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(k, p);
        for i in k + 1..h {
            for j in c + 1..width {
                let v = (&m[k][c] * &m[i][j] - &m[i][c] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[k][c].clone();
        k += 1;
    }
    k
}

/// Indices of a minimal linearly dependent subset of `vectors`, if the
/// family is dependent: the first vector that lies in the span of the earlier
/// ones, together with a minimal set of earlier vectors spanning it.
pub fn minimal_dependent_subset(vectors: &[Vec<BigInt>]) -> Option<Vec<usize>> {
    let mut independent: Vec<usize> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut with: Vec<Vec<BigInt>> = independent.iter().map(|&j| vectors[j].clone()).collect();
        with.push(v.clone());
        if rank(&with) == independent.len() + 1 {
            independent.push(i);
            continue;
        }
        let mut support = independent.clone();
        let mut t = 0;
        while t < support.len() {
            let trial: Vec<usize> = support.iter().enumerate().filter(|&(s, _)| s != t).map(|(_, &j)| j).collect();
            let mut rows: Vec<Vec<BigInt>> = trial.iter().map(|&j| vectors[j].clone()).collect();
            let base = rank(&rows);
            rows.push(v.clone());
            if rank(&rows) == base {
                support = trial;
            } else {
                t += 1;
            }
        }
        support.push(i);
        return Some(support);
    }
    None
}
