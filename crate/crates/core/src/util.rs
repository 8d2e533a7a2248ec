//! Small integer and iteration helpers shared across modules.

use rayon::prelude::*;

use crate::algebra::{prime, with_prime};

/// ceil(log2(x)) for x >= 1, exact on integers.
pub fn ceil_log2(x: u128) -> u32 {
    assert!(x >= 1, "log of zero");
    if x == 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

/// Exact C(n, k) as u128, saturating at u128::MAX.
pub fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All subsets of {0..n-1} with at most `r` elements, smallest first and
/// lexicographic within a size.
pub fn subsets_up_to(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=r.min(n) {
        let mut cur: Vec<usize> = (0..size).collect();
        loop {
            out.push(cur.clone());
            let mut i = size;
            while i > 0 && cur[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            cur[i - 1] += 1;
            for j in i..size {
                cur[j] = cur[j - 1] + 1;
            }
        }
    }
    out
}

/// Parallel map that carries the calling thread's prime into the workers.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    let p = prime();
    items.par_iter().map(|x| with_prime(p, || f(x))).collect()
}
