use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector `(i_0, …, i_n)`; the derived order is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentTuple(pub Vec<u32>);

impl ExponentTuple {
    pub fn zero(nvars: usize) -> Self {
        ExponentTuple(vec![0; nvars])
    }

    /// The tuple `d·e_k`.
    pub fn pure_power(nvars: usize, k: usize, d: u32) -> Self {
        let mut v = vec![0; nvars];
        v[k] = d;
        ExponentTuple(v)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, o: &ExponentTuple) -> ExponentTuple {
        ExponentTuple(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// `self - o` when every entry stays nonnegative.
    pub fn checked_sub(&self, o: &ExponentTuple) -> Option<ExponentTuple> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(ExponentTuple)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All exponent tuples of `n+1` entries with total degree `d`, in
/// lexicographically descending order (`x_0^d` first).
pub fn enumerate_monomials(n: usize, d: u32) -> Vec<ExponentTuple> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n + 1];
    fill(&mut cur, 0, d, &mut out);
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<ExponentTuple>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(ExponentTuple(cur.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        fill(cur, pos + 1, remaining - e, out);
    }
}

/// `C(n, k)` in `u128`, `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.checked_mul((n - j) as u128)? / (j as u128 + 1);
    }
    Some(acc)
}

/// `C(n, k)` for sizes that fit comfortably in `usize`.
pub fn binomial(n: usize, k: usize) -> usize {
    binomial_u128(n as u64, k as u64).expect("binomial overflow") as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        let m = enumerate_monomials(1, 2);
        let got: Vec<Vec<u32>> = m.into_iter().map(|e| e.0).collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let m = enumerate_monomials(2, 1);
        let got: Vec<Vec<u32>> = m.into_iter().map(|e| e.0).collect();
        assert_eq!(got, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(enumerate_monomials(3, 0), vec![ExponentTuple::zero(4)]);
    }

    #[test]
    fn count_matches_stars_and_bars() {
        // Independent count: number of ways to place n bars among d+n slots.
        fn stars_and_bars(n: usize, d: usize) -> usize {
            let mut count = 0;
            for mask in 0u32..(1 << (n + d)) {
                if mask.count_ones() as usize == n {
                    count += 1;
                }
            }
            count
        }
        assert_eq!(enumerate_monomials(2, 4).len(), 15);
        for n in 0..4 {
            for d in 0..5 {
                let list = enumerate_monomials(n, d as u32);
                assert_eq!(list.len(), stars_and_bars(n, d));
                assert!(list.windows(2).all(|w| w[0] > w[1]));
                assert!(list.iter().all(|e| e.degree() == d as u32));
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), 15);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial_u128(200, 100), None);
    }
}
