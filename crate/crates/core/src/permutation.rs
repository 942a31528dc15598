//! Permutations of `{0, …, n-1}` and tuples `(γ¹, …, γ^F) ∈ (S_N)^F`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on `|(S_N)^F| = (N!)^F`.
pub const DEFAULT_TUPLE_LIMIT: u128 = 1_000_000;

/// A bijection on `{0, …, n-1}`; `images()[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::Shape("permutation of an empty set".into()));
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::Shape(format!("{images:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::Shape(format!("transposition ({a} {b}) outside 0..{n}")));
        }
        images.swap(a, b);
        Ok(Permutation(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inversions(&self) -> usize {
        let p = &self.0;
        (0..p.len())
            .map(|i| p[i + 1..].iter().filter(|&&v| v < p[i]).count())
            .sum()
    }

    /// Parity of the inversion count, as `±1`.
    pub fn sign(&self) -> i8 {
        if self.inversions().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation(other.0.iter().map(|&i| self.0[i]).collect()))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }
}

/// All of `S_n` in lexicographic order of the image sequence.
pub fn lex_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut next = (n > 0).then(|| (0..n).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut p = current.clone();
        // standard next-permutation step
        if let Some(i) = (0..p.len().saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) {
            let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
            p.swap(i, j);
            p[i + 1..].reverse();
            next = Some(p);
        }
        Some(Permutation(current))
    })
}

/// An element `(γ¹, …, γ^F)` of `(S_N)^F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationTuple {
    n: usize,
    gammas: Vec<Permutation>,
}

impl PermutationTuple {
    pub fn new(gammas: Vec<Permutation>) -> Result<Self> {
        let n = gammas
            .first()
            .map(Permutation::len)
            .ok_or_else(|| Error::Shape("a permutation tuple needs F >= 1 components".into()))?;
        if gammas.iter().any(|g| g.len() != n) {
            return Err(Error::Shape("permutation tuple components differ in size".into()));
        }
        Ok(PermutationTuple { n, gammas })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[Permutation] {
        &self.gammas
    }

    pub fn signs(&self) -> Vec<i8> {
        self.gammas.iter().map(Permutation::sign).collect()
    }
}

fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// `(N!)^F`, or `None` if it does not fit in `u128`.
pub fn tuple_count(n: usize, f: usize) -> Option<u128> {
    let per = factorial(n)?;
    (0..f).try_fold(1u128, |acc, _| acc.checked_mul(per))
}

pub(crate) fn check_tuple_limit(n: usize, f: usize, limit: u128) -> Result<u128> {
    match tuple_count(n, f) {
        Some(c) if c <= limit => Ok(c),
        other => Err(Error::Resource {
            what: "permutation tuples",
            required: other.unwrap_or(u128::MAX),
            limit,
        }),
    }
}

/// Iterator over `(S_N)^F`, lexicographic in `(γ¹, …, γ^F)` with `γ¹`
/// most significant and each component in lexicographic image order.
#[derive(Debug, Clone)]
pub struct GammaTuples {
    perms: Vec<Permutation>,
    counter: Vec<usize>,
    started: bool,
    done: bool,
}

impl GammaTuples {
    /// `S_N` in the order components run through.
    pub fn permutations(&self) -> &[Permutation] {
        &self.perms
    }

    /// Advances and returns the next tuple as indices into
    /// [`permutations`](Self::permutations).
    pub fn next_indices(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.started {
            let m = self.perms.len();
            let mut k = self.counter.len();
            loop {
                if k == 0 {
                    self.done = true;
                    return None;
                }
                k -= 1;
                self.counter[k] += 1;
                if self.counter[k] < m {
                    break;
                }
                self.counter[k] = 0;
            }
        }
        self.started = true;
        Some(&self.counter)
    }
}

impl Iterator for GammaTuples {
    type Item = PermutationTuple;

    fn next(&mut self) -> Option<PermutationTuple> {
        let idx = self.next_indices()?.to_vec();
        let gammas = idx.iter().map(|&i| self.perms[i].clone()).collect();
        Some(PermutationTuple {
            n: self.perms[0].len(),
            gammas,
        })
    }
}

/// Enumerates every element of `(S_N)^F` exactly once.
///
/// Fails with a resource error when `(N!)^F` exceeds `limit`.
pub fn enumerate_gamma(n: usize, f: usize, limit: u128) -> Result<GammaTuples> {
    if n == 0 || f == 0 {
        return Err(Error::Shape(format!("N and F must be positive, got N={n}, F={f}")));
    }
    check_tuple_limit(n, f, limit)?;
    Ok(GammaTuples {
        perms: lex_permutations(n).collect(),
        counter: vec![0; f],
        started: false,
        done: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    #[test]
    fn validates_bijection() {
        assert!(Permutation::new(vec![1, 0, 2]).is_ok());
        assert!(Permutation::new(vec![1, 1, 2]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(Permutation::identity(4).sign(), 1);
        assert_eq!(Permutation::transposition(4, 0, 3).unwrap().sign(), -1);
        // 3-cycle is even
        assert_eq!(Permutation::new(vec![1, 2, 0]).unwrap().sign(), 1);
        assert_eq!(Permutation::new(vec![2, 1, 0]).unwrap().inversions(), 3);
    }

    #[test]
    fn lexicographic_s3() {
        let all: Vec<Vec<usize>> = lex_permutations(3).map(|p| p.images().to_vec()).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        assert_eq!(lex_permutations(1).count(), 1);
        assert_eq!(lex_permutations(5).count(), 120);
    }

    #[test]
    fn tuple_counts() {
        assert_eq!(enumerate_gamma(1, 3, DEFAULT_TUPLE_LIMIT).unwrap().count(), 1);
        assert_eq!(enumerate_gamma(3, 2, DEFAULT_TUPLE_LIMIT).unwrap().count(), 36);
        assert_eq!(enumerate_gamma(4, 3, DEFAULT_TUPLE_LIMIT).unwrap().count(), 13824);
        assert_eq!(tuple_count(4, 3), Some(13824));
    }

    #[test]
    fn n2_f2_tuples_in_order() {
        let id = Permutation::identity(2);
        let sw = Permutation::transposition(2, 0, 1).unwrap();
        let got: Vec<Vec<Permutation>> = enumerate_gamma(2, 2, DEFAULT_TUPLE_LIMIT)
            .unwrap()
            .map(|t| t.gammas().to_vec())
            .collect();
        assert_eq!(
            got,
            vec![
                vec![id.clone(), id.clone()],
                vec![id.clone(), sw.clone()],
                vec![sw.clone(), id.clone()],
                vec![sw.clone(), sw.clone()]
            ]
        );
    }

    #[test]
    fn every_tuple_exactly_once() {
        let tuples: Vec<_> = enumerate_gamma(3, 3, DEFAULT_TUPLE_LIMIT).unwrap().collect();
        let distinct: HashSet<Vec<Permutation>> = tuples.iter().map(|t| t.gammas().to_vec()).collect();
        assert_eq!(tuples.len(), 216);
        assert_eq!(distinct.len(), 216);
        assert!(tuples.iter().all(|t| t.f() == 3 && t.n() == 3));
    }

    #[test]
    fn limit_exceeded() {
        let err = enumerate_gamma(5, 3, DEFAULT_TUPLE_LIMIT).unwrap_err();
        assert!(matches!(
            err,
            Error::Resource {
                required: 1_728_000,
                ..
            }
        ));
        assert!(enumerate_gamma(40, 2, DEFAULT_TUPLE_LIMIT).is_err());
        assert!(enumerate_gamma(4, 3, 1000).is_err());
    }

    proptest! {
        #[test]
        fn sign_is_multiplicative(
            (a, b) in (1usize..8).prop_flat_map(|n| (perm_strategy(n), perm_strategy(n)))
        ) {
            let ab = a.compose(&b).unwrap();
            prop_assert_eq!(ab.sign(), a.sign() * b.sign());
            prop_assert_eq!(a.inverse().sign(), a.sign());
            prop_assert_eq!(a.compose(&a.inverse()).unwrap(), Permutation::identity(a.len()));
        }
    }
}
