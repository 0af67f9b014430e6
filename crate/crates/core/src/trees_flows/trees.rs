//! Tree graphs Γ(j, n) and sign sequences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `k = (k₁, …, k_n)` with `k_i ∈ {1, …, j+i−1}`: particle `j+i` is created
/// by particle `k_i`. Particle labels are 1-based throughout this module.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeGraph {
    pub j: usize,
    pub k: Vec<usize>,
}

impl TreeGraph {
    pub fn new(j: usize, k: Vec<usize>) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidArgument("a tree needs at least one root line".into()));
        }
        for (i, &ki) in k.iter().enumerate() {
            if ki < 1 || ki > j + i {
                return Err(Error::InvalidArgument(format!("k_{} = {ki} outside 1..={}", i + 1, j + i)));
            }
        }
        Ok(Self { j, k })
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }

    /// Number of particles alive just below the last creation.
    pub fn particles(&self) -> usize {
        self.j + self.k.len()
    }

    /// Parent of particle `label`, `None` for root lines.
    pub fn parent(&self, label: usize) -> Option<usize> {
        if label > self.j {
            Some(self.k[label - self.j - 1])
        } else {
            None
        }
    }

    /// Root line reached by walking up from `label`.
    pub fn root(&self, label: usize) -> usize {
        let mut p = label;
        while let Some(q) = self.parent(p) {
            p = q;
        }
        p
    }
}

impl fmt::Display for TreeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.k.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", ks.join(" "))
    }
}

/// `j(j+1)⋯(j+n−1)`.
pub fn tree_count(j: usize, n: usize) -> Result<u64> {
    if j == 0 {
        return Err(Error::InvalidArgument("j must be at least 1".into()));
    }
    let mut c: u64 = 1;
    for i in 0..n {
        c = c.checked_mul((j + i) as u64).ok_or(Error::CountOverflow { j, n })?;
    }
    Ok(c)
}

/// Iterator over Γ(j, n) in lexicographic order of `k`.
#[derive(Debug, Clone)]
pub struct TreeIter {
    j: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for TreeIter {
    type Item = TreeGraph;

    fn next(&mut self) -> Option<TreeGraph> {
        let cur = self.next.take()?;
        let mut k = cur.clone();
        let mut i = k.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if k[i] < self.j + i {
                k[i] += 1;
                for x in &mut k[i + 1..] {
                    *x = 1;
                }
                self.next = Some(k);
                break;
            }
        }
        Some(TreeGraph { j: self.j, k: cur })
    }
}

/// All trees with `j` root lines and `n` nodes. Fails when the count does
/// not fit in a `u64`.
pub fn enumerate_trees(j: usize, n: usize) -> Result<TreeIter> {
    tree_count(j, n)?;
    Ok(TreeIter { j, next: Some(vec![1; n]) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignSequence {
    pub sigma: Vec<Sign>,
}

impl SignSequence {
    pub fn new(sigma: Vec<Sign>) -> Self {
        Self { sigma }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Number of `+` entries.
    pub fn plus_count(&self) -> usize {
        self.sigma.iter().filter(|&&s| s == Sign::Plus).count()
    }

    pub fn minus_count(&self) -> usize {
        self.sigma.len() - self.plus_count()
    }

    /// `(−1)^{|σ|}` with `|σ|` the number of `−` entries, so that gain
    /// terms (`+`) enter with a plus sign and loss terms with a minus sign.
    pub fn term_sign(&self) -> f64 {
        if self.minus_count().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// All `2ⁿ` sequences, `+` before `−` position by position.
    pub fn all(n: usize) -> Vec<SignSequence> {
        (0..1usize << n).map(|m| SignSequence { sigma: (0..n).map(|i| if m >> (n - 1 - i) & 1 == 0 { Sign::Plus } else { Sign::Minus }).collect() }).collect()
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sigma {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' | 'p' => Ok(Sign::Plus),
                '-' | 'm' => Ok(Sign::Minus),
                _ => Err(Error::InvalidArgument(format!("sign must be + or -, got {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignSequence::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let t: Vec<_> = enumerate_trees(2, 1).unwrap().collect();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].k, vec![1]);
        assert_eq!(t[1].k, vec![2]);
        assert_eq!(enumerate_trees(2, 5).unwrap().count(), 720);
        let e: Vec<_> = enumerate_trees(1, 0).unwrap().collect();
        assert_eq!(e.len(), 1);
        assert!(e[0].k.is_empty());
    }

    #[test]
    fn exhaustive_counts_and_order() {
        for j in 1..=4 {
            for n in 0..=6 {
                let all: Vec<_> = enumerate_trees(j, n).unwrap().collect();
                assert_eq!(all.len() as u64, tree_count(j, n).unwrap());
                for w in all.windows(2) {
                    assert!(w[0].k < w[1].k);
                }
                for t in &all {
                    assert!(TreeGraph::new(j, t.k.clone()).is_ok());
                }
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(tree_count(2, 40), Err(Error::CountOverflow { .. })));
        assert!(enumerate_trees(3, 30).is_err());
    }

    #[test]
    fn parents_and_roots() {
        let t = TreeGraph::new(2, vec![1, 3, 2]).unwrap();
        assert_eq!(t.parent(1), None);
        assert_eq!(t.parent(4), Some(3));
        assert_eq!(t.root(4), 1);
        assert_eq!(t.root(5), 2);
        assert!(TreeGraph::new(2, vec![3]).is_err());
    }

    #[test]
    fn signs() {
        let s: SignSequence = "+-+".parse().unwrap();
        assert_eq!(s.plus_count(), 2);
        assert_eq!(s.term_sign(), -1.0);
        assert_eq!("++".parse::<SignSequence>().unwrap().term_sign(), 1.0);
        assert_eq!(s.to_string(), "+-+");
        assert_eq!(SignSequence::all(3).len(), 8);
        assert!("+x".parse::<SignSequence>().is_err());
    }
}
