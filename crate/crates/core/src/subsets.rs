//! Lexicographic enumeration of k-subsets of `0..n`.

/// In-place lexicographic walk over the `k`-subsets of `0..n`.
///
/// `next_subset` hands out a borrowed slice, so the hot loops of the
/// exhaustive searches allocate nothing per candidate.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    started: bool,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            started: false,
            done: k > n,
        }
    }

    pub fn next_subset(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in (i + 1)..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
        self.done = true;
        None
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut it = Combinations::new(n, k);
    let mut out = Vec::new();
    while let Some(s) = it.next_subset() {
        out.push(s.to_vec());
    }
    out
}

/// Indices of `0..n` not in the sorted list `subset`.
pub fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(n.saturating_sub(subset.len()));
    complement_into(n, subset, &mut out);
    out
}

pub(crate) fn complement_into(n: usize, subset: &[usize], out: &mut Vec<usize>) {
    out.clear();
    let mut it = subset.iter().peekable();
    for i in 0..n {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        assert_eq!(
            k_subsets(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn edge_sizes() {
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(k_subsets(3, 3), vec![vec![0, 1, 2]]);
        assert!(k_subsets(2, 3).is_empty());
    }

    #[test]
    fn counts_match_binomial() {
        for n in 0..=10 {
            for k in 0..=n {
                assert_eq!(k_subsets(n, k).len() as u128, binomial(n, k));
            }
        }
        assert_eq!(binomial(26, 13), 10_400_600);
    }

    #[test]
    fn complement_of_subset() {
        assert_eq!(complement(6, &[0, 3]), vec![1, 2, 4, 5]);
        assert_eq!(complement(3, &[0, 1, 2]), Vec::<usize>::new());
        assert_eq!(complement(3, &[]), vec![0, 1, 2]);
    }
}
