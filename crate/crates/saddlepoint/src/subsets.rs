//! Lexicographic rank/unrank bijection for fixed-size index subsets.

/// Overflow-checked binomial coefficient.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 1..=k {
        // multiply before divide keeps every prefix an exact integer
        result = result.checked_mul((n - k + i) as u128)? / i as u128;
    }
    Some(result)
}

/// Bijection between ranks `0..C(n,k)` and sorted k-subsets of `0..n`,
/// ordered lexicographically, computed arithmetically with no tables.
#[derive(Clone, Copy, Debug)]
pub struct SubsetCodec {
    n: usize,
    k: usize,
}

impl SubsetCodec {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n, "subset size must be in 1..=n");
        binomial(n as u64, k as u64).expect("subset count overflows u128");
        SubsetCodec { n, k }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn subset_size(&self) -> usize {
        self.k
    }

    pub fn count(&self) -> u128 {
        binomial(self.n as u64, self.k as u64).expect("checked in new")
    }

    /// The rank-th subset in lexicographic order, sorted ascending.
    pub fn unrank(&self, rank: u128) -> Vec<usize> {
        assert!(rank < self.count(), "rank out of range");
        let mut rest = rank;
        let mut subset = Vec::with_capacity(self.k);
        let mut candidate = 0usize;
        for remaining in (1..=self.k).rev() {
            loop {
                // subsets that pick `candidate` here and fill the tail freely
                let tail = binomial(
                    (self.n - candidate - 1) as u64,
                    (remaining - 1) as u64,
                )
                .expect("within count bound");
                if rest < tail {
                    subset.push(candidate);
                    candidate += 1;
                    break;
                }
                rest -= tail;
                candidate += 1;
            }
        }
        subset
    }

    /// Inverse of [`unrank`](Self::unrank); the input must be sorted
    /// strictly ascending.
    pub fn rank(&self, subset: &[usize]) -> u128 {
        assert_eq!(subset.len(), self.k, "wrong subset size");
        assert!(
            subset.windows(2).all(|w| w[0] < w[1]),
            "subset must be sorted strictly ascending"
        );
        assert!(subset.iter().all(|&e| e < self.n), "element out of range");
        let mut rank: u128 = 0;
        let mut previous: Option<usize> = None;
        for (pos, &element) in subset.iter().enumerate() {
            let low = previous.map_or(0, |p| p + 1);
            for skipped in low..element {
                rank += binomial(
                    (self.n - skipped - 1) as u64,
                    (self.k - pos - 1) as u64,
                )
                .expect("within count bound");
            }
            previous = Some(element);
        }
        rank
    }
}
