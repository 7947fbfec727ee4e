//! Lexicographic enumeration of fixed-size index subsets.

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Walks the size-`k` subsets of `lo..n` in lexicographic order.
///
/// ```
/// use framesense::combin::Combinations;
/// let mut c = Combinations::new(4, 2);
/// let mut seen = Vec::new();
/// while let Some(s) = c.next_subset() {
///     seen.push(s.to_vec());
/// }
/// assert_eq!(seen.len(), 6);
/// assert_eq!(seen[0], vec![0, 1]);
/// assert_eq!(seen[5], vec![2, 3]);
/// ```
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    prefix_len: usize,
    started: bool,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self::with_prefix(n, &[], k)
    }

    /// Subsets of size `prefix.len() + k` that start with `prefix` and whose
    /// remaining elements all exceed the last prefix element.
    pub fn with_prefix(n: usize, prefix: &[usize], k: usize) -> Self {
        let start = prefix.last().map_or(0, |&p| p + 1);
        let mut current = prefix.to_vec();
        current.extend(start..start + k);
        let done = start + k > n;
        Self {
            n,
            current,
            prefix_len: prefix.len(),
            started: false,
            done,
        }
    }

    pub fn next_subset(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let len = self.current.len();
        let fixed = self.prefix_len;
        let mut i = len;
        while i > fixed {
            i -= 1;
            if self.current[i] < self.n - (len - i) {
                self.current[i] += 1;
                for j in i + 1..len {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(&self.current);
            }
        }
        self.done = true;
        None
    }
}
