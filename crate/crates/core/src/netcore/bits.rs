//! Packed symmetric adjacency rows.
//!
//! Every node owns a row of `u64` words; bit `j` of row `i` is set when the
//! pair `(i, j)` belongs to the relation. Shared-partner counts reduce to a
//! popcount over the intersection of two rows.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRows {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Sets or clears both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, on: bool) {
        let (wi, bi) = (i * self.words + j / 64, 1u64 << (j % 64));
        let (wj, bj) = (j * self.words + i / 64, 1u64 << (i % 64));
        if on {
            self.bits[wi] |= bi;
            self.bits[wj] |= bj;
        } else {
            self.bits[wi] &= !bi;
            self.bits[wj] &= !bj;
        }
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Popcount of `row_a(i) & row_b(j)`.
    #[inline]
    pub fn common(a: &BitRows, i: usize, b: &BitRows, j: usize) -> usize {
        a.row(i)
            .iter()
            .zip(b.row(j))
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }

    /// Indices set in `row(i)`.
    pub fn ones(&self, i: usize) -> Ones<'_> {
        Ones::new(self.row(i), None)
    }

    /// Indices `k` with `a(i, k)` and `b(j, k)`.
    pub fn ones_and<'a>(a: &'a BitRows, i: usize, b: &'a BitRows, j: usize) -> Ones<'a> {
        Ones::new(a.row(i), Some((b.row(j), false)))
    }

    /// Indices `k` with `a(i, k)` and not `b(j, k)`.
    pub fn ones_and_not<'a>(a: &'a BitRows, i: usize, b: &'a BitRows, j: usize) -> Ones<'a> {
        Ones::new(a.row(i), Some((b.row(j), true)))
    }
}

/// Iterator over set bits of a row, optionally masked by a second row.
pub struct Ones<'a> {
    a: &'a [u64],
    mask: Option<(&'a [u64], bool)>,
    word: usize,
    current: u64,
}

impl<'a> Ones<'a> {
    fn new(a: &'a [u64], mask: Option<(&'a [u64], bool)>) -> Self {
        let mut it = Self {
            a,
            mask,
            word: 0,
            current: 0,
        };
        it.current = it.load(0);
        it
    }

    #[inline]
    fn load(&self, w: usize) -> u64 {
        if w >= self.a.len() {
            return 0;
        }
        match self.mask {
            None => self.a[w],
            Some((m, false)) => self.a[w] & m[w],
            Some((m, true)) => self.a[w] & !m[w],
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word * 64 + tz);
            }
            self.word += 1;
            if self.word >= self.a.len() {
                return None;
            }
            self.current = self.load(self.word);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_iterate_across_word_boundary() {
        let mut r = BitRows::new(130);
        r.set_sym(0, 5, true);
        r.set_sym(0, 64, true);
        r.set_sym(0, 129, true);
        r.set_sym(3, 64, true);
        assert!(r.get(129, 0));
        assert_eq!(r.ones(0).collect::<Vec<_>>(), vec![5, 64, 129]);
        assert_eq!(r.degree(64), 2);
        assert_eq!(BitRows::common(&r, 0, &r, 3), 1);
        assert_eq!(BitRows::ones_and(&r, 0, &r, 3).collect::<Vec<_>>(), vec![64]);
        assert_eq!(
            BitRows::ones_and_not(&r, 0, &r, 3).collect::<Vec<_>>(),
            vec![5, 129]
        );
        r.set_sym(64, 0, false);
        assert_eq!(r.ones(0).collect::<Vec<_>>(), vec![5, 129]);
    }
}
