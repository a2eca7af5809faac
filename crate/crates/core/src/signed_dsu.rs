//! Union-find over elements with a sign, for quotients of a free module by
//! relations `a = +-b` and `a = 0`.
//!
//! A class forced to satisfy `a = -a` is zero over the integers mod torsion
//! and over any field of characteristic other than 2, so it is marked zero.

#[derive(Debug, Clone)]
pub struct SignedDsu {
    parent: Vec<u32>,
    /// `true` when the element is the negative of its parent.
    flip: Vec<bool>,
    rank: Vec<u8>,
    zero: Vec<bool>,
}

impl SignedDsu {
    pub fn new(n: usize) -> Self {
        SignedDsu {
            parent: (0..n as u32).collect(),
            flip: vec![false; n],
            rank: vec![0; n],
            zero: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of `x` and whether `x = -root`.
    pub fn find(&mut self, x: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut cur = x;
        let mut acc = false;
        while self.parent[cur] as usize != cur {
            path.push(cur);
            acc ^= self.flip[cur];
            cur = self.parent[cur] as usize;
        }
        let root = cur;
        // Recompress: each node's flip becomes its parity to the root.
        let mut parity = acc;
        for &node in &path {
            let own = self.flip[node];
            self.parent[node] = root as u32;
            self.flip[node] = parity;
            parity ^= own;
        }
        (root, acc)
    }

    /// Records `a = b` (`negate = false`) or `a = -b`.
    pub fn union(&mut self, a: usize, b: usize, negate: bool) {
        let (ra, fa) = self.find(a);
        let (rb, fb) = self.find(b);
        if ra == rb {
            if fa ^ fb != negate {
                self.zero[ra] = true;
            }
            return;
        }
        // ra = (fa) a, a = (negate) b, b = (fb) rb.
        let rel = fa ^ fb ^ negate;
        let z = self.zero[ra] || self.zero[rb];
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi as u32;
        self.flip[lo] = rel;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        self.zero[hi] = z;
    }

    pub fn set_zero(&mut self, a: usize) {
        let (r, _) = self.find(a);
        self.zero[r] = true;
    }

    pub fn is_zero(&mut self, a: usize) -> bool {
        let (r, _) = self.find(a);
        self.zero[r]
    }

    /// Numbers the non-zero classes `1, 2, ...` in order of their least
    /// element and returns, per element, `+-class` or `0`.
    pub fn resolve(&mut self) -> Vec<i32> {
        let n = self.len();
        let mut label = vec![0i32; n];
        let mut out = vec![0i32; n];
        let mut next = 0i32;
        for x in 0..n {
            let (r, f) = self.find(x);
            if self.zero[r] {
                continue;
            }
            if label[r] == 0 {
                next += 1;
                label[r] = next;
            }
            out[x] = if f { -label[r] } else { label[r] };
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs_compose() {
        let mut d = SignedDsu::new(4);
        d.union(0, 1, true);
        d.union(1, 2, true);
        d.union(3, 2, false);
        assert_eq!(d.resolve(), vec![1, -1, 1, 1]);
    }

    #[test]
    fn sign_conflict_kills_class() {
        let mut d = SignedDsu::new(3);
        d.union(0, 1, true);
        d.union(1, 2, false);
        d.union(2, 0, false);
        assert_eq!(d.resolve(), vec![0, 0, 0]);
    }

    #[test]
    fn zero_propagates_through_union() {
        let mut d = SignedDsu::new(4);
        d.set_zero(3);
        d.union(0, 1, false);
        d.union(1, 3, true);
        assert_eq!(d.resolve(), vec![0, 0, 1, 0]);
    }

    #[test]
    fn long_chain_compresses() {
        let n = 10_000;
        let mut d = SignedDsu::new(n);
        for i in 1..n {
            d.union(i, i - 1, true);
        }
        let r = d.resolve();
        for (i, &c) in r.iter().enumerate() {
            assert_eq!(c * r[0], if i % 2 == 0 { 1 } else { -1 });
        }
    }
}
