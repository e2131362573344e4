/// Disjoint-set forest with path halving and union by size.
///
/// Representatives are tracked by the callers, so one forest can drive
/// several filtrations that share the same merge structure.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    roots: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        assert!(n < u32::MAX as usize);
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            roots: n,
        }
    }

    #[inline]
    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            let gp = self.parent[p as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    /// Links two distinct roots and returns the surviving root.
    #[inline]
    pub fn link(&mut self, a: u32, b: u32) -> u32 {
        debug_assert!(a != b && self.parent[a as usize] == a && self.parent[b as usize] == b);
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.roots -= 1;
        big
    }

    pub fn root_count(&self) -> usize {
        self.roots
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_is_idempotent_and_link_reduces_roots() {
        let mut uf = UnionFind::new(6);
        assert_eq!(uf.root_count(), 6);
        let r = uf.link(0, 1);
        assert_eq!(uf.root_count(), 5);
        assert_eq!(uf.find(0), r);
        assert_eq!(uf.find(1), r);
        let (a, b) = (uf.find(2), uf.find(3));
        let r2 = uf.link(a, b);
        let r3 = uf.link(r, r2);
        assert_eq!(uf.root_count(), 3);
        for v in 0..4 {
            assert_eq!(uf.find(v), r3);
            let once = uf.find(v);
            assert_eq!(uf.find(once), r3);
        }
        assert_eq!(uf.find(5), 5);
    }
}
