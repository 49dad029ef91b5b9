//! Union-find with undo, for depth-first sums over matchings.

#[derive(Clone, Debug)]
pub(crate) struct RollbackDsu {
    parent: Vec<u32>,
    size: Vec<u32>,
    comps: usize,
    log: Vec<u32>,
}

const NOOP: u32 = u32::MAX;

impl RollbackDsu {
    pub fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            comps: n,
            log: Vec::new(),
        }
    }

    pub fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.log.push(NOOP);
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.comps -= 1;
        self.log.push(rb);
    }

    pub fn components(&self) -> usize {
        self.comps
    }

    pub fn mark(&self) -> usize {
        self.log.len()
    }

    pub fn rollback(&mut self, mark: usize) {
        while self.log.len() > mark {
            let rb = self.log.pop().unwrap();
            if rb == NOOP {
                continue;
            }
            let ra = self.parent[rb as usize];
            self.size[ra as usize] -= self.size[rb as usize];
            self.parent[rb as usize] = rb;
            self.comps += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undo_restores_components() {
        let mut d = RollbackDsu::new(5);
        d.union(0, 1);
        let m = d.mark();
        d.union(1, 2);
        d.union(0, 2);
        d.union(3, 4);
        assert_eq!(d.components(), 2);
        d.rollback(m);
        assert_eq!(d.components(), 4);
        assert_ne!(d.find(2), d.find(0));
        assert_eq!(d.find(1), d.find(0));
    }
}
