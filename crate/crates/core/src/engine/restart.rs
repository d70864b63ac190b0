/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, 1, …, indexed from 1.
pub fn luby(i: u64) -> u64 {
    assert!(i >= 1, "the Luby sequence starts at index 1");
    let mut i = i;
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Restart after u·luby(i) learned clauses, where i counts restarts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestartPolicy {
    unit: u64,
    index: u64,
}

impl RestartPolicy {
    pub fn new(unit: u64) -> RestartPolicy {
        RestartPolicy { unit, index: 1 }
    }

    /// Learned clauses needed for the next restart.
    pub fn threshold(&self) -> u64 {
        self.unit * luby(self.index)
    }

    pub fn advance(&mut self) {
        self.index += 1;
    }

    /// The next `n` thresholds, without advancing.
    pub fn schedule(&self, n: usize) -> Vec<u64> {
        let mut p = self.clone();
        (0..n)
            .map(|_| {
                let t = p.threshold();
                p.advance();
                t
            })
            .collect()
    }
}
