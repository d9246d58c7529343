//! Set partitions of `{0, …, n−1}` as restricted growth strings.

/// Largest label count for which every partition is enumerated (Bell(8) = 4140).
pub const BELL_GUARD: usize = 8;

/// Iterator over all set partitions of `n` items. Each item is a vector
/// `blocks` where `blocks[i]` is the block of element `i`; blocks are
/// numbered in order of first appearance.
pub struct Partitions {
    current: Vec<usize>,
    maxes: Vec<usize>,
    done: bool,
}

impl Partitions {
    pub fn new(n: usize) -> Self {
        Self {
            current: vec![0; n],
            maxes: vec![0; n],
            done: false,
        }
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let n = self.current.len();
        // advance: rightmost position that can still grow
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            let prev_max = self.maxes[i - 1];
            if self.current[i] <= prev_max {
                self.current[i] += 1;
                self.maxes[i] = prev_max.max(self.current[i]);
                for j in i + 1..n {
                    self.current[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                break;
            }
        }
        Some(out)
    }
}

/// Number of blocks in a restricted growth string.
pub fn block_count(blocks: &[usize]) -> usize {
    blocks.iter().max().map_or(0, |m| m + 1)
}
