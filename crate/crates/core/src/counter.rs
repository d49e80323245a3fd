/// Monotone count of elementary comparison events: one hash probe, one trie
/// node visit, or one automaton transition each.
///
/// Each query stream owns its counter; indexes take `&mut ComparisonCounter`
/// so a shared, immutable index can serve many threads.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct ComparisonCounter {
    probes: u64,
}

impl ComparisonCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn tick(&mut self) {
        self.probes += 1;
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.probes += n;
    }

    pub fn probes(&self) -> u64 {
        self.probes
    }

    /// Returns the current count and starts over from zero.
    pub fn take(&mut self) -> u64 {
        std::mem::take(&mut self.probes)
    }
}
