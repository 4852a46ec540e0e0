/// Closed time interval `[start, end]` in whole seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeWindow {
    pub start: i64,
    pub end: i64,
}

impl TimeWindow {
    pub fn new(start: i64, end: i64) -> Self {
        TimeWindow { start, end }
    }

    #[inline]
    pub fn is_ordered(&self) -> bool {
        self.start <= self.end
    }

    #[inline]
    pub fn duration(&self) -> i64 {
        self.end - self.start
    }

    /// Closed-interval overlap: touching endpoints count.
    #[inline]
    pub fn overlaps(&self, other: &TimeWindow) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    #[inline]
    pub fn contains(&self, other: &TimeWindow) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}
