//! Error-compensated accumulation.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<CompensatedSum>().value()
}

/// Block size for [`BlockedSum`]; plain summation inside a block, compensated across blocks.
pub(crate) const BLOCK: usize = 64;

/// Cheap compensated accumulator for hot loops: terms are summed plainly in
/// blocks of [`BLOCK`] and the block totals go through [`CompensatedSum`].
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct BlockedSum {
    outer: CompensatedSum,
    block: f64,
    fill: usize,
}

impl BlockedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        self.block += x;
        self.fill += 1;
        if self.fill == BLOCK {
            self.outer.add(self.block);
            self.block = 0.0;
            self.fill = 0;
        }
    }

    pub(crate) fn value(mut self) -> f64 {
        self.outer.add(self.block);
        self.outer.value()
    }
}
