/// Neumaier-compensated running sum, accumulated in a fixed sequential order.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }

    /// Unevaluated `(hi, lo)` pair; `hi + lo` is the compensated sum.
    pub fn parts(&self) -> (f64, f64) {
        let hi = self.sum + self.carry;
        let lo = self.carry - (hi - self.sum);
        (hi, lo)
    }
}
