/// Neumaier-compensated running sum. With compensation disabled it degrades
/// to a plain accumulator so both paths share one code shape.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Accumulator {
    sum: f64,
    carry: f64,
    compensated: bool,
}

impl Accumulator {
    pub(crate) fn new(compensated: bool) -> Self {
        Self {
            sum: 0.0,
            carry: 0.0,
            compensated,
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        if !self.compensated {
            self.sum += x;
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.carry
    }
}
