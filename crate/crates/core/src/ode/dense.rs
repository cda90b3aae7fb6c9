//! Continuous extensions of accepted steps.

/// Interpolation data for one accepted step.
#[derive(Debug, Clone)]
pub(crate) enum Segment<const N: usize> {
    /// Dormand–Prince 5(4) quartic extension.
    Quartic {
        x0: f64,
        h: f64,
        rcont: [[f64; N]; 5],
    },
    /// Dormand–Prince 8(5,3) seventh-order extension.
    Septic {
        x0: f64,
        h: f64,
        y0: [f64; N],
        f: [[f64; N]; 7],
    },
}

impl<const N: usize> Segment<N> {
    pub(crate) fn start(&self) -> f64 {
        match self {
            Segment::Quartic { x0, .. } | Segment::Septic { x0, .. } => *x0,
        }
    }

    pub(crate) fn end(&self) -> f64 {
        match self {
            Segment::Quartic { x0, h, .. } | Segment::Septic { x0, h, .. } => x0 + h,
        }
    }

    #[cfg(test)]
    pub(crate) fn contains(&self, x: f64) -> bool {
        self.start() <= x && x <= self.end()
    }

    pub(crate) fn eval(&self, x: f64) -> [f64; N] {
        match self {
            Segment::Quartic { x0, h, rcont: r } => {
                let t = (x - x0) / h;
                let t1 = 1.0 - t;
                std::array::from_fn(|i| {
                    r[0][i] + t * (r[1][i] + t1 * (r[2][i] + t * (r[3][i] + t1 * r[4][i])))
                })
            }
            Segment::Septic { x0, h, y0, f } => {
                let t = (x - x0) / h;
                let t1 = 1.0 - t;
                std::array::from_fn(|i| {
                    let mut acc = 0.0;
                    for (j, row) in f.iter().enumerate().rev() {
                        acc += row[i];
                        acc *= if j % 2 == 0 { t } else { t1 };
                    }
                    y0[i] + acc
                })
            }
        }
    }
}

/// Piecewise continuous solution assembled from dense segments.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub(crate) segments: Vec<Segment<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.segments.first()?.start(), self.segments.last()?.end()))
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Interpolated state at `x`, or `None` outside the integrated span.
    pub fn sample(&self, x: f64) -> Option<[f64; N]> {
        let (lo, hi) = self.span()?;
        if x < lo || x > hi {
            return None;
        }
        let idx = self.segments.partition_point(|s| s.end() < x);
        Some(self.segments[idx.min(self.segments.len() - 1)].eval(x))
    }
}
