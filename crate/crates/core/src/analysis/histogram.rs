use crate::error::{Error, Result};

/// Delay histogram of `t_b − t_a` over `[min, max)` ps.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceHistogram {
    pub bin_width: u64,
    pub delay_range: (i64, i64),
    pub counts: Vec<u64>,
    pub channels: (u16, u16),
    /// Excitation period, ps.
    pub rep_period: f64,
}

impl CoincidenceHistogram {
    /// An empty histogram with the given binning.
    pub fn zeros(bin_width: u64, delay_range: (i64, i64), rep_period: f64) -> Result<Self> {
        let bins = bin_count(bin_width, delay_range)?;
        Ok(Self {
            bin_width,
            delay_range,
            counts: vec![0; bins],
            channels: (0, 1),
            rep_period,
        })
    }

    pub fn bin_center(&self, bin: usize) -> f64 {
        self.delay_range.0 as f64 + (bin as f64 + 0.5) * self.bin_width as f64
    }

    pub fn bin_start(&self, bin: usize) -> f64 {
        self.delay_range.0 as f64 + bin as f64 * self.bin_width as f64
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Adds one delay; out-of-range delays are ignored.
    pub fn record(&mut self, delay: i64) {
        if delay >= self.delay_range.0 && delay < self.delay_range.1 {
            let bin = ((delay - self.delay_range.0) as u64 / self.bin_width) as usize;
            self.counts[bin] += 1;
        }
    }
}

fn bin_count(bin_width: u64, (min, max): (i64, i64)) -> Result<usize> {
    if bin_width == 0 {
        return Err(Error::Validation("bin width must be positive".into()));
    }
    if max <= min {
        return Err(Error::Validation(format!("empty delay range [{min}, {max})")));
    }
    let span = (max - min) as u64;
    if !span.is_multiple_of(bin_width) {
        return Err(Error::Validation(format!(
            "delay range span {span} ps is not a multiple of the bin width {bin_width} ps"
        )));
    }
    Ok((span / bin_width) as usize)
}

fn ensure_sorted(name: &str, ts: &[u64]) -> Result<()> {
    if let Some(i) = ts.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::Validation(format!(
            "stream {name} is not sorted at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// Counts every pair (t_a, t_b) with `t_b − t_a` in range using a two-pointer
/// sweep: the lower bound into `b` only moves forward as `a` advances.
pub fn build_histogram(
    a: &[u64],
    b: &[u64],
    bin_width: u64,
    delay_range: (i64, i64),
    rep_period: f64,
) -> Result<CoincidenceHistogram> {
    ensure_sorted("A", a)?;
    ensure_sorted("B", b)?;
    let mut hist = CoincidenceHistogram::zeros(bin_width, delay_range, rep_period)?;
    let (min, max) = delay_range;
    let mut lo = 0usize;
    for &ta in a {
        let ta = ta as i64;
        while lo < b.len() && (b[lo] as i64) - ta < min {
            lo += 1;
        }
        let mut j = lo;
        while j < b.len() {
            let d = b[j] as i64 - ta;
            if d >= max {
                break;
            }
            let bin = ((d - min) as u64 / bin_width) as usize;
            hist.counts[bin] += 1;
            j += 1;
        }
    }
    Ok(hist)
}
