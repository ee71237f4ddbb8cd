//! Closed-form random-baseline probabilities and interval estimates.
//!
//! The probability code is generic over the scalar so the same expressions
//! can be evaluated in `f64` and exactly in `BigRational`.

use num_traits::{FromPrimitive, Num};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

/// Scalars the baseline formulas can be evaluated in.
pub trait Scalar: Clone + Num + FromPrimitive + PartialOrd + std::fmt::Debug {}

impl<T: Clone + Num + FromPrimitive + PartialOrd + std::fmt::Debug> Scalar for T {}

fn ratio<T: Scalar>(num: u64, den: u64) -> T {
    T::from_u64(num).expect("small integer") / T::from_u64(den).expect("small integer")
}

fn pow<T: Scalar>(base: T, n: u32) -> T {
    num_traits::pow(base, n as usize)
}

fn binomial_coefficient(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Win probability of the random baseline split into its two factors.
#[derive(Clone, Debug, PartialEq)]
pub struct WinProbability<T> {
    pub draws: u32,
    /// No incorrect piece is ever drawn.
    pub no_incorrect: T,
    /// Both correct pieces are drawn, given that no incorrect piece is.
    pub both_correct_given_no_incorrect: T,
    pub total: T,
}

/// Composition of the nine pieces: the correct pieces, the incorrect pieces
/// and the irrelevant remainder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceCounts {
    pub correct: u64,
    pub incorrect: u64,
    pub total: u64,
}

impl Default for PieceCounts {
    fn default() -> Self {
        PieceCounts { correct: 2, incorrect: 2, total: 9 }
    }
}

impl PieceCounts {
    /// Probability that n uniform draws with replacement avoid every
    /// incorrect piece and include every correct one.
    pub fn win_probability<T: Scalar>(&self, n: u32) -> WinProbability<T> {
        let allowed = self.total - self.incorrect;
        let no_incorrect = pow(ratio::<T>(allowed, self.total), n);
        // Inclusion-exclusion over missed correct pieces, drawing from the
        // allowed pieces only.
        let mut both = T::zero();
        for j in 0..=self.correct {
            let term = T::from_u64(binomial_coefficient(self.correct, j)).expect("small integer")
                * pow(ratio::<T>(allowed - j, allowed), n);
            both = if j % 2 == 0 { both + term } else { both - term };
        }
        let total = no_incorrect.clone() * both.clone();
        WinProbability { draws: n, no_incorrect, both_correct_given_no_incorrect: both, total }
    }

    /// The same event expanded over all nine pieces:
    /// sum_j (-1)^j C(c, j) ((total - incorrect - j) / total)^n.
    pub fn expanded_win_probability<T: Scalar>(&self, n: u32) -> T {
        let mut acc = T::zero();
        for j in 0..=self.correct {
            let term = T::from_u64(binomial_coefficient(self.correct, j)).expect("small integer")
                * pow(ratio::<T>(self.total - self.incorrect - j, self.total), n);
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }
}

/// (7/9)^n [1 - 2 (6/7)^n + (5/7)^n] for two correct and two incorrect
/// pieces among nine.
pub fn analytic_win_probability<T: Scalar>(n: u32) -> WinProbability<T> {
    PieceCounts::default().win_probability(n)
}

/// (7/9)^n - 2 (6/9)^n + (5/9)^n.
pub fn expanded_win_probability<T: Scalar>(n: u32) -> T {
    PieceCounts::default().expanded_win_probability(n)
}

/// The draw count in `0..=max_n` with the highest win probability (first on
/// ties).
pub fn best_draw_count<T: Scalar>(max_n: u32) -> (u32, T) {
    let mut best = (0, analytic_win_probability::<T>(0).total);
    for n in 1..=max_n {
        let p = analytic_win_probability::<T>(n).total;
        if p > best.1 {
            best = (n, p);
        }
    }
    best
}

/// Probability that the set of hidden cells seen after `n` uniform draws with
/// replacement from `total` cells is exactly a given subset of size `k` of the
/// `hidden` cells.
pub fn exact_seen_probability<T: Scalar>(total: u64, hidden: u64, k: u64, n: u32) -> T {
    let outside = total - hidden;
    let mut acc = T::zero();
    for j in 0..=k {
        let term = T::from_u64(binomial_coefficient(k, j)).expect("small integer")
            * pow(ratio::<T>(outside + j, total), n);
        acc = if (k - j).is_multiple_of(2) { acc + term } else { acc - term };
    }
    acc
}

/// A point estimate with a two-sided interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Estimate {
    pub fn point(mean: f64) -> Self {
        Estimate { mean, lower: mean, upper: mean }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Percentile bootstrap interval for a statistic of resampled units.
pub fn bootstrap<U, F, R>(units: &[U], resamples: usize, level: f64, rng: &mut R, stat: F) -> Estimate
where
    F: Fn(&[&U]) -> f64,
    R: Rng + ?Sized,
{
    let all: Vec<&U> = units.iter().collect();
    let point = stat(&all);
    if units.is_empty() || resamples == 0 {
        return Estimate::point(point);
    }
    let mut draws = Vec::with_capacity(resamples);
    let mut buf: Vec<&U> = Vec::with_capacity(units.len());
    for _ in 0..resamples {
        buf.clear();
        buf.extend((0..units.len()).map(|_| &units[rng.random_range(0..units.len())]));
        draws.push(stat(&buf));
    }
    draws.sort_by(|a, b| a.total_cmp(b));
    let tail = (1.0 - level) / 2.0;
    Estimate { mean: point, lower: quantile(&draws, tail), upper: quantile(&draws, 1.0 - tail) }
}

/// Percentile bootstrap for a proportion, resampling the success count from
/// a binomial rather than the units themselves.
pub fn bootstrap_proportion<R: Rng + ?Sized>(
    successes: u64,
    trials: u64,
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Estimate {
    if trials == 0 {
        return Estimate::point(f64::NAN);
    }
    let p = successes as f64 / trials as f64;
    if resamples == 0 {
        return Estimate::point(p);
    }
    let dist = Binomial::new(trials, p).expect("valid binomial parameters");
    let mut draws: Vec<f64> = (0..resamples).map(|_| dist.sample(rng) as f64 / trials as f64).collect();
    draws.sort_by(|a, b| a.total_cmp(b));
    let tail = (1.0 - level) / 2.0;
    Estimate { mean: p, lower: quantile(&draws, tail), upper: quantile(&draws, 1.0 - tail) }
}

/// Percentile bootstrap of every column mean at once. Each replicate
/// resamples whole rows, so columns from the same unit stay together.
pub fn bootstrap_column_means<R: Rng + ?Sized>(
    rows: &[Vec<f64>],
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Vec<Estimate> {
    let width = rows.first().map_or(0, Vec::len);
    let n = rows.len();
    let point: Vec<f64> = (0..width).map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / n as f64).collect();
    if n == 0 || resamples == 0 {
        return point.into_iter().map(Estimate::point).collect();
    }
    let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(resamples); width];
    let mut sums = vec![0.0; width];
    for _ in 0..resamples {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for _ in 0..n {
            let row = &rows[rng.random_range(0..n)];
            for (s, x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        for (d, s) in draws.iter_mut().zip(&sums) {
            d.push(s / n as f64);
        }
    }
    let tail = (1.0 - level) / 2.0;
    draws
        .into_iter()
        .zip(point)
        .map(|(mut d, mean)| {
            d.sort_by(|a, b| a.total_cmp(b));
            Estimate { mean, lower: quantile(&d, tail), upper: quantile(&d, 1.0 - tail) }
        })
        .collect()
}
