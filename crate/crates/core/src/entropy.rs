//! Entropy of the shadow shift: topological entropy from `(n, ε)`-separated
//! sets and metric entropy of `ν` from Bowen-ball measures.
//!
//! Both estimators work on per-point real-part tracks `x_0, x_1, …`. The
//! shadow `Q^k Φ(z)` is the window `x_k..=x_{k+N}`, so the Bowen ball
//! `B(x, ε, n)` compares the first `n + N` entries in the sup norm. A window
//! that reaches an escaped entry is the point at infinity: two such windows
//! agree, a finite and an infinite one are infinitely far apart.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use hashbrown::HashMap;

use crate::measure::{MeasureSample, ShadowSample};
use crate::orbits::{real_track, ShadowPoint};
use crate::par::map_indices;
use crate::rng::Stream;
use crate::{Complex, Error, Polynomial, Result, OVERFLOW_GUARD};

/// Counts at or above this fraction of the sample are treated as saturated.
const SATURATION: f64 = 0.25;
/// Balls holding fewer sample points are excluded from metric fits.
const STARVED: usize = 10;
/// Median ball population needed for an `(ε, n)` cell to enter the fit.
const POPULATED: usize = 50;
/// Relative spread allowed around the median increment in a linear window.
const WINDOW_SPREAD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Separated,
    BowenBall,
}

/// One `(n, ε)` cell: the separated-set size, or `-log` of the median ball
/// fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub eps: f64,
    pub statistic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    /// Entropy in nats.
    pub value: f64,
    pub table: Vec<TableRow>,
    pub fit_slope: f64,
    pub fit_residual: f64,
    pub method: Method,
    /// Range of `n` used by the fit.
    pub window: Option<(usize, usize)>,
    pub chosen_eps: Option<f64>,
    /// Set when `n_max` is too small for any growth to be measured.
    pub degenerate: bool,
    /// `(ε, n, base)` cells dropped because the ball held fewer than 10 points.
    pub excluded: usize,
}

impl EntropyEstimate {
    fn degenerate(method: Method) -> Self {
        EntropyEstimate {
            value: 0.0,
            table: Vec::new(),
            fit_slope: 0.0,
            fit_residual: 0.0,
            method,
            window: None,
            chosen_eps: None,
            degenerate: true,
            excluded: 0,
        }
    }
}

/// Orbit tracks of a point cloud.
///
/// Each time step stores `width` values (the real part for shadows; real and
/// imaginary parts for the plane metric). A ball of order `n` compares the
/// first `n + offset` steps.
struct Tracks {
    width: usize,
    offset: usize,
    steps: usize,
    data: Vec<f64>,
    /// First escaped time step, or `steps`.
    exits: Vec<usize>,
}

impl Tracks {
    fn shadows(p: &Polynomial, witnesses: &[Complex], depth: usize, n_max: usize) -> Self {
        let steps = n_max + depth;
        let rows = map_indices(witnesses.len(), |i| real_track(p, witnesses[i], steps));
        let exits = rows.iter().map(|r| r.iter().position(|x| !x.is_finite()).unwrap_or(steps)).collect();
        Tracks { width: 1, offset: depth, steps, data: rows.concat(), exits }
    }

    fn plane(p: &Polynomial, points: &[Complex], n_max: usize) -> Self {
        let rows = map_indices(points.len(), |i| {
            let mut row = Vec::with_capacity(2 * n_max);
            let mut z = points[i];
            for _ in 0..n_max {
                if !(z.norm() <= OVERFLOW_GUARD) {
                    row.resize(2 * n_max, f64::INFINITY);
                    break;
                }
                row.extend([z.re, z.im]);
                z = p.eval_unchecked(z);
            }
            row
        });
        let exits = rows.iter().map(|r| r.iter().position(|x| !x.is_finite()).map_or(n_max, |k| k / 2)).collect();
        Tracks { width: 2, offset: 0, steps: n_max, data: rows.concat(), exits }
    }

    fn len(&self) -> usize {
        self.exits.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        let w = self.width * self.steps;
        &self.data[i * w..(i + 1) * w]
    }

    /// Largest `m <= n_max` with `b ∈ B(a, ε, m)`.
    fn agreement(&self, a: usize, b: usize, eps: f64, n_max: usize) -> usize {
        let (ea, eb) = (self.exits[a], self.exits[b]);
        let last_time = (n_max + self.offset).min(self.steps);
        let finite = ea.min(eb).min(last_time);
        let (ra, rb) = (self.row(a), self.row(b));
        let bad = ra[..finite * self.width]
            .iter()
            .zip(&rb[..finite * self.width])
            .position(|(x, y)| (x - y).abs() >= eps)
            .map_or(finite, |j| j / self.width);
        if ea >= last_time && eb >= last_time {
            // Window k is good iff its last step k + offset comes before `bad`.
            return bad.saturating_sub(self.offset).min(n_max);
        }
        for k in 0..n_max {
            let end = k + self.offset;
            let ok = match (ea <= end, eb <= end) {
                (true, true) => true,
                (false, false) => end < bad,
                _ => false,
            };
            if !ok {
                return k;
            }
        }
        n_max
    }
}

/// Bowen ball `B(center, ε, n)` of the shadow shift.
#[derive(Debug, Clone, PartialEq)]
pub struct BowenBallSpec {
    pub center: ShadowPoint,
    pub epsilon: f64,
    pub n: usize,
}

/// True iff `Q^k(y)` stays within `ε` of `Q^k(center)` for `0 <= k < n`.
pub fn bowen_ball_contains(p: &Polynomial, spec: &BowenBallSpec, y: &ShadowPoint) -> Result<bool> {
    if spec.n == 0 {
        return Err(Error::InvalidArgument("bowen ball needs n >= 1"));
    }
    if spec.center.depth() != y.depth() {
        return Err(Error::InvalidArgument("shadows of different depth"));
    }
    let tracks = Tracks::shadows(p, &[spec.center.witness, y.witness], y.depth(), spec.n);
    Ok(tracks.agreement(0, 1, spec.epsilon, spec.n) >= spec.n)
}

/// Least-squares line through `(x, y)`: slope and RMS residual.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Longest run of consecutive increments of `ys` lying within 25% of the
/// run's median increment; later runs win ties. Returns the index range of
/// the points (not increments) covered.
fn linear_window(ys: &[f64]) -> Option<(usize, usize)> {
    if ys.len() < 3 {
        return None;
    }
    let inc: Vec<f64> = ys.windows(2).map(|w| w[1] - w[0]).collect();
    let mut best: Option<(usize, usize)> = None;
    for start in 0..inc.len() {
        for end in start + 1..inc.len() {
            let mut run = inc[start..=end].to_vec();
            let m = median(&mut run);
            let ok = inc[start..=end].iter().all(|v| (v - m).abs() <= WINDOW_SPREAD * m.abs());
            let len = end - start;
            if ok && best.map_or(true, |(s, e)| len + 2 >= e - s) {
                best = Some((start, end + 2));
            }
        }
    }
    best
}

/// Greedy maximal `(n, ε)`-separated subsets for `n = 1..=n_max`.
///
/// The set for `n` starts from the set for `n - 1` (still separated, since
/// Bowen balls shrink with `n`) and then scans the sample in order, so the
/// sizes never decrease in `n`. Scanning stops once the size reaches
/// `cap`.
fn separated_counts(t: &Tracks, eps: f64, n_max: usize, cap: usize) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut is_kept = vec![false; t.len()];
    let mut counts = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if kept.len() >= cap {
            counts.push(kept.len());
            continue;
        }
        let times = n + t.offset;
        let dims = (times * t.width).min(3);
        let key = |i: usize| -> Option<[i64; 3]> {
            if t.exits[i] < times {
                return None;
            }
            let row = t.row(i);
            let mut k = [0i64; 3];
            for (d, slot) in k.iter_mut().enumerate().take(dims) {
                *slot = (row[times * t.width - 1 - d] / eps).floor() as i64;
            }
            Some(k)
        };
        let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        let mut escaped: HashMap<usize, Vec<usize>> = HashMap::new();
        let insert = |i: usize, grid: &mut HashMap<[i64; 3], Vec<usize>>, escaped: &mut HashMap<usize, Vec<usize>>| match key(i) {
            Some(k) => grid.entry(k).or_default().push(i),
            None => escaped.entry(t.exits[i]).or_default().push(i),
        };
        for &i in &kept {
            insert(i, &mut grid, &mut escaped);
        }
        for i in 0..t.len() {
            if is_kept[i] {
                continue;
            }
            let covered = match key(i) {
                Some(k) => neighbours(&k, dims).any(|c| {
                    grid.get(&c).is_some_and(|cell| cell.iter().any(|&j| t.agreement(i, j, eps, n) >= n))
                }),
                None => escaped
                    .get(&t.exits[i])
                    .is_some_and(|cell| cell.iter().any(|&j| t.agreement(i, j, eps, n) >= n)),
            };
            if !covered {
                kept.push(i);
                is_kept[i] = true;
                insert(i, &mut grid, &mut escaped);
                if kept.len() >= cap {
                    break;
                }
            }
        }
        counts.push(kept.len());
    }
    counts
}

fn neighbours(k: &[i64; 3], dims: usize) -> impl Iterator<Item = [i64; 3]> + '_ {
    let total = 3usize.pow(dims as u32);
    (0..total).map(move |mut code| {
        let mut c = *k;
        for slot in c.iter_mut().take(dims) {
            *slot += (code % 3) as i64 - 1;
            code /= 3;
        }
        c
    })
}

/// Topological entropy of the shadow shift from greedy separated sets.
///
/// For every `ε` the count `N(ε, n)` is the largest separated set found at
/// any `ε' >= ε` (a set separated at `ε'` is separated at `ε`), so counts are
/// monotone in both arguments. The entropy for one `ε` is the slope of
/// `log N` over the longest linear window below saturation (a quarter of the
/// sample); the estimate is the largest such slope.
pub fn topological_entropy(p: &Polynomial, sample: &ShadowSample, eps_list: &[f64], n_max: usize) -> Result<EntropyEstimate> {
    check_eps(eps_list)?;
    if n_max < 3 {
        return Ok(EntropyEstimate::degenerate(Method::Separated));
    }
    if sample.shadows.is_empty() {
        return Err(Error::InsufficientSample);
    }
    let witnesses: Vec<Complex> = sample.shadows.iter().map(|s| s.witness).collect();
    let tracks = Tracks::shadows(p, &witnesses, sample.depth, n_max);
    let m = tracks.len();
    let cap = ((m as f64 * SATURATION).ceil() as usize).max(1);
    let raw = map_indices(eps_list.len(), |e| separated_counts(&tracks, eps_list[e], n_max, cap));

    let mut counts = raw.clone();
    for e in 1..counts.len() {
        for n in 0..n_max {
            counts[e][n] = counts[e][n].max(counts[e - 1][n]);
        }
    }

    let mut table = Vec::new();
    let mut best: Option<(f64, f64, f64, (usize, usize))> = None;
    for (e, &eps) in eps_list.iter().enumerate() {
        for (k, &c) in counts[e].iter().enumerate() {
            table.push(TableRow { n: k + 1, eps, statistic: c as f64 });
        }
        let usable = counts[e].iter().take_while(|&&c| c < cap).count();
        let logs: Vec<f64> = counts[e][..usable].iter().map(|&c| (c as f64).ln()).collect();
        if let Some((s, t)) = linear_window(&logs) {
            let xs: Vec<f64> = (s..t).map(|k| (k + 1) as f64).collect();
            let (slope, residual) = linear_fit(&xs, &logs[s..t]);
            if best.map_or(true, |b| slope > b.1) {
                best = Some((eps, slope, residual, (s + 1, t)));
            }
        }
    }
    let Some((eps, slope, residual, window)) = best else {
        return Err(Error::InsufficientSample);
    };
    Ok(EntropyEstimate {
        value: slope.max(0.0),
        table,
        fit_slope: slope,
        fit_residual: residual,
        method: Method::Separated,
        window: Some(window),
        chosen_eps: Some(eps),
        degenerate: false,
        excluded: 0,
    })
}

fn check_eps(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("eps list must be nonempty and positive"));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps list must be strictly decreasing"));
    }
    Ok(())
}

/// Metric entropy of `ν` from Bowen-ball measures of the shadow shift.
///
/// `base_points` centres are drawn from the sample with `seed`. For each
/// `ε`, the ball population around every centre is counted for all
/// `n <= n_max`; a cell enters the fit when the median population is at least
/// 50 and the centre's own ball holds at least 10 points. The smallest `ε`
/// with three such `n` is used, and the value is the median over centres of
/// the slope of `-log(fraction)` in `n`.
pub fn metric_entropy(
    p: &Polynomial,
    sample: &ShadowSample,
    eps_list: &[f64],
    n_max: usize,
    base_points: usize,
    seed: u64,
) -> Result<EntropyEstimate> {
    let witnesses: Vec<Complex> = sample.shadows.iter().map(|s| s.witness).collect();
    ball_entropy(&Tracks::shadows(p, &witnesses, sample.depth, n_max), eps_list, n_max, base_points, seed)
}

/// The same estimator with the sup metric on `ℂ` along plane orbits.
pub fn plane_metric_entropy(
    p: &Polynomial,
    sample: &MeasureSample,
    eps_list: &[f64],
    n_max: usize,
    base_points: usize,
    seed: u64,
) -> Result<EntropyEstimate> {
    ball_entropy(&Tracks::plane(p, &sample.points, n_max), eps_list, n_max, base_points, seed)
}

fn ball_entropy(t: &Tracks, eps_list: &[f64], n_max: usize, base_points: usize, seed: u64) -> Result<EntropyEstimate> {
    check_eps(eps_list)?;
    let m = t.len();
    if m == 0 || base_points == 0 || base_points > m {
        return Err(Error::InvalidArgument("metric entropy needs 1 <= base_points <= sample size"));
    }
    if n_max < 3 {
        return Ok(EntropyEstimate::degenerate(Method::BowenBall));
    }
    let mut rng = Stream::new(seed, u64::MAX);
    let bases: Vec<usize> = if base_points == m {
        (0..m).collect()
    } else {
        (0..base_points).map(|_| rng.index(m)).collect()
    };

    let mut table = Vec::new();
    let mut excluded = 0;
    let mut chosen = None;
    for &eps in eps_list {
        // populations[b][n - 1] = #{y : y ∈ B(base_b, ε, n)}.
        let populations = map_indices(bases.len(), |b| {
            let mut hist = vec![0usize; n_max + 1];
            for y in 0..m {
                hist[t.agreement(bases[b], y, eps, n_max)] += 1;
            }
            let mut pop = vec![0usize; n_max];
            let mut acc = 0;
            for n in (1..=n_max).rev() {
                acc += hist[n];
                pop[n - 1] = acc;
            }
            pop
        });
        let mut populated = Vec::new();
        for n in 1..=n_max {
            let mut col: Vec<f64> = populations.iter().map(|pop| pop[n - 1] as f64).collect();
            let med = median(&mut col);
            table.push(TableRow { n, eps, statistic: -(med / m as f64).ln() });
            if med >= POPULATED as f64 {
                populated.push(n);
            }
        }
        if chosen.is_none() || populated.len() >= 3 {
            chosen = Some((eps, populations, populated));
        }
    }
    let (eps, populations, populated) = chosen.expect("eps list is nonempty");
    if populated.len() < 3 {
        return Err(Error::InsufficientSample);
    }

    let mut slopes = Vec::new();
    let mut residuals = Vec::new();
    for pop in &populations {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for &n in &populated {
            if pop[n - 1] < STARVED {
                excluded += 1;
                continue;
            }
            xs.push(n as f64);
            ys.push(-(pop[n - 1] as f64 / m as f64).ln());
        }
        if xs.len() >= 2 {
            let (s, r) = linear_fit(&xs, &ys);
            slopes.push(s);
            residuals.push(r);
        }
    }
    if slopes.is_empty() {
        return Err(Error::InsufficientSample);
    }
    let slope = median(&mut slopes);
    Ok(EntropyEstimate {
        value: slope.max(0.0),
        table,
        fit_slope: slope,
        fit_residual: median(&mut residuals),
        method: Method::BowenBall,
        window: Some((populated[0], *populated.last().expect("nonempty"))),
        chosen_eps: Some(eps),
        degenerate: false,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{brolin_sample, pushforward_shadow};
    use crate::orbits::shadow;

    fn sq() -> Polynomial {
        Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn bowen_ball_examples() {
        let p = sq();
        let one = shadow(&p, c(1.0, 0.0), 2).unwrap();
        let minus = shadow(&p, c(-1.0, 0.0), 2).unwrap();
        let spec = BowenBallSpec { center: one.clone(), epsilon: 0.5, n: 2 };
        assert!(!bowen_ball_contains(&p, &spec, &minus).unwrap());
        assert!(bowen_ball_contains(&p, &spec, &one).unwrap());
        let wide = BowenBallSpec { center: one, epsilon: 10.0, n: 5 };
        assert!(bowen_ball_contains(&p, &wide, &minus).unwrap());
    }

    #[test]
    fn escaped_windows_are_one_point() {
        let p = sq();
        // Both escape at the same step: after that every window is infinity.
        let a = shadow(&p, c(1e30, 0.0), 1).unwrap();
        let b = shadow(&p, c(1e30, 1.0), 1).unwrap();
        let t = Tracks::shadows(&p, &[a.witness, b.witness], 1, 6);
        assert_eq!(t.exits, vec![2, 2]);
        assert_eq!(t.agreement(0, 1, 0.1, 6), 6);
        // One escapes, one stays: infinitely far once a window reaches the escape.
        let t = Tracks::shadows(&p, &[c(1e30, 0.0), c(1e30, 0.0), c(0.5, 0.0)], 1, 6);
        assert_eq!(t.agreement(0, 2, 1e70, 6), 1);
    }

    #[test]
    fn agreement_counts_windows() {
        let p = sq();
        let t = Tracks::shadows(&p, &[c(0.6, 0.0), c(0.61, 0.0)], 2, 10);
        let m = t.agreement(0, 1, 0.05, 10);
        for n in 1..=10 {
            let spec = BowenBallSpec { center: shadow(&p, c(0.6, 0.0), 2).unwrap(), epsilon: 0.05, n };
            let y = shadow(&p, c(0.61, 0.0), 2).unwrap();
            assert_eq!(bowen_ball_contains(&p, &spec, &y).unwrap(), n <= m);
        }
    }

    #[test]
    fn window_prefers_longest_linear_run() {
        let ys = [0.0, 3.0, 4.0, 5.0, 6.0, 7.0, 7.1];
        assert_eq!(linear_window(&ys), Some((1, 6)));
        assert_eq!(linear_window(&[0.0, 1.0]), None);
    }

    #[test]
    fn degenerate_and_atomic_cases() {
        let p = sq();
        let s = brolin_sample(&p, 50, 30, 1).unwrap();
        let sh = pushforward_shadow(&p, &s, 2).unwrap();
        let e = topological_entropy(&p, &sh, &[0.5], 1).unwrap();
        assert!(e.degenerate && e.value == 0.0);

        let atom = ShadowSample { shadows: vec![sh.shadows[0].clone(); 100], depth: 2 };
        let e = metric_entropy(&p, &atom, &[0.5, 0.25], 8, 10, 1).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn eps_list_is_validated() {
        let p = sq();
        let s = brolin_sample(&p, 20, 30, 1).unwrap();
        let sh = pushforward_shadow(&p, &s, 2).unwrap();
        assert!(topological_entropy(&p, &sh, &[0.1, 0.2], 6).is_err());
        assert!(metric_entropy(&p, &sh, &[], 6, 5, 0).is_err());
    }
}
