//! Initial parameter estimation from mean crossings (FIPEFT).
//!
//! The pipeline is linear in the number of samples apart from sorting the
//! crossing distances:
//!
//! 1. [`prepare_stats`]: mean `â1`, half range `â2`, global extrema and the
//!    extrema of the inner third of the condition range.
//! 2. [`remove_spikes`]: single observations that sit on the other side of
//!    `â1` than both neighbours, but closer to it, are replaced by the
//!    neighbour nearest to `â1`.
//! 3. [`find_crossings`]: straight-line interpolation of every pair of
//!    neighbours that straddles `â1`.
//! 4. [`select_best_distance`]: the crossing distances are classified into
//!    spurious (short, noise induced) and good (about half a period). When
//!    all distances agree within a factor of two their mean is used. Otherwise
//!    a reference distance is located with a small histogram
//!    ([`get_reference_distance`]), a typical distance is derived from
//!    everything not much shorter than it ([`get_typical_distance`]), and the
//!    length consumed by the spurious distances is redistributed onto the good
//!    ones, capped at +100%.
//! 5. [`estimate_frequency`]: `â3 = π / d*`, or `π / (x_N − x_1)` when at most
//!    one crossing exists.
//! 6. [`estimate_phase`]: the phase is aligned to the stronger extremum,
//!    preferring the inner third of the record when it holds a well-sampled
//!    period.
//!
//! All positions in this module are 0-based.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::signal_model::{wrap_phase, ModelParams, SampledSignal};

const INNER_LOW: f64 = 0.333;
const INNER_HIGH: f64 = 0.667;
const MIN_INTERP_SPACING: f64 = 1e-8;
const BIN_INFLATION: f64 = 1.001;
const MAX_BINS: usize = 5;
const LONG_FACTOR_LOW: f64 = 2.0;
const LONG_FACTOR_HIGH: f64 = 3.1;
const GOOD_FACTOR: f64 = 2.3;
const PHASE_MIN_SAMPLES: usize = 10;
const PHASE_MIN_PERIODS: f64 = 3.0;

/// Extremal values, inner-third extrema and the mean/half-range estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalStats {
    pub y_max: f64,
    pub y_min: f64,
    pub idx_max: usize,
    pub idx_min: usize,
    /// Extrema over `x ∈ [x_1 + 0.333·R, x_1 + 0.667·R]`, seeded at `N/2`.
    pub y_max2: f64,
    pub y_min2: f64,
    pub idx_max2: usize,
    pub idx_min2: usize,
    /// Number of samples inside the inner third.
    pub count_mid: usize,
    pub a1_hat: f64,
    pub a2_hat: f64,
}

/// Interpolated positions where the observations pass the estimated mean.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrossingSet {
    pub crossings: Vec<f64>,
    /// Average `|y − â1|` of the segment preceding each crossing. Diagnostic only.
    pub mean_dev: Vec<f64>,
}

impl CrossingSet {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }
}

/// Output of [`get_reference_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceDistance {
    pub d_ref: f64,
    /// Position in the sorted distances the reference was taken from.
    pub ref_idx: usize,
}

/// Output of [`get_typical_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalDistance {
    pub d_typ: f64,
    /// Reference after the sanity check (may move to the maximum distance).
    pub reference: ReferenceDistance,
    /// First position of the good range.
    pub good_idx: usize,
    /// Number of distances in the good range.
    pub num_good: usize,
    /// The maximum distance spans two half-waves.
    pub long_distance: bool,
}

impl TypicalDistance {
    /// Good count with the long distance counted twice.
    pub fn effective_good(&self) -> usize {
        self.num_good + usize::from(self.long_distance)
    }
}

/// Full record of the three-step classification.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceAnalysis {
    /// Crossing distances, sorted ascending.
    pub distances: Vec<f64>,
    pub initial_reference: ReferenceDistance,
    pub typical: TypicalDistance,
    pub sum_spurious: f64,
    /// Correction added to `d_typ`, already capped at `d_typ`.
    pub correction: f64,
    pub d_star: f64,
}

impl DistanceAnalysis {
    pub fn num_dists(&self) -> usize {
        self.distances.len()
    }

    pub fn d_ref(&self) -> f64 {
        self.typical.reference.d_ref
    }

    pub fn d_typ(&self) -> f64 {
        self.typical.d_typ
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceSelection {
    /// At most one crossing, or the distances cover less than a third of the
    /// record: the data hold only a fraction of an oscillation.
    SingleCrossing,
    /// No short outliers: `d*` is the mean distance.
    Average { distances: Vec<f64>, d_star: f64 },
    /// Spurious distances present: three-step classification.
    Classified(DistanceAnalysis),
}

impl DistanceSelection {
    pub fn d_star(&self) -> Option<f64> {
        match self {
            DistanceSelection::SingleCrossing => None,
            DistanceSelection::Average { d_star, .. } => Some(*d_star),
            DistanceSelection::Classified(a) => Some(a.d_star),
        }
    }
}

/// Everything computed on the way to the initial parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialEstimate {
    pub params: ModelParams,
    pub raw_stats: SignalStats,
    pub clean_stats: SignalStats,
    pub cleaned: SampledSignal,
    pub spikes_removed: usize,
    pub crossings: CrossingSet,
    pub selection: DistanceSelection,
}

pub fn prepare_stats(s: &SampledSignal) -> SignalStats {
    let (x, y) = (s.x(), s.y());
    let n = y.len();
    let mid_low = x[0] + s.span() * INNER_LOW;
    let mid_high = x[0] + s.span() * INNER_HIGH;
    let seed = n / 2;

    let mut st = SignalStats {
        y_max: y[0],
        y_min: y[0],
        idx_max: 0,
        idx_min: 0,
        y_max2: y[seed],
        y_min2: y[seed],
        idx_max2: seed,
        idx_min2: seed,
        count_mid: 0,
        a1_hat: 0.0,
        a2_hat: 0.0,
    };
    let mut sum = y[0];
    for i in 1..n {
        let yi = y[i];
        sum += yi;
        if st.y_max < yi {
            st.y_max = yi;
            st.idx_max = i;
        }
        if st.y_min > yi {
            st.y_min = yi;
            st.idx_min = i;
        }
        if x[i] >= mid_low && x[i] <= mid_high {
            st.count_mid += 1;
            if st.y_max2 < yi {
                st.y_max2 = yi;
                st.idx_max2 = i;
            }
            if st.y_min2 > yi {
                st.y_min2 = yi;
                st.idx_min2 = i;
            }
        }
    }
    st.a1_hat = sum / n as f64;
    st.a2_hat = 0.5 * (st.y_max - st.y_min);
    st
}

/// Replaces isolated spikes towards the mean. Returns the cleaned signal and
/// the number of modified samples.
pub fn remove_spikes(s: &SampledSignal, a1_hat: f64) -> (SampledSignal, usize) {
    let mut ops = 0;
    remove_spikes_counted(s, a1_hat, &mut ops)
}

fn remove_spikes_counted(s: &SampledSignal, a1_hat: f64, ops: &mut u64) -> (SampledSignal, usize) {
    let y = s.y();
    let n = y.len();
    let mut cleaned = y.to_vec();
    let mut removed = 0;
    if n < 3 {
        return (s.clone(), 0);
    }
    for i in 1..n - 1 {
        *ops += 1;
        let (prev, cur, next) = (y[i - 1], y[i], y[i + 1]);
        if prev > a1_hat && cur < a1_hat && next > a1_hat {
            let min_y = prev.min(next);
            if min_y - a1_hat > a1_hat - cur {
                cleaned[i] = min_y;
                removed += 1;
            }
        } else if prev < a1_hat && cur > a1_hat && next < a1_hat {
            let max_y = prev.max(next);
            if a1_hat - max_y > cur - a1_hat {
                cleaned[i] = max_y;
                removed += 1;
            }
        }
    }
    (s.with_y(cleaned), removed)
}

pub fn find_crossings(s: &SampledSignal, a1_hat: f64) -> CrossingSet {
    let mut ops = 0;
    find_crossings_counted(s, a1_hat, &mut ops)
}

fn find_crossings_counted(s: &SampledSignal, a1_hat: f64, ops: &mut u64) -> CrossingSet {
    let (x, y) = (s.x(), s.y());
    let mut out = CrossingSet::default();
    let mut seg_dev = (y[0] - a1_hat).abs();
    let mut seg_len = 1usize;

    for i in 1..x.len() {
        *ops += 1;
        let (y0, y1) = (y[i - 1], y[i]);
        let straddles = (y0 > a1_hat && y1 < a1_hat) || (y0 < a1_hat && y1 > a1_hat);
        if !straddles {
            seg_dev += (y1 - a1_hat).abs();
            seg_len += 1;
            continue;
        }
        let dx = x[i] - x[i - 1];
        let xc = if dx > MIN_INTERP_SPACING {
            // Root of the line through both points, written relative to the
            // left point; algebraically (â1 − n)/m with y = m·x + n.
            let t = (a1_hat - y0) / (y1 - y0);
            (x[i - 1] + t * dx).clamp(x[i - 1], x[i])
        } else {
            x[i]
        };
        // Only coincident conditions can fail to advance; drop such a
        // crossing so the distances stay positive.
        if out.crossings.last().is_none_or(|&last| xc > last) {
            out.crossings.push(xc);
            out.mean_dev.push(seg_dev / seg_len as f64);
        }
        seg_dev = (y1 - a1_hat).abs();
        seg_len = 1;
    }
    out
}

/// Locates a distance that separates spurious from good distances.
///
/// `distances` must be sorted ascending with at least two entries. Equal-width
/// histograms over `[0, max]` with 2 to 5 bins are tried until two bins
/// satisfy `2·min > max` within the bin.
pub fn get_reference_distance(distances: &[f64]) -> ReferenceDistance {
    let mut ops = 0;
    get_reference_distance_counted(distances, &mut ops)
}

fn get_reference_distance_counted(d: &[f64], ops: &mut u64) -> ReferenceDistance {
    let n = d.len();
    debug_assert!(n >= 1);
    let max = d[n - 1];

    for num_bins in 2..=MAX_BINS {
        let width = max / num_bins as f64;
        let mut threshold = BIN_INFLATION * width;
        let mut bin = 0usize;
        // (first, last) position per bin
        let mut ranges: [Option<(usize, usize)>; MAX_BINS] = [None; MAX_BINS];
        for (i, &di) in d.iter().enumerate() {
            *ops += 1;
            while di > threshold && bin + 1 < num_bins {
                threshold += width;
                bin += 1;
            }
            ranges[bin] = Some(match ranges[bin] {
                None => (i, i),
                Some((first, _)) => (first, i),
            });
        }

        let mut first_bin = None;
        let mut last_bin = None;
        let mut candidates = 0;
        for (b, range) in ranges.iter().enumerate().take(num_bins) {
            if let Some((first, last)) = *range {
                if d[first] * 2.0 > d[last] {
                    candidates += 1;
                    first_bin.get_or_insert(b);
                    last_bin = Some(b);
                }
            }
        }
        if candidates < 2 {
            continue;
        }

        let (b1, b2) = (first_bin.unwrap(), last_bin.unwrap());
        let (lo_first, _) = ranges[b1].unwrap();
        let (hi_first, hi_last) = ranges[b2].unwrap();
        if b2 == b1 + 1 {
            let num = hi_last - lo_first + 1;
            let ref_idx = lo_first + (num >> 1);
            let d_ref = if d[lo_first] * 2.0 > d[hi_last] {
                d[lo_first..=hi_last].iter().sum::<f64>() / num as f64
            } else {
                d[ref_idx]
            };
            return ReferenceDistance { d_ref, ref_idx };
        }
        let num = hi_last - hi_first;
        let ref_idx = hi_first + (num >> 1);
        return ReferenceDistance {
            d_ref: d[ref_idx],
            ref_idx,
        };
    }

    ReferenceDistance {
        d_ref: max,
        ref_idx: n - 1,
    }
}

/// Derives the typical good distance from the sorted distances and a
/// reference.
pub fn get_typical_distance(distances: &[f64], reference: ReferenceDistance) -> TypicalDistance {
    let mut ops = 0;
    get_typical_distance_counted(distances, reference, &mut ops)
}

fn get_typical_distance_counted(
    d: &[f64],
    reference: ReferenceDistance,
    ops: &mut u64,
) -> TypicalDistance {
    let n = d.len();
    let max = d[n - 1];
    let mut reference = reference;

    // A reference at the second-highest distance far below the maximum means
    // the maximum is the only good distance.
    if reference.ref_idx + 2 == n && reference.d_ref * LONG_FACTOR_HIGH < max {
        reference = ReferenceDistance {
            d_ref: max,
            ref_idx: n - 1,
        };
    }
    let d_ref = reference.d_ref;
    let long_distance = max > d_ref * LONG_FACTOR_LOW && max < d_ref * LONG_FACTOR_HIGH;

    let mut good_idx = 0;
    for i in (0..reference.ref_idx).rev() {
        *ops += 1;
        if d[i] * GOOD_FACTOR < d_ref {
            good_idx = i + 1;
            break;
        }
    }
    let good = &d[good_idx..];
    let num_good = good.len();
    let half = num_good >> 1;
    let median = if num_good % 2 == 1 {
        good[half]
    } else {
        0.5 * (good[half] + good[half - 1])
    };
    *ops += num_good as u64;
    let sum: f64 = good.iter().sum();
    let divisor = num_good + usize::from(long_distance);
    let d_typ = 0.5 * (median + sum / divisor as f64);

    TypicalDistance {
        d_typ,
        reference,
        good_idx,
        num_good,
        long_distance,
    }
}

/// Picks the representative half-period `d*` from the crossing positions.
pub fn select_best_distance(crossings: &CrossingSet, x1: f64, xn: f64) -> DistanceSelection {
    let mut ops = 0;
    select_best_distance_counted(crossings, x1, xn, &mut ops)
}

fn select_best_distance_counted(
    crossings: &CrossingSet,
    x1: f64,
    xn: f64,
    ops: &mut u64,
) -> DistanceSelection {
    let c = &crossings.crossings;
    if c.len() <= 1 {
        return DistanceSelection::SingleCrossing;
    }
    let mut distances: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
    *ops += distances.len() as u64;
    let sum: f64 = distances.iter().sum();
    let num_dists = distances.len();
    if num_dists > 1 && sum < (xn - x1) / 3.0 {
        return DistanceSelection::SingleCrossing;
    }

    distances.sort_by(f64::total_cmp);
    *ops += sort_cost(num_dists);
    if distances[0] * 2.0 > distances[num_dists - 1] {
        return DistanceSelection::Average {
            d_star: sum / num_dists as f64,
            distances,
        };
    }

    let initial_reference = get_reference_distance_counted(&distances, ops);
    let typical = get_typical_distance_counted(&distances, initial_reference, ops);
    let spurious_end = num_dists.saturating_sub(typical.effective_good());
    let sum_spurious: f64 = distances[..spurious_end].iter().sum();
    *ops += spurious_end as u64;
    let correction = (sum_spurious / typical.effective_good() as f64).min(typical.d_typ);
    DistanceSelection::Classified(DistanceAnalysis {
        d_star: typical.d_typ + correction,
        distances,
        initial_reference,
        typical,
        sum_spurious,
        correction,
    })
}

fn sort_cost(n: usize) -> u64 {
    if n < 2 {
        return n as u64;
    }
    (n as f64 * (n as f64).log2()).ceil() as u64
}

/// Angular frequency `â3` from the selected distance.
pub fn estimate_frequency(selection: &DistanceSelection, x1: f64, xn: f64) -> Result<f64> {
    match selection.d_star() {
        Some(d) if d > 0.0 => Ok(PI / d),
        Some(d) => Err(Error::InvalidInput(format!(
            "non-positive best distance {d}"
        ))),
        None => {
            let span = xn - x1;
            if span > 0.0 {
                Ok(PI / span)
            } else {
                Err(Error::DegenerateSpan)
            }
        }
    }
}

/// Phase `â4 ∈ [0, 2π)` that puts a peak of the model on the stronger
/// extremum.
///
/// `stats` are taken from the cleaned observations; `a1_hat` is the mean the
/// extrema are compared against. The inner-third extrema are used when the
/// record has at least 10 samples, at least 10 of them in the inner third, and
/// covers at least three estimated periods.
pub fn estimate_phase(s: &SampledSignal, stats: &SignalStats, a1_hat: f64, a3_hat: f64) -> f64 {
    let periods = s.span() * a3_hat / TAU;
    let use_inner = s.len() >= PHASE_MIN_SAMPLES
        && stats.count_mid >= PHASE_MIN_SAMPLES
        && periods >= PHASE_MIN_PERIODS;
    let (y_max, idx_max, y_min, idx_min) = if use_inner {
        (stats.y_max2, stats.idx_max2, stats.y_min2, stats.idx_min2)
    } else {
        (stats.y_max, stats.idx_max, stats.y_min, stats.idx_min)
    };
    let x = s.x();
    if y_max - a1_hat > a1_hat - y_min {
        wrap_phase(-a3_hat * x[idx_max])
    } else {
        wrap_phase(PI - a3_hat * x[idx_min])
    }
}

/// Runs the whole estimator and keeps every intermediate result.
pub fn estimate(s: &SampledSignal) -> Result<InitialEstimate> {
    if !(s.span() > 0.0) {
        return Err(Error::DegenerateSpan);
    }
    let raw_stats = prepare_stats(s);
    let a1 = raw_stats.a1_hat;
    let (cleaned, spikes_removed) = remove_spikes(s, a1);
    let clean_stats = prepare_stats(&cleaned);
    let crossings = find_crossings(&cleaned, a1);
    let selection = select_best_distance(&crossings, s.first_x(), s.last_x());
    let a3 = estimate_frequency(&selection, s.first_x(), s.last_x())?;
    let a4 = estimate_phase(&cleaned, &clean_stats, a1, a3);
    Ok(InitialEstimate {
        params: ModelParams::new(a1, raw_stats.a2_hat, a3, a4),
        raw_stats,
        clean_stats,
        cleaned,
        spikes_removed,
        crossings,
        selection,
    })
}

/// `(â1, â2, â3, â4)` for the signal.
pub fn estimate_initial_params(s: &SampledSignal) -> Result<ModelParams> {
    estimate(s).map(|e| e.params)
}

/// Frequency stage alone (spike removal, crossings, distance selection) given
/// the mean. Adds the number of elementary loop steps to `ops`.
pub fn estimate_angular_frequency_counted(
    s: &SampledSignal,
    a1_hat: f64,
    ops: &mut u64,
) -> Result<f64> {
    if !(s.span() > 0.0) {
        return Err(Error::DegenerateSpan);
    }
    let (cleaned, _) = remove_spikes_counted(s, a1_hat, ops);
    let crossings = find_crossings_counted(&cleaned, a1_hat, ops);
    let selection = select_best_distance_counted(&crossings, s.first_x(), s.last_x(), ops);
    estimate_frequency(&selection, s.first_x(), s.last_x())
}
