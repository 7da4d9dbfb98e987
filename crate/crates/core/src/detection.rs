//! Scoring TE matrices against ground-truth influence maps: confusion
//! counts, threshold sweeps, ROC curves, and the two-Gaussian fitted ROC.

use serde::{Deserialize, Serialize};

use crate::brain::{NEURON_COUNT, SENSOR_NEURONS};
use crate::error::{Error, Result};
use crate::groundtruth::InfluenceMap;
use crate::infoflow::TEMatrix;

/// Detection-theory counts for one thresholded TE matrix. Rates use the
/// convention hit_rate = hits / true edges, fa_rate = false alarms /
/// non-edges; a rate with an empty denominator is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub hits: u32,
    pub misses: u32,
    pub false_alarms: u32,
    pub correct_rejections: u32,
    pub hit_rate: f64,
    pub fa_rate: f64,
}

impl ConfusionCounts {
    fn from_raw(hits: u32, misses: u32, false_alarms: u32, correct_rejections: u32) -> Self {
        let rate = |num: u32, den: u32| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        ConfusionCounts {
            hits,
            misses,
            false_alarms,
            correct_rejections,
            hit_rate: rate(hits, hits + misses),
            fa_rate: rate(false_alarms, false_alarms + correct_rejections),
        }
    }

    pub fn scored_pairs(&self) -> u32 {
        self.hits + self.misses + self.false_alarms + self.correct_rejections
    }

    fn add(&self, other: &ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts::from_raw(
            self.hits + other.hits,
            self.misses + other.misses,
            self.false_alarms + other.false_alarms,
            self.correct_rejections + other.correct_rejections,
        )
    }
}

/// Compare the thresholded TE matrix (predicted edge iff TE > threshold,
/// strictly) against the influence map over all ordered pairs including the
/// diagonal. Pairs targeting a sensor neuron are excluded from both the
/// edge and non-edge populations: sensors are exogenous, so flow into them
/// is never causal.
pub fn confusion(te: &TEMatrix, truth: &InfluenceMap, threshold: f64) -> ConfusionCounts {
    confusion_scored(te, truth, threshold, true)
}

/// [`confusion`] with the sensor-column exclusion made explicit.
pub fn confusion_scored(
    te: &TEMatrix,
    truth: &InfluenceMap,
    threshold: f64,
    exclude_sensor_targets: bool,
) -> ConfusionCounts {
    assert!(threshold >= 0.0, "threshold must be non-negative");
    let mut hits = 0;
    let mut misses = 0;
    let mut false_alarms = 0;
    let mut correct_rejections = 0;
    for i in 0..NEURON_COUNT {
        for j in 0..NEURON_COUNT {
            if exclude_sensor_targets && SENSOR_NEURONS.contains(&j) {
                continue;
            }
            let predicted = te.get(i, j) > threshold;
            let actual = truth.get(i, j);
            match (predicted, actual) {
                (true, true) => hits += 1,
                (false, true) => misses += 1,
                (true, false) => false_alarms += 1,
                (false, false) => correct_rejections += 1,
            }
        }
    }
    ConfusionCounts::from_raw(hits, misses, false_alarms, correct_rejections)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fa_rate: f64,
    pub hit_rate: f64,
    pub counts: ConfusionCounts,
}

/// Fitted parameters of the TE-value distributions conditioned on an edge
/// being present or absent in the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussFit {
    pub mu_present: f64,
    pub sigma_present: f64,
    pub mu_absent: f64,
    pub sigma_absent: f64,
}

impl GaussFit {
    /// Fitted ROC curve: hit rate as a function of false-alarm rate
    /// x in (0, 1), under two Gaussian class distributions:
    /// f(x) = erfc((mu_absent - mu_present) / (sqrt(2) sigma_present)
    ///        + (sigma_absent / sigma_present) * erfc_inv(2x)) / 2.
    /// With identical class distributions this is the chance diagonal
    /// f(x) = x.
    pub fn curve(&self, x: f64) -> Result<f64> {
        let u = erfc_inv(2.0 * x)?;
        let arg = (self.mu_absent - self.mu_present) / (std::f64::consts::SQRT_2 * self.sigma_present)
            + (self.sigma_absent / self.sigma_present) * u;
        Ok(0.5 * erfc(arg))
    }
}

/// ROC sweep: one confusion count per threshold, converted to rate points,
/// with the Gaussian fit when both classes support one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub fit: Option<GaussFit>,
}

impl RocCurve {
    /// threshold, fa_rate, hit_rate, hits, misses, false_alarms,
    /// correct_rejections; one row per threshold.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "threshold,fa_rate,hit_rate,hits,misses,false_alarms,correct_rejections\n",
        );
        for p in &self.points {
            out.push_str(&format!(
                "{:.6},{:.6},{:.6},{},{},{},{}\n",
                p.threshold,
                p.fa_rate,
                p.hit_rate,
                p.counts.hits,
                p.counts.misses,
                p.counts.false_alarms,
                p.counts.correct_rejections
            ));
        }
        out
    }
}

fn check_thresholds(thresholds: &[f64]) {
    assert!(!thresholds.is_empty(), "threshold grid must be nonempty");
    assert!(
        thresholds.windows(2).all(|w| w[0] <= w[1]),
        "thresholds must be sorted ascending"
    );
    assert!(
        thresholds.iter().all(|&t| (0.0..=1.0).contains(&t)),
        "thresholds must lie in [0, 1]"
    );
}

/// Sweep one TE matrix against one influence map.
pub fn roc_curve(te: &TEMatrix, truth: &InfluenceMap, thresholds: &[f64]) -> RocCurve {
    check_thresholds(thresholds);
    let points = thresholds
        .iter()
        .map(|&t| {
            let counts = confusion(te, truth, t);
            RocPoint { threshold: t, fa_rate: counts.fa_rate, hit_rate: counts.hit_rate, counts }
        })
        .collect();
    let (present, absent) = te_class_values(te, truth);
    let fit = gaussian_roc_fit(&present, &absent).ok();
    RocCurve { points, fit }
}

/// Pooled sweep across a batch of brains: counts are summed per threshold
/// before converting to rates (micro-averaging), and the Gaussian fit pools
/// the class value lists.
pub fn pooled_roc_curve(items: &[(&TEMatrix, &InfluenceMap)], thresholds: &[f64]) -> RocCurve {
    check_thresholds(thresholds);
    let points = thresholds
        .iter()
        .map(|&t| {
            let counts = items
                .iter()
                .map(|(te, truth)| confusion(te, truth, t))
                .fold(ConfusionCounts::from_raw(0, 0, 0, 0), |acc, c| acc.add(&c));
            RocPoint { threshold: t, fa_rate: counts.fa_rate, hit_rate: counts.hit_rate, counts }
        })
        .collect();
    let mut present = Vec::new();
    let mut absent = Vec::new();
    for (te, truth) in items {
        let (p, a) = te_class_values(te, truth);
        present.extend(p);
        absent.extend(a);
    }
    let fit = gaussian_roc_fit(&present, &absent).ok();
    RocCurve { points, fit }
}

/// TE values over the scored pairs, split by whether the ground truth has
/// the edge.
pub fn te_class_values(te: &TEMatrix, truth: &InfluenceMap) -> (Vec<f64>, Vec<f64>) {
    let mut present = Vec::new();
    let mut absent = Vec::new();
    for i in 0..NEURON_COUNT {
        for j in 0..NEURON_COUNT {
            if SENSOR_NEURONS.contains(&j) {
                continue;
            }
            if truth.get(i, j) {
                present.push(te.get(i, j));
            } else {
                absent.push(te.get(i, j));
            }
        }
    }
    (present, absent)
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fit the two class-conditional Gaussians by sample mean and standard
/// deviation (n-1 denominator). Errors on fewer than two values per class
/// or zero variance.
pub fn gaussian_roc_fit(te_present: &[f64], te_absent: &[f64]) -> Result<GaussFit> {
    for values in [te_present, te_absent] {
        if values.len() < 2 {
            return Err(Error::TooFewSamples { need: 2, got: values.len() });
        }
    }
    let (mu_present, sigma_present) = mean_sd(te_present);
    let (mu_absent, sigma_absent) = mean_sd(te_absent);
    if sigma_present <= 0.0 || sigma_absent <= 0.0 {
        return Err(Error::DegenerateFit);
    }
    Ok(GaussFit { mu_present, sigma_present, mu_absent, sigma_absent })
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse of [`erfc`] on the open interval (0, 2), found by bisection with
/// a Newton polish. erfc is strictly decreasing, so the root is unique.
pub fn erfc_inv(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 2.0) {
        return Err(Error::ErfcInvDomain { value: y });
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    // erfc(28) underflows to 0 and erfc(-28) saturates at 2, so the root of
    // erfc(x) = y lies strictly inside [-28, 28] for y in (0, 2).
    let mut lo = -28.0f64;
    let mut hi = 28.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if erfc(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton: d/dx erfc(x) = -2/sqrt(pi) exp(-x^2)
    for _ in 0..3 {
        let deriv = 2.0 / std::f64::consts::PI.sqrt() * (-x * x).exp();
        if deriv < 1e-300 {
            break;
        }
        x += (erfc(x) - y) / deriv;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_truth(edges: &[(usize, usize)]) -> InfluenceMap {
        let mut m = InfluenceMap::none();
        for &(i, j) in edges {
            m.edges[i][j] = true;
        }
        m
    }

    fn te_from_truth(truth: &InfluenceMap, value: f64) -> TEMatrix {
        let mut te = TEMatrix::zero();
        for i in 0..NEURON_COUNT {
            for j in 0..NEURON_COUNT {
                if truth.get(i, j) {
                    te.values[i][j] = value;
                }
            }
        }
        te
    }

    #[test]
    fn perfect_detector_has_no_errors() {
        let truth = diag_truth(&[(0, 5), (1, 6), (4, 9), (9, 9)]);
        let te = te_from_truth(&truth, 1.0);
        let c = confusion(&te, &truth, 0.0);
        assert_eq!(c.misses, 0);
        assert_eq!(c.false_alarms, 0);
        assert_eq!(c.hits, 4);
        assert_eq!(c.hit_rate, 1.0);
        assert_eq!(c.fa_rate, 0.0);
    }

    #[test]
    fn threshold_one_predicts_nothing() {
        let truth = diag_truth(&[(0, 5)]);
        let te = te_from_truth(&truth, 1.0);
        let c = confusion(&te, &truth, 1.0);
        assert_eq!(c.hits, 0);
        assert_eq!(c.false_alarms, 0);
        assert_eq!(c.misses, 1);
    }

    #[test]
    fn scored_pairs_exclude_sensor_targets() {
        let truth = InfluenceMap::none();
        let te = TEMatrix::zero();
        let c = confusion(&te, &truth, 0.0);
        assert_eq!(c.scored_pairs(), (16 * 14) as u32);
        let all = confusion_scored(&te, &truth, 0.0, false);
        assert_eq!(all.scored_pairs(), 256);
    }

    #[test]
    fn count_conservation_across_thresholds() {
        let truth = diag_truth(&[(0, 5), (3, 7), (7, 3), (2, 2)]);
        let mut te = te_from_truth(&truth, 0.4);
        te.values[8][9] = 0.2;
        te.values[1][14] = 0.9;
        for t in [0.0, 0.1, 0.3, 0.5, 0.95, 1.0] {
            let c = confusion(&te, &truth, t);
            assert_eq!(c.scored_pairs(), 224);
            assert_eq!(c.hits + c.misses, 4);
            assert_eq!(c.false_alarms + c.correct_rejections, 220);
        }
    }

    #[test]
    fn roc_rates_monotone_in_threshold() {
        let truth = diag_truth(&[(0, 5), (3, 7), (5, 11), (11, 5)]);
        let mut te = te_from_truth(&truth, 0.6);
        te.values[3][7] = 0.1;
        te.values[9][2] = 0.25;
        te.values[2][9] = 0.8;
        let thresholds: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let curve = roc_curve(&te, &truth, &thresholds);
        for w in curve.points.windows(2) {
            assert!(w[0].hit_rate >= w[1].hit_rate);
            assert!(w[0].fa_rate >= w[1].fa_rate);
        }
        // sweep extremes: threshold 0 is the maximal-rates point, a
        // threshold at/above the matrix maximum predicts nothing
        assert_eq!(curve.points.last().unwrap().hit_rate, 0.0);
        assert_eq!(curve.points.last().unwrap().fa_rate, 0.0);
        assert!(curve.points[0].hit_rate >= curve.points.last().unwrap().hit_rate);
    }

    #[test]
    fn pooled_curve_sums_counts() {
        let truth_a = diag_truth(&[(0, 5)]);
        let truth_b = diag_truth(&[(1, 6), (2, 7)]);
        let te_a = te_from_truth(&truth_a, 0.9);
        let te_b = te_from_truth(&truth_b, 0.9);
        let pooled = pooled_roc_curve(&[(&te_a, &truth_a), (&te_b, &truth_b)], &[0.0]);
        assert_eq!(pooled.points[0].counts.hits, 3);
        assert_eq!(pooled.points[0].counts.scored_pairs(), 448);
    }

    #[test]
    fn identical_classes_fit_chance_diagonal() {
        let fit = GaussFit {
            mu_present: 0.3,
            sigma_present: 0.1,
            mu_absent: 0.3,
            sigma_absent: 0.1,
        };
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((fit.curve(x).unwrap() - x).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn separated_classes_fit_above_chance() {
        let fit = GaussFit {
            mu_present: 0.5,
            sigma_present: 0.15,
            mu_absent: 0.1,
            sigma_absent: 0.15,
        };
        for x in [0.001, 0.01, 0.1, 0.5, 0.9] {
            assert!(fit.curve(x).unwrap() > x, "x = {x}");
        }
        // monotone non-decreasing on a grid
        let mut prev = 0.0;
        for i in 1..200 {
            let v = fit.curve(i as f64 / 200.0).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn gaussian_fit_recovers_sample_moments() {
        let present = [0.2, 0.4, 0.6, 0.8];
        let absent = [0.0, 0.1, 0.2];
        let fit = gaussian_roc_fit(&present, &absent).unwrap();
        assert!((fit.mu_present - 0.5).abs() < 1e-12);
        assert!((fit.mu_absent - 0.1).abs() < 1e-12);
        assert!((fit.sigma_absent - 0.1).abs() < 1e-12);
    }

    #[test]
    fn gaussian_fit_rejects_degenerate_input() {
        assert!(matches!(
            gaussian_roc_fit(&[0.1], &[0.0, 0.1]),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(
            gaussian_roc_fit(&[0.1, 0.1], &[0.0, 0.2]),
            Err(Error::DegenerateFit)
        ));
    }

    #[test]
    fn erfc_reference_points() {
        assert_eq!(erfc(0.0), 1.0);
        // frozen high-precision references
        assert!((erfc(0.5) - 0.4795001221869535).abs() < 1e-15);
        assert!((erfc(1.0) - 0.15729920705028513).abs() < 1e-15);
        assert!((erfc(-1.0) - 1.8427007929497149).abs() < 1e-15);
        assert!((erfc(2.0) - 0.004677734981047266).abs() < 1e-16);
    }

    #[test]
    fn erfc_inv_examples_and_roundtrip() {
        assert_eq!(erfc_inv(1.0).unwrap(), 0.0);
        let x = erfc_inv(erfc(1.234)).unwrap();
        assert!((x - 1.234).abs() < 1e-7);
        let mut worst = 0.0f64;
        let mut t = -4.0;
        while t <= 4.0 {
            let back = erfc_inv(erfc(t)).unwrap();
            worst = worst.max((back - t).abs());
            t += 0.01;
        }
        assert!(worst <= 1e-7, "worst roundtrip error {worst}");
    }

    #[test]
    fn erfc_inv_domain_errors() {
        assert!(erfc_inv(0.0).is_err());
        assert!(erfc_inv(2.0).is_err());
        assert!(erfc_inv(-0.5).is_err());
        assert!(erfc_inv(2.5).is_err());
    }
}
