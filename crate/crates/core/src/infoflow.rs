//! Entropy and transfer-entropy estimation from recordings, the analytic
//! per-gate transfer-entropy catalog, and per-brain bounds on how much
//! information flow a pairwise estimator can get right.
//!
//! All entropies are in bits. The estimator is the plug-in (maximum
//! likelihood) form over first-order histories: for binary series X and Y it
//! evaluates I(Y_{t+1} : X_t | Y_t) from joint counts of adjacent steps.

use serde::{Deserialize, Serialize};

use crate::brain::{gate_class, Brain, GateClass, Recording, NEURON_COUNT};
use crate::error::{Error, Result};

/// Shannon entropy of a distribution, in bits. The vector must be
/// non-negative and sum to 1 within 1e-9.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &p in dist {
        if p < 0.0 {
            return Err(Error::NegativeProbability { value: p });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { sum });
    }
    Ok(dist.iter().map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 }).sum())
}

/// Entropy of a binary variable with P(1) = p.
fn h_bit(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Joint counts over adjacent-step triples (x_t, y_t, y_{t+1}), pooled
/// across trials. No pair spans a trial boundary: pool by calling
/// [`JointCounts::add_series`] once per trial.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JointCounts {
    counts: [u64; 8],
    total: u64,
}

impl JointCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: u8, y: u8, y_next: u8) {
        let idx = ((x & 1) << 2 | (y & 1) << 1 | (y_next & 1)) as usize;
        self.counts[idx] += 1;
        self.total += 1;
    }

    /// Accumulate every adjacent pair of one aligned series.
    pub fn add_series(&mut self, source: &[u8], target: &[u8]) -> Result<()> {
        if source.len() != target.len() {
            return Err(Error::SeriesLengthMismatch {
                source_len: source.len(),
                target_len: target.len(),
            });
        }
        if source.len() < 2 {
            return Err(Error::SeriesTooShort { len: source.len() });
        }
        for t in 0..source.len() - 1 {
            self.add(source[t], target[t], target[t + 1]);
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Plug-in transfer entropy I(Y_{t+1} : X_t | Y_t) in bits. Each cell's
    /// log ratio is formed from exact integer products, so the result is
    /// exactly 0 whenever the conditional mutual information vanishes;
    /// negative floating residue below 1e-12 is clamped to 0.
    pub fn transfer_entropy(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let mut n_y = [0u64; 2]; // over (x, y_next)
        let mut n_xy = [0u64; 4]; // over y_next
        let mut n_yy = [0u64; 4]; // over x
        for idx in 0..8 {
            let (x, y, y_next) = (idx >> 2 & 1, idx >> 1 & 1, idx & 1);
            let n = self.counts[idx];
            n_y[y] += n;
            n_xy[x << 1 | y] += n;
            n_yy[y << 1 | y_next] += n;
        }
        let mut te = 0.0;
        for idx in 0..8 {
            let n = self.counts[idx];
            if n == 0 {
                continue;
            }
            let (x, y, y_next) = (idx >> 2 & 1, idx >> 1 & 1, idx & 1);
            let num = n * n_y[y];
            let den = n_xy[x << 1 | y] * n_yy[y << 1 | y_next];
            te += n as f64 / self.total as f64 * ((num as f64 / den as f64).log2());
        }
        if te < 0.0 && te > -1e-12 {
            0.0
        } else {
            te
        }
    }
}

/// First-order transfer entropy between two aligned binary series.
/// `k` and `l` are history-length hooks; only k = l = 1 is supported.
pub fn transfer_entropy_kl(source: &[u8], target: &[u8], k: usize, l: usize) -> Result<f64> {
    if k != 1 || l != 1 {
        return Err(Error::UnsupportedHistory { k, l });
    }
    let mut counts = JointCounts::new();
    counts.add_series(source, target)?;
    Ok(counts.transfer_entropy())
}

/// Transfer entropy with the default first-order histories.
pub fn transfer_entropy(source: &[u8], target: &[u8]) -> Result<f64> {
    transfer_entropy_kl(source, target, 1, 1)
}

/// Counts over adjacent pairs (y_t, y_{t+1}) of one series, for processed
/// information.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCounts {
    counts: [u64; 4],
    total: u64,
}

impl PairCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_series(&mut self, series: &[u8]) -> Result<()> {
        if series.len() < 2 {
            return Err(Error::SeriesTooShort { len: series.len() });
        }
        for t in 0..series.len() - 1 {
            let idx = ((series[t] & 1) << 1 | (series[t + 1] & 1)) as usize;
            self.counts[idx] += 1;
            self.total += 1;
        }
        Ok(())
    }

    /// Plug-in processed information I(Y_t : Y_{t+1}) in bits.
    pub fn mutual_information(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let mut n_prev = [0u64; 2];
        let mut n_next = [0u64; 2];
        for idx in 0..4 {
            n_prev[idx >> 1] += self.counts[idx];
            n_next[idx & 1] += self.counts[idx];
        }
        let mut mi = 0.0;
        for idx in 0..4 {
            let n = self.counts[idx];
            if n == 0 {
                continue;
            }
            let num = n * self.total;
            let den = n_prev[idx >> 1] * n_next[idx & 1];
            mi += n as f64 / self.total as f64 * ((num as f64 / den as f64).log2());
        }
        if mi < 0.0 && mi > -1e-12 {
            0.0
        } else {
            mi
        }
    }
}

/// Processed information of a single series.
pub fn processed_information(series: &[u8]) -> Result<f64> {
    let mut counts = PairCounts::new();
    counts.add_series(series)?;
    Ok(counts.mutual_information())
}

/// One row of the analytic per-gate catalog, all in bits. The plain columns
/// assume independent uniform inputs (X_t, Y_t) driving Z_{t+1}; the `fb_*`
/// columns assume the gate's second input is the output's own previous
/// state, Z_{t+1} = f(Y_t, Z_t), with Y_t and Z_t independent uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTERow {
    pub truth: [u8; 4],
    /// Entropy of the output, H(Z_{t+1}).
    pub h_out: f64,
    /// I(X_t : Z_{t+1}) — what transfer entropy attributes to X.
    pub te_x: f64,
    /// I(Y_t : Z_{t+1}) — what transfer entropy attributes to Y.
    pub te_y: f64,
    /// Output entropy unaccounted for: h_out - te_x - te_y.
    pub te_error: f64,
    /// Feedback loop: transfer entropy from the non-self input,
    /// I(Z_{t+1} : Y_t | Z_t) = H(Z_{t+1} | Z_t).
    pub fb_te_y: f64,
    /// Feedback loop: processed information I(Z_t : Z_{t+1}).
    pub fb_processed: f64,
    /// Feedback loop: misattributed flow, nonzero only for polyadic gates.
    pub fb_error: f64,
}

/// Analytic transfer entropies for one truth table under uniform
/// independent inputs, with and without a feedback loop.
pub fn analytic_gate_te(truth: [u8; 4]) -> GateTERow {
    for &t in &truth {
        assert!(t <= 1, "truth entries must be 0/1");
    }
    let ones = truth.iter().map(|&t| t as u32).sum::<u32>();
    let p_out = ones as f64 / 4.0;
    let h_out = h_bit(p_out);

    // P(Z' = 1 | first input = a): average over the second input.
    let p_given_a = |a: usize| (truth[2 * a] + truth[2 * a + 1]) as f64 / 2.0;
    // P(Z' = 1 | second input = b): average over the first input.
    let p_given_b = |b: usize| (truth[b] + truth[2 + b]) as f64 / 2.0;

    let h_given_a = 0.5 * h_bit(p_given_a(0)) + 0.5 * h_bit(p_given_a(1));
    let h_given_b = 0.5 * h_bit(p_given_b(0)) + 0.5 * h_bit(p_given_b(1));

    let te_x = h_out - h_given_a;
    let te_y = h_out - h_given_b;
    let te_error = h_out - te_x - te_y;

    // Feedback loop Z' = f(Y, Z): Y occupies the first slot, Z the second.
    // The gate is deterministic, so TE_{Y->Z} = H(Z'|Z), and the output
    // distribution (hence h_out) is the same as in the feed-forward case.
    let fb_te_y = h_given_b;
    let fb_processed = h_out - fb_te_y;
    let fb_error = if gate_class(truth) == GateClass::Polyadic {
        (fb_te_y - fb_processed).abs()
    } else {
        0.0
    };

    GateTERow { truth, h_out, te_x, te_y, te_error, fb_te_y, fb_processed, fb_error }
}

/// Sign of the three-way interaction under uniform independent inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteractionClass {
    /// I(X:Y:Z) = -1: the output hides both inputs completely (XOR/XNOR).
    Encrypting,
    /// I(X:Y:Z) = -0.19: polyadic gates that hide part of each input.
    Obfuscating,
    /// I(X:Y:Z) = 0: monadic and constant gates.
    Transparent,
}

/// Interaction information I(X:Y:Z) = I(X:Z) + I(Y:Z) - I(X,Y:Z) of a gate
/// under uniform independent inputs, with its classification.
pub fn interaction_information(truth: [u8; 4]) -> (f64, InteractionClass) {
    let row = analytic_gate_te(truth);
    // The gate is deterministic, so I(X,Y : Z) = H(Z).
    let ii = row.te_x + row.te_y - row.h_out;
    let class = if (ii + 1.0).abs() < 0.005 {
        InteractionClass::Encrypting
    } else if ii < -0.005 {
        InteractionClass::Obfuscating
    } else {
        InteractionClass::Transparent
    };
    (ii, class)
}

/// Analytic bounds on what a pairwise transfer-entropy analysis can resolve
/// in one brain, summed over its essential gates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowBounds {
    /// Upper bound on correctly attributable flow, bits.
    pub correct_upper: f64,
    /// Lower bound on misattributed flow, bits.
    pub error_lower: f64,
    pub per_gate_correct: f64,
    pub per_gate_error: f64,
    pub essential_gate_count: usize,
}

/// Truth table with the self-input moved into the second slot, so the
/// feedback catalog columns apply directly. A gate reading its own output
/// on both inputs reduces to the monadic map over the truth diagonal.
fn feedback_normalized_truth(in_a: u8, in_b: u8, out: u8, truth: [u8; 4]) -> [u8; 4] {
    let self_a = out == in_a;
    let self_b = out == in_b;
    match (self_a, self_b) {
        (true, true) => [truth[0], truth[3], truth[0], truth[3]],
        (true, false) => [truth[0], truth[2], truth[1], truth[3]],
        _ => truth,
    }
}

/// Sum the catalog columns over the given essential gates: feedback columns
/// for self-wired gates, plain columns otherwise.
pub fn brain_flow_bounds(brain: &Brain, essential_gates: &[usize]) -> FlowBounds {
    let mut correct = 0.0;
    let mut error = 0.0;
    for &gi in essential_gates {
        let g = &brain.gates[gi];
        if g.has_feedback() {
            let row = analytic_gate_te(feedback_normalized_truth(g.in_a, g.in_b, g.out, g.truth));
            correct += row.fb_te_y + row.fb_processed;
            error += row.fb_error;
        } else {
            let row = analytic_gate_te(g.truth);
            correct += row.te_x + row.te_y;
            error += row.te_error;
        }
    }
    let count = essential_gates.len();
    FlowBounds {
        correct_upper: correct,
        error_lower: error,
        per_gate_correct: if count > 0 { correct / count as f64 } else { 0.0 },
        per_gate_error: if count > 0 { error / count as f64 } else { 0.0 },
        essential_gate_count: count,
    }
}

/// Estimated transfer entropy for every ordered neuron pair, in bits.
/// Entry (i, j) is TE from N_i to N_j; the diagonal holds each neuron's
/// processed information I(N_j,t : N_j,t+1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TEMatrix {
    pub values: [[f64; NEURON_COUNT]; NEURON_COUNT],
}

impl TEMatrix {
    pub fn zero() -> Self {
        TEMatrix { values: [[0.0; NEURON_COUNT]; NEURON_COUNT] }
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.values[from][to]
    }

    /// 16 rows x 16 columns, 6-decimal fixed point, row = source neuron.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.values {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Estimate the full TE matrix from a recording, pooling adjacent-step
/// pairs across trials.
pub fn te_matrix(recording: &Recording) -> Result<TEMatrix> {
    let series: Vec<Vec<Vec<u8>>> = (0..NEURON_COUNT)
        .map(|n| recording.neuron_series(n))
        .collect();
    let mut m = TEMatrix::zero();
    for i in 0..NEURON_COUNT {
        for j in 0..NEURON_COUNT {
            if i == j {
                let mut counts = PairCounts::new();
                for trial in &series[j] {
                    counts.add_series(trial)?;
                }
                m.values[j][j] = counts.mutual_information();
            } else {
                let mut counts = JointCounts::new();
                for (src, tgt) in series[i].iter().zip(series[j].iter()) {
                    counts.add_series(src, tgt)?;
                }
                m.values[i][j] = counts.transfer_entropy();
            }
        }
    }
    Ok(m)
}
