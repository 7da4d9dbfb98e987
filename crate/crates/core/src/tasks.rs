//! Task environments: motion-detection and sound-localization stimulus
//! sets, decision decoding, and fitness.

use serde::{Deserialize, Serialize};

use crate::brain::{Brain, NeuronState, Stimulus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    #[serde(rename = "md")]
    Md,
    #[serde(rename = "sl")]
    Sl,
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TaskKind::Md => write!(f, "md"),
            TaskKind::Sl => write!(f, "sl"),
        }
    }
}

impl std::str::FromStr for TaskKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "md" => Ok(TaskKind::Md),
            "sl" => Ok(TaskKind::Sl),
            other => Err(format!("unknown task '{other}' (expected md or sl)")),
        }
    }
}

/// Trial class. Motion detection uses PD / STATIONARY / ND; sound
/// localization uses the five source angles A0..A4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "PD")]
    Pd,
    #[serde(rename = "STATIONARY")]
    Stationary,
    #[serde(rename = "ND")]
    Nd,
    A0,
    A1,
    A2,
    A3,
    A4,
}

pub const ANGLE_LABELS: [Label; 5] = [Label::A0, Label::A1, Label::A2, Label::A3, Label::A4];

/// One stimulus sequence with its class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub stimuli: Vec<Stimulus>,
    pub label: Label,
}

/// A full task: its trial list, designated output neurons, and the number of
/// free-running steps between the last stimulus frame and the readout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub trials: Vec<Trial>,
    pub output_neurons: Vec<usize>,
    pub post_input_steps: usize,
}

impl TaskSpec {
    pub fn perfect_score(&self) -> u32 {
        self.trials.len() as u32
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The task for a kind, with its standard output neurons and post-input
/// step count (MD: {14, 15}, 2 steps; SL: {11..15}, 1 step).
pub fn task_spec(kind: TaskKind) -> TaskSpec {
    match kind {
        TaskKind::Md => md_trials(),
        TaskKind::Sl => sl_trials(),
    }
}

/// Pattern code for a 2-bit frame written s0s1, e.g. "10" = sensor 0 on.
fn frame(code: u8) -> Stimulus {
    [(code >> 1) & 1, code & 1]
}

/// All 16 ordered pairs of 2-bit frames presented at two consecutive steps.
/// PD pairs are consistent with a one-pixel rightward shift (10→01, 10→11,
/// 11→01), ND pairs are their sensor-swapped mirrors, and the remaining 10
/// pairs are stationary.
pub fn md_trials() -> TaskSpec {
    const PD: [(u8, u8); 3] = [(0b10, 0b01), (0b10, 0b11), (0b11, 0b01)];
    const ND: [(u8, u8); 3] = [(0b01, 0b10), (0b01, 0b11), (0b11, 0b10)];
    let mut trials = Vec::with_capacity(16);
    for p0 in 0..4u8 {
        for p1 in 0..4u8 {
            let label = if PD.contains(&(p0, p1)) {
                Label::Pd
            } else if ND.contains(&(p0, p1)) {
                Label::Nd
            } else {
                Label::Stationary
            };
            trials.push(Trial { stimuli: vec![frame(p0), frame(p1)], label });
        }
    }
    TaskSpec {
        kind: TaskKind::Md,
        trials,
        output_neurons: vec![14, 15],
        post_input_steps: 2,
    }
}

/// Five 3-step sequences distinguished by the arrival-time offset between
/// the two ears: sensor 0 pulses once at step L, sensor 1 at step R, with
/// (L, R) running through (0,2), (0,1), (0,0), (1,0), (2,0) for A0..A4.
pub fn sl_trials() -> TaskSpec {
    const ONSETS: [(usize, usize); 5] = [(0, 2), (0, 1), (0, 0), (1, 0), (2, 0)];
    let trials = ONSETS
        .iter()
        .zip(ANGLE_LABELS)
        .map(|(&(l, r), label)| Trial {
            stimuli: (0..3)
                .map(|t| [(t == l) as u8, (t == r) as u8])
                .collect(),
            label,
        })
        .collect();
    TaskSpec {
        kind: TaskKind::Sl,
        trials,
        output_neurons: vec![11, 12, 13, 14, 15],
        post_input_steps: 1,
    }
}

/// Sum of the two output bits: 0 → ND, 1 → STATIONARY, 2 → PD.
pub fn classify_md(decision: NeuronState, outputs: &[usize]) -> Label {
    debug_assert_eq!(outputs.len(), 2);
    match decision.bit(outputs[0]) + decision.bit(outputs[1]) {
        0 => Label::Nd,
        1 => Label::Stationary,
        _ => Label::Pd,
    }
}

/// Strict one-hot readout over the five output neurons: the angle whose
/// neuron fires alone, or None for silent or ambiguous responses.
pub fn classify_sl(decision: NeuronState, outputs: &[usize]) -> Option<Label> {
    debug_assert_eq!(outputs.len(), 5);
    let mut fired = None;
    for (k, &n) in outputs.iter().enumerate() {
        if decision.bit(n) == 1 {
            if fired.is_some() {
                return None;
            }
            fired = Some(ANGLE_LABELS[k]);
        }
    }
    fired
}

fn classify(kind: TaskKind, decision: NeuronState, outputs: &[usize]) -> Option<Label> {
    match kind {
        TaskKind::Md => Some(classify_md(decision, outputs)),
        TaskKind::Sl => classify_sl(decision, outputs),
    }
}

/// Run every trial and classify its decision state. Returns the number of
/// correct trials and the per-trial outcomes.
pub fn fitness(brain: &Brain, task: &TaskSpec) -> (u32, Vec<bool>) {
    let mut per_trial = Vec::with_capacity(task.trials.len());
    let mut correct = 0;
    for trial in &task.trials {
        let decision = brain.run_trial_decision(&trial.stimuli, task.post_input_steps);
        let ok = classify(task.kind, decision, &task.output_neurons) == Some(trial.label);
        if ok {
            correct += 1;
        }
        per_trial.push(ok);
    }
    (correct, per_trial)
}
