//! Brain network model: binary neurons wired by 2-to-1 deterministic logic
//! gates, with one-step Markov update semantics and trial execution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Total neuron count. All state vectors, influence maps and TE matrices are
/// sized by this.
pub const NEURON_COUNT: usize = 16;

/// Neurons driven by the environment; gates may read them but never set them.
pub const SENSOR_NEURONS: [usize; 2] = [0, 1];

/// A 2-bit sensor frame: value written into neurons N0 and N1.
pub type Stimulus = [u8; 2];

/// Joint state of all 16 neurons, bit i = neuron N_i (0 quiescent, 1 firing).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NeuronState(u16);

impl NeuronState {
    pub const ZERO: NeuronState = NeuronState(0);

    pub fn from_bits(bits: u16) -> Self {
        NeuronState(bits)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    /// State of neuron `i` as 0/1.
    pub fn bit(self, i: usize) -> u8 {
        debug_assert!(i < NEURON_COUNT);
        ((self.0 >> i) & 1) as u8
    }

    pub fn with_bit(self, i: usize, value: u8) -> Self {
        debug_assert!(i < NEURON_COUNT);
        let mask = 1u16 << i;
        if value & 1 == 1 {
            NeuronState(self.0 | mask)
        } else {
            NeuronState(self.0 & !mask)
        }
    }

    pub fn flipped(self, i: usize) -> Self {
        debug_assert!(i < NEURON_COUNT);
        NeuronState(self.0 ^ (1 << i))
    }

    /// Overwrite the sensor neurons with a stimulus frame.
    pub fn with_stimulus(self, stimulus: Stimulus) -> Self {
        self.with_bit(SENSOR_NEURONS[0], stimulus[0])
            .with_bit(SENSOR_NEURONS[1], stimulus[1])
    }
}

impl std::fmt::Debug for NeuronState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NeuronState({:016b})", self.0)
    }
}

/// How a gate's output depends on its two inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateClass {
    /// Output fixed at 0 or 1.
    Constant,
    /// Output depends only on input `a`.
    MonadicA,
    /// Output depends only on input `b`.
    MonadicB,
    /// Output depends on both inputs.
    Polyadic,
}

/// A 2-to-1 deterministic logic gate. `truth` gives the output for input
/// pairs (a, b) = (00, 01, 10, 11), i.e. index `2a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub in_a: u8,
    pub in_b: u8,
    pub out: u8,
    pub truth: [u8; 4],
}

impl Gate {
    pub fn new(in_a: u8, in_b: u8, out: u8, truth: [u8; 4]) -> Self {
        let g = Gate { in_a, in_b, out, truth };
        g.validate().expect("invalid gate");
        g
    }

    pub fn validate(&self) -> Result<()> {
        if self.in_a as usize >= NEURON_COUNT
            || self.in_b as usize >= NEURON_COUNT
            || self.out as usize >= NEURON_COUNT
        {
            return Err(Error::MalformedBrain(format!(
                "gate index out of range: in_a={} in_b={} out={}",
                self.in_a, self.in_b, self.out
            )));
        }
        if self.truth.iter().any(|&t| t > 1) {
            return Err(Error::MalformedBrain(format!(
                "truth entries must be 0/1, got {:?}",
                self.truth
            )));
        }
        Ok(())
    }

    /// Gate output for the given network state.
    pub fn eval(&self, state: NeuronState) -> u8 {
        let a = state.bit(self.in_a as usize);
        let b = state.bit(self.in_b as usize);
        self.truth[(2 * a + b) as usize]
    }

    /// Classification from the truth table alone.
    pub fn class(&self) -> GateClass {
        gate_class(self.truth)
    }

    /// A gate has feedback iff it writes into one of its own inputs.
    pub fn has_feedback(&self) -> bool {
        self.out == self.in_a || self.out == self.in_b
    }
}

/// Classify a truth table: constant, monadic in either input, or polyadic.
pub fn gate_class(truth: [u8; 4]) -> GateClass {
    let ignores_b = truth[0] == truth[1] && truth[2] == truth[3];
    let ignores_a = truth[0] == truth[2] && truth[1] == truth[3];
    match (ignores_a, ignores_b) {
        (true, true) => GateClass::Constant,
        (false, true) => GateClass::MonadicA,
        (true, false) => GateClass::MonadicB,
        (false, false) => GateClass::Polyadic,
    }
}

/// The 16 canonical gate types in table order, with the asymmetric variants
/// named AND-NOT / OR-NOT.
pub const GATE_TYPE_TABLE: [([u8; 4], &str); 16] = [
    ([0, 0, 0, 0], "ZERO"),
    ([0, 0, 0, 1], "AND"),
    ([0, 0, 1, 0], "AND-NOT"),
    ([0, 1, 0, 0], "AND-NOT"),
    ([1, 0, 0, 0], "NOR"),
    ([0, 0, 1, 1], "COPY"),
    ([0, 1, 0, 1], "COPY"),
    ([0, 1, 1, 0], "XOR"),
    ([1, 0, 0, 1], "XNOR"),
    ([1, 0, 1, 0], "NOT"),
    ([1, 1, 0, 0], "NOT"),
    ([0, 1, 1, 1], "OR"),
    ([1, 0, 1, 1], "OR-NOT"),
    ([1, 1, 0, 1], "OR-NOT"),
    ([1, 1, 1, 0], "NAND"),
    ([1, 1, 1, 1], "ONE"),
];

/// Position of a truth table in [`GATE_TYPE_TABLE`].
pub fn gate_type_index(truth: [u8; 4]) -> usize {
    GATE_TYPE_TABLE
        .iter()
        .position(|(t, _)| *t == truth)
        .expect("truth entries must be 0/1")
}

/// Canonical display name for a truth table.
pub fn gate_type_name(truth: [u8; 4]) -> &'static str {
    GATE_TYPE_TABLE[gate_type_index(truth)].1
}

/// A network of gates over 16 neurons. `sensors` is always {0, 1};
/// `outputs` records the task's designated decision neurons (metadata for
/// serialization; classification always takes the output set explicitly).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Brain {
    pub gates: Vec<Gate>,
    pub sensors: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl Brain {
    pub fn new(gates: Vec<Gate>, outputs: Vec<usize>) -> Self {
        let b = Brain {
            gates,
            sensors: SENSOR_NEURONS.to_vec(),
            outputs,
        };
        b.validate().expect("invalid brain");
        b
    }

    pub fn empty() -> Self {
        Brain::new(Vec::new(), Vec::new())
    }

    pub fn with_outputs(mut self, outputs: Vec<usize>) -> Self {
        self.outputs = outputs;
        self.validate().expect("invalid brain");
        self
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            g.validate()?;
        }
        for &n in self.sensors.iter().chain(self.outputs.iter()) {
            if n >= NEURON_COUNT {
                return Err(Error::MalformedBrain(format!("neuron index {n} out of range")));
            }
        }
        if self.outputs.iter().any(|o| self.sensors.contains(o)) {
            return Err(Error::MalformedBrain(
                "sensor and output sets must be disjoint".into(),
            ));
        }
        Ok(())
    }

    /// One synchronous update. Each neuron's next state is the OR of all
    /// gates writing into it (0 if none write). If a stimulus is given the
    /// sensor neurons are overwritten afterwards, so gates can read sensors
    /// but never set them.
    pub fn step(&self, state: NeuronState, stimulus: Option<Stimulus>) -> NeuronState {
        let mut next = 0u16;
        for g in &self.gates {
            if g.eval(state) == 1 {
                next |= 1 << g.out;
            }
        }
        let next = NeuronState::from_bits(next);
        match stimulus {
            Some(stim) => next.with_stimulus(stim),
            None => next,
        }
    }

    /// Run one trial from an all-zero reset. The first recorded state is the
    /// zero state overwritten with the first stimulus frame; one update is
    /// applied per stimulus frame, then `post_input_steps` further updates
    /// with the final frame held at the sensors. Returns the full state
    /// sequence (length `stimuli.len() + post_input_steps + 1`) and the
    /// decision state (the final entry).
    pub fn run_trial(
        &self,
        stimuli: &[Stimulus],
        post_input_steps: usize,
    ) -> (Vec<NeuronState>, NeuronState) {
        assert!(!stimuli.is_empty(), "trial stimulus sequence must be nonempty");
        let mut seq = Vec::with_capacity(stimuli.len() + post_input_steps + 1);
        let mut state = NeuronState::ZERO.with_stimulus(stimuli[0]);
        seq.push(state);
        for &stim in stimuli {
            state = self.step(state, Some(stim));
            seq.push(state);
        }
        let last = *stimuli.last().unwrap();
        for _ in 0..post_input_steps {
            state = self.step(state, Some(last));
            seq.push(state);
        }
        (seq, state)
    }

    /// Decision state of [`Brain::run_trial`] without recording the sequence.
    /// Identical trajectory, no allocation; used in the evolution hot loop.
    pub fn run_trial_decision(&self, stimuli: &[Stimulus], post_input_steps: usize) -> NeuronState {
        assert!(!stimuli.is_empty(), "trial stimulus sequence must be nonempty");
        let mut state = NeuronState::ZERO.with_stimulus(stimuli[0]);
        for &stim in stimuli {
            state = self.step(state, Some(stim));
        }
        let last = *stimuli.last().unwrap();
        for _ in 0..post_input_steps {
            state = self.step(state, Some(last));
        }
        state
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Brain> {
        let brain: Brain = serde_json::from_str(text)?;
        brain.validate()?;
        Ok(brain)
    }
}

/// Time-indexed neuron states across all trials of a task; the transfer
/// entropy estimator's input. Adjacent-step pairs never span trials.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Recording {
    pub trials: Vec<Vec<NeuronState>>,
}

impl Recording {
    pub fn new() -> Self {
        Recording { trials: Vec::new() }
    }

    pub fn push_trial(&mut self, states: Vec<NeuronState>) {
        self.trials.push(states);
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    /// Per-trial 0/1 series of one neuron.
    pub fn neuron_series(&self, neuron: usize) -> Vec<Vec<u8>> {
        self.trials
            .iter()
            .map(|t| t.iter().map(|s| s.bit(neuron)).collect())
            .collect()
    }
}
