//! Ground-truth causal structure: the brain's full next-state function over
//! all 2^16 states, bit-flip influence maps, and gate knockout assays.

use serde::{Deserialize, Serialize};

use crate::brain::{Brain, NeuronState, NEURON_COUNT, SENSOR_NEURONS};
use crate::error::{Error, Result};
use crate::tasks::{fitness, TaskSpec};

const STATE_COUNT: usize = 1 << NEURON_COUNT;

/// The brain's one-step update materialized over every 16-bit state,
/// evaluated without any stimulus overwrite.
pub struct NextStateTable {
    table: Vec<u16>,
}

impl NextStateTable {
    pub fn eval(&self, state: u16) -> u16 {
        self.table[state as usize]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Materialize the full logic table of the brain.
pub fn next_state_function(brain: &Brain) -> NextStateTable {
    let table = (0..STATE_COUNT)
        .map(|s| brain.step(NeuronState::from_bits(s as u16), None).bits())
        .collect();
    NextStateTable { table }
}

/// Ground-truth one-step causal edges: entry (i, j) is true iff some state
/// exists where flipping neuron i changes neuron j's next state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluenceMap {
    pub edges: [[bool; NEURON_COUNT]; NEURON_COUNT],
}

impl InfluenceMap {
    pub fn none() -> Self {
        InfluenceMap { edges: [[false; NEURON_COUNT]; NEURON_COUNT] }
    }

    pub fn get(&self, from: usize, to: usize) -> bool {
        self.edges[from][to]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().flatten().filter(|&&e| e).count()
    }

    /// 16 rows x 16 columns of 0/1, row = source neuron.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.edges {
            let cells: Vec<String> = row.iter().map(|&e| if e { "1" } else { "0" }.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_rows_u8(&self) -> Vec<Vec<u8>> {
        self.edges
            .iter()
            .map(|row| row.iter().map(|&e| e as u8).collect())
            .collect()
    }
}

/// Build the influence map by bit-flip relevance over the entire state
/// space. Columns of sensor neurons are forced false: sensors are written
/// by the environment, so nothing inside the network influences them.
///
/// Enumeration subsumes the connectivity-plus-gate-type reading: constant
/// gates induce no edges, and inputs that are wired but logically irrelevant
/// (the ignored input of a COPY, or a gate masked by other writers into the
/// same neuron) induce none either.
pub fn influence_map(brain: &Brain) -> InfluenceMap {
    let table = next_state_function(brain);
    influence_from_table(&table)
}

fn influence_from_table(table: &NextStateTable) -> InfluenceMap {
    let mut edges = [[false; NEURON_COUNT]; NEURON_COUNT];
    for i in 0..NEURON_COUNT {
        let bit = 1u16 << i;
        let mut diff = 0u16;
        for s in 0..STATE_COUNT as u32 {
            let s = s as u16;
            diff |= table.eval(s) ^ table.eval(s ^ bit);
        }
        for (j, row_entry) in edges[i].iter_mut().enumerate().take(NEURON_COUNT) {
            *row_entry = diff >> j & 1 == 1;
        }
    }
    clear_sensor_columns(&mut edges);
    InfluenceMap { edges }
}

/// Influence restricted to an observed set of states: an edge needs some
/// listed state whose bit-i flip changes neuron j. A diagnostic companion
/// to the full-space map, not ground truth.
pub fn influence_map_restricted(brain: &Brain, states: &[u16]) -> InfluenceMap {
    let mut edges = [[false; NEURON_COUNT]; NEURON_COUNT];
    for i in 0..NEURON_COUNT {
        let mut diff = 0u16;
        for &s in states {
            let a = brain.step(NeuronState::from_bits(s), None).bits();
            let b = brain.step(NeuronState::from_bits(s ^ (1 << i)), None).bits();
            diff |= a ^ b;
        }
        for (j, row_entry) in edges[i].iter_mut().enumerate().take(NEURON_COUNT) {
            *row_entry = diff >> j & 1 == 1;
        }
    }
    clear_sensor_columns(&mut edges);
    InfluenceMap { edges }
}

fn clear_sensor_columns(edges: &mut [[bool; NEURON_COUNT]; NEURON_COUNT]) {
    for row in edges.iter_mut() {
        for &s in &SENSOR_NEURONS {
            row[s] = false;
        }
    }
}

/// Outcome of removing one gate from a perfect brain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateKnockout {
    pub gate_index: usize,
    pub mutant_score: u32,
    pub essential: bool,
}

/// Per-gate knockout results. A gate is essential iff the brain without it
/// no longer scores perfectly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnockoutReport {
    pub perfect_score: u32,
    pub per_gate: Vec<GateKnockout>,
    pub essential_count: usize,
    pub redundant_count: usize,
}

impl KnockoutReport {
    pub fn essential_indices(&self) -> Vec<usize> {
        self.per_gate
            .iter()
            .filter(|k| k.essential)
            .map(|k| k.gate_index)
            .collect()
    }
}

/// Remove each gate in turn and re-measure fitness. Only defined on brains
/// that already solve the task perfectly.
pub fn knockout_assay(brain: &Brain, task: &TaskSpec) -> Result<KnockoutReport> {
    let perfect = task.perfect_score();
    let (score, _) = fitness(brain, task);
    if score < perfect {
        return Err(Error::NotPerfect { score, perfect });
    }
    let mut per_gate = Vec::with_capacity(brain.gates.len());
    for gi in 0..brain.gates.len() {
        let mut mutant = brain.clone();
        mutant.gates.remove(gi);
        let (mutant_score, _) = fitness(&mutant, task);
        per_gate.push(GateKnockout {
            gate_index: gi,
            mutant_score,
            essential: mutant_score < perfect,
        });
    }
    let essential_count = per_gate.iter().filter(|k| k.essential).count();
    let redundant_count = per_gate.len() - essential_count;
    Ok(KnockoutReport { perfect_score: perfect, per_gate, essential_count, redundant_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brain::Gate;
    use crate::tasks::{md_trials, Label};

    #[test]
    fn empty_brain_maps_all_states_to_zero() {
        let table = next_state_function(&Brain::empty());
        assert_eq!(table.len(), STATE_COUNT);
        for s in [0u16, 1, 0xffff, 0b1010_0101_0110_1001] {
            assert_eq!(table.eval(s), 0);
        }
    }

    #[test]
    fn copy_gate_table_moves_bit() {
        let brain = Brain::new(vec![Gate::new(0, 7, 3, [0, 0, 1, 1])], vec![]);
        let table = next_state_function(&brain);
        for s in 0..STATE_COUNT as u32 {
            let s = s as u16;
            let expected = if s & 1 == 1 { 1u16 << 3 } else { 0 };
            assert_eq!(table.eval(s), expected);
        }
    }

    #[test]
    fn and_gate_influence_edges() {
        let brain = Brain::new(vec![Gate::new(0, 1, 2, [0, 0, 0, 1])], vec![]);
        let m = influence_map(&brain);
        for i in 0..NEURON_COUNT {
            for j in 0..NEURON_COUNT {
                let expected = (i == 0 || i == 1) && j == 2;
                assert_eq!(m.get(i, j), expected, "edge ({i}, {j})");
            }
        }
    }

    #[test]
    fn constant_gate_induces_no_edges() {
        let zero = Brain::new(vec![Gate::new(0, 1, 2, [0, 0, 0, 0])], vec![]);
        assert_eq!(influence_map(&zero).edge_count(), 0);
        let one = Brain::new(vec![Gate::new(0, 1, 2, [1, 1, 1, 1])], vec![]);
        assert_eq!(influence_map(&one).edge_count(), 0);
    }

    #[test]
    fn wired_but_irrelevant_input_induces_no_edge() {
        // COPY of input a: input b is connected but can never matter
        let brain = Brain::new(vec![Gate::new(0, 1, 2, [0, 0, 1, 1])], vec![]);
        let m = influence_map(&brain);
        assert!(m.get(0, 2));
        assert!(!m.get(1, 2));
        assert_eq!(m.edge_count(), 1);
    }

    #[test]
    fn masked_gate_input_induces_no_edge() {
        // a ONE gate writes neuron 2 unconditionally, masking the AND gate's
        // inputs under the OR combination rule
        let brain = Brain::new(
            vec![
                Gate::new(0, 1, 2, [0, 0, 0, 1]),
                Gate::new(3, 3, 2, [1, 1, 1, 1]),
            ],
            vec![],
        );
        assert_eq!(influence_map(&brain).edge_count(), 0);
    }

    #[test]
    fn sensor_columns_forced_false() {
        // gate writing into sensor neuron 1
        let brain = Brain::new(vec![Gate::new(4, 5, 1, [0, 1, 1, 1])], vec![]);
        let m = influence_map(&brain);
        assert_eq!(m.edge_count(), 0);
    }

    #[test]
    fn feedback_gate_has_self_edge() {
        let brain = Brain::new(vec![Gate::new(5, 6, 5, [0, 1, 1, 0])], vec![]);
        let m = influence_map(&brain);
        assert!(m.get(5, 5));
        assert!(m.get(6, 5));
    }

    #[test]
    fn restricted_map_is_subset_of_full_map() {
        let genome = crate::genome::random_genome(2_000, 13).unwrap();
        let brain = genome.decode();
        let full = influence_map(&brain);
        let states: Vec<u16> = (0..256).map(|s| s * 173).collect();
        let restricted = influence_map_restricted(&brain, &states);
        for i in 0..NEURON_COUNT {
            for j in 0..NEURON_COUNT {
                if restricted.get(i, j) {
                    assert!(full.get(i, j));
                }
            }
        }
    }

    #[test]
    fn influence_csv_shape() {
        let csv = influence_map(&Brain::empty()).to_csv();
        let lines: Vec<&str> = csv.trim_end().split('\n').collect();
        assert_eq!(lines.len(), 16);
        assert!(lines.iter().all(|l| l.split(',').count() == 16));
    }

    /// A hand-built brain that solves motion detection perfectly.
    ///
    /// N2 and N3 delay the sensor frames by one step, so when the second
    /// frame sits at the sensors the delays still hold the first. R = old s0
    /// AND new s1 is rightward evidence, L = old s1 AND new s0 leftward.
    /// Outputs encode the class sum as NOT L + R: PD (R=1, L=0) sums to 2,
    /// ND (R=0, L=1) to 0, and stationary pairs (R = L) to 1.
    fn perfect_md_brain() -> Brain {
        let d0 = Gate::new(0, 0, 2, [0, 0, 1, 1]); // N2 <- N0
        let d1 = Gate::new(1, 1, 3, [0, 0, 1, 1]); // N3 <- N1
        let right = Gate::new(2, 1, 4, [0, 0, 0, 1]); // N4 <- old s0 AND new s1
        let left = Gate::new(3, 0, 5, [0, 0, 0, 1]); // N5 <- old s1 AND new s0
        let o14 = Gate::new(5, 5, 14, [1, 1, 0, 0]); // N14 <- NOT N5
        let o15 = Gate::new(4, 4, 15, [0, 0, 1, 1]); // N15 <- N4
        Brain::new(vec![d0, d1, right, left, o14, o15], vec![14, 15])
    }

    #[test]
    fn hand_built_md_brain_is_perfect() {
        let task = md_trials();
        let brain = perfect_md_brain();
        let (score, per_trial) = fitness(&brain, &task);
        let wrong: Vec<_> = task
            .trials
            .iter()
            .zip(&per_trial)
            .filter(|(_, ok)| !**ok)
            .map(|(t, _)| (t.stimuli.clone(), t.label))
            .collect();
        assert_eq!(score, 16, "misclassified: {wrong:?}");
    }

    #[test]
    fn knockout_requires_perfect_brain() {
        let task = md_trials();
        let err = knockout_assay(&Brain::empty(), &task).unwrap_err();
        assert!(matches!(err, Error::NotPerfect { score: 3, perfect: 16 }));
    }

    #[test]
    fn knockout_partitions_gates() {
        let task = md_trials();
        let brain = perfect_md_brain();
        let report = knockout_assay(&brain, &task).unwrap();
        assert_eq!(report.per_gate.len(), brain.gates.len());
        assert_eq!(report.essential_count + report.redundant_count, brain.gates.len());
        for k in &report.per_gate {
            assert_eq!(k.essential, k.mutant_score < report.perfect_score);
        }
    }

    #[test]
    fn duplicate_gates_are_each_redundant() {
        let task = md_trials();
        let mut brain = perfect_md_brain();
        let duplicate = brain.gates[2];
        brain.gates.push(duplicate);
        let report = knockout_assay(&brain, &task).unwrap();
        // both copies of the duplicated gate are individually redundant
        assert!(!report.per_gate[2].essential);
        assert!(!report.per_gate.last().unwrap().essential);
    }

    #[test]
    fn sole_path_gate_is_essential() {
        let task = md_trials();
        let brain = perfect_md_brain();
        let report = knockout_assay(&brain, &task).unwrap();
        // the OR gate feeding output neuron 14 is the only writer of N14
        let or_index = brain.gates.iter().position(|g| g.out == 14).unwrap();
        assert!(report.per_gate[or_index].essential);
    }

    #[test]
    fn removing_redundant_gate_keeps_brain_perfect() {
        let task = md_trials();
        let mut brain = perfect_md_brain();
        brain.gates.push(brain.gates[0]);
        let report = knockout_assay(&brain, &task).unwrap();
        for k in &report.per_gate {
            if !k.essential {
                let mut reduced = brain.clone();
                reduced.gates.remove(k.gate_index);
                assert_eq!(fitness(&reduced, &task).0, task.perfect_score());
            }
        }
        let _ = Label::Pd;
    }
}
