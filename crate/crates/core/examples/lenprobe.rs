use mbflow_core::evolve::{run_experiment, EvolveConfig};
use mbflow_core::genome::MutationRates;
use mbflow_core::tasks::TaskKind;

fn main() {
    let mut config = EvolveConfig::desk(TaskKind::Md, 2026);
    config.generations = 2000;
    config.replicates = 8;
    config.mutation = MutationRates { point_rate: 0.002, insert_rate: 0.05, delete_rate: 0.05 };
    let results = run_experiment(&config).unwrap();
    for r in &results {
        println!(
            "rep {:2}: score {:2}, genome len {:5}, gates {:2}",
            r.replicate_id, r.champion_score, r.champion_genome.len(), r.champion_brain.gates.len()
        );
    }
}
