//! Genetic-algorithm orchestration: seeded, replicable evolution of genome
//! populations against a task, with independent replicate batches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brain::Brain;
use crate::error::{Error, Result};
use crate::genome::{random_genome_with_rng, Genome, MutationRates, INITIAL_GENOME_LEN};
use crate::tasks::{fitness, task_spec, TaskKind, TaskSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub population_size: usize,
    pub generations: usize,
    pub replicates: usize,
    pub mutation: MutationRates,
    pub tournament_size: usize,
    pub elitism: usize,
    pub seed: u64,
    pub task: TaskKind,
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig("population_size must be >= 2".into()));
        }
        if self.tournament_size < 1 || self.tournament_size > self.population_size {
            return Err(Error::InvalidConfig(
                "tournament_size must be in [1, population_size]".into(),
            ));
        }
        if self.elitism >= self.population_size {
            return Err(Error::InvalidConfig("elitism must be < population_size".into()));
        }
        if self.replicates < 1 {
            return Err(Error::InvalidConfig("replicates must be >= 1".into()));
        }
        self.mutation.validate()?;
        Ok(())
    }

    /// Desk-scale preset: 20 replicates x 2,000 generations x population 100.
    pub fn desk(task: TaskKind, seed: u64) -> Self {
        EvolveConfig {
            population_size: 100,
            generations: 2_000,
            replicates: 20,
            mutation: MutationRates::default(),
            tournament_size: 5,
            elitism: 1,
            seed,
            task,
        }
    }
}

/// Best and mean raw score of one generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub best_score: u32,
    pub mean_score: f64,
}

/// Outcome of one evolved population: the best-ever individual and the
/// per-generation score trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub replicate_id: usize,
    pub seed: u64,
    pub champion_genome: Genome,
    pub champion_brain: Brain,
    pub champion_score: u32,
    pub trajectory: Vec<GenerationStats>,
}

impl RunResult {
    /// generation, best_score, mean_score per row.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("generation,best_score,mean_score\n");
        for (gen, stats) in self.trajectory.iter().enumerate() {
            out.push_str(&format!("{},{},{:.6}\n", gen, stats.best_score, stats.mean_score));
        }
        out
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-replicate seed, mixed from the master seed so replicate batches
/// parallelize with schedule-independent results.
pub fn derive_seed(master: u64, replicate_id: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(replicate_id.wrapping_add(0x517C_C1B7_2722_0A95)))
}

fn evaluate(population: &[Genome], task: &TaskSpec) -> Vec<u32> {
    population
        .par_iter()
        .map(|g| fitness(&g.decode(), task).0)
        .collect()
}

/// Tournament selection: sample `k` distinct individuals, pick the highest
/// score, break ties uniformly at random among the tied contestants.
fn tournament<R: Rng>(scores: &[u32], k: usize, rng: &mut R) -> usize {
    let contestants = rand::seq::index::sample(rng, scores.len(), k);
    let best = contestants.iter().map(|i| scores[i]).max().expect("k >= 1");
    let tied: Vec<usize> = contestants.iter().filter(|&i| scores[i] == best).collect();
    tied[rng.random_range(0..tied.len())]
}

/// Indices of the population sorted by score descending, index ascending.
fn rank_indices(scores: &[u32]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Evolve one population. Each generation keeps the top `elitism`
/// individuals unchanged and fills the rest with mutated tournament
/// winners. Deterministic given (config.seed, replicate_id); the champion
/// is the best-ever individual, not the final-generation best.
pub fn evolve_population(config: &EvolveConfig, replicate_id: usize) -> Result<RunResult> {
    config.validate()?;
    let task = task_spec(config.task);
    let seed = derive_seed(config.seed, replicate_id as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut population: Vec<Genome> = (0..config.population_size)
        .map(|_| random_genome_with_rng(INITIAL_GENOME_LEN, &mut rng))
        .collect::<Result<_>>()?;

    let mut champion: Option<(u32, Genome)> = None;
    let mut trajectory = Vec::with_capacity(config.generations);

    for _generation in 0..config.generations {
        let scores = evaluate(&population, &task);

        let order = rank_indices(&scores);
        let best_idx = order[0];
        let best = scores[best_idx];
        if champion.as_ref().map_or(true, |(s, _)| best > *s) {
            champion = Some((best, population[best_idx].clone()));
        }
        let mean = scores.iter().map(|&s| s as f64).sum::<f64>() / scores.len() as f64;
        trajectory.push(GenerationStats { best_score: best, mean_score: mean });

        let mut next = Vec::with_capacity(config.population_size);
        for &e in order.iter().take(config.elitism) {
            next.push(population[e].clone());
        }
        while next.len() < config.population_size {
            let parent = tournament(&scores, config.tournament_size, &mut rng);
            next.push(population[parent].mutate_with_rng(&config.mutation, &mut rng));
        }
        population = next;
    }

    let (champion_score, champion_genome) = champion.expect("at least one generation");
    let champion_brain = champion_genome
        .decode()
        .with_outputs(task.output_neurons.clone());
    Ok(RunResult {
        replicate_id,
        seed,
        champion_genome,
        champion_brain,
        champion_score,
        trajectory,
    })
}

/// Run independent replicate populations with derived per-replicate seeds.
/// Results are ordered by replicate id and independent of the worker
/// schedule.
pub fn run_experiment(config: &EvolveConfig) -> Result<Vec<RunResult>> {
    config.validate()?;
    (0..config.replicates)
        .into_par_iter()
        .map(|r| evolve_population(config, r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(task: TaskKind) -> EvolveConfig {
        EvolveConfig {
            population_size: 12,
            generations: 12,
            replicates: 3,
            mutation: MutationRates::default(),
            tournament_size: 3,
            elitism: 1,
            seed: 11,
            task,
        }
    }

    #[test]
    fn config_validation() {
        let mut c = tiny_config(TaskKind::Md);
        assert!(c.validate().is_ok());
        c.population_size = 1;
        assert!(c.validate().is_err());
        c = tiny_config(TaskKind::Md);
        c.tournament_size = 13;
        assert!(c.validate().is_err());
        c = tiny_config(TaskKind::Md);
        c.elitism = 12;
        assert!(c.validate().is_err());
    }

    #[test]
    fn best_score_monotone_with_elitism_and_no_mutation() {
        let mut config = tiny_config(TaskKind::Md);
        config.mutation = MutationRates { point_rate: 0.0, insert_rate: 0.0, delete_rate: 0.0 };
        let result = evolve_population(&config, 0).unwrap();
        for w in result.trajectory.windows(2) {
            assert!(w[1].best_score >= w[0].best_score);
        }
    }

    #[test]
    fn best_ever_is_monotone_even_with_mutation() {
        let config = tiny_config(TaskKind::Sl);
        let result = evolve_population(&config, 0).unwrap();
        let mut best_ever = 0;
        for stats in &result.trajectory {
            best_ever = best_ever.max(stats.best_score);
        }
        assert_eq!(result.champion_score, best_ever);
    }

    #[test]
    fn same_seed_gives_identical_results() {
        let config = tiny_config(TaskKind::Md);
        let a = evolve_population(&config, 1).unwrap();
        let b = evolve_population(&config, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn champion_score_matches_reevaluation() {
        let config = tiny_config(TaskKind::Md);
        let result = evolve_population(&config, 2).unwrap();
        let task = task_spec(TaskKind::Md);
        assert_eq!(fitness(&result.champion_brain, &task).0, result.champion_score);
    }

    #[test]
    fn single_replicate_experiment_matches_population_run() {
        let mut config = tiny_config(TaskKind::Md);
        config.replicates = 1;
        let batch = run_experiment(&config).unwrap();
        assert_eq!(batch.len(), 1);
        assert_eq!(batch[0], evolve_population(&config, 0).unwrap());
    }

    #[test]
    fn experiment_is_schedule_independent() {
        let config = tiny_config(TaskKind::Md);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| run_experiment(&config).unwrap());
        let parallel = run_experiment(&config).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn full_tournament_selects_maximal_individual() {
        let scores = vec![3, 9, 1, 9, 4, 0];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let winner = tournament(&scores, scores.len(), &mut rng);
            assert_eq!(scores[winner], 9);
        }
    }

    #[test]
    fn derived_seeds_differ_across_replicates() {
        let seeds: Vec<u64> = (0..100).map(|r| derive_seed(42, r)).collect();
        let unique: std::collections::HashSet<_> = seeds.iter().collect();
        assert_eq!(unique.len(), seeds.len());
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn trajectory_csv_shape() {
        let config = tiny_config(TaskKind::Md);
        let result = evolve_population(&config, 0).unwrap();
        let csv = result.trajectory_csv();
        let lines: Vec<&str> = csv.trim_end().split('\n').collect();
        assert_eq!(lines.len(), config.generations + 1);
        assert_eq!(lines[0], "generation,best_score,mean_score");
    }
}
