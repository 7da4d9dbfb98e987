use mbflow_core::evolve::{run_experiment, EvolveConfig};
use mbflow_core::tasks::TaskKind;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let task = if args.get(1).map(|s| s.as_str()) == Some("sl") { TaskKind::Sl } else { TaskKind::Md };
    let gens: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(500);
    let reps: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(20);
    let seed: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(2026);
    let mut config = EvolveConfig::desk(task, seed);
    config.generations = gens;
    config.replicates = reps;
    let t = Instant::now();
    let results = run_experiment(&config).unwrap();
    let elapsed = t.elapsed();
    let perfect_score = if task == TaskKind::Md { 16 } else { 5 };
    let perfect = results.iter().filter(|r| r.champion_score == perfect_score).count();
    let scores: Vec<u32> = results.iter().map(|r| r.champion_score).collect();
    println!("task={task:?} gens={gens} reps={reps} seed={seed} perfect={perfect}/{reps} elapsed={elapsed:?}");
    println!("champion scores: {scores:?}");
    // generation at which each replicate first hit perfect
    let first_hit: Vec<i64> = results.iter().map(|r| {
        r.trajectory.iter().position(|g| g.best_score == perfect_score).map(|p| p as i64).unwrap_or(-1)
    }).collect();
    println!("first perfect generation: {first_hit:?}");
}
