use mbflow_core::evolve::{run_experiment, EvolveConfig};
use mbflow_core::genome::MutationRates;
use mbflow_core::tasks::TaskKind;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let task = if args.get(1).map(|s| s.as_str()) == Some("sl") { TaskKind::Sl } else { TaskKind::Md };
    let gens: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(8000);
    let k: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(5);
    let point: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0.002);
    let perfect_score = if task == TaskKind::Sl { 5 } else { 16 };
    let mut config = EvolveConfig::desk(task, 2026);
    config.generations = gens;
    config.tournament_size = k;
    config.mutation = MutationRates { point_rate: point, insert_rate: 0.05, delete_rate: 0.05 };
    let results = run_experiment(&config).unwrap();
    let first_hit: Vec<i64> = results.iter().map(|r| {
        r.trajectory.iter().position(|g| g.best_score == perfect_score).map(|p| p as i64).unwrap_or(-1)
    }).collect();
    let perfect = first_hit.iter().filter(|&&h| h >= 0).count();
    println!("task={task:?} gens={gens} k={k} point={point} perfect={perfect}/20");
    println!("first perfect gen: {first_hit:?}");
}
