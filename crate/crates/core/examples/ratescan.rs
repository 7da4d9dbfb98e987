use mbflow_core::evolve::{run_experiment, EvolveConfig};
use mbflow_core::genome::MutationRates;
use mbflow_core::tasks::TaskKind;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let task = if args.get(1).map(|s| s.as_str()) == Some("sl") { TaskKind::Sl } else { TaskKind::Md };
    let gens: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let reps: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(60);
    let cells = args.get(4).cloned().unwrap_or_else(|| "a".into());
    let perfect_score = if task == TaskKind::Sl { 5 } else { 16 };
    let combos: Vec<(usize, usize, f64, f64, f64)> = match cells.as_str() {
        "a" => vec![
            (5, 1, 0.008, 0.25, 0.15),
            (5, 1, 0.012, 0.25, 0.15),
            (3, 1, 0.012, 0.25, 0.15),
        ],
        _ => vec![
            (5, 1, 0.008, 0.3, 0.1),
            (3, 1, 0.008, 0.3, 0.1),
            (5, 1, 0.016, 0.25, 0.15),
        ],
    };
    for (k, e, point, ins, del) in combos {
        let mut config = EvolveConfig::desk(task, 2026);
        config.generations = gens;
        config.replicates = reps;
        config.tournament_size = k;
        config.elitism = e;
        config.mutation = MutationRates { point_rate: point, insert_rate: ins, delete_rate: del };
        let t = Instant::now();
        let results = run_experiment(&config).unwrap();
        let perfect = results.iter().filter(|r| r.champion_score == perfect_score).count();
        println!("k={k} e={e} point={point} ins={ins} del={del} perfect={perfect}/{reps} t={:.0?}", t.elapsed());
    }
}
