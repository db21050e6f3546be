use precision_core::eval::Summary;
use precision_core::traces::{generate_zipf, ZipfSpec};
use precision_core::AlgorithmSpec;
use precision_lab::runner::evaluate;
use rayon::prelude::*;

fn mean_recall(init: u64) -> f64 {
    let spec = AlgorithmSpec::Precision {
        d: 2,
        entries_per_way: 256,
        initial_value: init,
        prob_mode: precision_core::ProbMode::Exact,
        delay: 0,
        lookup_bits: 16,
    };
    let r: Vec<f64> = (1..=10u64)
        .into_par_iter()
        .map(|seed| {
            let t = generate_zipf(&ZipfSpec {
                alpha: 1.0,
                universe: 100_000,
                length: 1_000_000,
                seed,
            })
            .unwrap();
            evaluate(&spec, &t, seed, 128).unwrap().recall_at_k.unwrap()
        })
        .collect();
    Summary::of(&r).mean
}

#[test]
fn initial_value_100_converges_within_a_million_packets() {
    let base = mean_recall(0);
    let capped = mean_recall(100);
    assert!((capped - base).abs() <= 0.05 * base, "init 0: {base}, init 100: {capped}");
}
