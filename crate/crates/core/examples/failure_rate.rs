//! Failure-rate sweep over planted instances.
//!
//! cargo run --release --example failure_rate -- [alg1|alg2|lp|basis_pursuit] [trials] [n1 m1 n2 m2]

use std::time::Instant;

use channel_inclusion::experiment::{failure_rate, write_summary_csv, Algorithm, ExperimentSpec, Shape};

fn main() -> channel_inclusion::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let algorithm = match args.first().map(String::as_str).unwrap_or("alg1") {
        "alg2" => Algorithm::Alg2,
        "lp" => Algorithm::Lp,
        "basis_pursuit" => Algorithm::BasisPursuit,
        _ => Algorithm::Alg1,
    };
    let trials = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let dims: Vec<usize> = args.iter().skip(2).filter_map(|s| s.parse().ok()).collect();
    let shape = match dims[..] {
        [n1, m1, n2, m2] => Shape::new(n1, m1, n2, m2),
        _ => Shape::square(3, 3),
    };

    let spec = ExperimentSpec::new(shape, vec![1, 2, 3, 4, 5], trials, 2024, algorithm);
    let start = Instant::now();
    let report = failure_rate(&spec)?;
    eprintln!("{} {} trials per beta on {shape} in {:.2?}", algorithm.name(), trials, start.elapsed());
    write_summary_csv(&report.summary, std::io::stdout().lock())
}
