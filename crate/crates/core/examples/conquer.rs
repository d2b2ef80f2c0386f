//! Solves a random sample of subproblems and prints per-subproblem timings.
//!
//! `cargo run --release --example conquer -- 7 5 1` (arguments: r, sample
//! size, seed).

use std::time::Instant;

use bestmat::divide::{generate_subproblems, DivideConfig};
use bestmat::search::{conquer, SearchConfig};
use bestmat::seqcore::OrderParams;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bestmat::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let r = args.next().unwrap_or(7) as u32;
    let count = args.next().unwrap_or(3) as usize;
    let seed = args.next().unwrap_or(1);
    let params = OrderParams::from_r(r, None)?;
    let divided = generate_subproblems(&params, &DivideConfig::default())?;
    println!("{} subproblems", divided.subproblems.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample: Vec<_> = divided.subproblems.choose_multiple(&mut rng, count).collect();
    for cq in sample {
        let start = Instant::now();
        let report = conquer(cq, &SearchConfig::default())?;
        println!(
            "{:>8.2?} models {} solutions {} conflicts {} theory {} decisions {}",
            start.elapsed(),
            report.models,
            report.solutions.len(),
            report.stats.conflicts,
            report.stats.theory_conflicts,
            report.stats.decisions
        );
    }
    Ok(())
}
