//! Runs the divide phase for one order step by step and prints timings.
//!
//! `cargo run --release --example divide -- 7 3` (arguments: r, then d).

use std::time::Instant;

use bestmat::divide::{enumerate_candidates, join_quadruples, CandidateSet, DivideConfig};
use bestmat::equivalence::dedupe;
use bestmat::seqcore::{OrderParams, Role};

fn main() -> bestmat::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let r = args.next().unwrap_or(4) as u32;
    let d = args.next();
    let params = OrderParams::from_r(r, d)?;
    let cfg = DivideConfig::default();
    let start = Instant::now();
    let a = enumerate_candidates(&params, Role::A, &cfg)?;
    let b = enumerate_candidates(&params, Role::B, &cfg)?;
    let c = CandidateSet {
        role: Role::C,
        ..b.clone()
    };
    let dd = enumerate_candidates(&params, Role::D, &cfg)?;
    for set in [&a, &b, &dd] {
        println!("{}: {} rows, {} compressions", set.role, set.survivors, set.len());
    }
    println!("pools after {:.1?}", start.elapsed());
    let joined = join_quadruples([&a, &b, &c, &dd], &params, &cfg)?;
    println!(
        "ab pairs {}, cd pairs {}, joined {} after {:.1?}",
        joined.ab_pairs,
        joined.cd_pairs,
        joined.quads.len(),
        start.elapsed()
    );
    let classes = dedupe(&joined.quads, cfg.exec);
    println!("{} classes after {:.1?}", classes.len(), start.elapsed());
    Ok(())
}
