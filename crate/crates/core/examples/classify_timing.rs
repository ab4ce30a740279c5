use std::time::Instant;

use uslsq::classify::{classify, seed_phase, ClassifyOptions, DepthPolicy};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let (n, mu) = (args[0], args[1] as u32);
    let t = Instant::now();
    let seeds = seed_phase(n, mu, DepthPolicy::default()).unwrap();
    println!("seeds: {} in {:.2?}", seeds.len(), t.elapsed());
    let t = Instant::now();
    let run = classify(n, mu, &ClassifyOptions::default()).unwrap();
    println!("classes: {} solutions: {} in {:.2?}", run.classes.len(), run.solution_count, t.elapsed());
    for rep in run.classes.iter().take(2).chain(run.classes.last()) {
        println!("{}", rep.eta);
    }
}
