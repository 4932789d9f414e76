use std::time::Instant;
use walkforge::guess::{fit_differential, GuessOptions};

fn main() {
    // a pseudo-random series defeats every ansatz, so this times the full
    // schedule sweep, the worst case the pipeline pays per unknown model
    let prime = 45007u64;
    let mut x = 7u64;
    let series: Vec<u64> = (0..2000)
        .map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            x % prime
        })
        .collect();
    for &(n, r, d) in &[
        (600usize, 4usize, 16usize),
        (1000, 6, 24),
        (1000, 8, 32),
        (1000, 10, 48),
        (2000, 12, 60),
    ] {
        let opts = GuessOptions { max_order: r, max_degree: d, ..Default::default() };
        let t0 = Instant::now();
        let got = fit_differential(&series[..n], prime, &opts);
        println!(
            "n={:5} order<={:2} degree<={:2}: {:?} found={}",
            n,
            r,
            d,
            t0.elapsed(),
            got.is_some()
        );
    }
}
