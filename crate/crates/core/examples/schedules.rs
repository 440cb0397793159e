// Offline query schedules: plain ORBGRAND ranks, CDF weights from order
// statistics of |L|, and the three-line fit to them. Prints the first
// patterns of each and writes one to disk in the schedule file format.
//
// ```bash
// cargo run --release --example schedules
// ```

use grandlab::channel::{sigma_from_snr, SnrConvention};
use grandlab::pattern::{
    cdf_weight_function, enumerate_schedule, fit_three_line, load_schedule, logistic_weight, save_schedule,
    three_line_weight_function, WeightFunction,
};
use grandlab::rng::stream;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let n = 127;
    let sigma = sigma_from_snr(5.0, 113.0 / 127.0, SnrConvention::EbN0)?;

    let rank = WeightFunction::rank(n);
    let cdf = cdf_weight_function(n, sigma, 10_000, &mut stream(1, "cdf-weights", 0))?;
    let fit = fit_three_line(cdf.gamma())?;
    let three = three_line_weight_function(n, &fit)?;
    println!(
        "three-line fit: intercept {:.3}, slopes {:.3?}, breakpoints {:.1?}",
        fit.intercept, fit.slopes, fit.breakpoints
    );
    for r in [1usize, 10, 40, 127] {
        println!("  gamma({r:>3}): cdf {:>8.3}  3-line {:>8.3}", cdf.gamma()[r - 1], three.gamma()[r - 1]);
    }

    for wf in [&rank, &cdf, &three] {
        let s = enumerate_schedule(wf, n, 2000)?;
        let head: Vec<String> = s.patterns()[..8].iter().map(|p| format!("{p:?}")).collect();
        let last = s.patterns().last().unwrap();
        println!(
            "{:<6} first: {}  last: {:?} (logistic weight {})",
            s.tag(),
            head.join(" "),
            last,
            logistic_weight(last)
        );
    }

    let dir = std::env::temp_dir().join(format!("grandlab-sched-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("cdf.sched");
    let s = enumerate_schedule(&cdf, n, 2000)?;
    save_schedule(&s, &path)?;
    assert_eq!(load_schedule(&path)?, s);
    println!("wrote and reloaded {} patterns", s.len());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
