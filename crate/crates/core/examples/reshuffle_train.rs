// Learning a reshuffled schedule: estimate the mean posterior of every
// pattern in a CDF-ordered base schedule, sort by it, and compare the
// expected query excess of both orders on held-out channel draws.
//
// The full experiment uses a 5·10^4 pattern base and 10^5 samples; this
// one is scaled down to run in seconds.
//
// ```bash
// cargo run --release --example reshuffle_train
// ```

use grandlab::channel::{sigma_from_snr, SnrConvention};
use grandlab::pattern::{cdf_weight_function, enumerate_schedule};
use grandlab::reshuffle::{compare_heldout, load_model, save_model, train};
use grandlab::rng::stream;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let n = 127;
    let sigma = sigma_from_snr(5.0, 113.0 / 127.0, SnrConvention::EbN0)?;
    let cdf = cdf_weight_function(n, sigma, 10_000, &mut stream(1, "cdf-weights", 0))?;
    let base = enumerate_schedule(&cdf, n, 5_000)?;

    let model = train(base, sigma, 2_000, 42)?;
    let moved = model
        .pi_tilde()
        .iter()
        .enumerate()
        .filter(|&(t, &src)| t as u32 != src)
        .count();
    println!("{} of {} patterns moved", moved, model.len());
    let first: Vec<String> = model.reshuffled().patterns()[..10].iter().map(|p| format!("{p:?}")).collect();
    println!("reshuffled head: {}", first.join(" "));

    let cmp = compare_heldout(&model, sigma, 500, 43)?;
    println!(
        "held-out excess: base {:.2}  reshuffled {:.2}  improvement {:.3} ± {:.3}",
        cmp.base.rank_difference, cmp.reshuffled.rank_difference, cmp.improvement, cmp.improvement_std_err
    );

    let dir = std::env::temp_dir().join(format!("grandlab-rs-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    grandlab::pattern::save_schedule(model.base(), dir.join("base.sched"))?;
    save_model(&model, "base.sched", dir.join("rs.model"))?;
    let back = load_model(dir.join("rs.model"))?;
    assert_eq!(back.reshuffled(), model.reshuffled());
    println!("model round-trips through {}", dir.join("rs.model").display());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
