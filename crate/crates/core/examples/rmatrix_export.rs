// Pairwise ordering violations between the first k patterns of a schedule.
// Entry (j, i) compares how often pattern j beats pattern i in posterior
// against the reverse; after reshuffling the lower triangle should fade.
//
// ```bash
// cargo run --release --example rmatrix_export
// ```

use grandlab::channel::{sigma_from_snr, SnrConvention};
use grandlab::pattern::{enumerate_schedule, WeightFunction};
use grandlab::reshuffle::{export_rmatrix, rmatrix_from_sampler, train, PosteriorSampler, RFormat};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let n = 127;
    let k = 60;
    let sigma = sigma_from_snr(5.0, 113.0 / 127.0, SnrConvention::EbN0)?;
    let base = enumerate_schedule(&WeightFunction::rank(n), n, 2_000)?;
    let model = train(base, sigma, 1_000, 5)?;

    let heldout = PosteriorSampler::new(n, sigma, 6)?;
    let before = rmatrix_from_sampler(&model.base().patterns()[..k], &heldout, 500)?;
    let after = rmatrix_from_sampler(&model.reshuffled().patterns()[..k], &heldout, 500)?;
    println!("max lower-triangle entry: base {:.3}  reshuffled {:.3}",
        before.max_lower_normalized(), after.max_lower_normalized());

    let dir = std::env::temp_dir().join(format!("grandlab-rmat-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    for (name, m) in [("base", &before), ("rs", &after)] {
        export_rmatrix(m, dir.join(format!("{name}.csv")), RFormat::Csv)?;
        export_rmatrix(m, dir.join(format!("{name}.pgm")), RFormat::Pgm)?;
    }
    println!("wrote {k}x{k} heatmaps to {}", dir.display());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
