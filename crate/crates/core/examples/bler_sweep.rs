// A small BLER / average-query sweep driven by the same key=value config
// the command line uses. Raise `max_trials` for publishable numbers.
//
// ```bash
// cargo run --release --example bler_sweep
// ```

use grandlab::sim::{write_sweep_csv, SimConfig, Simulation};

const CONFIG: &str = "
code = bch127
decoders = orbgrand,cdf
snr_db = 5,6
truncation = 10000
max_trials = 200
min_block_errors = 1000
cdf_samples = 10000
seed = 3
";

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let mut sim = Simulation::new(SimConfig::parse(CONFIG)?)?;
    let records = sim.run_sweep()?;
    for r in &records {
        println!(
            "{:<9} {:>4} dB  bler {:.3e}  avg queries {:>7.1}  ({} trials, {:.2}s)",
            r.decoder, r.snr_db, r.bler, r.avg_queries, r.trials, r.wall_seconds
        );
    }
    let orb: Vec<_> = records.iter().filter(|r| r.decoder == "orbgrand").cloned().collect();
    write_sweep_csv(&orb, std::io::stdout())?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
