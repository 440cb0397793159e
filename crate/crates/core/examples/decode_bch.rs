// Decoding a single noisy BCH(127,113) word with each decoder and counting
// the codebook queries it takes.
//
// ```bash
// cargo run --release --example decode_bch
// ```

use std::sync::Arc;

use grandlab::channel::{modulate_bpsk, transmit, ChannelParams, SnrConvention};
use grandlab::codebook::{build_bch_127_113, BinaryCode};
use grandlab::grand::{GrandDecoder, OrderingPolicy, QueryCounter};
use grandlab::pattern::{enumerate_schedule, WeightFunction};
use grandlab::rng::stream;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let code = build_bch_127_113();
    let params = ChannelParams::new(4.0, code.rate(), SnrConvention::EbN0)?;
    let rank = Arc::new(enumerate_schedule(&WeightFunction::rank(127), 127, 10_000)?);
    let policies = [
        ("ORBGRAND", OrderingPolicy::static_schedule(rank, 10_000)?),
        ("SGRAND", OrderingPolicy::sgrand(10_000)?),
    ];
    let decoder = GrandDecoder::new(&code);

    let mut counters = vec![QueryCounter::default(); policies.len()];
    let mut errors = vec![0usize; policies.len()];
    for trial in 0..20 {
        let mut rng = stream(11, "decode-example", trial);
        let c = code.random_codeword(&mut rng);
        let y = transmit(&modulate_bpsk(&c), &params, &mut rng);
        for (i, (_, policy)) in policies.iter().enumerate() {
            let r = decoder.decode_observed(&y, params.sigma, policy, &mut counters[i])?;
            if r.codeword.as_ref() != Some(&c) {
                errors[i] += 1;
            }
        }
    }
    for (i, (name, _)) in policies.iter().enumerate() {
        let c = &counters[i];
        println!(
            "{name:<9} decodes {:>3}  mean queries {:>8.1}  abandoned {}  wrong {}",
            c.decodes,
            c.queries as f64 / c.decodes as f64,
            c.abandoned,
            errors[i]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
