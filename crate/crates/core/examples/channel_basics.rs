// BPSK over AWGN: noise level from SNR, LLRs, hard decisions, and the
// reliability ranking every ORB-type decoder works from.
//
// ```bash
// cargo run --example channel_basics
// ```

use grandlab::channel::{flip_probability, modulate_bpsk, transmit, ChannelParams, SnrConvention, SoftObservation};
use grandlab::rng::stream;
use grandlab::BitWord;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let rate = 113.0 / 127.0;
    for convention in [SnrConvention::EbN0, SnrConvention::PerSymbol] {
        let p = ChannelParams::new(5.0, rate, convention)?;
        println!("5 dB ({}) -> sigma = {:.4}", convention.label(), p.sigma);
    }

    let params = ChannelParams::new(4.0, rate, SnrConvention::EbN0)?;
    let word = BitWord::parse("0110100110")?;
    let mut rng = stream(7, "channel-example", 0);
    let y = transmit(&modulate_bpsk(&word), &params, &mut rng);
    let obs = SoftObservation::new(y, params.sigma)?;

    println!("sent   {word}");
    println!("hard   {}", obs.hard_decision());
    println!("{:>3} {:>8} {:>8} {:>5} {:>8}", "pos", "y", "llr", "rank", "p(flip)");
    for i in 0..word.len() {
        println!(
            "{:>3} {:>8.3} {:>8.3} {:>5} {:>8.4}",
            i,
            obs.y[i],
            obs.llr[i],
            obs.rank_of(i),
            flip_probability(obs.llr[i].abs())?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
