// The codes used in the experiments: BCH(127,113) over GF(2^7), the
// CRC-aided polar(128,114) code, and toy codes small enough for
// brute-force checks.
//
// ```bash
// cargo run --example codes
// ```

use grandlab::codebook::{
    build_bch_127_113, build_toy_code, load_code, save_code, AnyCode, BinaryCode, PolarCrcCode, ToyCode,
};
use grandlab::rng::stream;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let bch = build_bch_127_113();
    let polar = PolarCrcCode::standard_128_114(6.0);
    let hamming = build_toy_code(ToyCode::Hamming74)?;
    let random = build_toy_code(ToyCode::RandomLinear { n: 12, k: 6, seed: 1 })?;

    let codes: [&dyn BinaryCode; 4] = [&bch, &polar, &hamming, &random];
    let mut rng = stream(3, "codes-example", 0);
    for code in codes {
        let c = code.random_codeword(&mut rng);
        let mut corrupted = c;
        corrupted.flip(0);
        println!(
            "{:<22} n={:<3} k={:<3} syndrome bits={:<2} codeword ok={} one flip ok={}",
            code.name(),
            code.n(),
            code.k(),
            code.syndrome_len(),
            code.contains(&c)?,
            code.contains(&corrupted)?
        );
    }
    println!("polar frozen positions: {:?}", polar.frozen_positions());

    let dir = std::env::temp_dir().join(format!("grandlab-codes-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("bch127.code");
    save_code(&AnyCode::Linear(bch.clone()), &path)?;
    let back = load_code(&path)?;
    println!("reloaded {} from {}", back.name(), path.display());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
