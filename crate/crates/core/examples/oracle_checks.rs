// Small-instance ground truth: exhaustive ML against untruncated SGRAND,
// and the genie-aided search cost against its posterior formula.
//
// ```bash
// cargo run --release --example oracle_checks
// ```

use grandlab::oracle::{genie_search_trials, q_formula_estimate, SearchPolicy};
use grandlab::pattern::{enumerate_schedule, WeightFunction};
use grandlab::verify::{ml_equivalence, run_suite};
use grandlab::codebook::{build_toy_code, ToyCode};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let code = build_toy_code(ToyCode::RandomLinear { n: 12, k: 6, seed: 9 })?;
    let r = ml_equivalence(&code, 0.8, 200, 1);
    println!("{}: {} ({})", r.name, if r.passed { "ok" } else { "FAILED" }, r.detail);

    let n = 8;
    let sigma = 0.9;
    let rank = enumerate_schedule(&WeightFunction::rank(n), n, 1 << n)?;
    for (name, policy) in [("rank", SearchPolicy::Schedule(&rank)), ("sgrand", SearchPolicy::Sgrand)] {
        let genie = genie_search_trials(policy, sigma, n, 4_000, 2)?;
        let formula = q_formula_estimate(policy, sigma, n, 4_000, 3)?;
        println!(
            "{name:<7} genie {:.2} ± {:.2}  formula {:.2} ± {:.2}",
            genie.mean, genie.std_err, formula.mean, formula.std_err
        );
    }

    for c in run_suite(true, 7) {
        println!("{:<26} {}", c.name, if c.passed { "ok" } else { "FAILED" });
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
