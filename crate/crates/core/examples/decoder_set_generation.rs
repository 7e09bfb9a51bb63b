//! Greedy decoder-set generation on one (49,49) structure of B1, with a
//! pattern budget so it finishes in seconds, then an exhaustive replay of
//! the chosen set.

use qldpc_tbf::code;
use qldpc_tbf::setgen::{all_candidates, classify_supports, generate_set, replay, GenSetConfig};

fn main() -> qldpc_tbf::Result<()> {
    let b1 = code::b1();
    // the (49,49) structures are the seven-block orbits inside V2
    let support: Vec<usize> = (0..7).flat_map(|blk| (0..7).map(move |i| 441 + 63 * blk + 9 * i)).collect();
    let supports = classify_supports(&b1, &[support]);
    println!("reduction: {:?}", supports[0].reduction);
    let report = generate_set(
        &b1,
        &supports,
        GenSetConfig {
            target: 3,
            max_iters: 50,
            budget: Some(400),
        },
        &all_candidates(),
    )?;
    for st in &report.trace.steps {
        println!("weight {}: {} -> {} failures, chose {:?}", st.weight, st.failures_before, st.failures_after, st.chosen.map(|f| f.to_string()));
    }
    let chosen: Vec<String> = report.trace.chosen.iter().map(|f| f.to_string()).collect();
    println!("chosen {chosen:?}, achieved weight {} (budget limited: {})", report.achieved, report.budget_limited);
    for (j, n, fails) in replay(&b1, &supports, &report.specs(), report.achieved, 50, None)? {
        println!("replay weight {j}: {fails} failures out of {n}");
    }
    Ok(())
}
