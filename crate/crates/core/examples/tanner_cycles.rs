//! Girth and short-cycle statistics of B1's Tanner graph.

use qldpc_tbf::code;
use qldpc_tbf::tanner::{build_graph, cycles_per_variable, enumerate_cycles, girth};

fn main() {
    let b1 = code::b1();
    let g = build_graph(&b1.hz);
    println!("girth {:?}", girth(&g));
    let boundary = b1.circulant_boundary;
    for len in [6, 8] {
        let cycles = enumerate_cycles(&g, len);
        let mixed = cycles
            .iter()
            .filter(|c| {
                let v = c.variables();
                v.iter().any(|&x| x < boundary) && v.iter().any(|&x| x >= boundary)
            })
            .count();
        let per_var = cycles_per_variable(&g, &cycles);
        println!(
            "{len}-cycles: {} ({} span both blocks), per variable min {} max {}",
            cycles.len(),
            mixed,
            per_var.iter().min().unwrap(),
            per_var.iter().max().unwrap()
        );
    }
    let first = &enumerate_cycles(&g, 6)[0];
    println!("first 6-cycle: {}", first.to_line());
}
