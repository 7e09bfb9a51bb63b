//! Grows trapping sets from the short cycles of B1 and checks the
//! zero-syndrome ones for the symmetric-stabilizer property.

use qldpc_tbf::code;
use qldpc_tbf::tanner::build_graph;
use qldpc_tbf::trapping::{census, classify, expand_children, DEFAULT_MAX_SIZE, MAX_SYMMETRIC_SIZE};

fn main() -> qldpc_tbf::Result<()> {
    let b1 = code::b1();
    let g = build_graph(&b1.hz);

    // one expansion step from a 6-cycle
    let root = classify(&g, &[0, 57, 58])?;
    let step = expand_children(&g, &root, DEFAULT_MAX_SIZE)?;
    let labels: Vec<String> = step.children.iter().map(|c| c.to_string()).collect();
    println!("{root} -> children {} (partner degree {:?})", labels.join(" "), step.partner_degree);

    let c = census(&g, &b1, DEFAULT_MAX_SIZE, MAX_SYMMETRIC_SIZE)?;
    for line in c.summary_lines() {
        println!("{line}");
    }
    let first = &c.symmetric_stabilizers[0];
    println!("first symmetric stabilizer {first}: {}", first.to_line());
    println!(
        "each variable lies in {:?} of them",
        c.stabilizer_membership.iter().min().zip(c.stabilizer_membership.iter().max())
    );
    Ok(())
}
