//! Builds B1 and the 288-qubit bivariate bicycle code and prints their
//! parameters.

use std::path::Path;

use qldpc_tbf::code::{self, validate_css};

fn main() -> qldpc_tbf::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    for c in [code::b1(), code::load_code_spec(&data.join("bb_288.toml"))?] {
        let report = validate_css(&c);
        let k = c.n - c.hx.rank() - c.hz.rank();
        println!("{}: n = {}, k = {k}, {} Z checks", c.name, c.n, c.hz.rows());
        println!("{report}");
        println!();
    }
    Ok(())
}
