//! Runs the builtin ensembles on one error and reports the winning member.

use std::sync::Arc;

use qldpc_tbf::code;
use qldpc_tbf::collective::{builtin_ensemble, Classifier, PreparedEnsemble, BUILTIN_ENSEMBLES};
use qldpc_tbf::gf2::{syndrome, BitVec};

fn main() -> qldpc_tbf::Result<()> {
    let b1 = code::b1();
    let classifier = Classifier::new(Arc::new(b1.clone()));
    // an H_X row: a weight-6 symmetric stabilizer, minus one variable
    let row = b1.hx.row_support(0);
    let e = BitVec::from_support(b1.n, &row[..3]);
    let s = syndrome(&b1.hz, &e)?;
    for name in BUILTIN_ENSEMBLES {
        let ens = builtin_ensemble(name)?;
        let prepared = PreparedEnsemble::new(&ens, &b1, 0.01)?;
        let out = prepared.decode(&e, &s, 50, &classifier)?;
        let winner = out.winner.map(|i| ens.members[i].name.as_str()).unwrap_or("-");
        println!("{name:>6} ({:>2} members): {:?} by {winner} in {} iterations", ens.len(), out.verdict, out.iterations);
    }
    Ok(())
}
