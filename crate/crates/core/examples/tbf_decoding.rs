//! Single decoders on small error patterns: bit flipping stalls where the
//! two-bit decoders make progress.

use qldpc_tbf::code;
use qldpc_tbf::decoders::{bf_decode, registry, tbf_decode};
use qldpc_tbf::gf2::{syndrome, BitVec};

fn main() -> qldpc_tbf::Result<()> {
    let b1 = code::b1();
    let patterns: [&[usize]; 3] = [&[5, 300], &[0, 57, 58], &[441, 500, 700]];
    for support in patterns {
        let e = BitVec::from_support(b1.n, support);
        let s = syndrome(&b1.hz, &e)?;
        let bf = bf_decode(&b1.hz, &s, 50)?;
        print!("error {support:?}: BF converged={} after {}", bf.converged, bf.iterations);
        for name in ["D1", "D2", "D9"] {
            let spec = registry(name)?;
            let r = tbf_decode(&b1.hz, &s, 50, &spec, b1.circulant_boundary)?;
            let exact = r.estimate == e;
            print!(" | {name} converged={} exact={exact} iters={}", r.converged, r.iterations);
        }
        println!();
    }
    Ok(())
}
