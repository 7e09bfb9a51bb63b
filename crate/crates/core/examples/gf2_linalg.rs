//! Rank, nullspace and rowspace membership over GF(2).

use qldpc_tbf::gf2::{in_rowspace, row_reduce, syndrome, BinaryMatrix, BitVec};

fn main() -> qldpc_tbf::Result<()> {
    // parity checks of the [7,4] Hamming code
    let h = BinaryMatrix::from_rows(&[
        [1u8, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ]);
    let basis = row_reduce(&h);
    println!("rank {}", basis.rank());
    let kernel = basis.nullspace();
    println!("{} codewords span the kernel:", kernel.len());
    for c in &kernel {
        println!("  {c}  syndrome {}", syndrome(&h, c)?);
    }
    let e = BitVec::from_support(7, &[4]);
    println!("error {e} has syndrome {}", syndrome(&h, &e)?);
    let row_sum = h.row(0).xor(&h.row(2));
    println!("row0 + row2 in rowspace: {}", in_rowspace(&basis, &row_sum)?);
    println!("single bit in rowspace: {}", in_rowspace(&basis, &e)?);
    Ok(())
}
