//! Dense bit-packed linear algebra over GF(2).
//!
//! Rows are stored as runs of `u64` words so that row operations reduce to
//! word-wise XOR. The largest matrices handled here are a few hundred rows by
//! about a thousand columns, which keeps everything comfortably in cache.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A fixed-length binary vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// Builds a vector from `0`/`1` bytes; any nonzero byte counts as one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` with ones at `support`.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the bitwise AND with `other`.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Indices of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Parses a string of `0`/`1` characters (whitespace ignored).
    pub fn parse(text: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for ch in text.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("unexpected character `{other}` in binary vector"),
                    })
                }
            }
        }
        Ok(Self::from_bits(&bits))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// Dense row-major binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested `0`/`1` rows.
    ///
    /// # Panics
    ///
    /// Panics if the rows have different lengths.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from row vectors of equal length.
    pub fn from_bitvecs(rows: &[BitVec], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            m.row_words_mut(i).copy_from_slice(row.words());
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.stride + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / WORD_BITS] ^= 1u64 << (c % WORD_BITS);
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    /// Column indices of the ones in row `r`.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        BitVec {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
        .support()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|r| self.row_words(r).iter().map(|w| w.count_ones() as usize).sum())
            .collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                w[c] += 1;
            }
        }
        w
    }

    /// Iterates over `(row, col)` coordinates of the ones, row-major.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let row = self.row(r);
            row.support().into_iter().map(move |c| (r, c))
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c) in self.nonzeros() {
            t.set(c, r, true);
        }
        t
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                context: "hstack rows",
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for (r, c) in self.nonzeros() {
            m.set(r, c, true);
        }
        for (r, c) in other.nonzeros() {
            m.set(r, self.cols + c, true);
        }
        Ok(m)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for (r1, c1) in self.nonzeros() {
            for (r2, c2) in other.nonzeros() {
                m.set(r1 * other.rows + r2, c1 * other.cols + c2, true);
            }
        }
        m
    }

    /// Writes `block` with its top-left corner at `(row0, col0)`, XOR-ing into
    /// whatever is already there.
    pub fn xor_block(&mut self, row0: usize, col0: usize, block: &Self) {
        for (r, c) in block.nonzeros() {
            self.toggle(row0 + r, col0 + c);
        }
    }

    /// Row-space rank.
    pub fn rank(&self) -> usize {
        row_reduce(self).rank()
    }

    /// Reads the dense text format: one row per line of `0`/`1` characters.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn read_dense<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut row = Vec::with_capacity(line.len());
            for ch in line.chars().filter(|c| !c.is_whitespace()) {
                match ch {
                    '0' => row.push(0),
                    '1' => row.push(1),
                    other => {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: format!("unexpected character `{other}`"),
                        })
                    }
                }
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("row has {} entries, expected {}", row.len(), first.len()),
                    });
                }
            }
            rows.push(row);
        }
        Ok(Self::from_rows(&rows))
    }

    pub fn write_dense<W: Write>(&self, mut out: W) -> Result<()> {
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Reads the sparse coordinate format: a header `rows cols nnz` followed by
    /// `nnz` lines of 1-indexed `r c` pairs. Lines starting with `%` or `#`
    /// are comments.
    pub fn read_coordinate<R: BufRead>(reader: R) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut m = Self::zeros(0, 0);
        let mut seen = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|e| Error::Parse {
                        line: idx + 1,
                        message: format!("bad integer `{t}`: {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            match header {
                None => {
                    let [rows, cols, nnz] = nums[..] else {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: "header must be `rows cols nnz`".into(),
                        });
                    };
                    header = Some((rows, cols, nnz));
                    m = Self::zeros(rows, cols);
                }
                Some((rows, cols, _)) => {
                    let [r, c] = nums[..] else {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: "entry must be `r c`".into(),
                        });
                    };
                    if r == 0 || c == 0 || r > rows || c > cols {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: format!("coordinate ({r}, {c}) outside {rows}x{cols}"),
                        });
                    }
                    m.set(r - 1, c - 1, true);
                    seen += 1;
                }
            }
        }
        match header {
            None => Err(Error::Parse {
                line: 0,
                message: "missing header".into(),
            }),
            Some((_, _, nnz)) if nnz != seen => Err(Error::Parse {
                line: 0,
                message: format!("header declares {nnz} entries, found {seen}"),
            }),
            Some(_) => Ok(m),
        }
    }

    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.rows, self.cols, self.count_ones())?;
        for (r, c) in self.nonzeros() {
            writeln!(out, "{} {}", r + 1, c + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 32 && self.cols <= 64 {
            for r in 0..self.rows {
                writeln!(f, "  {}", self.row(r))?;
            }
        }
        Ok(())
    }
}

/// Matrix product over GF(2).
pub fn gf2_matmul(a: &BinaryMatrix, b: &BinaryMatrix) -> Result<BinaryMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            context: "matmul inner dimension",
            expected: a.cols,
            found: b.rows,
        });
    }
    let mut out = BinaryMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in a.row(i).iter_ones() {
            let (src_start, stride) = (k * b.stride, b.stride);
            let dst_start = i * out.stride;
            for w in 0..stride {
                out.data[dst_start + w] ^= b.data[src_start + w];
            }
        }
    }
    Ok(out)
}

/// Syndrome `s = e·Hᵀ`.
pub fn syndrome(h: &BinaryMatrix, e: &BitVec) -> Result<BitVec> {
    if e.len() != h.cols {
        return Err(Error::DimensionMismatch {
            context: "syndrome error length",
            expected: h.cols,
            found: e.len(),
        });
    }
    let mut s = BitVec::zeros(h.rows);
    for r in 0..h.rows {
        let ones: u32 = h
            .row_words(r)
            .iter()
            .zip(e.words())
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        if ones & 1 == 1 {
            s.set(r, true);
        }
    }
    Ok(s)
}

/// Reduced row-echelon basis of a row space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowBasis {
    cols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn echelon_rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivots
    }

    /// Residue of `v` after eliminating against every pivot.
    fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    /// Basis of the null space `{x : M xᵀ = 0}` of the reduced matrix.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            out.push(v);
        }
        out
    }
}

/// Gauss-Jordan elimination to reduced row-echelon form.
pub fn row_reduce(m: &BinaryMatrix) -> RowBasis {
    let mut rows: Vec<BitVec> = (0..m.rows).map(|r| m.row(r)).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, pr);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    RowBasis {
        cols: m.cols,
        rows,
        pivots,
    }
}

/// Whether `v` is a GF(2) combination of the basis rows.
pub fn in_rowspace(basis: &RowBasis, v: &BitVec) -> Result<bool> {
    if v.len() != basis.cols {
        return Err(Error::DimensionMismatch {
            context: "rowspace query length",
            expected: basis.cols,
            found: v.len(),
        });
    }
    Ok(basis.reduce(v).is_zero())
}
