//! Syndrome-based majority bit flipping.

use std::sync::Arc;

use super::{CompactGraph, DecodeResult};
use crate::error::Result;
use crate::gf2::{BinaryMatrix, BitVec};

/// Flips, in parallel, every variable that sees more unsatisfied than
/// satisfied checks on the residual syndrome.
#[derive(Clone, Debug)]
pub struct BitFlipDecoder {
    graph: Arc<CompactGraph>,
    name: String,
}

impl BitFlipDecoder {
    pub fn new(graph: Arc<CompactGraph>, name: impl Into<String>) -> Self {
        Self {
            graph,
            name: name.into(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decode(&self, s: &BitVec, max_iters: usize) -> Result<DecodeResult> {
        self.decode_traced(s, max_iters, |_| {})
    }

    /// Calls `observe` with the hard decisions after every iteration.
    pub fn decode_traced<F: FnMut(&[u8])>(&self, s: &BitVec, max_iters: usize, mut observe: F) -> Result<DecodeResult> {
        let g = &*self.graph;
        g.check_syndrome(s)?;
        let mut e = vec![0u8; g.n];
        let mut r = s.to_bits();
        let mut unsat = r.iter().filter(|&&b| b != 0).count();
        let mut flips = Vec::new();
        let mut iterations = 0;
        while unsat > 0 && iterations < max_iters {
            iterations += 1;
            flips.clear();
            for v in 0..g.n {
                let checks = g.checks_of(v);
                let chi1: usize = checks.iter().map(|&c| r[c as usize] as usize).sum();
                if 2 * chi1 > checks.len() {
                    flips.push(v);
                }
            }
            for &v in &flips {
                e[v] ^= 1;
                for &c in g.checks_of(v) {
                    let c = c as usize;
                    r[c] ^= 1;
                    if r[c] == 1 {
                        unsat += 1;
                    } else {
                        unsat -= 1;
                    }
                }
            }
            observe(&e);
        }
        Ok(DecodeResult {
            estimate: BitVec::from_bits(&e),
            converged: unsat == 0,
            iterations,
        })
    }
}

/// One-shot bit flipping on `h`.
pub fn bf_decode(h: &BinaryMatrix, s: &BitVec, max_iters: usize) -> Result<DecodeResult> {
    BitFlipDecoder::new(CompactGraph::shared(h), "BF").decode(s, max_iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::syndrome;

    fn repetition(n: usize) -> BinaryMatrix {
        let mut h = BinaryMatrix::zeros(n - 1, n);
        for i in 0..n - 1 {
            h.set(i, i, true);
            h.set(i, i + 1, true);
        }
        h
    }

    #[test]
    fn zero_syndrome() {
        let h = repetition(5);
        let out = bf_decode(&h, &BitVec::zeros(4), 50).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert!(out.estimate.is_zero());
    }

    #[test]
    fn corrects_interior_error_on_repetition() {
        let h = repetition(5);
        let e = BitVec::from_support(5, &[2]);
        let out = bf_decode(&h, &syndrome(&h, &e).unwrap(), 10).unwrap();
        assert!(out.converged);
        assert_eq!(out.estimate, e);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn stall_reports_full_budget() {
        // every variable sees one unsatisfied and one satisfied check
        let h = BinaryMatrix::from_rows(&[[1u8, 1, 0], [0, 1, 1], [1, 0, 1]]);
        let s = BitVec::from_bits(&[1, 0, 0]);
        let out = bf_decode(&h, &s, 7).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 7);
    }

    #[test]
    fn wrong_syndrome_length() {
        assert!(bf_decode(&repetition(4), &BitVec::zeros(5), 3).is_err());
    }
}
