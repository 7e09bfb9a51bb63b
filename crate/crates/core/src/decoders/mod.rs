//! Syndrome decoders for X errors measured by `H_Z`.
//!
//! [`bf`] is plain majority bit flipping, [`tbf`] the two-bit family driven
//! by a Ψ table and an f-vector per variable region, and [`nms`] a
//! normalized min-sum baseline. Named instances live in [`spec`].

pub mod bf;
pub mod nms;
pub mod spec;
pub mod states;
pub mod tbf;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitVec};

pub use bf::{bf_decode, BitFlipDecoder};
pub use nms::{nms_decode, MinSumDecoder};
pub use spec::{registry, DecoderKind, DecoderSpec, Region, RegionRange};
pub use states::{init_checks, phi, var_update, CheckState, CheckTuple, FVector, Flag, PsiTable, VarState};
pub use tbf::{tbf_decode, TbfDecoder};

/// Output of one decoder run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub estimate: BitVec,
    /// Residual syndrome reached zero.
    pub converged: bool,
    pub iterations: usize,
}

/// Flat adjacency of a parity-check matrix, shared by prepared decoders.
#[derive(Clone, Debug)]
pub struct CompactGraph {
    n: usize,
    m: usize,
    var_offsets: Vec<u32>,
    var_checks: Vec<u32>,
    check_offsets: Vec<u32>,
    check_vars: Vec<u32>,
}

impl CompactGraph {
    pub fn new(h: &BinaryMatrix) -> Self {
        let (m, n) = (h.rows(), h.cols());
        let mut var_lists = vec![Vec::new(); n];
        let mut check_offsets = Vec::with_capacity(m + 1);
        let mut check_vars = Vec::new();
        check_offsets.push(0);
        for c in 0..m {
            for v in h.row_support(c) {
                var_lists[v].push(c as u32);
                check_vars.push(v as u32);
            }
            check_offsets.push(check_vars.len() as u32);
        }
        let mut var_offsets = Vec::with_capacity(n + 1);
        let mut var_checks = Vec::new();
        var_offsets.push(0);
        for list in var_lists {
            var_checks.extend(list);
            var_offsets.push(var_checks.len() as u32);
        }
        Self {
            n,
            m,
            var_offsets,
            var_checks,
            check_offsets,
            check_vars,
        }
    }

    pub fn shared(h: &BinaryMatrix) -> Arc<Self> {
        Arc::new(Self::new(h))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn checks_of(&self, v: usize) -> &[u32] {
        &self.var_checks[self.var_offsets[v] as usize..self.var_offsets[v + 1] as usize]
    }

    #[inline]
    pub fn vars_of(&self, c: usize) -> &[u32] {
        &self.check_vars[self.check_offsets[c] as usize..self.check_offsets[c + 1] as usize]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        (self.var_offsets[v + 1] - self.var_offsets[v]) as usize
    }

    pub fn max_var_degree(&self) -> usize {
        (0..self.n).map(|v| self.var_degree(v)).max().unwrap_or(0)
    }

    fn check_syndrome(&self, s: &BitVec) -> Result<()> {
        if s.len() != self.m {
            return Err(Error::DimensionMismatch {
                context: "syndrome length",
                expected: self.m,
                found: s.len(),
            });
        }
        Ok(())
    }
}

/// A decoder bound to one parity-check matrix.
#[derive(Clone, Debug)]
pub enum Decoder {
    Tbf(TbfDecoder),
    BitFlip(BitFlipDecoder),
    MinSum(MinSumDecoder),
}

impl Decoder {
    /// `boundary` splits the variables into the two circulant blocks;
    /// `p` is the channel crossover probability (used by min-sum only).
    pub fn prepare(spec: &DecoderSpec, graph: &Arc<CompactGraph>, boundary: usize, p: f64) -> Result<Self> {
        Ok(match &spec.kind {
            DecoderKind::BitFlip => Self::BitFlip(BitFlipDecoder::new(graph.clone(), spec.name.clone())),
            DecoderKind::MinSum { factor } => {
                Self::MinSum(MinSumDecoder::new(graph.clone(), *factor, p, spec.name.clone())?)
            }
            DecoderKind::Tbf(regions) => Self::Tbf(TbfDecoder::new(graph.clone(), spec, regions, boundary)?),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Tbf(d) => d.name(),
            Self::BitFlip(d) => d.name(),
            Self::MinSum(d) => d.name(),
        }
    }

    pub fn decode(&self, s: &BitVec, max_iters: usize) -> Result<DecodeResult> {
        match self {
            Self::Tbf(d) => d.decode(s, max_iters),
            Self::BitFlip(d) => d.decode(s, max_iters),
            Self::MinSum(d) => d.decode(s, max_iters),
        }
    }
}

fn estimate_from_msb(states: &[u8]) -> BitVec {
    let mut e = BitVec::zeros(states.len());
    for (v, &w) in states.iter().enumerate() {
        if w & 0b10 != 0 {
            e.set(v, true);
        }
    }
    e
}
