//! Normalized min-sum on the syndrome, flooding schedule.
//!
//! Messages are fixed point in eighths of a nat, saturating at ±31. The
//! channel value is `ln((1-p)/p)` quantized the same way. A zero message
//! counts as positive and a zero posterior decides 0.

use std::sync::Arc;

use super::{CompactGraph, DecodeResult};
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitVec};

const SATURATION: i32 = 31;
const SCALE: f64 = 8.0;

#[derive(Clone, Debug)]
pub struct MinSumDecoder {
    graph: Arc<CompactGraph>,
    name: String,
    channel: i32,
    /// `round(factor * magnitude)` for magnitudes 0..=31.
    scaled: [i32; SATURATION as usize + 1],
    /// Edge ids (check-major order) per variable.
    var_edge_offsets: Vec<u32>,
    var_edges: Vec<u32>,
}

/// Quantized channel log-likelihood ratio for crossover probability `p`.
pub fn channel_llr(p: f64) -> i32 {
    let llr = ((1.0 - p) / p).ln() * SCALE;
    if llr.is_nan() {
        0
    } else {
        (llr.round() as i64).clamp(-(SATURATION as i64), SATURATION as i64) as i32
    }
}

impl MinSumDecoder {
    pub fn new(graph: Arc<CompactGraph>, factor: f64, p: f64, name: impl Into<String>) -> Result<Self> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::InvalidSpec(format!("min-sum factor {factor} outside (0, 1]")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidSpec(format!("crossover probability {p} outside [0, 1]")));
        }
        let mut scaled = [0i32; SATURATION as usize + 1];
        for (mag, slot) in scaled.iter_mut().enumerate() {
            *slot = (factor * mag as f64).round() as i32;
        }
        let mut lists = vec![Vec::new(); graph.n()];
        let mut edge = 0u32;
        for c in 0..graph.m() {
            for &v in graph.vars_of(c) {
                lists[v as usize].push(edge);
                edge += 1;
            }
        }
        let mut var_edge_offsets = vec![0u32];
        let mut var_edges = Vec::with_capacity(edge as usize);
        for list in lists {
            var_edges.extend(list);
            var_edge_offsets.push(var_edges.len() as u32);
        }
        Ok(Self {
            graph,
            name: name.into(),
            channel: channel_llr(p),
            scaled,
            var_edge_offsets,
            var_edges,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decode(&self, s: &BitVec, max_iters: usize) -> Result<DecodeResult> {
        let g = &*self.graph;
        g.check_syndrome(s)?;
        let s_bits = s.to_bits();
        let edges = self.var_edges.len();
        let mut q = vec![self.channel; edges];
        let mut r = vec![0i32; edges];
        let mut hard = vec![0u8; g.n()];
        let mut iterations = 0;
        let mut converged = s.is_zero();
        while !converged && iterations < max_iters {
            iterations += 1;
            let mut e0 = 0usize;
            for (c, &sc) in s_bits.iter().enumerate() {
                let deg = g.vars_of(c).len();
                let msgs = &q[e0..e0 + deg];
                let mut negative = sc != 0;
                let (mut min1, mut min2, mut arg) = (i32::MAX, i32::MAX, 0);
                for (i, &m) in msgs.iter().enumerate() {
                    negative ^= m < 0;
                    let a = m.abs();
                    if a < min1 {
                        min2 = min1;
                        min1 = a;
                        arg = i;
                    } else if a < min2 {
                        min2 = a;
                    }
                }
                for i in 0..deg {
                    let mag = if i == arg { min2 } else { min1 };
                    let mag = self.scaled[mag.min(SATURATION) as usize];
                    let neg = negative ^ (msgs[i] < 0);
                    r[e0 + i] = if neg { -mag } else { mag };
                }
                e0 += deg;
            }
            for (v, hv) in hard.iter_mut().enumerate() {
                let ids = &self.var_edges[self.var_edge_offsets[v] as usize..self.var_edge_offsets[v + 1] as usize];
                let total: i32 = self.channel + ids.iter().map(|&e| r[e as usize]).sum::<i32>();
                *hv = (total < 0) as u8;
                for &e in ids {
                    q[e as usize] = (total - r[e as usize]).clamp(-SATURATION, SATURATION);
                }
            }
            converged = (0..g.m()).all(|c| {
                let parity = g.vars_of(c).iter().fold(0u8, |acc, &v| acc ^ hard[v as usize]);
                parity == s_bits[c]
            });
        }
        Ok(DecodeResult {
            estimate: BitVec::from_bits(&hard),
            converged,
            iterations,
        })
    }
}

/// One-shot normalized min-sum with channel prior `p`.
pub fn nms_decode(h: &BinaryMatrix, s: &BitVec, max_iters: usize, factor: f64, p: f64) -> Result<DecodeResult> {
    MinSumDecoder::new(CompactGraph::shared(h), factor, p, "NMS")?.decode(s, max_iters)
}
