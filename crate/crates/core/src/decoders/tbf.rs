//! Two-bit bit flipping with a flooding schedule.

use std::ops::Range;
use std::sync::Arc;

use super::spec::{DecoderSpec, Region};
use super::states::{var_update_unchecked, CheckTuple, Flag, VarState};
use super::{estimate_from_msb, CompactGraph, DecodeResult};
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitVec};

// A neighbourhood is summarised as Σ code(check) with these per-state codes,
// so zero_old = idx / 16, zero_new = (idx / 4) % 4, one_old = idx % 4.
const CODE_ZERO_OLD: u8 = 16;
const CODE_ZERO_NEW: u8 = 4;
const CODE_ONE_OLD: u8 = 1;
const CODE_ONE_NEW: u8 = 0;

/// Check code after Φ, indexed by `2 * r_prev + r_cur`.
const PHI_CODE: [u8; 4] = [CODE_ZERO_OLD, CODE_ONE_NEW, CODE_ZERO_NEW, CODE_ONE_OLD];

const TABLE_LEN: usize = 4 * 4 * 64;

#[derive(Clone, Debug)]
struct PreparedRegion {
    vars: Range<usize>,
    init: u8,
    /// Next state indexed by `degree * 256 + state * 64 + code`.
    next: Box<[u8; TABLE_LEN]>,
}

#[derive(Clone, Debug)]
pub struct TbfDecoder {
    graph: Arc<CompactGraph>,
    name: String,
    regions: Vec<PreparedRegion>,
    init_checks_new: bool,
}

impl TbfDecoder {
    pub fn new(graph: Arc<CompactGraph>, spec: &DecoderSpec, regions: &[Region], boundary: usize) -> Result<Self> {
        let n = graph.n();
        for v in 0..n {
            let degree = graph.var_degree(v);
            if degree > 3 {
                return Err(Error::DegreeTooLarge { var: v, degree });
            }
        }
        let first = regions
            .first()
            .ok_or_else(|| Error::InvalidSpec(format!("{}: no regions", spec.name)))?;
        let init_checks_new = first.f.get(Flag::InitNewChecks);
        if regions.iter().any(|r| r.f.get(Flag::InitNewChecks) != init_checks_new) {
            return Err(Error::InvalidSpec(format!(
                "{}: regions disagree on the check initialisation flag",
                spec.name
            )));
        }

        let mut prepared: Vec<PreparedRegion> = regions
            .iter()
            .map(|r| PreparedRegion {
                vars: r.range.resolve(n, boundary),
                init: if r.f.get(Flag::InitWeakVars) {
                    VarState::WEAK_ZERO.bits()
                } else {
                    VarState::STRONG_ZERO.bits()
                },
                next: build_table(r),
            })
            .filter(|r| !r.vars.is_empty())
            .collect();
        prepared.sort_by_key(|r| r.vars.start);
        let mut covered = 0;
        for r in &prepared {
            if r.vars.start != covered || r.vars.end > n {
                return Err(Error::InvalidSpec(format!(
                    "{}: regions must cover 0..{n} without overlap (gap or overlap at {covered})",
                    spec.name
                )));
            }
            covered = r.vars.end;
        }
        if covered != n {
            return Err(Error::InvalidSpec(format!("{}: regions stop at {covered} of {n}", spec.name)));
        }
        Ok(Self {
            graph,
            name: spec.name.clone(),
            regions: prepared,
            init_checks_new,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decode(&self, s: &BitVec, max_iters: usize) -> Result<DecodeResult> {
        self.run(s, max_iters, |_| {})
    }

    /// Calls `observe` with the hard decisions after every iteration.
    pub fn decode_traced<F: FnMut(&[u8])>(&self, s: &BitVec, max_iters: usize, mut observe: F) -> Result<DecodeResult> {
        let mut hard = Vec::new();
        self.run(s, max_iters, |w| {
            hard.clear();
            hard.extend(w.iter().map(|x| x >> 1));
            observe(&hard);
        })
    }

    fn run<F: FnMut(&[u8])>(&self, s: &BitVec, max_iters: usize, mut observe: F) -> Result<DecodeResult> {
        let g = &*self.graph;
        g.check_syndrome(s)?;
        let mut w = vec![0u8; g.n];
        for r in &self.regions {
            w[r.vars.clone()].fill(r.init);
        }
        let mut next = w.clone();
        let mut r = s.to_bits();
        let mut z: Vec<u8> = r
            .iter()
            .map(|&b| match (b != 0, self.init_checks_new) {
                (false, false) => CODE_ZERO_OLD,
                (false, true) => CODE_ZERO_NEW,
                (true, false) => CODE_ONE_OLD,
                (true, true) => CODE_ONE_NEW,
            })
            .collect();
        let mut r_prev = r.clone();
        let mut unsat = r.iter().filter(|&&b| b != 0).count();
        let mut iterations = 0;
        while unsat > 0 && iterations < max_iters {
            iterations += 1;
            for region in &self.regions {
                let table = &region.next;
                for v in region.vars.clone() {
                    let checks = g.checks_of(v);
                    let code: usize = checks.iter().map(|&c| z[c as usize] as usize).sum();
                    next[v] = table[checks.len() * 256 + (w[v] as usize) * 64 + code];
                }
            }
            r_prev.copy_from_slice(&r);
            for v in 0..g.n {
                if (next[v] ^ w[v]) & 0b10 != 0 {
                    for &c in g.checks_of(v) {
                        r[c as usize] ^= 1;
                    }
                }
            }
            std::mem::swap(&mut w, &mut next);
            unsat = 0;
            for c in 0..g.m {
                z[c] = PHI_CODE[(2 * r_prev[c] + r[c]) as usize];
                unsat += r[c] as usize;
            }
            observe(&w);
        }
        Ok(DecodeResult {
            estimate: estimate_from_msb(&w),
            converged: unsat == 0,
            iterations,
        })
    }
}

fn build_table(region: &Region) -> Box<[u8; TABLE_LEN]> {
    let mut table = Box::new([0u8; TABLE_LEN]);
    for degree in 0..4u8 {
        for w in 0..4u8 {
            for code in 0..64u8 {
                let t = CheckTuple::new(code / 16, (code / 4) % 4, code % 4);
                let slot = &mut table[degree as usize * 256 + w as usize * 64 + code as usize];
                if code / 16 > 3 || t.sum() > degree {
                    *slot = w;
                    continue;
                }
                let unsatisfied = t.one_old + (degree - t.sum());
                *slot = var_update_unchecked(VarState::new(w), t, unsatisfied, region.f, &region.psi).bits();
            }
        }
    }
    table
}

/// One-shot TBF decoding on `h`; `boundary` resolves block regions.
pub fn tbf_decode(
    h: &BinaryMatrix,
    s: &BitVec,
    max_iters: usize,
    spec: &DecoderSpec,
    boundary: usize,
) -> Result<DecodeResult> {
    let regions = spec
        .regions()
        .ok_or_else(|| Error::InvalidSpec(format!("{} is not a TBF decoder", spec.name)))?;
    TbfDecoder::new(CompactGraph::shared(h), spec, regions, boundary)?.decode(s, max_iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::bf::BitFlipDecoder;
    use crate::decoders::spec::{registry, RegionRange};
    use crate::decoders::states::{init_checks, phi, var_update, CheckState, FVector, PsiTable};
    use crate::gf2::syndrome;
    use proptest::prelude::*;

    /// A column-weight-3 toy code: l = 7 GHP-like H = [circ(0,1,3) | circ(0,2,3)].
    fn toy() -> BinaryMatrix {
        let l = 7;
        let mut h = BinaryMatrix::zeros(l, 2 * l);
        for i in 0..l {
            for k in [0, 1, 3] {
                h.set(i, (i + k) % l, true);
            }
            for k in [0, 2, 3] {
                h.set(i, l + (i + k) % l, true);
            }
        }
        h
    }

    /// Straightforward per-step implementation of the two-bit iteration.
    fn reference(h: &BinaryMatrix, s: &BitVec, max_iters: usize, psi: &PsiTable, f: FVector) -> (Vec<u8>, bool, usize) {
        let (m, n) = (h.rows(), h.cols());
        let adj: Vec<Vec<usize>> = (0..n).map(|v| (0..m).filter(|&c| h.get(c, v)).collect()).collect();
        let init = if f.get(Flag::InitWeakVars) { VarState::WEAK_ZERO } else { VarState::STRONG_ZERO };
        let mut w = vec![init; n];
        let mut checks = init_checks(&s.to_bits(), f.get(Flag::InitNewChecks));
        let mut it = 0;
        let residual = |w: &[VarState]| {
            let e = BitVec::from_bits(&w.iter().map(|x| x.value()).collect::<Vec<_>>());
            syndrome(h, &e).unwrap().xor(s)
        };
        let mut r = residual(&w);
        while !r.is_zero() && it < max_iters {
            it += 1;
            let next: Vec<VarState> = (0..n)
                .map(|v| {
                    let states: Vec<CheckState> = adj[v].iter().map(|&c| checks[c]).collect();
                    let unsat = states.iter().filter(|c| !c.is_satisfied()).count() as u8;
                    var_update(w[v], CheckTuple::from_states(&states), unsat, f, psi).unwrap()
                })
                .collect();
            w = next;
            let r_new = residual(&w);
            checks = (0..m).map(|c| phi(r.get(c) as u8, r_new.get(c) as u8)).collect();
            r = r_new;
        }
        (w.iter().map(|x| x.value()).collect(), r.is_zero(), it)
    }

    #[test]
    fn zero_syndrome_converges_immediately() {
        let h = toy();
        let out = tbf_decode(&h, &BitVec::zeros(7), 50, &registry("D1").unwrap(), 7).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert!(out.estimate.is_zero());
    }

    #[test]
    fn rejects_high_degree_and_bad_regions() {
        let h = BinaryMatrix::from_rows(&[[1u8, 0], [1, 0], [1, 0], [1, 1]]);
        let d1 = registry("D1").unwrap();
        assert!(matches!(
            tbf_decode(&h, &BitVec::zeros(4), 5, &d1, 1),
            Err(Error::DegreeTooLarge { var: 0, degree: 4 })
        ));
        let mut gap = registry("D9").unwrap();
        if let crate::decoders::DecoderKind::Tbf(regions) = &mut gap.kind {
            regions[1].range = RegionRange::Span(8, 14);
        }
        assert!(tbf_decode(&toy(), &BitVec::zeros(7), 5, &gap, 7).is_err());
    }

    #[test]
    fn bf_flattened_tbf_matches_trajectories() {
        let h = toy();
        let graph = CompactGraph::shared(&h);
        let bf = BitFlipDecoder::new(graph.clone(), "BF");
        let flat = DecoderSpec::tbf("flat", PsiTable::MAJORITY, FVector::from_index(0));
        let tbf = TbfDecoder::new(graph, &flat, flat.regions().unwrap(), 7).unwrap();
        let mut count = 0;
        for a in 0..7usize {
            for b in a..7 {
                let mut s = BitVec::zeros(7);
                s.set(a, true);
                if b != a {
                    s.set(b, true);
                }
                let mut t1 = Vec::new();
                let mut t2 = Vec::new();
                let r1 = bf.decode_traced(&s, 20, |e| t1.push(e.to_vec())).unwrap();
                let r2 = tbf.decode_traced(&s, 20, |e| t2.push(e.to_vec())).unwrap();
                assert_eq!(t1, t2, "syndrome {s}");
                assert_eq!(r1, r2);
                count += 1;
            }
        }
        assert_eq!(count, 28);
    }

    proptest! {
        #[test]
        fn matches_reference(
            err in proptest::collection::vec(0usize..14, 0..5),
            f in 0u16..1024,
        ) {
            let h = toy();
            let e = BitVec::from_support(14, &{ let mut v = err.clone(); v.sort(); v.dedup(); v });
            let s = syndrome(&h, &e).unwrap();
            let f = FVector::from_index(f);
            let spec = DecoderSpec::tbf("x", PsiTable::TABLE_I, f);
            let fast = tbf_decode(&h, &s, 30, &spec, 7).unwrap();
            let (bits, conv, it) = reference(&h, &s, 30, &PsiTable::TABLE_I, f);
            prop_assert_eq!(fast.estimate.to_bits(), bits);
            prop_assert_eq!(fast.converged, conv);
            prop_assert_eq!(fast.iterations, it);
            if fast.converged {
                prop_assert_eq!(syndrome(&h, &fast.estimate).unwrap(), s.clone());
            }
            prop_assert_eq!(tbf_decode(&h, &s, 30, &spec, 7).unwrap(), fast);
        }
    }
}
