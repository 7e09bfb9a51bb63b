//! Greedy generation of a TBF decoder set that corrects every error pattern
//! up to a target weight on given variable supports.
//!
//! Candidates are the 1024 f-vectors with Table I. The set starts from D1;
//! at each weight the patterns the current set fails on are collected and
//! the candidate leaving the fewest of them uncorrected is appended (ties go
//! to the lowest f-vector index) until none remain or no candidate helps.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::code::CssCode;
use crate::collective::Classifier;
use crate::decoders::spec::TABLE_II;
use crate::decoders::{CompactGraph, Decoder, DecoderSpec, FVector, PsiTable};
use crate::error::{Error, Result};
use crate::gf2::{syndrome, BitVec, BinaryMatrix};

/// How the weight-`j` patterns of one support are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// Every `j`-subset.
    Full,
    /// Only subsets containing the first support element. Sound when the
    /// code's automorphisms act transitively on the support.
    Pinned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSet {
    pub weight: usize,
    pub patterns: Vec<Vec<usize>>,
}

impl PatternSet {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of patterns [`enumerate_patterns`] yields.
pub fn pattern_count(support_len: usize, j: usize, reduction: Reduction) -> u128 {
    match reduction {
        Reduction::Full => binomial(support_len, j),
        Reduction::Pinned if j == 0 => 0,
        Reduction::Pinned => binomial(support_len.saturating_sub(1), j - 1),
    }
}

/// All weight-`j` supports inside `support`, in lexicographic order of
/// positions within `support`.
pub fn enumerate_patterns(support: &[usize], j: usize, reduction: Reduction) -> Result<PatternSet> {
    if j > support.len() {
        return Err(Error::OutOfRange {
            index: j,
            limit: support.len(),
        });
    }
    if j == 0 {
        return Err(Error::InvalidSpec("pattern weight must be at least 1".into()));
    }
    let (fixed, pool, k): (&[usize], &[usize], usize) = match reduction {
        Reduction::Full => (&[], support, j),
        Reduction::Pinned => (&support[..1], &support[1..], j - 1),
    };
    let mut patterns = Vec::with_capacity(pattern_count(support.len(), j, reduction) as usize);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut p = fixed.to_vec();
        p.extend(idx.iter().map(|&i| pool[i]));
        patterns.push(p);
        // advance the combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(PatternSet { weight: j, patterns });
            }
            i -= 1;
            if idx[i] < pool.len() - k + i {
                break;
            }
        }
        idx[i] += 1;
        for q in i + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Keeps about `budget` patterns spread evenly over the enumeration order.
pub fn thin(set: PatternSet, budget: Option<usize>) -> (PatternSet, bool) {
    match budget {
        Some(b) if b < set.len() => {
            let total = set.len();
            let patterns = (0..b).map(|i| set.patterns[i * total / b].clone()).collect();
            (
                PatternSet {
                    weight: set.weight,
                    patterns,
                },
                true,
            )
        }
        _ => (set, false),
    }
}

/// Column permutations of `h` generated by cyclic shifts inside each
/// `lift`-sized chunk and rotations of the chunks within each column half.
/// Only those that map the row supports of `h` onto themselves are kept.
pub fn quasi_cyclic_automorphisms(h: &BinaryMatrix, lift: usize, boundary: usize) -> Vec<Vec<usize>> {
    let n = h.cols();
    if lift == 0 || !boundary.is_multiple_of(lift) || !(n - boundary).is_multiple_of(lift) {
        return Vec::new();
    }
    let chunks_left = boundary / lift;
    let chunks_right = (n - boundary) / lift;
    let rows: HashSet<Vec<usize>> = (0..h.rows()).map(|r| h.row_support(r)).collect();
    let rotations = chunks_left.max(chunks_right);
    let mut out = Vec::new();
    for rot in 0..rotations {
        for shift in 0..lift {
            let perm: Vec<usize> = (0..n)
                .map(|v| {
                    let (base, chunks, local) = if v < boundary {
                        (0, chunks_left, v)
                    } else {
                        (boundary, chunks_right, v - boundary)
                    };
                    let chunk = (local / lift + rot) % chunks;
                    base + chunk * lift + (local % lift + shift) % lift
                })
                .collect();
            let preserved = rows.iter().all(|row| {
                let mut image: Vec<usize> = row.iter().map(|&v| perm[v]).collect();
                image.sort_unstable();
                rows.contains(&image)
            });
            if preserved {
                out.push(perm);
            }
        }
    }
    out
}

/// True when the automorphisms that fix `support` setwise move its first
/// element onto every other element.
pub fn pinning_is_sound(automorphisms: &[Vec<usize>], support: &[usize]) -> bool {
    let Some(&first) = support.first() else {
        return false;
    };
    let members: HashSet<usize> = support.iter().copied().collect();
    let mut reached = HashSet::new();
    for perm in automorphisms {
        if support.iter().all(|v| members.contains(&perm[*v])) {
            reached.insert(perm[first]);
        }
    }
    reached.len() == members.len()
}

/// One support with its enumeration mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    pub vars: Vec<usize>,
    pub reduction: Reduction,
}

/// Chooses pinning for each support whose symmetry allows it.
pub fn classify_supports(code: &CssCode, sets: &[Vec<usize>]) -> Vec<Support> {
    let autos = code
        .lift
        .map(|l| quasi_cyclic_automorphisms(&code.hz, l, code.circulant_boundary))
        .unwrap_or_default();
    sets.iter()
        .map(|vars| Support {
            vars: vars.clone(),
            reduction: if pinning_is_sound(&autos, vars) {
                Reduction::Pinned
            } else {
                Reduction::Full
            },
        })
        .collect()
}

/// Patterns of weight `j` over all supports, deduplicated, each support
/// thinned to `budget`.
pub fn weight_patterns(supports: &[Support], j: usize, budget: Option<usize>) -> Result<(Vec<Vec<usize>>, bool)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut limited = false;
    for s in supports {
        if j > s.vars.len() {
            continue;
        }
        let (set, cut) = thin(enumerate_patterns(&s.vars, j, s.reduction)?, budget);
        limited |= cut;
        for mut p in set.patterns {
            p.sort_unstable();
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
    }
    Ok((out, limited))
}

/// The candidate decoder for one f-vector.
pub fn candidate_spec(f: FVector) -> DecoderSpec {
    DecoderSpec::tbf(format!("f{f}"), PsiTable::TABLE_I, f)
}

pub fn all_candidates() -> Vec<FVector> {
    (0..FVector::COUNT).map(FVector::from_index).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionStep {
    pub weight: usize,
    /// Failures of the current set at this weight before the step.
    pub failures_before: usize,
    /// Uncorrected count per evaluated candidate, by index.
    pub candidate_failures: Vec<(FVector, usize)>,
    /// Appended decoder, or `None` when no candidate corrects anything.
    pub chosen: Option<FVector>,
    pub failures_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionTrace {
    pub chosen: Vec<FVector>,
    pub steps: Vec<SelectionStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSetReport {
    pub trace: SelectionTrace,
    pub target: usize,
    /// Largest weight up to which every enumerated pattern is corrected.
    pub achieved: usize,
    /// Patterns per weight were thinned by the budget.
    pub budget_limited: bool,
}

impl GenSetReport {
    pub fn specs(&self) -> Vec<DecoderSpec> {
        self.trace.chosen.iter().map(|&f| candidate_spec(f)).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GenSetConfig {
    pub target: usize,
    pub max_iters: usize,
    pub budget: Option<usize>,
}

struct Pattern {
    e: BitVec,
    s: BitVec,
}

struct Evaluator {
    graph: Arc<CompactGraph>,
    boundary: usize,
    classifier: Classifier,
    max_iters: usize,
}

impl Evaluator {
    fn new(code: &CssCode, max_iters: usize) -> Self {
        Self {
            graph: CompactGraph::shared(&code.hz),
            boundary: code.circulant_boundary,
            classifier: Classifier::new(Arc::new(code.clone())),
            max_iters,
        }
    }

    fn prepare(&self, spec: &DecoderSpec) -> Result<Decoder> {
        Decoder::prepare(spec, &self.graph, self.boundary, 0.0)
    }

    fn corrects(&self, dec: &Decoder, p: &Pattern) -> Result<bool> {
        let out = dec.decode(&p.s, self.max_iters)?;
        Ok(self.classifier.classify(&p.e, &out.estimate, out.converged)?.is_success())
    }

    /// Indices of patterns no decoder in `set` corrects.
    fn failures(&self, set: &[Decoder], patterns: &[Pattern]) -> Result<Vec<usize>> {
        let flags: Vec<bool> = patterns
            .par_iter()
            .map(|p| {
                for d in set {
                    if self.corrects(d, p)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            })
            .collect::<Result<_>>()?;
        Ok(flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect())
    }
}

fn to_patterns(code: &CssCode, supports: Vec<Vec<usize>>) -> Result<Vec<Pattern>> {
    supports
        .into_iter()
        .map(|sup| {
            let e = BitVec::from_support(code.n, &sup);
            let s = syndrome(&code.hz, &e)?;
            Ok(Pattern { e, s })
        })
        .collect()
}

/// D1's f-vector, the seed of every generated set.
pub fn seed_vector() -> FVector {
    FVector::from_flags(TABLE_II[0])
}

/// Greedy set generation over `candidates` (D1 is always the first member
/// and is dropped from the candidate list).
pub fn generate_set(
    code: &CssCode,
    supports: &[Support],
    config: GenSetConfig,
    candidates: &[FVector],
) -> Result<GenSetReport> {
    if config.target == 0 {
        return Err(Error::InvalidSpec("target weight must be at least 1".into()));
    }
    let eval = Evaluator::new(code, config.max_iters);
    let seed = seed_vector();
    let mut chosen = vec![seed];
    let mut set = vec![eval.prepare(&candidate_spec(seed))?];
    let mut remaining: Vec<FVector> = candidates.iter().copied().filter(|&f| f != seed).collect();
    remaining.sort_by_key(|f| f.index());
    remaining.dedup();
    let mut steps = Vec::new();
    let mut budget_limited = false;
    let mut achieved = 0;

    for j in 1..=config.target {
        let (sups, cut) = weight_patterns(supports, j, config.budget)?;
        budget_limited |= cut;
        let patterns = to_patterns(code, sups)?;
        let mut failing: Vec<Pattern> = {
            let idx: HashSet<usize> = eval.failures(&set, &patterns)?.into_iter().collect();
            patterns
                .into_iter()
                .enumerate()
                .filter(|(i, _)| idx.contains(i))
                .map(|(_, p)| p)
                .collect()
        };
        while !failing.is_empty() && !remaining.is_empty() {
            let scores: Vec<(FVector, usize)> = remaining
                .par_iter()
                .map(|&f| {
                    let dec = eval.prepare(&candidate_spec(f))?;
                    Ok((f, eval.failures(std::slice::from_ref(&dec), &failing)?.len()))
                })
                .collect::<Result<_>>()?;
            // first minimum in index order
            let (best, best_fail) = scores
                .iter()
                .copied()
                .fold(None::<(FVector, usize)>, |acc, c| match acc {
                    Some(a) if a.1 <= c.1 => Some(a),
                    _ => Some(c),
                })
                .expect("candidates nonempty");
            let before = failing.len();
            if best_fail == before {
                steps.push(SelectionStep {
                    weight: j,
                    failures_before: before,
                    candidate_failures: scores,
                    chosen: None,
                    failures_after: before,
                });
                break;
            }
            let dec = eval.prepare(&candidate_spec(best))?;
            let still = eval.failures(std::slice::from_ref(&dec), &failing)?;
            let keep: HashSet<usize> = still.into_iter().collect();
            failing = failing
                .into_iter()
                .enumerate()
                .filter(|(i, _)| keep.contains(i))
                .map(|(_, p)| p)
                .collect();
            remaining.retain(|&f| f != best);
            chosen.push(best);
            set.push(dec);
            steps.push(SelectionStep {
                weight: j,
                failures_before: before,
                candidate_failures: scores,
                chosen: Some(best),
                failures_after: failing.len(),
            });
        }
        if !failing.is_empty() {
            break;
        }
        achieved = j;
    }

    Ok(GenSetReport {
        trace: SelectionTrace { chosen, steps },
        target: config.target,
        achieved,
        budget_limited,
    })
}

/// Per-weight replay of a decoder set: `(weight, patterns, failures)`.
pub fn replay(
    code: &CssCode,
    supports: &[Support],
    set: &[DecoderSpec],
    max_weight: usize,
    max_iters: usize,
    budget: Option<usize>,
) -> Result<Vec<(usize, usize, usize)>> {
    let eval = Evaluator::new(code, max_iters);
    let decs: Vec<Decoder> = set.iter().map(|s| eval.prepare(s)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for j in 1..=max_weight {
        let (sups, _) = weight_patterns(supports, j, budget)?;
        let patterns = to_patterns(code, sups)?;
        let fails = eval.failures(&decs, &patterns)?.len();
        out.push((j, patterns.len(), fails));
    }
    Ok(out)
}

/// Trace as CSV: one row per step and evaluated candidate.
pub fn trace_csv(report: &GenSetReport) -> String {
    let mut out = String::from("step,weight,failures_before,candidate,candidate_failures,chosen,failures_after\n");
    for (i, st) in report.trace.steps.iter().enumerate() {
        let chosen = st.chosen.map(|f| f.to_string()).unwrap_or_else(|| "none".into());
        for (f, fails) in &st.candidate_failures {
            out.push_str(&format!(
                "{i},{},{},{f},{fails},{},{}\n",
                st.weight,
                st.failures_before,
                st.chosen == Some(*f),
                st.failures_after
            ));
        }
        if st.candidate_failures.is_empty() {
            out.push_str(&format!("{i},{},{},,,{chosen},{}\n", st.weight, st.failures_before, st.failures_after));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{ghp, BlockSpec, PolynomialSpec};
    use proptest::prelude::*;

    #[test]
    fn counts() {
        let six: Vec<usize> = (0..6).collect();
        assert_eq!(enumerate_patterns(&six, 2, Reduction::Full).unwrap().len(), 15);
        assert_eq!(pattern_count(63, 5, Reduction::Pinned) + pattern_count(49, 5, Reduction::Pinned), 752_425);
        assert!(enumerate_patterns(&six, 7, Reduction::Full).is_err());
        let pinned = enumerate_patterns(&six, 3, Reduction::Pinned).unwrap();
        assert_eq!(pinned.len(), 10);
        assert!(pinned.patterns.iter().all(|p| p[0] == 0));
    }

    proptest! {
        #[test]
        fn enumeration_matches_binomial(n in 1usize..12, j in 1usize..6) {
            prop_assume!(j <= n);
            let s: Vec<usize> = (0..n).map(|i| 3 * i + 1).collect();
            let full = enumerate_patterns(&s, j, Reduction::Full).unwrap();
            prop_assert_eq!(full.len() as u128, binomial(n, j));
            let distinct: HashSet<_> = full.patterns.iter().cloned().collect();
            prop_assert_eq!(distinct.len(), full.len());
            prop_assert!(full.patterns.iter().all(|p| p.len() == j && p.iter().all(|v| s.contains(v))));
            let pinned = enumerate_patterns(&s, j, Reduction::Pinned).unwrap();
            prop_assert_eq!(pinned.len() as u128, binomial(n - 1, j - 1));
        }
    }

    #[test]
    fn thinning_is_spread_and_bounded() {
        let s: Vec<usize> = (0..10).collect();
        let (t, cut) = thin(enumerate_patterns(&s, 3, Reduction::Full).unwrap(), Some(7));
        assert!(cut);
        assert_eq!(t.len(), 7);
        assert_eq!(t.patterns[0], vec![0, 1, 2]);
    }

    /// Toy GHP with l = 7: A = B = (1 + x + x^3) as 1x1 block specs.
    fn toy() -> CssCode {
        let p = PolynomialSpec::univariate([0, 1, 3], 7);
        let a = BlockSpec::new(7, vec![vec![p.clone()]]).unwrap();
        ghp(&a, &a).unwrap()
    }

    #[test]
    fn cyclic_support_admits_pinning() {
        let code = toy();
        let autos = quasi_cyclic_automorphisms(&code.hz, 7, 7);
        assert_eq!(autos.len(), 7);
        let block: Vec<usize> = (0..7).collect();
        assert!(pinning_is_sound(&autos, &block));
        assert!(!pinning_is_sound(&autos, &[0, 1, 3]));
    }

    #[test]
    fn t1_keeps_only_d1() {
        let code = crate::code::b1();
        let sups = classify_supports(&code, &[(0..63).collect()]);
        assert_eq!(sups[0].reduction, Reduction::Pinned);
        let cfg = GenSetConfig {
            target: 1,
            max_iters: 20,
            budget: None,
        };
        let rep = generate_set(&code, &sups, cfg, &all_candidates()).unwrap();
        assert_eq!(rep.trace.chosen, vec![seed_vector()]);
        assert_eq!(rep.achieved, 1);
    }

    #[test]
    fn generated_set_replays_clean() {
        let code = toy();
        let sups = classify_supports(&code, &[(0..7).collect(), (7..14).collect()]);
        let cfg = GenSetConfig {
            target: 2,
            max_iters: 20,
            budget: None,
        };
        let cands: Vec<FVector> = (0..64).map(|i| FVector::from_index(i * 16)).collect();
        let rep = generate_set(&code, &sups, cfg, &cands).unwrap();
        let replay = replay(&code, &sups, &rep.specs(), rep.achieved, 20, None).unwrap();
        assert!(replay.iter().all(|&(_, _, f)| f == 0), "{replay:?}");
        // residual failures strictly shrink on every append
        for st in &rep.trace.steps {
            if st.chosen.is_some() {
                assert!(st.failures_after < st.failures_before);
            }
        }
        let again = generate_set(&code, &sups, cfg, &cands).unwrap();
        assert_eq!(again, rep);
    }
}
