//! Collective decoding: several deterministic decoders on one syndrome,
//! success if any of them recovers the error up to a stabilizer.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::code::CssCode;
use crate::decoders::{registry, CompactGraph, DecodeResult, Decoder, DecoderSpec, FVector, PsiTable};
use crate::error::{Error, Result};
use crate::gf2::{in_rowspace, row_reduce, syndrome, BitVec, RowBasis};

#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub name: String,
    pub members: Vec<DecoderSpec>,
}

impl Ensemble {
    pub fn new(name: impl Into<String>, members: Vec<DecoderSpec>) -> Result<Self> {
        let name = name.into();
        if members.is_empty() {
            return Err(Error::InvalidSpec(format!("ensemble {name} has no members")));
        }
        let mut seen = BTreeSet::new();
        for m in &members {
            if !seen.insert(m.name.as_str()) {
                return Err(Error::InvalidSpec(format!("ensemble {name}: duplicate member {}", m.name)));
            }
        }
        Ok(Self { name, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_names(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.name.as_str()).collect()
    }

    /// Ensemble file: one reference per line. A reference is a registry
    /// decoder name, `ensemble <builtin>` or a path to a decoder spec file
    /// (relative to `base_dir`). `f <flags>` adds a Table I decoder with that
    /// f-vector. `name <label>` sets the ensemble name.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut name = String::from("custom");
        let mut members = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |e: Error| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            };
            if let Some(rest) = line.strip_prefix("name ") {
                name = rest.trim().to_string();
            } else if let Some(rest) = line.strip_prefix("ensemble ") {
                members.extend(builtin_ensemble(rest.trim()).map_err(err)?.members);
            } else if let Some(rest) = line.strip_prefix("f ") {
                let f = FVector::parse(rest.trim()).map_err(err)?;
                members.push(DecoderSpec::tbf(format!("f{f}"), PsiTable::TABLE_I, f));
            } else if let Ok(spec) = registry(line) {
                members.push(spec);
            } else {
                let path = base_dir.join(line);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("`{line}` is neither a decoder name nor a readable file: {e}"),
                })?;
                members.push(DecoderSpec::parse(&text).map_err(err)?);
            }
        }
        Self::new(name, members)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

pub const BUILTIN_ENSEMBLES: [&str; 5] = ["D1", "D4", "D8", "D9set", "D24"];

/// `D1` = {D1}, `D4` = {D1, D2, D3, D9}, `D8` = D1..D8, `D9set` = D1..D9,
/// `D24` = {D1, D9, D10} plus each of D2..D8 with its two split-Ψ variants.
pub fn builtin_ensemble(name: &str) -> Result<Ensemble> {
    let names: Vec<String> = match name {
        "D1" => vec!["D1".into()],
        "D4" => ["D1", "D2", "D3", "D9"].map(String::from).to_vec(),
        "D8" => (1..=8).map(|k| format!("D{k}")).collect(),
        "D9set" => (1..=9).map(|k| format!("D{k}")).collect(),
        "D24" => {
            let mut v: Vec<String> = ["D1", "D9", "D10"].map(String::from).to_vec();
            for k in 2..=8 {
                v.push(format!("D{k}"));
                v.push(format!("D{k}.v2"));
                v.push(format!("D{k}.v1"));
            }
            v
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ensemble::new(name, names.iter().map(|n| registry(n)).collect::<Result<_>>()?)
}

/// Builtin ensemble, single registry decoder, or ensemble file.
pub fn resolve_ensemble(reference: &str) -> Result<Ensemble> {
    if let Ok(e) = builtin_ensemble(reference) {
        return Ok(e);
    }
    if let Ok(spec) = registry(reference) {
        return Ensemble::new(spec.name.clone(), vec![spec]);
    }
    let path = Path::new(reference);
    if path.exists() {
        return Ensemble::load(path);
    }
    Err(Error::UnknownName(reference.to_string()))
}

/// Result of comparing an estimate with the true error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    ExactMatch,
    DegenerateSuccess,
    LogicalError,
    SyndromeMismatch,
}

impl Verdict {
    pub fn is_success(self) -> bool {
        matches!(self, Self::ExactMatch | Self::DegenerateSuccess)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExactMatch => "exact",
            Self::DegenerateSuccess => "degenerate",
            Self::LogicalError => "logical",
            Self::SyndromeMismatch => "mismatch",
        })
    }
}

/// Row basis of `H_X` plus `H_Z`, enough to classify estimates.
#[derive(Clone, Debug)]
pub struct Classifier {
    code: Arc<CssCode>,
    hx_basis: RowBasis,
}

impl Classifier {
    pub fn new(code: Arc<CssCode>) -> Self {
        let hx_basis = row_reduce(&code.hx);
        Self { code, hx_basis }
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    /// Verdict for estimate `e_hat` of the error `e`. A converged estimate
    /// whose residual is not in the kernel of `H_Z` is an invariant error.
    pub fn classify(&self, e: &BitVec, e_hat: &BitVec, converged: bool) -> Result<Verdict> {
        if !converged {
            return Ok(Verdict::SyndromeMismatch);
        }
        let residual = e.xor(e_hat);
        if residual.is_zero() {
            return Ok(Verdict::ExactMatch);
        }
        if !syndrome(&self.code.hz, &residual)?.is_zero() {
            return Err(Error::Invariant(
                "converged estimate does not reproduce the syndrome".into(),
            ));
        }
        Ok(if in_rowspace(&self.hx_basis, &residual)? {
            Verdict::DegenerateSuccess
        } else {
            Verdict::LogicalError
        })
    }
}

/// One-shot classification.
pub fn classify_outcome(e: &BitVec, e_hat: &BitVec, code: &CssCode, converged: bool) -> Result<Verdict> {
    Classifier::new(Arc::new(code.clone())).classify(e, e_hat, converged)
}

/// Ensemble verdict on one error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// Best verdict over the converged members (exact before degenerate
    /// before logical), mismatch if none converged.
    pub verdict: Verdict,
    /// Member with the best verdict and, among those, fewest iterations;
    /// ties go to the earlier member.
    pub winner: Option<usize>,
    pub iterations: usize,
}

impl Outcome {
    /// Aggregates member results in member order.
    pub fn from_results(results: &[DecodeResult], e: &BitVec, classifier: &Classifier) -> Result<Self> {
        let mut best: Option<(Verdict, usize, usize)> = None;
        for (i, r) in results.iter().enumerate() {
            if !r.converged {
                continue;
            }
            let v = classifier.classify(e, &r.estimate, true)?;
            if best.is_none_or(|b| (v, r.iterations) < (b.0, b.1)) {
                best = Some((v, r.iterations, i));
            }
        }
        Ok(match best {
            Some((verdict, iterations, i)) => Self {
                verdict,
                winner: Some(i),
                iterations,
            },
            None => Self {
                verdict: Verdict::SyndromeMismatch,
                winner: None,
                iterations: results.iter().map(|r| r.iterations).max().unwrap_or(0),
            },
        })
    }
}

/// An ensemble bound to a code (and channel prior, for min-sum members).
#[derive(Clone, Debug)]
pub struct PreparedEnsemble {
    pub name: String,
    members: Vec<Decoder>,
}

impl PreparedEnsemble {
    pub fn new(ensemble: &Ensemble, code: &CssCode, p: f64) -> Result<Self> {
        let graph = CompactGraph::shared(&code.hz);
        Self::with_graph(ensemble, &graph, code.circulant_boundary, p)
    }

    pub fn with_graph(ensemble: &Ensemble, graph: &Arc<CompactGraph>, boundary: usize, p: f64) -> Result<Self> {
        Ok(Self {
            name: ensemble.name.clone(),
            members: ensemble
                .members
                .iter()
                .map(|m| Decoder::prepare(m, graph, boundary, p))
                .collect::<Result<_>>()?,
        })
    }

    pub fn members(&self) -> &[Decoder] {
        &self.members
    }

    /// Every member with the full budget, results in member order.
    pub fn run(&self, s: &BitVec, max_iters: usize) -> Result<Vec<DecodeResult>> {
        self.members.par_iter().map(|d| d.decode(s, max_iters)).collect()
    }

    /// Same outcome as [`Outcome::from_results`] over [`Self::run`], but
    /// once an exact match is known later members only get enough
    /// iterations to beat it.
    pub fn decode(&self, e: &BitVec, s: &BitVec, max_iters: usize, classifier: &Classifier) -> Result<Outcome> {
        let mut best: Option<(Verdict, usize, usize)> = None;
        let mut worst_iterations = 0;
        for (i, d) in self.members.iter().enumerate() {
            let budget = match best {
                Some((Verdict::ExactMatch, 0, _)) => break,
                Some((Verdict::ExactMatch, it, _)) => it - 1,
                _ => max_iters,
            };
            let r = d.decode(s, budget)?;
            worst_iterations = worst_iterations.max(r.iterations);
            if !r.converged {
                continue;
            }
            let v = classifier.classify(e, &r.estimate, true)?;
            if best.is_none_or(|b| (v, r.iterations) < (b.0, b.1)) {
                best = Some((v, r.iterations, i));
            }
        }
        Ok(match best {
            Some((verdict, iterations, i)) => Outcome {
                verdict,
                winner: Some(i),
                iterations,
            },
            None => Outcome {
                verdict: Verdict::SyndromeMismatch,
                winner: None,
                iterations: worst_iterations,
            },
        })
    }

    /// True when some member recovers `e` up to a stabilizer. Stops at the
    /// first success.
    pub fn corrects(&self, e: &BitVec, max_iters: usize, classifier: &Classifier) -> Result<bool> {
        let s = syndrome(&classifier.code().hz, e)?;
        for d in &self.members {
            let r = d.decode(&s, max_iters)?;
            if r.converged && classifier.classify(e, &r.estimate, true)?.is_success() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Runs every member of `ens` on `s` with the full budget.
pub fn run_ensemble(code: &CssCode, s: &BitVec, max_iters: usize, ens: &Ensemble) -> Result<Vec<DecodeResult>> {
    PreparedEnsemble::new(ens, code, 0.0)?.run(s, max_iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code;

    #[test]
    fn builtin_compositions() {
        assert_eq!(builtin_ensemble("D4").unwrap().member_names(), ["D1", "D2", "D3", "D9"]);
        assert_eq!(builtin_ensemble("D1").unwrap().len(), 1);
        assert_eq!(builtin_ensemble("D8").unwrap().len(), 8);
        assert_eq!(builtin_ensemble("D9set").unwrap().member_names().last(), Some(&"D9"));
        let d24 = builtin_ensemble("D24").unwrap();
        assert_eq!(d24.len(), 24);
        assert_eq!(&d24.member_names()[..6], ["D1", "D9", "D10", "D2", "D2.v2", "D2.v1"]);
        assert!(matches!(builtin_ensemble("D5"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn ensemble_validation() {
        let d1 = registry("D1").unwrap();
        assert!(Ensemble::new("x", vec![]).is_err());
        assert!(Ensemble::new("x", vec![d1.clone(), d1]).is_err());
    }

    #[test]
    fn ensemble_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("mine.dec"), registry("D5").unwrap().to_text()).unwrap();
        let e = Ensemble::parse("name trio\nD1  # base\nmine.dec\nensemble D4\n", dir.path());
        assert!(e.is_err(), "D1 appears twice");
        let e = Ensemble::parse("name trio\nD2\nmine.dec\nBF\n", dir.path()).unwrap();
        assert_eq!(e.name, "trio");
        assert_eq!(e.member_names(), ["D2", "D5", "BF"]);
        assert!(matches!(Ensemble::parse("D1\nnope.dec\n", dir.path()), Err(Error::Parse { line: 2, .. })));
        let e = Ensemble::parse("f 0000000000\nf 1111111111\n", dir.path()).unwrap();
        assert_eq!(e.member_names(), ["f0000000000", "f1111111111"]);
        assert!(matches!(Ensemble::parse("f 0101\n", dir.path()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn resolve_prefers_builtin_ensembles() {
        assert_eq!(resolve_ensemble("D4").unwrap().len(), 4);
        assert_eq!(resolve_ensemble("D5").unwrap().member_names(), ["D5"]);
        assert_eq!(resolve_ensemble("NMS").unwrap().len(), 1);
        assert!(resolve_ensemble("nonexistent-thing").is_err());
    }

    #[test]
    fn verdicts_on_b1() {
        let b1 = Arc::new(code::b1());
        let c = Classifier::new(b1.clone());
        let e = BitVec::from_support(882, &[3, 500]);
        assert_eq!(c.classify(&e, &e, true).unwrap(), Verdict::ExactMatch);
        assert_eq!(c.classify(&e, &e, false).unwrap(), Verdict::SyndromeMismatch);
        let stab = b1.hx.row(17);
        assert_eq!(c.classify(&e, &e.xor(&stab), true).unwrap(), Verdict::DegenerateSuccess);
        assert!(c.classify(&e, &BitVec::zeros(882), true).is_err());
    }

    #[test]
    fn zero_syndrome_all_members_converge() {
        let b1 = code::b1();
        let out = run_ensemble(&b1, &BitVec::zeros(441), 50, &builtin_ensemble("D24").unwrap()).unwrap();
        assert_eq!(out.len(), 24);
        assert!(out.iter().all(|r| r.converged && r.iterations == 0));
    }
}
