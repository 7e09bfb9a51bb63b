//! Decoder descriptions, the named registry and a small text format.
//!
//! ```text
//! # split-Ψ decoder
//! name D9
//! region v1
//! psi table-i
//! f 0100011010
//! region v2
//! psi 01 01 00 00 01 10 11 11 11 11 10 10 11 00 01 01
//! f 0100011010
//! ```
//!
//! `region` takes `all`, `v1` (first circulant block), `v2` (second block)
//! or an explicit half-open range `a..b`. `psi` takes `table-i`,
//! `table-iii`, `majority` or 16 two-bit entries with rows ordered
//! 01, 00, 11, 10 and columns for 0..=3 unsatisfied checks. Non-TBF
//! decoders use `kind bf` or `kind nms <factor>`.

use std::fmt::{self, Write as _};
use std::ops::Range;

use super::states::{FVector, PsiTable};
use crate::error::{Error, Result};

/// Variables covered by one region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionRange {
    All,
    /// Variables before the circulant boundary.
    LeftBlock,
    /// Variables from the circulant boundary on.
    RightBlock,
    Span(usize, usize),
}

impl RegionRange {
    pub fn resolve(self, n: usize, boundary: usize) -> Range<usize> {
        match self {
            Self::All => 0..n,
            Self::LeftBlock => 0..boundary.min(n),
            Self::RightBlock => boundary.min(n)..n,
            Self::Span(a, b) => a..b,
        }
    }

    fn parse(text: &str) -> Result<Self> {
        match text {
            "all" => Ok(Self::All),
            "v1" => Ok(Self::LeftBlock),
            "v2" => Ok(Self::RightBlock),
            _ => {
                let (a, b) = text
                    .split_once("..")
                    .ok_or_else(|| Error::InvalidSpec(format!("bad region `{text}`")))?;
                let num = |t: &str| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidSpec(format!("bad region bound `{t}`")))
                };
                Ok(Self::Span(num(a)?, num(b)?))
            }
        }
    }
}

impl fmt::Display for RegionRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::LeftBlock => f.write_str("v1"),
            Self::RightBlock => f.write_str("v2"),
            Self::Span(a, b) => write!(f, "{a}..{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub range: RegionRange,
    pub psi: PsiTable,
    pub f: FVector,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecoderKind {
    BitFlip,
    MinSum { factor: f64 },
    Tbf(Vec<Region>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderSpec {
    pub name: String,
    pub kind: DecoderKind,
}

/// f-vectors of the eight base decoders D1..D8.
pub const TABLE_II: [[u8; 10]; 8] = [
    [0, 1, 0, 0, 0, 1, 1, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 0, 0, 1, 1],
    [0, 0, 0, 1, 0, 0, 0, 0, 0, 1],
    [1, 1, 0, 0, 0, 0, 1, 1, 0, 0],
    [0, 1, 0, 0, 0, 1, 0, 1, 1, 1],
];

pub const NMS_FACTOR: f64 = 0.875;

/// Which block gets the conservative Ψ in a split variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitSide {
    Left,
    Right,
}

impl DecoderSpec {
    /// Single-region TBF decoder.
    pub fn tbf(name: impl Into<String>, psi: PsiTable, f: FVector) -> Self {
        Self {
            name: name.into(),
            kind: DecoderKind::Tbf(vec![Region {
                range: RegionRange::All,
                psi,
                f,
            }]),
        }
    }

    /// Table I on one circulant block and Table III on the other, same f.
    pub fn split(name: impl Into<String>, f: FVector, conservative: SplitSide) -> Self {
        let (left, right) = match conservative {
            SplitSide::Left => (PsiTable::TABLE_III, PsiTable::TABLE_I),
            SplitSide::Right => (PsiTable::TABLE_I, PsiTable::TABLE_III),
        };
        Self {
            name: name.into(),
            kind: DecoderKind::Tbf(vec![
                Region {
                    range: RegionRange::LeftBlock,
                    psi: left,
                    f,
                },
                Region {
                    range: RegionRange::RightBlock,
                    psi: right,
                    f,
                },
            ]),
        }
    }

    pub fn regions(&self) -> Option<&[Region]> {
        match &self.kind {
            DecoderKind::Tbf(r) => Some(r),
            _ => None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut kind = None;
        let mut regions: Vec<(RegionRange, Option<PsiTable>, Option<FVector>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: idx + 1, message };
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "name" => name = Some(rest.to_string()),
                "kind" => {
                    let mut it = rest.split_whitespace();
                    kind = Some(match it.next() {
                        Some("bf") => DecoderKind::BitFlip,
                        Some("nms") => {
                            let factor = match it.next() {
                                Some(t) => t.parse::<f64>().map_err(|_| err(format!("bad factor `{t}`")))?,
                                None => NMS_FACTOR,
                            };
                            if !(factor > 0.0 && factor <= 1.0) {
                                return Err(err(format!("factor {factor} outside (0, 1]")));
                            }
                            DecoderKind::MinSum { factor }
                        }
                        Some("tbf") => DecoderKind::Tbf(Vec::new()),
                        other => return Err(err(format!("unknown kind {other:?}"))),
                    });
                }
                "region" => regions.push((RegionRange::parse(rest).map_err(|e| err(e.to_string()))?, None, None)),
                "psi" | "f" => {
                    if regions.is_empty() {
                        regions.push((RegionRange::All, None, None));
                    }
                    let slot = regions.last_mut().expect("nonempty");
                    if key == "psi" {
                        let table = match rest {
                            "table-i" => PsiTable::TABLE_I,
                            "table-iii" => PsiTable::TABLE_III,
                            "majority" => PsiTable::MAJORITY,
                            _ => PsiTable::parse_published(rest).map_err(|e| err(e.to_string()))?,
                        };
                        slot.1 = Some(table);
                    } else {
                        slot.2 = Some(FVector::parse(rest).map_err(|e| err(e.to_string()))?);
                    }
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let name = name.unwrap_or_else(|| "custom".to_string());
        let kind = match kind {
            Some(DecoderKind::BitFlip) | Some(DecoderKind::MinSum { .. }) if !regions.is_empty() => {
                return Err(Error::InvalidSpec("regions given for a non-TBF decoder".into()))
            }
            Some(k @ DecoderKind::BitFlip) | Some(k @ DecoderKind::MinSum { .. }) => k,
            _ => {
                if regions.is_empty() {
                    return Err(Error::InvalidSpec("TBF decoder without regions".into()));
                }
                DecoderKind::Tbf(
                    regions
                        .into_iter()
                        .map(|(range, psi, f)| {
                            Ok(Region {
                                range,
                                psi: psi.unwrap_or(PsiTable::TABLE_I),
                                f: f.ok_or_else(|| Error::InvalidSpec(format!("region {range} has no f")))?,
                            })
                        })
                        .collect::<Result<_>>()?,
                )
            }
        };
        Ok(Self { name, kind })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("name {}\n", self.name);
        match &self.kind {
            DecoderKind::BitFlip => out.push_str("kind bf\n"),
            DecoderKind::MinSum { factor } => {
                let _ = writeln!(out, "kind nms {factor}");
            }
            DecoderKind::Tbf(regions) => {
                for r in regions {
                    let _ = writeln!(out, "region {}\npsi {}\nf {}", r.range, r.psi.to_published_string(), r.f);
                }
            }
        }
        out
    }
}

/// Looks up a named decoder.
///
/// `D1`..`D8` carry Table I everywhere, `D9`/`D10` are D1 with Table III on
/// the second/first block, `Dk.v1`/`Dk.v2` put Table III on that block of
/// `Dk` (k in 1..=8), plus `BF` and `NMS`.
pub fn registry(name: &str) -> Result<DecoderSpec> {
    let upper = name.trim().to_ascii_uppercase();
    let unknown = || Error::UnknownName(name.to_string());
    match upper.as_str() {
        "BF" => {
            return Ok(DecoderSpec {
                name: "BF".into(),
                kind: DecoderKind::BitFlip,
            })
        }
        "NMS" => {
            return Ok(DecoderSpec {
                name: "NMS".into(),
                kind: DecoderKind::MinSum { factor: NMS_FACTOR },
            })
        }
        _ => {}
    }
    let body = upper.strip_prefix('D').ok_or_else(unknown)?;
    let (index, side) = match body.split_once('.') {
        Some((k, "V1")) => (k, Some(SplitSide::Left)),
        Some((k, "V2")) => (k, Some(SplitSide::Right)),
        Some(_) => return Err(unknown()),
        None => (body, None),
    };
    let k: usize = index.parse().map_err(|_| unknown())?;
    let d1 = FVector::from_flags(TABLE_II[0]);
    match (k, side) {
        (1..=8, None) => Ok(DecoderSpec::tbf(format!("D{k}"), PsiTable::TABLE_I, FVector::from_flags(TABLE_II[k - 1]))),
        (1..=8, Some(side)) => Ok(DecoderSpec::split(
            format!("D{k}.{}", if side == SplitSide::Left { "v1" } else { "v2" }),
            FVector::from_flags(TABLE_II[k - 1]),
            side,
        )),
        (9, None) => Ok(DecoderSpec::split("D9", d1, SplitSide::Right)),
        (10, None) => Ok(DecoderSpec::split("D10", d1, SplitSide::Left)),
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::states::VarState;

    fn single(spec: &DecoderSpec) -> &Region {
        &spec.regions().unwrap()[0]
    }

    #[test]
    fn table_ii_rows() {
        assert_eq!(single(&registry("D2").unwrap()).f.flags(), [0; 10]);
        assert_eq!(single(&registry("D8").unwrap()).f.to_string(), "0100010111");
        assert_eq!(single(&registry("d1").unwrap()).f.to_string(), "0100011010");
        for k in 1..=8 {
            let spec = registry(&format!("D{k}")).unwrap();
            assert_eq!(spec.regions().unwrap().len(), 1);
            assert_eq!(single(&spec).psi, PsiTable::TABLE_I);
        }
    }

    #[test]
    fn split_decoders() {
        let d9 = registry("D9").unwrap();
        let r = d9.regions().unwrap();
        assert_eq!(r[0].range, RegionRange::LeftBlock);
        assert_eq!(r[0].psi, PsiTable::TABLE_I);
        assert_eq!(r[1].psi.apply(VarState::STRONG_ZERO, 3), VarState::WEAK_ZERO);
        assert_eq!(r[1].f, single(&registry("D1").unwrap()).f);
        let d10 = registry("D10").unwrap();
        assert_eq!(d10.regions().unwrap()[0].psi, PsiTable::TABLE_III);
        assert_eq!(registry("D1.v2").unwrap().kind, d9.kind);
        assert_eq!(registry("D1.v1").unwrap().kind, d10.kind);
    }

    #[test]
    fn unknown_names() {
        for bad in ["D0", "D11", "X3", "D9.v1", "D2.v3", ""] {
            assert!(matches!(registry(bad), Err(Error::UnknownName(_))), "{bad}");
        }
        assert_eq!(registry("nms").unwrap().kind, DecoderKind::MinSum { factor: 0.875 });
        assert_eq!(registry("BF").unwrap().kind, DecoderKind::BitFlip);
    }

    #[test]
    fn text_roundtrip() {
        for name in ["D1", "D9", "D10", "D6.v2", "BF", "NMS"] {
            let spec = registry(name).unwrap();
            let back = DecoderSpec::parse(&spec.to_text()).unwrap();
            assert_eq!(back, spec, "{name}");
        }
    }

    #[test]
    fn text_format_details() {
        let spec = DecoderSpec::parse("name X\nregion 0..10\npsi table-iii\nf 0000000000\nregion 10..20\nf 1111111111\n")
            .unwrap();
        let r = spec.regions().unwrap();
        assert_eq!(r[0].range.resolve(20, 5), 0..10);
        assert_eq!(r[1].psi, PsiTable::TABLE_I);
        assert!(matches!(
            DecoderSpec::parse("name X\npsi table-i\nf 01\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(DecoderSpec::parse("name X\nregion all\npsi table-i\n").is_err());
        assert!(DecoderSpec::parse("kind nms 1.5").is_err());
        assert!(DecoderSpec::parse("frobnicate 1").is_err());
    }
}
