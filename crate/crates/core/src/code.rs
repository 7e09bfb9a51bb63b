//! CSS code construction from circulant descriptions: generalized hypergraph
//! product (GHP), hypergraph product (HP) and bivariate bicycle (BB) codes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gf2::{gf2_matmul, BinaryMatrix};

/// A polynomial over GF(2) in the cyclic shift `x` (and `y`, for bivariate
/// lifts). Terms are stored reduced and deduplicated; a repeated term cancels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PolynomialSpec {
    Univariate(Vec<usize>),
    Bivariate(Vec<(usize, usize)>),
}

fn cancel_pairs<T: Ord + Copy>(mut terms: Vec<T>) -> Vec<T> {
    terms.sort_unstable();
    let mut out: Vec<T> = Vec::with_capacity(terms.len());
    for t in terms {
        if out.last() == Some(&t) {
            out.pop();
        } else {
            out.push(t);
        }
    }
    out
}

impl PolynomialSpec {
    pub fn univariate(terms: impl IntoIterator<Item = usize>, l: usize) -> Self {
        Self::Univariate(cancel_pairs(terms.into_iter().map(|k| k % l).collect()))
    }

    pub fn bivariate(terms: impl IntoIterator<Item = (usize, usize)>, l: usize, m: usize) -> Self {
        Self::Bivariate(cancel_pairs(
            terms.into_iter().map(|(a, b)| (a % l, b % m)).collect(),
        ))
    }

    pub fn zero() -> Self {
        Self::Univariate(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Univariate(t) => t.is_empty(),
            Self::Bivariate(t) => t.is_empty(),
        }
    }

    pub fn weight(&self) -> usize {
        match self {
            Self::Univariate(t) => t.len(),
            Self::Bivariate(t) => t.len(),
        }
    }

    /// Parses `0`, `1`, `x`, `x^k`, `y^k`, `x^a*y^b` (or `x^a y^b`) sums.
    pub fn parse(text: &str, lifts: &[usize]) -> Result<Self> {
        let bivariate = lifts.len() == 2;
        let mut uni = Vec::new();
        let mut bi = Vec::new();
        let cleaned = text.replace(char::is_whitespace, " ");
        for raw in cleaned.split('+') {
            let term = raw.trim();
            if term.is_empty() {
                return Err(Error::InvalidSpec(format!("empty term in polynomial `{text}`")));
            }
            if term == "0" {
                continue;
            }
            let (mut ex, mut ey) = (0usize, 0usize);
            if term != "1" {
                for factor in term.split(['*', ' ']).filter(|f| !f.is_empty()) {
                    let (var, exp) = match factor.split_once('^') {
                        Some((v, e)) => (
                            v.trim(),
                            e.trim().parse::<usize>().map_err(|_| {
                                Error::InvalidSpec(format!("bad exponent in `{factor}`"))
                            })?,
                        ),
                        None => (factor.trim(), 1),
                    };
                    match var {
                        "x" => ex += exp,
                        "y" if bivariate => ey += exp,
                        _ => {
                            return Err(Error::InvalidSpec(format!(
                                "unexpected factor `{factor}` in polynomial `{text}`"
                            )))
                        }
                    }
                }
            }
            if bivariate {
                bi.push((ex, ey));
            } else {
                uni.push(ex);
            }
        }
        Ok(match lifts {
            [l] => Self::univariate(uni, *l),
            [l, m] => Self::bivariate(bi, *l, *m),
            _ => return Err(Error::InvalidSpec("one or two lift sizes required".into())),
        })
    }
}

impl fmt::Display for PolynomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = match self {
            Self::Univariate(t) => t
                .iter()
                .map(|&k| match k {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    k => format!("x^{k}"),
                })
                .collect(),
            Self::Bivariate(t) => t
                .iter()
                .map(|&(a, b)| match (a, b) {
                    (0, 0) => "1".to_string(),
                    (a, 0) => format!("x^{a}"),
                    (0, b) => format!("y^{b}"),
                    (a, b) => format!("x^{a}*y^{b}"),
                })
                .collect(),
        };
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join("+"))
        }
    }
}

/// A grid of univariate polynomials, each standing for an `l x l` circulant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub block_rows: usize,
    pub block_cols: usize,
    pub lift: usize,
    /// Row-major entries; a zero polynomial is the all-zero block.
    pub entries: Vec<PolynomialSpec>,
}

impl BlockSpec {
    pub fn new(lift: usize, grid: Vec<Vec<PolynomialSpec>>) -> Result<Self> {
        let block_rows = grid.len();
        let block_cols = grid.first().map_or(0, Vec::len);
        if block_rows == 0 || block_cols == 0 {
            return Err(Error::InvalidSpec("empty block grid".into()));
        }
        if grid.iter().any(|r| r.len() != block_cols) {
            return Err(Error::InvalidSpec("ragged block grid".into()));
        }
        if lift == 0 {
            return Err(Error::InvalidSpec("lift size must be positive".into()));
        }
        Ok(Self {
            block_rows,
            block_cols,
            lift,
            entries: grid.into_iter().flatten().collect(),
        })
    }

    /// `poly · I_size`.
    pub fn diagonal(lift: usize, poly: PolynomialSpec, size: usize) -> Result<Self> {
        let grid = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| if i == j { poly.clone() } else { PolynomialSpec::zero() })
                    .collect()
            })
            .collect();
        Self::new(lift, grid)
    }

    pub fn entry(&self, r: usize, c: usize) -> &PolynomialSpec {
        &self.entries[r * self.block_cols + c]
    }
}

/// `l x l` circulant with a one at `(i, j)` iff `(j - i) mod l` is an exponent.
pub fn circulant(l: usize, spec: &PolynomialSpec) -> Result<BinaryMatrix> {
    let PolynomialSpec::Univariate(terms) = spec else {
        return Err(Error::InvalidSpec("circulant requires a univariate polynomial".into()));
    };
    let mut m = BinaryMatrix::zeros(l, l);
    for &k in terms {
        if k >= l {
            return Err(Error::InvalidSpec(format!("exponent {k} not below lift size {l}")));
        }
        for i in 0..l {
            m.toggle(i, (i + k) % l);
        }
    }
    Ok(m)
}

/// Replaces every entry of the grid by its circulant.
pub fn lift(spec: &BlockSpec) -> Result<BinaryMatrix> {
    if spec.entries.len() != spec.block_rows * spec.block_cols {
        return Err(Error::InvalidSpec("block grid size does not match dimensions".into()));
    }
    let l = spec.lift;
    let mut m = BinaryMatrix::zeros(spec.block_rows * l, spec.block_cols * l);
    for r in 0..spec.block_rows {
        for c in 0..spec.block_cols {
            let poly = spec.entry(r, c);
            if !poly.is_zero() {
                m.xor_block(r * l, c * l, &circulant(l, poly)?);
            }
        }
    }
    Ok(m)
}

/// Grid transpose with every term `x^k` mapped to `x^{l-k}`, so that
/// `lift(block_transpose(S)) = lift(S)ᵀ`.
pub fn block_transpose(spec: &BlockSpec) -> BlockSpec {
    let l = spec.lift;
    let mut entries = Vec::with_capacity(spec.entries.len());
    for c in 0..spec.block_cols {
        for r in 0..spec.block_rows {
            let t = match spec.entry(r, c) {
                PolynomialSpec::Univariate(terms) => {
                    PolynomialSpec::univariate(terms.iter().map(|&k| (l - k % l) % l), l)
                }
                other => other.clone(),
            };
            entries.push(t);
        }
    }
    BlockSpec {
        block_rows: spec.block_cols,
        block_cols: spec.block_rows,
        lift: l,
        entries,
    }
}

/// A validated CSS code. X errors are decoded against `hz`.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub name: String,
    pub hx: BinaryMatrix,
    pub hz: BinaryMatrix,
    pub n: usize,
    pub k: Option<usize>,
    pub distance_bounds: Option<(usize, usize)>,
    /// First column of the second circulant column block of `hz`.
    pub circulant_boundary: usize,
    /// Circulant size when both column blocks are quasi-cyclic with it.
    pub lift: Option<usize>,
}

impl CssCode {
    /// Wraps a raw matrix pair, checking `H_X H_Zᵀ = 0`.
    pub fn from_matrices(
        name: impl Into<String>,
        hx: BinaryMatrix,
        hz: BinaryMatrix,
        circulant_boundary: usize,
    ) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::DimensionMismatch {
                context: "H_X / H_Z column count",
                expected: hx.cols(),
                found: hz.cols(),
            });
        }
        if circulant_boundary > hx.cols() {
            return Err(Error::OutOfRange {
                index: circulant_boundary,
                limit: hx.cols(),
            });
        }
        let code = Self {
            name: name.into(),
            n: hx.cols(),
            hx,
            hz,
            k: None,
            distance_bounds: None,
            circulant_boundary,
            lift: None,
        };
        let report = validate_css(&code);
        if !report.commutes {
            return Err(Error::CssValidation(format!(
                "H_X H_Z^T has {} nonzero entries",
                report.commutator_weight
            )));
        }
        Ok(code)
    }

    pub fn with_lift(mut self, lift: usize) -> Self {
        self.lift = Some(lift);
        self
    }

    pub fn with_metadata(mut self, k: Option<usize>, distance_bounds: Option<(usize, usize)>) -> Self {
        self.k = k;
        self.distance_bounds = distance_bounds;
        self
    }
}

/// Generalized hypergraph product: `H_X = [A | B]`, `H_Z = [Bᵀ | Aᵀ]`.
pub fn ghp(a: &BlockSpec, b: &BlockSpec) -> Result<CssCode> {
    let la = lift(a)?;
    let lb = lift(b)?;
    if la.rows() != la.cols() || lb.rows() != lb.cols() || la.rows() != lb.rows() {
        return Err(Error::InvalidSpec(format!(
            "GHP needs square A and B of equal size, got {}x{} and {}x{}",
            la.rows(),
            la.cols(),
            lb.rows(),
            lb.cols()
        )));
    }
    if gf2_matmul(&la, &lb)? != gf2_matmul(&lb, &la)? {
        return Err(Error::CssValidation("lifted A and B do not commute".into()));
    }
    let hx = la.hstack(&lb)?;
    let hz = lift(&block_transpose(b))?.hstack(&lift(&block_transpose(a))?)?;
    let boundary = la.cols();
    Ok(CssCode::from_matrices("ghp", hx, hz, boundary)?.with_lift(a.lift))
}

/// Hypergraph product of two classical parity-check matrices.
pub fn hp(a1: &BinaryMatrix, a2: &BinaryMatrix) -> Result<CssCode> {
    let (m1, n1) = (a1.rows(), a1.cols());
    let (m2, n2) = (a2.rows(), a2.cols());
    let hx = a1
        .kron(&BinaryMatrix::identity(m2))
        .hstack(&BinaryMatrix::identity(m1).kron(a2))?;
    let hz = BinaryMatrix::identity(n1)
        .kron(&a2.transpose())
        .hstack(&a1.transpose().kron(&BinaryMatrix::identity(n2)))?;
    CssCode::from_matrices("hp", hx, hz, n1 * m2)
}

/// `lm x lm` matrix of a bivariate polynomial in `x = S_l ⊗ I_m`, `y = I_l ⊗ S_m`.
pub fn bivariate_circulant(l: usize, m: usize, spec: &PolynomialSpec) -> Result<BinaryMatrix> {
    let PolynomialSpec::Bivariate(terms) = spec else {
        return Err(Error::InvalidSpec("bivariate lift requires a bivariate polynomial".into()));
    };
    let mut out = BinaryMatrix::zeros(l * m, l * m);
    for &(a, b) in terms {
        if a >= l || b >= m {
            return Err(Error::InvalidSpec(format!("term x^{a}y^{b} outside lift ({l}, {m})")));
        }
        for i1 in 0..l {
            for i2 in 0..m {
                out.toggle(i1 * m + i2, ((i1 + a) % l) * m + (i2 + b) % m);
            }
        }
    }
    Ok(out)
}

/// Bivariate bicycle code: `H_X = [A | B]`, `H_Z = [Bᵀ | Aᵀ]`.
pub fn bb(l: usize, m: usize, a_poly: &PolynomialSpec, b_poly: &PolynomialSpec) -> Result<CssCode> {
    let a = bivariate_circulant(l, m, a_poly)?;
    let b = bivariate_circulant(l, m, b_poly)?;
    let hx = a.hstack(&b)?;
    let hz = b.transpose().hstack(&a.transpose())?;
    Ok(CssCode::from_matrices("bb", hx, hz, l * m)?.with_lift(m))
}

/// Result of [`validate_css`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssReport {
    pub commutes: bool,
    pub commutator_weight: usize,
    /// Column-degree histogram of `H_Z` (degree -> count).
    pub hz_col_degrees: BTreeMap<usize, usize>,
    pub hz_row_degrees: BTreeMap<usize, usize>,
    pub hx_col_degrees: BTreeMap<usize, usize>,
    pub hx_row_degrees: BTreeMap<usize, usize>,
}

impl CssReport {
    pub fn passed(&self) -> bool {
        self.commutes
    }
}

fn histogram(values: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

impl fmt::Display for CssReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_hist = |h: &BTreeMap<usize, usize>| {
            h.iter().map(|(d, c)| format!("{d}:{c}")).collect::<Vec<_>>().join(" ")
        };
        writeln!(f, "commutation: {}", if self.commutes { "pass" } else { "fail" })?;
        writeln!(f, "H_Z column degrees: {}", fmt_hist(&self.hz_col_degrees))?;
        writeln!(f, "H_Z row degrees: {}", fmt_hist(&self.hz_row_degrees))?;
        writeln!(f, "H_X column degrees: {}", fmt_hist(&self.hx_col_degrees))?;
        write!(f, "H_X row degrees: {}", fmt_hist(&self.hx_row_degrees))
    }
}

/// Checks `H_X H_Zᵀ = 0` and collects degree histograms. Never fails; the
/// report carries the verdict.
pub fn validate_css(code: &CssCode) -> CssReport {
    let commutator = if code.hx.cols() == code.hz.cols() {
        gf2_matmul(&code.hx, &code.hz.transpose()).ok()
    } else {
        None
    };
    let commutator_weight = commutator.as_ref().map_or(usize::MAX, BinaryMatrix::count_ones);
    CssReport {
        commutes: commutator_weight == 0,
        commutator_weight,
        hz_col_degrees: histogram(&code.hz.col_weights()),
        hz_row_degrees: histogram(&code.hz.row_weights()),
        hx_col_degrees: histogram(&code.hx.col_weights()),
        hx_row_degrees: histogram(&code.hx.row_weights()),
    }
}

/// The B1 generalized hypergraph product code (`l = 63`, n = 882).
pub fn b1() -> CssCode {
    let (a, b) = b1_blocks();
    ghp(&a, &b)
        .expect("B1 blocks commute")
        .named("B1")
        .with_metadata(Some(24), Some((18, 24)))
}

/// The `A` and `B` block specs of B1.
pub fn b1_blocks() -> (BlockSpec, BlockSpec) {
    const L: usize = 63;
    let grid = (0..7)
        .map(|i| {
            (0..7)
                .map(|j| {
                    // Row i carries x^27 on the diagonal, x^54 one block to
                    // the left and 1 two blocks to the left (cyclically).
                    match (i + 7 - j) % 7 {
                        0 => PolynomialSpec::univariate([27], L),
                        1 => PolynomialSpec::univariate([54], L),
                        2 => PolynomialSpec::univariate([0], L),
                        _ => PolynomialSpec::zero(),
                    }
                })
                .collect()
        })
        .collect();
    let a = BlockSpec::new(L, grid).expect("static grid");
    let b = BlockSpec::diagonal(L, PolynomialSpec::univariate([0, 1, 6], L), 7).expect("static grid");
    (a, b)
}

impl CssCode {
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

// ---------------------------------------------------------------------------
// Specification files.

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LiftField {
    One(usize),
    Two([usize; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GridField {
    Grid(Vec<Vec<String>>),
    Diagonal { diagonal: String, size: usize },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MatrixField {
    Path(String),
    Rows(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Metadata {
    k: Option<usize>,
    distance: Option<[usize; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    name: Option<String>,
    family: String,
    lift: Option<LiftField>,
    a: Option<toml::Value>,
    b: Option<toml::Value>,
    a1: Option<MatrixField>,
    a2: Option<MatrixField>,
    hx: Option<MatrixField>,
    hz: Option<MatrixField>,
    boundary: Option<usize>,
    metadata: Option<Metadata>,
}

fn field<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidSpec(format!("missing field `{name}`")))
}

fn parse_grid(value: toml::Value, lift: usize, name: &str) -> Result<BlockSpec> {
    let grid: GridField = value
        .try_into()
        .map_err(|e| Error::InvalidSpec(format!("field `{name}`: {e}")))?;
    match grid {
        GridField::Grid(rows) => {
            let parsed = rows
                .iter()
                .map(|row| row.iter().map(|p| PolynomialSpec::parse(p, &[lift])).collect())
                .collect::<Result<Vec<Vec<_>>>>()
                .map_err(|e| Error::InvalidSpec(format!("field `{name}`: {e}")))?;
            BlockSpec::new(lift, parsed)
        }
        GridField::Diagonal { diagonal, size } => {
            BlockSpec::diagonal(lift, PolynomialSpec::parse(&diagonal, &[lift])?, size)
        }
    }
}

fn load_matrix(field: MatrixField, base: &Path) -> Result<BinaryMatrix> {
    match field {
        MatrixField::Rows(rows) => {
            let text = rows.join("\n");
            BinaryMatrix::read_dense(text.as_bytes())
        }
        MatrixField::Path(p) => {
            let path = base.join(p);
            let file = std::io::BufReader::new(std::fs::File::open(&path)?);
            if path.extension().is_some_and(|e| e == "mtx") {
                BinaryMatrix::read_coordinate(file)
            } else {
                BinaryMatrix::read_dense(file)
            }
        }
    }
}

/// Parses a code specification (TOML). Relative matrix paths resolve
/// against `base_dir`.
pub fn parse_code_spec(text: &str, base_dir: &Path) -> Result<CssCode> {
    let spec: SpecFile = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
            .unwrap_or(0);
        Error::Parse {
            line,
            message: e.message().to_string(),
        }
    })?;
    let code = match spec.family.as_str() {
        "ghp" => {
            let LiftField::One(l) = field(spec.lift, "lift")? else {
                return Err(Error::InvalidSpec("ghp needs a single lift size".into()));
            };
            let a = parse_grid(field(spec.a, "a")?, l, "a")?;
            let b = parse_grid(field(spec.b, "b")?, l, "b")?;
            ghp(&a, &b)?
        }
        "bb" => {
            let LiftField::Two([l, m]) = field(spec.lift, "lift")? else {
                return Err(Error::InvalidSpec("bb needs two lift sizes `[l, m]`".into()));
            };
            let poly = |v: Option<toml::Value>, name: &str| -> Result<PolynomialSpec> {
                let s = field(v, name)?;
                let s = s
                    .as_str()
                    .ok_or_else(|| Error::InvalidSpec(format!("field `{name}` must be a string")))?;
                PolynomialSpec::parse(s, &[l, m])
            };
            bb(l, m, &poly(spec.a, "a")?, &poly(spec.b, "b")?)?
        }
        "hp" => {
            let a1 = load_matrix(field(spec.a1, "a1")?, base_dir)?;
            let a2 = load_matrix(field(spec.a2, "a2")?, base_dir)?;
            hp(&a1, &a2)?
        }
        "raw" => {
            let hx = load_matrix(field(spec.hx, "hx")?, base_dir)?;
            let hz = load_matrix(field(spec.hz, "hz")?, base_dir)?;
            let boundary = spec.boundary.unwrap_or(hz.cols() / 2);
            CssCode::from_matrices("raw", hx, hz, boundary)?
        }
        other => {
            return Err(Error::InvalidSpec(format!(
                "unknown family `{other}` (expected ghp, hp, bb or raw)"
            )))
        }
    };
    let code = match spec.name {
        Some(name) => code.named(name),
        None => code,
    };
    let meta = spec.metadata.unwrap_or(Metadata { k: None, distance: None });
    Ok(code.with_metadata(meta.k, meta.distance.map(|[lo, hi]| (lo, hi))))
}

/// Reads and parses a code specification file.
pub fn load_code_spec(path: &Path) -> Result<CssCode> {
    let text = std::fs::read_to_string(path)?;
    parse_code_spec(&text, path.parent().unwrap_or(Path::new(".")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Shift-and-XOR construction: sum of powers of the cyclic shift matrix.
    fn shift_oracle(l: usize, exps: &[usize]) -> BinaryMatrix {
        let mut shift = BinaryMatrix::zeros(l, l);
        for i in 0..l {
            shift.set(i, (i + 1) % l, true);
        }
        let mut acc = BinaryMatrix::zeros(l, l);
        for &k in exps {
            let mut p = BinaryMatrix::identity(l);
            for _ in 0..k {
                p = gf2_matmul(&p, &shift).unwrap();
            }
            acc.xor_block(0, 0, &p);
        }
        acc
    }

    #[test]
    fn circulant_identity_and_shifts() {
        assert_eq!(
            circulant(5, &PolynomialSpec::univariate([0], 5)).unwrap(),
            BinaryMatrix::identity(5)
        );
        let c = circulant(63, &PolynomialSpec::univariate([0, 1, 6], 63)).unwrap();
        assert_eq!(c.row_support(0), vec![0, 1, 6]);
        for r in 1..63 {
            let mut expect: Vec<usize> = [0, 1, 6].iter().map(|k| (r + k) % 63).collect();
            expect.sort();
            assert_eq!(c.row_support(r), expect);
        }
        assert_eq!(
            circulant(4, &PolynomialSpec::univariate([1, 3], 4)).unwrap(),
            shift_oracle(4, &[1, 3])
        );
        assert!(circulant(4, &PolynomialSpec::bivariate([(0, 0)], 2, 2)).is_err());
    }

    #[test]
    fn duplicate_terms_cancel() {
        assert_eq!(PolynomialSpec::univariate([1, 1, 3], 5), PolynomialSpec::Univariate(vec![3]));
        assert_eq!(PolynomialSpec::univariate([7], 5), PolynomialSpec::Univariate(vec![2]));
    }

    #[test]
    fn polynomial_parsing() {
        assert_eq!(
            PolynomialSpec::parse("1+x+x^6", &[63]).unwrap(),
            PolynomialSpec::Univariate(vec![0, 1, 6])
        );
        assert_eq!(PolynomialSpec::parse("0", &[63]).unwrap(), PolynomialSpec::zero());
        assert_eq!(
            PolynomialSpec::parse("x^3 + y^2 + x*y^7", &[12, 12]).unwrap(),
            PolynomialSpec::Bivariate(vec![(0, 2), (1, 7), (3, 0)])
        );
        assert!(PolynomialSpec::parse("x^a", &[5]).is_err());
        assert!(PolynomialSpec::parse("y", &[5]).is_err());
    }

    #[test]
    fn lift_small_cases() {
        let one = BlockSpec::new(3, vec![vec![PolynomialSpec::univariate([0], 3)]]).unwrap();
        assert_eq!(lift(&one).unwrap(), BinaryMatrix::identity(3));

        let grid = vec![
            vec![PolynomialSpec::univariate([1], 4), PolynomialSpec::zero()],
            vec![PolynomialSpec::univariate([0, 2], 4), PolynomialSpec::univariate([3], 4)],
        ];
        let spec = BlockSpec::new(4, grid).unwrap();
        let m = lift(&spec).unwrap();
        let mut oracle = BinaryMatrix::zeros(8, 8);
        oracle.xor_block(0, 0, &shift_oracle(4, &[1]));
        oracle.xor_block(4, 0, &shift_oracle(4, &[0, 2]));
        oracle.xor_block(4, 4, &shift_oracle(4, &[3]));
        assert_eq!(m, oracle);
    }

    #[test]
    fn ragged_grid_rejected() {
        let grid = vec![vec![PolynomialSpec::zero(); 2], vec![PolynomialSpec::zero()]];
        assert!(BlockSpec::new(3, grid).is_err());
    }

    #[test]
    fn block_transpose_cases() {
        let id = BlockSpec::new(7, vec![vec![PolynomialSpec::univariate([0], 7)]]).unwrap();
        assert_eq!(block_transpose(&id), id);

        let s27 = BlockSpec::new(63, vec![vec![PolynomialSpec::univariate([27], 63)]]).unwrap();
        let t = block_transpose(&s27);
        assert_eq!(t.entries[0], PolynomialSpec::Univariate(vec![36]));
        assert_eq!(lift(&t).unwrap(), lift(&s27).unwrap().transpose());

        let (a, _) = b1_blocks();
        assert_eq!(block_transpose(&block_transpose(&a)), a);
    }

    #[test]
    fn b1_construction() {
        let code = b1();
        assert_eq!(code.n, 882);
        assert_eq!(code.hz.rows(), 441);
        assert_eq!(code.hx.rows(), 441);
        assert_eq!(code.circulant_boundary, 441);
        let (a, _) = b1_blocks();
        let la = lift(&a).unwrap();
        assert!(la.row_weights().iter().all(|&w| w == 3));
        assert!(la.col_weights().iter().all(|&w| w == 3));
        let report = validate_css(&code);
        assert!(report.passed());
        assert_eq!(report.hz_col_degrees, BTreeMap::from([(3, 882)]));
        assert_eq!(report.hz_row_degrees, BTreeMap::from([(6, 441)]));
    }

    #[test]
    fn ghp_identity_blocks() {
        let id = BlockSpec::new(4, vec![vec![PolynomialSpec::univariate([0], 4)]]).unwrap();
        let code = ghp(&id, &id).unwrap();
        let expected = BinaryMatrix::identity(4).hstack(&BinaryMatrix::identity(4)).unwrap();
        assert_eq!(code.hx, expected);
        assert_eq!(code.hz, expected);
    }

    #[test]
    fn ghp_toy_commutes() {
        let a = BlockSpec::new(5, vec![vec![PolynomialSpec::univariate([0, 2], 5)]]).unwrap();
        let b = BlockSpec::new(5, vec![vec![PolynomialSpec::univariate([1, 3, 4], 5)]]).unwrap();
        let code = ghp(&a, &b).unwrap();
        // direct Eq. (2) check, independent of validate_css
        let prod = gf2_matmul(&code.hx, &code.hz.transpose()).unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn ghp_rejects_non_commuting() {
        let p = |e: usize| PolynomialSpec::univariate([e], 3);
        let z = PolynomialSpec::zero;
        let a = BlockSpec::new(3, vec![vec![p(0), p(0)], vec![z(), p(0)]]).unwrap();
        let b = BlockSpec::new(3, vec![vec![p(0), z()], vec![p(0), p(0)]]).unwrap();
        assert!(matches!(ghp(&a, &b), Err(Error::CssValidation(_))));
    }

    #[test]
    fn hp_small_cases() {
        let rep = BinaryMatrix::from_rows(&[[1u8, 1]]);
        let code = hp(&rep, &rep).unwrap();
        assert_eq!(code.n, 4);
        // Kronecker oracle: H_X = (a ⊗ I_1, I_1 ⊗ a) = [1 1 1 1]
        assert_eq!(code.hx, BinaryMatrix::from_rows(&[[1u8, 1, 1, 1]]));
        // H_Z = (I_2 ⊗ aᵀ, aᵀ ⊗ I_2)
        assert_eq!(
            code.hz,
            BinaryMatrix::from_rows(&[[1u8, 0, 1, 0], [1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 0, 1]])
        );

        let i2 = BinaryMatrix::identity(2);
        let code = hp(&i2, &i2).unwrap();
        let k = i2.kron(&i2);
        assert_eq!(code.hx, k.hstack(&k).unwrap());

        let a1 = BinaryMatrix::from_rows(&[[1u8, 1, 0], [0, 1, 1]]);
        let a2 = BinaryMatrix::from_rows(&[[1u8, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]]);
        let code = hp(&a1, &a2).unwrap();
        assert_eq!(code.n, 3 * 3 + 4 * 2);
        assert!(validate_css(&code).passed());
    }

    #[test]
    fn bb_small_cases() {
        let one = PolynomialSpec::bivariate([(0, 0)], 3, 3);
        let code = bb(3, 3, &one, &one).unwrap();
        let i = BinaryMatrix::identity(9);
        assert_eq!(code.hx, i.hstack(&i).unwrap());

        let a = PolynomialSpec::bivariate([(1, 0), (0, 1), (0, 2)], 3, 3);
        let b = PolynomialSpec::bivariate([(0, 1), (1, 0), (2, 0)], 3, 3);
        let code = bb(3, 3, &a, &b).unwrap();
        assert!(gf2_matmul(&code.hx, &code.hz.transpose()).unwrap().is_zero());
    }

    #[test]
    fn corrupted_code_fails_validation() {
        let mut code = b1();
        code.hx.toggle(0, 5);
        assert!(!validate_css(&code).passed());
    }

    #[test]
    fn spec_file_parsing() {
        let text = r#"
            name = "toy"
            family = "ghp"
            lift = 5
            a = [["1+x^2"]]
            b = { diagonal = "x+x^3+x^4", size = 1 }
            [metadata]
            distance = [2, 4]
        "#;
        let code = parse_code_spec(text, Path::new(".")).unwrap();
        assert_eq!(code.name, "toy");
        assert_eq!(code.n, 10);
        assert_eq!(code.distance_bounds, Some((2, 4)));

        let hp_text = r#"
            family = "hp"
            a1 = ["110", "011"]
            a2 = ["11"]
        "#;
        assert_eq!(parse_code_spec(hp_text, Path::new(".")).unwrap().n, 3 + 2 * 2);

        let bad = "family = \"ghp\"\nlift = 5\na = [[\"x^q\"]]\nb = [[\"1\"]]\n";
        assert!(parse_code_spec(bad, Path::new(".")).is_err());
        let bad_syntax = "family = \"ghp\"\nlift = = 5\n";
        match parse_code_spec(bad_syntax, Path::new(".")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn lift_commutes_with_block_transpose(
            l in 1usize..=16,
            rows in 1usize..4,
            cols in 1usize..4,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let grid = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| {
                            let w = rng.random_range(0..4);
                            PolynomialSpec::univariate((0..w).map(|_| rng.random_range(0..l)), l)
                        })
                        .collect()
                })
                .collect();
            let spec = BlockSpec::new(l, grid).unwrap();
            prop_assert_eq!(lift(&block_transpose(&spec)).unwrap(), lift(&spec).unwrap().transpose());
        }
    }
}
