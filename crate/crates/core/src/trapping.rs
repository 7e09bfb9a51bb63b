//! Trapping sets, fixed sets and symmetric stabilizers of a Tanner graph,
//! plus the parent-to-child expansion used to grow small structures into
//! the large ones that stall bit flipping.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{in_rowspace, row_reduce, BitVec, RowBasis};
use crate::tanner::{enumerate_cycles, induced, InducedSubgraph, TannerGraph};

/// An `(a, b)` trapping set: `a` variables whose induced subgraph has `b`
/// odd-degree checks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrappingSet {
    /// Sorted, without duplicates.
    pub var_set: Vec<usize>,
    pub a: usize,
    pub b: usize,
}

impl TrappingSet {
    pub fn label(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    /// Sorted indices separated by spaces.
    pub fn to_line(&self) -> String {
        self.var_set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn parse_line(line: &str) -> Result<Vec<usize>> {
        line.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidSpec(format!("bad variable index `{t}`")))
            })
            .collect()
    }
}

impl fmt::Display for TrappingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

pub fn classify(g: &TannerGraph, var_set: &[usize]) -> Result<TrappingSet> {
    if var_set.is_empty() {
        return Err(Error::EmptySet);
    }
    let sub = induced(g, var_set)?;
    Ok(from_induced(&sub))
}

fn from_induced(sub: &InducedSubgraph) -> TrappingSet {
    TrappingSet {
        a: sub.var_set.len(),
        b: sub.odd_checks().count(),
        var_set: sub.var_set.clone(),
    }
}

/// No member variable has more odd-degree than even-degree neighbouring
/// checks in the induced subgraph.
pub fn is_fixed_set(g: &TannerGraph, var_set: &[usize]) -> Result<bool> {
    if var_set.is_empty() {
        return Err(Error::EmptySet);
    }
    let sub = induced(g, var_set)?;
    Ok(sub.var_set.iter().all(|&v| {
        let odd = g.var_adj[v].iter().filter(|c| sub.check_degrees[c] % 2 == 1).count();
        2 * odd <= g.var_adj[v].len()
    }))
}

/// Largest set handed to the bipartition search.
pub const MAX_SYMMETRIC_SIZE: usize = 12;

/// Support of a stabilizer (`b = 0`, indicator in the row space of `H_X`)
/// that splits into two halves with isomorphic induced subgraphs.
///
/// Only two-way splits are searched, and only for sets of at most
/// [`MAX_SYMMETRIC_SIZE`] variables; larger sets report `false`.
pub fn is_symmetric_stabilizer(g: &TannerGraph, code: &CssCode, var_set: &[usize]) -> Result<bool> {
    let basis = row_reduce(&code.hx);
    is_symmetric_stabilizer_with(g, &basis, var_set)
}

/// As [`is_symmetric_stabilizer`] with a precomputed `H_X` row basis.
pub fn is_symmetric_stabilizer_with(g: &TannerGraph, hx_basis: &RowBasis, var_set: &[usize]) -> Result<bool> {
    let ts = classify(g, var_set)?;
    if ts.b != 0 || ts.a % 2 == 1 || ts.a > MAX_SYMMETRIC_SIZE {
        return Ok(false);
    }
    if !in_rowspace(hx_basis, &BitVec::from_support(g.n, &ts.var_set))? {
        return Ok(false);
    }
    Ok(symmetric_split(g, &ts.var_set).is_some())
}

/// First two-way split of `vars` (lowest mask order, first element always in
/// the left half) with isomorphic halves.
pub fn symmetric_split(g: &TannerGraph, vars: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let a = vars.len();
    if a == 0 || a % 2 == 1 || a > MAX_SYMMETRIC_SIZE {
        return None;
    }
    let half = a / 2;
    for mask in 0u32..(1 << a) {
        if mask & 1 == 0 || mask.count_ones() as usize != half {
            continue;
        }
        let (left, right): (Vec<usize>, Vec<usize>) =
            (0..a).partition(|&i| mask >> i & 1 == 1);
        let left: Vec<usize> = left.into_iter().map(|i| vars[i]).collect();
        let right: Vec<usize> = right.into_iter().map(|i| vars[i]).collect();
        if isomorphic_induced(g, &left, &right) {
            return Some((left, right));
        }
    }
    None
}

/// Isomorphism of the induced subgraphs of two equal-size variable sets:
/// some bijection maps the family of check neighbourhoods of one onto the
/// other (as multisets).
fn isomorphic_induced(g: &TannerGraph, left: &[usize], right: &[usize]) -> bool {
    let families = |set: &[usize]| -> Vec<Vec<usize>> {
        // check -> positions of its neighbours inside `set`
        let mut by_check: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &v) in set.iter().enumerate() {
            for &c in &g.var_adj[v] {
                by_check.entry(c).or_default().push(i);
            }
        }
        by_check.into_values().collect()
    };
    let fl = families(left);
    let fr = families(right);
    if fl.len() != fr.len() {
        return false;
    }
    let degree_seq = |fam: &[Vec<usize>], k: usize| {
        let mut d = vec![0usize; k];
        for edge in fam {
            for &i in edge {
                d[i] += 1;
            }
        }
        d.sort_unstable();
        d
    };
    let k = left.len();
    if degree_seq(&fl, k) != degree_seq(&fr, k) {
        return false;
    }
    let mut check_sizes_l: Vec<usize> = fl.iter().map(Vec::len).collect();
    let mut check_sizes_r: Vec<usize> = fr.iter().map(Vec::len).collect();
    check_sizes_l.sort_unstable();
    check_sizes_r.sort_unstable();
    if check_sizes_l != check_sizes_r {
        return false;
    }
    let mut target: Vec<Vec<usize>> = fr;
    target.sort();
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let mut mapped: Vec<Vec<usize>> = fl
            .iter()
            .map(|e| {
                let mut m: Vec<usize> = e.iter().map(|&i| perm[i]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        mapped.sort();
        if mapped == target {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// One expansion step from a parent structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionTrace {
    pub parent: TrappingSet,
    /// Distinct children, ordered by the added variable.
    pub children: Vec<TrappingSet>,
    /// Degree of the partner check that produced the children.
    pub partner_degree: Option<usize>,
    pub terminal: bool,
}

pub const DEFAULT_MAX_SIZE: usize = 64;

/// Adds one outside variable shared by a degree-1 check of the parent and a
/// second check of degree k, taking the smallest k >= 1 for which such a
/// variable exists. When no degree-1 check shares an outside variable with
/// any other check of the parent, every outside neighbour of a degree-1
/// check becomes a child (partner degree 0). Terminal when no degree-1 check
/// is left or the parent has `max_size` variables.
pub fn expand_children(g: &TannerGraph, parent: &TrappingSet, max_size: usize) -> Result<ExpansionTrace> {
    let sub = induced(g, &parent.var_set)?;
    let degree_one: Vec<usize> = sub.checks_of_degree(1).collect();
    if degree_one.is_empty() || parent.var_set.len() >= max_size {
        return Ok(ExpansionTrace {
            parent: parent.clone(),
            children: Vec::new(),
            partner_degree: None,
            terminal: true,
        });
    }
    let inside: BTreeSet<usize> = parent.var_set.iter().copied().collect();
    let outside_neighbours: BTreeSet<usize> = degree_one
        .iter()
        .flat_map(|&c| g.check_adj[c].iter().copied())
        .filter(|v| !inside.contains(v))
        .collect();
    let partner = |v: usize, c1: usize| {
        g.var_adj[v]
            .iter()
            .filter(|&&c2| c2 != c1)
            .filter_map(|c2| sub.check_degrees.get(c2).copied())
            .min()
    };
    // smallest partner degree each outside neighbour can offer
    let mut best: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in &outside_neighbours {
        let k = g.var_adj[v]
            .iter()
            .filter(|c| sub.check_degrees.get(c) == Some(&1))
            .filter_map(|&c1| partner(v, c1))
            .min()
            .unwrap_or(0);
        best.entry(k).or_default().push(v);
    }
    let (k, added) = best
        .iter()
        .find(|(k, _)| **k > 0)
        .or_else(|| best.iter().next())
        .map(|(k, vs)| (*k, vs.clone()))
        .unwrap_or((0, Vec::new()));
    let children = added
        .into_iter()
        .map(|v| {
            let mut vars = parent.var_set.clone();
            vars.push(v);
            classify(g, &vars)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpansionTrace {
        parent: parent.clone(),
        terminal: children.is_empty(),
        partner_degree: Some(k),
        children,
    })
}

/// Follows the first child at every step until a terminal structure.
/// Returns the whole path, parent first.
pub fn expand_to_terminal(g: &TannerGraph, parent: &TrappingSet, max_size: usize) -> Result<Vec<TrappingSet>> {
    grow(g, parent, max_size, Growth::FirstChild)
}

/// How a growth path picks among the children of one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Growth {
    /// Lowest added variable.
    FirstChild,
    /// All added variables of the step at once.
    Union,
}

/// Repeats [`expand_children`] until a terminal structure; returns the path.
pub fn grow(g: &TannerGraph, parent: &TrappingSet, max_size: usize, growth: Growth) -> Result<Vec<TrappingSet>> {
    let mut path = vec![parent.clone()];
    loop {
        let step = expand_children(g, path.last().expect("nonempty"), max_size)?;
        if step.terminal {
            return Ok(path);
        }
        let next = match growth {
            Growth::FirstChild => step.children.into_iter().next().expect("non-terminal step has children"),
            Growth::Union => {
                let mut vars = step.parent.var_set.clone();
                vars.extend(step.children.iter().flat_map(|c| c.var_set.iter().copied()));
                vars.sort_unstable();
                vars.dedup();
                vars.truncate(vars.len().min(max_size.max(step.parent.a + 1)));
                classify(g, &vars)?
            }
        };
        path.push(next);
    }
}

/// Grows with [`Growth::Union`]; at a terminal structure that still has
/// checks with outside neighbours (a stopping set smaller than its
/// component) it adds the outside neighbours of the lowest-degree such
/// checks and carries on. Ends at a structure closed in `g`, or at
/// `max_size`.
pub fn grow_to_closure(g: &TannerGraph, parent: &TrappingSet, max_size: usize) -> Result<Vec<TrappingSet>> {
    let mut path = vec![parent.clone()];
    loop {
        let tail = grow(g, path.last().expect("nonempty"), max_size, Growth::Union)?;
        path.extend(tail.into_iter().skip(1));
        let last = path.last().expect("nonempty");
        if last.a >= max_size {
            return Ok(path);
        }
        let sub = induced(g, &last.var_set)?;
        let inside: BTreeSet<usize> = last.var_set.iter().copied().collect();
        let mut open: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (&c, &d) in &sub.check_degrees {
            for &v in &g.check_adj[c] {
                if !inside.contains(&v) {
                    open.entry(d).or_default().insert(v);
                }
            }
        }
        match open.into_iter().next() {
            None => return Ok(path),
            Some((_, added)) => {
                let mut vars = last.var_set.clone();
                vars.extend(added);
                vars.sort_unstable();
                vars.truncate(max_size);
                path.push(classify(g, &vars)?);
            }
        }
    }
}

/// Every terminal structure reachable from `parent` along any branch.
pub fn terminal_descendants(g: &TannerGraph, parent: &TrappingSet, max_size: usize) -> Result<BTreeSet<TrappingSet>> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier = vec![parent.clone()];
    let mut out = BTreeSet::new();
    while let Some(ts) = frontier.pop() {
        if !seen.insert(ts.var_set.clone()) {
            continue;
        }
        let step = expand_children(g, &ts, max_size)?;
        if step.terminal {
            out.insert(ts);
        } else {
            frontier.extend(step.children);
        }
    }
    Ok(out)
}

/// Structures found from the short cycles of a graph.
#[derive(Clone, Debug)]
pub struct Census {
    pub six_cycles: usize,
    pub eight_cycles: usize,
    /// Distinct terminal structures grown from the 6-cycles, by label.
    pub from_six_cycles: BTreeMap<(usize, usize), Vec<TrappingSet>>,
    /// Distinct `b = 0` terminal structures grown from the 8-cycles.
    pub zero_syndrome: Vec<TrappingSet>,
    /// The subset of `zero_syndrome` passing the symmetric-stabilizer test.
    pub symmetric_stabilizers: Vec<TrappingSet>,
    /// Number of symmetric stabilizers containing each variable.
    pub stabilizer_membership: Vec<usize>,
}

impl Census {
    /// Structures of one label grown from 6-cycles.
    pub fn structures(&self, a: usize, b: usize) -> &[TrappingSet] {
        self.from_six_cycles.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// One line per label: `a b count`.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .from_six_cycles
            .iter()
            .map(|((a, b), v)| format!("({a},{b}) {}", v.len()))
            .collect();
        lines.push(format!("symmetric-stabilizers {}", self.symmetric_stabilizers.len()));
        lines
    }
}

/// Grows every 6-cycle to a terminal structure along the first-child path
/// and every 8-cycle along all branches up to `stabilizer_size` variables,
/// keeping the zero-syndrome ones.
pub fn census(g: &TannerGraph, code: &CssCode, max_size: usize, stabilizer_size: usize) -> Result<Census> {
    let six = enumerate_cycles(g, 6);
    let boundary = code.circulant_boundary.min(g.n);
    let left = g.column_restricted(0..boundary);
    let right = g.column_restricted(boundary..g.n);
    let mut grown: BTreeSet<TrappingSet> = BTreeSet::new();
    let mut visited_roots: BTreeSet<Vec<usize>> = BTreeSet::new();
    for cycle in &six {
        let root = classify(g, &cycle.variables())?;
        if !visited_roots.insert(root.var_set.clone()) {
            continue;
        }
        let block = if root.var_set.iter().all(|&v| v < boundary) {
            &left
        } else if root.var_set.iter().all(|&v| v >= boundary) {
            &right
        } else {
            g
        };
        let path = grow_to_closure(block, &root, max_size)?;
        grown.insert(path.last().expect("nonempty").clone());
    }
    let mut from_six_cycles: BTreeMap<(usize, usize), Vec<TrappingSet>> = BTreeMap::new();
    for ts in grown {
        from_six_cycles.entry(ts.label()).or_default().push(ts);
    }

    let eight = enumerate_cycles(g, 8);
    let mut zero: BTreeSet<TrappingSet> = BTreeSet::new();
    visited_roots.clear();
    for cycle in &eight {
        let root = classify(g, &cycle.variables())?;
        if !visited_roots.insert(root.var_set.clone()) {
            continue;
        }
        for ts in terminal_descendants(g, &root, stabilizer_size)? {
            if ts.b == 0 {
                zero.insert(ts);
            }
        }
    }
    let basis = row_reduce(&code.hx);
    let mut symmetric = Vec::new();
    let mut membership = vec![0; g.n];
    for ts in &zero {
        if is_symmetric_stabilizer_with(g, &basis, &ts.var_set)? {
            for &v in &ts.var_set {
                membership[v] += 1;
            }
            symmetric.push(ts.clone());
        }
    }
    Ok(Census {
        six_cycles: six.len(),
        eight_cycles: eight.len(),
        from_six_cycles,
        zero_syndrome: zero.into_iter().collect(),
        symmetric_stabilizers: symmetric,
        stabilizer_membership: membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BinaryMatrix;
    use crate::tanner::build_graph;

    fn six_cycle_graph() -> TannerGraph {
        build_graph(&BinaryMatrix::from_rows(&[
            [1u8, 1, 0],
            [0, 1, 1],
            [1, 0, 1],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
        ]))
    }

    #[test]
    fn classify_small_sets() {
        let g = six_cycle_graph();
        assert_eq!(classify(&g, &[1]).unwrap().label(), (1, 3));
        assert_eq!(classify(&g, &[2, 0, 1]).unwrap().label(), (3, 3));
        assert_eq!(classify(&g, &[2, 0, 1]).unwrap().var_set, vec![0, 1, 2]);
        assert!(matches!(classify(&g, &[]), Err(Error::EmptySet)));
        assert!(classify(&g, &[7]).is_err());
    }

    #[test]
    fn fixed_sets() {
        let g = six_cycle_graph();
        assert!(!is_fixed_set(&g, &[0]).unwrap());
        assert!(is_fixed_set(&g, &[0, 1, 2]).unwrap());
        assert!(!is_fixed_set(&g, &[0, 1]).unwrap());
    }

    #[test]
    fn permutations_enumerated() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }

    #[test]
    fn isomorphism_detects_relabeling() {
        // two disjoint copies of the same small structure sharing no checks
        let h = BinaryMatrix::from_rows(&[
            [1u8, 1, 0, 0],
            [1, 0, 0, 0],
            [0, 0, 1, 1],
            [0, 0, 0, 1],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
        ]);
        let g = build_graph(&h);
        assert!(isomorphic_induced(&g, &[0, 1], &[3, 2]));
        // all checks become pendant
        assert!(isomorphic_induced(&g, &[0, 2], &[1, 3]));
        let h2 = BinaryMatrix::from_rows(&[[1u8, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 1]]);
        assert!(!isomorphic_induced(&build_graph(&h2), &[0, 1], &[2, 3]));
    }

    #[test]
    fn expansion_on_chain() {
        // path of checks: v0-c0-v1-c1-v2 with pendant checks; degree-1
        // checks of {v0} are shared with v1 only through c0
        let h = BinaryMatrix::from_rows(&[[1u8, 1, 0], [0, 1, 1], [1, 0, 0], [0, 0, 1]]);
        let g = build_graph(&h);
        let root = classify(&g, &[0]).unwrap();
        let step = expand_children(&g, &root, 10).unwrap();
        assert!(!step.terminal);
        assert_eq!(step.children.len(), 1);
        assert_eq!(step.children[0].var_set, vec![0, 1]);
        let path = expand_to_terminal(&g, &root, 10).unwrap();
        assert_eq!(path.last().unwrap().var_set, vec![0, 1, 2]);
        let capped = expand_to_terminal(&g, &root, 2).unwrap();
        assert_eq!(capped.last().unwrap().a, 2);
    }
}
