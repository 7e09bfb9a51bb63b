//! Node states and update rules of two-bit bit flipping.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Two-bit variable state: MSB is the hard decision, LSB the strength
/// (1 = strong).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarState(u8);

impl VarState {
    pub const WEAK_ZERO: Self = Self(0b00);
    pub const STRONG_ZERO: Self = Self(0b01);
    pub const WEAK_ONE: Self = Self(0b10);
    pub const STRONG_ONE: Self = Self(0b11);

    /// Row order used by the published Ψ tables.
    pub const TABLE_ORDER: [Self; 4] = [Self::STRONG_ZERO, Self::WEAK_ZERO, Self::STRONG_ONE, Self::WEAK_ONE];

    pub const fn new(bits: u8) -> Self {
        Self(bits & 0b11)
    }

    #[inline]
    pub const fn bits(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn value(self) -> u8 {
        self.0 >> 1
    }

    #[inline]
    pub const fn is_strong(self) -> bool {
        self.0 & 1 == 1
    }

    /// Same hard decision, strength cleared.
    #[inline]
    pub const fn weakened(self) -> Self {
        Self(self.0 & 0b10)
    }
}

impl fmt::Display for VarState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

impl fmt::Debug for VarState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarState({:02b})", self.0)
    }
}

impl FromStr for VarState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(Self::WEAK_ZERO),
            "01" => Ok(Self::STRONG_ZERO),
            "10" => Ok(Self::WEAK_ONE),
            "11" => Ok(Self::STRONG_ONE),
            other => Err(Error::InvalidSpec(format!("bad variable state `{other}`"))),
        }
    }
}

/// Residual value of a check together with whether it changed this iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckState {
    ZeroOld,
    ZeroNew,
    OneOld,
    OneNew,
}

impl CheckState {
    pub fn is_satisfied(self) -> bool {
        matches!(self, Self::ZeroOld | Self::ZeroNew)
    }

    pub fn is_new(self) -> bool {
        matches!(self, Self::ZeroNew | Self::OneNew)
    }
}

/// Check update from the previous and current residual bits.
pub fn phi(r_prev: u8, r_cur: u8) -> CheckState {
    match (r_prev & 1, r_cur & 1) {
        (0, 0) => CheckState::ZeroOld,
        (0, _) => CheckState::OneNew,
        (_, 0) => CheckState::ZeroNew,
        _ => CheckState::OneOld,
    }
}

/// Initial check states; `new_flag` selects the "new" variants.
pub fn init_checks(syndrome: &[u8], new_flag: bool) -> Vec<CheckState> {
    syndrome
        .iter()
        .map(|&s| match (s != 0, new_flag) {
            (false, false) => CheckState::ZeroOld,
            (false, true) => CheckState::ZeroNew,
            (true, false) => CheckState::OneOld,
            (true, true) => CheckState::OneNew,
        })
        .collect()
}

/// Counts of previously satisfied, newly satisfied and previously
/// unsatisfied neighbours. Newly unsatisfied neighbours are implied by the
/// variable degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CheckTuple {
    pub zero_old: u8,
    pub zero_new: u8,
    pub one_old: u8,
}

impl CheckTuple {
    pub const fn new(zero_old: u8, zero_new: u8, one_old: u8) -> Self {
        Self {
            zero_old,
            zero_new,
            one_old,
        }
    }

    pub fn from_states(states: &[CheckState]) -> Self {
        let mut t = Self::new(0, 0, 0);
        for s in states {
            match s {
                CheckState::ZeroOld => t.zero_old += 1,
                CheckState::ZeroNew => t.zero_new += 1,
                CheckState::OneOld => t.one_old += 1,
                CheckState::OneNew => {}
            }
        }
        t
    }

    pub const fn sum(self) -> u8 {
        self.zero_old + self.zero_new + self.one_old
    }
}

/// Ψ: next variable state from the current state and the number of
/// unsatisfied neighbours (0..=3).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PsiTable {
    /// Indexed by `[state bits][unsatisfied count]`.
    next: [[VarState; 4]; 4],
}

impl PsiTable {
    /// Builds a table from rows in published order (01, 00, 11, 10), columns
    /// for 0..=3 unsatisfied checks.
    pub const fn from_published_rows(rows: [[u8; 4]; 4]) -> Self {
        let mut next = [[VarState::WEAK_ZERO; 4]; 4];
        let order = VarState::TABLE_ORDER;
        let mut i = 0;
        while i < 4 {
            let mut j = 0;
            while j < 4 {
                next[order[i].bits() as usize][j] = VarState::new(rows[i][j]);
                j += 1;
            }
            i += 1;
        }
        Self { next }
    }

    /// The base rule used by most decoders.
    pub const TABLE_I: Self = Self::from_published_rows([
        [0b01, 0b01, 0b00, 0b11],
        [0b01, 0b10, 0b11, 0b11],
        [0b11, 0b11, 0b10, 0b01],
        [0b11, 0b00, 0b01, 0b01],
    ]);

    /// The conservative rule applied to one circulant block to break
    /// symmetric-stabilizer deadlocks: strong bits with three unsatisfied
    /// checks are only weakened.
    pub const TABLE_III: Self = Self::from_published_rows([
        [0b01, 0b01, 0b00, 0b00],
        [0b01, 0b10, 0b11, 0b11],
        [0b11, 0b11, 0b10, 0b10],
        [0b11, 0b00, 0b01, 0b01],
    ]);

    /// Plain majority flipping for degree-3 variables; strength is carried
    /// along but never consulted.
    pub const MAJORITY: Self = Self::from_published_rows([
        [0b01, 0b01, 0b11, 0b11],
        [0b00, 0b00, 0b10, 0b10],
        [0b11, 0b11, 0b01, 0b01],
        [0b10, 0b10, 0b00, 0b00],
    ]);

    #[inline]
    pub fn apply(&self, w: VarState, unsatisfied: u8) -> VarState {
        self.next[w.bits() as usize][unsatisfied.min(3) as usize]
    }

    /// Rows in published order, as 16 two-bit strings.
    pub fn to_published_string(&self) -> String {
        VarState::TABLE_ORDER
            .iter()
            .flat_map(|w| (0..4).map(move |c| self.apply(*w, c).to_string()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_published(text: &str) -> Result<Self> {
        let entries: Vec<VarState> = text
            .split_whitespace()
            .map(VarState::from_str)
            .collect::<Result<_>>()?;
        if entries.len() != 16 {
            return Err(Error::InvalidSpec(format!(
                "Ψ table needs 16 entries, found {}",
                entries.len()
            )));
        }
        let mut rows = [[0u8; 4]; 4];
        for (i, e) in entries.iter().enumerate() {
            rows[i / 4][i % 4] = e.bits();
        }
        Ok(Self::from_published_rows(rows))
    }
}

impl fmt::Debug for PsiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PsiTable[{}]", self.to_published_string())
    }
}

/// The ten decoder flags
/// `(I_Δv, I_Δc, W012, W120, W200, W201, W101, W021, W011, W020)`.
///
/// Stored as a 10-bit integer whose most significant bit is `I_Δv`, so the
/// integer order matches reading the tuple as a binary number.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVector(u16);

/// Position of each flag in the tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Flag {
    InitWeakVars = 0,
    InitNewChecks = 1,
    W012 = 2,
    W120 = 3,
    W200 = 4,
    W201 = 5,
    W101 = 6,
    W021 = 7,
    W011 = 8,
    W020 = 9,
}

/// How a listed tuple is treated when its flag is set or clear.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Override {
    /// set: keep state, clear: Ψ
    HoldOrPsi,
    /// set: weaken, clear: keep state
    WeakenOrHold,
    /// set: weaken, clear: Ψ
    WeakenOrPsi,
}

const OVERRIDES: [(CheckTuple, Flag, Override); 8] = [
    (CheckTuple::new(0, 1, 2), Flag::W012, Override::HoldOrPsi),
    (CheckTuple::new(1, 2, 0), Flag::W120, Override::WeakenOrHold),
    (CheckTuple::new(2, 0, 0), Flag::W200, Override::WeakenOrHold),
    (CheckTuple::new(2, 0, 1), Flag::W201, Override::WeakenOrPsi),
    (CheckTuple::new(1, 0, 1), Flag::W101, Override::WeakenOrPsi),
    (CheckTuple::new(0, 2, 1), Flag::W021, Override::WeakenOrPsi),
    (CheckTuple::new(0, 1, 1), Flag::W011, Override::WeakenOrPsi),
    (CheckTuple::new(0, 2, 0), Flag::W020, Override::WeakenOrPsi),
];

impl FVector {
    pub const COUNT: u16 = 1024;

    pub fn from_index(index: u16) -> Self {
        assert!(index < Self::COUNT, "f-vector index out of range");
        Self(index)
    }

    pub const fn from_flags(flags: [u8; 10]) -> Self {
        let mut v = 0u16;
        let mut i = 0;
        while i < 10 {
            v = (v << 1) | (flags[i] & 1) as u16;
            i += 1;
        }
        Self(v)
    }

    pub const fn index(self) -> u16 {
        self.0
    }

    pub fn flags(self) -> [u8; 10] {
        let mut out = [0u8; 10];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = ((self.0 >> (9 - i)) & 1) as u8;
        }
        out
    }

    #[inline]
    pub fn get(self, flag: Flag) -> bool {
        (self.0 >> (9 - flag as u8)) & 1 == 1
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..Self::COUNT).map(Self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bits: Vec<u8> = text
            .chars()
            .filter(|c| c.is_ascii_digit())
            .map(|c| c as u8 - b'0')
            .collect();
        if bits.len() != 10 || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidSpec(format!("f-vector must be 10 binary digits: `{text}`")));
        }
        let mut flags = [0u8; 10];
        flags.copy_from_slice(&bits);
        Ok(Self::from_flags(flags))
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.flags() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FVector({self})")
    }
}

/// Variable update. `unsatisfied` is the total count of unsatisfied
/// neighbours; the tuple's implied newly-unsatisfied count is
/// `unsatisfied - tuple.one_old`, and the implied degree may not exceed 3.
pub fn var_update(
    w: VarState,
    tuple: CheckTuple,
    unsatisfied: u8,
    f: FVector,
    psi: &PsiTable,
) -> Result<VarState> {
    let bad = || {
        Error::InvalidTuple(
            tuple.zero_old,
            tuple.zero_new,
            tuple.one_old,
            tuple.sum() + unsatisfied.saturating_sub(tuple.one_old),
        )
    };
    if unsatisfied < tuple.one_old || unsatisfied > 3 {
        return Err(bad());
    }
    if tuple.sum() + (unsatisfied - tuple.one_old) > 3 {
        return Err(bad());
    }
    Ok(var_update_unchecked(w, tuple, unsatisfied, f, psi))
}

#[inline]
pub(crate) fn var_update_unchecked(
    w: VarState,
    tuple: CheckTuple,
    unsatisfied: u8,
    f: FVector,
    psi: &PsiTable,
) -> VarState {
    for (listed, flag, rule) in OVERRIDES {
        if tuple == listed {
            let set = f.get(flag);
            return match (rule, set) {
                (Override::HoldOrPsi, true) => w,
                (Override::WeakenOrHold, false) => w,
                (Override::WeakenOrHold, true) | (Override::WeakenOrPsi, true) => w.weakened(),
                (Override::HoldOrPsi, false) | (Override::WeakenOrPsi, false) => psi.apply(w, unsatisfied),
            };
        }
    }
    psi.apply(w, unsatisfied)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL_STATES: [VarState; 4] = [
        VarState::WEAK_ZERO,
        VarState::STRONG_ZERO,
        VarState::WEAK_ONE,
        VarState::STRONG_ONE,
    ];

    fn degree3_tuples() -> Vec<(CheckTuple, u8)> {
        let mut out = Vec::new();
        for a in 0..=3u8 {
            for b in 0..=(3 - a) {
                for c in 0..=(3 - a - b) {
                    let new_unsat = 3 - a - b - c;
                    out.push((CheckTuple::new(a, b, c), c + new_unsat));
                }
            }
        }
        out
    }

    #[test]
    fn phi_truth_table() {
        assert_eq!(phi(0, 0), CheckState::ZeroOld);
        assert_eq!(phi(0, 1), CheckState::OneNew);
        assert_eq!(phi(1, 0), CheckState::ZeroNew);
        assert_eq!(phi(1, 1), CheckState::OneOld);
    }

    #[test]
    fn check_initialisation() {
        assert_eq!(init_checks(&[1], false), vec![CheckState::OneOld]);
        assert_eq!(init_checks(&[0], true), vec![CheckState::ZeroNew]);
        for flag in [false, true] {
            assert!(init_checks(&[0; 5], flag).iter().all(|s| s.is_satisfied()));
        }
    }

    #[test]
    fn table_i_entries() {
        let t = PsiTable::TABLE_I;
        assert_eq!(t.apply(VarState::WEAK_ZERO, 2), VarState::STRONG_ONE);
        assert_eq!(t.apply(VarState::WEAK_ONE, 3), VarState::STRONG_ZERO);
        assert_eq!(
            t.to_published_string(),
            "01 01 00 11 01 10 11 11 11 11 10 01 11 00 01 01"
        );
        assert_eq!(PsiTable::parse_published(&t.to_published_string()).unwrap(), t);
        assert_eq!(PsiTable::TABLE_III.apply(VarState::STRONG_ZERO, 3), VarState::WEAK_ZERO);
        assert!(PsiTable::parse_published("01 01").is_err());
    }

    #[test]
    fn published_update_examples() {
        let any = FVector::from_index(0x2ab);
        assert_eq!(
            var_update(VarState::WEAK_ZERO, CheckTuple::new(0, 0, 0), 2, any, &PsiTable::TABLE_I).unwrap(),
            VarState::STRONG_ONE
        );
        let w200_clear = FVector::from_flags([0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(
            var_update(VarState::STRONG_ZERO, CheckTuple::new(2, 0, 0), 1, w200_clear, &PsiTable::TABLE_I)
                .unwrap(),
            VarState::STRONG_ZERO
        );
        let w101_set = FVector::from_flags([0, 0, 0, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(
            var_update(VarState::STRONG_ONE, CheckTuple::new(1, 0, 1), 2, w101_set, &PsiTable::TABLE_I).unwrap(),
            VarState::WEAK_ONE
        );
        assert_eq!(
            var_update(VarState::WEAK_ONE, CheckTuple::new(0, 0, 0), 3, w200_clear, &PsiTable::TABLE_I).unwrap(),
            VarState::STRONG_ZERO
        );
    }

    #[test]
    fn invalid_tuples_rejected() {
        let f = FVector::from_index(0);
        let psi = PsiTable::TABLE_I;
        assert!(var_update(VarState::WEAK_ZERO, CheckTuple::new(2, 2, 0), 0, f, &psi).is_err());
        assert!(var_update(VarState::WEAK_ZERO, CheckTuple::new(0, 0, 2), 1, f, &psi).is_err());
        assert!(var_update(VarState::WEAK_ZERO, CheckTuple::new(1, 1, 0), 2, f, &psi).is_err());
    }

    /// The base rule: hold at (2,0,0), weaken at (1,0,1), Ψ elsewhere.
    #[test]
    fn base_rule_is_an_f_instance() {
        let f = FVector::from_flags([0, 0, 0, 0, 0, 0, 1, 0, 0, 0]);
        let psi = PsiTable::TABLE_I;
        for w in ALL_STATES {
            for (t, unsat) in degree3_tuples() {
                let expected = if t == CheckTuple::new(2, 0, 0) {
                    w
                } else if t == CheckTuple::new(1, 0, 1) {
                    if w.value() == 0 {
                        VarState::WEAK_ZERO
                    } else {
                        VarState::WEAK_ONE
                    }
                } else if t == CheckTuple::new(1, 2, 0) {
                    // W120 clear keeps the state; Ψ at zero unsatisfied agrees
                    // except for weak states, which the hold preserves.
                    w
                } else {
                    psi.apply(w, unsat)
                };
                assert_eq!(var_update(w, t, unsat, f, &psi).unwrap(), expected, "{w} {t:?}");
            }
        }
    }

    #[test]
    fn flag_semantics() {
        let psi = PsiTable::TABLE_I;
        let with = |flag: Flag| {
            let mut flags = [0u8; 10];
            flags[flag as usize] = 1;
            FVector::from_flags(flags)
        };
        let none = FVector::from_index(0);
        let w = VarState::STRONG_ZERO;
        // W012: hold vs Ψ
        let t = CheckTuple::new(0, 1, 2);
        assert_eq!(var_update(w, t, 2, with(Flag::W012), &psi).unwrap(), w);
        assert_eq!(var_update(w, t, 2, none, &psi).unwrap(), psi.apply(w, 2));
        // W120: weaken vs hold
        let t = CheckTuple::new(1, 2, 0);
        assert_eq!(var_update(w, t, 0, with(Flag::W120), &psi).unwrap(), VarState::WEAK_ZERO);
        assert_eq!(var_update(VarState::WEAK_ONE, t, 0, none, &psi).unwrap(), VarState::WEAK_ONE);
        // W020: weaken vs Ψ
        let t = CheckTuple::new(0, 2, 0);
        assert_eq!(var_update(VarState::STRONG_ONE, t, 1, with(Flag::W020), &psi).unwrap(), VarState::WEAK_ONE);
        assert_eq!(var_update(VarState::WEAK_ZERO, t, 1, with(Flag::W020), &psi).unwrap(), VarState::WEAK_ZERO);
        assert_eq!(
            var_update(VarState::WEAK_ONE, t, 1, none, &psi).unwrap(),
            psi.apply(VarState::WEAK_ONE, 1)
        );
        let t = CheckTuple::new(1, 2, 0);
        assert_eq!(var_update(VarState::WEAK_ONE, t, 0, with(Flag::W120), &psi).unwrap(), VarState::WEAK_ONE);
    }

    #[test]
    fn f_vector_layout() {
        let d8 = FVector::from_flags([0, 1, 0, 0, 0, 1, 0, 1, 1, 1]);
        assert_eq!(d8.to_string(), "0100010111");
        assert_eq!(FVector::parse("0100010111").unwrap(), d8);
        assert_eq!(FVector::parse("(0,1,0,0,0,1,0,1,1,1)").unwrap(), d8);
        assert!(d8.get(Flag::InitNewChecks));
        assert!(!d8.get(Flag::InitWeakVars));
        assert!(d8.get(Flag::W020));
        assert_eq!(FVector::from_flags([0, 0, 0, 0, 1, 0, 0, 0, 0, 0]).index(), 32);
        assert_eq!(FVector::all().count(), 1024);
        assert!(FVector::parse("01").is_err());
    }
}
