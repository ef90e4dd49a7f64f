use std::fmt;

use serde::{Deserialize, Serialize};

/// Number of removable cross-members tracked by a health state.
pub const N_CROSS_MEMBERS: usize = 8;
/// Number of distinct health states.
pub const N_STATES: usize = 1 << N_CROSS_MEMBERS;
/// Member number of the first cross-member (bit 1 of the state).
pub const FIRST_CROSS_MEMBER: usize = 9;

/// Failure flags of the eight truss cross-members `m9..m16`.
///
/// Bit `i` (1-based) flags member `m_{i+8}`; the decimal code puts bit 1
/// (member `m9`) in the least-significant position, so `H = 17` means
/// `m9` and `m13` have failed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HealthState(u8);

impl HealthState {
    pub const UNDAMAGED: HealthState = HealthState(0);

    pub const fn from_decimal(code: u8) -> Self {
        Self(code)
    }

    pub const fn decimal(self) -> u8 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// State with only bit `bit` (1..=8) set.
    pub fn single(bit: usize) -> Self {
        assert!((1..=N_CROSS_MEMBERS).contains(&bit), "bit {bit} out of range");
        Self(1 << (bit - 1))
    }

    /// State with the given members (numbered 9..=16) failed.
    pub fn from_failed_members(members: &[usize]) -> Self {
        members.iter().fold(Self::UNDAMAGED, |h, &m| h.with_member(m))
    }

    pub fn from_bits(bits: [bool; N_CROSS_MEMBERS]) -> Self {
        let code = bits
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << i));
        Self(code)
    }

    pub fn bits(self) -> [bool; N_CROSS_MEMBERS] {
        std::array::from_fn(|i| self.0 & (1 << i) != 0)
    }

    /// Whether bit `bit` (1..=8) is set.
    pub fn bit(self, bit: usize) -> bool {
        (1..=N_CROSS_MEMBERS).contains(&bit) && self.0 & (1 << (bit - 1)) != 0
    }

    pub fn member_failed(self, member: usize) -> bool {
        member >= FIRST_CROSS_MEMBER && self.bit(member + 1 - FIRST_CROSS_MEMBER)
    }

    pub fn with_member(self, member: usize) -> Self {
        assert!(
            (FIRST_CROSS_MEMBER..FIRST_CROSS_MEMBER + N_CROSS_MEMBERS).contains(&member),
            "m{member} is not a cross-member"
        );
        Self(self.0 | 1 << (member - FIRST_CROSS_MEMBER))
    }

    pub fn failed_members(self) -> Vec<usize> {
        (0..N_CROSS_MEMBERS)
            .filter(|i| self.0 & (1 << i) != 0)
            .map(|i| i + FIRST_CROSS_MEMBER)
            .collect()
    }

    pub fn failure_count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_single_failure(self) -> bool {
        self.0.count_ones() == 1
    }

    /// Whether every failure in `other` is also present here.
    pub fn contains(self, other: HealthState) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn union(self, other: HealthState) -> Self {
        Self(self.0 | other.0)
    }

    pub fn all() -> impl Iterator<Item = HealthState> {
        (0..=u8::MAX).map(HealthState)
    }

    /// The undamaged state followed by the eight single-failure states.
    pub fn classifier_support() -> [HealthState; N_CROSS_MEMBERS + 1] {
        std::array::from_fn(|i| if i == 0 { Self(0) } else { Self::single(i) })
    }
}

impl From<u8> for HealthState {
    fn from(code: u8) -> Self {
        Self(code)
    }
}

impl fmt::Display for HealthState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
