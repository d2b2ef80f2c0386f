//! Sequence mathematics shared by every stage of the search: rowsums,
//! periodic autocorrelation, power spectral density, compression and
//! completion of half rows into skew or symmetric first rows.

mod spectrum;

use std::cmp::Ordering;
use std::fmt;

pub use spectrum::{max_psd, MaskSpectrum, SpectrumPlan};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    /// `x[k] = -x[n - k]` for `k != 0`.
    Skew,
    /// `x[k] = x[n - k]`.
    Symmetric,
}

impl Symmetry {
    /// Value of entry `n - k` given entry `k` (for `k != 0`).
    #[inline]
    pub fn mirror(self, v: i8) -> i8 {
        match self {
            Symmetry::Skew => -v,
            Symmetry::Symmetric => v,
        }
    }
}

/// Position of a sequence within a quadruple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    A,
    B,
    C,
    D,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::A, Role::B, Role::C, Role::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Role> {
        Role::ALL.get(i).copied()
    }

    /// A, B and C are skew, D is symmetric.
    pub fn symmetry(self) -> Symmetry {
        match self {
            Role::D => Symmetry::Symmetric,
            _ => Symmetry::Skew,
        }
    }

    pub fn name(self) -> char {
        (b'A' + self as u8) as char
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Orders entry vectors lexicographically with larger values first, so that
/// `+1 < -1` and, for compressed entries, `3 < 1 < -1 < -3`.
#[inline]
pub fn lex_cmp(a: &[i8], b: &[i8]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.cmp(x) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// First row of a circulant ±1 matrix with positive diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PmSequence {
    entries: Vec<i8>,
    symmetry: Symmetry,
}

impl PmSequence {
    pub fn new(entries: Vec<i8>, symmetry: Symmetry) -> Result<Self> {
        let n = entries.len();
        if n.is_multiple_of(2) {
            return Err(Error::InvalidSequence(format!(
                "length {n} is not a positive odd number"
            )));
        }
        if let Some(pos) = entries.iter().position(|&x| x != 1 && x != -1) {
            return Err(Error::InvalidSequence(format!(
                "entry {pos} is {}, expected +1 or -1",
                entries[pos]
            )));
        }
        if entries[0] != 1 {
            return Err(Error::InvalidSequence("diagonal entry must be +1".into()));
        }
        for k in 1..n {
            if entries[n - k] != symmetry.mirror(entries[k]) {
                return Err(Error::SymmetryViolation {
                    expected: symmetry,
                    index: k,
                });
            }
        }
        Ok(PmSequence { entries, symmetry })
    }

    /// Builds the full row from entries `1..=(n-1)/2`; entry 0 is `+1` and the
    /// upper half is forced by `symmetry`.
    pub fn complete_half(half: &[i8], symmetry: Symmetry, n: usize) -> Result<Self> {
        if n.is_multiple_of(2) || half.len() != (n - 1) / 2 {
            return Err(Error::InvalidParams(format!(
                "half row of length {} does not fit order {n}",
                half.len()
            )));
        }
        let mut entries = vec![1i8; n];
        for (i, &v) in half.iter().enumerate() {
            if v != 1 && v != -1 {
                return Err(Error::InvalidSequence(format!("half entry {i} is {v}")));
            }
            entries[i + 1] = v;
            entries[n - 1 - i] = symmetry.mirror(v);
        }
        Ok(PmSequence { entries, symmetry })
    }

    /// Half row decoded from the low `(n-1)/2` bits of `mask` (bit `i-1` set
    /// means entry `i` is `+1`).
    pub fn from_half_mask(mask: u64, symmetry: Symmetry, n: usize) -> Self {
        let h = (n - 1) / 2;
        let half: Vec<i8> = (0..h).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
        Self::complete_half(&half, symmetry, n).expect("mask half rows are well formed")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Entries `1..=(n-1)/2`, which determine the whole row.
    pub fn half(&self) -> &[i8] {
        &self.entries[1..=(self.len() - 1) / 2]
    }

    pub fn rowsum(&self) -> i64 {
        rowsum(&self.entries)
    }

    pub fn paf(&self, s: usize) -> i64 {
        paf(&self.entries, s)
    }

    pub fn psd(&self, k: usize) -> f64 {
        psd(&self.entries, k)
    }

    pub fn compress(&self, d: usize) -> Result<CompressedSequence> {
        compress(&self.entries, d)
    }

    /// `i -> self[map(i)]`, keeping the symmetry class. Only valid for index
    /// maps that are automorphisms of Z_n.
    pub(crate) fn permuted(&self, map: &[usize]) -> Self {
        PmSequence {
            entries: map.iter().map(|&j| self.entries[j]).collect(),
            symmetry: self.symmetry,
        }
    }

    pub fn to_pm_string(&self) -> String {
        self.entries.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect()
    }

    /// Parses a row written as `+`/`-` characters.
    pub fn parse_pm(text: &str, symmetry: Symmetry) -> Result<Self> {
        let entries = text
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidSequence(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if entries.is_empty() {
            return Err(Error::InvalidSequence("empty row".into()));
        }
        Self::new(entries, symmetry)
    }
}

impl Ord for PmSequence {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_cmp(&self.entries, &other.entries).then(self.symmetry.cmp(&other.symmetry))
    }
}

impl PartialOrd for PmSequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PmSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pm_string())
    }
}

/// Integer sequence of length `m = n / d` obtained by summing entries whose
/// indices agree mod `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompressedSequence {
    entries: Vec<i8>,
    d: usize,
}

impl CompressedSequence {
    pub fn new(entries: Vec<i8>, d: usize) -> Result<Self> {
        if d == 0 || entries.is_empty() {
            return Err(Error::InvalidParams("empty compression".into()));
        }
        for (k, &x) in entries.iter().enumerate() {
            let x = i64::from(x);
            if x.unsigned_abs() as usize > d || (x - d as i64) % 2 != 0 {
                return Err(Error::InvalidSequence(format!(
                    "compressed entry {k} = {x} is not a sum of {d} signs"
                )));
            }
        }
        Ok(CompressedSequence { entries, d })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn factor(&self) -> usize {
        self.d
    }

    pub fn paf(&self, s: usize) -> i64 {
        paf(&self.entries, s)
    }

    pub fn psd(&self, k: usize) -> f64 {
        psd(&self.entries, k)
    }

    pub(crate) fn permuted(&self, map: &[usize]) -> Self {
        CompressedSequence {
            entries: map.iter().map(|&j| self.entries[j]).collect(),
            d: self.d,
        }
    }
}

impl Ord for CompressedSequence {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_cmp(&self.entries, &other.entries).then(self.d.cmp(&other.d))
    }
}

impl PartialOrd for CompressedSequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CompressedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Order `n = r^2 + r + 1` together with a compression factor `d | n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderParams {
    r: u32,
    n: usize,
    d: usize,
    m: usize,
}

impl OrderParams {
    /// `d = None` picks [`default_compression`].
    pub fn from_r(r: u32, d: Option<usize>) -> Result<Self> {
        let n = (r as usize) * (r as usize) + r as usize + 1;
        Self::build(r, n, d)
    }

    pub fn from_n(n: usize, d: Option<usize>) -> Result<Self> {
        let r =
            order_root(n).ok_or_else(|| Error::InvalidParams(format!("order {n} is not of the form r^2 + r + 1")))?;
        Self::build(r, n, d)
    }

    fn build(r: u32, n: usize, d: Option<usize>) -> Result<Self> {
        let d = d.unwrap_or_else(|| default_compression(n));
        if d == 0 || !n.is_multiple_of(d) {
            return Err(Error::InvalidParams(format!(
                "compression factor {d} does not divide {n}"
            )));
        }
        Ok(OrderParams { r, n, d, m: n / d })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `(n - 1) / 2`, the number of free entries per row.
    pub fn half_len(&self) -> usize {
        (self.n - 1) / 2
    }

    /// `4n`, the value every spectral bin of a best quadruple sums to.
    pub fn target(&self) -> i64 {
        4 * self.n as i64
    }

    pub fn with_compression(&self, d: usize) -> Result<Self> {
        Self::build(self.r, self.n, Some(d))
    }
}

impl fmt::Display for OrderParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={} n={} d={}", self.r, self.n, self.d)
    }
}

/// `r` with `r^2 + r + 1 = n`, if one exists.
pub fn order_root(n: usize) -> Option<u32> {
    (0u32..)
        .map(|r| (r, (r as usize) * (r as usize) + r as usize + 1))
        .take_while(|&(_, v)| v <= n)
        .find(|&(_, v)| v == n)
        .map(|(r, _)| r)
}

/// Smallest prime divisor of `n`, or 1 when `n` is prime (or 1).
pub fn default_compression(n: usize) -> usize {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    1
}

/// Required rowsum of the symmetric member: `±(2r + 1)`, positive exactly
/// when `r ≡ 0, 1 (mod 4)`.
pub fn d_rowsum(r: u32) -> i64 {
    let magnitude = 2 * i64::from(r) + 1;
    if r % 4 <= 1 {
        magnitude
    } else {
        -magnitude
    }
}

pub fn rowsum(entries: &[i8]) -> i64 {
    entries.iter().map(|&x| i64::from(x)).sum()
}

/// Periodic autocorrelation `sum_j x_j x_{(j+s) mod len}`.
pub fn paf(entries: &[i8], s: usize) -> i64 {
    let len = entries.len();
    let s = s % len;
    let (head, tail) = entries.split_at(s);
    let wrapped = tail.iter().chain(head);
    entries
        .iter()
        .zip(wrapped)
        .map(|(&x, &y)| i64::from(x) * i64::from(y))
        .sum()
}

/// Power spectral density at bin `k`.
pub fn psd(entries: &[i8], k: usize) -> f64 {
    SpectrumPlan::new(entries.len()).psd(entries, k)
}

/// d-compression: `out[k] = sum_{j<d} x[k + j m]`.
pub fn compress(entries: &[i8], d: usize) -> Result<CompressedSequence> {
    let n = entries.len();
    if d == 0 || n == 0 || !n.is_multiple_of(d) {
        return Err(Error::InvalidParams(format!(
            "compression factor {d} does not divide length {n}"
        )));
    }
    let m = n / d;
    let mut out = vec![0i8; m];
    for (j, &x) in entries.iter().enumerate() {
        out[j % m] += x;
    }
    CompressedSequence::new(out, d)
}
