//! Transaction databases, itemsets and exact supports.
//!
//! A database is stored as compressed sparse rows (one sorted item list per
//! transaction) with cached column counts. Support queries over many items
//! go through [`TidBitmap`]s, one bit per transaction, so that a k-itemset
//! support is an AND-popcount over `N / 64` words.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an item column.
pub type ItemId = u32;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: cannot parse item id {token:?}")]
    Parse { line: usize, token: String },
    #[error("no transactions")]
    NoTransactions,
    #[error("database must have at least one item column")]
    NoItems,
    #[error("item {item} out of range for {n_items} items")]
    ItemOutOfRange { item: ItemId, n_items: usize },
    #[error("itemset must be nonempty")]
    EmptyItemset,
    #[error("itemset contains item {0} twice")]
    DuplicateItem(ItemId),
    #[error("row {row} has length {len}, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("invalid bit character {0:?}")]
    InvalidBit(char),
    #[error("invalid ratio {0:?}")]
    InvalidRatio(String),
    #[error("infeasible target for {itemset}: {reason}")]
    InfeasibleTarget { itemset: Itemset, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A nonempty, strictly increasing list of item indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    /// Builds an itemset from items in any order. Duplicates are rejected.
    pub fn new(items: impl IntoIterator<Item = ItemId>) -> Result<Self, DataError> {
        let mut items: Vec<ItemId> = items.into_iter().collect();
        if items.is_empty() {
            return Err(DataError::EmptyItemset);
        }
        items.sort_unstable();
        if let Some(w) = items.windows(2).find(|w| w[0] == w[1]) {
            return Err(DataError::DuplicateItem(w[0]));
        }
        Ok(Itemset(items))
    }

    pub fn singleton(item: ItemId) -> Self {
        Itemset(vec![item])
    }

    /// Wraps a vector the caller guarantees is nonempty and strictly increasing.
    pub(crate) fn from_sorted_unchecked(items: Vec<ItemId>) -> Self {
        debug_assert!(!items.is_empty());
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Itemset(items)
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    /// The itemset with the item at `pos` removed, or `None` for a singleton.
    pub fn without_index(&self, pos: usize) -> Option<Itemset> {
        if self.0.len() <= 1 {
            return None;
        }
        let mut v = self.0.clone();
        v.remove(pos);
        Some(Itemset(v))
    }

    pub fn union(&self, other: &Itemset) -> Itemset {
        let mut v: Vec<ItemId> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        Itemset(v)
    }

    /// Items of `self` not in `other`, or `None` when nothing is left.
    pub fn difference(&self, other: &Itemset) -> Option<Itemset> {
        let v: Vec<ItemId> = self.0.iter().copied().filter(|&i| !other.contains(i)).collect();
        if v.is_empty() {
            None
        } else {
            Some(Itemset(v))
        }
    }

    pub fn max_item(&self) -> ItemId {
        *self.0.last().expect("itemset is nonempty")
    }

    pub fn check_bounds(&self, n_items: usize) -> Result<(), DataError> {
        match self.0.iter().find(|&&i| i as usize >= n_items) {
            Some(&item) => Err(DataError::ItemOutOfRange { item, n_items }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, item) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{item}")?;
        }
        write!(f, "}}")
    }
}

/// Nonnegative rational number, kept in lowest terms.
///
/// Used for support thresholds and synthesis targets so that boundary
/// comparisons against `count / N` are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self, DataError> {
        if den == 0 {
            return Err(DataError::InvalidRatio(format!("{num}/{den}")));
        }
        let g = gcd(num, den).max(1);
        Ok(Ratio { num: num / g, den: den / g })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `count / total >= self`, computed exactly.
    pub fn is_met_by(&self, count: u64, total: u64) -> bool {
        (count as u128) * (self.den as u128) >= (self.num as u128) * (total as u128)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        ((self.num as u128) * (other.den as u128)).cmp(&((other.num as u128) * (self.den as u128)))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn parse_decimal(s: &str) -> Option<(u64, u64)> {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 15 {
        return None;
    }
    let den = 10u64.checked_pow(frac.len() as u32)?;
    let int_part: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac_part: u64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    Some((int_part.checked_mul(den)?.checked_add(frac_part)?, den))
}

impl FromStr for Ratio {
    type Err = DataError;

    /// Accepts `"0.25"`, `"1/4"` and `"25%"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || DataError::InvalidRatio(s.to_string());
        if let Some(pct) = t.strip_suffix('%') {
            let (n, d) = parse_decimal(pct.trim()).ok_or_else(bad)?;
            return Ratio::new(n, d.checked_mul(100).ok_or_else(bad)?);
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Ratio::new(n, d);
        }
        let (n, d) = parse_decimal(t).ok_or_else(bad)?;
        Ratio::new(n, d)
    }
}

/// Exact support `count / total` of an itemset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactSupport {
    pub count: u64,
    pub total: u64,
}

impl ExactSupport {
    pub fn value(&self) -> f64 {
        self.count as f64 / self.total as f64
    }

    pub fn meets(&self, threshold: &Ratio) -> bool {
        threshold.is_met_by(self.count, self.total)
    }

    pub fn as_ratio(&self) -> Ratio {
        Ratio::new(self.count, self.total).expect("total is nonzero")
    }
}

impl PartialOrd for ExactSupport {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.as_ratio().cmp(&other.as_ratio()))
    }
}

impl fmt::Display for ExactSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.count, self.total)
    }
}

/// One bit per transaction; bit `i` set iff transaction `i` has the item(s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TidBitmap {
    words: Vec<u64>,
}

impl TidBitmap {
    pub fn zeros(n_transactions: usize) -> Self {
        TidBitmap {
            words: vec![0; n_transactions.div_ceil(64)],
        }
    }

    pub fn set(&mut self, tid: usize) {
        self.words[tid / 64] |= 1 << (tid % 64);
    }

    pub fn get(&self, tid: usize) -> bool {
        self.words[tid / 64] >> (tid % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn and_assign(&mut self, other: &TidBitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Popcount of the intersection of all bitmaps, without allocating.
    pub fn intersection_count(maps: &[&TidBitmap]) -> u64 {
        let Some(first) = maps.first() else {
            return 0;
        };
        (0..first.words.len())
            .map(|w| maps.iter().fold(u64::MAX, |acc, m| acc & m.words[w]).count_ones() as u64)
            .sum()
    }
}

/// An N x M binary transaction matrix, immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransactionDb {
    n_items: usize,
    row_ptr: Vec<usize>,
    row_items: Vec<ItemId>,
    item_counts: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl TransactionDb {
    /// Builds a database from per-transaction item lists. Items within a row
    /// may repeat and appear in any order.
    pub fn from_rows<R, I>(n_items: usize, rows: R) -> Result<Self, DataError>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = ItemId>,
    {
        if n_items == 0 {
            return Err(DataError::NoItems);
        }
        let mut row_ptr = vec![0];
        let mut row_items = Vec::new();
        let mut item_counts = vec![0u64; n_items];
        for row in rows {
            let start = row_items.len();
            row_items.extend(row);
            let slice = &mut row_items[start..];
            slice.sort_unstable();
            let mut kept = 0;
            for r in 0..slice.len() {
                if r == 0 || slice[r] != slice[kept - 1] {
                    slice[kept] = slice[r];
                    kept += 1;
                }
            }
            row_items.truncate(start + kept);
            for &item in &row_items[start..] {
                if item as usize >= n_items {
                    return Err(DataError::ItemOutOfRange { item, n_items });
                }
                item_counts[item as usize] += 1;
            }
            row_ptr.push(row_items.len());
        }
        if row_ptr.len() == 1 {
            return Err(DataError::NoTransactions);
        }
        Ok(TransactionDb {
            n_items,
            row_ptr,
            row_items,
            item_counts,
            labels: None,
        })
    }

    /// Builds a database from rows of `'0'`/`'1'` characters, e.g. `"110"`.
    pub fn from_bit_strings(rows: &[&str]) -> Result<Self, DataError> {
        let width = rows.first().map(|r| r.len()).ok_or(DataError::NoTransactions)?;
        let mut parsed = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(DataError::RaggedRow {
                    row: r,
                    len: row.len(),
                    expected: width,
                });
            }
            let mut items = Vec::new();
            for (j, c) in row.chars().enumerate() {
                match c {
                    '1' => items.push(j as ItemId),
                    '0' => {}
                    other => return Err(DataError::InvalidBit(other)),
                }
            }
            parsed.push(items);
        }
        Self::from_rows(width, parsed)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, DataError> {
        if labels.len() != self.n_items {
            return Err(DataError::RaggedRow {
                row: 0,
                len: labels.len(),
                expected: self.n_items,
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn n_transactions(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    /// Sorted items of transaction `i`.
    pub fn row(&self, i: usize) -> &[ItemId] {
        &self.row_items[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ItemId]> + '_ {
        (0..self.n_transactions()).map(move |i| self.row(i))
    }

    /// `D_ij`; indices outside the matrix read as 0.
    pub fn get(&self, i: usize, j: usize) -> bool {
        i < self.n_transactions() && j < self.n_items && self.row(i).binary_search(&(j as ItemId)).is_ok()
    }

    pub fn row_contains(&self, i: usize, itemset: &Itemset) -> bool {
        let row = self.row(i);
        itemset.items().iter().all(|it| row.binary_search(it).is_ok())
    }

    /// Column sums of D.
    pub fn item_counts(&self) -> &[u64] {
        &self.item_counts
    }

    /// Items that occur in at least one transaction, ascending.
    pub fn occurring_items(&self) -> Vec<ItemId> {
        (0..self.n_items as ItemId).filter(|&j| self.item_counts[j as usize] > 0).collect()
    }

    /// Column bitmaps for the requested items, built in one pass over the rows.
    pub fn column_bitmaps(&self, items: &[ItemId]) -> Result<HashMap<ItemId, TidBitmap>, DataError> {
        let n = self.n_transactions();
        let mut maps: HashMap<ItemId, TidBitmap> = HashMap::with_capacity(items.len());
        for &item in items {
            if item as usize >= self.n_items {
                return Err(DataError::ItemOutOfRange {
                    item,
                    n_items: self.n_items,
                });
            }
            maps.entry(item).or_insert_with(|| TidBitmap::zeros(n));
        }
        for i in 0..n {
            for item in self.row(i) {
                if let Some(map) = maps.get_mut(item) {
                    map.set(i);
                }
            }
        }
        Ok(maps)
    }

    /// Writes the database in FIMI format, one line per transaction.
    pub fn write_fimi<W: Write>(&self, mut out: W) -> io::Result<()> {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|i| i.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn to_fimi_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_fimi(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("FIMI output is ASCII")
    }
}

/// Parses FIMI `.dat` text: one transaction per nonempty line, items as
/// whitespace-separated nonnegative integers. Item ids are kept as-is, so
/// `M = 1 + max id`.
pub fn parse_fimi<R: BufRead>(reader: R) -> Result<TransactionDb, DataError> {
    let mut rows: Vec<Vec<ItemId>> = Vec::new();
    let mut max_item: Option<ItemId> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let mut row = Vec::new();
        for token in line.split_ascii_whitespace() {
            let item: ItemId = token.parse().map_err(|_| DataError::Parse {
                line: lineno + 1,
                token: token.to_string(),
            })?;
            max_item = Some(max_item.map_or(item, |m| m.max(item)));
            row.push(item);
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    let Some(max_item) = max_item else {
        return Err(DataError::NoTransactions);
    };
    TransactionDb::from_rows(max_item as usize + 1, rows)
}

pub fn parse_fimi_str(text: &str) -> Result<TransactionDb, DataError> {
    parse_fimi(text.as_bytes())
}

pub fn load_fimi(path: &std::path::Path) -> Result<TransactionDb, DataError> {
    let file = std::fs::File::open(path)?;
    parse_fimi(io::BufReader::with_capacity(1 << 20, file))
}

/// Brute-force support: the number of transactions containing every item of `x`.
pub fn exact_support(db: &TransactionDb, x: &Itemset) -> Result<ExactSupport, DataError> {
    x.check_bounds(db.n_items())?;
    let count = (0..db.n_transactions()).filter(|&i| db.row_contains(i, x)).count() as u64;
    Ok(ExactSupport {
        count,
        total: db.n_transactions() as u64,
    })
}

/// A synthesized database plus the supports it actually achieved for every target.
#[derive(Clone, Debug)]
pub struct SynthDb {
    pub db: TransactionDb,
    pub achieved: Vec<(Itemset, Ratio, ExactSupport)>,
}

impl SynthDb {
    /// Targets whose achieved support differs from the requested one.
    pub fn missed(&self) -> impl Iterator<Item = &(Itemset, Ratio, ExactSupport)> {
        self.achieved.iter().filter(|(_, t, a)| a.as_ratio() != *t)
    }
}

/// Generates an `n x m` database hitting the requested supports.
///
/// Singleton targets are met exactly. Multi-item targets are placed first,
/// greedily, within the singleton budgets; singletons are then topped up on
/// rows that would not complete any other multi-item target. What was
/// achieved is reported back in [`SynthDb::achieved`].
pub fn synth_db(n: usize, m: usize, targets: &[(Itemset, Ratio)], seed: u64) -> Result<SynthDb, DataError> {
    if n == 0 {
        return Err(DataError::NoTransactions);
    }
    if m == 0 {
        return Err(DataError::NoItems);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target_count = |x: &Itemset, r: &Ratio| -> Result<usize, DataError> {
        x.check_bounds(m)?;
        if !(n as u64 * r.num()).is_multiple_of(r.den()) {
            return Err(DataError::InfeasibleTarget {
                itemset: x.clone(),
                reason: format!("denominator of {r} does not divide n = {n}"),
            });
        }
        let c = n as u64 * r.num() / r.den();
        if c > n as u64 {
            return Err(DataError::InfeasibleTarget {
                itemset: x.clone(),
                reason: format!("support {r} exceeds 1"),
            });
        }
        Ok(c as usize)
    };

    let mut budget: Vec<usize> = vec![n; m];
    let mut multi: Vec<(Itemset, usize)> = Vec::new();
    for (x, r) in targets {
        let c = target_count(x, r)?;
        if x.len() == 1 {
            budget[x.items()[0] as usize] = c;
        } else {
            multi.push((x.clone(), c));
        }
    }
    multi.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(b.1.cmp(&a.1)));

    let mut rows: Vec<Vec<bool>> = vec![vec![false; m]; n];
    let mut counts = vec![0usize; m];
    let mut order: Vec<usize> = (0..n).collect();

    for (x, c) in &multi {
        order.shuffle(&mut rng);
        // Prefer rows that already hold most of the itemset.
        order.sort_by_key(|&i| std::cmp::Reverse(x.items().iter().filter(|&&j| rows[i][j as usize]).count()));
        let mut placed = order.iter().filter(|&&i| x.items().iter().all(|&j| rows[i][j as usize])).count();
        for &i in &order {
            if placed >= *c {
                break;
            }
            let missing: Vec<ItemId> = x.items().iter().copied().filter(|&j| !rows[i][j as usize]).collect();
            if missing.is_empty() || missing.iter().any(|&j| counts[j as usize] >= budget[j as usize]) {
                continue;
            }
            for j in missing {
                rows[i][j as usize] = true;
                counts[j as usize] += 1;
            }
            placed += 1;
        }
    }

    for (x, r) in targets {
        if x.len() != 1 {
            continue;
        }
        let j = x.items()[0] as usize;
        let want = target_count(x, r)?;
        if counts[j] > want {
            return Err(DataError::InfeasibleTarget {
                itemset: x.clone(),
                reason: "multi-item placement exceeded the singleton budget".into(),
            });
        }
        order.shuffle(&mut rng);
        let completes = |row: &[bool]| {
            multi.iter().any(|(y, _)| {
                y.contains(j as ItemId) && y.items().iter().all(|&o| o as usize == j || row[o as usize])
            })
        };
        let (mut safe, risky): (Vec<usize>, Vec<usize>) =
            order.iter().copied().filter(|&i| !rows[i][j]).partition(|&i| !completes(&rows[i]));
        safe.extend(risky);
        for i in safe.into_iter().take(want - counts[j]) {
            rows[i][j] = true;
            counts[j] += 1;
        }
        if counts[j] != want {
            return Err(DataError::InfeasibleTarget {
                itemset: x.clone(),
                reason: format!("only {} of {want} rows available", counts[j]),
            });
        }
    }

    let db = TransactionDb::from_rows(
        m,
        rows.iter()
            .map(|row| (0..m as ItemId).filter(|&j| row[j as usize]).collect::<Vec<_>>()),
    )?;
    let achieved = targets
        .iter()
        .map(|(x, r)| Ok((x.clone(), *r, exact_support(&db, x)?)))
        .collect::<Result<Vec<_>, DataError>>()?;
    Ok(SynthDb { db, achieved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy() -> TransactionDb {
        TransactionDb::from_bit_strings(&["111", "110", "100", "000"]).unwrap()
    }

    fn set(items: &[ItemId]) -> Itemset {
        Itemset::new(items.iter().copied()).unwrap()
    }

    #[test]
    fn parse_transcribes_rows() {
        let db = parse_fimi_str("0 2 3\n1\n").unwrap();
        assert_eq!(db.n_transactions(), 2);
        assert_eq!(db.n_items(), 4);
        let bits: Vec<Vec<bool>> = (0..2).map(|i| (0..4).map(|j| db.get(i, j)).collect()).collect();
        assert_eq!(bits, vec![vec![true, false, true, true], vec![false, true, false, false]]);
    }

    #[test]
    fn parse_collapses_duplicates() {
        let db = parse_fimi_str("5\n5 5\n").unwrap();
        assert_eq!(db.n_transactions(), 2);
        assert_eq!(db.n_items(), 6);
        assert_eq!(db.row(0), &[5]);
        assert_eq!(db.row(1), &[5]);
        assert_eq!(db.item_counts()[5], 2);
    }

    #[test]
    fn parse_errors() {
        match parse_fimi_str("1 2\n3 x 4\n") {
            Err(DataError::Parse { line, token }) => {
                assert_eq!(line, 2);
                assert_eq!(token, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_fimi_str(""), Err(DataError::NoTransactions)));
        assert!(matches!(parse_fimi_str("\n  \n"), Err(DataError::NoTransactions)));
        assert!(matches!(parse_fimi_str("-1\n"), Err(DataError::Parse { line: 1, .. })));
    }

    #[test]
    fn parse_skips_blank_lines_and_trailing_space() {
        let db = parse_fimi_str("1 2 \n\n3\n").unwrap();
        assert_eq!(db.n_transactions(), 2);
        assert_eq!(db.row(1), &[3]);
    }

    #[test]
    fn toy_supports() {
        let db = toy();
        let s = |x: &[ItemId]| exact_support(&db, &set(x)).unwrap();
        assert_eq!(s(&[0]), ExactSupport { count: 3, total: 4 });
        assert_eq!(s(&[0, 1]), ExactSupport { count: 2, total: 4 });
        assert_eq!(s(&[0, 1, 2]), ExactSupport { count: 1, total: 4 });
        assert!(matches!(
            exact_support(&db, &set(&[3])),
            Err(DataError::ItemOutOfRange { item: 3, n_items: 3 })
        ));
    }

    #[test]
    fn itemset_invariants() {
        assert!(matches!(Itemset::new([]), Err(DataError::EmptyItemset)));
        assert!(matches!(Itemset::new([2, 1, 2]), Err(DataError::DuplicateItem(2))));
        let x = set(&[3, 1]);
        assert_eq!(x.items(), &[1, 3]);
        assert_eq!(x.to_string(), "{1, 3}");
        assert_eq!(x.without_index(0), Some(set(&[3])));
        assert_eq!(set(&[1]).without_index(0), None);
        assert_eq!(set(&[1, 2, 3]).difference(&set(&[2])), Some(set(&[1, 3])));
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!("1%".parse::<Ratio>().unwrap(), Ratio::new(1, 100).unwrap());
        assert_eq!("0.5".parse::<Ratio>().unwrap(), Ratio::new(1, 2).unwrap());
        assert_eq!("2/8".parse::<Ratio>().unwrap(), Ratio::new(1, 4).unwrap());
        assert_eq!("1".parse::<Ratio>().unwrap(), Ratio::new(1, 1).unwrap());
        assert_eq!("2.5%".parse::<Ratio>().unwrap(), Ratio::new(1, 40).unwrap());
        assert!("abc".parse::<Ratio>().is_err());
        assert!("1/0".parse::<Ratio>().is_err());
        // 1% of 88162 is 881.62, so 881 transactions fall short and 882 suffice.
        let one_pct = Ratio::new(1, 100).unwrap();
        assert!(!one_pct.is_met_by(881, 88162));
        assert!(one_pct.is_met_by(882, 88162));
    }

    #[test]
    fn synth_singletons_exact() {
        let half = Ratio::new(1, 2).unwrap();
        let s = synth_db(4, 3, &[(set(&[0]), half)], 7).unwrap();
        assert_eq!(s.db.item_counts()[0], 2);
        let all = Ratio::new(1, 1).unwrap();
        let s = synth_db(4, 3, &[(set(&[0]), all)], 7).unwrap();
        assert_eq!(s.db.item_counts()[0], 4);
    }

    #[test]
    fn synth_pair_target_checked_by_brute_force() {
        let half = Ratio::new(1, 2).unwrap();
        let quarter = Ratio::new(1, 4).unwrap();
        let targets = [(set(&[0]), half), (set(&[1]), half), (set(&[0, 1]), quarter)];
        for seed in 0..20 {
            let s = synth_db(8, 2, &targets, seed).unwrap();
            for (x, r, _) in &s.achieved {
                assert_eq!(exact_support(&s.db, x).unwrap().as_ratio(), *r, "seed {seed} {x}");
            }
            assert_eq!(s.missed().count(), 0);
        }
    }

    #[test]
    fn synth_rejects_infeasible() {
        let third = Ratio::new(1, 3).unwrap();
        assert!(matches!(
            synth_db(4, 2, &[(set(&[0]), third)], 0),
            Err(DataError::InfeasibleTarget { .. })
        ));
        let too_big = Ratio::new(5, 4).unwrap();
        assert!(synth_db(4, 2, &[(set(&[0]), too_big)], 0).is_err());
        assert!(synth_db(4, 2, &[(set(&[2]), Ratio::new(1, 2).unwrap())], 0).is_err());
    }

    #[test]
    fn bitmaps_match_brute_force() {
        let db = toy();
        let maps = db.column_bitmaps(&[0, 1, 2]).unwrap();
        assert_eq!(maps[&0].count_ones(), 3);
        let both = TidBitmap::intersection_count(&[&maps[&0], &maps[&1]]);
        assert_eq!(both, 2);
        assert!(maps[&2].get(0) && !maps[&2].get(1));
    }

    fn arb_rows() -> impl Strategy<Value = Vec<Vec<ItemId>>> {
        prop::collection::vec(prop::collection::vec(0u32..12, 1..6), 1..20)
    }

    proptest! {
        #[test]
        fn fimi_round_trip(rows in arb_rows()) {
            let text: String = rows
                .iter()
                .map(|r| r.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ") + "\n")
                .collect();
            let db = parse_fimi_str(&text).unwrap();
            let again = parse_fimi_str(&db.to_fimi_string()).unwrap();
            prop_assert_eq!(db, again);
        }

        #[test]
        fn support_is_monotone_and_singletons_are_column_sums(
            rows in arb_rows(),
            a in prop::collection::btree_set(0u32..12, 1..4),
            extra in prop::collection::btree_set(0u32..12, 0..3),
        ) {
            let db = TransactionDb::from_rows(12, rows).unwrap();
            let x = Itemset::new(a.iter().copied()).unwrap();
            let y = x.union(&Itemset::new(a.iter().chain(extra.iter()).copied().collect::<std::collections::BTreeSet<_>>()).unwrap());
            let sx = exact_support(&db, &x).unwrap();
            let sy = exact_support(&db, &y).unwrap();
            prop_assert!(sx.count >= sy.count);
            for j in 0..12u32 {
                let s = exact_support(&db, &Itemset::singleton(j)).unwrap();
                prop_assert_eq!(s.count, db.item_counts()[j as usize]);
            }
        }
    }
}
