//! Classical baselines: exact Apriori, sampling estimates, rule generation
//! and the classical-over-quantum query ratio.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ExactSupport, ItemId, Itemset, Ratio, TidBitmap, TransactionDb};
use crate::oracle::QueryCounter;
use crate::{Error, Result};

/// Candidate and frequent counts of one level-wise iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    pub k: usize,
    pub m_candidates: usize,
    pub m_frequent: usize,
}

impl IterationStats {
    pub fn new(k: usize, m_candidates: usize, m_frequent: usize) -> Self {
        debug_assert!(m_frequent <= m_candidates);
        IterationStats {
            k,
            m_candidates,
            m_frequent,
        }
    }
}

/// An itemset with its exact support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequentItemset {
    pub itemset: Itemset,
    pub support: ExactSupport,
}

/// Exact supports of all candidates, one AND-popcount per candidate.
pub fn candidate_supports(db: &TransactionDb, candidates: &[Itemset]) -> Result<Vec<ExactSupport>> {
    let total = db.n_transactions() as u64;
    if candidates.iter().all(|c| c.len() == 1) {
        return candidates
            .iter()
            .map(|c| {
                c.check_bounds(db.n_items())?;
                Ok(ExactSupport {
                    count: db.item_counts()[c.items()[0] as usize],
                    total,
                })
            })
            .collect();
    }
    let mut items: Vec<ItemId> = candidates.iter().flat_map(|c| c.items().iter().copied()).collect();
    items.sort_unstable();
    items.dedup();
    let maps = db.column_bitmaps(&items)?;
    Ok(candidates
        .par_iter()
        .map(|c| {
            let cols: Vec<&TidBitmap> = c.items().iter().map(|i| &maps[i]).collect();
            ExactSupport {
                count: TidBitmap::intersection_count(&cols),
                total,
            }
        })
        .collect())
}

/// Keeps the candidates whose exact support reaches `min_supp`.
///
/// Charges `k * |candidates| * N` row checks: every transaction is scanned
/// once per candidate and item.
pub fn fre_exam(
    db: &TransactionDb,
    candidates: &[Itemset],
    min_supp: &Ratio,
    counter: &mut QueryCounter,
) -> Result<Vec<FrequentItemset>> {
    let supports = candidate_supports(db, candidates)?;
    let scans: u64 = candidates.iter().map(|c| c.len() as u64).sum::<u64>() * db.n_transactions() as u64;
    counter.add_classical_row_scans(scans);
    Ok(candidates
        .iter()
        .zip(supports)
        .filter(|(_, s)| s.meets(min_supp))
        .map(|(c, s)| FrequentItemset {
            itemset: c.clone(),
            support: s,
        })
        .collect())
}

/// Joins frequent k-itemsets sharing their first k-1 items, then drops any
/// (k+1)-candidate with an infrequent k-subset. Output is sorted.
pub fn cand_gen(frequents: &[Itemset]) -> Vec<Itemset> {
    let mut sorted: Vec<&Itemset> = frequents.iter().collect();
    sorted.sort();
    sorted.dedup();
    let known: HashSet<&Itemset> = sorted.iter().copied().collect();
    let mut out = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let k = sorted[start].len();
        let prefix = &sorted[start].items()[..k - 1];
        let mut end = start + 1;
        while end < sorted.len() && sorted[end].len() == k && &sorted[end].items()[..k - 1] == prefix {
            end += 1;
        }
        for a in start..end {
            for b in a + 1..end {
                let mut items = sorted[a].items().to_vec();
                items.push(sorted[b].max_item());
                let cand = Itemset::from_sorted_unchecked(items);
                let all_frequent = (0..cand.len()).all(|p| cand.without_index(p).is_some_and(|sub| known.contains(&sub)));
                if all_frequent {
                    out.push(cand);
                }
            }
        }
        start = end;
    }
    out
}

/// Candidates of the first level: every item that occurs in the database.
pub fn initial_candidates(db: &TransactionDb) -> Vec<Itemset> {
    db.occurring_items().into_iter().map(Itemset::singleton).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AprioriResult {
    pub frequents: Vec<FrequentItemset>,
    pub stats: Vec<IterationStats>,
}

impl AprioriResult {
    pub fn support_map(&self) -> HashMap<Itemset, ExactSupport> {
        self.frequents.iter().map(|f| (f.itemset.clone(), f.support)).collect()
    }
}

fn check_threshold(min_supp: &Ratio) -> Result<()> {
    if min_supp.is_zero() || min_supp.num() > min_supp.den() {
        return Err(Error::InvalidMinSupport(min_supp.value()));
    }
    Ok(())
}

/// Level-wise Apriori: alternate [`fre_exam`] and [`cand_gen`] until no
/// candidates remain.
pub fn apriori(db: &TransactionDb, min_supp: &Ratio, counter: &mut QueryCounter) -> Result<AprioriResult> {
    apriori_up_to(db, min_supp, usize::MAX, counter)
}

/// [`apriori`] stopped after itemsets of size `max_k`.
pub fn apriori_up_to(db: &TransactionDb, min_supp: &Ratio, max_k: usize, counter: &mut QueryCounter) -> Result<AprioriResult> {
    check_threshold(min_supp)?;
    let mut candidates = initial_candidates(db);
    let mut frequents = Vec::new();
    let mut stats = Vec::new();
    let mut k = 1;
    while !candidates.is_empty() && k <= max_k {
        let level = fre_exam(db, &candidates, min_supp, counter)?;
        stats.push(IterationStats::new(k, candidates.len(), level.len()));
        let next: Vec<Itemset> = level.iter().map(|f| f.itemset.clone()).collect();
        frequents.extend(level);
        candidates = cand_gen(&next);
        k += 1;
    }
    Ok(AprioriResult { frequents, stats })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingEstimate {
    pub itemset: Itemset,
    pub hits: u64,
    pub samples: u64,
    pub value: f64,
}

/// Estimates each candidate's support from `m` transactions drawn uniformly
/// with replacement. Charges `k * m` basic-oracle queries per candidate.
pub fn sampling_estimate<R: Rng + ?Sized>(
    db: &TransactionDb,
    candidates: &[Itemset],
    m: u64,
    rng: &mut R,
    counter: &mut QueryCounter,
) -> Result<Vec<SamplingEstimate>> {
    if m == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let n = db.n_transactions();
    candidates
        .iter()
        .map(|c| {
            c.check_bounds(db.n_items())?;
            let hits = (0..m).filter(|_| db.row_contains(rng.gen_range(0..n), c)).count() as u64;
            counter.add_basic_oracle_calls(c.len() as u64 * m);
            Ok(SamplingEstimate {
                itemset: c.clone(),
                hits,
                samples: m,
                value: hits as f64 / m as f64,
            })
        })
        .collect()
}

/// Samples per support for target relative error `epsilon`: `ceil(1 / epsilon^2)`.
pub fn samples_for_epsilon(epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok((1.0 / (epsilon * epsilon)).ceil() as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingResult {
    pub frequents: Vec<SamplingEstimate>,
    pub stats: Vec<IterationStats>,
}

/// Level-wise mining on sampled supports: a candidate is kept when
/// `hits / m >= min_supp`.
pub fn sampling_mine<R: Rng + ?Sized>(
    db: &TransactionDb,
    min_supp: &Ratio,
    m: u64,
    max_k: usize,
    rng: &mut R,
    counter: &mut QueryCounter,
) -> Result<SamplingResult> {
    check_threshold(min_supp)?;
    let mut candidates = initial_candidates(db);
    let mut out = SamplingResult {
        frequents: Vec::new(),
        stats: Vec::new(),
    };
    let mut k = 1;
    while !candidates.is_empty() && k <= max_k {
        let level: Vec<SamplingEstimate> = sampling_estimate(db, &candidates, m, rng, counter)?
            .into_iter()
            .filter(|e| min_supp.is_met_by(e.hits, e.samples))
            .collect();
        out.stats.push(IterationStats::new(k, candidates.len(), level.len()));
        candidates = cand_gen(&level.iter().map(|e| e.itemset.clone()).collect::<Vec<_>>());
        out.frequents.extend(level);
        k += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociationRule {
    pub antecedent: Itemset,
    pub consequent: Itemset,
    /// Support of antecedent and consequent together.
    pub support: ExactSupport,
    pub confidence: f64,
}

/// Emits `A => X \ A` for every frequent `X` and nonempty proper subset `A`
/// with `supp(X) / supp(A) >= min_conf` (exact comparison).
pub fn generate_rules(frequents: &[FrequentItemset], min_conf: &Ratio) -> Result<Vec<AssociationRule>> {
    let supports: HashMap<&Itemset, ExactSupport> = frequents.iter().map(|f| (&f.itemset, f.support)).collect();
    let mut rules = Vec::new();
    for f in frequents {
        let items = f.itemset.items();
        let k = items.len();
        if k < 2 {
            continue;
        }
        for mask in 1..(1u64 << k) - 1 {
            let antecedent = Itemset::from_sorted_unchecked(
                items.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect(),
            );
            let a_supp = *supports
                .get(&antecedent)
                .ok_or_else(|| Error::MissingSubsetSupport(antecedent.clone()))?;
            // supp(X)/supp(A) >= num/den, cross-multiplied over a common total.
            let lhs = f.support.count as u128 * a_supp.total as u128 * min_conf.den() as u128;
            let rhs = a_supp.count as u128 * f.support.total as u128 * min_conf.num() as u128;
            if a_supp.count > 0 && lhs >= rhs {
                let consequent = f.itemset.difference(&antecedent).expect("proper subset");
                rules.push(AssociationRule {
                    confidence: f.support.value() / a_supp.value(),
                    antecedent,
                    consequent,
                    support: f.support,
                });
            }
        }
    }
    Ok(rules)
}

/// Ratio of classical to quantum query proxies over all iterations.
///
/// Weighted: `sum k M_c / sum k sqrt(M_c M_f)`. Unweighted drops the factor k.
pub fn gamma_metric(stats: &[IterationStats], weighted: bool) -> Result<f64> {
    if stats.is_empty() {
        return Err(Error::EmptyStats);
    }
    let w = |s: &IterationStats| if weighted { s.k as f64 } else { 1.0 };
    let num: f64 = stats.iter().map(|s| w(s) * s.m_candidates as f64).sum();
    let den: f64 = stats
        .iter()
        .map(|s| w(s) * (s.m_candidates as f64 * s.m_frequent as f64).sqrt())
        .sum();
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// Published per-iteration counts for the retail and kosarak benchmarks.
pub mod published {
    use super::IterationStats;

    const fn s(k: usize, m_candidates: usize, m_frequent: usize) -> IterationStats {
        IterationStats {
            k,
            m_candidates,
            m_frequent,
        }
    }

    pub const RETAIL_TRANSACTIONS: usize = 88162;
    pub const RETAIL_ITEMS: usize = 16470;
    pub const KOSARAK_TRANSACTIONS: usize = 992547;
    pub const KOSARAK_ITEMS: usize = 41270;

    pub const RETAIL_1PCT: [IterationStats; 4] = [s(1, 16470, 70), s(2, 2415, 58), s(3, 37, 25), s(4, 6, 6)];
    pub const RETAIL_2PCT: [IterationStats; 4] = [s(1, 16470, 20), s(2, 190, 22), s(3, 14, 12), s(4, 2, 1)];
    pub const KOSARAK_1PCT: [IterationStats; 5] =
        [s(1, 41270, 54), s(2, 1431, 140), s(3, 194, 127), s(4, 57, 52), s(5, 11, 10)];
    pub const KOSARAK_2PCT: [IterationStats; 5] = [s(1, 41270, 27), s(2, 351, 45), s(3, 45, 34), s(4, 13, 13), s(5, 2, 2)];

    /// `(dataset, threshold percent, table, published ratio)`.
    pub const CASES: [(&str, u64, &[IterationStats], f64); 4] = [
        ("retail", 1, &RETAIL_1PCT, 12.75),
        ("retail", 2, &RETAIL_2PCT, 25.54),
        ("kosarak", 1, &KOSARAK_1PCT, 19.87),
        ("kosarak", 2, &KOSARAK_2PCT, 33.74),
    ];
}
