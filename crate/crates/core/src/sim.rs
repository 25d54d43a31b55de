//! Seeded generator of closed review communities.
//!
//! In a closed community every review a paper received was written by a
//! member, so with no lag, no window, and no exclusions the members' R-Index
//! values sum to exactly zero. The generator exists to exercise that identity
//! and the ingestion formats at scale.
//!
//! # Algorithm
//!
//! All randomness comes from one [`SplitMix64`] stream seeded with
//! `SimConfig::seed`, consumed in this order for each paper `k` in
//! `0..n_researchers * papers_per_researcher`:
//!
//! 1. author count `min + below(max - min + 1)`;
//! 2. lead author `k mod n`, then the remaining co-authors drawn without
//!    replacement from the other researchers (partial Fisher-Yates over the
//!    ascending index list, one `below` per pick);
//! 3. publication day offset `below(span + 1)` from `start_date`;
//! 4. review count from [`ReviewCountModel::draw`];
//! 5. per review: a reviewer drawn without replacement from the paper's
//!    non-authors (the pool is refilled once exhausted), then a day offset
//!    `below(d + 1)` where `d` is the number of days to six calendar months
//!    after publication.
//!
//! Researchers are `r` + 1-based index, papers `p` + 1-based index, events
//! `e` + 1-based index, each zero-padded to `max(4, digits(count))`.

use chrono::{Days, Months, NaiveDate};
use thiserror::Error;

use crate::model::{validate_dataset, Dataset, EventId, PaperId, PaperRecord, ResearcherId, ReviewEvent};
use crate::scalar::Scalar;

/// Mean reviews received per published paper.
pub const REVIEWS_PER_PAPER_MEAN: f64 = 3.49;
/// Standard deviation of reviews received per paper.
pub const REVIEWS_PER_PAPER_SD: f64 = 1.45;

/// SplitMix64 (Steele, Lea & Flood 2014). The state advances by the golden
/// gamma `0x9E3779B97F4A7C15`; output mixing uses multipliers
/// `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB` with shifts 30, 27, 31.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound` by rejection. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0)");
        let limit = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < limit {
                return x % bound;
            }
        }
    }
}

/// Normal review counts, rounded to the nearest integer and clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReviewCountModel {
    pub mean: f64,
    pub sd: f64,
}

impl Default for ReviewCountModel {
    fn default() -> Self {
        ReviewCountModel {
            mean: REVIEWS_PER_PAPER_MEAN,
            sd: REVIEWS_PER_PAPER_SD,
        }
    }
}

impl ReviewCountModel {
    /// One Normal(mean, sd) sample, before rounding. Box-Muller, cosine
    /// branch only, consuming exactly two `next_f64` calls.
    pub fn draw_normal(&self, rng: &mut SplitMix64) -> f64 {
        let u1 = 1.0 - rng.next_f64();
        let u2 = rng.next_f64();
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        self.mean + self.sd * z
    }

    pub fn draw(&self, rng: &mut SplitMix64) -> u32 {
        // Saturating float-to-int cast.
        self.draw_normal(rng).round().max(0.0) as u32
    }
}

/// Pure form of [`ReviewCountModel::draw`]: returns the count and the advanced generator.
pub fn draw_review_count(rng: SplitMix64, model: &ReviewCountModel) -> (u32, SplitMix64) {
    let mut rng = rng;
    let count = model.draw(&mut rng);
    (count, rng)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(
        "infeasible: {n_researchers} researchers cannot supply a non-author reviewer \
         for papers with up to {max_authors} authors (need at least {})", max_authors + 1
    )]
    Infeasible { n_researchers: usize, max_authors: usize },
    #[error("invalid authors-per-paper range [{min}, {max}]")]
    AuthorRange { min: usize, max: usize },
    #[error("start date {start} is after end date {end}")]
    DateRange { start: NaiveDate, end: NaiveDate },
    #[error("review count distribution needs a finite mean and a finite, non-negative sd")]
    Distribution,
    #[error("expected burden needs at least one paper")]
    NoPapers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub n_researchers: usize,
    pub papers_per_researcher: usize,
    /// Inclusive `(min, max)` author count per paper.
    pub authors_per_paper: (usize, usize),
    pub reviews: ReviewCountModel,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            n_researchers: 20,
            papers_per_researcher: 3,
            authors_per_paper: (1, 3),
            reviews: ReviewCountModel::default(),
            start_date: NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid date"),
            end_date: NaiveDate::from_ymd_opt(2020, 12, 31).expect("valid date"),
        }
    }
}

impl SimConfig {
    pub fn with_seed(seed: u64) -> Self {
        SimConfig {
            seed,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let (min, max) = self.authors_per_paper;
        if min == 0 || min > max {
            return Err(SimError::AuthorRange { min, max });
        }
        if self.n_researchers < max + 1 {
            return Err(SimError::Infeasible {
                n_researchers: self.n_researchers,
                max_authors: max,
            });
        }
        if self.start_date > self.end_date {
            return Err(SimError::DateRange {
                start: self.start_date,
                end: self.end_date,
            });
        }
        if !self.reviews.mean.is_finite() || !self.reviews.sd.is_finite() || self.reviews.sd < 0.0 {
            return Err(SimError::Distribution);
        }
        Ok(())
    }
}

fn padded(prefix: char, index: usize, count: usize) -> String {
    let width = count.to_string().len().max(4);
    format!("{prefix}{:0width$}", index + 1)
}

/// Draw `k` distinct entries from `pool`, in draw order.
fn pick_distinct(rng: &mut SplitMix64, pool: &mut [usize], k: usize) -> Vec<usize> {
    (0..k)
        .map(|i| {
            let j = i + rng.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
            pool[i]
        })
        .collect()
}

/// Build a closed, deterministic community. See the module docs for the exact draw order.
pub fn generate_community(config: &SimConfig) -> Result<Dataset, SimError> {
    config.validate()?;
    let mut rng = SplitMix64::new(config.seed);
    let n = config.n_researchers;
    let (min_authors, max_authors) = config.authors_per_paper;
    let n_papers = n * config.papers_per_researcher;
    let span = (config.end_date - config.start_date).num_days() as u64;

    let ids: Vec<ResearcherId> = (0..n)
        .map(|i| ResearcherId::new(padded('r', i, n)).expect("non-empty"))
        .collect();

    let mut papers = Vec::with_capacity(n_papers);
    // (reviewer index, date, paper index); ids are assigned afterwards so the
    // width depends on the final count.
    let mut reviews: Vec<(usize, NaiveDate, usize)> = Vec::new();

    for k in 0..n_papers {
        let size = min_authors + rng.below((max_authors - min_authors + 1) as u64) as usize;
        let lead = k % n;
        let mut others: Vec<usize> = (0..n).filter(|&i| i != lead).collect();
        let mut authors = vec![lead];
        authors.extend(pick_distinct(&mut rng, &mut others, size - 1));

        let published = config.start_date + Days::new(rng.below(span + 1));
        let count = config.reviews.draw(&mut rng);

        let mut pool: Vec<usize> = (0..n).filter(|i| !authors.contains(i)).collect();
        let review_window = (published
            .checked_add_months(Months::new(6))
            .unwrap_or(NaiveDate::MAX)
            - published)
            .num_days() as u64;
        let mut used = 0;
        for _ in 0..count {
            if used == pool.len() {
                used = 0;
            }
            let reviewer = pick_distinct(&mut rng, &mut pool[used..], 1)[0];
            used += 1;
            let date = published + Days::new(rng.below(review_window + 1));
            reviews.push((reviewer, date, k));
        }

        papers.push(PaperRecord {
            paper_id: PaperId::new(padded('p', k, n_papers)).expect("non-empty"),
            publication_date: published,
            authors: authors.iter().map(|&i| ids[i].clone()).collect(),
            reviews_received: count,
        });
    }

    let n_events = reviews.len();
    let events = reviews
        .into_iter()
        .enumerate()
        .map(|(i, (reviewer, date, paper))| ReviewEvent {
            paper_id: Some(papers[paper].paper_id.clone()),
            ..ReviewEvent::manuscript(
                EventId::new(padded('e', i, n_events)).expect("non-empty"),
                ids[reviewer].clone(),
                date,
            )
        })
        .collect();

    Ok(validate_dataset(papers, events).expect("generated records satisfy every invariant"))
}

/// Total reviews `n_papers` publications are expected to demand: mean, and
/// one standard deviation either side.
#[derive(Debug, Clone, PartialEq)]
pub struct Burden<S> {
    pub mean: S,
    pub low: S,
    pub high: S,
}

/// `n × mean`, `n × (mean − sd)`, `n × (mean + sd)` with the default
/// per-paper statistics, computed in `S`. Exact for rational `S`.
pub fn expected_burden<S: Scalar>(n_papers: u64) -> Result<Burden<S>, SimError> {
    if n_papers == 0 {
        return Err(SimError::NoPapers);
    }
    let mean = S::share(349, 100);
    let sd = S::share(145, 100);
    let n = S::from_count(n_papers);
    Ok(Burden {
        mean: n.clone() * mean.clone(),
        low: n.clone() * (mean.clone() - sd.clone()),
        high: n * (mean + sd),
    })
}
