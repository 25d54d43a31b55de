//! Seeded random ledgers for property and acceptance tests.
#![allow(dead_code)]

use chrono::{Days, NaiveDate};
use rindex_core::model::ReviewKind;
use rindex_core::{
    EditorialMode, EvaluationConfig, EventId, PaperId, PaperRecord, ResearcherId, ReviewEvent,
    SplitMix64,
};

pub fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

fn pick(rng: &mut SplitMix64, n: usize) -> usize {
    rng.below(n as u64) as usize
}

fn day_between(rng: &mut SplitMix64, from: &str, to: &str) -> NaiveDate {
    let (from, to) = (date(from), date(to));
    from + Days::new(rng.below((to - from).num_days() as u64 + 1))
}

/// Up to `max_researchers` researchers, up to `max_papers` papers, and up to
/// twice as many events of every kind. Editorial rounds are always linked so
/// per-paper mode never errors.
pub fn random_records(
    rng: &mut SplitMix64,
    max_researchers: usize,
    max_papers: usize,
) -> (Vec<PaperRecord>, Vec<ReviewEvent>) {
    let n_researchers = 1 + pick(rng, max_researchers);
    let ids: Vec<ResearcherId> = (0..n_researchers)
        .map(|i| ResearcherId::new(format!("a{i}")).unwrap())
        .collect();
    let n_papers = pick(rng, max_papers + 1);
    let papers: Vec<PaperRecord> = (0..n_papers)
        .map(|k| {
            let size = 1 + pick(rng, n_researchers.min(5));
            let mut pool: Vec<usize> = (0..n_researchers).collect();
            let authors = (0..size)
                .map(|i| {
                    let j = i + pick(rng, pool.len() - i);
                    pool.swap(i, j);
                    ids[pool[i]].clone()
                })
                .collect();
            PaperRecord {
                paper_id: PaperId::new(format!("p{k}")).unwrap(),
                publication_date: day_between(rng, "2014-01-01", "2024-12-31"),
                authors,
                reviews_received: pick(rng, 9) as u32,
            }
        })
        .collect();

    let n_events = pick(rng, 2 * max_papers + 1);
    let events = (0..n_events)
        .map(|k| {
            let kind = match (pick(rng, 6), papers.is_empty()) {
                (4, false) => ReviewKind::EditorialRound,
                (5, _) => ReviewKind::EditorialPaper,
                _ => ReviewKind::ManuscriptReview,
            };
            let linked = kind == ReviewKind::EditorialRound || pick(rng, 3) > 0;
            let paper_id = (linked && !papers.is_empty())
                .then(|| papers[pick(rng, papers.len())].paper_id.clone());
            let excluded = kind == ReviewKind::ManuscriptReview && pick(rng, 5) == 0;
            ReviewEvent {
                event_id: EventId::new(format!("e{k}")).unwrap(),
                reviewer: ids[pick(rng, n_researchers)].clone(),
                event_date: day_between(rng, "2014-01-01", "2025-06-30"),
                kind,
                excluded,
                exclusion_reason: None,
                paper_id,
            }
        })
        .collect();
    (papers, events)
}

pub fn random_config(rng: &mut SplitMix64) -> EvaluationConfig {
    let as_of = day_between(rng, "2016-01-01", "2025-12-31");
    let window = (pick(rng, 2) == 0).then(|| day_between(rng, "2013-01-01", "2016-01-01"));
    let mode = if pick(rng, 2) == 0 {
        EditorialMode::PerRound
    } else {
        EditorialMode::PerPaper
    };
    EvaluationConfig::new(as_of)
        .with_window_start(window)
        .unwrap()
        .with_lag_months(pick(rng, 37) as u32)
        .with_editorial_mode(mode)
        .with_honor_exclusions(pick(rng, 4) > 0)
}
