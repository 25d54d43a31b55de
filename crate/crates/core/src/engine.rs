//! R-Index computation: per-author review responsibility, completed reviews,
//! and their difference.
//!
//! Everything here is a pure function of a [`Dataset`] and an
//! [`EvaluationConfig`], generic over the [`Scalar`] the shares are summed in.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Months, NaiveDate};
use thiserror::Error;

use crate::model::{
    linked_counts, Dataset, EditorialMode, EvaluationConfig, EventId, PaperId, PaperRecord,
    ResearcherId, ReviewKind,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(
        "editorial round requires paper linkage for per-paper collapsing \
         (event `{event_id}`, researcher `{researcher}`)"
    )]
    UnlinkedEditorialRound {
        event_id: EventId,
        researcher: ResearcherId,
    },
}

/// Per-researcher result with the full breakdown behind the number.
#[derive(Debug, Clone, PartialEq)]
pub struct Report<S> {
    pub researcher: ResearcherId,
    /// Sum of `per_paper_shares`.
    pub responsibility_total: S,
    pub completed_total: u64,
    /// `completed_total - responsibility_total`.
    pub r_index: S,
    pub per_paper_shares: Vec<(PaperId, S)>,
    pub counted_events: Vec<EventId>,
    pub excluded_events: Vec<EventId>,
    pub lagged_out_papers: Vec<PaperId>,
}

/// A paper whose declared review count disagrees with its linked manuscript reviews.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub paper_id: PaperId,
    pub declared: u64,
    pub observed: u64,
}

/// The review demand one paper places on each of its authors.
pub fn review_responsibility<S: Scalar>(paper: &PaperRecord) -> S {
    S::share(u64::from(paper.reviews_received), paper.authors.len())
}

/// True once `lag_months` calendar months have passed between `published`
/// and `as_of`. The month is advanced with the day clamped to month end, so
/// 2020-02-29 plus 12 months is 2021-02-28.
pub fn lag_elapsed(published: NaiveDate, as_of: NaiveDate, lag_months: u32) -> bool {
    published
        .checked_add_months(Months::new(lag_months))
        .is_some_and(|due| due <= as_of)
}

fn published_in_window(paper: &PaperRecord, config: &EvaluationConfig) -> bool {
    config
        .window_start()
        .is_none_or(|start| paper.publication_date >= start)
}

pub fn paper_is_eligible(
    paper: &PaperRecord,
    researcher: &ResearcherId,
    config: &EvaluationConfig,
) -> bool {
    paper.has_author(researcher)
        && published_in_window(paper, config)
        && lag_elapsed(paper.publication_date, config.as_of(), config.lag_months())
}

pub fn responsibility_total<S: Scalar>(
    researcher: &ResearcherId,
    dataset: &Dataset,
    config: &EvaluationConfig,
) -> S {
    dataset
        .papers_authored_by(researcher)
        .filter(|p| paper_is_eligible(p, researcher, config))
        .map(review_responsibility::<S>)
        .sum()
}

struct Tally {
    completed: u64,
    counted: Vec<EventId>,
    excluded: Vec<EventId>,
}

fn tally_events(
    researcher: &ResearcherId,
    dataset: &Dataset,
    config: &EvaluationConfig,
) -> Result<Tally, EngineError> {
    let mut tally = Tally {
        completed: 0,
        counted: Vec::new(),
        excluded: Vec::new(),
    };
    let mut edited_papers: BTreeSet<&PaperId> = BTreeSet::new();

    for event in dataset
        .events_by(researcher)
        .filter(|e| config.in_window(e.event_date))
    {
        match event.kind {
            ReviewKind::ManuscriptReview if event.excluded && config.honor_exclusions() => {
                tally.excluded.push(event.event_id.clone());
                continue;
            }
            ReviewKind::ManuscriptReview | ReviewKind::EditorialPaper => tally.completed += 1,
            ReviewKind::EditorialRound => match config.editorial_mode() {
                EditorialMode::PerRound => tally.completed += 1,
                EditorialMode::PerPaper => {
                    let paper_id = event.paper_id.as_ref().ok_or_else(|| {
                        EngineError::UnlinkedEditorialRound {
                            event_id: event.event_id.clone(),
                            researcher: researcher.clone(),
                        }
                    })?;
                    if edited_papers.insert(paper_id) {
                        tally.completed += 1;
                    }
                }
            },
        }
        tally.counted.push(event.event_id.clone());
    }
    Ok(tally)
}

/// Reviews `researcher` completed inside the evaluation window.
///
/// No lag applies here. In per-paper editorial mode all rounds sharing a
/// paper collapse to one; every `counted_events` entry of the report still
/// lists each contributing round.
pub fn completed_total(
    researcher: &ResearcherId,
    dataset: &Dataset,
    config: &EvaluationConfig,
) -> Result<u64, EngineError> {
    tally_events(researcher, dataset, config).map(|t| t.completed)
}

pub fn r_index<S: Scalar>(
    researcher: &ResearcherId,
    dataset: &Dataset,
    config: &EvaluationConfig,
) -> Result<Report<S>, EngineError> {
    let tally = tally_events(researcher, dataset, config)?;

    let mut per_paper_shares = Vec::new();
    let mut lagged_out_papers = Vec::new();
    for paper in dataset
        .papers_authored_by(researcher)
        .filter(|p| published_in_window(p, config))
    {
        if lag_elapsed(paper.publication_date, config.as_of(), config.lag_months()) {
            per_paper_shares.push((paper.paper_id.clone(), review_responsibility::<S>(paper)));
        } else {
            lagged_out_papers.push(paper.paper_id.clone());
        }
    }

    let responsibility_total: S = per_paper_shares.iter().map(|(_, s)| s.clone()).sum();
    let r_index = S::from_count(tally.completed) - responsibility_total.clone();
    Ok(Report {
        researcher: researcher.clone(),
        responsibility_total,
        completed_total: tally.completed,
        r_index,
        per_paper_shares,
        counted_events: tally.counted,
        excluded_events: tally.excluded,
        lagged_out_papers,
    })
}

/// One report per researcher in the dataset, ascending by researcher id.
pub fn compute_all<S: Scalar>(
    dataset: &Dataset,
    config: &EvaluationConfig,
) -> Result<Vec<Report<S>>, EngineError> {
    dataset
        .researchers()
        .iter()
        .map(|r| r_index(r, dataset, config))
        .collect()
}

/// `Σ r_index - (Σ completed - Σ reviews_received over eligible papers)`.
///
/// Always zero; the second term is aggregated per paper rather than per
/// researcher, so a nonzero value means the per-author shares leaked.
pub fn conservation_residual<S: Scalar>(
    dataset: &Dataset,
    config: &EvaluationConfig,
) -> Result<S, EngineError> {
    let reports = compute_all::<S>(dataset, config)?;
    let sum_r: S = reports.iter().map(|r| r.r_index.clone()).sum();
    let completed: u64 = reports.iter().map(|r| r.completed_total).sum();
    let demanded: u64 = dataset
        .papers()
        .filter(|p| {
            published_in_window(p, config)
                && lag_elapsed(p.publication_date, config.as_of(), config.lag_months())
        })
        .map(|p| u64::from(p.reviews_received))
        .sum();
    Ok(sum_r - (S::from_count(completed) - S::from_count(demanded)))
}

/// Papers whose linked manuscript reviews disagree with their declared count.
/// Papers with no linked reviews are skipped.
pub fn cross_check_review_counts(dataset: &Dataset) -> Vec<Discrepancy> {
    let observed = linked_counts(dataset.events(), ReviewKind::ManuscriptReview);
    dataset
        .papers()
        .filter_map(|paper| {
            let seen = *observed.get(&paper.paper_id)?;
            let declared = u64::from(paper.reviews_received);
            (seen != declared).then(|| Discrepancy {
                paper_id: paper.paper_id.clone(),
                declared,
                observed: seen,
            })
        })
        .collect()
}

/// Why a dataset is not a closed review community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureIssue {
    UnlinkedReview(EventId),
    EditorialEvent(EventId),
    ExcludedReview(EventId),
    /// Unlike [`cross_check_review_counts`], papers with no linked reviews
    /// are included.
    CountMismatch(Discrepancy),
}

/// Everything preventing `dataset` from balancing to zero under lag 0 and
/// no window. Excluded reviews only matter when `honor_exclusions` is set.
pub fn closure_issues(dataset: &Dataset, honor_exclusions: bool) -> Vec<ClosureIssue> {
    let mut issues = Vec::new();
    for event in dataset.events() {
        if event.kind.is_editorial() {
            issues.push(ClosureIssue::EditorialEvent(event.event_id.clone()));
        } else if event.paper_id.is_none() {
            issues.push(ClosureIssue::UnlinkedReview(event.event_id.clone()));
        } else if honor_exclusions && event.excluded {
            issues.push(ClosureIssue::ExcludedReview(event.event_id.clone()));
        }
    }
    let observed = linked_counts(dataset.events(), ReviewKind::ManuscriptReview);
    for paper in dataset.papers() {
        let seen = observed.get(&paper.paper_id).copied().unwrap_or(0);
        let declared = u64::from(paper.reviews_received);
        if seen != declared {
            issues.push(ClosureIssue::CountMismatch(Discrepancy {
                paper_id: paper.paper_id.clone(),
                declared,
                observed: seen,
            }));
        }
    }
    issues
}

/// Latest publication or event date in the dataset.
pub fn latest_date(dataset: &Dataset) -> Option<NaiveDate> {
    dataset
        .papers()
        .map(|p| p.publication_date)
        .chain(dataset.events().map(|e| e.event_date))
        .max()
}

/// Per-paper shares summed over every author. Equals the declared review
/// count for each paper when the scalar is exact.
pub fn shares_by_paper<S: Scalar>(dataset: &Dataset) -> BTreeMap<PaperId, S> {
    dataset
        .papers()
        .map(|p| {
            let share = review_responsibility::<S>(p);
            let total = p.authors.iter().map(|_| share.clone()).sum();
            (p.paper_id.clone(), total)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_dataset, ReviewEvent};
    use crate::Rational;
    use num_bigint::BigInt;

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn rid(s: &str) -> ResearcherId {
        ResearcherId::new(s).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn paper(id: &str, published: &str, authors: &[&str], reviews: u32) -> PaperRecord {
        PaperRecord {
            paper_id: PaperId::new(id).unwrap(),
            publication_date: date(published),
            authors: authors.iter().map(|a| rid(a)).collect(),
            reviews_received: reviews,
        }
    }

    fn review(id: &str, reviewer: &str, on: &str) -> ReviewEvent {
        ReviewEvent::manuscript(EventId::new(id).unwrap(), rid(reviewer), date(on))
    }

    fn editorial(id: &str, reviewer: &str, kind: ReviewKind, paper: Option<&str>) -> ReviewEvent {
        ReviewEvent {
            kind,
            paper_id: paper.map(|p| PaperId::new(p).unwrap()),
            ..review(id, reviewer, "2022-01-01")
        }
    }

    fn cfg(as_of: &str, lag: u32) -> EvaluationConfig {
        EvaluationConfig::new(date(as_of)).with_lag_months(lag)
    }

    #[test]
    fn responsibility_examples() {
        let share: Rational = review_responsibility(&paper("p", "2020-01-01", &["a", "b", "c", "d"], 6));
        assert_eq!(share, rat(3, 2));
        let share: Rational = review_responsibility(&paper("p", "2020-01-01", &["a", "b", "c"], 0));
        assert_eq!(share, rat(0, 1));
        let share: Rational = review_responsibility(&paper("p", "2020-01-01", &["a", "b", "c"], 7));
        assert_eq!(share, rat(7, 3));
        let approx: f64 = review_responsibility(&paper("p", "2020-01-01", &["a", "b", "c", "d"], 6));
        assert_eq!(approx, 1.5);
    }

    #[test]
    fn eligibility_examples() {
        let recent = paper("p", "2023-06-01", &["a1"], 3);
        assert!(!paper_is_eligible(&recent, &rid("a1"), &cfg("2024-06-01", 24)));
        let old = paper("p", "2021-06-01", &["a1"], 3);
        assert!(paper_is_eligible(&old, &rid("a1"), &cfg("2024-06-01", 24)));
        assert!(!paper_is_eligible(&old, &rid("zz"), &cfg("2024-06-01", 24)));
    }

    #[test]
    fn lag_boundary_is_inclusive_and_clamped() {
        assert!(lag_elapsed(date("2022-06-01"), date("2024-06-01"), 24));
        assert!(!lag_elapsed(date("2022-06-02"), date("2024-06-01"), 24));
        // Feb 29 plus a year clamps to Feb 28.
        assert!(lag_elapsed(date("2020-02-29"), date("2021-02-28"), 12));
        assert!(!lag_elapsed(date("2020-02-29"), date("2021-02-27"), 12));
        // Aug 31 plus 6 months clamps to end of February.
        assert!(lag_elapsed(date("2023-08-31"), date("2024-02-29"), 6));
        assert!(lag_elapsed(date("2024-06-01"), date("2024-06-01"), 0));
        assert!(!lag_elapsed(date("2024-06-02"), date("2024-06-01"), 0));
    }

    #[test]
    fn window_filters_papers_and_events() {
        let ds = validate_dataset(
            vec![
                paper("old", "2010-01-01", &["a"], 4),
                paper("new", "2019-01-01", &["a"], 2),
            ],
            vec![review("e0", "a", "2014-12-31"), review("e1", "a", "2015-01-01")],
        )
        .unwrap();
        let cfg = cfg("2024-01-01", 0)
            .with_window_start(Some(date("2015-01-01")))
            .unwrap();
        let report: Report<Rational> = r_index(&rid("a"), &ds, &cfg).unwrap();
        assert_eq!(report.responsibility_total, rat(2, 1));
        assert_eq!(report.completed_total, 1);
        assert_eq!(report.r_index, rat(-1, 1));
        // Out-of-window papers are not "lagged out", they are simply absent.
        assert!(report.lagged_out_papers.is_empty());
    }

    #[test]
    fn events_after_as_of_ignored() {
        let ds = validate_dataset(vec![], vec![review("e1", "a", "2024-06-02")]).unwrap();
        assert_eq!(completed_total(&rid("a"), &ds, &cfg("2024-06-01", 0)).unwrap(), 0);
    }

    #[test]
    fn responsibility_total_examples() {
        let ds = validate_dataset(
            vec![
                paper("p1", "2020-01-01", &["a", "b", "c", "d"], 6),
                paper("p2", "2020-01-01", &["a", "e"], 5),
                paper("p3", "2020-01-01", &["e", "f"], 4),
            ],
            vec![],
        )
        .unwrap();
        let c = cfg("2024-01-01", 0);
        assert_eq!(responsibility_total::<Rational>(&rid("a"), &ds, &c), rat(4, 1));
        assert_eq!(responsibility_total::<Rational>(&rid("f"), &ds, &c), rat(2, 1));
        assert_eq!(responsibility_total::<Rational>(&rid("nobody"), &ds, &c), rat(0, 1));
    }

    #[test]
    fn editorial_modes() {
        let ds = validate_dataset(
            vec![paper("p1", "2020-01-01", &["a"], 0)],
            vec![
                editorial("r1", "ed", ReviewKind::EditorialRound, Some("p1")),
                editorial("r2", "ed", ReviewKind::EditorialRound, Some("p1")),
                editorial("r3", "ed", ReviewKind::EditorialRound, Some("p1")),
            ],
        )
        .unwrap();
        let per_round = cfg("2024-01-01", 0);
        let per_paper = per_round.clone().with_editorial_mode(EditorialMode::PerPaper);
        assert_eq!(completed_total(&rid("ed"), &ds, &per_round).unwrap(), 3);
        assert_eq!(completed_total(&rid("ed"), &ds, &per_paper).unwrap(), 1);
    }

    #[test]
    fn editorial_paper_counts_once_each_in_both_modes() {
        let ds = validate_dataset(
            vec![],
            vec![
                editorial("x1", "ed", ReviewKind::EditorialPaper, None),
                editorial("x2", "ed", ReviewKind::EditorialPaper, None),
            ],
        )
        .unwrap();
        for mode in [EditorialMode::PerRound, EditorialMode::PerPaper] {
            let c = cfg("2024-01-01", 0).with_editorial_mode(mode);
            assert_eq!(completed_total(&rid("ed"), &ds, &c).unwrap(), 2);
        }
    }

    #[test]
    fn unlinked_round_fails_only_in_per_paper_mode() {
        let ds = validate_dataset(
            vec![],
            vec![editorial("r1", "ed", ReviewKind::EditorialRound, None)],
        )
        .unwrap();
        let c = cfg("2024-01-01", 0);
        assert_eq!(completed_total(&rid("ed"), &ds, &c).unwrap(), 1);
        let err = compute_all::<Rational>(&ds, &c.with_editorial_mode(EditorialMode::PerPaper))
            .unwrap_err();
        assert!(err.to_string().contains("editorial round requires paper linkage"));
        assert!(err.to_string().contains("`ed`"));
    }

    #[test]
    fn exclusions() {
        let mut bad = review("e2", "a", "2022-01-01");
        bad.excluded = true;
        let ds = validate_dataset(vec![], vec![review("e1", "a", "2022-01-01"), bad]).unwrap();
        let c = cfg("2024-01-01", 0);
        let report: Report<Rational> = r_index(&rid("a"), &ds, &c).unwrap();
        assert_eq!(report.completed_total, 1);
        assert_eq!(report.excluded_events, vec![EventId::new("e2").unwrap()]);
        assert_eq!(report.counted_events, vec![EventId::new("e1").unwrap()]);

        let report: Report<Rational> = r_index(&rid("a"), &ds, &c.with_honor_exclusions(false)).unwrap();
        assert_eq!(report.completed_total, 2);
        assert!(report.excluded_events.is_empty());
    }

    #[test]
    fn r_index_examples() {
        let reviews: Vec<_> = (0..10).map(|i| review(&format!("e{i}"), "rev", "2022-01-01")).collect();
        let ds = validate_dataset(vec![paper("solo", "2020-01-01", &["s"], 3)], reviews).unwrap();
        let c = cfg("2024-01-01", 0);
        assert_eq!(r_index::<Rational>(&rid("rev"), &ds, &c).unwrap().r_index, rat(10, 1));
        assert_eq!(r_index::<Rational>(&rid("s"), &ds, &c).unwrap().r_index, rat(-3, 1));

        let ds = validate_dataset(
            vec![paper("p1", "2020-01-01", &["a", "b", "c", "d"], 6)],
            vec![review("e1", "a", "2022-01-01"), review("e2", "a", "2022-02-01")],
        )
        .unwrap();
        let report = r_index::<Rational>(&rid("a"), &ds, &c).unwrap();
        assert_eq!(report.r_index, rat(1, 2));
        assert_eq!(report.per_paper_shares, vec![(PaperId::new("p1").unwrap(), rat(3, 2))]);
    }

    #[test]
    fn lagged_out_papers_listed() {
        let ds = validate_dataset(vec![paper("p1", "2023-06-01", &["a"], 3)], vec![]).unwrap();
        let report = r_index::<Rational>(&rid("a"), &ds, &cfg("2024-06-01", 24)).unwrap();
        assert_eq!(report.responsibility_total, rat(0, 1));
        assert_eq!(report.lagged_out_papers, vec![PaperId::new("p1").unwrap()]);
    }

    #[test]
    fn compute_all_order_and_empty() {
        let empty = Dataset::default();
        assert!(compute_all::<Rational>(&empty, &cfg("2024-01-01", 0)).unwrap().is_empty());
        let ds = validate_dataset(vec![paper("p1", "2020-01-01", &["a2", "a1"], 2)], vec![]).unwrap();
        let ids: Vec<_> = compute_all::<Rational>(&ds, &cfg("2024-01-01", 0))
            .unwrap()
            .into_iter()
            .map(|r| r.researcher.to_string())
            .collect();
        assert_eq!(ids, ["a1", "a2"]);
    }

    #[test]
    fn cross_check_examples() {
        let linked = |i: usize, p: &str| ReviewEvent {
            paper_id: Some(PaperId::new(p).unwrap()),
            ..review(&format!("{p}-{i}"), "rev", "2021-01-01")
        };
        let mut events: Vec<_> = (0..6).map(|i| linked(i, "full")).collect();
        events.extend((0..4).map(|i| linked(i, "short")));
        let ds = validate_dataset(
            vec![
                paper("full", "2020-01-01", &["a"], 6),
                paper("short", "2020-01-01", &["a"], 6),
                paper("bare", "2020-01-01", &["a"], 6),
            ],
            events,
        )
        .unwrap();
        assert_eq!(
            cross_check_review_counts(&ds),
            vec![Discrepancy {
                paper_id: PaperId::new("short").unwrap(),
                declared: 6,
                observed: 4
            }]
        );
        // Closure is stricter: the bare paper is a mismatch too.
        let issues = closure_issues(&ds, true);
        assert_eq!(issues.len(), 2);
    }

    #[test]
    fn residual_is_zero() {
        let ds = validate_dataset(
            vec![
                paper("p1", "2020-01-01", &["a", "b", "c"], 7),
                paper("p2", "2023-12-01", &["a", "d"], 5),
            ],
            vec![review("e1", "d", "2021-01-01"), review("e2", "z", "2021-01-01")],
        )
        .unwrap();
        for lag in [0, 24] {
            let r: Rational = conservation_residual(&ds, &cfg("2024-01-01", lag)).unwrap();
            assert_eq!(r, rat(0, 1));
        }
    }

    #[test]
    fn shares_sum_back_to_review_counts() {
        let ds = validate_dataset(
            vec![paper("p1", "2020-01-01", &["a", "b", "c"], 7)],
            vec![],
        )
        .unwrap();
        let totals = shares_by_paper::<Rational>(&ds);
        assert_eq!(totals[&PaperId::new("p1").unwrap()], rat(7, 1));
    }
}
