//! Ledger records and the validated, immutable [`Dataset`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lag applied when none is configured: two calendar years.
pub const DEFAULT_LAG_MONTHS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} must not be empty")]
pub struct EmptyIdError {
    kind: &'static str,
}

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident, $kind:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            /// Rejects ids that are empty or whitespace-only. The id is kept verbatim.
            pub fn new(id: impl Into<String>) -> Result<Self, EmptyIdError> {
                let id = id.into();
                if id.trim().is_empty() {
                    return Err(EmptyIdError { kind: $kind });
                }
                Ok(Self(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = EmptyIdError;

            fn try_from(s: String) -> Result<Self, Self::Error> {
                Self::new(s)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_id!(
    /// Opaque researcher identifier. Identity is exact string equality.
    ResearcherId,
    "researcher id"
);
string_id!(PaperId, "paper id");
string_id!(EventId, "event id");

/// One publication and the number of reviews it received.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: PaperId,
    pub publication_date: NaiveDate,
    pub authors: Vec<ResearcherId>,
    pub reviews_received: u32,
}

impl PaperRecord {
    pub fn has_author(&self, researcher: &ResearcherId) -> bool {
        self.authors.iter().any(|a| a == researcher)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewKind {
    /// A peer review of a manuscript.
    ManuscriptReview,
    /// One round of editorial handling.
    EditorialRound,
    /// Editorial handling of a whole paper.
    EditorialPaper,
}

impl ReviewKind {
    pub const ALL: [ReviewKind; 3] = [
        ReviewKind::ManuscriptReview,
        ReviewKind::EditorialRound,
        ReviewKind::EditorialPaper,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReviewKind::ManuscriptReview => "manuscript_review",
            ReviewKind::EditorialRound => "editorial_round",
            ReviewKind::EditorialPaper => "editorial_paper",
        }
    }

    pub fn is_editorial(self) -> bool {
        !matches!(self, ReviewKind::ManuscriptReview)
    }
}

impl fmt::Display for ReviewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ReviewKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReviewKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind `{s}`"))
    }
}

/// One act of reviewing or editing performed by a researcher.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewEvent {
    pub event_id: EventId,
    pub reviewer: ResearcherId,
    pub event_date: NaiveDate,
    pub kind: ReviewKind,
    /// Set by an editor to disqualify a manuscript review.
    pub excluded: bool,
    /// Free-text justification for an exclusion, if one was recorded.
    pub exclusion_reason: Option<String>,
    /// The reviewed paper, when it is part of the same ledger.
    pub paper_id: Option<PaperId>,
}

impl ReviewEvent {
    /// A non-excluded, unlinked manuscript review.
    pub fn manuscript(event_id: EventId, reviewer: ResearcherId, event_date: NaiveDate) -> Self {
        ReviewEvent {
            event_id,
            reviewer,
            event_date,
            kind: ReviewKind::ManuscriptReview,
            excluded: false,
            exclusion_reason: None,
            paper_id: None,
        }
    }
}

/// How editorial rounds count toward completed reviews.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditorialMode {
    /// Every editorial round is one completed review.
    #[default]
    PerRound,
    /// All rounds an editor handled on one paper count once.
    PerPaper,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("window start {window_start} is after as-of date {as_of}")]
    WindowAfterAsOf {
        window_start: NaiveDate,
        as_of: NaiveDate,
    },
}

/// Parameters of one R-Index evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationConfig {
    as_of: NaiveDate,
    window_start: Option<NaiveDate>,
    lag_months: u32,
    editorial_mode: EditorialMode,
    honor_exclusions: bool,
}

impl EvaluationConfig {
    /// Default lag, per-round editorial counting, exclusions honored, no window start.
    pub fn new(as_of: NaiveDate) -> Self {
        EvaluationConfig {
            as_of,
            window_start: None,
            lag_months: DEFAULT_LAG_MONTHS,
            editorial_mode: EditorialMode::default(),
            honor_exclusions: true,
        }
    }

    pub fn with_window_start(mut self, start: Option<NaiveDate>) -> Result<Self, ConfigError> {
        if let Some(start) = start {
            if start > self.as_of {
                return Err(ConfigError::WindowAfterAsOf {
                    window_start: start,
                    as_of: self.as_of,
                });
            }
        }
        self.window_start = start;
        Ok(self)
    }

    pub fn with_lag_months(mut self, lag_months: u32) -> Self {
        self.lag_months = lag_months;
        self
    }

    pub fn with_editorial_mode(mut self, mode: EditorialMode) -> Self {
        self.editorial_mode = mode;
        self
    }

    pub fn with_honor_exclusions(mut self, honor: bool) -> Self {
        self.honor_exclusions = honor;
        self
    }

    pub fn as_of(&self) -> NaiveDate {
        self.as_of
    }

    pub fn window_start(&self) -> Option<NaiveDate> {
        self.window_start
    }

    pub fn lag_months(&self) -> u32 {
        self.lag_months
    }

    pub fn editorial_mode(&self) -> EditorialMode {
        self.editorial_mode
    }

    pub fn honor_exclusions(&self) -> bool {
        self.honor_exclusions
    }

    /// Whether `date` lies in `[window_start, as_of]`.
    pub fn in_window(&self, date: NaiveDate) -> bool {
        date <= self.as_of && self.window_start.is_none_or(|start| date >= start)
    }
}

/// A single invariant violation. `index` is the offending record's position
/// in the list handed to [`validate_dataset`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("duplicate paper_id `{paper_id}`")]
    DuplicatePaperId { index: usize, paper_id: PaperId },
    #[error("duplicate event_id `{event_id}`")]
    DuplicateEventId { index: usize, event_id: EventId },
    #[error("empty author list for paper `{paper_id}`")]
    EmptyAuthorList { index: usize, paper_id: PaperId },
    #[error("duplicate author `{author}` in paper `{paper_id}`")]
    DuplicateAuthor {
        index: usize,
        paper_id: PaperId,
        author: ResearcherId,
    },
    #[error("dangling paper reference `{paper_id}` in event `{event_id}`")]
    DanglingPaperReference {
        index: usize,
        event_id: EventId,
        paper_id: PaperId,
    },
    #[error("exclusion flag invalid for editorial events (event `{event_id}` is {kind})")]
    ExclusionOnEditorial {
        index: usize,
        event_id: EventId,
        kind: ReviewKind,
    },
}

impl ValidationError {
    /// Which input list the offending record came from.
    pub fn source(&self) -> RecordSource {
        match self {
            ValidationError::DuplicatePaperId { .. }
            | ValidationError::EmptyAuthorList { .. }
            | ValidationError::DuplicateAuthor { .. } => RecordSource::Papers,
            _ => RecordSource::Events,
        }
    }

    pub fn index(&self) -> usize {
        match self {
            ValidationError::DuplicatePaperId { index, .. }
            | ValidationError::DuplicateEventId { index, .. }
            | ValidationError::EmptyAuthorList { index, .. }
            | ValidationError::DuplicateAuthor { index, .. }
            | ValidationError::DanglingPaperReference { index, .. }
            | ValidationError::ExclusionOnEditorial { index, .. } => *index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordSource {
    Papers,
    Events,
}

/// Every violation found, in input order (papers first).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} validation error(s)", .0.len())]
pub struct ValidationErrors(pub Vec<ValidationError>);

/// Suspicious but legal patterns in a valid dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetWarning {
    /// A reviewer is an author of the paper the review is linked to.
    SelfReview {
        event_id: EventId,
        reviewer: ResearcherId,
        paper_id: PaperId,
    },
    /// One researcher both reviewed and edited the same paper; both count.
    ReviewerAlsoEditor {
        researcher: ResearcherId,
        paper_id: PaperId,
    },
}

impl fmt::Display for DatasetWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetWarning::SelfReview {
                event_id,
                reviewer,
                paper_id,
            } => write!(
                f,
                "self-review: `{reviewer}` is an author of `{paper_id}` (event `{event_id}`)"
            ),
            DatasetWarning::ReviewerAlsoEditor {
                researcher,
                paper_id,
            } => write!(
                f,
                "`{researcher}` both reviewed and edited `{paper_id}`; both are counted"
            ),
        }
    }
}

/// Validated collection of papers and review events. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    papers: BTreeMap<PaperId, PaperRecord>,
    events: BTreeMap<EventId, ReviewEvent>,
    researchers: BTreeSet<ResearcherId>,
    papers_by_author: BTreeMap<ResearcherId, Vec<PaperId>>,
    events_by_reviewer: BTreeMap<ResearcherId, Vec<EventId>>,
}

impl Dataset {
    pub fn papers(&self) -> impl ExactSizeIterator<Item = &PaperRecord> {
        self.papers.values()
    }

    pub fn events(&self) -> impl ExactSizeIterator<Item = &ReviewEvent> {
        self.events.values()
    }

    pub fn paper(&self, id: &PaperId) -> Option<&PaperRecord> {
        self.papers.get(id)
    }

    pub fn event(&self, id: &EventId) -> Option<&ReviewEvent> {
        self.events.get(id)
    }

    /// Everyone appearing as an author or a reviewer, ascending.
    pub fn researchers(&self) -> &BTreeSet<ResearcherId> {
        &self.researchers
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty() && self.events.is_empty()
    }

    /// Papers listing `researcher` as an author, by paper id.
    pub fn papers_authored_by<'a>(
        &'a self,
        researcher: &ResearcherId,
    ) -> impl Iterator<Item = &'a PaperRecord> + 'a {
        self.papers_by_author
            .get(researcher)
            .into_iter()
            .flatten()
            .map(|id| &self.papers[id])
    }

    /// Events performed by `researcher`, by event id.
    pub fn events_by<'a>(
        &'a self,
        researcher: &ResearcherId,
    ) -> impl Iterator<Item = &'a ReviewEvent> + 'a {
        self.events_by_reviewer
            .get(researcher)
            .into_iter()
            .flatten()
            .map(|id| &self.events[id])
    }

    /// The raw records, sorted by id. Feeding them back to
    /// [`validate_dataset`] reproduces this dataset.
    pub fn records(&self) -> (Vec<PaperRecord>, Vec<ReviewEvent>) {
        (
            self.papers.values().cloned().collect(),
            self.events.values().cloned().collect(),
        )
    }

    pub fn warnings(&self) -> Vec<DatasetWarning> {
        let mut warnings = Vec::new();
        let mut roles: BTreeMap<(&ResearcherId, &PaperId), (bool, bool)> = BTreeMap::new();
        for event in self.events.values() {
            let Some(paper_id) = &event.paper_id else {
                continue;
            };
            let paper = &self.papers[paper_id];
            if paper.has_author(&event.reviewer) {
                warnings.push(DatasetWarning::SelfReview {
                    event_id: event.event_id.clone(),
                    reviewer: event.reviewer.clone(),
                    paper_id: paper_id.clone(),
                });
            }
            let role = roles.entry((&event.reviewer, paper_id)).or_default();
            if event.kind.is_editorial() {
                role.1 = true;
            } else {
                role.0 = true;
            }
        }
        warnings.extend(
            roles
                .into_iter()
                .filter(|(_, (reviewed, edited))| *reviewed && *edited)
                .map(|((researcher, paper_id), _)| DatasetWarning::ReviewerAlsoEditor {
                    researcher: researcher.clone(),
                    paper_id: paper_id.clone(),
                }),
        );
        warnings
    }
}

/// Check every record invariant and build a [`Dataset`], or report all
/// violations at once.
pub fn validate_dataset(
    papers: Vec<PaperRecord>,
    events: Vec<ReviewEvent>,
) -> Result<Dataset, ValidationErrors> {
    validate_with_known_papers(papers, events, &HashSet::new())
}

/// As [`validate_dataset`], but paper ids in `unparsed_papers` (records that
/// exist in the source but failed to parse) are not reported as dangling.
pub(crate) fn validate_with_known_papers(
    papers: Vec<PaperRecord>,
    events: Vec<ReviewEvent>,
    unparsed_papers: &HashSet<String>,
) -> Result<Dataset, ValidationErrors> {
    let mut errors = Vec::new();
    let mut by_id: BTreeMap<PaperId, PaperRecord> = BTreeMap::new();

    for (index, paper) in papers.into_iter().enumerate() {
        if by_id.contains_key(&paper.paper_id) {
            errors.push(ValidationError::DuplicatePaperId {
                index,
                paper_id: paper.paper_id,
            });
            continue;
        }
        if paper.authors.is_empty() {
            errors.push(ValidationError::EmptyAuthorList {
                index,
                paper_id: paper.paper_id.clone(),
            });
        }
        let mut seen = HashSet::new();
        let mut reported = HashSet::new();
        for author in &paper.authors {
            if !seen.insert(author) && reported.insert(author) {
                errors.push(ValidationError::DuplicateAuthor {
                    index,
                    paper_id: paper.paper_id.clone(),
                    author: author.clone(),
                });
            }
        }
        by_id.insert(paper.paper_id.clone(), paper);
    }

    let mut events_by_id: BTreeMap<EventId, ReviewEvent> = BTreeMap::new();
    let mut suppressed = false;
    for (index, event) in events.into_iter().enumerate() {
        if events_by_id.contains_key(&event.event_id) {
            errors.push(ValidationError::DuplicateEventId {
                index,
                event_id: event.event_id,
            });
            continue;
        }
        if let Some(paper_id) = &event.paper_id {
            if unparsed_papers.contains(paper_id.as_str()) && !by_id.contains_key(paper_id) {
                suppressed = true;
            } else if !by_id.contains_key(paper_id) {
                errors.push(ValidationError::DanglingPaperReference {
                    index,
                    event_id: event.event_id.clone(),
                    paper_id: paper_id.clone(),
                });
            }
        }
        if event.excluded && event.kind.is_editorial() {
            errors.push(ValidationError::ExclusionOnEditorial {
                index,
                event_id: event.event_id.clone(),
                kind: event.kind,
            });
        }
        events_by_id.insert(event.event_id.clone(), event);
    }

    // A suppressed reference still leaves no valid dataset; the caller
    // already holds the parse error explaining it.
    if !errors.is_empty() || suppressed {
        return Err(ValidationErrors(errors));
    }

    let mut papers_by_author: BTreeMap<ResearcherId, Vec<PaperId>> = BTreeMap::new();
    for paper in by_id.values() {
        for author in &paper.authors {
            papers_by_author
                .entry(author.clone())
                .or_default()
                .push(paper.paper_id.clone());
        }
    }
    let mut events_by_reviewer: BTreeMap<ResearcherId, Vec<EventId>> = BTreeMap::new();
    for event in events_by_id.values() {
        events_by_reviewer
            .entry(event.reviewer.clone())
            .or_default()
            .push(event.event_id.clone());
    }
    let researchers = papers_by_author
        .keys()
        .chain(events_by_reviewer.keys())
        .cloned()
        .collect();

    Ok(Dataset {
        papers: by_id,
        events: events_by_id,
        researchers,
        papers_by_author,
        events_by_reviewer,
    })
}

/// Count events per linked paper. Used by cross-checks and closedness tests.
pub(crate) fn linked_counts<'a>(
    events: impl Iterator<Item = &'a ReviewEvent>,
    kind: ReviewKind,
) -> HashMap<&'a PaperId, u64> {
    let mut counts = HashMap::new();
    for event in events.filter(|e| e.kind == kind) {
        if let Some(id) = &event.paper_id {
            *counts.entry(id).or_insert(0) += 1;
        }
    }
    counts
}
