//! Reading and writing publication and review ledgers.
//!
//! Two formats are accepted, with identical field names:
//!
//! * CSV, UTF-8 (BOM stripped), exact header row
//!   `paper_id,publication_date,authors,reviews_received` for papers and
//!   `event_id,reviewer_id,event_date,kind,excluded,paper_id` for reviews.
//!   Authors are `;`-separated. Extra or missing columns are errors.
//! * JSON, an array of objects keyed by the same names, with `authors` as an
//!   array of strings. Review objects may carry an optional
//!   `exclusion_reason`, which CSV has no column for.
//!
//! Parsing never stops at the first bad record: every error is collected
//! with its line (CSV, header is line 1) or element index (JSON).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::engine::cross_check_review_counts;
use crate::model::{
    validate_with_known_papers, Dataset, EventId, PaperId, PaperRecord, RecordSource,
    ResearcherId, ReviewEvent, ReviewKind,
};

pub const PAPER_COLUMNS: [&str; 4] = ["paper_id", "publication_date", "authors", "reviews_received"];
pub const REVIEW_COLUMNS: [&str; 6] = [
    "event_id",
    "reviewer_id",
    "event_date",
    "kind",
    "excluded",
    "paper_id",
];
const AUTHOR_SEPARATOR: char = ';';
const UTF8_BOM: &[u8] = b"\xEF\xBB\xBF";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` means JSON; anything else is read as CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// Where in a source file a problem was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    /// The file as a whole (unreadable, not UTF-8, bad header, not an array).
    File,
    /// 1-based CSV line.
    Line(u64),
    /// 0-based JSON array element.
    Index(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::File => Ok(()),
            Location::Line(n) => write!(f, "line {n}"),
            Location::Index(i) => write!(f, "[{i}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {message}")]
pub struct ParseError {
    pub location: Location,
    pub message: String,
}

impl ParseError {
    fn new(location: Location, message: impl Into<String>) -> Self {
        ParseError {
            location,
            message: message.into(),
        }
    }
}

/// An error or warning tied to a file and a position in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub file: String,
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Location::File => write!(f, "{}: {}", self.file, self.message),
            _ => write!(f, "{}: {}: {}", self.file, self.location, self.message),
        }
    }
}

/// Result of [`load_dataset`]. `dataset` is present exactly when `errors` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport {
    pub dataset: Option<Dataset>,
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

/// A named byte stream; the name is what errors cite as the file.
pub struct Source<R> {
    pub name: String,
    pub reader: R,
}

impl<R: Read> Source<R> {
    pub fn new(name: impl Into<String>, reader: R) -> Self {
        Source {
            name: name.into(),
            reader,
        }
    }
}

struct Parsed<T> {
    records: Vec<(Location, T)>,
    errors: Vec<ParseError>,
    /// Ids of records that failed to parse but whose id field was readable.
    unparsed_ids: HashSet<String>,
}

impl<T> Parsed<T> {
    fn failed(error: ParseError) -> Self {
        Parsed {
            records: Vec::new(),
            errors: vec![error],
            unparsed_ids: HashSet::new(),
        }
    }

    fn into_result(self) -> Result<Vec<T>, Vec<ParseError>> {
        if self.errors.is_empty() {
            Ok(self.records.into_iter().map(|(_, r)| r).collect())
        } else {
            Err(self.errors)
        }
    }
}

pub fn parse_papers(source: impl Read, format: Format) -> Result<Vec<PaperRecord>, Vec<ParseError>> {
    parse_papers_located(source, format).into_result()
}

pub fn parse_reviews(source: impl Read, format: Format) -> Result<Vec<ReviewEvent>, Vec<ParseError>> {
    parse_reviews_located(source, format).into_result()
}

fn read_text(mut source: impl Read) -> Result<String, ParseError> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|e| ParseError::new(Location::File, format!("cannot read: {e}")))?;
    let body = bytes.strip_prefix(UTF8_BOM).unwrap_or(&bytes);
    String::from_utf8(body.to_vec())
        .map_err(|e| ParseError::new(Location::File, format!("not valid UTF-8: {e}")))
}

/// Field-level parse of one record; all field errors are collected.
struct Fields<'a> {
    location: Location,
    errors: &'a mut Vec<ParseError>,
}

impl Fields<'_> {
    fn err(&mut self, message: String) {
        self.errors.push(ParseError::new(self.location.clone(), message));
    }

    fn id<T>(&mut self, column: &str, raw: &str, make: impl Fn(String) -> Result<T, crate::model::EmptyIdError>) -> Option<T> {
        match make(raw.to_owned()) {
            Ok(id) => Some(id),
            Err(_) => {
                self.err(format!("empty {column}"));
                None
            }
        }
    }

    fn date(&mut self, column: &str, raw: &str) -> Option<NaiveDate> {
        let parsed = (raw.len() == 10 && raw.as_bytes()[4] == b'-' && raw.as_bytes()[7] == b'-')
            .then(|| NaiveDate::parse_from_str(raw, "%Y-%m-%d").ok())
            .flatten();
        if parsed.is_none() {
            self.err(format!("unparseable date `{raw}` in {column}"));
        }
        parsed
    }

    fn authors(&mut self, raw: &[String]) -> Option<Vec<ResearcherId>> {
        if raw.is_empty() || (raw.len() == 1 && raw[0].is_empty()) {
            self.err("empty authors".to_owned());
            return None;
        }
        let ids: Result<Vec<_>, _> = raw.iter().map(|a| ResearcherId::new(a.as_str())).collect();
        if ids.is_err() {
            self.err("empty author id in authors".to_owned());
        }
        ids.ok()
    }

    fn count(&mut self, raw: &str) -> Option<u32> {
        match raw.parse::<i64>() {
            Ok(n) if n < 0 => self.err(format!("negative reviews_received `{raw}`")),
            Ok(n) => match u32::try_from(n) {
                Ok(n) => return Some(n),
                Err(_) => self.err(format!("reviews_received `{raw}` out of range")),
            },
            Err(_) => self.err(format!("non-integer reviews_received `{raw}`")),
        }
        None
    }

    fn kind(&mut self, raw: &str) -> Option<ReviewKind> {
        raw.parse().map_err(|e: String| self.err(e)).ok()
    }

    fn flag(&mut self, raw: &str) -> Option<bool> {
        match raw {
            "true" => Some(true),
            "false" => Some(false),
            _ => {
                self.err(format!("bad boolean `{raw}` for excluded"));
                None
            }
        }
    }

    fn paper_ref(&mut self, raw: Option<&str>) -> Option<PaperId> {
        raw.filter(|s| !s.is_empty()).and_then(|s| PaperId::new(s).ok())
    }
}

/// Raw string fields of one record, independent of source format.
struct RawPaper {
    paper_id: String,
    publication_date: String,
    authors: Vec<String>,
    reviews_received: String,
}

struct RawReview {
    event_id: String,
    reviewer_id: String,
    event_date: String,
    kind: String,
    excluded: String,
    paper_id: Option<String>,
    exclusion_reason: Option<String>,
}

fn build_paper(raw: RawPaper, location: Location, errors: &mut Vec<ParseError>) -> Option<PaperRecord> {
    let mut f = Fields { location, errors };
    let paper_id = f.id("paper_id", &raw.paper_id, PaperId::new);
    let publication_date = f.date("publication_date", &raw.publication_date);
    let authors = f.authors(&raw.authors);
    let reviews_received = f.count(&raw.reviews_received);
    Some(PaperRecord {
        paper_id: paper_id?,
        publication_date: publication_date?,
        authors: authors?,
        reviews_received: reviews_received?,
    })
}

fn build_review(raw: RawReview, location: Location, errors: &mut Vec<ParseError>) -> Option<ReviewEvent> {
    let mut f = Fields { location, errors };
    let event_id = f.id("event_id", &raw.event_id, EventId::new);
    let reviewer = f.id("reviewer_id", &raw.reviewer_id, ResearcherId::new);
    let event_date = f.date("event_date", &raw.event_date);
    let kind = f.kind(&raw.kind);
    let excluded = f.flag(&raw.excluded);
    if let (Some(kind), Some(true)) = (kind, excluded) {
        if kind.is_editorial() {
            f.err(format!("exclusion flag invalid for editorial events (kind {kind})"));
            return None;
        }
    }
    let paper_id = f.paper_ref(raw.paper_id.as_deref());
    Some(ReviewEvent {
        event_id: event_id?,
        reviewer: reviewer?,
        event_date: event_date?,
        kind: kind?,
        excluded: excluded?,
        exclusion_reason: raw.exclusion_reason.filter(|_| excluded == Some(true)),
        paper_id,
    })
}

fn split_authors(cell: &str) -> Vec<String> {
    if cell.is_empty() {
        return Vec::new();
    }
    cell.split(AUTHOR_SEPARATOR).map(|a| a.trim().to_owned()).collect()
}

/// Read a CSV body, check its header, and hand each data row to `row`.
fn read_csv<T>(
    text: &str,
    columns: &[&str],
    mut row: impl FnMut(&csv::StringRecord, Location, &mut Vec<ParseError>) -> (Option<T>, Option<String>),
) -> Parsed<T> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();

    let header = match rows.next() {
        None => return Parsed::failed(ParseError::new(Location::File, "missing header row")),
        Some(Err(e)) => return Parsed::failed(ParseError::new(Location::Line(1), e.to_string())),
        Some(Ok(h)) => h,
    };
    let header_errors = check_header(&header, columns);
    if !header_errors.is_empty() {
        return Parsed {
            records: Vec::new(),
            errors: header_errors,
            unparsed_ids: HashSet::new(),
        };
    }

    let mut parsed = Parsed {
        records: Vec::new(),
        errors: Vec::new(),
        unparsed_ids: HashSet::new(),
    };
    for result in rows {
        let record = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(Location::File, |p| Location::Line(p.line()));
                parsed.errors.push(ParseError::new(line, e.to_string()));
                continue;
            }
        };
        let location = Location::Line(record.position().map_or(0, |p| p.line()));
        if record.len() != columns.len() {
            parsed.errors.push(ParseError::new(
                location,
                format!("expected {} fields, found {}", columns.len(), record.len()),
            ));
            if let Some(id) = record.get(0).filter(|s| !s.is_empty()) {
                parsed.unparsed_ids.insert(id.to_owned());
            }
            continue;
        }
        match row(&record, location.clone(), &mut parsed.errors) {
            (Some(value), _) => parsed.records.push((location, value)),
            (None, Some(id)) => {
                parsed.unparsed_ids.insert(id);
            }
            (None, None) => {}
        }
    }
    parsed
}

fn check_header(header: &csv::StringRecord, columns: &[&str]) -> Vec<ParseError> {
    let found: Vec<&str> = header.iter().collect();
    let mut errors: Vec<ParseError> = columns
        .iter()
        .filter(|c| !found.contains(c))
        .map(|c| ParseError::new(Location::Line(1), format!("missing column `{c}`")))
        .collect();
    errors.extend(
        found
            .iter()
            .filter(|c| !columns.contains(c))
            .map(|c| ParseError::new(Location::Line(1), format!("unexpected column `{c}`"))),
    );
    if errors.is_empty() && found != columns {
        errors.push(ParseError::new(
            Location::Line(1),
            format!("columns out of order, expected `{}`", columns.join(",")),
        ));
    }
    errors
}

/// JSON top level must be an array of objects with exactly the allowed keys.
fn read_json<T>(
    text: &str,
    required: &[&str],
    optional: &[&str],
    mut element: impl FnMut(&Map<String, Value>, Location, &mut Vec<ParseError>) -> (Option<T>, Option<String>),
) -> Parsed<T> {
    let items = match serde_json::from_str::<Value>(text) {
        Ok(Value::Array(items)) => items,
        Ok(_) => return Parsed::failed(ParseError::new(Location::File, "expected a JSON array")),
        Err(e) => return Parsed::failed(ParseError::new(Location::File, format!("invalid JSON: {e}"))),
    };
    let mut parsed = Parsed {
        records: Vec::new(),
        errors: Vec::new(),
        unparsed_ids: HashSet::new(),
    };
    for (i, item) in items.iter().enumerate() {
        let location = Location::Index(i);
        let Value::Object(obj) = item else {
            parsed.errors.push(ParseError::new(location, "expected an object"));
            continue;
        };
        let before = parsed.errors.len();
        for key in required.iter().filter(|k| !obj.contains_key(**k)) {
            parsed
                .errors
                .push(ParseError::new(location.clone(), format!("missing column `{key}`")));
        }
        for key in obj.keys().filter(|k| !required.contains(&k.as_str()) && !optional.contains(&k.as_str())) {
            parsed
                .errors
                .push(ParseError::new(location.clone(), format!("unexpected column `{key}`")));
        }
        if parsed.errors.len() > before {
            continue;
        }
        match element(obj, location.clone(), &mut parsed.errors) {
            (Some(value), _) => parsed.records.push((location, value)),
            (None, Some(id)) => {
                parsed.unparsed_ids.insert(id);
            }
            (None, None) => {}
        }
    }
    parsed
}

/// String value of a JSON field, trimmed. Non-strings are reported.
fn json_str(obj: &Map<String, Value>, key: &str, location: &Location, errors: &mut Vec<ParseError>) -> String {
    match &obj[key] {
        Value::String(s) => s.trim().to_owned(),
        other => {
            errors.push(ParseError::new(location.clone(), format!("{key} must be a string, found {other}")));
            String::new()
        }
    }
}

fn parse_papers_located(source: impl Read, format: Format) -> Parsed<PaperRecord> {
    let text = match read_text(source) {
        Ok(t) => t,
        Err(e) => return Parsed::failed(e),
    };
    match format {
        Format::Csv => read_csv(&text, &PAPER_COLUMNS, |rec, loc, errors| {
            let raw = RawPaper {
                paper_id: rec[0].to_owned(),
                publication_date: rec[1].to_owned(),
                authors: split_authors(&rec[2]),
                reviews_received: rec[3].to_owned(),
            };
            let id = raw.paper_id.clone();
            (build_paper(raw, loc, errors), Some(id).filter(|s| !s.is_empty()))
        }),
        Format::Json => read_json(&text, &PAPER_COLUMNS, &[], |obj, loc, errors| {
            let before = errors.len();
            let paper_id = json_str(obj, "paper_id", &loc, errors);
            let publication_date = json_str(obj, "publication_date", &loc, errors);
            let authors = match &obj["authors"] {
                Value::Array(items) => items
                    .iter()
                    .map(|a| match a {
                        Value::String(s) => s.trim().to_owned(),
                        _ => String::new(),
                    })
                    .collect(),
                other => {
                    errors.push(ParseError::new(loc.clone(), format!("authors must be an array, found {other}")));
                    vec![String::new()]
                }
            };
            let reviews_received = match &obj["reviews_received"] {
                Value::Number(n) => n.to_string(),
                other => {
                    errors.push(ParseError::new(
                        loc.clone(),
                        format!("reviews_received must be a number, found {other}"),
                    ));
                    String::new()
                }
            };
            let id = Some(paper_id.clone()).filter(|s| !s.is_empty());
            if errors.len() > before {
                return (None, id);
            }
            let raw = RawPaper {
                paper_id,
                publication_date,
                authors,
                reviews_received,
            };
            (build_paper(raw, loc, errors), id)
        }),
    }
}

fn parse_reviews_located(source: impl Read, format: Format) -> Parsed<ReviewEvent> {
    let text = match read_text(source) {
        Ok(t) => t,
        Err(e) => return Parsed::failed(e),
    };
    match format {
        Format::Csv => read_csv(&text, &REVIEW_COLUMNS, |rec, loc, errors| {
            let raw = RawReview {
                event_id: rec[0].to_owned(),
                reviewer_id: rec[1].to_owned(),
                event_date: rec[2].to_owned(),
                kind: rec[3].to_owned(),
                excluded: rec[4].to_owned(),
                paper_id: Some(rec[5].to_owned()),
                exclusion_reason: None,
            };
            (build_review(raw, loc, errors), None)
        }),
        Format::Json => {
            let required = &REVIEW_COLUMNS[..5];
            read_json(&text, required, &["paper_id", "exclusion_reason"], |obj, loc, errors| {
                let before = errors.len();
                let event_id = json_str(obj, "event_id", &loc, errors);
                let reviewer_id = json_str(obj, "reviewer_id", &loc, errors);
                let event_date = json_str(obj, "event_date", &loc, errors);
                let kind = json_str(obj, "kind", &loc, errors);
                let excluded = match &obj["excluded"] {
                    Value::Bool(b) => b.to_string(),
                    other => other.to_string(),
                };
                let paper_id = match obj.get("paper_id") {
                    None | Some(Value::Null) => None,
                    Some(Value::String(s)) => Some(s.trim().to_owned()),
                    Some(other) => {
                        errors.push(ParseError::new(loc.clone(), format!("paper_id must be a string, found {other}")));
                        None
                    }
                };
                let exclusion_reason = match obj.get("exclusion_reason") {
                    None | Some(Value::Null) => None,
                    Some(Value::String(s)) => Some(s.clone()),
                    Some(other) => {
                        errors.push(ParseError::new(
                            loc.clone(),
                            format!("exclusion_reason must be a string, found {other}"),
                        ));
                        None
                    }
                };
                if errors.len() > before {
                    return (None, None);
                }
                let raw = RawReview {
                    event_id,
                    reviewer_id,
                    event_date,
                    kind,
                    excluded,
                    paper_id,
                    exclusion_reason,
                };
                (build_review(raw, loc, errors), None)
            })
        }
    }
}

/// Parse both ledgers, validate them together, and cross-check declared
/// review counts. Errors from every stage are aggregated.
pub fn load_dataset<P: Read, R: Read>(papers: Source<P>, reviews: Source<R>, format: Format) -> IngestReport {
    let parsed_papers = parse_papers_located(papers.reader, format);
    let parsed_reviews = parse_reviews_located(reviews.reader, format);

    let issue = |file: &str, location: Location, message: String| Issue {
        file: file.to_owned(),
        location,
        message,
    };
    let mut errors: Vec<Issue> = parsed_papers
        .errors
        .iter()
        .map(|e| issue(&papers.name, e.location.clone(), e.message.clone()))
        .chain(
            parsed_reviews
                .errors
                .iter()
                .map(|e| issue(&reviews.name, e.location.clone(), e.message.clone())),
        )
        .collect();

    let paper_locations: Vec<Location> = parsed_papers.records.iter().map(|(l, _)| l.clone()).collect();
    let event_locations: Vec<Location> = parsed_reviews.records.iter().map(|(l, _)| l.clone()).collect();
    let paper_line: HashMap<PaperId, Location> = parsed_papers
        .records
        .iter()
        .rev()
        .map(|(l, p)| (p.paper_id.clone(), l.clone()))
        .collect();
    let event_line: HashMap<EventId, Location> = parsed_reviews
        .records
        .iter()
        .rev()
        .map(|(l, e)| (e.event_id.clone(), l.clone()))
        .collect();

    let validated = validate_with_known_papers(
        parsed_papers.records.into_iter().map(|(_, p)| p).collect(),
        parsed_reviews.records.into_iter().map(|(_, e)| e).collect(),
        &parsed_papers.unparsed_ids,
    );

    let dataset = match validated {
        Err(violations) => {
            errors.extend(violations.0.into_iter().map(|v| {
                let (file, location) = match v.source() {
                    RecordSource::Papers => (&papers.name, paper_locations[v.index()].clone()),
                    RecordSource::Events => (&reviews.name, event_locations[v.index()].clone()),
                };
                issue(file, location, v.to_string())
            }));
            None
        }
        Ok(dataset) => Some(dataset),
    };

    let mut warnings = Vec::new();
    if let Some(ds) = &dataset {
        for d in cross_check_review_counts(ds) {
            warnings.push(issue(
                &papers.name,
                paper_line.get(&d.paper_id).cloned().unwrap_or(Location::File),
                format!(
                    "paper `{}` declares {} reviews but {} linked review events exist",
                    d.paper_id, d.declared, d.observed
                ),
            ));
        }
        for w in ds.warnings() {
            let (file, location) = match &w {
                crate::model::DatasetWarning::SelfReview { event_id, .. } => (
                    &reviews.name,
                    event_line.get(event_id).cloned().unwrap_or(Location::File),
                ),
                crate::model::DatasetWarning::ReviewerAlsoEditor { paper_id, .. } => (
                    &papers.name,
                    paper_line.get(paper_id).cloned().unwrap_or(Location::File),
                ),
            };
            warnings.push(issue(file, location, w.to_string()));
        }
    }

    IngestReport {
        dataset: if errors.is_empty() { dataset } else { None },
        errors,
        warnings,
    }
}

/// [`load_dataset`] over two files. Unreadable files become errors naming the path.
pub fn load_dataset_files(papers: &Path, reviews: &Path, format: Format) -> IngestReport {
    let open = |path: &Path| {
        std::fs::File::open(path).map_err(|e| Issue {
            file: path.display().to_string(),
            location: Location::File,
            message: format!("cannot read file: {e}"),
        })
    };
    match (open(papers), open(reviews)) {
        (Ok(p), Ok(r)) => load_dataset(
            Source::new(papers.display().to_string(), p),
            Source::new(reviews.display().to_string(), r),
            format,
        ),
        (p, r) => IngestReport {
            dataset: None,
            errors: [p.err(), r.err()].into_iter().flatten().collect(),
            warnings: Vec::new(),
        },
    }
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("id `{0}` has surrounding whitespace and would not survive re-ingestion")]
    UntrimmedId(String),
    #[error("author id `{0}` contains the author separator `;`")]
    SeparatorInAuthor(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn check_id(id: &str) -> Result<(), WriteError> {
    if id.trim() != id {
        return Err(WriteError::UntrimmedId(id.to_owned()));
    }
    Ok(())
}

fn check_paper(paper: &PaperRecord) -> Result<(), WriteError> {
    check_id(paper.paper_id.as_str())?;
    for author in &paper.authors {
        check_id(author.as_str())?;
        if author.as_str().contains(AUTHOR_SEPARATOR) {
            return Err(WriteError::SeparatorInAuthor(author.to_string()));
        }
    }
    Ok(())
}

fn check_event(event: &ReviewEvent) -> Result<(), WriteError> {
    check_id(event.event_id.as_str())?;
    check_id(event.reviewer.as_str())?;
    event.paper_id.as_ref().map_or(Ok(()), |p| check_id(p.as_str()))
}

fn csv_to_string(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), WriteError>) -> Result<String, WriteError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    rows(&mut writer)?;
    let bytes = writer.into_inner().map_err(|e| WriteError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output of UTF-8 fields is UTF-8"))
}

/// Papers in CSV form, header first, sorted by paper id, LF line endings.
pub fn write_papers_csv(dataset: &Dataset) -> Result<String, WriteError> {
    csv_to_string(|w| {
        w.write_record(PAPER_COLUMNS)?;
        for p in dataset.papers() {
            check_paper(p)?;
            let authors: Vec<&str> = p.authors.iter().map(|a| a.as_str()).collect();
            w.write_record([
                p.paper_id.as_str(),
                &p.publication_date.to_string(),
                &authors.join(";"),
                &p.reviews_received.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Review events in CSV form, header first, sorted by event id. Exclusion
/// reasons have no column and are dropped.
pub fn write_reviews_csv(dataset: &Dataset) -> Result<String, WriteError> {
    csv_to_string(|w| {
        w.write_record(REVIEW_COLUMNS)?;
        for e in dataset.events() {
            check_event(e)?;
            w.write_record([
                e.event_id.as_str(),
                e.reviewer.as_str(),
                &e.event_date.to_string(),
                e.kind.as_str(),
                if e.excluded { "true" } else { "false" },
                e.paper_id.as_ref().map_or("", |p| p.as_str()),
            ])?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct PaperJson<'a> {
    paper_id: &'a str,
    publication_date: String,
    authors: Vec<&'a str>,
    reviews_received: u32,
}

#[derive(Serialize)]
struct ReviewJson<'a> {
    event_id: &'a str,
    reviewer_id: &'a str,
    event_date: String,
    kind: &'static str,
    excluded: bool,
    paper_id: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exclusion_reason: Option<&'a str>,
}

pub fn write_papers_json(dataset: &Dataset) -> Result<String, WriteError> {
    let rows = dataset
        .papers()
        .map(|p| {
            check_paper(p)?;
            Ok(PaperJson {
                paper_id: p.paper_id.as_str(),
                publication_date: p.publication_date.to_string(),
                authors: p.authors.iter().map(|a| a.as_str()).collect(),
                reviews_received: p.reviews_received,
            })
        })
        .collect::<Result<Vec<_>, WriteError>>()?;
    Ok(serde_json::to_string_pretty(&rows).expect("plain structs serialize") + "\n")
}

pub fn write_reviews_json(dataset: &Dataset) -> Result<String, WriteError> {
    let rows = dataset
        .events()
        .map(|e| {
            check_event(e)?;
            Ok(ReviewJson {
                event_id: e.event_id.as_str(),
                reviewer_id: e.reviewer.as_str(),
                event_date: e.event_date.to_string(),
                kind: e.kind.as_str(),
                excluded: e.excluded,
                paper_id: e.paper_id.as_ref().map(|p| p.as_str()),
                exclusion_reason: e.exclusion_reason.as_deref(),
            })
        })
        .collect::<Result<Vec<_>, WriteError>>()?;
    Ok(serde_json::to_string_pretty(&rows).expect("plain structs serialize") + "\n")
}
