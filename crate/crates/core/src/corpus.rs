//! Annotated manifesto corpora and the canonical statement-per-line format.
//!
//! Every record describes one statement:
//!
//! ```text
//! statement_id, manifesto_id, party, country, language, year, month, position, text, code
//! ```
//!
//! JSONL carries one object per line; CSV carries the same columns under a
//! header row with RFC-4180 quoting.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scales::CategoryCode;

pub const FORMAT_VERSION: u32 = 1;

pub const COLUMNS: [&str; 10] = [
    "statement_id",
    "manifesto_id",
    "party",
    "country",
    "language",
    "year",
    "month",
    "position",
    "text",
    "code",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "canonical-jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(Error::invalid(format!("unknown corpus format {other:?}"))),
        }
    }
}

/// Election date at month resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: u16,
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: u16, month: u8) -> Result<Self> {
        if !(1900..=2100).contains(&year) {
            return Err(Error::data(format!("year {year} outside [1900, 2100]")));
        }
        if !(1..=12).contains(&month) {
            return Err(Error::data(format!("month {month} outside [1, 12]")));
        }
        Ok(YearMonth { year, month })
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub id: String,
    pub text: String,
    pub code: CategoryCode,
    pub manifesto_id: String,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifesto {
    pub id: String,
    pub party: String,
    pub country: String,
    pub language: String,
    pub date: YearMonth,
    pub statements: Vec<Statement>,
}

impl Manifesto {
    pub fn year(&self) -> u16 {
        self.date.year
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub format_version: u32,
}

/// An immutable, validated set of manifestos keyed by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    manifestos: BTreeMap<String, Manifesto>,
    provenance: Provenance,
}

impl Corpus {
    /// Builds a corpus from manifestos, checking every type invariant.
    pub fn from_manifestos(manifestos: Vec<Manifesto>, source: impl Into<String>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut ids = HashSet::new();
        for m in manifestos {
            if m.statements.is_empty() {
                return Err(Error::data(format!("manifesto {:?} has no statements", m.id)));
            }
            YearMonth::new(m.date.year, m.date.month)?;
            for (i, s) in m.statements.iter().enumerate() {
                if s.position != i {
                    return Err(Error::data(format!(
                        "manifesto {:?}: statement {:?} has position {}, expected {i}",
                        m.id, s.id, s.position
                    )));
                }
                if s.manifesto_id != m.id {
                    return Err(Error::data(format!(
                        "statement {:?} refers to manifesto {:?} but is stored under {:?}",
                        s.id, s.manifesto_id, m.id
                    )));
                }
                if s.text.trim().is_empty() {
                    return Err(Error::data(format!("statement {:?} has empty text", s.id)));
                }
                if !ids.insert(s.id.clone()) {
                    return Err(Error::data(format!("duplicate statement id {:?}", s.id)));
                }
            }
            if map.contains_key(&m.id) {
                return Err(Error::data(format!("duplicate manifesto id {:?}", m.id)));
            }
            map.insert(m.id.clone(), m);
        }
        Ok(Corpus {
            manifestos: map,
            provenance: Provenance {
                source: source.into(),
                format_version: FORMAT_VERSION,
            },
        })
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Manifestos in id order.
    pub fn manifestos(&self) -> impl ExactSizeIterator<Item = &Manifesto> {
        self.manifestos.values()
    }

    pub fn get(&self, id: &str) -> Option<&Manifesto> {
        self.manifestos.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.manifestos.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.manifestos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifestos.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.manifestos.keys().map(String::as_str)
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.manifestos.values().flat_map(|m| m.statements.iter())
    }

    pub fn statement_count(&self) -> usize {
        self.manifestos.values().map(|m| m.statements.len()).sum()
    }

    /// Distinct countries in alphabetical order.
    pub fn countries(&self) -> Vec<&str> {
        let mut c: Vec<&str> = self.manifestos.values().map(|m| m.country.as_str()).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// A corpus restricted to the given manifesto ids; unknown ids are ignored.
    pub fn subset<'a, I: IntoIterator<Item = &'a str>>(&self, ids: I) -> Corpus {
        let manifestos = ids
            .into_iter()
            .filter_map(|id| self.manifestos.get(id).map(|m| (id.to_owned(), m.clone())))
            .collect();
        Corpus {
            manifestos,
            provenance: self.provenance.clone(),
        }
    }
}

/// A row that lenient parsing skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Abort on the first bad row. When false, bad rows are skipped and
    /// positions renumbered densely.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: true }
    }
}

/// Normalizes a raw annotation value into a registry code.
pub fn validate_record(raw: &str) -> Result<CategoryCode> {
    CategoryCode::normalize(raw)
}

/// Parses a corpus in strict mode.
pub fn parse_corpus<R: Read>(source: R, format: CorpusFormat) -> Result<Corpus> {
    parse_corpus_with(source, format, "<stream>", ParseOptions::default()).map(|(c, _)| c)
}

/// Parses a corpus, returning the rows skipped in lenient mode.
pub fn parse_corpus_with<R: Read>(
    source: R,
    format: CorpusFormat,
    source_name: &str,
    opts: ParseOptions,
) -> Result<(Corpus, Vec<RowIssue>)> {
    let mut builder = Builder::new(opts);
    match format {
        CorpusFormat::Jsonl => read_jsonl(source, &mut builder)?,
        CorpusFormat::Csv => read_csv(source, &mut builder)?,
    }
    builder.finish(source_name)
}

struct Record {
    line: usize,
    statement_id: String,
    manifesto_id: String,
    party: String,
    country: String,
    language: String,
    date: YearMonth,
    position: usize,
    text: String,
    code: CategoryCode,
}

struct ManifestoAcc {
    first_line: usize,
    party: String,
    country: String,
    language: String,
    date: YearMonth,
    rows: Vec<(usize, Statement)>,
}

struct Builder {
    opts: ParseOptions,
    records: usize,
    seen_ids: HashSet<String>,
    manifestos: BTreeMap<String, ManifestoAcc>,
    issues: Vec<RowIssue>,
}

impl Builder {
    fn new(opts: ParseOptions) -> Self {
        Builder {
            opts,
            records: 0,
            seen_ids: HashSet::new(),
            manifestos: BTreeMap::new(),
            issues: Vec::new(),
        }
    }

    /// Handles a row-level failure: fatal in strict mode, logged otherwise.
    fn reject(&mut self, err: Error, line: usize) -> Result<()> {
        if self.opts.strict {
            Err(err)
        } else {
            self.issues.push(RowIssue {
                line,
                message: err.to_string(),
            });
            Ok(())
        }
    }

    fn push(&mut self, rec: Result<Record>, line: usize) -> Result<()> {
        self.records += 1;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => return self.reject(e, line),
        };
        if self.seen_ids.contains(&rec.statement_id) {
            let err = Error::DuplicateId {
                line: rec.line,
                id: rec.statement_id.clone(),
            };
            return self.reject(err, rec.line);
        }
        if let Some(acc) = self.manifestos.get(&rec.manifesto_id) {
            let mismatch = [
                ("party", acc.party != rec.party),
                ("country", acc.country != rec.country),
                ("language", acc.language != rec.language),
                ("year", acc.date.year != rec.date.year),
                ("month", acc.date.month != rec.date.month),
            ]
            .into_iter()
            .find(|(_, bad)| *bad);
            if let Some((field, _)) = mismatch {
                let err = Error::Parse {
                    line: rec.line,
                    field: field.to_owned(),
                    message: format!(
                        "disagrees with line {} of manifesto {:?}",
                        acc.first_line, rec.manifesto_id
                    ),
                };
                return self.reject(err, rec.line);
            }
        }
        self.seen_ids.insert(rec.statement_id.clone());
        let acc = self
            .manifestos
            .entry(rec.manifesto_id.clone())
            .or_insert_with(|| ManifestoAcc {
                first_line: rec.line,
                party: rec.party,
                country: rec.country,
                language: rec.language,
                date: rec.date,
                rows: Vec::new(),
            });
        acc.rows.push((
            rec.line,
            Statement {
                id: rec.statement_id,
                text: rec.text,
                code: rec.code,
                manifesto_id: rec.manifesto_id,
                position: rec.position,
            },
        ));
        Ok(())
    }

    fn finish(self, source: &str) -> Result<(Corpus, Vec<RowIssue>)> {
        if self.records == 0 {
            return Err(Error::NoRecords);
        }
        let mut issues = self.issues;
        let mut manifestos = Vec::with_capacity(self.manifestos.len());
        for (id, mut acc) in self.manifestos {
            acc.rows.sort_by_key(|(_, s)| s.position);
            for (i, (line, s)) in acc.rows.iter_mut().enumerate() {
                if s.position != i {
                    if self.opts.strict {
                        return Err(Error::Parse {
                            line: *line,
                            field: "position".to_owned(),
                            message: format!(
                                "manifesto {id:?}: positions must be dense from 0; expected {i}, found {}",
                                s.position
                            ),
                        });
                    }
                    issues.push(RowIssue {
                        line: *line,
                        message: format!("position {} renumbered to {i}", s.position),
                    });
                    s.position = i;
                }
            }
            manifestos.push(Manifesto {
                id,
                party: acc.party,
                country: acc.country,
                language: acc.language,
                date: acc.date,
                statements: acc.rows.into_iter().map(|(_, s)| s).collect(),
            });
        }
        if manifestos.is_empty() {
            return Err(Error::NoRecords);
        }
        let corpus = Corpus::from_manifestos(manifestos, source)?;
        Ok((corpus, issues))
    }
}

fn field_err(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field: field.to_owned(),
        message: message.into(),
    }
}

/// Field accessor shared by the JSONL and CSV readers.
trait RowSource {
    fn text_field(&self, line: usize, name: &str) -> Result<String>;
    fn int_field(&self, line: usize, name: &str) -> Result<i64>;
}

fn build_record(line: usize, row: &dyn RowSource) -> Result<Record> {
    let nonblank = |name: &str| -> Result<String> {
        let v = row.text_field(line, name)?;
        if v.trim().is_empty() {
            Err(field_err(line, name, "must not be blank"))
        } else {
            Ok(v)
        }
    };
    let statement_id = nonblank("statement_id")?;
    let manifesto_id = nonblank("manifesto_id").map_err(|_| {
        field_err(line, "manifesto_id", "blank manifesto id cannot be resolved")
    })?;
    let party = row.text_field(line, "party")?;
    let country = nonblank("country")?;
    let language = nonblank("language")?;
    let year = row.int_field(line, "year")?;
    let month = row.int_field(line, "month")?;
    let year = u16::try_from(year).map_err(|_| field_err(line, "year", format!("{year} out of range")))?;
    let month = u8::try_from(month).map_err(|_| field_err(line, "month", format!("{month} out of range")))?;
    let date = YearMonth::new(year, month).map_err(|e| {
        let field = if e.to_string().starts_with("year") { "year" } else { "month" };
        field_err(line, field, e.to_string())
    })?;
    let position = row.int_field(line, "position")?;
    let position = usize::try_from(position)
        .map_err(|_| field_err(line, "position", format!("{position} is negative")))?;
    let text = row.text_field(line, "text")?;
    if text.trim().is_empty() {
        return Err(field_err(line, "text", "statement text is empty"));
    }
    let raw_code = row.text_field(line, "code")?;
    let code = validate_record(&raw_code).map_err(|e| field_err(line, "code", e.to_string()))?;
    Ok(Record {
        line,
        statement_id,
        manifesto_id,
        party,
        country,
        language,
        date,
        position,
        text,
        code,
    })
}

struct JsonRow(serde_json::Map<String, Value>);

impl RowSource for JsonRow {
    fn text_field(&self, line: usize, name: &str) -> Result<String> {
        match self.0.get(name) {
            None => Err(field_err(line, name, "missing")),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(Value::Null) if name == "code" => Ok(String::new()),
            Some(Value::Number(n)) if name == "code" || name.ends_with("_id") => Ok(n.to_string()),
            Some(other) => Err(field_err(line, name, format!("expected a string, found {other}"))),
        }
    }

    fn int_field(&self, line: usize, name: &str) -> Result<i64> {
        match self.0.get(name) {
            None => Err(field_err(line, name, "missing")),
            Some(Value::Number(n)) => n
                .as_i64()
                .ok_or_else(|| field_err(line, name, format!("expected an integer, found {n}"))),
            Some(Value::String(s)) => s
                .trim()
                .parse()
                .map_err(|_| field_err(line, name, format!("expected an integer, found {s:?}"))),
            Some(other) => Err(field_err(line, name, format!("expected an integer, found {other}"))),
        }
    }
}

fn read_jsonl<R: Read>(source: R, builder: &mut Builder) -> Result<()> {
    let reader = BufReader::new(source);
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| {
            if e.kind() == std::io::ErrorKind::InvalidData {
                field_err(lineno, "<line>", "not valid UTF-8")
            } else {
                Error::Io(e)
            }
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = match serde_json::from_str::<Value>(&line) {
            Ok(Value::Object(map)) => build_record(lineno, &JsonRow(map)),
            Ok(_) => Err(field_err(lineno, "<record>", "expected a JSON object")),
            Err(e) => Err(field_err(lineno, "<record>", format!("malformed JSON: {e}"))),
        };
        builder.push(rec, lineno)?;
    }
    Ok(())
}

struct CsvRow<'a> {
    record: &'a csv::StringRecord,
    columns: &'a HashMap<String, usize>,
}

impl RowSource for CsvRow<'_> {
    fn text_field(&self, line: usize, name: &str) -> Result<String> {
        self.columns
            .get(name)
            .and_then(|&i| self.record.get(i))
            .map(str::to_owned)
            .ok_or_else(|| field_err(line, name, "missing"))
    }

    fn int_field(&self, line: usize, name: &str) -> Result<i64> {
        let raw = self.text_field(line, name)?;
        raw.trim()
            .parse()
            .map_err(|_| field_err(line, name, format!("expected an integer, found {raw:?}")))
    }
}

fn read_csv<R: Read>(source: R, builder: &mut Builder) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) if matches!(e.kind(), csv::ErrorKind::Utf8 { .. }) => {
            return Err(field_err(1, "<header>", "not valid UTF-8"))
        }
        Err(e) => return Err(e.into()),
    };
    if headers.is_empty() {
        return Err(Error::NoRecords);
    }
    let columns: HashMap<String, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_owned(), i))
        .collect();
    if let Some(missing) = COLUMNS.iter().find(|c| !columns.contains_key(**c)) {
        return Err(field_err(1, missing, "column missing from header"));
    }
    let mut record = csv::StringRecord::new();
    loop {
        let lineno = reader.position().line() as usize;
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let lineno = record.position().map_or(lineno, |p| p.line() as usize);
                let rec = build_record(
                    lineno,
                    &CsvRow {
                        record: &record,
                        columns: &columns,
                    },
                );
                builder.push(rec, lineno)?;
            }
            Err(e) => {
                let line = e.position().map_or(lineno, |p| p.line() as usize);
                let err = match e.kind() {
                    csv::ErrorKind::Utf8 { .. } => field_err(line, "<record>", "not valid UTF-8"),
                    csv::ErrorKind::UnequalLengths { .. } => {
                        field_err(line, "<record>", "wrong number of columns")
                    }
                    _ => e.into(),
                };
                builder.records += 1;
                builder.reject(err, line)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct OutRecord<'a> {
    statement_id: &'a str,
    manifesto_id: &'a str,
    party: &'a str,
    country: &'a str,
    language: &'a str,
    year: u16,
    month: u8,
    position: usize,
    text: &'a str,
    code: &'a str,
}

fn out_records(corpus: &Corpus) -> impl Iterator<Item = OutRecord<'_>> {
    corpus.manifestos().flat_map(|m| {
        m.statements.iter().map(move |s| OutRecord {
            statement_id: &s.id,
            manifesto_id: &m.id,
            party: &m.party,
            country: &m.country,
            language: &m.language,
            year: m.date.year,
            month: m.date.month,
            position: s.position,
            text: &s.text,
            code: s.code.as_str(),
        })
    })
}

/// Writes the corpus in the canonical format, manifestos in id order and
/// statements in position order.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W, format: CorpusFormat) -> Result<()> {
    match format {
        CorpusFormat::Jsonl => {
            for rec in out_records(corpus) {
                serde_json::to_writer(&mut out, &rec)?;
                out.write_all(b"\n")?;
            }
        }
        CorpusFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for rec in out_records(corpus) {
                w.serialize(rec)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCount {
    pub manifestos: usize,
    pub statements: usize,
}

/// Manifesto and statement counts by country and by language.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub per_country: BTreeMap<String, GroupCount>,
    pub per_language: BTreeMap<String, GroupCount>,
    pub total: GroupCount,
}

impl CorpusStats {
    pub fn countries(&self) -> usize {
        self.per_country.len()
    }

    pub fn languages(&self) -> usize {
        self.per_language.len()
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for m in corpus.manifestos() {
        let n = m.statements.len();
        for group in [
            stats.per_country.entry(m.country.clone()).or_default(),
            stats.per_language.entry(m.language.clone()).or_default(),
        ] {
            group.manifestos += 1;
            group.statements += n;
        }
        stats.total.manifestos += 1;
        stats.total.statements += n;
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{"statement_id":"m1-0","manifesto_id":"m1","party":"P","country":"Freedonia","language":"en","year":2019,"month":5,"position":0,"text":"We will raise defence spending.","code":"104"}
{"statement_id":"m1-2","manifesto_id":"m1","party":"P","country":"Freedonia","language":"en","year":2019,"month":5,"position":2,"text":"Peace first.","code":"106"}
{"statement_id":"m1-1","manifesto_id":"m1","party":"P","country":"Freedonia","language":"en","year":2019,"month":5,"position":1,"text":"Heading","code":"H"}
"#;

    #[test]
    fn parses_and_orders_by_position() {
        let c = parse_corpus(TINY.as_bytes(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(c.len(), 1);
        let m = c.get("m1").unwrap();
        let ids: Vec<_> = m.statements.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["m1-0", "m1-1", "m1-2"]);
        assert_eq!(m.statements[1].code.as_str(), "0");
    }

    #[test]
    fn empty_stream_is_an_error() {
        assert!(matches!(parse_corpus(&b""[..], CorpusFormat::Jsonl), Err(Error::NoRecords)));
        assert!(matches!(parse_corpus(&b"\n\n"[..], CorpusFormat::Jsonl), Err(Error::NoRecords)));
        assert!(matches!(parse_corpus(&b""[..], CorpusFormat::Csv), Err(Error::NoRecords)));
    }

    #[test]
    fn malformed_row_names_line_and_field() {
        let bad = TINY.replacen("\"year\":2019", "\"year\":\"soon\"", 1);
        match parse_corpus(bad.as_bytes(), CorpusFormat::Jsonl) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(field, "year");
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = TINY.replacen("\"code\":\"106\"", "\"code\":\"999\"", 1);
        match parse_corpus(bad.as_bytes(), CorpusFormat::Jsonl) {
            Err(Error::Parse { line, field, message }) => {
                assert_eq!((line, field.as_str()), (2, "code"));
                assert!(message.contains("999"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_statement_id_is_an_error() {
        let dup = TINY.replacen("m1-2", "m1-0", 1);
        assert!(matches!(
            parse_corpus(dup.as_bytes(), CorpusFormat::Jsonl),
            Err(Error::DuplicateId { line: 2, .. })
        ));
    }

    #[test]
    fn blank_manifesto_id_is_unresolvable() {
        let bad = TINY.replacen("\"manifesto_id\":\"m1\"", "\"manifesto_id\":\"\"", 1);
        match parse_corpus(bad.as_bytes(), CorpusFormat::Jsonl) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "manifesto_id"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn whitespace_only_text_rejected() {
        let bad = TINY.replacen("Peace first.", "   ", 1);
        match parse_corpus(bad.as_bytes(), CorpusFormat::Jsonl) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "text"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gap_in_positions_is_an_error_in_strict_mode() {
        let gap = TINY.replacen("\"position\":2", "\"position\":3", 1);
        assert!(parse_corpus(gap.as_bytes(), CorpusFormat::Jsonl).is_err());
        let (c, issues) = parse_corpus_with(
            gap.as_bytes(),
            CorpusFormat::Jsonl,
            "gap",
            ParseOptions { strict: false },
        )
        .unwrap();
        assert_eq!(issues.len(), 1);
        assert_eq!(c.get("m1").unwrap().statements[2].position, 2);
    }

    #[test]
    fn lenient_mode_skips_bad_rows() {
        let bad = TINY.replacen("\"code\":\"106\"", "\"code\":\"999\"", 1);
        let (c, issues) =
            parse_corpus_with(bad.as_bytes(), CorpusFormat::Jsonl, "x", ParseOptions { strict: false })
                .unwrap();
        assert_eq!(c.statement_count(), 2);
        assert_eq!(issues[0].line, 2);
    }

    #[test]
    fn inconsistent_manifesto_metadata_rejected() {
        let bad = TINY.replacen("\"country\":\"Freedonia\"", "\"country\":\"Sylvania\"", 1);
        match parse_corpus(bad.as_bytes(), CorpusFormat::Jsonl) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "country"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_with_quoting() {
        let mut c = parse_corpus(TINY.as_bytes(), CorpusFormat::Jsonl).unwrap();
        let mut ms: Vec<Manifesto> = c.manifestos().cloned().collect();
        ms[0].statements[0].text = "Comma, \"quotes\"\nand newline".to_owned();
        c = Corpus::from_manifestos(ms, "x").unwrap();
        let mut buf = Vec::new();
        write_corpus(&c, &mut buf, CorpusFormat::Csv).unwrap();
        let back = parse_corpus(buf.as_slice(), CorpusFormat::Csv).unwrap();
        assert!(back.manifestos().eq(c.manifestos()));
    }

    #[test]
    fn csv_missing_column() {
        let csv = "statement_id,manifesto_id\nx,y\n";
        match parse_corpus(csv.as_bytes(), CorpusFormat::Csv) {
            Err(Error::Parse { line: 1, field, .. }) => assert_eq!(field, "party"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_utf8_rejected() {
        let mut bytes = TINY.as_bytes().to_vec();
        bytes.splice(30..30, [0xff, 0xfe]);
        assert!(parse_corpus(bytes.as_slice(), CorpusFormat::Jsonl).is_err());
    }

    #[test]
    fn stats_of_empty_corpus_are_zero() {
        let c = Corpus::from_manifestos(Vec::new(), "empty").unwrap();
        assert_eq!(corpus_stats(&c), CorpusStats::default());
    }

    #[test]
    fn stats_two_countries() {
        let mut ms = Vec::new();
        for country in ["A", "B"] {
            for k in 0..2 {
                let id = format!("{country}{k}");
                ms.push(Manifesto {
                    id: id.clone(),
                    party: "p".into(),
                    country: country.into(),
                    language: "xx".into(),
                    date: YearMonth::new(2010, 1).unwrap(),
                    statements: (0..5)
                        .map(|i| Statement {
                            id: format!("{id}-{i}"),
                            text: "t".into(),
                            code: validate_record("0").unwrap(),
                            manifesto_id: id.clone(),
                            position: i,
                        })
                        .collect(),
                });
            }
        }
        let stats = corpus_stats(&Corpus::from_manifestos(ms, "x").unwrap());
        assert_eq!(stats.per_country["A"], GroupCount { manifestos: 2, statements: 10 });
        assert_eq!(stats.per_country["B"], GroupCount { manifestos: 2, statements: 10 });
        assert_eq!(stats.per_language["xx"], GroupCount { manifestos: 4, statements: 20 });
        assert_eq!(stats.total, GroupCount { manifestos: 4, statements: 20 });
    }
}
