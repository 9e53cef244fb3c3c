//! RFC 4180 reading and writing for labeled tweet files.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::{Document, LabelSchema, LabeledDataset};
use crate::error::{Error, Result};

/// Encoding a file was decoded with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TextEncoding {
    Utf8,
    Latin1,
}

impl fmt::Display for TextEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TextEncoding::Utf8 => "utf-8",
            TextEncoding::Latin1 => "latin-1",
        })
    }
}

/// Strict UTF-8 for the whole file, else byte-wise Latin-1 for the whole file.
pub fn decode_bytes(bytes: &[u8]) -> (String, TextEncoding) {
    let body = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    match std::str::from_utf8(body) {
        Ok(s) => (s.to_owned(), TextEncoding::Utf8),
        Err(_) => (bytes.iter().map(|&b| b as char).collect(), TextEncoding::Latin1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RejectReason {
    UndecodableLabel { raw: String },
    EmptyText,
    FieldCount { expected: usize, found: usize },
    DuplicateId { id: String },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::UndecodableLabel { raw } => write!(f, "undecodable label `{raw}`"),
            RejectReason::EmptyText => f.write_str("empty text"),
            RejectReason::FieldCount { expected, found } => {
                write!(f, "expected {expected} fields, found {found}")
            }
            RejectReason::DuplicateId { id } => write!(f, "duplicate id `{id}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    /// Line on which the record starts.
    pub line: usize,
    pub reason: RejectReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub source: String,
    pub encoding: TextEncoding,
    pub records: usize,
    pub accepted: usize,
    pub rejected: Vec<RejectedRow>,
}

impl LoadReport {
    pub fn duplicate_ids(&self) -> Vec<&str> {
        self.rejected
            .iter()
            .filter_map(|r| match &r.reason {
                RejectReason::DuplicateId { id } => Some(id.as_str()),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source:   {}", self.source)?;
        writeln!(f, "encoding: {}", self.encoding)?;
        writeln!(f, "records:  {}", self.records)?;
        writeln!(f, "accepted: {}", self.accepted)?;
        writeln!(f, "rejected: {}", self.rejected.len())?;
        for r in &self.rejected {
            writeln!(f, "  line {}: {}", r.line, r.reason)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadOutcome {
    pub dataset: LabeledDataset,
    pub report: LoadReport,
}

#[derive(Debug)]
struct Record {
    line: usize,
    fields: Vec<String>,
}

fn parse_records(text: &str, source: &str) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    let mut fields: Vec<String> = Vec::new();
    let mut field = String::new();
    let mut in_quotes = false;
    let mut touched = false;
    let mut line = 1;
    let mut record_line = 1;
    let mut quote_line = 0;
    let mut chars = text.chars().peekable();

    let mut finish = |fields: &mut Vec<String>, field: &mut String, touched: bool, at: usize| {
        if touched || !fields.is_empty() || !field.is_empty() {
            fields.push(std::mem::take(field));
            records.push(Record {
                line: at,
                fields: std::mem::take(fields),
            });
        }
    };

    while let Some(c) = chars.next() {
        if in_quotes {
            match c {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    field.push('"');
                }
                '"' => in_quotes = false,
                '\n' => {
                    line += 1;
                    field.push(c);
                }
                _ => field.push(c),
            }
            continue;
        }
        match c {
            ',' => {
                touched = true;
                fields.push(std::mem::take(&mut field));
            }
            '\r' | '\n' => {
                if c == '\r' && chars.peek() == Some(&'\n') {
                    chars.next();
                }
                finish(&mut fields, &mut field, touched, record_line);
                touched = false;
                line += 1;
                record_line = line;
            }
            '"' if field.is_empty() => {
                touched = true;
                in_quotes = true;
                quote_line = line;
            }
            _ => {
                touched = true;
                field.push(c);
            }
        }
    }
    if in_quotes {
        return Err(Error::UnbalancedQuote {
            source_name: source.to_owned(),
            line: quote_line,
        });
    }
    finish(&mut fields, &mut field, touched, record_line);
    Ok(records)
}

struct Header {
    width: usize,
    id: Option<usize>,
    text: usize,
    label: Option<usize>,
    location: Option<usize>,
    keyword: Option<usize>,
    date: Option<usize>,
}

fn resolve_header(header: &Record, schema: &LabelSchema, source: &str, need_label: bool) -> Result<Header> {
    let names: Vec<&str> = header.fields.iter().map(|h| h.trim()).collect();
    let find = |name: &str| names.iter().position(|h| *h == name);
    let require = |name: &str| {
        find(name).ok_or_else(|| Error::MissingColumn {
            source_name: source.to_owned(),
            column: name.to_owned(),
        })
    };
    let cols = schema.columns();
    Ok(Header {
        width: names.len(),
        id: cols.id.as_deref().map(require).transpose()?,
        text: require(&cols.text)?,
        label: if need_label { Some(require(&cols.label)?) } else { None },
        location: cols.location.as_deref().and_then(find),
        keyword: cols.keyword.as_deref().and_then(find),
        date: cols.date.as_deref().and_then(find),
    })
}

fn optional(fields: &[String], idx: Option<usize>) -> Option<String> {
    idx.map(|i| fields[i].clone()).filter(|v| !v.is_empty())
}

/// Parses decoded CSV text into a dataset plus a load report.
pub fn load_csv_str(text: &str, encoding: TextEncoding, source: &str, schema: &LabelSchema) -> Result<LoadOutcome> {
    let mut records = parse_records(text, source)?.into_iter();
    let header = records.next().ok_or_else(|| Error::NoValidRows {
        source_name: source.to_owned(),
    })?;
    let h = resolve_header(&header, schema, source, true)?;
    let label_col = h.label.expect("label column required");

    let mut documents = Vec::new();
    let mut rejected = Vec::new();
    let mut seen = HashSet::new();
    let mut count = 0;
    for (ordinal, rec) in records.enumerate() {
        count += 1;
        let reject = |reason| RejectedRow { line: rec.line, reason };
        if rec.fields.len() != h.width {
            rejected.push(reject(RejectReason::FieldCount {
                expected: h.width,
                found: rec.fields.len(),
            }));
            continue;
        }
        let f = &rec.fields;
        let Some(label) = schema.decode(&f[label_col]) else {
            rejected.push(reject(RejectReason::UndecodableLabel {
                raw: f[label_col].clone(),
            }));
            continue;
        };
        if f[h.text].trim().is_empty() {
            rejected.push(reject(RejectReason::EmptyText));
            continue;
        }
        let id = match h.id {
            Some(i) => f[i].trim().to_owned(),
            None => (ordinal + 1).to_string(),
        };
        if !seen.insert(id.clone()) {
            rejected.push(reject(RejectReason::DuplicateId { id }));
            continue;
        }
        documents.push(Document {
            id,
            text: f[h.text].clone(),
            label: label.to_owned(),
            location: optional(f, h.location),
            keyword: optional(f, h.keyword),
            date: optional(f, h.date),
        });
    }
    if documents.is_empty() {
        return Err(Error::NoValidRows {
            source_name: source.to_owned(),
        });
    }
    let report = LoadReport {
        source: source.to_owned(),
        encoding,
        records: count,
        accepted: documents.len(),
        rejected,
    };
    Ok(LoadOutcome {
        dataset: LabeledDataset::new(schema.clone(), documents)?,
        report,
    })
}

pub fn load_csv_bytes(bytes: &[u8], source: &str, schema: &LabelSchema) -> Result<LoadOutcome> {
    let (text, encoding) = decode_bytes(bytes);
    load_csv_str(&text, encoding, source, schema)
}

pub fn load_csv(path: impl AsRef<Path>, schema: &LabelSchema) -> Result<LoadOutcome> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_csv_bytes(&bytes, &path.display().to_string(), schema)
}

/// A row from a file without labels (e.g. a competition test split).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnlabeledRow {
    pub id: String,
    pub text: String,
}

pub fn load_unlabeled_csv(path: impl AsRef<Path>, schema: &LabelSchema) -> Result<Vec<UnlabeledRow>> {
    let path = path.as_ref();
    let source = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let (text, _) = decode_bytes(&bytes);
    let mut records = parse_records(&text, &source)?.into_iter();
    let header = records.next().ok_or_else(|| Error::NoValidRows {
        source_name: source.clone(),
    })?;
    let h = resolve_header(&header, schema, &source, false)?;
    let rows: Vec<UnlabeledRow> = records
        .enumerate()
        .filter(|(_, r)| r.fields.len() == h.width)
        .map(|(ordinal, r)| UnlabeledRow {
            id: match h.id {
                Some(i) => r.fields[i].trim().to_owned(),
                None => (ordinal + 1).to_string(),
            },
            text: r.fields[h.text].clone(),
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::NoValidRows { source_name: source });
    }
    Ok(rows)
}

pub(crate) fn quote_field(out: &mut String, value: &str) {
    if value.contains([',', '"', '\n', '\r']) {
        out.push('"');
        out.push_str(&value.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(value);
    }
}

/// Serializes a dataset with its schema's column names and raw label codes.
pub fn to_csv_string(dataset: &LabeledDataset) -> String {
    let schema = dataset.schema();
    let cols = schema.columns();
    let mut header: Vec<&str> = Vec::new();
    header.extend(cols.id.as_deref());
    header.push(&cols.text);
    header.push(&cols.label);
    header.extend(cols.location.as_deref());
    header.extend(cols.keyword.as_deref());
    header.extend(cols.date.as_deref());

    let mut out = String::new();
    out.push_str(
        &header
            .iter()
            .map(|h| {
                let mut s = String::new();
                quote_field(&mut s, h);
                s
            })
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for d in dataset.documents() {
        let mut cells: Vec<&str> = Vec::new();
        if cols.id.is_some() {
            cells.push(&d.id);
        }
        cells.push(&d.text);
        cells.push(schema.encode(&d.label).unwrap_or(&d.label));
        if cols.location.is_some() {
            cells.push(d.location.as_deref().unwrap_or(""));
        }
        if cols.keyword.is_some() {
            cells.push(d.keyword.as_deref().unwrap_or(""));
        }
        if cols.date.is_some() {
            cells.push(d.date.as_deref().unwrap_or(""));
        }
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            quote_field(&mut out, c);
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(dataset: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_csv_string(dataset)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use indexmap::IndexMap;

    use super::*;
    use crate::corpus::ColumnMap;

    fn disaster_schema() -> LabelSchema {
        let mut dec = IndexMap::new();
        dec.insert("0".into(), "not_disaster".into());
        dec.insert("1".into(), "disaster".into());
        let mut cols = ColumnMap::new(Some("id"), "text", "target");
        cols.keyword = Some("keyword".into());
        cols.location = Some("location".into());
        LabelSchema::new("disaster", vec!["not_disaster".into(), "disaster".into()], cols, dec).unwrap()
    }

    fn load(text: &str) -> Result<LoadOutcome> {
        load_csv_str(text, TextEncoding::Utf8, "test.csv", &disaster_schema())
    }

    #[test]
    fn disaster_row_decodes() {
        let out = load(
            "id,keyword,location,text,target\n\
             48,ablaze,,\"13,000 people receive #wildfires evacuation orders in California\",1\n",
        )
        .unwrap();
        let d = &out.dataset.documents()[0];
        assert_eq!(d.label, "disaster");
        assert_eq!(
            d.text,
            "13,000 people receive #wildfires evacuation orders in California"
        );
        assert_eq!(d.keyword.as_deref(), Some("ablaze"));
        assert_eq!(d.location, None);
    }

    #[test]
    fn quoted_newline_stays_in_one_field() {
        let out = load("id,text,target\r\n1,\"line one\nline \"\"two\"\"\",0\r\n2,plain,1\r\n").unwrap();
        assert_eq!(out.dataset.len(), 2);
        assert_eq!(out.dataset.documents()[0].text, "line one\nline \"two\"");
        assert!(out.report.rejected.is_empty());
    }

    #[test]
    fn missing_column_is_named() {
        let err = load("id,message,target\n1,hi,0\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn { ref column, .. } if column == "text"));
    }

    #[test]
    fn unbalanced_quote_at_eof() {
        let err = load("id,text,target\n1,ok,0\n2,\"never closed,1\n").unwrap_err();
        assert!(matches!(err, Error::UnbalancedQuote { line: 3, .. }));
    }

    #[test]
    fn bad_rows_are_reported_with_lines() {
        let out = load("id,text,target\n1,a,0\n2,b,7\n3,  ,1\n1,dup,1\n4,x\n5,fine,1\n").unwrap();
        assert_eq!(out.dataset.len(), 2);
        let lines: Vec<usize> = out.report.rejected.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![3, 4, 5, 6]);
        assert_eq!(out.report.duplicate_ids(), vec!["1"]);
        assert_eq!(out.report.records, 6);
        let text = out.report.to_string();
        assert!(text.contains("line 3: undecodable label `7`"));
    }

    #[test]
    fn zero_valid_rows_is_an_error() {
        assert!(matches!(
            load("id,text,target\n1,a,9\n"),
            Err(Error::NoValidRows { .. })
        ));
        assert!(matches!(load(""), Err(Error::NoValidRows { .. })));
    }

    #[test]
    fn latin1_fallback_is_per_file() {
        let bytes = b"id,text,target\n1,caf\xe9,0\n2,na\xefve,1\n";
        let out = load_csv_bytes(bytes, "l1.csv", &disaster_schema()).unwrap();
        assert_eq!(out.report.encoding, TextEncoding::Latin1);
        assert_eq!(out.dataset.documents()[0].text, "café");
        assert_eq!(out.dataset.documents()[1].text, "naïve");

        let utf = "\u{feff}id,text,target\n1,café,0\n".as_bytes();
        let out = load_csv_bytes(utf, "u.csv", &disaster_schema()).unwrap();
        assert_eq!(out.report.encoding, TextEncoding::Utf8);
        assert_eq!(out.dataset.documents()[0].text, "café");
    }

    #[test]
    fn round_trip_preserves_documents() {
        let src = "id,keyword,location,text,target\n\
                   1,fire,\"Paris, FR\",\"a, b\r\nc \"\"q\"\"\",1\n\
                   2,,,plain text,0\n";
        let first = load(src).unwrap().dataset;
        let again = load(&to_csv_string(&first)).unwrap().dataset;
        assert_eq!(first, again);
    }
}
