//! Text formats for shapes and fillings.
//!
//! Grid text: one line per row, top row first. `.` is outside the shape,
//! `0`/`1` are cells of a filling, `#` marks cells in a shape-only document.
//! A line starting with `#` that also contains any other character (a space,
//! a letter) is a comment. Blank lines separate documents in a collection.
//!
//! Structured documents are JSON:
//! `{"shape": {"rows": [{"start": 1, "end": 3}]}, "filling": {"rows": ["010"]}, "metadata": {"name": "…"}}`.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filling::{Filling, FillingError};
use crate::polyomino::{Polyomino, PolyominoError, RowInterval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {reason}")]
    Parse { line: usize, column: usize, reason: String },
    #[error("line {line}: cells do not form one contiguous run")]
    RowNotContiguous { line: usize },
    #[error("invalid JSON document: {0}")]
    Json(String),
    #[error("row {row}: bit string has length {found}, expected {expected}")]
    BitStringLength { row: usize, expected: usize, found: usize },
    #[error(transparent)]
    Shape(#[from] PolyominoError),
    #[error(transparent)]
    Filling(#[from] FillingError),
}

/// A parsed shape with an optional filling and the comment lines that
/// preceded or accompanied it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub shape: Arc<Polyomino>,
    pub filling: Option<Filling>,
    pub comments: Vec<String>,
}

impl Document {
    pub fn from_filling(filling: Filling) -> Self {
        Document {
            shape: filling.shape_arc().clone(),
            filling: Some(filling),
            comments: Vec::new(),
        }
    }

    pub fn from_shape(shape: impl Into<Arc<Polyomino>>) -> Self {
        Document {
            shape: shape.into(),
            filling: None,
            comments: Vec::new(),
        }
    }
}

fn is_grid_char(c: char) -> bool {
    matches!(c, '.' | '#' | '0' | '1')
}

fn is_comment(line: &str) -> bool {
    line.starts_with('#') && !line.chars().all(is_grid_char)
}

struct Row {
    line: usize,
    start: usize,
    text: Vec<char>,
}

fn parse_row(line: usize, text: &str) -> Result<Row, IoError> {
    let chars: Vec<char> = text.chars().collect();
    if let Some((i, c)) = chars.iter().enumerate().find(|(_, c)| !is_grid_char(**c)) {
        return Err(IoError::Parse {
            line,
            column: i + 1,
            reason: format!("unexpected character {c:?}"),
        });
    }
    let first = chars.iter().position(|&c| c != '.').ok_or(IoError::Parse {
        line,
        column: 1,
        reason: "row has no cells".into(),
    })?;
    let last = chars.iter().rposition(|&c| c != '.').expect("a cell exists");
    if chars[first..=last].contains(&'.') {
        return Err(IoError::RowNotContiguous { line });
    }
    Ok(Row {
        line,
        start: first + 1,
        text: chars[first..=last].to_vec(),
    })
}

fn build(rows: Vec<Row>, comments: Vec<String>) -> Result<Document, IoError> {
    let has_bits = rows.iter().any(|r| r.text.iter().any(|&c| c == '0' || c == '1'));
    let mut intervals = Vec::with_capacity(rows.len());
    let mut ones = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        intervals.push(RowInterval::new(r.start, r.start + r.text.len() - 1, i + 1)?);
        for (j, &c) in r.text.iter().enumerate() {
            match (c, has_bits) {
                ('#', true) | ('0' | '1', false) => {
                    return Err(IoError::Parse {
                        line: r.line,
                        column: r.start + j,
                        reason: "mixes shape-only '#' cells with 0/1 cells".into(),
                    })
                }
                ('1', true) => ones.push((i + 1, r.start + j)),
                _ => {}
            }
        }
    }
    let shape = Arc::new(Polyomino::from_rows(intervals)?);
    let filling = if has_bits {
        Some(Filling::from_cells(shape.clone(), ones)?)
    } else {
        None
    };
    Ok(Document {
        shape,
        filling,
        comments,
    })
}

/// Parses grid text holding several documents separated by blank lines.
pub fn parse_collection(text: &str) -> Result<Vec<Document>, IoError> {
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    let mut comments = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() {
            if !rows.is_empty() {
                docs.push(build(std::mem::take(&mut rows), std::mem::take(&mut comments))?);
            }
        } else if is_comment(line) {
            comments.push(line.trim_start_matches('#').trim().to_string());
        } else {
            rows.push(parse_row(n + 1, line)?);
        }
    }
    if !rows.is_empty() {
        docs.push(build(rows, comments)?);
    }
    Ok(docs)
}

/// Parses a single grid-text document.
pub fn parse_grid(text: &str) -> Result<Document, IoError> {
    let mut docs = parse_collection(text)?;
    match docs.len() {
        1 => Ok(docs.pop().unwrap()),
        0 => Err(IoError::Parse {
            line: 1,
            column: 1,
            reason: "no rows".into(),
        }),
        n => Err(IoError::Parse {
            line: 1,
            column: 1,
            reason: format!("expected one document, found {n}"),
        }),
    }
}

/// Parses either format: JSON when the text starts with `{`, grid text otherwise.
pub fn parse_document(text: &str) -> Result<Document, IoError> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        parse_grid(text)
    }
}

/// Grid text for a shape, every line padded to the shape's width.
pub fn emit_shape(shape: &Polyomino) -> String {
    shape.to_string() + "\n"
}

/// Grid text for a filling.
pub fn emit_filling(filling: &Filling) -> String {
    filling.to_string() + "\n"
}

pub fn emit(doc: &Document) -> String {
    let mut out = String::new();
    for c in &doc.comments {
        let _ = writeln!(out, "# {c}");
    }
    match &doc.filling {
        Some(f) => out + &emit_filling(f),
        None => out + &emit_shape(&doc.shape),
    }
}

pub fn emit_collection(docs: &[Document]) -> String {
    docs.iter().map(emit).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRecord {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub rows: Vec<RowRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingRecord {
    /// One bit string per row, covering exactly the row's interval.
    pub rows: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredDocument {
    pub shape: ShapeRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filling: Option<FillingRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl StructuredDocument {
    pub fn from_parts(shape: &Polyomino, filling: Option<&Filling>, metadata: Option<Metadata>) -> Self {
        let rows = shape
            .rows()
            .iter()
            .map(|r| RowRecord {
                start: r.start(),
                end: r.end(),
            })
            .collect();
        let filling = filling.map(|f| FillingRecord {
            rows: shape
                .rows()
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mask = f.row_mask(i + 1);
                    r.columns()
                        .map(|c| if mask >> (c - 1) & 1 == 1 { '1' } else { '0' })
                        .collect()
                })
                .collect(),
        });
        StructuredDocument {
            shape: ShapeRecord { rows },
            filling,
            metadata,
        }
    }

    pub fn into_document(self) -> Result<Document, IoError> {
        let intervals: Vec<(usize, usize)> = self.shape.rows.iter().map(|r| (r.start, r.end)).collect();
        let shape = Arc::new(Polyomino::new(&intervals)?);
        let filling = match self.filling {
            None => None,
            Some(rec) => {
                if rec.rows.len() != shape.row_count() {
                    return Err(FillingError::RowCountMismatch {
                        expected: shape.row_count(),
                        found: rec.rows.len(),
                    }
                    .into());
                }
                let mut ones = Vec::new();
                for (i, (bits, r)) in rec.rows.iter().zip(shape.rows()).enumerate() {
                    if bits.chars().count() != r.len() {
                        return Err(IoError::BitStringLength {
                            row: i + 1,
                            expected: r.len(),
                            found: bits.chars().count(),
                        });
                    }
                    for (j, ch) in bits.chars().enumerate() {
                        match ch {
                            '1' => ones.push((i + 1, r.start() + j)),
                            '0' => {}
                            other => {
                                return Err(IoError::Json(format!("row {}: bit string contains {other:?}", i + 1)))
                            }
                        }
                    }
                }
                Some(Filling::from_cells(shape.clone(), ones)?)
            }
        };
        let comments = self
            .metadata
            .into_iter()
            .flat_map(|m| m.name.into_iter().chain(m.source))
            .collect();
        Ok(Document {
            shape,
            filling,
            comments,
        })
    }
}

pub fn to_json(shape: &Polyomino, filling: Option<&Filling>, metadata: Option<Metadata>) -> String {
    let doc = StructuredDocument::from_parts(shape, filling, metadata);
    serde_json::to_string_pretty(&doc).expect("plain records serialize")
}

pub fn from_json(text: &str) -> Result<Document, IoError> {
    let doc: StructuredDocument = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    doc.into_document()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyomino::Cell;

    const FIG3: &str = "\
# ten ones
..101..
.10011.
1001001
...10..
.1000..
....0..
";

    #[test]
    fn shape_only() {
        let doc = parse_grid("..###\n.####").unwrap();
        assert_eq!(doc.shape.intervals(), vec![(3, 5), (2, 5)]);
        assert!(doc.filling.is_none());
        assert_eq!(emit(&doc), "..###\n.####\n");
    }

    #[test]
    fn row_not_contiguous() {
        assert_eq!(parse_grid("1.1"), Err(IoError::RowNotContiguous { line: 1 }));
    }

    #[test]
    fn bad_characters_and_mixing() {
        assert_eq!(
            parse_grid("..0x"),
            Err(IoError::Parse {
                line: 1,
                column: 4,
                reason: "unexpected character 'x'".into()
            })
        );
        assert!(matches!(parse_grid("##\n01"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(
            parse_grid("...\n01"),
            Err(IoError::Parse { line: 1, column: 1, .. })
        ));
        assert!(parse_grid("# only a comment").is_err());
        assert!(parse_grid("01\n\n10").is_err());
    }

    #[test]
    fn hash_rows_are_not_comments() {
        let doc = parse_grid("# comment line\n###\n.#").unwrap();
        assert_eq!(doc.shape.intervals(), vec![(1, 3), (2, 2)]);
        assert_eq!(doc.comments, vec!["comment line".to_string()]);
    }

    #[test]
    fn filling_round_trip() {
        let doc = parse_grid(FIG3).unwrap();
        let f = doc.filling.as_ref().unwrap();
        assert_eq!(f.count_ones(), 10);
        assert!(f.get(Cell::new(5, 2)));
        assert_eq!(
            doc.shape.intervals(),
            vec![(3, 5), (2, 6), (1, 7), (4, 5), (2, 5), (5, 5)]
        );
        assert_eq!(emit(&doc), FIG3);
        // Padding is normalized.
        let ragged = parse_grid("..101\n.10011\n.1...").unwrap();
        assert_eq!(emit(&ragged), "..101.\n.10011\n.1....\n");
    }

    #[test]
    fn collections() {
        let docs = parse_collection("# a\n01\n11\n\n\n# b\n1\n").unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[1].comments, vec!["b".to_string()]);
        assert_eq!(parse_collection(&emit_collection(&docs)).unwrap(), docs);
    }

    #[test]
    fn json_round_trip() {
        let doc = parse_grid(FIG3).unwrap();
        let meta = Metadata {
            name: Some("fig3".into()),
            source: None,
        };
        let text = to_json(&doc.shape, doc.filling.as_ref(), Some(meta));
        assert!(text.contains("\"start\": 3"));
        let back = parse_document(&text).unwrap();
        assert_eq!(back.filling, doc.filling);
        assert_eq!(back.comments, vec!["fig3".to_string()]);
        let shape_only = to_json(&doc.shape, None, None);
        assert_eq!(parse_document(&shape_only).unwrap().shape, doc.shape);
    }

    #[test]
    fn json_errors() {
        let short = r#"{"shape":{"rows":[{"start":1,"end":3}]},"filling":{"rows":["01"]}}"#;
        assert_eq!(
            from_json(short),
            Err(IoError::BitStringLength {
                row: 1,
                expected: 3,
                found: 2
            })
        );
        assert!(matches!(from_json("{"), Err(IoError::Json(_))));
        let bad = r#"{"shape":{"rows":[{"start":0,"end":3}]}}"#;
        assert!(matches!(from_json(bad), Err(IoError::Shape(_))));
    }
}
