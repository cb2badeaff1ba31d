use std::io::BufRead;

use chrono::{DateTime, NaiveDateTime, Utc};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{ActivityEvent, ActivityKind, Parsed, SkipReport};
use crate::error::{Error, Result};

/// Which dump file a reader is consuming, fixed by the document's root element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpKind {
    Posts,
    Comments,
}

impl DumpKind {
    fn root(self) -> &'static [u8] {
        match self {
            DumpKind::Posts => b"posts",
            DumpKind::Comments => b"comments",
        }
    }
}

/// Streaming reader over `Posts.xml` / `Comments.xml` rows.
///
/// Holds one row's worth of buffer at a time, so memory use does not grow
/// with the document. Rows that cannot become events are tallied in
/// [`DumpReader::skips`]; malformed XML ends iteration with an error.
pub struct DumpReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    expected: Option<DumpKind>,
    kind: Option<DumpKind>,
    depth: usize,
    finished: bool,
    done: bool,
    skips: SkipReport,
}

impl<R: BufRead> DumpReader<R> {
    /// Reader that accepts either root element and interprets rows accordingly.
    pub fn new(input: R) -> Self {
        DumpReader {
            reader: Reader::from_reader(input),
            buf: Vec::with_capacity(4096),
            expected: None,
            kind: None,
            depth: 0,
            finished: false,
            done: false,
            skips: SkipReport::default(),
        }
    }

    /// Reader that requires a specific root element.
    pub fn expecting(input: R, kind: DumpKind) -> Self {
        DumpReader { expected: Some(kind), ..DumpReader::new(input) }
    }

    /// Dump kind, known once the root element has been read.
    pub fn kind(&self) -> Option<DumpKind> {
        self.kind
    }

    pub fn skips(&self) -> &SkipReport {
        &self.skips
    }

    pub fn into_skips(self) -> SkipReport {
        self.skips
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Xml { offset: self.reader.buffer_position(), message: message.into() }
    }

    fn open_root(&mut self, name: &[u8]) -> Result<()> {
        if self.kind.is_some() {
            return Err(self.error("more than one root element"));
        }
        let kind = match name {
            b"posts" => DumpKind::Posts,
            b"comments" => DumpKind::Comments,
            other => {
                return Err(self.error(format!(
                    "unexpected root element `{}`",
                    String::from_utf8_lossy(other)
                )))
            }
        };
        if let Some(expected) = self.expected {
            if expected != kind {
                return Err(self.error(format!(
                    "expected root `{}`",
                    String::from_utf8_lossy(expected.root())
                )));
            }
        }
        self.kind = Some(kind);
        Ok(())
    }

    fn next_event(&mut self) -> Result<Option<ActivityEvent>> {
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(event) => event,
                Err(e) => {
                    let offset = self.reader.error_position();
                    return Err(Error::Xml { offset, message: e.to_string() });
                }
            };
            match event {
                Event::Start(start) => {
                    let name = start.name().as_ref().to_vec();
                    self.depth += 1;
                    match self.depth {
                        1 => self.open_root(&name)?,
                        2 if name == b"row" => {
                            let row = classify_row(&start, self.kind.expect("root opened"));
                            if let Some(event) = self.tally(row) {
                                return Ok(Some(event));
                            }
                        }
                        _ => {}
                    }
                }
                Event::Empty(start) => {
                    let name = start.name().as_ref().to_vec();
                    match self.depth {
                        0 => {
                            self.open_root(&name)?;
                            self.finished = true;
                        }
                        1 if name == b"row" => {
                            let row = classify_row(&start, self.kind.expect("root opened"));
                            if let Some(event) = self.tally(row) {
                                return Ok(Some(event));
                            }
                        }
                        _ => {}
                    }
                }
                Event::End(_) => {
                    self.depth = self.depth.saturating_sub(1);
                    if self.depth == 0 {
                        self.finished = true;
                    }
                }
                Event::Text(text) => {
                    if self.depth == 0 && !text.iter().all(u8::is_ascii_whitespace) {
                        return Err(self.error("text outside the root element"));
                    }
                }
                Event::Eof => {
                    if self.kind.is_none() {
                        return Err(self.error("document has no root element"));
                    }
                    if !self.finished {
                        return Err(self.error("unexpected end of document"));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }

    fn tally(&mut self, row: RowOutcome) -> Option<ActivityEvent> {
        self.skips.rows += 1;
        match row {
            RowOutcome::Event(event) => return Some(event),
            RowOutcome::MissingUser => self.skips.missing_user += 1,
            RowOutcome::OtherPostType => self.skips.other_post_type += 1,
            RowOutcome::BadTimestamp => self.skips.bad_timestamp += 1,
        }
        None
    }
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<ActivityEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_event() {
            Ok(Some(event)) => Some(Ok(event)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

enum RowOutcome {
    Event(ActivityEvent),
    MissingUser,
    OtherPostType,
    BadTimestamp,
}

fn classify_row(row: &BytesStart<'_>, kind: DumpKind) -> RowOutcome {
    let user_key: &[u8] = match kind {
        DumpKind::Posts => b"OwnerUserId",
        DumpKind::Comments => b"UserId",
    };
    let mut post_type = None;
    let mut created = None;
    let mut user = None;
    for attr in row.attributes().flatten() {
        let key = attr.key.as_ref();
        if key == b"PostTypeId" || key == b"CreationDate" || key == user_key {
            let Ok(value) = attr.unescape_value() else { continue };
            match key {
                b"PostTypeId" => post_type = Some(value.trim().to_owned()),
                b"CreationDate" => created = Some(value.into_owned()),
                _ => user = Some(value.into_owned()),
            }
        }
    }
    let activity = match kind {
        DumpKind::Comments => ActivityKind::Comment,
        DumpKind::Posts => match post_type.as_deref() {
            Some("1") => ActivityKind::Question,
            Some("2") => ActivityKind::Answer,
            _ => return RowOutcome::OtherPostType,
        },
    };
    let user = match user {
        Some(u) if !u.trim().is_empty() => u,
        _ => return RowOutcome::MissingUser,
    };
    let Some(timestamp) = created.as_deref().and_then(parse_dump_timestamp) else {
        return RowOutcome::BadTimestamp;
    };
    match ActivityEvent::new(&user, timestamp, activity) {
        Ok(event) => RowOutcome::Event(event),
        Err(_) => RowOutcome::MissingUser,
    }
}

/// Dump timestamps look like `2014-04-01T10:00:00.000` and carry no offset;
/// they are read as UTC. RFC 3339 input is accepted as well.
pub(crate) fn parse_dump_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")
        .map(|naive| naive.and_utc())
        .or_else(|_| DateTime::parse_from_rfc3339(s).map(|dt| dt.with_timezone(&Utc)))
        .ok()
}

fn collect<R: BufRead>(mut reader: DumpReader<R>) -> Result<Parsed> {
    let mut events = Vec::new();
    for event in reader.by_ref() {
        events.push(event?);
    }
    Ok(Parsed { events, skips: reader.into_skips() })
}

/// Questions (`PostTypeId=1`) and answers (`PostTypeId=2`) from a `Posts.xml` stream.
pub fn parse_stackexchange_posts<R: BufRead>(input: R) -> Result<Parsed> {
    collect(DumpReader::expecting(input, DumpKind::Posts))
}

/// Comments from a `Comments.xml` stream.
pub fn parse_stackexchange_comments<R: BufRead>(input: R) -> Result<Parsed> {
    collect(DumpReader::expecting(input, DumpKind::Comments))
}

/// Either dump file, recognized by its root element.
pub fn parse_stackexchange_dump<R: BufRead>(input: R) -> Result<Parsed> {
    collect(DumpReader::new(input))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn posts(rows: &str) -> String {
        format!("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n{rows}\n</posts>\n")
    }

    #[test]
    fn question_row() {
        let doc = posts(r#"<row Id="1" PostTypeId="1" CreationDate="2014-04-01T10:00:00.000" OwnerUserId="7" Body="&lt;p&gt;hi&lt;/p&gt;"/>"#);
        let parsed = parse_stackexchange_posts(doc.as_bytes()).unwrap();
        assert_eq!(parsed.events.len(), 1);
        let e = &parsed.events[0];
        assert_eq!(e.user_id, "7");
        assert_eq!(e.kind, ActivityKind::Question);
        assert_eq!(e.timestamp, Utc.with_ymd_and_hms(2014, 4, 1, 10, 0, 0).unwrap());
    }

    #[test]
    fn answer_row() {
        let doc = posts(r#"<row PostTypeId="2" CreationDate="2014-04-02T00:00:00.000" OwnerUserId="9"/>"#);
        let parsed = parse_stackexchange_posts(doc.as_bytes()).unwrap();
        assert_eq!(parsed.events[0].kind, ActivityKind::Answer);
        assert_eq!(parsed.events[0].user_id, "9");
    }

    #[test]
    fn skips_are_tallied() {
        let doc = posts(concat!(
            r#"<row PostTypeId="1" CreationDate="2014-04-01T10:00:00.000"/>"#,
            r#"<row PostTypeId="5" CreationDate="2014-04-01T10:00:00.000" OwnerUserId="3"/>"#,
            r#"<row PostTypeId="2" CreationDate="yesterday" OwnerUserId="3"/>"#,
            r#"<row PostTypeId="2" CreationDate="2014-04-01T10:00:00.000" OwnerUserId="3"/>"#,
        ));
        let parsed = parse_stackexchange_posts(doc.as_bytes()).unwrap();
        assert_eq!(parsed.events.len(), 1);
        assert_eq!(parsed.skips.rows, 4);
        assert_eq!(parsed.skips.missing_user, 1);
        assert_eq!(parsed.skips.other_post_type, 1);
        assert_eq!(parsed.skips.bad_timestamp, 1);
        assert_eq!(parsed.skips.skipped() + parsed.events.len() as u64, parsed.skips.rows);
    }

    #[test]
    fn comments_rows() {
        let doc = r#"<comments><row Id="1" CreationDate="2015-01-15T08:30:00.000" UserId="42"/><row CreationDate="2015-01-15T08:30:00.000"/></comments>"#;
        let parsed = parse_stackexchange_comments(doc.as_bytes()).unwrap();
        assert_eq!(parsed.events.len(), 1);
        assert_eq!(parsed.events[0].kind, ActivityKind::Comment);
        assert_eq!(parsed.events[0].user_id, "42");
        assert_eq!(parsed.skips.missing_user, 1);
    }

    #[test]
    fn empty_comments_document() {
        let parsed = parse_stackexchange_comments("<comments/>".as_bytes()).unwrap();
        assert!(parsed.events.is_empty());
        assert_eq!(parsed.skips, SkipReport::default());
    }

    #[test]
    fn malformed_xml_reports_offset() {
        let doc = r#"<posts><row PostTypeId="1" CreationDate="2014-04-01T10:00:00.000" OwnerUserId="7"/><row </posts>"#;
        match parse_stackexchange_posts(doc.as_bytes()) {
            Err(Error::Xml { offset, .. }) => assert!(offset > 0),
            other => panic!("expected XML error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_document_is_an_error() {
        let doc = r#"<posts><row PostTypeId="1" CreationDate="2014-04-01T10:00:00.000" OwnerUserId="7"/>"#;
        assert!(matches!(parse_stackexchange_posts(doc.as_bytes()), Err(Error::Xml { .. })));
    }

    #[test]
    fn wrong_root_is_an_error() {
        assert!(parse_stackexchange_posts("<comments/>".as_bytes()).is_err());
        let parsed = parse_stackexchange_dump("<comments/>".as_bytes()).unwrap();
        assert!(parsed.events.is_empty());
    }

    #[test]
    fn subsecond_precision_is_dropped() {
        let ts = parse_dump_timestamp("2014-04-01T10:00:00.987").unwrap();
        let e = ActivityEvent::new("1", ts, ActivityKind::Answer).unwrap();
        assert_eq!(e.timestamp, Utc.with_ymd_and_hms(2014, 4, 1, 10, 0, 0).unwrap());
    }
}
