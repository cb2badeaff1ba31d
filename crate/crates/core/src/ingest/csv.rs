use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use csv::{ReaderBuilder, StringRecord, StringRecordsIntoIter, Trim};

use super::{ActivityEvent, ActivityKind, Parsed, SkipReport};
use crate::error::{Error, Result};

const HEADER: [&str; 3] = ["user_id", "timestamp", "kind"];

/// Streaming reader for the `user_id,timestamp,kind` event format.
pub struct EventCsvReader<R: Read> {
    records: StringRecordsIntoIter<R>,
    skips: SkipReport,
}

impl<R: Read> EventCsvReader<R> {
    /// Validates the header line; a wrong header is fatal.
    pub fn new(input: R) -> Result<Self> {
        let mut reader = ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(Trim::All)
            .from_reader(input);
        let header = match reader.headers() {
            Ok(h) => h.clone(),
            Err(e) if matches!(e.kind(), csv::ErrorKind::Utf8 { .. }) => {
                return Err(Error::CsvHeader("<invalid UTF-8>".into()))
            }
            Err(e) => return Err(e.into()),
        };
        let matches = header.len() == HEADER.len()
            && header.iter().zip(HEADER).all(|(h, want)| h.trim_start_matches('\u{feff}') == want);
        if !matches {
            return Err(Error::CsvHeader(header.iter().collect::<Vec<_>>().join(",")));
        }
        Ok(EventCsvReader { records: reader.into_records(), skips: SkipReport::default() })
    }

    pub fn skips(&self) -> &SkipReport {
        &self.skips
    }

    pub fn into_skips(self) -> SkipReport {
        self.skips
    }

    fn skip(&mut self, line: u64) {
        self.skips.bad_line += 1;
        self.skips.lines.push(line);
    }
}

impl<R: Read> Iterator for EventCsvReader<R> {
    type Item = Result<ActivityEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let record = match self.records.next()? {
                Ok(record) => record,
                Err(e) => {
                    let line = e.position().map(|p| p.line()).unwrap_or(0);
                    match e.kind() {
                        csv::ErrorKind::Io(_) => return Some(Err(e.into())),
                        _ => {
                            self.skips.rows += 1;
                            self.skip(line);
                            continue;
                        }
                    }
                }
            };
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            self.skips.rows += 1;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            match parse_record(&record) {
                Some(event) => return Some(Ok(event)),
                None => self.skip(line),
            }
        }
    }
}

fn parse_record(record: &StringRecord) -> Option<ActivityEvent> {
    if record.len() != HEADER.len() {
        return None;
    }
    let timestamp = DateTime::parse_from_rfc3339(&record[1]).ok()?.with_timezone(&Utc);
    let kind: ActivityKind = record[2].parse().ok()?;
    ActivityEvent::new(&record[0], timestamp, kind).ok()
}

/// Parses a whole event CSV, skipping (and tallying) malformed data lines.
pub fn parse_event_csv<R: Read>(input: R) -> Result<Parsed> {
    let mut reader = EventCsvReader::new(input)?;
    let mut events = Vec::new();
    for event in reader.by_ref() {
        events.push(event?);
    }
    Ok(Parsed { events, skips: reader.into_skips() })
}

/// Writes events in the format [`parse_event_csv`] reads back.
pub fn write_event_csv<'a, W, I>(events: I, output: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ActivityEvent>,
{
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(output);
    writer.write_record(HEADER)?;
    for event in events {
        let ts = event.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true);
        writer.write_record([event.user_id.as_str(), ts.as_str(), event.kind.as_str()])?;
    }
    writer.flush()?;
    Ok(())
}
