//! Event-history CSV.
//!
//! ```text
//! item_id,event_index,event_type,interarrival_time
//! 1,1,CM,0.45123456789012345
//! 1,2,PM,0.10000000000000001
//! ```
//!
//! Rows are ordered by `(item_id, event_index)`, `event_index` counts from 1
//! within each item, times are written in positional notation with 17
//! significant digits. Output is UTF-8 with LF line endings.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{GrpError, Result};
use crate::model::{Event, EventHistory, EventKind, Item};

pub const HEADER: [&str; 4] = ["item_id", "event_index", "event_type", "interarrival_time"];

/// Positional decimal with 17 significant digits.
pub fn format_time(t: f64) -> String {
    if t == 0.0 || !t.is_finite() {
        return format!("{t}");
    }
    let sci = format!("{t:.16e}");
    let exponent: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific formatting has an exponent");
    let decimals = (16 - exponent).max(0) as usize;
    format!("{t:.decimals$}")
}

pub fn write_history<W: Write>(history: &EventHistory, writer: W) -> Result<()> {
    write_rows(history, writer).map_err(|source| GrpError::Io {
        path: "<csv output>".into(),
        source,
    })
}

fn write_rows<W: Write>(history: &EventHistory, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{}", HEADER.join(","))?;
    for item in history.items() {
        for (i, e) in item.events.iter().enumerate() {
            writeln!(w, "{},{},{},{}", item.id, i + 1, e.kind(), format_time(e.t()))?;
        }
    }
    w.flush()
}

pub fn to_csv_string(history: &EventHistory) -> String {
    let mut buf = Vec::new();
    write_history(history, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is ASCII")
}

pub fn write_history_file(history: &EventHistory, path: &Path) -> Result<()> {
    let io_err = |source| GrpError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_rows(history, BufWriter::new(file)).map_err(io_err)
}

pub fn read_history_file(path: &Path) -> Result<EventHistory> {
    let file = File::open(path).map_err(|source| GrpError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_history(file, path)
}

/// Parses CSV text; `origin` only labels error messages.
pub fn parse_history<R: Read>(reader: R, origin: &Path) -> Result<EventHistory> {
    let parse_err = |line: u64, message: String| GrpError::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let mut items: Vec<Item> = Vec::new();
    let mut saw_header = false;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if !saw_header {
            if record.iter().ne(HEADER) {
                return Err(parse_err(line, format!("expected header `{}`", HEADER.join(","))));
            }
            saw_header = true;
            continue;
        }
        if record.len() != 4 {
            return Err(parse_err(line, format!("expected 4 fields, found {}", record.len())));
        }
        let item_id: u64 = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("bad item_id {:?}", &record[0])))?;
        let index: usize = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("bad event_index {:?}", &record[1])))?;
        let kind: EventKind = record[2].parse().map_err(|e: GrpError| parse_err(line, e.to_string()))?;
        let t: f64 = record[3]
            .parse()
            .map_err(|_| parse_err(line, format!("bad interarrival_time {:?}", &record[3])))?;
        let event = Event::new(kind, t).map_err(|e| parse_err(line, e.to_string()))?;

        match items.last_mut() {
            Some(item) if item.id == item_id => {
                if index != item.events.len() + 1 {
                    return Err(parse_err(
                        line,
                        format!("item {item_id}: expected event_index {}, found {index}", item.events.len() + 1),
                    ));
                }
                item.events.push(event);
            }
            last => {
                if let Some(prev) = last {
                    if item_id < prev.id {
                        return Err(parse_err(
                            line,
                            format!("item_id {item_id} follows {}; rows must be ordered", prev.id),
                        ));
                    }
                }
                if index != 1 {
                    return Err(parse_err(
                        line,
                        format!("item {item_id}: expected event_index 1, found {index}"),
                    ));
                }
                items.push(Item {
                    id: item_id,
                    events: vec![event],
                });
            }
        }
    }
    if !saw_header {
        return Err(parse_err(1, "missing header".into()));
    }
    Ok(EventHistory::new(items))
}
