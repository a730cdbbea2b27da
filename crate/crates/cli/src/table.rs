//! Tab-separated stats records, one row per (case, map).

use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use confmap::confidence::MapSummary;
use confmap::overlay::DominanceFractions;

use crate::error::CliError;

pub const HEADER: [&str; 16] = [
    "case",
    "command",
    "map",
    "noise",
    "status",
    "pixels",
    "mean",
    "min",
    "max",
    "frac_high",
    "delta_mean",
    "cyan",
    "blue",
    "magenta",
    "white",
    "detail",
];

const MISSING: &str = "-";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatsRecord {
    pub case: String,
    pub command: String,
    pub map: String,
    pub noise: String,
    pub status: Status,
    pub summary: Option<MapSummary>,
    /// Change of the mean against the unperturbed image (perturbation rows).
    pub delta_mean: Option<f64>,
    /// Dominance fractions of the overlay this map belongs to.
    pub dominance: Option<DominanceFractions>,
    pub detail: String,
}

impl StatsRecord {
    pub fn ok(case: &str, command: &str, map: &str, summary: MapSummary) -> Self {
        Self {
            case: case.into(),
            command: command.into(),
            map: map.into(),
            noise: MISSING.into(),
            status: Status::Ok,
            summary: Some(summary),
            delta_mean: None,
            dominance: None,
            detail: MISSING.into(),
        }
    }

    pub fn failed(case: &str, command: &str, detail: &str) -> Self {
        Self {
            case: case.into(),
            command: command.into(),
            map: MISSING.into(),
            noise: MISSING.into(),
            status: Status::Failed,
            summary: None,
            delta_mean: None,
            dominance: None,
            detail: detail.into(),
        }
    }

    fn fields(&self) -> Vec<String> {
        let num = |v: Option<f64>| v.map_or_else(|| MISSING.to_string(), |v| v.to_string());
        let s = self.summary;
        let d = self.dominance;
        vec![
            clean(&self.case),
            clean(&self.command),
            clean(&self.map),
            clean(&self.noise),
            self.status.to_string(),
            s.map_or_else(|| MISSING.to_string(), |s| s.pixels.to_string()),
            num(s.map(|s| s.mean)),
            num(s.map(|s| s.min)),
            num(s.map(|s| s.max)),
            num(s.map(|s| s.frac_high)),
            num(self.delta_mean),
            num(d.map(|d| d.cyan)),
            num(d.map(|d| d.blue)),
            num(d.map(|d| d.magenta)),
            num(d.map(|d| d.white)),
            clean(&self.detail),
        ]
    }

    pub fn to_line(&self) -> String {
        self.fields().join("\t")
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != HEADER.len() {
            return Err(format!(
                "expected {} fields, found {}",
                HEADER.len(),
                f.len()
            ));
        }
        let num = |s: &str| -> Result<Option<f64>, String> {
            if s == MISSING {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| format!("{s:?}: {e}"))
            }
        };
        let status = match f[4] {
            "ok" => Status::Ok,
            "failed" => Status::Failed,
            other => return Err(format!("unknown status {other:?}")),
        };
        let summary = if f[5] == MISSING {
            None
        } else {
            Some(MapSummary {
                pixels: f[5].parse().map_err(|e| format!("pixels: {e}"))?,
                mean: num(f[6])?.ok_or("missing mean")?,
                min: num(f[7])?.ok_or("missing min")?,
                max: num(f[8])?.ok_or("missing max")?,
                frac_high: num(f[9])?.ok_or("missing frac_high")?,
            })
        };
        let dominance = match (num(f[11])?, num(f[12])?, num(f[13])?, num(f[14])?) {
            (Some(cyan), Some(blue), Some(magenta), Some(white)) => Some(DominanceFractions {
                cyan,
                blue,
                magenta,
                white,
            }),
            (None, None, None, None) => None,
            _ => return Err("partial dominance columns".into()),
        };
        Ok(Self {
            case: f[0].into(),
            command: f[1].into(),
            map: f[2].into(),
            noise: f[3].into(),
            status,
            summary,
            delta_mean: num(f[10])?,
            dominance,
            detail: f[15].into(),
        })
    }
}

fn clean(s: &str) -> String {
    let s: String = s
        .chars()
        .map(|c| {
            if c == '\t' || c == '\n' || c == '\r' {
                ' '
            } else {
                c
            }
        })
        .collect();
    if s.is_empty() {
        MISSING.into()
    } else {
        s
    }
}

pub fn render(records: &[StatsRecord]) -> String {
    let mut out = HEADER.join("\t");
    out.push('\n');
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

/// Writes `records`, adding the header only when the file is new or empty.
pub fn write_tsv(path: &Path, records: &[StatsRecord], append: bool) -> Result<(), CliError> {
    let needs_header = !append
        || std::fs::metadata(path)
            .map(|m| m.len() == 0)
            .unwrap_or(true);
    let mut file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    let mut buf = String::new();
    if needs_header {
        buf.push_str(&HEADER.join("\t"));
        buf.push('\n');
    }
    for r in records {
        buf.push_str(&r.to_line());
        buf.push('\n');
    }
    file.write_all(buf.as_bytes())
        .map_err(|e| CliError::io(path, e))
}

pub fn parse_tsv(text: &str) -> Result<Vec<StatsRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER.join("\t") => {}
        Some(h) => return Err(format!("unexpected header {h:?}")),
        None => return Err("empty stats file".into()),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| StatsRecord::parse_line(l).map_err(|e| format!("line {}: {e}", i + 2)))
        .collect()
}
