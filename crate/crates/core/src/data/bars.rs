use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DataError;

/// A single OHLCV bar. Timestamps are UTC seconds since the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub timestamp: i64,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: f64,
}

impl Bar {
    /// Checks the OHLC ordering invariants and volume non-negativity.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.low <= self.open.min(self.close)) {
            return Err(format!(
                "low {} exceeds min(open, close) = {}",
                self.low,
                self.open.min(self.close)
            ));
        }
        if !(self.high >= self.open.max(self.close)) {
            return Err(format!(
                "high {} is below max(open, close) = {}",
                self.high,
                self.open.max(self.close)
            ));
        }
        if self.low > self.high {
            return Err(format!("low {} exceeds high {}", self.low, self.high));
        }
        if self.volume < 0.0 {
            return Err(format!("negative volume {}", self.volume));
        }
        if [self.open, self.high, self.low, self.close, self.volume]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err("non-finite field".to_string());
        }
        Ok(())
    }
}

/// An ordered bar series on a fixed interval grid. Gaps are allowed,
/// duplicates are not.
#[derive(Debug, Clone, PartialEq)]
pub struct BarSeries {
    bars: Vec<Bar>,
    interval_seconds: i64,
}

impl BarSeries {
    /// Builds a series from validated bars, inferring the interval as the
    /// GCD of consecutive timestamp gaps (so missing bars do not distort it).
    pub fn new(bars: Vec<Bar>) -> Result<Self, DataError> {
        for (i, bar) in bars.iter().enumerate() {
            bar.validate()
                .map_err(|reason| DataError::MalformedRow { row: i + 1, reason })?;
        }
        for (i, pair) in bars.windows(2).enumerate() {
            if pair[1].timestamp <= pair[0].timestamp {
                return Err(DataError::NonMonotonicTimestamps {
                    row: i + 2,
                    prev: pair[0].timestamp,
                    curr: pair[1].timestamp,
                });
            }
        }
        let interval_seconds = infer_interval(&bars);
        Ok(Self {
            bars,
            interval_seconds,
        })
    }

    /// Like [`BarSeries::new`] but with a declared interval; every gap must be
    /// a multiple of it.
    pub fn with_interval(bars: Vec<Bar>, interval_seconds: i64) -> Result<Self, DataError> {
        assert!(interval_seconds > 0, "interval must be positive");
        let series = Self::new(bars)?;
        for (i, pair) in series.bars.windows(2).enumerate() {
            let gap = pair[1].timestamp - pair[0].timestamp;
            if gap % interval_seconds != 0 {
                return Err(DataError::OffGrid {
                    row: i + 2,
                    ts: pair[1].timestamp,
                    interval: interval_seconds,
                });
            }
        }
        Ok(Self {
            interval_seconds,
            ..series
        })
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn interval_seconds(&self) -> i64 {
        self.interval_seconds
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }

    pub fn timestamps(&self) -> Vec<i64> {
        self.bars.iter().map(|b| b.timestamp).collect()
    }

    /// Sub-series over a bar index range (interval is preserved).
    pub fn slice(&self, range: std::ops::Range<usize>) -> BarSeries {
        BarSeries {
            bars: self.bars[range].to_vec(),
            interval_seconds: self.interval_seconds,
        }
    }
}

fn infer_interval(bars: &[Bar]) -> i64 {
    let mut g = 0i64;
    for pair in bars.windows(2) {
        g = gcd(g, pair[1].timestamp - pair[0].timestamp);
    }
    if g <= 0 {
        1
    } else {
        g
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Accepted timestamp encodings in the CSV `timestamp` column.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimestampFormat {
    /// Try epoch seconds first, then ISO-8601 (`2019-01-01T00:00:00Z` or
    /// `2019-01-01 00:00:00`).
    #[default]
    Auto,
    EpochSeconds,
    Iso8601,
}

/// Schema of the bar CSV: header `timestamp,open,high,low,close,volume`,
/// UTF-8, comma separator, `.` decimal point.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct CsvSchema {
    pub timestamp_format: TimestampFormat,
    /// When set, the series is checked against this interval instead of the
    /// inferred one.
    pub interval_seconds: Option<i64>,
}

const EXPECTED_HEADER: [&str; 6] = ["timestamp", "open", "high", "low", "close", "volume"];

fn parse_timestamp(text: &str, format: TimestampFormat) -> Result<i64, String> {
    let epoch = || text.trim().parse::<i64>().map_err(|e| e.to_string());
    let iso = || {
        let t = text.trim();
        if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(t) {
            return Ok(dt.timestamp());
        }
        let formats = ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d"];
        for f in formats {
            if let Ok(dt) = chrono::NaiveDateTime::parse_from_str(t, f) {
                return Ok(dt.and_utc().timestamp());
            }
            if f == "%Y-%m-%d" {
                if let Ok(d) = chrono::NaiveDate::parse_from_str(t, f) {
                    return Ok(d.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp());
                }
            }
        }
        Err(format!("unrecognized timestamp `{t}`"))
    };
    match format {
        TimestampFormat::EpochSeconds => epoch(),
        TimestampFormat::Iso8601 => iso(),
        TimestampFormat::Auto => epoch().or_else(|_| iso()),
    }
}

/// Loads a bar series from CSV. Rows that violate the OHLC invariants are
/// rejected with their 1-based line number (header is line 1).
pub fn load_csv(path: impl AsRef<Path>, schema: CsvSchema) -> Result<BarSeries, DataError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let header = reader
        .headers()
        .map_err(|e| DataError::MalformedRow {
            row: 1,
            reason: e.to_string(),
        })?
        .clone();
    let found: Vec<&str> = header.iter().collect();
    if found != EXPECTED_HEADER {
        return Err(DataError::HeaderMismatch {
            expected: EXPECTED_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut bars = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // line number: header is line 1
        let record = record.map_err(|e| DataError::MalformedRow {
            row,
            reason: e.to_string(),
        })?;
        if record.len() != 6 {
            return Err(DataError::MalformedRow {
                row,
                reason: format!("expected 6 fields, found {}", record.len()),
            });
        }
        let timestamp = parse_timestamp(&record[0], schema.timestamp_format)
            .map_err(|reason| DataError::MalformedRow { row, reason })?;
        let mut fields = [0.0f64; 5];
        for (j, slot) in fields.iter_mut().enumerate() {
            *slot = record[j + 1].parse::<f64>().map_err(|e| DataError::MalformedRow {
                row,
                reason: format!("field `{}`: {e}", EXPECTED_HEADER[j + 1]),
            })?;
        }
        let bar = Bar {
            timestamp,
            open: fields[0],
            high: fields[1],
            low: fields[2],
            close: fields[3],
            volume: fields[4],
        };
        bar.validate()
            .map_err(|reason| DataError::MalformedRow { row, reason })?;
        bars.push(bar);
    }

    // Re-check monotonicity with real line numbers before delegating.
    for (i, pair) in bars.windows(2).enumerate() {
        if pair[1].timestamp <= pair[0].timestamp {
            return Err(DataError::NonMonotonicTimestamps {
                row: i + 3,
                prev: pair[0].timestamp,
                curr: pair[1].timestamp,
            });
        }
    }

    match schema.interval_seconds {
        Some(interval) => BarSeries::with_interval(bars, interval),
        None => BarSeries::new(bars),
    }
}

/// Writes a bar series back out in the canonical CSV schema.
pub fn write_csv(path: impl AsRef<Path>, series: &BarSeries) -> Result<(), DataError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })?;
    writer
        .write_record(EXPECTED_HEADER)
        .map_err(|e| DataError::MalformedRow {
            row: 1,
            reason: e.to_string(),
        })?;
    for (i, bar) in series.bars().iter().enumerate() {
        writer
            .write_record([
                bar.timestamp.to_string(),
                bar.open.to_string(),
                bar.high.to_string(),
                bar.low.to_string(),
                bar.close.to_string(),
                bar.volume.to_string(),
            ])
            .map_err(|e| DataError::MalformedRow {
                row: i + 2,
                reason: e.to_string(),
            })?;
    }
    writer.flush().map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}
