//! Frequency-table ingestion.
//!
//! CSV: one `site,count` record per line, optional `site,count` header.
//! JSON: an array of `{"site": string, "count": number}` objects.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use benford_core::{FrequencyVector, Site};
use clap::ValueEnum;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    /// `.json` files are JSON, everything else CSV.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    }
}

/// One parsed input row before cross-row validation.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputRecord {
    pub site: String,
    pub count: f64,
}

pub fn read_input(path: &Path, format: Option<InputFormat>) -> Result<FrequencyVector, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Usage(format!("cannot read standard input: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?
    };
    match format.unwrap_or_else(|| InputFormat::infer(path)) {
        InputFormat::Csv => parse_csv(&text),
        InputFormat::Json => parse_json(&text),
    }
}

fn check_record(
    site: &str,
    count_text: &str,
    count: Option<f64>,
    place: &str,
) -> Result<Site, CliError> {
    if site.is_empty() {
        return Err(CliError::Data(format!("{place}: empty site name")));
    }
    match count {
        Some(c) if c.is_finite() && c > 0.0 => Ok(Site::new(site, c)),
        Some(_) => Err(CliError::Data(format!(
            "{place}: count for site {site:?} must be a finite positive number, got {count_text}"
        ))),
        None => Err(CliError::Data(format!(
            "{place}: count for site {site:?} is not a number: {count_text:?}"
        ))),
    }
}

fn finish(sites: Vec<(Site, String)>) -> Result<FrequencyVector, CliError> {
    let mut first_seen: HashMap<&str, &str> = HashMap::new();
    for (site, place) in &sites {
        if let Some(prev) = first_seen.insert(site.id.as_str(), place.as_str()) {
            return Err(CliError::Data(format!(
                "{place}: duplicate site {:?} (first at {prev})",
                site.id
            )));
        }
    }
    if sites.len() < 2 {
        return Err(CliError::Data(format!(
            "need at least 2 sites, found {}",
            sites.len()
        )));
    }
    FrequencyVector::new(sites.into_iter().map(|(s, _)| s).collect())
        .map_err(|e| CliError::Data(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<FrequencyVector, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut sites = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Data(format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let place = format!("line {line}");
        if record.len() != 2 {
            return Err(CliError::Data(format!(
                "{place}: expected 2 fields (site,count), found {}",
                record.len()
            )));
        }
        let (site, count_text) = (&record[0], &record[1]);
        if idx == 0 && site.eq_ignore_ascii_case("site") && count_text.eq_ignore_ascii_case("count")
        {
            continue;
        }
        let site = check_record(site, count_text, count_text.parse().ok(), &place)?;
        sites.push((site, place));
    }
    finish(sites)
}

pub fn parse_json(text: &str) -> Result<FrequencyVector, CliError> {
    let records: Vec<InputRecord> = serde_json::from_str(text)
        .map_err(|e| CliError::Data(format!("line {}: {e}", e.line())))?;
    let sites = records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let place = format!("entry {}", i + 1);
            check_record(&r.site, &r.count.to_string(), Some(r.count), &place).map(|s| (s, place))
        })
        .collect::<Result<Vec<_>, _>>()?;
    finish(sites)
}
