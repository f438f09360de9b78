//! OEIS b-file fetching, caching, parsing and cross-checking against the
//! closed forms.
//!
//! Two sequences are supported: A071207 (trees by number of lower-numbered
//! root children) and A232006 (forests with fixed roots). How each entry
//! flattens its triangle is not assumed; [`crosscheck`] searches a small
//! set of layouts and offsets and keeps the best alignment.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_bigint::BigInt;
use serde::Serialize;

use crate::closed_form::{count_k_low, phi};
use crate::{Error, Result};

const FIXTURE_A071207: &str = include_str!("../fixtures/b071207.txt");
const FIXTURE_A232006: &str = include_str!("../fixtures/b232006.txt");

/// How far into the generated stream the first b-file entry may land.
pub const ALIGNMENT_WINDOW: usize = 12;

/// A parsed b-file: consecutive `(index, value)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFile {
    pub sequence_id: String,
    pub entries: Vec<(i64, BigInt)>,
}

impl BFile {
    /// Back to b-file text, one `index value` line per entry.
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(i, v)| format!("{i} {v}\n")).collect()
    }

    pub fn values(&self) -> impl Iterator<Item = &BigInt> {
        self.entries.iter().map(|(_, v)| v)
    }
}

/// Checks for `A` followed by exactly six digits.
pub fn validate_id(id: &str) -> Result<()> {
    let ok = id.len() == 7 && id.starts_with('A') && id[1..].bytes().all(|b| b.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(Error::MalformedId(id.to_string()))
    }
}

pub fn parse_bfile(sequence_id: &str, text: &str) -> Result<BFile> {
    let mut entries: Vec<(i64, BigInt)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::BFileParse {
            line: lineno + 1,
            message,
        };
        let mut tokens = line.split_whitespace();
        let (Some(index), Some(value), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(bad(format!("expected \"<index> <value>\", got {line:?}")));
        };
        let index: i64 = index.parse().map_err(|_| bad(format!("non-numeric index {index:?}")))?;
        let value: BigInt = value.parse().map_err(|_| bad(format!("non-numeric value {value:?}")))?;
        if let Some((prev, _)) = entries.last() {
            if index != prev + 1 {
                return Err(bad(format!("index gap: {index} follows {prev}")));
            }
        }
        entries.push((index, value));
    }
    Ok(BFile {
        sequence_id: sequence_id.to_string(),
        entries,
    })
}

/// Canonical b-file location, e.g. `https://oeis.org/A071207/b071207.txt`.
pub fn bfile_url(id: &str) -> String {
    format!("https://oeis.org/{id}/b{}.txt", &id[1..])
}

/// The bundled offline copy for a supported id.
pub fn fixture(id: &str) -> Option<&'static str> {
    match id {
        "A071207" => Some(FIXTURE_A071207),
        "A232006" => Some(FIXTURE_A232006),
        _ => None,
    }
}

/// Minimal HTTP GET abstraction so tests can run without a network.
pub trait Transport {
    fn get(&self, url: &str) -> Result<String>;
}

/// Blocking HTTP client.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).build();
        Self { agent: config.into() }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(20))
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String> {
        let mut response = self.agent.get(url).call().map_err(|e| Error::Fetch(format!("{url}: {e}")))?;
        response
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Fetch(format!("{url}: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Cache,
    Network,
    Fixture,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Cache => "cache",
            Source::Network => "network",
            Source::Fixture => "fixture",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Fetched {
    pub bfile: BFile,
    pub source: Source,
    pub raw: String,
}

pub fn cache_path(cache_dir: &Path, id: &str) -> PathBuf {
    cache_dir.join(format!("{id}.txt"))
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("bfile");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn get_with_retry(transport: &dyn Transport, url: &str, backoff: Duration) -> Result<String> {
    match transport.get(url) {
        Ok(text) => Ok(text),
        Err(first) => {
            log::warn!("fetch failed ({first}); retrying once");
            std::thread::sleep(backoff);
            transport.get(url)
        }
    }
}

fn from_fixture(id: &str) -> Result<Fetched> {
    let raw = fixture(id).ok_or_else(|| Error::Fetch(format!("no cached copy and no bundled fixture for {id}")))?;
    Ok(Fetched {
        bfile: parse_bfile(id, raw)?,
        source: Source::Fixture,
        raw: raw.to_string(),
    })
}

/// Loads a b-file: the cache first, then (unless `offline`) one GET with a
/// single retry, storing the raw text in the cache. Falls back to the
/// bundled fixture when offline or when the download fails.
pub fn fetch_bfile(id: &str, cache_dir: Option<&Path>, offline: bool, transport: &dyn Transport) -> Result<Fetched> {
    fetch_bfile_with_backoff(id, cache_dir, offline, transport, Duration::from_millis(750))
}

pub fn fetch_bfile_with_backoff(
    id: &str,
    cache_dir: Option<&Path>,
    offline: bool,
    transport: &dyn Transport,
    backoff: Duration,
) -> Result<Fetched> {
    validate_id(id)?;
    if let Some(dir) = cache_dir {
        let path = cache_path(dir, id);
        if path.is_file() {
            let raw = fs::read_to_string(&path)?;
            log::info!("using cached {}", path.display());
            return Ok(Fetched {
                bfile: parse_bfile(id, &raw)?,
                source: Source::Cache,
                raw,
            });
        }
    }
    if offline {
        return from_fixture(id);
    }
    let url = bfile_url(id);
    match get_with_retry(transport, &url, backoff) {
        Ok(raw) => {
            let bfile = parse_bfile(id, &raw)?;
            if let Some(dir) = cache_dir {
                write_atomic(&cache_path(dir, id), &raw)?;
            }
            Ok(Fetched {
                bfile,
                source: Source::Network,
                raw,
            })
        }
        Err(e) if fixture(id).is_some() => {
            log::warn!("{e}; falling back to the bundled fixture");
            from_fixture(id)
        }
        Err(e) => Err(e),
    }
}

/// One way of reading a triangle row by row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub first_row: u32,
    pub first_column: u32,
    pub descending: bool,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rows from {}, columns from {}, {}",
            self.first_row,
            self.first_column,
            if self.descending { "descending" } else { "ascending" }
        )
    }
}

/// Outcome of aligning a b-file against the generated triangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub sequence_id: String,
    pub layout: Option<Layout>,
    /// Position in the generated stream of the first b-file entry.
    pub offset: usize,
    pub matched_terms: usize,
    pub total_terms: usize,
    pub full_rows_matched: u32,
    pub rows_required: u32,
    /// `(b-file index, expected, found)` of the first disagreement.
    pub first_mismatch: Option<(i64, String, String)>,
    pub pass: bool,
}

impl fmt::Display for CrosscheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sequence: {}", self.sequence_id)?;
        match &self.layout {
            Some(layout) => writeln!(f, "layout: {layout}, offset {}", self.offset)?,
            None => writeln!(f, "layout: no alignment found")?,
        }
        writeln!(f, "matched terms: {} of {}", self.matched_terms, self.total_terms)?;
        writeln!(f, "full rows matched: {} (required {})", self.full_rows_matched, self.rows_required)?;
        if let Some((index, expected, found)) = &self.first_mismatch {
            writeln!(f, "first mismatch at index {index}: expected {expected}, found {found}")?;
        }
        write!(f, "result: {}", if self.pass { "pass" } else { "FAIL" })
    }
}

fn generator(id: &str) -> Result<fn(u32, u32) -> BigInt> {
    match id {
        "A071207" => Ok(|n, k| count_k_low(n, k).expect("k <= n")),
        "A232006" => Ok(phi),
        _ => Err(Error::UnsupportedSequence(id.to_string())),
    }
}

/// Flattened triangle plus the stream position where each row starts.
fn flatten(entry: fn(u32, u32) -> BigInt, layout: Layout, min_len: usize) -> (Vec<BigInt>, Vec<usize>) {
    let mut values = Vec::new();
    let mut row_starts = Vec::new();
    let mut row = layout.first_row;
    while values.len() < min_len {
        row_starts.push(values.len());
        let columns: Vec<u32> = if layout.first_column > row {
            Vec::new()
        } else if layout.descending {
            (layout.first_column..=row).rev().collect()
        } else {
            (layout.first_column..=row).collect()
        };
        values.extend(columns.into_iter().map(|c| entry(row, c)));
        row += 1;
    }
    row_starts.push(values.len());
    (values, row_starts)
}

fn layouts() -> impl Iterator<Item = Layout> {
    [1, 0].into_iter().flat_map(|first_row| {
        (0..2).flat_map(move |first_column| {
            [false, true].into_iter().map(move |descending| Layout {
                first_row,
                first_column,
                descending,
            })
        })
    })
}

/// Aligns `bfile` against the triangle for its sequence and reports the
/// longest matching prefix. Passes iff at least `rows` complete rows of the
/// triangle are matched.
pub fn crosscheck(bfile: &BFile, rows: u32) -> Result<CrosscheckReport> {
    let entry = generator(&bfile.sequence_id)?;
    let found: Vec<&BigInt> = bfile.values().collect();
    let need = found.len() + ALIGNMENT_WINDOW;

    // (matched terms, layout, offset)
    let mut best: Option<(usize, Layout, usize)> = None;
    for layout in layouts() {
        let (stream, _) = flatten(entry, layout, need);
        for offset in 0..=ALIGNMENT_WINDOW {
            let matched = found
                .iter()
                .zip(&stream[offset..])
                .take_while(|(a, b)| **a == *b)
                .count();
            if best.is_none_or(|b| matched > b.0) {
                best = Some((matched, layout, offset));
            }
        }
    }

    let total_terms = found.len();
    let Some((matched, layout, offset)) = best.filter(|b| b.0 > 0) else {
        return Ok(CrosscheckReport {
            sequence_id: bfile.sequence_id.clone(),
            layout: None,
            offset: 0,
            matched_terms: 0,
            total_terms,
            full_rows_matched: 0,
            rows_required: rows,
            first_mismatch: bfile.entries.first().map(|(i, v)| (*i, String::from("?"), v.to_string())),
            pass: false,
        });
    };
    let (stream, row_starts) = flatten(entry, layout, need);
    let end = offset + matched;
    let full_rows = row_starts
        .windows(2)
        .filter(|w| w[0] >= offset && w[1] <= end && w[1] > w[0])
        .count() as u32;
    let first_mismatch = (matched < total_terms).then(|| {
        let (index, value) = &bfile.entries[matched];
        (*index, stream[end].to_string(), value.to_string())
    });
    Ok(CrosscheckReport {
        sequence_id: bfile.sequence_id.clone(),
        layout: Some(layout),
        offset,
        matched_terms: matched,
        total_terms,
        full_rows_matched: full_rows,
        rows_required: rows,
        first_mismatch,
        pass: full_rows >= rows,
    })
}
