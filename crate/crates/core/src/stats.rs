//! Build statistics: the counters a build reports and their text format.
//!
//! Statistics are written as one `key=value` pair per line so they diff
//! cleanly and parse trivially. Two builds of the same input produce
//! byte-identical statistics: nothing here depends on timing, and the byte
//! counters only ever see deterministic list traffic.

use std::path::Path;

use crate::error::{Error, Result};

/// Counters for one refinement pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PassStats {
    /// Elements read from the interleave encoding.
    pub reads_encoding: u64,
    /// Elements read from the LCP column.
    pub reads_lcp: u64,
    /// Elements read through the per-length transform cursors.
    pub reads_bwt: u64,
    /// Elements written across the order buckets.
    pub writes_encoding: u64,
    /// Elements written across the LCP buckets.
    pub writes_lcp: u64,
    /// Largest value in the pass's LCP output; drives termination.
    pub max_lcp: i64,
}

impl PassStats {
    /// All elements the pass read, over its three input streams.
    pub fn reads_total(&self) -> u64 {
        self.reads_encoding + self.reads_lcp + self.reads_bwt
    }

    /// All elements the pass wrote, over its two output families.
    pub fn writes_total(&self) -> u64 {
        self.writes_encoding + self.writes_lcp
    }
}

/// Counters for a whole build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildStats {
    /// Number of strings.
    pub m: u64,
    /// Common string length.
    pub k: u64,
    /// Non-sentinel alphabet size.
    pub sigma: u64,
    /// Refinement passes executed; one more than the final maximum LCP.
    pub passes: u64,
    /// Maximum of the final LCP column.
    pub max_lcp: i64,
    /// Data-file bytes read over the whole build.
    pub bytes_read: u64,
    /// Data-file bytes written over the whole build.
    pub bytes_written: u64,
    /// High-water mark of elements held in memory: the resident column plus
    /// cursor state, minima tracker, and open list handles.
    pub peak_resident_elements: u64,
    /// Per-pass counters, in pass order.
    pub pass_details: Vec<PassStats>,
}

impl BuildStats {
    /// Serialize as `key=value` lines, stable order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("m={}\n", self.m));
        out.push_str(&format!("k={}\n", self.k));
        out.push_str(&format!("sigma={}\n", self.sigma));
        out.push_str(&format!("passes={}\n", self.passes));
        out.push_str(&format!("max_lcp={}\n", self.max_lcp));
        out.push_str(&format!("bytes_read={}\n", self.bytes_read));
        out.push_str(&format!("bytes_written={}\n", self.bytes_written));
        out.push_str(&format!(
            "peak_resident_elements={}\n",
            self.peak_resident_elements,
        ));
        for (i, pass) in self.pass_details.iter().enumerate() {
            let n = i + 1;
            out.push_str(&format!("pass.{n}.reads.encoding={}\n", pass.reads_encoding));
            out.push_str(&format!("pass.{n}.reads.lcp={}\n", pass.reads_lcp));
            out.push_str(&format!("pass.{n}.reads.bwt={}\n", pass.reads_bwt));
            out.push_str(&format!(
                "pass.{n}.writes.encoding={}\n",
                pass.writes_encoding,
            ));
            out.push_str(&format!("pass.{n}.writes.lcp={}\n", pass.writes_lcp));
            out.push_str(&format!("pass.{n}.max_lcp={}\n", pass.max_lcp));
        }
        out
    }

    /// Parse what [`BuildStats::to_text`] wrote. `path` only labels errors.
    pub fn from_text(text: &str, path: &Path) -> Result<BuildStats> {
        let bad = |detail: String| Error::Manifest {
            path: path.to_path_buf(),
            detail,
        };
        let mut pairs = std::collections::HashMap::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {line:?} is not key=value")))?;
            pairs.insert(key.to_string(), value.to_string());
        }
        let fetch = |key: &str| -> Result<i64> {
            pairs
                .get(key)
                .ok_or_else(|| bad(format!("missing key {key:?}")))?
                .parse::<i64>()
                .map_err(|_| bad(format!("key {key:?} is not an integer")))
        };
        let passes = fetch("passes")? as u64;
        let mut pass_details = Vec::with_capacity(passes as usize);
        for n in 1..=passes {
            pass_details.push(PassStats {
                reads_encoding: fetch(&format!("pass.{n}.reads.encoding"))? as u64,
                reads_lcp: fetch(&format!("pass.{n}.reads.lcp"))? as u64,
                reads_bwt: fetch(&format!("pass.{n}.reads.bwt"))? as u64,
                writes_encoding: fetch(&format!("pass.{n}.writes.encoding"))? as u64,
                writes_lcp: fetch(&format!("pass.{n}.writes.lcp"))? as u64,
                max_lcp: fetch(&format!("pass.{n}.max_lcp"))?,
            });
        }
        Ok(BuildStats {
            m: fetch("m")? as u64,
            k: fetch("k")? as u64,
            sigma: fetch("sigma")? as u64,
            passes,
            max_lcp: fetch("max_lcp")?,
            bytes_read: fetch("bytes_read")? as u64,
            bytes_written: fetch("bytes_written")? as u64,
            peak_resident_elements: fetch("peak_resident_elements")? as u64,
            pass_details,
        })
    }
}
