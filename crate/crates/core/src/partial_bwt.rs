//! Phase one of the build: one partial transform per suffix length.
//!
//! The level-`l` list `B_l` holds, for the length-`l` suffixes of all
//! strings in sorted order, the symbol that precedes each suffix. Level 0 is
//! the last-character column as-is; every further level comes from the
//! previous one with two sequential scans and no comparisons:
//!
//! 1. scatter the previous level's string numbers into per-symbol buckets,
//!    keyed by each suffix's preceding symbol (a stable counting pass), and
//!    concatenate the buckets in symbol order — prepending one character to
//!    every suffix reorders them exactly this way;
//! 2. walk the new string-number order and look each string's next column
//!    value up in the one column held in memory.
//!
//! Only that single column (m elements) is ever resident; everything else
//! streams front to back.

use crate::error::{Error, Result};
use crate::ingest::{Alphabet, ColumnSet, SymbolCode};
use crate::seqlist::{ListSpec, ListStore, SeqFile};

/// The sealed per-length transforms `B_0 ..= B_k`.
#[derive(Debug)]
pub struct PartialBwtSet {
    levels: Vec<SeqFile>,
    m: usize,
}

impl PartialBwtSet {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Largest suffix length, i.e. the common string length.
    pub fn k(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, l: usize) -> &SeqFile {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[SeqFile] {
        &self.levels
    }

    /// Reopen a complete set `B_0 ..= B_k` previously left in `store`,
    /// validating manifests and the common length.
    pub fn open_existing(store: &ListStore, k: usize) -> Result<PartialBwtSet> {
        let mut levels = Vec::with_capacity(k + 1);
        for l in 0..=k {
            levels.push(store.open_sealed(&level_name(l))?);
        }
        let m = levels[0].len();
        for level in &levels {
            if level.len() != m || level.spec() != ListSpec::SYMBOL {
                return Err(Error::ListMismatch {
                    detail: format!(
                        "{} does not belong to the same build (length or encoding differs)",
                        level.path().display(),
                    ),
                });
            }
        }
        Ok(PartialBwtSet {
            levels,
            m: m as usize,
        })
    }

    /// True if `store` holds data and manifest files for every level.
    pub fn present_in(store: &ListStore, k: usize) -> bool {
        (0..=k).all(|l| store.contains(&level_name(l)))
    }
}

fn level_name(l: usize) -> String {
    format!("B_{l}")
}

/// Scatter `order` into per-symbol buckets: element `i` of `order` goes to
/// the bucket named by symbol `i` of `bwt`. Buckets come back in symbol
/// order (sentinel first) and preserve arrival order within each symbol.
pub fn project(
    bwt: &SeqFile,
    order: &SeqFile,
    sigma: usize,
    store: &ListStore,
) -> Result<Vec<SeqFile>> {
    if bwt.len() != order.len() {
        return Err(Error::ListMismatch {
            detail: format!(
                "projection needs lists of one length, got {} and {}",
                bwt.len(),
                order.len(),
            ),
        });
    }
    let mut writers = Vec::with_capacity(sigma + 1);
    for c in 0..=sigma {
        writers.push(store.create(&format!("P_{c}"), order.spec())?);
    }
    let mut symbols = bwt.reader()?;
    let mut numbers = order.reader()?;
    let mut position = 0u64;
    while let Some(symbol) = symbols.next_value()? {
        let number = numbers.next_value()?.expect("lists validated to one length");
        if symbol < 0 || symbol as usize > sigma {
            return Err(Error::bad_content(
                bwt.path(),
                position,
                format!("symbol code {symbol} exceeds the alphabet ({sigma} symbols)"),
            ));
        }
        writers[symbol as usize].append(number)?;
        position += 1;
    }
    writers.into_iter().map(|w| w.finish()).collect()
}

/// Build every partial transform for `columns`, bottom level up.
///
/// `index_spec` is the element encoding for string-number lists. The
/// string-number lists `N_*` are double-buffered (only the current and the
/// previous level exist at once) and, like the `P_*` buckets, removed at
/// the end unless `keep_intermediates` asks for them.
pub fn build_partial_bwts(
    columns: &ColumnSet,
    alphabet: &Alphabet,
    store: &ListStore,
    index_spec: ListSpec,
    keep_intermediates: bool,
) -> Result<PartialBwtSet> {
    let m = columns.m();
    let k = columns.k();
    let sigma = alphabet.sigma();
    let tracker = store.tracker().clone();

    let mut levels = Vec::with_capacity(k + 1);
    levels.push(store.concat(&level_name(0), ListSpec::SYMBOL, &[columns.level(0)])?);

    let mut numbers = {
        // Level 0 is one suffix per string, already in string order.
        let mut w = store.create("N_0", index_spec)?;
        for i in 1..=m as i64 {
            w.append(i)?;
        }
        w.finish()?
    };

    for l in 1..=k {
        let buckets = project(&levels[l - 1], &numbers, sigma, store)?;
        let bucket_refs: Vec<&SeqFile> = buckets.iter().collect();
        let next_numbers = store.concat(&format!("N_{l}"), index_spec, &bucket_refs)?;

        // The one in-memory array: this level's column, indexed by string.
        let _resident = tracker.hold(m as u64);
        let column: Vec<SymbolCode> = columns
            .level(l)
            .read_all()?
            .into_iter()
            .map(|v| v as SymbolCode)
            .collect();

        let mut writer = store.create(&level_name(l), ListSpec::SYMBOL)?;
        let mut order = next_numbers.reader()?;
        let mut position = 0u64;
        while let Some(number) = order.next_value()? {
            if number < 1 || number as usize > m {
                return Err(Error::bad_content(
                    next_numbers.path(),
                    position,
                    format!("string number {number} outside 1..={m}"),
                ));
            }
            writer.append(column[number as usize - 1] as i64)?;
            position += 1;
        }
        levels.push(writer.finish()?);

        if !keep_intermediates {
            numbers.delete()?;
        }
        numbers = next_numbers;
    }

    if !keep_intermediates {
        numbers.delete()?;
        for c in 0..=sigma {
            store.remove(&format!("P_{c}"))?;
        }
    }

    Ok(PartialBwtSet { levels, m })
}
