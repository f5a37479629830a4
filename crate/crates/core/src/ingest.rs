//! Input handling: alphabets, string collections, and the column lists the
//! builder scans.
//!
//! A collection is `m` strings of one common length `k` over a small ordered
//! alphabet. Internally every character becomes an integer code; code 0 is
//! the sentinel that implicitly terminates each string and sorts below
//! everything else. The builder never walks the strings directly — it reads
//! the collection column by column, from the last character towards the
//! first, so ingest's main job is to lay those columns out as lists.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::seqlist::{ListSpec, ListStore, SeqFile};

/// Integer code of one alphabet character. Code 0 is reserved for the
/// sentinel.
pub type SymbolCode = u8;

/// Code of the sentinel terminator: smaller than every alphabet symbol and
/// never present inside an input string.
pub const SENTINEL: SymbolCode = 0;

/// Character used to display the sentinel.
pub const SENTINEL_CHAR: u8 = b'$';

/// An ordered alphabet. The declaration order of the characters defines the
/// collation: code 1 is the first declared character, code `sigma` the last,
/// and the sentinel (code 0) sorts below all of them.
#[derive(Clone, Debug)]
pub struct Alphabet {
    chars: Vec<u8>,
    code_of: [u8; 256],
}

impl Alphabet {
    /// Build an alphabet from its characters in collation order. The
    /// sentinel is implicit and must not be listed.
    pub fn new(chars: &str) -> Result<Alphabet> {
        let bytes = chars.as_bytes();
        if bytes.is_empty() {
            return Err(Error::invalid_input(
                "alphabet",
                "at least one character is required",
            ));
        }
        if bytes.len() > 255 {
            return Err(Error::invalid_input(
                "alphabet",
                format!("{} characters exceed the supported 255", bytes.len()),
            ));
        }
        let mut code_of = [0u8; 256];
        for (i, &b) in bytes.iter().enumerate() {
            if b == SENTINEL_CHAR {
                return Err(Error::invalid_input(
                    "alphabet",
                    "'$' is the sentinel and cannot be declared",
                ));
            }
            if code_of[b as usize] != 0 {
                return Err(Error::invalid_input(
                    "alphabet",
                    format!("character {:?} is declared twice", b as char),
                ));
            }
            code_of[b as usize] = (i + 1) as u8;
        }
        Ok(Alphabet {
            chars: bytes.to_vec(),
            code_of,
        })
    }

    /// Number of non-sentinel symbols.
    pub fn sigma(&self) -> usize {
        self.chars.len()
    }

    /// Code of `ch`, if it is in the alphabet. The sentinel character is not
    /// accepted: it never appears in input.
    pub fn code_of(&self, ch: u8) -> Option<SymbolCode> {
        match self.code_of[ch as usize] {
            0 => None,
            code => Some(code),
        }
    }

    /// Character for a code; the sentinel renders as `$`.
    pub fn char_of(&self, code: SymbolCode) -> u8 {
        if code == SENTINEL {
            SENTINEL_CHAR
        } else {
            self.chars[code as usize - 1]
        }
    }

    /// Render a slice of codes as text, sentinels included.
    pub fn decode(&self, codes: &[SymbolCode]) -> String {
        codes.iter().map(|&c| self.char_of(c) as char).collect()
    }
}

/// Input file layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// One string per line; LF or CRLF endings.
    Lines,
    /// FASTA: `>`-headers name records, sequence lines concatenate, and
    /// lowercase letters are upcased before coding.
    Fasta,
}

/// An in-memory collection of `m` strings, all of length `k`, as symbol
/// codes in row-major order.
#[derive(Clone, Debug)]
pub struct StringCollection {
    m: usize,
    k: usize,
    symbols: Vec<SymbolCode>,
    source_ids: Vec<String>,
}

impl StringCollection {
    /// Assemble a collection from pre-coded rows. Rows must be non-empty,
    /// of one common length, and free of sentinel codes.
    pub fn from_rows(rows: Vec<Vec<SymbolCode>>, source_ids: Vec<String>) -> Result<StringCollection> {
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        debug_assert_eq!(rows.len(), source_ids.len());
        let k = rows[0].len();
        if k == 0 {
            return Err(Error::invalid_input(
                source_ids[0].clone(),
                "empty string",
            ));
        }
        let mut symbols = Vec::with_capacity(rows.len() * k);
        for (row, id) in rows.iter().zip(&source_ids) {
            if row.len() != k {
                return Err(Error::invalid_input(
                    id.clone(),
                    format!("length {} differs from the first string's {k}", row.len()),
                ));
            }
            if row.contains(&SENTINEL) {
                return Err(Error::invalid_input(id.clone(), "contains the sentinel code"));
            }
            symbols.extend_from_slice(row);
        }
        Ok(StringCollection {
            m: rows.len(),
            k,
            symbols,
            source_ids,
        })
    }

    /// Number of strings.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Common string length.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Total number of suffixes, sentinel suffixes included: `m * (k + 1)`.
    pub fn total_suffixes(&self) -> u64 {
        self.m as u64 * (self.k as u64 + 1)
    }

    /// Codes of string `i` (0-based).
    pub fn row(&self, i: usize) -> &[SymbolCode] {
        &self.symbols[i * self.k..(i + 1) * self.k]
    }

    /// Per-string labels: line numbers or FASTA headers.
    pub fn source_ids(&self) -> &[String] {
        &self.source_ids
    }
}

/// Parse a collection out of `input`, validating every character against
/// `alphabet` and every length against the first string's.
pub fn load_collection(
    input: impl BufRead,
    format: InputFormat,
    alphabet: &Alphabet,
) -> Result<StringCollection> {
    match format {
        InputFormat::Lines => load_lines(input, alphabet),
        InputFormat::Fasta => load_fasta(input, alphabet),
    }
}

fn load_lines(input: impl BufRead, alphabet: &Alphabet) -> Result<StringCollection> {
    let mut rows = Vec::new();
    let mut ids = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let record = format!("line {}", idx + 1);
        let line = line.map_err(|e| Error::io(&record, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        rows.push(code_row(line.as_bytes(), &record, alphabet, false)?);
        ids.push(record);
    }
    StringCollection::from_rows(rows, ids)
}

fn load_fasta(input: impl BufRead, alphabet: &Alphabet) -> Result<StringCollection> {
    let mut rows: Vec<Vec<SymbolCode>> = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(format!("line {lineno}"), e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if let Some(header) = line.strip_prefix('>') {
            rows.push(Vec::new());
            ids.push(format!("record {:?}", header.trim()));
        } else if !line.is_empty() {
            let row = match rows.last_mut() {
                Some(row) => row,
                None => {
                    return Err(Error::invalid_input(
                        format!("line {lineno}"),
                        "sequence data before the first '>' header",
                    ))
                }
            };
            let record = ids.last().unwrap().clone();
            row.extend(code_row(line.as_bytes(), &record, alphabet, true)?);
        }
    }
    StringCollection::from_rows(rows, ids)
}

fn code_row(
    bytes: &[u8],
    record: &str,
    alphabet: &Alphabet,
    upcase: bool,
) -> Result<Vec<SymbolCode>> {
    let mut row = Vec::with_capacity(bytes.len());
    for &b in bytes {
        let b = if upcase { b.to_ascii_uppercase() } else { b };
        match alphabet.code_of(b) {
            Some(code) => row.push(code),
            None => {
                return Err(Error::invalid_input(
                    record,
                    format!("character {:?} is not in the alphabet", b as char),
                ))
            }
        }
    }
    Ok(row)
}

/// The `k + 1` column lists feeding the builder. Column `l` holds, for every
/// string in input order, the symbol `l` positions from the string's end;
/// column `k` is all sentinels. In other words, column `l` is the symbol
/// that precedes each string's length-`l` suffix.
#[derive(Debug)]
pub struct ColumnSet {
    levels: Vec<SeqFile>,
    m: usize,
    k: usize,
}

impl ColumnSet {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn level(&self, l: usize) -> &SeqFile {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[SeqFile] {
        &self.levels
    }
}

/// Write the collection out as columns `T_0 .. T_k` in a single pass over
/// the rows, one open writer per column.
pub fn compute_columns(collection: &StringCollection, store: &ListStore) -> Result<ColumnSet> {
    let m = collection.m();
    let k = collection.k();
    let mut writers = Vec::with_capacity(k + 1);
    for l in 0..=k {
        writers.push(store.create(&format!("T_{l}"), ListSpec::SYMBOL)?);
    }
    for i in 0..m {
        let row = collection.row(i);
        for (l, writer) in writers.iter_mut().enumerate() {
            let symbol = if l == k { SENTINEL } else { row[k - l - 1] };
            writer.append(symbol as i64)?;
        }
    }
    let mut levels = Vec::with_capacity(k + 1);
    for writer in writers {
        levels.push(writer.finish()?);
    }
    Ok(ColumnSet { levels, m, k })
}
