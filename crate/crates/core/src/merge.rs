//! Phase two of the build: merge the per-length transforms into the final
//! transform and LCP array by repeated prefix refinement.
//!
//! The state between passes is a pair of lists over all `m * (k + 1)`
//! suffixes: an interleave encoding `I` (which suffix length each position
//! belongs to, in the current order) and an LCP column capped at the current
//! refinement depth. Pass `p` reads both in one sweep, prepends one more
//! character to every suffix by consulting the per-length transforms, and
//! scatters refined positions into per-symbol buckets whose concatenation
//! is the next state — the same trick phase one plays, lifted from string
//! numbers to interleave positions, and extended to carry LCP values along.
//!
//! The LCP values come from running minima: when symbol `c` is prepended at
//! two positions, the longest common prefix of the two extended suffixes is
//! one more than the smallest capped LCP value seen strictly after the
//! first position, clamped by the current depth. Tracking one running
//! minimum per symbol turns that into O(sigma) state.
//!
//! Passes repeat while the latest column still touches its cap (some pair
//! of suffixes is not yet separated); the first pass that stays below it
//! changes nothing and is the fixpoint.

use crate::error::{Error, Result};
use crate::ingest::{Alphabet, ColumnSet};
use crate::partial_bwt::{build_partial_bwts, PartialBwtSet};
use crate::seqlist::{
    reconstruct_interleave, ListSpec, ListStore, MultiCursor, ResidentGuard, SeqFile, Width,
};
use crate::stats::{BuildStats, PassStats};

/// Options for [`build_bwt_lcp`].
#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Keep the `N_*`, `P_*`, and bucket lists around after the build.
    pub keep_intermediates: bool,
    /// Reuse a complete `B_0 ..= B_k` set already present in the store
    /// instead of rebuilding phase one.
    pub reuse_partial: bool,
    /// Element width for string-number lists; `None` picks by collection
    /// size.
    pub index_width: Option<Width>,
}

/// The refinement state between passes: the current interleave encoding and
/// capped LCP column, stored under the fixed names `I_cur` / `L_cur`.
#[derive(Debug)]
pub struct MergeState {
    /// Interleave encoding at the current depth.
    pub encoding: SeqFile,
    /// LCP column capped at the current depth.
    pub lcp: SeqFile,
    /// Refinement depth: how many characters have been prepended so far.
    pub depth: u64,
}

impl MergeState {
    /// The depth-0 state: suffixes grouped by length (shortest first, string
    /// order within a length), so the encoding is `m` zeros, `m` ones, ...,
    /// `m` `k`s, and the LCP column is `-1` followed by zeros.
    pub fn init(m: usize, k: usize, store: &ListStore) -> Result<MergeState> {
        let mut enc = store.create("I_cur", ListSpec::level_for(k as u64))?;
        for level in 0..=k as i64 {
            for _ in 0..m {
                enc.append(level)?;
            }
        }
        let mut lcp = store.create("L_cur", ListSpec::lcp_for(k as u64))?;
        for i in 0..m as u64 * (k as u64 + 1) {
            lcp.append(if i == 0 { -1 } else { 0 })?;
        }
        Ok(MergeState {
            encoding: enc.finish()?,
            lcp: lcp.finish()?,
            depth: 0,
        })
    }
}

/// Running minimum of capped LCP values per non-sentinel symbol, reset to
/// "infinity" (depth cap + 1, larger than any real value) whenever the
/// symbol is emitted. A minimum of -1 means the symbol has not occurred yet.
struct MinTracker {
    minima: Vec<i64>,
    infinity: i64,
    _resident: ResidentGuard,
}

impl MinTracker {
    fn new(sigma: usize, k: u64, store: &ListStore) -> MinTracker {
        MinTracker {
            minima: vec![-1; sigma + 1],
            infinity: k as i64 + 1,
            _resident: store.tracker().hold(sigma as u64),
        }
    }

    /// Fold the LCP value at the current position into every symbol's
    /// minimum.
    fn observe(&mut self, lcp: i64) {
        for min in &mut self.minima[1..] {
            if lcp < *min {
                *min = lcp;
            }
        }
    }

    /// The LCP value to append for an occurrence of `c`, consuming the
    /// minimum: one more than the minimum since `c`'s previous occurrence,
    /// or the seed 0 the first time `c` appears.
    fn emit(&mut self, c: usize) -> i64 {
        let value = if self.minima[c] >= 0 {
            self.minima[c] + 1
        } else {
            0
        };
        self.minima[c] = self.infinity;
        value
    }
}

/// Names for the per-symbol bucket families of a refinement pass.
fn order_bucket_name(c: usize) -> String {
    format!("IB_{c}")
}

fn lcp_bucket_name(c: usize) -> String {
    format!("LB_{c}")
}

/// One refinement pass over the order only (no LCP column): read the
/// current encoding, prepend one character to every suffix through the
/// per-length transform cursors, and bucket the refined positions by that
/// character. Returns the next encoding, written to `out_name`.
///
/// The sentinel bucket is fixed: prepending the sentinel means the suffix
/// is a whole string, and those occupy the length-0 slots of the next
/// order. Positions whose prepended character is the sentinel produce
/// nothing else, which is exactly what keeps every level populated by `m`
/// positions forever.
pub fn interleave_pass(
    encoding: &SeqFile,
    bwt: &PartialBwtSet,
    sigma: usize,
    store: &ListStore,
    out_name: &str,
) -> Result<SeqFile> {
    let (next, _) = scatter_pass(encoding, None, bwt, sigma, store, out_name, None)?;
    Ok(next)
}

/// One refinement pass carrying both the order and the LCP column.
/// Consumes the state, writes `I_next` / `L_next`, promotes them to
/// `I_cur` / `L_cur`, and reports the pass counters.
pub fn refine_pass(
    state: MergeState,
    bwt: &PartialBwtSet,
    sigma: usize,
    store: &ListStore,
) -> Result<(MergeState, PassStats)> {
    let depth = state.depth;
    let (next_encoding, counters) = scatter_pass(
        &state.encoding,
        Some(&state.lcp),
        bwt,
        sigma,
        store,
        "I_next",
        Some("L_next"),
    )?;
    let (next_lcp, stats) = counters.expect("LCP requested");
    // Promote the double buffer; the consumed state's files are replaced.
    let encoding = store.rename(next_encoding, "I_cur")?;
    let lcp = store.rename(next_lcp, "L_cur")?;
    Ok((
        MergeState {
            encoding,
            lcp,
            depth: depth + 1,
        },
        stats,
    ))
}

/// Shared body of [`interleave_pass`] and [`refine_pass`]: one sweep over
/// the encoding (and optionally the LCP column), scattering into buckets,
/// then one concatenation per output family.
fn scatter_pass(
    encoding: &SeqFile,
    lcp: Option<&SeqFile>,
    bwt: &PartialBwtSet,
    sigma: usize,
    store: &ListStore,
    out_encoding: &str,
    out_lcp: Option<&str>,
) -> Result<(SeqFile, Option<(SeqFile, PassStats)>)> {
    let m = bwt.m() as u64;
    let k = bwt.k() as u64;
    let total = m * (k + 1);
    if encoding.len() != total {
        return Err(Error::ListMismatch {
            detail: format!(
                "encoding holds {} elements, the transforms imply {total}",
                encoding.len(),
            ),
        });
    }
    if let Some(lcp) = lcp {
        if lcp.len() != total {
            return Err(Error::ListMismatch {
                detail: format!(
                    "LCP column holds {} elements, the transforms imply {total}",
                    lcp.len(),
                ),
            });
        }
    }

    let enc_spec = ListSpec::level_for(k);
    let lcp_spec = ListSpec::lcp_for(k);

    // Fixed sentinel buckets: the next order starts with the m whole-string
    // suffixes, whose refined length slot is 0 and whose capped LCP column
    // is -1 followed by zeros.
    let mut order_buckets = Vec::with_capacity(sigma + 1);
    {
        let mut w = store.create(&order_bucket_name(0), enc_spec)?;
        for _ in 0..m {
            w.append(0)?;
        }
        order_buckets.push(w);
    }
    for c in 1..=sigma {
        order_buckets.push(store.create(&order_bucket_name(c), enc_spec)?);
    }
    let mut writes_encoding = m;

    let mut lcp_buckets = Vec::new();
    let mut writes_lcp = 0;
    if out_lcp.is_some() {
        let mut w = store.create(&lcp_bucket_name(0), lcp_spec)?;
        for i in 0..m {
            w.append(if i == 0 { -1 } else { 0 })?;
        }
        lcp_buckets.push(w);
        for c in 1..=sigma {
            lcp_buckets.push(store.create(&lcp_bucket_name(c), lcp_spec)?);
        }
        writes_lcp = m;
    }

    let mut cursor = MultiCursor::new(bwt.levels())?;
    let mut enc_reader = encoding.reader()?;
    let mut lcp_reader = match lcp {
        Some(lcp) => Some(lcp.reader()?),
        None => None,
    };
    let mut minima = MinTracker::new(sigma, k, store);
    let mut pass_max = 0i64;

    for position in 0..total {
        let level = enc_reader
            .next_value()?
            .expect("length checked before the sweep");
        if level < 0 || level as u64 > k {
            return Err(Error::bad_content(
                encoding.path(),
                position,
                format!("level {level} outside 0..={k}"),
            ));
        }
        let symbol = cursor.take(level as usize)?.ok_or_else(|| {
            Error::bad_content(
                encoding.path(),
                position,
                format!(
                    "level {level} named more than its {} times",
                    bwt.level(level as usize).len(),
                ),
            )
        })?;
        if symbol < 0 || symbol as usize > sigma {
            return Err(Error::bad_content(
                bwt.level(level as usize).path(),
                cursor.consumed(level as usize) - 1,
                format!("symbol code {symbol} exceeds the alphabet ({sigma} symbols)"),
            ));
        }
        let c = symbol as usize;
        if c != 0 {
            // Prepending a real character moves the suffix to that
            // character's bucket, one level up.
            order_buckets[c].append(level + 1)?;
            writes_encoding += 1;
        }
        if let Some(reader) = lcp_reader.as_mut() {
            let lcp_value = reader
                .next_value()?
                .expect("length checked before the sweep");
            minima.observe(lcp_value);
            if c != 0 {
                let refined = minima.emit(c);
                lcp_buckets[c].append(refined)?;
                writes_lcp += 1;
                if refined > pass_max {
                    pass_max = refined;
                }
            }
        }
    }
    if !cursor.fully_consumed() {
        return Err(Error::bad_content(
            encoding.path(),
            total,
            "encoding does not name every transform position".to_string(),
        ));
    }

    let sealed_order: Vec<SeqFile> = order_buckets
        .into_iter()
        .map(|w| w.finish())
        .collect::<Result<_>>()?;
    let refs: Vec<&SeqFile> = sealed_order.iter().collect();
    let next_encoding = store.concat(out_encoding, enc_spec, &refs)?;

    let lcp_out = match out_lcp {
        Some(name) => {
            let sealed_lcp: Vec<SeqFile> = lcp_buckets
                .into_iter()
                .map(|w| w.finish())
                .collect::<Result<_>>()?;
            let refs: Vec<&SeqFile> = sealed_lcp.iter().collect();
            let next_lcp = store.concat(name, lcp_spec, &refs)?;
            let stats = PassStats {
                reads_encoding: total,
                reads_lcp: total,
                reads_bwt: total,
                writes_encoding,
                writes_lcp,
                max_lcp: pass_max,
            };
            Some((next_lcp, stats))
        }
        None => None,
    };
    Ok((next_encoding, lcp_out))
}

/// Output of a complete build.
#[derive(Debug)]
pub struct BuildOutput {
    /// The transform, as symbol codes (`bwt`).
    pub bwt: SeqFile,
    /// The final LCP column (`lcp`), signed, `-1` first.
    pub lcp: SeqFile,
    /// The final interleave encoding (`I_cur`).
    pub encoding: SeqFile,
    /// The per-length transforms (kept for verification and reuse).
    pub partial: PartialBwtSet,
    /// Counters for the whole build.
    pub stats: BuildStats,
}

/// Build the transform and LCP array for `columns`: phase one (or reuse of
/// its artifacts), then refinement passes until the LCP column stops
/// touching its cap, then one interleave reconstruction for the transform
/// itself.
pub fn build_bwt_lcp(
    columns: &ColumnSet,
    alphabet: &Alphabet,
    store: &ListStore,
    options: &BuildOptions,
) -> Result<BuildOutput> {
    let m = columns.m();
    let k = columns.k();
    let sigma = alphabet.sigma();
    let index_spec = match options.index_width {
        Some(width) => {
            let spec = ListSpec {
                width,
                signed: false,
            };
            if (1u64 << (8 * width.bytes().min(7))) <= m as u64 && width != Width::W8 {
                return Err(Error::invalid_input(
                    "configuration",
                    format!("{} strings do not fit {}-byte numbers", m, width.bytes()),
                ));
            }
            spec
        }
        None => ListSpec::index_for(m as u64),
    };

    let partial = if options.reuse_partial && PartialBwtSet::present_in(store, k) {
        let existing = PartialBwtSet::open_existing(store, k)?;
        if existing.m() != m {
            return Err(Error::ListMismatch {
                detail: format!(
                    "existing transforms cover {} strings, the input has {m}",
                    existing.m(),
                ),
            });
        }
        existing
    } else {
        build_partial_bwts(columns, alphabet, store, index_spec, options.keep_intermediates)?
    };

    let mut state = MergeState::init(m, k, store)?;
    let mut pass_details: Vec<PassStats> = Vec::new();
    loop {
        let (next, stats) = refine_pass(state, &partial, sigma, store)?;
        state = next;
        pass_details.push(stats);
        let depth_reached = pass_details.len() as i64;
        if stats.max_lcp < depth_reached {
            break; // the column stayed below its cap: nothing left to split
        }
        if depth_reached as usize > k {
            // Depth k already orders everything orderable; only corrupted
            // transforms can get here. Stop and let verification complain.
            break;
        }
    }

    let out = store.create("bwt", ListSpec::SYMBOL)?;
    let bwt = reconstruct_interleave(&state.encoding, partial.levels(), out)?;
    let lcp = store.rename(state.lcp, "lcp")?;

    if !options.keep_intermediates {
        for c in 0..=sigma {
            store.remove(&order_bucket_name(c))?;
            store.remove(&lcp_bucket_name(c))?;
        }
    }

    let tracker = store.tracker();
    let stats = BuildStats {
        m: m as u64,
        k: k as u64,
        sigma: sigma as u64,
        passes: pass_details.len() as u64,
        max_lcp: pass_details.last().map(|p| p.max_lcp).unwrap_or(0),
        bytes_read: tracker.bytes_read(),
        bytes_written: tracker.bytes_written(),
        peak_resident_elements: tracker.peak_resident_elements(),
        pass_details,
    };

    Ok(BuildOutput {
        bwt,
        lcp,
        encoding: state.encoding,
        partial,
        stats,
    })
}
