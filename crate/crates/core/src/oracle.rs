//! Brute-force reference implementation.
//!
//! Everything the streaming builder produces — the transform, the LCP
//! array, the interleave encoding, and every intermediate refinement state —
//! is recomputed here by materializing all suffixes in memory and sorting
//! them with a comparison function. Obviousness beats speed throughout: the
//! point of this module is to be trivially auditable so the pipeline can be
//! tested against it.

use std::cmp::Ordering;

use crate::ingest::{StringCollection, SymbolCode, SENTINEL};

/// One suffix of one string: the `len` trailing symbols plus the implicit
/// sentinel. `string` is the 0-based row index; `len` ranges over `0..=k`,
/// with 0 denoting the bare sentinel suffix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuffixRef {
    pub string: usize,
    pub len: usize,
}

impl SuffixRef {
    /// Character at 0-based offset `j` of this suffix's text: symbols for
    /// `j < len`, the sentinel at `j == len`, nothing beyond.
    fn char_at(self, collection: &StringCollection, j: usize) -> Option<SymbolCode> {
        if j < self.len {
            let row = collection.row(self.string);
            Some(row[row.len() - self.len + j])
        } else if j == self.len {
            Some(SENTINEL)
        } else {
            None
        }
    }

    /// The symbol immediately before this suffix in its string; the
    /// sentinel when the suffix is the whole string.
    pub fn preceding_symbol(self, collection: &StringCollection) -> SymbolCode {
        let row = collection.row(self.string);
        if self.len == row.len() {
            SENTINEL
        } else {
            row[row.len() - self.len - 1]
        }
    }
}

/// Order two suffixes by the first `p` characters of their texts (sentinel
/// smallest; a shorter text contributes only what it has), then by suffix
/// length, then by source string index.
///
/// With `p >= k` this is the plain lexicographic order of the full
/// sentinel-terminated texts, string index breaking ties between identical
/// texts.
pub fn compare_p(
    collection: &StringCollection,
    a: SuffixRef,
    b: SuffixRef,
    p: usize,
) -> Ordering {
    for j in 0..p {
        match (a.char_at(collection, j), b.char_at(collection, j)) {
            (None, None) => break,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(&y);
                }
            }
        }
    }
    a.len.cmp(&b.len).then(a.string.cmp(&b.string))
}

/// Length of the longest common prefix of two suffix texts. Matching
/// symbols count; the sentinel never does, so two copies of the same
/// length-`l` text share exactly `l`.
pub fn suffix_lcp(collection: &StringCollection, a: SuffixRef, b: SuffixRef) -> usize {
    let row_a = collection.row(a.string);
    let row_b = collection.row(b.string);
    let start_a = row_a.len() - a.len;
    let start_b = row_b.len() - b.len;
    let mut j = 0;
    while j < a.len && j < b.len && row_a[start_a + j] == row_b[start_b + j] {
        j += 1;
    }
    j
}

/// One refinement level's observable state: the suffixes in level-`p`
/// order, the interleave encoding (each suffix's length), and the LCP
/// column capped at `p`.
#[derive(Clone, Debug)]
pub struct LevelState {
    pub order: Vec<SuffixRef>,
    pub encoding: Vec<u64>,
    pub lcp: Vec<i64>,
}

fn all_suffixes(collection: &StringCollection) -> Vec<SuffixRef> {
    let mut suffixes = Vec::with_capacity(collection.total_suffixes() as usize);
    for len in 0..=collection.k() {
        for string in 0..collection.m() {
            suffixes.push(SuffixRef { string, len });
        }
    }
    suffixes
}

fn state_for_order(collection: &StringCollection, order: Vec<SuffixRef>, cap: usize) -> LevelState {
    let encoding = order.iter().map(|s| s.len as u64).collect();
    let mut lcp = Vec::with_capacity(order.len());
    for (i, suffix) in order.iter().enumerate() {
        if i == 0 {
            lcp.push(-1);
        } else {
            lcp.push(suffix_lcp(collection, order[i - 1], *suffix).min(cap) as i64);
        }
    }
    LevelState {
        order,
        encoding,
        lcp,
    }
}

/// The state after `p` refinement passes: all suffixes sorted by their
/// first `p` characters (ties by length, then string index) with the LCP
/// column capped at `p`.
pub fn oracle_p_state(collection: &StringCollection, p: usize) -> LevelState {
    let mut order = all_suffixes(collection);
    order.sort_by(|a, b| compare_p(collection, *a, *b, p));
    state_for_order(collection, order, p)
}

/// The final outputs, fully sorted.
#[derive(Clone, Debug)]
pub struct OracleOutput {
    /// Symbol preceding each suffix, in final suffix order.
    pub bwt: Vec<SymbolCode>,
    /// Uncapped LCP column, `-1` first.
    pub lcp: Vec<i64>,
    /// Final interleave encoding: each suffix's length, in final order.
    pub encoding: Vec<u64>,
}

/// Sort every suffix of the collection outright and read off the transform,
/// the LCP array, and the interleave encoding.
pub fn oracle_bwt_lcp(collection: &StringCollection) -> OracleOutput {
    let k = collection.k();
    let state = oracle_p_state(collection, k); // depth k already separates everything separable
    let bwt = state
        .order
        .iter()
        .map(|s| s.preceding_symbol(collection))
        .collect();
    let full = state_for_order(collection, state.order, usize::MAX);
    OracleOutput {
        bwt,
        lcp: full.lcp,
        encoding: full.encoding,
    }
}

/// The length-`l` suffixes alone, sorted, mapped to their preceding
/// symbols: the reference for one partial transform.
pub fn oracle_partial_bwt(collection: &StringCollection, l: usize) -> Vec<SymbolCode> {
    let mut order: Vec<SuffixRef> = (0..collection.m())
        .map(|string| SuffixRef { string, len: l })
        .collect();
    order.sort_by(|a, b| compare_p(collection, *a, *b, collection.k()));
    order
        .iter()
        .map(|s| s.preceding_symbol(collection))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{load_collection, Alphabet, InputFormat};
    use std::io::Cursor;

    fn acgt() -> Alphabet {
        Alphabet::new("ACGT").unwrap()
    }

    fn collection(text: &str) -> StringCollection {
        load_collection(Cursor::new(text), InputFormat::Lines, &acgt()).unwrap()
    }

    fn example() -> StringCollection {
        collection("TCGT\nACCT\nAACA\n")
    }

    #[test]
    fn identical_texts_order_by_string_index() {
        // The 1-suffixes of TCGT and ACCT are both "T$"; the first string
        // wins at every depth.
        let c = example();
        let a = SuffixRef { string: 0, len: 1 };
        let b = SuffixRef { string: 1, len: 1 };
        for p in 0..=6 {
            assert_eq!(compare_p(&c, a, b, p), Ordering::Less, "p = {p}");
            assert_eq!(compare_p(&c, b, a, p), Ordering::Greater, "p = {p}");
        }
    }

    #[test]
    fn shallow_ties_break_by_length_until_the_prefix_decides() {
        // "ACA$" (3-suffix of AACA) versus "AACA$" (the whole string):
        // equal 1-prefix "A", so the shorter suffix comes first at p = 1,
        // but at p = 2 "AC" > "AA" flips the order.
        let c = example();
        let aca = SuffixRef { string: 2, len: 3 };
        let aaca = SuffixRef { string: 2, len: 4 };
        assert_eq!(compare_p(&c, aca, aaca, 1), Ordering::Less);
        assert_eq!(compare_p(&c, aca, aaca, 2), Ordering::Greater);
    }

    #[test]
    fn depth_zero_orders_by_length_then_index() {
        let c = example();
        let state = oracle_p_state(&c, 0);
        assert_eq!(
            state.encoding,
            vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4],
        );
        let mut expected_lcp = vec![0i64; 15];
        expected_lcp[0] = -1;
        assert_eq!(state.lcp, expected_lcp);
    }

    #[test]
    fn sentinel_never_extends_a_common_prefix() {
        let c = example();
        // Both 1-suffixes are "T$": one matching symbol, sentinels excluded.
        let a = SuffixRef { string: 0, len: 1 };
        let b = SuffixRef { string: 1, len: 1 };
        assert_eq!(suffix_lcp(&c, a, b), 1);
        // Identical whole strings would share k; here two different ones.
        let c2 = collection("AC\nAA\n");
        let whole_0 = SuffixRef { string: 0, len: 2 };
        let whole_1 = SuffixRef { string: 1, len: 2 };
        assert_eq!(suffix_lcp(&c2, whole_0, whole_1), 1);
        // A text against itself: all symbols, not the sentinel.
        assert_eq!(suffix_lcp(&c2, whole_0, whole_0), 2);
    }

    #[test]
    fn depth_one_state_matches_the_worked_example() {
        let c = example();
        let state = oracle_p_state(&c, 1);
        assert_eq!(
            state.encoding,
            vec![0, 0, 0, 1, 3, 4, 4, 2, 2, 3, 3, 2, 1, 1, 4],
        );
        assert_eq!(
            state.lcp,
            vec![-1, 0, 0, 0, 1, 1, 1, 0, 1, 1, 1, 0, 0, 1, 1],
        );
    }

    #[test]
    fn deep_states_match_the_worked_example_and_stabilize() {
        let c = example();
        let final_encoding = vec![0, 0, 0, 1, 4, 3, 4, 2, 3, 3, 2, 2, 1, 1, 4];
        let final_lcp = vec![-1, 0, 0, 0, 1, 1, 2, 0, 1, 1, 1, 0, 0, 1, 1];
        for p in 2..=6 {
            let state = oracle_p_state(&c, p);
            assert_eq!(state.encoding, final_encoding, "p = {p}");
            assert_eq!(state.lcp, final_lcp, "p = {p}");
        }
    }

    #[test]
    fn final_outputs_match_the_worked_example() {
        let c = example();
        let out = oracle_bwt_lcp(&c);
        assert_eq!(acgt().decode(&out.bwt), "TTAC$A$AATCCGC$");
        assert_eq!(
            out.lcp,
            vec![-1, 0, 0, 0, 1, 1, 2, 0, 1, 1, 1, 0, 0, 1, 1],
        );
        assert_eq!(
            out.encoding,
            vec![0, 0, 0, 1, 4, 3, 4, 2, 3, 3, 2, 2, 1, 1, 4],
        );
    }

    #[test]
    fn single_string_outputs() {
        let c = collection("A\n");
        let out = oracle_bwt_lcp(&c);
        assert_eq!(acgt().decode(&out.bwt), "A$");
        assert_eq!(out.lcp, vec![-1, 0]);
        assert_eq!(out.encoding, vec![0, 1]);
    }

    #[test]
    fn two_strings_with_shared_prefix() {
        // AC and AA, worked out by hand: sorted suffix texts are
        // $, $, A$, AA$, AC$, C$.
        let c = collection("AC\nAA\n");
        let out = oracle_bwt_lcp(&c);
        assert_eq!(acgt().decode(&out.bwt), "CAA$$A");
        assert_eq!(out.lcp, vec![-1, 0, 0, 1, 1, 0]);
        assert_eq!(out.encoding, vec![0, 0, 1, 2, 2, 1]);
    }

    #[test]
    fn every_level_is_a_permutation_of_all_suffixes() {
        let c = example();
        for p in 0..=5 {
            let state = oracle_p_state(&c, p);
            assert_eq!(state.order.len(), c.total_suffixes() as usize);
            for len in 0..=c.k() {
                let count = state.order.iter().filter(|s| s.len == len).count();
                assert_eq!(count, c.m(), "p = {p}, level {len}");
            }
            // Capped entries never exceed the cap.
            assert!(state.lcp.iter().all(|&v| v <= p as i64));
        }
    }

    #[test]
    fn partial_transform_of_the_example() {
        let c = example();
        assert_eq!(oracle_partial_bwt(&c, 0), vec![4, 4, 1]); // T T A
        assert_eq!(oracle_partial_bwt(&c, 1), vec![2, 3, 2]); // C G C
        assert_eq!(oracle_partial_bwt(&c, 2), vec![1, 2, 2]); // A C C
        assert_eq!(oracle_partial_bwt(&c, 3), vec![1, 1, 4]); // A A T
        assert_eq!(oracle_partial_bwt(&c, 4), vec![0, 0, 0]); // $ $ $
    }
}
