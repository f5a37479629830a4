//! Disk-backed sequential lists of fixed-width integers.
//!
//! Every array the builder touches lives on disk as a run of little-endian
//! fixed-width values, with a one-line text manifest (`<name>.meta`) next to
//! the data (`<name>.bin`). A list is append-only while it is being written,
//! sealed once finished, and afterwards read strictly front to back. All
//! list traffic flows through these handles, so they also carry the
//! instrumentation: byte counters, a backward-seek detector, and a gauge of
//! how many elements the algorithms currently hold in memory.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default I/O buffer per open list: 1 MiB.
pub const DEFAULT_BUFFER_BYTES: usize = 1 << 20;

/// Bytes per element. Lists never mix widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Width {
    W1,
    W4,
    W8,
}

impl Width {
    pub fn bytes(self) -> usize {
        match self {
            Width::W1 => 1,
            Width::W4 => 4,
            Width::W8 => 8,
        }
    }

    pub fn from_bytes(bytes: u8) -> Option<Width> {
        match bytes {
            1 => Some(Width::W1),
            4 => Some(Width::W4),
            8 => Some(Width::W8),
            _ => None,
        }
    }
}

/// Element encoding of a list: byte width plus signedness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ListSpec {
    pub width: Width,
    pub signed: bool,
}

impl ListSpec {
    /// Symbol lists: one unsigned byte per element (alphabets are small).
    pub const SYMBOL: ListSpec = ListSpec {
        width: Width::W1,
        signed: false,
    };

    /// String-number lists: 4 bytes unless the collection needs more.
    pub fn index_for(m: u64) -> ListSpec {
        let width = if m > u32::MAX as u64 {
            Width::W8
        } else {
            Width::W4
        };
        ListSpec {
            width,
            signed: false,
        }
    }

    /// Level lists (values 0..=k): the smallest unsigned width that holds k.
    pub fn level_for(k: u64) -> ListSpec {
        let width = if k <= u8::MAX as u64 {
            Width::W1
        } else if k <= u32::MAX as u64 {
            Width::W4
        } else {
            Width::W8
        };
        ListSpec {
            width,
            signed: false,
        }
    }

    /// LCP lists (values -1..=k): the smallest signed width that holds k.
    pub fn lcp_for(k: u64) -> ListSpec {
        let width = if k <= i8::MAX as u64 {
            Width::W1
        } else if k <= i32::MAX as u64 {
            Width::W4
        } else {
            Width::W8
        };
        ListSpec {
            width,
            signed: true,
        }
    }

    fn range(self) -> (i64, i64) {
        match (self.width, self.signed) {
            (Width::W1, false) => (0, u8::MAX as i64),
            (Width::W4, false) => (0, u32::MAX as i64),
            // Unsigned 8-byte values are stored as non-negative i64; the
            // upper half of the u64 range is unreachable through this API.
            (Width::W8, false) => (0, i64::MAX),
            (Width::W1, true) => (i8::MIN as i64, i8::MAX as i64),
            (Width::W4, true) => (i32::MIN as i64, i32::MAX as i64),
            (Width::W8, true) => (i64::MIN, i64::MAX),
        }
    }

    fn encode(self, value: i64, out: &mut [u8; 8]) -> Option<usize> {
        let (lo, hi) = self.range();
        if value < lo || value > hi {
            return None;
        }
        let n = self.width.bytes();
        out[..n].copy_from_slice(&value.to_le_bytes()[..n]);
        Some(n)
    }

    fn decode(self, bytes: &[u8]) -> i64 {
        match (self.width, self.signed) {
            (Width::W1, false) => bytes[0] as i64,
            (Width::W1, true) => bytes[0] as i8 as i64,
            (Width::W4, false) => u32::from_le_bytes(bytes[..4].try_into().unwrap()) as i64,
            (Width::W4, true) => i32::from_le_bytes(bytes[..4].try_into().unwrap()) as i64,
            (Width::W8, _) => i64::from_le_bytes(bytes[..8].try_into().unwrap()),
        }
    }
}

/// Shared instrumentation: data-file byte counters, a backward-seek
/// detector, and a gauge of elements the algorithms hold in memory.
///
/// Byte counters cover list data files only; manifests are bookkeeping and
/// stay out of the numbers so that the traffic of two identical builds is
/// identical byte for byte.
#[derive(Debug, Default)]
pub struct Tracker {
    bytes_read: AtomicU64,
    bytes_written: AtomicU64,
    backward_seeks: AtomicU64,
    resident: AtomicU64,
    resident_peak: AtomicU64,
}

impl Tracker {
    pub fn bytes_read(&self) -> u64 {
        self.bytes_read.load(Ordering::Relaxed)
    }

    pub fn bytes_written(&self) -> u64 {
        self.bytes_written.load(Ordering::Relaxed)
    }

    /// Number of times a file handle moved to a lower offset. Sequential
    /// builds must leave this at zero.
    pub fn backward_seeks(&self) -> u64 {
        self.backward_seeks.load(Ordering::Relaxed)
    }

    /// Elements currently held in memory by algorithm data structures.
    pub fn resident_elements(&self) -> u64 {
        self.resident.load(Ordering::Relaxed)
    }

    /// High-water mark of [`Tracker::resident_elements`].
    pub fn peak_resident_elements(&self) -> u64 {
        self.resident_peak.load(Ordering::Relaxed)
    }

    /// Account for `count` elements being held in memory until the returned
    /// guard drops.
    pub fn hold(self: &Arc<Self>, count: u64) -> ResidentGuard {
        let now = self.resident.fetch_add(count, Ordering::Relaxed) + count;
        self.resident_peak.fetch_max(now, Ordering::Relaxed);
        ResidentGuard {
            tracker: Arc::clone(self),
            count,
        }
    }

    fn add_read(&self, n: u64) {
        self.bytes_read.fetch_add(n, Ordering::Relaxed);
    }

    fn add_written(&self, n: u64) {
        self.bytes_written.fetch_add(n, Ordering::Relaxed);
    }

    fn note_backward_seek(&self) {
        self.backward_seeks.fetch_add(1, Ordering::Relaxed);
    }
}

/// RAII token for elements held in memory; releases its count on drop.
#[derive(Debug)]
pub struct ResidentGuard {
    tracker: Arc<Tracker>,
    count: u64,
}

impl Drop for ResidentGuard {
    fn drop(&mut self) {
        self.tracker.resident.fetch_sub(self.count, Ordering::Relaxed);
    }
}

/// File handle that feeds the tracker and flags any backward movement.
struct TrackedFile {
    file: File,
    tracker: Arc<Tracker>,
    pos: u64,
}

impl TrackedFile {
    fn create(path: &Path, tracker: Arc<Tracker>) -> Result<TrackedFile> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(TrackedFile {
            file,
            tracker,
            pos: 0,
        })
    }

    fn open(path: &Path, tracker: Arc<Tracker>) -> Result<TrackedFile> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(TrackedFile {
            file,
            tracker,
            pos: 0,
        })
    }
}

impl Read for TrackedFile {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.file.read(buf)?;
        self.pos += n as u64;
        self.tracker.add_read(n as u64);
        Ok(n)
    }
}

impl Write for TrackedFile {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.file.write(buf)?;
        self.pos += n as u64;
        self.tracker.add_written(n as u64);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.file.flush()
    }
}

impl Seek for TrackedFile {
    fn seek(&mut self, target: SeekFrom) -> io::Result<u64> {
        let new = self.file.seek(target)?;
        if new < self.pos {
            self.tracker.note_backward_seek();
        }
        self.pos = new;
        Ok(new)
    }
}

/// A directory of lists sharing one tracker and one buffer configuration.
///
/// Cloning is cheap; clones refer to the same directory and tracker.
#[derive(Clone, Debug)]
pub struct ListStore {
    inner: Arc<StoreInner>,
}

#[derive(Debug)]
struct StoreInner {
    dir: PathBuf,
    buffer_bytes: usize,
    tracker: Arc<Tracker>,
}

impl ListStore {
    /// Open (creating if needed) a store rooted at `dir`.
    pub fn open(dir: impl Into<PathBuf>, buffer_bytes: usize) -> Result<ListStore> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(ListStore {
            inner: Arc::new(StoreInner {
                dir,
                buffer_bytes: buffer_bytes.max(1),
                tracker: Arc::new(Tracker::default()),
            }),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.inner.dir
    }

    pub fn tracker(&self) -> &Arc<Tracker> {
        &self.inner.tracker
    }

    pub fn data_path(&self, name: &str) -> PathBuf {
        self.inner.dir.join(format!("{name}.bin"))
    }

    pub fn meta_path(&self, name: &str) -> PathBuf {
        self.inner.dir.join(format!("{name}.meta"))
    }

    /// True if `name` has both a data file and a manifest on disk.
    pub fn contains(&self, name: &str) -> bool {
        self.data_path(name).exists() && self.meta_path(name).exists()
    }

    /// Start a new list called `name`, truncating any previous incarnation.
    pub fn create(&self, name: &str, spec: ListSpec) -> Result<SeqWriter> {
        let path = self.data_path(name);
        let file = TrackedFile::create(&path, Arc::clone(&self.inner.tracker))?;
        let resident = self.inner.tracker.hold(1);
        Ok(SeqWriter {
            out: BufWriter::with_capacity(self.inner.buffer_bytes, file),
            spec,
            len: 0,
            name: name.to_string(),
            path,
            store: self.clone(),
            _resident: resident,
        })
    }

    /// Open a sealed list by name, validating its manifest against the data
    /// file on disk.
    pub fn open_sealed(&self, name: &str) -> Result<SeqFile> {
        let meta_path = self.meta_path(name);
        let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let manifest = Manifest::parse(&text).ok_or_else(|| Error::Manifest {
            path: meta_path.clone(),
            detail: format!("cannot parse {text:?}"),
        })?;
        let path = self.data_path(name);
        let actual = fs::metadata(&path).map_err(|e| Error::io(&path, e))?.len();
        let expected = manifest.len * manifest.spec.width.bytes() as u64;
        if actual != expected {
            return Err(Error::Manifest {
                path: meta_path,
                detail: format!(
                    "data file holds {actual} bytes, manifest implies {expected} \
                     ({} elements of {} bytes)",
                    manifest.len,
                    manifest.spec.width.bytes(),
                ),
            });
        }
        Ok(SeqFile {
            name: name.to_string(),
            path,
            spec: manifest.spec,
            len: manifest.len,
            store: self.clone(),
        })
    }

    /// Concatenate sealed lists into a new list `name` by raw byte append;
    /// elements are never re-parsed. All parts must share `spec`.
    pub fn concat(&self, name: &str, spec: ListSpec, parts: &[&SeqFile]) -> Result<SeqFile> {
        for part in parts {
            if part.spec != spec {
                return Err(Error::ListMismatch {
                    detail: format!(
                        "cannot concatenate {}: element encoding differs from target",
                        part.path.display(),
                    ),
                });
            }
        }
        let path = self.data_path(name);
        let mut out = TrackedFile::create(&path, Arc::clone(&self.inner.tracker))?;
        let mut len = 0u64;
        for part in parts {
            let mut src = TrackedFile::open(&part.path, Arc::clone(&self.inner.tracker))?;
            io::copy(&mut src, &mut out).map_err(|e| Error::io(&path, e))?;
            len += part.len;
        }
        out.flush().map_err(|e| Error::io(&path, e))?;
        drop(out);
        self.write_manifest(name, spec, len)?;
        Ok(SeqFile {
            name: name.to_string(),
            path,
            spec,
            len,
            store: self.clone(),
        })
    }

    /// Move a sealed list to a new name, replacing whatever held that name.
    pub fn rename(&self, file: SeqFile, name: &str) -> Result<SeqFile> {
        let data = self.data_path(name);
        let meta = self.meta_path(name);
        fs::rename(&file.path, &data).map_err(|e| Error::io(&data, e))?;
        fs::rename(file.store.meta_path(&file.name), &meta).map_err(|e| Error::io(&meta, e))?;
        Ok(SeqFile {
            name: name.to_string(),
            path: data,
            spec: file.spec,
            len: file.len,
            store: self.clone(),
        })
    }

    /// Remove a list by name if present. Returns whether anything existed.
    pub fn remove(&self, name: &str) -> Result<bool> {
        let mut existed = false;
        for path in [self.data_path(name), self.meta_path(name)] {
            match fs::remove_file(&path) {
                Ok(()) => existed = true,
                Err(e) if e.kind() == io::ErrorKind::NotFound => {}
                Err(e) => return Err(Error::io(&path, e)),
            }
        }
        Ok(existed)
    }

    fn write_manifest(&self, name: &str, spec: ListSpec, len: u64) -> Result<()> {
        let path = self.meta_path(name);
        let text = format!(
            "width={} len={} signed={}\n",
            spec.width.bytes(),
            len,
            spec.signed as u8,
        );
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    fn buffer_bytes(&self) -> usize {
        self.inner.buffer_bytes
    }
}

struct Manifest {
    spec: ListSpec,
    len: u64,
}

impl Manifest {
    fn parse(text: &str) -> Option<Manifest> {
        let mut width = None;
        let mut len = None;
        let mut signed = None;
        for field in text.split_whitespace() {
            let (key, value) = field.split_once('=')?;
            match key {
                "width" => width = Width::from_bytes(value.parse().ok()?),
                "len" => len = value.parse::<u64>().ok(),
                "signed" => {
                    signed = match value {
                        "0" => Some(false),
                        "1" => Some(true),
                        _ => None,
                    }
                }
                _ => return None,
            }
        }
        Some(Manifest {
            spec: ListSpec {
                width: width?,
                signed: signed?,
            },
            len: len?,
        })
    }
}

/// Append-only handle to a list being written.
pub struct SeqWriter {
    out: BufWriter<TrackedFile>,
    spec: ListSpec,
    len: u64,
    name: String,
    path: PathBuf,
    store: ListStore,
    _resident: ResidentGuard,
}

impl SeqWriter {
    pub fn append(&mut self, value: i64) -> Result<()> {
        let mut buf = [0u8; 8];
        let n = self
            .spec
            .encode(value, &mut buf)
            .ok_or_else(|| Error::ValueOutOfRange {
                path: self.path.clone(),
                value,
                width: self.spec.width.bytes() as u8,
                signed: self.spec.signed,
            })?;
        self.out
            .write_all(&buf[..n])
            .map_err(|e| Error::io(&self.path, e))?;
        self.len += 1;
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spec(&self) -> ListSpec {
        self.spec
    }

    /// Flush, write the manifest, and seal the list.
    pub fn finish(mut self) -> Result<SeqFile> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        self.store.write_manifest(&self.name, self.spec, self.len)?;
        Ok(SeqFile {
            name: self.name,
            path: self.path,
            spec: self.spec,
            len: self.len,
            store: self.store,
        })
    }
}

/// A sealed list: immutable bytes on disk plus their manifest.
#[derive(Clone, Debug)]
pub struct SeqFile {
    name: String,
    path: PathBuf,
    spec: ListSpec,
    len: u64,
    store: ListStore,
}

impl SeqFile {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn spec(&self) -> ListSpec {
        self.spec
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Start a forward-only scan over the elements.
    pub fn reader(&self) -> Result<SeqReader> {
        let tracker = Arc::clone(self.store.tracker());
        let file = TrackedFile::open(&self.path, Arc::clone(&tracker))?;
        let resident = tracker.hold(1);
        Ok(SeqReader {
            input: BufReader::with_capacity(self.store.buffer_bytes(), file),
            spec: self.spec,
            remaining: self.len,
            path: self.path.clone(),
            _resident: resident,
        })
    }

    /// Read the whole list into memory. Convenience for small lists and
    /// tests; the builder itself streams.
    pub fn read_all(&self) -> Result<Vec<i64>> {
        let mut reader = self.reader()?;
        let mut values = Vec::with_capacity(self.len.min(1 << 20) as usize);
        while let Some(v) = reader.next_value()? {
            values.push(v);
        }
        Ok(values)
    }

    /// Remove both the data file and the manifest.
    pub fn delete(self) -> Result<()> {
        self.store.remove(&self.name)?;
        Ok(())
    }
}

/// Forward-only cursor over a sealed list. Yields every element exactly
/// once, in append order.
pub struct SeqReader {
    input: BufReader<TrackedFile>,
    spec: ListSpec,
    remaining: u64,
    path: PathBuf,
    _resident: ResidentGuard,
}

impl SeqReader {
    /// Next element, or `None` once the list is exhausted.
    pub fn next_value(&mut self) -> Result<Option<i64>> {
        if self.remaining == 0 {
            return Ok(None);
        }
        let mut buf = [0u8; 8];
        let n = self.spec.width.bytes();
        self.input
            .read_exact(&mut buf[..n])
            .map_err(|e| Error::io(&self.path, e))?;
        self.remaining -= 1;
        Ok(Some(self.spec.decode(&buf)))
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }
}

/// Independent forward cursors over a family of lists.
///
/// `take(q)` yields the next unread element of component `q`; each component
/// advances on its own, which is exactly the access pattern interleave
/// reconstruction and the refinement passes need.
pub struct MultiCursor {
    cursors: Vec<SeqReader>,
    consumed: Vec<u64>,
    _resident: ResidentGuard,
}

impl MultiCursor {
    pub fn new(files: &[SeqFile]) -> Result<MultiCursor> {
        let mut cursors = Vec::with_capacity(files.len());
        for file in files {
            cursors.push(file.reader()?);
        }
        let resident = match files.first() {
            Some(f) => f.store.tracker().hold(files.len() as u64),
            None => {
                return Err(Error::ListMismatch {
                    detail: "a cursor family needs at least one component".into(),
                })
            }
        };
        Ok(MultiCursor {
            consumed: vec![0; cursors.len()],
            cursors,
            _resident: resident,
        })
    }

    pub fn components(&self) -> usize {
        self.cursors.len()
    }

    /// Next unread element of `component`, or `None` if it is exhausted.
    ///
    /// Panics if `component` is out of range; callers validate data-driven
    /// indices before handing them over.
    pub fn take(&mut self, component: usize) -> Result<Option<i64>> {
        let value = self.cursors[component].next_value()?;
        if value.is_some() {
            self.consumed[component] += 1;
        }
        Ok(value)
    }

    /// Elements read so far from `component`.
    pub fn consumed(&self, component: usize) -> u64 {
        self.consumed[component]
    }

    /// True once every component has been read to its end.
    pub fn fully_consumed(&self) -> bool {
        self.cursors.iter().all(|c| c.remaining() == 0)
    }
}

/// Rebuild an interleaved list from its components and the encoding that
/// names, for each position, the component supplying that position.
///
/// The encoding must reference component `q` exactly `components[q].len()`
/// times; anything else is reported as bad content with the offending
/// position.
pub fn reconstruct_interleave(
    encoding: &SeqFile,
    components: &[SeqFile],
    out: SeqWriter,
) -> Result<SeqFile> {
    let mut total = 0u64;
    for component in components {
        if component.spec() != out.spec() {
            return Err(Error::ListMismatch {
                detail: format!(
                    "component {} and output {} use different element encodings",
                    component.path().display(),
                    out.path.display(),
                ),
            });
        }
        total += component.len();
    }
    if encoding.len() != total {
        return Err(Error::ListMismatch {
            detail: format!(
                "encoding {} has {} elements but components hold {} in total",
                encoding.path().display(),
                encoding.len(),
                total,
            ),
        });
    }
    let mut cursor = MultiCursor::new(components)?;
    let mut enc = encoding.reader()?;
    let mut out = out;
    let mut position = 0u64;
    while let Some(which) = enc.next_value()? {
        if which < 0 || which as usize >= components.len() {
            return Err(Error::bad_content(
                encoding.path(),
                position,
                format!(
                    "encoding references component {which}, but only {} exist",
                    components.len(),
                ),
            ));
        }
        let q = which as usize;
        let value = cursor.take(q)?.ok_or_else(|| {
            Error::bad_content(
                encoding.path(),
                position,
                format!(
                    "component {q} is exhausted after {} elements",
                    cursor.consumed(q),
                ),
            )
        })?;
        out.append(value)?;
        position += 1;
    }
    debug_assert!(cursor.fully_consumed());
    out.finish()
}
