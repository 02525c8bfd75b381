//! `.rinr` dataset container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! header   magic "RINR" | version u16 | record count u32
//! index    count x (offset u64 | length u32)        offsets are absolute
//! records  count x record, back to back, in index order
//!
//! record   id_len u16 | id (utf-8)
//!          source_h u32 | source_w u32 | omega f64
//!          n_dims u8 | dims u16 x n_dims
//!          quant_mode u8 (0 none, 1 affine8, 2 affine16)
//!          float_storage u8 (0 f32, 1 f16)
//!          layer x (n_dims - 1)
//!          crc32 u32 over every preceding byte of the record
//!
//! layer    tag u8 (0 f32-dense, 1 f16-dense, 2 affine8, 3 affine16)
//!          layout u8 (0 dense, 1 sparse)
//!          [affine] scale f32 | zero_point i32
//!          [sparse] kept bitset, ceil(out*in / 8) bytes, bit k = entry k, LSB first
//!          values: every entry (dense) or kept entries only (sparse),
//!                  4 bytes (f32), 2 bytes (f16, affine16 codes) or 1 byte (affine8 codes)
//!          biases: out x (f32 or f16, per float_storage)
//! ```
//!
//! A layer is written sparse when more than 1/8 of its entries are zero
//! (pruned, or stored as an exact zero), or when an affine layer has pruned
//! entries but a zero point outside the code range. Dense layers write zeros
//! in place and the reader recovers the mask from them.

use std::fs;
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use half::f16;
use serde::Serialize;

use crate::compress::{AffineLayer, QuantInfo, QuantMode};
use crate::error::{Error, Result};
use crate::net::{Architecture, InrModel, LayerWeights};

pub const MAGIC: [u8; 4] = *b"RINR";
pub const FORMAT_VERSION: u16 = 1;
/// Magic, version and record count.
pub const HEADER_BYTES: usize = 10;
pub const INDEX_ENTRY_BYTES: usize = 12;

const TAG_F32: u8 = 0;
const TAG_F16: u8 = 1;
const TAG_AFFINE8: u8 = 2;
const TAG_AFFINE16: u8 = 3;

/// Precision used for full-precision weights and for biases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum FloatStorage {
    #[default]
    F32,
    F16,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveRecord {
    pub id: String,
    pub model: InrModel,
    pub float_storage: FloatStorage,
}

impl ArchiveRecord {
    pub fn new(id: impl Into<String>, model: InrModel) -> Self {
        Self {
            id: id.into(),
            model,
            float_storage: FloatStorage::F32,
        }
    }

    pub fn with_float_storage(mut self, storage: FloatStorage) -> Self {
        self.float_storage = storage;
        self
    }
}

/// Ordered collection of per-image models with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetArchive {
    records: Vec<ArchiveRecord>,
}

impl DatasetArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: ArchiveRecord) -> Result<()> {
        if self.records.iter().any(|r| r.id == record.id) {
            return Err(Error::invalid(format!("duplicate record id '{}'", record.id)));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[ArchiveRecord] {
        &self.records
    }

    pub fn records_mut(&mut self) -> &mut [ArchiveRecord] {
        &mut self.records
    }

    pub fn into_records(self) -> Vec<ArchiveRecord> {
        self.records
    }

    pub fn get(&self, id: &str) -> Option<&ArchiveRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn models(&self) -> Vec<InrModel> {
        self.records.iter().map(|r| r.model.clone()).collect()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let bodies = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| encode_record(r).map_err(|e| Error::at(i, e)))
            .collect::<Result<Vec<_>>>()?;
        let count = u32::try_from(bodies.len()).map_err(|_| Error::invalid("too many records"))?;
        let mut out = Vec::with_capacity(
            HEADER_BYTES + bodies.len() * INDEX_ENTRY_BYTES + bodies.iter().map(Vec::len).sum::<usize>(),
        );
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&count.to_le_bytes());
        let mut offset = (HEADER_BYTES + bodies.len() * INDEX_ENTRY_BYTES) as u64;
        for b in &bodies {
            out.extend_from_slice(&offset.to_le_bytes());
            out.extend_from_slice(&(b.len() as u32).to_le_bytes());
            offset += b.len() as u64;
        }
        for b in bodies {
            out.extend_from_slice(&b);
        }
        Ok(out)
    }

    /// Serializes into `sink`, returning the number of bytes written.
    pub fn write<W: Write>(&self, sink: &mut W) -> Result<usize> {
        let bytes = self.to_bytes()?;
        sink.write_all(&bytes)?;
        Ok(bytes.len())
    }

    /// Parses a complete archive. Nothing is returned unless every record
    /// passes its checksum and structural checks.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let index = parse_index(bytes)?;
        let end = index.last().map_or(HEADER_BYTES, |e| e.end());
        if bytes.len() > end {
            return Err(Error::format(format!("{} trailing bytes after last record", bytes.len() - end)));
        }
        let mut archive = DatasetArchive::new();
        for (k, e) in index.iter().enumerate() {
            let rec = decode_record(&bytes[e.offset as usize..e.end()], k)?;
            archive.push(rec).map_err(|_| Error::format(format!("duplicate record id at #{k}")))?;
        }
        Ok(archive)
    }

    pub fn read<R: Read>(source: &mut R) -> Result<Self> {
        let mut bytes = Vec::new();
        source.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<usize> {
        let bytes = self.to_bytes()?;
        fs::write(path, &bytes)?;
        Ok(bytes.len())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexEntry {
    pub offset: u64,
    pub length: u32,
}

impl IndexEntry {
    fn end(&self) -> usize {
        self.offset as usize + self.length as usize
    }
}

fn truncated(what: &str) -> Error {
    Error::Integrity {
        record: what.to_string(),
        reason: "file is truncated".into(),
    }
}

fn parse_header(head: &[u8]) -> Result<usize> {
    if head.len() < HEADER_BYTES {
        if !MAGIC.starts_with(&head[..head.len().min(4)]) {
            return Err(Error::format("not a .rinr archive (bad magic)"));
        }
        return Err(truncated("header"));
    }
    if head[..4] != MAGIC {
        return Err(Error::format("not a .rinr archive (bad magic)"));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::format(format!("unsupported archive version {version}")));
    }
    Ok(u32::from_le_bytes(head[6..10].try_into().unwrap()) as usize)
}

fn parse_index_entries(count: usize, raw: &[u8]) -> Result<Vec<IndexEntry>> {
    let mut entries = Vec::with_capacity(count);
    let mut expected = (HEADER_BYTES + count * INDEX_ENTRY_BYTES) as u64;
    for (k, chunk) in raw.chunks_exact(INDEX_ENTRY_BYTES).enumerate() {
        let e = IndexEntry {
            offset: u64::from_le_bytes(chunk[..8].try_into().unwrap()),
            length: u32::from_le_bytes(chunk[8..].try_into().unwrap()),
        };
        if e.offset != expected {
            return Err(Error::format(format!("record #{k} offset {} breaks the index", e.offset)));
        }
        expected += e.length as u64;
        entries.push(e);
    }
    Ok(entries)
}

fn parse_index(bytes: &[u8]) -> Result<Vec<IndexEntry>> {
    let count = parse_header(bytes)?;
    let index_end = HEADER_BYTES + count * INDEX_ENTRY_BYTES;
    if bytes.len() < index_end {
        return Err(truncated("index"));
    }
    let entries = parse_index_entries(count, &bytes[HEADER_BYTES..index_end])?;
    if let Some((k, _)) = entries.iter().enumerate().find(|(_, e)| e.end() > bytes.len()) {
        return Err(truncated(&format!("#{k}")));
    }
    Ok(entries)
}

/// Random access over an archive on disk (or any seekable source): opening
/// reads only the header and index, and each record read touches only that
/// record's byte range.
pub struct ArchiveReader<R> {
    source: R,
    index: Vec<IndexEntry>,
}

impl<R: Read + Seek> ArchiveReader<R> {
    pub fn open(mut source: R) -> Result<Self> {
        source.seek(SeekFrom::Start(0))?;
        let mut head = Vec::with_capacity(HEADER_BYTES);
        (&mut source).take(HEADER_BYTES as u64).read_to_end(&mut head)?;
        let count = parse_header(&head)?;
        let mut raw = Vec::new();
        (&mut source)
            .take((count * INDEX_ENTRY_BYTES) as u64)
            .read_to_end(&mut raw)?;
        if raw.len() < count * INDEX_ENTRY_BYTES {
            return Err(truncated("index"));
        }
        let index = parse_index_entries(count, &raw)?;
        Ok(Self { source, index })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index(&self) -> &[IndexEntry] {
        &self.index
    }

    pub fn read_record(&mut self, k: usize) -> Result<ArchiveRecord> {
        let e = *self
            .index
            .get(k)
            .ok_or_else(|| Error::invalid(format!("record {k} out of range ({} records)", self.index.len())))?;
        self.source.seek(SeekFrom::Start(e.offset))?;
        let mut buf = Vec::with_capacity(e.length as usize);
        (&mut self.source).take(e.length as u64).read_to_end(&mut buf)?;
        if buf.len() < e.length as usize {
            return Err(truncated(&format!("#{k}")));
        }
        decode_record(&buf, k)
    }
}

impl ArchiveReader<fs::File> {
    pub fn open_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::open(fs::File::open(path)?)
    }
}

// ---- record encoding ----

fn storage_tag(quant: Option<&AffineLayer>, storage: FloatStorage) -> u8 {
    match (quant.map(|q| q.bits), storage) {
        (Some(8), _) => TAG_AFFINE8,
        (Some(_), _) => TAG_AFFINE16,
        (None, FloatStorage::F32) => TAG_F32,
        (None, FloatStorage::F16) => TAG_F16,
    }
}

fn is_zero_f16(v: f32) -> bool {
    f16::from_f32(v).to_f32() == 0.0
}

/// Whether each entry is stored as zero: pruned, or a kept value that is
/// exactly zero at storage precision.
fn zero_entries(w: &[f32], mask: &[bool], quant: Option<&AffineLayer>, storage: FloatStorage) -> Vec<bool> {
    (0..w.len())
        .map(|k| {
            !mask[k]
                || match (quant, storage) {
                    (Some(q), _) => q.codes[k] as i64 == q.zero_point as i64,
                    (None, FloatStorage::F32) => w[k] == 0.0,
                    (None, FloatStorage::F16) => is_zero_f16(w[k]),
                }
        })
        .collect()
}

fn use_sparse(zeros: &[bool], mask: &[bool], quant: Option<&AffineLayer>) -> bool {
    let n_zero = zeros.iter().filter(|&&z| z).count();
    if n_zero * 8 > zeros.len() {
        return true;
    }
    // a dense affine layer can only express a pruned entry if 0 has a code
    match quant {
        Some(q) => {
            let zp_in_range = q.zero_point >= 0 && (q.zero_point as u32) <= q.qmax();
            !zp_in_range && mask.iter().any(|&k| !k)
        }
        None => false,
    }
}

fn encode_record(rec: &ArchiveRecord) -> Result<Vec<u8>> {
    let m = &rec.model;
    m.validate()?;
    let id = rec.id.as_bytes();
    let id_len = u16::try_from(id.len()).map_err(|_| Error::invalid("record id longer than 65535 bytes"))?;
    let dims = m.arch.dims();
    if dims.len() > u8::MAX as usize || dims.iter().any(|&d| d > u16::MAX as usize) {
        return Err(Error::invalid("architecture too large for the archive format"));
    }
    let (h, w) = (u32::try_from(m.source_h), u32::try_from(m.source_w));
    let (Ok(h), Ok(w)) = (h, w) else {
        return Err(Error::invalid("source size too large"));
    };

    let mut out = Vec::new();
    out.extend_from_slice(&id_len.to_le_bytes());
    out.extend_from_slice(id);
    out.extend_from_slice(&h.to_le_bytes());
    out.extend_from_slice(&w.to_le_bytes());
    out.extend_from_slice(&m.arch.omega().to_le_bytes());
    out.push(dims.len() as u8);
    for &d in dims {
        out.extend_from_slice(&(d as u16).to_le_bytes());
    }
    let mode = m.quant.as_ref().map_or(QuantMode::None, |q| q.mode);
    out.push(match mode {
        QuantMode::None => 0,
        QuantMode::Affine8 => 1,
        QuantMode::Affine16 => 2,
    });
    out.push(match rec.float_storage {
        FloatStorage::F32 => 0,
        FloatStorage::F16 => 1,
    });

    for (l, layer) in m.layers.iter().enumerate() {
        let quant = m
            .quant
            .as_ref()
            .filter(|q| q.is_active())
            .and_then(|q| q.layers[l].as_ref());
        let mask = &m.mask[l];
        let tag = storage_tag(quant, rec.float_storage);
        let zeros = zero_entries(&layer.w, mask, quant, rec.float_storage);
        let sparse = use_sparse(&zeros, mask, quant);
        out.push(tag);
        out.push(sparse as u8);
        if let Some(q) = quant {
            out.extend_from_slice(&q.scale.to_le_bytes());
            out.extend_from_slice(&q.zero_point.to_le_bytes());
        }
        if sparse {
            let mut bits = vec![0u8; layer.w.len().div_ceil(8)];
            for (k, &keep) in mask.iter().enumerate() {
                if keep {
                    bits[k / 8] |= 1 << (k % 8);
                }
            }
            out.extend_from_slice(&bits);
        }
        for k in 0..layer.w.len() {
            if sparse && !mask[k] {
                continue;
            }
            // dense layers write every zero entry canonically
            let zero = !sparse && zeros[k];
            match (quant, rec.float_storage) {
                (Some(q), _) => {
                    let code = if zero { q.zero_point as u16 } else { q.codes[k] };
                    if q.bits == 8 {
                        out.push(code as u8);
                    } else {
                        out.extend_from_slice(&code.to_le_bytes());
                    }
                }
                (None, FloatStorage::F32) => {
                    let v = if zero { 0.0f32 } else { layer.w[k] };
                    out.extend_from_slice(&v.to_le_bytes());
                }
                (None, FloatStorage::F16) => {
                    let v = if zero { f16::ZERO } else { f16::from_f32(layer.w[k]) };
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        for &b in &layer.b {
            match rec.float_storage {
                FloatStorage::F32 => out.extend_from_slice(&b.to_le_bytes()),
                FloatStorage::F16 => out.extend_from_slice(&f16::from_f32(b).to_le_bytes()),
            }
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

/// Serialized size of one record, without its index entry.
pub fn record_size(rec: &ArchiveRecord) -> Result<usize> {
    Ok(encode_record(rec)?.len())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::format("record ends early"));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f16(&mut self) -> Result<f32> {
        Ok(f16::from_le_bytes(self.take(2)?.try_into().unwrap()).to_f32())
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn decode_record(bytes: &[u8], k: usize) -> Result<ArchiveRecord> {
    let name = format!("#{k}");
    if bytes.len() < 4 {
        return Err(truncated(&name));
    }
    let (body, crc) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(crc.try_into().unwrap());
    if crc32fast::hash(body) != stored {
        return Err(Error::Integrity {
            record: name,
            reason: "checksum mismatch".into(),
        });
    }
    parse_record(body).map_err(|e| match e {
        Error::Format(msg) => Error::format(format!("record {name}: {msg}")),
        other => other,
    })
}

fn parse_record(body: &[u8]) -> Result<ArchiveRecord> {
    let mut c = Cursor { buf: body, pos: 0 };
    let id_len = c.u16()? as usize;
    let id = std::str::from_utf8(c.take(id_len)?)
        .map_err(|_| Error::format("id is not utf-8"))?
        .to_string();
    let source_h = c.u32()? as usize;
    let source_w = c.u32()? as usize;
    let omega = c.f64()?;
    let n_dims = c.u8()? as usize;
    let dims = (0..n_dims).map(|_| c.u16().map(usize::from)).collect::<Result<Vec<_>>>()?;
    let arch = Architecture::new(dims, omega).map_err(|e| Error::format(e.to_string()))?;
    let mode = match c.u8()? {
        0 => QuantMode::None,
        1 => QuantMode::Affine8,
        2 => QuantMode::Affine16,
        other => return Err(Error::format(format!("unknown quantization mode {other}"))),
    };
    let float_storage = match c.u8()? {
        0 => FloatStorage::F32,
        1 => FloatStorage::F16,
        other => return Err(Error::format(format!("unknown float storage {other}"))),
    };

    let mut layers = Vec::with_capacity(arch.num_layers());
    let mut masks = Vec::with_capacity(arch.num_layers());
    let mut qlayers = Vec::with_capacity(arch.num_layers());
    for l in 0..arch.num_layers() {
        let (out_dim, in_dim) = arch.layer_shape(l);
        let n = out_dim * in_dim;
        let tag = c.u8()?;
        let sparse = match c.u8()? {
            0 => false,
            1 => true,
            other => return Err(Error::format(format!("unknown layout {other}"))),
        };
        let expected_float = match float_storage {
            FloatStorage::F32 => TAG_F32,
            FloatStorage::F16 => TAG_F16,
        };
        let bits = match tag {
            TAG_AFFINE8 => Some(8u8),
            TAG_AFFINE16 => Some(16u8),
            t if t == expected_float => None,
            other => return Err(Error::format(format!("layer {l}: unexpected storage tag {other}"))),
        };
        if bits.is_some() && (mode.bits() != bits || !arch.is_hidden_layer(l)) {
            return Err(Error::format(format!("layer {l}: quantized storage not allowed here")));
        }
        let affine = match bits {
            Some(bits) => Some((bits, c.f32()?, c.i32()?)),
            None => None,
        };
        let kept: Option<Vec<bool>> = if sparse {
            let raw = c.take(n.div_ceil(8))?;
            let mask: Vec<bool> = (0..n).map(|k| raw[k / 8] & (1 << (k % 8)) != 0).collect();
            let tail_bits = raw.len() * 8 - n;
            if tail_bits > 0 && raw[raw.len() - 1] >> (8 - tail_bits) != 0 {
                return Err(Error::format(format!("layer {l}: padding bits set in bitset")));
            }
            Some(mask)
        } else {
            None
        };

        let mut w = vec![0.0f32; n];
        let mut mask = vec![true; n];
        let mut codes = vec![0u16; n];
        for k in 0..n {
            if let Some(km) = &kept {
                if !km[k] {
                    mask[k] = false;
                    continue;
                }
            }
            match affine {
                Some((8, _, _)) => codes[k] = c.u8()? as u16,
                Some(_) => codes[k] = c.u16()?,
                None => {
                    w[k] = match float_storage {
                        FloatStorage::F32 => c.f32()?,
                        FloatStorage::F16 => c.f16()?,
                    };
                    if kept.is_none() && w[k] == 0.0 {
                        mask[k] = false;
                    }
                }
            }
        }
        let qlayer = match affine {
            Some((bits, scale, zero_point)) => {
                if kept.is_none() {
                    for k in 0..n {
                        if codes[k] as i64 == zero_point as i64 {
                            mask[k] = false;
                            codes[k] = 0;
                        }
                    }
                }
                let q = AffineLayer {
                    bits,
                    scale,
                    zero_point,
                    codes,
                };
                if q.codes.iter().any(|&v| v as u32 > q.qmax()) {
                    return Err(Error::format(format!("layer {l}: code out of range")));
                }
                for k in 0..n {
                    w[k] = if mask[k] { q.dequant(q.codes[k]) } else { 0.0 };
                }
                Some(q)
            }
            None => None,
        };
        let b = (0..out_dim)
            .map(|_| match float_storage {
                FloatStorage::F32 => c.f32(),
                FloatStorage::F16 => c.f16(),
            })
            .collect::<Result<Vec<_>>>()?;
        layers.push(LayerWeights { out_dim, in_dim, w, b });
        masks.push(mask);
        qlayers.push(qlayer);
    }
    if c.pos != body.len() {
        return Err(Error::format(format!("{} unused bytes", body.len() - c.pos)));
    }
    let quant = match mode {
        QuantMode::None => None,
        mode => Some(QuantInfo { mode, layers: qlayers }),
    };
    let model = InrModel {
        arch,
        layers,
        mask: masks,
        quant,
        source_h,
        source_w,
    };
    model.validate()?;
    Ok(ArchiveRecord {
        id,
        model,
        float_storage,
    })
}

// ---- size accounting ----

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordSize {
    pub id: String,
    /// Record bytes plus its index entry.
    pub bytes: usize,
    /// Same network stored as dense f32 weights and biases.
    pub dense_f32_bytes: usize,
    /// Source image as 8-bit RGB.
    pub raw_rgb_bytes: usize,
    pub prune_ratio: f64,
    pub quant: QuantMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub total_bytes: usize,
    pub header_bytes: usize,
    pub records: Vec<RecordSize>,
    pub mean_prune_ratio: f64,
    pub dense_f32_bytes: usize,
    pub raw_rgb_bytes: usize,
    /// Sum of `.jpg`/`.jpeg` file sizes in a reference directory.
    pub jpeg_bytes: Option<u64>,
}

impl SizeReport {
    pub fn ratio_vs_dense(&self) -> f64 {
        self.total_bytes as f64 / self.dense_f32_bytes as f64
    }

    pub fn ratio_vs_raw(&self) -> f64 {
        self.total_bytes as f64 / self.raw_rgb_bytes as f64
    }

    pub fn ratio_vs_jpeg(&self) -> Option<f64> {
        self.jpeg_bytes.map(|j| self.total_bytes as f64 / j as f64)
    }
}

/// Size breakdown of `archive`, optionally compared with a folder of JPEGs.
pub fn stats(archive: &DatasetArchive, jpeg_dir: Option<&Path>) -> Result<SizeReport> {
    let records = archive
        .records()
        .iter()
        .map(|r| {
            Ok(RecordSize {
                id: r.id.clone(),
                bytes: record_size(r)? + INDEX_ENTRY_BYTES,
                dense_f32_bytes: r.model.arch.dense_bytes(),
                raw_rgb_bytes: r.model.source_h * r.model.source_w * 3,
                prune_ratio: r.model.prune_ratio(),
                quant: r.model.quant.as_ref().map_or(QuantMode::None, |q| q.mode),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let jpeg_bytes = jpeg_dir.map(jpeg_dir_bytes).transpose()?;
    let n = records.len().max(1) as f64;
    Ok(SizeReport {
        total_bytes: HEADER_BYTES + records.iter().map(|r| r.bytes).sum::<usize>(),
        header_bytes: HEADER_BYTES,
        mean_prune_ratio: records.iter().map(|r| r.prune_ratio).sum::<f64>() / n,
        dense_f32_bytes: records.iter().map(|r| r.dense_f32_bytes).sum(),
        raw_rgb_bytes: records.iter().map(|r| r.raw_rgb_bytes).sum(),
        records,
        jpeg_bytes,
    })
}

fn jpeg_dir_bytes(dir: &Path) -> Result<u64> {
    let mut total = 0;
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let is_jpeg = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("jpg") || e.eq_ignore_ascii_case("jpeg"));
        if is_jpeg {
            total += fs::metadata(&path)?.len();
        }
    }
    Ok(total)
}
