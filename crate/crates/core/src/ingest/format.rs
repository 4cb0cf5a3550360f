//! Binary embedding files.
//!
//! `BFVE`: magic, `u32` version (1), `u32` N, `u32` V, then `N·V` `f32`
//! values, all little-endian, row-major.
//!
//! `BFVT`: same header with N = number of documents, followed by N `u32`
//! token counts, then one `u32` byte length + UTF-8 bytes per token, then
//! `(Σ counts)·V` `f32` values.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{EmbeddingMatrix, Provenance, TokenEmbeddingSet};
use crate::diffcore::Tensor;
use crate::error::{Error, Result};

pub const EMBEDDING_MAGIC: &[u8; 4] = b"BFVE";
pub const TOKEN_MAGIC: &[u8; 4] = b"BFVT";
pub const FORMAT_VERSION: u32 = 1;

/// Little-endian cursor over a byte buffer that reports truncation as a
/// length error against `path`.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8], path: &'a Path) -> Self {
        Self { buf, pos: 0, path }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Length {
                path: self.path.to_path_buf(),
                expected: n,
                found: self.buf.len() - self.pos,
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let got = self.take(4)?;
        if got != expected {
            return Err(Error::format(
                self.path,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(got),
                    String::from_utf8_lossy(expected)
                ),
            ));
        }
        let version = self.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::format(self.path, format!("unsupported version {version}")));
        }
        Ok(())
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub(crate) fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let bytes = n
            .checked_mul(4)
            .ok_or_else(|| Error::format(self.path, "payload size overflows"))?;
        let b = self.take(bytes)?;
        Ok(b.chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect())
    }

    pub(crate) fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        let b = self.take(n)?;
        String::from_utf8(b.to_vec())
            .map_err(|_| Error::format(self.path, "token string is not valid UTF-8"))
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::format(
                self.path,
                format!("{} trailing bytes", self.buf.len() - self.pos),
            ));
        }
        Ok(())
    }
}

pub(crate) fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_f32s(out: &mut Vec<u8>, values: &[f64]) {
    for &v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
}

pub(crate) fn put_header(out: &mut Vec<u8>, magic: &[u8; 4]) {
    out.extend_from_slice(magic);
    put_u32(out, FORMAT_VERSION);
}

pub(crate) fn dim_u32(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Dimension(format!("{what} = {n} exceeds u32")))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn check_rows_finite(values: &[f32], width: usize, path: &Path) -> Result<()> {
    for (row, chunk) in values.chunks(width).enumerate() {
        if chunk.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data {
                path: path.to_path_buf(),
                row,
            });
        }
    }
    Ok(())
}

pub fn encode_embeddings(m: &EmbeddingMatrix) -> Result<Vec<u8>> {
    let (n, v) = (m.n(), m.dim());
    let mut out = Vec::with_capacity(16 + 4 * n * v);
    put_header(&mut out, EMBEDDING_MAGIC);
    put_u32(&mut out, dim_u32(n, "N")?);
    put_u32(&mut out, dim_u32(v, "V")?);
    put_f32s(&mut out, m.values().data());
    Ok(out)
}

pub fn decode_embeddings(bytes: &[u8], path: &Path) -> Result<EmbeddingMatrix> {
    let mut r = Reader::new(bytes, path);
    r.magic(EMBEDDING_MAGIC)?;
    let n = r.u32()? as usize;
    let v = r.u32()? as usize;
    if n == 0 || v == 0 {
        return Err(Error::format(path, format!("empty matrix {n}×{v}")));
    }
    let values = r.f32s(n * v)?;
    r.finish()?;
    check_rows_finite(&values, v, path)?;
    let t = Tensor::from_f32(vec![n, v], &values)?;
    EmbeddingMatrix::new(t, Provenance::default())
}

pub fn write_embeddings(path: impl AsRef<Path>, m: &EmbeddingMatrix) -> Result<()> {
    write_bytes(path.as_ref(), &encode_embeddings(m)?)
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    decode_embeddings(&read_bytes(path)?, path)
}

pub fn write_tokens(path: impl AsRef<Path>, set: &TokenEmbeddingSet) -> Result<()> {
    let v = set.dim();
    let mut out = Vec::new();
    put_header(&mut out, TOKEN_MAGIC);
    put_u32(&mut out, dim_u32(set.docs().len(), "N")?);
    put_u32(&mut out, dim_u32(v, "V")?);
    for d in set.docs() {
        put_u32(&mut out, dim_u32(d.tokens.len(), "token count")?);
    }
    for d in set.docs() {
        for tok in &d.tokens {
            put_u32(&mut out, dim_u32(tok.len(), "token length")?);
            out.extend_from_slice(tok.as_bytes());
        }
    }
    for d in set.docs() {
        put_f32s(&mut out, d.vectors.data());
    }
    write_bytes(path.as_ref(), &out)
}

pub fn read_tokens(path: impl AsRef<Path>) -> Result<TokenEmbeddingSet> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    let mut r = Reader::new(&bytes, path);
    r.magic(TOKEN_MAGIC)?;
    let n = r.u32()? as usize;
    let v = r.u32()? as usize;
    if n == 0 || v == 0 {
        return Err(Error::format(path, format!("empty token set {n}×{v}")));
    }
    let counts = (0..n).map(|_| r.u32().map(|c| c as usize)).collect::<Result<Vec<_>>>()?;
    let mut strings = Vec::with_capacity(n);
    for &c in &counts {
        strings.push((0..c).map(|_| r.string()).collect::<Result<Vec<_>>>()?);
    }
    let total: usize = counts.iter().sum();
    let values = r.f32s(total * v)?;
    r.finish()?;
    check_rows_finite(&values, v, path)?;

    let mut docs = Vec::with_capacity(n);
    let mut offset = 0;
    for (tokens, &c) in strings.into_iter().zip(&counts) {
        if c == 0 {
            return Err(Error::Contract(format!(
                "{}: document {} has no tokens",
                path.display(),
                docs.len()
            )));
        }
        let vectors = Tensor::from_f32(vec![c, v], &values[offset * v..(offset + c) * v])?;
        offset += c;
        docs.push(super::TokenDoc { tokens, vectors });
    }
    TokenEmbeddingSet::new(docs, 0)
}
