//! Versioned on-disk container for a compressed inverted index.
//!
//! Layout, all integers little-endian `u64` unless noted:
//!
//! ```text
//! magic        5 bytes  "SCLD1"
//! num_docs
//! num_terms
//! dictionary   num_terms × (byte length, UTF-8 bytes), in TermId order
//! postings     num_terms × (codec tag: u8, parameter, length, bit length,
//!                           ⌈bit length / 8⌉ payload bytes, zero padded)
//! ```
//!
//! Codec tags: 0 Golomb, 1 Elias γ, 2 Elias δ, 3 vbyte.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::corpus::Corpus;
use crate::index::codec::{decode, encode, BitVec, Codec, EncodedList};
use crate::index::{build_index, InvertedIndex};
use crate::{Error, Result};

pub const MAGIC: &[u8; 5] = b"SCLD1";

/// File name used inside an index directory.
pub const INDEX_FILE: &str = "index.scld";

fn put_u64<W: Write>(out: &mut W, v: u64) -> Result<()> {
    out.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    input
        .read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    Ok(u64::from_le_bytes(buf))
}

/// Writes `corpus` as a dictionary plus its posting lists encoded with `codec`.
pub fn write_index<W: Write>(out: &mut W, corpus: &Corpus, codec: Codec) -> Result<()> {
    let index = build_index(corpus);
    out.write_all(MAGIC)?;
    put_u64(out, corpus.num_docs() as u64)?;
    put_u64(out, corpus.num_terms() as u64)?;
    for term in corpus.terms() {
        put_u64(out, term.len() as u64)?;
        out.write_all(term.as_bytes())?;
    }
    for list in index.lists() {
        let enc = encode(list, codec, index.num_docs() as u64);
        out.write_all(&[enc.codec.tag()])?;
        put_u64(out, enc.parameter)?;
        put_u64(out, enc.length)?;
        put_u64(out, enc.bits.len())?;
        out.write_all(enc.bits.as_bytes())?;
    }
    Ok(())
}

/// Reads a container written by [`write_index`] and rebuilds the corpus.
pub fn read_index<R: Read>(input: &mut R) -> Result<Corpus> {
    let mut magic = [0u8; 5];
    input
        .read_exact(&mut magic)
        .map_err(|_| Error::Format("missing header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, expected SCLD1".into()));
    }
    let num_docs = get_u64(input)?;
    let num_terms = get_u64(input)?;
    if num_docs > u32::MAX as u64 || num_terms > u32::MAX as u64 {
        return Err(Error::Format("counts exceed 32-bit ids".into()));
    }
    let mut terms = Vec::with_capacity(num_terms.min(1 << 20) as usize);
    for _ in 0..num_terms {
        let len = get_u64(input)?;
        let mut bytes = Vec::new();
        input.take(len).read_to_end(&mut bytes)?;
        if bytes.len() as u64 != len {
            return Err(Error::Format("truncated dictionary".into()));
        }
        terms.push(String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?);
    }
    let mut postings = Vec::with_capacity(terms.len());
    for _ in 0..num_terms {
        let mut tag = [0u8; 1];
        input
            .read_exact(&mut tag)
            .map_err(|_| Error::Format("truncated posting header".into()))?;
        let codec = Codec::from_tag(tag[0])?;
        let parameter = get_u64(input)?;
        let length = get_u64(input)?;
        let bit_len = get_u64(input)?;
        let mut payload = Vec::new();
        input.take(bit_len.div_ceil(8)).read_to_end(&mut payload)?;
        let bits = BitVec::from_bytes(payload, bit_len)
            .map_err(|_| Error::Format("truncated posting payload".into()))?;
        let docs = decode(&EncodedList {
            codec,
            parameter,
            length,
            bits,
        })?;
        if docs.last().is_some_and(|&d| d as u64 >= num_docs) {
            return Err(Error::Format("posting outside document range".into()));
        }
        postings.push(docs);
    }
    let index = InvertedIndex::from_postings(num_docs as u32, postings);
    Corpus::from_parts(terms, index.documents())
}

/// Writes the container into directory `dir` (created if missing), or to
/// `dir` itself when it names a file with an extension.
pub fn save(path: &Path, corpus: &Corpus, codec: Codec) -> Result<()> {
    let file_path = resolve(path, true)?;
    let file = File::create(&file_path).map_err(|source| Error::Path {
        path: file_path.clone(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    write_index(&mut out, corpus, codec)?;
    out.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Corpus> {
    let file_path = resolve(path, false)?;
    let file = File::open(&file_path).map_err(|source| Error::Path {
        path: file_path.clone(),
        source,
    })?;
    read_index(&mut BufReader::new(file))
}

fn resolve(path: &Path, create: bool) -> Result<std::path::PathBuf> {
    if path.is_dir() || (create && path.extension().is_none()) {
        if create {
            std::fs::create_dir_all(path).map_err(|source| Error::Path {
                path: path.to_owned(),
                source,
            })?;
        }
        Ok(path.join(INDEX_FILE))
    } else {
        Ok(path.to_owned())
    }
}
