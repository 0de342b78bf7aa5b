//! Gap codecs for posting lists.
//!
//! A list `d_0 < d_1 < ...` is stored as the gaps `d_0 + 1, d_1 - d_0, ...`,
//! all at least one. Bits are written most significant first.
//!
//! - Elias γ of `x ≥ 1`: `⌊log2 x⌋` zeros, then `x` in binary.
//! - Elias δ of `x ≥ 1`: γ of `⌊log2 x⌋ + 1`, then the low `⌊log2 x⌋` bits of `x`.
//! - Golomb with divisor `b` of `v ≥ 0`: `v / b` in unary (ones closed by a
//!   zero), then `v % b` in truncated binary. Lists store `gap - 1`.
//! - vbyte: seven payload bits per byte, least significant group first, high
//!   bit set on every byte but the last.

use crate::index::InvertedIndex;
use crate::{DocId, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Codec {
    Golomb,
    Gamma,
    Delta,
    VByte,
}

impl Codec {
    pub const ALL: [Codec; 4] = [Codec::Golomb, Codec::Gamma, Codec::Delta, Codec::VByte];

    pub fn name(self) -> &'static str {
        match self {
            Codec::Golomb => "golomb",
            Codec::Gamma => "gamma",
            Codec::Delta => "delta",
            Codec::VByte => "vbyte",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Codec::Golomb => 0,
            Codec::Gamma => 1,
            Codec::Delta => 2,
            Codec::VByte => 3,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            0 => Codec::Golomb,
            1 => Codec::Gamma,
            2 => Codec::Delta,
            3 => Codec::VByte,
            other => return Err(Error::Format(format!("unknown codec tag {other}"))),
        })
    }
}

impl std::fmt::Display for Codec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Codec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "golomb" => Ok(Codec::Golomb),
            "gamma" => Ok(Codec::Gamma),
            "delta" => Ok(Codec::Delta),
            "vbyte" => Ok(Codec::VByte),
            other => Err(Error::InvalidConfig(format!("unknown codec {other:?}"))),
        }
    }
}

/// A growable bit string, most significant bit of each byte first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitVec {
    bytes: Vec<u8>,
    len: u64,
}

impl BitVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps `bytes` holding `len` bits; trailing padding must be zero.
    pub fn from_bytes(bytes: Vec<u8>, len: u64) -> Result<Self> {
        if (bytes.len() as u64) != len.div_ceil(8) {
            return Err(Error::Decode(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        Ok(Self { bytes, len })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let offset = (self.len % 8) as u8;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    #[inline]
    pub fn get(&self, pos: u64) -> bool {
        self.bytes[(pos / 8) as usize] & (0x80 >> (pos % 8)) != 0
    }

    /// Renders the bits as a string of `0` and `1`.
    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

pub struct BitReader<'a> {
    bits: &'a BitVec,
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitVec) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn remaining(&self) -> u64 {
        self.bits.len - self.pos
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.bits.len {
            return Err(Error::Decode("unexpected end of bit string".into()));
        }
        let bit = self.bits.get(self.pos);
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        let mut value = 0u64;
        for _ in 0..width {
            value = (value << 1) | self.read_bit()? as u64;
        }
        Ok(value)
    }
}

fn log2_floor(x: u64) -> u32 {
    63 - x.leading_zeros()
}

pub fn write_gamma(out: &mut BitVec, x: u64) {
    assert!(x >= 1, "gamma codes positive integers");
    let n = log2_floor(x);
    for _ in 0..n {
        out.push(false);
    }
    out.push_bits(x, n + 1);
}

pub fn read_gamma(input: &mut BitReader<'_>) -> Result<u64> {
    let mut n = 0u32;
    while !input.read_bit()? {
        n += 1;
        if n > 63 {
            return Err(Error::Decode("gamma prefix too long".into()));
        }
    }
    Ok((1u64 << n) | input.read_bits(n)?)
}

pub fn write_delta(out: &mut BitVec, x: u64) {
    assert!(x >= 1, "delta codes positive integers");
    let n = log2_floor(x);
    write_gamma(out, n as u64 + 1);
    out.push_bits(x, n);
}

pub fn read_delta(input: &mut BitReader<'_>) -> Result<u64> {
    let n = read_gamma(input)? - 1;
    if n > 63 {
        return Err(Error::Decode("delta length too large".into()));
    }
    Ok((1u64 << n) | input.read_bits(n as u32)?)
}

pub fn write_golomb(out: &mut BitVec, value: u64, divisor: u64) {
    assert!(divisor >= 1, "golomb divisor must be positive");
    let q = value / divisor;
    let r = value % divisor;
    for _ in 0..q {
        out.push(true);
    }
    out.push(false);
    write_truncated_binary(out, r, divisor);
}

pub fn read_golomb(input: &mut BitReader<'_>, divisor: u64) -> Result<u64> {
    let mut q = 0u64;
    while input.read_bit()? {
        q += 1;
    }
    let r = read_truncated_binary(input, divisor)?;
    q.checked_mul(divisor)
        .and_then(|v| v.checked_add(r))
        .ok_or_else(|| Error::Decode("golomb value overflows".into()))
}

// Remainders below `2^c - b` take `c - 1` bits, the rest `c` bits, where `c = ⌈log2 b⌉`.
fn write_truncated_binary(out: &mut BitVec, r: u64, b: u64) {
    if b == 1 {
        return;
    }
    let c = 64 - (b - 1).leading_zeros();
    let short = (1u64 << c) - b;
    if r < short {
        out.push_bits(r, c - 1);
    } else {
        out.push_bits(r + short, c);
    }
}

fn read_truncated_binary(input: &mut BitReader<'_>, b: u64) -> Result<u64> {
    if b == 1 {
        return Ok(0);
    }
    let c = 64 - (b - 1).leading_zeros();
    let short = (1u64 << c) - b;
    let head = input.read_bits(c - 1)?;
    if head < short {
        Ok(head)
    } else {
        let full = (head << 1) | input.read_bit()? as u64;
        Ok(full - short)
    }
}

pub fn write_vbyte(out: &mut BitVec, mut x: u64) {
    loop {
        let group = x & 0x7f;
        x >>= 7;
        if x == 0 {
            out.push_bits(group, 8);
            return;
        }
        out.push_bits(group | 0x80, 8);
    }
}

pub fn read_vbyte(input: &mut BitReader<'_>) -> Result<u64> {
    let mut value = 0u64;
    let mut shift = 0u32;
    loop {
        let byte = input.read_bits(8)?;
        if shift > 63 {
            return Err(Error::Decode("vbyte value too long".into()));
        }
        value |= (byte & 0x7f) << shift;
        if byte & 0x80 == 0 {
            return Ok(value);
        }
        shift += 7;
    }
}

/// Golomb divisor for a list of `list_length` postings over `universe`
/// documents: `max(1, ⌈0.69 · universe / list_length⌉)`.
pub fn golomb_parameter(list_length: u64, universe: u64) -> u64 {
    assert!(list_length >= 1, "golomb parameter needs a non-empty list");
    (69 * universe).div_ceil(100 * list_length).max(1)
}

/// An encoded posting list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedList {
    pub codec: Codec,
    /// Golomb divisor; zero for the other codecs.
    pub parameter: u64,
    pub length: u64,
    pub bits: BitVec,
}

/// Encodes a sorted, duplicate-free list. `universe` only matters for Golomb,
/// where it sets the divisor.
pub fn encode(docs: &[DocId], codec: Codec, universe: u64) -> EncodedList {
    debug_assert!(docs.windows(2).all(|w| w[0] < w[1]));
    let parameter = match codec {
        Codec::Golomb if !docs.is_empty() => {
            golomb_parameter(docs.len() as u64, universe.max(*docs.last().unwrap() as u64 + 1))
        }
        _ => 0,
    };
    let mut bits = BitVec::new();
    let mut prev: i64 = -1;
    for &d in docs {
        let gap = (d as i64 - prev) as u64;
        prev = d as i64;
        match codec {
            Codec::Golomb => write_golomb(&mut bits, gap - 1, parameter),
            Codec::Gamma => write_gamma(&mut bits, gap),
            Codec::Delta => write_delta(&mut bits, gap),
            Codec::VByte => write_vbyte(&mut bits, gap),
        }
    }
    EncodedList {
        codec,
        parameter,
        length: docs.len() as u64,
        bits,
    }
}

/// Decodes an [`EncodedList`]. Truncated input, leftover bits and IDs that
/// overflow 32 bits are errors.
pub fn decode(enc: &EncodedList) -> Result<Vec<DocId>> {
    if enc.codec == Codec::Golomb && enc.length > 0 && enc.parameter == 0 {
        return Err(Error::Decode("golomb divisor is zero".into()));
    }
    let mut input = BitReader::new(&enc.bits);
    let mut docs = Vec::with_capacity(enc.length.min(1 << 24) as usize);
    let mut prev: i64 = -1;
    for _ in 0..enc.length {
        let gap = match enc.codec {
            Codec::Golomb => read_golomb(&mut input, enc.parameter)?.checked_add(1),
            Codec::Gamma => Some(read_gamma(&mut input)?),
            Codec::Delta => Some(read_delta(&mut input)?),
            Codec::VByte => Some(read_vbyte(&mut input)?),
        };
        let gap = match gap {
            Some(g) if g >= 1 => g,
            _ => return Err(Error::Decode("gap must be positive".into())),
        };
        let next = prev + gap.min(u64::MAX >> 2) as i64;
        if next > DocId::MAX as i64 {
            return Err(Error::Decode("document id overflows".into()));
        }
        docs.push(next as DocId);
        prev = next;
    }
    if input.remaining() != 0 {
        return Err(Error::Decode(format!("{} trailing bits", input.remaining())));
    }
    Ok(docs)
}

/// Encoded size of the whole index divided by its number of postings.
pub fn bits_per_posting(index: &InvertedIndex, codec: Codec) -> f64 {
    let universe = index.num_docs() as u64;
    let mut bits = 0u64;
    for list in index.lists() {
        if !list.is_empty() {
            bits += encode(list, codec, universe).bits.len();
        }
    }
    let postings = index.total_postings();
    if postings == 0 {
        0.0
    } else {
        bits as f64 / postings as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(f: impl FnOnce(&mut BitVec)) -> String {
        let mut b = BitVec::new();
        f(&mut b);
        b.to_bit_string()
    }

    #[test]
    fn reference_codewords() {
        assert_eq!(bits_of(|b| write_gamma(b, 9)), "0001001");
        assert_eq!(bits_of(|b| write_gamma(b, 1)), "1");
        assert_eq!(bits_of(|b| write_delta(b, 9)), "00100001");
        assert_eq!(bits_of(|b| write_delta(b, 1)), "1");
        assert_eq!(bits_of(|b| write_golomb(b, 9, 4)), "11001");
        assert_eq!(bits_of(|b| write_vbyte(b, 300)), "1010110000000010");
    }

    /// Textbook Golomb coder: unary quotient, then truncated binary
    /// remainder, built from string pieces.
    fn golomb_reference(v: u64, b: u64) -> String {
        let mut s = "1".repeat((v / b) as usize);
        s.push('0');
        let r = v % b;
        if b > 1 {
            let c = (b as f64).log2().ceil() as usize;
            let short = (1u64 << c) - b;
            if r < short {
                s.push_str(&format!("{:0width$b}", r, width = c - 1));
            } else {
                s.push_str(&format!("{:0width$b}", r + short, width = c));
            }
        }
        s
    }

    #[test]
    fn golomb_matches_reference() {
        for b in 1..=20u64 {
            for v in 0..100u64 {
                assert_eq!(bits_of(|bits| write_golomb(bits, v, b)), golomb_reference(v, b));
                let mut bits = BitVec::new();
                write_golomb(&mut bits, v, b);
                assert_eq!(read_golomb(&mut BitReader::new(&bits), b).unwrap(), v);
            }
        }
    }

    #[test]
    fn golomb_parameter_values() {
        assert_eq!(golomb_parameter(100, 100), 1);
        assert_eq!(golomb_parameter(10, 1000), 69);
        assert_eq!(golomb_parameter(1_000_000, 1), 1);
    }

    #[test]
    fn dense_list_gamma_one_bit() {
        let docs: Vec<DocId> = (0..500).collect();
        let enc = encode(&docs, Codec::Gamma, 500);
        assert_eq!(enc.bits.len(), 500);
        let index = InvertedIndex::from_postings(500, vec![docs]);
        assert_eq!(bits_per_posting(&index, Codec::Gamma), 1.0);
        assert!(bits_per_posting(&index, Codec::VByte) >= 8.0);
    }

    #[test]
    fn roundtrip_all_codecs() {
        let docs = vec![0, 1, 2, 7, 100, 101, 5000, 1 << 20, u32::MAX - 1];
        for codec in Codec::ALL {
            let enc = encode(&docs, codec, 1 << 32);
            assert_eq!(decode(&enc).unwrap(), docs, "{codec}");
            let empty = encode(&[], codec, 10);
            assert!(decode(&empty).unwrap().is_empty());
        }
    }

    #[test]
    fn corrupt_input_is_an_error() {
        let docs = vec![3, 9, 40];
        for codec in Codec::ALL {
            let enc = encode(&docs, codec, 64);
            // truncate
            let mut short = enc.clone();
            short.length += 1;
            assert!(decode(&short).is_err(), "{codec} accepted a missing value");
            // leftover bits
            let mut long = enc.clone();
            long.length -= 1;
            assert!(decode(&long).is_err(), "{codec} ignored trailing bits");
        }
        let zeros = EncodedList {
            codec: Codec::Gamma,
            parameter: 0,
            length: 1,
            bits: BitVec::from_bytes(vec![0; 16], 128).unwrap(),
        };
        assert!(decode(&zeros).is_err());
    }
}
