//! Bit-level integer codes and posting-list compression.
//!
//! ```bash
//! cargo run --example codecs
//! ```

use seclud::index::codec::{write_delta, write_gamma, write_golomb, write_vbyte, BitVec};
use seclud::index::{decode, encode, golomb_parameter, Codec};

fn codeword(write: impl Fn(&mut BitVec)) -> String {
    let mut bits = BitVec::new();
    write(&mut bits);
    bits.to_bit_string()
}

fn main() -> seclud::Result<()> {
    println!("gamma(9)       = {}", codeword(|b| write_gamma(b, 9)));
    println!("delta(9)       = {}", codeword(|b| write_delta(b, 9)));
    println!("golomb(9; b=4) = {}", codeword(|b| write_golomb(b, 9, 4)));
    println!("vbyte(300)     = {}", codeword(|b| write_vbyte(b, 300)));

    let universe = 1000;
    let docs: Vec<u32> = (0..100).map(|i| i * 7 + i % 3).collect();
    println!("golomb divisor for 100 of {universe}: {}", golomb_parameter(docs.len() as u64, universe));
    for codec in Codec::ALL {
        let enc = encode(&docs, codec, universe);
        assert_eq!(decode(&enc)?, docs);
        println!("{:>7}: {:4} bits for {} postings", codec.name(), enc.bits.len(), docs.len());
    }
    Ok(())
}
