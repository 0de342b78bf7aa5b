//! Ingest documents, build the inverted index and persist it.
//!
//! ```bash
//! cargo run --example build_index
//! ```

use seclud::corpus::{ingest, InputFormat};
use seclud::index::{bits_per_posting, build_index, store, Codec};

const DOCS: &str = r#"{"id": "a", "text": "Clustering documents speeds up conjunctive queries"}
{"id": "b", "text": "Posting lists are sorted lists of document IDs"}
{"id": "c", "text": "Conjunctive queries intersect posting lists"}
{"id": "d", "text": "Golomb and Elias codes compress posting lists"}
"#;

fn main() -> seclud::Result<()> {
    let corpus = ingest(DOCS.as_bytes(), InputFormat::Jsonl)?;
    println!("{} documents, {} distinct terms", corpus.num_docs(), corpus.num_terms());

    // term IDs are ranked by document frequency, most frequent first
    let index = build_index(&corpus);
    for t in 0..4 {
        println!("{:>12}: {:?}", corpus.term(t), index.posting(t));
    }
    for codec in Codec::ALL {
        println!("{:>7}: {:.2} bits/posting", codec.name(), bits_per_posting(&index, codec));
    }

    let dir = std::env::temp_dir().join("seclud-example-index");
    store::save(&dir, &corpus, Codec::Gamma)?;
    let loaded = store::load(&dir)?;
    assert_eq!(loaded, corpus);
    println!("saved and reloaded {}", dir.join(store::INDEX_FILE).display());
    Ok(())
}
