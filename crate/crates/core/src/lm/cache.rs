//! Binary model cache: raw n-gram counts plus the discount mode, behind a
//! versioned header. Loading re-estimates the model, which is cheap next to
//! counting.
//!
//! Layout (little endian):
//! magic `RASMLM\0\0`, u32 version, u8 order, u8 mode tag, f64 fixed discount,
//! u32 vocabulary size and length-prefixed UTF-8 words, then for each order a
//! u64 entry count followed by `order` u32 ids and a u64 count per entry,
//! sorted by ids.

use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::counts::{NgramCounts, BOS, EOS, UNK};
use super::kn::DiscountMode;
use super::LmError;

pub const CACHE_MAGIC: [u8; 8] = *b"RASMLM\0\0";
pub const CACHE_VERSION: u32 = 1;

pub fn write_cache<W: Write>(
    counts: &NgramCounts,
    mode: DiscountMode,
    mut out: W,
) -> Result<(), LmError> {
    out.write_all(&CACHE_MAGIC)?;
    out.write_u32::<LE>(CACHE_VERSION)?;
    out.write_u8(counts.order() as u8)?;
    let (tag, d) = match mode {
        DiscountMode::Modified => (0, 0.0),
        DiscountMode::Fixed(d) => (1, d),
    };
    out.write_u8(tag)?;
    out.write_f64::<LE>(d)?;
    let words = counts.vocab().words();
    out.write_u32::<LE>(words.len() as u32)?;
    for w in words {
        out.write_u32::<LE>(w.len() as u32)?;
        out.write_all(w.as_bytes())?;
    }
    for k in 1..=counts.order() {
        let mut entries: Vec<_> = counts.table(k).iter().collect();
        entries.sort_unstable();
        out.write_u64::<LE>(entries.len() as u64)?;
        for (gram, &c) in entries {
            for &id in gram.iter() {
                out.write_u32::<LE>(id)?;
            }
            out.write_u64::<LE>(c)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_cache<R: Read>(mut input: R) -> Result<(NgramCounts, DiscountMode), LmError> {
    let bad = |m: &str| LmError::Cache(m.to_owned());
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if magic != CACHE_MAGIC {
        return Err(bad("not a model cache"));
    }
    let version = input.read_u32::<LE>()?;
    if version != CACHE_VERSION {
        return Err(LmError::Cache(format!(
            "unsupported version {version}, expected {CACHE_VERSION}"
        )));
    }
    let order = input.read_u8()? as usize;
    let tag = input.read_u8()?;
    let d = input.read_f64::<LE>()?;
    let mode = match tag {
        0 => DiscountMode::Modified,
        1 => DiscountMode::Fixed(d),
        _ => return Err(bad("unknown discount mode")),
    };
    let mut counts = NgramCounts::new(order)?;
    let n_words = input.read_u32::<LE>()? as usize;
    for i in 0..n_words {
        let len = input.read_u32::<LE>()? as usize;
        let mut buf = vec![0u8; len];
        input.read_exact(&mut buf)?;
        let word = String::from_utf8(buf).map_err(|_| bad("vocabulary entry is not UTF-8"))?;
        if i < 3 && word != [UNK, BOS, EOS][i] {
            return Err(bad("reserved tokens missing"));
        }
        if counts.vocab_mut().intern(&word) as usize != i {
            return Err(bad("duplicate vocabulary entry"));
        }
    }
    let mut gram = vec![0u32; order];
    for k in 1..=order {
        let n = input.read_u64::<LE>()?;
        for _ in 0..n {
            for slot in gram.iter_mut().take(k) {
                *slot = input.read_u32::<LE>()?;
                if *slot as usize >= n_words {
                    return Err(bad("token id out of range"));
                }
            }
            let c = input.read_u64::<LE>()?;
            counts.insert_raw(&gram[..k], c);
        }
    }
    Ok((counts, mode))
}
