//! Binary voltage-record format: a 64-byte header (magic "SNLB0001",
//! sample rate, sample count, seed; little-endian) followed by the samples
//! as little-endian f64.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SNLB0001";
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct RecordData {
    pub sample_rate: f64,
    pub seed: u64,
    pub samples: Vec<f64>,
}

pub fn write_record<W: Write>(mut out: W, record: &RecordData) -> Result<()> {
    let mut header = [0u8; HEADER_LEN];
    header[..8].copy_from_slice(MAGIC);
    header[8..16].copy_from_slice(&record.sample_rate.to_le_bytes());
    header[16..24].copy_from_slice(&(record.samples.len() as u64).to_le_bytes());
    header[24..32].copy_from_slice(&record.seed.to_le_bytes());
    out.write_all(&header)?;
    let mut buf = Vec::with_capacity(record.samples.len() * 8);
    for s in &record.samples {
        buf.extend_from_slice(&s.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_record<R: Read>(mut input: R) -> Result<RecordData> {
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header)?;
    if &header[..8] != MAGIC {
        return Err(Error::TimeSeries(format!(
            "bad record magic {:?}, expected {:?}",
            &header[..8],
            MAGIC
        )));
    }
    let sample_rate = f64::from_le_bytes(header[8..16].try_into().unwrap());
    let n_samples = u64::from_le_bytes(header[16..24].try_into().unwrap()) as usize;
    let seed = u64::from_le_bytes(header[24..32].try_into().unwrap());
    let mut buf = vec![0u8; n_samples * 8];
    input.read_exact(&mut buf)?;
    let samples = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(RecordData { sample_rate, seed, samples })
}
