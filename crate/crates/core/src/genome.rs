//! Byte-sequence genomes: gene decoding into gate networks, mutation
//! operators, and on-disk formats.

use std::io::{Read, Write};
use std::path::Path;

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::brain::{Brain, Gate};
use crate::error::{Error, Result};

pub const MIN_GENOME_LEN: usize = 1_000;
pub const MAX_GENOME_LEN: usize = 20_000;
/// Default length of generation-0 genomes.
pub const INITIAL_GENOME_LEN: usize = 5_000;
/// Start codons planted into fresh random genomes so generation 0 decodes to
/// working circuits.
pub const PLANTED_CODONS: usize = 12;

/// Byte pair that opens a gene.
pub const START_CODON: [u8; 2] = [42, 213];
/// Bytes following the codon: in_a, in_b, out, then four truth bits.
pub const GENE_PAYLOAD_LEN: usize = 7;
/// Decoding stops after this many genes.
pub const MAX_GATES: usize = 64;

/// Duplicated / deleted chunk length bounds for structural mutations.
pub const CHUNK_MIN: usize = 16;
pub const CHUNK_MAX: usize = 512;

/// Per-offspring mutation probabilities. `point_rate` is per byte;
/// `insert_rate` and `delete_rate` are per genome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationRates {
    pub point_rate: f64,
    pub insert_rate: f64,
    pub delete_rate: f64,
}

impl Default for MutationRates {
    fn default() -> Self {
        MutationRates {
            point_rate: 0.005,
            insert_rate: 0.05,
            delete_rate: 0.05,
        }
    }
}

impl MutationRates {
    pub fn validate(&self) -> Result<()> {
        for value in [self.point_rate, self.insert_rate, self.delete_rate] {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(Error::MutationRate { value });
            }
        }
        Ok(())
    }
}

/// The unit of variation and inheritance: a plain byte sequence. Gate genes
/// are read wherever a start codon appears.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genome {
    bytes: Vec<u8>,
}

impl Genome {
    /// Wrap raw bytes. Length bounds are an evolutionary-lifecycle invariant
    /// (enforced by [`random_genome`] and [`Genome::mutate`]), not a
    /// construction constraint; tests and tools may build short genomes.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Genome { bytes }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Decode into a gate network. Scans for start codons; each occurrence
    /// opens a 7-byte gene (in_a, in_b, out mod 16; four truth bytes mod 2).
    /// Genes truncated by the genome end are discarded, overlapping codons
    /// each produce a gene, and the first [`MAX_GATES`] genes win. Total:
    /// any byte sequence decodes, possibly to an empty brain.
    pub fn decode(&self) -> Brain {
        let b = &self.bytes;
        let mut gates = Vec::new();
        let mut i = 0;
        while i + 1 < b.len() && gates.len() < MAX_GATES {
            if b[i] == START_CODON[0] && b[i + 1] == START_CODON[1] {
                let payload = &b[i + 2..];
                if payload.len() >= GENE_PAYLOAD_LEN {
                    gates.push(Gate {
                        in_a: payload[0] % 16,
                        in_b: payload[1] % 16,
                        out: payload[2] % 16,
                        truth: [
                            payload[3] % 2,
                            payload[4] % 2,
                            payload[5] % 2,
                            payload[6] % 2,
                        ],
                    });
                }
            }
            i += 1;
        }
        Brain::new(gates, Vec::new())
    }

    /// Apply point substitutions, then at most one chunk duplication and one
    /// chunk deletion. The result is clamped to the genome length bounds.
    /// Deterministic given the seed.
    pub fn mutate(&self, rates: &MutationRates, seed: u64) -> Genome {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.mutate_with_rng(rates, &mut rng)
    }

    pub fn mutate_with_rng<R: Rng>(&self, rates: &MutationRates, rng: &mut R) -> Genome {
        rates.validate().expect("invalid mutation rates");
        let mut bytes = self.bytes.clone();

        // Point substitutions: per-byte Bernoulli(point_rate), realized as a
        // binomial count plus a uniform position sample.
        if rates.point_rate > 0.0 && !bytes.is_empty() {
            let n = bytes.len();
            let count = Binomial::new(n as u64, rates.point_rate)
                .expect("validated rate")
                .sample(rng) as usize;
            for idx in rand::seq::index::sample(rng, n, count) {
                bytes[idx] = rng.random();
            }
        }

        // Duplication: copy a random contiguous chunk in place (tandem),
        // truncating if the result would exceed the maximum length.
        if rates.insert_rate > 0.0 && rng.random_bool(rates.insert_rate) && !bytes.is_empty() {
            let max_chunk = CHUNK_MAX.min(bytes.len());
            let min_chunk = CHUNK_MIN.min(max_chunk);
            let chunk_len = rng.random_range(min_chunk..=max_chunk);
            let start = rng.random_range(0..=bytes.len() - chunk_len);
            let chunk: Vec<u8> = bytes[start..start + chunk_len].to_vec();
            let at = start + chunk_len;
            bytes.splice(at..at, chunk);
            if bytes.len() > MAX_GENOME_LEN {
                bytes.truncate(MAX_GENOME_LEN);
            }
        }

        // Deletion: drop a random contiguous chunk, never shrinking below
        // the minimum length.
        if rates.delete_rate > 0.0 && rng.random_bool(rates.delete_rate) {
            let slack = bytes.len().saturating_sub(MIN_GENOME_LEN);
            let max_chunk = CHUNK_MAX.min(slack);
            if max_chunk > 0 {
                let min_chunk = CHUNK_MIN.min(max_chunk);
                let chunk_len = rng.random_range(min_chunk..=max_chunk);
                let start = rng.random_range(0..=bytes.len() - chunk_len);
                bytes.drain(start..start + chunk_len);
            }
        }

        Genome { bytes }
    }

    /// Raw binary file: 8-byte little-endian length header, then the bytes.
    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&(self.bytes.len() as u64).to_le_bytes())?;
        f.write_all(&self.bytes)?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Genome> {
        let mut f = std::fs::File::open(path)?;
        let mut header = [0u8; 8];
        f.read_exact(&mut header)
            .map_err(|_| Error::MalformedGenome("missing length header".into()))?;
        let len = u64::from_le_bytes(header) as usize;
        let mut bytes = Vec::new();
        f.read_to_end(&mut bytes)?;
        if bytes.len() != len {
            return Err(Error::MalformedGenome(format!(
                "header says {len} bytes, file holds {}",
                bytes.len()
            )));
        }
        Ok(Genome { bytes })
    }

    /// Portable JSON form: a bare array of integers.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.bytes)?)
    }

    pub fn from_json(text: &str) -> Result<Genome> {
        Ok(Genome { bytes: serde_json::from_str(text)? })
    }
}

/// Uniform random genome of the given length with [`PLANTED_CODONS`] start
/// codons placed at non-overlapping positions, each with room for a full
/// gene payload. Errors if the length is outside the configured bounds.
pub fn random_genome(length: usize, seed: u64) -> Result<Genome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_genome_with_rng(length, &mut rng)
}

pub fn random_genome_with_rng<R: Rng>(length: usize, rng: &mut R) -> Result<Genome> {
    if !(MIN_GENOME_LEN..=MAX_GENOME_LEN).contains(&length) {
        return Err(Error::GenomeLength {
            len: length,
            min: MIN_GENOME_LEN,
            max: MAX_GENOME_LEN,
        });
    }
    let mut bytes: Vec<u8> = (0..length).map(|_| rng.random()).collect();
    let usable = length - (START_CODON.len() + GENE_PAYLOAD_LEN);
    let mut placed: Vec<usize> = Vec::with_capacity(PLANTED_CODONS);
    while placed.len() < PLANTED_CODONS {
        let p = rng.random_range(0..=usable);
        if placed.iter().all(|&q| p.abs_diff(q) >= START_CODON.len()) {
            bytes[p] = START_CODON[0];
            bytes[p + 1] = START_CODON[1];
            placed.push(p);
        }
    }
    Ok(Genome { bytes })
}
