//! Binary checkpoint format.
//!
//! Layout: the magic `KFCK1`, then length-prefixed blocks. Each block is a
//! little-endian `u64` byte length followed by that many bytes of
//! little-endian `u64` words. Blocks in order: header
//! `[version, fingerprint, x, next]`, tally, prefix series, and a trailer
//! holding the FNV-1a hash of every preceding byte.

use super::{CensusConfig, CensusState, PrefixTally, Tally, MAX_R};
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 5] = b"KFCK1";
const VERSION: u64 = 1;
const PREFIX_WORDS: usize = 8;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn put_block(out: &mut Vec<u8>, words: &[u64]) {
    out.extend_from_slice(&((words.len() * 8) as u64).to_le_bytes());
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
}

fn tally_words(t: &Tally) -> Vec<u64> {
    let mut w = vec![t.n_good, t.n_in_a, t.pi_twin, t.pi_twin_unrestricted];
    w.extend_from_slice(&t.omega_hist);
    w.push(t.divisor.len() as u64);
    w.extend_from_slice(&t.divisor);
    w.push(t.ell.len() as u64);
    w.extend_from_slice(&t.ell);
    w.extend_from_slice(&[
        t.h.to_bits(),
        t.s,
        t.ub1_extra,
        t.prime_not_coprime,
        t.sixteen_me_violations,
        t.hasse_violations,
        t.excluded.len() as u64,
    ]);
    w.extend_from_slice(&t.excluded);
    w
}

pub(crate) fn save_checkpoint(state: &CensusState, config: &CensusConfig) -> Vec<u8> {
    let mut out = CHECKPOINT_MAGIC.to_vec();
    put_block(
        &mut out,
        &[VERSION, config.fingerprint(), config.x, state.next],
    );
    put_block(&mut out, &tally_words(&state.tally));
    let prefix: Vec<u64> = state
        .prefix
        .iter()
        .flat_map(|p| {
            [
                p.x,
                p.n_good_primes,
                p.n_in_a,
                p.pi_twin,
                p.empirical_s,
                p.ub1_correction,
                p.empirical_h.to_bits(),
                p.ub1_holds as u64,
            ]
        })
        .collect();
    put_block(&mut out, &prefix);
    let sum = fnv1a(&out);
    put_block(&mut out, &[sum]);
    out
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptCheckpoint(msg.into())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn block(&mut self) -> Result<Vec<u64>> {
        let rest = &self.bytes[self.pos..];
        if rest.len() < 8 {
            return Err(corrupt("truncated block length"));
        }
        let len = u64::from_le_bytes(rest[..8].try_into().unwrap());
        if len % 8 != 0 || len > (rest.len() - 8) as u64 {
            return Err(corrupt(format!("bad block length {len}")));
        }
        let body = &rest[8..8 + len as usize];
        self.pos += 8 + len as usize;
        Ok(body
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

struct Words<'a> {
    w: &'a [u64],
    i: usize,
}

impl Words<'_> {
    fn next(&mut self) -> Result<u64> {
        let v = *self.w.get(self.i).ok_or_else(|| corrupt("tally block too short"))?;
        self.i += 1;
        Ok(v)
    }

    fn take(&mut self, n: u64) -> Result<Vec<u64>> {
        let n = usize::try_from(n).map_err(|_| corrupt("length overflow"))?;
        let end = self.i.checked_add(n).filter(|&e| e <= self.w.len());
        let end = end.ok_or_else(|| corrupt("tally block too short"))?;
        let v = self.w[self.i..end].to_vec();
        self.i = end;
        Ok(v)
    }
}

fn parse_tally(words: &[u64], n_div: usize, n_ell: usize) -> Result<Tally> {
    let mut r = Words { w: words, i: 0 };
    let mut t = Tally::empty(n_div, n_ell);
    t.n_good = r.next()?;
    t.n_in_a = r.next()?;
    t.pi_twin = r.next()?;
    t.pi_twin_unrestricted = r.next()?;
    let hist = r.take((MAX_R + 2) as u64)?;
    t.omega_hist.copy_from_slice(&hist);
    let nd = r.next()?;
    t.divisor = r.take(nd)?;
    let ne = r.next()?;
    t.ell = r.take(ne)?;
    if t.divisor.len() != n_div || t.ell.len() != n_ell {
        return Err(Error::ConfigMismatch);
    }
    t.h = f64::from_bits(r.next()?);
    t.s = r.next()?;
    t.ub1_extra = r.next()?;
    t.prime_not_coprime = r.next()?;
    t.sixteen_me_violations = r.next()?;
    t.hasse_violations = r.next()?;
    let nx = r.next()?;
    t.excluded = r.take(nx)?;
    if r.i != words.len() {
        return Err(corrupt("trailing words in tally block"));
    }
    Ok(t)
}

pub(crate) fn load_checkpoint(bytes: &[u8], config: &CensusConfig) -> Result<CensusState> {
    if bytes.len() < CHECKPOINT_MAGIC.len() || &bytes[..5] != CHECKPOINT_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let mut rd = Reader { bytes, pos: 5 };
    let header = rd.block()?;
    let tally = rd.block()?;
    let prefix = rd.block()?;
    let body_end = rd.pos;
    let trailer = rd.block()?;
    if rd.pos != bytes.len() {
        return Err(corrupt("trailing bytes"));
    }
    if trailer.len() != 1 || trailer[0] != fnv1a(&bytes[..body_end]) {
        return Err(corrupt("checksum mismatch"));
    }
    let [version, fingerprint, x, next] = header[..] else {
        return Err(corrupt("bad header block"));
    };
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    if fingerprint != config.fingerprint() || x != config.x {
        return Err(Error::ConfigMismatch);
    }
    if next == 0 || next > x + 1 {
        return Err(corrupt(format!("position {next} outside [1, {}]", x + 1)));
    }
    let tally = parse_tally(&tally, config.divisor_probes.len(), config.ell_probe_set.len())?;
    if prefix.len() % PREFIX_WORDS != 0 {
        return Err(corrupt("ragged prefix block"));
    }
    let prefix = prefix
        .chunks_exact(PREFIX_WORDS)
        .map(|c| PrefixTally {
            x: c[0],
            n_good_primes: c[1],
            n_in_a: c[2],
            pi_twin: c[3],
            empirical_s: c[4],
            ub1_correction: c[5],
            empirical_h: f64::from_bits(c[6]),
            ub1_holds: c[7] != 0,
        })
        .collect();
    Ok(CensusState {
        next,
        tally,
        prefix,
    })
}
