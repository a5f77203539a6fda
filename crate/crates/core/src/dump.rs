//! Binary strategy dump.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes   "ECSTAT01"
//! n        u8        vertex count
//! k        u8        color count
//! vlen     u16       length of the variant name
//! variant  vlen      UTF-8 variant name
//! glen     u16       length of the graph label
//! graph    glen      UTF-8 graph label
//! count    u64       number of state records
//! records  count x 41 bytes
//!   key    4 x u64   canonical packed state key
//!   status u8        0 = Alice safe, 1 = Bob attracted, 2 = terminal Bob win
//!   rank   u32       attractor rank, u32::MAX when safe
//!   best   u32       recommended successor record index, u32::MAX if none
//! ```
//!
//! Record 0 is the initial state. Records appear in exploration order, so
//! the file is identical for any thread count.

use std::io::{self, Read, Write};

use crate::solver::Solved;
use crate::state::StateKey;

pub const MAGIC: &[u8; 8] = b"ECSTAT01";
pub const RECORD_BYTES: usize = 41;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DumpRecord {
    pub key: StateKey,
    pub status: u8,
    pub rank: u32,
    pub best: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyDump {
    pub n: u8,
    pub k: u8,
    pub variant: String,
    pub graph: String,
    pub records: Vec<DumpRecord>,
}

impl StrategyDump {
    pub fn from_solved(solved: &Solved) -> Self {
        let arena = &solved.arena;
        let (rank, best) = solved.table.raw();
        let records = (0..arena.len())
            .map(|i| {
                let status = if arena.is_bob_win(i) {
                    2
                } else if rank[i] == u32::MAX {
                    0
                } else {
                    1
                };
                let best = match best[i] {
                    u32::MAX => u32::MAX,
                    j => arena.successors(i)[j as usize],
                };
                DumpRecord { key: arena.key(i), status, rank: rank[i], best }
            })
            .collect();
        let game = solved.game();
        StrategyDump {
            n: game.n() as u8,
            k: game.k() as u8,
            variant: game.config().to_string(),
            graph: game.graph().label().to_string(),
            records,
        }
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[self.n, self.k])?;
        for text in [&self.variant, &self.graph] {
            let len = u16::try_from(text.len()).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "name too long"))?;
            w.write_all(&len.to_le_bytes())?;
            w.write_all(text.as_bytes())?;
        }
        w.write_all(&(self.records.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(RECORD_BYTES * self.records.len());
        for r in &self.records {
            for word in r.key.0 {
                buf.extend_from_slice(&word.to_le_bytes());
            }
            buf.push(r.status);
            buf.extend_from_slice(&r.rank.to_le_bytes());
            buf.extend_from_slice(&r.best.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read_from(mut r: impl Read) -> io::Result<Self> {
        let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not a strategy dump"));
        }
        let mut nk = [0u8; 2];
        r.read_exact(&mut nk)?;
        let mut text = || -> io::Result<String> {
            let mut len = [0u8; 2];
            r.read_exact(&mut len)?;
            let mut bytes = vec![0u8; u16::from_le_bytes(len) as usize];
            r.read_exact(&mut bytes)?;
            String::from_utf8(bytes).map_err(|_| bad("name is not UTF-8"))
        };
        let variant = text()?;
        let graph = text()?;
        let mut count = [0u8; 8];
        r.read_exact(&mut count)?;
        let count = u64::from_le_bytes(count) as usize;
        let mut records = Vec::with_capacity(count.min(1 << 20));
        let mut rec = [0u8; RECORD_BYTES];
        let word = |b: &[u8]| u64::from_le_bytes(b.try_into().unwrap());
        let half = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap());
        for _ in 0..count {
            r.read_exact(&mut rec)?;
            records.push(DumpRecord {
                key: StateKey([word(&rec[0..8]), word(&rec[8..16]), word(&rec[16..24]), word(&rec[24..32])]),
                status: rec[32],
                rank: half(&rec[33..37]),
                best: half(&rec[37..41]),
            });
        }
        Ok(StrategyDump { n: nk[0], k: nk[1], variant, graph, records })
    }
}
