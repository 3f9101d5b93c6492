//! Binary oracle files.
//!
//! All integers are little-endian with the widths declared in the header.
//! Layout:
//!
//! ```text
//! magic        8 bytes  "FTDORACL"
//! version      u32      1
//! id width     u8       4   (vertex ids, edge ids, counts, tree arrays)
//! len width    u8       8   (weights, tie keys, lengths, seed)
//! reserved     u16      0
//! digest       32 bytes SHA-256 of the graph in text form
//! n, m, d      u32 ×3
//! seed         u64
//! edges        m × (a u32, b u32, w u64)
//! tie keys     m × u64
//! dist         n² × (true_len u64, tie_key u64)       row-major by source
//! parent       n² × u32  (u32::MAX at the root)       row-major by root
//! parent edge  n² × u32
//! depth        n² × u32
//! euler in     n² × u32
//! euler out    n² × u32
//! entry count  u64      = 4n⁴
//! entries      in key order (u, v, u', v', b₁, b₂), each
//!              count u32, d × edge id u32 (unused slots u32::MAX),
//!              unreachable flag u8, true_len u64, tie_key u64
//! ```

use std::io::{self, Read, Write};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{Edge, FailureSet, Graph, GraphError};
use crate::index::{IndexError, IndexParts, ShortestPathIndex};
use crate::length::CompositeLength;
use crate::query::Oracle;
use crate::tables::{entry_count, OracleTables, TableError};

pub const MAGIC: &[u8; 8] = b"FTDORACL";
pub const VERSION: u32 = 1;
const ID_WIDTH: u8 = 4;
const LEN_WIDTH: u8 = 8;
const NONE32: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not an oracle file")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("unsupported integer widths {0}/{1}")]
    UnsupportedWidths(u8, u8),
    #[error("file ends early")]
    Truncated,
    #[error("{0} trailing bytes after the last entry")]
    TrailingBytes(usize),
    #[error("corrupt oracle file: {0}")]
    Corrupt(String),
    #[error("graph digest does not match")]
    DigestMismatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Tables(#[from] TableError),
}

/// SHA-256 of the graph's text form.
pub fn graph_digest(g: &Graph) -> [u8; 32] {
    Sha256::digest(g.emit().as_bytes()).into()
}

pub fn digest_hex(digest: &[u8; 32]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn to_u32(x: usize, what: &str) -> io::Result<u32> {
    u32::try_from(x).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, format!("{what} {x} exceeds u32")))
}

/// Serialize into a byte buffer.
pub fn to_bytes(oracle: &Oracle) -> io::Result<Vec<u8>> {
    let g = oracle.graph();
    let n = g.vertex_count();
    let d = oracle.budget();
    let nn = n * n;
    let entries = oracle.tables().len();
    let record = 4 + 4 * d + 1 + 16;
    let mut out = Vec::with_capacity(64 + g.edge_count() * 24 + nn * 36 + entries * record);

    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&[ID_WIDTH, LEN_WIDTH, 0, 0]);
    out.extend_from_slice(&graph_digest(g));
    for x in [n, g.edge_count(), d] {
        out.extend_from_slice(&to_u32(x, "size")?.to_le_bytes());
    }
    out.extend_from_slice(&oracle.seed().to_le_bytes());
    for e in g.edges() {
        out.extend_from_slice(&to_u32(e.a, "vertex")?.to_le_bytes());
        out.extend_from_slice(&to_u32(e.b, "vertex")?.to_le_bytes());
        out.extend_from_slice(&e.weight.to_le_bytes());
    }
    for t in oracle.tie_keys() {
        out.extend_from_slice(&t.to_le_bytes());
    }
    let parts = oracle.index().to_parts();
    for len in &parts.dist {
        let (t, k) = len.raw_parts();
        out.extend_from_slice(&t.to_le_bytes());
        out.extend_from_slice(&k.to_le_bytes());
    }
    for arr in [&parts.parent, &parts.parent_edge, &parts.depth, &parts.tin, &parts.tout] {
        for x in arr {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out.extend_from_slice(&(entries as u64).to_le_bytes());
    for (_, entry) in oracle.tables().entries() {
        let ids = entry.d_star.ids();
        out.extend_from_slice(&to_u32(ids.len(), "count")?.to_le_bytes());
        for i in 0..d {
            let id = ids.get(i).map_or(Ok(NONE32), |&e| to_u32(e, "edge id"))?;
            out.extend_from_slice(&id.to_le_bytes());
        }
        let (t, k) = entry.l_star.raw_parts();
        out.push(entry.l_star.is_unreachable() as u8);
        out.extend_from_slice(&t.to_le_bytes());
        out.extend_from_slice(&k.to_le_bytes());
    }
    Ok(out)
}

pub fn write_oracle(oracle: &Oracle, mut w: impl Write) -> io::Result<()> {
    w.write_all(&to_bytes(oracle)?)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], PersistError> {
        let end = self.pos.checked_add(k).ok_or(PersistError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(PersistError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, PersistError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, PersistError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, PersistError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32s(&mut self, k: usize) -> Result<Vec<u32>, PersistError> {
        (0..k).map(|_| self.u32()).collect()
    }

    fn length(&mut self) -> Result<CompositeLength, PersistError> {
        let (t, k) = (self.u64()?, self.u64()?);
        if t == u64::MAX {
            return Err(PersistError::Corrupt("unflagged unreachable length".into()));
        }
        Ok(CompositeLength::new(t, k))
    }
}

/// Parse an oracle file. When `expected` is given, its digest must match.
pub fn from_bytes(buf: &[u8], expected: Option<&Graph>) -> Result<Oracle, PersistError> {
    let mut c = Cursor { buf, pos: 0 };
    if c.take(8)? != MAGIC {
        return Err(PersistError::BadMagic);
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(PersistError::UnsupportedVersion(version));
    }
    let (idw, lenw) = (c.u8()?, c.u8()?);
    if (idw, lenw) != (ID_WIDTH, LEN_WIDTH) {
        return Err(PersistError::UnsupportedWidths(idw, lenw));
    }
    c.take(2)?;
    let digest: [u8; 32] = c.take(32)?.try_into().unwrap();
    let n = c.u32()? as usize;
    let m = c.u32()? as usize;
    let d = c.u32()? as usize;
    let seed = c.u64()?;

    // Bound allocations by what the buffer can actually hold.
    let remaining = buf.len().saturating_sub(c.pos);
    if m.saturating_mul(32) > remaining || n.saturating_mul(n).saturating_mul(36) > remaining {
        return Err(PersistError::Truncated);
    }

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (a, b, w) = (c.u32()? as usize, c.u32()? as usize, c.u64()?);
        edges.push(Edge::new(a, b, w));
    }
    let graph = Graph::new(n, edges)?;
    if graph_digest(&graph) != digest {
        return Err(PersistError::Corrupt(
            "stored digest does not match stored graph".into(),
        ));
    }
    if let Some(g) = expected {
        if graph_digest(g) != digest {
            return Err(PersistError::DigestMismatch);
        }
    }
    let ties = (0..m).map(|_| c.u64()).collect::<Result<Vec<_>, _>>()?;
    if ties.contains(&0) {
        return Err(PersistError::Corrupt("zero tie key".into()));
    }

    let nn = n * n;
    let dist = (0..nn).map(|_| c.length()).collect::<Result<Vec<_>, _>>()?;
    let parts = IndexParts {
        dist,
        parent: c.u32s(nn)?,
        parent_edge: c.u32s(nn)?,
        depth: c.u32s(nn)?,
        tin: c.u32s(nn)?,
        tout: c.u32s(nn)?,
    };
    let index = ShortestPathIndex::from_parts(&graph, parts)?;

    let count = c.u64()? as u128;
    if count != entry_count(n) {
        return Err(PersistError::Corrupt(format!(
            "{count} table entries, expected {}",
            entry_count(n)
        )));
    }
    let record = 4 + 4 * d + 17;
    if (count as usize).saturating_mul(record) > buf.len() - c.pos {
        return Err(PersistError::Truncated);
    }
    let mut entries = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let k = c.u32()? as usize;
        let ids = c.u32s(d)?;
        if k > d || ids[k..].iter().any(|&x| x != NONE32) {
            return Err(PersistError::Corrupt("bad failure-set record".into()));
        }
        let ids: Vec<usize> = ids[..k].iter().map(|&x| x as usize).collect();
        if ids.windows(2).any(|w| w[0] >= w[1]) || ids.iter().any(|&e| e >= m) {
            return Err(PersistError::Corrupt("failure set not canonical".into()));
        }
        let set = FailureSet::new(&graph, ids).expect("ids checked above");
        let len = match c.u8()? {
            0 => c.length()?,
            1 => {
                let (t, k) = (c.u64()?, c.u64()?);
                if (t, k) != (u64::MAX, u64::MAX) {
                    return Err(PersistError::Corrupt("flagged length is not the sentinel".into()));
                }
                CompositeLength::UNREACHABLE
            }
            f => return Err(PersistError::Corrupt(format!("bad reachability flag {f}"))),
        };
        entries.push((set, len));
    }
    if c.pos != buf.len() {
        return Err(PersistError::TrailingBytes(buf.len() - c.pos));
    }
    let tables = OracleTables::from_entries(n, m, d, entries)?;
    Ok(Oracle::from_components(graph, seed, ties, index, tables))
}

pub fn read_oracle(mut r: impl Read, expected: Option<&Graph>) -> Result<Oracle, PersistError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    from_bytes(&buf, expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::query::BuildOptions;

    fn g1_oracle() -> Oracle {
        Oracle::build(fixtures::g1(), 1, 1, BuildOptions::default()).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let o = g1_oracle();
        let bytes = to_bytes(&o).unwrap();
        let back = from_bytes(&bytes, Some(&fixtures::g1())).unwrap();
        assert_eq!(back, o);
        assert_eq!(to_bytes(&back).unwrap(), bytes);
    }

    #[test]
    fn entry_count_in_header() {
        let bytes = to_bytes(&g1_oracle()).unwrap();
        // header 68 + edges 4·16 + ties 4·8 + dist 16·16 + arrays 5·16·4
        let at = 68 + 64 + 32 + 256 + 320;
        assert_eq!(u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap()), 1024);
        assert_eq!(bytes.len(), at + 8 + 1024 * (4 + 4 + 1 + 16));
    }

    #[test]
    fn rejects_wrong_graph() {
        let bytes = to_bytes(&g1_oracle()).unwrap();
        assert!(matches!(
            from_bytes(&bytes, Some(&fixtures::g6())),
            Err(PersistError::DigestMismatch)
        ));
    }

    #[test]
    fn rejects_damage() {
        let bytes = to_bytes(&g1_oracle()).unwrap();
        assert!(matches!(
            from_bytes(&bytes[..bytes.len() - 1], None),
            Err(PersistError::Truncated)
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(from_bytes(&extra, None), Err(PersistError::TrailingBytes(1))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(from_bytes(&bad, None), Err(PersistError::BadMagic)));
        let mut bad = bytes.clone();
        bad[8] = 2;
        assert!(matches!(
            from_bytes(&bad, None),
            Err(PersistError::UnsupportedVersion(2))
        ));
        // flip a weight: digest no longer matches the stored graph
        let mut bad = bytes;
        bad[68 + 8] ^= 2;
        assert!(matches!(from_bytes(&bad, None), Err(PersistError::Corrupt(_))));
    }
}
