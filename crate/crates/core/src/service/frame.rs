//! Length-prefixed frames.
//!
//! ```text
//! +---------+------+------------+---------+
//! | len u32 | kind | session u32| payload |
//! +---------+------+------------+---------+
//! ```
//! All integers big-endian; `len` counts kind, session and payload. Field
//! symbols travel one per byte.
//!
//! Payloads:
//! - `STORE_CHUNK`: rows u16, part_len u32, rows * part_len symbols
//! - `QUERY`: index u8 (0xFF = all), part_len u32, part_len symbols
//! - `ANSWER`: count u32, count symbols
//! - `STATUS`: empty request; reply is server u32, rows u16, part_len u32,
//!   answered u32
//! - `ERROR`: UTF-8 message

use std::io::{Read, Write};

use super::ServiceError;
use crate::emulation::Envelope;
use crate::gf::Elem;

pub const HEADER_LEN: usize = 9;
/// Frames larger than this are rejected before allocation.
pub const MAX_FRAME: usize = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Kind {
    StoreChunk = 1,
    Query = 2,
    Answer = 3,
    Status = 4,
    Error = 5,
}

impl TryFrom<u8> for Kind {
    type Error = ServiceError;

    fn try_from(b: u8) -> Result<Self, ServiceError> {
        Ok(match b {
            1 => Kind::StoreChunk,
            2 => Kind::Query,
            3 => Kind::Answer,
            4 => Kind::Status,
            5 => Kind::Error,
            _ => return Err(ServiceError::Frame(format!("unknown kind {b}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WireFrame {
    pub kind: Kind,
    pub session: u32,
    pub payload: Vec<u8>,
}

impl WireFrame {
    pub fn new(kind: Kind, session: u32, payload: Vec<u8>) -> Self {
        Self { kind, session, payload }
    }

    pub fn error(session: u32, msg: impl std::fmt::Display) -> Self {
        Self::new(Kind::Error, session, msg.to_string().into_bytes())
    }

    pub fn wire_len(&self) -> usize {
        4 + 5 + self.payload.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.wire_len());
        out.extend(((self.payload.len() + 5) as u32).to_be_bytes());
        out.push(self.kind as u8);
        out.extend(self.session.to_be_bytes());
        out.extend(&self.payload);
        out
    }

    /// Parses one frame from the front of `bytes`; returns it and the number
    /// of bytes consumed.
    pub fn decode(bytes: &[u8]) -> Result<(Self, usize), ServiceError> {
        if bytes.len() < HEADER_LEN {
            return Err(ServiceError::Frame(format!("{} bytes, header needs {HEADER_LEN}", bytes.len())));
        }
        let len = u32::from_be_bytes(bytes[0..4].try_into().expect("4 bytes")) as usize;
        if !(5..=MAX_FRAME).contains(&len) {
            return Err(ServiceError::Frame(format!("length field {len}")));
        }
        if bytes.len() < 4 + len {
            return Err(ServiceError::Frame(format!("truncated: {} of {} bytes", bytes.len(), 4 + len)));
        }
        let kind = Kind::try_from(bytes[4])?;
        let session = u32::from_be_bytes(bytes[5..9].try_into().expect("4 bytes"));
        Ok((Self::new(kind, session, bytes[9..4 + len].to_vec()), 4 + len))
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, ServiceError> {
        let mut head = [0u8; HEADER_LEN];
        r.read_exact(&mut head)?;
        let len = u32::from_be_bytes(head[0..4].try_into().expect("4 bytes")) as usize;
        if !(5..=MAX_FRAME).contains(&len) {
            return Err(ServiceError::Frame(format!("length field {len}")));
        }
        let kind = Kind::try_from(head[4])?;
        let session = u32::from_be_bytes(head[5..9].try_into().expect("4 bytes"));
        let mut payload = vec![0; len - 5];
        r.read_exact(&mut payload)?;
        Ok(Self::new(kind, session, payload))
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), ServiceError> {
        w.write_all(&self.encode())?;
        w.flush()?;
        Ok(())
    }
}

struct Cursor<'a> {
    b: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ServiceError> {
        let s = self.b.get(self.at..self.at + n).ok_or_else(|| ServiceError::Frame("payload too short".into()))?;
        self.at += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, ServiceError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ServiceError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32, ServiceError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn done(&self) -> Result<(), ServiceError> {
        if self.at == self.b.len() {
            Ok(())
        } else {
            Err(ServiceError::Frame(format!("{} trailing payload bytes", self.b.len() - self.at)))
        }
    }
}

pub fn store_payload(cells: &[Vec<Elem>]) -> Vec<u8> {
    let len = cells.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(6 + cells.len() * len);
    out.extend((cells.len() as u16).to_be_bytes());
    out.extend((len as u32).to_be_bytes());
    for c in cells {
        out.extend(c);
    }
    out
}

pub fn parse_store(p: &[u8]) -> Result<Vec<Vec<Elem>>, ServiceError> {
    let mut c = Cursor { b: p, at: 0 };
    let rows = c.u16()? as usize;
    let len = c.u32()? as usize;
    let cells = (0..rows).map(|_| c.take(len).map(<[u8]>::to_vec)).collect::<Result<_, _>>()?;
    c.done()?;
    Ok(cells)
}

pub fn query_payload(env: &Envelope) -> Vec<u8> {
    let mut out = Vec::with_capacity(5 + env.query.len());
    out.push(env.index);
    out.extend((env.query.len() as u32).to_be_bytes());
    out.extend(&env.query);
    out
}

pub fn parse_query(p: &[u8]) -> Result<Envelope, ServiceError> {
    let mut c = Cursor { b: p, at: 0 };
    let index = c.u8()?;
    let len = c.u32()? as usize;
    let query = c.take(len)?.to_vec();
    c.done()?;
    Ok(Envelope { index, query })
}

pub fn answer_payload(symbols: &[Elem]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + symbols.len());
    out.extend((symbols.len() as u32).to_be_bytes());
    out.extend(symbols);
    out
}

pub fn parse_answer(p: &[u8]) -> Result<Vec<Elem>, ServiceError> {
    let mut c = Cursor { b: p, at: 0 };
    let len = c.u32()? as usize;
    let v = c.take(len)?.to_vec();
    c.done()?;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatusReply {
    pub server: u32,
    pub rows: u16,
    pub part_len: u32,
    pub answered: u32,
}

pub fn status_payload(s: &StatusReply) -> Vec<u8> {
    let mut out = Vec::with_capacity(14);
    out.extend(s.server.to_be_bytes());
    out.extend(s.rows.to_be_bytes());
    out.extend(s.part_len.to_be_bytes());
    out.extend(s.answered.to_be_bytes());
    out
}

pub fn parse_status(p: &[u8]) -> Result<StatusReply, ServiceError> {
    let mut c = Cursor { b: p, at: 0 };
    let s = StatusReply { server: c.u32()?, rows: c.u16()?, part_len: c.u32()?, answered: c.u32()? };
    c.done()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let f = WireFrame::new(Kind::Query, 0x01020304, vec![9, 8]);
        assert_eq!(f.encode(), vec![0, 0, 0, 7, 2, 1, 2, 3, 4, 9, 8]);
        assert_eq!(f.wire_len(), 11);
    }

    #[test]
    fn rejects() {
        let mut b = WireFrame::new(Kind::Status, 1, vec![]).encode();
        b[4] = 9;
        assert!(WireFrame::decode(&b).is_err());
        assert!(WireFrame::decode(&[0, 0, 0, 4, 1, 0, 0, 0, 0]).is_err());
        assert!(WireFrame::decode(&[0, 0, 0, 9, 1, 0, 0, 0, 0]).is_err());
        assert!(parse_query(&[0, 0, 0, 0, 3, 1]).is_err());
        assert!(parse_answer(&[0, 0, 0, 1, 1, 1]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(kind in 1u8..=5, session in any::<u32>(), payload in proptest::collection::vec(any::<u8>(), 0..300)) {
            let f = WireFrame::new(Kind::try_from(kind).unwrap(), session, payload);
            let bytes = f.encode();
            let (g, used) = WireFrame::decode(&bytes).unwrap();
            prop_assert_eq!(used, bytes.len());
            prop_assert_eq!(&g, &f);
            let h = WireFrame::read_from(&mut bytes.as_slice()).unwrap();
            prop_assert_eq!(h, f);
        }

        #[test]
        fn payload_round_trips(index in any::<u8>(), q in proptest::collection::vec(0u8..2, 0..40), rows in 1usize..4) {
            let env = Envelope { index, query: q.clone() };
            prop_assert_eq!(parse_query(&query_payload(&env)).unwrap(), env);
            prop_assert_eq!(parse_answer(&answer_payload(&q)).unwrap(), q.clone());
            let cells = vec![q; rows];
            prop_assert_eq!(parse_store(&store_payload(&cells)).unwrap(), cells);
        }
    }
}
