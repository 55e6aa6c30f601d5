//! Per-server state and request handling, plus the TCP daemon loop.

use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};

use super::frame::{
    answer_payload, parse_query, parse_store, status_payload, Kind, StatusReply, WireFrame,
};
use super::ServiceError;
use crate::emulation::answer_envelope;
use crate::gf::{Elem, FieldSpec};
use crate::protocol::LinearPirProtocol;

pub struct ServerState {
    index: usize,
    field: FieldSpec,
    protocol: Arc<dyn LinearPirProtocol>,
    chunk: Option<Vec<Vec<Elem>>>,
    /// `(session, carried index)` of every answered query.
    log: Vec<(u32, u8)>,
}

impl ServerState {
    pub fn new(index: usize, protocol: Arc<dyn LinearPirProtocol>) -> Self {
        Self { index, field: protocol.field().clone(), protocol, chunk: None, log: Vec::new() }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn log(&self) -> &[(u32, u8)] {
        &self.log
    }

    fn status(&self) -> StatusReply {
        let (rows, len) = self.chunk.as_ref().map_or((0, 0), |c| (c.len(), c.first().map_or(0, Vec::len)));
        StatusReply { server: self.index as u32, rows: rows as u16, part_len: len as u32, answered: self.log.len() as u32 }
    }

    fn handle_inner(&mut self, f: &WireFrame) -> Result<WireFrame, ServiceError> {
        match f.kind {
            Kind::StoreChunk => {
                if self.chunk.is_some() {
                    return Err(ServiceError::Remote("chunk already stored".into()));
                }
                let cells = parse_store(&f.payload)?;
                if let Some(&bad) = cells.iter().flatten().find(|&&a| !self.field.contains(a)) {
                    return Err(ServiceError::Remote(format!("symbol {bad} outside GF({})", self.field.order())));
                }
                self.chunk = Some(cells);
                Ok(WireFrame::new(Kind::Status, f.session, status_payload(&self.status())))
            }
            Kind::Query => {
                let chunk = self.chunk.as_ref().ok_or_else(|| ServiceError::Remote("no chunk stored".into()))?;
                let env = parse_query(&f.payload)?;
                let len = chunk.first().map_or(0, Vec::len);
                if env.query.len() != len {
                    return Err(ServiceError::Remote(format!("query of {} symbols for chunks of {len}", env.query.len())));
                }
                if let Some(&bad) = env.query.iter().find(|&&a| !self.field.contains(a)) {
                    return Err(ServiceError::Remote(format!("query symbol {bad} outside GF({})", self.field.order())));
                }
                let answer = answer_envelope(self.protocol.as_ref(), chunk, &env)
                    .map_err(|e| ServiceError::Remote(e.to_string()))?;
                self.log.push((f.session, env.index));
                Ok(WireFrame::new(Kind::Answer, f.session, answer_payload(&answer)))
            }
            Kind::Status => Ok(WireFrame::new(Kind::Status, f.session, status_payload(&self.status()))),
            Kind::Answer | Kind::Error => Err(ServiceError::Remote(format!("unexpected {:?} request", f.kind))),
        }
    }

    /// Every request gets exactly one reply; failures become `ERROR`.
    pub fn handle(&mut self, f: &WireFrame) -> WireFrame {
        self.handle_inner(f).unwrap_or_else(|e| WireFrame::error(f.session, e))
    }

    /// Decodes raw bytes first; undecodable input also yields `ERROR`.
    pub fn handle_bytes(&mut self, bytes: &[u8]) -> Vec<u8> {
        match WireFrame::decode(bytes) {
            Ok((f, used)) if used == bytes.len() => self.handle(&f).encode(),
            Ok(_) => WireFrame::error(0, "trailing bytes after frame").encode(),
            Err(e) => WireFrame::error(0, e).encode(),
        }
    }
}

fn serve_connection(mut stream: TcpStream, state: Arc<Mutex<ServerState>>) {
    loop {
        let reply = match WireFrame::read_from(&mut stream) {
            Ok(f) => state.lock().expect("server state lock").handle(&f),
            Err(ServiceError::Io(_)) => return,
            Err(e) => {
                let _ = WireFrame::error(0, e).write_to(&mut stream);
                return;
            }
        };
        if reply.write_to(&mut stream).is_err() {
            return;
        }
    }
}

/// Accepts connections until the listener fails; one thread per connection.
pub fn serve_tcp(listener: TcpListener, state: ServerState) -> Result<(), ServiceError> {
    let state = Arc::new(Mutex::new(state));
    for conn in listener.incoming() {
        let stream = conn?;
        let state = Arc::clone(&state);
        std::thread::spawn(move || serve_connection(stream, state));
    }
    Ok(())
}
