//! Client side: upload chunks, then run retrievals over a transport.

use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use super::frame::{parse_answer, parse_status, query_payload, store_payload, Kind, StatusReply, WireFrame};
use super::transport::Transport;
use super::ServiceError;
use crate::emulation::{complete, plan, Accounting, CodedStore, Plan, RecoveryScheme, ResponseMode, RetrieveOptions, Session};
use crate::gf::Elem;
use crate::protocol::{Coins, LinearPirProtocol};

/// Traffic of one retrieval. Payload bits count query and answer symbols
/// at `bits_per_element` each; frame bytes are what crossed the wire,
/// headers and one byte per symbol included.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WireAccounting {
    pub payload_up_bits: u64,
    pub payload_down_bits: u64,
    pub frame_up_bytes: u64,
    pub frame_down_bytes: u64,
    pub servers_contacted: usize,
}

#[derive(Debug, Clone)]
pub struct ClientOutcome {
    pub value: Elem,
    pub session: Session,
    pub wire: WireAccounting,
    /// `(server, request, reply)` encoded frames, ascending by server.
    pub transcript: Vec<(usize, Vec<u8>, Vec<u8>)>,
}

pub struct Client<'t> {
    transport: &'t dyn Transport,
    scheme: Arc<dyn RecoveryScheme>,
    protocol: Arc<dyn LinearPirProtocol>,
    next_session: AtomicU32,
}

fn expect(reply: &[u8], kind: Kind, session: u32) -> Result<WireFrame, ServiceError> {
    let (f, used) = WireFrame::decode(reply)?;
    if used != reply.len() {
        return Err(ServiceError::Frame("trailing bytes after reply".into()));
    }
    if f.kind == Kind::Error {
        return Err(ServiceError::Remote(String::from_utf8_lossy(&f.payload).into_owned()));
    }
    if f.kind != kind || f.session != session {
        return Err(ServiceError::Frame(format!("expected {kind:?} for session {session}, got {:?}/{}", f.kind, f.session)));
    }
    Ok(f)
}

impl<'t> Client<'t> {
    pub fn new(
        transport: &'t dyn Transport,
        scheme: Arc<dyn RecoveryScheme>,
        protocol: Arc<dyn LinearPirProtocol>,
    ) -> Result<Self, ServiceError> {
        if transport.servers() != scheme.servers() {
            return Err(ServiceError::Config(format!(
                "{} endpoints for {} servers",
                transport.servers(),
                scheme.servers()
            )));
        }
        Ok(Self { transport, scheme, protocol, next_session: AtomicU32::new(1) })
    }

    fn session_id(&self) -> u32 {
        self.next_session.fetch_add(1, Ordering::Relaxed)
    }

    /// Sends `requests[h]` to every server with one, concurrently. Results
    /// come back indexed by server.
    fn fan_out(&self, requests: Vec<Option<Vec<u8>>>) -> Vec<Option<Result<Vec<u8>, ServiceError>>> {
        std::thread::scope(|sc| {
            let handles: Vec<_> = requests
                .iter()
                .enumerate()
                .map(|(h, r)| r.as_ref().map(|r| sc.spawn(move || self.transport.exchange(h, r))))
                .collect();
            handles
                .into_iter()
                .map(|t| t.map(|t| t.join().unwrap_or_else(|_| Err(ServiceError::Remote("transport panicked".into())))))
                .collect()
        })
    }

    /// Stores chunk `h` of `store` on server `h`.
    pub fn upload(&self, store: &CodedStore) -> Result<(), ServiceError> {
        if store.servers() != self.transport.servers() {
            return Err(ServiceError::Config(format!("store has {} chunks", store.servers())));
        }
        let session = self.session_id();
        let requests = (0..store.servers())
            .map(|h| Some(WireFrame::new(Kind::StoreChunk, session, store_payload(store.chunk(h))).encode()))
            .collect();
        for r in self.fan_out(requests).into_iter().flatten() {
            expect(&r?, Kind::Status, session)?;
        }
        Ok(())
    }

    /// STATUS of every server; unreachable servers yield `Err`.
    pub fn status(&self) -> Vec<Result<StatusReply, ServiceError>> {
        let session = self.session_id();
        let request = WireFrame::new(Kind::Status, session, Vec::new()).encode();
        self.fan_out(vec![Some(request); self.transport.servers()])
            .into_iter()
            .map(|r| {
                let f = expect(&r.expect("every server asked")?, Kind::Status, session)?;
                parse_status(&f.payload)
            })
            .collect()
    }

    /// Probes every server, then retrieves global index `i`. With `robust`,
    /// servers that fail the probe are treated as failed; otherwise any
    /// unreachable server aborts the retrieval.
    pub fn retrieve(
        &self,
        i: usize,
        mode: ResponseMode,
        robust: bool,
        coins: &mut dyn Coins,
    ) -> Result<ClientOutcome, ServiceError> {
        let mut failed = Vec::new();
        let mut part_len = None;
        for (h, st) in self.status().into_iter().enumerate() {
            match st {
                Ok(st) if st.rows as usize == self.scheme.rows() => match part_len {
                    None => part_len = Some(st.part_len as usize),
                    Some(l) if l != st.part_len as usize => {
                        return Err(ServiceError::Remote(format!("server {h} holds parts of length {}", st.part_len)))
                    }
                    _ => {}
                },
                Ok(st) if !robust => {
                    return Err(ServiceError::Remote(format!("server {h} holds {} rows", st.rows)));
                }
                Err(e) if !robust => return Err(e),
                _ => failed.push(h),
            }
        }
        let part_len = part_len.ok_or(ServiceError::Unreachable(0))?;
        let opts = RetrieveOptions { mode, failed };
        let plan = plan(self.scheme.as_ref(), part_len, self.protocol.as_ref(), i, &opts, coins)?;
        self.execute(plan)
    }

    fn execute(&self, plan: Plan) -> Result<ClientOutcome, ServiceError> {
        let session = self.session_id();
        let requests: Vec<Option<Vec<u8>>> = plan
            .envelopes
            .iter()
            .map(|e| e.as_ref().map(|e| WireFrame::new(Kind::Query, session, query_payload(e)).encode()))
            .collect();
        let replies = self.fan_out(requests.clone());
        let bits = self.protocol.field().bits_per_element() as u64;
        let mut wire = WireAccounting { servers_contacted: plan.contacted(), ..Default::default() };
        let mut answers: Vec<Option<Vec<Elem>>> = vec![None; plan.envelopes.len()];
        let mut transcript = Vec::new();
        for (h, (req, rep)) in requests.into_iter().zip(replies).enumerate() {
            let (Some(req), Some(rep)) = (req, rep) else { continue };
            let rep = rep?;
            let f = expect(&rep, Kind::Answer, session)?;
            let a = parse_answer(&f.payload)?;
            wire.payload_up_bits += plan.part_len as u64 * bits;
            wire.payload_down_bits += a.len() as u64 * bits;
            wire.frame_up_bytes += req.len() as u64;
            wire.frame_down_bytes += rep.len() as u64;
            answers[h] = Some(a);
            transcript.push((h, req, rep));
        }
        let value = complete(&plan, self.protocol.as_ref(), &answers)?;
        let accounting = Accounting {
            uploaded_bits: wire.payload_up_bits,
            downloaded_bits: wire.payload_down_bits,
            servers_contacted: wire.servers_contacted,
        };
        Ok(ClientOutcome { value, session: Session { plan, answers, accounting }, wire, transcript })
    }
}
