//! A small wire service around coded retrieval: every server holds one
//! chunk and answers base-protocol queries; the client plans, fans out, and
//! combines.

pub mod client;
pub mod config;
pub mod frame;
pub mod server;
pub mod transport;

pub use client::{Client, ClientOutcome, WireAccounting};
pub use config::{load_scheme, ClientConfig, ProtocolConfig, SchemeFile};
pub use frame::{Kind, StatusReply, WireFrame};
pub use server::{serve_tcp, ServerState};
pub use transport::{spawn_tcp_cluster, InProcessCluster, TcpTransport, Transport};

use thiserror::Error;

use crate::emulation::EmulationError;
use crate::protocol::ProtocolError;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad frame: {0}")]
    Frame(String),
    #[error("server error: {0}")]
    Remote(String),
    #[error("server {0} unreachable")]
    Unreachable(usize),
    #[error(transparent)]
    Emulation(#[from] EmulationError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("config: {0}")]
    Config(String),
}
