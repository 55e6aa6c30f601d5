//! Ways of moving encoded frames to a server and back.

use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{channel, Sender};
use std::sync::Mutex;
use std::thread::JoinHandle;
use std::time::Duration;

use super::frame::WireFrame;
use super::server::{serve_tcp, ServerState};
use super::ServiceError;

/// One request, one reply, both as encoded frames.
pub trait Transport: Sync {
    fn servers(&self) -> usize;
    fn exchange(&self, server: usize, request: &[u8]) -> Result<Vec<u8>, ServiceError>;
}

type Job = (Vec<u8>, Sender<Vec<u8>>);

/// Each server runs on its own thread behind a channel. A killed server
/// stops answering.
pub struct InProcessCluster {
    links: Vec<Mutex<Option<Sender<Job>>>>,
    threads: Mutex<Vec<JoinHandle<()>>>,
}

impl InProcessCluster {
    pub fn spawn(states: Vec<ServerState>) -> Self {
        let mut links = Vec::with_capacity(states.len());
        let mut threads = Vec::with_capacity(states.len());
        for mut state in states {
            let (tx, rx) = channel::<Job>();
            threads.push(std::thread::spawn(move || {
                for (request, reply) in rx {
                    let _ = reply.send(state.handle_bytes(&request));
                }
            }));
            links.push(Mutex::new(Some(tx)));
        }
        Self { links, threads: Mutex::new(threads) }
    }

    pub fn kill(&self, server: usize) {
        if let Some(l) = self.links.get(server) {
            l.lock().expect("link lock").take();
        }
    }
}

impl Transport for InProcessCluster {
    fn servers(&self) -> usize {
        self.links.len()
    }

    fn exchange(&self, server: usize, request: &[u8]) -> Result<Vec<u8>, ServiceError> {
        let tx = self
            .links
            .get(server)
            .and_then(|l| l.lock().expect("link lock").clone())
            .ok_or(ServiceError::Unreachable(server))?;
        let (reply_tx, reply_rx) = channel();
        tx.send((request.to_vec(), reply_tx)).map_err(|_| ServiceError::Unreachable(server))?;
        reply_rx.recv().map_err(|_| ServiceError::Unreachable(server))
    }
}

impl Drop for InProcessCluster {
    fn drop(&mut self) {
        for l in &self.links {
            l.lock().expect("link lock").take();
        }
        for t in self.threads.lock().expect("thread lock").drain(..) {
            let _ = t.join();
        }
    }
}

/// A fresh connection per exchange.
pub struct TcpTransport {
    endpoints: Vec<String>,
    timeout: Duration,
}

impl TcpTransport {
    pub fn new(endpoints: Vec<String>) -> Self {
        Self { endpoints, timeout: Duration::from_secs(5) }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn connect(&self, server: usize) -> Result<TcpStream, ServiceError> {
        let endpoint = self.endpoints.get(server).ok_or(ServiceError::Unreachable(server))?;
        let addrs: Vec<SocketAddr> =
            endpoint.to_socket_addrs().map_err(|_| ServiceError::Unreachable(server))?.collect();
        for a in addrs {
            if let Ok(s) = TcpStream::connect_timeout(&a, self.timeout) {
                s.set_read_timeout(Some(self.timeout))?;
                s.set_write_timeout(Some(self.timeout))?;
                return Ok(s);
            }
        }
        Err(ServiceError::Unreachable(server))
    }
}

impl Transport for TcpTransport {
    fn servers(&self) -> usize {
        self.endpoints.len()
    }

    fn exchange(&self, server: usize, request: &[u8]) -> Result<Vec<u8>, ServiceError> {
        use std::io::Write;
        let mut stream = self.connect(server)?;
        stream.write_all(request).map_err(|_| ServiceError::Unreachable(server))?;
        let reply = WireFrame::read_from(&mut stream).map_err(|e| match e {
            ServiceError::Io(_) => ServiceError::Unreachable(server),
            e => e,
        })?;
        Ok(reply.encode())
    }
}

/// Binds every server to an ephemeral localhost port and serves it on a
/// background thread. Returns the endpoints.
pub fn spawn_tcp_cluster(states: Vec<ServerState>) -> Result<Vec<String>, ServiceError> {
    let mut endpoints = Vec::with_capacity(states.len());
    for state in states {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        endpoints.push(listener.local_addr()?.to_string());
        std::thread::spawn(move || serve_tcp(listener, state));
    }
    Ok(endpoints)
}
