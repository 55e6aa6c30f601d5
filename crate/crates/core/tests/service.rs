use std::sync::Arc;

use coded_pir::code::combinators::{concat, even_extend};
use coded_pir::code::PirCode;
use coded_pir::construct::example2_code;
use coded_pir::emulation::{accounting_check, distribute, CodedStore, Database, RecoveryScheme, ResponseMode};
use coded_pir::gf::FieldSpec;
use coded_pir::protocol::{LinearPirProtocol, RandomTape, XorK};
use coded_pir::service::{
    spawn_tcp_cluster, Client, InProcessCluster, ServerState, ServiceError, TcpTransport, Transport,
};

fn states(m: usize, p: &Arc<dyn LinearPirProtocol>) -> Vec<ServerState> {
    (0..m).map(|h| ServerState::new(h, Arc::clone(p))).collect()
}

fn example2_setup(n: usize, seed: u64) -> (Database, CodedStore, Arc<dyn LinearPirProtocol>) {
    let f = FieldSpec::binary();
    let db = Database::random(f.clone(), n, seed);
    let store = distribute(&db, Arc::new(example2_code())).unwrap();
    (db, store, Arc::new(XorK::new(f, 3).unwrap()))
}

fn four_server_code() -> PirCode {
    let f = FieldSpec::binary();
    even_extend(&concat(&PirCode::parity(&f, 2), &PirCode::identity(&f, 2)).unwrap()).unwrap()
}

#[test]
fn example2_wire_payload_matches_closed_form() {
    let (db, store, p) = example2_setup(32, 11);
    let cluster = InProcessCluster::spawn(states(8, &p));
    let client = Client::new(&cluster, Arc::clone(store.scheme()), Arc::clone(&p)).unwrap();
    client.upload(&store).unwrap();
    for i in 0..32 {
        let out = client.retrieve(i, ResponseMode::Permuted, false, &mut RandomTape::split(5, i as u64)).unwrap();
        assert_eq!(out.value, db.get(i));
        assert_eq!((out.wire.payload_up_bits, out.wire.payload_down_bits), (64, 8));
        assert_eq!(out.wire.frame_down_bytes, 8 * (9 + 4 + 1));
        accounting_check(&out.session, p.as_ref()).unwrap();
    }
}

#[test]
fn transports_are_byte_identical() {
    let (_, store, p) = example2_setup(24, 3);
    let local = InProcessCluster::spawn(states(8, &p));
    let tcp = TcpTransport::new(spawn_tcp_cluster(states(8, &p)).unwrap());
    let run = |t: &dyn Transport| {
        let client = Client::new(t, Arc::clone(store.scheme()), Arc::clone(&p)).unwrap();
        client.upload(&store).unwrap();
        (0..24)
            .map(|i| {
                let out = client.retrieve(i, ResponseMode::Permuted, false, &mut RandomTape::new(77)).unwrap();
                (out.value, out.transcript)
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(&local), run(&tcp));
}

#[test]
fn all_answers_mode_over_the_wire() {
    let (db, store, p) = example2_setup(16, 9);
    let cluster = InProcessCluster::spawn(states(8, &p));
    let client = Client::new(&cluster, Arc::clone(store.scheme()), Arc::clone(&p)).unwrap();
    client.upload(&store).unwrap();
    for i in 0..16 {
        let out = client.retrieve(i, ResponseMode::AllAnswers, false, &mut RandomTape::new(i as u64)).unwrap();
        assert_eq!(out.value, db.get(i));
        assert_eq!(out.wire.payload_down_bits, 8 * 3);
    }
}

#[test]
fn robust_retrieval_after_a_kill() {
    let f = FieldSpec::binary();
    let code: Arc<dyn RecoveryScheme> = Arc::new(four_server_code());
    assert_eq!((code.servers(), code.k()), (6, 4));
    let db = Database::random(f.clone(), 8, 21);
    let store = distribute(&db, Arc::clone(&code)).unwrap();
    let p: Arc<dyn LinearPirProtocol> = Arc::new(XorK::new(f, 3).unwrap());
    let cluster = InProcessCluster::spawn(states(6, &p));
    let client = Client::new(&cluster, Arc::clone(&code), Arc::clone(&p)).unwrap();
    client.upload(&store).unwrap();
    cluster.kill(2);
    let strict = client.retrieve(1, ResponseMode::Permuted, false, &mut RandomTape::new(1));
    assert!(matches!(strict, Err(ServiceError::Unreachable(2))));
    for i in 0..8 {
        let out = client.retrieve(i, ResponseMode::Permuted, true, &mut RandomTape::new(i as u64)).unwrap();
        assert_eq!(out.value, db.get(i));
        assert!(out.session.plan.envelopes[2].is_none());
        assert_eq!(out.wire.servers_contacted, 5);
        accounting_check(&out.session, p.as_ref()).unwrap();
    }
}

#[test]
fn all_servers_down() {
    let (_, store, p) = example2_setup(16, 1);
    let cluster = InProcessCluster::spawn(states(8, &p));
    let client = Client::new(&cluster, Arc::clone(store.scheme()), Arc::clone(&p)).unwrap();
    client.upload(&store).unwrap();
    for h in 0..8 {
        cluster.kill(h);
    }
    assert!(client.retrieve(0, ResponseMode::Permuted, true, &mut RandomTape::new(0)).is_err());
    assert!(client.retrieve(0, ResponseMode::Permuted, false, &mut RandomTape::new(0)).is_err());
    let dead = TcpTransport::new(vec!["127.0.0.1:1".into(); 8]);
    let client = Client::new(&dead, Arc::clone(store.scheme()), p).unwrap();
    assert!(matches!(client.upload(&store), Err(ServiceError::Unreachable(_))));
}

#[test]
fn retrieval_needs_uploaded_chunks() {
    let (_, store, p) = example2_setup(16, 1);
    let cluster = InProcessCluster::spawn(states(8, &p));
    let client = Client::new(&cluster, Arc::clone(store.scheme()), Arc::clone(&p)).unwrap();
    assert!(client.retrieve(0, ResponseMode::Permuted, false, &mut RandomTape::new(0)).is_err());
    client.upload(&store).unwrap();
    assert!(matches!(client.upload(&store), Err(ServiceError::Remote(_))));
    let wrong = InProcessCluster::spawn(states(7, &p));
    assert!(Client::new(&wrong, Arc::clone(store.scheme()), p).is_err());
}
