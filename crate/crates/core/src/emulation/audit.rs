//! Checks on completed sessions: communication against the closed forms,
//! and exact privacy of one server's envelope distribution.

use std::collections::HashMap;

use super::retrieve::{dummy_envelope, plan_core, Envelope, ResponseMode, RetrieveOptions, Session};
use super::{EmulationError, RecoveryScheme};
use crate::protocol::{EnumCoins, LinearPirProtocol, PrivacyVerdict, EXACT_SPACE_LIMIT};

/// Compares measured payload bits with `m' * U1(L)` and `m' * rows * D1(L)`
/// for the `m'` contacted servers (all `m` unless some were marked failed).
/// Under [`ResponseMode::AllAnswers`] downloads are `k` times larger.
pub fn accounting_check(session: &Session, p: &dyn LinearPirProtocol) -> Result<(), String> {
    let plan = &session.plan;
    let m = plan.contacted() as u64;
    let per_server_down = plan.rows as u64
        * p.download_bits(plan.part_len)
        * if plan.mode == ResponseMode::AllAnswers { plan.k as u64 } else { 1 };
    let up = m * p.upload_bits(plan.part_len);
    let down = m * per_server_down;
    let a = session.accounting;
    if a.servers_contacted as u64 != m {
        return Err(format!("{} servers contacted, {m} planned", a.servers_contacted));
    }
    if a.uploaded_bits != up || a.downloaded_bits != down {
        return Err(format!(
            "measured {}/{} bits up/down, closed form {up}/{down}",
            a.uploaded_bits, a.downloaded_bits
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CodedPrivacyMode(pub ResponseMode);

/// Envelope multiset of server `h` for target `i`, weighted so that every
/// (tape, sigma, dummy) outcome counts once.
fn envelope_weights(
    scheme: &dyn RecoveryScheme,
    part_len: usize,
    p: &dyn LinearPirProtocol,
    h: usize,
    i: usize,
    mode: ResponseMode,
) -> Result<(HashMap<Envelope, u128>, u128), EmulationError> {
    let opts = RetrieveOptions { mode, failed: vec![] };
    let mut dummy: HashMap<Envelope, u128> = HashMap::new();
    let dummies = EnumCoins::run(EXACT_SPACE_LIMIT, |c| {
        *dummy.entry(dummy_envelope(p, part_len, mode, c)).or_default() += 1;
    })
    .map_err(crate::protocol::ProtocolError::from)?;
    let mut out: HashMap<Envelope, u128> = HashMap::new();
    let mut uncovered = 0u128;
    let mut err = None;
    let tapes = EnumCoins::run(EXACT_SPACE_LIMIT, |c| match plan_core(scheme, part_len, p, i, &opts, c) {
        Ok(plan) => match &plan.envelopes[h] {
            Some(e) => *out.entry(e.clone()).or_default() += dummies,
            None => uncovered += 1,
        },
        Err(e) => err = Some(e),
    })
    .map_err(crate::protocol::ProtocolError::from)?;
    if let Some(e) = err {
        return Err(e);
    }
    for (e, n) in dummy {
        *out.entry(e).or_default() += n * uncovered;
    }
    Ok((out, tapes))
}

/// Exact comparison of server `h`'s envelope distribution (carried index
/// and query) for targets `i1` and `i2`, which may lie in different parts.
pub fn coded_privacy_audit(
    scheme: &dyn RecoveryScheme,
    part_len: usize,
    p: &dyn LinearPirProtocol,
    h: usize,
    i1: usize,
    i2: usize,
    mode: CodedPrivacyMode,
) -> Result<PrivacyVerdict, EmulationError> {
    if h >= scheme.servers() {
        return Err(EmulationError::IndexOutOfRange { i: h, n: scheme.servers() });
    }
    let (a, ta) = envelope_weights(scheme, part_len, p, h, i1, mode.0)?;
    let (b, tb) = envelope_weights(scheme, part_len, p, h, i2, mode.0)?;
    let total_a: u128 = a.values().sum();
    let total_b: u128 = b.values().sum();
    let mut distance = 0.0;
    for key in a.keys().chain(b.keys().filter(|k| !a.contains_key(*k))) {
        let x = a.get(key).copied().unwrap_or(0) as f64 / total_a as f64;
        let y = b.get(key).copied().unwrap_or(0) as f64 / total_b as f64;
        distance += (x - y).abs();
    }
    Ok(PrivacyVerdict { identical: ta == tb && total_a == total_b && a == b, tapes: ta, distance: distance / 2.0 })
}
