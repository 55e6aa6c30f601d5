//! One coded retrieval: plan the per-server envelopes, collect answers, and
//! combine them. Planning and combining are separate so that a transport
//! can sit in between.

use super::{recipe_servers, CodedStore, EmulationError, RecoveryScheme, Term};
use crate::gf::Elem;
use crate::protocol::{Coins, LinearPirProtocol};

/// Envelope index asking a server for the answers of every base index.
pub const ALL_INDICES: u8 = 0xFF;

/// What a server receives: the base-protocol index it should answer as,
/// and the query vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Envelope {
    pub index: u8,
    pub query: Vec<Elem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseMode {
    /// Recipe `j` is served by base index `sigma(j)` for a uniform `sigma`.
    #[default]
    Permuted,
    /// Servers answer for every base index; envelopes carry [`ALL_INDICES`].
    AllAnswers,
    /// `sigma` fixed to the identity. Leaks the part through the carried
    /// index; kept to show that the audit notices.
    Unpermuted,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RetrieveOptions {
    pub mode: ResponseMode,
    /// Servers known to be down; they receive nothing.
    pub failed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub part: usize,
    pub local: usize,
    pub part_len: usize,
    pub rows: usize,
    pub k: usize,
    pub sigma: Vec<usize>,
    /// `recipes[j]` is answered as base index `sigma[j]`.
    pub recipes: Vec<Vec<Term>>,
    /// `None` for servers that are not contacted.
    pub envelopes: Vec<Option<Envelope>>,
    pub mode: ResponseMode,
}

impl Plan {
    pub fn contacted(&self) -> usize {
        self.envelopes.iter().filter(|e| e.is_some()).count()
    }

    /// Servers that belong to a chosen recipe.
    pub fn covered(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.recipes.iter().flat_map(|r| recipe_servers(r)).collect();
        s.sort_unstable();
        s
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Accounting {
    pub uploaded_bits: u64,
    pub downloaded_bits: u64,
    pub servers_contacted: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub plan: Plan,
    pub answers: Vec<Option<Vec<Elem>>>,
    pub accounting: Accounting,
}

fn envelope_index(mode: ResponseMode, c: usize) -> u8 {
    match mode {
        ResponseMode::AllAnswers => ALL_INDICES,
        _ => c as u8,
    }
}

pub(crate) fn dummy_envelope(
    p: &dyn LinearPirProtocol,
    part_len: usize,
    mode: ResponseMode,
    coins: &mut dyn Coins,
) -> Envelope {
    let c = coins.draw(p.k() as u32) as usize;
    let query = p.marginal(part_len, c, coins);
    Envelope { index: envelope_index(mode, c), query }
}

/// Base queries, `sigma`, and the envelopes of servers in chosen recipes.
/// Uncovered servers are left `None`.
pub(crate) fn plan_core(
    scheme: &dyn RecoveryScheme,
    part_len: usize,
    p: &dyn LinearPirProtocol,
    i: usize,
    opts: &RetrieveOptions,
    coins: &mut dyn Coins,
) -> Result<Plan, EmulationError> {
    if scheme.field() != p.field() {
        return Err(EmulationError::Mismatch("protocol and code fields differ".into()));
    }
    let k = p.k();
    if k > scheme.k() {
        return Err(EmulationError::Mismatch(format!("{k}-server protocol on a {}-server code", scheme.k())));
    }
    if k >= ALL_INDICES as usize {
        return Err(EmulationError::Mismatch(format!("{k} base servers do not fit the index byte")));
    }
    let capacity = part_len * scheme.parts();
    if i >= capacity {
        return Err(EmulationError::IndexOutOfRange { i, n: capacity });
    }
    let (part, local) = (i / part_len, i % part_len);
    let m = scheme.servers();
    let down = |h: &usize| opts.failed.contains(h);
    let intact: Vec<Vec<Term>> =
        scheme.recipes(part).into_iter().filter(|r| !recipe_servers(r).iter().any(down)).collect();
    if intact.len() < k {
        return Err(EmulationError::TooManyFailures { needed: k, available: intact.len() });
    }
    let recipes: Vec<Vec<Term>> = intact.into_iter().take(k).collect();
    let queries = p.query(part_len, local, coins)?;
    let mut sigma: Vec<usize> = (0..k).collect();
    if opts.mode != ResponseMode::Unpermuted {
        for t in (1..k).rev() {
            let j = coins.draw(t as u32 + 1) as usize;
            sigma.swap(t, j);
        }
    }
    let mut envelopes = vec![None; m];
    for (j, r) in recipes.iter().enumerate() {
        let c = sigma[j];
        for h in recipe_servers(r) {
            envelopes[h] = Some(Envelope { index: envelope_index(opts.mode, c), query: queries[c].clone() });
        }
    }
    Ok(Plan { part, local, part_len, rows: scheme.rows(), k, sigma, recipes, envelopes, mode: opts.mode })
}

/// Routes the base queries to recipes and draws a dummy envelope for every
/// other server that is up. Draw order: base query, `sigma`, then dummies
/// by ascending server.
pub fn plan(
    scheme: &dyn RecoveryScheme,
    part_len: usize,
    p: &dyn LinearPirProtocol,
    i: usize,
    opts: &RetrieveOptions,
    coins: &mut dyn Coins,
) -> Result<Plan, EmulationError> {
    let mut plan = plan_core(scheme, part_len, p, i, opts, coins)?;
    for h in 0..plan.envelopes.len() {
        if plan.envelopes[h].is_none() && !opts.failed.contains(&h) {
            plan.envelopes[h] = Some(dummy_envelope(p, part_len, opts.mode, coins));
        }
    }
    Ok(plan)
}

/// A server's reply: for every stored cell in row order, the answer for the
/// envelope's index, or for every index under [`ALL_INDICES`].
pub fn answer_envelope(p: &dyn LinearPirProtocol, cells: &[Vec<Elem>], env: &Envelope) -> Result<Vec<Elem>, EmulationError> {
    let indices: Vec<usize> = if env.index == ALL_INDICES {
        (0..p.k()).collect()
    } else if (env.index as usize) < p.k() {
        vec![env.index as usize]
    } else {
        return Err(EmulationError::Mismatch(format!("envelope index {} for {} servers", env.index, p.k())));
    };
    let mut out = Vec::with_capacity(cells.len() * indices.len() * p.answer_len());
    for cell in cells {
        for &c in &indices {
            out.extend(p.answer(c, cell, &env.query)?);
        }
    }
    Ok(out)
}

/// Combines the answers of each recipe with its coefficients, puts the sum
/// of recipe `j` at base position `sigma(j)`, and reconstructs.
pub fn complete(plan: &Plan, p: &dyn LinearPirProtocol, answers: &[Option<Vec<Elem>>]) -> Result<Elem, EmulationError> {
    let f = p.field();
    let alen = p.answer_len();
    let per_row = if plan.mode == ResponseMode::AllAnswers { alen * plan.k } else { alen };
    let mut combined = vec![Vec::new(); plan.k];
    for (j, recipe) in plan.recipes.iter().enumerate() {
        let c = plan.sigma[j];
        let mut acc = vec![0; alen];
        for t in recipe {
            let a = answers.get(t.server).and_then(Option::as_ref).ok_or(EmulationError::MissingAnswer(t.server))?;
            if a.len() != plan.rows * per_row {
                return Err(EmulationError::BadAnswer {
                    server: t.server,
                    reason: format!("{} symbols, expected {}", a.len(), plan.rows * per_row),
                });
            }
            let offset = t.row * per_row + if plan.mode == ResponseMode::AllAnswers { c * alen } else { 0 };
            f.axpy(&mut acc, t.coef, &a[offset..offset + alen]);
        }
        combined[c] = acc;
    }
    Ok(p.reconstruct(plan.local, &combined)?)
}

/// Payload bits actually exchanged: query symbols up, answer symbols down.
pub fn measure(p: &dyn LinearPirProtocol, plan: &Plan, answers: &[Option<Vec<Elem>>]) -> Accounting {
    let b = p.field().bits_per_element() as u64;
    Accounting {
        uploaded_bits: plan.envelopes.iter().flatten().map(|e| e.query.len() as u64 * b).sum(),
        downloaded_bits: answers.iter().flatten().map(|a| a.len() as u64 * b).sum(),
        servers_contacted: plan.contacted(),
    }
}

pub fn retrieve_with(
    store: &CodedStore,
    p: &dyn LinearPirProtocol,
    i: usize,
    opts: &RetrieveOptions,
    coins: &mut dyn Coins,
) -> Result<(Elem, Session), EmulationError> {
    let plan = plan(store.scheme().as_ref(), store.part_len(), p, i, opts, coins)?;
    let answers = plan
        .envelopes
        .iter()
        .enumerate()
        .map(|(h, e)| e.as_ref().map(|e| answer_envelope(p, store.chunk(h), e)).transpose())
        .collect::<Result<Vec<_>, _>>()?;
    let bit = complete(&plan, p, &answers)?;
    let accounting = measure(p, &plan, &answers);
    Ok((bit, Session { plan, answers, accounting }))
}

/// Private retrieval of global index `i` with a uniform `sigma`.
pub fn retrieve(
    store: &CodedStore,
    p: &dyn LinearPirProtocol,
    i: usize,
    coins: &mut dyn Coins,
) -> Result<(Elem, Session), EmulationError> {
    retrieve_with(store, p, i, &RetrieveOptions::default(), coins)
}

/// Retrieval with known failed servers: only recipes avoiding them are
/// used, and failed servers are not contacted.
pub fn retrieve_robust(
    store: &CodedStore,
    p: &dyn LinearPirProtocol,
    i: usize,
    failed: &[usize],
    coins: &mut dyn Coins,
) -> Result<(Elem, Session), EmulationError> {
    let opts = RetrieveOptions { mode: ResponseMode::Permuted, failed: failed.to_vec() };
    retrieve_with(store, p, i, &opts, coins)
}
