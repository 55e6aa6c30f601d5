use std::fmt::Display;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coded_pir::array::{apir, array_max_k, example_2x25, example_7x4, ArrayCode};
use coded_pir::code::oracle::{code_max_k, max_pir_k};
use coded_pir::code::table::{bounds_cell, table_closure, table_csv, Replayer};
use coded_pir::code::{CodeJson, PirCode};
use coded_pir::construct::{
    balanced_multiplicity_code, constant_weight_code, cubic_code, example2_code, gf4_example_code, majority_logic_15_7,
    projective_plane, steiner_code, steiner_triple, Orientation, SteinerSystem,
};
use coded_pir::emulation::trace::{default_labels, example2_labels, exposition};
use coded_pir::emulation::{
    accounting_check, distribute, retrieve_with, Database, RecoveryScheme, ResponseMode, RetrieveOptions,
};
use coded_pir::gf::{FieldMatrix, FieldSpec};
use coded_pir::ledger;
use coded_pir::protocol::{
    correctness_check, linearity_selftest, privacy_audit, protocol_by_name, LinearPirProtocol, PrivacyMode, RandomTape,
    TV_THRESHOLD,
};
use coded_pir::service::{
    load_scheme, serve_tcp, Client, ClientConfig, InProcessCluster, ServerState, TcpTransport,
};

#[derive(Parser)]
#[command(name = "coded-pir", version, about = "PIR codes, coded PIR emulation, and a retrieval service")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build, check, and convert PIR codes.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Lower and upper bounds on the shortest code length.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Checks on a base PIR protocol.
    #[command(subcommand)]
    Protocol(ProtocolCmd),
    /// Coded retrieval without a network.
    #[command(subcommand)]
    Emulate(EmulateCmd),
    /// PIR array codes.
    #[command(subcommand)]
    Array(ArrayCmd),
    /// Run one server daemon over TCP.
    Serve(ServeArgs),
    /// Retrieve one symbol from running servers.
    Get(GetArgs),
    /// Storage overhead against measured communication, as CSV.
    Bench(BenchArgs),
    /// Published values that the derivations do not reproduce.
    Ledger,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cubic,
    SteinerColumn,
    SteinerRow,
    PgColumn,
    PgRow,
    ConstantWeight,
    #[value(name = "ml15-7")]
    Ml15_7,
    Balanced,
    Parity,
    Identity,
    Example2,
    Gf4Example,
    Table,
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Emit a code certificate as JSON.
    Build {
        #[arg(long, value_enum)]
        family: Family,
        /// Comma-separated integers, e.g. `3,4`.
        #[arg(long, value_delimiter = ',')]
        params: Vec<usize>,
        /// Steiner system text file instead of a generated triple system.
        #[arg(long)]
        design: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate.
    Verify {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// Largest number of disjoint recovery sets.
    Oracle {
        #[arg(short, long)]
        file: PathBuf,
        /// Message coordinate; the minimum over all when omitted.
        #[arg(short, long)]
        i: Option<usize>,
    },
    /// Generator matrix in the `q r c` text format.
    Export {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// Certificate from a generator matrix in text format, with witnesses
    /// found by the oracle.
    Import {
        #[arg(short, long)]
        file: PathBuf,
        #[arg(short, long)]
        k: Option<usize>,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    Table {
        #[arg(long, default_value_t = 32)]
        s_max: usize,
        #[arg(long, default_value_t = 16)]
        k_max: usize,
    },
    Cell {
        #[arg(short)]
        s: usize,
        #[arg(short)]
        k: usize,
    },
}

#[derive(Args, Clone)]
struct ProtocolArgs {
    /// Base protocol name (`xor`, `xork`, `xor2`, `xorN`).
    #[arg(long, default_value = "xork")]
    protocol: String,
    /// Base protocol server count; defaults to the code's `k`.
    #[arg(long = "pk")]
    protocol_k: Option<usize>,
}

#[derive(Subcommand)]
enum ProtocolCmd {
    Audit {
        #[arg(long, default_value = "xork")]
        name: String,
        #[arg(short, long, default_value_t = 3)]
        k: usize,
        #[arg(short, long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Sample this many tapes instead of enumerating all of them.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Permuted,
    All,
    Unpermuted,
}

impl From<ModeArg> for ResponseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Permuted => ResponseMode::Permuted,
            ModeArg::All => ResponseMode::AllAnswers,
            ModeArg::Unpermuted => ResponseMode::Unpermuted,
        }
    }
}

#[derive(Subcommand)]
enum EmulateCmd {
    /// Retrieve every position of a random database and check accounting.
    Run {
        #[arg(short, long)]
        file: PathBuf,
        #[command(flatten)]
        proto: ProtocolArgs,
        #[arg(short, long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "permuted")]
        mode: ModeArg,
        /// Servers treated as down.
        #[arg(long, value_delimiter = ',')]
        failed: Vec<usize>,
    },
    /// Query/response table for one part.
    Trace {
        #[arg(long, conflicts_with = "file")]
        example2: bool,
        #[arg(short, long)]
        file: Option<PathBuf>,
        /// Part, 1-based.
        #[arg(long, default_value_t = 1)]
        part: usize,
    },
}

#[derive(Subcommand)]
enum ArrayCmd {
    Build {
        #[arg(long, conflicts_with = "example")]
        t: Option<usize>,
        #[arg(long)]
        example: Option<ArrayExample>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Verify {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// Retrieve one position of a random database through the array code.
    Get {
        #[arg(short, long)]
        file: PathBuf,
        #[command(flatten)]
        proto: ProtocolArgs,
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        i: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ArrayExample {
    #[value(name = "2x25")]
    TwoBy25,
    #[value(name = "7x4")]
    SevenBy4,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:7000")]
    listen: String,
    /// Server index, 0-based.
    #[arg(long)]
    index: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, default_value = "xork")]
    protocol: String,
    #[arg(short, long)]
    k: usize,
}

#[derive(Args)]
struct GetArgs {
    #[arg(short, long)]
    config: PathBuf,
    #[arg(short, long)]
    i: usize,
    /// Upload this database first: one hex digit per symbol, whitespace
    /// ignored.
    #[arg(long)]
    database: Option<PathBuf>,
    #[arg(long)]
    robust: bool,
    #[arg(long, value_enum, default_value = "permuted")]
    mode: ModeArg,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 6)]
    s_max: usize,
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "4,8")]
    part_lens: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Exit status 1 with a message.
struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn fail<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(msg.into()))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn load_code(path: &Path) -> Result<PirCode, Failure> {
    Ok(CodeJson::parse(&read(path)?)?.into_code()?)
}

fn param(params: &[usize], at: usize, what: &str) -> Result<usize, Failure> {
    params.get(at).copied().ok_or_else(|| Failure(format!("missing parameter {what}")))
}

fn build_code(family: Family, params: &[usize], design: Option<&Path>) -> Result<PirCode, Failure> {
    let f = FieldSpec::binary();
    let steiner = |o: Orientation| -> Result<PirCode, Failure> {
        let sys = match design {
            Some(p) => SteinerSystem::from_text(&read(p)?)?,
            None => steiner_triple(param(params, 0, "n")?)?,
        };
        Ok(steiner_code(&sys, o)?)
    };
    let pg = |o: Orientation| -> Result<PirCode, Failure> {
        Ok(steiner_code(&projective_plane(param(params, 0, "q")? as u32)?, o)?)
    };
    Ok(match family {
        Family::Cubic => cubic_code(param(params, 0, "sigma")?, param(params, 1, "k")?)?,
        Family::SteinerColumn => steiner(Orientation::Column)?,
        Family::SteinerRow => steiner(Orientation::Row)?,
        Family::PgColumn => pg(Orientation::Column)?,
        Family::PgRow => pg(Orientation::Row)?,
        Family::ConstantWeight => constant_weight_code(param(params, 0, "r")?, param(params, 1, "k")?)?,
        Family::Ml15_7 => majority_logic_15_7(),
        Family::Balanced => balanced_multiplicity_code(param(params, 0, "s")?, param(params, 1, "k")?)?,
        Family::Parity => PirCode::parity(&f, param(params, 0, "s")?),
        Family::Identity => PirCode::identity(&f, param(params, 0, "s")?),
        Family::Example2 => example2_code(),
        Family::Gf4Example => gf4_example_code(),
        Family::Table => {
            let cell = bounds_cell(param(params, 0, "s")?, param(params, 1, "k")?)?;
            Replayer::new().build(&cell.provenance)?
        }
    })
}

fn code_cmd(cmd: CodeCmd) -> Outcome {
    match cmd {
        CodeCmd::Build { family, params, design, out } => {
            let code = build_code(family, &params, design.as_deref())?;
            emit(&code.to_json().to_string_pretty(), out.as_deref())
        }
        CodeCmd::Verify { file } => {
            let code = load_code(&file)?;
            let g = code.generator();
            let d = match g.min_distance() {
                Ok(d) if d >= code.k() => d.to_string(),
                Ok(d) => return fail(format!("min distance {d} below k = {}", code.k())),
                Err(_) if g.distance_at_least(code.k())? => format!(">={}", code.k()),
                Err(_) => return fail(format!("min distance below k = {}", code.k())),
            };
            println!("ok q={} s={} m={} k={} min_distance={d}", code.field().order(), code.s(), code.m(), code.k());
            Ok(())
        }
        CodeCmd::Oracle { file, i } => {
            let g = CodeJson::parse(&read(&file)?)?.to_parts()?.0;
            match i {
                Some(i) => {
                    let r = max_pir_k(&g, i)?;
                    println!("{}", r.k_max);
                    for w in &r.witnesses {
                        println!("{w}");
                    }
                }
                None => println!("{}", code_max_k(&g)?),
            }
            Ok(())
        }
        CodeCmd::Export { file } => {
            let code = load_code(&file)?;
            emit(&code.generator().to_text(), None)
        }
        CodeCmd::Import { file, k } => {
            let g = FieldMatrix::from_text(&read(&file)?)?;
            let mut witnesses = Vec::with_capacity(g.rows());
            for i in 0..g.rows() {
                witnesses.push(max_pir_k(&g, i)?.witnesses);
            }
            let k = k.unwrap_or_else(|| witnesses.iter().map(Vec::len).min().unwrap_or(0));
            for w in &mut witnesses {
                w.truncate(k);
            }
            let code = PirCode::new(g, k, witnesses)?;
            emit(&code.to_json().to_string_pretty(), None)
        }
    }
}

fn bounds_cmd(cmd: BoundsCmd) -> Outcome {
    match cmd {
        BoundsCmd::Table { s_max, k_max } => {
            print!("{}", table_csv(&table_closure(s_max, k_max)?));
        }
        BoundsCmd::Cell { s, k } => {
            let c = bounds_cell(s, k)?;
            println!("lower={} upper={} provenance={}", c.lower, c.upper, c.provenance);
        }
    }
    Ok(())
}

fn protocol_cmd(cmd: ProtocolCmd) -> Outcome {
    let ProtocolCmd::Audit { name, k, n, q, trials, samples, seed } = cmd;
    let field = FieldSpec::of_order(q)?;
    let p = protocol_by_name(&name, k, &field)?;
    let errors = correctness_check(p.as_ref(), n, trials, seed);
    println!("correctness: {errors} errors in {trials} trials");
    let linear = linearity_selftest(p.as_ref(), n, trials, seed);
    match &linear {
        Ok(()) => println!("linearity: ok"),
        Err(f) => println!("linearity: fails on server {} for query {:?}", f.server + 1, f.query),
    }
    let mode = match samples {
        Some(samples) => PrivacyMode::Sampled { samples, seed },
        None => PrivacyMode::Exact,
    };
    let mut private = true;
    for j in 0..k {
        let v = privacy_audit(p.as_ref(), j, n, 0, n - 1, mode)?;
        private &= match mode {
            PrivacyMode::Exact => v.identical,
            PrivacyMode::Sampled { .. } => v.distance < TV_THRESHOLD,
        };
        println!(
            "privacy server {}: identical={} tapes={} distance={:.4}",
            j + 1,
            v.identical,
            v.tapes,
            v.distance
        );
    }
    if errors > 0 || linear.is_err() || !private {
        return fail("audit failed");
    }
    Ok(())
}

fn base_protocol(args: &ProtocolArgs, scheme: &dyn RecoveryScheme) -> Result<Arc<dyn LinearPirProtocol>, Failure> {
    let k = args.protocol_k.unwrap_or(scheme.k());
    Ok(Arc::from(protocol_by_name(&args.protocol, k, scheme.field())?))
}

fn emulate_cmd(cmd: EmulateCmd) -> Outcome {
    match cmd {
        EmulateCmd::Run { file, proto, n, seed, mode, failed } => {
            let scheme = load_scheme(&file)?;
            let p = base_protocol(&proto, scheme.as_ref())?;
            let db = Database::random(scheme.field().clone(), n, seed);
            let store = distribute(&db, Arc::clone(&scheme))?;
            let opts = RetrieveOptions { mode: mode.into(), failed };
            let mut errors = 0;
            let mut last = None;
            for i in 0..n {
                let (v, session) = retrieve_with(&store, p.as_ref(), i, &opts, &mut RandomTape::split(seed, i as u64))?;
                accounting_check(&session, p.as_ref())?;
                errors += usize::from(v != db.get(i));
                last = Some(session.accounting);
            }
            let a = last.unwrap_or_default();
            println!(
                "positions={n} errors={errors} servers_contacted={} upload_bits={} download_bits={}",
                a.servers_contacted, a.uploaded_bits, a.downloaded_bits
            );
            if errors > 0 {
                return fail(format!("{errors} wrong retrievals"));
            }
            Ok(())
        }
        EmulateCmd::Trace { example2, file, part } => {
            let (code, labels) = match (example2, file) {
                (true, _) | (false, None) => (example2_code(), example2_labels()),
                (false, Some(f)) => {
                    let c = load_code(&f)?;
                    let l = default_labels(&c);
                    (c, l)
                }
            };
            if part == 0 || part > code.s() {
                return fail(format!("part {part} outside 1..={}", code.s()));
            }
            let sigma: Vec<usize> = (0..code.k()).collect();
            print!("{}", exposition(&code, part - 1, &sigma, &labels));
            Ok(())
        }
    }
}

fn array_cmd(cmd: ArrayCmd) -> Outcome {
    match cmd {
        ArrayCmd::Build { t, example, out } => {
            let code = match (t, example) {
                (Some(t), _) => apir(t)?,
                (None, Some(ArrayExample::TwoBy25)) => example_2x25(),
                (None, Some(ArrayExample::SevenBy4)) => example_7x4(),
                (None, None) => return fail("give --t or --example"),
            };
            emit(&code.to_string_pretty(), out.as_deref())
        }
        ArrayCmd::Verify { file } => {
            let code = ArrayCode::parse(&read(&file)?)?;
            let ks: Vec<usize> = (0..code.s_total()).map(|b| array_max_k(&code, b)).collect::<Result<_, _>>()?;
            println!(
                "ok m1={} m2={} s={} k={} overhead={} max_k_per_bit={ks:?}",
                code.m1(),
                code.m2(),
                code.s_total(),
                code.k(),
                code.overhead()
            );
            Ok(())
        }
        ArrayCmd::Get { file, proto, n, i, seed } => {
            let scheme: Arc<dyn RecoveryScheme> = Arc::new(ArrayCode::parse(&read(&file)?)?);
            let p = base_protocol(&proto, scheme.as_ref())?;
            let db = Database::random(scheme.field().clone(), n, seed);
            let store = distribute(&db, Arc::clone(&scheme))?;
            let (v, session) =
                retrieve_with(&store, p.as_ref(), i, &RetrieveOptions::default(), &mut RandomTape::new(seed))?;
            accounting_check(&session, p.as_ref())?;
            println!(
                "value={v} expected={} upload_bits={} download_bits={}",
                db.get(i),
                session.accounting.uploaded_bits,
                session.accounting.downloaded_bits
            );
            if v != db.get(i) {
                return fail("wrong value");
            }
            Ok(())
        }
    }
}

fn serve_cmd(args: ServeArgs) -> Outcome {
    let field = FieldSpec::of_order(args.q)?;
    let p: Arc<dyn LinearPirProtocol> = Arc::from(protocol_by_name(&args.protocol, args.k, &field)?);
    let listener = TcpListener::bind(&args.listen)?;
    eprintln!("server {} listening on {}", args.index, listener.local_addr()?);
    serve_tcp(listener, ServerState::new(args.index, p))?;
    Ok(())
}

fn parse_database(text: &str, field: &FieldSpec) -> Result<Database, Failure> {
    let symbols = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_digit(16).map(|d| d as u8).ok_or_else(|| Failure(format!("bad symbol {c:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Database::new(field.clone(), symbols)?)
}

fn get_cmd(args: GetArgs) -> Outcome {
    let cfg = ClientConfig::load(&args.config)?;
    let scheme = load_scheme(Path::new(&cfg.code))?;
    let p = cfg.protocol.build(scheme.as_ref())?;
    let transport = TcpTransport::new(cfg.servers.clone());
    let client = Client::new(&transport, Arc::clone(&scheme), p)?;
    if let Some(path) = &args.database {
        let db = parse_database(&read(path)?, scheme.field())?;
        client.upload(&distribute(&db, Arc::clone(&scheme))?)?;
    }
    let out = client.retrieve(args.i, args.mode.into(), args.robust, &mut RandomTape::new(cfg.seed))?;
    let w = out.wire;
    println!(
        "value={} servers_contacted={} payload_up_bits={} payload_down_bits={} frame_up_bytes={} frame_down_bytes={}",
        out.value, w.servers_contacted, w.payload_up_bits, w.payload_down_bits, w.frame_up_bytes, w.frame_down_bytes
    );
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> Outcome {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record([
        "s",
        "k",
        "m",
        "provenance",
        "overhead",
        "part_len",
        "n",
        "servers_contacted",
        "upload_bits",
        "download_bits",
        "analytic_upload_bits",
        "analytic_download_bits",
        "frame_up_bytes",
        "frame_down_bytes",
        "exact",
    ])?;
    let mut replayer = Replayer::new();
    let mut mismatches = 0;
    for cell in table_closure(args.s_max, args.k_max)? {
        if cell.k < 2 {
            continue;
        }
        let code: Arc<dyn RecoveryScheme> = Arc::new(replayer.build(&cell.provenance)?);
        let p: Arc<dyn LinearPirProtocol> = Arc::from(protocol_by_name("xork", cell.k, code.field())?);
        for &len in &args.part_lens {
            let n = len * cell.s;
            let db = Database::random(code.field().clone(), n, args.seed);
            let store = distribute(&db, Arc::clone(&code))?;
            let cluster =
                InProcessCluster::spawn((0..code.servers()).map(|h| ServerState::new(h, Arc::clone(&p))).collect());
            let client = Client::new(&cluster, Arc::clone(&code), Arc::clone(&p))?;
            client.upload(&store)?;
            let i = (args.seed as usize).wrapping_mul(7919) % n;
            let out = client.retrieve(i, ResponseMode::Permuted, false, &mut RandomTape::split(args.seed, i as u64))?;
            let exact = out.value == db.get(i) && accounting_check(&out.session, p.as_ref()).is_ok();
            mismatches += usize::from(!exact);
            let m = code.servers() as u64;
            w.write_record([
                cell.s.to_string(),
                cell.k.to_string(),
                code.servers().to_string(),
                cell.provenance.to_string(),
                format!("{:.4}", code.servers() as f64 / cell.s as f64),
                len.to_string(),
                n.to_string(),
                out.wire.servers_contacted.to_string(),
                out.wire.payload_up_bits.to_string(),
                out.wire.payload_down_bits.to_string(),
                (m * p.upload_bits(len)).to_string(),
                (m * code.rows() as u64 * p.download_bits(len)).to_string(),
                out.wire.frame_up_bytes.to_string(),
                out.wire.frame_down_bytes.to_string(),
                exact.to_string(),
            ])?;
        }
    }
    w.flush()?;
    if mismatches > 0 {
        return fail(format!("{mismatches} runs off the closed form"));
    }
    Ok(())
}

fn ledger_cmd() -> Outcome {
    print!("{}", ledger::report(&ledger::discrepancies()?));
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Code(c) => code_cmd(c),
        Cmd::Bounds(c) => bounds_cmd(c),
        Cmd::Protocol(c) => protocol_cmd(c),
        Cmd::Emulate(c) => emulate_cmd(c),
        Cmd::Array(c) => array_cmd(c),
        Cmd::Serve(a) => serve_cmd(a),
        Cmd::Get(a) => get_cmd(a),
        Cmd::Bench(a) => bench_cmd(a),
        Cmd::Ledger => ledger_cmd(),
    }
}

fn main() -> ExitCode {
    #[cfg(unix)]
    // SAFETY: restores the default disposition before any output is written.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
