//! Command-line front end: load system definitions, run each construction,
//! emit replayable certificates and reports.
//!
//! Exit status: 0 when every asserted inequality verified, 1 on domain
//! errors or failed verification, 2 on malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use symdyn::analysis::{
    classify_dichotomy, decimal_string, point_classifier, positive_entropy_report, sft_entropy,
    ClassifiedPoint, Dichotomy,
};
use symdyn::certificate::{self, Certificate};
use symdyn::chains::{chain_mixing_constant, connect, decompose, primitivity_index};
use symdyn::dyadic::Dyadic;
use symdyn::embedding::{chacon_word, embed_full_shift, witness_points};
use symdyn::error::Error;
use symdyn::measures::{
    approximate_measure, parse_rat, rat_str, sigmund_candidates, weak_star_distance,
    MeasureRepr,
};
use symdyn::shadowing::{shadowing_modulus, trace, PseudoOrbit};
use symdyn::specification::{
    periodic_spec_point, rr_spec_point, spec_constant, SpecRequest,
};
use symdyn::systems::{io, Point, Product, Sft, System, UpPoint, Word};

#[derive(Parser)]
#[command(name = "symdyn", version, about = "exact shift-space constructions with certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SystemArg {
    /// System definition file (sft/odometer/product format).
    #[arg(long)]
    system: PathBuf,
}

#[derive(Args)]
struct OutArg {
    /// Write the certificate/report here (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace a pseudo-orbit at resolution eps and emit the certificate.
    Trace {
        #[command(flatten)]
        system: SystemArg,
        /// Pseudo-orbit file: `delta=` header, optional `periodic`, one point per line.
        #[arg(long)]
        orbit: PathBuf,
        #[arg(long)]
        eps: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Build an eps-chain of a given length between two cylinders.
    Chains {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        eps: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Topological decomposition into basic and elementary sets.
    Decompose {
        #[command(flatten)]
        system: SystemArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Embed a full shift refining the given target cylinders.
    Embed {
        #[command(flatten)]
        system: SystemArg,
        /// Comma-separated target cylinder words, e.g. `0,1`.
        #[arg(long)]
        targets: String,
        #[arg(long)]
        eps: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Specification points (periodic or regularly recurrent cascade).
    Spec {
        /// `periodic` or `rr`.
        mode: String,
        #[command(flatten)]
        system: SystemArg,
        /// Request file: `eps=`, `p=`, repeated `window a= b= point=`.
        #[arg(long)]
        request: PathBuf,
        #[arg(long, default_value_t = 3)]
        stages: u32,
        #[arg(long)]
        horizon: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Measure operations: approx | distance | sigmund.
    Measure {
        #[command(subcommand)]
        op: MeasureOp,
    },
    /// Classify a point at a horizon and cylinder depth.
    Classify {
        #[command(flatten)]
        system: SystemArg,
        /// Point as `pre=<digits> per=<digits>`.
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 4096)]
        horizon: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 32)]
        k_cap: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Certified enclosure of the topological entropy.
    Entropy {
        #[command(flatten)]
        system: SystemArg,
        /// Enclosure width, e.g. `1e-9` or `1/1000000000`.
        #[arg(long, default_value = "1e-9")]
        tol: String,
        /// Also print the dichotomy and the seven-condition report.
        #[arg(long)]
        report: bool,
    },
    /// Ready-made demonstrations.
    Demo {
        #[command(subcommand)]
        which: DemoOp,
    },
    /// Replay a certificate independently; exit 0 iff everything verifies.
    Verify {
        certificate: PathBuf,
    },
}

#[derive(Subcommand)]
enum MeasureOp {
    /// Approximate an invariant measure by a periodic-orbit measure.
    Approx {
        #[command(flatten)]
        system: SystemArg,
        /// Measure file (`markov P=... pi=...` or `periodic point=...`).
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Certified weak-* distance between two measures.
    Distance {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        measure2: PathBuf,
        /// Tail tolerance (rational).
        #[arg(long, default_value = "1/1024")]
        tail: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Enumerate periodic-orbit measures with period >= ell.
    Sigmund {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum DemoOp {
    /// Print a Chacon prefix and classify it.
    Chacon {
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// The product of two-cycle SFTs without points of small period:
    /// build it, run the rr cascade, verify the certificate.
    NoPeriodicProduct {
        #[arg(long, default_value_t = 4)]
        factors: usize,
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Embed a binary full shift and emit the three hierarchy witnesses.
    Witnesses {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 4096)]
        horizon: usize,
    },
}

fn load_system(path: &Path) -> Result<System, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    io::parse_system(&text, &move |name| {
        std::fs::read_to_string(dir.join(name))
            .map_err(|e| Error::Input(format!("cannot read factor {name}: {e}")))
    })
}

fn as_sft(system: &System) -> Result<&Sft, Error> {
    match system {
        System::Sft(s) => Ok(s),
        _ => Err(Error::TypeMismatch("this command needs an SFT system".into())),
    }
}

fn emit(out: &OutArg, text: &str) -> Result<(), Error> {
    match &out.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_tol(s: &str) -> Result<BigRational, Error> {
    if let Some(rest) = s.strip_prefix("1e-") {
        let k: u32 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad tolerance {s:?}")))?;
        return Ok(BigRational::new(BigInt::from(1), BigInt::from(10u32).pow(k)));
    }
    parse_rat(s)
}

/// Two simple cycles of lengths n+1 and n+2 through a shared vertex; the
/// factor has no points of period n.
fn two_cycle_factor(n: usize) -> Sft {
    let size = 2 * n + 2; // hub + n tail of cycle A + (n+1) tail of cycle B
    let mut allowed = vec![false; size * size];
    let mut allow = |a: usize, b: usize| allowed[a * size + b] = true;
    // cycle A: 0 -> 1 -> ... -> n -> 0 (length n+1)
    for v in 0..n {
        allow(v, v + 1);
    }
    allow(n, 0);
    // cycle B: 0 -> n+1 -> ... -> 2n+1 -> 0 (length n+2)
    allow(0, n + 1);
    for v in n + 1..2 * n + 1 {
        allow(v, v + 1);
    }
    allow(2 * n + 1, 0);
    Sft::new(size, allowed).expect("two-cycle factor is essential")
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Trace { system, orbit, eps, out } => {
            let sys = load_system(&system.system)?;
            let text = std::fs::read_to_string(&orbit)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", orbit.display())))?;
            let orbit = PseudoOrbit::parse(&sys, &text)?;
            let eps = Dyadic::parse(&eps)?;
            let modulus = shadowing_modulus(&sys, &eps)?;
            let (z, cert) = trace(&sys, &orbit, &eps)?;
            let max = cert.max_distance();
            let file = Certificate::Trace { system: sys, orbit, eps: eps.clone(), z: z.clone() };
            emit(&out, &file.render())?;
            eprintln!(
                "traced by {z}; {} step distances < {eps} (max {max}); modulus {modulus}",
                cert.horizon,
            );
            Ok(true)
        }
        Command::Chains { system, from, to, length, eps, out } => {
            let sys = load_system(&system.system)?;
            let sft = as_sft(&sys)?;
            let eps = Dyadic::parse(&eps)?;
            let m = chain_mixing_constant(sft, &eps)?;
            let plan = connect(sft, &Word::parse(&from)?, &Word::parse(&to)?, length, &eps)?;
            let ok = plan.verify(sft)?;
            let cert = Certificate::Chain { system: sys, eps, words: plan.words };
            emit(&out, &cert.render())?;
            eprintln!("chain of length {length} built (mixing constant {m}); verified: {ok}");
            Ok(ok)
        }
        Command::Decompose { system, out } => {
            let sys = load_system(&system.system)?;
            let report = decompose(as_sft(&sys)?);
            emit(&out, &report.render())?;
            if let Some(idx) = primitivity_index(as_sft(&sys)?) {
                eprintln!("primitivity index {idx}");
            } else {
                eprintln!("not primitive");
            }
            Ok(true)
        }
        Command::Embed { system, targets, eps, out } => {
            let sys = load_system(&system.system)?;
            let sft = as_sft(&sys)?;
            let targets: Vec<Word> = targets
                .split(',')
                .map(Word::parse)
                .collect::<Result<_, _>>()?;
            let eps = Dyadic::parse(&eps)?;
            let emb = embed_full_shift(sft, &targets, &eps)?;
            let cert = Certificate::Embedding {
                system: sys,
                m: emb.m,
                r: emb.r,
                eps: emb.eps.clone(),
                common: emb.common_prefix,
                anchors: emb.anchors.clone(),
                probes: emb.probes.clone(),
                targets: emb.targets.clone(),
            };
            emit(&out, &cert.render())?;
            eprintln!("embedded {}-letter full shift for f^{} (eps used {})", emb.letters(), emb.m, emb.eps);
            Ok(true)
        }
        Command::Spec { mode, system, request, stages, horizon, out } => {
            let sys = load_system(&system.system)?;
            let text = std::fs::read_to_string(&request)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", request.display())))?;
            let req = SpecRequest::parse(&sys, &text)?;
            let horizon = horizon.unwrap_or(4 * req.p);
            let m = spec_constant(&sys, &req.eps)?;
            let (z, exact) = match mode.as_str() {
                "periodic" => {
                    let (z, cert) = periodic_spec_point(&sys, &req)?;
                    (z, cert.exact)
                }
                "rr" => {
                    let (z, cert, history) = rr_spec_point(&sys, &req, stages, horizon, 1 << 20)?;
                    eprintln!(
                        "cascade: {} stages, return lengths {:?}",
                        history.len(),
                        history.iter().map(|s| s.m).collect::<Vec<_>>()
                    );
                    (z, cert.exact)
                }
                other => return Err(Error::Input(format!("unknown spec mode {other:?}"))),
            };
            let cert = Certificate::Spec { system: sys, request: req, horizon, z: z.clone() };
            emit(&out, &cert.render())?;
            eprintln!("specification point {z}; constant M={m}; exact={exact}");
            Ok(true)
        }
        Command::Measure { op } => run_measure(op),
        Command::Classify { system, point, horizon, depth, k_cap, out } => {
            let sys = load_system(&system.system)?;
            let sft = as_sft(&sys)?;
            let p = io::parse_up_point(&point)?;
            let report =
                point_classifier(sft, ClassifiedPoint::Exact(&p), horizon, depth, k_cap)?;
            emit(&out, &report.render())?;
            Ok(true)
        }
        Command::Entropy { system, tol, report } => {
            let sys = load_system(&system.system)?;
            let tol = parse_tol(&tol)?;
            let sft = as_sft(&sys)?;
            let e = sft_entropy(sft, &tol);
            println!("lo={}", decimal_string(&e.lo, 12));
            println!("hi={}", decimal_string(&e.hi, 12));
            println!("exact_zero={}", e.exact_zero);
            println!("description={}", e.description);
            if report {
                match classify_dichotomy(sft) {
                    Dichotomy::Equicontinuous { .. } => println!("dichotomy=equicontinuous"),
                    Dichotomy::PositiveEntropy { witness, .. } => println!(
                        "dichotomy=positive-entropy (full shift for f^{} at symbol {})",
                        witness.m, witness.vertex.0
                    ),
                }
                print!("{}", positive_entropy_report(sft).render());
            }
            Ok(true)
        }
        Command::Demo { which } => run_demo(which),
        Command::Verify { certificate } => {
            let text = std::fs::read_to_string(&certificate)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", certificate.display())))?;
            let cert = certificate::parse(&text)?;
            let report = certificate::replay(&cert)?;
            println!("{}", if report.ok { "VERIFIED" } else { "FAILED" });
            println!("{}", report.detail);
            Ok(report.ok)
        }
    }
}

fn load_measure(sys: &System, path: &Path) -> Result<MeasureRepr, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let alphabet = match sys {
        System::Sft(s) => s.alphabet_size(),
        _ => return Err(Error::TypeMismatch("measures live on SFT systems".into())),
    };
    MeasureRepr::parse(alphabet, &text)
}

fn run_measure(op: MeasureOp) -> Result<bool, Error> {
    match op {
        MeasureOp::Approx { system, measure, eps, seed, out } => {
            let sys = load_system(&system.system)?;
            let sft = as_sft(&sys)?;
            let mu = load_measure(&sys, &measure)?;
            let eps = Dyadic::parse(&eps)?;
            let outcome = approximate_measure(sft, &mu, &eps, seed)?;
            let cert = Certificate::Distance {
                alphabet: mu.alphabet(),
                mu,
                nu: outcome.nu.clone(),
                lo: outcome.interval.lo.clone(),
                hi: outcome.interval.hi.clone(),
                terms: outcome.interval.terms,
            };
            emit(&out, &cert.render())?;
            eprintln!(
                "periodic approximation with period {} at distance <= {} (< {eps}); windows {}, sample length {}",
                outcome.diagnostics.p,
                rat_str(&outcome.interval.hi),
                outcome.diagnostics.m_windows,
                outcome.diagnostics.n_len,
            );
            Ok(true)
        }
        MeasureOp::Distance { system, measure, measure2, tail, out } => {
            let sys = load_system(&system.system)?;
            let mu = load_measure(&sys, &measure)?;
            let nu = load_measure(&sys, &measure2)?;
            let tail = parse_tol(&tail)?;
            let d = weak_star_distance(&mu, &nu, &tail)?;
            let cert = Certificate::Distance {
                alphabet: mu.alphabet(),
                mu,
                nu,
                lo: d.lo.clone(),
                hi: d.hi.clone(),
                terms: d.terms,
            };
            emit(&out, &cert.render())?;
            Ok(true)
        }
        MeasureOp::Sigmund { system, ell, count, out } => {
            let sys = load_system(&system.system)?;
            let sft = as_sft(&sys)?;
            let mut text = String::new();
            for m in sigmund_candidates(sft, ell).take(count) {
                text.push_str(&m.render());
            }
            emit(&out, &text)?;
            Ok(true)
        }
    }
}

fn run_demo(which: DemoOp) -> Result<bool, Error> {
    match which {
        DemoOp::Chacon { n } => {
            let w = chacon_word(n + 10_000 + 3);
            println!("prefix: {}", w.slice(0, n.min(w.len())));
            let report = point_classifier(
                &Sft::full_shift(2),
                ClassifiedPoint::Sampled(&w),
                10_000,
                3,
                32,
            )?;
            print!("{}", report.render());
            Ok(report.minimal && !report.regularly_recurrent)
        }
        DemoOp::NoPeriodicProduct { factors, eps, out } => {
            let factor_list: Vec<Sft> = (1..=factors).map(two_cycle_factor).collect();
            let product = Product::new(factor_list.clone())?;
            let sys = System::Product(product);
            let eps = Dyadic::parse(&eps)?;
            let m = spec_constant(&sys, &eps)?;
            // a single window following the all-hub orbit
            let window_point = Point::Product(symdyn::systems::ProductPoint {
                components: factor_list
                    .iter()
                    .enumerate()
                    .map(|(i, _)| {
                        let len = i + 2; // cycle A of factor i+1
                        let cycle: Vec<usize> = (0..len).collect();
                        UpPoint::periodic(Word::from_indices(&cycle)).expect("cycle word")
                    })
                    .collect(),
            });
            let req = SpecRequest {
                eps: eps.clone(),
                windows: vec![symdyn::specification::SpecWindow {
                    a: 0,
                    b: 3,
                    point: window_point,
                }],
                p: m + 16,
            };
            let horizon = 512;
            let (z, cert, history) = rr_spec_point(&sys, &req, 3, horizon, 1 << 20)?;
            eprintln!(
                "factors {factors}: no points of period 1..={factors}; cascade lengths {:?}; exact={}",
                history.iter().map(|s| s.m).collect::<Vec<_>>(),
                cert.exact
            );
            let file = Certificate::Spec { system: sys.clone(), request: req.clone(), horizon, z: z.clone() };
            emit(&out, &file.render())?;
            let v = symdyn::specification::verify_spec_certificate(&sys, &z, &req, horizon)?;
            println!("replay: {}", if v.ok { "VERIFIED" } else { "FAILED" });
            Ok(v.ok)
        }
        DemoOp::Witnesses { system, horizon } => {
            let sys = load_system(&system.system)?;
            let sft = as_sft(&sys)?;
            let targets = vec![Word::parse("0")?, Word::parse("1")?];
            let emb = embed_full_shift(sft, &targets, &Dyadic::parse("1/4")?)?;
            let ws = witness_points(&emb, horizon, 3, 32)?;
            for w in &ws {
                println!("== {} (stream {}) ==", w.label, w.alpha_description);
                println!("encoded: {}", w.encoded);
                print!("{}", w.report.render());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::Parse(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
