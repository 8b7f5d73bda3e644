use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use iwasawa::arith::lcm;
use iwasawa::char_ideal::{char_of_presentation, LambdaTrunc, MatrixInput, PresentedModule};
use iwasawa::char_ideal::presentation::parse_cell;
use iwasawa::characters::DirichletChar;
use iwasawa::exact::{bernoulli, gen_bernoulli};
use iwasawa::group_ring::division_level;
use iwasawa::harness::{self, parse_char, parse_galois, ScenarioReport};
use iwasawa::l_elements::{iwasawa_series_at_level, lp_eval_series, lp_oracle, odd_partner, stickelberger};
use iwasawa::padic::{CoeffRing, SeedPolicy};
use iwasawa::Error;

#[derive(Parser)]
#[command(name = "iwa", about = "Iwasawa series, p-adic L-values and characteristic ideals")]
struct Cli {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// p-adic precision M
    #[arg(long, global = true, default_value_t = 6)]
    precision: u32,
    /// T-adic truncation N
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Tower level for series computations (default: the smallest sufficient one)
    #[arg(long, global = true)]
    level: Option<u32>,
    /// Embedding of roots of unity: smallest or largest residue factor
    #[arg(long, global = true, default_value = "smallest")]
    seed_policy: String,
    /// Include wall-clock time in JSON reports (breaks byte-identical output)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bernoulli number B_n
    Bernoulli { n: usize },
    /// Generalized Bernoulli number B_{k,chi}
    GenBernoulli {
        k: usize,
        chi: String,
        /// prime fixing omega for teich:j
        #[arg(long)]
        p: Option<u64>,
    },
    /// Coefficients of the Stickelberger element at modulus f p^k
    Stickelberger {
        #[arg(long)]
        f: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
    },
    /// f(T, chi omega) for odd chi
    LpSeries {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        chi: String,
        #[arg(long = "M")]
        m: Option<u32>,
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// L_p(1-k, theta) for even theta, e.g. --at 1-2 or --at -1
    LpEval {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        chi: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// mu and lambda of f(T, chi omega)
    MuLambda {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        chi: String,
    },
    /// CHAR of a module presented by a square matrix (JSON, or CSV with --p)
    CharIdeal {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Run a verification suite
    Verify {
        suite: Suite,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long)]
        max_conductor: Option<u64>,
        #[arg(long)]
        max_k: Option<u32>,
        /// tame moduli for the compat suite
        #[arg(long, value_delimiter = ',')]
        f: Option<Vec<u64>>,
        /// primes l for the euler and mc suites
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<u64>>,
        /// Galois characters for the euler suite, separated by ';'
        #[arg(long, value_delimiter = ';')]
        rho: Option<Vec<String>>,
        /// single odd character for mc
        #[arg(long)]
        chi: Option<String>,
        #[arg(long, default_value_t = 60)]
        max_cyclo: u64,
    },
    /// Irregular pairs (p, k) up to a bound and the matching series
    IrregularScan {
        #[arg(long, default_value_t = 150)]
        max: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Interpolation,
    Mu,
    Compat,
    Euler,
    Mc,
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::NotPrimitive { .. } | Error::Unsupported(_) | Error::ZeroDivisor(_) => 2,
        Error::PrecisionExhausted(_) => 3,
        Error::Mismatch(_) | Error::NotIntegral(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_for(&e))
        }
    }
}

fn ring(cli: &Cli, p: u64, m: u32, d: u64) -> Result<Arc<CoeffRing>, Error> {
    let policy: SeedPolicy = cli.seed_policy.parse()?;
    CoeffRing::with_policy(p, m, d, policy)
}

fn out(s: &str) {
    let mut o = std::io::stdout().lock();
    // a closed pipe (iwa ... | head) is not an error
    if let Err(e) = writeln!(o, "{}", s) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {}", e);
    }
}

fn emit(cli: &Cli, v: Value, text: String) {
    if cli.json {
        out(&serde_json::to_string_pretty(&v).unwrap());
    } else {
        out(&text);
    }
}

fn emit_report(cli: &Cli, r: &ScenarioReport) -> u8 {
    if cli.json {
        out(&serde_json::to_string_pretty(&r.to_json(cli.timing)).unwrap());
    } else {
        out(&r.to_string());
    }
    r.exit_code() as u8
}

/// Ring for chi with omega available: roots of unity of order lcm(ord chi, p - 1).
fn char_ring(cli: &Cli, p: u64, m: u32, spec: &str) -> Result<(DirichletChar, Arc<CoeffRing>), Error> {
    let base = ring(cli, p, m, p - 1)?;
    let chi = parse_char(spec, Some(&base))?;
    let r = ring(cli, p, m, lcm(chi.order(), p - 1))?;
    // teich:j is relative to the ring's zeta_{p-1}, which the wider ring keeps
    let chi = parse_char(spec, Some(&r))?;
    Ok((chi, r))
}

fn series_level(cli: &Cli, p: u64, m: u32, n: usize) -> Result<u32, Error> {
    let need = division_level(p, m, n);
    match cli.level {
        None => Ok(need),
        Some(k) if k >= need => Ok(k),
        Some(k) => Err(Error::invalid(format!(
            "level {} does not determine the series modulo ({}^{}, T^{}); need at least {}",
            k, p, m, n, need
        ))),
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let m = cli.precision;
    if m == 0 {
        return Err(Error::invalid("precision must be positive"));
    }
    match &cli.cmd {
        Cmd::Bernoulli { n } => {
            let b = bernoulli(*n);
            emit(cli, json!({"n": n, "B": b.to_string()}), format!("B_{} = {}", n, b));
        }
        Cmd::GenBernoulli { k, chi, p } => {
            let r = match p {
                Some(p) => Some(ring(cli, *p, m, p - 1)?),
                None => None,
            };
            let c = parse_char(chi, r.as_ref())?;
            if *k == 0 {
                return Err(Error::invalid("k must be positive"));
            }
            let b = gen_bernoulli(*k, c.table())?;
            emit(
                cli,
                json!({"k": k, "chi": c.label(), "B": b.to_string()}),
                format!("B_{{{},{}}} = {}", k, c.label(), b),
            );
        }
        Cmd::Stickelberger { f, p, k } => {
            let s = stickelberger(*f, *p, *k)?;
            let text = s
                .group()
                .units()
                .iter()
                .zip(s.elem().coeffs())
                .map(|(a, c)| format!("{}: {}", a, c))
                .collect::<Vec<_>>()
                .join("\n");
            emit(cli, s.elem().to_json(), text);
        }
        Cmd::LpSeries { p, chi, m: mm, n } => {
            let m = mm.unwrap_or(m);
            let n = n.or(cli.trunc).unwrap_or(12);
            let (chi, r) = char_ring(cli, *p, m, chi)?;
            let level = series_level(cli, *p, m, n)?;
            let s = iwasawa_series_at_level(&chi, &r, n, level)?;
            let text = format!(
                "f(T, {} omega) mod ({}^{}, T^{}) at level {}\n{}\nmu={} lambda={} reliable={}",
                chi.label(),
                p,
                m,
                n,
                level,
                s.series,
                s.mu(),
                s.lambda(),
                s.newton.reliable
            );
            emit(cli, s.to_json(), text);
            if !s.newton.reliable {
                return Ok(3);
            }
        }
        Cmd::LpEval { p, chi, at } => {
            let k = parse_at(at)?;
            let (theta, r) = char_ring(cli, *p, m, chi)?;
            let odd = odd_partner(&theta, &r)?;
            let n = cli.trunc.unwrap_or(m.max(2) as usize);
            let level = series_level(cli, *p, m, n)?;
            let s = iwasawa_series_at_level(&odd, &r, n, level)?;
            let v = lp_eval_series(&s, k, 1)?;
            let oracle = lp_oracle(&theta, k, &r)?;
            let agree = v == oracle;
            emit(
                cli,
                json!({"p": p, "chi": theta.label(), "s": 1 - k as i64, "value": v.to_string(),
                       "precision": v.prec(), "oracle": oracle.to_string(), "agree": agree}),
                format!(
                    "L_{}({}, {}) = {} (oracle {})",
                    p,
                    1 - k as i64,
                    theta.label(),
                    v,
                    oracle
                ),
            );
            if !agree {
                return Ok(1);
            }
        }
        Cmd::MuLambda { p, chi } => {
            let n = cli.trunc.unwrap_or(12);
            let (chi, r) = char_ring(cli, *p, m, chi)?;
            let level = series_level(cli, *p, m, n)?;
            let s = iwasawa_series_at_level(&chi, &r, n, level)?;
            emit(
                cli,
                json!({"p": p, "chi": chi.label(), "M": m, "N": n, "level": level,
                       "mu": s.mu(), "lambda": s.lambda(), "reliable": s.newton.reliable}),
                format!(
                    "mu={} lambda={} for {} at ({}^{}, T^{}){}",
                    s.mu(),
                    s.lambda(),
                    chi.label(),
                    p,
                    m,
                    n,
                    if s.newton.reliable { "" } else { " (unreliable)" }
                ),
            );
            if !s.newton.reliable {
                return Ok(3);
            }
        }
        Cmd::CharIdeal { matrix, p } => {
            let text = std::fs::read_to_string(matrix)
                .map_err(|e| Error::invalid(format!("{}: {}", matrix.display(), e)))?;
            let module = if text.trim_start().starts_with('{') {
                MatrixInput::parse(&text)?.build()?
            } else {
                let p = p.ok_or_else(|| Error::invalid("CSV input needs --p"))?;
                csv_module(&text, &ring(cli, p, m, 1)?, cli.trunc.unwrap_or(12))?
            };
            let c = char_of_presentation(&module)?;
            emit(cli, c.to_json(), c.to_string());
        }
        Cmd::Verify { suite, primes, max_conductor, max_k, f, l, rho, chi, max_cyclo } => {
            let r = match suite {
                Suite::Interpolation => harness::run_interpolation_suite(
                    primes.as_deref().unwrap_or(&[3, 5, 7]),
                    max_conductor.unwrap_or(12),
                    max_k.unwrap_or(4),
                    m,
                )?,
                Suite::Mu => harness::run_mu_suite(
                    primes.as_deref().unwrap_or(&[3, 5, 7, 11, 13]),
                    max_conductor.unwrap_or(40),
                    m,
                    cli.trunc.unwrap_or(12),
                )?,
                Suite::Compat => harness::run_compat_suite(
                    f.as_deref().unwrap_or(&[1, 4, 5, 7, 8, 11]),
                    primes.as_deref().unwrap_or(&[3, 5, 7]),
                    max_k.unwrap_or(4),
                    *max_cyclo,
                )?,
                Suite::Euler => {
                    let specs = rho.clone().unwrap_or_else(|| vec!["triv".into(), "kappa".into(), "kappa^2*quad:-4".into()]);
                    let rhos = specs.iter().map(|s| parse_galois(s, None)).collect::<Result<Vec<_>, _>>()?;
                    harness::run_euler_suite(
                        primes.as_deref().unwrap_or(&[3, 5]),
                        l.as_deref().unwrap_or(&[2, 3, 7, 11]),
                        &rhos,
                        m,
                        cli.trunc.unwrap_or(12),
                    )?
                }
                Suite::Mc => {
                    let ls = l.as_deref().unwrap_or(&[2, 3, 7]);
                    let n = cli.trunc.unwrap_or(12);
                    match chi {
                        Some(spec) => {
                            let ps = primes.as_deref().unwrap_or(&[5]);
                            if ps.len() != 1 {
                                return Err(Error::invalid("--chi needs exactly one prime"));
                            }
                            let base = ring(cli, ps[0], m, ps[0] - 1)?;
                            let c = parse_char(spec, Some(&base))?;
                            harness::mc_specialization(ps[0], &c, ls, m, n)?
                        }
                        None => harness::run_mc_suite(primes.as_deref().unwrap_or(&[5, 7]), ls, m, n)?,
                    }
                }
            };
            return Ok(emit_report(cli, &r));
        }
        Cmd::IrregularScan { max } => {
            let r = harness::irregular_scan(*max, m, cli.trunc.unwrap_or(4))?;
            return Ok(emit_report(cli, &r));
        }
    }
    Ok(0)
}

/// `1-k` or an integer s = 1 - k with k >= 1.
fn parse_at(at: &str) -> Result<u32, Error> {
    let bad = || Error::invalid(format!("--at expects 1-k or a non-positive integer, got '{}'", at));
    if let Some(k) = at.strip_prefix("1-") {
        let k: u32 = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        return Ok(k);
    }
    let s: i64 = at.parse().map_err(|_| bad())?;
    if s > 0 {
        return Err(bad());
    }
    Ok((1 - s) as u32)
}

/// One matrix row per CSV record; a cell lists T-coefficients separated by ';' or spaces.
fn csv_module(text: &str, r: &Arc<CoeffRing>, n: usize) -> Result<PresentedModule, Error> {
    let lam = LambdaTrunc::new(r, n)?;
    let mut rows = Vec::new();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::invalid(format!("CSV: {}", e)))?;
        let row = rec
            .iter()
            .map(|cell| lam.from_coords(&parse_cell(cell)?))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    PresentedModule::new(&lam, rows)
}
