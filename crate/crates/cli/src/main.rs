use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tame_core::coh_dims::{euler_char, h_vector};
use tame_core::document::{from_json, to_canonical_json, Verdict};
use tame_core::kummer::{v_space, MarkedSetup};
use tame_core::seeker::{certify, verify};

#[derive(Parser)]
#[command(name = "tame-certify", version, about = "Cup-product certificates for restricted-ramification p-extensions of Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print h^0..h^3 of the marked curve and check the Euler characteristic.
    Dims(SetArgs),
    /// Print the Kummer group V_S^T.
    Vst(SetArgs),
    /// Run the search and write a certificate.
    Certify(CertifyArgs),
    /// Re-check a certificate file.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct SetArgs {
    #[arg(long)]
    p: u64,
    /// Ramification set, comma separated.
    #[arg(long = "S", default_value = "", value_parser = parse_list)]
    s: PrimeList,
    /// Marked set, comma separated.
    #[arg(long = "T", default_value = "", value_parser = parse_list)]
    t: PrimeList,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Primes never used by the search; p is added unless it lies in S.
    #[arg(long, default_value = "", value_parser = parse_list)]
    avoid: PrimeList,
    #[arg(long, default_value_t = 1_000_000)]
    bound: u64,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    path: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Debug)]
struct PrimeList(Vec<u64>);

fn parse_list(raw: &str) -> Result<PrimeList, String> {
    let mut out = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        out.push(part.parse::<u64>().map_err(|e| format!("{part:?}: {e}"))?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(PrimeList(out))
}

/// Failure classes mapped onto exit codes 1 and 2.
enum Exit {
    Failed(String),
    Usage(String),
}

fn setup(args: &SetArgs, avoid: &[u64]) -> Result<MarkedSetup, Exit> {
    MarkedSetup::new(args.p, &args.s.0, &args.t.0, avoid).map_err(|e| Exit::Usage(e.to_string()))
}

fn list(v: &[u64]) -> String {
    let items: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn dims(args: &SetArgs) -> Result<(), Exit> {
    let setup = setup(args, &[])?;
    let h = h_vector(&setup).map_err(|e| Exit::Usage(e.to_string()))?;
    let chi = euler_char(&setup);
    let euler_ok = h.alternating_sum() == chi;
    match args.format {
        Format::Json => println!(
            "{}",
            json!({"h": h.as_array(), "theta": h.theta, "delta": h.delta_flags, "euler_char": chi, "euler_ok": euler_ok})
        ),
        Format::Text => {
            println!("h=({},{},{},{})", h.h0, h.h1, h.h2, h.h3);
            println!("theta={}", h.theta);
            for (place, d) in &h.delta_flags {
                println!("delta_{place}={d}");
            }
            println!("euler_char={chi} {}", if euler_ok { "ok" } else { "MISMATCH" });
        }
    }
    if euler_ok {
        Ok(())
    } else {
        Err(Exit::Failed("Euler characteristic mismatch".into()))
    }
}

fn vst(args: &SetArgs) -> Result<(), Exit> {
    let setup = setup(args, &[])?;
    let v = v_space(&setup).map_err(|e| Exit::Usage(e.to_string()))?;
    // Basis vectors rendered as products of generator powers.
    let basis: Vec<String> = v
        .basis()
        .iter()
        .map(|vec| {
            let factors: Vec<String> = v
                .generators()
                .iter()
                .zip(vec)
                .filter(|(_, &e)| e != 0)
                .map(|(g, &e)| if e == 1 { g.to_string() } else { format!("{g}^{e}") })
                .collect();
            factors.join("*")
        })
        .collect();
    match args.format {
        Format::Json => println!("{}", json!({"dim": v.dim(), "generators": v.generators(), "basis": v.basis()})),
        Format::Text => {
            println!("dim={}", v.dim());
            println!("basis={{{}}}", basis.join(","));
        }
    }
    Ok(())
}

fn certify_cmd(args: &CertifyArgs) -> Result<(), Exit> {
    let p = args.set.p;
    let mut avoid = args.avoid.0.clone();
    if !args.set.s.0.contains(&p) && !avoid.contains(&p) {
        avoid.push(p);
    }
    let setup = setup(&args.set, &avoid)?;
    let cert = certify(&setup, args.bound).map_err(|e| Exit::Failed(e.to_string()))?;
    let text = to_canonical_json(&cert);
    if let Some(path) = &args.output {
        fs::write(path, &text).map_err(|e| Exit::Usage(format!("{}: {e}", path.display())))?;
    }
    match (args.set.format, &args.output) {
        (Format::Json, None) => print!("{text}"),
        (Format::Json, Some(_)) => println!("{}", json!({"verdict": cert.verdict, "digest": cert.digest})),
        (Format::Text, _) => {
            println!("verdict={}", if cert.verdict == Verdict::Pass { "pass" } else { "fail" });
            println!("S0={} q={}", list(&cert.s0), list(&cert.q_list));
            println!("rank={} columns={}", cert.rank, cert.cup_columns.len());
            if let Some(f) = &cert.failure {
                let at = f.index.map(|i| format!(" index {i}")).unwrap_or_default();
                println!("exhausted at {}{at} below {}", f.stage, f.bound);
            }
        }
    }
    match cert.verdict {
        Verdict::Pass => Ok(()),
        Verdict::Fail => Err(Exit::Failed("certificate verdict is fail".into())),
    }
}

fn verify_cmd(args: &VerifyArgs) -> Result<(), Exit> {
    let text = fs::read_to_string(&args.path).map_err(|e| Exit::Usage(format!("{}: {e}", args.path.display())))?;
    let ok = match from_json(&text) {
        Ok(cert) => verify(&cert).unwrap_or(false) && to_canonical_json(&cert) == text,
        Err(_) => false,
    };
    match args.format {
        Format::Json => println!("{}", json!({ "ok": ok })),
        Format::Text => println!("{}", if ok { "verified" } else { "rejected" }),
    }
    if ok {
        Ok(())
    } else {
        Err(Exit::Failed("verification failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Dims(a) => dims(a),
        Command::Vst(a) => vst(a),
        Command::Certify(a) => certify_cmd(a),
        Command::Verify(a) => verify_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit::Failed(msg)) => {
            eprintln!("tame-certify: {msg}");
            ExitCode::from(1)
        }
        Err(Exit::Usage(msg)) => {
            eprintln!("tame-certify: {msg}");
            ExitCode::from(2)
        }
    }
}
