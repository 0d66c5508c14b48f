use std::io::{self, BufReader, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lcfkit::session::protocol::serve;
use lcfkit::session::repl::Repl;
use lcfkit::session::Session;
use lcfkit::store::{report, Store, StoreError};
use lcfkit::syntax::Mode;

#[derive(Parser)]
#[command(name = "lcfkit", version, about = "Interactive theorem prover for higher-order logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Extra directory to search for theory files (repeatable).
    #[arg(long = "path", value_name = "P")]
    paths: Vec<PathBuf>,
    /// Print formulas with ASCII connectives.
    #[arg(long)]
    ascii: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive proof session on the terminal.
    Repl {
        #[command(flatten)]
        common: Common,
    },
    /// Load theory files, replaying every proof, and print a report.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// JSON protocol on standard streams or a socket.
    Serve {
        #[command(flatten)]
        common: Common,
        /// `host:port` for TCP, otherwise a Unix socket path.
        #[arg(long, value_name = "ADDR")]
        socket: Option<String>,
    },
}

fn session(common: &Common) -> Session {
    let mut s = Session::new(Store::from_env(common.paths.clone()));
    if common.ascii {
        s.set_mode(Mode::Ascii);
    }
    s
}

/// 1 for a failed proof or an inconsistent theory, 2 for input that could
/// not be read or parsed.
fn exit_code(e: &StoreError) -> u8 {
    match e {
        StoreError::Proof { .. } | StoreError::Kernel { .. } => 1,
        _ => 2,
    }
}

fn check(common: &Common, files: &[PathBuf]) -> u8 {
    let mut store = Store::from_env(common.paths.clone());
    let mut code = 0;
    for f in files {
        match store.load_file(f) {
            Ok(thy) => println!("{}", report(&thy)),
            Err(e) => {
                eprintln!("error: {e}");
                if let StoreError::Proof { tactic, goals, .. } = &e {
                    if let Some(t) = tactic {
                        eprintln!("  tactic: {t}");
                    }
                    for (k, g) in goals.iter().enumerate() {
                        eprintln!("  {}. {g}", k + 1);
                    }
                }
                code = code.max(exit_code(&e));
            }
        }
        for w in store.take_warnings() {
            eprintln!("warning: {w}");
        }
    }
    code
}

fn repl(common: &Common) -> Result<()> {
    let interactive = io::stdin().is_terminal();
    if interactive {
        println!("lcfkit {}; type `help` for commands", env!("CARGO_PKG_VERSION"));
    }
    let mut r = Repl::new(session(common));
    r.run(io::stdin().lock(), io::stdout().lock(), interactive.then_some("lcfkit> "))
        .context("terminal i/o failed")
}

fn serve_socket(common: &Common, addr: &str) -> Result<()> {
    if let Ok(sock) = addr.parse::<std::net::SocketAddr>() {
        let listener = std::net::TcpListener::bind(sock).with_context(|| format!("cannot listen on {addr}"))?;
        eprintln!("listening on {}", listener.local_addr()?);
        for stream in listener.incoming() {
            let stream = stream?;
            let reader = BufReader::new(stream.try_clone()?);
            let mut s = session(common);
            std::thread::spawn(move || serve(reader, stream, &mut s));
        }
        return Ok(());
    }
    serve_unix(common, addr)
}

#[cfg(unix)]
fn serve_unix(common: &Common, path: &str) -> Result<()> {
    use std::os::unix::net::UnixListener;
    let listener = UnixListener::bind(path).with_context(|| format!("cannot listen on {path}"))?;
    eprintln!("listening on {path}");
    for stream in listener.incoming() {
        let stream = stream?;
        let reader = BufReader::new(stream.try_clone()?);
        let mut s = session(common);
        std::thread::spawn(move || serve(reader, stream, &mut s));
    }
    Ok(())
}

#[cfg(not(unix))]
fn serve_unix(_: &Common, addr: &str) -> Result<()> {
    anyhow::bail!("{addr} is not a host:port address")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { common, files } => return ExitCode::from(check(common, files)),
        Command::Repl { common } => repl(common),
        Command::Serve { common, socket: None } => {
            let mut s = session(common);
            serve(io::stdin().lock(), io::stdout(), &mut s).context("protocol i/o failed")
        }
        Command::Serve { common, socket: Some(addr) } => serve_socket(common, addr),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
