//! Command implementations behind the `grit-dbscan` binary, exposed as a
//! library so the test suites can drive them in-process.

pub mod args;
pub mod bench;
pub mod commands;
pub mod io;
pub mod verify;

/// Exit codes: 0 success, 1 validation failure, 2 usage error.
#[derive(Debug, Clone)]
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    pub fn usage(message: String) -> Self {
        CmdError { code: 2, message }
    }

    pub fn validation(message: String) -> Self {
        CmdError { code: 1, message }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CmdError {}

/// Dispatches a parsed command line; returns the process exit code.
pub fn run(cli: &args::Cli) -> i32 {
    let result = match &cli.command {
        args::Command::Cluster(a) => commands::cmd_cluster(a),
        args::Command::Generate(a) => commands::cmd_generate(a),
        args::Command::Verify(a) => commands::cmd_verify(a),
        args::Command::Bench(a) => commands::cmd_bench(a),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.code
        }
    }
}
