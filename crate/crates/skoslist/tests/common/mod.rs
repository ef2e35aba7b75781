//! Helpers shared by the integration test targets.

use std::path::PathBuf;
use std::process::{Command, Output};

/// Path of a bundled fixture ledger.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Runs the compiled binary with the given arguments.
pub fn skoslist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skoslist"))
        .args(args)
        .output()
        .expect("the binary runs")
}

/// Standard output as UTF-8.
pub fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

/// Standard error as UTF-8.
pub fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

/// Exit code of a finished process.
pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("the process exits normally")
}
