use std::io::Write;
use std::path::PathBuf;

fn main() {
    let config = std::env::var_os(npc_coref_cli::CONFIG_ENV).map(PathBuf::from);
    let out = npc_coref_cli::run(std::env::args_os(), config.as_deref());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
