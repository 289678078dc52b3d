use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let result = precedence::cli::run(std::env::args_os());
    std::io::stdout().write_all(result.stdout.as_bytes()).ok();
    std::io::stderr().write_all(result.stderr.as_bytes()).ok();
    std::process::exit(result.exit_code);
}
