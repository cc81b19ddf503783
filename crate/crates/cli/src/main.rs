use std::panic;

fn main() {
    // A panic is a bug, not bad input: report it as an internal error.
    let code = panic::catch_unwind(|| strucdecomp_cli::run(std::env::args_os())).unwrap_or(2);
    std::process::exit(code);
}
