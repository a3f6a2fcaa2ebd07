//! Thin process wrapper around [`hqm::cli`]: collect argv, dispatch,
//! exit with the CLI's code (0 ok, 1 error, 2 reference-tolerance
//! breach).

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(hqm::cli::main_entry(&argv));
}
