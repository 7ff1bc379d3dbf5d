fn main() {
    std::process::exit(dunkl_pauli::cli::run(std::env::args_os()));
}
