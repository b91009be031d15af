fn main() {
    std::process::exit(gauss_plp::cli::main_from(std::env::args()));
}
