fn main() {
    std::process::exit(olives_lab::cli::main_with_args(std::env::args().collect()));
}
