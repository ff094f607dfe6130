fn main() {
    std::process::exit(eok::cli::dispatch(std::env::args()));
}
