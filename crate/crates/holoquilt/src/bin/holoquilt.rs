fn main() {
    std::process::exit(holoquilt::cli::run());
}
