fn main() {
    std::process::exit(pontrol::cli::run());
}
